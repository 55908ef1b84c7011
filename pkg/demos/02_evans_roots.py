"""Critical spectrum of stationary fronts via the Evans function.

For a stationary front the Evans function reduces to
E0(lambda) = lambda + (3 sqrt2/2) sum_j (alpha_j/d_j)(1/sqrt(tau_j lambda + 1) - 1),
whose roots are the critical eigenvalues after an eps^2 rescaling.  This
script locates them by the argument principle, shows the a-priori root
bound, and demonstrates the fourfold zero root of the reference
transcritical parameter set.
"""

import numpy as np

import frontlab as fl
from frontlab.verify import reference_parameter_sets

# simple N = 1 example: perturb off the double-root coefficient
params = fl.SystemParams(epsilon=0.05, tau=(1.0,), d=(1.0,))
alpha_star = 2 * np.sqrt(2) / 3
for da in (-0.05, 0.05):
    coupling = fl.Coupling(0.0, (alpha_star + da,), (0.0,))
    ctx = fl.evans_context(params, coupling, 0.0)
    rs = fl.evans_roots(ctx, (-0.3, 0.3, -0.2, 0.2))
    print(f"alpha = alpha* {da:+}: roots "
          f"{[(f'{z:.5f}', m) for z, m in rs.roots]}")

print("\n== reference transcritical set: fourfold zero root ==")
_, params3, coupling3, _ = reference_parameter_sets()[0]
ctx3 = fl.evans_context(params3, coupling3, 0.0)
series = fl.evans_taylor_c0(params3, coupling3, 4)
print("Taylor coefficients:", np.round(series.coeffs, 14))
print("branch points:", np.round(ctx3.branch_points, 4))
bound = fl.evans_root_bound(ctx3)
print(f"a-priori root bound: |lambda| <= {bound:.3f}")
small = fl.evans_roots(ctx3, (-0.05, 0.05, -0.05, 0.05))
big = fl.evans_roots(ctx3, (-bound, bound, -bound, bound))
print(f"winding in |lambda| <= 0.05 box: {small.winding_total}")
print(f"winding in the full bound box:  {big.winding_total}")
print(f"essential spectrum right edge:  {fl.essential_spectrum_bound(params3):.3e}")
