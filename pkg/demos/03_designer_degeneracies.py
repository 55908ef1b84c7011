"""Manufacturing parameter sets with prescribed degeneracies.

The degeneracy conditions are Vandermonde systems in the coupling
coefficients, so they invert in closed form: an (N+1)-fold zero Evans root,
an existence function flat to a chosen order, both at once, and -- for a
single slow component -- any target Taylor data imprinted exactly.
"""

import numpy as np

import frontlab as fl

params = fl.SystemParams(epsilon=0.03, tau=(1.0, 2.25, 2.89), d=(1.0, 1.5, 1.7))

print("== fourfold zero Evans root ==")
alpha = fl.design_evans_degeneracy(params)
print("alpha =", alpha)
series = fl.evans_taylor_c0(params, fl.Coupling(0.0, tuple(alpha), (0.0,) * 3), 4)
print("Evans coefficients 1..4:", np.round(series.coeffs[1:], 14))

print("\n== existence degeneracies of every order ==")
for m in range(1, 8):
    a, b, g = fl.design_gamma_degeneracy(params, m)
    s = fl.gamma0_taylor(params, fl.Coupling(g, tuple(a), tuple(b)), m)
    low = max(abs(s.coefficient(k)) for k in range(m))
    print(f"  m = {m}: low coefficients <= {low:.1e}, "
          f"order-{m} coefficient = {s.coefficient(m):+.4e}")

print("\n== simultaneous construction from (d, tau_1) alone ==")
design = fl.design_simultaneous((1.0, 1.5, 1.7), 1.0, epsilon=0.03)
print("tau =", design.params.tau)
print("alpha =", design.alpha)
print("singular_limit_only =", design.singular_limit_only)

print("\n== imprinting scalar Taylor data (N = 1) ==")
p1 = fl.SystemParams(epsilon=0.05, tau=(1.0,), d=(1.0,))
targets = [0.0, 0.0, 0.0, 1.0]            # cusp normal form
coupling = fl.imprint_scalar_singularity(p1, targets)
print("coupling:", coupling)
print("recovered expansion:", np.round(fl.gamma0_taylor(p1, coupling, 3).coeffs, 12))

print("\n== linear unfolding of the small Evans roots ==")
rng = np.random.default_rng(0)
delta = 5e-3 * rng.standard_normal(3)
abar = fl.linear_unfolding_map(params, delta)
from frontlab.designer import unfolding_polynomial_roots
print("perturbation:", np.round(delta, 5))
print("predicted small roots:", np.round(unfolding_polynomial_roots(abar), 6))
