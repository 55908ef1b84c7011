"""Front speeds from the existence function, and fold curves.

The admissible leading-order speeds of uniformly travelling fronts are the
roots of Gamma0(c) = F(Vstar(c)) - sqrt(2) c / 3.  This script walks through
root finding with multiplicity estimates, the Taylor expansion at c = 0, and
the fold set of the cubic-coupling (cusp) example in the (alpha, gamma)
plane.
"""

import numpy as np

import frontlab as fl

params = fl.SystemParams(epsilon=0.2, tau=(1.0,), d=(1.0,))
cusp = fl.Coupling(0.0, (2.0,), (0.0,), higher=(-1.0,))   # F = 2V - V^3

print("== roots of the existence function (cusp coupling) ==")
for root, mult in fl.gamma0_roots(params, cusp, interval=(-10, 10)):
    print(f"  c = {root:+.6f}   multiplicity {mult}")

print("\n== Taylor expansion at c = 0 ==")
series = fl.gamma0_taylor(params, cusp, 5)
for k, coeff in enumerate(series.coeffs):
    print(f"  c^{k}: {coeff:+.6f}")

print("\n== fold curves in the (alpha, gamma) plane ==")
template = fl.Coupling(0.0, (0.0,), (0.0,), higher=(-1.0,))
branches = fl.fold_curves(params, template, ("alpha1", "gamma"),
                          (0.5, 3.0, -1.0, 1.0), n_c=801, c_range=(-3, 3))
for i, branch in enumerate(branches):
    pts, cs = branch.as_arrays()
    print(f"  branch {i}: {len(branch)} points, alpha in "
          f"[{pts[:, 0].min():.3f}, {pts[:, 0].max():.3f}], "
          f"gamma in [{pts[:, 1].min():.3f}, {pts[:, 1].max():.3f}]")
i0 = int(np.argmin(np.abs(np.concatenate([b.as_arrays()[1] for b in branches]))))
pts = np.vstack([b.as_arrays()[0] for b in branches])
print(f"  cusp point (fold arcs meet): alpha = {pts[i0, 0]:.6f} "
      f"(2 sqrt2/3 = {2 * np.sqrt(2) / 3:.6f}), gamma = {pts[i0, 1]:+.2e}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(5, 4))
    for branch in branches:
        p, _ = branch.as_arrays()
        ax.plot(p[:, 0], p[:, 1], "k-")
    ax.set_xlabel("alpha")
    ax.set_ylabel("gamma")
    ax.set_title("fold curves of the existence condition")
    fig.tight_layout()
    fig.savefig("demo01_folds.png", dpi=120)
    print("\nwrote demo01_folds.png")
except ImportError:
    pass
