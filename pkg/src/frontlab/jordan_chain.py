"""Eigenfunctions and generalized eigenfunctions at a stationary front.

The translation eigenfunction extends, at designed parameters, to a Jordan
chain whose slow components are closed-form polynomial-times-exponential
profiles

    v^j_+(x) = (-1)^j ((2j-1)!!/(2j)!!) tau^j (e^(-x)/d) sum_i a_j^i x^i,
    a_j^i = (2^i / i!) C(2j-i, j) / C(2j, j),

mirrored evenly onto the negative half-line.  The coefficients satisfy two
exact recurrences which this module checks in rational arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core_model import Coupling, SystemParams, coupling_gradient, double_factorial
from .errors import FrontlabError
from .existence import SQRT2, front_profile


def jordan_coeffs_closed(j: int):
    """Exact polynomial coefficients a_j^0..a_j^j as Fractions."""
    if j < 0:
        raise FrontlabError("chain index must be >= 0")
    c2jj = math.comb(2 * j, j)
    return [Fraction(2 ** i, math.factorial(i)) * Fraction(math.comb(2 * j - i, j), c2jj)
            for i in range(j + 1)]


def jordan_coeffs_recurrence(j: int):
    """Same coefficients generated from the two recurrences.

    Seeds: a_j^j = a_{j-1}^{j-1} / (2j - 1); then downward
        a_j^{i+1} = ((2j/(2j-1)) a_{j-1}^i + (i+1)(i+2) a_j^{i+2}) / (2(i+1))
    for i = j-2..0, and the even-reflection condition pins a_j^0 = a_j^1.
    """
    coeffs = [Fraction(1)]
    for jj in range(1, j + 1):
        prev = coeffs
        cur = [Fraction(0)] * (jj + 1)
        cur[jj] = prev[jj - 1] / (2 * jj - 1)
        for i in range(jj - 2, -1, -1):
            upper = cur[i + 2] if i + 2 <= jj else Fraction(0)
            cur[i + 1] = (Fraction(2 * jj, 2 * jj - 1) * prev[i]
                          + (i + 1) * (i + 2) * upper) / (2 * (i + 1))
        cur[0] = cur[1] if jj >= 1 else Fraction(1)
        coeffs = cur
    return coeffs


def chain_prefactor(j: int) -> Fraction:
    """Rational part of the prefactor: (-1)^j (2j-1)!!/(2j)!!."""
    return Fraction((-1) ** j * double_factorial(2 * j - 1), double_factorial(2 * j))


@dataclass(frozen=True)
class JordanPolynomial:
    """Slow-component profile v^j of the Jordan chain for scalars (tau, d).

    v_plus(x) = prefactor * (e^(-x)/d) * sum_i coeffs[i] x^i on x >= 0 and
    v_minus(x) = v_plus(-x).  coeffs are exact rationals; prefactor carries
    the tau-power and sign.
    """

    j: int
    tau: float
    d: float
    coeffs: tuple          # exact Fractions a_j^0..a_j^j

    @property
    def prefactor(self) -> float:
        return float(chain_prefactor(self.j)) * self.tau ** self.j

    @property
    def prefactor_fraction(self) -> Fraction:
        return chain_prefactor(self.j)

    def poly(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def v_plus(self, x):
        x = np.asarray(x, dtype=float)
        out = self.prefactor / self.d * self.poly(x) * np.exp(-x)
        return float(out) if out.ndim == 0 else out

    def v_minus(self, x):
        return self.v_plus(-np.asarray(x, dtype=float))


def jordan_poly(j: int, tau: float, d: float) -> JordanPolynomial:
    """Closed-form chain polynomial, cross-checked against the recurrences."""
    coeffs = jordan_coeffs_closed(j)
    if j <= 12 and coeffs != jordan_coeffs_recurrence(j):
        raise FrontlabError(
            f"closed form and recurrence disagree at chain index {j}")
    return JordanPolynomial(j=j, tau=float(tau), d=float(d), coeffs=tuple(coeffs))


@dataclass(frozen=True)
class ChainOdeReport:
    max_residual: float
    value_mismatch: float
    derivative_mismatch: float


def verify_chain_ode(profile_k: JordanPolynomial, profile_km1: JordanPolynomial,
                     extent: float = 15.0, step: float = 0.005) -> ChainOdeReport:
    """Residual of v_k'' = v_k + tau v_{k-1} on both half-lines.

    Fourth-order central differences on a uniform grid; also reports the
    value and first-derivative mismatches of the even reflection at zero.
    """
    import warnings
    if extent < 15.0 or step > 0.01:
        warnings.warn("grid may not resolve the exponential decay "
                      "(recommended: extent >= 15, step <= 0.01)", stacklevel=2)
    tau = profile_k.tau
    x = np.arange(0.0, extent, step)
    res = []
    for side in (+1, -1):
        f = profile_k.v_plus(x) if side > 0 else profile_k.v_minus(-x[::-1])[::-1]
        g = profile_km1.v_plus(x) if side > 0 else profile_km1.v_minus(-x[::-1])[::-1]
        d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) \
            / (12.0 * step * step)
        res.append(np.max(np.abs(d2 - f[2:-2] - tau * g[2:-2])))

    # one-sided 4th-order first derivatives at the matching point
    def d1(f0, fs):
        return (-25 * f0 + 48 * fs[0] - 36 * fs[1] + 16 * fs[2] - 3 * fs[3]) / (12 * step)

    vp0 = profile_k.v_plus(0.0)
    vm0 = profile_k.v_minus(0.0)
    dp = d1(vp0, [profile_k.v_plus(i * step) for i in range(1, 5)])
    dm = -d1(vm0, [profile_k.v_minus(-i * step) for i in range(1, 5)])
    return ChainOdeReport(max_residual=float(max(res)),
                          value_mismatch=abs(vp0 - vm0),
                          derivative_mismatch=abs(dp - dm))


@dataclass(frozen=True)
class ChainProfile:
    """Generalized eigenfunction number k at a stationary front.

    Pointwise-evaluable on the slow scale y; the fast interface occupies
    |y| <= sqrt(epsilon).  For k = 0 with spectral parameter `lam` this is
    the eigenfunction profile; for k >= 1 the fast U-value is the constant
    K_k and the slow components are the chain polynomials.
    """

    k: int
    params: SystemParams
    coupling: Coupling
    lam: complex = 0.0
    fast_value: float = 0.0                 # K_k for k >= 1

    def __post_init__(self):
        if self.k > 0:
            polys = tuple(jordan_poly(self.k, self.params.tau[j], self.params.d[j])
                          for j in range(self.params.n_slow))
            object.__setattr__(self, "_polys", polys)
            object.__setattr__(self, "_front", front_profile(
                self.params, self.coupling, 0.0, residual_tol=np.inf))
        else:
            hs = tuple(self.params.d[j] * cmath.sqrt(self.params.tau[j] * self.lam + 1.0)
                       for j in range(self.params.n_slow))
            if any(h.real <= 0 for h in hs):
                raise FrontlabError(
                    f"tau_j * lambda + 1 on the negative real axis for lambda={self.lam}")
            object.__setattr__(self, "_hs", hs)

    @property
    def interface_halfwidth(self):
        return math.sqrt(self.params.epsilon)

    def plateau(self, j: int):
        """Fast-field value of slow component j (1-based)."""
        if self.k == 0:
            return 1.0 / self._hs[j - 1]
        tau, d = self.params.tau[j - 1], self.params.d[j - 1]
        return float(chain_prefactor(self.k)) * tau ** self.k / d

    def u(self, y):
        y = np.asarray(y, dtype=float)
        w = self.interface_halfwidth
        eps = self.params.epsilon
        if self.k == 0:
            inner = SQRT2 / (2.0 * eps) / np.cosh(y / (SQRT2 * eps)) ** 2
            out = np.where(np.abs(y) <= w, inner, 0.0)
            return float(out) if out.ndim == 0 else out
        slow = np.zeros_like(y, dtype=float)
        for j in range(1, self.params.n_slow + 1):
            vj0 = np.where(y >= 0, self._front.v(j, np.maximum(y, w)),
                           self._front.v(j, np.minimum(y, -w)))
            grad_nl = (2.0 * self.coupling.beta[j - 1] * vj0
                       + (self._higher_grad(vj0) if j == 1 else 0.0))
            slow += (self.coupling.alpha[j - 1] + grad_nl) * self._slow_v(j, y)
        out = np.where(np.abs(y) <= w, self.fast_value, -0.5 * eps * slow)
        return float(out) if out.ndim == 0 else out

    def _higher_grad(self, v1):
        acc = np.zeros_like(v1)
        for kk, coeff in enumerate(self.coupling.higher, start=3):
            acc = acc + kk * coeff * v1 ** (kk - 1)
        return acc

    def _slow_v(self, j, y):
        # even reflection: v^k_-(x) = v^k_+(-x)
        poly = self._polys[j - 1]
        return poly.v_plus(np.abs(y) / self.params.d[j - 1])

    def v(self, j, y):
        """Slow component j (1-based) at position y."""
        y = np.asarray(y, dtype=float)
        w = self.interface_halfwidth
        if self.k == 0:
            h = self._hs[j - 1]
            d2 = self.params.d[j - 1] ** 2
            decay = np.exp(-h * np.abs(y) / d2)
            out = np.where(np.abs(y) <= w, 1.0 / h, decay / h)
            return complex(out) if out.ndim == 0 else out
        out = np.where(np.abs(y) <= w, self.plateau(j), self._slow_v(j, y))
        return float(out) if out.ndim == 0 else out


def eigenfunction_c0(params: SystemParams, lam: complex,
                     coupling: Coupling | None = None) -> ChainProfile:
    """Eigenfunction profile at spectral parameter lam for a stationary front.

    The slow components are (1/h_j) exp(-h_j |y| / d_j^2) with
    h_j = d_j sqrt(tau_j lam + 1); the fast component is the squared-secant
    interface mode, all up to one common scaling factor.
    """
    if coupling is None:
        coupling = Coupling(0.0, (0.0,) * params.n_slow, (0.0,) * params.n_slow)
    return ChainProfile(k=0, params=params, coupling=coupling, lam=complex(lam))


def taylor_condition_residuals(params: SystemParams, coupling: Coupling,
                               through_order: int) -> np.ndarray:
    """Residuals of the zero-root conditions sum_j alpha_j tau_j^k / d_j.

    Entry k-1 is the order-k condition, k = 1..through_order: the first must
    equal 2 sqrt(2)/3 and the rest zero for the chain to extend.
    """
    tau = np.asarray(params.tau)
    d = np.asarray(params.d)
    alpha = np.asarray(coupling.alpha)
    res = np.array([np.sum(alpha * tau ** k / d) for k in range(1, through_order + 1)])
    if through_order >= 1:
        res[0] -= 2.0 * SQRT2 / 3.0
    return res


def chain_profile(params: SystemParams, coupling: Coupling, k: int,
                  ell: int, rtol: float = 1e-8) -> ChainProfile:
    """k-th generalized eigenfunction for a multiplicity-(ell+1) zero root.

    Checks the first k solvability conditions on the linear coefficients and
    raises naming the first violated order.  K_1 = epsilon/(3 sqrt 2); the
    fast values K_k for k >= 2 are one order smaller and set to zero here.
    """
    if not 0 <= k <= ell:
        raise FrontlabError(f"chain index {k} must lie in 0..ell={ell}")
    if ell > params.n_slow:
        raise FrontlabError(f"chain length {ell} exceeds N = {params.n_slow}")
    if k == 0:
        return eigenfunction_c0(params, 0.0, coupling)
    residuals = taylor_condition_residuals(params, coupling, k)
    scale = max(1.0, float(np.max(np.abs(np.asarray(coupling.alpha)))))
    for order, res in enumerate(residuals, start=1):
        if abs(res) > rtol * scale:
            raise FrontlabError(
                f"solvability condition violated at order {order}: "
                f"residual {res:.3e} (needs multiplicity >= {k + 1} zero root)")
    fast = params.epsilon / (3.0 * SQRT2) if k == 1 else 0.0
    return ChainProfile(k=k, params=params, coupling=coupling, fast_value=fast)


def slow_field_u_limit(profile: ChainProfile) -> float:
    """Limit of the slow-field U-component of the chain profile at y -> 0.

    Evaluates -(eps/2) sum_j (alpha_j + dF_nl_j) Psi_{k,j} at the interface
    edge, where the front's slow plateaus vanish so the nonlinear gradient
    drops out; equals K_1 for k = 1 and 0 for k >= 2 at designed parameters.
    """
    if profile.k == 0:
        raise FrontlabError("defined for generalized eigenfunctions (k >= 1)")
    params, coupling = profile.params, profile.coupling
    grad = coupling_gradient(coupling, np.zeros(params.n_slow))
    total = sum(grad[j] * profile.plateau(j + 1) for j in range(params.n_slow))
    return -0.5 * params.epsilon * total
