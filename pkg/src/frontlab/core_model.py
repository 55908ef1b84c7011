"""Structural parameters, coupling polynomials, and truncated power series.

Value types shared by every analytic layer: the slow-fast system's
structural parameters (N, epsilon, tau_j, d_j), the coupling function as
structured polynomial data, and a small truncated-Taylor arithmetic that
drives all series expansions downstream.

All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import FrontlabError

# Relative tolerance below which tau's (or tau/d ratios) count as coincident.
# Vandermonde conditioning degrades well before exact coincidence, so the
# designers must fail loudly rather than return garbage.
DISTINCTNESS_RTOL = 1e-10

#: Default truncation order for series work: covers degree-2N expansions for
#: N <= 5 plus slack.
DEFAULT_SERIES_ORDER = 12


def worker_count() -> int:
    """Worker cap from FRONTLAB_THREADS (default 1: fully serial runs)."""
    import os
    try:
        return max(1, int(os.environ.get("FRONTLAB_THREADS", "1")))
    except ValueError:
        return 1


def double_factorial(n: int) -> int:
    """n!! -- product of positive integers up to n with the parity of n.

    By convention 0!! = (-1)!! = 1.
    """
    if n <= 0:
        return 1
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def _min_relative_gap(values):
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return math.inf
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return 0.0
    sorted_vals = np.sort(values)
    return float(np.min(np.diff(sorted_vals))) / scale


@dataclass(frozen=True)
class SystemParams:
    """Structural parameters of the 1-fast/N-slow system.

    Attributes:
        n_slow: number N of slow components (>= 1).
        epsilon: scale separation parameter, > 0.
        tau: time-scale ratios tau_j > 0, length N.
        d: diffusion-length ratios d_j > 0, length N.
    """

    epsilon: float
    tau: tuple
    d: tuple
    n_slow: int = 0

    def __post_init__(self):
        tau = tuple(float(t) for t in self.tau)
        d = tuple(float(x) for x in self.d)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "d", d)
        n = len(tau)
        if self.n_slow and self.n_slow != n:
            raise FrontlabError(
                f"n_slow={self.n_slow} inconsistent with len(tau)={n}")
        object.__setattr__(self, "n_slow", n)
        if n < 1:
            raise FrontlabError("need at least one slow component")
        if len(d) != n:
            raise FrontlabError(f"len(d)={len(d)} != len(tau)={n}")
        if not self.epsilon > 0:
            raise FrontlabError(f"epsilon must be positive, got {self.epsilon}")
        if any(t <= 0 for t in tau):
            raise FrontlabError(f"all tau_j must be positive, got {tau}")
        if any(x <= 0 for x in d):
            raise FrontlabError(f"all d_j must be positive, got {d}")

    @property
    def pairwise_distinct_tau(self) -> bool:
        """True iff min gap of the tau_j exceeds DISTINCTNESS_RTOL * max tau."""
        return _min_relative_gap(self.tau) > DISTINCTNESS_RTOL

    @property
    def ratio(self) -> np.ndarray:
        """The ratios tau_j / d_j."""
        return np.asarray(self.tau) / np.asarray(self.d)

    @property
    def pairwise_distinct_ratio(self) -> bool:
        """True iff the ratios tau_j/d_j are pairwise distinct (same tolerance)."""
        return _min_relative_gap(self.ratio) > DISTINCTNESS_RTOL

    def with_epsilon(self, epsilon: float) -> "SystemParams":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True)
class Coupling:
    """Coupling function as structured polynomial data.

    F(V) = gamma + sum_j alpha_j V_j + sum_j beta_j V_j**2
           + sum_{k>=3} higher[k-3] V_1**k

    The univariate tail `higher` is only admitted for N = 1.  The nonlinear
    part has no constant term by construction, so F_nl(0) = 0.
    """

    gamma: float
    alpha: tuple
    beta: tuple
    higher: tuple = ()

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        higher = tuple(float(hk) for hk in self.higher)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "higher", higher)
        if len(beta) != len(alpha):
            raise FrontlabError(f"len(beta)={len(beta)} != len(alpha)={len(alpha)}")
        if higher and len(alpha) != 1:
            raise FrontlabError("univariate tail `higher` requires N = 1")

    @property
    def n_slow(self) -> int:
        return len(self.alpha)

    @property
    def max_degree(self) -> int:
        """Highest V-power appearing (2 without a univariate tail)."""
        return 2 + len(self.higher)

    def bound(self) -> float:
        """L1 bound on |F| over the unit box |V_j| <= 1."""
        return (abs(self.gamma) + sum(abs(a) for a in self.alpha)
                + sum(abs(b) for b in self.beta)
                + sum(abs(hk) for hk in self.higher))

    def is_affine(self) -> bool:
        return not self.higher and all(b == 0.0 for b in self.beta)

    def __call__(self, v):
        return eval_coupling(self, v)


def eval_coupling(coupling: Coupling, v) -> float:
    """Evaluate F at a point (or pointwise over trailing array axes).

    Accepts v of shape (N,) or (N, ...) for vectorized grid evaluation.
    """
    v = np.asarray(v, dtype=float)
    n = coupling.n_slow
    if v.shape[0] != n:
        raise FrontlabError(f"expected {n} components, got shape {v.shape}")
    alpha = np.asarray(coupling.alpha)
    beta = np.asarray(coupling.beta)
    out = coupling.gamma + np.tensordot(alpha, v, axes=1) \
        + np.tensordot(beta, v * v, axes=1)
    if coupling.higher:
        v1 = v[0]
        for k, coeff in enumerate(coupling.higher, start=3):
            out = out + coeff * v1 ** k
    if np.ndim(out) == 0:
        return float(out)
    return out


def coupling_gradient(coupling: Coupling, v) -> np.ndarray:
    """Exact partial derivatives dF/dV_j at v."""
    v = np.asarray(v, dtype=float)
    n = coupling.n_slow
    if v.shape != (n,):
        raise FrontlabError(f"expected {n} components, got shape {v.shape}")
    grad = np.asarray(coupling.alpha) + 2.0 * np.asarray(coupling.beta) * v
    if coupling.higher:
        v1 = v[0]
        grad = grad.copy()
        for k, coeff in enumerate(coupling.higher, start=3):
            grad[0] += k * coeff * v1 ** (k - 1)
    return grad


@dataclass(frozen=True)
class PowerSeries:
    """Real Taylor series truncated at a fixed order.

    coeffs[k] is the coefficient of x**k; the truncation order is
    len(coeffs) - 1.  Binary operations truncate to the smaller order of the
    two operands; composition requires the inner series to have zero constant
    term, and reciprocal a nonzero one.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise FrontlabError("a series needs at least the constant term")

    @classmethod
    def from_coeffs(cls, coeffs, order=None):
        coeffs = list(coeffs)
        if order is not None:
            coeffs = (coeffs + [0.0] * (order + 1 - len(coeffs)))[:order + 1]
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, value, order):
        return cls.from_coeffs([value], order=order)

    @classmethod
    def identity(cls, order):
        return cls.from_coeffs([0.0, 1.0], order=order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> float:
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries.from_coeffs(self.coeffs[:order + 1], order=order)

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            m = min(self.order, other.order)
            a, b = self.coeffs[:m + 1], other.coeffs[:m + 1]
            return PowerSeries(tuple(x + y for x, y in zip(a, b)))
        coeffs = list(self.coeffs)
        coeffs[0] += float(other)
        return PowerSeries(tuple(coeffs))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, PowerSeries) else -float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            m = min(self.order, other.order)
            out = np.zeros(m + 1)
            a = np.asarray(self.coeffs[:m + 1])
            b = np.asarray(other.coeffs[:m + 1])
            for k in range(m + 1):
                out[k] = np.dot(a[:k + 1], b[k::-1])
            return PowerSeries(tuple(out))
        return PowerSeries(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def power(self, k: int) -> "PowerSeries":
        out = PowerSeries.constant(1.0, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(x)); inner must have zero constant term."""
        if inner.coeffs[0] != 0.0:
            raise FrontlabError("compose requires inner series with zero constant term")
        m = min(self.order, inner.order)
        inner = inner.truncate(m)
        out = PowerSeries.constant(self.coeffs[min(m, self.order)], m)
        for k in range(min(m, self.order) - 1, -1, -1):
            out = out * inner + self.coeffs[k]
        return out

    def reciprocal(self) -> "PowerSeries":
        c0 = self.coeffs[0]
        if c0 == 0.0:
            raise FrontlabError("reciprocal requires nonzero constant term")
        out = [1.0 / c0]
        for n in range(1, self.order + 1):
            acc = sum(self.coeffs[k] * out[n - k] for k in range(1, n + 1))
            out.append(-acc / c0)
        return PowerSeries(tuple(out))

    def derivative(self) -> "PowerSeries":
        if self.order == 0:
            return PowerSeries((0.0,))
        return PowerSeries(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def binomial_series(exponent: float, order: int) -> PowerSeries:
    """Series of (1 + x)**exponent around x = 0."""
    coeffs = [1.0]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * (exponent - (k - 1)) / k)
    return PowerSeries(tuple(coeffs))


def series_sqrt_reciprocal(series: PowerSeries) -> PowerSeries:
    """1/sqrt(series) for a series with positive constant term."""
    c0 = series.coeffs[0]
    if c0 <= 0.0:
        raise FrontlabError("series_sqrt_reciprocal needs a positive constant term")
    # the constant term of series/c0 - 1 is identically zero; rounding of
    # 1/c0 * c0 must not be allowed to poison the composition
    scaled = PowerSeries((0.0,) + tuple(c / c0 for c in series.coeffs[1:]))
    return (1.0 / math.sqrt(c0)) * binomial_series(-0.5, series.order).compose(scaled)


def series_vstar(params: SystemParams, j: int, order: int = DEFAULT_SERIES_ORDER) -> PowerSeries:
    """Taylor series in c of the j-th plateau value (j is 1-based).

    The plateau value is c*tau_j / sqrt(4 d_j^2 + c^2 tau_j^2); its series is
    odd, with leading coefficient tau_j/(2 d_j).
    """
    if not 1 <= j <= params.n_slow:
        raise FrontlabError(f"slow-component index {j} out of range 1..{params.n_slow}")
    u = params.tau[j - 1] / (2.0 * params.d[j - 1])
    coeffs = [0.0] * (order + 1)
    k = 0
    while 2 * k + 1 <= order:
        coeffs[2 * k + 1] = ((-1) ** k
                             * double_factorial(2 * k - 1) / double_factorial(2 * k)
                             * u ** (2 * k + 1))
        k += 1
    return PowerSeries(tuple(coeffs))


# -- configuration document (de)serialization --------------------------------

_MODEL_KEYS = ("n_slow", "epsilon", "tau", "d", "gamma", "alpha", "beta", "higher")


def model_to_dict(params: SystemParams, coupling: Coupling) -> dict:
    return {
        "n_slow": params.n_slow,
        "epsilon": params.epsilon,
        "tau": list(params.tau),
        "d": list(params.d),
        "gamma": coupling.gamma,
        "alpha": list(coupling.alpha),
        "beta": list(coupling.beta),
        "higher": list(coupling.higher),
    }


def model_from_dict(doc: dict):
    """Build (SystemParams, Coupling) from a configuration mapping.

    Unknown keys are rejected; missing coupling entries default to zero.
    """
    unknown = set(doc) - set(_MODEL_KEYS)
    if unknown:
        raise FrontlabError(f"unknown configuration keys: {sorted(unknown)}")
    if "tau" not in doc or "d" not in doc or "epsilon" not in doc:
        raise FrontlabError("configuration requires `epsilon`, `tau` and `d`")
    params = SystemParams(epsilon=doc["epsilon"], tau=tuple(doc["tau"]),
                          d=tuple(doc["d"]), n_slow=doc.get("n_slow", 0))
    n = params.n_slow
    coupling = Coupling(
        gamma=doc.get("gamma", 0.0),
        alpha=tuple(doc.get("alpha", [0.0] * n)),
        beta=tuple(doc.get("beta", [0.0] * n)),
        higher=tuple(doc.get("higher", [])),
    )
    if coupling.n_slow != n:
        raise FrontlabError(f"alpha has {coupling.n_slow} entries for {n} slow components")
    return params, coupling


def dump_model(params: SystemParams, coupling: Coupling, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(params, coupling), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
