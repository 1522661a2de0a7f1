"""Special functions and partial-fraction machinery.

The scalar routines (``ei``, ``expn``, ``dilog``) are written against a tiny
arithmetic shim so that the same code runs on Python floats and on
``mpmath.mpf`` values.  The closed-form rate expressions cancel heavily for
large antenna counts and are evaluated in extended precision through
:func:`adaptive_precision`.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special as sps

log = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286
_ZETA2 = math.pi ** 2 / 6
_FPMIN = 1e-300
_MAXIT = 10_000
# lower edge of the angular grid required by the Ei approximation
THETA_MIN = 0.065


def _ops(x):
    """Return (exp, log, eps, euler, zeta2) matching the numeric type of x."""
    if isinstance(x, mp.mpf):
        return mp.exp, mp.log, mp.eps, +mp.euler, mp.pi ** 2 / 6
    return math.exp, math.log, 2.220446049250313e-16, EULER_GAMMA, _ZETA2


# ----------------------------------------------------------------------
# exponential integrals
# ----------------------------------------------------------------------

def _e1(z):
    """E_1(z) for z > 0 (series below 1, continued fraction above)."""
    exp, log_, eps, euler, _ = _ops(z)
    if z <= 1:
        # E1(z) = -gamma - ln z - sum_k (-z)^k / (k k!)
        total = 0 * z
        term = -1 + 0 * z
        for k in range(1, _MAXIT):
            term = -term * z / k
            inc = term / k
            total += inc
            if abs(inc) < eps * abs(total):
                break
        return -euler - log_(z) + total
    return _expn_cf(1, z) * exp(-z)


def _expn_cf(n: int, x):
    """Modified Lentz evaluation of e^x E_n(x); converges well for x >= 1."""
    _, _, eps, _, _ = _ops(x)
    tiny = x * 0 + _FPMIN
    b = x + n
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, _MAXIT):
        an = -i * (n - 1 + i)
        b += 2
        d = 1 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1) < eps:
            return h
    raise ArithmeticError(f"continued fraction for E_{n}({x}) did not converge")


def ei(x):
    """Exponential integral Ei(x) for negative real x.

    Uses the convergent power series for ``|x| <= 1`` and a continued
    fraction beyond.  Accepts floats or ``mpmath.mpf`` values; the result
    has the same type.
    """
    if not x < 0:
        raise ValueError("only negative arguments supported")
    return -_e1(-x)


def expn(n: int, x):
    """Generalised exponential integral E_n(x) for n >= 1 and x > 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not x > 0:
        raise ValueError("x must be positive")
    if n == 1:
        return -ei(-x)
    exp, _, _, _, _ = _ops(x)
    if x >= 1:
        return _expn_cf(n, x) * exp(-x)
    # small x: recur upward from E_1, stable because x < n
    e = -ei(-x)
    ex = exp(-x)
    for k in range(1, n):
        e = (ex - x * e) / k
    return e


def expn_sequence(nmax: int, x) -> list:
    """Return ``[None, E_1(x), ..., E_nmax(x)]``.

    The recurrence ``E_{n+1} = (e^-x - x E_n)/n`` is run upward from index
    ``m0 ~ x`` and the reversed form downward, which keeps both directions
    stable.  At ``x = 0`` the sequence is ``1/(n-1)`` (E_1 is infinite and
    returned as ``None``).
    """
    out = [None] * (nmax + 1)
    if x == 0:
        for n in range(2, nmax + 1):
            out[n] = (x + 1) / (n - 1)
        return out
    exp, _, _, _, _ = _ops(x)
    ex = exp(-x)
    m0 = int(min(max(1, math.floor(float(x))), nmax))
    out[m0] = expn(m0, x)
    for n in range(m0, nmax):
        out[n + 1] = (ex - x * out[n]) / n
    for n in range(m0 - 1, 0, -1):
        out[n] = (ex - n * out[n + 1]) / x
    return out


def e1_scaled(s):
    """Vectorised ``exp(s) * E_1(s)`` for s > 0, safe for large s."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s <= 500.0
    out[small] = np.exp(s[small]) * sps.exp1(s[small])
    big = ~small
    if np.any(big):
        # asymptotic series sum_k (-1)^k k! / s^(k+1); 10 terms reach 1e-20 at s = 500
        r = 1.0 / s[big]
        acc = np.ones_like(r)
        for k in range(10, 0, -1):
            acc = 1 - k * r * acc
        out[big] = r * acc
    return out


# ----------------------------------------------------------------------
# Ei approximation (sum of exponentials on an angular grid)
# ----------------------------------------------------------------------

def _theta_grid(t: int) -> np.ndarray:
    # theta_p = p*pi/(2(T+1)), p = 1..T+1; the p=0 panel is dropped
    return np.arange(1, t + 2) * (np.pi / 2) / (t + 1)


def _b_from_grid(theta: np.ndarray) -> np.ndarray:
    cot = np.cos(theta) / np.sin(theta)
    return (cot[:-1] - cot[1:]) / (theta[1:] - theta[:-1])


@dataclass(frozen=True)
class EiApproxParams:
    """Parameters of the exponential-sum approximation of Ei(-x).

    ``theta_grid`` holds theta_1..theta_{T+1}; ``b`` holds the T finite
    panel coefficients b_2..b_{T+1} (the panel touching theta = 0 has an
    infinite coefficient and contributes nothing).
    """

    t: int = 20
    t_prime: int = 20
    theta_grid: tuple = field(default=None)
    theta_grid_prime: tuple = field(default=None)

    def __post_init__(self):
        if self.t < 1 or self.t_prime < 1:
            raise ValueError("T and T' must be positive integers")
        for name, t in (("theta_grid", self.t), ("theta_grid_prime", self.t_prime)):
            grid = getattr(self, name)
            if grid is None:
                grid = tuple(_theta_grid(t))
                object.__setattr__(self, name, grid)
            grid = np.asarray(grid, dtype=float)
            if grid.size != t + 1:
                raise ValueError(f"{name} must have T+1 = {t + 1} points")
            if np.any(np.diff(grid) <= 0) or grid[0] <= 0 or grid[-1] > np.pi / 2 + 1e-12:
                raise ValueError(f"{name} must be strictly increasing in (0, pi/2]")
            if grid[0] <= THETA_MIN:
                warnings.warn(
                    f"{name}[0] = {grid[0]:.4f} is below the recommended lower edge {THETA_MIN}",
                    stacklevel=3,
                )

    @property
    def a1(self) -> float:
        return 1.0 / (2 * (self.t + 1))

    @property
    def a2(self) -> float:
        return 1.0 / (2 * (self.t_prime + 1))

    @property
    def b(self) -> np.ndarray:
        return _b_from_grid(np.asarray(self.theta_grid))

    @property
    def b_prime(self) -> np.ndarray:
        return _b_from_grid(np.asarray(self.theta_grid_prime))


def ei_approx(x, params: EiApproxParams | None = None, form: str = "corrected"):
    """Closed-form exponential-sum approximation of Ei(-x), x > 0.

    ``form="corrected"`` evaluates ``-4 pi a1 a2 sum_p sum_q sqrt(b_p)
    exp(-b_p b'_q x)``, whose continuum limit is exactly ``-E_1(x)``.
    ``form="printed"`` keeps the extra ``sqrt(2)`` factor and the ``4 b_p
    b_q`` exponent of the published expression; it converges to
    ``-sqrt(2) E_1(4x)`` and is kept only for comparison.
    """
    params = params or EiApproxParams()
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    bp = params.b[:, None]
    bq = params.b_prime[None, :]
    if form == "corrected":
        scale, k = 4 * np.pi * params.a1 * params.a2, 1.0
    elif form == "printed":
        scale, k = 4 * np.sqrt(2) * np.pi * params.a1 * params.a2, 4.0
    else:
        raise ValueError(f"unknown form {form!r}")
    w = np.sqrt(bp) * np.ones_like(bq)
    expo = k * bp * bq
    vals = np.exp(-np.multiply.outer(x, expo)) * w
    return -scale * vals.sum(axis=(-2, -1))


class KernelRule(NamedTuple):
    """Exponential-sum rule ``exp(s) E_1(s) ~ sum_k w_k exp(-t_k s)``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(-np.multiply.outer(s, self.nodes)) @ self.weights


def kernel_rule_exact(s_min: float, order: int = 16) -> KernelRule:
    """Quadrature rule for ``exp(s) E_1(s) = int_0^inf exp(-s(e^y - 1)) dy``.

    Composite Gauss-Legendre on y with panels refined near 0 and unit panels
    up to where the integrand has decayed by e^-50 at ``s_min``.
    """
    if s_min <= 0:
        raise ValueError("s_min must be positive")
    ymax = math.log1p(50.0 / s_min)
    edges = [0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0] + list(np.arange(2.0, math.ceil(ymax) + 1))
    edges = np.array(sorted({e for e in edges if e < ymax} | {ymax}))
    x, w = leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        y = 0.5 * (b - a) * x + 0.5 * (a + b)
        nodes.append(np.expm1(y))
        weights.append(0.5 * (b - a) * w)
    return KernelRule(np.concatenate(nodes), np.concatenate(weights))


def kernel_rule_ei_approx(params: EiApproxParams | None = None) -> KernelRule:
    """Kernel rule implied by :func:`ei_approx` (corrected form)."""
    params = params or EiApproxParams()
    bp = params.b[:, None]
    bq = params.b_prime[None, :]
    nodes = (bp * bq - 1.0).ravel()
    weights = (4 * np.pi * params.a1 * params.a2 * np.sqrt(bp) * np.ones_like(bq)).ravel()
    return KernelRule(nodes, weights)


# ----------------------------------------------------------------------
# dilogarithm
# ----------------------------------------------------------------------

def _bernoulli_coeffs(n: int) -> list:
    # B_{2j} / (2j+1)!, j = 1..n
    return [float(mp.bernoulli(2 * j) / mp.factorial(2 * j + 1)) for j in range(1, n + 1)]


_DILOG_COEFFS = tuple(_bernoulli_coeffs(30))


def _dilog_series(x):
    """Li2 via the Bernoulli series in u = -ln(1-x), valid for -1 <= x <= 0.9."""
    _, log_, eps, _, _ = _ops(x)
    u = -log_(1 - x)
    u2 = u * u
    total = u - u2 / 4
    p = u
    if isinstance(x, mp.mpf):
        j = 1
        while True:
            p *= u2
            inc = mp.bernoulli(2 * j) / mp.factorial(2 * j + 1) * p
            total += inc
            if abs(inc) <= eps * abs(total) or j > 2000:
                return total
            j += 1
    for c in _DILOG_COEFFS:
        p *= u2
        inc = c * p
        total += inc
        if abs(inc) <= eps * abs(total):
            break
    return total


def dilog(x):
    """Real dilogarithm Li2(x).

    For x > 1 the real part of the analytic continuation is returned,
    ``pi^2/3 - ln^2(x)/2 - Li2(1/x)``.
    """
    _, log_, _, _, zeta2 = _ops(x)
    if x == 0:
        return 0 * x
    if x == 1:
        return zeta2 + 0 * x
    if x > 1:
        lx = log_(x)
        return 2 * zeta2 - lx * lx / 2 - dilog(1 / x)
    if x > 0.9:
        return zeta2 - log_(x) * log_(1 - x) - _dilog_series(1 - x)
    if x >= -1:
        return _dilog_series(x)
    lx = log_(-x)
    return -zeta2 - lx * lx / 2 - _dilog_series(1 / x)


# ----------------------------------------------------------------------
# partial-fraction coefficients
# ----------------------------------------------------------------------

class CoeffKind(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class PartialFractionCoeffs:
    """Coefficient array with 1-based subscripts.

    ``values[i - 1]`` holds the coefficient with subscript ``i``.
    """

    kind: CoeffKind
    values: np.ndarray
    n_bs: int
    n_fj: int
    varrho: float

    def __getitem__(self, i: int) -> float:
        if i < 1 or i > len(self.values):
            raise IndexError(i)
        return self.values[i - 1]


def _check_counts(n_bs: int, n_fj: int, varrho) -> None:
    if n_bs < 1 or n_fj < 1:
        raise ValueError("n_bs and n_fj must be >= 1")
    if not varrho > 1:
        raise ValueError("varrho must exceed 1")


def taylor_a(n_bs: int, n_fj: int, varrho, one=1.0) -> list:
    """Taylor coefficients of u^(n_bs-1) (u-1)^(n_fj-1) about u = 1/varrho.

    Entry k multiplies ``(u - 1/varrho)^k``.  ``one`` selects the arithmetic
    (pass ``mp.mpf(1)`` for extended precision).
    """
    c = one / varrho
    v0 = one - c
    p1 = [math.comb(n_bs - 1, j) * c ** (n_bs - 1 - j) for j in range(n_bs)]
    p2 = [math.comb(n_fj - 1, j) * (-v0) ** (n_fj - 1 - j) for j in range(n_fj)]
    out = [0 * one] * (n_bs + n_fj - 1)
    for a, x in enumerate(p1):
        for b, y in enumerate(p2):
            out[a + b] += x * y
    return out


def coeffs_A(n_bs: int, n_fj: int, varrho: float) -> PartialFractionCoeffs:
    """A_{N+1-i} = (1/(i-1)!) d^(i-1)/du^(i-1) [u^(N_BS-1) (u-1)^(N_FJ-1)] at u = 1/varrho.

    Computed by binomial re-expansion; ``A_1`` is always zero because the
    polynomial has degree N - 2.
    """
    _check_counts(n_bs, n_fj, varrho)
    n = n_bs + n_fj
    taylor = taylor_a(n_bs, n_fj, float(varrho))
    vals = np.zeros(n)
    for k, t in enumerate(taylor):
        vals[n - 1 - k] = t  # subscript N - k
    return PartialFractionCoeffs(CoeffKind.A, vals, n_bs, n_fj, float(varrho))


def _bd_values(n_bs, n_fj, base, one=1.0) -> list:
    n = n_bs + n_fj
    vals = [0 * one] * n
    for i in range(1, n_fj + 1):
        vals[n - i] = math.comb(n_fj - 1, i - 1) * base ** (n_fj - i)
    return vals


def c_values(m: int, varrho, one=1.0) -> list:
    """C_j = (-1)^(j-1) varrho^(-j), j = 1..m (Taylor weights of 1/u about varrho)."""
    return [(-1) ** (j - 1) * (one / varrho) ** j for j in range(1, m + 1)]


def coeffs_BCD(kind, n_bs: int, n_fj: int, varrho: float) -> PartialFractionCoeffs:
    """Coefficients for the logarithmic expectations of the gain ratio.

    * B: ``B_{N+1-i} = C(N_FJ-1, i-1) (varrho-1)^(N_FJ-i)``, partial fractions of
      ``(u-1)^(N_FJ-1)/(u-varrho)^N``.
    * D: the same with ``(1-varrho)``, partial fractions of
      ``x^(N_FJ-1)/(x+varrho-1)^N``.
    * C: ``C_j = (-1)^(j-1) varrho^(-j)``, the principal-part weights of
      ``1/(u (u-varrho)^m) = sum_j C_j (u-varrho)^(j-1-m) + (-varrho)^(-m)/u``.
    """
    kind = CoeffKind(kind)
    _check_counts(n_bs, n_fj, varrho)
    varrho = float(varrho)
    n = n_bs + n_fj
    if kind is CoeffKind.B:
        vals = _bd_values(n_bs, n_fj, varrho - 1)
    elif kind is CoeffKind.D:
        vals = _bd_values(n_bs, n_fj, 1 - varrho)
    elif kind is CoeffKind.C:
        vals = c_values(n, varrho)
    else:
        return coeffs_A(n_bs, n_fj, varrho)
    return PartialFractionCoeffs(kind, np.array(vals, dtype=float), n_bs, n_fj, varrho)


# ----------------------------------------------------------------------
# extended precision driver
# ----------------------------------------------------------------------

def log_gamma_ratio(n_bs: int, n_fj: int) -> float:
    """ln[Gamma(N_BS+N_FJ) / (Gamma(N_FJ) Gamma(N_BS))]."""
    return math.lgamma(n_bs + n_fj) - math.lgamma(n_fj) - math.lgamma(n_bs)


def adaptive_precision(fn: Callable[[], tuple], start_dps: int = 30, guard: int = 16,
                       max_dps: int = 5000) -> float:
    """Evaluate ``fn`` under mpmath until the result is trustworthy.

    ``fn`` returns ``(value, magnitude)`` where ``magnitude`` bounds the
    size of the terms that were summed.  The working precision is raised
    until ``guard`` digits survive the cancellation.
    """
    dps = start_dps
    while True:
        with mp.workdps(dps):
            value, magnitude = fn()
            if value == 0:
                lost = dps
            else:
                lost = max(0.0, float(mp.log10(abs(magnitude) / abs(value))))
        if lost + guard <= dps:
            out = float(value)
            if not math.isfinite(out):
                raise OverflowError("closed form overflowed; the log-domain prefactor is out of range")
            return out
        if dps >= max_dps:
            raise ArithmeticError(f"cancellation of 1e{lost:.0f} exceeds the precision limit")
        dps = min(max_dps, int(lost + guard + 10))
        log.debug("raising working precision to %d digits", dps)
