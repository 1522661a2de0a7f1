"""Ergodic secrecy sum rate: Monte Carlo, closed form and quadrature.

Rates are accumulated in nats per term, ``ln(1+g_BS)``, ``ln(1+g_MU)`` and
``ln(1+g_R)``, and converted to bits/s/Hz at the end with the factor
``1/(2 ln 2)`` of the two-phase protocol.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import integrate

from .channel import BLOCK, SeededSampler, ratio_expectation
from .model import NetworkConfig
from .opa import Strategy, allocate
from .sinr import lsma_sinr_arrays, sinr_arrays
from .special import (EiApproxParams, KernelRule, adaptive_precision, e1_scaled, ei,
                      expn_sequence, kernel_rule_ei_approx, kernel_rule_exact,
                      log_gamma_ratio, taylor_a)

LN2 = math.log(2.0)
Z95 = 1.959963984540054
DEFAULT_TRIALS = 100_000
AVERAGE_THEN_CLAMP = "average-then-clamp"
CLAMP_THEN_AVERAGE = "clamp-then-average"
# exponent sign adopted for the e^(+-2/g) Ei(-2/g) form of E[ln(1 + g_mr/2)]
I2_EXPONENT_SIGN = +1


class Method(str, Enum):
    MONTE_CARLO = "MonteCarlo"
    CLOSED_FORM = "ClosedForm"
    ASYMPTOTIC = "Asymptotic"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class EssrEstimate:
    """An ESSR value in bits/s/Hz with its provenance.

    ``components`` holds the natural-log parts (``i1``, ``i2``, ``i3``)
    and, for Monte Carlo, the value under the other clamping convention.
    """

    value: float
    method: Method
    ci_halfwidth: float = 0.0
    trials: int = 0
    convention: str | None = None
    components: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.value < 0 or self.ci_halfwidth < 0:
            raise ValueError("ESSR and CI half-width must be non-negative")


def worker_count() -> int:
    """Thread pool size, capped by ``SECRECY_SIM_THREADS``."""
    n = os.cpu_count() or 1
    env = os.environ.get("SECRECY_SIM_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            raise ValueError("SECRECY_SIM_THREADS must be an integer") from None
    return n


# ----------------------------------------------------------------------
# Monte Carlo
# ----------------------------------------------------------------------

def _block_terms(cfg: NetworkConfig, strategy: Strategy, seed: int, start: int, count: int,
                 lsma_sinr: bool):
    ch = SeededSampler(seed).batch(cfg, start, count)
    gbr, gmr, gfr = ch.gamma_br, ch.gamma_mr, ch.gamma_fr
    if lsma_sinr:
        gbs, gmu, gr = lsma_sinr_arrays(gbr, gmr, gfr)
    else:
        lam, gfr_eff, eps_r = allocate(strategy, gbr, gmr, gfr, cfg)
        if eps_r == 0 and np.any(gfr_eff == 0):
            raise ValueError("relay SINR singular: use eps_relay = 1 without a jammer")
        gbs, gmu, gr = sinr_arrays(gbr, gmr, gfr_eff, lam, cfg.epsilon_users, eps_r)
    return np.log1p(gbs), np.log1p(gmu), np.log1p(gr)


def _mean_ci(x: np.ndarray) -> tuple[float, float]:
    n = x.size
    mean = math.fsum(x) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return mean, Z95 * math.sqrt(var / n)


def montecarlo_terms(cfg: NetworkConfig, strategy=Strategy.OPA_NUMERIC, trials: int = DEFAULT_TRIALS,
                     seed: int = 1, lsma_sinr: bool = False, threads: int | None = None):
    """Per-trial ``ln(1+g)`` arrays for BS, MU and relay, in trial order.

    Blocks are evaluated on a thread pool; results are reassembled in block
    order so the output never depends on scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    strategy = Strategy(strategy)
    ranges = [(s, min(BLOCK, trials - s)) for s in range(0, trials, BLOCK)]
    threads = worker_count() if threads is None else max(1, int(threads))
    job = lambda r: _block_terms(cfg, strategy, seed, r[0], r[1], lsma_sinr)  # noqa: E731
    if threads == 1 or len(ranges) == 1:
        parts = [job(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, ranges))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(3))


def essr_montecarlo(cfg: NetworkConfig, strategy=Strategy.OPA_NUMERIC, trials: int = DEFAULT_TRIALS,
                    seed: int = 1, lsma_sinr: bool = False, convention: str = AVERAGE_THEN_CLAMP,
                    threads: int | None = None) -> EssrEstimate:
    """Monte Carlo ESSR with a 95 % normal confidence half-width.

    ``average-then-clamp`` clamps the averaged rate, matching the
    ``I1 + I2 - I3`` decomposition; ``clamp-then-average`` clamps every
    realization first.  Both values are stored in ``components``.
    Reductions use exactly rounded sums, so serial and threaded runs agree
    bit for bit.
    """
    if trials < 1000:
        raise ValueError("Monte Carlo needs at least 1000 trials")
    if convention not in (AVERAGE_THEN_CLAMP, CLAMP_THEN_AVERAGE):
        raise ValueError(f"unknown convention {convention!r}")
    a, b, c = montecarlo_terms(cfg, strategy, trials, seed, lsma_sinr, threads)
    rate = (a + b - c) / (2 * LN2)
    raw_mean, raw_ci = _mean_ci(rate)
    clamped_mean, clamped_ci = _mean_ci(np.maximum(rate, 0.0))
    comps = {
        "i1": _mean_ci(a)[0], "i2": _mean_ci(b)[0], "i3": _mean_ci(c)[0],
        "i1_ci": _mean_ci(a)[1], "i2_ci": _mean_ci(b)[1], "i3_ci": _mean_ci(c)[1],
        AVERAGE_THEN_CLAMP: max(0.0, raw_mean), CLAMP_THEN_AVERAGE: clamped_mean,
    }
    if convention == AVERAGE_THEN_CLAMP:
        value, ci = max(0.0, raw_mean), raw_ci
    else:
        value, ci = clamped_mean, clamped_ci
    return EssrEstimate(value, Method.MONTE_CARLO, ci, trials, convention, comps)


# ----------------------------------------------------------------------
# I2, I3
# ----------------------------------------------------------------------

def i2_closed(gamma_mr_bar: float) -> float:
    """``E[ln(1 + g_mr/2)] = exp(2/g) E_1(2/g)`` for exponential ``g_mr`` of mean g."""
    if not gamma_mr_bar > 0:
        raise ValueError("mean gain must be positive")
    return float(e1_scaled(np.array([2.0 / gamma_mr_bar]))[0])


def i2_candidate(gamma_mr_bar: float, sign: int) -> float:
    """``-exp(sign * 2/g) Ei(-2/g)``, the two possible readings of the exponent."""
    s = 2.0 / gamma_mr_bar
    return -math.exp(sign * s) * ei(-s)


def i2_quadrature(gamma_mr_bar: float) -> float:
    g = float(gamma_mr_bar)
    f = lambda x: math.log1p(x / 2) * math.exp(-x / g) / g  # noqa: E731
    return integrate.quad(f, 0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=500)[0]


def i3_closed() -> float:
    """Relay term in the large-array regime, where ``g_R = 1``."""
    return LN2


# ----------------------------------------------------------------------
# I1
# ----------------------------------------------------------------------

def _bs_param(cfg: NetworkConfig):
    if cfg.n_fj < 1:
        raise ValueError("the closed form needs a jammer (n_fj >= 1)")
    return cfg.n_bs, cfg.n_fj, cfg.ratio, cfg.gbar_mr


def bs_survival(gamma, cfg: NetworkConfig) -> float:
    """``P(g_BS > gamma)`` for the large-array BS SINR ``g_mr (1-X)/(1+2X)``."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    g = cfg.gbar_mr
    f = lambda x: math.exp(-gamma * (1 + 2 * x) / (g * (1 - x)))  # noqa: E731
    return ratio_expectation(f, cfg, upper=1.0)[0]


def bs_cdf(gamma, cfg: NetworkConfig) -> float:
    return 1.0 - bs_survival(gamma, cfg)


def i1_quadrature(cfg: NetworkConfig, tol: float = 1e-8) -> float:
    """``E[ln(1+g_BS)]`` by 1-D adaptive quadrature.

    The survival-function integral ``int_0^inf P(g_BS > y)/(1+y) dy`` is
    exchanged with the expectation over X, leaving ``E[exp(s) E_1(s)]``
    with ``s = (1+2X)/(g_mr (1-X))`` over ``X < 1``.
    """
    _bs_param(cfg)
    g = cfg.gbar_mr

    def kernel(x):
        s = (1 + 2 * x) / (g * (1 - x))
        return float(e1_scaled(np.array([s]))[0])

    val, err = ratio_expectation(kernel, cfg, upper=1.0)
    if err > tol:
        raise ArithmeticError(f"quadrature did not converge: achieved {err:.2e}, wanted {tol:.0e}")
    return val


@lru_cache(maxsize=256)
def _i1_sum(n_bs: int, n_fj: int, r: float, g: float, rule_key) -> float:
    rule: KernelRule = _RULES[rule_key]
    n = n_bs + n_fj

    def evaluate():
        one = mp.mpf(1)
        varrho = one + mp.mpf(r)
        c = 1 / varrho
        v0 = 1 - c
        taylor = taylor_a(n_bs, n_fj, varrho, one)
        # a_i = A_i v0^(1-i) with A_i = taylor[N - i]
        a = [None, None] + [taylor[n - i] * v0 ** (1 - i) for i in range(2, n + 1)]
        sigma = 3 / mp.mpf(g)
        s0 = (3 * c - 2) / mp.mpf(g)
        total = mp.mpf(0)
        magnitude = mp.mpf(0)
        for t, w in zip(rule.nodes, rule.weights):
            t = mp.mpf(float(t))
            e = expn_sequence(n, t * sigma * v0)
            terms = [a[i] * e[i] for i in range(2, n + 1)]
            scale = mp.mpf(float(w)) * mp.exp(-t * s0)
            total += scale * mp.fsum(terms)
            magnitude += scale * mp.fsum(abs(q) for q in terms)
        pref = mp.exp(log_gamma_ratio(n_bs, n_fj) + n_bs * mp.log(r) - n * mp.log(varrho))
        return pref * total, pref * magnitude

    return adaptive_precision(evaluate)


_RULES: dict = {}


def _rule_key(backend: str, params: EiApproxParams | None, g: float):
    if backend == "exact":
        key = ("exact", round(math.log10(g), 6))
        if key not in _RULES:
            _RULES[key] = kernel_rule_exact(1.0 / g)
    elif backend == "ei_approx":
        params = params or EiApproxParams()
        key = ("ei_approx", params)
        if key not in _RULES:
            _RULES[key] = kernel_rule_ei_approx(params)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return key


def i1_closed(cfg: NetworkConfig, params: EiApproxParams | None = None, backend: str = "exact") -> float:
    """Closed-form ``E[ln(1+g_BS)]`` for the large-array BS SINR.

    The expectation reduces to ``E[exp(s) E_1(s)]``.  Writing the kernel
    as a sum of exponentials ``sum_k w_k exp(-t_k s)`` turns each term into
    a finite sum of ``E_i`` functions weighted by the Taylor coefficients
    A_i.  ``backend="exact"`` uses a Gauss-Legendre rule accurate to about
    1e-8 for the kernel; ``backend="ei_approx"`` uses the angular-grid
    exponential sum of :func:`~secrecysim.special.ei_approx` with ``params``.
    """
    n_bs, n_fj, r, g = _bs_param(cfg)
    key = _rule_key(backend, params, g)
    return _i1_sum(n_bs, n_fj, r, g, key)


def essr_closed(cfg: NetworkConfig, params: EiApproxParams | None = None,
                backend: str = "exact") -> EssrEstimate:
    """``(I1 + I2 - I3)/(2 ln 2)`` clamped at zero."""
    i1 = i1_closed(cfg, params, backend)
    i2 = i2_closed(cfg.gbar_mr)
    i3 = i3_closed()
    value = max(0.0, (i1 + i2 - i3) / (2 * LN2))
    return EssrEstimate(value, Method.CLOSED_FORM, components={"i1": i1, "i2": i2, "i3": i3})
