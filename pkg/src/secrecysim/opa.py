"""Power allocation between the BS and the MU.

The numeric optimiser is vectorised: it takes arrays of gains and returns
an array of allocations, which is what the Monte Carlo estimator needs.
The scalar ``opa_*`` functions wrap it for single realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelRealization
from .model import NetworkConfig
from .sinr import log_phi_arrays

LAMBDA_MIN = 1e-6
FD_STEP = 1e-6
_INV_PHI = (np.sqrt(5.0) - 1) / 2
# probe points: dense near zero where the jammer-driven optimum usually sits
_PROBES = np.unique(np.concatenate([
    [LAMBDA_MIN], np.geomspace(1e-4, 0.05, 14), np.linspace(0.05, 1 - LAMBDA_MIN, 20),
]))


class Strategy(str, Enum):
    OPA_CLOSED = "OpaClosed"
    OPA_LSMA = "OpaLsma"
    OPA_NUMERIC = "OpaNumeric"
    EPA = "Epa"
    WOFJ_OPA = "WoFjOpa"


@dataclass(frozen=True)
class PowerAllocation:
    lam: float
    strategy: Strategy
    clipped: bool = False

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if self.strategy is Strategy.EPA and self.lam != 0.5:
            raise ValueError("equal power allocation uses lambda = 0.5")


def _clip(lam):
    lam = np.asarray(lam, dtype=float)
    clipped = (lam < LAMBDA_MIN) | (lam > 1 - LAMBDA_MIN)
    return np.clip(lam, LAMBDA_MIN, 1 - LAMBDA_MIN), clipped


def _arrays(ch: ChannelRealization):
    return (np.atleast_1d(np.asarray(ch.gamma_br, dtype=float)),
            np.atleast_1d(np.asarray(ch.gamma_mr, dtype=float)),
            np.atleast_1d(np.asarray(ch.gamma_fr, dtype=float)))


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------

def eq10_lambda(gbr, gmr, gfr):
    """Large-BS-array stationary point; NaN where the radicand is negative."""
    gbr, gmr, gfr = (np.asarray(a, dtype=float) for a in (gbr, gmr, gfr))
    rad = 2 * gmr ** 2 + 3 * gmr * gfr - 2 * gmr + gfr ** 2 - gfr
    with np.errstate(invalid="ignore"):
        root = np.where(rad >= 0, np.sqrt(np.maximum(rad, 0.0)), np.nan)
    return (-2 * gmr - gfr + gmr * root) / (gbr * gmr)


def opa_closed(ch: ChannelRealization) -> PowerAllocation:
    """Closed-form allocation derived for ``gamma_br >> gamma_mr``."""
    if not (ch.gamma_br > 0 and ch.gamma_mr > 0):
        raise ValueError("gamma_br and gamma_mr must be positive")
    lam = float(eq10_lambda(ch.gamma_br, ch.gamma_mr, ch.gamma_fr))
    if np.isnan(lam):
        raise ValueError("outside validity regime: negative radicand, fall back to opa_numeric")
    val, clipped = _clip(lam)
    return PowerAllocation(float(val), Strategy.OPA_CLOSED, bool(clipped))


def opa_lsma(ch: ChannelRealization) -> PowerAllocation:
    """High-SNR allocation ``lambda = gamma_fr / gamma_br``."""
    if not ch.gamma_br > 0:
        raise ValueError("gamma_br must be positive")
    lam = ch.gamma_fr / ch.gamma_br
    val, clipped = _clip(lam)
    return PowerAllocation(float(val), Strategy.OPA_LSMA, bool(clipped or lam >= 1))


def epa() -> PowerAllocation:
    return PowerAllocation(0.5, Strategy.EPA)


# ----------------------------------------------------------------------
# numeric maximisation
# ----------------------------------------------------------------------

def dlogphi_fd(lam, gbr, gmr, gfr, eps_users=1.0, eps_relay=0.0):
    """Central finite-difference derivative of ln Phi in lambda."""
    lam = np.asarray(lam, dtype=float)
    h = np.minimum(FD_STEP, 0.5 * np.minimum(lam, 1 - lam))
    up = log_phi_arrays(gbr, gmr, gfr, lam + h, eps_users, eps_relay)
    dn = log_phi_arrays(gbr, gmr, gfr, lam - h, eps_users, eps_relay)
    return (up - dn) / (2 * h)


def _golden(lo, hi, gbr, gmr, gfr, eu, er, tol):
    f = lambda x: log_phi_arrays(gbr, gmr, gfr, x, eu, er)  # noqa: E731
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if np.all(hi - lo <= tol):
            break
        left = fc >= fd  # keep [lo, d]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        nc = hi - _INV_PHI * (hi - lo)
        nd = lo + _INV_PHI * (hi - lo)
        c_new = np.where(left, nc, d)
        d_new = np.where(left, c, nd)
        fc_new = np.where(left, f(c_new), fd)
        fd_new = np.where(left, fc, f(d_new))
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    return 0.5 * (lo + hi)


def maximize_log_phi(gbr, gmr, gfr, eps_users=1.0, eps_relay=0.0, tol=1e-10):
    """Vectorised maximiser of ln Phi over [LAMBDA_MIN, 1 - LAMBDA_MIN].

    Derivative-sign bisection between probe points; realizations whose
    probe signs are not a single + to - pattern use golden-section search
    around the best probe instead.  Returns ``(lambda, clipped)``.
    """
    gbr, gmr, gfr = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (gbr, gmr, gfr))
    if eps_relay == 0 and np.any(gfr == 0):
        raise ValueError("relay SINR singular: use eps_relay = 1 without a jammer")
    n = gbr.size
    p = _PROBES[:, None]
    d = dlogphi_fd(p, gbr, gmr, gfr, eps_users, eps_relay)
    pos = d > 0
    monotone = np.all(pos[:-1] >= pos[1:], axis=0)
    npos = pos.sum(axis=0)
    lam = np.empty(n)
    clipped = np.zeros(n, dtype=bool)

    left = monotone & (npos == 0)
    right = monotone & (npos == len(_PROBES))
    lam[left], clipped[left] = LAMBDA_MIN, True
    lam[right], clipped[right] = 1 - LAMBDA_MIN, True

    inner = monotone & ~left & ~right
    if np.any(inner):
        k = npos[inner]
        lo, hi = _PROBES[k - 1].copy(), _PROBES[k].copy()
        b, m, f = gbr[inner], gmr[inner], gfr[inner]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            active = (mid > lo) & (mid < hi) & (hi - lo > 1e-16)
            if not np.any(active):
                break
            up = dlogphi_fd(mid, b, m, f, eps_users, eps_relay) > 0
            lo = np.where(active & up, mid, lo)
            hi = np.where(active & ~up, mid, hi)
        lam[inner] = 0.5 * (lo + hi)

    odd = ~monotone
    if np.any(odd):
        b, m, f = gbr[odd], gmr[odd], gfr[odd]
        vals = log_phi_arrays(b, m, f, p, eps_users, eps_relay)
        kbest = np.argmax(vals, axis=0)
        lo = _PROBES[np.maximum(kbest - 1, 0)]
        hi = _PROBES[np.minimum(kbest + 1, len(_PROBES) - 1)]
        res = _golden(lo, hi, b, m, f, eps_users, eps_relay, min(tol, 1e-12))
        lam[odd] = np.clip(res, LAMBDA_MIN, 1 - LAMBDA_MIN)
        clipped[odd] = (lam[odd] <= LAMBDA_MIN) | (lam[odd] >= 1 - LAMBDA_MIN)
    return lam, clipped


def opa_numeric(ch: ChannelRealization, cfg: NetworkConfig, tol: float = 1e-10) -> PowerAllocation:
    """Numerically optimal allocation for one realization."""
    lam, clipped = maximize_log_phi(*_arrays(ch), cfg.epsilon_users, cfg.epsilon_relay, tol)
    return PowerAllocation(float(lam[0]), Strategy.OPA_NUMERIC, bool(clipped[0]))


def opa_wofj(ch: ChannelRealization, cfg: NetworkConfig, tol: float = 1e-10) -> PowerAllocation:
    """Optimal allocation with the jammer switched off (relay noise eps = 1)."""
    gbr, gmr, _ = _arrays(ch)
    lam, clipped = maximize_log_phi(gbr, gmr, np.zeros_like(gbr), cfg.epsilon_users, 1.0, tol)
    return PowerAllocation(float(lam[0]), Strategy.WOFJ_OPA, bool(clipped[0]))


def grid_search(gbr, gmr, gfr, steps: int, eps_users=1.0, eps_relay=0.0):
    """Vectorised brute-force argmax on ``lambda_k = k/(steps+1)``; ties go left."""
    if steps < 1:
        raise ValueError("steps must be positive")
    gbr, gmr, gfr = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (gbr, gmr, gfr))
    grid = np.arange(1, steps + 1) / (steps + 1)
    out = np.empty(gbr.size)
    edge = np.zeros(gbr.size, dtype=bool)
    chunk = max(1, 2_000_000 // steps)
    for s in range(0, gbr.size, chunk):
        sl = slice(s, s + chunk)
        vals = log_phi_arrays(gbr[sl], gmr[sl], gfr[sl], grid[:, None], eps_users, eps_relay)
        k = np.argmax(vals, axis=0)
        out[sl] = grid[k]
        edge[sl] = (k == 0) | (k == steps - 1)
    return out, edge


def opa_grid_oracle(ch: ChannelRealization, cfg: NetworkConfig, steps: int = 10_000) -> PowerAllocation:
    """Exhaustive search on a uniform grid of ``steps`` interior points."""
    lam, edge = grid_search(*_arrays(ch), steps, cfg.epsilon_users, cfg.epsilon_relay)
    return PowerAllocation(float(lam[0]), Strategy.OPA_NUMERIC, bool(edge[0]))


def allocate(strategy: Strategy, gbr, gmr, gfr, cfg: NetworkConfig, tol: float = 1e-10):
    """Per-realization lambda for a whole batch of gains.

    Returns ``(lam, gfr_eff, eps_relay_eff)``: the WoFJ strategy silences
    the jammer and switches the relay noise term on.
    """
    strategy = Strategy(strategy)
    eu, er = cfg.epsilon_users, cfg.epsilon_relay
    if strategy is Strategy.EPA:
        return np.full(np.shape(gbr), 0.5), gfr, er
    if strategy is Strategy.OPA_LSMA:
        return _clip(np.divide(gfr, gbr))[0], gfr, er
    if strategy is Strategy.OPA_NUMERIC:
        return maximize_log_phi(gbr, gmr, gfr, eu, er, tol)[0], gfr, er
    if strategy is Strategy.WOFJ_OPA:
        zero = np.zeros_like(gbr)
        return maximize_log_phi(gbr, gmr, zero, eu, 1.0, tol)[0], zero, 1.0
    lam = eq10_lambda(gbr, gmr, gfr)
    bad = np.isnan(lam)
    if np.any(bad):
        lam[bad] = maximize_log_phi(gbr[bad], gmr[bad], gfr[bad], eu, er, tol)[0]
    return _clip(lam)[0], gfr, er


def in_regime_realizations(cfg: NetworkConfig, count: int, seed: int,
                           bs_ratio: float = 50.0, mr_min: float = 10.0) -> ChannelRealization:
    """First ``count`` sampled realizations with ``g_br >= bs_ratio g_mr`` and ``g_mr >= mr_min``."""
    from .channel import BLOCK, SeededSampler

    sampler = SeededSampler(seed)
    keep = [[], [], []]
    have, start = 0, 0
    while have < count:
        ch = sampler.batch(cfg, start, BLOCK)
        ok = (ch.gamma_br >= bs_ratio * ch.gamma_mr) & (ch.gamma_mr >= mr_min)
        for k, arr in enumerate((ch.gamma_br, ch.gamma_mr, ch.gamma_fr)):
            keep[k].append(arr[ok])
        have += int(ok.sum())
        start += BLOCK
        if start > 1000 * BLOCK and have == 0:
            raise ValueError("configuration never produces in-regime realizations")
    return ChannelRealization(*(np.concatenate(k)[:count] for k in keep))
