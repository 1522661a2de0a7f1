"""Per-realization signal model.

Everything is expressed in normalised gains ``gamma = rho |h|^2`` so the
noise power never appears.  Functions broadcast over numpy arrays, which
is what the Monte Carlo estimator relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .model import NetworkConfig

LN2 = np.log(2.0)


@dataclass(frozen=True)
class SinrTriple:
    gamma_bs: float | np.ndarray
    gamma_mu: float | np.ndarray
    gamma_r: float | np.ndarray


@dataclass(frozen=True)
class SecrecyObjective:
    phi: float | np.ndarray
    rs: float | np.ndarray


def _check_lambda(lam) -> None:
    lam = np.asarray(lam)
    if np.any((lam <= 0) | (lam >= 1)) or np.any(np.isnan(lam)):
        raise ValueError("lambda must lie in (0, 1)")


def relay_gain(ch: ChannelRealization, lam, rho: float):
    """Squared amplification factor ``G^2 = rho / (lam g_br + (1-lam) g_mr + g_fr + 1)``."""
    _check_lambda(lam)
    return rho / (lam * ch.gamma_br + (1 - lam) * ch.gamma_mr + ch.gamma_fr + 1.0)


def sinr_arrays(gbr, gmr, gfr, lam, eps_users: float = 1.0, eps_relay: float = 0.0):
    """Raw SINR formulas without validation (hot path)."""
    gamma_bs = (1 - lam) * gbr * gmr / ((1 + lam) * gbr + (1 - lam) * gmr + gfr + eps_users)
    gamma_mu = lam * gbr * gmr / (lam * gbr + (2 - lam) * gmr + gfr + eps_users)
    gamma_r = (lam * gbr + (1 - lam) * gmr) / (gfr + eps_relay)
    return gamma_bs, gamma_mu, gamma_r


def lsma_sinr_arrays(gbr, gmr, gfr):
    """Large-array SINRs: BS rate limited by the jammer ratio, relay SINR pinned to 1."""
    x = np.divide(gfr, gbr)
    gamma_bs = np.maximum(gmr * (1 - x) / (1 + 2 * x), 0.0)
    return gamma_bs, 0.5 * np.asarray(gmr), np.ones_like(gamma_bs)


def log_phi_arrays(gbr, gmr, gfr, lam, eps_users: float = 1.0, eps_relay: float = 0.0):
    gbs, gmu, gr = sinr_arrays(gbr, gmr, gfr, lam, eps_users, eps_relay)
    return np.log1p(gbs) + np.log1p(gmu) - np.log1p(gr)


def sinrs(ch: ChannelRealization, lam, eps_users: float = 1.0, eps_relay: float = 0.0) -> SinrTriple:
    """SINRs at the BS, the MU and the (eavesdropping) relay after MRC."""
    _check_lambda(lam)
    if eps_relay == 0 and np.any(np.asarray(ch.gamma_fr) == 0):
        raise ValueError("relay SINR singular: use eps_relay = 1 without a jammer")
    return SinrTriple(*sinr_arrays(ch.gamma_br, ch.gamma_mr, ch.gamma_fr, lam, eps_users, eps_relay))


def lsma_sinrs(ch: ChannelRealization) -> SinrTriple:
    return SinrTriple(*lsma_sinr_arrays(ch.gamma_br, ch.gamma_mr, ch.gamma_fr))


def objective_from_sinrs(s: SinrTriple) -> SecrecyObjective:
    phi_ = (1 + s.gamma_bs) * (1 + s.gamma_mu) / (1 + s.gamma_r)
    rs = np.maximum(0.0, 0.5 * np.log2(phi_))
    if np.ndim(phi_) == 0:
        return SecrecyObjective(float(phi_), float(rs))
    return SecrecyObjective(phi_, rs)


def phi(ch: ChannelRealization, lam, cfg: NetworkConfig) -> SecrecyObjective:
    """Secrecy objective ``(1+g_BS)(1+g_MU)/(1+g_R)`` and the clamped rate."""
    return objective_from_sinrs(sinrs(ch, lam, cfg.epsilon_users, cfg.epsilon_relay))
