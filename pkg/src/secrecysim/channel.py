"""Rayleigh fading sampler and the jammer-to-BS gain ratio density.

Randomness is counter based: trial ``t`` lives in block ``t // BLOCK`` and
every (seed, block, branch) triple owns an independent PCG64 stream derived
through :class:`numpy.random.SeedSequence`.  A trial's gains therefore
depend only on (seed, t), never on how many trials are requested or on the
order in which blocks are evaluated.

Within a block the squared normals are drawn antenna-major, so adding
antennas appends terms without changing the existing ones (common random
numbers across antenna counts).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import NetworkConfig
from .special import log_gamma_ratio

BLOCK = 4096
_BRANCH = {"br": 0, "mr": 1, "fr": 2}


@dataclass(frozen=True)
class ChannelRealization:
    """Instantaneous normalised gains; fields may be scalars or equal-length arrays."""

    gamma_br: float | np.ndarray
    gamma_mr: float | np.ndarray
    gamma_fr: float | np.ndarray

    def __post_init__(self):
        for k in ("gamma_br", "gamma_mr", "gamma_fr"):
            if np.any(np.asarray(getattr(self, k)) < 0):
                raise ValueError(f"{k} must be non-negative")

    def __len__(self) -> int:
        return np.size(self.gamma_br)

    def scaled(self, c: float) -> "ChannelRealization":
        return ChannelRealization(c * self.gamma_br, c * self.gamma_mr, c * self.gamma_fr)

    def __getitem__(self, idx) -> "ChannelRealization":
        return ChannelRealization(
            np.asarray(self.gamma_br)[idx], np.asarray(self.gamma_mr)[idx], np.asarray(self.gamma_fr)[idx]
        )


def _stream(seed: int, block: int, branch: str) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(block, _BRANCH[branch]))
    return np.random.Generator(np.random.PCG64(ss))


@lru_cache(maxsize=32)
def _unit_block(seed: int, block: int, branch: str, shape: int) -> np.ndarray:
    """Gamma(shape, 1) variates for one block as half sums of squared normals."""
    z = _stream(seed, block, branch).standard_normal((2 * shape, BLOCK))
    g = 0.5 * np.einsum("ij,ij->j", z, z)
    g.setflags(write=False)
    return g


def unit_gains(seed: int, start: int, count: int, n_bs: int, n_fj: int):
    """Unit-mean-per-antenna gain sums for trials ``start .. start+count-1``."""
    if start < 0 or count < 0:
        raise ValueError("trial indices must be non-negative")
    out = {k: np.empty(count) for k in _BRANCH}
    shapes = {"br": n_bs, "mr": 1, "fr": n_fj}
    pos = 0
    t = start
    while pos < count:
        block, off = divmod(t, BLOCK)
        take = min(BLOCK - off, count - pos)
        for k, n in shapes.items():
            if n == 0:
                out[k][pos:pos + take] = 0.0
            else:
                out[k][pos:pos + take] = _unit_block(seed, block, k, n)[off:off + take]
        pos += take
        t += take
    return out["br"], out["mr"], out["fr"]


@dataclass(frozen=True)
class SeededSampler:
    """Stateless handle to the counter-based streams of one seed."""

    seed: int
    counter: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    def batch(self, cfg: NetworkConfig, start: int, count: int) -> ChannelRealization:
        ubr, umr, ufr = unit_gains(self.seed, start, count, cfg.n_bs, cfg.n_fj)
        return ChannelRealization(cfg.gbar_br * ubr, cfg.gbar_mr * umr, cfg.gbar_fr * ufr)

    def next(self, cfg: NetworkConfig) -> tuple[ChannelRealization, "SeededSampler"]:
        """Realization at the current counter and the advanced sampler."""
        return sample(cfg, self, self.counter), SeededSampler(self.seed, self.counter + 1)


def sample(cfg: NetworkConfig, sampler: SeededSampler, trial: int) -> ChannelRealization:
    """One realization; identical for equal (seed, trial) in any context."""
    ch = sampler.batch(cfg, trial, 1)
    return ChannelRealization(float(ch.gamma_br[0]), float(ch.gamma_mr[0]), float(ch.gamma_fr[0]))


# ----------------------------------------------------------------------
# gain ratio X = gamma_fr / gamma_br
# ----------------------------------------------------------------------

def _ratio_params(cfg: NetworkConfig):
    if cfg.n_fj == 0:
        raise ValueError("ratio undefined without jammer")
    return cfg.n_bs, cfg.n_fj, cfg.ratio


def ratio_log_pdf(x, n_bs: int, n_fj: int, r: float):
    x = np.asarray(x, dtype=float)
    n = n_bs + n_fj
    with np.errstate(divide="ignore"):
        return (log_gamma_ratio(n_bs, n_fj) + n_bs * math.log(r)
                + (n_fj - 1) * np.log(x) - n * np.log(x + r))


def gamma_ratio_pdf(x, cfg: NetworkConfig):
    """Density of ``gamma_fr / gamma_br`` with r = mu_fr / mu_br.

    ``K x^(N_FJ-1) / (x + r)^(N_FJ+N_BS)`` with
    ``K = Gamma(N) / (Gamma(N_FJ) Gamma(N_BS)) r^N_BS``, evaluated in log space.
    """
    n_bs, n_fj, r = _ratio_params(cfg)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    if n_fj == 1:
        out = np.exp(ratio_log_pdf(np.maximum(x, 0), n_bs, n_fj, r))
    else:
        with np.errstate(invalid="ignore"):
            out = np.where(x > 0, np.exp(ratio_log_pdf(x, n_bs, n_fj, r)), 0.0)
    return out if out.ndim else float(out)


def ratio_expectation(func, cfg: NetworkConfig, upper: float = math.inf,
                      epsabs: float = 1e-12, epsrel: float = 1e-12) -> tuple[float, float]:
    """``E[func(X); X < upper]`` by adaptive quadrature against the ratio density.

    The integral runs over ``t = x / (x + r)`` in which the density is a
    smooth Beta(N_FJ, N_BS) bump; breakpoints bracket its bulk.  Returns
    ``(value, abserr)``.
    """
    from scipy import integrate

    n_bs, n_fj, r = _ratio_params(cfg)
    t_hi = 1.0 if math.isinf(upper) else upper / (upper + r)

    def integrand(t):
        if t <= 0.0 or t >= 1.0:
            return 0.0
        x = r * t / (1.0 - t)
        w = gamma_ratio_pdf(x, cfg) * r / (1.0 - t) ** 2
        return func(x) * w if w > 0 else 0.0

    n = n_bs + n_fj
    mean = n_fj / n
    sd = math.sqrt(n_fj * n_bs / (n * n * (n + 1)))
    pts = sorted({min(max(mean + k * sd, 1e-12), t_hi * (1 - 1e-12)) for k in (-6, -3, -1, 0, 1, 3, 6)})
    pts = [p for p in pts if 0 < p < t_hi]
    with warnings.catch_warnings():
        # roundoff warnings only mean the requested 1e-12 was out of reach;
        # the returned error estimate is checked by callers
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, 0.0, t_hi, points=pts or None, limit=1000,
                                  epsabs=epsabs, epsrel=epsrel)
    return val, err
