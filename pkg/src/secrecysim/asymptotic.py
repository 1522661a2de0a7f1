"""High-SNR behaviour of the ergodic secrecy sum rate.

At high SNR ``ln(1+g_BS) ~ ln g_mr + ln(1-X) - ln(1+2X)`` on ``X < 1`` with
``X = g_fr/g_br``, so the rate splits into ``I11 = E[ln g_mr]`` and the two
ratio expectations ``I12 = E[ln(1-X); X<1]`` and ``I13 = E[ln(1+2X); X<1]``.
Both have finite closed forms in terms of partial-fraction coefficients;
they cancel badly for large antenna counts and are evaluated in extended
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .channel import ratio_expectation
from .essr import EssrEstimate, Method
from .model import NetworkConfig
from .special import EULER_GAMMA, c_values, dilog, log_gamma_ratio

LN2 = math.log(2.0)


def i11(gamma_mr_bar: float) -> float:
    """``E[ln g_mr] = ln(mean) - Euler's constant`` for an exponential gain."""
    if not gamma_mr_bar > 0:
        raise ValueError("mean gain must be positive")
    return math.log(gamma_mr_bar) - EULER_GAMMA


def _stable(fn, rel: float = 1e-18, start: int = 40, max_dps: int = 6000) -> float:
    """Evaluate ``fn`` at increasing precision until two levels agree."""
    dps = start
    while True:
        with mp.workdps(dps):
            a = fn()
        with mp.workdps(dps + 30):
            b = fn()
        if abs(a - b) <= rel * abs(b):
            return float(b)
        if dps >= max_dps:
            raise ArithmeticError("closed form did not stabilise; branch handling failed")
        dps *= 2


def _ratio_params(cfg: NetworkConfig):
    if cfg.n_fj < 1:
        raise ValueError("needs a jammer (n_fj >= 1)")
    return cfg.n_bs, cfg.n_fj, cfg.ratio


def _prefactor(n_bs, n_fj, r):
    return mp.exp(log_gamma_ratio(n_bs, n_fj) + n_bs * mp.log(r))


def _bd(n_fj, n, base):
    # nonzero B/D coefficients as {subscript: value}
    return {n - k: math.comb(n_fj - 1, k) * base ** (n_fj - 1 - k) for k in range(n_fj)}


def _q(m, a, r):
    """``int_0^1 dx/(x+r)^m`` for m >= 1 with a = 1 + r."""
    if m == 1:
        return mp.log(a / r)
    return (r ** (1 - m) - a ** (1 - m)) / (m - 1)


@lru_cache(maxsize=512)
def _i12(n_bs: int, n_fj: int, r: float) -> float:
    n = n_bs + n_fj

    def evaluate():
        r_ = mp.mpf(r)
        a = 1 + r_
        coeff_b = _bd(n_fj, n, r_)
        # |C_j| = a^-j weights the partial fractions of 1/(u (u-a)^m)
        cw = [abs(c) for c in c_values(n, a, mp.mpf(1))]
        qs = [None] + [_q(k, a, r_) for k in range(1, n)]
        total = coeff_b.get(1, 0) * dilog(1 / a)  # vanishes for N_BS >= 1
        for i, b in coeff_b.items():
            if i < 2:
                continue
            m = i - 1
            h = mp.fsum(cw[j - 1] * qs[m - j + 1] for j in range(1, m + 1))
            total += b * (-1) ** (i - 1) * h / m
        return (-1) ** (n_bs + 1) * _prefactor(n_bs, n_fj, r_) * total

    return _stable(evaluate)


def _r_integrals(mmax: int, r):
    """``R_m = int_0^1 dx / ((x+1/2)(x+r)^m)`` for m = 0..mmax."""
    a = 1 + r
    d = r - mp.mpf(1) / 2
    ln3 = mp.log(3)
    out = [ln3]
    if d == 0:
        return out + [(2 ** m - (mp.mpf(2) / 3) ** m) / m for m in range(1, mmax + 1)]
    if abs(d) < 0.2:
        # expand (x+r)^-m = (x+1/2)^-m (1 + d/(x+1/2))^-m
        half, three_half = mp.mpf(1) / 2, mp.mpf(3) / 2

        def jint(p):
            return (half ** (1 - p) - three_half ** (1 - p)) / (p - 1)

        eps = mp.eps
        for m in range(1, mmax + 1):
            total = mp.mpf(0)
            k = 0
            coef = mp.mpf(1)
            while True:
                term = coef * jint(m + k + 1)
                total += term
                if k > 10 and abs(term) < eps * abs(total):
                    break
                k += 1
                coef *= -d * (m + k - 1) / k
            out.append(total)
        return out
    qs = [None] + [_q(k, a, r) for k in range(1, mmax + 1)]
    for m in range(1, mmax + 1):
        s = ln3 / d ** m - mp.fsum(qs[j] / d ** (m - j + 1) for j in range(1, m + 1))
        out.append(s)
    return out


def _m1(r):
    """``int_0^1 ln(1+2x)/(x+r) dx`` in real arithmetic."""
    a = 1 + r
    d = r - mp.mpf(1) / 2
    if d >= 0:
        return (mp.log(2) * mp.log(a / r) + (mp.log(a) ** 2 - mp.log(r) ** 2) / 2
                + dilog(d / a) - dilog(d / r))
    return mp.log(-2 * d) * mp.log(a / r) - dilog(a / d) + dilog(r / d)


@lru_cache(maxsize=512)
def _i13(n_bs: int, n_fj: int, r: float) -> float:
    n = n_bs + n_fj

    def evaluate():
        r_ = mp.mpf(r)
        a = 1 + r_
        coeff_d = _bd(n_fj, n, -r_)
        rint = _r_integrals(n - 1, r_)
        ln3 = mp.log(3)
        total = coeff_d.get(1, 0) * _m1(r_) if 1 in coeff_d else mp.mpf(0)
        for i, dcoef in coeff_d.items():
            if i < 2:
                continue
            m_i = (-ln3 * a ** (1 - i) + rint[i - 1]) / (i - 1)
            total += dcoef * m_i
        return _prefactor(n_bs, n_fj, r_) * total

    return _stable(evaluate)


def i12(cfg: NetworkConfig) -> float:
    """Closed form of ``E[ln(1 - X); X < 1]``, always negative."""
    return _i12(*_ratio_params(cfg))


def i13(cfg: NetworkConfig) -> float:
    """Closed form of ``E[ln(1 + 2X); X < 1]``, always positive."""
    return _i13(*_ratio_params(cfg))


def i12_quadrature(cfg: NetworkConfig) -> float:
    return ratio_expectation(lambda x: math.log1p(-x), cfg, upper=1.0)[0]


def i13_quadrature(cfg: NetworkConfig, upper: float = 1.0) -> float:
    """Quadrature oracle for I13; ``upper=inf`` integrates over all X."""
    return ratio_expectation(lambda x: math.log1p(2 * x), cfg, upper=upper)[0]


@dataclass(frozen=True)
class AsymptoticResult:
    """Affine high-SNR law ``R(rho) ~ slope (log2 rho - offset)``."""

    slope: float
    offset: float

    def essr_at(self, rho: float) -> float:
        return self.slope * (math.log2(rho) - self.offset)


def _assemble(cfg: NetworkConfig) -> tuple[float, dict]:
    c11, c12, c13 = i11(cfg.gbar_mr), i12(cfg), i13(cfg)
    raw = (2 * c11 + c12 - c13 - 2 * LN2) / (2 * LN2)
    return raw, {"i11": c11, "i12": c12, "i13": c13, "unclamped": raw}


def essr_asymptotic(cfg: NetworkConfig) -> EssrEstimate:
    """High-SNR ESSR ``(2 I11 + I12 - I13 - 2 ln 2)/(2 ln 2)``, clamped at zero."""
    raw, comps = _assemble(cfg)
    return EssrEstimate(max(0.0, raw), Method.ASYMPTOTIC, components=comps)


def slope_offset(cfg: NetworkConfig) -> AsymptoticResult:
    """High-SNR slope (always 1) and power offset in 3 dB units."""
    offset = (-math.log2(cfg.mu_mr) - i12(cfg) / (2 * LN2) + i13(cfg) / (2 * LN2)
              + EULER_GAMMA / LN2 + 1)
    return AsymptoticResult(1.0, offset)


def power_offset_simplified(cfg: NetworkConfig) -> float:
    """Small-ratio power offset ``... + 3 N_FJ r / ((N_BS - 1) ln 2)`` with r = mu_fr/mu_br."""
    if cfg.n_bs < 2:
        raise ValueError("offset law requires N_BS >= 2")
    jam = 3 * cfg.n_fj * cfg.ratio / ((cfg.n_bs - 1) * LN2) if cfg.n_fj else 0.0
    return -math.log2(cfg.mu_mr) + jam + EULER_GAMMA / LN2 + 1
