"""Parameter sweeps and figure presets written as CSV."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .asymptotic import essr_asymptotic
from .essr import (AVERAGE_THEN_CLAMP, CLAMP_THEN_AVERAGE, DEFAULT_TRIALS, EssrEstimate, Method,
                   essr_closed, essr_montecarlo, worker_count)
from .model import NetworkConfig, regime_check
from .opa import Strategy

log = logging.getLogger(__name__)

COLUMNS = ["sweep_kind", "sweep_value", "strategy", "method", "essr_bits", "ci_halfwidth",
           "trials", "seed", "regime_flags", "n_bs", "n_fj", "rho_db", "mu_fr"]
FORMAT_VERSION = 1


class SweepKind(str, Enum):
    SNR_DB = "SnrDb"
    NUM_FJ_ANTENNAS = "NumFjAntennas"
    FJ_DISTANCE = "FjDistance"


def _enum(cls, text: str):
    for member in cls:
        if text.replace("_", "").lower() == member.value.lower():
            return member
    raise ValueError(f"unknown {cls.__name__} {text!r}; choose from {[m.value for m in cls]}")


@dataclass(frozen=True)
class SweepSpec:
    sweep_kind: SweepKind
    values: tuple
    strategies: tuple = (Strategy.OPA_NUMERIC,)
    methods: tuple = (Method.MONTE_CARLO,)
    trials: int = DEFAULT_TRIALS
    seed: int = 1
    lsma_sinr: bool = False
    convention: str = AVERAGE_THEN_CLAMP

    def __post_init__(self):
        object.__setattr__(self, "sweep_kind", SweepKind(self.sweep_kind))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "strategies", tuple(Strategy(s) for s in self.strategies))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        if Method.QUADRATURE in self.methods:
            raise ValueError("Quadrature is a validation method, not a sweep method")
        if self.trials < 1000:
            raise ValueError("trials must be at least 1000")
        if self.convention not in (AVERAGE_THEN_CLAMP, CLAMP_THEN_AVERAGE):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.sweep_kind is SweepKind.NUM_FJ_ANTENNAS:
            if any(v != int(v) or v < 0 for v in self.values):
                raise ValueError("antenna counts must be non-negative integers")
        if self.sweep_kind is SweepKind.FJ_DISTANCE and any(v <= 0 for v in self.values):
            raise ValueError("distances must be positive")


def parse_range(text: str) -> tuple[SweepKind, tuple]:
    """Parse ``kind:start:stop:step`` into a kind and an inclusive value list."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError("sweep must look like kind:start:stop:step")
    kind = _enum(SweepKind, parts[0])
    try:
        start, stop, step = (float(p) for p in parts[1:])
    except ValueError:
        raise ValueError(f"non-numeric sweep bounds in {text!r}") from None
    if step <= 0 or stop < start:
        raise ValueError("sweep needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return kind, tuple(round(start + k * step, 12) for k in range(n))


def point_config(kind: SweepKind, value: float, cfg: NetworkConfig) -> NetworkConfig:
    if kind is SweepKind.SNR_DB:
        return cfg.with_rho_db(value)
    if kind is SweepKind.NUM_FJ_ANTENNAS:
        return cfg.replace(n_fj=int(value))
    return cfg.with_fj_distance(value)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def _evaluate_point(spec: SweepSpec, kind: SweepKind, value: float, cfg: NetworkConfig) -> list[list]:
    pcfg = point_config(kind, value, cfg)
    flags = regime_check(pcfg).flags()
    rows = []
    analytic = [m for m in spec.methods if m is not Method.MONTE_CARLO]
    if analytic and pcfg.n_fj < 1:
        raise ValueError("closed-form and asymptotic methods need n_fj >= 1")

    def row(strategy, est: EssrEstimate, trials, seed):
        return [kind.value, value, strategy.value, est.method.value, est.value, est.ci_halfwidth,
                trials, seed, flags, pcfg.n_bs, pcfg.n_fj, pcfg.rho_db, pcfg.mu_fr]

    for method in spec.methods:
        if method is Method.MONTE_CARLO:
            for strategy in spec.strategies:
                est = essr_montecarlo(pcfg, strategy, spec.trials, spec.seed, spec.lsma_sinr,
                                      spec.convention, threads=1)
                rows.append(row(strategy, est, spec.trials, spec.seed))
        elif method is Method.CLOSED_FORM:
            rows.append(row(Strategy.OPA_LSMA, essr_closed(pcfg), "", ""))
        elif method is Method.ASYMPTOTIC:
            rows.append(row(Strategy.OPA_LSMA, essr_asymptotic(pcfg), "", ""))
    return rows


def sweep_rows(spec: SweepSpec, cfg: NetworkConfig, threads: int | None = None) -> list[list]:
    """All rows of a sweep in sweep order; points run on a thread pool."""
    threads = worker_count() if threads is None else max(1, int(threads))
    job = lambda v: _evaluate_point(spec, spec.sweep_kind, v, cfg)  # noqa: E731
    if threads == 1 or len(spec.values) == 1:
        chunks = [job(v) for v in spec.values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(job, spec.values))
    return [r for chunk in chunks for r in chunk]


def metadata(spec: SweepSpec, cfg: NetworkConfig, extra: dict | None = None) -> dict:
    meta = {
        "format_version": FORMAT_VERSION,
        "convention": spec.convention if Method.MONTE_CARLO in spec.methods else "n/a",
        "lsma_sinr": spec.lsma_sinr,
        "epsilon_users": cfg.epsilon_users,
        "epsilon_relay": cfg.epsilon_relay,
        "wofj_epsilon_relay": 1.0,
        "analytic_rows_strategy": Strategy.OPA_LSMA.value,
        "mu_br": cfg.mu_br, "mu_mr": cfg.mu_mr,
        "alpha": cfg.alpha,
    }
    meta.update(extra or {})
    return meta


def write_csv(out: str | Path, rows: list[list], meta: dict) -> None:
    """Write ``# key: value`` metadata lines, a header row and the data rows."""
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def read_csv(path: str | Path) -> list[dict]:
    """Read a sweep CSV back, skipping the metadata lines."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def run_sweep(spec: SweepSpec, cfg: NetworkConfig, out: str | Path, threads: int | None = None) -> dict:
    """Run one sweep and write it to ``out``.  Returns a small summary."""
    t0 = time.perf_counter()
    rows = sweep_rows(spec, cfg, threads)
    write_csv(out, rows, metadata(spec, cfg))
    return {"out": str(out), "rows": len(rows), "points": len(spec.values),
            "sweep_kind": spec.sweep_kind.value, "seconds": round(time.perf_counter() - t0, 3)}


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------

def reference_config(**kw) -> NetworkConfig:
    """Config on the reference geometry (BS, MU, relay, FJ at (-1,0), (1,0), (0,0), (0.3,0.4)), alpha = 2."""
    from .model import REFERENCE_POSITIONS

    return NetworkConfig.from_geometry(REFERENCE_POSITIONS, alpha=2.0, **kw)


def preset_jobs(name: str, trials: int = DEFAULT_TRIALS, seed: int = 1):
    """(spec, config) pairs that make up a figure preset."""
    if name == "fig2":
        # runs to 50 dB so the no-jammer curve reaches 5 bits/s/Hz
        snr = tuple(float(v) for v in range(0, 51, 2))
        spec = SweepSpec(SweepKind.SNR_DB, snr,
                         (Strategy.OPA_NUMERIC, Strategy.EPA, Strategy.WOFJ_OPA),
                         (Method.MONTE_CARLO,), trials, seed)
        return [(spec, reference_config(n_bs=64, n_fj=1))]
    if name == "fig3":
        snr = tuple(float(v) for v in range(10, 51, 5))
        spec = SweepSpec(SweepKind.SNR_DB, snr, (Strategy.OPA_LSMA,),
                         (Method.MONTE_CARLO, Method.CLOSED_FORM, Method.ASYMPTOTIC),
                         trials, seed, lsma_sinr=True)
        return [(spec, reference_config(n_bs=256, n_fj=n)) for n in (4, 8, 16)]
    if name == "fig4":
        dist = tuple(round(0.2 + 0.1 * k, 10) for k in range(11))
        spec = SweepSpec(SweepKind.FJ_DISTANCE, dist, (Strategy.OPA_NUMERIC,),
                         (Method.MONTE_CARLO, Method.ASYMPTOTIC), trials, seed)
        return [(spec, reference_config(n_bs=nb, n_fj=nf).with_rho_db(20.0))
                for nb in (64, 256) for nf in (1, 2, 4, 8, 16)]
    raise ValueError(f"unknown preset {name!r}; choose fig2, fig3 or fig4")


def run_preset(name: str, out: str | Path, trials: int = DEFAULT_TRIALS, seed: int = 1,
               threads: int | None = None) -> dict:
    t0 = time.perf_counter()
    jobs = preset_jobs(name, trials, seed)
    rows = []
    for spec, cfg in jobs:
        rows.extend(sweep_rows(spec, cfg, threads))
    spec0, cfg0 = jobs[0]
    meta = metadata(spec0, cfg0, {"preset": name})
    write_csv(out, rows, meta)
    return {"out": str(out), "rows": len(rows), "preset": name,
            "seconds": round(time.perf_counter() - t0, 3)}
