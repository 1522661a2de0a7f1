"""Network configuration, node geometry and regime checks."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

log = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = (10.0, 10.0, 10.0)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class NodePositions:
    """2-D coordinates of the base station, mobile user, relay and jammer."""

    bs: tuple[float, float] = (-1.0, 0.0)
    mu: tuple[float, float] = (1.0, 0.0)
    relay: tuple[float, float] = (0.0, 0.0)
    fj: tuple[float, float] = (0.3, 0.4)

    def __post_init__(self):
        pts = {k: tuple(float(c) for c in getattr(self, k)) for k in ("bs", "mu", "relay", "fj")}
        for k, p in pts.items():
            if len(p) != 2:
                raise ConfigError(f"position {k} must have two coordinates")
            object.__setattr__(self, k, p)
        names = list(pts)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                if math.dist(pts[a], pts[b]) == 0:
                    raise ConfigError(f"degenerate geometry: {a} and {b} coincide")

    def scaled(self, s: float) -> "NodePositions":
        return NodePositions(*(tuple(s * c for c in getattr(self, k)) for k in ("bs", "mu", "relay", "fj")))

    def with_fj_distance(self, d: float) -> "NodePositions":
        """Move the jammer along its current bearing from the relay to distance d."""
        rx, ry = self.relay
        dx, dy = self.fj[0] - rx, self.fj[1] - ry
        norm = math.hypot(dx, dy)
        return replace(self, fj=(rx + d * dx / norm, ry + d * dy / norm))


REFERENCE_POSITIONS = NodePositions()


def gains_from_geometry(pos: NodePositions, alpha: float) -> tuple[float, float, float]:
    """Distance-dependent gains ``d^-alpha`` from BS, MU and FJ to the relay."""
    if not alpha > 0:
        raise ConfigError("alpha must be positive")
    out = []
    for node in (pos.bs, pos.mu, pos.fj):
        d = math.dist(node, pos.relay)
        if d == 0:
            raise ConfigError("degenerate geometry")
        out.append(d ** (-alpha))
    return tuple(out)


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable description of one operating point.

    Gains are per-branch means; all SINR formulas work with the normalised
    mean gains ``gbar_* = rho * mu_*``.
    """

    n_bs: int = 64
    n_fj: int = 1
    mu_br: float = 1.0
    mu_mr: float = 1.0
    mu_fr: float = 4.0
    rho: float = 100.0
    alpha: float = 2.0
    epsilon_relay: float = 0.0
    epsilon_users: float = 1.0
    positions: NodePositions | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.n_bs) != self.n_bs or self.n_bs < 1:
            raise ConfigError("n_bs must be a positive integer")
        if int(self.n_fj) != self.n_fj or self.n_fj < 0:
            raise ConfigError("n_fj must be a non-negative integer")
        object.__setattr__(self, "n_bs", int(self.n_bs))
        object.__setattr__(self, "n_fj", int(self.n_fj))
        for k in ("mu_br", "mu_mr", "mu_fr", "rho", "alpha"):
            v = float(getattr(self, k))
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{k} must be positive and finite")
            object.__setattr__(self, k, v)
        for k in ("epsilon_relay", "epsilon_users"):
            v = float(getattr(self, k))
            if v not in (0.0, 1.0):
                raise ConfigError(f"{k} must be 0 or 1")
            object.__setattr__(self, k, v)

    @classmethod
    def from_geometry(cls, positions: NodePositions, alpha: float = 2.0, **kw) -> "NetworkConfig":
        mu_br, mu_mr, mu_fr = gains_from_geometry(positions, alpha)
        return cls(mu_br=mu_br, mu_mr=mu_mr, mu_fr=mu_fr, alpha=alpha, positions=positions, **kw)

    @property
    def rho_db(self) -> float:
        return linear_to_db(self.rho)

    @property
    def gbar_br(self) -> float:
        return self.rho * self.mu_br

    @property
    def gbar_mr(self) -> float:
        return self.rho * self.mu_mr

    @property
    def gbar_fr(self) -> float:
        return self.rho * self.mu_fr if self.n_fj > 0 else 0.0

    @property
    def ratio(self) -> float:
        """Per-branch mean ratio r = mu_fr / mu_br."""
        return self.mu_fr / self.mu_br

    @property
    def varrho(self) -> float:
        return 1.0 + self.ratio

    def with_rho_db(self, rho_db: float) -> "NetworkConfig":
        return replace(self, rho=db_to_linear(rho_db))

    def with_fj_distance(self, d: float) -> "NetworkConfig":
        """Place the jammer at distance d from the relay and recompute its gain."""
        pos = (self.positions or REFERENCE_POSITIONS).with_fj_distance(d)
        _, _, mu_fr = gains_from_geometry(pos, self.alpha)
        return replace(self, mu_fr=mu_fr, positions=pos)

    def replace(self, **kw) -> "NetworkConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class RegimeReport:
    lsma_ok: bool
    high_mr_ok: bool
    jammer_dominant_ok: bool
    lambda_feasible_ok: bool
    ratios: dict

    @property
    def all_ok(self) -> bool:
        return self.lsma_ok and self.high_mr_ok and self.jammer_dominant_ok and self.lambda_feasible_ok

    def flags(self) -> str:
        """Compact ``name=0/1`` string used in CSV output."""
        keys = ("lsma_ok", "high_mr_ok", "jammer_dominant_ok", "lambda_feasible_ok")
        return ";".join(f"{k.removesuffix('_ok')}={int(getattr(self, k))}" for k in keys)


def regime_check(cfg: NetworkConfig, thresholds=DEFAULT_THRESHOLDS) -> RegimeReport:
    """Compare mean-gain ratios with the ``>>`` thresholds.

    ``thresholds = (t_lsma, t_mr, t_jam)``.  Feasibility of lambda < 1
    requires the aggregate jammer gain to be ``t_lsma`` times below the
    aggregate BS gain.  The report is advisory only.
    """
    t_lsma, t_mr, t_jam = (float(t) for t in thresholds)
    if min(t_lsma, t_mr, t_jam) <= 0:
        raise ConfigError("thresholds must be positive")
    agg_br = cfg.n_bs * cfg.gbar_br
    agg_fr = cfg.n_fj * cfg.gbar_fr
    ratios = {
        "bs_over_mr": agg_br / cfg.gbar_mr,
        "mr": cfg.gbar_mr,
        "fj_over_mr": agg_fr / cfg.gbar_mr,
        "fj_over_bs": agg_fr / agg_br,
    }
    return RegimeReport(
        lsma_ok=ratios["bs_over_mr"] >= t_lsma,
        high_mr_ok=ratios["mr"] >= t_mr,
        jammer_dominant_ok=ratios["fj_over_mr"] >= t_jam,
        lambda_feasible_ok=ratios["fj_over_bs"] * t_lsma <= 1.0,
        ratios=ratios,
    )


# ----------------------------------------------------------------------
# configuration files
# ----------------------------------------------------------------------

_KEYS = {
    "n_bs", "n_fj", "rho_db", "alpha", "epsilon_relay", "epsilon_users",
    "positions.bs", "positions.mu", "positions.relay", "positions.fj",
    "gains.mu_br", "gains.mu_mr", "gains.mu_fr",
}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^([A-Za-z_.]+)\s*[=:]\s*(.+)$", line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = m.group(1).strip(), m.group(2).strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _number(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {value!r}") from None


def _point(key: str, value: str) -> tuple[float, float]:
    parts = [p for p in re.split(r"[,\s]+", value.strip("()[] ")) if p]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected two coordinates")
    return (_number(key, parts[0]), _number(key, parts[1]))


def config_from_mapping(kv: dict, base: NetworkConfig | None = None) -> NetworkConfig:
    base = base or NetworkConfig()
    kw = {}
    for key in ("n_bs", "n_fj"):
        if key in kv:
            v = _number(key, kv[key])
            if v != int(v):
                raise ConfigError(f"{key} must be an integer")
            kw[key] = int(v)
    if "rho_db" in kv:
        kw["rho"] = db_to_linear(_number("rho_db", kv["rho_db"]))
    for key in ("alpha", "epsilon_relay", "epsilon_users"):
        if key in kv:
            kw[key] = _number(key, kv[key])
    pos_keys = [k for k in kv if k.startswith("positions.")]
    gain_keys = [k for k in kv if k.startswith("gains.")]
    if pos_keys:
        if len(pos_keys) != 4:
            raise ConfigError("positions need all of bs, mu, relay, fj")
        if gain_keys:
            log.warning("both geometry and gains given; geometry wins")
        pos = NodePositions(**{k.split(".")[1]: _point(k, kv[k]) for k in pos_keys})
        alpha = kw.get("alpha", base.alpha)
        mu_br, mu_mr, mu_fr = gains_from_geometry(pos, alpha)
        kw.update(mu_br=mu_br, mu_mr=mu_mr, mu_fr=mu_fr, positions=pos)
    else:
        for k in gain_keys:
            kw[k.split(".")[1]] = _number(k, kv[k])
    return replace(base, **kw)


def load_config(path: str | Path, base: NetworkConfig | None = None) -> NetworkConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(parse_config_text(text), base)
