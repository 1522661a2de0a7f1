"""Secrecy sum rate of two-way untrusted AF relaying with a friendly jammer."""

from .asymptotic import essr_asymptotic, i11, i12, i13, power_offset_simplified, slope_offset
from .channel import ChannelRealization, SeededSampler, gamma_ratio_pdf, sample
from .essr import EssrEstimate, Method, essr_closed, essr_montecarlo, i1_closed, i1_quadrature, i2_closed, i3_closed
from .model import ConfigError, NetworkConfig, NodePositions, gains_from_geometry, load_config, regime_check
from .opa import PowerAllocation, Strategy, epa, opa_closed, opa_grid_oracle, opa_lsma, opa_numeric, opa_wofj
from .sinr import lsma_sinrs, phi, sinrs
from .special import EiApproxParams, coeffs_A, coeffs_BCD, dilog, ei, ei_approx
from .sweep import SweepKind, SweepSpec, run_preset, run_sweep
from .validation import validate

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "ConfigError", "EiApproxParams", "EssrEstimate", "Method", "NetworkConfig",
    "NodePositions", "PowerAllocation", "SeededSampler", "Strategy", "SweepKind", "SweepSpec",
    "coeffs_A", "coeffs_BCD", "dilog", "ei", "ei_approx", "epa", "essr_asymptotic", "essr_closed",
    "essr_montecarlo", "gains_from_geometry", "gamma_ratio_pdf", "i11", "i12", "i13", "i1_closed",
    "i1_quadrature", "i2_closed", "i3_closed", "load_config", "lsma_sinrs", "opa_closed", "opa_grid_oracle",
    "opa_lsma", "opa_numeric", "opa_wofj", "phi", "power_offset_simplified", "regime_check", "run_preset",
    "run_sweep", "sample", "sinrs", "slope_offset", "validate",
]
