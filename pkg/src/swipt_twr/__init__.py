"""Outage analysis and simulation of a SWIPT two-way decode-and-forward cognitive relay."""

from .analytic import (AnalyticOutage, PhaseProbabilities, analytic_outage, energy_efficiency,
                       exact_outage, outage_pu, outage_su, pdf_Y, spectrum_efficiency)
from .model import (Combined, ConfigError, DerivedConstants, Explicit, LineLayout,
                    RangeViolation, Split, SystemConfig, derive, layout_distances,
                    load_config, default_config, validate)
from .montecarlo import OutageEstimate, estimate_outage
from .sweeps import SweepResult, SweepSpec, find_optimum, improvement_ratio, run_sweep

__all__ = [
    "AnalyticOutage", "PhaseProbabilities", "analytic_outage", "energy_efficiency",
    "exact_outage", "outage_pu", "outage_su", "pdf_Y", "spectrum_efficiency",
    "Combined", "ConfigError", "DerivedConstants", "Explicit", "LineLayout",
    "RangeViolation", "Split", "SystemConfig", "derive", "layout_distances",
    "load_config", "default_config", "validate",
    "OutageEstimate", "estimate_outage",
    "SweepResult", "SweepSpec", "find_optimum", "improvement_ratio", "run_sweep",
]
