"""Throughput toolkit for incremental decode-and-forward relaying with a
power-splitting energy-harvesting relay in an underlay spectrum-sharing
network: exact and approximate closed forms, an independent Monte Carlo
protocol simulator, and optimizers for the power split and the fixed rate."""

__version__ = "0.1.0"

from .analytic import (
    OutageBreakdown,
    RegimeError,
    SplitOutOfRangeError,
    combined_outage,
    combined_outage_high_snr,
    combined_outage_uncapped,
    decode_outage,
    direct_success,
    direct_with_decode,
    harvested_link_cdf,
    optimal_split,
    optimal_split_no_direct,
    throughput,
    throughput_no_direct,
    throughput_simplified,
)
from .model import (
    CombinedOutageParams,
    DegenerateSplitError,
    LinkStats,
    NetworkGeometry,
    Scenario,
    ScenarioError,
    SystemParams,
    combined_outage_params,
    conditional_direct_mean,
    link_stats_from_geometry,
    load_scenario,
    scenario_from_dict,
)
from .montecarlo import McEstimate, TrialOutcome, estimate, estimate_variant, run_trial
from .optimize import OptResult, closed_form_split, maximize_rate, maximize_split
from .presets import default_scenario
from .specfun import SpecFunResult, e1, ei, exp_e1_scaled, exp_ei_scaled
from .sweep import SweepResult, SweepSpec, run_sweep, write_csv

__all__ = [
    "__version__",
    "CombinedOutageParams",
    "DegenerateSplitError",
    "LinkStats",
    "McEstimate",
    "NetworkGeometry",
    "OptResult",
    "OutageBreakdown",
    "RegimeError",
    "Scenario",
    "ScenarioError",
    "SpecFunResult",
    "SplitOutOfRangeError",
    "SweepResult",
    "SweepSpec",
    "SystemParams",
    "TrialOutcome",
    "closed_form_split",
    "combined_outage",
    "combined_outage_high_snr",
    "combined_outage_params",
    "combined_outage_uncapped",
    "conditional_direct_mean",
    "decode_outage",
    "default_scenario",
    "direct_success",
    "direct_with_decode",
    "e1",
    "ei",
    "estimate",
    "estimate_variant",
    "exp_e1_scaled",
    "exp_ei_scaled",
    "harvested_link_cdf",
    "link_stats_from_geometry",
    "load_scenario",
    "maximize_rate",
    "maximize_split",
    "optimal_split",
    "optimal_split_no_direct",
    "run_sweep",
    "run_trial",
    "scenario_from_dict",
    "throughput",
    "throughput_no_direct",
    "throughput_simplified",
    "write_csv",
]
