"""Stock scenarios and the two standard report figures.

The default network is collinear with a 3.0 source-destination distance,
both primary-network distances at 3.0, path-loss exponent 4, eta = 0.7,
an interference-to-noise ratio of 6 dB and a 3 bit fixed rate.  The two
stock placements put the relay at 1.2 and 1.7 from the source.
"""

from __future__ import annotations

from .model import Scenario, scenario_from_dict


def _scenario_dict(d_sr: float, **extra) -> dict:
    base = {
        "description": f"collinear network, relay at {d_sr} from the source",
        "geometry": {
            "d_sr": d_sr,
            "d_rd": 3.0 - d_sr,
            "d_sd": 3.0,
            "d_sp": 3.0,
            "d_rp": 3.0,
        },
        "epsilon": 4.0,
        "eta": 0.7,
        "rho": 0.5,
        "i_over_no_db": 6.0,
        "rs": 3.0,
    }
    base.update(extra)
    return base


def default_scenario(d_sr: float = 1.2, **extra) -> Scenario:
    return scenario_from_dict(_scenario_dict(d_sr, **extra))


FIGURE_PRESETS = ("tau-vs-rho", "tau-vs-rs")


def figure_recipe(name: str) -> dict:
    """Sweep recipes behind the stock figures.

    tau-vs-rho: throughput against the power split for both relay
    placements, with the relay-less and no-direct baselines.
    tau-vs-rs: throughput against the fixed rate for 6 and 10 dB, the split
    re-optimized at every point.
    """
    if name == "tau-vs-rho":
        return {
            "variable": "rho",
            "start": 0.01,
            "stop": 0.99,
            "steps": 99,
            "engines": ("analytic_full", "mc"),
            "variants": ("incremental", "direct_only", "no_direct_two_hop"),
            "rho_star": False,
            "curves": [
                ("d_sr=1.2", default_scenario(1.2)),
                ("d_sr=1.7", default_scenario(1.7)),
            ],
        }
    if name == "tau-vs-rs":
        return {
            "variable": "rs",
            "start": 0.5,
            "stop": 8.0,
            "steps": 31,
            "engines": ("analytic_full", "mc"),
            "variants": ("incremental", "direct_only"),
            "rho_star": True,
            "curves": [
                ("I/N0=6dB", default_scenario(1.2)),
                ("I/N0=10dB", default_scenario(1.2, i_over_no_db=10.0)),
            ],
        }
    raise ValueError(f"unknown figure preset {name!r}; choose from {FIGURE_PRESETS}")
