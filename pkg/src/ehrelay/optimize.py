"""Numerical search for the throughput-maximizing power split and rate.

Golden-section search after a coarse unimodality pre-scan, with an
exhaustive-grid fallback when the pre-scan sees more than one local
maximum.  Monte Carlo objectives reuse one seed for every evaluation
(common random numbers) so the response surface is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from . import analytic, montecarlo
from .model import SystemParams

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

SPLIT_LO = 0.001
SPLIT_HI = 0.999
PRESCAN_POINTS = 21

OBJECTIVES = ("tau_full", "tau_sim", "tau_mc")


@dataclass(frozen=True)
class OptResult:
    arg_opt: float
    value_opt: float
    method: str  # closed_form | golden_section | grid
    evaluations: int


def _split_objective(
    params: SystemParams,
    objective: str | Callable[[float], float],
    trials: int,
    seed: int,
) -> Callable[[float], float]:
    if callable(objective):
        return objective
    if objective == "tau_full":
        return lambda rho: analytic.throughput(replace(params, rho=rho)).tau
    if objective == "tau_sim":
        return lambda rho: analytic.throughput_simplified(replace(params, rho=rho))
    if objective == "tau_mc":
        return lambda rho: montecarlo.estimate(
            replace(params, rho=rho), trials, seed=seed
        ).mean
    raise ValueError(f"unknown objective {objective!r}")


def _is_unimodal(values: list[float]) -> bool:
    """True when the sequence rises to a single peak then falls (ties merged)."""
    direction = 1
    for prev, cur in zip(values, values[1:]):
        if cur == prev:
            continue
        if cur > prev:
            if direction < 0:
                return False
        else:
            direction = -1
    return True


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float, int]:
    """Maximize a unimodal f on [lo, hi]; returns (x, f(x), evaluations)."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        evals += 1
    x = 0.5 * (a + b)
    return x, f(x), evals + 1


def _grid_max(
    f: Callable[[float], float], lo: float, hi: float, step: float
) -> tuple[float, float, int]:
    n = max(2, int(round((hi - lo) / step)) + 1)
    best_x, best_v = lo, -math.inf
    for i in range(n):
        x = lo + (hi - lo) * i / (n - 1)
        v = f(x)
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v, n


def maximize_split(
    params: SystemParams,
    objective: str | Callable[[float], float] = "tau_full",
    tol: float = 1e-4,
    trials: int = 10**6,
    seed: int = 0,
) -> OptResult:
    """Find the power split maximizing the chosen throughput objective.

    The search interval is clipped to [0.001, 0.999]; the closed forms
    degenerate at the endpoints and the endpoints are never optimal.  A
    21-point pre-scan checks unimodality; on failure the result comes from
    an exhaustive grid instead of golden-section and is flagged as such.
    """
    if not 1e-6 <= tol <= 0.05:
        raise ValueError("tol must lie in [1e-6, 0.05]")
    f = _split_objective(params, objective, trials, seed)
    xs = [
        SPLIT_LO + (SPLIT_HI - SPLIT_LO) * i / (PRESCAN_POINTS - 1)
        for i in range(PRESCAN_POINTS)
    ]
    values = [f(x) for x in xs]
    evals = len(xs)
    if not _is_unimodal(values):
        step = max(tol, 1e-4)
        x, v, n = _grid_max(f, SPLIT_LO, SPLIT_HI, step)
        return OptResult(arg_opt=x, value_opt=v, method="grid", evaluations=evals + n)
    peak = max(range(len(xs)), key=values.__getitem__)
    lo = xs[max(0, peak - 1)]
    hi = xs[min(len(xs) - 1, peak + 1)]
    x, v, n = golden_section_max(f, lo, hi, tol)
    return OptResult(arg_opt=x, value_opt=v, method="golden_section", evaluations=evals + n)


def closed_form_split(params: SystemParams) -> OptResult:
    """Closed-form optimal split, scored with the full throughput expression."""
    rho = analytic.optimal_split(params)
    value = analytic.throughput(replace(params, rho=rho)).tau
    return OptResult(arg_opt=rho, value_opt=value, method="closed_form", evaluations=1)


def _best_split_for(params: SystemParams, trials: int, seed: int) -> float:
    """Closed-form split when valid, golden-section on the full form otherwise."""
    try:
        return analytic.optimal_split(params)
    except analytic.SplitOutOfRangeError:
        return maximize_split(params, "tau_full", tol=1e-4, trials=trials, seed=seed).arg_opt


def maximize_rate(
    params: SystemParams,
    rs_range: tuple[float, float],
    objective: str = "tau_full",
    trials: int = 10**6,
    seed: int = 0,
    grid_points: int = 33,
    tol: float = 1e-3,
) -> OptResult:
    """Maximize throughput over the fixed rate, re-optimizing the split at
    every candidate rate.

    Grid scan followed by golden-section refinement between the best grid
    point's neighbours.  The range must lie inside (0, 12].
    """
    lo, hi = rs_range
    if not (0.0 < lo <= hi <= 12.0):
        raise ValueError("rs_range must satisfy 0 < lo <= hi <= 12")
    if objective not in ("tau_full", "tau_mc"):
        raise ValueError(f"unknown objective {objective!r}")

    evals = 0

    def value_at(rs: float) -> float:
        nonlocal evals
        evals += 1
        candidate = replace(params, rs=rs)
        rho = _best_split_for(candidate, trials, seed)
        tuned = replace(candidate, rho=rho)
        if objective == "tau_mc":
            return montecarlo.estimate(tuned, trials, seed=seed).mean
        return analytic.throughput(tuned).tau

    if lo == hi:
        return OptResult(arg_opt=lo, value_opt=value_at(lo), method="grid", evaluations=evals)

    xs = [lo + (hi - lo) * i / (grid_points - 1) for i in range(grid_points)]
    values = [value_at(x) for x in xs]
    peak = max(range(len(xs)), key=values.__getitem__)
    bracket_lo = xs[max(0, peak - 1)]
    bracket_hi = xs[min(len(xs) - 1, peak + 1)]
    x, v, _ = golden_section_max(value_at, bracket_lo, bracket_hi, tol)
    if values[peak] > v:
        x, v = xs[peak], values[peak]
    return OptResult(arg_opt=x, value_opt=v, method="golden_section", evaluations=evals)
