"""Parameter sweeps: evaluate analytic and simulated throughput over a grid
of one scenario variable and serialize the result as CSV."""

from __future__ import annotations

import datetime
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import analytic, montecarlo, optimize
from .model import (
    NetworkGeometry,
    Scenario,
    ScenarioError,
    SystemParams,
    link_stats_from_geometry,
)

VARIABLES = ("rho", "rs", "i_over_no_db", "d_sr")
ENGINES = ("analytic_full", "analytic_sim", "mc")
VARIANTS = ("incremental", "direct_only", "no_direct_two_hop")

BREAKDOWN_FIELDS = (
    "decode_outage",
    "direct_with_decode",
    "combined_outage",
    "relayed_success",
    "direct_success",
)

MAX_STEPS = 10_000


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    engines: tuple[str, ...] = ("analytic_full",)
    variants: tuple[str, ...] = ("incremental",)
    rho_star: bool = False  # re-optimize the split at every point

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ScenarioError(f"unknown sweep variable {self.variable!r}")
        if not self.start < self.stop:
            raise ScenarioError("sweep requires start < stop")
        if not 2 <= self.steps <= MAX_STEPS:
            raise ScenarioError(f"steps must lie in [2, {MAX_STEPS}]")
        for engine in self.engines:
            if engine not in ENGINES:
                raise ScenarioError(f"unknown engine {engine!r}")
        for variant in self.variants:
            if variant not in VARIANTS:
                raise ScenarioError(f"unknown variant {variant!r}")
        if self.rho_star and self.variable == "rho":
            raise ScenarioError("rho_star mode cannot sweep rho itself")


@dataclass
class SweepResult:
    spec: SweepSpec
    xs: list[float]
    columns: dict[str, list[float | None]]
    metadata: dict[str, str] = field(default_factory=dict)


def _params_at(scenario: Scenario, variable: str, x: float) -> SystemParams:
    params = scenario.params
    if variable == "rho":
        return replace(params, rho=x)
    if variable == "rs":
        return replace(params, rs=x)
    if variable == "i_over_no_db":
        return replace(params, i_over_no=10.0 ** (x / 10.0))
    # d_sr: keep the relay on the source-destination line, d_rd = d_sd - d_sr
    geo = scenario.geometry
    if geo is None:
        raise ScenarioError("sweeping d_sr needs a geometry-based scenario")
    if not 0.0 < x < geo.d_sd:
        raise ScenarioError("d_sr sweep must stay inside (0, d_sd)")
    new_geo = NetworkGeometry(
        d_sr=x, d_rd=geo.d_sd - x, d_sd=geo.d_sd, d_sp=geo.d_sp, d_rp=geo.d_rp,
        epsilon=geo.epsilon,
    )
    return replace(params, links=link_stats_from_geometry(new_geo))


def _column_names(spec: SweepSpec) -> list[str]:
    names = [spec.variable]
    if spec.rho_star:
        names.append("rho_star")
    for engine in spec.engines:
        for variant in spec.variants:
            names.append(f"tau_{engine}_{variant}")
            if engine == "mc":
                names.append(f"stderr_mc_{variant}")
    if "analytic_full" in spec.engines:
        names.extend(BREAKDOWN_FIELDS)
    return names


def _evaluate_point(
    scenario: Scenario, spec: SweepSpec, x: float, trials: int, seed: int
) -> dict[str, float | None]:
    params = _params_at(scenario, spec.variable, x)
    row: dict[str, float | None] = {spec.variable: x}
    if spec.rho_star:
        rho = optimize._best_split_for(params, trials, seed)
        params = replace(params, rho=rho)
        row["rho_star"] = rho

    direct_tau = params.rs * analytic.direct_success(params)
    for engine in spec.engines:
        for variant in spec.variants:
            key = f"tau_{engine}_{variant}"
            try:
                if engine == "mc":
                    est = montecarlo.estimate(params, trials, seed=seed, variant=variant)
                    row[key] = est.mean
                    row[f"stderr_mc_{variant}"] = est.std_error
                elif variant == "direct_only":
                    row[key] = direct_tau
                elif variant == "no_direct_two_hop":
                    row[key] = (
                        analytic.throughput_no_direct(params)
                        if engine == "analytic_full"
                        else analytic.throughput_simplified_no_direct(params)
                    )
                elif engine == "analytic_full":
                    row[key] = analytic.throughput(params).tau
                else:
                    row[key] = analytic.throughput_simplified(params)
            except analytic.RegimeError:
                row[key] = None
    if "analytic_full" in spec.engines:
        try:
            breakdown = analytic.throughput(params)
            for name in BREAKDOWN_FIELDS:
                row[name] = getattr(breakdown, name)
        except analytic.RegimeError:
            for name in BREAKDOWN_FIELDS:
                row[name] = None
    return row


def run_sweep(
    scenario: Scenario,
    spec: SweepSpec,
    trials: int = 10**6,
    seed: int = 42,
    workers: int = 1,
) -> SweepResult:
    """Evaluate the sweep grid; rows are assembled in x order regardless of
    how the points are scheduled."""
    xs = [
        spec.start + (spec.stop - spec.start) * i / (spec.steps - 1)
        for i in range(spec.steps)
    ]
    job = lambda x: _evaluate_point(scenario, spec, x, trials, seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, xs))
    else:
        rows = [job(x) for x in xs]

    names = _column_names(spec)
    columns: dict[str, list[float | None]] = {name: [] for name in names}
    for row in rows:
        for name in names:
            columns[name].append(row.get(name))

    from . import __version__

    metadata = {
        "scenario_hash": scenario.hash,
        "seed": str(seed),
        "trials": str(trials),
        "version": __version__,
        "variable": spec.variable,
        "engines": ",".join(spec.engines),
        "variants": ",".join(spec.variants),
        "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    return SweepResult(spec=spec, xs=xs, columns=columns, metadata=metadata)


def write_csv(result: SweepResult, path: str | Path) -> None:
    """Write '#' metadata lines, a header row and 9-significant-digit rows.

    Identical inputs produce byte-identical files apart from the single
    '# generated=' timestamp line.
    """
    names = list(result.columns.keys())
    lines = [f"# {key}={value}" for key, value in result.metadata.items()]
    lines.append(",".join(names))
    for i in range(len(result.xs)):
        cells = []
        for name in names:
            value = result.columns[name][i]
            cells.append("" if value is None else f"{value:.9g}")
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
