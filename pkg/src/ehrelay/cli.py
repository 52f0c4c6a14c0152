"""Command-line driver: scenario validation, parameter sweeps, optimum
search and the stock report figures.

Exit codes: 0 ok, 2 config/argument parse error, 3 invalid scenario,
4 output I/O error, 5 optimizer fell back to a grid scan.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, analytic, montecarlo, optimize
from .model import Scenario, ScenarioError, load_scenario
from .presets import FIGURE_PRESETS, figure_recipe
from .sweep import SweepResult, SweepSpec, run_sweep, write_csv

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SCENARIO = 3
EXIT_IO = 4
EXIT_FALLBACK = 5

_ENGINE_ALIASES = {"analytic": "analytic_full", "sim": "analytic_sim"}


class _ConfigReadError(Exception):
    """Config file missing or not valid JSON (distinct from output I/O)."""


def _read_scenario(path: str, overrides: list[str] | None) -> Scenario:
    try:
        return load_scenario(path, overrides)
    except (FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        raise _ConfigReadError(str(exc)) from exc


def _default_trials() -> int:
    return int(os.environ.get("EHRELAY_TRIALS", "1000000"))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--workers", type=int, default=1)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _validation_rows(scenario: Scenario, trials: int, seed: int, workers: int) -> list[dict]:
    params = scenario.params
    breakdown = analytic.throughput(params)
    est = montecarlo.estimate(params, trials, seed=seed, workers=workers)

    rows = []
    for name, tol_sigma in (
        ("decode_outage", 4.0),
        ("direct_with_decode", 4.0),
        ("direct_success", 4.0),
    ):
        closed = getattr(breakdown, name)
        freq = est.freq(name)
        se = max(est.binomial_stderr(name), 1e-30)
        z = abs(closed - freq) / se
        rows.append(
            {
                "quantity": name,
                "analytic": closed,
                "simulated": freq,
                "std_error": se,
                "criterion": f"|z| <= {tol_sigma:g}",
                "ok": z <= tol_sigma,
                "detail": f"z={z:.2f}",
            }
        )
    for name, tol_abs in (("combined_outage", 0.01), ("relayed_success", 0.02)):
        closed = getattr(breakdown, name)
        freq = est.freq(name)
        diff = abs(closed - freq)
        rows.append(
            {
                "quantity": name,
                "analytic": closed,
                "simulated": freq,
                "std_error": est.binomial_stderr(name),
                "criterion": f"|diff| <= {tol_abs:g}",
                "ok": diff <= tol_abs,
                "detail": f"diff={diff:.5f}",
            }
        )
    diff = abs(breakdown.tau - est.mean)
    rows.append(
        {
            "quantity": "throughput",
            "analytic": breakdown.tau,
            "simulated": est.mean,
            "std_error": est.std_error,
            "criterion": "|diff| <= 0.02",
            "ok": diff <= 0.02,
            "detail": f"diff={diff:.5f}",
        }
    )
    return rows


def _cmd_validate(args) -> int:
    scenario = _read_scenario(args.config, args.overrides)
    trials = args.trials if args.trials is not None else _default_trials()
    params = scenario.params
    lam = params.links
    print(f"scenario {args.config} (hash={scenario.hash}, trials={trials}, seed={args.seed})")
    print(
        f"  lambda_sr={lam.lambda_sr:.6g} lambda_rd={lam.lambda_rd:.6g} "
        f"lambda_sd={lam.lambda_sd:.6g} lambda_sp={lam.lambda_sp:.6g} "
        f"lambda_rp={lam.lambda_rp:.6g}"
    )
    print(
        f"  eta={params.eta:g} rho={params.rho:g} i_over_no={params.i_over_no:.6g} "
        f"rs={params.rs:g} gamma_th={params.gamma_th:.6g} psi={params.psi:.6g}"
    )
    try:
        star = analytic.optimal_split(params)
        print(f"  closed-form optimal split: rho*={star:.4f}")
    except analytic.SplitOutOfRangeError as exc:
        print(f"  closed-form optimal split: n/a ({exc})")

    rows = _validation_rows(scenario, trials, args.seed, args.workers)
    header = f"{'quantity':22s} {'analytic':>12s} {'simulated':>12s} {'std_err':>10s}  {'criterion':16s} status"
    print(header)
    print("-" * len(header))
    for row in rows:
        status = "ok" if row["ok"] else "FAIL"
        print(
            f"{row['quantity']:22s} {row['analytic']:12.6f} {row['simulated']:12.6f} "
            f"{row['std_error']:10.2e}  {row['criterion']:16s} {status} ({row['detail']})"
        )
    all_ok = all(row["ok"] for row in rows)
    print(f"overall: {'ok' if all_ok else 'FAIL'}")

    if args.out:
        report = {
            "scenario_hash": scenario.hash,
            "trials": trials,
            "seed": args.seed,
            "version": __version__,
            "rows": rows,
            "all_ok": all_ok,
        }
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        print(f"report written to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _parse_names(text: str, aliases: dict[str, str]) -> tuple[str, ...]:
    names = tuple(aliases.get(part.strip(), part.strip()) for part in text.split(","))
    return tuple(name for name in names if name)


def _cmd_sweep(args) -> int:
    scenario = _read_scenario(args.config, args.overrides)
    trials = args.trials if args.trials is not None else _default_trials()
    spec = SweepSpec(
        variable=args.var,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        engines=_parse_names(args.engines, _ENGINE_ALIASES),
        variants=_parse_names(args.variants, {}),
        rho_star=args.rho_star,
    )
    result = run_sweep(scenario, spec, trials=trials, seed=args.seed, workers=args.workers)
    out = Path(args.out)
    write_csv(result, out)
    print(f"sweep written to {out} ({spec.steps} rows)")
    if not args.no_figure:
        from .plotting import render_sweep_figure

        fig_path = out.with_suffix(".png")
        render_sweep_figure(result, fig_path)
        print(f"figure written to {fig_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def _cmd_optimize(args) -> int:
    scenario = _read_scenario(args.config, args.overrides)
    trials = args.trials if args.trials is not None else _default_trials()
    params = scenario.params
    objective = {"analytic": "tau_full", "sim": "tau_sim", "mc": "tau_mc"}[args.engine]
    payload: dict = {"target": args.target, "engine": args.engine, "version": __version__}
    code = EXIT_OK

    if args.target == "rho":
        closed = None
        try:
            closed = optimize.closed_form_split(params)
            print(
                f"closed-form: rho*={closed.arg_opt:.6f} tau={closed.value_opt:.6f}"
            )
            payload["closed_form"] = {
                "rho": closed.arg_opt,
                "tau": closed.value_opt,
            }
        except analytic.SplitOutOfRangeError as exc:
            print(f"closed-form: n/a ({exc})")
            payload["closed_form"] = None
        try:
            nd = analytic.optimal_split_no_direct(params)
            print(f"closed-form (no direct link): rho*_nd={nd:.6f}")
            payload["closed_form_no_direct"] = nd
        except analytic.SplitOutOfRangeError:
            payload["closed_form_no_direct"] = None
        numeric = optimize.maximize_split(
            params, objective, tol=args.tol, trials=trials, seed=args.seed
        )
        print(
            f"numeric ({numeric.method}): rho={numeric.arg_opt:.6f} "
            f"tau={numeric.value_opt:.6f} evaluations={numeric.evaluations}"
        )
        payload["numeric"] = {
            "rho": numeric.arg_opt,
            "tau": numeric.value_opt,
            "method": numeric.method,
            "evaluations": numeric.evaluations,
        }
        if closed is not None:
            print(f"gap |closed - numeric| = {abs(closed.arg_opt - numeric.arg_opt):.6f}")
        if numeric.method == "grid":
            print("warning: objective failed the unimodality pre-scan, grid fallback used")
            code = EXIT_FALLBACK
    else:
        numeric = optimize.maximize_rate(
            params,
            (args.rs_from, args.rs_to),
            objective="tau_mc" if args.engine == "mc" else "tau_full",
            trials=trials,
            seed=args.seed,
        )
        tuned = replace(params, rs=numeric.arg_opt)
        rho = optimize._best_split_for(tuned, trials, args.seed)
        print(
            f"numeric ({numeric.method}): rs={numeric.arg_opt:.6f} "
            f"tau={numeric.value_opt:.6f} rho*={rho:.6f} evaluations={numeric.evaluations}"
        )
        payload["numeric"] = {
            "rs": numeric.arg_opt,
            "tau": numeric.value_opt,
            "rho": rho,
            "method": numeric.method,
            "evaluations": numeric.evaluations,
        }

    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"result written to {args.out}")
    return code


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _cmd_figures(args) -> int:
    from .plotting import render_multi_sweep_figure

    trials = args.trials if args.trials is not None else _default_trials()
    which = FIGURE_PRESETS if args.which == "all" else (args.which,)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in which:
        recipe = figure_recipe(name)
        spec = SweepSpec(
            variable=recipe["variable"],
            start=recipe["start"],
            stop=recipe["stop"],
            steps=recipe["steps"],
            engines=recipe["engines"],
            variants=recipe["variants"],
            rho_star=recipe["rho_star"],
        )
        labeled: list[tuple[str, SweepResult]] = []
        for label, scenario in recipe["curves"]:
            result = run_sweep(
                scenario, spec, trials=trials, seed=args.seed, workers=args.workers
            )
            safe = label.replace("/", "").replace("=", "").replace(".", "")
            csv_path = outdir / f"{name.replace('-', '_')}_{safe}.csv"
            write_csv(result, csv_path)
            print(f"wrote {csv_path}")
            labeled.append((label, result))
        fig_path = outdir / f"{name.replace('-', '_')}.png"
        render_multi_sweep_figure(labeled, fig_path, title=name)
        print(f"wrote {fig_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehrelay",
        description=(
            "Throughput analysis of incremental relaying with a power-splitting "
            "harvesting relay under an interference-temperature cap: closed "
            "forms, protocol simulation and split optimization."
        ),
    )
    parser.add_argument("--version", action="version", version=f"ehrelay {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="closed forms against the simulator")
    p.add_argument("config")
    p.add_argument("overrides", nargs="*", help="key=value scenario overrides")
    p.add_argument("--out", default=None, help="write the report as JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("sweep", help="sweep one variable, write CSV and figure")
    p.add_argument("config")
    p.add_argument("--var", required=True, choices=("rho", "rs", "i_over_no_db", "d_sr"))
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--engines", default="analytic_full")
    p.add_argument("--variants", default="incremental")
    p.add_argument("--rho-star", action="store_true", help="re-optimize rho per point")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--override", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimize", help="search the optimal split or rate")
    p.add_argument("config")
    p.add_argument("--target", choices=("rho", "rs"), default="rho")
    p.add_argument("--engine", choices=("analytic", "sim", "mc"), default="analytic")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--rs-from", type=float, default=0.5)
    p.add_argument("--rs-to", type=float, default=8.0)
    p.add_argument("--out", default=None, help="write the result as JSON")
    p.add_argument("--override", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE")
    _add_common(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("figures", help="regenerate the stock report figures")
    p.add_argument("--which", choices=FIGURE_PRESETS + ("all",), default="all")
    p.add_argument("--outdir", default="figures")
    _add_common(p)
    p.set_defaults(func=_cmd_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _ConfigReadError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
