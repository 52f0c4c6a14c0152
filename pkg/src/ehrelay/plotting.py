"""Figure rendering for sweep results; every report figure is written to a
file next to its CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_X_LABELS = {
    "rho": r"power-splitting fraction $\rho$",
    "rs": "fixed rate (bits/channel use)",
    "i_over_no_db": "interference-to-noise ratio (dB)",
    "d_sr": "source-relay distance",
}

_VARIANT_STYLE = {
    "incremental": "-",
    "direct_only": "--",
    "no_direct_two_hop": ":",
}


def _curve_label(engine: str, variant: str) -> str:
    engine_tag = {"analytic_full": "analytic", "analytic_sim": "simplified", "mc": "simulated"}
    return f"{engine_tag.get(engine, engine)} {variant.replace('_', ' ')}"


def render_sweep_figure(result, path: str | Path, title: str | None = None) -> None:
    """One line per engine/variant pair, error bars on simulated curves."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    xs = result.xs
    spec = result.spec
    for engine in spec.engines:
        for variant in spec.variants:
            key = f"tau_{engine}_{variant}"
            ys = result.columns.get(key)
            if ys is None:
                continue
            style = _VARIANT_STYLE.get(variant, "-")
            if engine == "mc":
                err = result.columns.get(f"stderr_mc_{variant}")
                step = max(1, len(xs) // 25)
                ax.errorbar(
                    xs[::step],
                    [y for y in ys[::step]],
                    yerr=[2.0 * e if e is not None else 0.0 for e in err[::step]],
                    fmt="o",
                    markersize=3.5,
                    capsize=2,
                    label=_curve_label(engine, variant),
                )
            else:
                ax.plot(xs, ys, style, linewidth=1.6, label=_curve_label(engine, variant))
    ax.set_xlabel(_X_LABELS.get(spec.variable, spec.variable))
    ax.set_ylabel("throughput (bits/channel use)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_multi_sweep_figure(
    labeled_results: list[tuple[str, object]], path: str | Path, title: str | None = None
) -> None:
    """Overlay several sweeps (for example two relay placements) on one axes."""
    fig, ax = plt.subplots(figsize=(7.5, 5.2))
    for prefix, result in labeled_results:
        spec = result.spec
        for engine in spec.engines:
            for variant in spec.variants:
                key = f"tau_{engine}_{variant}"
                ys = result.columns.get(key)
                if ys is None:
                    continue
                label = f"{prefix}: {_curve_label(engine, variant)}"
                if engine == "mc":
                    step = max(1, len(result.xs) // 20)
                    ax.plot(
                        result.xs[::step], ys[::step], "o", markersize=3.0, label=label
                    )
                else:
                    style = _VARIANT_STYLE.get(variant, "-")
                    ax.plot(result.xs, ys, style, linewidth=1.5, label=label)
    first_spec = labeled_results[0][1].spec
    ax.set_xlabel(_X_LABELS.get(first_spec.variable, first_spec.variable))
    ax.set_ylabel("throughput (bits/channel use)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
