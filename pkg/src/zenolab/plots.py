"""Figure rendering for run outputs.

Turns a sweep result (in memory or re-read from its CSV + sidecar files)
into a PNG next to the delimited output: log-log error curves with the
fitted rate line for 1-D sweeps, drift curves for Floquet runs, and an
error-surface heatmap plus the two limit-path ladders for the limit-exchange
experiment.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import read_csv
from .sweeps import SweepResult


def _parse_cell(cell: str) -> float | None:
    return None if cell == "" else float(cell)


def _rows_from_files(prefix: Path) -> tuple[list[dict], dict]:
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    if not csv_path.exists():
        raise FileNotFoundError(f"no CSV output at {csv_path}")
    header, raw_rows = read_csv(csv_path)
    rows = [dict(zip(header, (_parse_cell(c) for c in row))) for row in raw_rows]
    meta = json.loads(json_path.read_text(encoding="utf-8")) if json_path.exists() else {}
    return rows, meta


def _rows_from_result(result: SweepResult) -> tuple[list[dict], dict]:
    rows = []
    for rec in result.records:
        row = dict(zip(result.param_names, rec.params))
        row.update(error=rec.error, error_restricted=rec.error_restricted)
        rows.append(row)
    meta = {
        "experiment": result.experiment,
        "fit": None
        if result.fit is None
        else {"slope": result.fit.slope, "intercept": result.fit.intercept},
        "fit_on": result.fit_on,
        "provenance": result.provenance,
    }
    return rows, meta


def _title(meta: dict) -> str:
    cfg = meta.get("provenance", {}).get("config", {})
    model = cfg.get("model", {})
    bits = [meta.get("experiment", "sweep")]
    if model:
        bits.append(f"{model.get('name')} (dim {model.get('dim')}, seed {model.get('seed')})")
    return " - ".join(str(b) for b in bits)


def _sweep_figure(rows: list[dict], meta: dict) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    params = [r["param"] for r in rows]
    floquet = meta.get("experiment") == "floquet"
    err_label = "unitarity drift" if floquet else "operator-norm error"
    errors = [(p, r["error"]) for p, r in zip(params, rows) if r["error"] is not None]
    if errors:
        ax.loglog(*zip(*errors), "o-", label=err_label)
    restricted = [
        (p, r["error_restricted"])
        for p, r in zip(params, rows)
        if r.get("error_restricted") is not None
    ]
    if restricted:
        ax.loglog(*zip(*restricted), "s--", label="restricted / phase-stripped")
    fit = meta.get("fit")
    if fit:
        xs = np.array([p for p, _ in (restricted or errors)])
        ys = np.exp(fit["intercept"]) * xs ** fit["slope"]
        ax.loglog(xs, ys, "k:", label=f"fit slope {fit['slope']:+.3f}")
    ax.set_xlabel("kick count" if floquet else "sweep parameter")
    ax.set_ylabel(err_label)
    ax.set_title(_title(meta))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _surface_figure(rows: list[dict], meta: dict) -> plt.Figure:
    surface = [r for r in rows if r.get("param_tau") is not None and r.get("param_k") is not None]
    cont = [r for r in rows if r.get("param_tau") is None and r.get("param_k") is not None]
    puls = [r for r in rows if r.get("param_tau") is not None and r.get("param_k") is None]
    fig, (ax_map, ax_ladder) = plt.subplots(1, 2, figsize=(10.5, 4.2))

    taus = sorted({r["param_tau"] for r in surface}, reverse=True)
    ks = sorted({r["param_k"] for r in surface})
    grid = np.full((len(taus), len(ks)), np.nan)
    lookup = {(r["param_tau"], r["param_k"]): r["error"] for r in surface}
    for i, tau in enumerate(taus):
        for j, k in enumerate(ks):
            err = lookup.get((tau, k))
            if err is not None and err > 0:
                grid[i, j] = math.log10(err)
    mesh = ax_map.pcolormesh(range(len(ks) + 1), range(len(taus) + 1), grid, shading="flat")
    ax_map.set_xticks([j + 0.5 for j in range(len(ks))], [f"{k:g}" for k in ks], fontsize=7)
    ax_map.set_yticks([i + 0.5 for i in range(len(taus))], [f"{t:g}" for t in taus], fontsize=7)
    ax_map.set_xlabel("pulse height K")
    ax_map.set_ylabel("dwell tau")
    ax_map.set_title("log10 stripped error")
    fig.colorbar(mesh, ax=ax_map)

    if cont:
        ax_ladder.loglog(
            [r["param_k"] for r in cont], [r["error"] for r in cont], "o-",
            label="continuous path (tau = 0, vs K)",
        )
    if puls:
        ax_ladder.loglog(
            [1.0 / r["param_tau"] for r in puls], [r["error"] for r in puls], "s--",
            label="pulsed path (K = inf, vs 1/tau)",
        )
    ax_ladder.set_xlabel("K  or  1/tau")
    ax_ladder.set_ylabel("distance to Zeno reference")
    ax_ladder.set_title(_title(meta))
    ax_ladder.grid(True, which="both", alpha=0.3)
    ax_ladder.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _figure(rows: list[dict], meta: dict) -> plt.Figure:
    if meta.get("experiment") == "equivalence" or "param_tau" in (rows[0] if rows else {}):
        return _surface_figure(rows, meta)
    return _sweep_figure(rows, meta)


def render_result(result: SweepResult, prefix: str | Path) -> Path:
    """Render the figure for an in-memory result to <prefix>.png."""
    rows, meta = _rows_from_result(result)
    return _save(_figure(rows, meta), Path(prefix))


def render_from_files(prefix: str | Path) -> Path:
    """Re-read <prefix>.csv / <prefix>.json and render <prefix>.png."""
    prefix = Path(prefix)
    if prefix.suffix in (".csv", ".json"):
        prefix = prefix.with_suffix("")
    rows, meta = _rows_from_files(prefix)
    return _save(_figure(rows, meta), prefix)


def _save(fig: plt.Figure, prefix: Path) -> Path:
    out = prefix.with_suffix(".png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
