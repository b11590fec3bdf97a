"""Experiment harness: JSON configs in, CSV + JSON sidecar out.

A config names one experiment, one model from the registry, a parameter
grid, and an output prefix.  Runs are deterministic for a fixed config
(seeded models, fixed record order); wall-time fields are advisory and are
excluded from all comparisons, so CSV bodies are byte-identical across runs
on one platform and agree to 1e-9 relative across platforms (use
:func:`csv_bodies_equal` with a relative tolerance for the latter).

CSV columns are fixed and ordered: the parameter column(s), ``error``,
``error_restricted`` (the restricted or phase-stripped error where one is
defined), ``wall_time_s``.  Missing quantities are emitted as empty fields,
never zeros.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as tolconfig
from ._version import __version__
from .continuous_coupling import coupled_evolution
from .limit_equivalence import limit_order_experiment
from .linalg import Projector, UnitaryOperator, expm_hermitian, frob_norm
from .operators import (
    ModelSystem,
    UnknownModelError,
    model_library,
    model_names,
    spectral_projections_unitary,
)
from .product_formulas import kicked_product, optical_potential_product, trotter_product, zeno_product
from .sweeps import FitError, SweepRecord, SweepResult, fit_rate

EXPERIMENTS = ("trotter", "zeno", "optical", "kick", "floquet", "continuous", "equivalence")

_GRID_KIND = {
    "trotter": "n",
    "zeno": "n",
    "optical": "n",
    "kick": "n",
    "floquet": "n",
    "continuous": "k",
    "equivalence": "tau-k",
}

_NEEDS_MEMBER = {
    "trotter": "auxiliary",
    "zeno": "projector",
    "optical": "projector",
    "kick": "auxiliary",
    "floquet": "auxiliary",
    "continuous": "auxiliary",
    "equivalence": "auxiliary",
}

_ALLOWED_PARAMS = {
    "optical": {"gamma"},
    "kick": {"tau0"},
    "floquet": {"tau", "tau0"},
    "equivalence": {"tau0"},
}

OUTPUT_FORMATS = ("csv", "json")
CSV_ERROR_COLUMNS = ("error", "error_restricted", "wall_time_s")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, normalized experiment description."""

    experiment: str
    model_name: str
    dim: int
    seed: int
    t: float | None
    sweep_kind: str
    sweep_values: tuple[float, ...]  # n- or K-grid
    tau_values: tuple[float, ...]  # only for the tau-k kind
    k_values: tuple[float, ...]  # only for the tau-k kind
    params: dict = field(default_factory=dict)
    tolerance_profile: str = "default"
    tolerance_overrides: dict = field(default_factory=dict)
    output_path: str = ""
    output_format: str = "csv"

    def normalized(self) -> dict:
        """Canonical config dict; feeding it back reproduces the run."""
        if self.sweep_kind == "tau-k":
            sweep = {"kind": "tau-k", "tau": list(self.tau_values), "k": list(self.k_values)}
        else:
            values = [int(v) if self.sweep_kind == "n" else v for v in self.sweep_values]
            sweep = {"kind": self.sweep_kind, "values": values}
        out: dict = {
            "experiment": self.experiment,
            "model": {"name": self.model_name, "dim": self.dim, "seed": self.seed},
            "sweep": sweep,
            "tolerances": {
                "profile": self.tolerance_profile,
                "overrides": dict(self.tolerance_overrides),
            },
            "output": {"path": self.output_path, "format": self.output_format},
        }
        if self.t is not None:
            out["t"] = self.t
        if self.params:
            out["params"] = dict(self.params)
        return out

    def tolerances(self) -> tolconfig.Tolerances:
        base = tolconfig.profile(self.tolerance_profile)
        return tolconfig.with_overrides(base, self.tolerance_overrides)


def _fail(field_name: str, message: str):
    raise ConfigError(f"{field_name}: {message}")


def _require(raw: dict, key: str, field_name: str):
    if key not in raw:
        _fail(field_name, "missing required field")
    return raw[key]


def _as_number(value, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(field_name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        _fail(field_name, f"must be finite, got {value!r}")
    return float(value)


def _as_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(field_name, f"expected an integer, got {value!r}")
    return int(value)


def _monotone_grid(values, field_name: str, increasing: bool, integral: bool = False):
    if not isinstance(values, (list, tuple)) or not values:
        _fail(field_name, "expected a nonempty list")
    out = []
    for i, v in enumerate(values):
        if integral:
            v = _as_int(v, f"{field_name}[{i}]")
            if v < 1:
                _fail(f"{field_name}[{i}]", f"must be >= 1, got {v}")
        else:
            v = _as_number(v, f"{field_name}[{i}]")
            if v <= 0:
                _fail(f"{field_name}[{i}]", f"must be positive, got {v!r}")
        out.append(float(v))
    direction = "increasing" if increasing else "decreasing"
    ok = all((b > a) if increasing else (b < a) for a, b in zip(out, out[1:]))
    if not ok:
        _fail(field_name, f"grid must be strictly {direction}: {values}")
    return tuple(out)


def validate_config(raw: dict) -> ExperimentConfig:
    """Validate a raw config dict and return the normalized form.

    Raises :class:`ConfigError` naming the offending field on any problem.
    """
    if not isinstance(raw, dict):
        _fail("config", f"expected a JSON object, got {type(raw).__name__}")
    known_top = {"experiment", "model", "t", "sweep", "params", "tolerances", "output"}
    for key in raw:
        if key not in known_top:
            _fail(key, "unknown field")

    experiment = _require(raw, "experiment", "experiment")
    if experiment not in EXPERIMENTS:
        _fail("experiment", f"unknown experiment {experiment!r}; choose one of {list(EXPERIMENTS)}")

    model_raw = _require(raw, "model", "model")
    if not isinstance(model_raw, dict):
        _fail("model", "expected an object with name/dim/seed")
    name = _require(model_raw, "name", "model.name")
    dim = _as_int(_require(model_raw, "dim", "model.dim"), "model.dim")
    seed = _as_int(model_raw.get("seed", 0), "model.seed")
    try:
        model = model_library(name, dim, seed)
    except UnknownModelError as exc:
        _fail("model.name", str(exc))
    except ValueError as exc:
        _fail("model.dim", str(exc))
    member = _NEEDS_MEMBER[experiment]
    if getattr(model, member) is None:
        _fail("model.name", f"model {name!r} has no {member}, required by experiment {experiment!r}")

    if experiment == "floquet":
        if "t" in raw:
            _fail("t", "not used by the floquet experiment (set params.tau / params.tau0)")
        t = None
    else:
        t = _as_number(_require(raw, "t", "t"), "t")

    sweep_raw = _require(raw, "sweep", "sweep")
    if not isinstance(sweep_raw, dict):
        _fail("sweep", "expected an object with kind plus values (or tau/k)")
    kind = sweep_raw.get("kind")
    expected_kind = _GRID_KIND[experiment]
    if kind != expected_kind:
        _fail("sweep.kind", f"experiment {experiment!r} needs kind {expected_kind!r}, got {kind!r}")
    sweep_values: tuple[float, ...] = ()
    tau_values: tuple[float, ...] = ()
    k_values: tuple[float, ...] = ()
    if kind == "tau-k":
        tau_values = _monotone_grid(_require(sweep_raw, "tau", "sweep.tau"), "sweep.tau", increasing=False)
        k_values = _monotone_grid(_require(sweep_raw, "k", "sweep.k"), "sweep.k", increasing=True)
        extra = set(sweep_raw) - {"kind", "tau", "k"}
    else:
        sweep_values = _monotone_grid(
            _require(sweep_raw, "values", "sweep.values"),
            "sweep.values",
            increasing=True,
            integral=(kind == "n"),
        )
        extra = set(sweep_raw) - {"kind", "values"}
    if extra:
        _fail(f"sweep.{sorted(extra)[0]}", "unknown field")

    params_raw = raw.get("params", {})
    if not isinstance(params_raw, dict):
        _fail("params", "expected an object")
    allowed = _ALLOWED_PARAMS.get(experiment, set())
    for key in params_raw:
        if key not in allowed:
            _fail(f"params.{key}", f"not used by experiment {experiment!r}")
    params: dict = {}
    if experiment == "optical":
        gamma = _as_number(_require(params_raw, "gamma", "params.gamma"), "params.gamma")
        if gamma <= 0:
            _fail("params.gamma", f"must be positive, got {gamma!r}")
        params["gamma"] = gamma
    if experiment in ("kick", "equivalence"):
        tau0 = _as_number(_require(params_raw, "tau0", "params.tau0"), "params.tau0")
        if tau0 <= 0:
            _fail("params.tau0", f"must be positive, got {tau0!r}")
        params["tau0"] = tau0
    if experiment == "floquet":
        tau = _as_number(_require(params_raw, "tau", "params.tau"), "params.tau")
        tau0 = _as_number(_require(params_raw, "tau0", "params.tau0"), "params.tau0")
        if tau < 0 or tau0 < 0:
            _fail("params.tau", f"tau and tau0 must be >= 0, got {tau!r}, {tau0!r}")
        params.update(tau=tau, tau0=tau0)

    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        _fail("tolerances", "expected an object")
    for key in set(tol_raw) - {"profile", "overrides"}:
        _fail(f"tolerances.{key}", "unknown field")
    try:
        profile_name = tol_raw.get("profile") or tolconfig.profile_from_env()
        tolconfig.profile(profile_name)
    except ValueError as exc:
        _fail("tolerances.profile", str(exc))
    overrides = tol_raw.get("overrides", {})
    if not isinstance(overrides, dict):
        _fail("tolerances.overrides", "expected an object")
    try:
        tolconfig.with_overrides(tolconfig.profile(profile_name), overrides)
    except ValueError as exc:
        _fail("tolerances.overrides", str(exc))

    output_raw = _require(raw, "output", "output")
    if not isinstance(output_raw, dict):
        _fail("output", "expected an object with path (and optional format)")
    path = _require(output_raw, "path", "output.path")
    if not isinstance(path, str) or not path:
        _fail("output.path", f"expected a nonempty string, got {path!r}")
    fmt = output_raw.get("format", "csv")
    if fmt not in OUTPUT_FORMATS:
        _fail("output.format", f"expected one of {list(OUTPUT_FORMATS)}, got {fmt!r}")
    for key in set(output_raw) - {"path", "format"}:
        _fail(f"output.{key}", "unknown field")

    return ExperimentConfig(
        experiment=experiment,
        model_name=name,
        dim=dim,
        seed=seed,
        t=t,
        sweep_kind=kind,
        sweep_values=sweep_values,
        tau_values=tau_values,
        k_values=k_values,
        params=params,
        tolerance_profile=profile_name,
        tolerance_overrides={k: float(v) for k, v in overrides.items()},
        output_path=path,
        output_format=fmt,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file: not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file: invalid JSON: {exc}") from None
    return validate_config(raw)


# ---------------------------------------------------------------------------
# experiment runners


def _pmap(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _timed_record(params, error, restricted, start, extras=None) -> SweepRecord:
    return SweepRecord(
        params=params,
        error=error,
        error_restricted=restricted,
        wall_time_s=time.perf_counter() - start,
        extras=extras or {},
    )


def _survival_state(p: Projector) -> np.ndarray:
    """Deterministic unit vector in the range of P (basis vector when possible)."""
    diag = np.real(np.diag(p.matrix))
    hits = np.flatnonzero(diag >= 0.5)
    psi = np.zeros(p.dim, dtype=complex)
    if hits.size:
        psi[int(hits[0])] = 1.0
        return psi
    _, vectors = np.linalg.eigh(p.matrix)
    return vectors[:, -1].astype(complex)


def _run_trotter(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    def point(n):
        start = time.perf_counter()
        res = trotter_product(model.h, model.auxiliary, cfg.t, int(n))
        return _timed_record((float(n),), res.error, None, start)

    return _pmap(point, cfg.sweep_values, workers), "error", None, {}


def _run_zeno(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    psi = _survival_state(model.projector)

    def point(n):
        start = time.perf_counter()
        res = zeno_product(model.h, model.projector, cfg.t, int(n), initial_state=psi)
        extras = {
            "survival_probability": res.survival_probability,
            "survival_amplitude": [res.survival_amplitude.real, res.survival_amplitude.imag],
        }
        return _timed_record((float(n),), res.error, res.error_restricted, start, extras)

    return _pmap(point, cfg.sweep_values, workers), "error_restricted", None, {}


def _run_optical(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    q = model.projector.complement()
    gamma = cfg.params["gamma"]

    def point(n):
        start = time.perf_counter()
        res = optical_potential_product(model.h, q, gamma, cfg.t, int(n))
        return _timed_record((float(n),), res.error, res.error_restricted, start)

    return _pmap(point, cfg.sweep_values, workers), "error_restricted", None, {}


def _run_kick(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    u_kick = UnitaryOperator(expm_hermitian(model.auxiliary, -1j * cfg.params["tau0"]))
    decomp = spectral_projections_unitary(u_kick)

    def point(n):
        start = time.perf_counter()
        res = kicked_product(model.h, u_kick, cfg.t, int(n), decomposition=decomp)
        return _timed_record((float(n),), res.error, res.error_phase_stripped, start)

    extras = {"kick_sector_count": len(decomp)}
    return _pmap(point, cfg.sweep_values, workers), "error_restricted", None, extras


def _run_floquet(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    # single incremental pass with per-checkpoint timing (same map as floquet_iterate)
    tau, tau0 = cfg.params["tau"], cfg.params["tau0"]
    marks = [int(v) for v in cfg.sweep_values]
    factor = expm_hermitian(model.h, -1j * tau) @ expm_hermitian(model.auxiliary, -1j * tau0)
    eye = np.eye(model.dim)
    out = np.eye(model.dim, dtype=complex)
    records = []
    start = time.perf_counter()
    mark_set = set(marks)
    for k in range(1, marks[-1] + 1):
        out = factor @ out
        if k in mark_set:
            drift = frob_norm(out.conj().T @ out - eye)
            records.append(
                SweepRecord(
                    params=(float(k),),
                    error=drift,
                    error_restricted=None,
                    wall_time_s=time.perf_counter() - start,
                )
            )
    return records, None, "unitarity-drift series; no power-law rate is defined", {}


def _run_continuous(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    def point(k):
        start = time.perf_counter()
        res = coupled_evolution(model.h, model.auxiliary, k, cfg.t)
        return _timed_record((float(k),), res.error, res.phase_stripped_error, start)

    return _pmap(point, cfg.sweep_values, workers), "error_restricted", None, {}


def _ladder_json(points) -> list[dict]:
    return [
        {
            "tau": p.tau,
            "k": p.k,
            "n_periods": p.n_periods,
            "t_realized": p.t_realized,
            "error": p.error,
        }
        for p in points
    ]


def _run_equivalence(model: ModelSystem, cfg: ExperimentConfig, workers: int):
    report = limit_order_experiment(
        model.h,
        model.auxiliary,
        tau0=cfg.params["tau0"],
        t_total=cfg.t,
        tau_grid=cfg.tau_values,
        k_grid=cfg.k_values,
    )
    records = [
        SweepRecord(
            params=(p.tau, p.k),
            error=p.error,
            error_restricted=None,
            wall_time_s=p.wall_time_s,
            extras={"n_periods": p.n_periods, "t_realized": p.t_realized},
        )
        for p in (*report.surface, *report.continuous_ladder, *report.pulsed_ladder)
    ]
    extras = {
        "limit_exchange": {
            "discrepancy": report.discrepancy,
            "distance_continuous": report.distance_continuous,
            "distance_pulsed": report.distance_pulsed,
            "corner": {"tau": min(report.tau_grid), "k": max(report.k_grid)},
            "tau0": report.tau0,
            "t_total": report.t_total,
            "continuous_ladder": _ladder_json(report.continuous_ladder),
            "pulsed_ladder": _ladder_json(report.pulsed_ladder),
        }
    }
    return records, None, "2-D parameter grid; no single rate parameter", extras


_RUNNERS = {
    "trotter": _run_trotter,
    "zeno": _run_zeno,
    "optical": _run_optical,
    "kick": _run_kick,
    "floquet": _run_floquet,
    "continuous": _run_continuous,
    "equivalence": _run_equivalence,
}


def run_experiment(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Run a validated config, write its output files, and return the result."""
    with tolconfig.use_tolerances(config.tolerances()):
        model = model_library(config.model_name, config.dim, config.seed)
        records, fit_on, no_fit_reason, extras = _RUNNERS[config.experiment](
            model, config, workers
        )
    fit = None
    fit_message = no_fit_reason
    if fit_on is not None:
        column = {"error": "error", "error_restricted": "error_restricted"}[fit_on]
        points = [
            (r.params[0], getattr(r, column))
            for r in records
            if getattr(r, column) is not None
        ]
        try:
            with tolconfig.use_tolerances(config.tolerances()):
                fit = fit_rate(points)
        except FitError as exc:
            fit_message = str(exc)
    param_names = ("param_tau", "param_k") if config.sweep_kind == "tau-k" else ("param",)
    result = SweepResult(
        experiment=config.experiment,
        param_names=param_names,
        records=records,
        fit=fit,
        fit_on=fit_on,
        fit_message=fit_message,
        extras=extras,
        provenance={
            "config": config.normalized(),
            "version": __version__,
            "seed": config.seed,
            "tolerance_profile": config.tolerance_profile,
        },
    )
    write_outputs(result, config)
    return result


# ---------------------------------------------------------------------------
# output files


def output_basename(config: ExperimentConfig) -> Path:
    base = Path(config.output_path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    return base


def _fmt_value(value) -> str:
    if value is None:
        return ""
    value = float(value)
    if value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def result_rows(result: SweepResult) -> list[list[str]]:
    rows = []
    for rec in result.records:
        cells = [_fmt_value(p) for p in rec.params]
        cells.append(_fmt_value(rec.error))
        cells.append(_fmt_value(rec.error_restricted))
        cells.append(repr(float(rec.wall_time_s)))
        rows.append(cells)
    return rows


def csv_header(result: SweepResult) -> list[str]:
    return [*result.param_names, *CSV_ERROR_COLUMNS]


def _sidecar_dict(result: SweepResult, include_records: bool) -> dict:
    out: dict = {
        "experiment": result.experiment,
        "param_names": list(result.param_names),
        "fit": None
        if result.fit is None
        else {
            "slope": result.fit.slope,
            "intercept": result.fit.intercept,
            "residual": result.fit.residual,
            "n_points": result.fit.n_points,
        },
        "fit_on": result.fit_on,
        "fit_message": result.fit_message,
        "extras": result.extras,
        "provenance": result.provenance,
    }
    if include_records:
        out["records"] = [
            {
                "params": list(rec.params),
                "error": rec.error,
                "error_restricted": rec.error_restricted,
                "wall_time_s": rec.wall_time_s,
                **({"extras": rec.extras} if rec.extras else {}),
            }
            for rec in result.records
        ]
    else:
        record_extras = [
            {"params": list(rec.params), **rec.extras} for rec in result.records if rec.extras
        ]
        if record_extras:
            out["record_extras"] = record_extras
    return out


def write_outputs(result: SweepResult, config: ExperimentConfig) -> list[Path]:
    """Write the CSV (+ JSON sidecar) or the single JSON file for a result."""
    base = output_basename(config)
    if base.parent and not base.parent.exists():
        base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if config.output_format == "csv":
        csv_path = base.with_suffix(".csv")
        lines = [",".join(csv_header(result))]
        lines += [",".join(row) for row in result_rows(result)]
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(csv_path)
        sidecar = _sidecar_dict(result, include_records=False)
    else:
        sidecar = _sidecar_dict(result, include_records=True)
    json_path = base.with_suffix(".json")
    json_path.write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(json_path)
    return written


# ---------------------------------------------------------------------------
# comparison helpers


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def csv_bodies_equal(
    path_a: str | Path, path_b: str | Path, rel_tol: float = 0.0
) -> tuple[bool, str]:
    """Compare two CSV bodies, ignoring the advisory wall-time column.

    With ``rel_tol == 0`` cells must match byte-for-byte; otherwise numeric
    cells may differ by the given relative tolerance (cross-platform mode).
    """
    header_a, rows_a = read_csv(path_a)
    header_b, rows_b = read_csv(path_b)
    if header_a != header_b:
        return False, f"headers differ: {header_a} vs {header_b}"
    if len(rows_a) != len(rows_b):
        return False, f"row counts differ: {len(rows_a)} vs {len(rows_b)}"
    keep = [i for i, name in enumerate(header_a) if name != "wall_time_s"]
    for row_idx, (ra, rb) in enumerate(zip(rows_a, rows_b)):
        for col in keep:
            a, b = ra[col], rb[col]
            if a == b:
                continue
            if rel_tol > 0:
                try:
                    fa, fb = float(a), float(b)
                except ValueError:
                    return False, f"row {row_idx}, column {header_a[col]}: {a!r} vs {b!r}"
                scale = max(abs(fa), abs(fb), 1e-300)
                if abs(fa - fb) / scale <= rel_tol:
                    continue
            return False, f"row {row_idx}, column {header_a[col]}: {a!r} vs {b!r}"
    return True, "equal"
