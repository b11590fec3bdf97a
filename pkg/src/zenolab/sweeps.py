"""Sweep records and log-log convergence-rate fitting.

A sweep is an ordered list of (parameter, error) measurements; the fitted
rate is the ordinary-least-squares slope of log(error) against
log(parameter) after dropping points outside the asymptotic regime
(error above the pre-asymptotic ceiling or below the numerical floor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .config import get_tolerances

MIN_FIT_POINTS = 4


class FitError(ValueError):
    """Not enough points survive the asymptotic-regime filter."""


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residual: float  # RMS of log-error deviations from the fit
    n_points: int


@dataclass(frozen=True)
class SweepRecord:
    """One sweep point: parameter value(s), errors, and advisory wall time."""

    params: tuple[float, ...]
    error: float | None
    error_restricted: float | None = None
    wall_time_s: float = 0.0
    extras: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    """Ordered sweep records plus the fitted rate and run provenance."""

    experiment: str
    param_names: tuple[str, ...]
    records: list[SweepRecord]
    fit: RateFit | None = None
    fit_on: str | None = None  # which error column the fit used
    fit_message: str | None = None  # reason when fit is absent
    extras: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: _sort_key(r.params))

    @property
    def fitted_slope(self) -> float | None:
        return None if self.fit is None else self.fit.slope


def _sort_key(params: Sequence[float | None]) -> tuple:
    # missing params sort first so path rows precede the grid rows they bound
    return tuple(-math.inf if p is None else float(p) for p in params)


def filter_asymptotic(
    points: Iterable[tuple[float, float]],
    floor: float | None = None,
    ceiling: float | None = None,
) -> list[tuple[float, float]]:
    """Keep points whose error lies strictly between the floor and ceiling."""
    tol = get_tolerances()
    lo = tol.fit_floor if floor is None else floor
    hi = tol.fit_ceiling if ceiling is None else ceiling
    return [(p, e) for p, e in points if e is not None and lo < e < hi]


def fit_rate(
    points: Iterable[tuple[float, float]],
    floor: float | None = None,
    ceiling: float | None = None,
) -> RateFit:
    """OLS fit of log(error) versus log(parameter) in the asymptotic regime.

    Raises :class:`FitError` when fewer than four points survive the filter.
    """
    kept = filter_asymptotic(points, floor=floor, ceiling=ceiling)
    if len(kept) < MIN_FIT_POINTS:
        raise FitError(
            f"only {len(kept)} point(s) survive the asymptotic filter; "
            f"need at least {MIN_FIT_POINTS}"
        )
    xs = [math.log(p) for p, _ in kept]
    ys = [math.log(e) for _, e in kept]
    n = len(kept)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0.0:
        raise FitError("all surviving points share one parameter value; slope undefined")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    residual = math.sqrt(
        sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys)) / n
    )
    return RateFit(slope=slope, intercept=intercept, residual=residual, n_points=n)
