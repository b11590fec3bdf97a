"""Central numerical-tolerance record.

Every invariant check in the package (hermiticity, unitarity, idempotency,
eigenvalue clustering, fit filters) reads its threshold from a single active
``Tolerances`` instance, so tests and the CLI have one source of truth.
The active record can be swapped globally (CLI startup) or temporarily
(tests) via :func:`set_tolerances` / :func:`use_tolerances`.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, fields, replace

ENV_PROFILE = "ZENOLAB_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    ``hermiticity_tol`` and ``eig_reconstruction_tol`` are relative to the
    Frobenius norm of the operator; the others are absolute.
    """

    hermiticity_tol: float = 1e-12
    unitarity_tol: float = 1e-10
    idempotency_tol: float = 1e-10
    projector_trace_tol: float = 1e-8
    cluster_tol: float = 1e-8
    eig_reconstruction_tol: float = 1e-10
    # asymptotic-regime filter for log-log rate fits: keep fit_floor < err < fit_ceiling
    fit_floor: float = 1e-11
    fit_ceiling: float = 0.5


DEFAULT = Tolerances()

# "strict" tightens every structural check one order of magnitude; the fit
# filter is left alone (it describes the asymptotic regime, not a precision).
STRICT = Tolerances(
    hermiticity_tol=1e-13,
    unitarity_tol=1e-11,
    idempotency_tol=1e-11,
    projector_trace_tol=1e-9,
    cluster_tol=1e-9,
    eig_reconstruction_tol=1e-11,
)

PROFILES = {"default": DEFAULT, "strict": STRICT}

_active = DEFAULT


def get_tolerances() -> Tolerances:
    """Return the currently active tolerance record."""
    return _active


def set_tolerances(tol: Tolerances) -> None:
    global _active
    _active = tol


def profile(name: str) -> Tolerances:
    """Look up a named profile ('default' or 'strict')."""
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unknown tolerance profile {name!r}; choose one of {sorted(PROFILES)}"
        ) from None


def profile_from_env(default: str = "default") -> str:
    """Profile name selected by the environment, falling back to `default`."""
    name = os.environ.get(ENV_PROFILE, "").strip() or default
    if name not in PROFILES:
        raise ValueError(
            f"{ENV_PROFILE}={name!r} is not a known profile; choose one of {sorted(PROFILES)}"
        )
    return name


def with_overrides(base: Tolerances, overrides: dict) -> Tolerances:
    """Return `base` with the given field overrides applied."""
    known = {f.name for f in fields(Tolerances)}
    bad = sorted(set(overrides) - known)
    if bad:
        raise ValueError(f"unknown tolerance field(s) {bad}; known fields: {sorted(known)}")
    return replace(base, **{k: float(v) for k, v in overrides.items()})


@contextlib.contextmanager
def use_tolerances(tol: Tolerances):
    """Temporarily install `tol` as the active record."""
    previous = get_tolerances()
    set_tolerances(tol)
    try:
        yield tol
    finally:
        set_tolerances(previous)
