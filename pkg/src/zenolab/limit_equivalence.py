"""Interpolating pulse protocol and the two-limit exchange experiment.

One protocol family spans both frequent-intervention schemes: each period is
a free dwell e^{-i tau H} followed by a square pulse e^{-i(tau0/K)(H + K H_c)}
of width tau0/K and height K.  Sending tau -> 0 recovers the continuous
strong-coupling evolution; sending K -> infinity turns the pulse into the
instantaneous kick e^{-i tau0 H_c}.  The experiment approximates the two
iterated limits

    (continuous first)  tau -> 0, then K along the grid,
    (pulsed first)      K -> infinity, then tau along the grid,

strips the accumulated pulse phases e^{-i n tau0 H_c} from each, and checks
that both approach the same Zeno reference e^{-itH_Z} built from the
eigenspaces of H_c.  A full finite-(tau, K) error surface is produced as
well, since at finite parameters the two protocols can differ appreciably.

The total time is realized as a whole number of periods,
n = round(t_total / period), so distances are measured against the reference
at the realized time n * period.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    HermitianOperator,
    UnitaryOperator,
    check_same_dim,
    expm_hermitian,
    op_norm,
)
from .operators import SpectralDecomposition, spectral_projections, zeno_hamiltonian


@dataclass(frozen=True)
class InterpolatingProtocol:
    """Dwell-then-pulse protocol parameters.

    ``tau`` is the inter-kick dwell (zero recovers the continuous coupling),
    ``tau0`` the fixed pulse-area parameter, ``k`` the pulse height
    (``math.inf`` realizes the instantaneous-kick endpoint).  The period is
    ``tau + tau0/k`` and must be positive.
    """

    h: HermitianOperator
    hc: HermitianOperator
    tau: float
    tau0: float
    k: float
    n_periods: int

    def __post_init__(self):
        check_same_dim(self.h, self.hc)
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau!r}")
        if self.tau0 <= 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0!r}")
        if not self.k > 0:
            raise ValueError(f"pulse height k must be positive, got {self.k!r}")
        if self.n_periods < 1:
            raise ValueError(f"n_periods must be >= 1, got {self.n_periods!r}")
        if self.period <= 0:
            raise ValueError("protocol period must be positive")

    @property
    def period(self) -> float:
        width = 0.0 if math.isinf(self.k) else self.tau0 / self.k
        return self.tau + width

    @property
    def total_time(self) -> float:
        return self.n_periods * self.period


def _period_factor(p: InterpolatingProtocol) -> np.ndarray:
    if math.isinf(p.k):
        pulse = expm_hermitian(p.hc, -1j * p.tau0)
    else:
        pulsed_h = HermitianOperator(p.h.matrix + p.k * p.hc.matrix)
        pulse = expm_hermitian(pulsed_h, -1j * p.tau0 / p.k)
    if p.tau == 0.0:
        return pulse
    return pulse @ expm_hermitian(p.h, -1j * p.tau)


def interpolating_propagator(p: InterpolatingProtocol) -> UnitaryOperator:
    """Propagator over n_periods periods, dwell first then pulse per period."""
    factor = _period_factor(p)
    out = np.eye(p.h.dim, dtype=complex)
    for _ in range(p.n_periods):
        out = factor @ out
    return UnitaryOperator(out)


@dataclass(frozen=True)
class SurfacePoint:
    """Stripped distance to the Zeno reference at one finite (tau, K) point."""

    tau: float | None  # None marks the tau -> 0 (continuous) path
    k: float | None  # None marks the K -> infinity (pulsed) path
    n_periods: int
    t_realized: float
    error: float
    wall_time_s: float


@dataclass(frozen=True)
class LimitOrderReport:
    """Comparison of the two iterated-limit approximants plus the error surface."""

    continuous_first: np.ndarray  # stripped approximant along tau -> 0 then K -> inf
    pulsed_first: np.ndarray  # stripped approximant along K -> inf then tau -> 0
    zeno_reference: np.ndarray  # e^{-i t_total H_Z}
    discrepancy: float  # |continuous_first - pulsed_first|
    distance_continuous: float
    distance_pulsed: float
    continuous_ladder: tuple[SurfacePoint, ...]  # tau = 0, K along the grid
    pulsed_ladder: tuple[SurfacePoint, ...]  # K = inf, tau along the grid
    surface: tuple[SurfacePoint, ...]  # finite (tau, K) grid
    tau_grid: tuple[float, ...]
    k_grid: tuple[float, ...]
    tau0: float
    t_total: float
    zeno_generator: HermitianOperator


def _stripped_point(
    h: HermitianOperator,
    hc: HermitianOperator,
    h_z: HermitianOperator,
    tau: float,
    k: float,
    tau0: float,
    t_total: float,
    on_continuous_path: bool = False,
    on_pulsed_path: bool = False,
) -> tuple[SurfacePoint, np.ndarray]:
    start = time.perf_counter()
    width = 0.0 if math.isinf(k) else tau0 / k
    period = tau + width
    n = int(round(t_total / period))
    if n < 1:
        raise ValueError(
            f"t_total={t_total!r} is not representable: shorter than one period "
            f"{period!r} at tau={tau!r}, k={k!r}"
        )
    protocol = InterpolatingProtocol(h=h, hc=hc, tau=tau, tau0=tau0, k=k, n_periods=n)
    u = interpolating_propagator(protocol).matrix
    # each pulse contributes the kick phase e^{-i tau0 H_c} in the K -> inf limit
    stripped = u @ expm_hermitian(hc, +1j * n * tau0)
    t_realized = n * period
    reference = expm_hermitian(h_z, -1j * t_realized)
    point = SurfacePoint(
        tau=None if on_continuous_path else tau,
        k=None if on_pulsed_path else k,
        n_periods=n,
        t_realized=t_realized,
        error=op_norm(stripped - reference),
        wall_time_s=time.perf_counter() - start,
    )
    return point, stripped


def limit_order_experiment(
    h: HermitianOperator,
    hc: HermitianOperator,
    tau0: float,
    t_total: float,
    tau_grid: Sequence[float],
    k_grid: Sequence[float],
    cluster_tol: float | None = None,
    decomposition: SpectralDecomposition | None = None,
) -> LimitOrderReport:
    """Run both iterated-limit ladders and the finite-(tau, K) error surface."""
    taus = [float(v) for v in tau_grid]
    ks = [float(v) for v in k_grid]
    if not taus or not ks:
        raise ValueError("tau_grid and k_grid must be nonempty")
    if any(b >= a for a, b in zip(taus, taus[1:])) or any(v <= 0 for v in taus):
        raise ValueError("tau_grid must be strictly decreasing and positive")
    if any(b <= a for a, b in zip(ks, ks[1:])) or any(v <= 0 for v in ks):
        raise ValueError("k_grid must be strictly increasing and positive")
    tau0 = float(tau0)
    if tau0 <= 0:
        raise ValueError(f"tau0 must be positive, got {tau0!r}")
    decomp = decomposition
    if decomp is None:
        decomp = spectral_projections(hc, cluster_tol)
    h_z = zeno_hamiltonian(h, decomp)

    continuous_ladder = []
    continuous_corner = None
    for k in ks:
        point, stripped = _stripped_point(
            h, hc, h_z, tau=0.0, k=k, tau0=tau0, t_total=t_total, on_continuous_path=True
        )
        continuous_ladder.append(point)
        continuous_corner = (point, stripped)

    pulsed_ladder = []
    pulsed_corner = None
    for tau in taus:
        point, stripped = _stripped_point(
            h, hc, h_z, tau=tau, k=math.inf, tau0=tau0, t_total=t_total, on_pulsed_path=True
        )
        pulsed_ladder.append(point)
        pulsed_corner = (point, stripped)

    surface = []
    for tau in taus:
        for k in ks:
            point, _ = _stripped_point(h, hc, h_z, tau=tau, k=k, tau0=tau0, t_total=t_total)
            surface.append(point)

    cont_point, cont_matrix = continuous_corner
    puls_point, puls_matrix = pulsed_corner
    return LimitOrderReport(
        continuous_first=cont_matrix,
        pulsed_first=puls_matrix,
        zeno_reference=expm_hermitian(h_z, -1j * float(t_total)),
        discrepancy=op_norm(cont_matrix - puls_matrix),
        distance_continuous=cont_point.error,
        distance_pulsed=puls_point.error,
        continuous_ladder=tuple(continuous_ladder),
        pulsed_ladder=tuple(pulsed_ladder),
        surface=tuple(surface),
        tau_grid=tuple(taus),
        k_grid=tuple(ks),
        tau0=tau0,
        t_total=float(t_total),
        zeno_generator=h_z,
    )
