import math

import numpy as np
import pytest

from zenolab.continuous_coupling import coupled_evolution
from zenolab.limit_equivalence import (
    InterpolatingProtocol,
    interpolating_propagator,
    limit_order_experiment,
)
from zenolab.linalg import HermitianOperator, expm_hermitian, op_norm

TAU_GRID = [2.0 ** (-j) for j in range(1, 10)]
K_GRID = [2.0**j for j in range(1, 10)]
TAU0 = math.pi / 4


@pytest.fixture
def qubit(sx, sz):
    return HermitianOperator(sx), HermitianOperator(sz)


class TestInterpolatingPropagator:
    def test_zero_dwell_recovers_continuous_coupling(self, qubit):
        h, hc = qubit
        proto = InterpolatingProtocol(h=h, hc=hc, tau=0.0, tau0=TAU0, k=8.0, n_periods=13)
        u = interpolating_propagator(proto)
        reference = coupled_evolution(h, hc, 8.0, proto.total_time).propagator
        assert op_norm(u.matrix - reference.matrix) <= 1e-12

    def test_zero_system_hamiltonian_gives_pure_kick_phases(self, sz):
        zero = HermitianOperator(np.zeros((2, 2), dtype=complex))
        hc = HermitianOperator(sz)
        proto = InterpolatingProtocol(h=zero, hc=hc, tau=0.3, tau0=TAU0, k=5.0, n_periods=4)
        u = interpolating_propagator(proto)
        assert op_norm(u.matrix - expm_hermitian(hc, -1j * 4 * TAU0)) <= 1e-12

    def test_pulse_factor_approaches_kick_at_inverse_k_rate(self, qubit):
        h, hc = qubit
        kick = expm_hermitian(hc, -1j * TAU0)

        def pulse_distance(k):
            pulsed = HermitianOperator(h.matrix + k * hc.matrix)
            return op_norm(expm_hermitian(pulsed, -1j * TAU0 / k) - kick)

        ratio = pulse_distance(1e3) / pulse_distance(1e4)
        assert 9.0 <= ratio <= 11.0

    def test_large_k_period_factor_matches_kick_then_dwell(self, qubit):
        h, hc = qubit
        k = 1e6  # >= 1e6 * |H| / |H_c| for this pair
        proto = InterpolatingProtocol(h=h, hc=hc, tau=0.3, tau0=TAU0, k=k, n_periods=1)
        proxy = expm_hermitian(hc, -1j * TAU0) @ expm_hermitian(h, -1j * 0.3)
        assert op_norm(interpolating_propagator(proto).matrix - proxy) <= 1e-4

    def test_infinite_k_is_the_exact_kick_endpoint(self, qubit):
        h, hc = qubit
        proto = InterpolatingProtocol(h=h, hc=hc, tau=0.25, tau0=TAU0, k=math.inf, n_periods=4)
        factor = expm_hermitian(hc, -1j * TAU0) @ expm_hermitian(h, -1j * 0.25)
        direct = factor @ factor @ factor @ factor
        assert op_norm(interpolating_propagator(proto).matrix - direct) <= 1e-13
        assert proto.period == 0.25

    def test_invalid_parameters(self, qubit):
        h, hc = qubit
        with pytest.raises(ValueError):
            InterpolatingProtocol(h=h, hc=hc, tau=-0.1, tau0=TAU0, k=2.0, n_periods=1)
        with pytest.raises(ValueError):
            InterpolatingProtocol(h=h, hc=hc, tau=0.1, tau0=0.0, k=2.0, n_periods=1)
        with pytest.raises(ValueError):
            InterpolatingProtocol(h=h, hc=hc, tau=0.1, tau0=TAU0, k=-2.0, n_periods=1)
        with pytest.raises(ValueError):
            InterpolatingProtocol(h=h, hc=hc, tau=0.0, tau0=TAU0, k=math.inf, n_periods=1)


class TestLimitOrderExperiment:
    def test_zero_system_hamiltonian_makes_orders_agree(self, sz):
        zero = HermitianOperator(np.zeros((2, 2), dtype=complex))
        hc = HermitianOperator(sz)
        report = limit_order_experiment(
            zero, hc, tau0=TAU0, t_total=1.0, tau_grid=TAU_GRID[:4], k_grid=K_GRID[:4]
        )
        assert report.discrepancy <= 1e-10
        assert op_norm(report.continuous_first - np.eye(2)) <= 1e-10
        assert op_norm(report.pulsed_first - np.eye(2)) <= 1e-10

    def test_qubit_report(self, qubit):
        h, hc = qubit
        report = limit_order_experiment(
            h, hc, tau0=TAU0, t_total=1.0, tau_grid=TAU_GRID, k_grid=K_GRID
        )
        # both approximants land near the Zeno reference at the finest corner
        assert report.distance_continuous <= 5e-2
        assert report.distance_pulsed <= 5e-2
        assert report.discrepancy <= 2 * max(report.distance_continuous, report.distance_pulsed)
        # refinement in each parameter separately improves each path
        cont = [p.error for p in report.continuous_ladder]
        puls = [p.error for p in report.pulsed_ladder]
        assert all(b < a for a, b in zip(cont, cont[1:]))
        assert all(b < a for a, b in zip(puls, puls[1:]))
        assert len(report.surface) == len(TAU_GRID) * len(K_GRID)

    def test_surface_refinement_spot_check(self, qubit):
        # calibrated asymptotic interior point: both one-step refinements improve
        h, hc = qubit
        report = limit_order_experiment(
            h, hc, tau0=TAU0, t_total=1.0, tau_grid=TAU_GRID, k_grid=K_GRID
        )
        surf = {(p.tau, p.k): p.error for p in report.surface}
        tau, k = 2.0**-5, 2.0**5
        assert surf[(tau, k)] < 0.5
        assert surf[(tau / 2, k)] < surf[(tau, k)]
        assert surf[(tau, 2 * k)] < surf[(tau, k)]

    def test_diagonal_distances_shrink_with_bounded_wiggle(self, qubit):
        # finite-parameter interference allows small upward wiggles; the
        # diagonal trend must still fall by an order of magnitude
        h, hc = qubit
        report = limit_order_experiment(
            h, hc, tau0=TAU0, t_total=1.0, tau_grid=TAU_GRID, k_grid=K_GRID
        )
        surf = {(p.tau, p.k): p.error for p in report.surface}
        diag = [surf[(TAU_GRID[i], K_GRID[i])] for i in range(len(TAU_GRID))]
        kept = [e for e in diag if 1e-11 < e < 0.5]
        assert len(kept) >= 4
        assert all(b < 1.25 * a for a, b in zip(kept, kept[1:]))
        assert kept[-1] < 0.2 * kept[0]

    def test_realized_time_bookkeeping(self, qubit):
        h, hc = qubit
        report = limit_order_experiment(
            h, hc, tau0=TAU0, t_total=1.0, tau_grid=[0.25], k_grid=[8.0]
        )
        point = report.surface[0]
        assert point.n_periods == round(1.0 / (0.25 + TAU0 / 8.0))
        assert abs(point.t_realized - point.n_periods * (0.25 + TAU0 / 8.0)) < 1e-15
        assert abs(point.t_realized - 1.0) <= 0.5 * (0.25 + TAU0 / 8.0)

    def test_unrepresentable_total_time(self, qubit):
        h, hc = qubit
        with pytest.raises(ValueError, match="not representable"):
            limit_order_experiment(h, hc, tau0=TAU0, t_total=0.001, tau_grid=[1.0], k_grid=[2.0])

    def test_rejects_bad_grids(self, qubit):
        h, hc = qubit
        with pytest.raises(ValueError):
            limit_order_experiment(h, hc, tau0=TAU0, t_total=1.0, tau_grid=[], k_grid=[2.0])
        with pytest.raises(ValueError, match="decreasing"):
            limit_order_experiment(
                h, hc, tau0=TAU0, t_total=1.0, tau_grid=[0.1, 0.2], k_grid=[2.0]
            )
        with pytest.raises(ValueError, match="increasing"):
            limit_order_experiment(
                h, hc, tau0=TAU0, t_total=1.0, tau_grid=[0.2, 0.1], k_grid=[4.0, 2.0]
            )
