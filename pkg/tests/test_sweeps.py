import pytest

from zenolab.sweeps import FitError, SweepRecord, SweepResult, filter_asymptotic, fit_rate


def test_exact_inverse_power_law():
    points = [(n, 1.0 / n) for n in (10, 100, 1000, 10000)]
    fit = fit_rate(points)
    assert abs(fit.slope - (-1.0)) < 1e-12
    assert fit.residual < 1e-12
    assert fit.n_points == 4


def test_exact_inverse_square_law():
    points = [(n, 3.7e-2 / n**2) for n in (10, 20, 40, 80, 160)]
    fit = fit_rate(points)
    assert abs(fit.slope - (-2.0)) < 1e-12


def test_asymptotic_filter_bounds():
    points = [(1, 0.9), (2, 0.4), (4, 0.2), (8, 0.1), (16, 0.05), (32, 1e-13)]
    kept = filter_asymptotic(points)
    assert kept == [(2, 0.4), (4, 0.2), (8, 0.1), (16, 0.05)]


def test_too_few_points_raises():
    with pytest.raises(FitError, match="need at least 4"):
        fit_rate([(10, 0.1), (100, 0.01), (1000, 0.001)])
    with pytest.raises(FitError):
        fit_rate([(10, 0.9), (100, 2.0), (1000, 1e-13), (10000, 0.7)])


def test_records_sorted_by_parameter():
    records = [
        SweepRecord(params=(100.0,), error=1e-2),
        SweepRecord(params=(10.0,), error=1e-1),
        SweepRecord(params=(None, 2.0), error=1e-3),
    ]
    result = SweepResult(experiment="x", param_names=("param",), records=records)
    assert [r.params for r in result.records] == [(None, 2.0), (10.0,), (100.0,)]
    assert result.fitted_slope is None
