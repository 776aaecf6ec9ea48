import pytest

from cutoff_duality.types.error_types import PreconditionError
from cutoff_duality.types.main import BoundPoint, DualityReport, ExponentCurve
from cutoff_duality.utils.typing.custom_typing import DualityTrialRow


@pytest.fixture
def points():
    return [
        BoundPoint(snr=1e4, lower_bound=1.1, upper_bound=1.4, asymptote=1.2, delta=0.1, m1=10.0),
        BoundPoint(snr=1e6, lower_bound=1.5, upper_bound=1.7, asymptote=1.6, delta=0.01, m1=100.0),
    ]


def trial(index, gap, slack=0.0):
    return DualityTrialRow(
        trial=index, primal_nats=0.3, dual_nats=0.3 + gap, gap=gap, pointwise_min_slack=slack
    )


def test_bound_point_rejects_inverted_bracket():
    with pytest.raises(PreconditionError) as exc_info:
        BoundPoint(snr=10.0, lower_bound=2.0, upper_bound=1.0, asymptote=1.5)
    assert "exceeds upper bound" in str(exc_info.value)


def test_bound_point_tolerates_rounding():
    point = BoundPoint(snr=10.0, lower_bound=1.0 + 1e-12, upper_bound=1.0, asymptote=1.0)
    assert point.as_row()["lower_nats"] == pytest.approx(1.0)


def test_curve_from_points_keeps_order_and_metadata(points):
    curve = ExponentCurve.from_points(points, {"constraint_kind": "average"})
    assert curve.column("snr") == [1e4, 1e6]
    assert curve.metadata["delta"] == [0.1, 0.01]
    assert curve.metadata["m1"] == [10.0, 100.0]
    assert curve.metadata["constraint_kind"] == "average"
    assert curve.to_dict()["columns"] == list(curve.columns)


def test_curve_append_requires_columns():
    curve = ExponentCurve(columns=("snr", "lower_nats"))
    with pytest.raises(PreconditionError) as exc_info:
        curve.append({"snr": 1.0})
    assert "lower_nats" in str(exc_info.value)


def test_curve_append_drops_extra_keys():
    curve = ExponentCurve(columns=("snr",))
    curve.append({"snr": 1.0, "extra": 2.0})
    assert curve.rows == [{"snr": 1.0}]


@pytest.mark.parametrize(
    "gaps, slack, passed",
    [
        ([1e-8, 2e-7], 0.0, True),
        ([1e-8, 2e-4], 0.0, False),
        ([1e-8, 2e-7], -1e-6, False),
    ],
)
def test_duality_report_passed(gaps, slack, passed):
    report = DualityReport(
        rho=1.0, tolerance=1e-5, trials=[trial(i, gap, slack) for i, gap in enumerate(gaps)]
    )
    assert report.max_gap == max(gaps)
    assert report.passed is passed, f"Wrong verdict for gaps {gaps} and slack {slack}"
    assert report.to_dict()["passed"] is passed


def test_empty_duality_report():
    report = DualityReport(rho=0.5, tolerance=1e-5)
    assert report.max_gap == 0.0
    assert report.passed
