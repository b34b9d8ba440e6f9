"""Tests for evaluation reports."""
import numpy as np
import pytest

from src.core.exceptions import InvalidInputError
from src.evaluation.metrics import PointSet2D
from src.evaluation.report import EvalReport, evaluate_map, evaluate_trajectory


def _walls() -> np.ndarray:
    bottom = [(x, 0.0) for x in range(30)]
    left = [(0.0, y) for y in range(1, 15)]
    return np.array(bottom + left, dtype=float)


def test_report_rejects_negative_values():
    """Test metric values must be non-negative."""
    with pytest.raises(InvalidInputError):
        EvalReport().add("adnn_cells", -0.1)


def test_report_value_lookup():
    """Test values are found by metric name."""
    report = EvalReport()
    report.add("adnn_cells", 0.5, "lab")

    assert report.value("adnn_cells") == 0.5
    assert report.value("rmse_cells") is None


def test_report_csv():
    """Test the CSV has one row per metric with six decimals."""
    report = EvalReport()
    report.add("ate_m", 0.25, "corridor")

    lines = report.to_csv().splitlines()

    assert lines[0] == "metric,environment,method,value"
    assert lines[1] == "ate_m,corridor,markernav,0.250000"


def test_report_text_lists_metrics():
    """Test the text table names every metric."""
    report = EvalReport()
    report.add("adnn_cells", 1.0)
    report.add("rmse_cells", 2.0)

    text = report.to_text()

    assert "adnn_cells" in text
    assert "rmse_cells" in text


def test_evaluate_map_identical_sets():
    """Test a map compared with itself scores zero."""
    points = PointSet2D(_walls())
    report = EvalReport(resolution=20.0)

    evaluate_map(points, points, report, "room")

    assert report.value("adnn_cells") == pytest.approx(0.0, abs=1e-9)
    assert report.value("adnn_cm") == pytest.approx(0.0, abs=1e-9)
    assert report.value("rmse_cells") == pytest.approx(0.0, abs=1e-9)
    assert {r.environment for r in report.rows} == {"room"}


def test_evaluate_map_reports_centimeters():
    """Test ADNN in centimeters scales with the resolution."""
    truth = PointSet2D(_walls())
    report = EvalReport(resolution=20.0)
    noisy = _walls().copy()
    noisy[::2, 1] += 1.0

    evaluate_map(PointSet2D(noisy), truth, report, symmetric=True)

    assert report.value("adnn_cm") == pytest.approx(report.value("adnn_cells") * 5.0)


def test_evaluate_trajectory_rows():
    """Test aligned and unaligned ATE rows are added."""
    truth = np.array([[0.1 * k, 0.1 * k, 0.02 * k * k] for k in range(10)])
    estimated = truth + np.array([0.0, 0.3, 0.0])

    report = evaluate_trajectory(estimated, truth, EvalReport())

    assert report.value("ate_m") == pytest.approx(0.0, abs=1e-9)
    assert report.value("ate_unaligned_m") == pytest.approx(0.3)
