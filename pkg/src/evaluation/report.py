"""Evaluation reports: map-vs-ground-truth metrics, text table and CSV."""
import csv
import io
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from rich.console import Console
from rich.table import Table

from src.core.exceptions import InvalidInputError
from src.evaluation.metrics import PointSet2D, adnn, ate, icp_align, rmse

logger = logging.getLogger("markernav")


@dataclass
class MetricRow:
    metric: str
    environment: str
    method: str
    value: float


@dataclass
class EvalReport:
    """Collected metric rows for one or more runs."""

    rows: List[MetricRow] = field(default_factory=list)
    resolution: float = 20.0

    def add(self, metric: str, value: float, environment: str = "", method: str = "markernav") -> None:
        if value < 0:
            raise InvalidInputError(f"Metric {metric} must be non-negative, got {value}")
        self.rows.append(MetricRow(metric, environment, method, float(value)))

    def value(self, metric: str) -> Optional[float]:
        for row in self.rows:
            if row.metric == metric:
                return row.value
        return None

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["metric", "environment", "method", "value"])
        for row in self.rows:
            writer.writerow([row.metric, row.environment, row.method, f"{row.value:.6f}"])
        return buffer.getvalue()

    def to_table(self, title: str = "Evaluation") -> Table:
        table = Table(title=title)
        table.add_column("Metric", style="cyan")
        table.add_column("Environment")
        table.add_column("Method")
        table.add_column("Value", justify="right", style="green")
        for row in self.rows:
            table.add_row(row.metric, row.environment, row.method, f"{row.value:.4f}")
        return table

    def to_text(self) -> str:
        """Plain-text rendering of the table."""
        console = Console(file=io.StringIO(), width=100, color_system=None, record=True)
        console.print(self.to_table())
        return console.export_text()


def evaluate_map(
    mapped: PointSet2D,
    truth: PointSet2D,
    report: EvalReport,
    environment: str = "",
    symmetric: bool = False,
) -> EvalReport:
    """
    Align a mapped point set to ground truth and add ADNN/RMSE rows.

    ADNN is reported in cells and in centimeters at the report resolution.
    """
    icp = icp_align(mapped, truth)
    aligned = mapped.transformed(icp.transform)
    adnn_cells = adnn(aligned, truth, symmetric)
    report.add("adnn_cells", adnn_cells, environment)
    report.add("adnn_cm", adnn_cells * 100.0 / report.resolution, environment)
    report.add("rmse_cells", rmse(aligned, truth, symmetric), environment)
    report.add("icp_iterations", icp.iterations, environment)
    report.add("icp_residual_cells", icp.residual, environment)
    if icp.degenerate:
        logger.warning(f"ICP alignment for '{environment}' was degenerate")
    return report


def evaluate_trajectory(estimated, truth, report: EvalReport, environment: str = "", max_gap: float = 0.02) -> EvalReport:
    """Add aligned and unaligned ATE rows."""
    report.add("ate_m", ate(estimated, truth, align=True, max_gap=max_gap), environment)
    report.add("ate_unaligned_m", ate(estimated, truth, align=False, max_gap=max_gap), environment)
    return report
