"""Report emission: report.json, data.csv, plot.gp per experiment run."""

from __future__ import annotations

import csv
import io
import json
import os

from .experiments import VerificationReport

__all__ = ["emit", "load_report"]

_PLOT_TEMPLATE = """\
# gnuplot script for {experiment}: estimate vs target per grid row
set datafile separator ','
set key autotitle columnhead
set grid
set title '{experiment}: estimate vs target'
set ylabel 'value'
set xlabel 'row'
plot 'data.csv' using 0:'estimate' with linespoints title 'estimate', \\
     'data.csv' using 0:'target' with linespoints title 'target'
"""


def _csv_rows(report: VerificationReport) -> tuple[list[str], list[dict]]:
    rows = report.rows
    if not rows:
        # fall back to one row per (estimate, matching target) pair
        targets = dict(
            (label, value) for label, value in report.analytic_targets
        )
        rows = [
            {"label": label, "estimate": value, "stderr": stderr,
             "target": targets.get(label, ""), "discrepancy": ""}
            for label, value, stderr in report.estimates
        ]
    # fixed column order: union of keys in first-appearance order
    header: list[str] = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    return header, rows


def emit(report: VerificationReport, output_dir: str) -> dict:
    """Write report.json, data.csv and plot.gp under output_dir.

    Returns the paths written.  Numeric formatting is repr-based via the
    csv module, so a rerun with the same inputs is byte-identical.
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = {
        "report": os.path.join(output_dir, "report.json"),
        "data": os.path.join(output_dir, "data.csv"),
        "plot": os.path.join(output_dir, "plot.gp"),
    }

    with open(paths["report"], "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    header, rows = _csv_rows(report)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, restval="",
                            lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    with open(paths["data"], "w") as fh:
        fh.write(buf.getvalue())

    with open(paths["plot"], "w") as fh:
        fh.write(_PLOT_TEMPLATE.format(experiment=report.experiment))
    return paths


def load_report(path: str) -> VerificationReport:
    """Inverse of the report.json half of emit()."""
    with open(path) as fh:
        data = json.load(fh)
    return VerificationReport(**data)
