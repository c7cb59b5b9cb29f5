# src/polarorder/adapters/outbound/report_writer.py
"""Renders distributions, verdicts and information sets as CSV/JSON text."""
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, List, Optional

from loguru import logger

from polarorder.core.infoset import index_of
from polarorder.core.models import ContainmentReport, DeltaDistribution, InfoSet, OrderingVerdict

from .base import ReportWriter


def _fmt(value: float) -> str:
    # round-trip precision keeps reports byte-stable
    return f"{value:.17g}"


def _csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def render_distribution_csv(dist: DeltaDistribution) -> str:
    return _csv(("value", "weight"), ((_fmt(v), _fmt(w)) for v, w in dist.atoms))


def render_summary_json(payload: Any) -> str:
    return _json(payload)


def render_verdict_json(verdict: OrderingVerdict) -> str:
    return _json(verdict.model_dump(mode="json"))


def render_containment_json(report: ContainmentReport) -> str:
    return _json(report.model_dump(mode="json"))


def render_containment_grid_json(reports: List[ContainmentReport]) -> str:
    return _json(
        {
            "contained": all(r.contained for r in reports),
            "reports": [r.model_dump(mode="json") for r in reports],
        }
    )


def render_infoset_csv(info_set: InfoSet) -> str:
    members = set(info_set.members)
    rows = (
        (s, index_of(s), _fmt(value), int(s in members))
        for s, value in info_set.report.items()
    )
    return _csv(("sequence", "index", "value", "member"), rows)


def render_infoset_summary(info_set: InfoSet) -> str:
    return _json(
        {
            "n": info_set.n,
            "phi": info_set.phi,
            "eps": info_set.eps,
            "budget": info_set.budget,
            "tol": info_set.tol,
            "size": info_set.size,
            "members": list(info_set.members),
        }
    )


class FileReportWriter(ReportWriter):
    """Writes reports to a file path, or to stdout when no destination is given."""

    def write(self, content: str, destination: Optional[str] = None) -> None:
        if destination is None:
            sys.stdout.write(content)
            sys.stdout.flush()
            return
        path = Path(destination)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        logger.info(f"Wrote report to {path}")
