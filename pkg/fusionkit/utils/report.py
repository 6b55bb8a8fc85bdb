"""
Report utilities cho command output
Scores print with 4 decimal places
"""

import json
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from fusionkit.exceptions import FusionKitException
from fusionkit.models import MetricsReport
from fusionkit.models.reference_scores import ReferenceTriple


def success_line(data: Any = None, message: str = None) -> str:
    """
    Machine-readable success line

    Args:
        data: JSON-serializable payload
        message: Optional human message

    Returns:
        One JSON line
    """
    response: Dict[str, Any] = {'success': True}
    if message:
        response['message'] = message
    if data is not None:
        response['data'] = data
    return json.dumps(response, sort_keys=True)


def error_lines(error: FusionKitException) -> Tuple[str, str]:
    """(JSON error line, human diagnostic) for standard error"""
    return json.dumps(error.to_dict(), sort_keys=True, default=str), f"error: {error.message}"


def format_scores(report: MetricsReport) -> str:
    return f"dis={report.dis:.4f} dim={report.dim:.4f} com={report.com:.4f}"


def format_report(report: MetricsReport) -> str:
    """Headline scores, per-class table and confusion matrix"""
    lines = [format_scores(report), f"samples={report.num_samples}", "class  precision  recall  f1      support"]
    for index, scores in enumerate(report.per_class):
        lines.append(
            f"{index:<6} {scores.precision:.4f}     {scores.recall:.4f}  {scores.f1:.4f}  {scores.support}"
        )
    lines.append("confusion (rows true, columns predicted):")
    for row in report.confusion.astype(int).tolist():
        lines.append("  " + " ".join(f"{count:>5d}" for count in row))
    return "\n".join(lines)


def format_gradcheck(cases: Sequence[Any]) -> str:
    lines = []
    for case in cases:
        verdict = 'PASS' if case.report.passed else 'FAIL'
        lines.append(f"{verdict} {case.label} max_error={case.report.max_error:.3e}")
        for failure in case.report.failures():
            lines.append(f"    {failure['name']}: {failure['error']:.3e}")
    lines.append('PASS' if all(case.report.passed for case in cases) else 'FAIL')
    return "\n".join(lines)


def format_reference_table(rows: Iterable[Tuple[ReferenceTriple, float, bool]]) -> str:
    rows = list(rows)
    lines = ["features                   strategy  decoder   dis     dim     com     recomputed  ok"]
    for triple, recomputed, ok in rows:
        lines.append(
            f"{triple.features:<26} {triple.strategy:<9} {triple.decoder:<9} "
            f"{triple.dis:.4f}  {triple.dim:.4f}  {triple.com:.4f}  {recomputed:.4f}      {'yes' if ok else 'NO'}"
        )
    matched = sum(1 for _, _, ok in rows if ok)
    lines.append(f"{matched}/{len(rows)} rows reproduce within tolerance")
    return "\n".join(lines)


def format_comparison(rows: List[Dict[str, Any]], keys: Sequence[str]) -> str:
    lines = ["  ".join(f"{key:>14}" for key in keys)]
    for row in rows:
        cells = []
        for key in keys:
            value = row.get(key)
            cells.append(f"{value:>14.4f}" if isinstance(value, float) else f"{str(value):>14}")
        lines.append("  ".join(cells))
    return "\n".join(lines)
