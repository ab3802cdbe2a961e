"""Score file (CSV) parsing/writing and JSON report formatting.

Score file format: UTF-8, LF line endings, header line `index,score,label`,
then one `index,score,label` row per element. Labels are 1 (positive),
0 (negative), -1 (ignore); indices must form the permutation 0..n-1, so row
order does not have to match index order.

Structural problems (bad header, wrong column count, unparseable numbers)
raise ScoreFileError with 1-based line and column; domain problems
(non-finite score, unknown label, duplicate or missing index) raise
ValidationError naming the offending row. The two map to different CLI exit
codes, which is why they are different exception types.

Reports are JSON with stable key names. Floats are rounded to 15
significant digits before serialisation, so the printed text re-parses to
exactly the printed values.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .types import ScoreSet, ValidationError, VALID_LABELS

SCORE_FILE_HEADER = "index,score,label"


class ScoreFileError(Exception):
    """A score file failed to parse; line and column are 1-based."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


def read_score_file(path: str) -> ScoreSet:
    """Parse a score CSV into a ScoreSet."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScoreFileError(f"cannot read {path}: {exc.strerror or exc}", 0, 0) from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ScoreFileError("empty file, expected header " + SCORE_FILE_HEADER, 1, 1)
    if lines[0].strip() != SCORE_FILE_HEADER:
        raise ScoreFileError(
            f"bad header {lines[0]!r}, expected {SCORE_FILE_HEADER!r}", 1, 1
        )
    rows: list[tuple[int, float, int]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if raw.strip() == "":
            raise ScoreFileError("blank line", lineno, 1)
        fields = raw.split(",")
        if len(fields) != 3:
            raise ScoreFileError(f"expected 3 comma-separated fields, got {len(fields)}", lineno, len(fields))
        try:
            index = int(fields[0])
        except ValueError:
            raise ScoreFileError(f"bad index {fields[0]!r}", lineno, 1) from None
        try:
            score = float(fields[1])
        except ValueError:
            raise ScoreFileError(f"bad score {fields[1]!r}", lineno, 2) from None
        try:
            label = int(fields[2])
        except ValueError:
            raise ScoreFileError(f"bad label {fields[2]!r}", lineno, 3) from None
        rows.append((index, score, label))
    if not rows:
        raise ValidationError("score file has a header but no rows")
    n = len(rows)
    seen = set()
    scores = np.empty(n)
    labels = np.empty(n, dtype=np.int64)
    for ordinal, (index, score, label) in enumerate(rows, start=1):
        if not 0 <= index < n:
            raise ValidationError(f"row {ordinal}: index {index} outside 0..{n - 1}")
        if index in seen:
            raise ValidationError(f"row {ordinal}: duplicate index {index}")
        seen.add(index)
        if not math.isfinite(score):
            raise ValidationError(f"row {ordinal} (index {index}): non-finite score {score!r}")
        if label not in VALID_LABELS:
            raise ValidationError(
                f"row {ordinal} (index {index}): label {label} not in {sorted(VALID_LABELS)}"
            )
        scores[index] = score
        labels[index] = label
    return ScoreSet(scores=scores, labels=labels)


def write_score_file(path: str, score_set: ScoreSet) -> None:
    """Write a ScoreSet as a score CSV (inverse of read_score_file)."""
    lines = [SCORE_FILE_HEADER]
    for i in range(len(score_set)):
        lines.append(f"{i},{format_float(float(score_set.scores[i]))},{int(score_set.labels[i])}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def format_float(x: float) -> str:
    """Render a float with 15 significant digits."""
    return f"{x:.15g}"


def round_floats(obj):
    """Recursively round floats in a JSON-able structure to 15 significant digits.

    The rounded value re-parses exactly, which is what makes printed reports
    round-trip.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(format_float(obj))
    if isinstance(obj, (np.floating,)):
        return float(format_float(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [round_floats(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def render_report(report: dict) -> str:
    """Serialise a report dict as indented JSON with rounded floats."""
    return json.dumps(round_floats(report), indent=2) + "\n"
