"""Turn predicted label sequences into initiative spans.

IOBES predictions are only trusted when they form one of the accepted
structures S, BE, BIE, BIIE, BIIIE (max length 5). Any non-O label left
over after the left-to-right scan — a dangling I or E, a B with no E, or
a B..E run longer than 5 — is emitted as a singleton span, so no predicted
sentence is ever dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import InitiativeSpan
from .errors import ParseError
from .labels import BINARY, IOBES, B, E, I, LabelSeq, O, S

MAX_STRUCTURE_LEN = 5


@dataclass(frozen=True)
class StructureGrammar:
    valid_structures: frozenset[str] = frozenset({"S", "BE", "BIE", "BIIE", "BIIIE"})


def _spanify(report_id: str, bounds: list[tuple[int, int]]) -> list[InitiativeSpan]:
    return [
        InitiativeSpan(report_id, f"{report_id}#{k}", start, end)
        for k, (start, end) in enumerate(bounds)
    ]


def aggregate_binary(seq: LabelSeq) -> list[InitiativeSpan]:
    """Each maximal run of consecutive 1s becomes one span."""
    if seq.label_set != BINARY:
        raise ValueError("aggregate_binary expects binary labels")
    bounds = []
    start = None
    for i, lab in enumerate(seq.labels):
        if lab == "1":
            if start is None:
                start = i
        elif start is not None:
            bounds.append((start, i - 1))
            start = None
    if start is not None:
        bounds.append((start, len(seq.labels) - 1))
    return _spanify(seq.report_id, bounds)


def aggregate_iobes(seq: LabelSeq) -> list[InitiativeSpan]:
    """Left-to-right scan accepting S and B I* E runs of total length <= 5.

    A B run longer than the cap is not truncated: the whole run falls back
    to singletons, one per sentence.
    """
    if seq.label_set != IOBES:
        raise ValueError("aggregate_iobes expects IOBES labels")
    labs = seq.labels
    n = len(labs)
    bounds = []
    pos = 0
    while pos < n:
        lab = labs[pos]
        if lab == O:
            pos += 1
        elif lab == S:
            bounds.append((pos, pos))
            pos += 1
        elif lab == B:
            end = _valid_run_end(labs, pos)
            if end is not None:
                bounds.append((pos, end))
                pos = end + 1
            else:
                bounds.append((pos, pos))
                pos += 1
        else:  # dangling I or E
            bounds.append((pos, pos))
            pos += 1
    return _spanify(seq.report_id, bounds)


def _valid_run_end(labs: list[str], start: int) -> int | None:
    """Index of the E closing a valid B I* E structure at `start`, else None."""
    pos = start + 1
    while pos < len(labs) and labs[pos] == I:
        pos += 1
    if pos >= len(labs) or labs[pos] != E:
        return None
    if pos - start + 1 > MAX_STRUCTURE_LEN:
        return None
    return pos


def span_bounds(spans: Sequence[InitiativeSpan]) -> list[tuple[int, int]]:
    return [(sp.start, sp.end) for sp in spans]


def save_spans(spans_by_report: dict[str, list[InitiativeSpan]], path: str | Path,
               with_ids: bool = False) -> None:
    """One record per initiative: report_id, start, end (+ initiative_id for gold)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for report_id, spans in spans_by_report.items():
            for sp in spans:
                rec = {"report_id": report_id, "start": sp.start, "end": sp.end}
                if with_ids:
                    rec["initiative_id"] = sp.initiative_id
                fh.write(json.dumps(rec) + "\n")


def load_spans(path: str | Path) -> dict[str, list[InitiativeSpan]]:
    path = Path(path)
    by_report: dict[str, list[InitiativeSpan]] = {}
    counter = 0
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                report_id = obj["report_id"]
                start = obj["start"]
                end = obj["end"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ParseError("malformed span record", line_no, path) from None
            if not isinstance(start, int) or not isinstance(end, int):
                raise ParseError("span bounds must be integers", line_no, path)
            iid = obj.get("initiative_id", f"{report_id}#{counter}")
            counter += 1
            by_report.setdefault(report_id, []).append(
                InitiativeSpan(report_id, iid, start, end))
    for spans in by_report.values():
        spans.sort(key=lambda sp: (sp.start, sp.end))
    return by_report
