"""Sentence label schemas and gold-label derivation from initiative spans.

Two label sets are supported: BINARY {0, 1} and IOBES {O, S, B, I, E}.
The IOBES order O < S < B < I < E is canonical and stable: label indices,
emission columns and serialized score vectors all follow it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import InitiativeSpan
from .errors import IntegrityError, ParseError

O, S, B, I, E = "O", "S", "B", "I", "E"


class LabelSet:
    """A fixed, ordered label alphabet."""

    def __init__(self, variant: str, members: tuple[str, ...]):
        self.variant = variant
        self.members = members
        self._index = {m: i for i, m in enumerate(members)}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelSet) and other.variant == self.variant

    def __repr__(self) -> str:
        return f"LabelSet({self.variant})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"label {label!r} not in {self.variant} set") from None

    def label(self, idx: int) -> str:
        return self.members[idx]


BINARY = LabelSet("binary", ("0", "1"))
IOBES = LabelSet("iobes", (O, S, B, I, E))

_BY_NAME = {"binary": BINARY, "iobes": IOBES}


def label_set(name: str) -> LabelSet:
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown label set {name!r}; expected binary or iobes") from None


@dataclass
class LabelSeq:
    report_id: str
    labels: list[str]
    label_set: LabelSet

    def __len__(self) -> int:
        return len(self.labels)

    def indices(self) -> list[int]:
        return [self.label_set.index(lab) for lab in self.labels]


def _check_spans(spans: Sequence[InitiativeSpan], report_length: int) -> list[InitiativeSpan]:
    ordered = sorted(spans, key=lambda sp: sp.start)
    prev_end = -1
    for sp in ordered:
        if sp.start < 0 or sp.end >= report_length:
            raise IntegrityError(
                f"span {sp.initiative_id!r} [{sp.start},{sp.end}] out of range "
                f"for report of length {report_length}"
            )
        if sp.start <= prev_end:
            raise IntegrityError(f"span {sp.initiative_id!r} overlaps a previous span")
        prev_end = sp.end
    return ordered


def derive_binary(spans: Sequence[InitiativeSpan], report_length: int,
                  report_id: str = "") -> LabelSeq:
    """Label 1 for every sentence inside some span, 0 elsewhere."""
    labels = ["0"] * report_length
    for sp in _check_spans(spans, report_length):
        for i in range(sp.start, sp.end + 1):
            labels[i] = "1"
    return LabelSeq(report_id or _report_id_of(spans), labels, BINARY)


def derive_iobes(spans: Sequence[InitiativeSpan], report_length: int,
                 report_id: str = "") -> LabelSeq:
    """S for length-1 spans; B I...I E for longer ones; O elsewhere.

    Gold spans longer than 5 sentences are emitted faithfully even though
    the prediction-side aggregation grammar caps structures at 5.
    """
    labels = [O] * report_length
    for sp in _check_spans(spans, report_length):
        if sp.length == 1:
            labels[sp.start] = S
        else:
            labels[sp.start] = B
            for i in range(sp.start + 1, sp.end):
                labels[i] = I
            labels[sp.end] = E
    return LabelSeq(report_id or _report_id_of(spans), labels, IOBES)


def _report_id_of(spans: Sequence[InitiativeSpan]) -> str:
    return spans[0].report_id if spans else ""


def save_labels(seqs: Sequence[LabelSeq], path: str | Path) -> None:
    """One record per sentence: report_id, index, label string."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for seq in seqs:
            for idx, lab in enumerate(seq.labels):
                fh.write(json.dumps(
                    {"report_id": seq.report_id, "index": idx, "label": lab}
                ) + "\n")


def load_labels(path: str | Path, labels: LabelSet) -> dict[str, LabelSeq]:
    """Read a label file back into per-report sequences.

    Indices per report must be dense from 0 in file order.
    """
    path = Path(path)
    by_report: dict[str, list[str]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                report_id = obj["report_id"]
                index = obj["index"]
                lab = obj["label"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ParseError("malformed label record", line_no, path) from None
            if lab not in labels.members:
                raise ParseError(f"label {lab!r} not in {labels.variant} set", line_no, path)
            seq = by_report.setdefault(report_id, [])
            if index != len(seq):
                raise ParseError(
                    f"report {report_id!r}: expected index {len(seq)}, got {index}",
                    line_no, path)
            seq.append(lab)
    return {rid: LabelSeq(rid, labs, labels) for rid, labs in by_report.items()}
