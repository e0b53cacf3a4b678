"""Initiative-level scoring and inter-annotator agreement.

Two matching regimes are reported side by side. Exact Match credits a
prediction only when its (start, end) boundaries coincide with a gold
span. Min Match credits any sentence overlap, matched one-to-one:
predictions are visited by ascending (start, end) and each claims the
earliest-starting gold span it overlaps that no earlier prediction has
claimed. The one-to-one cardinality is deliberate: Min Match scores
produced under a many-to-one rule are not comparable, since there a
single sprawling prediction can collect several gold initiatives.

Corpus-level scores are micro-averaged: tp/fp/fn are summed over reports
before precision/recall/F1 are computed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import InitiativeSpan
from .errors import ParseError

MIN_MATCH = "min_match"
EXACT_MATCH = "exact_match"


@dataclass
class MatchReport:
    regime: str
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    def __add__(self, other: "MatchReport") -> "MatchReport":
        if other.regime != self.regime:
            raise ValueError("cannot sum reports from different regimes")
        return MatchReport(self.regime, self.tp + other.tp,
                           self.fp + other.fp, self.fn + other.fn)


def match_exact(pred: Sequence[InitiativeSpan],
                gold: Sequence[InitiativeSpan]) -> MatchReport:
    """tp = predictions whose (start, end) appears among the gold spans."""
    gold_bounds = {(sp.start, sp.end) for sp in gold}
    tp = sum(1 for sp in pred if (sp.start, sp.end) in gold_bounds)
    return MatchReport(EXACT_MATCH, tp, len(pred) - tp, len(gold) - tp)


def match_min(pred: Sequence[InitiativeSpan],
              gold: Sequence[InitiativeSpan]) -> MatchReport:
    """One-to-one overlap matching; see module docstring for the rule."""
    gold_sorted = sorted(gold, key=lambda sp: (sp.start, sp.end))
    taken = [False] * len(gold_sorted)
    tp = 0
    for psp in sorted(pred, key=lambda sp: (sp.start, sp.end)):
        for gi, gsp in enumerate(gold_sorted):
            if not taken[gi] and psp.overlaps(gsp):
                taken[gi] = True
                tp += 1
                break
    return MatchReport(MIN_MATCH, tp, len(pred) - tp, len(gold) - tp)


def score_corpus(pred_by_report: dict[str, list[InitiativeSpan]],
                 gold_by_report: dict[str, list[InitiativeSpan]],
                 ) -> dict[str, MatchReport]:
    """Micro-averaged Min Match and Exact Match over all reports."""
    total = {MIN_MATCH: MatchReport(MIN_MATCH, 0, 0, 0),
             EXACT_MATCH: MatchReport(EXACT_MATCH, 0, 0, 0)}
    for report_id in sorted(set(pred_by_report) | set(gold_by_report)):
        pred = pred_by_report.get(report_id, [])
        gold = gold_by_report.get(report_id, [])
        total[MIN_MATCH] += match_min(pred, gold)
        total[EXACT_MATCH] += match_exact(pred, gold)
    return total


@dataclass(frozen=True)
class AgreementCounts:
    n1: int
    n2: int
    nm: int
    name: str = ""

    def __post_init__(self):
        if not 0 <= self.nm <= min(self.n1, self.n2):
            raise ValueError(
                f"matches ({self.nm}) must lie in [0, min(n1, n2)]"
            )


def agreement(counts: AgreementCounts) -> tuple[float, float]:
    """(min_pct, max_pct): nm/(n1+n2-nm) and nm/min(n1, n2), as percentages."""
    union = counts.n1 + counts.n2 - counts.nm
    if union == 0:
        raise ValueError("agreement undefined when both annotators found nothing")
    min_pct = 100.0 * counts.nm / union
    max_pct = 100.0 * counts.nm / min(counts.n1, counts.n2)
    return min_pct, max_pct


def agreement_table(rows: Sequence[AgreementCounts]) -> dict:
    """Per-row percentages plus the unweighted averages across rows."""
    out_rows = []
    for row in rows:
        min_pct, max_pct = agreement(row)
        out_rows.append({
            "name": row.name, "n1": row.n1, "n2": row.n2, "nm": row.nm,
            "min_pct": min_pct, "max_pct": max_pct,
        })
    n = len(out_rows)
    return {
        "rows": out_rows,
        "avg_min_pct": sum(r["min_pct"] for r in out_rows) / n if n else 0.0,
        "avg_max_pct": sum(r["max_pct"] for r in out_rows) / n if n else 0.0,
    }


def load_agreement_counts(path: str | Path) -> list[AgreementCounts]:
    """Read CSV rows of (name, n1, n2, nm); the name column is optional.

    A header line is recognized by a non-numeric second field and skipped.
    """
    path = Path(path)
    rows = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        for line_no, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not cell.strip() for cell in rec):
                continue
            if len(rec) == 3:
                name, nums = "", rec
            elif len(rec) == 4:
                name, nums = rec[0].strip(), rec[1:]
            else:
                raise ParseError("expected 3 or 4 comma-separated fields", line_no, path)
            try:
                n1, n2, nm = (int(x) for x in nums)
            except ValueError:
                if line_no == 1:
                    continue  # header
                raise ParseError("counts must be integers", line_no, path) from None
            try:
                rows.append(AgreementCounts(n1, n2, nm, name=name))
            except ValueError as exc:
                raise ParseError(str(exc), line_no, path) from None
    return rows
