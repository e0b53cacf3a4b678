"""Data model and persistence for reports, sentences and gold initiative spans.

A corpus file is line-delimited JSON (UTF-8), one sentence record per line:

    {"report_id": "R1", "index": 0, "text": "...", "initiative_id": null}

`initiative_id` marks gold annotation; sentences sharing an id must be
contiguous within their report. An optional `sdg` string field is carried
through untouched. A split manifest is a JSON object mapping file names to
one of {train, dev, test, unsplit}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import IntegrityError, ParseError

SPLITS = ("train", "dev", "test", "unsplit")


@dataclass
class Sentence:
    report_id: str
    index: int  # 0-based position within the report
    text: str
    initiative_id: str | None = None
    sdg: str | None = None


@dataclass(frozen=True)
class InitiativeSpan:
    """Contiguous inclusive sentence-index range naming one initiative."""

    report_id: str
    initiative_id: str
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise IntegrityError(
                f"span {self.initiative_id!r} in report {self.report_id!r}: "
                f"start {self.start} > end {self.end}"
            )

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "InitiativeSpan") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass
class Corpus:
    reports: dict[str, list[Sentence]] = field(default_factory=dict)
    split: str = "unsplit"

    def __len__(self) -> int:
        return sum(len(s) for s in self.reports.values())

    def report_ids(self) -> list[str]:
        return list(self.reports)

    def sentences(self) -> Iterator[Sentence]:
        for sents in self.reports.values():
            yield from sents


@dataclass
class CorpusStats:
    n_reports: int
    n_sentences: int
    n_initiatives: int
    pct_sentences_in_initiatives: float
    empty_warning: bool = False

    def as_dict(self) -> dict:
        return {
            "n_reports": self.n_reports,
            "n_sentences": self.n_sentences,
            "n_initiatives": self.n_initiatives,
            "pct_sentences_in_initiatives": round(self.pct_sentences_in_initiatives, 2),
            "empty_warning": self.empty_warning,
        }


def _parse_record(obj: dict, line_no: int, path) -> Sentence:
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object", line_no, path)
    try:
        report_id = obj["report_id"]
        index = obj["index"]
        text = obj["text"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", line_no, path) from None
    if not isinstance(report_id, str) or not report_id:
        raise ParseError("report_id must be a non-empty string", line_no, path)
    if not isinstance(index, int) or isinstance(index, bool) or index < 0:
        raise ParseError("index must be a non-negative integer", line_no, path)
    if not isinstance(text, str):
        raise ParseError("text must be a string", line_no, path)
    initiative_id = obj.get("initiative_id")
    if initiative_id is not None and not isinstance(initiative_id, str):
        raise ParseError("initiative_id must be a string or null", line_no, path)
    sdg = obj.get("sdg")
    if sdg is not None and not isinstance(sdg, str):
        raise ParseError("sdg must be a string or null", line_no, path)
    return Sentence(report_id, index, text, initiative_id, sdg)


def validate_corpus(corpus: Corpus) -> None:
    """Check index density and initiative contiguity; raise IntegrityError."""
    seen_ids: dict[str, str] = {}  # initiative_id -> report_id
    for report_id, sents in corpus.reports.items():
        open_id = None
        closed: set[str] = set()
        for pos, sent in enumerate(sents):
            if sent.index != pos:
                raise IntegrityError(
                    f"report {report_id!r}: expected sentence index {pos}, got {sent.index}"
                )
            iid = sent.initiative_id
            if iid != open_id:
                if open_id is not None:
                    closed.add(open_id)
                if iid is not None:
                    if iid in closed:
                        raise IntegrityError(
                            f"initiative {iid!r} in report {report_id!r} is not contiguous"
                        )
                    if iid in seen_ids and seen_ids[iid] != report_id:
                        raise IntegrityError(
                            f"initiative {iid!r} appears in reports "
                            f"{seen_ids[iid]!r} and {report_id!r}"
                        )
                    seen_ids[iid] = report_id
                open_id = iid


def corpus_from_sentences(records: Iterable[Sentence], split: str = "unsplit") -> Corpus:
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
    reports: dict[str, list[Sentence]] = {}
    for sent in records:
        reports.setdefault(sent.report_id, []).append(sent)
    corpus = Corpus(reports=reports, split=split)
    validate_corpus(corpus)
    return corpus


def load_corpus(path: str | Path, split: str = "unsplit") -> Corpus:
    """Load a line-delimited sentence file into a validated Corpus.

    Raises ParseError (with line number) for malformed records and
    IntegrityError for contiguity or index violations.
    """
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no, path) from None
            records.append(_parse_record(obj, line_no, path))
    return corpus_from_sentences(records, split=split)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for sent in corpus.sentences():
            rec = {
                "report_id": sent.report_id,
                "index": sent.index,
                "text": sent.text,
                "initiative_id": sent.initiative_id,
            }
            if sent.sdg is not None:
                rec["sdg"] = sent.sdg
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_manifest(path: str | Path) -> dict[str, str]:
    """Read a split manifest: JSON object mapping corpus file name -> split."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ParseError("manifest must be a JSON object", path=path)
    for fname, split in obj.items():
        if split not in SPLITS:
            raise ParseError(f"unknown split {split!r} for {fname!r}", path=path)
    return obj


def extract_spans(corpus: Corpus) -> dict[str, list[InitiativeSpan]]:
    """One span per distinct initiative_id, per report, sorted by start."""
    out: dict[str, list[InitiativeSpan]] = {}
    for report_id, sents in corpus.reports.items():
        spans = []
        open_id = None
        start = 0
        for sent in sents:
            iid = sent.initiative_id
            if iid == open_id:
                continue
            if open_id is not None:
                spans.append(InitiativeSpan(report_id, open_id, start, sent.index - 1))
            open_id = iid
            start = sent.index
        if open_id is not None:
            spans.append(InitiativeSpan(report_id, open_id, start, len(sents) - 1))
        out[report_id] = spans
    return out


def compute_stats(corpus: Corpus) -> CorpusStats:
    n_sentences = len(corpus)
    n_annotated = sum(1 for s in corpus.sentences() if s.initiative_id is not None)
    n_initiatives = sum(len(v) for v in extract_spans(corpus).values())
    if n_sentences == 0:
        return CorpusStats(0, 0, 0, 0.0, empty_warning=True)
    pct = 100.0 * n_annotated / n_sentences
    return CorpusStats(len(corpus.reports), n_sentences, n_initiatives, pct)
