"""File-format plumbing shared with the CRF toolkit.

The bridge talks to the main package exclusively through its files:
corpus and label files in, emissions file out. The record schemas are
re-implemented here (they are the interface, not the code behind it).
"""

from __future__ import annotations

import json
import string
from pathlib import Path

_PUNCT = set(string.punctuation)


def load_corpus(path: str | Path) -> dict[str, list[str]]:
    """Corpus JSONL -> report_id -> sentence texts (dense, index order)."""
    reports: dict[str, list[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rid, idx, text = obj["report_id"], obj["index"], obj["text"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ValueError(f"{path}:{line_no}: malformed sentence record") from None
            sents = reports.setdefault(rid, [])
            if idx != len(sents):
                raise ValueError(f"{path}:{line_no}: expected index {len(sents)}, got {idx}")
            sents.append(text)
    return reports


def load_labels(path: str | Path, label_to_id: dict[str, int]) -> dict[str, list[int]]:
    """Label JSONL -> report_id -> label ids (dense, index order)."""
    reports: dict[str, list[int]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rid, idx, lab = obj["report_id"], obj["index"], obj["label"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ValueError(f"{path}:{line_no}: malformed label record") from None
            if lab not in label_to_id:
                raise ValueError(f"{path}:{line_no}: unknown label {lab!r}")
            seq = reports.setdefault(rid, [])
            if idx != len(seq):
                raise ValueError(f"{path}:{line_no}: expected index {len(seq)}, got {idx}")
            seq.append(label_to_id[lab])
    return reports


def token_count(text: str) -> int:
    """Whitespace split with leading/trailing punctuation as own tokens."""
    n = 0
    for chunk in text.split():
        i, j = 0, len(chunk)
        while i < j and chunk[i] in _PUNCT:
            n += 1
            i += 1
        while j > i and chunk[j - 1] in _PUNCT:
            n += 1
            j -= 1
        if i < j:
            n += 1
    return n


def eligible_mask(texts: list[str], min_tokens: int, max_tokens: int) -> list[bool]:
    return [min_tokens <= token_count(t) <= max_tokens for t in texts]


def save_emissions(records, path: str | Path) -> None:
    """One JSON record per sentence: report_id, index, 5 scores (O S B I E)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for report_id, index, scores in records:
            fh.write(json.dumps({
                "report_id": report_id, "index": index,
                "scores": [float(s) for s in scores],
            }) + "\n")
