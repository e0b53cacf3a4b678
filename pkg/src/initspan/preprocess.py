"""Rule-based sentence filtering ahead of model prediction.

Very short and very long "sentences" (PDF table cells, run-on paragraphs)
are ruled out before the model sees them: anything shorter than
``min_tokens`` or longer than ``max_tokens`` is forced to the
non-initiative label downstream. The boundaries themselves are kept
(exactly ``min_tokens`` or ``max_tokens`` tokens stays eligible).
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .corpus import Corpus

_PUNCT = set(string.punctuation)


@dataclass(frozen=True)
class PreprocessConfig:
    min_tokens: int = 5
    max_tokens: int = 100

    def __post_init__(self):
        if self.min_tokens < 1 or self.max_tokens < 1:
            raise ValueError("token thresholds must be positive")
        if self.min_tokens > self.max_tokens:
            raise ValueError("min_tokens must not exceed max_tokens")


def tokenize(text: str) -> list[str]:
    """Whitespace split, then peel leading/trailing punctuation into own tokens."""
    tokens: list[str] = []
    for chunk in text.split():
        head = []
        tail = []
        i, j = 0, len(chunk)
        while i < j and chunk[i] in _PUNCT:
            head.append(chunk[i])
            i += 1
        while j > i and chunk[j - 1] in _PUNCT:
            tail.append(chunk[j - 1])
            j -= 1
        tokens.extend(head)
        if i < j:
            tokens.append(chunk[i:j])
        tokens.extend(reversed(tail))
    return tokens


def token_count(text: str) -> int:
    return len(tokenize(text))


def is_eligible(text: str, cfg: PreprocessConfig) -> bool:
    n = token_count(text)
    return cfg.min_tokens <= n <= cfg.max_tokens


def filter_mask(corpus: Corpus, cfg: PreprocessConfig) -> dict[str, list[bool]]:
    """Per-report eligibility mask; True means the sentence may be predicted on.

    Ineligible sentences still serve as context text for their neighbours;
    only their own labels are forced to O/0 downstream.
    """
    return {
        report_id: [is_eligible(s.text, cfg) for s in sents]
        for report_id, sents in corpus.reports.items()
    }
