"""Synthetic corpora with planted lexical cues, used across the test suite.

The cue words decide the label exactly, so a unigram model with a small
context window can separate the classes; accuracy/F1 floors in the tests
measure the learner, not the generator.
"""

import numpy as np

from initspan.corpus import Corpus, Sentence, corpus_from_sentences

FILLERS = (
    "the company report describes progress targets emissions water supply "
    "chain employees community market volume results policy board annual "
    "review region group business customers"
).split()

CUE_SINGLETON = "launched"
CUE_BEGIN = "began"
CUE_INSIDE = "ongoing"
CUE_END = "finished"


def _filler_sentence(rng, n_lo=6, n_hi=10):
    n = int(rng.integers(n_lo, n_hi + 1))
    return " ".join(rng.choice(FILLERS, size=n))


def _with_cue(rng, cue):
    words = _filler_sentence(rng).split()
    pos = int(rng.integers(0, len(words) + 1))
    words.insert(pos, cue)
    return " ".join(words)


def launched_corpus(n_sentences, seed, report_len=50, p_cue=0.15) -> Corpus:
    """Independent sentences: contains 'launched' => singleton initiative."""
    rng = np.random.default_rng(seed)
    records = []
    counter = 0
    for start in range(0, n_sentences, report_len):
        rid = f"R{start // report_len:03d}"
        for idx in range(min(report_len, n_sentences - start)):
            if rng.random() < p_cue:
                counter += 1
                records.append(Sentence(rid, idx, _with_cue(rng, CUE_SINGLETON),
                                        initiative_id=f"init{counter:05d}"))
            else:
                records.append(Sentence(rid, idx, _filler_sentence(rng)))
    return corpus_from_sentences(records)


def span_corpus(n_sentences, seed, report_len=50, p_start=0.12,
                max_len=4) -> Corpus:
    """Initiatives of length 1..max_len marked by per-role cue words.

    Spans never touch, so both the IOBES and the binary round trips hold
    on the gold side.
    """
    rng = np.random.default_rng(seed)
    records = []
    counter = 0
    remaining = n_sentences
    for rnum in range(0, -(-n_sentences // report_len)):
        rid = f"R{rnum:03d}"
        length = min(report_len, remaining)
        remaining -= length
        idx = 0
        while idx < length:
            span_len = int(rng.integers(1, max_len + 1))
            if rng.random() < p_start and idx + span_len < length:
                counter += 1
                iid = f"init{counter:05d}"
                if span_len == 1:
                    records.append(Sentence(rid, idx, _with_cue(rng, CUE_SINGLETON), iid))
                else:
                    records.append(Sentence(rid, idx, _with_cue(rng, CUE_BEGIN), iid))
                    for k in range(1, span_len - 1):
                        records.append(Sentence(rid, idx + k,
                                                _with_cue(rng, CUE_INSIDE), iid))
                    records.append(Sentence(rid, idx + span_len - 1,
                                            _with_cue(rng, CUE_END), iid))
                idx += span_len
                # always leave a gap sentence after an initiative
                records.append(Sentence(rid, idx, _filler_sentence(rng)))
                idx += 1
            else:
                records.append(Sentence(rid, idx, _filler_sentence(rng)))
                idx += 1
    return corpus_from_sentences(records)


def random_span_bounds(rng, report_length, max_len=5, adjacent_ok=True):
    """Random valid (start, end) list: lengths 1..max_len, non-overlapping."""
    bounds = []
    pos = 0
    while pos < report_length:
        if rng.random() < 0.4:
            length = int(rng.integers(1, max_len + 1))
            if pos + length <= report_length:
                bounds.append((pos, pos + length - 1))
                pos += length
                if not adjacent_ok:
                    pos += 1
                continue
        pos += 1
    return bounds
