import json

import pytest

from initspan.aggregate import aggregate_binary, aggregate_iobes, span_bounds
from initspan.corpus import (
    InitiativeSpan,
    Sentence,
    compute_stats,
    corpus_from_sentences,
    extract_spans,
    load_corpus,
    load_manifest,
    save_corpus,
)
from initspan.errors import IntegrityError, ParseError
from initspan.labels import derive_binary, derive_iobes

import synth


def test_load_annotated_corpus(annotated_corpus_file):
    corpus = load_corpus(annotated_corpus_file)
    assert len(corpus.reports) == 1
    assert len(corpus) == 7
    stats = compute_stats(corpus)
    assert stats.n_initiatives == 2


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    corpus = load_corpus(path)
    assert len(corpus.reports) == 0
    assert len(corpus) == 0


def test_load_rejects_gapped_initiative(tmp_path):
    # REFIT02 tags indices 2, 3 and 5 but not 4
    path = tmp_path / "gap.jsonl"
    with path.open("w") as fh:
        for idx in range(7):
            iid = "REFIT02" if idx in (2, 3, 5) else None
            fh.write(json.dumps({"report_id": "r", "index": idx,
                                 "text": "five token long sentence here",
                                 "initiative_id": iid}) + "\n")
    with pytest.raises(IntegrityError, match="REFIT02"):
        load_corpus(path)


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"report_id": "r", "index": 0, "text": "ok"}\nnot json\n')
    with pytest.raises(ParseError, match="2"):
        load_corpus(path)


@pytest.mark.parametrize("record,msg", [
    ({"index": 0, "text": "x"}, "report_id"),
    ({"report_id": "r", "text": "x"}, "index"),
    ({"report_id": "r", "index": -1, "text": "x"}, "non-negative"),
    ({"report_id": "r", "index": 0}, "text"),
    ({"report_id": "r", "index": 0, "text": "x", "initiative_id": 5}, "initiative_id"),
])
def test_load_rejects_malformed_record(tmp_path, record, msg):
    path = tmp_path / "rec.jsonl"
    path.write_text(json.dumps(record) + "\n")
    with pytest.raises(ParseError, match=msg):
        load_corpus(path)


def test_load_rejects_nondense_indices(tmp_path):
    path = tmp_path / "dense.jsonl"
    with path.open("w") as fh:
        fh.write(json.dumps({"report_id": "r", "index": 0, "text": "a"}) + "\n")
        fh.write(json.dumps({"report_id": "r", "index": 2, "text": "b"}) + "\n")
    with pytest.raises(IntegrityError, match="expected sentence index 1"):
        load_corpus(path)


def test_initiative_unique_across_reports():
    with pytest.raises(IntegrityError, match="appears in reports"):
        corpus_from_sentences([
            Sentence("a", 0, "x", "shared"),
            Sentence("b", 0, "y", "shared"),
        ])


def test_extract_spans_annotated_corpus(annotated_corpus):
    spans = extract_spans(annotated_corpus)["NRG2015"]
    assert [(sp.initiative_id, sp.start, sp.end) for sp in spans] == [
        ("SOLAR01", 1, 1),
        ("REFIT02", 2, 5),
    ]


def test_extract_spans_empty():
    corpus = corpus_from_sentences([Sentence("r", i, "t") for i in range(3)])
    assert extract_spans(corpus) == {"r": []}


def test_extract_spans_adjacent_singletons():
    sents = [Sentence("r", i, "t") for i in range(8)]
    for i, iid in [(4, "a"), (5, "b"), (6, "c")]:
        sents[i] = Sentence("r", i, "t", iid)
    spans = extract_spans(corpus_from_sentences(sents))["r"]
    assert [(sp.start, sp.end) for sp in spans] == [(4, 4), (5, 5), (6, 6)]
    assert [sp.initiative_id for sp in spans] == ["a", "b", "c"]


def test_extract_spans_sorted_nonoverlapping_covering():
    rng_corpus = synth.span_corpus(400, seed=11)
    for rid, spans in extract_spans(rng_corpus).items():
        sents = rng_corpus.reports[rid]
        covered = set()
        prev_end = -1
        for sp in spans:
            assert sp.start > prev_end
            prev_end = sp.end
            covered.update(range(sp.start, sp.end + 1))
        annotated = {s.index for s in sents if s.initiative_id is not None}
        assert covered == annotated


def test_stats_biie():
    sents = [Sentence("r", i, "t") for i in range(100)]
    for i in range(10, 14):
        sents[i] = Sentence("r", i, "t", "one")
    stats = compute_stats(corpus_from_sentences(sents))
    assert stats.n_initiatives == 1
    assert stats.pct_sentences_in_initiatives == pytest.approx(4.0)


def test_stats_annotated_corpus(annotated_corpus):
    stats = compute_stats(annotated_corpus)
    assert stats.n_sentences == 7
    assert stats.n_initiatives == 2
    assert stats.pct_sentences_in_initiatives == pytest.approx(100 * 5 / 7, abs=1e-9)


def test_stats_empty_corpus():
    stats = compute_stats(corpus_from_sentences([]))
    assert (stats.n_reports, stats.n_sentences, stats.n_initiatives) == (0, 0, 0)
    assert stats.pct_sentences_in_initiatives == 0.0
    assert stats.empty_warning


def test_span_validation():
    with pytest.raises(IntegrityError):
        InitiativeSpan("r", "x", 3, 2)


def test_corpus_round_trip_io(annotated_corpus, tmp_path):
    path = tmp_path / "copy.jsonl"
    save_corpus(annotated_corpus, path)
    again = load_corpus(path)
    assert extract_spans(again) == extract_spans(annotated_corpus)


def test_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"a.jsonl": "train", "b.jsonl": "dev"}))
    assert load_manifest(path) == {"a.jsonl": "train", "b.jsonl": "dev"}
    path.write_text(json.dumps({"a.jsonl": "validation"}))
    with pytest.raises(ParseError):
        load_manifest(path)


def test_label_round_trip_reproduces_extract_spans():
    # derive -> aggregate inverts extraction for spans of length <= 5
    import numpy as np

    rng = np.random.default_rng(7)
    for trial in range(30):
        n = int(rng.integers(1, 40))
        bounds = synth.random_span_bounds(rng, n, max_len=5)
        sents = [Sentence("r", i, "t") for i in range(n)]
        for k, (s, e) in enumerate(bounds):
            for i in range(s, e + 1):
                sents[i] = Sentence("r", i, "t", f"i{k}")
        corpus = corpus_from_sentences(sents)
        spans = extract_spans(corpus)["r"]
        assert span_bounds(aggregate_iobes(derive_iobes(spans, n, "r"))) == bounds
        no_adjacent = all(b[0] - a[1] > 1 for a, b in zip(bounds, bounds[1:]))
        if no_adjacent:
            assert span_bounds(aggregate_binary(derive_binary(spans, n, "r"))) == bounds
