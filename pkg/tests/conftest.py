import json

import pytest

from initspan.corpus import Corpus, Sentence, corpus_from_sentences

# The seven-sentence reference report: a singleton initiative at index 1
# followed by a four-sentence one at indices 2-5.
ANNOTATED_RECORDS = [
    ("NRG2015", 0, "Overview of the year.", None),
    ("NRG2015", 1, "We funded a community solar project.", "SOLAR01"),
    ("NRG2015", 2, "We began refitting the plant.", "REFIT02"),
    ("NRG2015", 3, "The refit reduced water use.", "REFIT02"),
    ("NRG2015", 4, "It also cut emissions.", "REFIT02"),
    ("NRG2015", 5, "The refit finished in December.", "REFIT02"),
    ("NRG2015", 6, "Outlook for next year.", None),
]


@pytest.fixture
def annotated_corpus() -> Corpus:
    return corpus_from_sentences(
        Sentence(rid, idx, text, iid) for rid, idx, text, iid in ANNOTATED_RECORDS
    )


@pytest.fixture
def annotated_corpus_file(tmp_path):
    path = tmp_path / "annotated.jsonl"
    with path.open("w") as fh:
        for rid, idx, text, iid in ANNOTATED_RECORDS:
            fh.write(json.dumps({
                "report_id": rid, "index": idx, "text": text, "initiative_id": iid,
            }) + "\n")
    return path
