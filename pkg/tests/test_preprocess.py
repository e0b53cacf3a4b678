import pytest

from initspan.corpus import Sentence, corpus_from_sentences
from initspan.preprocess import PreprocessConfig, filter_mask, is_eligible, token_count, tokenize


@pytest.mark.parametrize("text,count", [
    ("We launched a program.", 5),
    ("", 0),
    ("word", 1),
    ("(hello),", 4),
    ("...", 3),
    ("state-of-the-art", 1),  # interior punctuation stays attached
    ("  spaced   out  ", 2),
])
def test_token_count(text, count):
    assert token_count(text) == count


def test_tokenize_order():
    assert tokenize('"Yes," she said.') == ['"', "Yes", ",", '"', "she", "said", "."]


def test_eligibility_boundaries():
    cfg = PreprocessConfig()
    assert not is_eligible("one two three", cfg)  # 3 tokens
    assert is_eligible(" ".join(["tok"] * 50), cfg)
    # thresholds read as strict "shorter than 5" / "longer than 100"
    assert is_eligible(" ".join(["tok"] * 5), cfg)
    assert is_eligible(" ".join(["tok"] * 100), cfg)
    assert not is_eligible(" ".join(["tok"] * 4), cfg)
    assert not is_eligible(" ".join(["tok"] * 101), cfg)


def test_filter_mask():
    corpus = corpus_from_sentences([
        Sentence("r", 0, "short"),
        Sentence("r", 1, " ".join(["tok"] * 10)),
        Sentence("r", 2, " ".join(["tok"] * 101)),
    ])
    assert filter_mask(corpus, PreprocessConfig()) == {"r": [False, True, False]}


def test_widening_is_monotone():
    texts = ["t", " ".join(["x"] * 4), " ".join(["x"] * 5),
             " ".join(["x"] * 100), " ".join(["x"] * 120)]
    narrow = PreprocessConfig(min_tokens=5, max_tokens=100)
    wide = PreprocessConfig(min_tokens=2, max_tokens=150)
    for text in texts:
        if is_eligible(text, narrow):
            assert is_eligible(text, wide)


def test_config_validation():
    with pytest.raises(ValueError):
        PreprocessConfig(min_tokens=10, max_tokens=5)
    with pytest.raises(ValueError):
        PreprocessConfig(min_tokens=0)
