import pytest

from initspan.features import FeatureConfig, extract, extract_report
from initspan.preprocess import tokenize

TEXTS = [
    "We set new emission targets.",
    "The program launched in March.",
    "Savings doubled within a year.",
]


def test_window_zero_depends_only_on_target():
    cfg = FeatureConfig(window=0, hash_dim=1 << 14)
    base = extract(TEXTS, 1, cfg)
    changed = extract(["completely different text here"] + TEXTS[1:], 1, cfg)
    assert base == changed


def test_first_sentence_has_no_left_context():
    cfg = FeatureConfig(window=1, hash_dim=1 << 14)
    # total mass = bias + length bucket + offset 0 and +1 tokens only
    vec = extract(TEXTS, 0, cfg)
    expected = 2 + len(tokenize(TEXTS[0])) + len(tokenize(TEXTS[1]))
    assert sum(vec.values()) == pytest.approx(expected)
    # sentences beyond the window never contribute
    assert extract(TEXTS[:2], 0, cfg) == extract(TEXTS[:3], 0, cfg)


def test_same_sentence_different_offsets_differ():
    cfg = FeatureConfig(window=1, hash_dim=1 << 14)
    mirror = ["echo echo echo alpha", "target sentence core", "echo echo echo alpha"]
    vec = extract(mirror, 1, cfg)
    left_only = extract(mirror[:2], 1, cfg)
    right_only = extract(mirror[1:], 0, cfg)
    # the shared neighbour contributes through different ids per side
    left_ids = set(left_only) - set(extract([mirror[1]], 0, cfg))
    right_ids = set(right_only) - set(extract([mirror[1]], 0, cfg))
    assert left_ids and right_ids and left_ids.isdisjoint(right_ids)
    assert set(vec) == set(left_only) | set(right_only)


def test_determinism_across_calls():
    cfg = FeatureConfig()
    assert extract(TEXTS, 1, cfg) == extract(list(TEXTS), 1, cfg)


def test_locality():
    cfg = FeatureConfig(window=1, hash_dim=1 << 14)
    texts = ["s zero words here", "s one words here", "s two words here",
             "s three words here", "s four words here"]
    changed = texts.copy()
    changed[4] = "entirely new content now"
    for i in range(5):
        same = extract(texts, i, cfg) == extract(changed, i, cfg)
        assert same == (abs(i - 4) > cfg.window)


def test_ids_bounded_and_values_accumulate():
    cfg = FeatureConfig(window=1, hash_dim=64)  # force collisions
    vec = extract(TEXTS, 1, cfg)
    assert all(0 <= fid < 64 for fid in vec)
    assert sum(vec.values()) == pytest.approx(
        2 + sum(len(tokenize(t)) for t in TEXTS))


def test_lowercase_toggle():
    cfg_fold = FeatureConfig(lowercase=True)
    cfg_keep = FeatureConfig(lowercase=False)
    a = extract(["The the THE"], 0, cfg_fold)
    b = extract(["The the THE"], 0, cfg_keep)
    assert max(a.values()) == 3.0  # all three fold together
    assert max(b.values()) < 3.0


def test_config_validation():
    with pytest.raises(ValueError):
        FeatureConfig(window=-1)
    with pytest.raises(ValueError):
        FeatureConfig(hash_dim=1000)  # not a power of two
    with pytest.raises(IndexError):
        extract(TEXTS, 3, FeatureConfig())


def test_extract_report_matches_pointwise():
    cfg = FeatureConfig()
    assert extract_report(TEXTS, cfg) == [extract(TEXTS, i, cfg) for i in range(3)]
