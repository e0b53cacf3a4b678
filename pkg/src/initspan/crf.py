"""Linear-chain CRF over sentence labels.

A model scores a label path y for a report of T sentences as

    start_scores[y0] + sum_t e[t, y_t] + sum_{t>=1} transitions[y_{t-1}, y_t]
    + end_scores[y_{T-1}]

where the emission table e comes either from hashed sentence features
(weights matrix, feature mode) or from an external per-sentence score file
(external mode, e.g. encoder logits). The two modes are mutually exclusive
per model instance.

Training maximizes the L2-regularized per-sentence mean log-likelihood by
mini-batch gradient ascent; expected counts come from forward-backward.
The regularizer covers the full parameter vector (feature weights,
transitions, start/end scores) so the objective and its gradient are
finite-difference checkable coordinate by coordinate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .corpus import Corpus
from .errors import NumericalError, ParseError
from .features import FeatureConfig, FeatureVector, extract_report
from .labels import LabelSeq, LabelSet, label_set

BIG_SCORE = 1e6  # emission boost used to force masked sentences to O/0

EmissionTable = np.ndarray  # (T, L) float64, log-potential space


@dataclass
class CrfTrainConfig:
    learning_rate: float = 0.1
    l2_lambda: float = 1e-2
    max_epochs: int = 50
    patience: int = 5
    seed: int = 0
    batch_size: int = 8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be non-negative")
        if self.patience < 1:
            raise ValueError("patience must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


class CrfModel:
    """Parameters plus the label alphabet; feature mode iff weights is set."""

    def __init__(self, labels: LabelSet,
                 transitions: np.ndarray | None = None,
                 start_scores: np.ndarray | None = None,
                 end_scores: np.ndarray | None = None,
                 weights: np.ndarray | None = None,
                 feature_config: FeatureConfig | None = None):
        L = len(labels)
        self.labels = labels
        self.transitions = np.zeros((L, L)) if transitions is None else np.asarray(transitions, dtype=np.float64)
        self.start_scores = np.zeros(L) if start_scores is None else np.asarray(start_scores, dtype=np.float64)
        self.end_scores = np.zeros(L) if end_scores is None else np.asarray(end_scores, dtype=np.float64)
        self.weights = None if weights is None else np.asarray(weights, dtype=np.float64)
        self.feature_config = feature_config
        if (self.weights is None) != (feature_config is None):
            raise ValueError("weights and feature_config must be set together")
        if self.transitions.shape != (L, L) or self.start_scores.shape != (L,) \
                or self.end_scores.shape != (L,):
            raise ValueError("parameter shapes inconsistent with label set")
        if self.weights is not None and self.weights.shape != (feature_config.hash_dim, L):
            raise ValueError("weights shape inconsistent with feature config")
        self.history: list[dict] = []  # per-epoch training log, not serialized

    @classmethod
    def for_features(cls, labels: LabelSet, cfg: FeatureConfig) -> "CrfModel":
        return cls(labels, weights=np.zeros((cfg.hash_dim, len(labels))),
                   feature_config=cfg)

    @property
    def is_feature_mode(self) -> bool:
        return self.weights is not None

    def params_finite(self) -> bool:
        blocks = [self.transitions, self.start_scores, self.end_scores]
        if self.weights is not None:
            blocks.append(self.weights)
        return all(np.isfinite(b).all() for b in blocks)

    def copy_params(self) -> dict:
        return {
            "transitions": self.transitions.copy(),
            "start_scores": self.start_scores.copy(),
            "end_scores": self.end_scores.copy(),
            "weights": None if self.weights is None else self.weights.copy(),
        }

    def set_params(self, params: dict) -> None:
        self.transitions = params["transitions"].copy()
        self.start_scores = params["start_scores"].copy()
        self.end_scores = params["end_scores"].copy()
        if params["weights"] is not None:
            self.weights = params["weights"].copy()

    def params_equal(self, other: "CrfModel") -> bool:
        same = (np.array_equal(self.transitions, other.transitions)
                and np.array_equal(self.start_scores, other.start_scores)
                and np.array_equal(self.end_scores, other.end_scores))
        if self.weights is None or other.weights is None:
            return same and self.weights is None and other.weights is None
        return same and np.array_equal(self.weights, other.weights)


@dataclass
class TaggedSequence:
    """One report's worth of training/eval material for the CRF."""

    report_id: str
    gold: np.ndarray  # (T,) int label indices
    features: list[FeatureVector] | None = None
    emissions: np.ndarray | None = None

    def __post_init__(self):
        if (self.features is None) == (self.emissions is None):
            raise ValueError("provide exactly one of features or emissions")


@dataclass
class CrfGradient:
    d_transitions: np.ndarray
    d_start: np.ndarray
    d_end: np.ndarray
    d_weights: np.ndarray | None = None


def emissions_from_features(model: CrfModel,
                            feats: Sequence[FeatureVector]) -> EmissionTable:
    if not model.is_feature_mode:
        raise ValueError("model has no feature weights")
    L = len(model.labels)
    e = np.zeros((len(feats), L))
    for t, vec in enumerate(feats):
        if vec:
            fids = np.fromiter(vec.keys(), dtype=np.int64, count=len(vec))
            vals = np.fromiter(vec.values(), dtype=np.float64, count=len(vec))
            e[t] = vals @ model.weights[fids]
    return e


def _sequence_emissions(model: CrfModel, seq: TaggedSequence) -> EmissionTable:
    if seq.emissions is not None:
        if model.is_feature_mode:
            raise ValueError("feature-mode model given external emissions")
        return seq.emissions
    return emissions_from_features(model, seq.features)


def _check_emissions(emissions: np.ndarray, L: int) -> np.ndarray:
    emissions = np.ascontiguousarray(emissions, dtype=np.float64)
    if emissions.ndim != 2 or emissions.shape[1] != L:
        raise ValueError(f"emissions must have shape (T, {L})")
    if emissions.shape[0] == 0:
        raise ValueError("empty sequence")
    if not np.isfinite(emissions).all():
        raise NumericalError("emissions contain non-finite values")
    return emissions


def log_partition(emissions: EmissionTable, model: CrfModel) -> float:
    """log sum over all label paths of exp(path score), via the forward pass."""
    emissions = _check_emissions(emissions, len(model.labels))
    return kernels.log_partition(emissions, model.transitions,
                                 model.start_scores, model.end_scores)


def path_score(emissions: EmissionTable, y: np.ndarray, model: CrfModel) -> float:
    score = model.start_scores[y[0]] + model.end_scores[y[-1]]
    score += emissions[np.arange(len(y)), y].sum()
    if len(y) > 1:
        score += model.transitions[y[:-1], y[1:]].sum()
    return float(score)


def sequence_log_likelihood(emissions: EmissionTable, gold: LabelSeq | np.ndarray,
                            model: CrfModel) -> float:
    """Gold path score minus log partition; <= 0 up to floating error."""
    emissions = _check_emissions(emissions, len(model.labels))
    y = np.asarray(gold.indices() if isinstance(gold, LabelSeq) else gold, dtype=np.int64)
    if len(y) != emissions.shape[0]:
        raise ValueError(f"gold length {len(y)} != sequence length {emissions.shape[0]}")
    return path_score(emissions, y, model) - log_partition(emissions, model)


def viterbi_decode(emissions: EmissionTable, model: CrfModel,
                   report_id: str = "") -> LabelSeq:
    """Maximum-score label path; ties go to the lowest canonical label index."""
    emissions = _check_emissions(emissions, len(model.labels))
    _, path = kernels.viterbi(emissions, model.transitions,
                              model.start_scores, model.end_scores)
    return LabelSeq(report_id, [model.labels.label(i) for i in path], model.labels)


def viterbi_path(emissions: EmissionTable, model: CrfModel) -> tuple[float, np.ndarray]:
    emissions = _check_emissions(emissions, len(model.labels))
    return kernels.viterbi(emissions, model.transitions,
                           model.start_scores, model.end_scores)


def posterior_marginals(emissions: EmissionTable, model: CrfModel) -> np.ndarray:
    """Per-position label posteriors from forward-backward; rows sum to 1."""
    emissions = _check_emissions(emissions, len(model.labels))
    _, unary, _ = kernels.forward_backward(emissions, model.transitions,
                                           model.start_scores, model.end_scores)
    return unary


def gradient(batch: Sequence[TaggedSequence], model: CrfModel,
             l2_lambda: float = 0.0) -> CrfGradient:
    """Gradient of mean log-likelihood minus l2_lambda * parameters.

    The mean is per sentence (total log-likelihood over total positions),
    keeping step sizes comparable across report lengths. Empirical minus
    expected counts; expectations via forward-backward.
    """
    if not batch:
        raise ValueError("empty batch")
    L = len(model.labels)
    d_trans = np.zeros((L, L))
    d_start = np.zeros(L)
    d_end = np.zeros(L)
    d_weights = np.zeros_like(model.weights) if model.is_feature_mode else None

    for seq in batch:
        e = _check_emissions(_sequence_emissions(model, seq), L)
        y = seq.gold
        if len(y) != e.shape[0]:
            raise ValueError("gold length mismatch")
        _, unary, pair = kernels.forward_backward(
            e, model.transitions, model.start_scores, model.end_scores)
        d_start[y[0]] += 1.0
        d_start -= unary[0]
        d_end[y[-1]] += 1.0
        d_end -= unary[-1]
        np.add.at(d_trans, (y[:-1], y[1:]), 1.0)
        d_trans -= pair
        if d_weights is not None:
            diff = -unary
            diff[np.arange(len(y)), y] += 1.0
            for t, vec in enumerate(seq.features):
                if vec:
                    fids = np.fromiter(vec.keys(), dtype=np.int64, count=len(vec))
                    vals = np.fromiter(vec.values(), dtype=np.float64, count=len(vec))
                    np.add.at(d_weights, fids, vals[:, None] * diff[t][None, :])

    n = sum(len(seq.gold) for seq in batch)
    d_trans /= n
    d_start /= n
    d_end /= n
    if l2_lambda:
        d_trans -= l2_lambda * model.transitions
        d_start -= l2_lambda * model.start_scores
        d_end -= l2_lambda * model.end_scores
    if d_weights is not None:
        d_weights /= n
        if l2_lambda:
            d_weights -= l2_lambda * model.weights
    return CrfGradient(d_trans, d_start, d_end, d_weights)


def objective(batch: Sequence[TaggedSequence], model: CrfModel,
              l2_lambda: float = 0.0) -> float:
    """Per-sentence mean log-likelihood minus (l2/2) * squared parameter norm.

    This is exactly the function `gradient` differentiates.
    """
    total = 0.0
    for seq in batch:
        e = _sequence_emissions(model, seq)
        total += sequence_log_likelihood(e, seq.gold, model)
    value = total / sum(len(seq.gold) for seq in batch)
    if l2_lambda:
        sq = (np.sum(model.transitions ** 2) + np.sum(model.start_scores ** 2)
              + np.sum(model.end_scores ** 2))
        if model.weights is not None:
            sq += np.sum(model.weights ** 2)
        value -= 0.5 * l2_lambda * sq
    return value


def mean_log_likelihood(seqs: Sequence[TaggedSequence], model: CrfModel) -> float:
    return objective(seqs, model, l2_lambda=0.0)


def train(train_seqs: Sequence[TaggedSequence], cfg: CrfTrainConfig,
          labels: LabelSet, feature_config: FeatureConfig | None = None,
          dev_seqs: Sequence[TaggedSequence] | None = None) -> CrfModel:
    """Regularized maximum likelihood by mini-batch gradient ascent.

    Deterministic given (data, cfg, seed): batch order comes from a seeded
    generator and reductions run in a fixed order. With a dev set, stops
    after `patience` epochs without improvement in dev log-likelihood and
    returns the best-dev parameters.
    """
    if not train_seqs:
        raise ValueError("no training sequences")
    if feature_config is not None:
        model = CrfModel.for_features(labels, feature_config)
    else:
        model = CrfModel(labels)
    rng = np.random.default_rng(cfg.seed)
    n = len(train_seqs)
    best_ll = -math.inf
    best_params = model.copy_params()
    epochs_since_best = 0

    for epoch in range(cfg.max_epochs):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = [train_seqs[i] for i in order[lo:lo + cfg.batch_size]]
            g = gradient(batch, model, l2_lambda=cfg.l2_lambda)
            model.transitions += cfg.learning_rate * g.d_transitions
            model.start_scores += cfg.learning_rate * g.d_start
            model.end_scores += cfg.learning_rate * g.d_end
            if g.d_weights is not None:
                model.weights += cfg.learning_rate * g.d_weights
        if not model.params_finite():
            raise NumericalError(
                f"non-finite parameters after epoch {epoch}; reduce learning_rate")
        train_ll = mean_log_likelihood(train_seqs, model)
        if not math.isfinite(train_ll):
            raise NumericalError(f"non-finite training log-likelihood after epoch {epoch}")
        entry = {"epoch": epoch, "train_ll": train_ll}
        if dev_seqs:
            dev_ll = mean_log_likelihood(dev_seqs, model)
            entry["dev_ll"] = dev_ll
            if dev_ll > best_ll:
                best_ll = dev_ll
                best_params = model.copy_params()
                epochs_since_best = 0
            else:
                epochs_since_best += 1
        model.history.append(entry)
        if dev_seqs and epochs_since_best >= cfg.patience:
            break

    if dev_seqs:
        model.set_params(best_params)
    return model


def predict(corpus: Corpus, model: CrfModel,
            mask: dict[str, list[bool]] | None = None,
            mode: LabelSet | str | None = None) -> dict[str, LabelSeq]:
    """Viterbi decode every report; masked-out sentences are forced to O/0.

    Forcing works by boosting the emission of the canonical first label
    (O for IOBES, 0 for binary) far above any learned score. When `mode`
    is given it must name the model's label set.
    """
    if mode is not None:
        wanted = label_set(mode) if isinstance(mode, str) else mode
        if wanted != model.labels:
            raise ValueError(
                f"mode {wanted.variant} does not match model label set "
                f"{model.labels.variant}")
    if not model.is_feature_mode:
        raise ValueError("predict requires a feature-mode model; use decode for emissions")
    out: dict[str, LabelSeq] = {}
    for report_id, sents in corpus.reports.items():
        if not sents:
            continue
        texts = [s.text for s in sents]
        feats = extract_report(texts, model.feature_config)
        e = emissions_from_features(model, feats)
        if mask is not None:
            for t, ok in enumerate(mask[report_id]):
                if not ok:
                    e[t, 0] = BIG_SCORE
        out[report_id] = viterbi_decode(e, model, report_id=report_id)
    return out


def decode_emission_runs(records: dict[str, list[tuple[int, np.ndarray]]],
                         model: CrfModel) -> list[tuple[str, int, str]]:
    """Decode externally produced emissions that may skip (ineligible) sentences.

    Records per report are split into maximal consecutive-index runs and
    each run is decoded as its own chain. Returns (report_id, index, label)
    triples for exactly the indices present.
    """
    out = []
    for report_id, recs in records.items():
        recs = sorted(recs, key=lambda r: r[0])
        run: list[tuple[int, np.ndarray]] = []
        for idx, scores in recs:
            if run and idx != run[-1][0] + 1:
                out.extend(_decode_run(report_id, run, model))
                run = []
            run.append((idx, scores))
        if run:
            out.extend(_decode_run(report_id, run, model))
    return out


def _decode_run(report_id, run, model):
    e = np.vstack([scores for _, scores in run])
    seq = viterbi_decode(e, model, report_id=report_id)
    return [(report_id, idx, lab) for (idx, _), lab in zip(run, seq.labels)]


# ---------------------------------------------------------------------------
# Serialization

MODEL_FORMAT = "initspan.crf"
MODEL_VERSION = 1


def save_model(model: CrfModel, path: str | Path) -> None:
    obj = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "label_set": model.labels.variant,
        "transitions": model.transitions.tolist(),
        "start_scores": model.start_scores.tolist(),
        "end_scores": model.end_scores.tolist(),
        "feature_config": None if model.feature_config is None
        else model.feature_config.as_dict(),
        "weights": None if model.weights is None else {
            "entries": [[int(fid), int(lab), float(model.weights[fid, lab])]
                        for fid, lab in zip(*np.nonzero(model.weights))],
        },
    }
    Path(path).write_text(json.dumps(obj), encoding="utf-8")


def load_model(path: str | Path) -> CrfModel:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model file: {exc.msg}", path=path) from None
    if obj.get("format") != MODEL_FORMAT:
        raise ParseError("not a CRF model file", path=path)
    if obj.get("version") != MODEL_VERSION:
        raise ParseError(f"unsupported model version {obj.get('version')}", path=path)
    labels = label_set(obj["label_set"])
    weights = None
    fcfg = None
    if obj.get("feature_config") is not None:
        fcfg = FeatureConfig.from_dict(obj["feature_config"])
        weights = np.zeros((fcfg.hash_dim, len(labels)))
        for fid, lab, val in obj["weights"]["entries"]:
            weights[fid, lab] = val
    model = CrfModel(
        labels,
        transitions=np.array(obj["transitions"], dtype=np.float64),
        start_scores=np.array(obj["start_scores"], dtype=np.float64),
        end_scores=np.array(obj["end_scores"], dtype=np.float64),
        weights=weights,
        feature_config=fcfg,
    )
    if not model.params_finite():
        raise ParseError("model parameters must be finite", path=path)
    return model


def save_emissions(records: Sequence[tuple[str, int, np.ndarray]],
                   path: str | Path) -> None:
    """One record per sentence: report_id, index, scores in canonical label order."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for report_id, index, scores in records:
            fh.write(json.dumps({
                "report_id": report_id, "index": index,
                "scores": [float(s) for s in scores],
            }) + "\n")


def load_emissions(path: str | Path, n_labels: int
                   ) -> dict[str, list[tuple[int, np.ndarray]]]:
    path = Path(path)
    out: dict[str, list[tuple[int, np.ndarray]]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                report_id = obj["report_id"]
                index = obj["index"]
                scores = obj["scores"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ParseError("malformed emission record", line_no, path) from None
            if not isinstance(index, int) or index < 0:
                raise ParseError("index must be a non-negative integer", line_no, path)
            if len(scores) != n_labels:
                raise ParseError(
                    f"expected {n_labels} scores, got {len(scores)}", line_no, path)
            arr = np.asarray(scores, dtype=np.float64)
            if not np.isfinite(arr).all():
                raise ParseError("scores must be finite", line_no, path)
            out.setdefault(report_id, []).append((index, arr))
    return out
