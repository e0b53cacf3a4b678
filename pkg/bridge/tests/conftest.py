import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

from initspan_bridge.config import LABEL_TO_ID

WORDS = (
    "the company launched a new solar program this year we began rolling out "
    "recycling across sites teams kept the effort ongoing and finished with "
    "certification results improved again water use fell by half staff took "
    "part in training short text"
).split()


@pytest.fixture(scope="session")
def tiny_encoder(tmp_path_factory):
    """A from-scratch word-level tokenizer + 2-layer BERT saved to disk."""
    out = tmp_path_factory.mktemp("encoder") / "tiny"
    vocab = {tok: i for i, tok in enumerate(
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(set(WORDS)))}
    backend = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    backend.pre_tokenizer = pre_tokenizers.Whitespace()
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=backend, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]",
        model_max_length=128)
    torch.manual_seed(7)
    encoder = BertModel(BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64,
        max_position_embeddings=128))
    encoder.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return str(out)


# 50 sentences: two ineligible (too short), the rest 5+ tokens; initiative
# spans at 5 (S), 10-12 (BIE) and 20-23 (BIIE)
def _toy_sentences():
    base = "the company results improved again this year"
    sents = [f"{base} {WORDS[i % len(WORDS)]}" for i in range(50)]
    sents[5] = "we launched a new solar program"
    sents[10] = "we began rolling out recycling"
    sents[11] = "teams kept the effort ongoing"
    sents[12] = "the effort finished with certification"
    sents[20] = "we began rolling out training"
    sents[21] = "staff took part in training"
    sents[22] = "the training kept teams ongoing"
    sents[23] = "the training finished with certification"
    sents[30] = "short text"          # 2 tokens: ineligible
    sents[40] = "results improved"    # 2 tokens: ineligible
    return sents


def _toy_labels():
    labels = ["O"] * 50
    labels[5] = "S"
    labels[10], labels[11], labels[12] = "B", "I", "E"
    labels[20], labels[21], labels[22], labels[23] = "B", "I", "I", "E"
    return labels


@pytest.fixture(scope="session")
def toy_reports():
    return {"toy": _toy_sentences()}


@pytest.fixture(scope="session")
def toy_labels():
    return {"toy": [LABEL_TO_ID[lab] for lab in _toy_labels()]}


@pytest.fixture(scope="session")
def toy_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("toyfiles")
    corpus = d / "corpus.jsonl"
    labels = d / "labels.jsonl"
    with corpus.open("w") as fh:
        for idx, text in enumerate(_toy_sentences()):
            fh.write(json.dumps({"report_id": "toy", "index": idx, "text": text,
                                 "initiative_id": None}) + "\n")
    with labels.open("w") as fh:
        for idx, lab in enumerate(_toy_labels()):
            fh.write(json.dumps({"report_id": "toy", "index": idx,
                                 "label": lab}) + "\n")
    return corpus, labels
