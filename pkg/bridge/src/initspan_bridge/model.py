"""Encoder with a shared classification layer over separator-token states."""

from __future__ import annotations

import json
from pathlib import Path

import torch
from torch import nn
from transformers import AutoModel, AutoTokenizer

from .config import LABELS


class SeparatorHeadClassifier(nn.Module):
    """Shared linear head applied to every sentence-leading separator state."""

    def __init__(self, encoder_name_or_path: str, dropout: float = 0.1):
        super().__init__()
        self.encoder = AutoModel.from_pretrained(encoder_name_or_path)
        hidden = self.encoder.config.hidden_size
        self.dropout = nn.Dropout(dropout)
        self.classifier = nn.Linear(hidden, len(LABELS))

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor,
                head_positions: torch.Tensor) -> torch.Tensor:
        """Logits of shape (batch, max_heads, n_labels).

        `head_positions` is (batch, max_heads), padded with 0; padded
        entries produce garbage logits that callers must mask out.
        """
        states = self.encoder(input_ids=input_ids,
                              attention_mask=attention_mask).last_hidden_state
        gather = head_positions.unsqueeze(-1).expand(-1, -1, states.size(-1))
        head_states = states.gather(1, gather)
        return self.classifier(self.dropout(head_states))


def save_bridge(model: SeparatorHeadClassifier, tokenizer, window: int,
                out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.encoder.save_pretrained(out_dir / "encoder")
    tokenizer.save_pretrained(out_dir / "encoder")
    torch.save(model.classifier.state_dict(), out_dir / "classifier.pt")
    (out_dir / "bridge.json").write_text(json.dumps({
        "format": "initspan.bridge", "version": 1,
        "window": window, "labels": list(LABELS),
        "dropout": float(model.dropout.p),
    }))


def load_bridge(model_dir: str | Path):
    """Returns (model, tokenizer, window)."""
    model_dir = Path(model_dir)
    meta = json.loads((model_dir / "bridge.json").read_text())
    if meta.get("format") != "initspan.bridge":
        raise ValueError(f"{model_dir} is not a bridge model directory")
    if meta.get("labels") != list(LABELS):
        raise ValueError("label order mismatch in saved bridge model")
    model = SeparatorHeadClassifier(str(model_dir / "encoder"),
                                    dropout=meta.get("dropout", 0.1))
    model.classifier.load_state_dict(
        torch.load(model_dir / "classifier.pt", weights_only=True))
    tokenizer = AutoTokenizer.from_pretrained(model_dir / "encoder")
    return model, tokenizer, int(meta["window"])
