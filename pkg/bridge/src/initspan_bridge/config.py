"""Fine-tuning configuration for the separator-head encoder."""

from __future__ import annotations

from dataclasses import dataclass

# canonical label order shared with the CRF decoder's emissions contract
LABELS = ("O", "S", "B", "I", "E")
LABEL_TO_ID = {lab: i for i, lab in enumerate(LABELS)}


@dataclass
class BridgeConfig:
    encoder: str
    window: int = 1
    batch_size: int = 16
    learning_rate: float = 1e-5
    warmup_fraction: float = 0.06
    max_epochs: int = 10
    patience: int = 5
    f1_deterioration_stop: float = 3.0  # percentage points on is-initiative F1
    relative_deterioration: bool = False  # interpret the stop as a relative drop
    dropout: float = 0.1
    min_tokens: int = 5
    max_tokens: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be >= 0")
        for field in ("batch_size", "learning_rate", "max_epochs", "patience",
                      "f1_deterioration_stop"):
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be positive")
        if not 0 <= self.warmup_fraction < 1:
            raise ValueError("warmup_fraction must be in [0, 1)")
