"""Multi-sentence encoder inputs with per-sentence separator heads.

A window around a target sentence is encoded as

    [CLS] [SEP] s_1 ... [SEP] s_k [SEP]

every sentence is led by its own separator token and one terminal
separator closes the sequence. The leading separators are the
classification heads: head i predicts the label of sentence i. At
inference only the target sentence's head is read; during training all
heads contribute to the loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass
class WindowInput:
    sentences: list[str]
    target: int  # position of the target sentence within `sentences`
    indices: list[int]  # report-level sentence indices, parallel to sentences


def build_window_input(texts: Sequence[str], index: int, window: int) -> WindowInput:
    """The 2*window+1 sentences around `index`, truncated at report edges."""
    if not 0 <= index < len(texts):
        raise IndexError(f"sentence index {index} out of range")
    lo = max(0, index - window)
    hi = min(len(texts), index + window + 1)
    return WindowInput(
        sentences=[texts[i] for i in range(lo, hi)],
        target=index - lo,
        indices=list(range(lo, hi)),
    )


@dataclass
class EncodedWindow:
    input_ids: list[int]
    head_positions: list[int]  # token position of each sentence-leading separator
    target: int  # which head belongs to the target sentence


def encode_window(tokenizer, win: WindowInput, max_length: int = 512) -> EncodedWindow:
    """Token ids for a window plus the position of every sentence head."""
    k = len(win.sentences)
    # reserve CLS + k leading separators + terminal separator
    budget = max(1, (max_length - k - 2) // k)
    ids = [tokenizer.cls_token_id]
    head_positions = []
    for sent in win.sentences:
        head_positions.append(len(ids))
        ids.append(tokenizer.sep_token_id)
        ids.extend(tokenizer(sent, add_special_tokens=False)["input_ids"][:budget])
    ids.append(tokenizer.sep_token_id)
    return EncodedWindow(ids, head_positions, win.target)
