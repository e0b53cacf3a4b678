"""Write per-sentence emission scores for the CRF decoder.

One record per eligible sentence, scores taken from the target sentence's
separator head only — context heads are trained but never emitted.
"""

from __future__ import annotations

from pathlib import Path

import torch

from .data import eligible_mask, save_emissions
from .windows import build_window_input, encode_window


@torch.no_grad()
def emit_scores(reports: dict[str, list[str]], model, tokenizer, window: int,
                out_path: str | Path, min_tokens: int = 5, max_tokens: int = 100,
                batch_size: int = 32, max_length: int = 512) -> int:
    """Returns the number of records written. Removes the file on failure."""
    out_path = Path(out_path)
    model.eval()
    records = []
    try:
        pending = []  # (report_id, index, EncodedWindow)
        for rid, texts in reports.items():
            mask = eligible_mask(texts, min_tokens, max_tokens)
            for idx, ok in enumerate(mask):
                if not ok:
                    continue
                win = build_window_input(texts, idx, window)
                pending.append((rid, idx, encode_window(tokenizer, win, max_length)))
        for lo in range(0, len(pending), batch_size):
            chunk = pending[lo:lo + batch_size]
            records.extend(_forward_chunk(model, tokenizer, chunk))
        save_emissions(records, out_path)
    except Exception:
        out_path.unlink(missing_ok=True)
        raise
    return len(records)


def _forward_chunk(model, tokenizer, chunk):
    pad = tokenizer.pad_token_id
    max_len = max(len(enc.input_ids) for _, _, enc in chunk)
    max_heads = max(len(enc.head_positions) for _, _, enc in chunk)
    input_ids = torch.full((len(chunk), max_len), pad, dtype=torch.long)
    attention = torch.zeros((len(chunk), max_len), dtype=torch.long)
    heads = torch.zeros((len(chunk), max_heads), dtype=torch.long)
    targets = torch.zeros(len(chunk), dtype=torch.long)
    for b, (_, _, enc) in enumerate(chunk):
        input_ids[b, :len(enc.input_ids)] = torch.tensor(enc.input_ids)
        attention[b, :len(enc.input_ids)] = 1
        heads[b, :len(enc.head_positions)] = torch.tensor(enc.head_positions)
        targets[b] = enc.target
    logits = model(input_ids, attention, heads)
    chosen = logits[torch.arange(len(chunk)), targets]
    return [(rid, idx, chosen[b].tolist())
            for b, (rid, idx, _) in enumerate(chunk)]
