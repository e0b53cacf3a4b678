"""Fine-tuning loop: multi-head loss, warmup schedule, twin stop rules."""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
from transformers import AutoTokenizer, get_linear_schedule_with_warmup

from .config import BridgeConfig
from .data import eligible_mask
from .model import SeparatorHeadClassifier
from .windows import EncodedWindow, build_window_input, encode_window

log = logging.getLogger("initspan_bridge")

IGNORE = -100


@dataclass
class Example:
    window: EncodedWindow
    head_labels: list[int]  # one gold label id per sentence head
    report_id: str
    report_index: int  # report-level index of the target sentence


def build_examples(reports: dict[str, list[str]], labels: dict[str, list[int]],
                   tokenizer, cfg: BridgeConfig,
                   max_length: int | None = None) -> list[Example]:
    """One example per eligible target sentence; context sentences ride along."""
    max_length = max_length or tokenizer.model_max_length
    if max_length is None or max_length > 100_000:  # unset sentinel
        max_length = 512
    examples = []
    for rid, texts in reports.items():
        if rid not in labels:
            raise ValueError(f"no labels for report {rid!r}")
        if len(labels[rid]) != len(texts):
            raise ValueError(f"label/sentence count mismatch for report {rid!r}")
        mask = eligible_mask(texts, cfg.min_tokens, cfg.max_tokens)
        for idx, ok in enumerate(mask):
            if not ok:
                continue
            win = build_window_input(texts, idx, cfg.window)
            enc = encode_window(tokenizer, win, max_length=max_length)
            examples.append(Example(
                enc, [labels[rid][i] for i in win.indices], rid, idx))
    return examples


def collate(batch: list[Example], pad_token_id: int):
    n = len(batch)
    max_len = max(len(ex.window.input_ids) for ex in batch)
    max_heads = max(len(ex.window.head_positions) for ex in batch)
    input_ids = torch.full((n, max_len), pad_token_id, dtype=torch.long)
    attention = torch.zeros((n, max_len), dtype=torch.long)
    heads = torch.zeros((n, max_heads), dtype=torch.long)
    head_labels = torch.full((n, max_heads), IGNORE, dtype=torch.long)
    targets = torch.zeros(n, dtype=torch.long)
    for b, ex in enumerate(batch):
        ids = ex.window.input_ids
        input_ids[b, :len(ids)] = torch.tensor(ids)
        attention[b, :len(ids)] = 1
        heads[b, :len(ex.window.head_positions)] = torch.tensor(ex.window.head_positions)
        head_labels[b, :len(ex.head_labels)] = torch.tensor(ex.head_labels)
        targets[b] = ex.window.target
    return input_ids, attention, heads, head_labels, targets


def batch_loss(model: SeparatorHeadClassifier, batch: list[Example],
               pad_token_id: int) -> torch.Tensor:
    """Mean cross-entropy over every sentence head in the batch windows."""
    input_ids, attention, heads, head_labels, _ = collate(batch, pad_token_id)
    logits = model(input_ids, attention, heads)
    return nn.functional.cross_entropy(
        logits.view(-1, logits.size(-1)), head_labels.view(-1),
        ignore_index=IGNORE)


@torch.no_grad()
def target_predictions(model, examples, pad_token_id, batch_size=32) -> np.ndarray:
    """Argmax label id at the target head of each example."""
    model.eval()
    preds = []
    for lo in range(0, len(examples), batch_size):
        batch = examples[lo:lo + batch_size]
        input_ids, attention, heads, _, targets = collate(batch, pad_token_id)
        logits = model(input_ids, attention, heads)
        chosen = logits[torch.arange(len(batch)), targets]
        preds.extend(chosen.argmax(dim=-1).tolist())
    return np.asarray(preds)


def positive_f1(pred_ids: np.ndarray, gold_ids: np.ndarray) -> float:
    """F1 on the is-initiative class: any non-O label counts as positive."""
    pred_pos = pred_ids != 0
    gold_pos = gold_ids != 0
    tp = int(np.sum(pred_pos & gold_pos))
    fp = int(np.sum(pred_pos & ~gold_pos))
    fn = int(np.sum(~pred_pos & gold_pos))
    return 100.0 * 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0


def finetune(train_examples: list[Example], cfg: BridgeConfig,
             dev_examples: list[Example] | None = None,
             tokenizer=None, model: SeparatorHeadClassifier | None = None):
    """Returns the fine-tuned model (best dev state when a dev set is given).

    Stops early when the dev is-initiative F1 shows no improvement for
    `patience` epochs, or drops more than `f1_deterioration_stop` below the
    best seen (percentage points by default, relative with the flag).
    """
    if not train_examples:
        raise ValueError("no training examples")
    torch.manual_seed(cfg.seed)
    if model is None:
        model = SeparatorHeadClassifier(cfg.encoder, dropout=cfg.dropout)
    if tokenizer is None:
        tokenizer = AutoTokenizer.from_pretrained(cfg.encoder)
    pad = tokenizer.pad_token_id

    rng = np.random.default_rng(cfg.seed)
    n = len(train_examples)
    batches_per_epoch = -(-n // cfg.batch_size)
    total_steps = batches_per_epoch * cfg.max_epochs
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    scheduler = get_linear_schedule_with_warmup(
        optimizer, int(cfg.warmup_fraction * total_steps), total_steps)

    dev_gold = (np.asarray([ex.head_labels[ex.window.target] for ex in dev_examples])
                if dev_examples else None)
    best_f1 = -1.0
    best_state = None
    since_best = 0
    for epoch in range(cfg.max_epochs):
        model.train()
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, cfg.batch_size):
            batch = [train_examples[i] for i in order[lo:lo + cfg.batch_size]]
            optimizer.zero_grad()
            loss = batch_loss(model, batch, pad)
            loss.backward()
            optimizer.step()
            scheduler.step()
            epoch_loss += loss.detach().item()
        log.info("epoch %d: mean batch loss %.4f", epoch, epoch_loss / batches_per_epoch)
        if dev_examples is None:
            continue
        f1 = positive_f1(target_predictions(model, dev_examples, pad), dev_gold)
        log.info("epoch %d: dev is-initiative F1 %.2f", epoch, f1)
        if f1 > best_f1:
            best_f1 = f1
            best_state = copy.deepcopy(model.state_dict())
            since_best = 0
        else:
            since_best += 1
        floor = (best_f1 * (1 - cfg.f1_deterioration_stop / 100.0)
                 if cfg.relative_deterioration
                 else best_f1 - cfg.f1_deterioration_stop)
        if f1 < floor:
            log.info("stopping: dev F1 %.2f fell below %.2f", f1, floor)
            break
        if since_best >= cfg.patience:
            log.info("stopping: no dev improvement for %d epochs", cfg.patience)
            break
    if best_state is not None:
        model.load_state_dict(best_state)
    return model
