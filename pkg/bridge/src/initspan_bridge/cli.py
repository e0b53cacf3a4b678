"""Bridge CLI: fine-tune the separator-head encoder and emit CRF emissions.

Both subcommands communicate with the main toolkit through files only;
the emissions output feeds `initspan decode`.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import LABEL_TO_ID, BridgeConfig
from .data import load_corpus, load_labels


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="initspan-bridge",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("finetune", help="fine-tune the encoder on IOBES labels")
    p.add_argument("corpus")
    p.add_argument("labels")
    p.add_argument("--encoder", required=True,
                   help="model name or local directory for AutoModel")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dev-corpus")
    p.add_argument("--dev-labels")
    p.add_argument("--window", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--learning-rate", type=float, default=1e-5)
    p.add_argument("--warmup-fraction", type=float, default=0.06)
    p.add_argument("--max-epochs", type=int, default=10)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--f1-deterioration-stop", type=float, default=3.0)
    p.add_argument("--relative-deterioration", action="store_true",
                   help="read the stop threshold as a relative drop, not points")
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("emit", help="write emission scores for initspan decode")
    p.add_argument("corpus")
    p.add_argument("model_dir")
    p.add_argument("--out", required=True)
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=32)
    return parser


def _cmd_finetune(args) -> int:
    from transformers import AutoTokenizer

    from .model import save_bridge
    from .train import build_examples, finetune

    cfg = BridgeConfig(
        encoder=args.encoder, window=args.window, batch_size=args.batch_size,
        learning_rate=args.learning_rate, warmup_fraction=args.warmup_fraction,
        max_epochs=args.max_epochs, patience=args.patience,
        f1_deterioration_stop=args.f1_deterioration_stop,
        relative_deterioration=args.relative_deterioration,
        min_tokens=args.min_tokens, max_tokens=args.max_tokens, seed=args.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.encoder)
    train_examples = build_examples(load_corpus(args.corpus),
                                    load_labels(args.labels, LABEL_TO_ID),
                                    tokenizer, cfg)
    dev_examples = None
    if bool(args.dev_corpus) != bool(args.dev_labels):
        raise ValueError("--dev-corpus and --dev-labels must be given together")
    if args.dev_corpus:
        dev_examples = build_examples(load_corpus(args.dev_corpus),
                                      load_labels(args.dev_labels, LABEL_TO_ID),
                                      tokenizer, cfg)
    model = finetune(train_examples, cfg, dev_examples=dev_examples,
                     tokenizer=tokenizer)
    save_bridge(model, tokenizer, cfg.window, args.out_dir)
    return 0


def _cmd_emit(args) -> int:
    from .emit import emit_scores
    from .model import load_bridge

    model, tokenizer, window = load_bridge(args.model_dir)
    n = emit_scores(load_corpus(args.corpus), model, tokenizer, window,
                    args.out, min_tokens=args.min_tokens,
                    max_tokens=args.max_tokens, batch_size=args.batch_size)
    logging.getLogger("initspan_bridge").info("wrote %d emission records", n)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_help(sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else
        logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return {"finetune": _cmd_finetune, "emit": _cmd_emit}[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"initspan-bridge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
