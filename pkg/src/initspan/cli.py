"""Command-line surface. Subcommands compose through files only.

Exit codes: 0 success, 1 usage error, 2 data integrity error, 3 numerical
failure. Errors print a single machine-parsable line to stderr:

    initspan: error: <category>: <message>

A JSON config file (--config) may supply defaults for any flag by its
dest name; explicit flags win over the config, which wins over built-in
defaults. Unknown config keys are rejected.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import aggregate as agg
from . import corpus as corpus_mod
from . import crf as crf_mod
from . import evaluate as eval_mod
from . import labels as labels_mod
from .errors import IntegrityError, NumericalError, ParseError
from .features import FeatureConfig
from .preprocess import PreprocessConfig, filter_mask

log = logging.getLogger("initspan")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit_error(category: str, message: str) -> None:
    print(f"initspan: error: {category}: {message}".replace("\n", " "),
          file=sys.stderr)


def build_parser() -> _Parser:
    parser = _Parser(prog="initspan", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag defaults")
    parser.add_argument("--seed", type=int, default=0, help="global RNG seed")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("stats", help="corpus statistics as JSON")
    p.add_argument("corpus")

    p = sub.add_parser("derive-labels", help="gold labels from annotated corpus")
    p.add_argument("corpus")
    p.add_argument("--schema", choices=["binary", "iobes"], required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("extract-spans", help="gold initiative spans from corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train the feature CRF")
    p.add_argument("corpus")
    p.add_argument("labels")
    p.add_argument("--schema", choices=["binary", "iobes"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dev-corpus")
    p.add_argument("--dev-labels")
    p.add_argument("--window", type=int, default=1)
    p.add_argument("--hash-dim", type=int, default=1 << 18)
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--l2-lambda", type=float, default=1e-2)
    p.add_argument("--max-epochs", type=int, default=50)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=8)

    p = sub.add_parser("predict", help="decode a corpus with a trained model")
    p.add_argument("corpus")
    p.add_argument("model")
    p.add_argument("--out", required=True)
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=100)

    p = sub.add_parser("decode", help="Viterbi-decode an external emissions file")
    p.add_argument("emissions")
    p.add_argument("model")
    p.add_argument("--out", required=True)

    p = sub.add_parser("aggregate", help="labels file -> spans file")
    p.add_argument("labels")
    p.add_argument("--schema", choices=["binary", "iobes"], required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="score predicted spans against gold spans")
    p.add_argument("pred")
    p.add_argument("gold")

    p = sub.add_parser("agreement", help="annotator match percentages from a counts CSV")
    p.add_argument("counts")
    p.add_argument("--table", action="store_true", help="aligned text instead of JSON")

    return parser


def _known_dests(parser: _Parser) -> set[str]:
    dests = {a.dest for a in parser._actions}
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                dests |= {a.dest for a in child._actions}
    dests.discard("help")
    return dests


def _apply_config(parser: _Parser, argv: list[str]) -> None:
    probe = _Parser(add_help=False)
    probe.add_argument("--config")
    ns, _ = probe.parse_known_args(argv)
    if not ns.config:
        return
    try:
        cfg = json.loads(Path(ns.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ParseError("config file not found", path=ns.config) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid config JSON: {exc.msg}", path=ns.config) from None
    if not isinstance(cfg, dict):
        raise _UsageError("config must be a JSON object")
    unknown = set(cfg) - _known_dests(parser)
    if unknown:
        raise _UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    parser.set_defaults(**{k: v for k, v in cfg.items()
                           if k in {a.dest for a in parser._actions}})
    # subcommands parse into a fresh namespace, so push config values into
    # each child as defaults; a config-supplied value satisfies a required flag
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                for sub_action in child._actions:
                    if sub_action.dest in cfg:
                        sub_action.default = cfg[sub_action.dest]
                        sub_action.required = False


def _cmd_stats(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    print(json.dumps(corpus_mod.compute_stats(corpus).as_dict()))
    return EXIT_OK


def _cmd_derive_labels(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    spans = corpus_mod.extract_spans(corpus)
    derive = labels_mod.derive_binary if args.schema == "binary" else labels_mod.derive_iobes
    seqs = [derive(spans[rid], len(sents), report_id=rid)
            for rid, sents in corpus.reports.items()]
    labels_mod.save_labels(seqs, args.out)
    log.info("wrote %d label sequences to %s", len(seqs), args.out)
    return EXIT_OK


def _cmd_extract_spans(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    agg.save_spans(corpus_mod.extract_spans(corpus), args.out, with_ids=True)
    return EXIT_OK


def _build_sequences(corpus_path, labels_path, schema, fcfg):
    from .features import extract_report

    corpus = corpus_mod.load_corpus(corpus_path)
    lset = labels_mod.label_set(schema)
    by_report = labels_mod.load_labels(labels_path, lset)
    seqs = []
    for rid, sents in corpus.reports.items():
        if rid not in by_report:
            raise IntegrityError(f"no labels for report {rid!r}")
        seq = by_report[rid]
        if len(seq) != len(sents):
            raise IntegrityError(
                f"report {rid!r}: {len(seq)} labels for {len(sents)} sentences")
        feats = extract_report([s.text for s in sents], fcfg)
        seqs.append(crf_mod.TaggedSequence(
            rid, np.asarray(seq.indices(), dtype=np.int64), features=feats))
    return seqs, lset


def _cmd_train(args) -> int:
    fcfg = FeatureConfig(window=args.window, hash_dim=args.hash_dim,
                         lowercase=not args.no_lowercase)
    tcfg = crf_mod.CrfTrainConfig(
        learning_rate=args.learning_rate, l2_lambda=args.l2_lambda,
        max_epochs=args.max_epochs, patience=args.patience,
        seed=args.seed, batch_size=args.batch_size)
    train_seqs, lset = _build_sequences(args.corpus, args.labels, args.schema, fcfg)
    dev_seqs = None
    if bool(args.dev_corpus) != bool(args.dev_labels):
        raise _UsageError("--dev-corpus and --dev-labels must be given together")
    if args.dev_corpus:
        dev_seqs, _ = _build_sequences(args.dev_corpus, args.dev_labels,
                                       args.schema, fcfg)
    model = crf_mod.train(train_seqs, tcfg, lset, feature_config=fcfg,
                          dev_seqs=dev_seqs)
    for entry in model.history:
        log.info("epoch %(epoch)d: train_ll=%(train_ll).4f", entry)
    crf_mod.save_model(model, args.out)
    return EXIT_OK


def _cmd_predict(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    model = crf_mod.load_model(args.model)
    mask = filter_mask(corpus, PreprocessConfig(args.min_tokens, args.max_tokens))
    preds = crf_mod.predict(corpus, model, mask=mask)
    labels_mod.save_labels(list(preds.values()), args.out)
    return EXIT_OK


def _cmd_decode(args) -> int:
    model = crf_mod.load_model(args.model)
    records = crf_mod.load_emissions(args.emissions, len(model.labels))
    triples = crf_mod.decode_emission_runs(records, model)
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for report_id, index, lab in triples:
            fh.write(json.dumps(
                {"report_id": report_id, "index": index, "label": lab}) + "\n")
    return EXIT_OK


def _cmd_aggregate(args) -> int:
    lset = labels_mod.label_set(args.schema)
    by_report = _load_label_records(args.labels, lset)
    fn = agg.aggregate_binary if args.schema == "binary" else agg.aggregate_iobes
    spans = {rid: fn(seq) for rid, seq in by_report.items()}
    agg.save_spans(spans, args.out)
    return EXIT_OK


def _load_label_records(path, lset):
    """Label files may skip ineligible sentences; missing indices read as O/0."""
    raw: dict[str, dict[int, str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rid, idx, lab = obj["report_id"], obj["index"], obj["label"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ParseError("malformed label record", line_no, path) from None
            if lab not in lset.members:
                raise ParseError(f"label {lab!r} not in {lset.variant} set",
                                 line_no, path)
            if idx in raw.setdefault(rid, {}):
                raise ParseError(f"duplicate index {idx} for report {rid!r}",
                                 line_no, path)
            raw[rid][idx] = lab
    out = {}
    for rid, entries in raw.items():
        length = max(entries) + 1
        labs = [entries.get(i, lset.members[0]) for i in range(length)]
        out[rid] = labels_mod.LabelSeq(rid, labs, lset)
    return out


def _cmd_evaluate(args) -> int:
    pred = agg.load_spans(args.pred)
    gold = agg.load_spans(args.gold)
    reports = eval_mod.score_corpus(pred, gold)
    print(json.dumps({name: rep.as_dict() for name, rep in reports.items()},
                     indent=2))
    return EXIT_OK


def _cmd_agreement(args) -> int:
    rows = eval_mod.load_agreement_counts(args.counts)
    if not rows:
        raise ParseError("no count rows found", path=args.counts)
    table = eval_mod.agreement_table(rows)
    if args.table:
        print(f"{'report':<20} {'A1':>5} {'A2':>5} {'matches':>8} {'min%':>7} {'max%':>7}")
        for r in table["rows"]:
            print(f"{r['name'] or '-':<20} {r['n1']:>5} {r['n2']:>5} {r['nm']:>8} "
                  f"{r['min_pct']:>7.2f} {r['max_pct']:>7.2f}")
        print(f"{'average':<20} {'':>5} {'':>5} {'':>8} "
              f"{table['avg_min_pct']:>7.2f} {table['avg_max_pct']:>7.2f}")
    else:
        print(json.dumps(table, indent=2))
    return EXIT_OK


_COMMANDS = {
    "stats": _cmd_stats,
    "derive-labels": _cmd_derive_labels,
    "extract-spans": _cmd_extract_spans,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "decode": _cmd_decode,
    "aggregate": _cmd_aggregate,
    "evaluate": _cmd_evaluate,
    "agreement": _cmd_agreement,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(
            level=logging.DEBUG if args.verbose > 1 else
            logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(message)s", stream=sys.stderr)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _emit_error("data", f"file not found: {exc.filename}")
        return EXIT_DATA
    except (ParseError, IntegrityError) as exc:
        _emit_error("data", str(exc))
        return EXIT_DATA
    except NumericalError as exc:
        _emit_error("numeric", str(exc))
        return EXIT_NUMERIC
    except ValueError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
