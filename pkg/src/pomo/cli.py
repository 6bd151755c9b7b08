"""Command-line entry point wiring the full pipeline."""

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .checkpoint import load_checkpoint, read_sidecar, save_checkpoint, write_sidecar
from .corpus import CorpusFormatError, load_parsed_corpus
from .dataset import (
    BuildReport,
    DatasetFormatError,
    build_instances,
    dataset_stats,
    occupation_distribution,
    read_dataset,
    read_instances,
    split_dataset,
    stats_to_dict,
    write_dataset,
    write_instances,
)
from .decode import decode_instances
from .extraction import candidate_from_dict, candidate_to_dict, extract_from_corpus
from .genmodel import GenModelConfig, build_model, gen_model_meta
from .gentrain import train_generator
from .kb import KBFormatError, load_kb
from .manifest import write_manifest
from .metrics import bucketed_report
from .selection import (
    fact_type_ranking,
    gold_selection,
    evaluate_selection_corpus,
    select_most_common,
    sweep_n,
)
from .selector_model import (
    SelModelConfig,
    SelTrainConfig,
    SelectorModel,
    build_sel_vocab,
    evaluate_selector,
    predict_selection,
    score_claims,
    selector_meta,
    train_selector,
)
from .vocab import Vocabulary

logger = logging.getLogger(__name__)

DEFAULT_SEED = 13

ARCH_ALIASES = {
    "bilstm": "bilstm_concat",
    "transformer": "transformer_concat",
    "tri": "tri_encoder",
    "e2e": "e2e_claim_select",
}


def _resolve_path(path: str) -> Path:
    """Paths resolve against the cwd, then against POMO_DATA_DIR."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    root = os.environ.get("POMO_DATA_DIR")
    if root and (Path(root) / path).exists():
        return Path(root) / path
    return candidate


def _write_json(payload: dict, out: str = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _read_config_file(path: str) -> dict:
    """Flat `key = value` lines; keys use flag names with dashes or
    underscores."""
    config = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}, line {lineno}: expected key = value")
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def _apply_config(args: argparse.Namespace, config: dict, parsers: list) -> None:
    """Config-file values fill in flags the user did not set explicitly."""
    for parser in parsers:
        for action in parser._actions:
            dest = action.dest
            if dest in ("help", "==SUPPRESS=="):
                continue
            if dest not in config or getattr(args, dest, None) != action.default:
                continue
            raw = config[dest]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                value = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                value = action.type(raw)
            else:
                value = raw
            setattr(args, dest, value)


# --------------------------------------------------------------------------
# subcommand handlers


def cmd_ingest_validate(args) -> int:
    docs = 0
    sents = 0
    for doc in load_parsed_corpus(_resolve_path(args.corpus)):
        docs += 1
        sents += len(doc.sentences)
    _write_json({"documents": docs, "sentences": sents, "status": "ok"})
    return 0


def cmd_extract(args) -> int:
    corpus_path = _resolve_path(args.corpus)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(out, "w", encoding="utf-8") as handle:
        for cand in extract_from_corpus(load_parsed_corpus(corpus_path), strict=args.strict):
            handle.write(json.dumps(candidate_to_dict(cand), ensure_ascii=False) + "\n")
            count += 1
    write_manifest(
        out, "extract", {"strict": args.strict}, [corpus_path], seed=None
    )
    print(f"extracted {count} candidates -> {out}")
    return 0


def cmd_build_dataset(args) -> int:
    cand_path = _resolve_path(args.candidates)
    kb_path = _resolve_path(args.kb)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    kb = load_kb(kb_path)
    candidates = []
    with open(cand_path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                candidates.append(candidate_from_dict(json.loads(line)))
    report = BuildReport()
    instances = list(
        build_instances(candidates, kb, threshold=args.threshold, ratio=args.ratio, report=report)
    )
    write_instances(instances, out)
    write_manifest(
        out,
        "build-dataset",
        {"threshold": args.threshold, "ratio": args.ratio},
        [cand_path, kb_path],
    )
    print(f"built {report.built} instances ({report.dropped} dropped) -> {out}")
    return 0


def cmd_split(args) -> int:
    inst_path = _resolve_path(args.instances)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    instances = read_instances(inst_path)
    split = split_dataset(instances, ratios=ratios, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    counts = write_dataset(split, out)
    write_manifest(out, "split", {"ratios": list(ratios)}, [inst_path], seed=args.seed)
    print(json.dumps(counts, sort_keys=True))
    return 0


def cmd_stats(args) -> int:
    path = _resolve_path(args.data)
    if path.is_dir():
        split = read_dataset(path)
        payload = {name: stats_to_dict(dataset_stats(part)) for name, part in split.parts().items()}
        all_instances = split.train + split.valid + split.test
        payload["total"] = stats_to_dict(dataset_stats(all_instances))
        payload["occupations"] = [
            {"category": cat, "count": n, "percent": pct}
            for cat, n, pct in occupation_distribution(all_instances)
        ]
    else:
        instances = read_instances(path)
        payload = stats_to_dict(dataset_stats(instances))
        payload["occupations"] = [
            {"category": cat, "count": n, "percent": pct}
            for cat, n, pct in occupation_distribution(instances)
        ]
    _write_json(payload, args.out)
    if args.out:
        write_manifest(Path(args.out), "stats", {}, [path])
    return 0


def _save_selector(out_dir: Path, model: SelectorModel, config, train_config, vocab, log) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out_dir / "model.ckpt", model.state_dict(), selector_meta(config, train_config, vocab))
    write_sidecar(out_dir / "model.meta.txt", asdict(config), vocab.sha256())
    vocab.save(out_dir / "vocab.txt")
    _write_json({"log": log}, str(out_dir / "train_log.json"))


def _load_selector(model_dir: Path) -> SelectorModel:
    config_dict, vocab_sha = read_sidecar(model_dir / "model.meta.txt")
    vocab = Vocabulary.load(model_dir / "vocab.txt")
    if vocab.sha256() != vocab_sha:
        raise ValueError(f"{model_dir}: vocabulary does not match checkpoint sidecar")
    model = SelectorModel(SelModelConfig(**config_dict), vocab)
    state, _ = load_checkpoint(model_dir / "model.ckpt")
    model.load_state_dict(state)
    model.eval()
    return model


def cmd_select(args) -> int:
    data_dir = _resolve_path(args.data)
    split = read_dataset(data_dir)
    if args.action == "train":
        config = SelModelConfig(
            vocab_size=args.vocab_size,
            embedding_dim=args.embedding_dim,
            hidden_size=args.hidden,
            num_layers=args.layers,
            tau=args.tau,
            top_n=args.n,
        )
        train_config = SelTrainConfig(
            learning_rate=args.lr,
            batch_size=args.batch_size,
            epochs=args.epochs,
            seed=args.seed,
            mode=args.mode if args.mode != "mcc" else "ranker",
        )
        model, log = train_selector(split.train, split.valid, config, train_config)
        out_dir = Path(args.out)
        _save_selector(out_dir, model, config, train_config, model.vocab, log)
        write_manifest(out_dir, "select train", asdict(config), [data_dir / "train.jsonl"], seed=args.seed)
        print(json.dumps({"best_valid_f1": max(e["valid_f1"] for e in log)}, sort_keys=True))
        return 0

    part = split.parts()[args.split]
    if args.action == "eval":
        if args.mode == "mcc":
            ranking = fact_type_ranking(split.train)
            preds = [select_most_common(inst, ranking, n=args.n).selected for inst in part]
            golds = [gold_selection(inst) for inst in part]
            p, r, f1 = evaluate_selection_corpus(preds, golds)
        else:
            model = _load_selector(Path(args.model))
            p, r, f1 = evaluate_selector(model, part, args.mode)
        _write_json({"mode": args.mode, "precision": p, "recall": r, "f1": f1, "n": args.n})
        return 0

    if args.action == "sweep":
        n_range = range(args.n_min, args.n_max + 1)
        if args.mode == "mcc":
            ranking = fact_type_ranking(split.train)
            rows = sweep_n(
                lambda inst: select_most_common(inst, ranking, n=len(inst.claims)).scores,
                part,
                n_range,
            )
        else:
            model = _load_selector(Path(args.model))
            rows = sweep_n(lambda inst: score_claims(model, inst), part, n_range)
        _write_json(
            {"rows": [{"n": n, "precision": p, "recall": r, "f1": f} for n, p, r, f in rows]}
        )
        return 0
    raise ValueError(f"unknown select action {args.action!r}")


def _selector_scores_map(selector_dir: Path, instances) -> dict:
    model = _load_selector(selector_dir)
    return {inst.id: score_claims(model, inst) for inst in instances}


def _save_generator(out_dir: Path, result, config: GenModelConfig) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out_dir / "model.ckpt", result.model.state_dict(), gen_model_meta(config, result.vocab))
    write_sidecar(out_dir / "model.meta.txt", asdict(config), result.vocab.sha256())
    result.vocab.save(out_dir / "vocab.txt")
    _write_json(
        {"log": result.log, "best_step": result.best_step, "best_f1": result.best_f1},
        str(out_dir / "train_log.json"),
    )


def _load_generator(model_dir: Path):
    config_dict, vocab_sha = read_sidecar(model_dir / "model.meta.txt")
    vocab = Vocabulary.load(model_dir / "vocab.txt")
    if vocab.sha256() != vocab_sha:
        raise ValueError(f"{model_dir}: vocabulary does not match checkpoint sidecar")
    config = GenModelConfig(**config_dict)
    model = build_model(config, vocab)
    state, _ = load_checkpoint(model_dir / "model.ckpt")
    model.load_state_dict(state)
    model.eval()
    return model, vocab, config


def cmd_gen(args) -> int:
    if args.action == "eval":
        if not args.pred or not args.data:
            raise ValueError("gen eval requires --pred and --data")
        if args.out == "gen_out":
            args.out = None
        return cmd_eval(args)
    data_dir = _resolve_path(args.data)
    split = read_dataset(data_dir)
    if args.action == "train":
        config = GenModelConfig(
            architecture=ARCH_ALIASES.get(args.arch, args.arch),
            vocab_size=args.vocab_size,
            max_input_len=args.max_input_len,
            max_output_len=args.max_output_len,
            batch_size=args.batch_size,
            claim_source=args.claims,
            embedding_dim=args.embedding_dim,
            hidden_size=args.hidden,
            num_layers=args.layers,
            learning_rate=args.lr,
            aux_weight=args.aux_weight,
            aux_aggregation=args.aux_aggregation,
            total_steps=args.steps,
            eval_every=args.eval_every,
            seed=args.seed,
        )
        scores_map = None
        if config.claim_source.startswith("ranker:"):
            if not args.selector:
                raise ValueError("--claims ranker:K requires --selector MODEL_DIR")
            scores_map = _selector_scores_map(
                Path(args.selector), split.train + split.valid + split.test
            )
        result = train_generator(split.train, split.valid, config, scores_map=scores_map)
        out_dir = Path(args.out)
        _save_generator(out_dir, result, config)
        write_manifest(out_dir, "gen train", asdict(config), [data_dir / "train.jsonl"], seed=args.seed)
        print(json.dumps({"best_step": result.best_step, "best_f1": result.best_f1}, sort_keys=True))
        return 0

    if args.action == "decode":
        model, vocab, config = _load_generator(Path(args.model))
        part = split.parts()[args.split]
        scores_map = None
        if config.claim_source.startswith("ranker:"):
            if not args.selector:
                raise ValueError("this model's claim source requires --selector MODEL_DIR")
            scores_map = _selector_scores_map(Path(args.selector), part)
        preds = decode_instances(
            model, vocab, config, part,
            mode=args.mode, beam_width=args.beam_width, scores_map=scores_map,
        )
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as handle:
            for inst, pred in zip(part, preds):
                handle.write(
                    json.dumps(
                        {"id": inst.id, "prediction": pred, "target": inst.pm_target},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        write_manifest(
            out, "gen decode",
            {"mode": args.mode, "split": args.split, "beam_width": args.beam_width},
            [data_dir / f"{args.split}.jsonl"],
        )
        print(f"decoded {len(preds)} instances -> {out}")
        return 0
    raise ValueError(f"unknown gen action {args.action!r}")


def cmd_eval(args) -> int:
    pred_path = _resolve_path(args.pred)
    data_path = _resolve_path(args.data)
    instances = {inst.id: inst for inst in read_instances(data_path)}
    preds, refs, lengths = [], [], []
    with open(pred_path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            record = json.loads(line)
            if record["id"] not in instances:
                raise ValueError(f"{pred_path}, line {lineno}: unknown instance id {record['id']!r}")
            inst = instances[record["id"]]
            preds.append(record["prediction"])
            refs.append(inst.pm_target)
            if args.bucket == "sent":
                lengths.append(len(inst.sent_with_slot.split()))
            else:
                lengths.append(len(inst.pm_target.split()))
    report = bucketed_report(preds, refs, lengths)
    _write_json(report.to_dict(), args.out)
    if args.out:
        write_manifest(Path(args.out), "eval", {"bucket": args.bucket}, [pred_path, data_path])
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> tuple:
    parser = argparse.ArgumentParser(
        prog="pomo", description="Post-modifier generation pipeline."
    )
    parser.add_argument("--version", action="version", version=f"pomo {__version__}")
    parser.add_argument("--config", help="flat key = value config file", default=None)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--jobs", type=int, default=1, help="worker hint; never affects outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}

    p = parsers["ingest-validate"] = sub.add_parser("ingest-validate", help="validate a parsed corpus")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_ingest_validate)

    p = parsers["extract"] = sub.add_parser("extract", help="extract post-modifier candidates")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true", help="skip sentences with multiple pairs")
    p.set_defaults(func=cmd_extract)

    p = parsers["build-dataset"] = sub.add_parser("build-dataset", help="link candidates against a KB")
    p.add_argument("--candidates", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.30)
    p.add_argument("--ratio", type=float, default=0.5)
    p.set_defaults(func=cmd_build_dataset)

    p = parsers["split"] = sub.add_parser("split", help="entity-disjoint stratified split")
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratios", default="0.955,0.0225,0.0225")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_split)

    p = parsers["stats"] = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--data", required=True, help="instances file or split directory")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    p = parsers["select"] = sub.add_parser("select", help="claim selection models")
    p.add_argument("action", choices=["train", "eval", "sweep"])
    p.add_argument("--data", required=True, help="split directory")
    p.add_argument("--mode", choices=["mcc", "classifier", "ranker"], default="ranker")
    p.add_argument("--model", default=None, help="model directory (neural modes)")
    p.add_argument("--out", default="selector_model")
    p.add_argument("--split", choices=["train", "valid", "test"], default="test")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--tau", type=float, default=0.37)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--vocab-size", type=int, default=50_000)
    p.add_argument("--embedding-dim", type=int, default=100)
    p.add_argument("--hidden", type=int, default=256)
    p.add_argument("--layers", type=int, default=2)
    p.set_defaults(func=cmd_select)

    p = parsers["gen"] = sub.add_parser("gen", help="generation models")
    p.add_argument("action", choices=["train", "decode", "eval"])
    p.add_argument("--data", default=None, help="split directory")
    p.add_argument("--arch", default="bilstm",
                   help="bilstm | transformer | tri | e2e (or full names)")
    p.add_argument("--claims", default="all",
                   help="all | oracle | ranker:K | e2e | context_only | claims_only")
    p.add_argument("--selector", default=None, help="selector model dir for ranker:K")
    p.add_argument("--model", default=None, help="generator model directory")
    p.add_argument("--out", default="gen_out")
    p.add_argument("--split", choices=["train", "valid", "test"], default="test")
    p.add_argument("--mode", choices=["greedy", "beam"], default="greedy")
    p.add_argument("--beam-width", type=int, default=5)
    p.add_argument("--steps", type=int, default=150_000)
    p.add_argument("--eval-every", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--vocab-size", type=int, default=50_000)
    p.add_argument("--embedding-dim", type=int, default=500)
    p.add_argument("--hidden", type=int, default=512)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--max-input-len", type=int, default=500)
    p.add_argument("--max-output-len", type=int, default=30)
    p.add_argument("--aux-weight", type=float, default=1.0)
    p.add_argument("--aux-aggregation", choices=["mean", "sum"], default="mean")
    p.add_argument("--pred", default=None, help="(eval) predictions JSONL")
    p.add_argument("--bucket", choices=["pm", "sent"], default="pm")
    p.set_defaults(func=cmd_gen)

    p = parsers["eval"] = sub.add_parser("eval", help="evaluate predictions")
    p.add_argument("--pred", required=True, help="decode output JSONL")
    p.add_argument("--data", required=True, help="instances JSONL with targets")
    p.add_argument("--bucket", choices=["pm", "sent"], default="pm")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    return parser, parsers


def dispatch(argv=None) -> int:
    parser, parsers = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.config:
            config = _read_config_file(args.config)
            _apply_config(args, config, [parser, parsers[args.command]])
        return args.func(args)
    except (CorpusFormatError, KBFormatError, DatasetFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
