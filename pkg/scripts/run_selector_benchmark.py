#!/usr/bin/env python3
"""Benchmark claim-selection approaches on the synthetic overlap task.

Trains the neural selector in ranker and classifier modes, compares both
against the most-common-fact-type baseline, and prints a small table plus
the baseline's top-n sweep. Runs on CPU in well under a minute at the
default sizes.
"""

import argparse
import logging
import time

from pomo.selection import (
    evaluate_selection_corpus,
    fact_type_ranking,
    gold_selection,
    select_most_common,
    sweep_n,
)
from pomo.selector_model import (
    SelModelConfig,
    SelTrainConfig,
    evaluate_selector,
    train_selector,
)
from pomo.synthetic import synthetic_selection_dataset


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train-size", type=int, default=500)
    parser.add_argument("--valid-size", type=int, default=100)
    parser.add_argument("--data-seed", type=int, default=11)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--lr", type=float, default=1.0)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--embedding-dim", type=int, default=48)
    parser.add_argument("--hidden", type=int, default=128)
    parser.add_argument("--layers", type=int, default=1)
    parser.add_argument("--tau", type=float, default=0.37)
    parser.add_argument("--top-n", type=int, default=2)
    parser.add_argument("--verbose", action="store_true")
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    data = synthetic_selection_dataset(args.train_size + args.valid_size, seed=args.data_seed)
    train, valid = data[: args.train_size], data[args.train_size :]
    config = SelModelConfig(
        vocab_size=512,
        embedding_dim=args.embedding_dim,
        hidden_size=args.hidden,
        num_layers=args.layers,
        tau=args.tau,
        top_n=args.top_n,
    )

    rows = []

    ranking = fact_type_ranking(train)
    preds = [select_most_common(inst, ranking, n=args.top_n).selected for inst in valid]
    golds = [gold_selection(inst) for inst in valid]
    rows.append((f"most-common (n={args.top_n})", *evaluate_selection_corpus(preds, golds), 0.0))

    for mode in ("classifier", "ranker"):
        train_config = SelTrainConfig(
            learning_rate=args.lr,
            batch_size=args.batch_size,
            epochs=args.epochs,
            seed=args.seed,
            mode=mode,
        )
        start = time.perf_counter()
        model, _ = train_selector(train, valid, config, train_config)
        elapsed = time.perf_counter() - start
        rows.append((f"neural {mode}", *evaluate_selector(model, valid, mode), elapsed))

    print(f"\nclaim selection on {args.train_size} train / {args.valid_size} valid instances")
    print(f"{'model':<24} {'P':>7} {'R':>7} {'F1':>7} {'train s':>8}")
    for name, p, r, f1, elapsed in rows:
        print(f"{name:<24} {p:7.3f} {r:7.3f} {f1:7.3f} {elapsed:8.1f}")

    print("\nmost-common top-n sweep")
    print(f"{'n':>3} {'P':>7} {'R':>7} {'F1':>7}")
    sweep = sweep_n(
        lambda inst: select_most_common(inst, ranking, n=0).scores, valid, range(1, 7)
    )
    for n, p, r, f1 in sweep:
        print(f"{n:>3} {p:7.3f} {r:7.3f} {f1:7.3f}")


if __name__ == "__main__":
    main()
