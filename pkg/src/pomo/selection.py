"""Claim selection: frequency baseline, thresholding/top-n rules, and
set-overlap evaluation utilities."""

from dataclasses import dataclass

from .dataset import PomoInstance


@dataclass(frozen=True)
class SelectionResult:
    scores: tuple  # per-claim values in (0,1), aligned with instance.claims
    selected: frozenset  # claim indices


def gold_selection(instance: PomoInstance) -> frozenset:
    return frozenset(i for i, c in enumerate(instance.claims) if c.relevant)


def fact_type_ranking(train: list) -> list:
    """Fact-type keys by descending relevant-claim count, ties lexicographic."""
    counts = {}
    for inst in train:
        for claim in inst.claims:
            if claim.relevant:
                counts[claim.key] = counts.get(claim.key, 0) + 1
    return [key for key, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]


def select_most_common(instance: PomoInstance, ranking: list, n: int = 4) -> SelectionResult:
    """Select the n claims whose keys rank highest; unranked keys sort last.

    Scores are 1/(1+rank) with rank counted from 1, so they stay inside
    (0,1); claims with unranked keys share the lowest score.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    rank_of = {key: i + 1 for i, key in enumerate(ranking)}
    worst = len(ranking) + 1
    scores = tuple(1.0 / (1 + rank_of.get(c.key, worst)) for c in instance.claims)
    return SelectionResult(scores=scores, selected=frozenset(select_top_n(scores, n)))


def select_by_threshold(scores, tau: float = 0.37) -> set:
    return {i for i, s in enumerate(scores) if s > tau}


def select_top_n(scores, n: int = 2) -> set:
    """Indices of the n largest scores; ties break toward lower index."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return set(order[: max(n, 0)])


def evaluate_selection(pred: set, gold: set) -> tuple:
    overlap = len(set(pred) & set(gold))
    p = overlap / len(pred) if pred else 0.0
    r = overlap / len(gold) if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def evaluate_selection_corpus(preds: list, golds: list) -> tuple:
    """Micro-averaged P/R/F1 over per-instance prediction/gold sets."""
    tp = pred_total = gold_total = 0
    for pred, gold in zip(preds, golds):
        tp += len(set(pred) & set(gold))
        pred_total += len(pred)
        gold_total += len(gold)
    p = tp / pred_total if pred_total else 0.0
    r = tp / gold_total if gold_total else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def per_fact_type_f1(predict, instances: list) -> list:
    """(fact type, F1) per key, with predictions and gold restricted to that
    key's claims; keys without gold occurrences are omitted.

    predict maps an instance to a set of claim indices.
    """
    tp = {}
    pred_total = {}
    gold_total = {}
    for inst in instances:
        pred = predict(inst)
        gold = gold_selection(inst)
        for i, claim in enumerate(inst.claims):
            key = claim.key
            if i in gold:
                gold_total[key] = gold_total.get(key, 0) + 1
            if i in pred:
                pred_total[key] = pred_total.get(key, 0) + 1
            if i in pred and i in gold:
                tp[key] = tp.get(key, 0) + 1
    table = []
    for key in sorted(gold_total):
        p = tp.get(key, 0) / pred_total[key] if pred_total.get(key) else 0.0
        r = tp.get(key, 0) / gold_total[key]
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        table.append((key, f1))
    table.sort(key=lambda kv: (-kv[1], kv[0]))
    return table


def sweep_n(score_fn, instances: list, n_range) -> list:
    """One (n, precision, recall, f1) row per n, using top-n selection over
    score_fn's per-instance scores."""
    scored = [(score_fn(inst), gold_selection(inst)) for inst in instances]
    rows = []
    for n in n_range:
        preds = [select_top_n(scores, n) for scores, _ in scored]
        golds = [gold for _, gold in scored]
        p, r, f1 = evaluate_selection_corpus(preds, golds)
        rows.append((n, p, r, f1))
    return rows
