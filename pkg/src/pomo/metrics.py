"""Generation metrics: stopword-free bag-of-words P/R/F1, corpus BLEU-4,
METEOR-lite, and length-bucketed reporting."""

import math
from dataclasses import dataclass, field

from .textutils import normalize_token, stem, stopwords


def _bow_set(text: str, stops: frozenset) -> set:
    out = set()
    for raw in text.split():
        tok = normalize_token(raw)
        if tok and tok not in stops:
            out.add(tok)
    return out


def bow_prf(pred: str, ref: str, stops: frozenset = None) -> tuple:
    """Set-overlap precision/recall/F1 over content tokens."""
    if stops is None:
        stops = stopwords()
    pred_set = _bow_set(pred, stops)
    ref_set = _bow_set(ref, stops)
    overlap = len(pred_set & ref_set)
    p = overlap / len(pred_set) if pred_set else 0.0
    r = overlap / len(ref_set) if ref_set else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def corpus_bow_prf(preds: list, refs: list, stops: frozenset = None) -> tuple:
    """Micro-averaged bag-of-words P/R/F1 (global overlap counts)."""
    if len(preds) != len(refs):
        raise ValueError("preds and refs must have equal length")
    if stops is None:
        stops = stopwords()
    overlap = pred_total = ref_total = 0
    for pred, ref in zip(preds, refs):
        pred_set = _bow_set(pred, stops)
        ref_set = _bow_set(ref, stops)
        overlap += len(pred_set & ref_set)
        pred_total += len(pred_set)
        ref_total += len(ref_set)
    p = overlap / pred_total if pred_total else 0.0
    r = overlap / ref_total if ref_total else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def _tokens(text: str) -> list:
    return text.lower().split()


def _ngram_counts(tokens: list, n: int) -> dict:
    counts = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i : i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def bleu(preds: list, refs: list, max_n: int = 4) -> float:
    """Corpus BLEU: geometric mean of clipped n-gram precisions times the
    brevity penalty; any zero precision gives 0 (no smoothing)."""
    if isinstance(preds, str):
        preds, refs = [preds], [refs]
    if len(preds) != len(refs):
        raise ValueError("preds and refs must have equal length")
    numer = [0] * max_n
    denom = [0] * max_n
    pred_len = ref_len = 0
    for pred, ref in zip(preds, refs):
        pred_toks = _tokens(pred)
        ref_toks = _tokens(ref)
        pred_len += len(pred_toks)
        ref_len += len(ref_toks)
        for n in range(1, max_n + 1):
            pred_counts = _ngram_counts(pred_toks, n)
            ref_counts = _ngram_counts(ref_toks, n)
            for gram, count in pred_counts.items():
                numer[n - 1] += min(count, ref_counts.get(gram, 0))
            denom[n - 1] += max(len(pred_toks) - n + 1, 0)
    if pred_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(max_n):
        if numer[n] == 0 or denom[n] == 0:
            return 0.0
        log_sum += math.log(numer[n] / denom[n])
    bp = min(1.0, math.exp(1.0 - ref_len / pred_len))
    return bp * math.exp(log_sum / max_n)


def _align_stage(pred_toks, ref_toks, pred_avail, ref_avail, keyfn, prev_ref_holder):
    """Greedy maximum matching for one stage, preferring run extensions.

    Matches as many available pred tokens as key counts allow (a maximum
    matching under equality), assigning ref positions so that runs of
    consecutive alignments are extended when possible.
    """
    ref_by_key = {}
    for j in sorted(ref_avail):
        ref_by_key.setdefault(keyfn(ref_toks[j]), []).append(j)
    # Per-key quota: how many pred occurrences can be matched at all.
    pred_by_key = {}
    for i in sorted(pred_avail):
        pred_by_key.setdefault(keyfn(pred_toks[i]), []).append(i)
    quota = {
        key: min(len(pred_by_key.get(key, ())), len(slots))
        for key, slots in ref_by_key.items()
    }
    pairs = []
    for i in sorted(pred_avail):
        key = keyfn(pred_toks[i])
        if quota.get(key, 0) <= 0:
            continue
        slots = ref_by_key[key]
        prev_ref = prev_ref_holder[0]
        if prev_ref is not None and prev_ref + 1 in slots:
            j = prev_ref + 1
        else:
            j = slots[0]
        slots.remove(j)
        quota[key] -= 1
        pred_avail.discard(i)
        ref_avail.discard(j)
        pairs.append((i, j))
        prev_ref_holder[0] = j
    return pairs


def meteor_lite(pred: str, ref: str) -> float:
    """Two-stage (exact, then stemmed) unigram alignment scored with the
    harmonic-mean-plus-fragmentation-penalty formula."""
    pred_toks = _tokens(pred)
    ref_toks = _tokens(ref)
    if not pred_toks or not ref_toks:
        return 0.0
    pred_avail = set(range(len(pred_toks)))
    ref_avail = set(range(len(ref_toks)))
    prev_ref_holder = [None]
    pairs = _align_stage(pred_toks, ref_toks, pred_avail, ref_avail, lambda t: t, prev_ref_holder)
    pairs += _align_stage(pred_toks, ref_toks, pred_avail, ref_avail, stem, prev_ref_holder)
    m = len(pairs)
    if m == 0:
        return 0.0
    pairs.sort()
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    p = m / len(pred_toks)
    r = m / len(ref_toks)
    f_mean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1.0 - penalty)


def corpus_meteor(preds: list, refs: list) -> float:
    """Mean of per-pair METEOR-lite scores."""
    if not preds:
        return 0.0
    return sum(meteor_lite(p, r) for p, r in zip(preds, refs)) / len(preds)


@dataclass
class MetricReport:
    precision: float
    recall: float
    f1: float
    bleu: float
    meteor: float
    count: int
    buckets: dict = field(default_factory=dict)  # bucket label -> MetricReport

    def to_dict(self) -> dict:
        out = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "bleu": self.bleu,
            "meteor": self.meteor,
            "count": self.count,
        }
        if self.buckets:
            out["buckets"] = {k: v.to_dict() for k, v in self.buckets.items()}
        return out


def evaluate_pairs(preds: list, refs: list) -> MetricReport:
    p, r, f1 = corpus_bow_prf(preds, refs)
    return MetricReport(
        precision=p,
        recall=r,
        f1=f1,
        bleu=bleu(list(preds), list(refs)),
        meteor=corpus_meteor(preds, refs),
        count=len(preds),
    )


def bucket_label(length: int) -> str:
    return str(length) if length < 20 else "20+"


def _bucket_sort_key(label: str) -> int:
    return 20 if label == "20+" else int(label)


def bucketed_report(preds: list, refs: list, bucket_lengths: list = None) -> MetricReport:
    """Overall report plus per-bucket sub-reports.

    bucket_lengths gives the bucketing length of each pair (defaults to the
    reference's token count); lengths of 20 or more share the "20+" bucket.
    Empty buckets are omitted.
    """
    if bucket_lengths is None:
        bucket_lengths = [len(ref.split()) for ref in refs]
    groups = {}
    for pred, ref, length in zip(preds, refs, bucket_lengths):
        groups.setdefault(bucket_label(length), []).append((pred, ref))
    report = evaluate_pairs(list(preds), list(refs))
    for label in sorted(groups, key=_bucket_sort_key):
        bucket_preds, bucket_refs = zip(*groups[label])
        report.buckets[label] = evaluate_pairs(list(bucket_preds), list(bucket_refs))
    return report
