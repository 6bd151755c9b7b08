"""Linearize dataset instances into generator input sequences."""

import logging
from dataclasses import dataclass

from .dataset import PomoInstance
from .selection import select_top_n
from .vocab import CLAIM_SEP, KEY_SEP, VALUE_SEP, Vocabulary, GEN_SPECIALS

logger = logging.getLogger(__name__)

DEFAULT_MAX_INPUT_LEN = 500

CLAIM_SOURCES = ("all", "oracle", "e2e", "context_only", "claims_only")


@dataclass(frozen=True)
class LinearizedInput:
    tokens: tuple
    context_span: tuple  # [start, end) of prev + slotted sentence
    prev_span: tuple  # [start, end) of the previous sentence
    curr_span: tuple  # [start, end) of the slotted sentence
    claim_spans: tuple  # (start, end) per included claim, post-truncation
    claim_indices: tuple  # positions of included claims in instance.claims
    claim_relevant: tuple  # relevance flags aligned with claim_spans


def parse_claim_source(source: str) -> tuple:
    """Split e.g. "ranker:2" into ("ranker", 2); plain sources get (s, None)."""
    if source.startswith("ranker:"):
        k = int(source.split(":", 1)[1])
        if k < 0:
            raise ValueError(f"ranker top-k must be non-negative, got {k}")
        return "ranker", k
    if source not in CLAIM_SOURCES:
        raise ValueError(f"unknown claim source {source!r}")
    return source, None


def _included_claims(instance: PomoInstance, source: str, scores=None) -> list:
    kind, k = parse_claim_source(source)
    if kind in ("context_only",):
        return []
    if kind in ("all", "e2e", "claims_only"):
        return list(range(len(instance.claims)))
    if kind == "oracle":
        return [i for i, c in enumerate(instance.claims) if c.relevant]
    if kind == "ranker":
        if scores is None:
            raise ValueError("ranker claim source requires per-claim scores")
        return sorted(select_top_n(scores, k))
    raise AssertionError(kind)


def linearize(
    instance: PomoInstance,
    source: str = "all",
    max_input_len: int = DEFAULT_MAX_INPUT_LEN,
    scores=None,
) -> LinearizedInput:
    """Context followed by demarcated claims, truncated from the right."""
    prev_tokens = instance.prev_sentence.split()
    curr_tokens = instance.sent_with_slot.split()
    if source == "claims_only":
        prev_tokens, curr_tokens = [], []
    tokens = list(prev_tokens) + list(curr_tokens)
    prev_span = (0, len(prev_tokens))
    curr_span = (len(prev_tokens), len(tokens))
    if len(tokens) > max_input_len:
        logger.warning(
            "instance %s: context of %d tokens truncated to %d",
            instance.id, len(tokens), max_input_len,
        )
        tokens = tokens[:max_input_len]
        prev_span = (0, min(prev_span[1], max_input_len))
        curr_span = (min(curr_span[0], max_input_len), len(tokens))
    context_span = (0, len(tokens))

    claim_spans = []
    claim_indices = []
    claim_relevant = []
    for idx in _included_claims(instance, source, scores=scores):
        claim = instance.claims[idx]
        piece = [CLAIM_SEP, KEY_SEP, *claim.key.split(), VALUE_SEP, *claim.value.split()]
        start = len(tokens)
        room = max_input_len - start
        if room <= 0:
            break
        piece = piece[:room]
        tokens.extend(piece)
        claim_spans.append((start, len(tokens)))
        claim_indices.append(idx)
        claim_relevant.append(instance.claims[idx].relevant)
    return LinearizedInput(
        tokens=tuple(tokens),
        context_span=context_span,
        prev_span=prev_span,
        curr_span=curr_span,
        claim_spans=tuple(claim_spans),
        claim_indices=tuple(claim_indices),
        claim_relevant=tuple(claim_relevant),
    )


def target_tokens(instance: PomoInstance) -> list:
    return instance.pm_target.split()


def build_gen_vocab(instances: list, size: int = 50_000, source: str = "all") -> Vocabulary:
    """Vocabulary over linearized inputs and targets of the training set."""
    def streams():
        for inst in instances:
            yield linearize(inst, source=source).tokens
            yield target_tokens(inst)

    return Vocabulary.build(streams(), size=size, specials=GEN_SPECIALS)
