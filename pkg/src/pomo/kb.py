"""Wikidata-style claim store and claim-overlap entity linking.

Entities are linked to the store by exact (case-folded) label/alias match;
ambiguity is resolved by counting claims whose values overlap the extracted
post-modifier, and a minimum-coverage threshold discards weak links. The
per-claim overlap flags double as distant-supervision relevance labels.
"""

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .textutils import content_token_set, normalized_tokens, stopwords

DEFAULT_RELEVANCE_RATIO = 0.5
DEFAULT_COVERAGE_THRESHOLD = 0.30


class KBFormatError(ValueError):
    """Raised when a KB file cannot be parsed into entity records."""


@dataclass(frozen=True)
class Claim:
    key: str
    value: str


@dataclass(frozen=True)
class KBEntity:
    kb_id: str
    label: str
    aliases: tuple
    claims: tuple


@dataclass(frozen=True)
class LinkResult:
    kb_id: str
    coverage: float
    relevant: tuple  # booleans aligned with the entity's claim list


class KBStore:
    """Immutable after load; lookup is exact match over case-folded names."""

    def __init__(self, entities: Iterable[KBEntity]):
        self._entities = {}
        self._by_name = {}
        for ent in entities:
            if ent.kb_id in self._entities:
                raise KBFormatError(f"duplicate kb_id {ent.kb_id!r}")
            self._entities[ent.kb_id] = ent
            for name in (ent.label, *ent.aliases):
                self._by_name.setdefault(name.casefold(), []).append(ent.kb_id)

    def __len__(self) -> int:
        return len(self._entities)

    def __iter__(self):
        return iter(self._entities.values())

    def get(self, kb_id: str) -> KBEntity:
        return self._entities[kb_id]

    def candidates(self, name: str) -> list:
        """All entities whose label or an alias equals name (case-folded)."""
        ids = self._by_name.get(name.casefold(), ())
        return [self._entities[kb_id] for kb_id in sorted(set(ids))]


def entity_from_dict(record: dict) -> KBEntity:
    claims = []
    for claim in record.get("claims", []):
        key = claim["key"].strip()
        value = claim["value"].strip()
        if not key or not value:
            raise KBFormatError("claim key and value must be non-empty")
        claims.append(Claim(key=key, value=value))
    label = record["label"].strip()
    if not label:
        raise KBFormatError("entity label must be non-empty")
    kb_id = record["kb_id"].strip()
    if not kb_id:
        raise KBFormatError("entity kb_id must be non-empty")
    return KBEntity(
        kb_id=kb_id,
        label=label,
        aliases=tuple(record.get("aliases", [])),
        claims=tuple(claims),
    )


def entity_to_dict(ent: KBEntity) -> dict:
    return {
        "kb_id": ent.kb_id,
        "label": ent.label,
        "aliases": list(ent.aliases),
        "claims": [{"key": c.key, "value": c.value} for c in ent.claims],
    }


def load_kb(path) -> KBStore:
    """Read one JSON entity record per line into a KBStore."""
    entities = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                entities.append(entity_from_dict(record))
            except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
                raise KBFormatError(f"{path}, line {lineno}: {exc}") from exc
    return KBStore(entities)


def write_kb(entities: Iterable[KBEntity], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for ent in entities:
            handle.write(json.dumps(entity_to_dict(ent), ensure_ascii=False) + "\n")
            count += 1
    return count


def claim_relevance(claim: Claim, pm_text: str, ratio: float = DEFAULT_RELEVANCE_RATIO) -> bool:
    """True iff at least ceil(ratio * k) of the value's k content tokens
    appear among the post-modifier's tokens."""
    value_tokens = [t for t in normalized_tokens(claim.value) if t not in stopwords()]
    k = len(value_tokens)
    if k == 0:
        return False
    pm_tokens = set(normalized_tokens(pm_text))
    hits = sum(1 for t in value_tokens if t in pm_tokens)
    return hits >= math.ceil(ratio * k)


def relevance_flags(ent: KBEntity, pm_text: str, ratio: float = DEFAULT_RELEVANCE_RATIO) -> tuple:
    return tuple(claim_relevance(c, pm_text, ratio=ratio) for c in ent.claims)


def claim_coverage(ent: KBEntity, pm_text: str, relevant: tuple) -> float:
    """Fraction of the post-modifier's distinct content-token types found in
    the union of the relevant claims' value tokens."""
    pm_types = content_token_set(pm_text)
    if not pm_types:
        return 0.0
    covered = set()
    for claim, flag in zip(ent.claims, relevant):
        if flag:
            covered.update(content_token_set(claim.value))
    return len(pm_types & covered) / len(pm_types)


def link_entity(
    name: str,
    pm_text: str,
    kb: KBStore,
    threshold: float = DEFAULT_COVERAGE_THRESHOLD,
    ratio: float = DEFAULT_RELEVANCE_RATIO,
):
    """Rank name-matched candidates and return the best adequately-covered
    one, or None (the entity is discarded)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    scored = []
    for ent in kb.candidates(name):
        relevant = relevance_flags(ent, pm_text, ratio=ratio)
        coverage = claim_coverage(ent, pm_text, relevant)
        scored.append((-sum(relevant), -coverage, ent.kb_id, coverage, relevant))
    scored.sort()
    for _, _, kb_id, coverage, relevant in scored:
        if coverage >= threshold and any(relevant):
            return LinkResult(kb_id=kb_id, coverage=coverage, relevant=relevant)
    return None


def linker_agreement(a: dict, b: dict) -> float:
    """Percent of shared names mapped to the same kb_id by both linkers."""
    shared = set(a) & set(b)
    if not shared:
        raise ValueError("linkers share no names; agreement is undefined")
    agree = sum(1 for name in shared if a[name] == b[name])
    return 100.0 * agree / len(shared)
