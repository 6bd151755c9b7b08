"""Dataset assembly, entity-disjoint splitting, serialization, statistics."""

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import SOURCES
from .extraction import PMCandidate
from .kb import KBStore, link_entity
from .textutils import load_occupation_map, normalized_tokens

logger = logging.getLogger(__name__)

DEFAULT_SPLIT_RATIOS = (0.955, 0.0225, 0.0225)
PART_NAMES = ("train", "valid", "test")


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed into instances."""


@dataclass(frozen=True)
class InstanceClaim:
    key: str
    value: str
    relevant: bool


@dataclass(frozen=True)
class PomoInstance:
    id: str
    source: str
    entity_name: str
    kb_id: str
    prev_sentence: str
    sent_with_slot: str
    pm_target: str
    claims: tuple  # of InstanceClaim


@dataclass
class DatasetSplit:
    train: list = field(default_factory=list)
    valid: list = field(default_factory=list)
    test: list = field(default_factory=list)

    def parts(self):
        return {"train": self.train, "valid": self.valid, "test": self.test}


@dataclass
class BuildReport:
    built: int = 0
    dropped: int = 0


def build_instances(
    candidates: Iterable[PMCandidate],
    kb: KBStore,
    threshold: float = 0.30,
    ratio: float = 0.5,
    report: BuildReport = None,
) -> Iterator[PomoInstance]:
    """Link each candidate; linked ones become instances, the rest are
    dropped and counted on the report."""
    for cand in candidates:
        result = link_entity(cand.mention.name, cand.pm_text, kb, threshold=threshold, ratio=ratio)
        if result is None:
            if report is not None:
                report.dropped += 1
            continue
        ent = kb.get(result.kb_id)
        claims = tuple(
            InstanceClaim(key=c.key, value=c.value, relevant=flag)
            for c, flag in zip(ent.claims, result.relevant)
        )
        if report is not None:
            report.built += 1
        yield PomoInstance(
            id=f"{cand.source}-{cand.doc_id}-{cand.sent_index}",
            source=cand.source,
            entity_name=cand.mention.name,
            kb_id=result.kb_id,
            prev_sentence=cand.prev_text,
            sent_with_slot=cand.sent_with_slot,
            pm_target=cand.pm_text,
            claims=claims,
        )


def instance_to_dict(inst: PomoInstance) -> dict:
    return {
        "id": inst.id,
        "source": inst.source,
        "entity_name": inst.entity_name,
        "kb_id": inst.kb_id,
        "prev_sentence": inst.prev_sentence,
        "sent_with_slot": inst.sent_with_slot,
        "pm_target": inst.pm_target,
        "claims": [
            {"key": c.key, "value": c.value, "relevant": c.relevant} for c in inst.claims
        ],
    }


def instance_from_dict(record: dict) -> PomoInstance:
    claims = tuple(
        InstanceClaim(key=c["key"], value=c["value"], relevant=bool(c["relevant"]))
        for c in record["claims"]
    )
    return PomoInstance(
        id=record["id"],
        source=record["source"],
        entity_name=record["entity_name"],
        kb_id=record["kb_id"],
        prev_sentence=record["prev_sentence"],
        sent_with_slot=record["sent_with_slot"],
        pm_target=record["pm_target"],
        claims=claims,
    )


def write_instances(instances: Iterable[PomoInstance], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for inst in instances:
            handle.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_instances(path) -> list:
    instances = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                instances.append(instance_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DatasetFormatError(f"{path}, line {lineno}: {exc}") from exc
    return instances


def write_dataset(split: DatasetSplit, directory) -> dict:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, part in split.parts().items():
        counts[name] = write_instances(part, directory / f"{name}.jsonl")
    return counts


def read_dataset(directory) -> DatasetSplit:
    directory = Path(directory)
    parts = {}
    for name in PART_NAMES:
        path = directory / f"{name}.jsonl"
        if not path.exists():
            raise DatasetFormatError(f"missing dataset file: {path}")
        parts[name] = read_instances(path)
    return DatasetSplit(**parts)


def split_dataset(
    instances: list,
    ratios: tuple = DEFAULT_SPLIT_RATIOS,
    seed: int = 0,
) -> DatasetSplit:
    """Entity-disjoint, per-source stratified split.

    Entity groups are shuffled per source and assigned whole to the part
    whose share of that source's instances lags its ratio the most.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")

    groups = {}
    for inst in instances:
        groups.setdefault(inst.kb_id, []).append(inst)
    if len(groups) < 3:
        raise ValueError(f"need at least 3 distinct entities to split, got {len(groups)}")

    by_source = {}
    for kb_id, group in groups.items():
        by_source.setdefault(group[0].source, []).append(kb_id)

    split = DatasetSplit()
    part_lists = (split.train, split.valid, split.test)
    rng = random.Random(seed)
    for source in sorted(by_source):
        kb_ids = sorted(by_source[source])
        rng.shuffle(kb_ids)
        assigned = [0, 0, 0]
        total = 0
        for kb_id in kb_ids:
            size = len(groups[kb_id])
            total += size
            # Deficit of each part vs. its target share if it took the group;
            # give the group to the part that lags the most (ties: train
            # before valid before test, by scan order).
            deficits = [ratios[p] * total - assigned[p] for p in range(3)]
            best = max(range(3), key=lambda p: (deficits[p], -p))
            part_lists[best].extend(groups[kb_id])
            assigned[best] += size
    return split


@dataclass
class StatsReport:
    instance_count: int
    pm_length_mean: float
    pm_length_hist: dict  # length -> count
    relevant_claims_hist: dict  # count of relevant claims -> instance count
    fact_type_counts: list  # (key, count) sorted by count desc, key asc
    source_counts: dict  # source -> instance count


def dataset_stats(instances: list) -> StatsReport:
    lengths = {}
    relevant_hist = {}
    fact_counts = {}
    source_counts = {source: 0 for source in SOURCES}
    total_len = 0
    for inst in instances:
        n_tokens = len(inst.pm_target.split())
        total_len += n_tokens
        lengths[n_tokens] = lengths.get(n_tokens, 0) + 1
        n_rel = sum(1 for c in inst.claims if c.relevant)
        relevant_hist[n_rel] = relevant_hist.get(n_rel, 0) + 1
        for c in inst.claims:
            if c.relevant:
                fact_counts[c.key] = fact_counts.get(c.key, 0) + 1
        source_counts[inst.source] = source_counts.get(inst.source, 0) + 1
    mean = total_len / len(instances) if instances else 0.0
    fact_table = sorted(fact_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return StatsReport(
        instance_count=len(instances),
        pm_length_mean=mean,
        pm_length_hist=dict(sorted(lengths.items())),
        relevant_claims_hist=dict(sorted(relevant_hist.items())),
        fact_type_counts=fact_table,
        source_counts=source_counts,
    )


def stats_to_dict(report: StatsReport) -> dict:
    return {
        "instance_count": report.instance_count,
        "pm_length_mean": report.pm_length_mean,
        "pm_length_hist": {str(k): v for k, v in report.pm_length_hist.items()},
        "relevant_claims_hist": {str(k): v for k, v in report.relevant_claims_hist.items()},
        "fact_type_counts": [[k, v] for k, v in report.fact_type_counts],
        "source_counts": dict(report.source_counts),
    }


def occupation_distribution(instances: list, mapping: dict = None) -> list:
    """Per-entity occupation categories as (category, count, percentage).

    Each distinct kb_id gets the category of its first mapped
    occupation-keyed claim, else "other". Counts are over entities.
    """
    if mapping is None:
        mapping = load_occupation_map()
    lookup = mapping["mapping"]
    seen = {}
    for inst in instances:
        if inst.kb_id in seen:
            continue
        category = "other"
        for claim in inst.claims:
            if claim.key != "occupation":
                continue
            value = " ".join(normalized_tokens(claim.value))
            if value in lookup:
                category = lookup[value]
                break
        seen[inst.kb_id] = category
    counts = {}
    for category in seen.values():
        counts[category] = counts.get(category, 0) + 1
    total = len(seen)
    table = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [
        (category, count, 100.0 * count / total if total else 0.0)
        for category, count in table
    ]
