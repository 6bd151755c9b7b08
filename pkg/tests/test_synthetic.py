from collections import Counter

from pomo.synthetic import (
    COPY_KINDS,
    SELECTION_KEYS,
    random_claim_instances,
    synthetic_copy_dataset,
    synthetic_selection_dataset,
    synthetic_split_instances,
)


def test_selection_dataset_shape_and_relevance_rule():
    instances = synthetic_selection_dataset(200, seed=1)
    assert len(instances) == 200
    for inst in instances:
        assert len(inst.claims) == 6
        assert sorted(c.key for c in inst.claims) == sorted(SELECTION_KEYS)
        assert sum(c.relevant for c in inst.claims) == 2
        context = set(inst.prev_sentence.split()) | set(inst.sent_with_slot.split())
        for claim in inst.claims:
            assert claim.relevant == (claim.value in context)
        rel_values = [c.value for c in inst.claims if c.relevant]
        for value in rel_values:
            assert value in inst.pm_target.split()


def test_selection_dataset_key_skew():
    # ka and kb carry higher relevance weight, so over many draws they are
    # relevant more often than the uniform keys.
    instances = synthetic_selection_dataset(2000, seed=2)
    rel_counts = Counter(
        c.key for inst in instances for c in inst.claims if c.relevant
    )
    assert rel_counts["ka"] > rel_counts["kc"]
    assert rel_counts["kb"] > rel_counts["kc"]


def test_selection_dataset_is_seed_deterministic():
    assert synthetic_selection_dataset(50, seed=7) == synthetic_selection_dataset(50, seed=7)
    assert synthetic_selection_dataset(50, seed=7) != synthetic_selection_dataset(50, seed=8)


def test_copy_dataset_shape_and_target_rule():
    instances = synthetic_copy_dataset(300, seed=3)
    assert len(instances) == 300
    for inst in instances:
        assert [c.key for c in inst.claims] == list(COPY_KINDS)
        assert sum(c.relevant for c in inst.claims) == 1
        relevant = next(c for c in inst.claims if c.relevant)
        assert inst.pm_target == relevant.value
        assert len(relevant.value.split()) == 2
        assert inst.sent_with_slot.split()[:3] == ["the", "<pm-slot>", "was"]


def test_copy_dataset_cue_statistics():
    instances = synthetic_copy_dataset(2000, seed=4)
    cued = 0
    for inst in instances:
        cue = inst.sent_with_slot.split()[-1]
        relevant = next(c for c in inst.claims if c.relevant)
        if cue.startswith("cue_"):
            assert cue == f"cue_{relevant.key}"
            cued += 1
    # cue probability is 0.8; allow generous sampling slack
    assert 0.74 <= cued / len(instances) <= 0.86


def test_split_instances_group_structure():
    instances = synthetic_split_instances(100, seed=5)
    by_entity = Counter(inst.kb_id for inst in instances)
    assert len(by_entity) == 100
    assert all(1 <= n <= 5 for n in by_entity.values())
    sources = {inst.kb_id: inst.source for inst in instances}
    assert set(sources.values()) == {"nyt", "cnn"}
    # each entity sits in exactly one source
    for inst in instances:
        assert inst.source == sources[inst.kb_id]


def test_split_instances_custom_sources():
    instances = synthetic_split_instances(9, seed=0, sources=("dm",))
    assert {inst.source for inst in instances} == {"dm"}


def test_random_claim_instances_shape():
    instances = random_claim_instances(100, seed=6, key_pool=4)
    assert len(instances) == 100
    for inst in instances:
        assert 1 <= len(inst.claims) <= 8
        for claim in inst.claims:
            assert claim.key in {f"type{i}" for i in range(4)}
    assert random_claim_instances(100, seed=6, key_pool=4) == instances
