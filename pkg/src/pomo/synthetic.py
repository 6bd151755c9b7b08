"""Synthetic datasets whose generating rules are their own oracles.

Three families:
- a claim-selection task where a claim is relevant iff its value token
  appears in the context, with weakly informative keys;
- a copy task where the target is the relevant claim's value and a context
  cue reveals the relevant fact kind most of the time;
- random instance pools for split/stat properties and brute-force checks.
"""

import random

from .dataset import InstanceClaim, PomoInstance

SELECTION_KEYS = ("ka", "kb", "kc", "kd", "ke", "kf")
SELECTION_KEY_WEIGHTS = (2.0, 1.5, 1.0, 1.0, 1.0, 1.0)

COPY_KINDS = ("job", "team", "place", "award")
COPY_VALUES_PER_KIND = 12
COPY_CUE_PROBABILITY = 0.8


def _weighted_sample_two(rng: random.Random, weights: list) -> tuple:
    """Two distinct indices drawn without replacement, weight-proportional."""
    first = rng.choices(range(len(weights)), weights=weights, k=1)[0]
    rest = [w if i != first else 0.0 for i, w in enumerate(weights)]
    second = rng.choices(range(len(weights)), weights=rest, k=1)[0]
    return first, second


def synthetic_selection_dataset(n: int, seed: int = 0) -> list:
    """Instances with 6 single-token-value claims, exactly 2 relevant; a
    claim is relevant iff its value token appears in the context.  The four
    irrelevant claims' values are the distractors."""
    rng = random.Random(seed)
    content = [f"w{i:03d}" for i in range(40)]
    fillers = [f"f{i:02d}" for i in range(30)]
    instances = []
    for idx in range(n):
        keys = list(SELECTION_KEYS)
        rng.shuffle(keys)
        weights = [SELECTION_KEY_WEIGHTS[SELECTION_KEYS.index(k)] for k in keys]
        rel_a, rel_b = _weighted_sample_two(rng, weights)
        claim_values = rng.sample(content, 6)
        claims = tuple(
            InstanceClaim(key=keys[i], value=claim_values[i], relevant=i in (rel_a, rel_b))
            for i in range(6)
        )
        context_words = [
            rng.choice(fillers), rng.choice(fillers), rng.choice(fillers),
            claim_values[rel_a], claim_values[rel_b],
        ]
        rng.shuffle(context_words)
        cut = rng.randrange(0, 3)
        prev = context_words[:cut]
        curr = context_words[cut:]
        curr.insert(rng.randrange(len(curr) + 1), "<pm-slot>")
        instances.append(
            PomoInstance(
                id=f"syn-sel-{idx}",
                source="other",
                entity_name=f"Entity {idx}",
                kb_id=f"SE{idx:05d}",
                prev_sentence=" ".join(prev),
                sent_with_slot=" ".join(curr),
                pm_target=f"the {claim_values[rel_a]} and {claim_values[rel_b]}",
                claims=claims,
            )
        )
    return instances


def copy_value_tokens(kind: str, index: int) -> list:
    return [f"{kind}{index}a", f"{kind}{index}b"]


def synthetic_copy_dataset(n: int, seed: int = 0) -> list:
    """Instances whose target is the single relevant claim's two-token value;
    the context cues the relevant fact kind with probability 0.8."""
    rng = random.Random(seed)
    fillers = [f"f{i:02d}" for i in range(10)]
    instances = []
    for idx in range(n):
        rel_kind_idx = rng.randrange(len(COPY_KINDS))
        claims = []
        target = None
        for k, kind in enumerate(COPY_KINDS):
            value = " ".join(copy_value_tokens(kind, rng.randrange(COPY_VALUES_PER_KIND)))
            relevant = k == rel_kind_idx
            if relevant:
                target = value
            claims.append(InstanceClaim(key=kind, value=value, relevant=relevant))
        cue = (
            f"cue_{COPY_KINDS[rel_kind_idx]}"
            if rng.random() < COPY_CUE_PROBABILITY
            else rng.choice(fillers)
        )
        prev = " ".join(rng.choice(fillers) for _ in range(2))
        curr = " ".join(["the", "<pm-slot>", "was", cue])
        instances.append(
            PomoInstance(
                id=f"syn-copy-{idx}",
                source="other",
                entity_name=f"Entity {idx}",
                kb_id=f"CP{idx:05d}",
                prev_sentence=prev,
                sent_with_slot=curr,
                pm_target=target,
                claims=tuple(claims),
            )
        )
    return instances


def synthetic_split_instances(n_entities: int = 100, seed: int = 0, sources=("nyt", "cnn")) -> list:
    """Entity groups of 1–5 instances spread evenly over the given sources."""
    rng = random.Random(seed)
    instances = []
    for e in range(n_entities):
        source = sources[e % len(sources)]
        for j in range(rng.randint(1, 5)):
            instances.append(
                PomoInstance(
                    id=f"syn-split-{e}-{j}",
                    source=source,
                    entity_name=f"Entity {e}",
                    kb_id=f"SP{e:05d}",
                    prev_sentence="before",
                    sent_with_slot=f"x{e} <pm-slot> y{j}",
                    pm_target=f"t{e} u{j}",
                    claims=(InstanceClaim(key="occupation", value=f"t{e}", relevant=True),),
                )
            )
    return instances


def random_claim_instances(n: int, seed: int = 0, key_pool: int = 10) -> list:
    """Instances with random keys/flags for brute-force comparisons."""
    rng = random.Random(seed)
    keys = [f"type{i}" for i in range(key_pool)]
    instances = []
    for idx in range(n):
        n_claims = rng.randint(1, 8)
        claims = tuple(
            InstanceClaim(
                key=rng.choice(keys),
                value=f"v{rng.randrange(100)}",
                relevant=rng.random() < 0.4,
            )
            for _ in range(n_claims)
        )
        instances.append(
            PomoInstance(
                id=f"syn-rand-{idx}",
                source="other",
                entity_name=f"Entity {idx}",
                kb_id=f"RA{idx:05d}",
                prev_sentence="",
                sent_with_slot="a <pm-slot> b",
                pm_target="some text",
                claims=claims,
            )
        )
    return instances
