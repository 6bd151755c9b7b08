import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pomo.kb import (
    Claim,
    KBEntity,
    KBFormatError,
    KBStore,
    claim_coverage,
    claim_relevance,
    entity_from_dict,
    entity_to_dict,
    link_entity,
    linker_agreement,
    load_kb,
    relevance_flags,
    write_kb,
)


def entity(kb_id, label, claims, aliases=()):
    return KBEntity(
        kb_id=kb_id,
        label=label,
        aliases=tuple(aliases),
        claims=tuple(Claim(key=k, value=v) for k, v in claims),
    )


def test_fixture_kb_loads(fixture_kb):
    assert len(list(fixture_kb)) == 12
    smiths = fixture_kb.candidates("John Smith")
    assert [e.kb_id for e in smiths] == ["Q105", "Q201"]


def test_alias_and_case_folded_lookup(fixture_kb):
    by_alias = fixture_kb.candidates("Angela Merkel")
    assert [e.kb_id for e in by_alias] == ["Q567"]
    assert [e.kb_id for e in fixture_kb.candidates("ANGELA MERKEL")] == ["Q567"]
    assert fixture_kb.candidates("Nobody Here") == []


def test_duplicate_kb_id_rejected():
    ent = entity("Q1", "A", [("k", "v")])
    with pytest.raises(KBFormatError):
        KBStore([ent, ent])


def test_entity_from_dict_validates():
    with pytest.raises(KBFormatError):
        entity_from_dict({"kb_id": "", "label": "x", "aliases": [], "claims": []})
    with pytest.raises(KBFormatError):
        entity_from_dict({"kb_id": "Q1", "label": " ", "aliases": [], "claims": []})
    ent = entity_from_dict(
        {"kb_id": "Q1", "label": "Ada", "aliases": ["A."], "claims": [{"key": "k", "value": "v"}]}
    )
    assert ent.claims == (Claim(key="k", value="v"),)


def test_entity_dict_round_trip(fixture_kb):
    for ent in fixture_kb:
        assert entity_from_dict(entity_to_dict(ent)) == ent


def test_write_then_load_kb(tmp_path, fixture_kb):
    path = tmp_path / "kb.jsonl"
    count = write_kb(list(fixture_kb), path)
    assert count == 12
    again = load_kb(path)
    assert list(again) == list(fixture_kb)


def test_load_kb_reports_line_numbers(tmp_path):
    path = tmp_path / "kb.jsonl"
    path.write_text('{"kb_id": "Q1", "label": "A", "aliases": [], "claims": []}\n{bad\n')
    with pytest.raises(KBFormatError) as err:
        load_kb(path)
    assert "2" in str(err.value)


def test_claim_relevance_majority_rule():
    # k content tokens in the value; at least ceil(0.5 * k) must appear
    # among the post-modifier's content tokens.
    pm = "the folk singer"
    assert claim_relevance(Claim("genre", "folk music"), pm)  # 1 of 2
    assert not claim_relevance(Claim("origin", "irish folk music trio"), pm)  # 1 of 4
    assert claim_relevance(Claim("occupation", "singer"), pm)  # 1 of 1
    assert not claim_relevance(Claim("stop", "of the"), pm)  # no content tokens


def test_claim_relevance_ratio_parameter():
    pm = "alpha beta gamma"
    claim = Claim("k", "alpha beta delta epsilon")  # 2 of 4 hit
    assert claim_relevance(claim, pm, ratio=0.5)
    assert not claim_relevance(claim, pm, ratio=0.75)  # needs ceil(3) = 3


def test_relevance_is_case_and_punct_insensitive():
    claim = Claim("employer", "Massachusetts Institute of Technology")
    pm = "the massachusetts institute of technology professor ,"
    assert claim_relevance(claim, pm)


def test_coverage_counts_distinct_covered_types():
    ent = entity("Q1", "Ada", [("occupation", "singer"), ("genre", "folk music")])
    flags = relevance_flags(ent, "the folk singer")
    assert flags == (True, True)
    assert claim_coverage(ent, "the folk singer", flags) == pytest.approx(1.0)
    # Only the relevant claims' tokens count toward coverage.
    assert claim_coverage(ent, "the folk singer", (True, False)) == pytest.approx(0.5)


def test_linking_boundary_accepts_at_threshold():
    # 3 of 10 content tokens covered: coverage 0.30 exactly, accepted.
    pm_ten = "alpha beta gamma delta epsilon zeta eta theta iota kappa"
    ent = entity("Q1", "Ada", [("k", "alpha beta gamma")])
    kb = KBStore([ent])
    result = link_entity("Ada", pm_ten, kb, threshold=0.30)
    assert result is not None
    assert result.coverage == pytest.approx(0.3)

    # 2 of 7 covered: coverage just below 0.30, rejected.
    pm_seven = "alpha beta gamma delta epsilon zeta eta"
    ent2 = entity("Q2", "Bo", [("k", "alpha beta")])
    kb2 = KBStore([ent2])
    assert link_entity("Bo", pm_seven, kb2, threshold=0.30) is None
    assert link_entity("Bo", pm_seven, kb2, threshold=2 / 7) is not None


def test_link_requires_at_least_one_relevant_claim():
    # High lexical overlap but no single claim passes the relevance rule;
    # even a zero threshold cannot produce a link then.
    ent = entity("Q1", "Ada", [("k", "alpha beta gamma delta epsilon zeta eta theta")])
    kb = KBStore([ent])
    assert link_entity("Ada", "alpha beta", kb) is None
    assert link_entity("Ada", "alpha beta", kb, threshold=1e-9) is None


def test_link_rejects_out_of_range_threshold():
    kb = KBStore([entity("Q1", "Ada", [("k", "alpha")])])
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            link_entity("Ada", "alpha", kb, threshold=bad)


def test_link_prefers_more_relevant_claims(fixture_kb):
    result = link_entity("John Smith", "the veteran goalkeeper", fixture_kb)
    assert result is not None
    assert result.kb_id == "Q201"
    assert result.relevant == (True, False)


def test_link_unknown_name_returns_none(fixture_kb):
    assert link_entity("Nobody Here", "the famous nobody", fixture_kb) is None


def test_link_ties_break_on_kb_id():
    claims = [("k", "alpha")]
    kb = KBStore([entity("Q2", "Ada", claims), entity("Q1", "Ada", claims)])
    result = link_entity("Ada", "alpha beta", kb)
    assert result is not None
    assert result.kb_id == "Q1"


def test_link_insensitive_to_entity_order(fixture_kb):
    shuffled = list(fixture_kb)
    random.Random(5).shuffle(shuffled)
    kb = KBStore(shuffled)
    for name, pm in [
        ("John Smith", "the veteran goalkeeper"),
        ("Noam Chomsky", "the Massachusetts Institute of Technology professor and antiwar activist"),
        ("Angela Merkel", "the German chancellor"),
    ]:
        a = link_entity(name, pm, fixture_kb)
        b = link_entity(name, pm, kb)
        assert a == b


WORDS = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"]


@st.composite
def link_cases(draw):
    pm = " ".join(draw(st.lists(st.sampled_from(WORDS), min_size=1, max_size=6)))
    n_entities = draw(st.integers(min_value=1, max_value=3))
    entities = []
    for i in range(n_entities):
        n_claims = draw(st.integers(min_value=1, max_value=3))
        claims = [
            ("k%d" % j, " ".join(draw(st.lists(st.sampled_from(WORDS), min_size=1, max_size=3))))
            for j in range(n_claims)
        ]
        entities.append(entity("Q%d" % i, "Ada", claims))
    t_low = draw(st.floats(min_value=0.01, max_value=1.0))
    t_high = draw(st.floats(min_value=0.01, max_value=1.0))
    if t_low > t_high:
        t_low, t_high = t_high, t_low
    return KBStore(entities), pm, t_low, t_high


@settings(max_examples=200, deadline=None)
@given(link_cases())
def test_threshold_monotonicity(case):
    # Raising the threshold can only remove links, never add them.
    kb, pm, t_low, t_high = case
    high = link_entity("Ada", pm, kb, threshold=t_high)
    if high is not None:
        low = link_entity("Ada", pm, kb, threshold=t_low)
        assert low is not None
        assert low.coverage >= t_low


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.sampled_from(WORDS), min_size=1, max_size=6),
    st.lists(st.sampled_from(WORDS), min_size=1, max_size=4),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_relevance_ratio_monotonicity(pm_words, value_words, r1, r2):
    lo, hi = min(r1, r2), max(r1, r2)
    claim = Claim("k", " ".join(value_words))
    pm = " ".join(pm_words)
    if claim_relevance(claim, pm, ratio=hi):
        assert claim_relevance(claim, pm, ratio=lo)


def test_linker_agreement():
    a = {"x": "Q1", "y": "Q2", "z": None}
    b = {"x": "Q1", "y": "Q3", "z": None, "w": "Q9"}
    # Shared keys: x (agree), y (disagree), z (agree on no-link).
    assert linker_agreement(a, b) == pytest.approx(100.0 * 2 / 3)
    with pytest.raises(ValueError):
        linker_agreement({"x": "Q1"}, {"y": "Q1"})
