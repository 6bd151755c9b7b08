"""Shared construction helpers for the test suite."""

from pomo.corpus import ParsedDocument, ParsedSentence, ParsedToken
from pomo.dataset import InstanceClaim, PomoInstance


def make_sentence(rows, doc_id="t", sent_index=0) -> ParsedSentence:
    """rows: (text, ner, head, deprel) tuples with 1-based heads."""
    tokens = tuple(ParsedToken(text=t, ner=n, head=h, deprel=d) for t, n, h, d in rows)
    return ParsedSentence(doc_id=doc_id, sent_index=sent_index, tokens=tokens)


def make_document(sentence_rows, doc_id="t", source="nyt") -> ParsedDocument:
    sentences = tuple(
        make_sentence(rows, doc_id=doc_id, sent_index=i)
        for i, rows in enumerate(sentence_rows)
    )
    return ParsedDocument(doc_id=doc_id, source=source, sentences=sentences)


def make_instance(
    claims,
    inst_id="nyt-x-0",
    source="nyt",
    entity_name="Ada Example",
    kb_id="Q1",
    prev_sentence="She arrived early .",
    sent_with_slot="Ada Example <pm-slot> spoke .",
    pm_target="the famous example",
) -> PomoInstance:
    """claims: (key, value, relevant) triples."""
    return PomoInstance(
        id=inst_id,
        source=source,
        entity_name=entity_name,
        kb_id=kb_id,
        prev_sentence=prev_sentence,
        sent_with_slot=sent_with_slot,
        pm_target=pm_target,
        claims=tuple(InstanceClaim(key=k, value=v, relevant=r) for k, v, r in claims),
    )
