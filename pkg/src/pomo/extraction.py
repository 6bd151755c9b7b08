"""Appositive post-modifier extraction from parsed sentences.

A candidate is a PERSON mention plus the dependency projection of a token
that attaches to the mention via the "appos" relation. The projection is a
stand-in for the appositive noun phrase.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator

from .corpus import ParsedDocument, ParsedSentence, sentence_context

PM_SLOT = "<pm-slot>"


@dataclass(frozen=True)
class EntityMention:
    doc_id: str
    sent_index: int
    span: tuple  # [start, end) token indices, 0-based
    name: str


@dataclass(frozen=True)
class PMCandidate:
    doc_id: str
    source: str
    sent_index: int
    mention: EntityMention
    pm_head: int  # 0-based token index of the appositive head
    pm_span: tuple  # [start, end) after punctuation trimming
    pm_text: str
    prev_text: str
    sent_with_slot: str


def find_person_mentions(sent: ParsedSentence) -> list:
    """Maximal runs of contiguous PERSON-tagged tokens, in token order."""
    mentions = []
    start = None
    for i, tok in enumerate(sent.tokens):
        if tok.ner == "PERSON":
            if start is None:
                start = i
        elif start is not None:
            mentions.append(_mention(sent, start, i))
            start = None
    if start is not None:
        mentions.append(_mention(sent, start, len(sent.tokens)))
    return mentions


def _mention(sent: ParsedSentence, start: int, end: int) -> EntityMention:
    name = " ".join(tok.text for tok in sent.tokens[start:end])
    return EntityMention(doc_id=sent.doc_id, sent_index=sent.sent_index, span=(start, end), name=name)


def dependency_projection(sent: ParsedSentence, head_index: int) -> tuple:
    """Contiguous [start, end) span covering head_index and all its descendants.

    Descendants are collected transitively over head links; the span is the
    min..max hull of the collected indices (projective-tree assumption).
    """
    children = {}
    for i, tok in enumerate(sent.tokens):
        if tok.head > 0:
            children.setdefault(tok.head - 1, []).append(i)
    collected = set()
    stack = [head_index]
    while stack:
        node = stack.pop()
        if node in collected:
            continue
        collected.add(node)
        stack.extend(children.get(node, ()))
    return min(collected), max(collected) + 1


def _is_punct_token(text: str) -> bool:
    return not any(ch.isalnum() for ch in text)


def _trim_punctuation(sent: ParsedSentence, span: tuple) -> tuple:
    start, end = span
    while start < end and _is_punct_token(sent.tokens[start].text):
        start += 1
    while end > start and _is_punct_token(sent.tokens[end - 1].text):
        end -= 1
    return start, end


def build_slotted_sentence(sent: ParsedSentence, pm_span: tuple) -> str:
    """Replace pm_span, absorbing one adjacent delimiting comma per side."""
    start, end = pm_span
    if start > 0 and sent.tokens[start - 1].text == ",":
        start -= 1
    if end < len(sent.tokens) and sent.tokens[end].text == ",":
        end += 1
    parts = [tok.text for tok in sent.tokens[:start]] + [PM_SLOT] + [
        tok.text for tok in sent.tokens[end:]
    ]
    return " ".join(parts)


def extract_appositive_pm(doc: ParsedDocument, sent_index: int, strict: bool = False):
    """Extract the post-modifier candidate of one sentence, or None.

    Every token with deprel "appos" whose head sits inside a PERSON mention
    is an anchor. The leftmost anchor that yields a well-formed candidate
    wins; with strict=True, sentences with more than one anchor are skipped
    outright.
    """
    sent = doc.sentences[sent_index]
    mentions = find_person_mentions(sent)
    if not mentions:
        return None
    anchors = []
    for i, tok in enumerate(sent.tokens):
        if tok.deprel != "appos" or tok.head == 0:
            continue
        governor = tok.head - 1
        for mention in mentions:
            if mention.span[0] <= governor < mention.span[1]:
                anchors.append((i, mention))
                break
    if not anchors:
        return None
    if strict and len(anchors) > 1:
        return None
    prev_text, _ = sentence_context(doc, sent_index)
    for pm_head, mention in anchors:  # token order: leftmost appositive first
        raw_span = dependency_projection(sent, pm_head)
        pm_span = _trim_punctuation(sent, raw_span)
        if pm_span[0] >= pm_span[1]:
            continue
        m_start, m_end = mention.span
        if pm_span[0] < m_end and m_start < pm_span[1]:
            continue  # projection overlaps the mention: malformed parse
        if not (pm_span[0] <= pm_head < pm_span[1]):
            continue
        pm_tokens = [tok.text for tok in sent.tokens[pm_span[0]:pm_span[1]]]
        if all(_is_punct_token(t) for t in pm_tokens):
            continue
        return PMCandidate(
            doc_id=doc.doc_id,
            source=doc.source,
            sent_index=sent_index,
            mention=mention,
            pm_head=pm_head,
            pm_span=pm_span,
            pm_text=" ".join(pm_tokens),
            prev_text=prev_text,
            sent_with_slot=build_slotted_sentence(sent, pm_span),
        )
    return None


def extract_from_corpus(corpus: Iterable[ParsedDocument], strict: bool = False) -> Iterator[PMCandidate]:
    """At most one candidate per sentence, in corpus order."""
    for doc in corpus:
        for sent_index in range(len(doc.sentences)):
            candidate = extract_appositive_pm(doc, sent_index, strict=strict)
            if candidate is not None:
                yield candidate


def candidate_to_dict(cand: PMCandidate) -> dict:
    return {
        "doc_id": cand.doc_id,
        "source": cand.source,
        "sent_index": cand.sent_index,
        "entity_name": cand.mention.name,
        "mention_span": list(cand.mention.span),
        "pm_head": cand.pm_head,
        "pm_span": list(cand.pm_span),
        "pm_text": cand.pm_text,
        "prev_text": cand.prev_text,
        "sent_with_slot": cand.sent_with_slot,
    }


def candidate_from_dict(record: dict) -> PMCandidate:
    mention = EntityMention(
        doc_id=record["doc_id"],
        sent_index=record["sent_index"],
        span=tuple(record["mention_span"]),
        name=record["entity_name"],
    )
    return PMCandidate(
        doc_id=record["doc_id"],
        source=record["source"],
        sent_index=record["sent_index"],
        mention=mention,
        pm_head=record["pm_head"],
        pm_span=tuple(record["pm_span"]),
        pm_text=record["pm_text"],
        prev_text=record["prev_text"],
        sent_with_slot=record["sent_with_slot"],
    )
