"""Reading, validating, and iterating dependency-parsed, NER-tagged documents.

The canonical on-disk format is line-delimited JSON, one document per line:

    {"doc_id": str, "source": "nyt"|"cnn"|"dm"|"other",
     "sentences": [{"tokens": [{"text": str, "ner": str,
                                "head": int, "deprel": str}]}]}

Head indices are 1-based within the sentence; 0 marks the root token.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

SOURCES = ("nyt", "cnn", "dm", "other")


class CorpusFormatError(ValueError):
    """A corpus line could not be parsed or violates a document invariant."""


@dataclass(frozen=True)
class ParsedToken:
    text: str
    ner: str
    head: int  # 1-based index of governing token, 0 for root
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    doc_id: str
    sent_index: int
    tokens: tuple

    def text(self) -> str:
        return " ".join(tok.text for tok in self.tokens)


@dataclass(frozen=True)
class ParsedDocument:
    doc_id: str
    source: str
    sentences: tuple


def document_from_dict(record: dict, doc_index: int = 0) -> ParsedDocument:
    """Build a ParsedDocument from a decoded JSON record.

    Unknown source tags are mapped to "other" with a warning; structural
    problems raise CorpusFormatError.
    """
    try:
        doc_id = record["doc_id"]
        source = record["source"]
        raw_sentences = record["sentences"]
    except (KeyError, TypeError) as exc:
        raise CorpusFormatError(f"document record missing field: {exc}") from exc
    if source not in SOURCES:
        logger.warning("doc %s: unknown source tag %r mapped to 'other'", doc_id, source)
        source = "other"
    sentences = []
    for sent_index, raw_sent in enumerate(raw_sentences):
        try:
            tokens = tuple(
                ParsedToken(
                    text=tok["text"],
                    ner=tok["ner"],
                    head=int(tok["head"]),
                    deprel=tok["deprel"],
                )
                for tok in raw_sent["tokens"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(
                f"doc {doc_id} sentence {sent_index}: bad token record ({exc})"
            ) from exc
        sentences.append(ParsedSentence(doc_id=doc_id, sent_index=sent_index, tokens=tokens))
    return ParsedDocument(doc_id=doc_id, source=source, sentences=tuple(sentences))


def document_to_dict(doc: ParsedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "source": doc.source,
        "sentences": [
            {
                "tokens": [
                    {"text": t.text, "ner": t.ner, "head": t.head, "deprel": t.deprel}
                    for t in sent.tokens
                ]
            }
            for sent in doc.sentences
        ],
    }


def validate_document(doc: ParsedDocument) -> list:
    """Return human-readable invariant violations; empty list means valid.

    Checks, per sentence: non-empty tokens, head indices in range, no
    self-heads, exactly one root, and that head links form a single tree.
    """
    violations = []
    for sent in doc.sentences:
        where = f"doc {doc.doc_id} sentence {sent.sent_index}"
        n = len(sent.tokens)
        if n == 0:
            violations.append(f"{where}: sentence has no tokens")
            continue
        roots = []
        in_range = True
        for i, tok in enumerate(sent.tokens):
            if not 0 <= tok.head <= n:
                violations.append(
                    f"{where} token {i}: head {tok.head} outside [0, {n}]"
                )
                in_range = False
            elif tok.head == i + 1:
                violations.append(f"{where} token {i}: token is its own head")
                in_range = False
            elif tok.head == 0:
                roots.append(i)
        if len(roots) != 1:
            violations.append(
                f"{where}: expected exactly one root token, found {len(roots)}"
            )
        if in_range and len(roots) == 1:
            # Walk each token toward the root; a revisit inside one walk is a
            # cycle. Each cycle is reported once, naming its smallest index.
            reaches_root = set()
            on_cycle = set()
            for i in range(n):
                path = []
                j = i
                while j not in reaches_root and j not in on_cycle and sent.tokens[j].head != 0:
                    if j in path:
                        cycle = path[path.index(j):]
                        on_cycle.update(cycle)
                        violations.append(
                            f"{where} token {min(cycle)}: head links form a cycle"
                        )
                        break
                    path.append(j)
                    j = sent.tokens[j].head - 1
                else:
                    if j in reaches_root or sent.tokens[j].head == 0:
                        reaches_root.update(path)
                        reaches_root.add(j)
    for expected, sent in enumerate(doc.sentences):
        if sent.sent_index != expected:
            violations.append(
                f"doc {doc.doc_id}: sentence at position {expected} has sent_index {sent.sent_index}"
            )
    return violations


def load_parsed_corpus(path) -> Iterator[ParsedDocument]:
    """Stream documents from a JSONL corpus file, validating each one.

    Raises CorpusFormatError naming the offending line for malformed JSON,
    duplicate doc_ids, or invariant violations.
    """
    seen_ids = set()
    with open(path, encoding="utf-8") as handle:
        for line_num, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path} line {line_num}: invalid JSON ({exc})") from exc
            try:
                doc = document_from_dict(record)
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path} line {line_num}: {exc}") from exc
            if doc.doc_id in seen_ids:
                raise CorpusFormatError(
                    f"{path} line {line_num}: duplicate doc_id {doc.doc_id!r}"
                )
            seen_ids.add(doc.doc_id)
            violations = validate_document(doc)
            if violations:
                raise CorpusFormatError(
                    f"{path} line {line_num}: invalid document: " + "; ".join(violations)
                )
            yield doc


def write_parsed_corpus(docs: Iterable[ParsedDocument], path) -> int:
    """Write documents as JSONL; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(document_to_dict(doc), ensure_ascii=False) + "\n")
            count += 1
    return count


def sentence_context(doc: ParsedDocument, sent_index: int) -> tuple:
    """(previous sentence text, current sentence text) for a sentence.

    The previous text is "" for the first sentence. Texts are plain
    space-joins of the token surfaces.
    """
    if not 0 <= sent_index < len(doc.sentences):
        raise IndexError(
            f"sentence index {sent_index} out of range for doc {doc.doc_id} "
            f"with {len(doc.sentences)} sentences"
        )
    curr = doc.sentences[sent_index].text()
    prev = doc.sentences[sent_index - 1].text() if sent_index > 0 else ""
    return prev, curr
