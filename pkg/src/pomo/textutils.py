"""Shared token normalization, stopword filtering, and light stemming.

Both the KB-linking heuristics and the bag-of-words metrics depend on the
same notion of a "content token", so it lives here.
"""

import functools
import json
from importlib import resources


def _data_text(name: str) -> str:
    return resources.files("pomo.data").joinpath(name).read_text(encoding="utf-8")


@functools.lru_cache(maxsize=1)
def stopwords() -> frozenset:
    """The shipped 179-word English stopword list."""
    words = [
        line.strip()
        for line in _data_text("stopwords.txt").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    return frozenset(words)


@functools.lru_cache(maxsize=1)
def stem_rules() -> tuple:
    """Suffix-stripping rules as (suffix, min_stem_length) pairs, in file order."""
    rules = []
    for line in _data_text("stem_rules.txt").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        suffix, min_len = line.split("\t")
        rules.append((suffix, int(min_len)))
    return tuple(rules)


def normalize_token(token: str) -> str:
    """Case-fold and strip leading/trailing non-alphanumeric characters.

    Bare punctuation normalizes to the empty string; clitics like "'s"
    reduce to their letter core ("s") so the stopword list catches them.
    """
    token = token.lower()
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def normalized_tokens(text: str) -> list:
    """Whitespace-tokenize and normalize, dropping bare-punctuation tokens."""
    out = []
    for raw in text.split():
        tok = normalize_token(raw)
        if tok:
            out.append(tok)
    return out


def content_tokens(text: str) -> list:
    """Normalized tokens with stopwords removed (duplicates preserved)."""
    stops = stopwords()
    return [tok for tok in normalized_tokens(text) if tok not in stops]


def content_token_set(text: str) -> set:
    """Distinct content tokens of a string."""
    return set(content_tokens(text))


def stem(token: str) -> str:
    """Strip the first matching suffix that leaves enough stem behind."""
    for suffix, min_len in stem_rules():
        if token.endswith(suffix) and len(token) - len(suffix) >= min_len:
            return token[: -len(suffix)]
    return token


@functools.lru_cache(maxsize=1)
def load_occupation_map() -> dict:
    """The shipped occupation-value → category mapping.

    Returns {"categories": [...], "mapping": {occupation: category}}.
    """
    return json.loads(_data_text("occupation_map.json"))
