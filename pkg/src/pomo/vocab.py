"""Token vocabularies with reserved symbols and deterministic ordering."""

import hashlib
from collections import Counter
from typing import Iterable

PAD = "<pad>"
UNK = "<unk>"
BOS = "<bos>"
EOS = "<eos>"
PM_SLOT = "<pm-slot>"
CLAIM_SEP = "<claim>"
KEY_SEP = "<key>"
VALUE_SEP = "<value>"

GEN_SPECIALS = (PAD, UNK, BOS, EOS, PM_SLOT, CLAIM_SEP, KEY_SEP, VALUE_SEP)
SEL_SPECIALS = (PAD, UNK)


class Vocabulary:
    """Frozen token↔id mapping; ids are reserved specials first, then tokens
    by descending frequency with lexicographic tie-breaking."""

    def __init__(self, tokens: list, specials: tuple):
        self._specials = tuple(specials)
        self._tokens = list(specials) + [t for t in tokens if t not in set(specials)]
        self._ids = {tok: i for i, tok in enumerate(self._tokens)}
        if len(self._ids) != len(self._tokens):
            raise ValueError("vocabulary contains duplicate tokens")

    @classmethod
    def build(cls, token_streams: Iterable, size: int, specials: tuple) -> "Vocabulary":
        counts = Counter()
        for stream in token_streams:
            counts.update(stream)
        for tok in specials:
            counts.pop(tok, None)
        budget = size - len(specials)
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls([tok for tok, _ in ordered[:budget]], specials)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    @property
    def specials(self) -> tuple:
        return self._specials

    @property
    def pad_id(self) -> int:
        return self._ids[PAD]

    @property
    def unk_id(self) -> int:
        return self._ids[UNK]

    @property
    def bos_id(self) -> int:
        return self._ids[BOS]

    @property
    def eos_id(self) -> int:
        return self._ids[EOS]

    def id_of(self, token: str) -> int:
        return self._ids.get(token, self._ids[UNK])

    def token_of(self, idx: int) -> str:
        return self._tokens[idx]

    def encode(self, tokens: Iterable) -> list:
        unk = self._ids[UNK]
        return [self._ids.get(tok, unk) for tok in tokens]

    def decode(self, ids: Iterable) -> list:
        return [self._tokens[i] for i in ids]

    def sha256(self) -> str:
        digest = hashlib.sha256()
        for tok in self._tokens:
            digest.update(tok.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"#specials\t{len(self._specials)}\n")
            for tok in self._tokens:
                handle.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().rstrip("\n")
            if not header.startswith("#specials\t"):
                raise ValueError(f"{path}: missing vocabulary header")
            n_special = int(header.split("\t")[1])
            tokens = [line.rstrip("\n") for line in handle]
        return cls(tokens[n_special:], tuple(tokens[:n_special]))
