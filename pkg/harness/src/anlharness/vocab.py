"""Whitespace word-level vocabulary with lossless round-tripping.

Strings are split on single spaces only, so joining the decoded tokens
reproduces the training string exactly. This keeps targets opaque: any
token the pair files contain (labels, bracket symbols, sentinel tokens,
serialized integer sequences) is just a vocabulary entry.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

PAD = "[PAD]"
EOS = "[EOS]"
UNK = "[UNK]"
SPECIALS = (PAD, EOS, UNK)


class WordVocab:
    def __init__(self, tokens: list[str]):
        if list(tokens[:3]) != list(SPECIALS):
            raise ValueError("vocabulary must start with the special tokens")
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    @classmethod
    def build(cls, texts: Iterable[str]) -> "WordVocab":
        seen: dict[str, None] = {}
        for text in texts:
            for tok in text.split():
                seen.setdefault(tok)
        return cls(list(SPECIALS) + sorted(seen))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def eos_id(self) -> int:
        return self.index[EOS]

    @property
    def unk_id(self) -> int:
        return self.index[UNK]

    def extend(self, texts: Iterable[str]) -> int:
        """Add unseen tokens; returns how many were added."""
        added = 0
        for text in texts:
            for tok in text.split():
                if tok not in self.index:
                    self.index[tok] = len(self.tokens)
                    self.tokens.append(tok)
                    added += 1
        return added

    def encode(self, text: str, add_eos: bool = True) -> list[int]:
        ids = [self.index.get(tok, self.unk_id) for tok in text.split()]
        if add_eos:
            ids.append(self.eos_id)
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        words = []
        for i in ids:
            if i == self.eos_id:
                break
            if i in (self.pad_id,):
                continue
            if 0 <= i < len(self.tokens):
                words.append(self.tokens[i])
        return " ".join(words)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.tokens, ensure_ascii=False),
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "WordVocab":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))
