"""Pair-file loading and batching.

Accepts any JSONL whose records carry ``input`` and ``target`` string
fields (toolchain encode pairs and fine-tuning pairs both do); everything
else in the record is carried through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class PairFormatError(ValueError):
    """A pair record is missing its input/target strings."""


@dataclass(frozen=True)
class Pair:
    input: str
    target: str
    doc_id: str | None = None


def load_pairs(path: str | Path) -> list[Pair]:
    pairs: list[Pair] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PairFormatError(f"{path}:{lineno}: invalid JSON ({exc})")
            if not isinstance(record.get("input"), str) \
                    or not isinstance(record.get("target"), str):
                raise PairFormatError(
                    f"{path}:{lineno}: record needs string 'input' and "
                    f"'target' fields")
            pairs.append(Pair(input=record["input"], target=record["target"],
                              doc_id=record.get("doc_id")))
    return pairs


def load_inputs(path: str | Path) -> list[Pair]:
    """Generation inputs: records with an ``input`` field; ``target`` is
    optional there."""
    items: list[Pair] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if not isinstance(record.get("input"), str):
                raise PairFormatError(
                    f"{path}:{lineno}: record needs a string 'input' field")
            items.append(Pair(input=record["input"],
                              target=record.get("target", ""),
                              doc_id=record.get("doc_id")))
    return items
