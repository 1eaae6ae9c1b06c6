"""Builders for the four marker-based fine-tuning datasets.

Each builder turns one annotated paragraph (or one connective sentence
pair) into a single (input, target) training pair:

* A-MKT   - plain text in, text with only markers bracket-augmented out.
* SM-MKT  - marker tokens masked by sentinel tokens in, the sentinel/token
            interleave (plus one terminal sentinel) out.
* E-MKT   - plain text in, a -1/0 token-level marker indicator sequence out.
* D-MKT   - two adjacent sentences in, the same pair with the connective
            restored between them out.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .core import SYMBOLS, AnlForgeError, ArgText, SymbolSet
from .ingest import DmPair


class MftStrategy(enum.Enum):
    A_MKT = "amkt"
    SM_MKT = "smmkt"
    E_MKT = "emkt"
    D_MKT = "dmkt"

    @classmethod
    def from_name(cls, name: str) -> "MftStrategy":
        for strategy in cls:
            if name in (strategy.value, strategy.name):
                return strategy
        raise AnlForgeError(f"unknown strategy {name!r}; "
                            f"expected one of {[s.value for s in cls]}")


class MarkerSpanError(AnlForgeError):
    """Marker spans overlap or fall outside the document."""


class SentinelCapacityError(AnlForgeError):
    """More masked tokens than the sentinel family can index."""


@dataclass(frozen=True)
class MftPair:
    strategy: MftStrategy
    input: str
    target: str

    def to_record(self) -> dict:
        return {"strategy": self.strategy.value, "input": self.input,
                "target": self.target}


def _checked_spans(text: ArgText,
                   markers: tuple[tuple[int, int], ...]) -> list[tuple[int, int]]:
    spans = sorted(tuple(m) for m in markers)
    prev_end = -1
    for span in spans:
        text.check_span(span)
        if span[0] <= prev_end:
            raise MarkerSpanError(f"{text.doc_id}: overlapping marker spans")
        prev_end = span[1]
    return spans


def _splice(text: ArgText, spans: list[tuple[int, int]],
            render) -> str:
    out: list[str] = []
    cursor = 0
    for span in spans:
        out.append(text.text[cursor:text.tokens[span[0]].char_start])
        out.append(render(span))
        cursor = text.tokens[span[1]].char_end
    out.append(text.text[cursor:])
    return "".join(out)


def build_amkt(text: ArgText, markers: tuple[tuple[int, int], ...],
               symbols: SymbolSet = SYMBOLS) -> MftPair:
    """Plain text -> text with each marker span as ``[ span | marker ]``."""
    spans = _checked_spans(text, markers)
    target = _splice(
        text, spans,
        lambda s: f"{symbols.open} "
                  f"{text.text[text.tokens[s[0]].char_start:text.tokens[s[1]].char_end]}"
                  f" {symbols.sep} {symbols.label_marker} {symbols.close}")
    return MftPair(MftStrategy.A_MKT, input=text.text, target=target)


def build_smmkt(text: ArgText, markers: tuple[tuple[int, int], ...],
                symbols: SymbolSet = SYMBOLS, start_index: int = 0,
                family_size: int = 100) -> MftPair:
    """Mask every marker token with its own sentinel; the target interleaves
    sentinel and masked token and closes with one terminal sentinel."""
    spans = _checked_spans(text, markers)
    masked = sum(span[1] - span[0] + 1 for span in spans)
    if start_index + masked >= family_size:
        raise SentinelCapacityError(
            f"{text.doc_id}: {masked} masked tokens need sentinel index "
            f"{start_index + masked} but the family holds {family_size}")
    next_index = start_index

    def render(span: tuple[int, int]) -> str:
        nonlocal next_index
        sentinels = [symbols.sentinel(next_index + k)
                     for k in range(span[1] - span[0] + 1)]
        next_index += len(sentinels)
        return " ".join(sentinels)

    masked_input = _splice(text, spans, render)
    pieces: list[str] = []
    index = start_index
    for span in spans:
        for tok in text.tokens[span[0]:span[1] + 1]:
            pieces += [symbols.sentinel(index), tok.surface]
            index += 1
    pieces.append(symbols.sentinel(index))
    return MftPair(MftStrategy.SM_MKT, input=masked_input,
                   target=" ".join(pieces))


def build_emkt(text: ArgText,
               markers: tuple[tuple[int, int], ...]) -> MftPair:
    """Plain text -> bracketed comma-separated -1/0 labels, one per token."""
    spans = _checked_spans(text, markers)
    labels = [0] * len(text.tokens)
    for start, end in spans:
        for i in range(start, end + 1):
            labels[i] = -1
    target = "[" + ",".join(str(v) for v in labels) + "]"
    return MftPair(MftStrategy.E_MKT, input=text.text, target=target)


_FIRST_ALPHA_RE = re.compile(r"[^\W\d_]", re.UNICODE)
_WORD_RE = re.compile(r"\w+(?:'\w+)*", re.UNICODE)


def _with_first_alpha(sentence: str, transform) -> str:
    match = _FIRST_ALPHA_RE.search(sentence)
    if match is None:
        return sentence
    i = match.start()
    return sentence[:i] + transform(sentence[i]) + sentence[i + 1:]


def _capitalized_mid_sentence(word: str, sen1: str, sen2: str) -> bool:
    """Proper-noun guard: the word occurs with identical capitalization at a
    non-initial position somewhere in the pair."""
    for sentence in (sen1, sen2):
        words = _WORD_RE.findall(sentence)
        if word in words[1:]:
            return True
    return False


def build_dmkt(pair: DmPair) -> MftPair:
    """Concatenated sentence pair -> the same pair with the connective
    restored at the head of the second sentence (which is then
    de-capitalized unless its leading word looks like a proper noun)."""
    restored = _with_first_alpha(pair.sen2, str.upper)
    source = f"{pair.sen1} {restored}"
    if not pair.dm:
        return MftPair(MftStrategy.D_MKT, input=source, target=source)
    lead = _WORD_RE.search(restored)
    if lead and _capitalized_mid_sentence(lead.group(), pair.sen1, restored):
        continuation = restored
    else:
        continuation = _with_first_alpha(restored, str.lower)
    return MftPair(MftStrategy.D_MKT, input=source,
                   target=f"{pair.sen1} {pair.dm} {continuation}")
