"""Marker candidate extraction, lexicon curation, and corpus annotation.

Candidates come in two shapes: the run of tokens from a sentence start up
to the first component starting in that sentence (leading), and the gap
between two components that sit in the same sentence (sandwich). Curation
is mechanized as a normalization pass plus an explicit filter list of
rejected spans standing in for manual review.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .core import AnlForgeError, ArgGraph, ArgText, span_text

LEADING = "leading"
SANDWICH = "sandwich"


class LexiconError(AnlForgeError):
    """The marker lexicon violates its construction invariants."""


@dataclass(frozen=True, slots=True)
class MarkerCandidate:
    surface: str
    kind: str  # LEADING or SANDWICH
    doc_id: str
    span: tuple[int, int]


_TRAIL_PUNCT_RE = re.compile(r"\s+([,.;:!?])$")


def normalize_marker(surface: str) -> str:
    """Case-fold, collapse whitespace, reattach a detached trailing
    punctuation mark ("however ," -> "however,")."""
    norm = " ".join(surface.split()).casefold()
    return _TRAIL_PUNCT_RE.sub(r"\1", norm)


@dataclass(frozen=True)
class MarkerLexicon:
    """Curated argumentative marker phrases plus discourse connectives.

    All entries are stored normalized; ``filter_list`` keeps the rejected
    spans for reporting and must not intersect the accepted set.
    """

    argumentative: frozenset[str]
    discourse: frozenset[str] = frozenset()
    filter_list: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        clash = self.argumentative & self.filter_list
        if clash:
            raise LexiconError(f"filtered spans present in lexicon: {sorted(clash)}")

    def phrases(self, include_discourse: bool = False) -> frozenset[str]:
        return self.argumentative | self.discourse if include_discourse \
            else self.argumentative

    def to_json(self) -> dict:
        return {"argumentative": sorted(self.argumentative),
                "discourse": sorted(self.discourse)}

    @classmethod
    def from_json(cls, payload: dict) -> "MarkerLexicon":
        return cls(
            argumentative=frozenset(normalize_marker(m)
                                    for m in payload.get("argumentative", [])),
            discourse=frozenset(normalize_marker(m)
                                for m in payload.get("discourse", [])),
        )


@dataclass(frozen=True)
class LexiconBuild:
    lexicon: MarkerLexicon
    raw_candidates: int
    unique_candidates: int
    rejected: int

    @property
    def final_size(self) -> int:
        return len(self.lexicon.argumentative)


def extract_candidates(graph: ArgGraph, text: ArgText) -> list[MarkerCandidate]:
    """All leading and sandwich candidate spans of one document, in span
    order. Emitted spans never intersect a component span and always fit
    inside a single sentence."""
    comps = sorted(graph.components, key=lambda c: c.span)
    spans = [c.span for c in comps]

    def clear_of_components(span: tuple[int, int]) -> bool:
        return all(span[1] < s or e < span[0] for s, e in spans)

    found: list[MarkerCandidate] = []
    for sent_start, sent_end in text.sentence_bounds:
        starting = [c for c in comps if sent_start <= c.span[0] <= sent_end]
        if not starting:
            continue
        first = starting[0]
        prefix = (sent_start, first.span[0] - 1)
        if prefix[0] <= prefix[1] and clear_of_components(prefix):
            found.append(MarkerCandidate(
                surface=span_text(text, prefix), kind=LEADING,
                doc_id=text.doc_id, span=prefix))
    for left, right in zip(comps, comps[1:]):
        gap = (left.span[1] + 1, right.span[0] - 1)
        if gap[0] > gap[1]:
            continue
        if text.sentence_of(left.span[1]) != text.sentence_of(right.span[0]):
            continue
        found.append(MarkerCandidate(
            surface=span_text(text, gap), kind=SANDWICH,
            doc_id=text.doc_id, span=gap))
    found.sort(key=lambda c: c.span)
    return found


def build_lexicon(candidates: Iterable[str | MarkerCandidate],
                  filter_list: Iterable[str] = (),
                  discourse: Iterable[str] = ()) -> LexiconBuild:
    """Normalize, deduplicate, and subtract the filter list."""
    surfaces = [c.surface if isinstance(c, MarkerCandidate) else c
                for c in candidates]
    normalized = [normalize_marker(s) for s in surfaces if s.strip()]
    unique = set(normalized)
    rejected = frozenset(normalize_marker(s) for s in filter_list if s.strip())
    accepted = frozenset(unique - rejected)
    lexicon = MarkerLexicon(
        argumentative=accepted,
        discourse=frozenset(normalize_marker(s) for s in discourse if s.strip()),
        filter_list=rejected,
    )
    return LexiconBuild(lexicon=lexicon, raw_candidates=len(surfaces),
                        unique_candidates=len(unique),
                        rejected=len(unique & rejected))


def load_filter_list(path: str | Path) -> list[str]:
    """One rejected span per line; blank lines and # comments skipped."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def annotate_markers(graph: ArgGraph, text: ArgText, lexicon: MarkerLexicon,
                     include_discourse: bool = False) -> ArgGraph:
    """Attach marker spans for lexicon phrases found inside candidate gaps.

    Within each candidate, matches are chosen greedily longest-first among
    token-aligned subspans, so a nested shorter phrase never wins over a
    longer one covering it. The result keeps marker/component disjointness
    by construction.
    """
    phrases = lexicon.phrases(include_discourse)
    if not phrases:
        return replace(graph, markers=())
    hits: list[tuple[int, int]] = []
    for cand in extract_candidates(graph, text):
        start, end = cand.span
        matches = []
        for i in range(start, end + 1):
            for j in range(i, end + 1):
                if normalize_marker(span_text(text, (i, j))) in phrases:
                    matches.append((i, j))
        matches.sort(key=lambda s: (-(s[1] - s[0]), s[0]))
        taken: list[tuple[int, int]] = []
        for span in matches:
            if all(span[1] < t[0] or t[1] < span[0] for t in taken):
                taken.append(span)
        hits.extend(taken)
    return replace(graph, markers=tuple(sorted(hits)))
