"""Shared domain model: tokenized documents, label schemas, argument graphs.

Everything downstream (ingestion, marker mining, the ANL codec, evaluation)
works on the types defined here and on the canonical JSONL record built by
:func:`graph_to_record` / :func:`record_to_graph`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator


class AnlForgeError(Exception):
    """Base class for all toolchain errors."""


class SchemaError(AnlForgeError):
    """A label set is malformed or a label does not belong to it."""


class GraphValidationError(AnlForgeError):
    """An argument graph violates a structural invariant."""


class SpanRangeError(AnlForgeError):
    """A token span points outside its document."""


class RecordError(AnlForgeError):
    """A JSONL document record is malformed."""


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SymbolSet:
    """Reserved symbol tokens used when rendering and parsing ANL targets."""

    open: str = "["
    close: str = "]"
    assign: str = "="
    sep: str = "|"
    marker_open: str = "(("
    marker_close: str = "))"
    label_marker: str = "marker"
    sentinel_prefix: str = "<extra_id_"

    def __post_init__(self) -> None:
        values = [
            self.open, self.close, self.assign, self.sep,
            self.marker_open, self.marker_close, self.label_marker,
            self.sentinel_prefix,
        ]
        if len(set(values)) != len(values):
            raise SchemaError("symbol tokens must be pairwise distinct")

    def sentinel(self, index: int) -> str:
        return f"{self.sentinel_prefix}{index}>"

    @property
    def reserved(self) -> tuple[str, ...]:
        return (self.open, self.close, self.assign, self.sep,
                self.marker_open, self.marker_close, self.label_marker)


SYMBOLS = SymbolSet()


# ---------------------------------------------------------------------------
# Label schemas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabelSchema:
    """Ordered component and relation type inventories for one corpus."""

    component_types: tuple[str, ...]
    relation_types: tuple[str, ...]

    def __post_init__(self) -> None:
        for kind, types in (("component", self.component_types),
                            ("relation", self.relation_types)):
            if not types:
                raise SchemaError(f"{kind} type set is empty")
            if len(set(types)) != len(types):
                raise SchemaError(f"duplicate {kind} types: {types}")
            bad = set(types) & set(SYMBOLS.reserved)
            if bad:
                raise SchemaError(f"{kind} types collide with symbol tokens: {bad}")

    @property
    def n_component_types(self) -> int:
        return len(self.component_types)

    @property
    def n_relation_types(self) -> int:
        return len(self.relation_types)

    def require_component_type(self, label: str) -> None:
        if label not in self.component_types:
            raise SchemaError(f"unknown component type {label!r}")

    def require_relation_type(self, label: str) -> None:
        if label not in self.relation_types:
            raise SchemaError(f"unknown relation type {label!r}")

    def id_prefixes(self) -> dict[str, str]:
        """Short per-type prefixes used to build abbreviation ID tokens.

        Each prefix is the shortest uppercased leading substring of the type
        name (spaces removed) that no other type name in the schema starts
        with; single-letter prefixes when there is no clash.
        """
        names = {t: re.sub(r"\W+", "", t).upper() or "X" for t in self.component_types}
        prefixes: dict[str, str] = {}
        for ctype, name in names.items():
            prefix = name  # fallback: the whole compacted name
            for length in range(1, len(name) + 1):
                cand = name[:length]
                if not any(o.startswith(cand) for t, o in names.items() if t != ctype):
                    prefix = cand
                    break
            prefixes[ctype] = prefix
        return prefixes


AAE_SCHEMA = LabelSchema(
    component_types=("MajorClaim", "Claim", "Premise"),
    relation_types=("Support", "Attack"),
)

AAE_FG_SCHEMA = LabelSchema(
    component_types=("Fact", "Value", "Policy", "Common Ground", "Testimony",
                     "Hypothetical Instance", "Statistics", "Real Example",
                     "Others"),
    relation_types=("Support", "Attack"),
)

CDCP_SCHEMA = LabelSchema(
    component_types=("Fact", "Testimony", "Reference", "Policy", "Value"),
    relation_types=("Reason", "Evidence"),
)

SCHEMA_PRESETS: dict[str, LabelSchema] = {
    "aae": AAE_SCHEMA,
    "aae-fg": AAE_FG_SCHEMA,
    "cdcp": CDCP_SCHEMA,
}


def schema_for(name: str) -> LabelSchema:
    try:
        return SCHEMA_PRESETS[name.lower()]
    except KeyError:
        raise SchemaError(f"unknown schema preset {name!r}; "
                          f"expected one of {sorted(SCHEMA_PRESETS)}") from None


# ---------------------------------------------------------------------------
# Tokenized text
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class ArgText:
    """A document (paragraph) with its token index and sentence bounds.

    Token spans throughout the toolchain are inclusive ``(start, end)``
    pairs of indices into ``tokens``. Sentence bounds partition the token
    sequence.
    """

    doc_id: str
    text: str
    tokens: tuple[Token, ...]
    sentence_bounds: tuple[tuple[int, int], ...]

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def n_sentences(self) -> int:
        return len(self.sentence_bounds)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def sentence_of(self, token_index: int) -> int:
        """Index of the sentence containing the given token."""
        for i, (a, b) in enumerate(self.sentence_bounds):
            if a <= token_index <= b:
                return i
        raise SpanRangeError(f"token index {token_index} outside {self.doc_id}")

    def check_span(self, span: tuple[int, int]) -> None:
        start, end = span
        if not (0 <= start <= end < len(self.tokens)):
            raise SpanRangeError(
                f"span {span} out of range for {self.doc_id} "
                f"({len(self.tokens)} tokens)")


_TOKEN_RE = re.compile(r"\w+(?:'\w+)*|[^\w\s]", re.UNICODE)
_TERMINALS = {".", "!", "?"}
_CLOSERS = {'"', "'", ")", "''", "”", "’"}


def tokenize(text: str, doc_id: str = "") -> ArgText:
    """Deterministic whitespace/punctuation tokenization with char offsets.

    Words keep internal apostrophes; every other non-space character is its
    own token. Sentences end after a run of terminal punctuation (plus any
    closing quotes) when the next token starts with an uppercase letter or
    digit, and always at end of text.
    """
    tokens = tuple(
        Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)
    )
    bounds: list[tuple[int, int]] = []
    if tokens:
        start = 0
        i = 0
        n = len(tokens)
        while i < n:
            if tokens[i].surface in _TERMINALS:
                # absorb the full terminal run and trailing closers
                j = i
                while j + 1 < n and tokens[j + 1].surface in _TERMINALS:
                    j += 1
                while j + 1 < n and tokens[j + 1].surface in _CLOSERS:
                    j += 1
                nxt = tokens[j + 1].surface if j + 1 < n else None
                if nxt is None or nxt[0].isupper() or nxt[0].isdigit():
                    bounds.append((start, j))
                    start = j + 1
                i = j + 1
            else:
                i += 1
        if start < n:
            bounds.append((start, n - 1))
    return ArgText(doc_id=doc_id, text=text, tokens=tokens,
                   sentence_bounds=tuple(bounds))


def span_text(text: ArgText, span: tuple[int, int]) -> str:
    """Original surface text covered by an inclusive token span."""
    text.check_span(span)
    start, end = span
    return text.text[text.tokens[start].char_start:text.tokens[end].char_end]


def validate_text(text: ArgText) -> None:
    """Check the token/sentence invariants of a document."""
    prev_end = 0
    for tok in text.tokens:
        if tok.char_start < prev_end or tok.char_end <= tok.char_start:
            raise GraphValidationError(f"{text.doc_id}: tokens overlap or are empty")
        if text.text[tok.char_start:tok.char_end] != tok.surface:
            raise GraphValidationError(f"{text.doc_id}: token surface mismatch at "
                                       f"{tok.char_start}")
        if text.text[prev_end:tok.char_start].strip():
            raise GraphValidationError(f"{text.doc_id}: non-whitespace between tokens")
        prev_end = tok.char_end
    if text.text[prev_end:].strip():
        raise GraphValidationError(f"{text.doc_id}: non-whitespace after last token")
    expected = 0
    for a, b in text.sentence_bounds:
        if a != expected or b < a:
            raise GraphValidationError(f"{text.doc_id}: sentence bounds do not "
                                       f"partition the token sequence")
        expected = b + 1
    if text.tokens and expected != len(text.tokens):
        raise GraphValidationError(f"{text.doc_id}: trailing tokens not covered by "
                                   f"any sentence")


# ---------------------------------------------------------------------------
# Argument graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ArgComponent:
    comp_id: str
    ctype: str
    span: tuple[int, int]


@dataclass(frozen=True, slots=True)
class ArgRelation:
    rtype: str
    head: str
    tail: str


@dataclass(frozen=True)
class ArgGraph:
    """Typed components and directed relations over one document."""

    text_ref: str
    components: tuple[ArgComponent, ...] = ()
    relations: tuple[ArgRelation, ...] = ()
    markers: tuple[tuple[int, int], ...] = ()

    def component_by_id(self, comp_id: str) -> ArgComponent:
        for comp in self.components:
            if comp.comp_id == comp_id:
                return comp
        raise GraphValidationError(f"{self.text_ref}: no component {comp_id!r}")

    def ace_tuples(self) -> set[tuple[str, int, int]]:
        return {(c.ctype, c.span[0], c.span[1]) for c in self.components}

    def arc_tuples(self) -> set[tuple]:
        by_id = {c.comp_id: c for c in self.components}
        out = set()
        for rel in self.relations:
            head = by_id[rel.head]
            tail = by_id[rel.tail]
            out.add((rel.rtype,
                     (head.ctype, head.span[0], head.span[1]),
                     (tail.ctype, tail.span[0], tail.span[1])))
        return out

    def structure(self) -> tuple[frozenset, frozenset, frozenset]:
        """Position-level identity: (component tuples, relation tuples, markers)."""
        return (frozenset(self.ace_tuples()),
                frozenset(self.arc_tuples()),
                frozenset(self.markers))


def build_graph(text_ref: str,
                components: Iterable[tuple[str, tuple[int, int]]],
                relations: Iterable[tuple[str, int, int]] = (),
                markers: Iterable[tuple[int, int]] = ()) -> ArgGraph:
    """Assemble a graph from (ctype, span) pairs and index-based relations.

    Components are sorted by span start and given ids ``c0..cN`` in that
    order; each relation is (rtype, head_index, tail_index) into the
    *input* component order.
    """
    comps_in = list(components)
    order = sorted(range(len(comps_in)), key=lambda i: comps_in[i][1])
    new_pos = {old: new for new, old in enumerate(order)}
    comps = tuple(
        ArgComponent(comp_id=f"c{new}", ctype=comps_in[old][0], span=tuple(comps_in[old][1]))
        for new, old in enumerate(order)
    )
    rels = tuple(
        ArgRelation(rtype=rtype, head=f"c{new_pos[h]}", tail=f"c{new_pos[t]}")
        for rtype, h, t in relations
    )
    return ArgGraph(text_ref=text_ref, components=comps, relations=rels,
                    markers=tuple(sorted(tuple(m) for m in markers)))


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def validate_graph(graph: ArgGraph, text: ArgText,
                   schema: LabelSchema | None = None) -> None:
    """Reject structurally invalid graphs.

    Checks: spans in range and non-overlapping, relation endpoints resolve
    and differ, no duplicate relation triples, marker spans pairwise
    disjoint and disjoint from every component span. Label membership is
    checked only when a schema is supplied.
    """
    if graph.text_ref != text.doc_id:
        raise GraphValidationError(
            f"graph references {graph.text_ref!r} but text is {text.doc_id!r}")
    ids = set()
    spans = []
    for comp in graph.components:
        if comp.comp_id in ids:
            raise GraphValidationError(f"{text.doc_id}: duplicate id {comp.comp_id}")
        ids.add(comp.comp_id)
        text.check_span(comp.span)
        if comp.span[0] > comp.span[1]:
            raise GraphValidationError(f"{text.doc_id}: inverted span {comp.span}")
        if schema is not None:
            schema.require_component_type(comp.ctype)
        for other in spans:
            if _overlaps(comp.span, other):
                raise GraphValidationError(
                    f"{text.doc_id}: component spans overlap: {comp.span} vs {other}")
        spans.append(comp.span)
    triples = set()
    for rel in graph.relations:
        if rel.head not in ids or rel.tail not in ids:
            raise GraphValidationError(
                f"{text.doc_id}: dangling relation endpoint {rel}")
        if rel.head == rel.tail:
            raise GraphValidationError(f"{text.doc_id}: self-relation on {rel.head}")
        if schema is not None:
            schema.require_relation_type(rel.rtype)
        triple = (rel.rtype, rel.head, rel.tail)
        if triple in triples:
            raise GraphValidationError(f"{text.doc_id}: duplicate relation {triple}")
        triples.add(triple)
    seen_markers: list[tuple[int, int]] = []
    for mspan in graph.markers:
        text.check_span(mspan)
        for cspan in spans:
            if _overlaps(mspan, cspan):
                raise GraphValidationError(
                    f"{text.doc_id}: marker {mspan} intersects component {cspan}")
        for other in seen_markers:
            if _overlaps(mspan, other):
                raise GraphValidationError(
                    f"{text.doc_id}: marker spans overlap: {mspan} vs {other}")
        seen_markers.append(mspan)


def is_single_parent(graph: ArgGraph) -> bool:
    """True when no component is the head of more than one relation."""
    heads = [rel.head for rel in graph.relations]
    return len(heads) == len(set(heads))


# ---------------------------------------------------------------------------
# Canonical JSONL records
# ---------------------------------------------------------------------------

def graph_to_record(text: ArgText, graph: ArgGraph) -> dict:
    """Canonical JSONL record for one annotated paragraph."""
    return {
        "doc_id": text.doc_id,
        "text": text.text,
        "tokens": [{"s": t.surface, "cs": t.char_start, "ce": t.char_end}
                   for t in text.tokens],
        "sentences": [list(b) for b in text.sentence_bounds],
        "components": [{"id": c.comp_id, "type": c.ctype,
                        "ts": c.span[0], "te": c.span[1]}
                       for c in graph.components],
        "relations": [{"type": r.rtype, "head": r.head, "tail": r.tail}
                      for r in graph.relations],
        "markers": [list(m) for m in graph.markers],
    }


def record_to_graph(record: dict) -> tuple[ArgText, ArgGraph]:
    try:
        text = ArgText(
            doc_id=record["doc_id"],
            text=record["text"],
            tokens=tuple(Token(t["s"], t["cs"], t["ce"]) for t in record["tokens"]),
            sentence_bounds=tuple((a, b) for a, b in record["sentences"]),
        )
        graph = ArgGraph(
            text_ref=record["doc_id"],
            components=tuple(
                ArgComponent(comp_id=c["id"], ctype=c["type"], span=(c["ts"], c["te"]))
                for c in record["components"]),
            relations=tuple(
                ArgRelation(rtype=r["type"], head=r["head"], tail=r["tail"])
                for r in record["relations"]),
            markers=tuple((a, b) for a, b in record.get("markers", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordError(f"malformed document record: {exc}") from exc
    return text, graph


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(f"{path}:{lineno}: invalid JSON: {exc}") from exc


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_corpus(path: str | Path) -> list[tuple[ArgText, ArgGraph]]:
    return [record_to_graph(rec) for rec in read_jsonl(path)]


def write_corpus(path: str | Path, docs: Iterable[tuple[ArgText, ArgGraph]]) -> int:
    return write_jsonl(path, (graph_to_record(t, g) for t, g in docs))
