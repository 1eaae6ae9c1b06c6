"""Bidirectional conversion between argument graphs and ANL target strings.

Four target formats share one bracket grammar: a component span is
rewritten as ``[ span | Type ]``, heads of relations carry
``| RelType = tail`` segments, markers (marker-enhanced format only) are
wrapped in ``(( ))``, and the abbreviated format appends a per-type ID
token to each label so relation tails can reference the ID instead of
repeating the full span.

Decoding never raises: it is a single tolerant left-to-right pass that
salvages every well-formed group and classifies everything else into the
three generation-error kinds (invalid token / component / format).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _alignment
from .core import (SYMBOLS, AnlForgeError, ArgGraph, ArgText, LabelSchema,
                   SymbolSet, _TOKEN_RE, build_graph, span_text,
                   validate_graph)


class AnlVariant(enum.Enum):
    """Target formats, keyed by their CLI names."""

    COMPONENT_ONLY = "comp"
    ACRE = "acre"
    ME_ACRE = "me"
    ABBREVIATED = "abbr"

    @classmethod
    def from_name(cls, name: str) -> "AnlVariant":
        for variant in cls:
            if name in (variant.value, variant.name):
                return variant
        raise AnlForgeError(f"unknown variant {name!r}; "
                            f"expected one of {[v.value for v in cls]}")


class ErrorKind(enum.Enum):
    INVALID_TOKEN = "INVALID_TOKEN"
    INVALID_COMPONENT = "INVALID_COMPONENT"
    INVALID_FORMAT = "INVALID_FORMAT"


@dataclass(frozen=True, slots=True)
class AnlError:
    kind: ErrorKind
    detail: str
    location: int  # character offset into the target string


@dataclass(frozen=True)
class AnlSequence:
    doc_id: str
    variant: AnlVariant
    input: str
    target: str

    def to_record(self) -> dict:
        return {"doc_id": self.doc_id, "variant": self.variant.value,
                "input": self.input, "target": self.target}


@dataclass(frozen=True)
class ParseOutcome:
    graph: ArgGraph
    errors: tuple[AnlError, ...]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error_kinds(self) -> set[ErrorKind]:
        return {err.kind for err in self.errors}

    def to_record(self) -> dict:
        return {
            "doc_id": self.graph.text_ref,
            "components": [{"id": c.comp_id, "type": c.ctype,
                            "ts": c.span[0], "te": c.span[1]}
                           for c in self.graph.components],
            "relations": [{"type": r.rtype, "head": r.head, "tail": r.tail}
                          for r in self.graph.relations],
            "markers": [list(m) for m in self.graph.markers],
            "errors": [{"kind": e.kind.value, "detail": e.detail,
                        "location": e.location} for e in self.errors],
        }


def outcome_from_record(record: dict) -> ParseOutcome:
    from .core import ArgComponent, ArgRelation

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
    errors = tuple(
        AnlError(kind=ErrorKind(e["kind"]), detail=e["detail"],
                 location=e["location"])
        for e in record.get("errors", []))
    return ParseOutcome(graph=graph, errors=errors)


def _words(raw: str) -> list[str]:
    return _TOKEN_RE.findall(raw)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def assign_id_tokens(graph: ArgGraph, schema: LabelSchema) -> dict[str, str]:
    """Abbreviation ID token per component id, counting per type in
    document order (P1, P2, ..., C1, ...)."""
    prefixes = schema.id_prefixes()
    counters: dict[str, int] = {}
    ids: dict[str, str] = {}
    for comp in sorted(graph.components, key=lambda c: c.span):
        counters[comp.ctype] = counters.get(comp.ctype, 0) + 1
        ids[comp.comp_id] = f"{prefixes[comp.ctype]}{counters[comp.ctype]}"
    return ids


def encode(graph: ArgGraph, text: ArgText, variant: AnlVariant,
           schema: LabelSchema, symbols: SymbolSet = SYMBOLS) -> AnlSequence:
    """Render a validated graph into the target string of one variant.

    Non-component, non-marker text is carried over verbatim (original
    spacing included); symbol tokens are padded with single spaces.
    """
    validate_graph(graph, text, schema)
    comps = sorted(graph.components, key=lambda c: c.span)
    by_id = {c.comp_id: c for c in graph.components}
    outgoing: dict[str, list] = {c.comp_id: [] for c in comps}
    for rel in graph.relations:
        outgoing[rel.head].append(rel)
    for rels in outgoing.values():
        rels.sort(key=lambda r: by_id[r.tail].span)

    with_relations = variant in (AnlVariant.ACRE, AnlVariant.ME_ACRE,
                                 AnlVariant.ABBREVIATED)
    id_tokens = assign_id_tokens(graph, schema) if variant is AnlVariant.ABBREVIATED else {}

    def render_component(comp) -> str:
        label = comp.ctype
        if variant is AnlVariant.ABBREVIATED:
            label = f"{comp.ctype} {id_tokens[comp.comp_id]}"
        parts = [symbols.open, span_text(text, comp.span), symbols.sep, label]
        if with_relations:
            for rel in outgoing[comp.comp_id]:
                tail = by_id[rel.tail]
                tail_repr = (id_tokens[rel.tail]
                             if variant is AnlVariant.ABBREVIATED
                             else span_text(text, tail.span))
                parts += [symbols.sep, rel.rtype, symbols.assign, tail_repr]
        parts.append(symbols.close)
        return " ".join(parts)

    groups: list[tuple[tuple[int, int], str]] = [
        (c.span, render_component(c)) for c in comps
    ]
    if variant is AnlVariant.ME_ACRE:
        groups += [
            (m, f"{symbols.marker_open} {span_text(text, m)} {symbols.marker_close}")
            for m in graph.markers
        ]
    groups.sort(key=lambda g: g[0])

    out: list[str] = []
    cursor = 0
    for (start, end), rendered in groups:
        out.append(text.text[cursor:text.tokens[start].char_start])
        out.append(rendered)
        cursor = text.tokens[end].char_end
    out.append(text.text[cursor:])
    return AnlSequence(doc_id=text.doc_id, variant=variant,
                       input=text.text, target="".join(out))


# ---------------------------------------------------------------------------
# Lexing / parsing
# ---------------------------------------------------------------------------

_PLAIN = "plain"
_GROUP = "group"
_MARKER = "marker"


def _lex(target: str, symbols: SymbolSet, with_marker_symbols: bool):
    """Yield (kind, value, position); kind is a symbol token or 'text'."""
    table = [symbols.open, symbols.close, symbols.sep, symbols.assign]
    if with_marker_symbols:
        table += [symbols.marker_open, symbols.marker_close]
    table.sort(key=len, reverse=True)
    i = 0
    n = len(target)
    text_start = 0
    while i < n:
        hit = None
        for sym in table:
            if target.startswith(sym, i):
                hit = sym
                break
        if hit is None:
            i += 1
            continue
        if i > text_start:
            yield "text", target[text_start:i], text_start
        yield hit, hit, i
        i += len(hit)
        text_start = i
    if n > text_start:
        yield "text", target[text_start:n], text_start


@dataclass
class _Segment:
    kind: str              # _PLAIN, _GROUP or _MARKER
    pos: int
    text: str = ""         # raw text (_PLAIN / _MARKER)
    fields: list = field(default_factory=list)  # raw field strings (_GROUP)


def _parse(target: str, symbols: SymbolSet, with_marker_symbols: bool
           ) -> tuple[list[_Segment], list[AnlError]]:
    """Tolerant structural pass: groups, marker spans and plain runs.

    Any bracket mismatch discards the enclosing group and is recorded as a
    format error; stray symbols outside groups are dropped likewise.
    """
    segments: list[_Segment] = []
    errors: list[AnlError] = []
    state = _PLAIN
    plain_buf: list[str] = []
    plain_pos = 0
    current: _Segment | None = None

    def flush_plain(next_pos: int) -> None:
        nonlocal plain_buf
        if plain_buf:
            segments.append(_Segment(_PLAIN, plain_pos, text="".join(plain_buf)))
            plain_buf = []

    def format_error(detail: str, pos: int) -> None:
        errors.append(AnlError(ErrorKind.INVALID_FORMAT, detail, pos))

    for kind, value, pos in _lex(target, symbols, with_marker_symbols):
        if state == _PLAIN:
            if kind == "text":
                if not plain_buf:
                    plain_pos = pos
                plain_buf.append(value)
            elif kind == symbols.open:
                flush_plain(pos)
                current = _Segment(_GROUP, pos, fields=[""])
                state = _GROUP
            elif kind == symbols.marker_open:
                flush_plain(pos)
                current = _Segment(_MARKER, pos)
                state = _MARKER
            else:
                format_error(f"stray {value!r} outside any group", pos)
        elif state == _GROUP:
            assert current is not None
            if kind == "text":
                current.fields[-1] += value
            elif kind == symbols.sep:
                current.fields.append("")
            elif kind == symbols.assign:
                current.fields[-1] += f" {symbols.assign} "
            elif kind == symbols.close:
                segments.append(current)
                current = None
                state = _PLAIN
            else:  # a new opener before the close: mismatched brackets
                format_error("unterminated group (new group opened first)",
                             current.pos)
                if kind == symbols.open:
                    current = _Segment(_GROUP, pos, fields=[""])
                else:
                    current = _Segment(_MARKER, pos)
                    state = _MARKER
        else:  # _MARKER
            assert current is not None
            if kind == "text":
                current.text += value
            elif kind == symbols.marker_close:
                segments.append(current)
                current = None
                state = _PLAIN
            else:
                format_error("unterminated marker span", current.pos)
                if kind == symbols.open:
                    current = _Segment(_GROUP, pos, fields=[""])
                    state = _GROUP
                elif kind == symbols.marker_open:
                    current = _Segment(_MARKER, pos)
                else:
                    current = None
                    state = _PLAIN
    if state != _PLAIN and current is not None:
        format_error("unterminated group at end of sequence", current.pos)
    flush_plain(len(target))
    return segments, errors


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------

def _norm(raw: str) -> str:
    return " ".join(raw.split())


@dataclass
class _PendingComponent:
    ctype: str
    span: tuple[int, int]
    surfaces: tuple[str, ...]
    id_token: str | None
    rel_specs: list[tuple[str, str, int]]  # (rtype, tail raw text, position)


class _Aligner:
    """Leftmost-unused exact token-sequence alignment against one document."""

    def __init__(self, text: ArgText):
        self.surfaces = text.surfaces()
        self.vocab: dict[str, int] = {}
        ids = np.empty(len(self.surfaces), dtype=np.int32)
        for i, surface in enumerate(self.surfaces):
            ids[i] = self.vocab.setdefault(surface, len(self.vocab))
        self.hay = ids
        self.used = np.zeros(len(self.surfaces), dtype=np.uint8)

    def _needle(self, words: list[str]) -> np.ndarray:
        return np.fromiter((self.vocab.get(w, -1) for w in words),
                           dtype=np.int32, count=len(words))

    def claim(self, words: list[str]) -> tuple[int, int] | None:
        """Consume the leftmost unused occurrence; None if absent."""
        start = _alignment.find_match(self.hay, self._needle(words), self.used)
        if start < 0:
            return None
        _alignment.mark_used(self.used, start, len(words))
        return (start, start + len(words) - 1)

    def occurs(self, words: list[str]) -> bool:
        """Occurrence check ignoring the used mask."""
        return _alignment.find_match(self.hay, self._needle(words), None) >= 0


def _split_label(label: str, schema: LabelSchema, abbreviated: bool
                 ) -> tuple[str, str | None] | None:
    """Resolve a label field to (component type, optional ID token)."""
    if not abbreviated:
        return (label, None) if label in schema.component_types else None
    best = None
    for ctype in schema.component_types:
        if label == ctype or label.startswith(ctype + " "):
            if best is None or len(ctype) > len(best):
                best = ctype
    if best is None:
        return None
    rest = label[len(best):].split()
    if len(rest) > 1:
        return None
    return (best, rest[0] if rest else None)


def decode(target: str, text: ArgText, variant: AnlVariant,
           schema: LabelSchema, symbols: SymbolSet = SYMBOLS) -> ParseOutcome:
    """Parse an untrusted generated target back into a (partial) graph.

    Every failure is classified rather than raised: bracket/symbol damage
    is a format error that voids just its group, spans that cannot be
    aligned to the source text are token errors, and relation tails that
    resolve to non-component text (or unknown ID tokens) are component
    errors.
    """
    with_markers = variant is AnlVariant.ME_ACRE
    abbreviated = variant is AnlVariant.ABBREVIATED
    with_relations = variant is not AnlVariant.COMPONENT_ONLY
    segments, errors = _parse(target, symbols, with_markers)
    aligner = _Aligner(text)
    pending: list[_PendingComponent] = []
    marker_spans: list[tuple[int, int]] = []

    def token_error(detail: str, pos: int) -> None:
        errors.append(AnlError(ErrorKind.INVALID_TOKEN, detail, pos))

    def component_error(detail: str, pos: int) -> None:
        errors.append(AnlError(ErrorKind.INVALID_COMPONENT, detail, pos))

    def format_error(detail: str, pos: int) -> None:
        errors.append(AnlError(ErrorKind.INVALID_FORMAT, detail, pos))

    def claim_marker(raw: str, pos: int) -> None:
        words = _words(raw)
        if not words:
            format_error("empty marker span", pos)
            return
        span = aligner.claim(words)
        if span is None:
            token_error(f"marker span not alignable: {_norm(raw)!r}", pos)
            return
        marker_spans.append(span)

    for seg in segments:
        if seg.kind == _PLAIN:
            words = _words(seg.text)
            if not words:
                continue
            if aligner.claim(words) is None:
                token_error(f"text outside groups not alignable: "
                            f"{_norm(seg.text)!r}", seg.pos)
        elif seg.kind == _MARKER:
            claim_marker(seg.text, seg.pos)
        else:
            # structural validation first: a format defect voids the group
            if len(seg.fields) < 2:
                format_error("group without a label separator", seg.pos)
                continue
            span_raw, label_raw = seg.fields[0], seg.fields[1]
            if symbols.assign in span_raw or symbols.assign in label_raw:
                format_error("assignment symbol outside a relation segment",
                             seg.pos)
                continue
            span_words = _words(span_raw)
            if not span_words:
                format_error("group with an empty span", seg.pos)
                continue
            label = _norm(label_raw)
            rel_fields = seg.fields[2:]
            if label == symbols.label_marker:
                if rel_fields:
                    format_error("relation segment on a marker group", seg.pos)
                    continue
                claim_marker(span_raw, seg.pos)
                continue
            if rel_fields and not with_relations:
                format_error("relation segment in a component-only sequence",
                             seg.pos)
                continue
            rel_specs: list[tuple[str, str, int]] = []
            bad_structure = False
            for raw in rel_fields:
                pieces = raw.split(symbols.assign)
                if len(pieces) != 2 or not _norm(pieces[0]) or not _norm(pieces[1]):
                    bad_structure = True
                    break
                rel_specs.append((_norm(pieces[0]), pieces[1], seg.pos))
            if bad_structure:
                format_error("malformed relation segment", seg.pos)
                continue
            resolved = _split_label(label, schema, abbreviated)
            span = aligner.claim(span_words)
            if span is None:
                token_error(f"component span not alignable: "
                            f"{_norm(span_raw)!r}", seg.pos)
                continue
            if resolved is None:
                token_error(f"unknown component label {label!r}", seg.pos)
                continue
            ctype, id_token = resolved
            pending.append(_PendingComponent(
                ctype=ctype, span=span,
                surfaces=tuple(aligner.surfaces[span[0]:span[1] + 1]),
                id_token=id_token, rel_specs=rel_specs))

    # relation resolution (tails may reference components decoded later)
    pending.sort(key=lambda p: p.span)
    registry: dict[str, int] = {}
    for idx, comp in enumerate(pending):
        if comp.id_token is not None and comp.id_token not in registry:
            registry[comp.id_token] = idx
    relations: list[tuple[str, int, int]] = []
    seen: set[tuple[str, int, int]] = set()
    for head_idx, comp in enumerate(pending):
        for rtype, tail_raw, pos in comp.rel_specs:
            if rtype not in schema.relation_types:
                token_error(f"unknown relation label {rtype!r}", pos)
                continue
            tail_idx: int | None = None
            if abbreviated:
                tail_words = _norm(tail_raw).split()
                if len(tail_words) == 1 and tail_words[0] in registry:
                    tail_idx = registry[tail_words[0]]
                else:
                    component_error(f"relation tail references unknown id "
                                    f"{_norm(tail_raw)!r}", pos)
                    continue
            else:
                tail_words = _words(tail_raw)
                tail_tuple = tuple(tail_words)
                for idx, cand in enumerate(pending):
                    if cand.surfaces == tail_tuple:
                        tail_idx = idx
                        break
                if tail_idx is None:
                    if tail_words and aligner.occurs(tail_words):
                        component_error(f"relation tail is not a component "
                                        f"span: {_norm(tail_raw)!r}", pos)
                    else:
                        token_error(f"relation tail not alignable: "
                                    f"{_norm(tail_raw)!r}", pos)
                    continue
            if tail_idx == head_idx:
                component_error("relation tail equals its head", pos)
                continue
            triple = (rtype, head_idx, tail_idx)
            if triple not in seen:
                seen.add(triple)
                relations.append(triple)

    graph = build_graph(text.doc_id,
                        [(c.ctype, c.span) for c in pending],
                        relations, sorted(marker_spans))
    return ParseOutcome(graph=graph, errors=tuple(errors))


def strip_symbols(target: str, symbols: SymbolSet = SYMBOLS) -> str:
    """Best-effort removal of all ANL scaffolding, keeping spans and plain
    text with their original spacing. Idempotent on plain text; never raises.
    """
    current = target
    while True:
        segments, _ = _parse(current, symbols, with_marker_symbols=True)
        out: list[str] = []
        for seg in segments:
            if seg.kind == _PLAIN:
                out.append(seg.text)
            elif seg.kind == _MARKER:
                out.append(seg.text.strip())
            else:
                span = seg.fields[0].replace(f" {symbols.assign} ", " ")
                out.append(span.strip())
        cleaned = "".join(out)
        if cleaned == current:
            return cleaned
        # removing corrupt symbols can butt two halves of a two-character
        # symbol together; re-scan until nothing is left to remove
        current = cleaned
