"""Corpus readers producing canonical document records.

Three sources are supported: brat-style standoff essays (text file plus
character-offset annotation file, split into paragraph records), comment
corpora shipped as proposition/link JSON, and tab-separated connective
sentence pairs.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .core import (AAE_FG_SCHEMA, AAE_SCHEMA, CDCP_SCHEMA, AnlForgeError,
                   ArgGraph, ArgText, LabelSchema, build_graph,
                   is_single_parent, tokenize, validate_graph)

logger = logging.getLogger(__name__)


class IngestError(AnlForgeError):
    """A corpus file cannot be read or is structurally broken."""


class AnnotationAlignmentError(IngestError):
    """A character span cannot be mapped onto token boundaries."""


class DmValidationError(IngestError):
    """A connective pair violates the leading-connective contract."""


@dataclass(frozen=True)
class CorpusDescriptor:
    name: str
    schema: LabelSchema | None


CORPORA: dict[str, CorpusDescriptor] = {
    "aae": CorpusDescriptor("aae", AAE_SCHEMA),
    "aae-fg": CorpusDescriptor("aae-fg", AAE_FG_SCHEMA),
    "cdcp": CorpusDescriptor("cdcp", CDCP_SCHEMA),
    "dm": CorpusDescriptor("dm", None),
}


@dataclass(frozen=True)
class DmPair:
    """Adjacent sentence pair whose second sentence led with a connective
    in the source corpus; the connective is stripped for storage."""

    sen1: str
    sen2: str
    dm: str

    def __post_init__(self) -> None:
        if not self.sen1 or not self.sen2:
            raise DmValidationError("connective pair with an empty sentence")

    def to_record(self) -> dict:
        return {"sen1": self.sen1, "sen2": self.sen2, "dm": self.dm}

    @classmethod
    def from_record(cls, record: dict) -> "DmPair":
        return cls(sen1=record["sen1"], sen2=record["sen2"], dm=record["dm"])


def _match_label(raw: str, allowed: tuple[str, ...], where: str) -> str:
    """Map a corpus label onto a schema label, tolerating case and a
    trailing plural-s ("supports" -> "Support")."""
    if raw in allowed:
        return raw
    folded = raw.casefold()
    for label in allowed:
        if folded == label.casefold() or folded.rstrip("s") == label.casefold():
            return label
    raise IngestError(f"{where}: unknown label {raw!r}; expected {allowed}")


def _token_span(text: ArgText, char_start: int, char_end: int,
                where: str) -> tuple[int, int]:
    """Smallest token span enclosing a half-open character span, warning
    when the boundaries had to be snapped."""
    tokens = text.tokens
    ts = next((i for i, t in enumerate(tokens) if t.char_end > char_start), None)
    te = next((i for i in range(len(tokens) - 1, -1, -1)
               if tokens[i].char_start < char_end), None)
    if ts is None or te is None or ts > te:
        raise AnnotationAlignmentError(
            f"{where}: span ({char_start},{char_end}) covers no tokens")
    if tokens[ts].char_start != char_start or tokens[te].char_end != char_end:
        logger.warning("%s: snapped span (%d,%d) to token boundaries (%d,%d)",
                       where, char_start, char_end,
                       tokens[ts].char_start, tokens[te].char_end)
    return ts, te


# ---------------------------------------------------------------------------
# Standoff essays
# ---------------------------------------------------------------------------

_PARA_SPLIT_RE = re.compile(r"\n+")


def load_label_remap(path: str | Path) -> dict[tuple[str, str], str]:
    """Fine-grained relabeling file: ``<doc-stem>\\t<Tid>\\t<type>`` lines."""
    remap: dict[tuple[str, str], str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise IngestError(f"{path}:{lineno}: expected 3 tab-separated fields")
        remap[(parts[0], parts[1])] = parts[2]
    return remap


def read_standoff_corpus(root: str | Path, schema: LabelSchema,
                         remap: dict[tuple[str, str], str] | None = None
                         ) -> list[tuple[ArgText, ArgGraph]]:
    """Read every ``*.txt``/``*.ann`` pair under ``root`` into paragraph
    records. The first line of each text file (the prompt) is excluded;
    the remainder splits into paragraphs on newline runs. Relations whose
    endpoints land in different paragraphs are dropped with a warning.
    """
    root = Path(root)
    txt_files = sorted(root.glob("*.txt"))
    if not txt_files:
        raise IngestError(f"no .txt documents under {root}")
    docs: list[tuple[ArgText, ArgGraph]] = []
    for txt_path in txt_files:
        ann_path = txt_path.with_suffix(".ann")
        if not ann_path.exists():
            raise IngestError(f"missing annotation file {ann_path}")
        docs.extend(_read_standoff_doc(txt_path, ann_path, schema, remap))
    return docs


def _parse_ann(ann_path: Path) -> tuple[dict, list]:
    entities: dict[str, tuple[str, int, int]] = {}
    relations: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(ann_path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        tag = parts[0]
        where = f"{ann_path}:{lineno}"
        if tag.startswith("T"):
            if len(parts) < 2:
                raise IngestError(f"{where}: malformed entity line")
            body = parts[1]
            if ";" in body:
                raise IngestError(f"{where}: discontinuous spans are not supported")
            label, start, end = body.split()
            entities[tag] = (label, int(start), int(end))
        elif tag.startswith("R"):
            fields = parts[1].split()
            if len(fields) != 3:
                raise IngestError(f"{where}: malformed relation line")
            label = fields[0]
            args = {}
            for fragment in fields[1:]:
                key, _, value = fragment.partition(":")
                args[key] = value
            if "Arg1" not in args or "Arg2" not in args:
                raise IngestError(f"{where}: relation without Arg1/Arg2")
            relations.append((label, args["Arg1"], args["Arg2"]))
        # attribute (A), note (#) and event lines carry no graph structure
    return entities, relations


def _read_standoff_doc(txt_path: Path, ann_path: Path, schema: LabelSchema,
                       remap: dict[tuple[str, str], str] | None
                       ) -> list[tuple[ArgText, ArgGraph]]:
    raw = txt_path.read_text(encoding="utf-8")
    stem = txt_path.stem
    entities, relations = _parse_ann(ann_path)

    newline = raw.find("\n")
    body_offset = newline + 1 if newline >= 0 else len(raw)
    paragraphs: list[tuple[int, int]] = []  # absolute char ranges
    cursor = body_offset
    for match in _PARA_SPLIT_RE.finditer(raw, body_offset):
        if match.start() > cursor:
            paragraphs.append((cursor, match.start()))
        cursor = match.end()
    if cursor < len(raw):
        paragraphs.append((cursor, len(raw)))

    texts: list[ArgText] = []
    comp_lists: list[list[tuple[str, str, tuple[int, int]]]] = []
    para_of_tid: dict[str, int] = {}
    for index, (pstart, pend) in enumerate(paragraphs):
        doc_id = f"{stem}_p{index + 1:02d}"
        texts.append(tokenize(raw[pstart:pend], doc_id=doc_id))
        comp_lists.append([])
    for tid in sorted(entities, key=lambda t: entities[t][1]):
        raw_label, cstart, cend = entities[tid]
        home = next((i for i, (ps, pe) in enumerate(paragraphs)
                     if ps <= cstart < pe), None)
        if home is None or cend > paragraphs[home][1]:
            raise AnnotationAlignmentError(
                f"{stem}/{tid}: span ({cstart},{cend}) crosses paragraph bounds")
        if remap is not None:
            raw_label = remap.get((stem, tid), raw_label)
        label = _match_label(raw_label, schema.component_types, f"{stem}/{tid}")
        pstart = paragraphs[home][0]
        span = _token_span(texts[home], cstart - pstart, cend - pstart,
                           f"{stem}/{tid}")
        para_of_tid[tid] = home
        comp_lists[home].append((tid, label, span))

    rel_lists: list[list[tuple[str, int, int]]] = [[] for _ in paragraphs]
    for raw_label, head_tid, tail_tid in relations:
        if head_tid not in para_of_tid or tail_tid not in para_of_tid:
            raise IngestError(f"{stem}: relation endpoint {head_tid}/{tail_tid} "
                              f"has no entity")
        head_para = para_of_tid[head_tid]
        if head_para != para_of_tid[tail_tid]:
            logger.warning("%s: dropping cross-paragraph relation %s -> %s",
                           stem, head_tid, tail_tid)
            continue
        label = _match_label(raw_label, schema.relation_types, stem)
        tids = [tid for tid, _, _ in comp_lists[head_para]]
        rel_lists[head_para].append(
            (label, tids.index(head_tid), tids.index(tail_tid)))

    docs: list[tuple[ArgText, ArgGraph]] = []
    for text, comps, rels in zip(texts, comp_lists, rel_lists):
        graph = build_graph(text.doc_id,
                            [(label, span) for _, label, span in comps], rels)
        validate_graph(graph, text, schema)
        if not is_single_parent(graph):
            logger.warning("%s: component with multiple outgoing relations "
                           "(tree property violated)", text.doc_id)
        docs.append((text, graph))
    return docs


# ---------------------------------------------------------------------------
# Proposition/link comments
# ---------------------------------------------------------------------------

def read_cdcp_corpus(root: str | Path) -> list[tuple[ArgText, ArgGraph]]:
    """Read ``*.txt`` + ``*.ann.json`` comment files (proposition offset
    list plus reason/evidence links). One record per comment; graphs may be
    arbitrary DAGs, including transitive triples."""
    root = Path(root)
    txt_files = sorted(p for p in root.glob("*.txt"))
    if not txt_files:
        raise IngestError(f"no .txt documents under {root}")
    schema = CDCP_SCHEMA
    docs: list[tuple[ArgText, ArgGraph]] = []
    for txt_path in txt_files:
        ann_path = txt_path.with_name(txt_path.stem + ".ann.json")
        if not ann_path.exists():
            raise IngestError(f"missing annotation file {ann_path}")
        payload = json.loads(ann_path.read_text(encoding="utf-8"))
        stem = txt_path.stem
        text = tokenize(txt_path.read_text(encoding="utf-8"), doc_id=stem)
        labels = payload.get("prop_labels", [])
        offsets = payload.get("prop_offsets", [])
        if len(labels) != len(offsets):
            raise IngestError(f"{stem}: {len(labels)} labels for "
                              f"{len(offsets)} proposition offsets")
        comps = []
        for k, (raw_label, (cstart, cend)) in enumerate(zip(labels, offsets)):
            label = _match_label(raw_label, schema.component_types, f"{stem}/p{k}")
            comps.append((label, _token_span(text, cstart, cend, f"{stem}/p{k}")))
        rels: list[tuple[str, int, int]] = []
        for key, rtype in (("reasons", "Reason"), ("evidences", "Evidence")):
            for (src_lo, src_hi), trg in payload.get(key, []):
                for src in range(src_lo, src_hi + 1):
                    if not (0 <= src < len(comps) and 0 <= trg < len(comps)):
                        raise IngestError(f"{stem}: link {src}->{trg} out of range")
                    rels.append((rtype, src, trg))
        graph = build_graph(stem, comps, rels)
        validate_graph(graph, text, schema)
        docs.append((text, graph))
    return docs


# ---------------------------------------------------------------------------
# Connective sentence pairs
# ---------------------------------------------------------------------------

def read_dm_pairs(path: str | Path) -> list[DmPair]:
    """Tab-separated (sen1, sen2, dm) lines. The connective must lead sen2
    (case-insensitive) and is stripped for storage; lines with the wrong
    field count are skipped and counted."""
    pairs: list[DmPair] = []
    skipped = 0
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[0].strip() or not parts[1].strip():
                skipped += 1
                continue
            sen1, sen2, dm = (p.strip() for p in parts)
            if dm and not sen2.lower().startswith(dm.lower()):
                raise DmValidationError(
                    f"{path}:{lineno}: connective {dm!r} does not lead {sen2!r}")
            stored = sen2[len(dm):].lstrip()
            if not stored:
                raise DmValidationError(
                    f"{path}:{lineno}: nothing left of sen2 after the connective")
            pairs.append(DmPair(sen1=sen1, sen2=stored, dm=dm))
    if skipped:
        logger.warning("%s: skipped %d malformed lines", path, skipped)
    return pairs


def unique_dms(pairs: list[DmPair]) -> list[str]:
    return sorted({pair.dm for pair in pairs})
