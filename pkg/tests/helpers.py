"""Shared test utilities: independent oracles and fault injectors.

Everything here deliberately avoids the library code paths it is used to
check: candidate sets come from an occupancy scan, micro-F1 from literal
set intersection, and mutated targets from string surgery on rendered
sequences.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from anlforge.codec import AnlVariant, ErrorKind, encode
from anlforge.core import ArgGraph, ArgText, LabelSchema, build_graph, span_text
from anlforge.synth import synth_corpus

# ---------------------------------------------------------------------------
# Marker-candidate oracle: occupancy scan over token indices
# ---------------------------------------------------------------------------


def brute_force_candidates(graph: ArgGraph, text: ArgText
                           ) -> set[tuple[str, int, int]]:
    """(kind, start, end) candidate set derived from an occupancy bitmap
    instead of component adjacency."""
    n = text.n_tokens
    occupied = [False] * n
    starts = set()
    for comp in graph.components:
        starts.add(comp.span[0])
        for i in range(comp.span[0], comp.span[1] + 1):
            occupied[i] = True
    found: set[tuple[str, int, int]] = set()
    for sent_start, sent_end in text.sentence_bounds:
        first = next((i for i in range(sent_start, sent_end + 1) if i in starts),
                     None)
        if first is None or first == sent_start:
            continue
        if not any(occupied[i] for i in range(sent_start, first)):
            found.add(("leading", sent_start, first - 1))
    # maximal unoccupied runs fenced by components on both sides
    i = 0
    while i < n:
        if occupied[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and not occupied[j + 1]:
            j += 1
        if (i > 0 and j < n - 1 and occupied[i - 1] and occupied[j + 1]
                and text.sentence_of(i - 1) == text.sentence_of(j + 1)):
            found.add(("sandwich", i, j))
        i = j + 1
    return found


# ---------------------------------------------------------------------------
# Micro-F1 oracle: literal per-tuple counting
# ---------------------------------------------------------------------------


def oracle_counts(gold_sets: list[set], pred_sets: list[set]
                  ) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for gold, pred in zip(gold_sets, pred_sets):
        for item in pred:
            if item in gold:
                tp += 1
            else:
                fp += 1
        for item in gold:
            if item not in pred:
                fn += 1
    return tp, fp, fn


def oracle_prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) \
        if precision + recall else 0.0
    return precision, recall, f1


def random_span_graph(doc_id: str, rng: random.Random, schema: LabelSchema,
                      max_components: int = 6, max_relations: int = 4
                      ) -> ArgGraph:
    """Random small graph over a virtual 60-token document (eval only
    inspects tuples, never the text)."""
    n = rng.randint(0, max_components)
    cuts = sorted(rng.sample(range(60), 2 * n)) if n else []
    comps = [(rng.choice(schema.component_types), (cuts[2 * k], cuts[2 * k + 1]))
             for k in range(n)]
    rels: list[tuple[str, int, int]] = []
    seen = set()
    if n >= 2:
        for _ in range(rng.randint(0, max_relations)):
            head = rng.randrange(n)
            tail = rng.choice([j for j in range(n) if j != head])
            triple = (rng.choice(schema.relation_types), head, tail)
            if triple not in seen:
                seen.add(triple)
                rels.append(triple)
    return build_graph(doc_id, comps, rels)


def perturb_graph(graph: ArgGraph, rng: random.Random,
                  schema: LabelSchema) -> ArgGraph:
    """A prediction-like variant of a gold graph: some components kept,
    some retyped or shifted, some dropped; relations re-derived likewise."""
    comps = []
    keep: dict[str, int] = {}
    for comp in graph.components:
        roll = rng.random()
        if roll < 0.2:
            continue
        ctype, span = comp.ctype, comp.span
        if roll < 0.4:
            ctype = rng.choice(schema.component_types)
        elif roll < 0.6:
            span = (span[0], span[1] + 1)
        keep[comp.comp_id] = len(comps)
        comps.append((ctype, span))
    rels = []
    seen = set()
    for rel in graph.relations:
        if rel.head in keep and rel.tail in keep and rng.random() < 0.8:
            rtype = rel.rtype if rng.random() < 0.8 \
                else rng.choice(schema.relation_types)
            triple = (rtype, keep[rel.head], keep[rel.tail])
            if triple not in seen:
                seen.add(triple)
                rels.append(triple)
    return build_graph(graph.text_ref, comps, rels)


def dense_tree_docs(n_docs: int, seed: int, schema: LabelSchema
                    ) -> list[tuple[ArgText, ArgGraph]]:
    """Relation-dense documents for the abbreviation suite: every span has
    at least three tokens and every non-root component carries exactly one
    outgoing relation (a full tree), the regime ID referencing compresses."""
    rng = random.Random(seed)
    out: list[tuple[ArgText, ArgGraph]] = []
    pool = synth_corpus(10 * n_docs, schema=schema, seed=seed,
                        relation_mode="none", min_sentences=2, max_sentences=4)
    for text, graph in pool:
        if len(out) == n_docs:
            break
        comps = sorted(graph.components, key=lambda c: c.span)
        if len(comps) < 2:
            continue
        if any(c.span[1] - c.span[0] < 2 for c in comps):
            continue
        root = rng.randrange(len(comps))
        rels = [(rng.choice(schema.relation_types), i,
                 rng.choice([j for j in range(len(comps)) if j != i]))
                for i in range(len(comps)) if i != root]
        out.append((text, build_graph(text.doc_id,
                                      [(c.ctype, c.span) for c in comps],
                                      rels)))
    assert len(out) == n_docs, "generator pool exhausted"
    return out


# ---------------------------------------------------------------------------
# Mutation corpus for the error taxonomy
# ---------------------------------------------------------------------------

_GROUP_RE = re.compile(r"\[ .*? \]")
_JUNK = ("zxqglint", "vrelmorp", "qwuvtrax")


@dataclass(frozen=True)
class MutationCase:
    doc_id: str
    target: str
    expected: frozenset[ErrorKind]


def _group_spans(target: str) -> list[re.Match]:
    return list(_GROUP_RE.finditer(target))


def _replace_span_field(target: str, match: re.Match, junk: str) -> str:
    content = target[match.start() + 2:match.end() - 2]
    fields = content.split(" | ")
    fields[0] = junk
    return target[:match.start()] + "[ " + " | ".join(fields) + " ]" \
        + target[match.end():]


def _redirect_tail(target: str, match: re.Match, gap_text: str) -> str:
    content = target[match.start() + 2:match.end() - 2]
    fields = content.split(" | ")
    for k in range(2, len(fields)):
        rtype, _, _ = fields[k].partition(" = ")
        fields[k] = f"{rtype} = {gap_text}"
        break
    return target[:match.start()] + "[ " + " | ".join(fields) + " ]" \
        + target[match.end():]


def _drop_close(target: str, match: re.Match) -> str:
    return target[:match.end() - 1] + target[match.end():]


def _gap_text(text: ArgText, graph: ArgGraph) -> str | None:
    occupied = set()
    for comp in graph.components:
        occupied.update(range(comp.span[0], comp.span[1] + 1))
    free = [i for i in range(text.n_tokens) if i not in occupied]
    if not free:
        return None
    # longest free run reads most like a plausible hallucinated tail
    runs: list[tuple[int, int]] = []
    for i in free:
        if runs and runs[-1][1] == i - 1:
            runs[-1] = (runs[-1][0], i)
        else:
            runs.append((i, i))
    start, end = max(runs, key=lambda r: r[1] - r[0])
    return span_text(text, (start, end))


def build_mutation_corpus(n_docs: int, seed: int, schema: LabelSchema,
                          mix: dict[str, int]) -> list[MutationCase]:
    """Render clean end-to-end targets, then inject the requested number of
    single- and mixed-fault cases.

    Faults target groups that no relation references as a tail, so each
    injected defect maps to exactly one error kind.
    """
    rng = random.Random(seed)
    docs = synth_corpus(n_docs, schema=schema, seed=seed, relation_mode="tree",
                        min_sentences=2, max_sentences=4)
    rendered = []
    for text, graph in docs:
        seq = encode(graph, text, AnlVariant.ACRE, schema)
        matches = _group_spans(seq.target)
        comps = sorted(graph.components, key=lambda c: c.span)
        tails = {rel.tail for rel in graph.relations}
        safe = [k for k, comp in enumerate(comps) if comp.comp_id not in tails]
        with_rel = [k for k, comp in enumerate(comps)
                    if any(r.head == comp.comp_id for r in graph.relations)]
        rendered.append((text, graph, seq, matches, safe, with_rel))

    cases: list[MutationCase] = []

    def pick(predicate):
        pool = [r for r in rendered if predicate(r)]
        return pool[rng.randrange(len(pool))] if pool else None

    for _ in range(mix.get("clean", 0)):
        text, _, seq, *_ = rendered[rng.randrange(len(rendered))]
        cases.append(MutationCase(text.doc_id, seq.target, frozenset()))
    for _ in range(mix.get("IF", 0)):
        text, _, seq, matches, safe, _ = pick(lambda r: r[4])
        mutated = _drop_close(seq.target, matches[rng.choice(safe)])
        cases.append(MutationCase(text.doc_id, mutated,
                                  frozenset({ErrorKind.INVALID_FORMAT})))
    for _ in range(mix.get("IT", 0)):
        text, _, seq, matches, safe, _ = pick(lambda r: r[4])
        mutated = _replace_span_field(seq.target, matches[rng.choice(safe)],
                                      " ".join(_JUNK[:2]))
        cases.append(MutationCase(text.doc_id, mutated,
                                  frozenset({ErrorKind.INVALID_TOKEN})))
    for _ in range(mix.get("IC", 0)):
        text, graph, seq, matches, _, with_rel = pick(
            lambda r: r[5] and _gap_text(r[0], r[1]) is not None)
        gap = _gap_text(text, graph)
        mutated = _redirect_tail(seq.target, matches[rng.choice(with_rel)], gap)
        cases.append(MutationCase(text.doc_id, mutated,
                                  frozenset({ErrorKind.INVALID_COMPONENT})))
    for _ in range(mix.get("IT+IF", 0)):
        picked = pick(lambda r: len(r[4]) >= 2)
        text, _, seq, matches, safe, _ = picked
        first, second = sorted(rng.sample(safe, 2))
        mutated = _drop_close(seq.target, matches[second])
        mutated = _replace_span_field(mutated, _group_spans(mutated)[first],
                                      " ".join(_JUNK[1:]))
        cases.append(MutationCase(
            text.doc_id, mutated,
            frozenset({ErrorKind.INVALID_TOKEN, ErrorKind.INVALID_FORMAT})))
    rng.shuffle(cases)
    return cases
