"""Deterministic synthetic annotated corpora.

Used by the demo pipeline, the property suites, and toy training runs.
Every component span carries a unique anchor word, so spans are globally
unique within a document and alignment is unambiguous by construction.
"""

from __future__ import annotations

import random

from .core import AAE_SCHEMA, ArgGraph, ArgText, LabelSchema, build_graph, tokenize

_FILLER = (
    "the a this that these such every some most many strong weak public "
    "local national modern early recent clear simple fair open shared "
    "policy debate evidence study report survey council school student "
    "teacher citizen budget market price cost benefit value risk growth "
    "health safety traffic housing energy water climate park library city "
    "region group team plan rule law change result effect reason support "
    "shows suggests requires improves reduces increases remains becomes "
    "offers provides limits protects concerns drives needs helps"
).split()

_LEAD_PHRASES = (
    ["however", ","],
    ["therefore", ","],
    ["in", "fact", ","],
    ["for", "this", "reason", ","],
    ["i", "strongly", "agree", "that"],
    ["it", "is", "clear", "that"],
    ["last", "but", "not", "least", ","],
)

_GAP_PHRASES = (
    ["because"],
    ["since"],
    ["and", "thus"],
    ["which", "means", "that"],
)

DEFAULT_FILTER = (
    "In spite of the importance of sports activities",
    "Nevertheless, opponents of online-degrees would argue that",
)

RELATION_MODES = ("none", "tree", "graph")


def _component_words(rng: random.Random, anchor: int) -> list[str]:
    words = [rng.choice(_FILLER) for _ in range(rng.randint(2, 5))]
    words[rng.randrange(len(words))] = f"topic{anchor}"
    return words


def synth_doc(doc_id: str, rng: random.Random, schema: LabelSchema,
              relation_mode: str = "tree", with_markers: bool = False,
              min_sentences: int = 1, max_sentences: int = 4
              ) -> tuple[ArgText, ArgGraph]:
    """One synthetic paragraph with components, optional markers, and
    relations in the requested mode ('none', single-parent 'tree', or free
    'graph')."""
    if relation_mode not in RELATION_MODES:
        raise ValueError(f"relation_mode must be one of {RELATION_MODES}")
    tokens: list[str] = []
    comps: list[tuple[str, tuple[int, int]]] = []
    markers: list[tuple[int, int]] = []
    anchor = 0

    def emit(words: list[str]) -> tuple[int, int]:
        start = len(tokens)
        tokens.extend(words)
        return (start, start + len(words) - 1)

    for _ in range(rng.randint(min_sentences, max_sentences)):
        sent_start = len(tokens)
        n_here = rng.choices([0, 1, 2], weights=[2, 5, 3])[0]
        if n_here == 0:
            emit([rng.choice(_FILLER) for _ in range(rng.randint(3, 7))])
        else:
            if rng.random() < 0.7:
                lead = emit(list(rng.choice(_LEAD_PHRASES)))
                if with_markers:
                    markers.append(lead)
            anchor += 1
            comps.append((rng.choice(schema.component_types),
                          emit(_component_words(rng, anchor))))
            if n_here == 2:
                if rng.random() < 0.6:
                    gap = emit(list(rng.choice(_GAP_PHRASES)))
                    if with_markers:
                        markers.append(gap)
                else:
                    emit([rng.choice(_FILLER) for _ in range(rng.randint(1, 2))])
                anchor += 1
                comps.append((rng.choice(schema.component_types),
                              emit(_component_words(rng, anchor))))
            if rng.random() < 0.5:
                emit([rng.choice(_FILLER) for _ in range(rng.randint(1, 4))])
        emit(["."])
        first = tokens[sent_start]
        tokens[sent_start] = first[0].upper() + first[1:]

    relations: list[tuple[str, int, int]] = []
    n = len(comps)
    if relation_mode == "tree" and n >= 2:
        root = rng.randrange(n)
        for i in range(n):
            if i == root or rng.random() < 0.25:
                continue
            tail = rng.choice([j for j in range(n) if j != i])
            relations.append((rng.choice(schema.relation_types), i, tail))
    elif relation_mode == "graph" and n >= 2:
        seen: set[tuple[str, int, int]] = set()
        for _ in range(rng.randint(1, 2 * n)):
            head = rng.randrange(n)
            tail = rng.choice([j for j in range(n) if j != head])
            triple = (rng.choice(schema.relation_types), head, tail)
            if triple not in seen:
                seen.add(triple)
                relations.append(triple)

    text = tokenize(" ".join(tokens), doc_id=doc_id)
    graph = build_graph(doc_id, comps, relations, markers)
    return text, graph


def synth_corpus(n_docs: int, schema: LabelSchema = AAE_SCHEMA, seed: int = 0,
                 relation_mode: str = "tree", with_markers: bool = False,
                 min_sentences: int = 1, max_sentences: int = 4,
                 doc_prefix: str = "synth") -> list[tuple[ArgText, ArgGraph]]:
    rng = random.Random(seed)
    return [
        synth_doc(f"{doc_prefix}{i:04d}", rng, schema, relation_mode,
                  with_markers, min_sentences, max_sentences)
        for i in range(n_docs)
    ]
