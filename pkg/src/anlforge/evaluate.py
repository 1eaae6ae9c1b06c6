"""Exact-match micro-F1 scoring, error-rate accounting, and length stats.

Component tuples are (type, start, end); relation tuples pair the relation
type with both endpoint component tuples. True positives are pooled over
the whole corpus (micro averaging) and an exact tuple match is required.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .codec import AnlSequence, ErrorKind, ParseOutcome
from .core import AnlForgeError, ArgGraph, ArgText


class DocAlignmentError(AnlForgeError):
    """Gold and predicted corpora do not cover the same documents."""


@dataclass(frozen=True, slots=True)
class PrfScores:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def micro_f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall,
                "micro_f1": self.micro_f1}


@dataclass(frozen=True, slots=True)
class ErrorRates:
    """Percentage of generated sequences containing at least one error of
    each kind; a sequence can count toward several kinds."""

    invalid_token: float
    invalid_component: float
    invalid_format: float

    def to_json(self) -> dict:
        return {"IT": self.invalid_token, "IC": self.invalid_component,
                "IF": self.invalid_format}


@dataclass(frozen=True, slots=True)
class LengthStats:
    mean_len_standard: float
    mean_len_abbr: float
    reduction_pct: float

    def to_json(self) -> dict:
        return {"mean_len_standard": self.mean_len_standard,
                "mean_len_abbr": self.mean_len_abbr,
                "reduction_pct": self.reduction_pct}


@dataclass(frozen=True)
class EvalReport:
    ace: PrfScores
    arc: PrfScores
    error_rates: ErrorRates
    n_documents: int

    def to_json(self) -> dict:
        return {"ace": self.ace.to_json(), "arc": self.arc.to_json(),
                "error_rates": self.error_rates.to_json(),
                "n_documents": self.n_documents}


def _pair_by_doc(gold: Sequence[ArgGraph], outcomes: Sequence[ParseOutcome]
                 ) -> list[tuple[ArgGraph, ParseOutcome]]:
    gold_map = {g.text_ref: g for g in gold}
    pred_map = {o.graph.text_ref: o for o in outcomes}
    if len(gold_map) != len(gold) or len(pred_map) != len(outcomes):
        raise DocAlignmentError("duplicate doc_id in gold or predictions")
    if gold_map.keys() != pred_map.keys():
        missing = gold_map.keys() ^ pred_map.keys()
        raise DocAlignmentError(f"gold/prediction doc_id mismatch: "
                                f"{sorted(missing)[:5]}")
    return [(gold_map[doc_id], pred_map[doc_id]) for doc_id in sorted(gold_map)]


def error_rates(outcomes: Sequence[ParseOutcome]) -> ErrorRates:
    total = len(outcomes)
    if total == 0:
        return ErrorRates(0.0, 0.0, 0.0)
    counts = {kind: 0 for kind in ErrorKind}
    for outcome in outcomes:
        for kind in outcome.error_kinds():
            counts[kind] += 1
    return ErrorRates(
        invalid_token=100.0 * counts[ErrorKind.INVALID_TOKEN] / total,
        invalid_component=100.0 * counts[ErrorKind.INVALID_COMPONENT] / total,
        invalid_format=100.0 * counts[ErrorKind.INVALID_FORMAT] / total,
    )


def score(gold: Sequence[ArgGraph], outcomes: Sequence[ParseOutcome]
          ) -> EvalReport:
    """Corpus-pooled exact-match micro-F1 for components and relations.

    Structures inside error regions never reach the predicted graph, so
    they contribute only to the false counts, never to true positives.
    """
    ace_tp = ace_fp = ace_fn = 0
    arc_tp = arc_fp = arc_fn = 0
    for gold_graph, outcome in _pair_by_doc(gold, outcomes):
        gold_ace = gold_graph.ace_tuples()
        pred_ace = outcome.graph.ace_tuples()
        ace_tp += len(gold_ace & pred_ace)
        ace_fp += len(pred_ace - gold_ace)
        ace_fn += len(gold_ace - pred_ace)
        gold_arc = gold_graph.arc_tuples()
        pred_arc = outcome.graph.arc_tuples()
        arc_tp += len(gold_arc & pred_arc)
        arc_fp += len(pred_arc - gold_arc)
        arc_fn += len(gold_arc - pred_arc)
    return EvalReport(ace=PrfScores(ace_tp, ace_fp, ace_fn),
                      arc=PrfScores(arc_tp, arc_fp, arc_fn),
                      error_rates=error_rates(list(outcomes)),
                      n_documents=len(gold))


BUCKET_KEYS = ("adu_count", "sentence_count")


def bucket_scores(gold: Sequence[tuple[ArgText, ArgGraph]],
                  outcomes: Sequence[ParseOutcome],
                  key: str) -> dict[int, EvalReport]:
    """Per-bucket reports grouped by gold component count or sentence
    count. Buckets with no documents are simply absent."""
    if key not in BUCKET_KEYS:
        raise AnlForgeError(f"unknown bucket key {key!r}; expected {BUCKET_KEYS}")
    pred_map = {o.graph.text_ref: o for o in outcomes}
    grouped: dict[int, list[tuple[ArgGraph, ParseOutcome]]] = defaultdict(list)
    for text, graph in gold:
        if graph.text_ref not in pred_map:
            raise DocAlignmentError(f"no prediction for {graph.text_ref!r}")
        value = len(graph.components) if key == "adu_count" else text.n_sentences
        grouped[value].append((graph, pred_map[graph.text_ref]))
    return {
        value: score([g for g, _ in pairs], [o for _, o in pairs])
        for value, pairs in sorted(grouped.items())
    }


def target_token_length(sequence: AnlSequence) -> int:
    return len(sequence.target.split())


def length_stats(standard: Sequence[AnlSequence],
                 abbreviated: Sequence[AnlSequence]) -> LengthStats:
    """Mean target lengths plus the mean per-document reduction (percent)
    going from the standard to the abbreviated format."""
    std_map = {s.doc_id: s for s in standard}
    abbr_map = {s.doc_id: s for s in abbreviated}
    if std_map.keys() != abbr_map.keys():
        missing = std_map.keys() ^ abbr_map.keys()
        raise DocAlignmentError(f"standard/abbreviated doc_id mismatch: "
                                f"{sorted(missing)[:5]}")
    if not std_map:
        return LengthStats(0.0, 0.0, 0.0)
    std_lens = []
    abbr_lens = []
    reductions = []
    for doc_id in sorted(std_map):
        ls = target_token_length(std_map[doc_id])
        la = target_token_length(abbr_map[doc_id])
        std_lens.append(ls)
        abbr_lens.append(la)
        reductions.append(100.0 * (1.0 - la / ls) if ls else 0.0)
    n = len(std_lens)
    return LengthStats(mean_len_standard=sum(std_lens) / n,
                       mean_len_abbr=sum(abbr_lens) / n,
                       reduction_pct=sum(reductions) / n)
