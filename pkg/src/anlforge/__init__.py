"""anlforge: argument-mining corpora to augmented-natural-language targets
and back, with marker lexicons, fine-tuning data builders, and exact-match
evaluation."""

__version__ = "0.1.0"

from .codec import (AnlError, AnlSequence, AnlVariant, ErrorKind,
                    ParseOutcome, decode, encode, strip_symbols)
from .core import (AAE_FG_SCHEMA, AAE_SCHEMA, CDCP_SCHEMA, SYMBOLS,
                   AnlForgeError, ArgComponent, ArgGraph, ArgRelation,
                   ArgText, LabelSchema, SymbolSet, Token, build_graph,
                   schema_for, span_text, tokenize, validate_graph)
from .evaluate import EvalReport, bucket_scores, error_rates, length_stats, score
from .ingest import (DmPair, read_cdcp_corpus, read_dm_pairs,
                     read_standoff_corpus)
from .markers import (MarkerCandidate, MarkerLexicon, annotate_markers,
                      build_lexicon, extract_candidates, normalize_marker)
from .mft import (MftPair, MftStrategy, build_amkt, build_dmkt, build_emkt,
                  build_smmkt)
from .synth import synth_corpus, synth_doc

__all__ = [
    "__version__",
    "AnlError", "AnlSequence", "AnlVariant", "ErrorKind", "ParseOutcome",
    "decode", "encode", "strip_symbols",
    "AAE_FG_SCHEMA", "AAE_SCHEMA", "CDCP_SCHEMA", "SYMBOLS",
    "AnlForgeError", "ArgComponent", "ArgGraph", "ArgRelation", "ArgText",
    "LabelSchema", "SymbolSet", "Token", "build_graph", "schema_for",
    "span_text", "tokenize", "validate_graph",
    "EvalReport", "bucket_scores", "error_rates", "length_stats", "score",
    "DmPair", "read_cdcp_corpus", "read_dm_pairs", "read_standoff_corpus",
    "MarkerCandidate", "MarkerLexicon", "annotate_markers", "build_lexicon",
    "extract_candidates", "normalize_marker",
    "MftPair", "MftStrategy", "build_amkt", "build_dmkt", "build_emkt",
    "build_smmkt",
    "synth_corpus", "synth_doc",
]
