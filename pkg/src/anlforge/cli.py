"""Command-line entry point wiring the full pipeline.

Subcommands: ingest, markers (extract/build/annotate), encode, decode,
mft, eval, stats, synth, run. All file IO is JSONL/JSON/TSV as defined by
the individual modules; ``ANLFORGE_LOG`` controls verbosity.
"""

from __future__ import annotations

import argparse
import datetime
import functools
import hashlib
import json
import logging
import multiprocessing
import os
import sys
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

import yaml

from . import __version__, _alignment
from .codec import AnlSequence, AnlVariant, decode, encode, outcome_from_record
from .core import (AnlForgeError, LabelSchema, SchemaError, graph_to_record,
                   read_corpus, read_jsonl, record_to_graph, schema_for,
                   write_jsonl)
from .evaluate import bucket_scores, length_stats, score
from .ingest import (CORPORA, DmPair, load_label_remap, read_cdcp_corpus,
                     read_dm_pairs, read_standoff_corpus, unique_dms)
from .markers import (MarkerLexicon, annotate_markers, build_lexicon,
                      extract_candidates, load_filter_list)
from .mft import MftStrategy, build_amkt, build_dmkt, build_emkt, build_smmkt
from .synth import RELATION_MODES, synth_corpus

logger = logging.getLogger("anlforge")


def _setup_logging() -> None:
    level = os.environ.get("ANLFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_schema(args) -> LabelSchema:
    if getattr(args, "schema_file", None):
        payload = json.loads(Path(args.schema_file).read_text(encoding="utf-8"))
        return LabelSchema(component_types=tuple(payload["component_types"]),
                           relation_types=tuple(payload["relation_types"]))
    return schema_for(args.schema)


def _guard_me_variant(variant: AnlVariant, schema_name: str | None) -> None:
    # connective-bearing comment corpora keep markers inside component
    # spans, so the marker-enhanced format cannot be formed for them
    if variant is AnlVariant.ME_ACRE and schema_name == "cdcp":
        raise SchemaError("marker-enhanced encoding is not available for the "
                          "cdcp schema: its connectives sit inside component "
                          "spans")


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with multiprocessing.Pool(jobs) as pool:
        return pool.map(fn, items)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _bundled(name: str) -> Path:
    return Path(str(resources.files("anlforge").joinpath("data", name)))


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    if args.corpus not in CORPORA:
        raise AnlForgeError(f"unknown corpus {args.corpus!r}; "
                            f"expected one of {sorted(CORPORA)}")
    if args.corpus == "dm":
        pairs = read_dm_pairs(args.infile)
        count = write_jsonl(args.out, (p.to_record() for p in pairs))
    else:
        descriptor = CORPORA[args.corpus]
        if args.corpus == "cdcp":
            docs = read_cdcp_corpus(args.infile)
        else:
            remap = None
            if args.corpus == "aae-fg":
                remap_path = args.remap or Path(args.infile) / "fine_grained_labels.tsv"
                remap = load_label_remap(remap_path)
            docs = read_standoff_corpus(args.infile, descriptor.schema, remap)
        docs.sort(key=lambda d: d[0].doc_id)
        count = write_jsonl(args.out, (graph_to_record(t, g) for t, g in docs))
    print(f"ingest: wrote {count} records to {args.out}")
    return 0


def cmd_markers_extract(args) -> int:
    rows = 0
    with open(args.out, "w", encoding="utf-8") as handle:
        for text, graph in read_corpus(args.infile):
            for cand in extract_candidates(graph, text):
                handle.write(f"{cand.doc_id}\t{cand.kind}\t{cand.span[0]}\t"
                             f"{cand.span[1]}\t{cand.surface}\n")
                rows += 1
    print(f"markers extract: wrote {rows} candidates to {args.out}")
    return 0


def cmd_markers_build(args) -> int:
    candidates = []
    with open(args.candidates, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line:
                candidates.append(line.split("\t")[-1])
    filter_list = load_filter_list(args.filter) if args.filter else []
    discourse: list[str] = []
    if args.dm:
        discourse = unique_dms([DmPair.from_record(r) for r in read_jsonl(args.dm)])
    build = build_lexicon(candidates, filter_list, discourse)
    Path(args.out).write_text(
        json.dumps(build.lexicon.to_json(), indent=2) + "\n", encoding="utf-8")
    print(f"markers build: {build.raw_candidates} candidates -> "
          f"{build.unique_candidates} unique -> {build.final_size} kept "
          f"({build.rejected} filtered); {len(build.lexicon.discourse)} "
          f"connectives; wrote {args.out}")
    return 0


def _load_lexicon(path: str | Path) -> MarkerLexicon:
    return MarkerLexicon.from_json(
        json.loads(Path(path).read_text(encoding="utf-8")))


def cmd_markers_annotate(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    records = []
    for text, graph in read_corpus(args.infile):
        annotated = annotate_markers(graph, text, lexicon,
                                     include_discourse=args.include_discourse)
        records.append(graph_to_record(text, annotated))
    records.sort(key=lambda r: r["doc_id"])
    count = write_jsonl(args.out, records)
    marked = sum(1 for r in records if r["markers"])
    print(f"markers annotate: {marked}/{count} records carry markers; "
          f"wrote {args.out}")
    return 0


def _encode_record(record: dict, variant: AnlVariant,
                   schema: LabelSchema) -> dict:
    text, graph = record_to_graph(record)
    return encode(graph, text, variant, schema).to_record()


def cmd_encode(args) -> int:
    variant = AnlVariant.from_name(args.variant)
    schema = _load_schema(args)
    _guard_me_variant(variant, getattr(args, "schema", None))
    records = list(read_jsonl(args.infile))
    worker = functools.partial(_encode_record, variant=variant, schema=schema)
    pairs = _pmap(worker, records, args.jobs)
    pairs.sort(key=lambda r: r["doc_id"])
    count = write_jsonl(args.out, pairs)
    print(f"encode: wrote {count} {variant.value} pairs to {args.out}")
    return 0


def _decode_record(item: tuple[dict, dict], variant: AnlVariant,
                   schema: LabelSchema) -> dict:
    gen, doc_record = item
    text, _ = record_to_graph(doc_record)
    outcome = decode(gen["output"], text, variant, schema)
    return outcome.to_record()


def cmd_decode(args) -> int:
    variant = AnlVariant.from_name(args.variant)
    schema = _load_schema(args)
    corpus = {record["doc_id"]: record for record in read_jsonl(args.corpus)}
    work = []
    for gen in read_jsonl(args.generations):
        doc_id = gen.get("doc_id")
        if doc_id not in corpus:
            raise AnlForgeError(f"generation for unknown doc_id {doc_id!r}")
        work.append((gen, corpus[doc_id]))
    worker = functools.partial(_decode_record, variant=variant, schema=schema)
    outcomes = _pmap(worker, work, args.jobs)
    outcomes.sort(key=lambda r: r["doc_id"])
    count = write_jsonl(args.out, outcomes)
    clean = sum(1 for r in outcomes if not r["errors"])
    print(f"decode: {clean}/{count} sequences error-free; wrote {args.out}")
    return 0


def cmd_mft(args) -> int:
    strategy = MftStrategy.from_name(args.strategy)
    pairs = []
    if strategy is MftStrategy.D_MKT:
        for record in read_jsonl(args.infile):
            pairs.append(build_dmkt(DmPair.from_record(record)))
    else:
        lexicon = _load_lexicon(args.lexicon) if args.lexicon else None
        builder = {MftStrategy.A_MKT: build_amkt,
                   MftStrategy.SM_MKT: build_smmkt,
                   MftStrategy.E_MKT: build_emkt}[strategy]
        for text, graph in read_corpus(args.infile):
            if lexicon is not None:
                graph = annotate_markers(graph, text, lexicon,
                                         include_discourse=args.include_discourse)
            pairs.append(builder(text, graph.markers))
    count = write_jsonl(args.out, (p.to_record() for p in pairs))
    print(f"mft build: wrote {count} {strategy.value} pairs to {args.out}")
    return 0


def cmd_eval(args) -> int:
    gold = [graph for _, graph in read_corpus(args.gold)]
    outcomes = [outcome_from_record(r) for r in read_jsonl(args.pred)]
    report = score(gold, outcomes)
    Path(args.out).write_text(json.dumps(report.to_json(), indent=2) + "\n",
                              encoding="utf-8")
    print(f"eval score: ACE F1 {report.ace.micro_f1:.4f}, "
          f"ARC F1 {report.arc.micro_f1:.4f} over {report.n_documents} docs; "
          f"wrote {args.out}")
    return 0


def cmd_stats_length(args) -> int:
    def load(path):
        return [AnlSequence(doc_id=r["doc_id"],
                            variant=AnlVariant.from_name(r["variant"]),
                            input=r["input"], target=r["target"])
                for r in read_jsonl(path)]

    stats = length_stats(load(args.standard), load(args.abbr))
    Path(args.out).write_text(json.dumps(stats.to_json(), indent=2) + "\n",
                              encoding="utf-8")
    print(f"stats length: mean {stats.mean_len_standard:.2f} -> "
          f"{stats.mean_len_abbr:.2f} tokens "
          f"({stats.reduction_pct:.2f}% reduction); wrote {args.out}")
    return 0


def cmd_stats_buckets(args) -> int:
    gold = read_corpus(args.gold)
    outcomes = [outcome_from_record(r) for r in read_jsonl(args.pred)]
    grouped = bucket_scores(gold, outcomes, args.key)
    payload = {str(k): v.to_json() for k, v in grouped.items()}
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n",
                              encoding="utf-8")
    print(f"stats buckets: {len(grouped)} {args.key} buckets; wrote {args.out}")
    return 0


def cmd_synth(args) -> int:
    docs = synth_corpus(args.docs, schema=schema_for(args.schema),
                        seed=args.seed, relation_mode=args.relations,
                        with_markers=args.markers,
                        min_sentences=args.min_sentences,
                        max_sentences=args.max_sentences)
    count = write_jsonl(args.out, (graph_to_record(t, g) for t, g in docs))
    print(f"synth: wrote {count} documents to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Pipeline runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end demo settings: corpus in, report + manifest out."""

    corpus: str = "synth"          # descriptor or 'synth'
    corpus_file: str | None = None  # canonical JSONL; bundled demo if absent
    variant: str = "acre"
    lexicon: str | None = None
    filter_file: str | None = None
    out_dir: str = "runs/demo"
    seed: int = 0
    jobs: int = 1
    whitespace: str = "single_space"

    @classmethod
    def load(cls, path: str | Path | None, overrides: dict) -> "PipelineConfig":
        payload: dict = {}
        if path is not None:
            payload = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        config = cls(**payload)
        return replace(config, **{k: v for k, v in overrides.items()
                                  if v is not None})


def _encode_doc(doc, variant: AnlVariant, schema: LabelSchema):
    text, graph = doc
    return encode(graph, text, variant, schema)


def _decode_pair(item, variant: AnlVariant, schema: LabelSchema):
    target, text = item
    return decode(target, text, variant, schema)


def run_pipeline(config: PipelineConfig) -> dict:
    """markers -> encode -> decode(gold targets) -> eval, with a manifest.

    Deterministic for a fixed config; the pipeline identity (decoding the
    gold targets) must score a perfect F1, which the manifest records.
    """
    variant = AnlVariant.from_name(config.variant)
    _guard_me_variant(variant, config.corpus)
    schema = (schema_for("aae") if config.corpus == "synth"
              else schema_for(config.corpus))
    for label, value in (("corpus_file", config.corpus_file),
                         ("lexicon", config.lexicon),
                         ("filter_file", config.filter_file)):
        if value is not None and not Path(value).exists():
            raise AnlForgeError(f"configured {label} does not exist: {value}")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    corpus_path = Path(config.corpus_file) if config.corpus_file \
        else _bundled("demo_corpus.jsonl")
    docs = read_corpus(corpus_path)

    filter_path = Path(config.filter_file) if config.filter_file \
        else _bundled("default_filter.txt")
    candidates = [c for t, g in docs for c in extract_candidates(g, t)]
    build = build_lexicon(candidates, load_filter_list(filter_path))
    lexicon = build.lexicon
    if config.lexicon:
        lexicon = _load_lexicon(config.lexicon)
    lexicon_path = out_dir / "lexicon.json"
    lexicon_path.write_text(json.dumps(lexicon.to_json(), indent=2) + "\n",
                            encoding="utf-8")

    annotated = [(t, annotate_markers(g, t, lexicon)) for t, g in docs]
    annotated.sort(key=lambda d: d[0].doc_id)
    corpus_out = out_dir / "corpus.jsonl"
    write_jsonl(corpus_out, (graph_to_record(t, g) for t, g in annotated))

    pairs = _pmap(functools.partial(_encode_doc, variant=variant,
                                    schema=schema), annotated, config.jobs)
    pairs_path = out_dir / "pairs.jsonl"
    write_jsonl(pairs_path, (p.to_record() for p in pairs))

    text_by_id = {t.doc_id: t for t, _ in annotated}
    outcomes = _pmap(
        functools.partial(_decode_pair, variant=variant, schema=schema),
        [(p.target, text_by_id[p.doc_id]) for p in pairs], config.jobs)
    parsed_path = out_dir / "parsed.jsonl"
    write_jsonl(parsed_path, (o.to_record() for o in outcomes))

    report = score([g for _, g in annotated], outcomes)
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(report.to_json(), indent=2) + "\n",
                           encoding="utf-8")

    manifest = {
        "tool": "anlforge",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "alignment_backend": _alignment.backend_name(),
        "config": asdict(config),
        "inputs": {str(corpus_path): _sha256(corpus_path)},
        "outputs": {
            str(path): {"sha256": _sha256(path)}
            for path in (lexicon_path, corpus_out, pairs_path, parsed_path,
                         report_path)
        },
        "counts": {"documents": len(docs), "pairs": len(pairs),
                   "lexicon": len(lexicon.argumentative)},
        "scores": {"ace_f1": report.ace.micro_f1, "arc_f1": report.arc.micro_f1},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def cmd_run(args) -> int:
    overrides = {"corpus": args.corpus, "corpus_file": args.corpus_file,
                 "variant": args.variant, "out_dir": args.out_dir,
                 "seed": args.seed, "jobs": args.jobs}
    config = PipelineConfig.load(args.config, overrides)
    manifest = run_pipeline(config)
    print(f"run: ACE F1 {manifest['scores']['ace_f1']:.4f}, "
          f"ARC F1 {manifest['scores']['arc_f1']:.4f}; "
          f"artifacts in {config.out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anlforge",
        description="Argument-mining ANL toolchain: corpora in, "
                    "fine-tuning pairs and evaluation reports out.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert a source corpus to JSONL")
    p.add_argument("--corpus", required=True, choices=sorted(CORPORA))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--remap", help="fine-grained label remap file")
    p.set_defaults(func=cmd_ingest)

    markers = sub.add_parser("markers", help="marker candidate/lexicon tools")
    msub = markers.add_subparsers(dest="subcommand", required=True)
    p = msub.add_parser("extract", help="emit candidate spans as TSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_markers_extract)
    p = msub.add_parser("build", help="curate a lexicon from candidates")
    p.add_argument("--candidates", required=True)
    p.add_argument("--filter", help="rejected spans, one per line")
    p.add_argument("--dm", help="connective pairs JSONL for the discourse set")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_markers_build)
    p = msub.add_parser("annotate", help="attach lexicon marker spans")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--include-discourse", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_markers_annotate)

    variants = [v.value for v in AnlVariant]
    p = sub.add_parser("encode", help="graphs -> ANL training pairs")
    p.add_argument("--variant", required=True, choices=variants)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default="aae", choices=sorted(k for k in CORPORA
                                                             if k != "dm"))
    p.add_argument("--schema-file", help="JSON with component/relation types")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="generated targets -> parsed graphs")
    p.add_argument("--variant", required=True, choices=variants)
    p.add_argument("--generations", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default="aae", choices=sorted(k for k in CORPORA
                                                             if k != "dm"))
    p.add_argument("--schema-file")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_decode)

    mft = sub.add_parser("mft", help="marker fine-tuning dataset builders")
    fsub = mft.add_subparsers(dest="subcommand", required=True)
    p = fsub.add_parser("build")
    p.add_argument("--strategy", required=True,
                   choices=[s.value for s in MftStrategy])
    p.add_argument("--in", dest="infile", required=True,
                   help="corpus JSONL (or connective pairs for dmkt)")
    p.add_argument("--lexicon", help="annotate markers before building")
    p.add_argument("--include-discourse", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mft)

    evalp = sub.add_parser("eval", help="exact-match micro-F1 scoring")
    esub = evalp.add_subparsers(dest="subcommand", required=True)
    p = esub.add_parser("score")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    stats = sub.add_parser("stats", help="length and bucket statistics")
    ssub = stats.add_subparsers(dest="subcommand", required=True)
    p = ssub.add_parser("length")
    p.add_argument("--standard", required=True)
    p.add_argument("--abbr", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats_length)
    p = ssub.add_parser("buckets")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--key", required=True, choices=["adu_count", "sentence_count"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats_buckets)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--docs", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema", default="aae", choices=sorted(k for k in CORPORA
                                                             if k != "dm"))
    p.add_argument("--relations", default="tree", choices=RELATION_MODES)
    p.add_argument("--markers", action="store_true")
    p.add_argument("--min-sentences", type=int, default=1)
    p.add_argument("--max-sentences", type=int, default=4)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="demo pipeline with manifest")
    p.add_argument("--config", help="YAML config; flags override")
    p.add_argument("--corpus", choices=sorted(CORPORA) + ["synth"])
    p.add_argument("--corpus-file")
    p.add_argument("--variant", choices=variants)
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnlForgeError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
