"""Command-line entry point: ``train`` and ``gen``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .data import PairFormatError, load_inputs, load_pairs
from .generator import generate
from .runspec import RunSpec
from .trainer import finetune

logger = logging.getLogger("anlharness")


def cmd_train(args) -> int:
    overrides = {"stage": args.stage, "strategy": args.strategy,
                 "init_ckpt": args.init, "steps": args.steps,
                 "seed": args.seed}
    spec = RunSpec.load(args.spec, **overrides) if args.spec \
        else RunSpec(**{k: v for k, v in overrides.items() if v is not None})
    pairs = load_pairs(args.pairs)
    dev = load_pairs(args.dev) if args.dev else None
    ckpt = finetune(spec, pairs, args.out, dev_pairs=dev)
    print(f"train: {spec.stage} stage, {len(pairs)} pairs, {spec.steps} "
          f"steps -> {ckpt}")
    return 0


def cmd_gen(args) -> int:
    inputs = load_inputs(args.infile)
    records = generate(args.ckpt, inputs, beam_width=args.beam)
    with open(args.out, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    truncated = sum(1 for r in records if r["truncated"])
    print(f"gen: wrote {len(records)} generations to {args.out}"
          + (f" ({truncated} truncated)" if truncated else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anlharness",
        description="Toy seq2seq trainer/generator over toolchain pair files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune on a pairs file")
    p.add_argument("--spec", help="run.yaml; flags override")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dev", help="dev pairs for checkpoint selection")
    p.add_argument("--stage", choices=["mft", "argtanl"])
    p.add_argument("--strategy", choices=["amkt", "smmkt", "emkt", "dmkt"])
    p.add_argument("--init", help="checkpoint to warm-start from")
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gen", help="generate outputs for an inputs file")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beam", type=int, help="override the checkpoint's beam")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("ANLFORGE_LOG", "WARNING").upper(),
                      logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PairFormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
