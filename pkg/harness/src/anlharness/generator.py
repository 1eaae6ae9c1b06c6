"""Beam-search generation over a saved checkpoint."""

from __future__ import annotations

import logging
from pathlib import Path

import torch

from .data import Pair
from .runspec import RunSpec
from .trainer import load_checkpoint

logger = logging.getLogger(__name__)


def generate_texts(model, codec, spec: RunSpec, inputs: list[str],
                   beam_width: int | None = None) -> list[str]:
    beams = beam_width or spec.beam_width
    outputs: list[str] = []
    model.eval()
    with torch.no_grad():
        for text in inputs:
            ids, _ = codec.encode(text, spec.max_input_length)
            input_ids = torch.tensor([ids], dtype=torch.long)
            generated = model.generate(
                input_ids=input_ids,
                attention_mask=torch.ones_like(input_ids),
                num_beams=beams,
                max_new_tokens=spec.max_target_length,
                early_stopping=beams > 1,
            )
            outputs.append(codec.decode(generated[0]))
    return outputs


def generate(ckpt_dir: str | Path, inputs: list[Pair],
             beam_width: int | None = None) -> list[dict]:
    """One {doc_id, output, truncated} record per input, deterministic for
    a fixed checkpoint and beam width."""
    model, codec, spec = load_checkpoint(ckpt_dir)
    torch.manual_seed(spec.seed)
    records: list[dict] = []
    texts: list[str] = []
    flags: list[bool] = []
    for item in inputs:
        _, truncated = codec.encode(item.input, spec.max_input_length)
        flags.append(truncated)
        texts.append(item.input)
    outputs = generate_texts(model, codec, spec, texts, beam_width)
    for item, output, truncated in zip(inputs, outputs, flags):
        if truncated:
            logger.warning("input for %s truncated to %d tokens",
                           item.doc_id, spec.max_input_length)
        records.append({"doc_id": item.doc_id, "output": output,
                        "truncated": truncated})
    return records
