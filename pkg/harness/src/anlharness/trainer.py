"""Fine-tuning loop: pairs in, checkpoint directory + loss log out.

The default "tiny" base model is a small randomly initialized
encoder-decoder over a word-level vocabulary built from the training
pairs, sized to overfit toy corpora on a CPU in minutes. Naming a real
checkpoint in ``base_model`` switches to that model and its own
tokenizer; the training loop is identical.
"""

from __future__ import annotations

import json
import logging
import random
from pathlib import Path

import torch
import yaml
from transformers import T5Config, T5ForConditionalGeneration

from .data import Pair
from .runspec import RunSpec
from .vocab import WordVocab

logger = logging.getLogger(__name__)

LOG_EVERY = 25


class WordCodec:
    """Encoder/decoder between strings and id tensors over a WordVocab."""

    def __init__(self, vocab: WordVocab):
        self.vocab = vocab

    @property
    def pad_id(self) -> int:
        return self.vocab.pad_id

    @property
    def eos_id(self) -> int:
        return self.vocab.eos_id

    def encode(self, text: str, max_length: int) -> tuple[list[int], bool]:
        ids = self.vocab.encode(text, add_eos=True)
        if len(ids) > max_length:
            return ids[:max_length - 1] + [self.eos_id], True
        return ids, False

    def decode(self, ids) -> str:
        return self.vocab.decode(int(i) for i in ids)

    def save(self, ckpt_dir: Path) -> None:
        self.vocab.save(ckpt_dir / "vocab.json")


class HfCodec:
    """Tokenizer-backed codec for pretrained checkpoints."""

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer

    @property
    def pad_id(self) -> int:
        return self.tokenizer.pad_token_id

    @property
    def eos_id(self) -> int:
        return self.tokenizer.eos_token_id

    def encode(self, text: str, max_length: int) -> tuple[list[int], bool]:
        ids = self.tokenizer(text, truncation=False).input_ids
        if len(ids) > max_length:
            return ids[:max_length - 1] + [self.eos_id], True
        return ids, False

    def decode(self, ids) -> str:
        return self.tokenizer.decode([int(i) for i in ids],
                                     skip_special_tokens=True)

    def save(self, ckpt_dir: Path) -> None:
        self.tokenizer.save_pretrained(ckpt_dir)


def _tiny_model(spec: RunSpec, vocab: WordVocab) -> T5ForConditionalGeneration:
    config = T5Config(
        vocab_size=len(vocab),
        d_model=spec.d_model,
        d_kv=spec.d_model // spec.num_heads,
        d_ff=spec.d_ff,
        num_layers=spec.num_layers,
        num_decoder_layers=spec.num_layers,
        num_heads=spec.num_heads,
        dropout_rate=0.0,
        feed_forward_proj="relu",
        pad_token_id=vocab.pad_id,
        eos_token_id=vocab.eos_id,
        decoder_start_token_id=vocab.pad_id,
        tie_word_embeddings=True,
    )
    return T5ForConditionalGeneration(config)


def _build(spec: RunSpec, pairs: list[Pair]):
    """Model + codec, warm-started from ``init_ckpt`` when given."""
    texts = [p.input for p in pairs] + [p.target for p in pairs]
    if spec.init_ckpt:
        model, codec, _ = load_checkpoint(spec.init_ckpt)
        if isinstance(codec, WordCodec):
            added = codec.vocab.extend(texts)
            if added:
                model.resize_token_embeddings(len(codec.vocab))
                logger.info("extended vocabulary by %d tokens", added)
        return model, codec
    if spec.base_model == "tiny":
        vocab = WordVocab.build(texts)
        return _tiny_model(spec, vocab), WordCodec(vocab)
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(spec.base_model)
    model = AutoModelForSeq2SeqLM.from_pretrained(spec.base_model)
    return model, HfCodec(tokenizer)


def _batch_tensors(batch: list[Pair], codec, spec: RunSpec):
    enc = [codec.encode(p.input, spec.max_input_length)[0] for p in batch]
    dec = [codec.encode(p.target, spec.max_target_length)[0] for p in batch]
    in_len = max(len(x) for x in enc)
    out_len = max(len(x) for x in dec)
    pad = codec.pad_id
    input_ids = torch.full((len(batch), in_len), pad, dtype=torch.long)
    labels = torch.full((len(batch), out_len), -100, dtype=torch.long)
    for row, (e, d) in enumerate(zip(enc, dec)):
        input_ids[row, :len(e)] = torch.tensor(e)
        labels[row, :len(d)] = torch.tensor(d)
    attention = (input_ids != pad).long()
    return input_ids, attention, labels


def save_checkpoint(model, codec, spec: RunSpec, ckpt_dir: str | Path) -> Path:
    ckpt_dir = Path(ckpt_dir)
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(ckpt_dir)
    codec.save(ckpt_dir)
    (ckpt_dir / "runspec.yaml").write_text(yaml.safe_dump(spec.to_dict()),
                                           encoding="utf-8")
    return ckpt_dir


def load_checkpoint(ckpt_dir: str | Path):
    """Returns (model, codec, runspec)."""
    ckpt_dir = Path(ckpt_dir)
    spec = RunSpec(**yaml.safe_load(
        (ckpt_dir / "runspec.yaml").read_text(encoding="utf-8")))
    model = T5ForConditionalGeneration.from_pretrained(ckpt_dir) \
        if (ckpt_dir / "vocab.json").exists() else None
    if model is not None:
        codec = WordCodec(WordVocab.load(ckpt_dir / "vocab.json"))
    else:
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        model = AutoModelForSeq2SeqLM.from_pretrained(ckpt_dir)
        codec = HfCodec(AutoTokenizer.from_pretrained(ckpt_dir))
    return model, codec, spec


def _greedy_exact_match(model, codec, spec: RunSpec,
                        pairs: list[Pair]) -> float:
    from .generator import generate_texts

    outputs = generate_texts(model, codec, spec, [p.input for p in pairs],
                             beam_width=1)
    hits = sum(1 for out, pair in zip(outputs, pairs) if out == pair.target)
    return hits / len(pairs) if pairs else 0.0


def finetune(spec: RunSpec, pairs: list[Pair], out_dir: str | Path,
             dev_pairs: list[Pair] | None = None) -> Path:
    """Train for ``spec.steps`` steps and write the checkpoint to
    ``out_dir`` (plus ``step_N/`` snapshots every ``save_every`` steps).

    With a dev set, the snapshot with the best greedy exact-match rate is
    the one written to ``out_dir``; otherwise the final weights are.
    """
    if not pairs:
        raise ValueError("no training pairs")
    torch.manual_seed(spec.seed)
    rng = random.Random(spec.seed)
    model, codec = _build(spec, pairs)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=spec.learning_rate)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    loss_log: list[dict] = []
    order: list[Pair] = []
    best = (-1.0, None)  # (dev exact-match, state_dict)

    def evaluate_and_track(step: int) -> None:
        nonlocal best
        if dev_pairs is None:
            return
        model.eval()
        rate = _greedy_exact_match(model, codec, spec, dev_pairs)
        model.train()
        loss_log.append({"step": step, "dev_exact_match": rate})
        if rate > best[0]:
            state = {k: v.detach().clone()
                     for k, v in model.state_dict().items()}
            best = (rate, state)

    for step in range(1, spec.steps + 1):
        if len(order) < spec.batch_size:
            refill = list(pairs)
            rng.shuffle(refill)
            order.extend(refill)
        batch = [order.pop() for _ in range(spec.batch_size)]
        input_ids, attention, labels = _batch_tensors(batch, codec, spec)
        loss = model(input_ids=input_ids, attention_mask=attention,
                     labels=labels).loss
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        if step % LOG_EVERY == 0 or step == spec.steps:
            loss_log.append({"step": step, "loss": float(loss.item())})
            logger.info("step %d loss %.4f", step, float(loss.item()))
        if spec.save_every and step % spec.save_every == 0 \
                and step < spec.steps:
            save_checkpoint(model, codec, spec, out_dir / f"step_{step}")
            evaluate_and_track(step)

    evaluate_and_track(spec.steps)
    if best[1] is not None:
        model.load_state_dict(best[1])
    save_checkpoint(model, codec, spec, out_dir)
    with open(out_dir / "loss_log.jsonl", "w", encoding="utf-8") as handle:
        for entry in loss_log:
            handle.write(json.dumps(entry) + "\n")
    return out_dir
