"""Run configuration for one fine-tuning or generation stage."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import yaml

STAGES = ("mft", "argtanl")
STRATEGIES = ("amkt", "smmkt", "emkt", "dmkt")


@dataclass(frozen=True)
class RunSpec:
    """Stage settings; defaults follow the standard training recipe
    (AdamW, lr 5e-4, beam 8, 512-token inputs)."""

    stage: str = "argtanl"
    strategy: str | None = None      # required when stage == "mft"
    base_model: str = "tiny"         # "tiny" = random init; else an HF name
    init_ckpt: str | None = None     # warm start for stage chaining
    batch_size: int = 4
    learning_rate: float = 0.0005
    max_input_length: int = 512      # 1024 for long-comment corpora
    max_target_length: int = 512
    steps: int = 800
    save_every: int = 200            # 0 = final checkpoint only
    beam_width: int = 8
    seed: int = 0
    # tiny-model shape (ignored when base_model names a real checkpoint)
    d_model: int = 128
    d_ff: int = 256
    num_layers: int = 2
    num_heads: int = 4

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")
        if self.stage == "mft" and self.strategy not in STRATEGIES:
            raise ValueError(f"mft stage needs a strategy from {STRATEGIES}")
        if self.batch_size < 1 or self.steps < 1 or self.beam_width < 1:
            raise ValueError("batch_size, steps and beam_width must be >= 1")

    @classmethod
    def load(cls, path: str | Path, **overrides) -> "RunSpec":
        payload = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        spec = cls(**payload)
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(spec, **clean) if clean else spec

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)
