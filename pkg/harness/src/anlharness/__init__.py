"""anlharness: a thin seq2seq fine-tuning and inference harness.

Consumes pair files produced by the anlforge toolchain and emits
generation files it can score. Targets are treated as opaque strings;
all sequence-structure logic stays in the toolchain.
"""

__version__ = "0.1.0"

from .runspec import RunSpec
from .trainer import finetune
from .generator import generate

__all__ = ["__version__", "RunSpec", "finetune", "generate"]
