"""Backend selector for the alignment kernel.

Imports the compiled kernel when available, otherwise the pure-Python
fallback. ``ANLFORGE_PURE_PYTHON=1`` forces the fallback; tests and the
benchmark switch explicitly via :func:`set_backend`.
"""

from __future__ import annotations

import os

from . import _alignment_py

_BACKENDS = {"python": _alignment_py}

try:
    from . import _alignment_cy  # type: ignore[attr-defined]

    _BACKENDS["cython"] = _alignment_cy
except ImportError:  # extension not built; pure Python still works
    _alignment_cy = None

if os.environ.get("ANLFORGE_PURE_PYTHON"):
    _active = _alignment_py
else:
    _active = _BACKENDS.get("cython", _alignment_py)


def set_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; "
                         f"built: {sorted(_BACKENDS)}") from None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    return _active.BACKEND_NAME


def find_match(hay, needle, used):
    return _active.find_match(hay, needle, used)


def mark_used(used, start, length):
    _active.mark_used(used, start, length)
