"""Pure-Python token-subsequence search.

Reference implementation of the decode hot path; the compiled module in
``_alignment_cy.pyx`` mirrors this behaviour exactly. Both operate on
int32 token-id arrays so that documents are interned once and needles
compare by integer equality.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def find_match(hay: np.ndarray, needle: np.ndarray, used: np.ndarray | None) -> int:
    """Leftmost start index where ``needle`` occurs in ``hay`` over
    entirely unused positions; -1 when there is none.

    ``used`` is a uint8 mask of consumed positions (``None`` disables the
    mask). A zero-length needle never matches.
    """
    n = len(hay)
    m = len(needle)
    if m == 0 or m > n:
        return -1
    first = needle[0]
    for start in range(n - m + 1):
        if hay[start] != first:
            continue
        ok = True
        for offset in range(1, m):
            if hay[start + offset] != needle[offset]:
                ok = False
                break
        if ok and used is not None:
            for offset in range(m):
                if used[start + offset]:
                    ok = False
                    break
        if ok:
            return start
    return -1


def mark_used(used: np.ndarray, start: int, length: int) -> None:
    used[start:start + length] = 1
