# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled token-subsequence search used by the ANL decoder.

Behaviour matches ``_alignment_py`` exactly; see that module for the
contract. Inputs are int32 token-id arrays plus an optional uint8 mask of
already-consumed positions.
"""

from libc.stdint cimport int32_t, uint8_t

BACKEND_NAME = "cython"


def find_match(int32_t[::1] hay, int32_t[::1] needle, used):
    cdef Py_ssize_t n = hay.shape[0]
    cdef Py_ssize_t m = needle.shape[0]
    if m == 0 or m > n:
        return -1
    cdef uint8_t[::1] mask
    cdef bint has_mask = used is not None
    if has_mask:
        mask = used
    cdef int32_t first = needle[0]
    cdef Py_ssize_t start, offset
    cdef bint ok
    for start in range(n - m + 1):
        if hay[start] != first:
            continue
        ok = True
        for offset in range(1, m):
            if hay[start + offset] != needle[offset]:
                ok = False
                break
        if ok and has_mask:
            for offset in range(m):
                if mask[start + offset]:
                    ok = False
                    break
        if ok:
            return start
    return -1


def mark_used(used, Py_ssize_t start, Py_ssize_t length):
    used[start:start + length] = 1
