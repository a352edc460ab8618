"""Deciding the list-decoding property, with witnesses.

A matrix is an ``l``-list-decoding code iff every ``l + 1`` rows have a
rainbow column (one showing all ``q`` symbols).  Two independent deciders
are provided: a pruned lexicographic subset search, and brute force over all
received words.

The received-word decider counts, for each output word, the *codewords*
compatible with it.  Read literally, the defining condition counts all of
``X^n``; that reading is never satisfiable for ``n >= 1`` and ``l < (q-1)^n``
so the codeword reading is the one implemented here.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

from .core import CodeMatrix, as_rows

OUTPUT_ENUMERATION_LIMIT = 10**7


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    is_code: bool
    witness: frozenset[int] | None = None
    output_word: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.is_code != (self.witness is None):
            raise ValueError("a witness is present exactly when is_code is False")


def compatible(codeword: Iterable[int], output: Iterable[int]) -> bool:
    """``output`` can be received from ``codeword``: they differ everywhere."""
    return all(a != b for a, b in zip(codeword, output, strict=True))


def _check_list_size(C: CodeMatrix, ell: int) -> None:
    if not 1 <= ell <= C.m - 1:
        raise ValueError(f"list size must be in 1..{C.m - 1}, got {ell}")


# Each row is packed into one integer: column j owns bits [j*w, j*w + q) with
# w = q + 1.  Adding LOW carries into the spare bit of a field exactly when
# the field is full, so rainbow detection over all columns is two big-int ops.


def _packing(C: CodeMatrix):
    q, w = C.q, C.q + 1
    rowbits = []
    for row in C.entries:
        x = 0
        for j, v in enumerate(row):
            x |= 1 << (j * w + int(v) - 1)
        rowbits.append(x)
    low = sum(1 << (j * w) for j in range(C.n))
    high = low << q
    return rowbits, low, high


def _field_counts_reach(x: int, n: int, q: int, need: int) -> bool:
    w, full = q + 1, (1 << q) - 1
    for j in range(n):
        if ((x >> (j * w)) & full).bit_count() >= need:
            return True
    return False


def _first_witness(rowbits, n, q, low, high, t, first) -> list[int] | None:
    """Lexicographically first ``t``-subset with smallest element ``first`` and
    no rainbow column, or None."""
    m = len(rowbits)
    if first + t > m:
        return None
    acc0 = rowbits[first]
    if (acc0 + low) & high:
        return None
    prefix = [first]

    def rec(start, acc):
        r = t - len(prefix)
        if r == 0:
            return list(prefix)
        # no column can still be completed: any completion is a witness
        if r < q and not _field_counts_reach(acc, n, q, q - r):
            return prefix + list(range(start, start + r))
        for i in range(start, m - r + 1):
            x = acc | rowbits[i]
            if (x + low) & high:
                continue
            prefix.append(i)
            res = rec(i + 1, x)
            if res is not None:
                return res
            prefix.pop()
        return None

    return rec(first + 1, acc0)


def _range_job(args):
    rowbits, n, q, low, high, t, firsts = args
    for first in firsts:
        res = _first_witness(rowbits, n, q, low, high, t, first)
        if res is not None:
            return res
    return None


def is_list_decoding(C: CodeMatrix, ell: int, workers: int = 1) -> Verdict:
    """Decide whether every ``ell + 1`` rows of ``C`` have a rainbow column.

    Subsets are enumerated in lexicographic order and a prefix is abandoned
    as soon as one of its columns is rainbow (all supersets are then covered).
    The witness is the lexicographically first confusable subset, for any
    ``workers`` count.
    """
    _check_list_size(C, ell)
    t = ell + 1
    rowbits, low, high = _packing(C)
    firsts = list(range(C.m - t + 1))
    if workers <= 1:
        found = _range_job((rowbits, C.n, C.q, low, high, t, firsts))
    else:
        chunks = [firsts[i::workers] for i in range(workers)]
        # chunks are strided, so take the smallest result over all of them
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(rowbits, C.n, C.q, low, high, t, sorted(ch)) for ch in chunks if ch]
            results = [r for r in pool.map(_range_job, jobs) if r is not None]
        found = min(results) if results else None
    if found is None:
        return Verdict(True)
    return Verdict(False, frozenset(found), adversarial_output(C, found))


def _compat_counts(C: CodeMatrix) -> np.ndarray:
    symbols = np.arange(1, C.q + 1)
    counts = np.zeros(C.q**C.n, dtype=np.int32)
    for row in C.entries:
        factors = [(symbols != v) for v in row]
        counts += reduce(np.multiply.outer, factors).ravel()
    return counts


def confusable_by_output(C: CodeMatrix, ell: int) -> Verdict:
    """Brute force: is some output word compatible with ``ell + 1`` codewords?"""
    _check_list_size(C, ell)
    if C.q**C.n > OUTPUT_ENUMERATION_LIMIT:
        raise InstanceTooLarge(
            f"q^n = {C.q}^{C.n} exceeds the enumeration limit {OUTPUT_ENUMERATION_LIMIT}"
        )
    counts = _compat_counts(C)
    hits = np.flatnonzero(counts >= ell + 1)
    if len(hits) == 0:
        return Verdict(True)
    word = tuple(int(d) + 1 for d in np.unravel_index(hits[0], (C.q,) * C.n))
    rows = [r for r in range(C.m) if compatible(C.entries[r], word)]
    return Verdict(False, frozenset(rows[: ell + 1]), word)


def max_compatible(C: CodeMatrix) -> int:
    """Largest number of codewords compatible with a single output word."""
    if C.q**C.n > OUTPUT_ENUMERATION_LIMIT:
        raise InstanceTooLarge(f"q^n = {C.q}^{C.n} exceeds the enumeration limit")
    return int(_compat_counts(C).max())


def adversarial_output(C: CodeMatrix, R: Iterable[int]) -> tuple[int, ...] | None:
    """An output word compatible with every row of ``R``, if one exists.

    Takes the smallest symbol missing from each column's image; None when
    some column is rainbow on ``R``.
    """
    rows = as_rows(R)
    if len(rows) == 0:
        raise ValueError("adversarial_output needs a nonempty row set")
    word = []
    for mask in C.image_masks(rows):
        mask = int(mask)
        missing = ~mask & (mask + 1)
        sym = missing.bit_length()
        if sym > C.q:
            return None
        word.append(sym)
    return tuple(word)


def rate(m: int, n: int, ell: int) -> float:
    """Zero-error list-of-``ell`` rate ``log2(m / ell) / n``."""
    if not (m > ell >= 1 and n >= 1):
        raise ValueError(f"rate needs m > ell >= 1 and n >= 1, got m={m} n={n} ell={ell}")
    return math.log2(m / ell) / n
