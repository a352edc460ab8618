"""Code matrices, row subsets, ensembles and phased distributions.

Rows are codewords and columns are hash functions.  Symbols are the
integers ``1..q``.  Row and column *indices* in the Python API are 0-based
(numpy convention); the text formats on disk are 1-based for symbols and
for ensemble row indices.

Column images are kept as bitmasks: symbol ``x`` is bit ``x - 1``.  For
``q <= 64`` the masks live in a ``uint64`` array so image union and
cardinality are one machine word per column; larger alphabets fall back to
an object array of Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64


class MatrixFormatError(ValueError):
    """Malformed matrix or ensemble text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EntryRangeError(MatrixFormatError):
    """A matrix entry outside ``1..q``."""

    def __init__(self, row: int, col: int, value: int, q: int, line: int | None = None):
        self.row, self.col, self.value = row, col, value
        super().__init__(
            f"entry at (row {row}, col {col}) is {value}, outside 1..{q}", line
        )


def _popcount(masks):
    masks = np.asarray(masks)
    if masks.dtype == object:
        return np.vectorize(int.bit_count, otypes=[np.int64])(masks)
    return np.bitwise_count(masks).astype(np.int64)


def full_mask(q: int) -> int:
    return (1 << q) - 1


def mask_to_symbols(mask: int) -> frozenset[int]:
    mask = int(mask)
    out = []
    x = 1
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return frozenset(out)


def symbols_to_mask(symbols: Iterable[int]) -> int:
    mask = 0
    for x in symbols:
        mask |= 1 << (int(x) - 1)
    return mask


class CodeMatrix:
    """An ``m x n`` matrix over the alphabet ``1..q``.

    Parameters
    ----------
    entries : array_like
        2-D integer array.  Copied and made read-only.
    q : int
        Alphabet size, at least 2.
    """

    def __init__(self, entries, q: int):
        arr = np.array(entries, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"entries must be 2-D, got shape {arr.shape}")
        if q < 2:
            raise ValueError(f"alphabet size q must be >= 2, got {q}")
        m, n = arr.shape
        if m < 1 or n < 1:
            raise ValueError(f"matrix must have m >= 1 and n >= 1, got {m}x{n}")
        bad = np.argwhere((arr < 1) | (arr > q))
        if len(bad):
            r, c = (int(v) for v in bad[0])
            raise EntryRangeError(r + 1, c + 1, int(arr[r, c]), q)
        arr.setflags(write=False)
        self.entries = arr
        self.q = int(q)
        self._masks = None

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def masks(self) -> np.ndarray:
        """Per-entry one-hot symbol masks, shape ``(m, n)``."""
        if self._masks is None:
            if self.q <= WORD_BITS:
                masks = np.left_shift(np.uint64(1), (self.entries - 1).astype(np.uint64))
            else:
                masks = np.empty(self.shape, dtype=object)
                for (r, c), v in np.ndenumerate(self.entries):
                    masks[r, c] = 1 << (int(v) - 1)
            masks.setflags(write=False)
            self._masks = masks
        return self._masks

    def column(self, h: int) -> np.ndarray:
        self._check_col(h)
        return self.entries[:, h]

    def _check_col(self, h: int) -> None:
        if not 0 <= h < self.n:
            raise IndexError(f"column index {h} out of range 0..{self.n - 1}")

    def _check_rows(self, rows: np.ndarray) -> None:
        if len(rows) and (rows.min() < 0 or rows.max() >= self.m):
            raise IndexError(f"row index out of range 0..{self.m - 1}")

    def image_masks(self, rows: Iterable[int]) -> np.ndarray:
        """Image bitmask of ``rows`` in every column (length ``n``)."""
        rows = as_rows(rows)
        self._check_rows(rows)
        if len(rows) == 0:
            if self.q <= WORD_BITS:
                return np.zeros(self.n, dtype=np.uint64)
            return np.array([0] * self.n, dtype=object)
        return np.bitwise_or.reduce(self.masks[rows], axis=0)

    def image_sizes(self, rows: Iterable[int]) -> np.ndarray:
        return _popcount(self.image_masks(rows))

    def without_rainbow(self, rows: Iterable[int]) -> bool:
        """True when no column shows all ``q`` symbols on ``rows``."""
        return bool(np.all(self.image_sizes(rows) <= self.q - 1))

    def __eq__(self, other):
        if not isinstance(other, CodeMatrix):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.q, self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"CodeMatrix(m={self.m}, n={self.n}, q={self.q})"


def as_rows(rows: Iterable[int]) -> np.ndarray:
    """Normalise a row subset to a sorted, duplicate-free int array."""
    if isinstance(rows, np.ndarray):
        arr = rows.astype(np.int64, copy=False).ravel()
    else:
        arr = np.fromiter((int(r) for r in rows), dtype=np.int64)
    return np.unique(arr)


def image_size_stack(C: CodeMatrix, sets: np.ndarray) -> np.ndarray:
    """Image sizes for a stack of equal-size row sets, shape ``(L, n)``."""
    sets = np.asarray(sets, dtype=np.int64)
    if sets.shape[1] == 0:
        return np.zeros((sets.shape[0], C.n), dtype=np.int64)
    return _popcount(np.bitwise_or.reduce(C.masks[sets], axis=1))


def image_mask_stack(C: CodeMatrix, sets: np.ndarray) -> np.ndarray:
    sets = np.asarray(sets, dtype=np.int64)
    if sets.shape[1] == 0:
        dtype = np.uint64 if C.q <= WORD_BITS else object
        return np.zeros((sets.shape[0], C.n), dtype=dtype)
    return np.bitwise_or.reduce(C.masks[sets], axis=1)


def column_image(C: CodeMatrix, h: int, R: Iterable[int]) -> frozenset[int]:
    """The set of symbols column ``h`` takes on the rows ``R``."""
    C._check_col(h)
    rows = as_rows(R)
    C._check_rows(rows)
    return frozenset(int(v) for v in np.unique(C.entries[rows, h]))


def _symbol_counts(C: CodeMatrix, h: int, U: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    C._check_col(h)
    rows = as_rows(U)
    C._check_rows(rows)
    counts = np.bincount(C.entries[rows, h], minlength=C.q + 1)
    return rows, counts


def most_frequent_symbol(C: CodeMatrix, h: int, U: Iterable[int]) -> tuple[int, int]:
    """Most common symbol of column ``h`` over ``U``; ties go to the smallest."""
    rows, counts = _symbol_counts(C, h, U)
    if len(rows) == 0:
        raise ValueError("most_frequent_symbol needs a nonempty universe")
    sym = int(np.argmax(counts[1:])) + 1
    return sym, int(counts[sym])


def restrict_universe(C: CodeMatrix, h: int, U: Iterable[int], symbol: int) -> np.ndarray:
    """Rows of ``U`` on which column ``h`` equals ``symbol`` (sorted array)."""
    if not 1 <= symbol <= C.q:
        raise ValueError(f"symbol {symbol} outside 1..{C.q}")
    C._check_col(h)
    rows = as_rows(U)
    C._check_rows(rows)
    return rows[C.entries[rows, h] == symbol]


# -- weight functions ---------------------------------------------------------


@dataclass(frozen=True)
class WeightFunction:
    """A 0/1 weight on the alphabet; ``bits[x - 1]`` is the weight of ``x``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("weights must be 0 or 1")

    @property
    def q(self) -> int:
        return len(self.bits)

    @property
    def mask(self) -> int:
        return symbols_to_mask(x + 1 for x, b in enumerate(self.bits) if b)

    def __call__(self, symbols: Iterable[int]) -> int:
        return sum(self.bits[int(x) - 1] for x in symbols)

    @classmethod
    def from_index(cls, index: int, q: int) -> "WeightFunction":
        """Weight function number ``index`` in lexicographic order of ``bits``."""
        return cls(tuple((index >> (q - 1 - i)) & 1 for i in range(q)))

    @property
    def index(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    @classmethod
    def ones(cls, q: int) -> "WeightFunction":
        return cls((1,) * q)

    @classmethod
    def zeros(cls, q: int) -> "WeightFunction":
        return cls((0,) * q)


# -- ensembles and phased distributions --------------------------------------


@dataclass
class Ensemble:
    """An ordered list of row subsets (each a sorted int array)."""

    sets: list[np.ndarray]

    def __post_init__(self):
        if not self.sets:
            raise ValueError("an ensemble needs at least one set")
        self.sets = [as_rows(s) for s in self.sets]

    @property
    def L(self) -> int:
        return len(self.sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i):
        return self.sets[i]

    def sizes(self) -> np.ndarray:
        return np.array([len(s) for s in self.sets], dtype=np.int64)

    def is_uniform(self) -> bool:
        return len(set(len(s) for s in self.sets)) == 1

    def stacked(self) -> np.ndarray:
        """``(L, size)`` array; only valid when every set has the same size."""
        if not self.is_uniform():
            raise ValueError("ensemble sets have different sizes")
        return np.vstack(self.sets) if self.sets[0].size else np.zeros((self.L, 0), dtype=np.int64)

    def image_sizes(self, C: CodeMatrix) -> np.ndarray:
        """Image size of every member in every column, shape ``(L, n)``."""
        if self.is_uniform():
            return image_size_stack(C, self.stacked())
        return np.vstack([C.image_sizes(s) for s in self.sets])

    def image_masks(self, C: CodeMatrix) -> np.ndarray:
        if self.is_uniform():
            return image_mask_stack(C, self.stacked())
        return np.vstack([C.image_masks(s) for s in self.sets])

    @classmethod
    def singleton_empty(cls) -> "Ensemble":
        return cls([np.zeros(0, dtype=np.int64)])


@dataclass
class Phase:
    """``count`` independent draws from ``probs`` over ``rows``."""

    count: int
    rows: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.count < 1:
            raise ValueError(f"phase draw count must be >= 1, got {self.count}")
        if self.rows.shape != self.probs.shape:
            raise ValueError("rows and probs must have the same length")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("phase probabilities must be nonnegative and sum to 1")

    @classmethod
    def uniform(cls, rows: Iterable[int], count: int) -> "Phase":
        rows = as_rows(rows)
        if len(rows) == 0:
            raise ValueError("uniform phase over an empty universe")
        return cls(count, rows, np.full(len(rows), 1.0 / len(rows)))

    def symbol_distribution(self, C: CodeMatrix, h: int) -> np.ndarray:
        """Probability of each symbol ``1..q`` in column ``h`` (length ``q``)."""
        col = C.column(h)[self.rows]
        return np.bincount(col - 1, weights=self.probs, minlength=C.q)


@dataclass
class PhasedDistribution:
    """Union of independent phases: ``D_1^{a_1} v ... v D_k^{a_k}``.

    The empty distribution (no phases) is the constant empty set.
    """

    phases: list[Phase] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.phases)

    @property
    def total_draws(self) -> int:
        return sum(p.count for p in self.phases)

    @property
    def universe(self) -> np.ndarray:
        if not self.phases:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate([p.rows[p.probs > 0] for p in self.phases]))

    def join(self, other: "PhasedDistribution | Phase") -> "PhasedDistribution":
        if isinstance(other, Phase):
            return PhasedDistribution(self.phases + [other])
        return PhasedDistribution(self.phases + other.phases)

    __or__ = join

    def symbol_tables(self, C: CodeMatrix, h: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw counts ``(k,)`` and per-phase symbol probabilities ``(k, q)``."""
        counts = np.array([p.count for p in self.phases], dtype=float)
        if not self.phases:
            return counts, np.zeros((0, C.q))
        return counts, np.vstack([p.symbol_distribution(C, h) for p in self.phases])


# -- text formats -------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_matrix(text: str) -> CodeMatrix:
    """Parse the ``m n q`` header followed by ``m`` rows of ``n`` symbols."""
    lines = list(_content_lines(text))
    if not lines:
        raise MatrixFormatError("empty matrix file")
    lineno, header = lines[0]
    try:
        m, n, q = (int(tok) for tok in header.split())
    except ValueError:
        raise MatrixFormatError(f"header must be 'm n q', got {header!r}", lineno) from None
    if m < 1 or n < 1 or q < 2:
        raise MatrixFormatError(f"invalid dimensions m={m} n={n} q={q}", lineno)
    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise MatrixFormatError(f"expected {m} rows, found {len(body)}", where)
    entries = np.empty((m, n), dtype=np.int64)
    for r, (lineno, line) in enumerate(body):
        toks = line.split()
        if len(toks) != n:
            raise MatrixFormatError(f"expected {n} entries, found {len(toks)}", lineno)
        for c, tok in enumerate(toks):
            try:
                v = int(tok)
            except ValueError:
                raise MatrixFormatError(f"non-integer entry {tok!r}", lineno) from None
            if not 1 <= v <= q:
                raise EntryRangeError(r + 1, c + 1, v, q, lineno)
            entries[r, c] = v
    return CodeMatrix(entries, q)


def format_matrix(C: CodeMatrix) -> str:
    out = [f"{C.m} {C.n} {C.q}"]
    out.extend(" ".join(str(int(v)) for v in row) for row in C.entries)
    return "\n".join(out) + "\n"


def load_matrix(path) -> CodeMatrix:
    return parse_matrix(Path(path).read_text())


def save_matrix(C: CodeMatrix, path) -> None:
    Path(path).write_text(format_matrix(C), newline="\n")


def parse_ensemble(text: str, m: int | None = None) -> Ensemble:
    """One row subset per line, 1-based row indices separated by spaces.

    A line holding only ``-`` denotes the empty set.
    """
    sets = []
    for lineno, line in _content_lines(text):
        if line == "-":
            sets.append(np.zeros(0, dtype=np.int64))
            continue
        try:
            idx = [int(tok) for tok in line.split()]
        except ValueError:
            raise MatrixFormatError(f"non-integer row index in {line!r}", lineno) from None
        if min(idx) < 1 or (m is not None and max(idx) > m):
            raise MatrixFormatError(f"row index outside 1..{m}", lineno)
        if len(set(idx)) != len(idx):
            raise MatrixFormatError("duplicate row index", lineno)
        sets.append(np.array(idx, dtype=np.int64) - 1)
    if not sets:
        raise MatrixFormatError("empty ensemble file")
    return Ensemble(sets)


def format_ensemble(ens: Ensemble) -> str:
    lines = [" ".join(str(int(r) + 1) for r in s) if len(s) else "-" for s in ens]
    return "\n".join(lines) + "\n"


def log2_size(rows: Sequence[int] | np.ndarray) -> float:
    return math.log2(len(rows)) if len(rows) else -math.inf
