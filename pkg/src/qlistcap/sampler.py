"""Checking whether an ensemble of row sets is a (gamma, delta)-sampler.

For a column ``h`` and every 0/1 weight ``wt`` on the alphabet, at most an
``exp(-delta q)`` fraction of the members ``R_j`` may have
``|wt(h(R_j)) - E[wt(h(R))]| >= gamma q``, the expectation taken over a
phased reference distribution ``R``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import CodeMatrix, Ensemble, PhasedDistribution, WeightFunction
from .coupon import miss_probabilities

EXACT_Q_LIMIT = 20
_CHUNK = 1 << 14


@dataclass(frozen=True)
class SamplerParams:
    gamma: float
    delta: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")


@dataclass(frozen=True)
class SamplerReport:
    is_sampler: bool
    worst_wt: WeightFunction
    max_failure_fraction: float
    threshold: float
    num_weights: int
    sampled: bool = False

    @property
    def note(self) -> str:
        if self.sampled:
            return "sampled, one-sided: a true verdict is not a proof"
        return "exact over all weight functions"


def symbol_coverage(h: int, D: PhasedDistribution, C: CodeMatrix) -> np.ndarray:
    """Probability that each symbol ``1..q`` shows up in ``h(R)``, ``R ~ D``."""
    counts, tables = D.symbol_tables(C, h)
    if D.k == 0:
        return np.zeros(C.q)
    return 1.0 - miss_probabilities(counts, tables)


def reference_expectation(wt: WeightFunction, h: int, D: PhasedDistribution, C: CodeMatrix) -> float:
    """``E[wt(h(R))]`` for ``R ~ D``, exactly."""
    if wt.q != C.q:
        raise ValueError("weight function and matrix disagree on q")
    return float(symbol_coverage(h, D, C) @ np.array(wt.bits, dtype=float))


def image_indicator(ensemble: Ensemble, h: int, C: CodeMatrix) -> np.ndarray:
    """``(L, q)`` 0/1 matrix: symbol ``x`` present in ``h(R_j)``."""
    ind = np.zeros((ensemble.L, C.q), dtype=np.int32)
    col = C.column(h)
    if ensemble.is_uniform():
        ind[np.arange(ensemble.L)[:, None], col[ensemble.stacked()] - 1] = 1
        return ind
    for j, R in enumerate(ensemble):
        ind[j, col[R] - 1] = 1
    return ind


def _weight_bits(indices: np.ndarray, q: int) -> np.ndarray:
    shifts = np.arange(q - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts) & 1).astype(np.int32)


def _failure_fractions(ind, coverage, W, gamma_q) -> np.ndarray:
    expected = W @ coverage
    values = ind @ W.T
    return (np.abs(values - expected) >= gamma_q).mean(axis=0)


def _report(fracs, W, params, q, sampled) -> SamplerReport:
    threshold = math.exp(-params.delta * q)
    best = int(np.argmax(fracs))
    worst = WeightFunction(tuple(int(b) for b in W[best]))
    mx = float(fracs[best])
    return SamplerReport(mx <= threshold, worst, mx, threshold, len(W), sampled)


def check_sampler_exact(
    ensemble: Ensemble,
    h: int,
    D: PhasedDistribution,
    C: CodeMatrix,
    params: SamplerParams,
    workers: int = 1,
) -> SamplerReport:
    """Check the sampler condition over all ``2^q`` weight functions.

    Ties in the failure fraction go to the lexicographically smallest weight
    vector ``(wt(1), ..., wt(q))``.
    """
    q = C.q
    if q > EXACT_Q_LIMIT:
        raise ValueError(f"q={q} > {EXACT_Q_LIMIT}: use check_sampler_sampled")
    ind = image_indicator(ensemble, h, C)
    cov = symbol_coverage(h, D, C)
    starts = range(0, 1 << q, _CHUNK)

    def run(start):
        W = _weight_bits(np.arange(start, min(start + _CHUNK, 1 << q)), q)
        return _failure_fractions(ind, cov, W, params.gamma * q)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fracs = np.concatenate(list(pool.map(run, starts)))
    else:
        fracs = np.concatenate([run(s) for s in starts])
    # argmax over the index order = lexicographic order of weight vectors
    best = int(np.argmax(fracs))
    threshold = math.exp(-params.delta * q)
    mx = float(fracs[best])
    return SamplerReport(mx <= threshold, WeightFunction.from_index(best, q), mx, threshold, 1 << q)


def sample_weights(q: int, num_wt: int, rng) -> np.ndarray:
    """All-zeros, all-ones and ``num_wt`` other distinct weight vectors drawn
    uniformly without replacement, in lexicographic order."""
    others = (1 << q) - 2
    if num_wt >= others:
        return _weight_bits(np.arange(1 << q), q)
    if q <= 62:
        idx = rng.choice(others, size=num_wt, replace=False) + 1
        idx = np.concatenate([[0, (1 << q) - 1], np.sort(idx)])
        return _weight_bits(np.sort(idx), q)
    rows = np.zeros((0, q), dtype=np.int32)
    while len(rows) < num_wt:
        extra = rng.integers(0, 2, size=(num_wt - len(rows), q), dtype=np.int32)
        rows = np.unique(np.vstack([rows, extra]), axis=0)
        s = rows.sum(axis=1)
        rows = rows[(s > 0) & (s < q)]
    rows = np.vstack([np.zeros(q, np.int32), np.ones(q, np.int32), rows])
    return np.unique(rows, axis=0)


def check_sampler_sampled(
    ensemble: Ensemble,
    h: int,
    D: PhasedDistribution,
    C: CodeMatrix,
    params: SamplerParams,
    num_wt: int,
    seed,
) -> SamplerReport:
    """Like :func:`check_sampler_exact` but over a random set of weights.

    The all-ones and all-zeros functions are always included.  Because only
    a subset is examined, ``is_sampler=True`` is not a proof; a False verdict
    is.  When ``num_wt`` reaches ``2^q - 2`` every function is examined.
    """
    if num_wt < 1:
        raise ValueError("num_wt must be >= 1")
    q = C.q
    W = sample_weights(q, num_wt, np.random.default_rng(seed))
    ind = image_indicator(ensemble, h, C)
    cov = symbol_coverage(h, D, C)
    fracs = _failure_fractions(ind, cov, W, params.gamma * q)
    return _report(fracs, W, params, q, sampled=True)


def mcdiarmid_bound(n_vars: int, c: float, t: float) -> float:
    """One-sided bounded-differences tail ``exp(-2 t^2 / (n c^2))``."""
    if n_vars < 1 or c <= 0 or t < 0:
        raise ValueError("need n_vars >= 1, c > 0, t >= 0")
    return math.exp(-2.0 * t * t / (n_vars * c * c))
