"""Coupon-collector calculations for phased, non-uniform draws."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MC_CHUNK = 10_000


def mu_cc(q: float, a: float) -> float:
    """Uniform coupon-collector benchmark ``q * (1 - exp(-a / q))``."""
    return q * -math.expm1(-a / q)


# -- symbol distributions -----------------------------------------------------


def uniform_pmf(q: int) -> np.ndarray:
    return np.full(q, 1.0 / q)


def zipf_pmf(q: int, s: float) -> np.ndarray:
    w = np.arange(1, q + 1, dtype=float) ** -s
    return w / w.sum()


def point_pmf(q: int, x: int = 1) -> np.ndarray:
    if not 1 <= x <= q:
        raise ValueError(f"point mass symbol {x} outside 1..{q}")
    p = np.zeros(q)
    p[x - 1] = 1.0
    return p


def parse_pmf(text: str, q: int) -> np.ndarray:
    """``uniform``, ``zipf:s`` or ``point:x``."""
    name, _, arg = text.partition(":")
    if name == "uniform" and not arg:
        return uniform_pmf(q)
    if name == "zipf":
        return zipf_pmf(q, float(arg))
    if name == "point":
        return point_pmf(q, int(arg))
    raise ValueError(f"unknown distribution {text!r}")


@dataclass
class PhaseEnsembleSpec:
    """``a_i`` independent draws from ``pmfs[i]`` over ``1..q``, per phase."""

    q: int
    draws: list[int]
    pmfs: list[np.ndarray]

    def __post_init__(self):
        if len(self.draws) != len(self.pmfs) or not self.draws:
            raise ValueError("need one pmf per phase and at least one phase")
        self.draws = [int(a) for a in self.draws]
        self.pmfs = [np.asarray(p, dtype=float) for p in self.pmfs]
        for a, p in zip(self.draws, self.pmfs):
            if a < 1:
                raise ValueError("each phase needs at least one draw")
            if p.shape != (self.q,) or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
                raise ValueError("each pmf must be a length-q probability vector")

    @property
    def k(self) -> int:
        return len(self.draws)

    @property
    def a(self) -> int:
        return sum(self.draws)

    @classmethod
    def single(cls, q: int, a: int, pmf=None) -> "PhaseEnsembleSpec":
        return cls(q, [a], [uniform_pmf(q) if pmf is None else pmf])

    def permuted(self, order: Sequence[int]) -> "PhaseEnsembleSpec":
        return PhaseEnsembleSpec(self.q, [self.draws[i] for i in order], [self.pmfs[i] for i in order])


def miss_probabilities(draws, pmfs) -> np.ndarray:
    """Per-symbol probability of never being drawn, ``prod_i (1 - p_i)^a_i``."""
    pmfs = np.atleast_2d(np.asarray(pmfs, dtype=float))
    draws = np.asarray(draws, dtype=float)
    if pmfs.shape[0] == 0:
        return np.ones(pmfs.shape[1])
    with np.errstate(divide="ignore"):
        log_miss = draws @ np.log1p(-np.minimum(pmfs, 1.0))
    return np.exp(log_miss)


def exact_phased_expectation(spec: PhaseEnsembleSpec) -> float:
    """Expected number of distinct symbols collected over all phases."""
    return float(np.sum(1.0 - miss_probabilities(spec.draws, spec.pmfs)))


def _mc_chunk(spec: PhaseEnsembleSpec, size: int, seed_seq) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    seen = np.zeros((size, spec.q), dtype=bool)
    idx = np.arange(size)[:, None]
    for a, p in zip(spec.draws, spec.pmfs):
        draws = rng.choice(spec.q, size=(size, a), p=p)
        seen[idx, draws] = True
    return seen.sum(axis=1)


def mc_phased_expectation(spec: PhaseEnsembleSpec, trials: int, seed, workers: int = 1):
    """Monte Carlo mean and standard error of the number of distinct symbols.

    Trials are split into fixed-size chunks with spawned seeds, so the result
    depends on ``(seed, trials)`` only, not on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda t: _mc_chunk(spec, *t), zip(sizes, seqs)))
    else:
        parts = [_mc_chunk(spec, s, ss) for s, ss in zip(sizes, seqs)]
    counts = np.concatenate(parts).astype(float)
    mean = float(counts.mean())
    if trials == 1:
        return mean, math.nan
    return mean, float(counts.std(ddof=1) / math.sqrt(trials))


# -- phased coupon collector inequality ---------------------------------------


class HypothesisViolation(ValueError):
    pass


@dataclass(frozen=True)
class Lemma4Params:
    epsilon: float
    lam: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1 / 3:
            raise ValueError("epsilon must lie in (0, 1/3)")
        if not 0 < self.lam < self.epsilon:
            raise ValueError("lambda must lie in (0, epsilon)")


@dataclass(frozen=True)
class PhasedBoundResult:
    bound: float
    exact: float
    holds: bool
    slack: float
    heavy_set_size: int


def lemma4_bound(spec: PhaseEnsembleSpec, params: Lemma4Params) -> PhasedBoundResult:
    """Upper bound on the expected union size of a phased collection.

    Symbols among the top ``ceil(q^beta)`` of some phase (``beta = 1 - 2 eps -
    lam``) are charged one each; the rest are bounded through
    ``1 - p >= exp(-p (1 + 2 q^-beta))`` and concavity, giving
    ``|B| + q - q exp(-(1 + 2 q^-beta) a / q)``.
    """
    q, a, k = spec.q, spec.a, spec.k
    eps, lam = params.epsilon, params.lam
    if a > eps * q * math.log(q):
        raise HypothesisViolation(f"total draws a={a} exceed eps*q*ln q = {eps * q * math.log(q):.6g}")
    if k > math.e * q**eps:
        raise HypothesisViolation(f"phase count k={k} exceeds e*q^eps = {math.e * q**eps:.6g}")
    beta = 1 - 2 * eps - lam
    heavy = k * math.ceil(q**beta)
    bound = heavy + q - q * math.exp(-(1 + 2 * q**-beta) * a / q)
    exact = exact_phased_expectation(spec)
    return PhasedBoundResult(bound, exact, exact <= bound, bound - exact, heavy)


# -- phase-size sequences -----------------------------------------------------


@dataclass(frozen=True)
class EllSequence:
    ell: np.ndarray
    prefix: np.ndarray
    closed_form: np.ndarray


def ell_sequence(q: float, k: int) -> EllSequence:
    """``l_1 = q`` and ``l_{i+1} = q - mu_cc(q, l_1 + ... + l_i)``."""
    if q < 2 or k < 1:
        raise ValueError("need q >= 2 and k >= 1")
    ell = np.empty(k)
    ell[0] = q
    total = q
    for i in range(1, k):
        ell[i] = q - mu_cc(q, total)
        total += ell[i]
    prefix = np.cumsum(ell)
    closed = np.empty(k)
    closed[0] = q
    closed[1:] = q * np.exp(-prefix[:-1] / q)
    return EllSequence(ell, prefix, closed)


class NonpositivePhaseSize(ValueError):
    def __init__(self, index: int, value: float):
        self.index, self.value = index, value
        super().__init__(f"phase size g_{index} = {value:.6g} is not positive")


def phase_sizes_g(q: float, gamma: float, k: int, variant: str = "cumulative"):
    """Phase sizes ``g_1 = q - 2``, ``g_{i+1} = q - mu_cc(.) - (i+1) gamma q - 2``.

    ``variant="as-written"`` feeds the previous phase ``g_i`` to ``mu_cc``;
    ``"cumulative"`` feeds the running total ``g_1 + ... + g_i``.  Returns
    ``(g, prefix_sums)`` as float arrays.
    """
    if q < 3 or gamma < 0 or k < 1:
        raise ValueError("need q >= 3, gamma >= 0, k >= 1")
    if variant not in ("as-written", "cumulative"):
        raise ValueError(f"unknown variant {variant!r}")
    g = [q - 2.0]
    total = g[0]
    for i in range(1, k):
        prev = g[-1] if variant == "as-written" else total
        nxt = q - mu_cc(q, prev) - (i + 1) * gamma * q - 2
        if nxt <= 0:
            raise NonpositivePhaseSize(i + 1, nxt)
        g.append(nxt)
        total += nxt
    g = np.array(g)
    return g, np.cumsum(g)
