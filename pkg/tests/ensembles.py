"""Random phased-draw specs satisfying the small-list hypotheses."""

import math

import numpy as np

from qlistcap.coupon import PhaseEnsembleSpec


def _split(rng, total, parts):
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    return np.diff(np.concatenate([[0], cuts, [total]])).astype(int).tolist()


def _budget(rng, q, eps, full):
    a_max = math.floor(eps * q * math.log(q))
    k_max = min(math.floor(math.e * q**eps), a_max)
    k = int(rng.integers(1, k_max + 1))
    a = a_max if full else int(rng.integers(k, a_max + 1))
    return k, a


def random_spec(rng, q, eps):
    """Dirichlet-distributed phases with random concentration."""
    k, a = _budget(rng, q, eps, full=False)
    pmfs = []
    for _ in range(k):
        p = rng.dirichlet(np.full(q, 10 ** rng.uniform(-2, 1)))
        p = np.maximum(p, 0)
        pmfs.append(p / p.sum())
    return PhaseEnsembleSpec(q, _split(rng, a, k), pmfs)


def heavy_head_spec(rng, q, eps, lam):
    """Every phase puts almost all its mass on its own ~q^beta symbols.

    Uses the full draw budget, and spreads the heads so phases overlap as
    little as possible, which is the worst case for the bound.
    """
    beta = 1 - 2 * eps - lam
    head = max(1, math.floor(q**beta))
    k, a = _budget(rng, q, eps, full=True)
    perm = rng.permutation(q)
    tail_mass = float(rng.uniform(0, 0.2))
    pmfs = []
    for i in range(k):
        idx = perm[(i * head + np.arange(head)) % q]
        p = np.full(q, tail_mass / q)
        p[idx] += (1 - tail_mass) / head
        pmfs.append(p / p.sum())
    return PhaseEnsembleSpec(q, _split(rng, a, k), pmfs)


def draw_members(rng, D, L):
    """``L`` independent draws of the random set defined by ``D``."""
    sets = []
    for _ in range(L):
        parts = [rng.choice(ph.rows, size=ph.count, p=ph.probs) for ph in D.phases]
        sets.append(np.unique(np.concatenate(parts)))
    return sets


def random_sampler_instance(rng, q=12, m=60):
    """A code column, a reference distribution, an ensemble and parameters.

    A third of the ensembles are skewed (half the members copy one set) so
    that both verdicts occur.
    """
    from qlistcap.construct import random_code
    from qlistcap.core import Ensemble, Phase, PhasedDistribution
    from qlistcap.sampler import SamplerParams

    C = random_code(m, 2, q, rng.integers(1 << 30))
    k = int(rng.integers(1, 3))
    D = PhasedDistribution()
    for _ in range(k):
        rows = rng.choice(m, size=int(rng.integers(10, m + 1)), replace=False)
        D = D.join(Phase.uniform(rows, int(rng.integers(2, 10))))
    L = int(rng.integers(20, 150))
    sets = draw_members(rng, D, L)
    if rng.random() < 1 / 3:
        sets[: L // 2] = [sets[0]] * (L // 2)
    params = SamplerParams(float(rng.uniform(0.05, 0.35)), float(rng.uniform(0.05, 0.4)))
    return C, int(rng.integers(0, 2)), D, Ensemble(sets), params
