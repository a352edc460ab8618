"""
Phased coupon collecting
========================

Symbols are collected in phases, each with its own distribution.  The
expected number of distinct symbols has an exact product formula, which we
check against simulation and against the uniform benchmark.
"""

import math

import numpy as np

from qlistcap.coupon import (
    Lemma4Params,
    PhaseEnsembleSpec,
    ell_sequence,
    exact_phased_expectation,
    lemma4_bound,
    mc_phased_expectation,
    mu_cc,
    phase_sizes_g,
    uniform_pmf,
    zipf_pmf,
)

q = 64
spec = PhaseEnsembleSpec(q, [40, 30], [zipf_pmf(q, 1.2), uniform_pmf(q)])
mean, se = mc_phased_expectation(spec, 100_000, seed=0)
print(f"exact {exact_phased_expectation(spec):.4f}  simulated {mean:.4f} +- {se:.4f}")
print(f"uniform benchmark with the same 70 draws: {mu_cc(q, 70):.4f}")

###############################################################################
# Skewed phases collect fewer symbols; the bound charges the heavy symbols
# of every phase one each and treats the rest as near uniform
res = lemma4_bound(PhaseEnsembleSpec.single(256, 256), Lemma4Params(0.3, 0.05))
print(res)

###############################################################################
# Phase sizes that keep every phase just short of completing a column:
# the total grows like q ln q, which is what list sizes of order q ln q need
for q in (100, 1000, 10_000):
    for eps in (0.1, 0.3):
        k = math.ceil(math.e * q**eps)
        total = ell_sequence(q, k).prefix[-1]
        print(f"q={q:>6} eps={eps}: {k:>3} phases collect {total:10.1f} >= {eps * q * math.log(q):10.1f}")

g, prefix = phase_sizes_g(1000, 0.001, 6)
print(np.round(g, 2), round(prefix[-1], 2))
