import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from oracles import is_code_bruteforce
from qlistcap.construct import (
    construction_plan,
    find_min_code,
    rainbow_probability,
    random_code,
    required_columns,
    search_min_n,
)
from qlistcap.verifier import is_list_decoding

GOLDEN = json.loads((Path(__file__).parent / "golden" / "min_n_bruteforce.json").read_text())


@pytest.mark.parametrize(
    "q, ell, expected",
    [(2, 1, Fraction(1, 2)), (3, 2, Fraction(2, 9)), (5, 3, Fraction(0)), (3, 3, Fraction(4, 9))],
)
def test_rainbow_probability(q, ell, expected):
    assert rainbow_probability(q, ell) == expected


def test_rainbow_probability_by_counting():
    import itertools

    for q in (2, 3, 4):
        for draws in range(q, q + 3):
            hits = sum(len(set(t)) == q for t in itertools.product(range(q), repeat=draws))
            assert rainbow_probability(q, draws - 1) == Fraction(hits, q**draws)


def test_required_columns_examples():
    assert required_columns(2, 2, 1, 0.999) == 1
    assert required_columns(4, 2, 1, 0.999) == 3
    with pytest.raises(ValueError):
        required_columns(5, 5, 3, 0.1)
    with pytest.raises(ValueError):
        required_columns(5, 2, 1, 1.0)


def test_required_columns_is_smallest():
    for m, q, ell, t in [(6, 3, 2, 0.1), (50, 4, 3, 0.01), (1000, 5, 6, 0.5), (20, 2, 1, 0.3)]:
        plan = construction_plan(m, q, ell, t)
        assert plan.failure_bound <= Fraction(t)
        p = rainbow_probability(q, ell)
        assert math.comb(m, ell + 1) * (1 - p) ** (plan.n_required - 1) > Fraction(t)


def test_required_columns_growth_tracks_exp_q_log_m():
    # n / ln C(m, q) should equal 1 / -ln(1 - q!/q^q) up to rounding
    for q in (2, 3, 4, 5, 6):
        p = float(rainbow_probability(q, q - 1))
        for m in (100, 10_000):
            n = required_columns(m, q, q - 1, 0.5)
            predicted = math.log(math.comb(m, q) / 0.5) / -math.log1p(-p)
            assert abs(n - predicted) <= 1
    ratios = [required_columns(10**6, q, q - 1, 0.5) / math.exp(q) for q in (3, 4, 5, 6, 7)]
    # the e^q factor is right up to a slowly varying poly(q) correction
    assert max(ratios) / min(ratios) < 10


def test_random_code_deterministic():
    assert random_code(7, 5, 4, 99) == random_code(7, 5, 4, 99)
    assert random_code(7, 5, 4, 99) != random_code(7, 5, 4, 100)


def test_random_code_symbol_frequencies():
    m, n, q = 300, 40, 5
    C = random_code(m, n, q, 17)
    counts = np.bincount(C.entries.ravel(), minlength=q + 1)[1:]
    expected = m * n / q
    sd = math.sqrt(m * n * (1 / q) * (1 - 1 / q))
    assert np.all(np.abs(counts - expected) <= 4 * sd)


def test_search_matches_plain_enumeration_golden():
    for key, expected in GOLDEN.items():
        m, q, ell = map(int, key.split(","))
        assert search_min_n(m, q, ell) == expected, key


def test_search_binary_pairs_distinct():
    for m in range(2, 17):
        assert search_min_n(m, 2, 1) == math.ceil(math.log2(m))


def test_found_matrix_is_a_code_and_one_shorter_is_not():
    for m, q, ell in [(4, 3, 2), (5, 3, 2), (6, 2, 2), (5, 2, 1)]:
        res = find_min_code(m, q, ell)
        assert res.matrix.n == res.n
        assert is_list_decoding(res.matrix, ell).is_code
        assert is_code_bruteforce(res.matrix.entries.tolist(), q, ell)
        assert res.refuted == list(range(1, res.n))


def test_search_monotone():
    for q, ell in [(2, 1), (3, 2), (2, 2)]:
        vals = [search_min_n(m, q, ell) for m in range(ell + 1, 7)]
        assert vals == sorted(vals)
    for m in (4, 5):
        vals = [search_min_n(m, 3, ell) for ell in range(2, m)]
        assert vals == sorted(vals, reverse=True)


def test_budget_exhaustion_is_unknown():
    res = find_min_code(6, 3, 2, budget=5)
    assert res.n is None and not res.known
    assert search_min_n(6, 3, 2, budget=5) is None


def test_search_argument_checks():
    with pytest.raises(ValueError):
        search_min_n(5, 4, 2)
    with pytest.raises(ValueError):
        search_min_n(3, 2, 3)
