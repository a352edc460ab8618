import math

import pytest

from qlistcap.bounds import (
    ASYMPTOTIC_NOTES,
    ETA,
    coupon_list_size,
    known_bounds,
    theorem1_threshold,
    theorem2_lower_n,
)
from qlistcap.construct import find_min_code, random_code
from qlistcap.verifier import is_list_decoding, rate


def test_stored_intervals():
    b = known_bounds(3, 2)
    assert (b.lower, b.upper) == (math.log2(3) - 1.5, math.log2(3) - 1)
    b = known_bounds(4, 3)
    assert b.lower == pytest.approx(0.0473, abs=5e-5) and b.upper == pytest.approx(6 / 19)
    for q in range(2, 30):
        b = known_bounds(q, coupon_list_size(q))
        assert b.lower == b.upper == 1 / q
    assert known_bounds(5, 2) is None


def test_intervals_ordered():
    for q, ell in [(3, 2), (4, 3), (7, coupon_list_size(7))]:
        b = known_bounds(q, ell)
        assert b.lower <= b.upper


def test_verified_ternary_codes_stay_below_upper_bound():
    upper = known_bounds(3, 2).upper
    for m in (3, 4, 5):
        res = find_min_code(m, 3, 2)
        assert rate(m, res.n, 2) <= upper + 1e-12
    for seed in range(20):
        C = random_code(12, 8, 3, seed)
        if is_list_decoding(C, 2).is_code:
            assert rate(C.m, C.n, 2) <= upper


def test_length_bound_shape():
    assert theorem2_lower_n(2**10, 64, 0.1) == pytest.approx(math.exp(64**0.4 / 8) * 10)
    assert theorem2_lower_n(2**20, 64, 0.1) == pytest.approx(2 * theorem2_lower_n(2**10, 64, 0.1))
    with pytest.raises(ValueError):
        theorem2_lower_n(16, 64, 1 / 6)


def test_single_set_threshold():
    assert ETA == pytest.approx(1.5819767)
    assert theorem1_threshold(100, 0.08) == pytest.approx(150.19767, abs=1e-4)
    q = 1000
    # below the coupon target once eps' >= 1.58 / ln q
    eps2 = 1.6 / math.log(q)
    assert theorem1_threshold(q, 1e-9) < eps2 * q * math.log(q)
    with pytest.raises(ValueError):
        theorem1_threshold(10, 0)


def test_notes_have_no_constants():
    assert all("Omega" in v or "O(" in v for v in ASYMPTOTIC_NOTES.values())
