import itertools

import numpy as np
import pytest

from oracles import is_code_bruteforce, rows_confusable
from qlistcap.construct import random_code
from qlistcap.core import CodeMatrix
from qlistcap.verifier import (
    InstanceTooLarge,
    adversarial_output,
    compatible,
    confusable_by_output,
    is_list_decoding,
    max_compatible,
    rate,
)


def random_instances(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        q = int(rng.integers(2, 5))
        m = int(rng.integers(2, 9))
        n = int(rng.integers(1, 6))
        ell = int(rng.integers(1, min(3, m - 1) + 1))
        yield random_code(m, n, q, rng.integers(1 << 30)), ell


def test_identity_column_is_code():
    C = CodeMatrix([[1], [2], [3]], 3)
    assert is_list_decoding(C, 2).is_code
    assert confusable_by_output(C, 2).is_code
    assert max_compatible(C) == 2


def test_identical_rows():
    C = CodeMatrix([[1], [1]], 2)
    v = is_list_decoding(C, 1)
    assert not v.is_code and v.witness == {0, 1}
    o = confusable_by_output(C, 1)
    assert not o.is_code and o.output_word == (2,)


def test_list_size_range():
    C = CodeMatrix([[1], [2]], 2)
    for ell in (0, 2):
        with pytest.raises(ValueError):
            is_list_decoding(C, ell)


def test_output_oracle_guard():
    C = CodeMatrix(np.ones((2, 15), dtype=int), 3)
    with pytest.raises(InstanceTooLarge):
        confusable_by_output(C, 1)


def test_deciders_agree_with_plain_enumeration():
    for C, ell in random_instances(300, seed=11):
        v = is_list_decoding(C, ell)
        expected = is_code_bruteforce(C.entries.tolist(), C.q, ell)
        assert v.is_code == expected == confusable_by_output(C, ell).is_code


def test_witness_is_lexicographically_first():
    for C, ell in random_instances(200, seed=12):
        v = is_list_decoding(C, ell)
        if v.is_code:
            continue
        rows = C.entries.tolist()
        first = next(
            s for s in itertools.combinations(range(C.m), ell + 1)
            if rows_confusable([rows[i] for i in s], C.q)
        )
        assert sorted(v.witness) == list(first)


def test_witness_soundness_and_output_word():
    for C, ell in random_instances(200, seed=13):
        for v in (is_list_decoding(C, ell), confusable_by_output(C, ell)):
            if v.is_code:
                continue
            assert len(v.witness) == ell + 1
            assert all(len(set(C.entries[sorted(v.witness), h])) <= C.q - 1 for h in range(C.n))
            word = adversarial_output(C, v.witness)
            assert word is not None
            assert all(compatible(C.entries[r], word) for r in v.witness)


def test_worker_count_does_not_change_witness():
    C = random_code(14, 4, 3, 5)
    assert is_list_decoding(C, 3, workers=1) == is_list_decoding(C, 3, workers=3)


def test_adversarial_output_examples():
    C = CodeMatrix([[1, 1]], 2)
    assert adversarial_output(C, [0]) == (2, 2)
    C = CodeMatrix([[1, 1], [2, 1], [3, 1]], 3)
    assert adversarial_output(C, [0, 1, 2]) is None
    assert adversarial_output(C, [0, 2]) == (2, 2)


def test_adversarial_output_exists_below_q():
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = int(rng.integers(2, 7))
        C = random_code(10, 6, q, rng.integers(1 << 30))
        R = rng.choice(10, size=q - 1, replace=False)
        assert adversarial_output(C, R) is not None


def test_monotonicity():
    for C, ell in random_instances(150, seed=14):
        if not is_list_decoding(C, ell).is_code:
            continue
        for bigger in range(ell, C.m):
            assert is_list_decoding(C, bigger).is_code
        wider = CodeMatrix(np.hstack([C.entries, C.entries[:, :1]]), C.q)
        assert is_list_decoding(wider, ell).is_code
        if C.m - 1 > ell:
            assert is_list_decoding(CodeMatrix(C.entries[1:], C.q), ell).is_code


def test_rate():
    assert rate(1024, 10, 2) == pytest.approx(0.9)
    with pytest.raises(ValueError):
        rate(2, 3, 2)
    # m=3, n=1 identity column sits exactly on log2(3) - 1
    assert rate(3, 1, 2) == pytest.approx(np.log2(3) - 1, abs=1e-12)
