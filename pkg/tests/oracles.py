"""Independent brute-force oracles used to freeze expected values."""

import itertools
import math


def rows_confusable(rows, q):
    """No coordinate of the given codewords shows all q symbols."""
    return all(len(set(col)) < q for col in zip(*rows))


def is_code_bruteforce(matrix, q, ell):
    return not any(rows_confusable(sub, q) for sub in itertools.combinations(matrix, ell + 1))


def min_n_bruteforce(m, q, ell, n_max):
    """Plain enumeration over every m x n matrix, no symmetry reduction."""
    for n in range(1, n_max + 1):
        for flat in itertools.product(range(1, q + 1), repeat=m * n):
            matrix = [flat[r * n:(r + 1) * n] for r in range(m)]
            if is_code_bruteforce(matrix, q, ell):
                return n
    return None


def distinct_union_bruteforce(q, draws_per_phase, pmfs):
    """Exact E|A_1 u ... u A_k| by enumerating every draw sequence."""
    seqs = []
    for a, p in zip(draws_per_phase, pmfs):
        seqs.extend([p] * a)
    total = 0.0
    for outcome in itertools.product(range(q), repeat=len(seqs)):
        prob = math.prod(p[x] for p, x in zip(seqs, outcome))
        total += prob * len(set(outcome))
    return total


if __name__ == "__main__":
    import json
    print(json.dumps({"n(4,3,2)": min_n_bruteforce(4, 3, 2, 3), "n(3,3,2)": min_n_bruteforce(3, 3, 2, 2)}))
