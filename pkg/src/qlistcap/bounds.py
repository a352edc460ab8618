"""Known capacity values and the shapes of the asymptotic length bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

ETA = math.e / (math.e - 1)


@dataclass(frozen=True)
class CapacityInterval:
    q: int
    ell: int
    lower: float
    upper: float
    source: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")


def coupon_list_size(q: int) -> int:
    """``ceil(q ln q)``: the list size at which capacity reaches ``1/q``."""
    return math.ceil(q * math.log(q))


def known_bounds(q: int, ell: int) -> CapacityInterval | None:
    """Stored bounds on ``cap(q, ell)``, or None for other parameters."""
    if (q, ell) == (3, 2):
        return CapacityInterval(3, 2, math.log2(3) - 1.5, math.log2(3) - 1, "Elias 1988")
    if (q, ell) == (4, 3):
        return CapacityInterval(
            4,
            3,
            math.log2(32 / 29) / 3,
            6 / 19,
            "lower: Korner-Marton 1988; upper: Dalai-Guruswami-Radhakrishnan 2016 "
            "(earlier upper bound 0.3512, Arikan 1994)",
        )
    if q >= 2 and ell == coupon_list_size(q):
        return CapacityInterval(q, ell, 1 / q, 1 / q, "coupon collector; list size ceil(q ln q)")
    return None


# Asymptotic statements without constants, kept for report annotation.
ASYMPTOTIC_NOTES = {
    "cap(q, q-1)": "exp(-Theta(q)): exp(-O(q)) by random codes, exp(-Omega(q)) by Fredman-Komlos 1984",
    "cap(q, q)": "exp(-Omega(q)), Korner 1986",
    "cap(q, (eta - eps) q)": "exp(-Omega(q)), Chakraborty-Radhakrishnan-Raghunathan-Sasatte 2006",
    "cap(q, eps q ln q), eps < 1/6": "exp(-Omega(q^(1 - 6 eps)))",
}


def theorem2_lower_n(m: int, q: int, epsilon: float) -> float:
    """``exp(q^(1 - 6 eps) / 8) * log2 m``, the length lower bound's shape
    for list size ``eps q ln q`` (implicit constant taken as 1)."""
    if not 0 < epsilon < 1 / 6:
        raise ValueError("epsilon must lie in (0, 1/6)")
    return math.exp(q ** (1 - 6 * epsilon) / 8) * math.log2(m)


def theorem1_threshold(q: int, epsilon: float) -> float:
    """``(e/(e-1) - eps) q``: the largest list size with an exp(-Omega(q))
    capacity bound from the single-set method."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return (ETA - epsilon) * q
