"""Shared helpers for the test suite."""

import math


def coprime_pairs(pp_max, p_min=1):
    """All (p, pp) with p_min <= p < pp <= pp_max and gcd(p, pp) = 1."""
    out = []
    for pp in range(2, pp_max + 1):
        for p in range(p_min, pp):
            if math.gcd(p, pp) == 1:
                out.append((p, pp))
    return out
