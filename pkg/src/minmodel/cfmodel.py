"""Continued-fraction data for p'/p and band-structure predicates of the (p,p')-model.

ModelData collects everything derived from the continued fraction of p'/p:
zone boundaries, the two convergent sequences, the Takahashi and truncated
Takahashi lengths, the string lengths, the four membership sets used by the
tree constructions, and the segment boundaries xi / xi_tilde.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .errors import NotCoprime, OutOfRange

EVEN = 0
ODD = 1

OMEGA_INFINITY = math.inf


def continued_fraction(pp, p):
    """Continued fraction [c_0,...,c_n] of pp/p with the final entry >= 2."""
    cf = []
    a, b = pp, p
    while b:
        cf.append(a // b)
        a, b = b, a % b
    if len(cf) > 1 and cf[-1] == 1:  # canonical form: absorb a trailing 1
        cf.pop()
        cf[-1] += 1
    return cf


class ModelData:
    """Immutable bundle of structural data for one (p,p')-model."""

    __slots__ = (
        "p", "pp", "cf", "n", "t", "t_list", "t_set", "_y", "_z",
        "kappa", "kappa_tilde", "l", "T", "T_prime", "T_tilde",
        "T_tilde_prime", "xi", "xi_tilde", "zone_of", "dual",
    )

    def __init__(self, p, pp):
        self.p = p
        self.pp = pp
        self.cf = tuple(continued_fraction(pp, p))
        self.n = len(self.cf) - 1
        self.t = sum(self.cf) - 2
        n, t = self.n, self.t
        self.t_list = tuple(-1 + sum(self.cf[:k]) for k in range(n + 2))
        self.t_set = frozenset(self.t_list[1:n + 1])
        # convergents y_k, z_k for -1 <= k <= n+1, stored with offset 1
        y = [0, 1]
        z = [1, 0]
        for k in range(n + 1):
            y.append(self.cf[k] * y[-1] + y[-2])
            z.append(self.cf[k] * z[-1] + z[-2])
        self._y = tuple(y)
        self._z = tuple(z)
        assert self.yk(n + 1) == pp and self.zk(n + 1) == p
        zone = []
        for k in range(n + 1):
            zone.extend([k] * self.cf[k])
        self.zone_of = tuple(zone)  # zone_of[j] for 0 <= j <= t+1
        self.kappa = tuple(
            self.yk(k - 1) + (j - self.t_list[k]) * self.yk(k)
            for j, k in enumerate(self.zone_of)
        )
        self.kappa_tilde = tuple(
            self.zk(k - 1) + (j - self.t_list[k]) * self.zk(k)
            for j, k in enumerate(self.zone_of)
        )
        lengths = [0]
        for j in range(1, t + 1):
            k = self.zone_of[j]
            lengths.append(self.yk(k - 1) + (j - self.t_list[k] - 1) * self.yk(k))
        self.l = tuple(lengths)
        self.T = frozenset(self.kappa[0:t])
        self.T_prime = frozenset(pp - v for v in self.T)
        self.T_tilde = frozenset(self.kappa_tilde[self.t_list[1] + 1:t])
        self.T_tilde_prime = frozenset(p - v for v in self.T_tilde)
        cn = self.cf[n]
        xi = [0]
        xt = [0]
        for k in range(1, cn):
            xi.extend([k * self.yk(n), k * self.yk(n) + self.yk(n - 1)])
            xt.extend([k * self.zk(n), k * self.zk(n) + self.zk(n - 1)])
        xi[2 * cn - 1:] = [pp]
        xt[2 * cn - 1:] = [p]
        self.xi = tuple(xi)
        self.xi_tilde = tuple(xt)
        self.dual = pp < 2 * p  # band structure is that of (p'-p,p') negated

    def yk(self, k):
        """Convergent numerator y_k, -1 <= k <= n+1."""
        return self._y[k + 1]

    def zk(self, k):
        """Convergent denominator z_k, -1 <= k <= n+1."""
        return self._z[k + 1]

    def __repr__(self):
        return "ModelData(p=%d, pp=%d, cf=%s)" % (self.p, self.pp, list(self.cf))

    def as_record(self):
        """Plain-dict form with integer-valued fields (for the CLI)."""
        return {
            "p": self.p,
            "pp": self.pp,
            "cf": list(self.cf),
            "n": self.n,
            "t": self.t,
            "t_list": list(self.t_list),
            "y": list(self._y),  # starts at k = -1
            "z": list(self._z),  # starts at k = -1
            "kappa": list(self.kappa),
            "kappa_tilde": list(self.kappa_tilde),
            "l": list(self.l[1:]),  # starts at j = 1
            "T": sorted(self.T),
            "T_prime": sorted(self.T_prime),
            "T_tilde": sorted(self.T_tilde),
            "T_tilde_prime": sorted(self.T_tilde_prime),
            "xi": list(self.xi),
            "xi_tilde": list(self.xi_tilde),
        }


@lru_cache(maxsize=None)
def build_model(p, pp):
    """Construct the ModelData for coprime 1 <= p < pp."""
    if not (isinstance(p, int) and isinstance(pp, int)):
        raise OutOfRange("p and pp must be integers")
    if not (1 <= p < pp):
        raise OutOfRange("need 1 <= p < pp, got (%s, %s)" % (p, pp))
    if math.gcd(p, pp) != 1:
        raise NotCoprime("gcd(%d, %d) != 1" % (p, pp))
    return ModelData(p, pp)


def zeta(M, j):
    """Zone index k with t_k < j <= t_{k+1}."""
    if not 0 <= j <= M.t + 1:
        raise OutOfRange("zone index defined for 0 <= j <= t+1, got %s" % (j,))
    return M.zone_of[j]


def band_parity(M, h):
    """Parity (ODD=1, EVEN=0) of the band between heights h and h+1."""
    if not 0 <= h <= M.pp - 1:
        raise OutOfRange("band height out of range: %s" % (h,))
    if h == 0 or h == M.pp - 1:
        return ODD if M.pp < 2 * M.p else EVEN
    return ODD if (h * M.p) // M.pp != ((h + 1) * M.p) // M.pp else EVEN


def is_interfacial(M, a):
    """True when height a sits between an odd and an even band."""
    if not 0 <= a <= M.pp:
        raise OutOfRange("height out of range: %s" % (a,))
    if a == 0 or a == M.pp:
        return True
    if a == 1 or a == M.pp - 1:
        return False
    return ((a + 1) * M.p) // M.pp == ((a - 1) * M.p) // M.pp + 1


def rho(M, a):
    """Index of the odd band bordered by height a: floor((a+1)p/p')."""
    if not 0 <= a <= M.pp:
        raise OutOfRange("height out of range: %s" % (a,))
    if a == M.pp:
        return M.p
    return ((a + 1) * M.p) // M.pp


def omega(M, a):
    """(r, -1) if a is the lower edge of the r-th odd band, (r, +1) if the
    upper edge; the OMEGA_INFINITY sentinel when a is not interfacial."""
    if not 1 <= a <= M.pp - 1:
        raise OutOfRange("height out of range: %s" % (a,))
    if not is_interfacial(M, a):
        return OMEGA_INFINITY
    r = rho(M, a)
    edge = (r * M.pp) // M.p
    if a == edge:
        return (r, -1)
    assert a == edge + 1
    return (r, +1)


def delta_ae(M, a, e):
    """Parity of the band containing the pre-segment arriving at height a."""
    if not 1 <= a <= M.pp - 1:
        raise OutOfRange("height out of range: %s" % (a,))
    if e not in (0, 1):
        raise OutOfRange("e must be 0 or 1")
    step = 1 if e == 0 else -1
    return 0 if ((a + step) * M.p) // M.pp == (a * M.p) // M.pp else 1


def _eta_generic(bounds, s, upper, what):
    if not 1 <= s < upper:
        raise OutOfRange("%s out of range: %s" % (what, s))
    # largest index with bounds[i] <= s; duplicates then force s < bounds[i+1]
    lo = 0
    for i, v in enumerate(bounds):
        if v <= s:
            lo = i
    return lo


def xi_eta(M, s):
    """Segment index eta(s): the l with xi_l <= s < xi_{l+1}."""
    return _eta_generic(M.xi, s, M.pp, "s")


def xi_eta_tilde(M, r):
    """Segment index eta~(r): the l with xi~_l <= r < xi~_{l+1}."""
    return _eta_generic(M.xi_tilde, r, M.p, "r")


def takahashi_decompose(M, s):
    """Largest-first decomposition of s as a sum of Takahashi lengths.

    Returns the strictly increasing index list [mu_1, ..., mu_g] with
    s = sum kappa[mu_i], zones strictly increasing, and with the whole zone
    following a zone-boundary index excluded.
    """
    if not 1 <= s < M.pp:
        raise OutOfRange("s out of range: %s" % (s,))
    out = []
    rem = s
    while rem:
        mu = max(j for j in range(M.t + 1) if M.kappa[j] <= rem)
        out.append(mu)
        rem -= M.kappa[mu]
    out.reverse()
    return out


def truncated_decompose(M, r):
    """Largest-first decomposition of r as a sum of truncated Takahashi
    lengths with indices above the first zone."""
    if not 1 <= r < M.p:
        raise OutOfRange("r out of range: %s" % (r,))
    lo = M.t_list[1] + 1
    out = []
    rem = r
    while rem:
        mu = max(j for j in range(lo, M.t + 1) if M.kappa_tilde[j] <= rem)
        out.append(mu)
        rem -= M.kappa_tilde[mu]
    out.reverse()
    return out
