"""Alternating-sum and product-form evaluations, used as independent oracles."""

from .errors import NotProductCase, OutOfRange, ParityMismatch
from .qalg import INFINITY, QPoly, QSeries, finalize_integral, gaussian_coeffs, pochhammer_inverse


def limit_r_of(b, c, M):
    """Ground-state label attached to the boundary column pair (b, c)."""
    p, pp = M.p, M.pp
    if not (0 <= c <= pp and abs(b - c) == 1):
        raise OutOfRange("need 0 <= c <= %d with |b - c| = 1, got b=%d c=%d" % (pp, b, c))
    if 1 <= c < pp:
        return p * c // pp + (b - c + 1) // 2
    if c == 0:
        return 1 if pp > 2 * p else 0
    return p - 1 if pp > 2 * p else p


def _accumulate(terms, exponent, lo, hi, L, top_of, sign):
    # exact lambda window: binomial bottom must land in [0, L]
    for lam in range(lo, hi + 1):
        k = top_of(lam)
        if not 0 <= k <= L:
            continue
        e0 = exponent(lam)
        for i, cf in enumerate(gaussian_coeffs(L, k)):
            if cf:
                e4 = 4 * (e0 + i)
                terms[e4] = terms.get(e4, 0) + sign * cf


def finitized_bosonic(M, a, b, c, L):
    """Finite-size generating polynomial as a difference of two lambda sums."""
    p, pp = M.p, M.pp
    if not (1 <= a < pp and 1 <= b < pp):
        raise OutOfRange("need 1 <= a, b < %d, got a=%d b=%d" % (pp, a, b))
    if L < 0:
        raise OutOfRange("system size must be nonnegative, got %d" % L)
    if (L - a + b) % 2:
        raise ParityMismatch("L = %d has the wrong parity for a=%d, b=%d" % (L, a, b))
    r = limit_r_of(b, c, M)

    terms = {}
    top1 = (L + a - b) // 2
    _accumulate(terms, lambda lam: lam * lam * p * pp + lam * (pp * r - p * a),
                -((L - top1) // pp), top1 // pp, L, lambda lam: top1 - pp * lam, 1)
    top2 = (L - a - b) // 2
    _accumulate(terms, lambda lam: (lam * p + r) * (lam * pp + a),
                -((L - top2) // pp), top2 // pp, L, lambda lam: top2 - pp * lam, -1)
    return finalize_integral(QPoly(terms))


def character_bosonic(M, r, s, order):
    """Normalised character series: alternating lambda sum over 1/(q)_oo."""
    p, pp = M.p, M.pp
    if not (1 <= r < p and 1 <= s < pp):
        raise OutOfRange("need 1 <= r < %d and 1 <= s < %d, got r=%d s=%d" % (p, pp, r, s))
    if order < 1:
        raise OutOfRange("series order must be >= 1")

    coeffs = [0] * order

    def sweep(exponent, sign):
        # both exponent laws grow monotonically once |lambda| leaves the vertex
        for step in (1, -1):
            lam = 0 if step == 1 else -1
            while True:
                e = exponent(lam)
                if e >= order:
                    break
                if e >= 0:
                    coeffs[e] += sign
                lam += step

    sweep(lambda lam: lam * lam * p * pp + lam * (pp * r - p * s), 1)
    sweep(lambda lam: (lam * p + r) * (lam * pp + s), -1)
    return QSeries(order, coeffs) * pochhammer_inverse(INFINITY, order)


def character_product(M, r, s, order):
    """Product-form character for the models admitting one."""
    p, pp = M.p, M.pp
    if not (1 <= r < p and 1 <= s < pp):
        raise OutOfRange("need 1 <= r < %d and 1 <= s < %d, got r=%d s=%d" % (p, pp, r, s))
    if order < 1:
        raise OutOfRange("series order must be >= 1")

    if p == 2 * r:
        m1 = r * pp
        banned = lambda n: n % m1 in (0, r * s % m1, -r * s % m1)
    elif pp == 2 * s:
        m1 = s * p
        banned = lambda n: n % m1 in (0, r * s % m1, -r * s % m1)
    elif p == 3 * r:
        m1, m2 = 2 * r * pp, 4 * r * pp
        w = 2 * r * (pp - s)
        banned = lambda n: (n % m1 in (0, r * s % m1, -r * s % m1)
                            or n % m2 in (w % m2, -w % m2))
    elif pp == 3 * s:
        m1, m2 = 2 * s * p, 4 * s * p
        w = 2 * s * (p - r)
        banned = lambda n: (n % m1 in (0, r * s % m1, -r * s % m1)
                            or n % m2 in (w % m2, -w % m2))
    else:
        raise NotProductCase("(p, p', r, s) = (%d, %d, %d, %d) admits no product form"
                             % (p, pp, r, s))

    coeffs = [0] * order
    coeffs[0] = 1
    for n in range(1, order):
        if not banned(n):
            for k in range(n, order):
                coeffs[k] += coeffs[k - n]
    return QSeries(order, coeffs)
