"""Tests for continued-fraction model data and band predicates."""

import itertools
from fractions import Fraction

import pytest

from minmodel.cfmodel import (
    EVEN,
    ODD,
    OMEGA_INFINITY,
    band_parity,
    build_model,
    continued_fraction,
    delta_ae,
    is_interfacial,
    omega,
    rho,
    takahashi_decompose,
    truncated_decompose,
    xi_eta,
    xi_eta_tilde,
    zeta,
)
from minmodel.errors import NotCoprime, OutOfRange

from helpers import coprime_pairs


def cf_value(cf):
    """Rational value of a continued fraction [c_0, c_1, ...]."""
    x = Fraction(cf[-1])
    for c in reversed(cf[:-1]):
        x = c + 1 / x
    return x


def test_continued_fraction_examples():
    assert continued_fraction(223, 69) == [3, 4, 3, 5]
    assert continued_fraction(109, 26) == [4, 5, 5]
    assert continued_fraction(2, 1) == [2]
    assert continued_fraction(24, 7) == [3, 2, 3]
    assert continued_fraction(5, 2) == [2, 2]
    assert continued_fraction(8, 3) == [2, 1, 2]
    assert continued_fraction(118, 51) == [2, 3, 5, 3]


def test_continued_fraction_roundtrip():
    for p, pp in coprime_pairs(40):
        cf = continued_fraction(pp, p)
        assert cf_value(cf) == Fraction(pp, p)
        assert all(c >= 1 for c in cf[:-1])
        assert cf[-1] >= 2


def test_build_model_errors():
    with pytest.raises(NotCoprime):
        build_model(2, 4)
    with pytest.raises(NotCoprime):
        build_model(6, 9)
    for bad in [(0, 5), (5, 5), (5, 3), (-1, 2)]:
        with pytest.raises(OutOfRange):
            build_model(*bad)


def test_model_223():
    M = build_model(69, 223)
    assert M.cf == (3, 4, 3, 5)
    assert M.n == 3
    assert M.t == 13
    assert M.t_list == (-1, 2, 6, 9, 14)
    assert [M.yk(k) for k in range(-1, 5)] == [0, 1, 3, 13, 42, 223]
    assert [M.zk(k) for k in range(-1, 5)] == [1, 0, 1, 4, 13, 69]
    assert M.kappa == (1, 2, 3, 4, 7, 10, 13, 16, 29, 42, 55, 97, 139, 181, 223)
    assert M.kappa_tilde == (1, 1, 1, 1, 2, 3, 4, 5, 9, 13, 17, 30, 43, 56, 69)
    assert M.l[1:] == (1, 2, 1, 4, 7, 10, 3, 16, 29, 13, 55, 97, 139)
    assert sorted(M.T_tilde) == [1, 2, 3, 4, 5, 9, 13, 17, 30, 43]
    assert M.xi == (0, 42, 55, 84, 97, 126, 139, 168, 181, 223)
    assert M.xi_tilde == (0, 13, 17, 26, 30, 39, 43, 52, 56, 69)


def test_model_109():
    M = build_model(26, 109)
    assert M.cf == (4, 5, 5)
    assert M.t == 12
    assert M.t_list == (-1, 3, 8, 13)
    assert sorted(M.T) == [1, 2, 3, 4, 5, 9, 13, 17, 21, 25, 46, 67]
    assert sorted(M.T_tilde) == [1, 2, 3, 4, 5, 6, 11, 16]


def test_model_trivial():
    M = build_model(1, 2)
    assert M.cf == (2,)
    assert M.n == 0
    assert M.t == 0
    assert M.t_list == (-1, 1)
    assert M.kappa == (1, 2)
    assert M.kappa_tilde == (1, 1)
    assert not M.T_tilde


def test_zeta():
    M = build_model(69, 223)
    assert zeta(M, 10) == 3
    assert zeta(M, 1) == 0
    assert zeta(M, M.t + 1) == M.n
    assert zeta(M, 2) == 0 and zeta(M, 3) == 1
    for bad in (-1, M.t + 2):
        with pytest.raises(OutOfRange):
            zeta(M, bad)


def test_kappa_vs_string_lengths():
    # kappa_j = l_{j+1} except at zone-boundary indices
    for p, pp in coprime_pairs(24):
        M = build_model(p, pp)
        for j in range(0, M.t):
            if j not in M.t_set:
                assert M.kappa[j] == M.l[j + 1]
        assert all(M.kappa[j] < M.kappa[j + 1] for j in range(M.t + 1))


def test_convergent_cross_identity():
    # y_k kt_j - z_k k_j = (-1)^k, gcd(k_j, kt_j) = 1, and k_j/kt_j has
    # continued fraction [c_0,...,c_{k-1}, j - t_k]
    for p, pp in coprime_pairs(24):
        M = build_model(p, pp)
        for j in range(M.t + 2):
            k = zeta(M, j)
            lhs = M.yk(k) * M.kappa_tilde[j] - M.zk(k) * M.kappa[j]
            assert lhs == (-1) ** k
            assert Fraction(M.kappa[j], M.kappa_tilde[j]) == cf_value(
                list(M.cf[:k]) + [j - M.t_list[k]]
            )


def test_band_counts():
    for p, pp in coprime_pairs(30):
        M = build_model(p, pp)
        inner = [band_parity(M, h) for h in range(1, pp - 1)]
        assert inner.count(ODD) == p - 1
        assert inner.count(EVEN) == pp - p - 1
        for r in range(1, p):
            assert band_parity(M, (r * pp) // p) == ODD


def test_band_parity_edges():
    M = build_model(3, 8)
    assert band_parity(M, 2) == ODD
    assert [h for h in range(1, 7) if band_parity(M, h) == ODD] == [2, 5]
    assert band_parity(M, 0) == EVEN and band_parity(M, 7) == EVEN
    D = build_model(5, 8)
    assert band_parity(D, 0) == ODD and band_parity(D, 7) == ODD
    # the two extreme bands always share the parity of band 1
    for p, pp in coprime_pairs(20):
        if pp == 2:
            continue
        N = build_model(p, pp)
        assert band_parity(N, 0) == band_parity(N, 1)
        assert band_parity(N, pp - 1) == band_parity(N, pp - 2)
    with pytest.raises(OutOfRange):
        band_parity(M, 8)


def test_interfacial_38():
    M = build_model(3, 8)
    assert [a for a in range(9) if is_interfacial(M, a)] == [0, 2, 3, 5, 6, 8]
    assert rho(M, 0) == 0
    assert rho(M, 8) == 3
    assert rho(M, 3) == 1
    assert omega(M, 2) == (1, -1)
    assert omega(M, 3) == (1, +1)
    assert omega(M, 5) == (2, -1)
    assert omega(M, 6) == (2, +1)
    assert omega(M, 1) is OMEGA_INFINITY
    assert omega(M, 4) is OMEGA_INFINITY
    with pytest.raises(OutOfRange):
        omega(M, 0)


def test_omega_consistency():
    # interfacial a borders the rho(a)-th odd band on one side or the other
    for p, pp in coprime_pairs(24, p_min=2):
        M = build_model(p, pp)
        for a in range(1, pp):
            w = omega(M, a)
            if not is_interfacial(M, a):
                assert w is OMEGA_INFINITY
                continue
            r, sign = w
            edge = (r * pp) // p
            assert a == edge + (sign + 1) // 2
            # the defining floor equivalences
            if sign == -1:
                assert r == (p * a) // pp + 1
            else:
                assert r == (p * a) // pp


def test_delta_ae():
    M = build_model(3, 8)
    assert delta_ae(M, 3, 0) == 0
    assert delta_ae(M, 2, 0) == 1
    assert delta_ae(M, 3, 1) == 1
    assert delta_ae(M, 1, 1) == 0
    for p, pp in coprime_pairs(20):
        N = build_model(p, pp)
        for a in range(2, pp - 1):
            assert delta_ae(N, a, 0) == band_parity(N, a)
            assert delta_ae(N, a, 1) == band_parity(N, a - 1)


def test_xi_eta_examples():
    M = build_model(51, 118)
    assert M.xi == (0, 37, 44, 74, 81, 118)
    assert xi_eta(M, 61) == 2
    assert xi_eta_tilde(M, 27) == 2
    N = build_model(26, 109)
    assert xi_eta(N, 51) == 4
    assert xi_eta_tilde(N, 9) == 2
    K = build_model(69, 223)
    for s in range(1, 223):
        l = xi_eta(K, s)
        assert K.xi[l] <= s < K.xi[l + 1]
    for r in range(1, 69):
        l = xi_eta_tilde(K, r)
        assert K.xi_tilde[l] <= r < K.xi_tilde[l + 1]
    with pytest.raises(OutOfRange):
        xi_eta(M, 0)
    with pytest.raises(OutOfRange):
        xi_eta(M, 118)
    with pytest.raises(OutOfRange):
        xi_eta_tilde(M, 51)


def test_xi_eta_unit_p():
    # for p = 1 every segment is a single step: eta(s) = 2s
    for pp in range(2, 13):
        M = build_model(1, pp)
        for s in range(1, pp):
            assert xi_eta(M, s) == 2 * s


def test_takahashi_decompose_examples():
    M = build_model(69, 223)
    assert takahashi_decompose(M, 6) == [1, 3]
    for p, pp in coprime_pairs(16):
        N = build_model(p, pp)
        for j in range(N.t + 1):
            assert takahashi_decompose(N, N.kappa[j]) == [j]


def _valid_subsets(indices, zone, boundary_rank):
    """All index subsets with strictly increasing zones where an index equal
    to some t_k additionally excludes the whole following zone."""
    out = [[]]
    for j in indices:
        new = []
        for sub in out:
            if sub:
                last = sub[-1]
                if zone[j] <= zone[last]:
                    continue
                b = boundary_rank.get(last)
                if b is not None and zone[j] == b:
                    continue
            new.append(sub + [j])
        out.extend(new)
    return out


def test_decomposition_unique():
    # brute-force check that exactly one admissible decomposition exists
    for p, pp in coprime_pairs(16):
        M = build_model(p, pp)
        zone = {j: zeta(M, j) for j in range(M.t + 1)}
        boundary = {M.t_list[k]: k for k in range(1, M.n + 1)}
        subs = [
            s
            for s in _valid_subsets(range(M.t + 1), zone, boundary)
            if s
        ]
        by_sum = {}
        for s in subs:
            by_sum.setdefault(sum(M.kappa[j] for j in s), []).append(s)
        for s in range(1, pp):
            assert len(by_sum.get(s, [])) == 1, (p, pp, s, by_sum.get(s))
            assert by_sum[s][0] == takahashi_decompose(M, s)
        lo = M.t_list[1] + 1
        tsubs = [
            s
            for s in _valid_subsets(range(lo, M.t + 1), zone, boundary)
            if s
        ]
        by_sum = {}
        for s in tsubs:
            by_sum.setdefault(sum(M.kappa_tilde[j] for j in s), []).append(s)
        for r in range(1, p):
            assert len(by_sum.get(r, [])) == 1, (p, pp, r)
            assert by_sum[r][0] == truncated_decompose(M, r)


def test_floor_sum_identities():
    # companion floor formulas for both decompositions
    for p, pp in coprime_pairs(30):
        M = build_model(p, pp)
        for r in range(1, p):
            mus = truncated_decompose(M, r)
            want = (r * pp) // p + (1 if zeta(M, mus[0]) % 2 == 1 else 0)
            assert sum(M.kappa[j] for j in mus) == want, (p, pp, r)
        for s in range(1, pp):
            mus = takahashi_decompose(M, s)
            if zeta(M, mus[0]) == 0:
                x, rest = M.kappa[mus[0]], mus[1:]
            else:
                x, rest = 0, mus
            corr = 1 if (x == 0 and zeta(M, rest[0]) % 2 == 0) else 0
            got = sum(M.kappa_tilde[j] for j in rest)
            assert got == (s * p) // pp + corr, (p, pp, s)


def _segment_pairs(M):
    """(l, phat, pphat) for each segment of the model."""
    out = []
    for l in range(0, 2 * M.cf[-1] - 1):
        out.append((l, M.xi_tilde[l + 1] - M.xi_tilde[l], M.xi[l + 1] - M.xi[l]))
    return out


def test_segment_continued_fractions():
    # each wide-enough segment carries a smaller model given by truncating
    # the continued fraction; its length lists prefix the big ones
    for p, pp in coprime_pairs(24, p_min=2):
        M = build_model(p, pp)
        n, cf = M.n, list(M.cf)
        if n < 1:
            continue
        for l, phat, pphat in _segment_pairs(M):
            if l % 2 == 1:
                applies = n >= 2 and not (n == 2 and cf[0] == 1)
                want = cf[: n - 1]
            elif l in (0, 2 * cf[-1] - 2):
                applies = n >= 1 and not (n == 1 and cf[0] == 1)
                want = cf[:n]
            elif cf[n - 1] > 1:
                applies = n >= 1 and not (n == 1 and cf[0] == 2)
                want = cf[: n - 1] + [cf[n - 1] - 1]
            else:
                applies = n >= 3 and not (n == 3 and cf[0] == 1)
                want = cf[: n - 2]
            assert (pphat >= 2) == applies, (p, pp, l)
            if not applies:
                continue
            assert Fraction(pphat, phat) == cf_value(want)
            Mhat = build_model(phat, pphat)
            th = Mhat.t
            assert Mhat.kappa[: th + 1] == M.kappa[: th + 1]
            assert Mhat.kappa_tilde[: th + 1] == M.kappa_tilde[: th + 1]


def test_segment_band_structure():
    # bands strictly inside a segment replicate the segment's own model
    for p, pp in coprime_pairs(24, p_min=2):
        M = build_model(p, pp)
        if M.n < 1:
            continue
        for l, phat, pphat in _segment_pairs(M):
            if pphat < 2:
                continue
            Mhat = build_model(phat, pphat)
            for s in range(1, pphat - 1):
                assert band_parity(Mhat, s) == band_parity(M, M.xi[l] + s)


def test_segment_edges_interfacial():
    # interior segment boundaries border the xi_tilde-th odd band
    for p, pp in coprime_pairs(24, p_min=2):
        M = build_model(p, pp)
        if M.n < 1 or (M.n == 1 and M.cf[0] == 1):
            continue
        for l in range(1, 2 * M.cf[-1] - 1):
            a = M.xi[l]
            assert is_interfacial(M, a), (p, pp, l)
            assert omega(M, a)[0] == M.xi_tilde[l]


def test_segments_7_24():
    M = build_model(7, 24)
    assert M.xi == (0, 7, 10, 14, 17, 24)
    assert M.xi_tilde == (0, 2, 3, 4, 5, 7)
    models = [(ph, pph) for _, ph, pph in _segment_pairs(M)]
    assert models == [(2, 7), (1, 3), (1, 4), (1, 3), (2, 7)]


def test_extra_term_model_table():
    # whenever the leftover pair (rhat, shat) is proper, the derived segment
    # model matches the truncation table
    for p, pp in coprime_pairs(24, p_min=2):
        M = build_model(p, pp)
        n, cf = M.n, list(M.cf)
        for s in range(1, pp):
            e = xi_eta(M, s)
            shat = s - M.xi[e]
            if shat == 0:
                continue
            for r in range(1, p):
                if xi_eta_tilde(M, r) != e:
                    continue
                rhat = r - M.xi_tilde[e]
                if rhat == 0:
                    continue
                phat = M.xi_tilde[e + 1] - M.xi_tilde[e]
                pphat = M.xi[e + 1] - M.xi[e]
                assert phat >= 2, (p, pp, r, s)
                if e % 2 == 1:
                    want = cf[: n - 1]
                elif e in (0, 2 * cf[-1] - 2):
                    want = cf[:n]
                elif cf[n - 1] > 1:
                    want = cf[: n - 1] + [cf[n - 1] - 1]
                else:
                    want = cf[: n - 2]
                assert want, (p, pp, r, s)
                assert Fraction(pphat, phat) == cf_value(want)
                assert 1 <= rhat < phat and 1 <= shat < pphat
