"""Quadratic-form data, parity vectors, the gamma recursion, the mn-system,
the fundamental fermionic forms, and the recursive character assemblies."""

from __future__ import annotations

from functools import lru_cache

from .cfmodel import build_model, is_interfacial, xi_eta, xi_eta_tilde
from .config import DEFAULT
from .errors import (FractionalExponent, MissingContext, OutOfRange,
                     ParityMismatch, UnstableTruncation)
from .qalg import QPoly, QSeries, finalize_integral, gaussian_coeffs
from .takahashi import (endpoint_of_run, flat_sharp, run_plus, run_plusplus,
                        tau_of, u_of_run, u_set, u_split, u_tilde_set,
                        delta_of_run)

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None


# ---------------------------------------------------------------------------
# matrices


class FermMatrices:
    """The tridiagonal array over rows/columns 0..t and its five named blocks."""

    __slots__ = ("full", "C", "C_star", "C_bar", "C_bar_star", "B")

    def __init__(self, full, C, C_star, C_bar, C_bar_star, B):
        self.full = full
        self.C = C
        self.C_star = C_star
        self.C_bar = C_bar
        self.C_bar_star = C_bar_star
        self.B = B

    def as_record(self):
        return {"C": [list(r) for r in self.C],
                "C_star": [list(r) for r in self.C_star],
                "C_bar": [list(r) for r in self.C_bar],
                "C_bar_star": [list(r) for r in self.C_bar_star],
                "B": [list(r) for r in self.B]}


def _block(full, rows, cols):
    return tuple(tuple(full[j][i] for i in cols) for j in rows)


@lru_cache(maxsize=None)
def _matrices_cached(p, pp):
    M = build_model(p, pp)
    t, t1 = M.t, M.t_list[1]
    full = [[0] * (t + 1) for _ in range(t + 1)]
    for j in range(t + 1):
        pattern = (-1, 1, 1) if j in M.t_set else (-1, 2, -1)
        for off, v in zip((-1, 0, 1), pattern):
            if 0 <= j + off <= t:
                full[j][j + off] = v
    full = tuple(tuple(r) for r in full)
    C = _block(full, range(t), range(t))
    C_star = _block(full, range(1, t + 1), range(t))
    C_bar = _block(full, range(t1 + 1, t), range(t1 + 1, t))
    C_bar_star = _block(full, range(t1 + 2, t + 1), range(t1 + 1, t))
    B = tuple(tuple(min(i, j) for i in range(1, t1 + 1)) for j in range(1, t1 + 1))
    return FermMatrices(full, C, C_star, C_bar, C_bar_star, B)


def matrices(M):
    """The FermMatrices blocks for the model, cached per (p, p')."""
    return _matrices_cached(M.p, M.pp)


# ---------------------------------------------------------------------------
# parity vectors


def _star_solve(full, lo, t, rhs):
    """Solve rows lo+1..t, columns lo..t-1 of the array (unit lower diagonal)."""
    xs = [0] * (t - lo)
    for j in range(t, lo, -1):
        acc = rhs[j - lo - 1]
        if j <= t - 1:
            acc -= full[j][j] * xs[j - lo]
        if j + 1 <= t - 1:
            acc -= full[j][j + 1] * xs[j + 1 - lo]
        xs[j - 1 - lo] = -acc  # the subdiagonal entry is always -1
    return xs


def parity_vectors(M, u):
    """(Q_1..Q_{t-1}) and its tail (Q_{t_1+1}..Q_{t-1}), each component 0 or 1."""
    uu = list(u)
    if len(uu) != M.t:
        raise OutOfRange("parity vector needs a length-t input, got %d" % len(uu))
    full = matrices(M).full
    xs = _star_solve(full, 0, M.t, uu)
    q = [v & 1 for v in xs]
    return tuple(q[1:]), tuple(q[M.t_list[1] + 1:])


def parity_bar(M, u_bar):
    """The tail parity vector computed directly from the lower-right block."""
    t1 = M.t_list[1]
    uu = list(u_bar)
    if len(uu) != M.t - t1 - 1:
        raise OutOfRange("tail parity needs length t-t_1-1, got %d" % len(uu))
    xs = _star_solve(matrices(M).full, t1 + 1, M.t, uu)
    return tuple(v & 1 for v in xs)


# ---------------------------------------------------------------------------
# gamma recursion


class GammaResult:
    """Outcome of the backward constant-term recursion for a pair of runs."""

    __slots__ = ("gamma0", "gamma", "gamma_prime", "case", "states", "interm")

    def __init__(self, gamma0, gamma, gamma_prime, case, states, interm):
        self.gamma0 = gamma0
        self.gamma = gamma
        self.gamma_prime = gamma_prime  # (constant, coefficient of L)
        self.case = case
        self.states = states  # (alpha_j, beta_j, gamma_j) for j = t..0
        self.interm = interm  # (alpha''_j, beta'_j, gamma''_j) for j = t-1..0

    def gamma_prime_at(self, L):
        return self.gamma_prime[0] + self.gamma_prime[1] * L

    def as_record(self):
        return {"gamma0": self.gamma0, "gamma": self.gamma,
                "gamma_prime": list(self.gamma_prime), "case": self.case,
                "states": [list(s) for s in self.states]}


def gamma(M, run_left, run_right, a=None, b=None):
    """Backward recursion for the exponent constant, with the sigma=0 corrections."""
    dl = delta_of_run(M, run_left)
    dr = delta_of_run(M, run_right)
    alpha = beta = g = 0
    states = [(0, 0, 0)]
    interm = []
    for j in range(M.t, 0, -1):
        beta_p = beta + dl[j - 1] - dr[j - 1]
        g_p = g + 2 * alpha * dr[j - 1]
        alpha_pp = alpha + beta_p
        g_pp = g_p - beta_p * beta_p
        interm.append((alpha_pp, beta_p, g_pp))
        if (j - 1) in M.t_set:
            alpha, beta, g = alpha_pp, alpha, -alpha_pp * alpha_pp - g_pp
        else:
            alpha, beta, g = alpha_pp, beta_p, g_pp
        states.append((alpha, beta, g))
    gamma0 = g

    case, gam, lcoeff = 0, gamma0, 0
    sig, dlt = run_right.sigma[-1], run_right.delta[-1]
    if sig == 0:
        if b is None:
            raise MissingContext("gamma at sigma = 0 needs the right endpoint b")
        p, pp = M.p, M.pp
        if pp > 2 * p:
            if dlt == 1 and (b == pp - 1 or (b + 1) * p // pp == b * p // pp):
                case, lcoeff = 1, -2
            elif dlt == -1 and (b == 1 or (b - 1) * p // pp == b * p // pp):
                case, lcoeff = 2, -2
        else:
            if dlt == 1 and (b == pp - 1 or (b + 1) * p // pp != b * p // pp):
                case, lcoeff = 3, 2
            elif dlt == -1 and (b == 1 or (b - 1) * p // pp != b * p // pp):
                case, lcoeff = 4, 2
        if case:
            if a is None:
                raise MissingContext("gamma case %d needs the left endpoint a" % case)
            sign = -1 if case in (1, 4) else 1
            gam = gamma0 + sign * 2 * (a - b)
    return GammaResult(gamma0, gam, (gam, lcoeff), case, tuple(states), tuple(interm))


def in_u_bar(M, u):
    """Membership in the excluded subset of U(b) that dies in the large-L limit."""
    run = u.source
    if run.sigma[-1] != 0:
        return False
    b = endpoint_of_run(M, run)
    v = b + run.delta[-1]
    if 0 < v < M.pp:
        return b * M.p // M.pp != v * M.p // M.pp
    return M.pp < 2 * M.p


# ---------------------------------------------------------------------------
# mn-system


def mn_solutions(M, u, L):
    """All (n, m-hat) solutions of the coupled system with surviving binomials."""
    uu = list(u)
    t = M.t
    if len(uu) != t:
        raise OutOfRange("mn-system needs a length-t vector, got %d" % len(uu))
    lengths = [M.l[i] for i in range(1, t + 1)]
    target2 = L + sum(li * ui for li, ui in zip(lengths, uu))
    if L < 0 or target2 < 0 or target2 % 2:
        return []
    target = target2 // 2

    # descend j = t..1 choosing n_j, back-substituting m_{j-1} as we go;
    # a negative m_{j-1} (j-1 >= 1) zeroes every completion, so prune there
    out = []
    n = [0] * t
    m = [0] * (t + 2)
    boundary = M.t_set

    def descend(j, rem):
        lj = lengths[j - 1]
        for k in range(rem // lj + 1):
            n[j - 1] = k
            if j in boundary:
                mj = m[j] + m[j + 1] + 2 * k - uu[j - 1]
            else:
                mj = 2 * m[j] + 2 * k - uu[j - 1] - m[j + 1]
            if j > 1:
                if mj >= 0:
                    m[j - 1] = mj
                    descend(j - 1, rem - k * lj)
            elif mj == L and rem == k * lj:
                m[0] = mj
                out.append((tuple(n), tuple(m[:t])))
        n[j - 1] = 0

    descend(t, target)
    out.sort()
    return out


# ---------------------------------------------------------------------------
# shared exponent helpers


def _conv(a, b):
    if len(a) == 1:
        return tuple(a[0] * x for x in b) if a[0] != 1 else tuple(b)
    if _np is not None and len(a) * len(b) > 256:
        bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
        if bound < 2 ** 62:
            return tuple(int(x) for x in _np.convolve(
                _np.array(a, dtype=_np.int64), _np.array(b, dtype=_np.int64)))
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return tuple(out)


def _tri_quad(full, vec, lo):
    """vec^T (block of full starting at lo) vec for a tridiagonal block."""
    total = 0
    n = len(vec)
    for i in range(n):
        j = lo + i
        total += full[j][j] * vec[i] * vec[i]
        if i + 1 < n:
            total += (full[j][j + 1] + full[j + 1][j]) * vec[i] * vec[i + 1]
    return total


# ---------------------------------------------------------------------------
# finitized fundamental form


def F_finite(M, u_left, u_right, L, a=None, b=None):
    """The finitized fundamental form: an exact Laurent-free polynomial."""
    run_l, run_r = u_left.source, u_right.source
    if a is None:
        a = endpoint_of_run(M, run_l)
    if b is None:
        b = endpoint_of_run(M, run_r)
    gres = gamma(M, run_l, run_r, a=a, b=b)
    g4 = gres.gamma_prime_at(L)
    uu = [x + y for x, y in zip(u_left, u_right)]
    flat_l = flat_sharp(M, u_left.u)[0]
    sharp_r = flat_sharp(M, u_right.u)[1]
    w = [x + y for x, y in zip(flat_l, sharp_r)]
    full = matrices(M).full
    t = M.t
    terms = {}
    for nv, mhat in mn_solutions(M, uu, L):
        e4 = _tri_quad(full, mhat, 0) - L * L + g4
        e4 -= 2 * sum(wj * mj for wj, mj in zip(w, mhat[1:]))
        coeffs = (1,)
        for j in range(1, t):
            gj = gaussian_coeffs(mhat[j] + nv[j - 1], mhat[j])
            if not gj:
                coeffs = ()
                break
            coeffs = _conv(coeffs, gj)
        for k, cval in enumerate(coeffs):
            if cval:
                key = e4 + 4 * k
                v = terms.get(key, 0) + cval
                if v:
                    terms[key] = v
                elif key in terms:
                    del terms[key]
    return finalize_integral(QPoly(terms))


def F_tilde(M, u_left, u, L, a=None, b=None):
    """The companion form used on the wrong-facing vectors at non-interfacial b."""
    run = u.source
    if a is None:
        a = endpoint_of_run(M, u_left.source)
    if b is None:
        b = endpoint_of_run(M, run)
    sig = run.sigma[-1]
    tau = tau_of(M, run)
    D = run.delta[-1] * (a - b)
    if M.pp > 2 * M.p:
        if sig == 0:
            return F_finite(M, u_left, u, L, a=a, b=b).shifted4(2 * (L + D))
        up = u_of_run(M, run_plus(M, run))
        if sig < tau - 1:
            upp = u_of_run(M, run_plusplus(M, run))
            poly = (F_finite(M, u_left, up, L + 1, a=a, b=b)
                    - F_finite(M, u_left, upp, L, a=a, b=b))
            return poly.shifted4(-2 * (L - D))
        poly = F_finite(M, u_left, u, L, a=a, b=b) \
            + (QPoly.q_power(L) - QPoly.one()) * F_finite(M, u_left, up, L - 1, a=a, b=b)
        return poly.shifted4(-2 * (L - D))
    if sig == 0:
        return F_finite(M, u_left, u, L, a=a, b=b).shifted4(-2 * (L + D))
    up = u_of_run(M, run_plus(M, run))
    if sig < tau - 1:
        upp = u_of_run(M, run_plusplus(M, run))
        return F_finite(M, u_left, up, L + 1, a=a, b=b) \
            - F_finite(M, u_left, upp, L, a=a, b=b).shifted4(2 * (L + 2 + D))
    return F_finite(M, u_left, u, L, a=a, b=b).shifted4(2 * (L - D)) \
        + (QPoly.one() - QPoly.q_power(L)) * F_finite(M, u_left, up, L - 1, a=a, b=b)


# ---------------------------------------------------------------------------
# infinite fundamental form


def _shift_ramp(M, run):
    """Per-component deduction applied to the first-zone tail sums."""
    t1 = M.t_list[1]
    sig, tau = run.sigma[-1], run.tau[-1]
    out = []
    for i in range(1, t1 + 1):
        if i <= sig:
            out.append(0)
        elif i <= tau:
            out.append(i - sig)
        else:
            out.append(tau - sig)
    return out


def _isqrt(n):
    if n < 0:
        return 0
    r = int(n ** 0.5)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


def _npart_series(uu, ramp, t1, mu, cutoff, scap):
    """Tail-sum series over the first-zone occupation numbers, for fixed mu."""
    # state: running tail sum S; emitted piece per step i: S^2 - 2*(ramp step)*S
    states = {0: {0: 1}}
    for i in range(t1, 0, -1):
        dn = ramp[i - 1] - (ramp[i - 2] if i >= 2 else 0)
        keep = cutoff + (i - 1)  # later steps each contribute at least -1
        new = {}
        for s_next, ser in states.items():
            base_w = -uu[i - 1] + (mu if i == t1 else 0)
            lo = min(ser)
            width = keep + 4 - lo
            if width < 1:
                continue
            run = [0] * width
            for e, c in ser.items():
                run[e - lo] = c
            n = 0
            while True:
                w = 2 * n + base_w
                s = s_next + w
                if s > scap:
                    break
                if n:
                    step = 4 * n
                    for k in range(step, width):
                        run[k] += run[k - step]
                if -scap <= s:
                    piece = s * s - 2 * dn * s
                    tgt = new.setdefault(s, {})
                    for k, c in enumerate(run):
                        if c:
                            e = lo + k + piece
                            if e <= keep:
                                v = tgt.get(e, 0) + c
                                if v:
                                    tgt[e] = v
                                elif e in tgt:
                                    del tgt[e]
                n += 1
        states = {s: ser for s, ser in new.items() if ser}
    total = {}
    for ser in states.values():
        for e, c in ser.items():
            v = total.get(e, 0) + c
            if v:
                total[e] = v
            elif e in total:
                del total[e]
    return total


def _poch_fold(ser, mu, cutoff):
    """Multiply a sparse quarter-unit series by the inverse staircase factor."""
    if not ser or mu == 0:
        return dict(ser)
    lo = min(ser)
    width = cutoff - lo + 1
    arr = [0] * width
    for e, c in ser.items():
        arr[e - lo] = c
    for i in range(1, mu + 1):
        step = 4 * i
        for k in range(step, width):
            arr[k] += arr[k - step]
    return {lo + k: c for k, c in enumerate(arr) if c}


_STATE_LIMIT = 4_000_000


def _f_star_engine(M, uu, fbar, ramp, g4, order):
    full = matrices(M).full
    t, t1 = M.t, M.t_list[1]
    hi = 4 * (order - 1)
    T = t - 1 - t1  # number of chained variables, at positions t1+1..t-1
    scap = _isqrt(4 * order + t1) + 3

    # Real-relaxation completion bounds by elimination from the left end:
    # after eliminating positions 0..k-1 the remaining form in x_k is
    # dt[k] x^2 + O[k] x x' - 2 ft[k] x + cst[k].
    D = [full[t1 + 1 + i][t1 + 1 + i] for i in range(T)]
    O = [full[t1 + 1 + i][t1 + 2 + i] + full[t1 + 2 + i][t1 + 1 + i]
         if i + 1 < T else 0 for i in range(T)]
    dt = [0.0] * T
    ft = [0.0] * T
    cst = [0.0] * T
    for k in range(T):
        if k == 0:
            dt[0], ft[0], cst[0] = float(D[0]), float(fbar[0]), 0.0
        else:
            dt[k] = D[k] - O[k - 1] * O[k - 1] / (4.0 * dt[k - 1])
            ft[k] = fbar[k] - O[k - 1] * ft[k - 1] / (2.0 * dt[k - 1])
            cst[k] = cst[k - 1] - ft[k - 1] * ft[k - 1] / dt[k - 1]

    def phi(idx, m):
        """Lower bound on the exponent still to come from positions < idx."""
        if idx == 0:
            return -t1 - 4.0
        v = O[idx - 1] * m - 2.0 * ft[idx - 1]
        return cst[idx] - v * v / (4.0 * dt[idx - 1]) - t1 - 4.0

    def gfact(mu, need):
        if mu < 0 or need < 0:
            return {}
        ser = _npart_series(uu, ramp, t1, mu, need, scap)
        if T:
            ser = _poch_fold(ser, mu, need)
        return ser

    if not T:
        coeffs = [0] * order
        for e, c in gfact(0, hi - g4).items():
            e4 = e + g4
            if e4 % 4:
                raise FractionalExponent("series exponent %s/4" % e4)
            if e4 < 0:
                raise FractionalExponent("negative series exponent %s/4" % e4)
            k = e4 // 4
            if k < order:
                coeffs[k] = c
        return coeffs

    def piece(idx, m, m_up):
        return D[idx] * m * m + (O[idx] * m * m_up if idx + 1 < T else 0) \
            - 2 * fbar[idx] * m

    # stage 0: row t fixes the rightmost position from its slack variable
    states = {}
    idx0 = T - 1
    nbar = 0
    prev_val = None
    while True:
        m = 2 * nbar - uu[t - 1]
        e = g4 + piece(idx0, m, 0)
        val = e + phi(idx0, m)
        if val <= hi:
            if m >= 0 or T > 1:
                states[(m, 0)] = {e: 1}
        elif prev_val is not None and val > prev_val and m > 0:
            break
        prev_val = val
        nbar += 1
        if nbar > _STATE_LIMIT:
            raise UnstableTruncation("slack enumeration did not close")

    # stages 1..T-1: row j fixes position j-1 and emits the binomial at j
    for s in range(1, T):
        idx_new = T - 1 - s
        j_row = t1 + 2 + idx_new  # row driving the new position
        u_row = uu[j_row - 1]
        c_row = full[j_row][j_row]
        e_row = full[j_row][j_row + 1] if j_row + 1 <= t - 1 else 0
        new = {}
        total = 0
        for (mc, mu_), ser in states.items():
            base_m = c_row * mc + e_row * mu_ - u_row
            e_lo = min(ser)
            nbar = 0
            prev_val = None
            while True:
                m_new = base_m + 2 * nbar
                pc = piece(idx_new, m_new, mc)
                val = e_lo + pc + phi(idx_new, m_new)
                if val > hi:
                    if prev_val is not None and val > prev_val and m_new > 0:
                        break
                    if nbar > _STATE_LIMIT:
                        raise UnstableTruncation("slack enumeration did not close")
                    prev_val = val
                    nbar += 1
                    continue
                prev_val = val
                gj = gaussian_coeffs(mc + nbar, mc)
                if gj:
                    bound = phi(idx_new, m_new)
                    tgt = new.setdefault((m_new, mc), {})
                    for e, c in ser.items():
                        base = e + pc
                        if base + bound > hi:
                            continue
                        for k, gc in enumerate(gj):
                            if gc:
                                e2 = base + 4 * k
                                if e2 + bound > hi:
                                    break
                                v = tgt.get(e2, 0) + c * gc
                                if v:
                                    tgt[e2] = v
                                elif e2 in tgt:
                                    del tgt[e2]
                nbar += 1
            total += len(new)
            if total > _STATE_LIMIT:
                raise UnstableTruncation("chain state space did not close")
        states = {k: v for k, v in new.items() if v}

    coeffs = [0] * order
    needs = {}
    for (mc, _mu), ser in states.items():
        if ser:
            needs[mc] = max(needs.get(mc, -1), hi - min(ser))
    tails = {mc: gfact(mc, need) for mc, need in needs.items()}
    for (mc, _mu), ser in states.items():
        tail = tails.get(mc)
        if not tail:
            continue
        for e, c in ser.items():
            for e2, c2 in tail.items():
                e4 = e + e2
                if e4 > hi:
                    continue
                if e4 % 4:
                    raise FractionalExponent("series exponent %s/4" % e4)
                if e4 < 0:
                    raise FractionalExponent("negative series exponent %s/4" % e4)
                coeffs[e4 // 4] += c * c2
    return coeffs


def F_star(M, u_left, u_right, order, a=None, b=None):
    """The changed-variable form whose large-L limit the finitized form attains."""
    if order < 1:
        raise OutOfRange("series order must be >= 1")
    run_r = u_right.source
    gres = gamma(M, u_left.source, run_r, a=a, b=b)
    uu = [x + y for x, y in zip(u_left, u_right)]
    bars_l = flat_sharp(M, u_left.u)
    bars_r = flat_sharp(M, u_right.u)
    fbar = [x + y for x, y in zip(bars_l[3], bars_r[4])]
    ramp = _shift_ramp(M, run_r)
    return QSeries(order, _f_star_engine(M, uu, fbar, ramp, gres.gamma, order))


def F_infinite(M, u_left, u_right, order):
    """The infinite fundamental form as a truncated series."""
    return F_star(M, u_left, u_right, order)


# ---------------------------------------------------------------------------
# expression records


class FermTerm:
    """One fundamental-form summand of a character assembly."""

    __slots__ = ("kind", "u_left", "u_right", "gamma", "value")

    def __init__(self, kind, u_left, u_right, gamma_result, value):
        self.kind = kind  # "F" | "Ftilde" | "Finf"
        self.u_left = u_left
        self.u_right = u_right
        self.gamma = gamma_result
        self.value = value

    def as_record(self):
        rec = {"kind": self.kind,
               "u_left": self.u_left.as_record(),
               "u_right": self.u_right.as_record(),
               "gamma": self.gamma.as_record()}
        if isinstance(self.value, QPoly):
            rec["value"] = self.value.as_pairs()
        else:
            rec["value"] = self.value.as_record()
        return rec


class FermExpr:
    """A full assembly: fundamental-form terms plus an optional nested tail."""

    __slots__ = ("provenance", "terms", "extra", "exceptional", "value")

    def __init__(self, provenance, terms, extra, exceptional, value):
        self.provenance = provenance
        self.terms = terms
        self.extra = extra
        self.exceptional = exceptional
        self.value = value

    def form_count(self):
        n = len(self.terms)
        if self.extra is not None:
            n += self.extra.form_count()
        return n

    def depth(self):
        return 1 + (self.extra.depth() if self.extra is not None else 0)

    def chain(self):
        out = [(self.provenance["p"], self.provenance["pp"])]
        if self.extra is not None:
            out.extend(self.extra.chain())
        return out

    def as_record(self):
        rec = {"provenance": dict(self.provenance),
               "exceptional": self.exceptional,
               "terms": [tm.as_record() for tm in self.terms]}
        if isinstance(self.value, QPoly):
            rec["value"] = self.value.as_pairs()
        else:
            rec["value"] = self.value.as_record()
        rec["extra"] = self.extra.as_record() if self.extra is not None else None
        return rec


# ---------------------------------------------------------------------------
# character assembly (infinite)


def character_expr(M, r, s, order, config=DEFAULT):
    """Assembly tree for the character: summed series plus its term records."""
    if M.p < 2:
        raise OutOfRange("character labels need p >= 2, got p = %d" % M.p)
    if not 1 <= r < M.p:
        raise OutOfRange("label r out of range: %d" % r)
    if not 1 <= s < M.pp:
        raise OutOfRange("label s out of range: %d" % s)
    if order < 1:
        raise OutOfRange("series order must be >= 1")
    prov = {"p": M.p, "pp": M.pp, "r": r, "s": s, "order": order}
    if (M.p, M.pp) == (2, 3):
        return FermExpr(prov, [], None, True, QSeries.one(order))
    total = QSeries(order)
    terms = []
    for ul in u_set(M, s, config):
        for ur in u_tilde_set(M, r, config):
            val = F_infinite(M, ul, ur, order)
            terms.append(FermTerm("Finf", ul, ur,
                                  gamma(M, ul.source, ur.source), val))
            total = total + val
    extra = None
    eta = xi_eta(M, s)
    if eta == xi_eta_tilde(M, r):
        s_hat, r_hat = s - M.xi[eta], r - M.xi_tilde[eta]
        if s_hat and r_hat:
            pp_hat = M.xi[eta + 1] - M.xi[eta]
            p_hat = M.xi_tilde[eta + 1] - M.xi_tilde[eta]
            child = build_model(p_hat, pp_hat)
            if child.n >= M.n:
                raise OutOfRange("tail model must shrink the continued fraction")
            extra = character_expr(child, r_hat, s_hat, order, config)
            total = total + extra.value
    return FermExpr(prov, terms, extra, False, total)


def character_fermionic(M, r, s, order, config=DEFAULT):
    """The character series of the (r, s) module to the given order."""
    return character_expr(M, r, s, order, config).value


# ---------------------------------------------------------------------------
# finitized assembly


def finitized_expr(M, a, b, c, L, config=DEFAULT):
    """Assembly tree for the finitized character at system size L."""
    if not 1 <= a < M.pp:
        raise OutOfRange("endpoint a out of range: %d" % a)
    if not 1 <= b < M.pp:
        raise OutOfRange("endpoint b out of range: %d" % b)
    if c not in (b - 1, b + 1) or not 0 <= c <= M.pp:
        raise OutOfRange("boundary label c must be b±1 within [0, p'], got %d" % c)
    if L < 0:
        raise OutOfRange("system size must be nonnegative, got %d" % L)
    if (L - a + b) % 2:
        raise ParityMismatch("L = %d has the wrong parity for endpoints (%d, %d)"
                             % (L, a, b))
    prov = {"p": M.p, "pp": M.pp, "a": a, "b": b, "c": c, "L": L}
    if (M.p, M.pp) == (1, 2):
        value = QPoly.one() if L == 0 else QPoly.zero()
        return FermExpr(prov, [], None, True, value)

    total = QPoly.zero()
    terms = []
    if is_interfacial(M, b):
        for ul in u_set(M, a, config):
            for ur in u_set(M, b, config):
                val = F_finite(M, ul, ur, L, a=a, b=b)
                terms.append(FermTerm("F", ul, ur,
                                      gamma(M, ul.source, ur.source, a=a, b=b), val))
                total = total + val
    else:
        straight = u_split(M, b, c - b, config)
        turned = u_split(M, b, b - c, config)
        for ul in u_set(M, a, config):
            for ur in straight:
                val = F_finite(M, ul, ur, L, a=a, b=b)
                terms.append(FermTerm("F", ul, ur,
                                      gamma(M, ul.source, ur.source, a=a, b=b), val))
                total = total + val
            for ur in turned:
                val = F_tilde(M, ul, ur, L, a=a, b=b)
                terms.append(FermTerm("Ftilde", ul, ur,
                                      gamma(M, ul.source, ur.source, a=a, b=b), val))
                total = total + val

    extra = None
    eta = xi_eta(M, a)
    if eta == xi_eta(M, b):
        a_hat, b_hat = a - M.xi[eta], b - M.xi[eta]
        if a_hat and b_hat:
            pp_hat = M.xi[eta + 1] - M.xi[eta]
            p_hat = M.xi_tilde[eta + 1] - M.xi_tilde[eta]
            straddles = (b + 1) * M.p // M.pp == (b - 1) * M.p // M.pp + 1
            if c == M.xi[eta] and c > 0 and straddles:
                c_hat = 2
            elif c == M.xi[eta + 1] and c < M.pp and straddles:
                c_hat = pp_hat - 2
            else:
                c_hat = c - M.xi[eta]
            child = build_model(p_hat, pp_hat)
            if child.n >= M.n:
                raise OutOfRange("tail model must shrink the continued fraction")
            extra = finitized_expr(child, a_hat, b_hat, c_hat, L, config)
            total = total + extra.value
    return FermExpr(prov, terms, extra, False, total)


def finitized_fermionic(M, a, b, c, L, config=DEFAULT):
    """The finitized character polynomial at system size L."""
    return finitized_expr(M, a, b, c, L, config).value
