"""Takahashi trees, truncated trees, and the runs and u-vectors they generate.

A tree for a height a descends through the membership sets T / T' (or their
truncated analogues) until the gap to a is itself a member length; each leaf
encodes a run {tau_j, sigma_j, Delta_j}_{j=1..d} of length-set indices, and
each run in turn yields the t-dimensional vectors u and Delta entering the
fermionic forms.  Leaf siblings (address ...1 next to a leaf ...0) are
materialized in the root's address index so every lookup resolves.
"""

from __future__ import annotations

from functools import lru_cache

from .cfmodel import build_model
from .config import DEFAULT
from .errors import AmbiguousMembership, IndexOverflow, OutOfRange

TAKAHASHI = "takahashi"
TRUNCATED = "truncated"


class TreeNode:
    """Tree node; kind is one of branch / through / leaf."""

    __slots__ = ("address", "value", "kind", "children", "flavor", "index")

    def __init__(self, address, value, kind=None):
        self.address = address
        self.value = value
        self.kind = kind
        self.children = ()
        self.flavor = None  # set on the root only
        self.index = None   # set on the root only: address -> value, leaf siblings included

    def __repr__(self):
        return "TreeNode(%r, %r, %r)" % (self.address, self.value, self.kind)

    def walk(self):
        """Yield this node and all descendants, depth first."""
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self):
        """All leaf nodes in address order."""
        return [node for node in self.walk() if node.kind == "leaf"]

    def as_record(self):
        """Plain-dict view of the subtree."""
        rec = {"address": self.address, "value": self.value, "kind": self.kind}
        if self.children:
            rec["children"] = [child.as_record() for child in self.children]
        return rec


class Run:
    """A run {tau_j, sigma_j, Delta_j}_{j=1..d} of length-set indices."""

    __slots__ = ("tau", "sigma", "delta", "flavor")

    def __init__(self, tau, sigma, delta, flavor=TAKAHASHI):
        self.tau = tuple(tau)
        self.sigma = tuple(sigma)
        self.delta = tuple(delta)
        self.flavor = flavor

    @property
    def d(self):
        return len(self.tau)

    def triples(self):
        """(tau_j, sigma_j, Delta_j) for j = 1..d."""
        return tuple(zip(self.tau, self.sigma, self.delta))

    def __eq__(self, other):
        return (isinstance(other, Run) and self.flavor == other.flavor
                and self.triples() == other.triples())

    def __hash__(self):
        return hash((self.triples(), self.flavor))

    def __repr__(self):
        return "Run(%s, %s, %s, %r)" % (
            list(self.tau), list(self.sigma), list(self.delta), self.flavor)

    def as_record(self):
        return {"tau": list(self.tau), "sigma": list(self.sigma),
                "delta": list(self.delta), "flavor": self.flavor}


class UVector:
    """A t-dimensional vector u together with the run it came from."""

    __slots__ = ("u", "source", "delta_last", "sigma_last")

    def __init__(self, u, source):
        self.u = tuple(u)
        self.source = source
        self.delta_last = source.delta[-1]
        self.sigma_last = source.sigma[-1]

    def __iter__(self):
        return iter(self.u)

    def __len__(self):
        return len(self.u)

    def __repr__(self):
        return "UVector(%s)" % (list(self.u),)

    def as_record(self):
        return {"u": list(self.u), "delta_last": self.delta_last,
                "sigma_last": self.sigma_last, "run": self.source.as_record()}


def _window(M, flavor):
    """Index window [lo, hi] of member lengths for the given flavor."""
    if flavor == TAKAHASHI:
        return 0, M.t - 1
    lo = M.t_list[1] + 1
    return lo, max(M.t - 1, lo)


@lru_cache(maxsize=None)
def _tables(p, pp, flavor):
    """Lengths, complement total, and value->index maps for one flavor."""
    M = build_model(p, pp)
    lengths = M.kappa if flavor == TAKAHASHI else M.kappa_tilde
    total = M.pp if flavor == TAKAHASHI else M.p
    lo, hi = _window(M, flavor)
    plain = {lengths[i]: i for i in range(lo, hi + 1)}
    mirror = {total - lengths[i]: i for i in range(lo, hi + 1)}
    by_value = {lengths[i]: i for i in range(lo, M.t + 2)}
    return lengths, total, plain, mirror, by_value


def _sprout(node, target, index):
    """Turn node into a through-node with a single leaf child."""
    node.kind = "through"
    leaf = TreeNode(node.address + "0", target, "leaf")
    node.children = (leaf,)
    index[leaf.address] = target
    index[node.address + "1"] = target  # leaf sibling carries the same value


def _grow(M, node, target, plain, lengths, index):
    gap = abs(node.value - target)
    if gap in plain:
        _sprout(node, target, index)
        return
    node.kind = "branch"
    x = plain[max(v for v in plain if v < gap)]
    if node.address.endswith("1"):
        v0, v1 = node.value - lengths[x + 1], node.value - lengths[x]
    else:
        v0, v1 = node.value + lengths[x], node.value + lengths[x + 1]
    node.children = (TreeNode(node.address + "0", v0),
                     TreeNode(node.address + "1", v1))
    for child in node.children:
        index[child.address] = child.value
        _grow(M, child, target, plain, lengths, index)


def _tree(M, target, flavor):
    lengths, total, plain, mirror, _ = _tables(M.p, M.pp, flavor)
    root = TreeNode("", None)
    index = {}
    if target in plain or target in mirror:
        _sprout(root, target, index)
    else:
        members = sorted(set(plain) | set(mirror))
        below = max(v for v in members if v < target)
        above = min(v for v in members if v > target)
        root.kind = "branch"
        root.children = (TreeNode("0", below), TreeNode("1", above))
        for child in root.children:
            index[child.address] = child.value
            _grow(M, child, target, plain, lengths, index)
    root.flavor = flavor
    root.index = index
    return root


@lru_cache(maxsize=None)
def _tree_cached(p, pp, target, flavor):
    return _tree(build_model(p, pp), target, flavor)


def takahashi_tree(M, a):
    """The Takahashi tree whose leaves encode the decompositions of a."""
    if M.t == 0:
        raise OutOfRange("the (1,2) model has empty membership sets")
    if not 1 <= a <= M.pp - 1:
        raise OutOfRange("need 1 <= a <= p'-1, got a=%s" % (a,))
    return _tree_cached(M.p, M.pp, a, TAKAHASHI)


def truncated_tree(M, r):
    """The truncated Takahashi tree for r built from the tilde length sets."""
    if not 1 <= r <= M.p - 1:
        raise OutOfRange("need 1 <= r <= p-1, got r=%s" % (r,))
    return _tree_cached(M.p, M.pp, r, TRUNCATED)


def run_of_leaf(M, tree, leaf, config=DEFAULT):
    """Read the run {tau_j, sigma_j, Delta_j} off a leaf of the tree."""
    _, _, plain, mirror, by_value = _tables(M.p, M.pp, tree.flavor)
    index = tree.index
    bits = leaf.address
    if leaf.kind != "leaf" or index.get(bits) != leaf.value:
        raise OutOfRange("node %r is not a leaf of this tree" % (leaf,))
    first = index["1" if bits[0] == "0" else "0"]
    in_plain, in_mirror = first in plain, first in mirror
    if in_plain and in_mirror:
        policy = config.membership if tree.flavor == TAKAHASHI else config.membership_tilde
        if policy == "T":
            in_mirror = False
        elif policy == "Tprime":
            in_plain = False
        else:
            raise AmbiguousMembership("%s lies in both membership sets" % (first,))
    if in_plain:
        delta, sigma = [-1], [plain[first]]
    else:
        delta, sigma = [1], [mirror[first]]
    if (tree.flavor == TRUNCATED and config.sigma_tilde_start == "t1"
            and sigma[0] == M.t_list[1] + 1):
        sigma[0] = M.t_list[1]  # same unit length one index down
    tau = [M.t + 1]
    for j in range(2, len(bits) + 1):
        prev = bits[:j - 1]
        delta.append(1 if prev[-1] == "1" else -1)
        sibling = prev + ("1" if bits[j - 1] == "0" else "0")
        sigma.append(by_value[abs(index[prev] - index[sibling])])
        grand = bits[:j - 2]
        tau.append(by_value[index[grand + "1"] - index[grand + "0"]])
    return Run(tau, sigma, delta, tree.flavor)


def _pair_vector(M, i, j):
    """Coefficient list (padded to 0..t+1) of e_i - e_j - sum of boundary e_{t_k}."""
    if not 0 <= i <= j <= M.t + 1:
        raise OutOfRange("need 0 <= i <= j <= t+1, got (%s, %s)" % (i, j))
    vec = [0] * (M.t + 2)
    vec[i] += 1
    vec[j] -= 1
    for tk in M.t_list[1:M.n + 1]:
        if i <= tk < j:
            vec[tk] -= 1
    return vec


def u_of_run(M, run):
    """The vector u of a run: sum of pair vectors plus e_t when Delta_1 = +1."""
    acc = [0] * (M.t + 2)
    for tau, sig in zip(run.tau, run.sigma):
        for i, v in enumerate(_pair_vector(M, sig, tau)):
            acc[i] += v
    if run.delta[0] == 1:
        acc[M.t] += 1
    return UVector(acc[1:M.t + 1], run)


def delta_of_run(M, run):
    """The signed companion of u: Delta_j-weighted pair vectors minus e_t when Delta_1 = +1."""
    acc = [0] * (M.t + 2)
    for tau, sig, dlt in zip(run.tau, run.sigma, run.delta):
        for i, v in enumerate(_pair_vector(M, sig, tau)):
            acc[i] += dlt * v
    if run.delta[0] == 1:
        acc[M.t] -= 1
    return tuple(acc[1:M.t + 1])


def runs_of(M, a, flavor=TAKAHASHI, config=DEFAULT):
    """All runs of the tree for a, in leaf address order."""
    tree = takahashi_tree(M, a) if flavor == TAKAHASHI else truncated_tree(M, a)
    return [run_of_leaf(M, tree, leaf, config) for leaf in tree.leaves()]


def u_set(M, a, config=DEFAULT):
    """The vectors u attached to the leaves of the Takahashi tree for a."""
    return [u_of_run(M, run) for run in runs_of(M, a, TAKAHASHI, config)]


def u_tilde_set(M, r, config=DEFAULT):
    """The vectors u attached to the leaves of the truncated tree for r."""
    return [u_of_run(M, run) for run in runs_of(M, r, TRUNCATED, config)]


def u_split(M, a, delta, config=DEFAULT):
    """The members of u_set(a) whose final Delta equals the given sign."""
    return [u for u in u_set(M, a, config) if u.delta_last == delta]


def _shift_last(M, run, amount):
    if run.sigma[-1] + amount > M.t:
        raise IndexOverflow("sigma_d + %d exceeds t = %d" % (amount, M.t))
    sigma = list(run.sigma)
    sigma[-1] += amount
    return Run(run.tau, sigma, run.delta, run.flavor)


def run_plus(M, run):
    """The run with its last sigma raised by one."""
    return _shift_last(M, run, 1)


def run_plusplus(M, run):
    """The run with its last sigma raised by two."""
    return _shift_last(M, run, 2)


def tau_of(M, run):
    """Bounding index paired with the last sigma: tau_d, or a zone boundary when d = 1."""
    if run.d > 1:
        return run.tau[-1]
    if run.sigma[0] < M.t_list[M.n]:
        return M.t_list[M.n]
    return M.t


def reduce_run(run):
    """Drop every triple with tau_j = sigma_j (j >= 2); u and Delta are unchanged."""
    keep = [0] + [j for j in range(1, run.d) if run.tau[j] != run.sigma[j]]
    return Run([run.tau[j] for j in keep], [run.sigma[j] for j in keep],
               [run.delta[j] for j in keep], run.flavor)


def endpoint_of_run(M, run):
    """Recover the height (or truncated label) whose leaf produced this run."""
    lengths = M.kappa if run.flavor == TAKAHASHI else M.kappa_tilde
    total = M.pp if run.flavor == TAKAHASHI else M.p
    base = lengths[run.sigma[0]] if run.delta[0] == -1 else total - lengths[run.sigma[0]]
    return base + sum(run.delta[m] * (lengths[run.tau[m]] - lengths[run.sigma[m]])
                      for m in range(1, run.d))


def mu_vectors(M, run):
    """Tree path values mu_j and sibling values mu*_j (j = 0..d-1) plus the cut d_0."""
    lengths = M.kappa if run.flavor == TAKAHASHI else M.kappa_tilde
    total = M.pp if run.flavor == TAKAHASHI else M.p
    tn = M.t_list[M.n]
    d0 = 0 if run.sigma[0] < tn else 1
    if run.delta[0] == -1:
        mu, mu_star = [0], [lengths[tn]]
        acc = lengths[run.sigma[0]]
    else:
        mu, mu_star = [total], [total - lengths[tn]]
        acc = total - lengths[run.sigma[0]]
    for j in range(1, run.d):
        mu_star.append(acc)
        mu.append(acc + run.delta[j] * lengths[run.tau[j]])
        acc += run.delta[j] * (lengths[run.tau[j]] - lengths[run.sigma[j]])
    return mu, mu_star, d0


def flat_sharp(M, u):
    """Zone-parity split of u and the three windowed tails used by the forms."""
    uu = tuple(u)
    t, t1 = M.t, M.t_list[1]
    flat = tuple(uu[j - 1] if M.zone_of[j] % 2 == 1 else 0 for j in range(1, t))
    sharp = tuple(uu[j - 1] if M.zone_of[j] % 2 == 0 else 0 for j in range(1, t))
    bar = uu[t1 + 1:t]
    return flat, sharp, bar, flat[t1:t - 1], sharp[t1:t - 1]
