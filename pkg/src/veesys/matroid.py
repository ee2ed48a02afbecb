"""Rank-2 flats of a covector configuration and matroid fingerprinting.

A 2-flat is a maximal set of covectors lying in a common plane of the dual
space.  In rank 3 every unordered pair of covectors belongs to exactly one
flat, so the flats partition the pair set; flats with exactly two members
are called pair flats, the rest multi flats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import RankTooHigh
from .tolerances import COPLANAR_TOL, TINY_NORM

YES = "Yes"
NO = "No"
UNKNOWN = "Unknown"

# Backtracking search for a flat-preserving relabelling gives up after this
# many visited nodes and reports Unknown.  Keeps worst cases (n = 31) bounded
# while letting structured mid-size instances (n ~ 15) finish exactly.
DEFAULT_NODE_BUDGET = 500_000


@dataclass(frozen=True)
class Flat:
    """A rank-2 flat: sorted member indices plus (rank 3) its plane normal."""

    members: tuple
    plane_normal: tuple = None

    @property
    def size(self):
        return len(self.members)

    @property
    def is_pair(self):
        return len(self.members) == 2


@dataclass(frozen=True)
class FlatDecomposition:
    flats: tuple  # all flats, sorted by (size, members)
    pair_flats: tuple  # indices into flats
    multi_flats: tuple  # indices into flats
    n: int
    tiny_covectors: tuple = ()  # indices with norm < TINY_NORM (degeneracy flag)

    def member_labels(self, config):
        """Flat member index tuples translated to configuration labels."""
        return [tuple(config.labels[i] for i in f.members) for f in self.flats]

    def flat_of_pair(self, i, j):
        """The unique flat containing covectors i and j."""
        for f in self.flats:
            if i in f.members and j in f.members:
                return f
        raise KeyError((i, j))


@dataclass(frozen=True)
class MatroidFingerprint:
    flat_size_multiset: tuple
    point_profile: tuple  # per covector: sorted sizes of flats through it
    canonical_profile: tuple  # point_profile sorted lexicographically

    @property
    def digest(self):
        """Short relabelling-invariant hex digest of the fingerprint."""
        import hashlib

        payload = repr((self.flat_size_multiset, self.canonical_profile))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _normalized_plane_normal(u, v):
    normal = np.cross(u, v)
    normal = normal / np.linalg.norm(normal)
    for x in normal:
        if abs(x) > 1e-12:
            if x < 0:
                normal = -normal
            break
    return tuple(normal)


def decompose(config, coplanar_tol=COPLANAR_TOL):
    """Enumerate the rank-2 flats of a rank-3 configuration.

    Covectors are normalized to unit length before the determinant test, so
    the decomposition is invariant under per-covector scaling.  Pairs (i,j),
    (i,k) merge into one flat when det(a_i, a_j, a_k) vanishes within
    ``coplanar_tol``.
    """
    r, n = config.matrix.shape
    if r > 3:
        raise RankTooHigh(f"flat enumeration supports rank <= 3, got {r}")

    norms = np.linalg.norm(config.matrix, axis=0)
    tiny = tuple(int(i) for i in np.flatnonzero(norms < TINY_NORM))
    unit = config.matrix / norms

    if r == 2:
        flats = (Flat(tuple(range(n))),)
        return FlatDecomposition(flats, (), (0,), n, tiny)

    # Union-find over unordered pairs; pair (i,j) has id i*n + j for i < j.
    uf = _UnionFind(n * n)
    for i, j, k in itertools.combinations(range(n), 3):
        det = np.linalg.det(unit[:, [i, j, k]])
        if abs(det) < coplanar_tol:
            uf.union(i * n + j, i * n + k)
            uf.union(i * n + j, j * n + k)

    groups = {}
    for i, j in itertools.combinations(range(n), 2):
        groups.setdefault(uf.find(i * n + j), set()).update((i, j))

    flats = []
    for members in groups.values():
        members = tuple(sorted(members))
        normal = _normalized_plane_normal(unit[:, members[0]], unit[:, members[1]])
        flats.append(Flat(members, normal))
    flats.sort(key=lambda f: (f.size, f.members))
    flats = tuple(flats)
    pair = tuple(i for i, f in enumerate(flats) if f.is_pair)
    multi = tuple(i for i, f in enumerate(flats) if not f.is_pair)
    return FlatDecomposition(flats, pair, multi, n, tiny)


def fingerprint(decomposition):
    """Relabelling-invariant summary of the flat structure."""
    sizes = tuple(sorted(f.size for f in decomposition.flats))
    profile = []
    for i in range(decomposition.n):
        through = sorted(f.size for f in decomposition.flats if i in f.members)
        profile.append(tuple(through))
    return MatroidFingerprint(sizes, tuple(profile), tuple(sorted(profile)))


class _BudgetExceeded(Exception):
    pass


def _search_bijection(d1, d2, node_budget):
    """Backtracking search for a covector bijection mapping flats to flats.

    Returns the mapping (list, d1 index -> d2 index) or None; raises
    _BudgetExceeded when the node budget runs out.  Assumes fingerprints
    already agree.
    """
    n = d1.n
    f1, f2 = fingerprint(d1), fingerprint(d2)
    target_sets = set(f.members for f in d2.flats)

    def pair_sizes(d):
        ps = {}
        for f in d.flats:
            for a, b in itertools.combinations(f.members, 2):
                ps[(a, b)] = f.size
        return ps

    ps1, ps2 = pair_sizes(d1), pair_sizes(d2)

    candidates = [
        [j for j in range(n) if f2.point_profile[j] == f1.point_profile[i]]
        for i in range(n)
    ]
    order = sorted(range(n), key=lambda i: len(candidates[i]))
    mapping = [-1] * n
    used = [False] * n
    nodes = 0

    def extend(depth):
        nonlocal nodes
        if depth == n:
            for f in d1.flats:
                image = tuple(sorted(mapping[i] for i in f.members))
                if image not in target_sets:
                    return False
            return True
        i = order[depth]
        for j in candidates[i]:
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExceeded
            if used[j]:
                continue
            ok = True
            for d_prev in range(depth):
                k = order[d_prev]
                a, b = min(i, k), max(i, k)
                u, v = min(j, mapping[k]), max(j, mapping[k])
                if ps1[(a, b)] != ps2[(u, v)]:
                    ok = False
                    break
            if not ok:
                continue
            mapping[i] = j
            used[j] = True
            if extend(depth + 1):
                return True
            mapping[i] = -1
            used[j] = False
        return False

    return list(mapping) if extend(0) else None


def same_matroid(d1, d2, node_budget=DEFAULT_NODE_BUDGET):
    """Decide whether two decompositions define the same labelled-set matroid.

    Returns "No" when the fingerprints differ or the exhaustive search rules
    a bijection out, "Yes" when a backtracking search finds a bijection of
    covectors mapping flats onto flats, and "Unknown" when the search
    exceeds its node budget.
    """
    if d1.n != d2.n:
        raise ValueError("decompositions must have equal ground-set size")
    f1, f2 = fingerprint(d1), fingerprint(d2)
    if (f1.flat_size_multiset != f2.flat_size_multiset
            or f1.canonical_profile != f2.canonical_profile):
        return NO
    try:
        mapping = _search_bijection(d1, d2, node_budget)
    except _BudgetExceeded:
        return UNKNOWN
    return YES if mapping is not None else NO


def find_flat_bijection(d1, d2, node_budget=DEFAULT_NODE_BUDGET):
    """Like same_matroid but returns the relabelling (list: d1 index -> d2
    index) when one exists, else None.  Raises TimeoutError on budget."""
    if d1.n != d2.n:
        raise ValueError("decompositions must have equal ground-set size")
    f1, f2 = fingerprint(d1), fingerprint(d2)
    if (f1.flat_size_multiset != f2.flat_size_multiset
            or f1.canonical_profile != f2.canonical_profile):
        return None
    try:
        return _search_bijection(d1, d2, node_budget)
    except _BudgetExceeded:
        raise TimeoutError("flat bijection search exceeded node budget")


def decomposition_from_flats(flat_member_sets, n):
    """Build a FlatDecomposition from explicit member-index sets (no geometry).

    Useful for comparing a computed decomposition against a published flat
    list via same_matroid / find_flat_bijection.
    """
    flats = tuple(sorted((Flat(tuple(sorted(m))) for m in flat_member_sets),
                         key=lambda f: (f.size, f.members)))
    pair = tuple(i for i, f in enumerate(flats) if f.is_pair)
    multi = tuple(i for i, f in enumerate(flats) if not f.is_pair)
    return FlatDecomposition(flats, pair, multi, n)
