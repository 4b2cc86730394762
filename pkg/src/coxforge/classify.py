"""Recognition of finite (spherical) types from the C-view graph.

Families follow the older lettering in which C_n is the chain with one
label-4 end, B_n is the simply-laced Y with two short arms (so B_3 and
A_3 coincide), and D_2(k) is the dihedral group of order 2k (so
D_2(3) = A_2 and D_2(4) = C_2).  Ranks 1 and 2 are reported under the
A/C/D_2 names that make each type appear exactly once:

  rank 1          -> A_1
  rank 2, m = 3   -> A_2
  rank 2, m = 4   -> C_2
  rank 2, m >= 5  -> D_2(m)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diagram import INF, DiagramError

_EXCEPTIONAL_ORDERS = {
    "E6": 51840,
    "E7": 2903040,
    "E8": 696729600,
    "F4": 1152,
    "G3": 120,
    "G4": 14400,
}


@dataclass(frozen=True)
class TypeTag:
    """Type of a finite irreducible standard subgroup.

    family: one of A, B, C, D2, E6, E7, E8, F4, G3, G4.
    param: the rank for A/B/C, the edge label k for D2, and the (fixed)
    rank for the exceptional families.
    """

    family: str
    param: int

    def __str__(self):
        if self.family == "D2":
            return "D_2(%d)" % self.param
        if self.family in ("A", "B", "C"):
            return "%s_%d" % (self.family, self.param)
        return self.family[0] + "_" + self.family[1]

    @property
    def rank(self):
        if self.family == "D2":
            return 2
        if self.family in ("A", "B", "C"):
            return self.param
        return int(self.family[1])

    @property
    def order(self):
        f, p = self.family, self.param
        if f == "A":
            return math.factorial(p + 1)
        if f == "B":
            return 2 ** (p - 1) * math.factorial(p)
        if f == "C":
            return 2**p * math.factorial(p)
        if f == "D2":
            return 2 * p
        return _EXCEPTIONAL_ORDERS[f]

    @property
    def center_order(self):
        """2 when the longest element is central, else 1."""
        f, p = self.family, self.param
        if f == "A":
            return 2 if p == 1 else 1
        if f == "C":
            return 2
        if f == "B":
            return 2 if p % 2 == 0 else 1
        if f == "D2":
            return 2 if p % 2 == 0 else 1
        if f == "E6":
            return 1
        return 2  # E7, E8, F4, G3, G4


class Structure:
    """Shape of an irreducible C-view component, kept alongside the tag
    so that longest-element data can be read off without re-deriving the
    layout.  For chains, `chain` lists the vertices in path order; for
    the Y shapes, `branch` is the degree-3 vertex and `arms` the three
    arms as vertex lists starting next to the branch, sorted by
    (length, first name)."""

    __slots__ = ("tag", "chain", "branch", "arms")

    def __init__(self, tag, chain=None, branch=None, arms=None):
        self.tag = tag
        self.chain = chain
        self.branch = branch
        self.arms = arms


def analyze_irreducible(diag, A):
    """Structure of the irreducible subset A, or None when <A> is
    infinite.  A must be a single C-view component."""
    A = diag.sorted_subset(A)
    if not A:
        raise DiagramError("empty subset has no irreducible type")
    comps = diag.c_components(A)
    if len(comps) != 1:
        raise DiagramError("subset %r is not irreducible" % (sorted(A),))
    n = len(A)
    if n == 1:
        return Structure(TypeTag("A", 1), chain=list(A))
    if n == 2:
        m = diag.m(A[0], A[1])
        if m is INF:
            return None
        if m == 3:
            return Structure(TypeTag("A", 2), chain=list(A))
        if m == 4:
            return Structure(TypeTag("C", 2), chain=list(A))
        return Structure(TypeTag("D2", m), chain=list(A))

    labels = []
    deg = {a: 0 for a in A}
    for i, a in enumerate(A):
        for b in A[i + 1 :]:
            m = diag.m(a, b)
            if m > 2:
                if m is INF or m > 5:
                    return None
                labels.append(m)
                deg[a] += 1
                deg[b] += 1
    if len(labels) != n - 1:
        # a connected graph on n vertices with n-1 edges is a tree; more
        # edges means a cycle, and no finite type contains one
        return None
    if max(deg.values()) > 3 or sum(1 for d in deg.values() if d == 3) > 1:
        return None

    heavy = sorted(l for l in labels if l > 3)
    branch = next((a for a in A if deg[a] == 3), None)

    if branch is None:
        # path; orient it
        ends = [a for a in A if deg[a] == 1]
        chain = _path_order(diag, A, min(ends, key=diag.index))
        seq = [diag.m(chain[i], chain[i + 1]) for i in range(n - 1)]
        if heavy == []:
            return Structure(TypeTag("A", n), chain=chain)
        if heavy == [4]:
            if seq[0] == 4 or seq[-1] == 4:
                if seq[-1] != 4:
                    chain.reverse()
                    seq.reverse()
                return Structure(TypeTag("C", n), chain=chain)
            if n == 4 and seq == [3, 4, 3]:
                return Structure(TypeTag("F4", 4), chain=chain)
            return None
        if heavy == [5] and (seq[0] == 5 or seq[-1] == 5):
            if seq[-1] != 5:
                chain.reverse()
            if n == 3:
                return Structure(TypeTag("G3", 3), chain=chain)
            if n == 4:
                return Structure(TypeTag("G4", 4), chain=chain)
        return None

    if heavy:
        return None
    arm_ends = [a for a in A if deg[a] == 1]
    if len(arm_ends) != 3:
        return None
    arms = []
    for e in arm_ends:
        walk = [e]
        prev = None
        cur = e
        while cur != branch:
            nxt = [h for h in diag.neighbors(cur, "c") if h in A and h != prev]
            prev, cur = cur, nxt[0]
            walk.append(cur)
        arms.append(list(reversed(walk[:-1])))  # from branch outward
    arms.sort(key=lambda arm: (len(arm), diag.index(arm[0])))
    lengths = [len(a) for a in arms]
    if lengths[0] == 1 and lengths[1] == 1:
        return Structure(TypeTag("B", n), branch=branch, arms=arms)
    if lengths[:2] == [1, 2] and lengths[2] in (2, 3, 4):
        fam = {2: "E6", 3: "E7", 4: "E8"}[lengths[2]]
        return Structure(TypeTag(fam, n), branch=branch, arms=arms)
    return None


def _path_order(diag, A, start):
    A = set(A)
    order = [start]
    prev = None
    cur = start
    while True:
        nxt = [h for h in diag.neighbors(cur, "c") if h in A and h != prev]
        if not nxt:
            return order
        prev, cur = cur, nxt[0]
        order.append(cur)


def classify_irreducible(diag, A):
    """TypeTag of the irreducible subset A, or None when infinite."""
    st = analyze_irreducible(diag, A)
    return st.tag if st is not None else None


def spherical_type(diag, A):
    """List of TypeTags of the C-view components of A, or None if any
    component is infinite.  Empty subset gives []."""
    tags = []
    for comp in diag.c_components(A):
        tag = classify_irreducible(diag, comp)
        if tag is None:
            return None
        tags.append(tag)
    return tags


def is_spherical(diag, A):
    return spherical_type(diag, A) is not None


def order_of(diag, A):
    """Order of the standard subgroup <A>, or None when infinite."""
    tags = spherical_type(diag, A)
    if tags is None:
        return None
    out = 1
    for t in tags:
        out *= t.order
    return out


def center_order_of(diag, A):
    tags = spherical_type(diag, A)
    if tags is None:
        raise DiagramError("center only computed for spherical subsets")
    out = 1
    for t in tags:
        out *= t.center_order
    return out


def longest_auto(diag, A):
    """The permutation s -> w_A s w_A of the spherical subset A, as a
    dict.  Componentwise: reversal for A_n, the split-end swap for B_n
    with n odd, the end swap for odd dihedral edges, the flip for E6,
    and the identity for everything else."""
    perm = {}
    for comp in diag.c_components(A):
        st = analyze_irreducible(diag, comp)
        if st is None:
            raise DiagramError("subset %r is not spherical" % (sorted(comp),))
        perm.update(_component_auto(diag, st))
    return perm


def _component_auto(diag, st):
    tag = st.tag
    names = st.chain if st.chain is not None else [st.branch] + sum(st.arms, [])
    ident = {x: x for x in names}
    if tag.family == "A" and tag.param >= 2:
        return {a: b for a, b in zip(st.chain, reversed(st.chain))}
    if tag.family == "D2" and tag.param % 2 == 1:
        a, b = st.chain
        return {a: b, b: a}
    if tag.family == "B" and tag.param % 2 == 1:
        p, q = st.arms[0][0], st.arms[1][0]
        out = dict(ident)
        out[p], out[q] = q, p
        return out
    if tag.family == "E6":
        # the two long arms swap, reading outward from the branch
        out = dict(ident)
        for x, y in zip(st.arms[1], st.arms[2]):
            out[x], out[y] = y, x
        return out
    return ident


def split_ends(diag, B, choice=None):
    """The distinguished commuting endpoint pair of a B_n base.

    For n >= 5 the pair is forced: the two short-arm tips.  For n = 4
    any two of the three tips work; `choice` may pick a pair, otherwise
    the two lex-least tips are used.  For n = 3 (= A_3) the pair is the
    two chain endpoints."""
    B = frozenset(B)
    st = analyze_irreducible(diag, B)
    if st is None:
        raise DiagramError("subset is not irreducible spherical")
    tag = st.tag
    if tag.family == "A" and tag.param == 3:
        ends = (st.chain[0], st.chain[-1])
        return tuple(sorted(ends, key=diag.index))
    if tag.family != "B":
        raise DiagramError("split ends only defined for the Y family (got %s)" % tag)
    tips = sorted((arm[-1] for arm in st.arms), key=diag.index)
    if tag.param == 4:
        if choice is not None:
            choice = tuple(sorted(frozenset(choice), key=diag.index))
            if len(choice) != 2 or not set(choice) <= set(tips):
                raise DiagramError("choice must be two of the tips %r" % (tips,))
            return choice
        return (tips[0], tips[1])
    if choice is not None:
        raise DiagramError("the endpoint pair is forced for rank != 4")
    return tuple(sorted((st.arms[0][-1], st.arms[1][-1]), key=diag.index))
