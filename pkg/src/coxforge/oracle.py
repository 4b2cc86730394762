"""Word-level computations: the standard bilinear form, descent tests,
word reduction by root tracking, coset enumeration, and a brute-force
subset-conjugacy search used as an independent check on the visual
(diagram-level) machinery.

Words are tuples/lists of generator names and act on row vectors on the
left, so a word (s1, s2, ..., sk) sends x to s1(s2(...sk(x)...)).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .diagram import INF, DiagramError

TOLERANCE = 1e-9
_EXACT_TOL = 1e-7  # for "is this vector a simple root" comparisons

DEFAULT_COSET_CAP = 10**6


class IndeterminateSignError(ArithmeticError):
    """A descent test landed within tolerance of zero."""


class CosetLimitError(RuntimeError):
    """Coset enumeration exceeded its cap (group presumed infinite or
    too large)."""


def bilinear_entry(diag, s, t):
    m = diag.m(s, t)
    if s == t:
        return 1.0
    if m is INF:
        return -1.0
    return -math.cos(math.pi / m)


def bilinear_matrix(diag, A=None):
    names = diag.sorted_subset(A if A is not None else diag.gens)
    return [[bilinear_entry(diag, s, t) for t in names] for s in names]


class GeometricAction:
    """Reflection action of the generators on R^n in the simple-root
    basis of the full diagram."""

    def __init__(self, diag):
        self.diag = diag
        self.names = list(diag.gens)
        self.idx = {g: i for i, g in enumerate(self.names)}
        n = len(self.names)
        # row i of _b: B(e_i, e_j) for all j
        self._b = bilinear_matrix(diag)

    def simple_root(self, s):
        v = [0.0] * len(self.names)
        v[self.idx[s]] = 1.0
        return v

    def reflect(self, s, x):
        """Image of x under the generator s (in place is avoided)."""
        i = self.idx[s]
        row = self._b[i]
        c = 2.0 * sum(row[j] * x[j] for j in range(len(x)))
        out = list(x)
        out[i] -= c
        return out

    def act_word(self, word, x):
        for s in reversed(word):
            x = self.reflect(s, x)
        return x

    def is_positive(self, x, tol=TOLERANCE):
        """Sign of the root x: positive roots have all coordinates >= 0.
        Decided by the largest-magnitude coordinate; raises when every
        coordinate is within tol of zero."""
        big = max(x, key=abs)
        if abs(big) <= tol:
            raise IndeterminateSignError("root coordinates all within %g of 0" % tol)
        return big > 0

    def is_simple(self, x, s):
        e = self.simple_root(s)
        return all(abs(a - b) < _EXACT_TOL for a, b in zip(x, e))


def is_descent(diag, word, s, action=None, tol=TOLERANCE):
    """True iff l(word . s) < l(word), i.e. word sends the simple root
    of s to a negative root."""
    action = action or GeometricAction(diag)
    x = action.act_word(word, action.simple_root(s))
    return not action.is_positive(x, tol)


def reduce_word(diag, word, action=None):
    """A reduced word for the same element, found by the exchange
    condition: append letters one at a time; when a letter is a descent
    of the prefix, locate and delete the crossed letter by walking the
    tracked root back through the prefix."""
    action = action or GeometricAction(diag)
    red = []
    for s in word:
        diag.index(s)
        e = action.simple_root(s)
        x = action.act_word(red, e)
        if action.is_positive(x):
            red.append(s)
            continue
        # find i with (red[i+1:] applied to e_s) equal to the simple
        # root of red[i]; deleting red[i] realizes the exchange
        x = list(e)
        for i in range(len(red) - 1, -1, -1):
            if action.is_simple(x, red[i]):
                del red[i]
                break
            x = action.reflect(red[i], x)
        else:  # pragma: no cover - would indicate numeric failure
            raise IndeterminateSignError("exchange letter not found for %r" % s)
    return tuple(red)


def word_length(diag, word, action=None):
    return len(reduce_word(diag, word, action))


def words_equal(diag, w1, w2, action=None):
    action = action or GeometricAction(diag)
    return reduce_word(diag, tuple(w1) + _inverse(w2), action) == ()


def _inverse(word):
    return tuple(reversed(word))


def longest_word(diag, A, action=None):
    """Reduced word for the longest element of the spherical subset A,
    grown greedily: append any non-descent letter of A until all of A
    are descents."""
    action = action or GeometricAction(diag)
    A = diag.sorted_subset(A)
    w = []
    while True:
        for s in A:
            x = action.act_word(w, action.simple_root(s))
            if action.is_positive(x):
                w.append(s)
                break
        else:
            return tuple(w)


# -- coset enumeration -------------------------------------------------


@dataclass
class CosetTable:
    """Closed coset table: table[g][c] is the coset c.g (right action).
    Generators are involutions, so each row is its own inverse."""

    gens: tuple
    table: list  # list over generator index -> list over cosets
    size: int = field(init=False)

    def __post_init__(self):
        self.size = len(self.table[0]) if self.table else 1
        self._gidx = {g: i for i, g in enumerate(self.gens)}

    def act(self, coset, g):
        return self.table[self._gidx[g]][coset]

    def act_word(self, coset, word):
        for g in word:
            coset = self.table[self._gidx[g]][coset]
        return coset

    def word_permutation(self, word):
        return [self.act_word(c, word) for c in range(self.size)]


def todd_coxeter(diag, A=None, subgroup=(), cap=DEFAULT_COSET_CAP):
    """Enumerate cosets of <subgroup words> in the standard subgroup
    <A>, HLT style: trace every relator at every live coset, fusing
    coincidences with union-find.  Raises CosetLimitError past `cap`
    created cosets."""
    names = diag.sorted_subset(A if A is not None else diag.gens)
    gidx = {g: i for i, g in enumerate(names)}
    ngen = len(names)
    rels = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            m = diag.m(a, b)
            if m is not INF:
                rels.append([gidx[a], gidx[b]] * m)
    sub_words = []
    for w in subgroup:
        sub_words.append([gidx[g] for g in w])

    parent = []  # union-find over created cosets
    nbr = []  # nbr[c][g] = coset or -1

    def new_coset():
        if len(parent) >= cap:
            raise CosetLimitError("coset cap %d exceeded" % cap)
        parent.append(len(parent))
        nbr.append([-1] * ngen)
        return len(parent) - 1

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def unify(c1, c2):
        queue = deque([(c1, c2)])
        while queue:
            a, b = queue.popleft()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            parent[b] = a
            for g in range(ngen):
                x, y = nbr[a][g], nbr[b][g]
                if x == -1:
                    nbr[a][g] = y
                elif y != -1:
                    queue.append((x, y))

    def trace_and_close(c, word):
        cur = find(c)
        for g in word:
            nxt = nbr[cur][g]
            if nxt == -1:
                nxt = new_coset()
                nbr[cur][g] = nxt
                nbr[nxt][g] = cur  # involution: g acts as its own inverse
            cur = find(nxt)
        unify(cur, c)

    start = new_coset()
    for w in sub_words:
        trace_and_close(start, w)
    scan = 0
    while scan < len(parent):
        if find(scan) == scan:
            for g in range(ngen):
                trace_and_close(scan, [g, g])
            for rel in rels:
                trace_and_close(scan, rel)
        scan += 1

    live = [c for c in range(len(parent)) if find(c) == c]
    renum = {c: i for i, c in enumerate(live)}
    table = [[0] * len(live) for _ in range(ngen)]
    for c in live:
        for g in range(ngen):
            d = nbr[c][g]
            if d == -1:  # pragma: no cover - table is closed after HLT
                raise RuntimeError("incomplete coset table")
            table[g][renum[c]] = renum[find(d)]
    return CosetTable(tuple(names), table)


def group_order(diag, A=None, cap=DEFAULT_COSET_CAP):
    """|<A>| by coset enumeration over the trivial subgroup."""
    return todd_coxeter(diag, A, (), cap).size


def element_order(diag, word, A=None, cap=DEFAULT_COSET_CAP):
    """Order of the element given by `word` inside <A> (defaults to the
    whole group), via its permutation of the cosets of the regular
    representation."""
    table = todd_coxeter(diag, A, (), cap)
    perm = table.word_permutation(tuple(word))
    seen = [False] * table.size
    out = 1
    for c in range(table.size):
        if seen[c]:
            continue
        length = 0
        x = c
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        out = out * length // math.gcd(out, length)
    return out


# -- regular representation and brute-force conjugacy -------------------


class RegularRep:
    """The full multiplication structure of a finite standard subgroup:
    cosets of the trivial subgroup are the elements.  Provides shortest
    words, left multiplication, and conjugation by generators, each as
    arrays over element indices."""

    def __init__(self, diag, A=None, cap=10**5):
        self.diag = diag
        self.table = todd_coxeter(diag, A, (), cap)
        self.gens = self.table.gens
        n = self.table.size
        self.word = [None] * n
        self.word[0] = ()
        self.parent_edge = [None] * n
        order = [0]
        for e in order:
            for g in self.gens:
                f = self.table.act(e, g)
                if self.word[f] is None:
                    self.word[f] = self.word[e] + (g,)
                    self.parent_edge[f] = (e, g)
                    order.append(f)
        self.bfs_order = order
        # left multiplication by each generator, then conjugation
        self.left = {}
        for g in self.gens:
            lg = [0] * n
            lg[0] = self.table.act(0, g)
            for e in order[1:]:
                pe, s = self.parent_edge[e]
                lg[e] = self.table.act(lg[pe], s)
            self.left[g] = lg
        self.conj = {
            g: [self.table.act(self.left[g][e], g) for e in range(n)] for g in self.gens
        }

    @property
    def size(self):
        return self.table.size

    def element_of(self, word):
        return self.table.act_word(0, tuple(word))

    def conj_by_word(self, word, e):
        """Index of w e w^{-1} for w given as a word."""
        for g in reversed(tuple(word)):
            e = self.conj[g][e]
        return e

    def subset_orbit(self, A):
        """Orbit of the generator subset A under conjugation, as a dict
        {frozenset of element indices: conjugating word} with words
        reduced-ish (built letter by letter, leftmost letter applied
        last)."""
        start = frozenset(self.element_of((a,)) for a in A)
        orbit = {start: ()}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            w = orbit[cur]
            for g in self.gens:
                img = frozenset(self.conj[g][e] for e in cur)
                if img not in orbit:
                    orbit[img] = (g,) + w
                    queue.append(img)
        return orbit


def brute_conjugate_subsets(diag, A, B, cap=10**5):
    """Word w with w A w^{-1} = B as sets of generators (reflections),
    or None.  Requires the whole diagram to be spherical with order at
    most `cap`; this is the independent oracle the visual move search is
    tested against."""
    rep = RegularRep(diag, None, cap)
    orbit = rep.subset_orbit(frozenset(A))
    target = frozenset(rep.element_of((b,)) for b in frozenset(B))
    return orbit.get(target)
