"""Visual conjugacy of spherical subsets by elementary moves.

The move nu(s, A): for s outside A with K = irreducible component of
A + {s} containing s spherical, the element w_K w_{K-{s}} conjugates A
onto B = (A + {s}) - {t}, where t = w_K s w_K.  Searching over these
moves decides conjugacy of spherical subsets and finds every subset
visually conjugate to a given one.  The moves apply to arbitrary
subsets (only the component K must be spherical), which the
decomposition machinery relies on; completeness is claimed for
spherical subsets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .classify import is_spherical, longest_auto
from .oracle import GeometricAction, longest_word, reduce_word


@dataclass(frozen=True)
class NuMove:
    """One elementary conjugation step from `source` to `target`.

    The conjugating element is w_K w_{K - {s}} (leftmost letter applied
    last); `bijection` maps each a in source to its conjugate in target
    and is the identity off K."""

    source: frozenset
    target: frozenset
    s: str
    t: str
    K: frozenset
    bijection: tuple  # sorted tuple of (a, image) pairs

    def bijection_map(self):
        return dict(self.bijection)

    def word(self, diag, action=None):
        action = action or GeometricAction(diag)
        inner = longest_word(diag, self.K - {self.s}, action)
        outer = longest_word(diag, self.K, action)
        return reduce_word(diag, outer + inner, action)


def admissible_moves(diag, A):
    """All NuMoves out of the spherical subset A."""
    A = frozenset(A)
    moves = []
    for s in diag.gens:
        if s in A:
            continue
        comps = diag.c_components(A | {s})
        K = next(c for c in comps if s in c)
        if not is_spherical(diag, K):
            continue
        moves.append(_make_move(diag, A, s, K))
    return moves


def _make_move(diag, A, s, K):
    sigma_K = longest_auto(diag, K)
    sigma_inner = longest_auto(diag, K - {s})
    t = sigma_K[s]
    target = (A | {s}) - {t}
    bij = {}
    for a in sorted(A, key=diag.index):
        if a in K:
            bij[a] = sigma_K[sigma_inner[a]]
        else:
            bij[a] = a
    return NuMove(
        source=frozenset(A),
        target=frozenset(target),
        s=s,
        t=t,
        K=frozenset(K),
        bijection=tuple(sorted(bij.items())),
    )


@dataclass
class NuPath:
    """A chain of moves conjugating `start` onto `end`.  The total
    conjugator is the product of the move words, last move leftmost."""

    start: frozenset
    end: frozenset
    moves: list

    def word(self, diag, action=None):
        action = action or GeometricAction(diag)
        out = ()
        for mv in self.moves:
            out = mv.word(diag, action) + out
        return reduce_word(diag, out, action)

    def bijection_map(self):
        out = {a: a for a in self.start}
        for mv in self.moves:
            step = mv.bijection_map()
            out = {a: step[b] for a, b in out.items()}
        return out

    def __len__(self):
        return len(self.moves)


def conjugacy_class(diag, A):
    """Every subset visually conjugate to A, as {subset: NuPath}.
    Breadth-first over moves, so certificate paths are shortest."""
    A = frozenset(A)
    paths = {A: NuPath(A, A, [])}
    queue = deque([A])
    while queue:
        cur = queue.popleft()
        base = paths[cur]
        for mv in admissible_moves(diag, cur):
            if mv.target in paths:
                continue
            paths[mv.target] = NuPath(A, mv.target, base.moves + [mv])
            queue.append(mv.target)
    return paths


def are_conjugate_visual(diag, A, B):
    """NuPath from A to B, or None.  Complete for spherical subsets:
    subsets of generators are conjugate iff connected by these moves."""
    A, B = frozenset(A), frozenset(B)
    if len(A) != len(B):
        return None
    return conjugacy_class(diag, A).get(frozenset(B))


def conjugate_into(diag, A, B):
    """NuPath from A onto a subset of B, or None.  BFS stopping at the
    first class member contained in B."""
    A, B = frozenset(A), frozenset(B)
    paths = {A: NuPath(A, A, [])}
    queue = deque([A])
    while queue:
        cur = queue.popleft()
        if cur <= B:
            return paths[cur]
        for mv in admissible_moves(diag, cur):
            if mv.target in paths:
                continue
            paths[mv.target] = NuPath(A, mv.target, paths[cur].moves + [mv])
            queue.append(mv.target)
    return None


def min_conjugates(diag, A):
    """The lexicographically least member of the visual class of A (by
    sorted generator indices), with its certificate."""
    paths = conjugacy_class(diag, A)
    best = min(paths, key=lambda S: sorted(diag.index(g) for g in S))
    return best, paths[best]
