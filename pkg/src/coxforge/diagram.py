"""Coxeter diagrams and the two graph views used throughout.

A diagram is a finite generating set together with a symmetric label
m(s,t) in {2,3,...} or infinity for every pair of distinct generators.
Two derived graphs matter:

  C-view ("Coxeter"): edge s-t whenever m(s,t) > 2.  Connected
    components are the irreducible direct factors.
  P-view ("presentation"): edge s-t whenever m(s,t) < infinity.
    Connected components are the free-product factors.

Infinity is represented by the float inf and serialized as "inf".
"""

from __future__ import annotations

import math
from collections import deque

INF = math.inf

Subset = frozenset  # frozenset[str], alias used in signatures for intent


class DiagramError(ValueError):
    """Malformed diagram text or an operation applied to a bad subset."""


class CoxeterDiagram:
    """Immutable labeled complete graph on named generators.

    Generator order is the order of first mention; it is remembered so
    that output (serialization, dot, censuses) is reproducible, but it
    never affects the group.
    """

    __slots__ = ("gens", "_index", "_labels")

    def __init__(self, gens, labels):
        """gens: iterable of names; labels: {frozenset({a,b}): m} for the
        pairs with m != infinity (missing pairs default to infinity)."""
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise DiagramError("duplicate generator names")
        for g in gens:
            if not g or any(ch.isspace() for ch in g) or g == "#":
                raise DiagramError("bad generator name: %r" % (g,))
        index = {g: i for i, g in enumerate(gens)}
        clean = {}
        for pair, m in labels.items():
            pair = frozenset(pair)
            if len(pair) != 2 or not pair <= set(gens):
                raise DiagramError("bad edge %r" % (sorted(pair),))
            if m is INF:
                continue
            if not (isinstance(m, int) and m >= 2):
                raise DiagramError("label must be an integer >= 2 or inf, got %r" % (m,))
            clean[pair] = m
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_labels", clean)

    def __setattr__(self, name, value):
        raise AttributeError("CoxeterDiagram is immutable")

    # -- basic queries ------------------------------------------------

    @property
    def rank(self):
        return len(self.gens)

    def generators(self):
        return frozenset(self.gens)

    def index(self, g):
        try:
            return self._index[g]
        except KeyError:
            raise DiagramError("unknown generator %r" % (g,)) from None

    def m(self, s, t):
        if s not in self._index or t not in self._index:
            raise DiagramError("unknown generator in pair (%r, %r)" % (s, t))
        if s == t:
            return 1
        return self._labels.get(frozenset((s, t)), INF)

    def sorted_subset(self, A):
        """Subset as a list in generator order (validates membership)."""
        A = frozenset(A)
        for g in A:
            self.index(g)
        return sorted(A, key=self._index.__getitem__)

    def __eq__(self, other):
        if not isinstance(other, CoxeterDiagram):
            return NotImplemented
        return self.gens == other.gens and self._labels == other._labels

    def __hash__(self):
        return hash((self.gens, frozenset(self._labels.items())))

    def __repr__(self):
        return "CoxeterDiagram(%r)" % (self.to_text(),)

    # -- derived graphs -----------------------------------------------

    def neighbors(self, g, view="c"):
        """Generators adjacent to g in the chosen view ('c' or 'p')."""
        out = []
        for h in self.gens:
            if h == g:
                continue
            m = self.m(g, h)
            if (view == "c" and m > 2) or (view == "p" and m < INF):
                out.append(h)
        return out

    def components(self, A=None, view="c"):
        """Connected components of the induced subgraph, as frozensets,
        ordered by least generator index."""
        if view not in ("c", "p"):
            raise DiagramError("view must be 'c' or 'p'")
        A = self.sorted_subset(A if A is not None else self.gens)
        seen = set()
        comps = []
        for start in A:
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                g = queue.popleft()
                for h in A:
                    if h in comp:
                        continue
                    m = self.m(g, h)
                    if (view == "c" and m > 2) or (view == "p" and m < INF):
                        comp.add(h)
                        queue.append(h)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def c_components(self, A=None):
        return self.components(A, view="c")

    def p_components(self, A=None):
        return self.components(A, view="p")

    def is_complete(self, A):
        """True when every pair in A carries a finite label."""
        A = self.sorted_subset(A)
        return all(self.m(a, b) < INF for i, a in enumerate(A) for b in A[i + 1 :])

    def induced(self, A):
        """Diagram on the subset A, keeping relative generator order."""
        A = self.sorted_subset(A)
        labels = {}
        for i, a in enumerate(A):
            for b in A[i + 1 :]:
                m = self.m(a, b)
                if m < INF:
                    labels[frozenset((a, b))] = m
        return CoxeterDiagram(A, labels)

    def replace_labels(self, new_labels):
        """Same generators, new label map (used by twisting)."""
        return CoxeterDiagram(self.gens, new_labels)

    # -- serialization ------------------------------------------------

    def to_text(self):
        lines = ["gens " + " ".join(self.gens)]
        gs = self.gens
        for i, a in enumerate(gs):
            for b in gs[i + 1 :]:
                m = self.m(a, b)
                if m < INF:
                    lines.append("edge %s %s %d" % (a, b, m))
        return "\n".join(lines) + "\n"

    def emit_dot(self, view="c"):
        """Graphviz source for the chosen view.  Labels > 3 (C-view) or
        finite labels != 2 (P-view) are printed on the edge."""
        lines = ["graph coxeter {"]
        for g in self.gens:
            lines.append('  "%s";' % g)
        gs = self.gens
        for i, a in enumerate(gs):
            for b in gs[i + 1 :]:
                m = self.m(a, b)
                if view == "c" and m > 2:
                    attr = "" if m == 3 else ' [label="%s"]' % ("inf" if m is INF else m)
                    lines.append('  "%s" -- "%s"%s;' % (a, b, attr))
                elif view == "p" and m < INF:
                    attr = "" if m == 2 else ' [label="%d"]' % m
                    lines.append('  "%s" -- "%s"%s;' % (a, b, attr))
        lines.append("}")
        return "\n".join(lines) + "\n"


def parse_diagram(text):
    """Parse the plain-text diagram format.

    Lines: 'gens a b c ...' (required, first non-comment line),
    'edge a b m' with m an integer >= 2 or 'inf', and optionally
    'default m' giving the label for unlisted pairs (absent default
    means unlisted pairs are infinity).  '#' starts a comment.
    """
    gens = None
    edges = {}
    default = INF
    have_default = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "gens":
            if gens is not None:
                raise DiagramError("line %d: duplicate gens line" % lineno)
            if len(parts) < 2:
                raise DiagramError("line %d: gens line needs at least one name" % lineno)
            gens = parts[1:]
        elif parts[0] == "edge":
            if gens is None:
                raise DiagramError("line %d: edge before gens" % lineno)
            if len(parts) != 4:
                raise DiagramError("line %d: edge needs two names and a label" % lineno)
            a, b, lab = parts[1], parts[2], parts[3]
            if a == b:
                raise DiagramError("line %d: edge endpoints must differ" % lineno)
            if a not in gens or b not in gens:
                raise DiagramError("line %d: unknown generator in edge" % lineno)
            key = frozenset((a, b))
            if key in edges:
                raise DiagramError("line %d: duplicate edge %s %s" % (lineno, a, b))
            edges[key] = _parse_label(lab, lineno)
        elif parts[0] == "default":
            if len(parts) != 2:
                raise DiagramError("line %d: default takes one label" % lineno)
            if have_default:
                raise DiagramError("line %d: duplicate default line" % lineno)
            default = _parse_label(parts[1], lineno)
            have_default = True
        else:
            raise DiagramError("line %d: unknown directive %r" % (lineno, parts[0]))
    if gens is None:
        raise DiagramError("missing gens line")
    labels = dict(edges)
    if default < INF:
        for i, a in enumerate(gens):
            for b in gens[i + 1 :]:
                labels.setdefault(frozenset((a, b)), default)
    return CoxeterDiagram(gens, labels)


def _parse_label(token, lineno):
    if token == "inf":
        return INF
    try:
        m = int(token)
    except ValueError:
        raise DiagramError("line %d: bad label %r" % (lineno, token)) from None
    if m < 2:
        raise DiagramError("line %d: label must be >= 2" % lineno)
    return m


# -- canonical form ---------------------------------------------------

CANONICAL_RANK_CAP = 12


def _label_code(m):
    # total order on labels with infinity first; never collides with the
    # finite labels, which are all >= 2
    return 0 if m is INF else m


def _wl_colors(diag, names):
    """Iterated refinement of vertex colors by labeled neighborhoods.
    Returns {name: color_rank} where ranks are ordered by a
    permutation-invariant key, so equal diagrams get equal rank maps."""
    color = {
        v: (tuple(sorted(_label_code(diag.m(v, u)) for u in names if u != v)),)
        for v in names
    }
    while True:
        new = {}
        for v in names:
            around = sorted((color[u], _label_code(diag.m(v, u))) for u in names if u != v)
            new[v] = (color[v], tuple(around))
        if len(set(new.values())) == len(set(color.values())):
            break
        color = new
    ranks = {key: i for i, key in enumerate(sorted(set(color.values())))}
    return {v: ranks[color[v]] for v in names}


def canonical_form(diag, A=None):
    """Canonical byte string: equal iff the induced diagrams are
    isomorphic as labeled graphs.  Backtracking search over vertex
    orders, restricted to refinement color classes, with prefix pruning
    and per-step signature deduplication so the label-homogeneous cases
    (complete graphs, stars) stay cheap.  Capped at rank 12."""
    sub = diag.induced(A) if A is not None else diag
    names = list(sub.gens)
    n = len(names)
    if n > CANONICAL_RANK_CAP:
        raise DiagramError(
            "canonical form capped at rank %d (got %d)" % (CANONICAL_RANK_CAP, n)
        )
    if n == 0:
        return b"0|"
    color = _wl_colors(sub, names)
    classes = {}
    for v in names:
        classes.setdefault(color[v], []).append(v)
    class_order = sorted(classes)
    spectrum = tuple(len(classes[c]) for c in class_order)

    best = [None]

    def rec(placed, placed_set, enc):
        if len(placed) == n:
            enc = tuple(enc)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        for c in class_order:
            pool = [v for v in classes[c] if v not in placed_set]
            if pool:
                break
        seen = set()
        for v in pool:
            sig = tuple(_label_code(sub.m(v, u)) for u in placed)
            if sig in seen:
                continue
            seen.add(sig)
            cand = enc + list(sig)
            if best[0] is not None:
                prefix = best[0][: len(cand)]
                if tuple(cand) > prefix:
                    continue
            placed_set.add(v)
            rec(placed + [v], placed_set, cand)
            placed_set.remove(v)

    rec([], set(), [])
    body = ",".join(map(str, best[0]))
    head = "%d|%s|" % (n, ",".join(map(str, spectrum)))
    return (head + body).encode("ascii")
