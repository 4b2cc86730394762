"""Separations of the presentation graph, diagram twisting, and the
visual graph-of-groups decomposition.

A separation (S1, S0, S2) splits S so that no finite label joins
S1 - S0 to S2 - S0; the group is then the amalgam of <S1> and <S2>
over <S0>.  Twisting replaces S2 by a conjugate d S2 d^-1 with
d <S0bar> d^-1 = S0, which changes the diagram but not the group; the
change is recorded as a Lineage.  From a c-minimal separating subset J
the flattened graph-of-groups has e-nodes the separating conjugates of
J and v-nodes the maximal subsets no e-node separates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conjugacy import NuPath, are_conjugate_visual, conjugacy_class, conjugate_into
from .diagram import INF, CoxeterDiagram, DiagramError
from .matching import Lineage, TwistStep, compose, identity_lineage
from .oracle import GeometricAction, longest_word, reduce_word


class TwistError(ValueError):
    """A separation or twist invariant failed."""


@dataclass(frozen=True)
class Separation:
    s1: frozenset
    s0: frozenset
    s2: frozenset

    def __post_init__(self):
        object.__setattr__(self, "s1", frozenset(self.s1))
        object.__setattr__(self, "s0", frozenset(self.s0))
        object.__setattr__(self, "s2", frozenset(self.s2))
        if self.s0 != self.s1 & self.s2:
            raise TwistError("S0 must be S1 and S2's intersection")
        if not self.s1 - self.s0 or not self.s2 - self.s0:
            raise TwistError("both sides of a separation must be nonempty")

    def validate(self, diag):
        if self.s1 | self.s2 != diag.generators():
            raise TwistError("S1 and S2 must cover the generators")
        for x in self.s1 - self.s0:
            for y in self.s2 - self.s0:
                if diag.m(x, y) is not INF:
                    raise TwistError(
                        "finite label m(%s,%s) crosses the separation" % (x, y)
                    )


def separates(diag, K, M=None):
    """Does removing K disconnect M (default: the rest of S) in the
    P-view graph?  True when M - K meets at least two components."""
    K = frozenset(K)
    rest = [g for g in diag.gens if g not in K]
    if not rest:
        return False
    comps = diag.p_components(rest)
    M = frozenset(M) if M is not None else frozenset(rest)
    hit = sum(1 for c in comps if c & (M - K))
    return hit >= 2


def find_separations(diag):
    """All separations up to the S1/S2 symmetry, by scanning candidate
    separators S0 and bipartitioning the components of the rest."""
    S = list(diag.gens)
    out = []
    for mask in range(1 << len(S)):
        s0 = frozenset(g for i, g in enumerate(S) if mask >> i & 1)
        rest = [g for g in S if g not in s0]
        if not rest:
            continue
        comps = diag.p_components(rest)
        if len(comps) < 2:
            continue
        first, others = comps[0], comps[1:]
        for pick in range(1 << len(others)):
            side1 = set(first)
            side2 = set()
            for i, comp in enumerate(others):
                (side1 if pick >> i & 1 else side2).update(comp)
            if not side2:
                continue
            out.append(Separation(frozenset(side1) | s0, s0, frozenset(side2) | s0))
    out.sort(key=lambda sep: (sorted(sep.s0), sorted(sep.s1), sorted(sep.s2)))
    return out


@dataclass
class TwistData:
    """Either an elementary twist (bullet set, d = longest word of
    <bullet>) or a generalized one (an S0bar conjugate of S0 inside
    <S2>, with the conjugator given as a NuPath or an explicit word)."""

    separation: Separation
    bullet: frozenset | None = None
    s0bar: frozenset | None = None
    path: NuPath | None = None
    d_word: tuple | None = None


def elementary_twist(diag, separation, bullet):
    """TwistData for conjugating S2 by the longest element of <bullet>;
    bullet must sit in S0, be spherical, and commute with the rest of
    S0 so that conjugation maps S0 onto itself."""
    bullet = frozenset(bullet)
    sep = separation
    if not bullet <= sep.s0:
        raise TwistError("bullet set must lie in S0")
    from .classify import is_spherical

    if not is_spherical(diag, bullet):
        raise TwistError("bullet set must be spherical")
    for s in bullet:
        for t in sep.s0 - bullet:
            if diag.m(s, t) != 2:
                raise TwistError(
                    "bullet generator %s does not commute with %s in S0" % (s, t)
                )
    return TwistData(sep, bullet=bullet)


def generalized_twist(diag, separation, s0bar, certificate):
    """TwistData for conjugating S2 by d with d S0bar d^-1 = S0, where
    the certificate is a NuPath (inside the induced S2 system) or an
    explicit word over S2."""
    s0bar = frozenset(s0bar)
    if not s0bar <= separation.s2:
        raise TwistError("S0bar must lie in S2")
    if isinstance(certificate, NuPath):
        return TwistData(separation, s0bar=s0bar, path=certificate)
    return TwistData(separation, s0bar=s0bar, d_word=tuple(certificate))


def apply_twist(diag, twist):
    """Rewrite the diagram across the separation and return the
    single-step Lineage.  The boundary bijection is recomputed from the
    conjugating word by reduction, which simultaneously checks the
    certificate."""
    sep = twist.separation
    sep.validate(diag)
    if twist.bullet is not None:
        twist = elementary_twist(diag, sep, twist.bullet)  # re-validate
        s0bar = sep.s0
        d_word = longest_word(diag, twist.bullet)
        bullet = twist.bullet
    else:
        s0bar = frozenset(twist.s0bar if twist.s0bar is not None else sep.s0)
        bullet = None
        if twist.d_word is not None:
            d_word = tuple(twist.d_word)
        elif twist.path is not None:
            sub = diag.induced(sep.s2)
            d_word = twist.path.word(sub)
        else:
            raise TwistError("generalized twist needs a word or NuPath certificate")
        if not set(d_word) <= sep.s2:
            raise TwistError("conjugating word must use letters of S2")
        if len(s0bar) != len(sep.s0):
            raise TwistError("S0bar and S0 must have equal size")
    action = GeometricAction(diag)
    beta = {}
    for sbar in sorted(s0bar):
        red = reduce_word(diag, d_word + (sbar,) + tuple(reversed(d_word)), action)
        if len(red) != 1 or red[0] not in sep.s0:
            raise TwistError(
                "conjugation sends %s to %s, not into S0" % (sbar, " ".join(red))
            )
        beta[sbar] = red[0]
    if set(beta.values()) != set(sep.s0):
        raise TwistError("conjugation does not map S0bar onto S0")

    taken = set(diag.gens)
    gen_map = {}
    for g in diag.gens:
        if g in s0bar:
            gen_map[g] = beta[g]
        elif g in sep.s2:
            if g in sep.s1:  # in S0 but not S0bar: both g and its twin survive
                fresh = g + "_t"
                k = 2
                while fresh in taken:
                    fresh = "%s_t%d" % (g, k)
                    k += 1
                taken.add(fresh)
                gen_map[g] = fresh
            else:
                gen_map[g] = g
        else:
            gen_map[g] = g

    new_from = {}  # child generator (rho image) -> source y in S2 - S0bar
    child_gens = []
    for g in diag.gens:
        if g in sep.s1:
            child_gens.append(g)
    for g in diag.gens:
        if g in sep.s2 and g not in s0bar:
            child_gens.append(gen_map[g])
            new_from[gen_map[g]] = g

    beta_inv = {v: k for k, v in beta.items()}
    labels = {}
    s1_list = [g for g in child_gens if g not in new_from]
    for i, x in enumerate(s1_list):
        for y in s1_list[i + 1 :]:
            m = diag.m(x, y)
            if m is not INF:
                labels[frozenset((x, y))] = m
    for yprime, y in new_from.items():
        for x in s1_list:
            if x in sep.s0:
                m = diag.m(beta_inv[x], y)
            else:
                m = INF
            if m is not INF:
                labels[frozenset((x, yprime))] = m
        for zprime, z in new_from.items():
            if zprime == yprime:
                continue
            m = diag.m(y, z)
            if m is not INF:
                labels.setdefault(frozenset((yprime, zprime)), m)
    child = CoxeterDiagram(child_gens, labels)

    rev = tuple(reversed(d_word))
    forward = {g: (g,) for g in s1_list}
    for yprime, y in new_from.items():
        forward[yprime] = d_word + (y,) + rev
    rho_d = tuple(gen_map[s] for s in d_word)
    rho_rev = tuple(reversed(rho_d))
    backward = {}
    for g in diag.gens:
        if g in sep.s1:
            backward[g] = (g,)
        else:
            backward[g] = rho_rev + (gen_map[g],) + rho_d
    step = TwistStep(
        diag, child, sep.s1, sep.s0, sep.s2, s0bar, d_word, gen_map, bullet
    )
    return Lineage(diag, child, forward, backward, [step])


# -- c-minimal classes and the decomposition ---------------------------


def separating_subsets(diag):
    S = list(diag.gens)
    out = []
    for mask in range(1 << len(S)):
        K = frozenset(g for i, g in enumerate(S) if mask >> i & 1)
        if len(K) < len(S) and separates(diag, K):
            out.append(K)
    return out


def c_minimal_classes(diag):
    """Visual-conjugacy classes of separating subsets that are minimal
    under conjugate containment, as (lex-least representative, sorted
    members) pairs."""
    seps = separating_subsets(diag)
    sep_set = set(seps)
    classes = []
    assigned = set()
    for J in sorted(seps, key=sorted):
        if J in assigned:
            continue
        cls = conjugacy_class(diag, J)
        members = sorted((K for K in cls if K in sep_set), key=sorted)
        assigned.update(members)
        classes.append((members[0], members))
    minimal = []
    for rep, members in classes:
        dominated = False
        for rep2, members2 in classes:
            if rep2 == rep:
                continue
            if conjugate_into(diag, rep2, rep) is not None and (
                len(rep2) < len(rep) or conjugate_into(diag, rep, rep2) is None
            ):
                dominated = True
                break
        if not dominated:
            minimal.append((rep, members))
    return minimal


@dataclass
class GraphOfGroups:
    v_nodes: list  # of frozenset
    e_nodes: list  # of frozenset
    incidence: list  # of (v index, e index)
    flattened: bool = True

    def incident_vs(self, ei):
        return [vi for vi, ej in self.incidence if ej == ei]


def build_lambda(diag, J):
    """Flattened graph-of-groups for the c-minimal separating class of
    J: e-nodes are the separating members of J's visual class, v-nodes
    the maximal subsets none of them separates."""
    J = frozenset(J)
    if not separates(diag, J):
        raise TwistError("J does not separate the presentation graph")
    if not any(
        J in members for _, members in c_minimal_classes(diag)
    ):
        raise TwistError("J is not c-minimal")
    cls = conjugacy_class(diag, J)
    e_nodes = sorted((K for K in cls if separates(diag, K)), key=sorted)
    S = list(diag.gens)
    v_nodes = []
    for mask in range(1 << len(S)):
        M = frozenset(g for i, g in enumerate(S) if mask >> i & 1)
        if not M:
            continue
        if any(separates(diag, K, M) for K in e_nodes):
            continue
        if any(
            not any(separates(diag, K, M | {g}) for K in e_nodes)
            for g in S
            if g not in M
        ):
            continue  # extendable, not maximal
        v_nodes.append(M)
    v_nodes.sort(key=sorted)
    incidence = [
        (vi, ei)
        for vi, v in enumerate(v_nodes)
        for ei, e in enumerate(e_nodes)
        if e <= v
    ]
    return GraphOfGroups(v_nodes, e_nodes, incidence)


def realize_tree(gog):
    """A reduced tree realization of the flattened form: for each
    e-node in order, chain its incident v-nodes in order, skipping
    edges that would close a cycle.  Returns (vi, vj, ei) triples."""
    n = len(gog.v_nodes)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for ei in range(len(gog.e_nodes)):
        vs = gog.incident_vs(ei)
        for a, b in zip(vs, vs[1:]):
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            parent[rb] = ra
            edges.append((a, b, ei))
    if n and len({find(v) for v in range(n)}) != 1:
        raise TwistError("flattened form does not realize a connected tree")
    return edges


def equalize_edge_groups(diag, gog):
    """Twist until the decomposition has a single edge class: walk a
    tree realization, find a vertex meeting two edge classes, conjugate
    the far side of the lex-least class's edge onto it, rebuild.
    Returns (Lineage, final GraphOfGroups)."""
    for i, e1 in enumerate(gog.e_nodes):
        for e2 in gog.e_nodes[i + 1 :]:
            if are_conjugate_visual(diag, e1, e2) is None:
                raise TwistError(
                    "edge classes %r and %r are not conjugate" % (sorted(e1), sorted(e2))
                )
    lin = identity_lineage(diag)
    cur_gog = gog
    rounds = len(gog.e_nodes)
    while len(cur_gog.e_nodes) > 1:
        if rounds <= 0:
            raise TwistError("edge-group equalization failed to converge")
        rounds -= 1
        cur = lin.child
        tree = realize_tree(cur_gog)
        pick = None
        for v in range(len(cur_gog.v_nodes)):
            incident = [(a, b, ei) for (a, b, ei) in tree if v in (a, b)]
            labels = sorted({ei for _, _, ei in incident})
            if len(labels) > 1:
                e1 = labels[0]
                t1 = next(t for t in incident if t[2] == e1)
                pick = (v, e1, labels[1], t1)
                break
        if pick is None:
            raise TwistError("distinct edge classes but no meeting vertex")
        v, e1, e2, t1 = pick
        far = _tree_side(tree, t1, away_from=v)
        s2_vs = [i for i in range(len(cur_gog.v_nodes)) if i not in far]
        s1 = frozenset().union(*(cur_gog.v_nodes[i] for i in far))
        s2 = frozenset().union(*(cur_gog.v_nodes[i] for i in s2_vs))
        s0 = cur_gog.e_nodes[e1]
        if s1 & s2 != s0:
            raise TwistError("tree sides do not intersect in the edge group")
        path = are_conjugate_visual(
            cur.induced(s2), cur_gog.e_nodes[e2], cur_gog.e_nodes[e1]
        )
        if path is None:
            raise TwistError("edge classes not conjugate inside one side")
        tw = generalized_twist(
            cur, Separation(s1, s0, s2), cur_gog.e_nodes[e2], path
        )
        lin = compose(lin, apply_twist(cur, tw))
        cur_gog = build_lambda(lin.child, s0)
    return lin, cur_gog


def _tree_side(tree, cut_edge, away_from):
    """Vertex indices of the component of tree - cut_edge not
    containing `away_from`."""
    a, b, _ = cut_edge
    start = b if away_from == a else a
    adj = {}
    for x, y, _ in tree:
        if (x, y) == (cut_edge[0], cut_edge[1]):
            continue
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if away_from in seen:
        raise TwistError("cut edge did not disconnect the tree")
    return seen
