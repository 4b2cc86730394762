"""Bases, blow-ups, and the bookkeeping that relates a rewritten
generating set back to its parent.

A *base* is a noncyclic maximal irreducible spherical subset.  Two base
shapes admit a rank-raising rewrite ("blow-up"):

  C_{2q+1}: remove the label-4 end a, add d = aba and the central
            element z = a * (longest word of the new base);
  D_2(4q+2): remove a qualifying end a of the heavy edge, add c = aba
            (named <a>_d here) and z as above.

Each rewrite halves the order of the matched base and adds a commuting
A_1 factor, so iterating strictly decreases the total base order and
terminates in a maximum-rank generating set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .classify import analyze_irreducible, is_spherical, order_of, spherical_type
from .classify import split_ends as _split_ends
from .diagram import INF, CoxeterDiagram, DiagramError
from .oracle import (
    CosetLimitError,
    GeometricAction,
    element_order,
    group_order,
    longest_word,
    reduce_word,
    todd_coxeter,
)


class MatchingError(ValueError):
    """A matching/blow-up precondition failed; the message names the
    hypothesis that broke."""


@dataclass(frozen=True)
class Base:
    subset: frozenset
    tag: object  # TypeTag

    def sort_key(self, diag):
        return tuple(sorted(self.subset))


def find_bases(diag):
    """All bases: irreducible spherical subsets of rank >= 2 admitting
    no single-generator spherical irreducible extension (sound, since
    any larger irreducible spherical superset contains one)."""
    out = []
    seen = set()
    for comp in diag.c_components():
        for sub in _irreducible_spherical_subsets(diag, comp):
            if len(sub) < 2 or sub in seen:
                continue
            if _has_spherical_extension(diag, sub):
                continue
            seen.add(sub)
            tags = spherical_type(diag, sub)
            out.append(Base(sub, tags[0]))
    out.sort(key=lambda b: tuple(sorted(b.subset)))
    return out


def _irreducible_spherical_subsets(diag, comp):
    """All connected (C-view) spherical subsets of one component, grown
    vertex by vertex."""
    comp = sorted(comp)
    found = set()
    frontier = [frozenset([g]) for g in comp]
    found.update(frontier)
    while frontier:
        nxt = []
        for sub in frontier:
            for g in comp:
                if g in sub:
                    continue
                if not any(diag.m(g, h) > 2 for h in sub):
                    continue
                ext = sub | {g}
                if ext in found:
                    continue
                if spherical_type(diag, ext) is None:
                    continue
                found.add(ext)
                nxt.append(ext)
        frontier = nxt
    return found


def _has_spherical_extension(diag, sub):
    for g in diag.gens:
        if g in sub:
            continue
        if not any(diag.m(g, h) > 2 for h in sub):
            continue
        if spherical_type(diag, sub | {g}) is not None:
            return True
    return False


def find_max_spherical_simplices(diag):
    """Maximal spherical cliques of the P-view graph, as frozensets."""
    from .census import iter_cliques  # local import; census has no deps on us

    cliques = [c for c in iter_cliques(diag) if is_spherical(diag, c)]
    out = []
    for c in cliques:
        maximal = True
        for g in diag.gens:
            if g in c:
                continue
            ext = c | {g}
            if diag.is_complete(ext) and is_spherical(diag, ext):
                maximal = False
                break
        if maximal:
            out.append(c)
    out.sort(key=lambda c: tuple(sorted(c)))
    return out


# -- blow-up plans ------------------------------------------------------


@dataclass(frozen=True)
class BlowupPlan:
    base: Base
    kind: str  # "C" or "D"
    a: str  # removed generator
    b: str  # its heavy-edge partner
    chain: tuple  # base generators in chain order, a last


def can_blow_up(diag, base):
    """BlowupPlan for the base, or None.  C_{2q+1}: a is the label-4
    end; condition: every s outside the base with m(s,a) finite
    commutes with all of the base.  D_2(4q+2): a is an end all of whose
    finite-linked outside neighbors commute with both ends; both ends
    are tried, lexicographically smaller first."""
    if not isinstance(base, Base):
        raise MatchingError("expected a Base from find_bases")
    tag = base.tag
    B = base.subset
    outside = [s for s in diag.gens if s not in B]
    if tag.family == "C" and tag.param >= 3 and tag.param % 2 == 1:
        st = analyze_irreducible(diag, B)
        chain = tuple(st.chain)  # oriented with the label-4 edge last
        a, b = chain[-1], chain[-2]
        for s in outside:
            if diag.m(s, a) is not INF and any(diag.m(s, t) != 2 for t in B):
                return None
        return BlowupPlan(base, "C", a, b, chain)
    if tag.family == "D2" and tag.param % 4 == 2 and tag.param >= 6:
        for a in sorted(B):
            b = next(t for t in B if t != a)
            if _d_end_qualifies(diag, B, a, b):
                return BlowupPlan(base, "D", a, b, (b, a))
        return None
    return None


def _d_end_qualifies(diag, B, a, b):
    for s in diag.gens:
        if s in B:
            continue
        if diag.m(s, a) is not INF and (diag.m(s, a) != 2 or diag.m(s, b) != 2):
            return False
    return True


# -- lineages -----------------------------------------------------------


@dataclass
class BlowupStep:
    parent: CoxeterDiagram
    child: CoxeterDiagram
    base: frozenset
    kind: str
    a: str
    b: str
    d: str
    z: str
    chain: tuple  # parent chain, a last
    new_base: frozenset
    ell: tuple  # longest word of <new_base>, child letters

    @property
    def child_chain(self):
        """The matched base in chain order on the child side: the old
        chain with a replaced by d (C case), or (b, d) (D case)."""
        return self.chain[:-1] + (self.d,)


@dataclass
class TwistStep:
    parent: CoxeterDiagram
    child: CoxeterDiagram
    s1: frozenset
    s0: frozenset
    s2: frozenset
    s0bar: frozenset
    d_word: tuple  # parent letters within s2
    gen_map: dict  # parent gen -> child gen (identity on s1; rho on s2)
    bullet: frozenset | None = None  # set for elementary twists


@dataclass
class Lineage:
    parent: CoxeterDiagram
    child: CoxeterDiagram
    forward: dict  # child gen -> word over parent gens
    backward: dict  # parent gen -> word over child gens
    steps: list


def identity_lineage(diag):
    fw = {g: (g,) for g in diag.gens}
    return Lineage(diag, diag, dict(fw), dict(fw), [])


def expand_word(word, mapping):
    out = []
    for g in word:
        out.extend(mapping[g])
    return tuple(out)


def compose(first, second):
    """Lineage from first.parent to second.child."""
    if first.child != second.parent:
        raise MatchingError("lineages do not chain: child != parent")
    forward = {g: expand_word(w, first.forward) for g, w in second.forward.items()}
    backward = {g: expand_word(w, second.backward) for g, w in first.backward.items()}
    return Lineage(first.parent, second.child, forward, backward, first.steps + second.steps)


def _fresh_name(taken, stem):
    name = stem
    k = 2
    while name in taken:
        name = "%s%d" % (stem, k)
        k += 1
    return name


def blow_up(diag, plan):
    """Apply one blow-up, returning the single-step Lineage."""
    B = plan.base.subset
    a, b = plan.a, plan.b
    taken = set(diag.gens)
    d = _fresh_name(taken, a + "_d")
    taken.add(d)
    z = _fresh_name(taken, a + "_z")
    keep = [g for g in diag.gens if g != a]
    new_gens = keep + [d, z]
    labels = {}
    for i, x in enumerate(keep):
        for y in keep[i + 1 :]:
            m = diag.m(x, y)
            if m is not INF:
                labels[frozenset((x, y))] = m
    new_base = (B - {a}) | {d}
    if plan.kind == "C":
        second = plan.chain[-3]  # neighbor of the chain just below b
        labels[frozenset((d, second))] = 3
        for t in B - {a, second}:
            labels[frozenset((d, t))] = 2
    else:
        labels[frozenset((d, b))] = plan.base.tag.param // 2
    for t in new_base - {d}:
        labels.setdefault(frozenset((z, t)), 2)
    labels[frozenset((z, d))] = 2
    for s in diag.gens:
        if s in B:
            continue
        if diag.m(s, a) is not INF:
            labels[frozenset((s, d))] = 2
            labels[frozenset((s, z))] = 2
    child = CoxeterDiagram(new_gens, labels)
    ell = longest_word(child, new_base)
    fw_d = (a, b, a)
    forward = {g: (g,) for g in keep}
    forward[d] = fw_d
    forward[z] = (a,) + expand_word(ell, {**{g: (g,) for g in keep}, d: fw_d})
    backward = {g: (g,) for g in keep}
    backward[a] = (z,) + ell
    step = BlowupStep(diag, child, B, plan.kind, a, b, d, z, plan.chain, new_base, ell)
    return Lineage(diag, child, forward, backward, [step])


def max_rank(diag, prefer_last=False):
    """Blow up repeatedly (lexicographically least eligible base, or
    greatest with prefer_last=True) until no base admits a plan.  The
    total base order strictly decreases each step."""
    lin = identity_lineage(diag)
    while True:
        cur = lin.child
        plans = [p for p in map(lambda b: can_blow_up(cur, b), find_bases(cur)) if p]
        if not plans:
            break
        plans.sort(key=lambda p: tuple(sorted(p.base.subset)))
        plan = plans[-1] if prefer_last else plans[0]
        before = _base_potential(cur)
        step = blow_up(cur, plan)
        after = _base_potential(step.child)
        if after >= before:
            raise MatchingError(
                "base-order potential did not decrease (%d -> %d)" % (before, after)
            )
        lin = compose(lin, step)
    for base in find_bases(lin.child):
        if can_blow_up(lin.child, base) is not None:  # pragma: no cover
            raise MatchingError("fixpoint violated: %r still blowable" % sorted(base.subset))
    return lin


def _base_potential(diag):
    return sum(order_of(diag, b.subset) for b in find_bases(diag))


# -- matching across a lineage ------------------------------------------


@dataclass
class MatchCertificate:
    parent_base: Base
    child_base: Base
    relation: str  # "isomorphic" | "C-to-B" | "D2-halving"
    conjugator: tuple  # word over parent generators
    name_map: dict  # parent base generator -> child generator
    parent_chain: tuple | None = None  # chain data when relation != isomorphic
    child_chain: tuple | None = None


def match_bases(lineage):
    """MatchCertificates carrying each parent base through every step:
    blown-up bases map to their half-order replacements, twisted bases
    are conjugated by the twist word, everything else persists."""
    certs = []
    for base in find_bases(lineage.parent):
        subset = base.subset
        relation = "isomorphic"
        name_map = {g: g for g in subset}
        conj = ()
        parent_chain = child_chain = None
        for i, step in enumerate(lineage.steps):
            if isinstance(step, BlowupStep):
                if subset == step.base:
                    relation = "C-to-B" if step.kind == "C" else "D2-halving"
                    parent_chain = tuple(name_map_inverse(name_map, g) for g in step.chain)
                    child_chain = step.child_chain
                    name_map = {
                        name_map_inverse(name_map, g): h
                        for g, h in zip(step.chain, step.child_chain)
                    }
                    subset = step.new_base
                else:
                    if step.a in subset:  # pragma: no cover - excluded by theory
                        raise MatchingError("foreign lineage: base overlaps removed end")
            else:  # TwistStep
                if subset <= step.s1:
                    continue
                if not subset <= step.s2:  # pragma: no cover - excluded by theory
                    raise MatchingError("base straddles a separation")
                subset = frozenset(step.gen_map[g] for g in subset)
                name_map = {g: step.gen_map[h] for g, h in name_map.items()}
                if child_chain is not None:
                    child_chain = tuple(step.gen_map[g] for g in child_chain)
                prefix_fw = _prefix_forward(lineage, i)
                conj = expand_word(step.d_word, prefix_fw) + conj
        tags = spherical_type(lineage.child, subset)
        certs.append(
            MatchCertificate(
                base, Base(subset, tags[0]), relation, conj, name_map,
                parent_chain, child_chain,
            )
        )
    return certs


def name_map_inverse(name_map, child_gen):
    for g, h in name_map.items():
        if h == child_gen:
            return g
    raise MatchingError("foreign lineage: unmapped generator %r" % child_gen)


def _prefix_forward(lineage, i):
    """forward map of the sub-lineage consisting of steps[:i], i.e.
    words over the original parent for the generators of steps[i]'s
    parent diagram."""
    lin = identity_lineage(lineage.parent)
    for step in lineage.steps[:i]:
        fw = _step_forward(step)
        lin_fw = {g: expand_word(w, lin.forward) for g, w in fw.items()}
        lin = Lineage(lineage.parent, step.child, lin_fw, {}, [])
    return lin.forward


def _step_forward(step):
    if isinstance(step, BlowupStep):
        keep = {g: (g,) for g in step.parent.gens if g != step.a}
        fw = dict(keep)
        fw[step.d] = (step.a, step.b, step.a)
        fw[step.z] = (step.a,) + expand_word(step.ell, {**keep, step.d: fw[step.d]})
        return fw
    # child generators: s1 names map to themselves; rho(y) maps to d y d^-1
    dw = step.d_word
    fw = {g: (g,) for g in step.s1}
    for y in step.s2 - step.s0bar:
        fw[step.gen_map[y]] = dw + (y,) + tuple(reversed(dw))
    return fw


@dataclass
class SubbaseMatch:
    subset: frozenset
    flag: str  # "same-type" | "B-to-C-swap" | "xy"


def match_subbase(lineage, certificate, A):
    """Carry an irreducible noncyclic subbase A of the certificate's
    parent base to the child side.

    Isomorphic relation: name translation, except type A_5 bases are
    refused (their extra outer automorphism defeats the recipe).
    C-to-B relation: chain segments not containing the removed end map
    by name; segments containing it swap type C_k -> position at the d
    end, except C_2, which maps onto the commuting split-end pair and
    is flagged "xy" (the pair generates the image of <xy> = the
    rotation subgroup of the old C_2)."""
    A = frozenset(A)
    B = certificate.parent_base.subset
    if not A <= B:
        raise MatchingError("subbase must sit inside the certificate's parent base")
    if len(A) < 2:
        raise MatchingError("subbase must be noncyclic (rank >= 2)")
    diag = lineage.parent
    if len(diag.c_components(A)) != 1:
        raise MatchingError("subbase must be irreducible")
    if certificate.relation == "isomorphic":
        tag = certificate.parent_base.tag
        if tag.family == "A" and tag.param == 5:
            raise MatchingError(
                "A_5 base refused: its nontrivial outer automorphism makes the "
                "matched subbase non-canonical"
            )
        return SubbaseMatch(frozenset(certificate.name_map[g] for g in A), "same-type")
    if certificate.relation == "D2-halving":
        if A != B:
            raise MatchingError("a dihedral base has no proper noncyclic subbase")
        return SubbaseMatch(certificate.child_base.subset, "same-type")
    # C-to-B
    chain = certificate.parent_chain  # a is chain[-1]
    a = chain[-1]
    if a not in A:
        return SubbaseMatch(frozenset(certificate.name_map[g] for g in A), "same-type")
    k = len(A)
    pos = {g: i for i, g in enumerate(chain)}
    span = sorted(pos[g] for g in A)
    if span != list(range(len(chain) - k, len(chain))):  # pragma: no cover
        raise MatchingError("subbase is not a chain segment")
    cchain = certificate.child_chain
    if k == 2:
        # the removed C_2 survives only as the index-2 rotation subgroup,
        # generated up to conjugacy by the product of the split ends
        ends = _split_ends(lineage.child, certificate.child_base.subset)
        return SubbaseMatch(frozenset(ends), "xy")
    return SubbaseMatch(frozenset(cchain[len(cchain) - k :]), "B-to-C-swap")


def match_edge(lineage, E):
    """Carry an edge E with parent label >= 4 through the lineage.
    Returns (pair, flag): flag "edge" when the image is a genuine edge
    with the same label, "halved" when E was a blown-up dihedral base
    (image = the new base edge with half the label), "xy" when E was a
    blown-up label-4 chain end (image = the commuting split-end pair)."""
    E = frozenset(E)
    if len(E) != 2:
        raise MatchingError("edge must be a pair")
    m = lineage.parent.m(*sorted(E))
    if m is INF or m < 4:
        raise MatchingError("matched edges need a finite label >= 4")
    pair = E
    flag = "edge"
    for step in lineage.steps:
        if isinstance(step, BlowupStep):
            if step.kind == "C" and pair == {step.a, step.b}:
                ends = _split_ends(step.child, step.new_base)
                pair = frozenset(ends)
                flag = "xy"
            elif step.kind == "D" and pair == step.base:
                pair = step.new_base
                flag = "halved"
            elif step.a in pair:  # pragma: no cover - excluded by hypotheses
                raise MatchingError("edge lost a generator to a blow-up")
        else:
            if pair <= step.s1:
                continue
            if not pair <= step.s2:  # pragma: no cover
                raise MatchingError("edge straddles a separation")
            pair = frozenset(step.gen_map[g] for g in pair)
    return pair, flag


# -- verification --------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class LineageReport:
    checks: list

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]


def _order_via_reduce(diag, word, max_order, action):
    """Order of the element if <= max_order, else None, by repeated
    reduced multiplication."""
    r = reduce_word(diag, word, action)
    if r == ():
        return 1
    acc = r
    for k in range(2, max_order + 1):
        acc = reduce_word(diag, acc + r, action)
        if acc == ():
            return k
    return None


def _order_via_matrix(diag, word, max_order, action, tol=1e-6):
    """Order of the element if <= max_order, else None, through its
    matrix in the geometric representation (faithful, so the element
    orders agree).  Entries of low powers are well-conditioned, which
    makes the identity test safe at this tolerance."""
    n = len(diag.gens)
    cols = [action.act_word(word, action.simple_root(s)) for s in diag.gens]
    acc = cols

    def is_identity(m):
        return all(
            abs(m[j][i] - (1.0 if i == j else 0.0)) < tol
            for j in range(n)
            for i in range(n)
        )

    for k in range(1, max_order + 1):
        if is_identity(acc):
            return k
        if k < max_order:
            acc = [action.act_word(word, col) for col in acc]
    return None


def verify_lineage(lineage, cap=200000):
    """Independent word-level validation of a lineage: every child label
    is the true order of the corresponding product in the parent, the
    substitutions invert each other, and each blow-up halves its base's
    order.  Orders go through coset enumeration when the letters span a
    spherical subset, otherwise through bounded reduced multiplication."""
    checks = []
    parent = lineage.parent
    child = lineage.child
    action = GeometricAction(parent)
    finite_labels = [
        child.m(s, t)
        for i, s in enumerate(child.gens)
        for t in child.gens[i + 1 :]
        if child.m(s, t) is not INF
    ]
    bound = max([12] + finite_labels) + 1
    tables = {}

    def order_of_word(word, needed):
        support = frozenset(word)
        if spherical_type(parent, support) is not None:
            if support not in tables:
                try:
                    tables[support] = todd_coxeter(parent, support, (), cap)
                except CosetLimitError:
                    tables[support] = None
            table = tables[support]
            if table is not None:
                return _perm_order(table.word_permutation(word))
        limit = max(bound, needed or 0)
        got = _order_via_matrix(parent, word, limit, action)
        if got is not None:
            # a finite verdict off the enumeration path gets the exact
            # word-level confirmation
            confirmed = _order_via_reduce(parent, word, got, action)
            if confirmed != got:  # pragma: no cover - numeric safety net
                return confirmed
        return got

    gens = child.gens
    for i, s in enumerate(gens):
        for t in gens[i + 1 :]:
            expected = child.m(s, t)
            word = lineage.forward[s] + lineage.forward[t]
            got = order_of_word(word, expected if expected is not INF else None)
            name = "label(%s,%s)" % (s, t)
            if expected is INF:
                ok = got is None
                detail = "expected infinite, got order %r (bound %d)" % (got, bound)
            else:
                ok = got == expected
                detail = "expected %s, got %r" % (expected, got)
            checks.append(CheckResult(name, ok, "" if ok else detail))
    for g in parent.gens:
        word = expand_word(lineage.backward[g], lineage.forward)
        red = reduce_word(parent, word, action)
        ok = red == (g,)
        checks.append(
            CheckResult(
                "roundtrip(%s)" % g, ok, "" if ok else "backward.forward reduced to %r" % (red,)
            )
        )
    for idx, step in enumerate(lineage.steps):
        if not isinstance(step, BlowupStep):
            continue
        o1 = group_order(step.parent, step.base, cap)
        o2 = group_order(step.child, step.new_base, cap)
        ok = o1 == 2 * o2
        checks.append(
            CheckResult(
                "halving(step %d)" % idx, ok, "" if ok else "|B| = %d, |B'| = %d" % (o1, o2)
            )
        )
    return LineageReport(checks)


def _perm_order(perm):
    import math as _math

    seen = [False] * len(perm)
    out = 1
    for c in range(len(perm)):
        if seen[c]:
            continue
        length = 0
        x = c
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        out = out * length // _math.gcd(out, length)
    return out


# -- lineage files -------------------------------------------------------


def diagram_hash(diag):
    return hashlib.sha256(diag.to_text().encode("utf-8")).hexdigest()


def write_lineage(lineage):
    """Line-oriented lineage text: the parent hash, then per step a
    `step` line plus `def` lines for the new generators' parent words
    and an `undef` line for the removed generator's child word."""
    lines = ["parent %s" % diagram_hash(lineage.parent)]
    for step in lineage.steps:
        if isinstance(step, BlowupStep):
            base = ",".join(sorted(step.base))
            lines.append(
                "step blowup base=%s end=%s d=%s z=%s" % (base, step.a, step.d, step.z)
            )
            fw = _step_forward(step)
            lines.append("def %s = %s" % (step.d, " ".join(fw[step.d])))
            lines.append("def %s = %s" % (step.z, " ".join(fw[step.z])))
            lines.append("undef %s = %s" % (step.a, " ".join((step.z,) + step.ell)))
        else:
            head = "step twist s1=%s s0=%s s2=%s s0bar=%s d=%s" % (
                ",".join(sorted(step.s1)),
                ",".join(sorted(step.s0)) or "-",
                ",".join(sorted(step.s2)),
                ",".join(sorted(step.s0bar)) or "-",
                " ".join(step.d_word) or "-",
            )
            lines.append(head)
            for y in sorted(step.s2 - step.s0bar):
                h = step.gen_map[y]
                fw = step.d_word + (y,) + tuple(reversed(step.d_word))
                lines.append("def %s = %s" % (h, " ".join(fw)))
    return "\n".join(lines) + "\n"


def parse_lineage(text, parent):
    """Rebuild a Lineage by replaying the steps of a lineage file
    against the given parent diagram (whose hash must match)."""
    from .decompose import Separation, TwistData, apply_twist

    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or not lines[0].startswith("parent "):
        raise MatchingError("lineage file must start with a parent line")
    want = lines[0].split()[1]
    if want != diagram_hash(parent):
        raise MatchingError("parent hash mismatch: lineage is for a different diagram")
    lin = identity_lineage(parent)
    pending_defs = {}

    def flush_defs(step_lin):
        for name, word in pending_defs.items():
            if name in step_lin.forward:
                got = step_lin.forward[name]
                if tuple(word) != got:
                    raise MatchingError(
                        "def line for %s disagrees with replay (%s vs %s)"
                        % (name, " ".join(word), " ".join(got))
                    )
        pending_defs.clear()

    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "step":
            flush_defs(lin)
            kv = _parse_step_args(parts[2:])
            cur = lin.child
            if parts[1] == "blowup":
                baseset = frozenset(kv["base"].split(","))
                base = next(
                    (b for b in find_bases(cur) if b.subset == baseset), None
                )
                if base is None:
                    raise MatchingError("step base %r is not a base" % sorted(baseset))
                plan = can_blow_up(cur, base)
                if plan is None:
                    raise MatchingError("no blow-up plan exists for the step base")
                if plan.a != kv["end"]:
                    # only a dihedral base can offer two ends; recheck the
                    # hypothesis for the one the file picked
                    other = next(t for t in baseset if t != kv["end"])
                    if plan.kind != "D" or not _d_end_qualifies(
                        cur, baseset, kv["end"], other
                    ):
                        raise MatchingError("step end %r does not qualify" % kv["end"])
                    plan = BlowupPlan(base, "D", kv["end"], other, (other, kv["end"]))
                step = blow_up(cur, plan)
                got = step.steps[0]
                if got.d != kv["d"] or got.z != kv["z"]:
                    raise MatchingError("fresh names disagree with the step line")
                lin = compose(lin, step)
            elif parts[1] == "twist":
                sep = Separation(
                    _parse_set(kv["s1"]), _parse_set(kv["s0"]), _parse_set(kv["s2"])
                )
                dword = tuple(kv["d"].split()) if kv["d"] != "-" else ()
                tw = TwistData(sep, s0bar=_parse_set(kv["s0bar"]), d_word=dword)
                lin = compose(lin, apply_twist(cur, tw))
            else:
                raise MatchingError("unknown step kind %r" % parts[1])
        elif parts[0] == "def":
            if len(parts) < 3 or parts[2] != "=":
                raise MatchingError("malformed def line: %r" % line)
            pending_defs[parts[1]] = parts[3:]
        elif parts[0] == "undef":
            continue  # redundant with replay; kept for human readers
        else:
            raise MatchingError("unknown lineage directive %r" % parts[0])
    flush_defs(lin)
    return lin


def _parse_step_args(tokens):
    kv = {}
    key = None
    for tok in tokens:
        if "=" in tok and tok.split("=", 1)[0] in ("base", "end", "d", "z", "s1", "s0", "s2", "s0bar"):
            key, val = tok.split("=", 1)
            kv[key] = val
        elif key == "d":
            kv["d"] += " " + tok
        else:
            raise MatchingError("malformed step token %r" % tok)
    return kv


def _parse_set(text):
    return frozenset() if text == "-" else frozenset(text.split(","))
