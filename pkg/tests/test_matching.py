import random

import pytest

from conftest import chain, product_diagram, random_diagram, typed
from coxforge.classify import order_of
from coxforge.diagram import INF, DiagramError, canonical_form, parse_diagram
from coxforge.matching import (
    Base,
    BlowupStep,
    MatchingError,
    blow_up,
    can_blow_up,
    compose,
    diagram_hash,
    find_bases,
    find_max_spherical_simplices,
    identity_lineage,
    match_bases,
    match_edge,
    match_subbase,
    max_rank,
    parse_lineage,
    verify_lineage,
    write_lineage,
)
from coxforge.oracle import group_order

SQUARE = parse_diagram(
    "gens a b c d\nedge a b 2\nedge b c 2\nedge c d 2\nedge d a 2\n"
)


def test_find_bases_examples():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    bases = find_bases(d6)
    assert [(sorted(b.subset), str(b.tag)) for b in bases] == [(["a", "b"], "D_2(6)")]

    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    bases = find_bases(c3)
    assert [(sorted(b.subset), str(b.tag)) for b in bases] == [(["a", "b", "c"], "C_3")]

    assert find_bases(SQUARE) == []


def test_find_bases_submaximal_excluded():
    # in F_4 every rank-2/3 chain piece is inside the full chain
    f4 = typed("F4")
    bases = find_bases(f4)
    assert len(bases) == 1 and bases[0].subset == f4.generators()


def test_find_bases_multiple():
    # two D_2(5) edges joined by an infinite gap
    d = parse_diagram("gens a b c d\nedge a b 5\nedge c d 5\ndefault inf\n")
    assert len(find_bases(d)) == 2


def test_max_spherical_simplices():
    assert [sorted(s) for s in find_max_spherical_simplices(SQUARE)] == [
        ["a", "b"],
        ["a", "d"],
        ["b", "c"],
        ["c", "d"],
    ]
    f4 = typed("F4")
    assert find_max_spherical_simplices(f4) == [f4.generators()]
    # rectangle group: two infinite labels in the C-view
    rect = parse_diagram("gens a b c d\nedge a c inf\nedge b d inf\ndefault 2\n")
    assert [sorted(s) for s in find_max_spherical_simplices(rect)] == [
        ["a", "b"],
        ["a", "d"],
        ["b", "c"],
        ["c", "d"],
    ]


def _single_base(diag):
    bases = find_bases(diag)
    assert len(bases) == 1
    return bases[0]


def test_can_blow_up_isolated():
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    plan = can_blow_up(c3, _single_base(c3))
    assert plan is not None and plan.kind == "C" and plan.a == "a"
    assert plan.chain == ("c", "b", "a")

    d6 = parse_diagram("gens a b\nedge a b 6\n")
    plan = can_blow_up(d6, _single_base(d6))
    assert plan is not None and plan.kind == "D" and plan.a == "a"


def test_can_blow_up_even_and_wrong_types():
    for d in (typed("C", 4), typed("D2", 8), typed("B", 5), typed("A", 4), typed("G3")):
        for base in find_bases(d):
            assert can_blow_up(d, base) is None


def test_can_blow_up_neighbor_condition():
    # pendant s with a finite link to the label-4 end a but a
    # non-commuting link into the base: condition fails
    d = parse_diagram(
        "gens a b c s\nedge a b 4\nedge b c 3\nedge s a 2\nedge s b 3\ndefault 2\n"
    )
    base = next(b for b in find_bases(d) if b.subset == frozenset("abc"))
    assert can_blow_up(d, base) is None
    # fully commuting neighbor: fine
    d2 = parse_diagram(
        "gens a b c s\nedge a b 4\nedge b c 3\nedge s a 2\nedge s b 2\nedge s c 2\n"
        "default 2\n"
    )
    base = next(b for b in find_bases(d2) if b.subset == frozenset("abc"))
    assert can_blow_up(d2, base) is not None
    # infinitely far neighbor: unconstrained
    d3 = parse_diagram(
        "gens a b c s\nedge a b 4\nedge b c 3\nedge s c 3\nedge s b 2\ndefault 2\n"
    )
    # s-a defaults... make it infinite explicitly
    d3 = parse_diagram(
        "gens a b c s\nedge a b 4\nedge b c 3\nedge s c 3\nedge s b 2\nedge a c 2\n"
    )
    base = next(b for b in find_bases(d3) if b.subset == frozenset("abc"))
    plan = can_blow_up(d3, base)
    assert plan is not None and plan.a == "a"


def test_can_blow_up_dihedral_end_selection():
    # end a blocked by a non-commuting finite neighbor, end b clean
    d = parse_diagram("gens a b s\nedge a b 6\nedge s a 3\n")
    base = next(b for b in find_bases(d) if b.subset == frozenset("ab"))
    plan = can_blow_up(d, base)
    assert plan is not None and plan.a == "b"
    # both ends blocked
    d2 = parse_diagram("gens a b s t\nedge a b 6\nedge s a 3\nedge t b 3\n")
    base = next(b for b in find_bases(d2) if b.subset == frozenset("ab"))
    assert can_blow_up(d2, base) is None


def test_blow_up_c3_worked_example():
    c3 = parse_diagram("gens b c a\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(c3, can_blow_up(c3, _single_base(c3)))
    child = lin.child
    assert set(child.gens) == {"b", "c", "a_d", "a_z"}
    assert child.m("b", "c") == 3
    assert child.m("c", "a_d") == 3
    assert child.m("b", "a_d") == 2
    for t in ("b", "c", "a_d"):
        assert child.m("a_z", t) == 2
    assert lin.forward["a_d"] == ("a", "b", "a")
    assert lin.forward["a_z"][0] == "a"
    assert lin.backward["a"][0] == "a_z"
    # A_3 x A_1 shape
    assert order_of(child, child.generators()) == 48


def test_blow_up_d26_worked_example():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    lin = blow_up(d6, can_blow_up(d6, _single_base(d6)))
    child = lin.child
    assert set(child.gens) == {"b", "a_d", "a_z"}
    assert child.m("b", "a_d") == 3
    assert child.m("b", "a_z") == 2
    assert child.m("a_d", "a_z") == 2
    assert order_of(child, child.generators()) == 12


def test_blow_up_decoration_bookkeeping():
    # decorated D_2(6): t commutes with the base, u is infinitely far
    d = parse_diagram(
        "gens a b t u\nedge a b 6\nedge t a 2\nedge t b 2\nedge u b 3\n"
    )
    base = next(b for b in find_bases(d) if b.subset == frozenset("ab"))
    plan = can_blow_up(d, base)
    assert plan.a == "a"  # u's finite link touches only b
    child = blow_up(d, plan).child
    assert child.m("t", "b") == 2
    assert child.m("t", "a_d") == 2 and child.m("t", "a_z") == 2
    assert child.m("u", "a_d") is INF and child.m("u", "a_z") is INF
    assert child.m("u", "b") == 3


def test_blow_up_fresh_name_collision():
    d = parse_diagram("gens a b a_d\nedge a b 6\nedge a_d a 2\nedge a_d b 2\n")
    base = next(b for b in find_bases(d) if b.subset == frozenset(["a", "b"]))
    child = blow_up(d, can_blow_up(d, base)).child
    assert len(set(child.gens)) == 4  # no clash with the existing a_d


@pytest.mark.parametrize(
    "text",
    [
        "gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n",  # C_3
        "gens a b\nedge a b 6\n",  # D_2(6)
    ],
)
def test_verify_lineage_passes(text):
    d = parse_diagram(text)
    lin = blow_up(d, can_blow_up(d, _single_base(d)))
    report = verify_lineage(lin)
    assert report.passed, report.failures()
    # halving check: order(B) = 2 * order(B')
    step = lin.steps[0]
    assert group_order(d, step.base) == 2 * group_order(lin.child, step.new_base)


def test_verify_lineage_negative_control():
    d = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(d, can_blow_up(d, _single_base(d)))
    lin.forward["a_d"] = ("a", "b")  # corrupt: d mapped to ab
    report = verify_lineage(lin)
    assert not report.passed
    assert any("a_d" in c.name for c in report.failures())


def test_max_rank_examples():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    lin = max_rank(d6)
    assert len(lin.steps) == 1 and lin.child.rank == 3

    # C_3 with a pendant that breaks the hypothesis: zero steps
    blocked = parse_diagram(
        "gens a b c s\nedge a b 4\nedge b c 3\nedge s a 3\ndefault 2\n"
    )
    lin = max_rank(blocked)
    assert lin.steps == [] and lin.child == blocked

    # no eligible base types at all
    lin = max_rank(typed("B", 5))
    assert lin.steps == []


def test_max_rank_c5_two_potential_drops():
    c5 = typed("C", 5)
    lin = max_rank(c5)
    assert len(lin.steps) == 1
    assert lin.child.rank == 6
    report = verify_lineage(lin)
    assert report.passed, report.failures()


def test_max_rank_iterates():
    # D_2(6) x D_2(10): both bases blow up
    d = product_diagram(typed("D2", 6), typed("D2", 10))
    lin = max_rank(d)
    assert len(lin.steps) == 2
    assert lin.child.rank == 6
    for base in find_bases(lin.child):
        assert can_blow_up(lin.child, base) is None


def test_compose_checks_chaining():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    other = typed("A", 2)
    with pytest.raises(MatchingError):
        compose(identity_lineage(d6), identity_lineage(other))


def test_match_bases_blowup():
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(c3, can_blow_up(c3, _single_base(c3)))
    (cert,) = match_bases(lin)
    assert cert.relation == "C-to-B"
    assert cert.parent_base.subset == frozenset("abc")
    assert sorted(cert.child_base.subset) == ["a_d", "b", "c"]
    assert str(cert.child_base.tag) == "A_3"  # B_3 coincides with A_3

    d6 = parse_diagram("gens a b\nedge a b 6\n")
    lin = blow_up(d6, can_blow_up(d6, _single_base(d6)))
    (cert,) = match_bases(lin)
    assert cert.relation == "D2-halving"
    assert str(cert.child_base.tag) == "A_2"  # D_2(3)


def test_match_bases_identity_and_bystander():
    d = product_diagram(typed("D2", 6), typed("G3"))
    lin = identity_lineage(d)
    certs = match_bases(lin)
    assert len(certs) == 2
    assert all(c.relation == "isomorphic" for c in certs)
    assert all(c.parent_base.subset == c.child_base.subset for c in certs)

    lin = max_rank(d)  # only the dihedral base moves
    certs = {str(c.parent_base.tag): c for c in match_bases(lin)}
    assert certs["G_3"].relation == "isomorphic"
    assert certs["D_2(6)"].relation == "D2-halving"


def test_match_subbase_cases():
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(c3, can_blow_up(c3, _single_base(c3)))
    (cert,) = match_bases(lin)
    # A_2 piece avoiding the removed end: same names
    got = match_subbase(lin, cert, frozenset(["b", "c"]))
    assert got.subset == frozenset(["b", "c"]) and got.flag == "same-type"
    # the C_2 piece containing it: split ends with the <xy> flag
    got = match_subbase(lin, cert, frozenset(["a", "b"]))
    assert got.subset == frozenset(["b", "a_d"]) and got.flag == "xy"
    assert lin.child.m("b", "a_d") == 2
    # the whole base
    got = match_subbase(lin, cert, frozenset("abc"))
    assert got.subset == cert.child_base.subset


def test_match_subbase_c5_interior():
    c5 = typed("C", 5)  # chain g0..g4 with the 4-label at g3-g4
    lin = max_rank(c5)
    (cert,) = match_bases(lin)
    # C_3 tail including the removed end g4
    got = match_subbase(lin, cert, frozenset(["g2", "g3", "g4"]))
    assert got.flag == "B-to-C-swap"
    assert got.subset == frozenset(["g2", "g3", "g4_d"])
    # order halves on the swapped piece: C_3 (48) -> A_3 piece inside B_5
    assert group_order(lin.child, got.subset) == 24


def test_match_subbase_preconditions():
    a5 = typed("A", 5)
    lin = identity_lineage(a5)
    (cert,) = match_bases(lin)
    with pytest.raises(MatchingError):
        match_subbase(lin, cert, frozenset(["g0", "g1"]))  # A_5 refusal
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(c3, can_blow_up(c3, _single_base(c3)))
    (cert,) = match_bases(lin)
    with pytest.raises(MatchingError):
        match_subbase(lin, cert, frozenset(["a"]))  # cyclic
    with pytest.raises(MatchingError):
        match_subbase(lin, cert, frozenset(["a", "c"]))  # not irreducible
    with pytest.raises(MatchingError):
        match_subbase(lin, cert, frozenset(["x", "y"]))  # foreign


def test_match_edge_trichotomy():
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = blow_up(c3, can_blow_up(c3, _single_base(c3)))
    pair, flag = match_edge(lin, ("a", "b"))
    assert pair == frozenset(["b", "a_d"]) and flag == "xy"

    d6 = parse_diagram("gens a b\nedge a b 6\n")
    lin = blow_up(d6, can_blow_up(d6, _single_base(d6)))
    pair, flag = match_edge(lin, ("a", "b"))
    assert pair == frozenset(["b", "a_d"]) and flag == "halved"
    assert lin.child.m("b", "a_d") == 3

    # an edge untouched by any step
    d = product_diagram(typed("D2", 6), typed("D2", 5))
    lin = max_rank(d)
    pair, flag = match_edge(lin, ("f1_g0", "f1_g1"))
    assert pair == frozenset(["f1_g0", "f1_g1"]) and flag == "edge"


def test_match_edge_preconditions():
    c3 = parse_diagram("gens a b c\nedge a b 4\nedge b c 3\ndefault 2\n")
    lin = identity_lineage(c3)
    with pytest.raises(MatchingError):
        match_edge(lin, ("b", "c"))  # label 3
    with pytest.raises(MatchingError):
        match_edge(lin, ("a", "b", "c"))


def test_lineage_file_round_trip():
    d = product_diagram(typed("D2", 6), typed("C", 3))
    lin = max_rank(d)
    assert len(lin.steps) == 2
    text = write_lineage(lin)
    assert text.startswith("parent " + diagram_hash(d))
    again = parse_lineage(text, d)
    assert again.child == lin.child
    assert again.forward == lin.forward
    assert again.backward == lin.backward


def test_lineage_file_rejects_wrong_parent():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    text = write_lineage(max_rank(d6))
    with pytest.raises(MatchingError):
        parse_lineage(text, typed("A", 2))


def test_lineage_file_rejects_bad_def():
    d6 = parse_diagram("gens a b\nedge a b 6\n")
    text = write_lineage(max_rank(d6))
    text = text.replace("def a_d = a b a", "def a_d = a b")
    with pytest.raises(MatchingError):
        parse_lineage(text, d6)


def test_max_rank_random_termination(rng):
    for _ in range(40):
        d = random_diagram(rng, max_rank=6)
        lin = max_rank(d)  # internal assertion: potential decreases
        for base in find_bases(lin.child):
            assert can_blow_up(lin.child, base) is None
        assert lin.child.rank == d.rank + len(lin.steps)
