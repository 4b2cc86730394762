import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_diagram, typed
from coxforge.census import Census, compare_census, iter_cliques, simplex_census
from coxforge.diagram import CoxeterDiagram, canonical_form, parse_diagram
from coxforge.matching import blow_up, can_blow_up, find_bases

SQUARE = parse_diagram(
    "gens a b c d\nedge a b 2\nedge b c 2\nedge c d 2\nedge d a 2\n"
)


def test_square_census():
    c = simplex_census(SQUARE)
    assert c.rank == 4
    assert c.by_rank() == {1: 4, 2: 4}
    # one isomorphism class per rank: 4 x A_1 and 4 x (A_1 x A_1)
    assert sorted(v[1] for v in c.entries.values()) == [1, 2]
    assert all(v[0] == 4 for v in c.entries.values())


def test_single_edge_census():
    d = parse_diagram("gens a b\nedge a b 6\n")
    c = simplex_census(d)
    assert c.by_rank() == {1: 2, 2: 1}
    assert len(c.entries) == 2


def test_empty_diagram_census():
    d = CoxeterDiagram((), {})
    c = simplex_census(d)
    assert c.entries == {} and c.by_rank() == {}


def test_iter_cliques_matches_brute_force(rng):
    for _ in range(10):
        d = random_diagram(rng, max_rank=6)
        got = sorted(iter_cliques(d), key=sorted)
        want = sorted(
            (
                frozenset(sub)
                for r in range(1, d.rank + 1)
                for sub in itertools.combinations(d.gens, r)
                if d.is_complete(frozenset(sub))
            ),
            key=sorted,
        )
        assert got == want


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**30))
def test_census_permutation_invariant(seed):
    rng = random.Random(seed)
    d = random_diagram(rng, max_rank=6)
    names = list(d.gens)
    rng.shuffle(names)
    perm = dict(zip(d.gens, names))
    from coxforge.diagram import INF

    labels = {}
    for i, a in enumerate(d.gens):
        for b in d.gens[i + 1 :]:
            m = d.m(a, b)
            if m is not INF:
                labels[frozenset((perm[a], perm[b]))] = m
    relabeled = CoxeterDiagram([perm[g] for g in d.gens], labels)
    assert compare_census(simplex_census(d), simplex_census(relabeled)) == {}


def test_blowup_changes_census():
    d6 = typed("D2", 6)
    (base,) = find_bases(d6)
    child = blow_up(d6, can_blow_up(d6, base)).child
    diff = compare_census(simplex_census(d6), simplex_census(child))
    assert diff  # different generating sets, different censuses


def test_compare_census_reports_direction():
    a = Census(2)
    b = Census(2)
    key1, key2 = b"k1", b"k2"
    a.add(key1, 1, "x")
    a.add(key1, 1, "x")
    b.add(key1, 1, "x")
    b.add(key2, 2, "y")
    assert compare_census(a, b) == {key1: (2, 1), key2: (0, 1)}
    assert compare_census(a, a) == {}


def test_to_json_schema():
    import json

    c = simplex_census(SQUARE)
    data = json.loads(c.to_json())
    assert data["rank"] == 4
    assert {e["count"] for e in data["entries"]} == {4}
    for e in data["entries"]:
        bytes.fromhex(e["key"])  # hex round trip
        sub = parse_diagram(e["diagram"])
        assert canonical_form(sub).hex() == e["key"]
