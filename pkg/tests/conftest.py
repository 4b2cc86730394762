"""Shared builders and corpora for the test suite.

Builders produce diagrams with unlisted pairs defaulting to 2 (chains,
trees) so that the classical finite shapes come out as intended; the
random generators leave unlisted pairs at infinity and sprinkle finite
labels explicitly.
"""

import random

import pytest

from coxforge.diagram import INF, CoxeterDiagram


def _names(n):
    return ["g%d" % i for i in range(n)]


def chain(labels, names=None):
    """Path diagram with the given consecutive labels and all other
    pairs commuting: chain([3,3]) is A_3, chain([4]) is C_2, etc."""
    n = len(labels) + 1
    names = names or _names(n)
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            pairs[frozenset((a, b))] = 2
    for i, m in enumerate(labels):
        pairs[frozenset((names[i], names[i + 1]))] = m
    return CoxeterDiagram(names, pairs)


def ytree(arms, names=None):
    """Simply-laced tree: a branch vertex with arms of the given
    lengths, every edge label 3, all other pairs commuting.
    ytree([1,1,n-3]) is B_n; ytree([1,2,2]) is E_6."""
    n = 1 + sum(arms)
    names = names or _names(n)
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            pairs[frozenset((a, b))] = 2
    branch = names[0]
    k = 1
    for length in arms:
        prev = branch
        for _ in range(length):
            pairs[frozenset((prev, names[k]))] = 3
            prev = names[k]
            k += 1
    return CoxeterDiagram(names, pairs)


def typed(kind, param=None):
    """Standard diagram of a named finite type."""
    if kind == "A":
        return chain([3] * (param - 1))
    if kind == "C":
        return chain([3] * (param - 2) + [4])
    if kind == "B":
        return ytree([1, 1, param - 3])
    if kind == "D2":
        return chain([param])
    if kind == "E6":
        return ytree([1, 2, 2])
    if kind == "E7":
        return ytree([1, 2, 3])
    if kind == "E8":
        return ytree([1, 2, 4])
    if kind == "F4":
        return chain([3, 4, 3])
    if kind == "G3":
        return chain([5, 3])
    if kind == "G4":
        return chain([5, 3, 3])
    raise ValueError(kind)


def product_diagram(*factors):
    """Direct product: disjoint union of diagrams with commuting
    (label 2) cross pairs, generators renamed apart."""
    gens = []
    pairs = {}
    rename_maps = []
    for idx, d in enumerate(factors):
        ren = {g: "f%d_%s" % (idx, g) for g in d.gens}
        rename_maps.append(ren)
        gens.extend(ren[g] for g in d.gens)
        gs = d.gens
        for i, a in enumerate(gs):
            for b in gs[i + 1 :]:
                m = d.m(a, b)
                if m is not INF:
                    pairs[frozenset((ren[a], ren[b]))] = m
    for i, d1 in enumerate(factors):
        for j, d2 in enumerate(factors):
            if i < j:
                for a in d1.gens:
                    for b in d2.gens:
                        pairs[frozenset((rename_maps[i][a], rename_maps[j][b]))] = 2
    return CoxeterDiagram(gens, pairs)


# spherical diagrams with |W| <= 10^4, used wherever a brute-force
# group-level oracle is feasible
SMALL_SPHERICAL = {
    "A2": (typed("A", 2), 6),
    "A3": (typed("A", 3), 24),
    "A4": (typed("A", 4), 120),
    "A5": (typed("A", 5), 720),
    "C2": (typed("C", 2), 8),
    "C3": (typed("C", 3), 48),
    "C4": (typed("C", 4), 384),
    "B4": (typed("B", 4), 192),
    "B5": (typed("B", 5), 1920),
    "D2_5": (typed("D2", 5), 10),
    "D2_6": (typed("D2", 6), 12),
    "D2_7": (typed("D2", 7), 14),
    "D2_10": (typed("D2", 10), 20),
    "F4": (typed("F4"), 1152),
    "G3": (typed("G3"), 120),
    "A2xA2": (product_diagram(typed("A", 2), typed("A", 2)), 36),
    "A1xA3": (product_diagram(typed("A", 1), typed("A", 3)), 48),
    "A2xD2_5": (product_diagram(typed("A", 2), typed("D2", 5)), 60),
}


def random_diagram(rng, max_rank=7, labels=(2, 3, 4, 5, 6, 7, 8, INF)):
    """Random diagram: each pair independently gets a label from the
    pool (weighted toward 2, 3 and infinity so that spherical pieces
    stay reasonably small)."""
    n = rng.randint(1, max_rank)
    names = ["t%d" % i for i in range(n)]
    weights = [5 if m in (2, 3) else (6 if m is INF else 1) for m in labels]
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            m = rng.choices(labels, weights)[0]
            if m is not INF:
                pairs[frozenset((a, b))] = m
    return CoxeterDiagram(names, pairs)


@pytest.fixture
def rng():
    return random.Random(0xC0C5E7)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(rep, "when", "call") == "call":
                rows.append((nodeid.split("::")[-1], "PASS" if status == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(rows):
            terminalreporter.write_line("%s  %s" % (status, name))
