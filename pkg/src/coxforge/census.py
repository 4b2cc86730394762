"""Simplex census: every complete subset (clique of the P-view graph,
singletons included, empty set excluded) counted by the canonical form
of its induced diagram.  Two generating sets of the same group at
maximum rank must produce identical censuses, which is what the
comparison below is used to check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagram import INF, canonical_form


def iter_cliques(diag, A=None):
    """All nonempty cliques of the P-view graph, lexicographically by
    generator index: standard expansion where each clique is extended
    only by later, fully-adjacent vertices."""
    names = diag.sorted_subset(A if A is not None else diag.gens)
    n = len(names)
    adj = [
        {j for j in range(n) if j != i and diag.m(names[i], names[j]) is not INF}
        for i in range(n)
    ]

    def grow(clique, candidates):
        for i in list(candidates):
            cur = clique + [i]
            yield frozenset(names[k] for k in cur)
            yield from grow(cur, [j for j in candidates if j > i and j in adj[i]])

    yield from grow([], list(range(n)))


@dataclass
class Census:
    rank: int
    entries: dict = field(default_factory=dict)  # key -> [count, size, text]

    def add(self, key, size, text):
        if key in self.entries:
            self.entries[key][0] += 1
        else:
            self.entries[key] = [1, size, text]

    def count(self, key):
        return self.entries.get(key, [0])[0]

    def by_rank(self):
        hist = {}
        for count, size, _ in self.entries.values():
            hist[size] = hist.get(size, 0) + count
        return hist

    def to_json(self):
        items = sorted(
            self.entries.items(), key=lambda kv: (kv[1][1], kv[0])
        )
        return json.dumps(
            {
                "rank": self.rank,
                "entries": [
                    {"key": key.hex(), "diagram": text, "count": count}
                    for key, (count, size, text) in items
                ],
            },
            indent=2,
        )


def simplex_census(diag):
    census = Census(diag.rank)
    for clique in iter_cliques(diag):
        sub = diag.induced(clique)
        census.add(canonical_form(sub), len(clique), sub.to_text())
    return census


def compare_census(c1, c2):
    """{key: (count in c1, count in c2)} over keys where they differ;
    empty iff the censuses are equal."""
    diff = {}
    for key in set(c1.entries) | set(c2.entries):
        a, b = c1.count(key), c2.count(key)
        if a != b:
            diff[key] = (a, b)
    return diff
