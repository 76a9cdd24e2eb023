"""Uniform hypergraphs, generalized triangles and trace extraction.

A generalized triangle in a k-graph is three distinct edges E1, E2, E3 with
|E1 & E2| = k - 1 and E3 containing the two-element symmetric difference of
E1 and E2. For k = 2 this is an ordinary triangle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from math import prod

from .errors import InvalidInput, NotDownwardClosed
from .family import (
    ElementSet,
    Family,
    _parse_header,
    _parse_members,
    elements_of,
    is_downward_closed,
    mask_of,
)
from .separability import balanced_partition


@dataclass(frozen=True)
class UniformHypergraph:
    n: int
    k: int
    edges: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.k > self.n:
            raise InvalidInput(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        canon = tuple(sorted(set(self.edges)))
        for e in canon:
            if e >> self.n or e.bit_count() != self.k:
                raise InvalidInput(f"edge {elements_of(e)} is not a {self.k}-subset of [0, {self.n})")
        object.__setattr__(self, "edges", canon)

    @classmethod
    def from_sets(cls, n: int, k: int, edges) -> UniformHypergraph:
        return cls(n, k, tuple(ElementSet.of(n, e).bits for e in edges))

    @classmethod
    def level(cls, f: Family, k: int) -> UniformHypergraph:
        """The k-element members of ``f`` as a k-graph."""
        return cls(f.n, k, tuple(m for m in f.masks if m.bit_count() == k))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GeneralizedTriangle:
    e1: ElementSet
    e2: ElementSet
    e3: ElementSet

    def is_valid(self, k: int) -> bool:
        a, b, c = self.e1.bits, self.e2.bits, self.e3.bits
        return (
            len({a, b, c}) == 3
            and (a & b).bit_count() == k - 1
            and (a ^ b) & ~c == 0
        )


def find_generalized_triangle(g: UniformHypergraph) -> GeneralizedTriangle | None:
    """First generalized triangle in bucket order, or None.

    Edges sharing k-1 vertices collide in the bucket keyed by that shared
    (k-1)-set; a third edge is looked up by the pair it must cover.
    """
    if g.k < 2:
        raise InvalidInput("generalized triangles need k >= 2")
    buckets: dict[int, list[int]] = defaultdict(list)
    by_pair: dict[int, list[int]] = defaultdict(list)
    for e in g.edges:
        elems = elements_of(e)
        for v in elems:
            buckets[e ^ (1 << v)].append(e)
        for i, a in enumerate(elems):
            for b in elems[i + 1 :]:
                by_pair[(1 << a) | (1 << b)].append(e)
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i, e1 in enumerate(members):
            for e2 in members[i + 1 :]:
                diff = e1 ^ e2
                for e3 in by_pair.get(diff, ()):
                    if e3 != e1 and e3 != e2:
                        n = g.n
                        return GeneralizedTriangle(ElementSet(e1, n), ElementSet(e2, n), ElementSet(e3, n))
    return None


def balanced_partite_hypergraph(n: int, k: int) -> UniformHypergraph:
    """Complete k-partite k-graph on near-equal consecutive blocks."""
    if not 1 <= k <= n:
        raise InvalidInput(f"need 1 <= k <= n, got k={k}, n={n}")
    blocks = []
    start = 0
    for size in balanced_partition(n, k):
        blocks.append(range(start, start + size))
        start += size
    return UniformHypergraph(n, k, tuple(mask_of(choice) for choice in product(*blocks)))


def g_reference(n: int, k: int) -> int:
    """Largest k-graph on n vertices without a generalized triangle, k in {2, 3, 4}."""
    if k == 2:
        return n * n // 4
    if k in (3, 4):
        return prod((n + j) // k for j in range(k))
    raise InvalidInput(f"no exact formula for k={k}; only k in {{2, 3, 4}} are supported")


def extract_separating_T(f: Family, t: int) -> ElementSet | None:
    """A t-set carrying at least 2^t - 2^(t-2) + 1 traces of a downward-closed family.

    Takes t elements of a member of size >= t when one exists; otherwise the
    union of the first two edges of a generalized triangle among the
    (t-1)-element members.
    """
    if t < 4:
        raise InvalidInput(f"need t >= 4, got {t}")
    if t > f.n:
        raise InvalidInput(f"need t <= n, got t={t}, n={f.n}")
    if not is_downward_closed(f):
        raise NotDownwardClosed("family is not downward closed")
    for m in f.masks:
        if m.bit_count() >= t:
            return ElementSet(mask_of(elements_of(m)[:t]), f.n)
    tri = find_generalized_triangle(UniformHypergraph.level(f, t - 1))
    if tri is None:
        return None
    return ElementSet(tri.e1.bits | tri.e2.bits, f.n)


# -- text format -----------------------------------------------------------------------


def parse_hypergraph(text: str) -> UniformHypergraph:
    lines = text.splitlines()
    if len(lines) < 2:
        raise InvalidInput("hypergraph file needs 'n=' and 'k=' headers")
    n = _parse_header(lines[0], "n")
    k = _parse_header(lines[1], "k")
    edges = _parse_members(lines[2:], n, 3)
    for i, e in enumerate(edges):
        if e.bit_count() != k:
            raise InvalidInput(f"edge {elements_of(e)} has {e.bit_count()} elements, expected {k}")
    return UniformHypergraph(n, k, tuple(edges))


def format_hypergraph(g: UniformHypergraph) -> str:
    lines = [f"n={g.n}", f"k={g.k}"]
    lines += [" ".join(map(str, elements_of(e))) if e else "-" for e in g.edges]
    return "\n".join(lines) + "\n"


def read_hypergraph(path) -> UniformHypergraph:
    with open(path) as fh:
        return parse_hypergraph(fh.read())
