"""t-separability, chain-product families, s(n, t) and arrow relations.

Element x is separated from y when some member contains x but not y. The
complementary relation x <= y ("every member containing x contains y") is a
preorder; a family is t-separable exactly when the quotient poset of that
preorder has an antichain of t classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations, product
from math import comb, prod
from typing import Iterator

import networkx as nx
import numpy as np

from .errors import InvalidInput
from .family import (
    ElementSet,
    Family,
    elements_of,
    full_mask,
    subsets_of_size,
    trace_count,
)
from .parallel import map_ordered, split_range


def _check_pair(f: Family, x: int, y: int) -> None:
    if x == y:
        raise InvalidInput("separation needs two distinct elements")
    if not (0 <= x < f.n and 0 <= y < f.n):
        raise InvalidInput(f"elements must lie in [0, {f.n})")


def separates(f: Family, x: int, y: int) -> bool:
    _check_pair(f, x, y)
    bx, by = 1 << x, 1 << y
    return any(F & bx and not F & by for F in f.masks)


@dataclass(frozen=True)
class SeparationPreorder:
    """``up[x]`` is the mask of all y with x <= y.

    ``classes`` are the equivalence classes as masks, ordered by least
    element; ``above[i]`` is the mask of class indices strictly above class i.
    """

    n: int
    up: tuple[int, ...]
    classes: tuple[int, ...]
    above: tuple[int, ...]

    def leq(self, x: int, y: int) -> bool:
        return bool(self.up[x] >> y & 1)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if c >> x & 1:
                return i
        raise InvalidInput(f"element {x} outside the ground set")


def separation_preorder(f: Family) -> SeparationPreorder:
    n = f.n
    top = full_mask(n)
    arr = f.array
    up = []
    for x in range(n):
        holders = arr[(arr >> np.uint64(x)) & np.uint64(1) == 1]
        up.append(int(np.bitwise_and.reduce(holders)) if holders.size else top)
    for x in range(n):
        for y in elements_of(up[x]):
            if up[y] & ~up[x]:
                raise AssertionError(f"separation relation not transitive at {x} <= {y}")

    classes: list[int] = []
    assigned = 0
    for x in range(n):
        if assigned >> x & 1:
            continue
        cls = 0
        for y in elements_of(up[x]):
            if up[y] >> x & 1:
                cls |= 1 << y
        classes.append(cls)
        assigned |= cls
    reps = [(c & -c).bit_length() - 1 for c in classes]
    above = []
    for i, ri in enumerate(reps):
        mask = 0
        for j, rj in enumerate(reps):
            if i != j and up[ri] >> rj & 1:
                mask |= 1 << j
        above.append(mask)
    return SeparationPreorder(n, tuple(up), tuple(classes), tuple(above))


def _chain_cover_graph(p: SeparationPreorder) -> tuple[nx.Graph, list]:
    g = nx.Graph()
    left = [("L", i) for i in range(p.class_count)]
    g.add_nodes_from(left)
    g.add_nodes_from(("R", i) for i in range(p.class_count))
    for i, mask in enumerate(p.above):
        for j in elements_of(mask):
            g.add_edge(("L", i), ("R", j))
    return g, left


def max_antichain(p: SeparationPreorder) -> list[int]:
    """Class indices of a maximum antichain of the quotient poset.

    A maximum matching of the split comparability graph gives a minimum
    chain cover; the classes untouched by a minimum vertex cover (Konig)
    form an antichain of the same size.
    """
    g, left = _chain_cover_graph(p)
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    cover = nx.bipartite.to_vertex_cover(g, matching, top_nodes=left)
    chosen = [i for i in range(p.class_count) if ("L", i) not in cover and ("R", i) not in cover]
    matched = sum(1 for node in matching if node[0] == "L")
    assert len(chosen) == p.class_count - matched
    return chosen


def quotient_width(p: SeparationPreorder) -> int:
    g, left = _chain_cover_graph(p)
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return p.class_count - sum(1 for node in matching if node[0] == "L")


def quotient_width_bruteforce(p: SeparationPreorder) -> int:
    """Largest antichain by exhaustive search; for at most 20 classes."""
    c = p.class_count
    if c > 20:
        raise InvalidInput("brute-force width is limited to 20 classes")
    comparable = [p.above[i] | sum(1 << j for j in range(c) if p.above[j] >> i & 1) for i in range(c)]
    best = 0

    def grow(start: int, size: int, blocked: int) -> None:
        nonlocal best
        best = max(best, size)
        if size + (c - start) <= best:
            return
        for i in range(start, c):
            if not blocked >> i & 1:
                grow(i + 1, size + 1, blocked | comparable[i])

    grow(0, 0, 0)
    return best


def _separation_masks(f: Family) -> list[int]:
    """sep[x] = mask of y such that some member holds x and not y."""
    top = full_mask(f.n)
    sep = [0] * f.n
    for F in f.masks:
        outside = top & ~F
        for x in elements_of(F):
            sep[x] |= outside
    return sep


def _direct_search(f: Family, t: int) -> int | None:
    sep = _separation_masks(f)
    mutual = [0] * f.n
    for x in range(f.n):
        for y in elements_of(sep[x]):
            if sep[y] >> x & 1:
                mutual[x] |= 1 << y

    def extend(chosen: int, cands: int, need: int) -> int | None:
        if need == 0:
            return chosen
        while cands and cands.bit_count() >= need:
            low = cands & -cands
            x = low.bit_length() - 1
            cands ^= low
            hit = extend(chosen | low, cands & mutual[x], need - 1)
            if hit is not None:
                return hit
        return None

    return extend(0, full_mask(f.n), t)


def is_t_separable(f: Family, t: int, method: str = "preorder") -> ElementSet | None:
    """A t-set whose ordered pairs are all separated, or None.

    ``method="preorder"`` reads an antichain off the separation preorder;
    ``method="direct"`` searches t-sets of mutually separated elements.
    """
    if not 2 <= t <= f.n:
        raise InvalidInput(f"need 2 <= t <= n, got t={t}, n={f.n}")
    if method == "direct":
        hit = _direct_search(f, t)
        return None if hit is None else ElementSet(hit, f.n)
    if method != "preorder":
        raise InvalidInput(f"unknown method {method!r}")
    p = separation_preorder(f)
    chosen = max_antichain(p)
    if len(chosen) < t:
        return None
    reps = sorted((p.classes[i] & -p.classes[i]).bit_length() - 1 for i in chosen)
    return ElementSet.of(f.n, reps[:t])


def is_separating_set(f: Family, T: ElementSet | int) -> bool:
    bits = T.bits if isinstance(T, ElementSet) else T
    elems = elements_of(bits)
    return all(separates(f, x, y) for x in elems for y in elems if x != y)


# -- chain products and bounds ------------------------------------------------------


def balanced_partition(n: int, parts: int) -> list[int]:
    """Sizes of ``parts`` near-equal blocks, larger blocks first."""
    if parts < 1 or parts > n:
        raise InvalidInput(f"cannot split {n} elements into {parts} nonempty parts")
    q, r = divmod(n, parts)
    return [q + 1] * r + [q] * (parts - r)


def chain_product_family(part_sizes: list[int]) -> Family:
    """All unions of one prefix chain member per consecutive block."""
    if not part_sizes:
        raise InvalidInput("need at least one part")
    if any(s < 1 for s in part_sizes):
        raise InvalidInput("parts must be nonempty")
    n = sum(part_sizes)
    if n > 64:
        raise InvalidInput("ground size above 64")
    chains = []
    start = 0
    for s in part_sizes:
        chains.append([((1 << i) - 1) << start for i in range(s + 1)])
        start += s
    return Family(n, (reduce(lambda a, b: a | b, combo, 0) for combo in product(*chains)))


@dataclass(frozen=True)
class SeparabilityBounds:
    n: int
    t: int
    lower: int
    upper: int
    exact: int | None = None

    def to_json(self) -> dict:
        doc = {"n": self.n, "t": self.t, "lower": self.lower, "upper": self.upper}
        if self.exact is not None:
            doc["exact"] = self.exact
        return doc


def separability_bounds(n: int, t: int) -> SeparabilityBounds:
    from .hypergraph import g_reference

    if not 2 <= t <= n:
        raise InvalidInput(f"need 2 <= t <= n, got n={n}, t={t}")
    lower = prod(s + 1 for s in balanced_partition(n, t - 1)) + 1
    if t == 2:
        return SeparabilityBounds(n, t, n + 2, n + 2, n + 2)
    if t == 3:
        exact = n * n // 4 + n + 2
        return SeparabilityBounds(n, t, exact, exact, exact)
    if t - 1 in (2, 3, 4):
        upper = g_reference(n, t - 1) + 1 + sum(comb(n, i) for i in range(t - 1))
    else:
        upper = 1 + sum(comb(n, i) for i in range(t))
    return SeparabilityBounds(n, t, lower, upper)


def p_bounds(n: int, k: int) -> tuple[int, int]:
    """Bounds on the family size forcing a shattered size-k matching."""
    if not 1 <= 2 * k <= n:
        raise InvalidInput(f"need 1 <= 2k <= n, got n={n}, k={k}")
    lower = prod(s + 1 for s in balanced_partition(n, 2 * k - 1)) + 1
    upper = 1 + sum(comb(n, i) for i in range(2 * k))
    return lower, upper


# -- exhaustive small cases ---------------------------------------------------------
#
# A family over an n-set is an integer whose bit S is set when subset S is a
# member, so all 2^(2^n) families are the integers below 2^(2^n).

EXHAUSTIVE_CHUNK = 1 << 22


def _avoid_masks(n: int) -> dict[tuple[int, int], int]:
    """Family-level mask of the subsets holding x but not y."""
    out = {}
    for x in range(n):
        for y in range(n):
            if x != y:
                out[x, y] = sum(1 << S for S in range(1 << n) if S >> x & 1 and not S >> y & 1)
    return out


def _family_dtype(n: int):
    return {0: np.uint8, 1: np.uint8, 2: np.uint8, 3: np.uint8, 4: np.uint16, 5: np.uint32}[n]


def _non_separable_max_slice(task) -> int:
    n, t, start, stop = task
    dt = _family_dtype(n)
    codes = np.arange(start, stop, dtype=np.uint64).astype(dt)
    sizes = np.bitwise_count(codes)
    best = -1
    # largest sizes first so the size cut-off prunes early
    for size in range(int(sizes.max()), -1, -1):
        if size <= best:
            break
        block = codes[sizes == size]
        if block.size == 0:
            continue
        sep = {key: (block & dt(m)) != 0 for key, m in _avoid_masks_cached(n).items()}
        separable = np.zeros(block.size, dtype=bool)
        for T in combinations(range(n), t):
            ok = np.ones(block.size, dtype=bool)
            for x in T:
                for y in T:
                    if x != y:
                        ok &= sep[x, y]
            separable |= ok
        if not separable.all():
            best = size
    return best


_AVOID_CACHE: dict[int, dict] = {}


def _avoid_masks_cached(n: int) -> dict[tuple[int, int], int]:
    if n not in _AVOID_CACHE:
        _AVOID_CACHE[n] = _avoid_masks(n)
    return _AVOID_CACHE[n]


def max_non_separable_size(n: int, t: int, allow_expensive: bool = False, workers: int = 1) -> int:
    if n > 5:
        raise InvalidInput("exhaustive family scans are limited to n <= 5")
    if n == 5 and not allow_expensive:
        raise InvalidInput("n = 5 scans 2^32 families; pass allow_expensive")
    if not 2 <= t <= n:
        raise InvalidInput(f"need 2 <= t <= n, got n={n}, t={t}")
    _avoid_masks_cached(n)
    total = 1 << (1 << n)
    tasks = [(n, t, a, z) for a, z in split_range(0, total, EXHAUSTIVE_CHUNK)]
    return max(map_ordered(_non_separable_max_slice, tasks, workers))


def s_exact_small(n: int, t: int, allow_expensive: bool = False, workers: int = 1) -> int:
    """Smallest s such that every family of at least s sets is t-separable."""
    return max_non_separable_size(n, t, allow_expensive, workers) + 1


# -- downward-closed families and arrows ---------------------------------------------


def _downsets(n: int) -> list[frozenset[int]]:
    if n == 0:
        return [frozenset(), frozenset({0})]
    smaller = _downsets(n - 1)
    top = 1 << (n - 1)
    out = []
    for a in smaller:
        for b in smaller:
            if b <= a:
                out.append(a | frozenset(s | top for s in b))
    return out


def enumerate_monotone_families(n: int) -> Iterator[Family]:
    """Every downward-closed family over an n-set, the empty family included."""
    if not 0 <= n <= 5:
        raise InvalidInput("monotone family enumeration is limited to n <= 5")
    for d in _downsets(n):
        yield Family(n, d)


def arrow_counterexample(n: int, m: int, a: int, b: int) -> Family | None:
    """A downward-closed family of >= m sets with fewer than b traces on every a-set."""
    if not 0 <= n <= 5:
        raise InvalidInput("arrow checks are limited to n <= 5")
    if not 0 <= a <= n:
        raise InvalidInput(f"need 0 <= a <= n, got a={a}")
    for fam in enumerate_monotone_families(n):
        if fam.size < m:
            continue
        if not any(trace_count(fam, T) >= b for T in subsets_of_size(n, a)):
            return fam
    return None


def arrow_holds(n: int, m: int, a: int, b: int) -> bool:
    return arrow_counterexample(n, m, a, b) is None


def trace_threshold(t: int) -> int:
    """2^t - 2^(t-2) + 1 traces on a t-set force t-separability."""
    return 2**t - 2 ** (t - 2) + 1


def trace_criterion_T(f: Family, t: int) -> ElementSet | None:
    if not 2 <= t <= f.n:
        raise InvalidInput(f"need 2 <= t <= n, got t={t}, n={f.n}")
    need = trace_threshold(t)
    for T in subsets_of_size(f.n, t):
        if trace_count(f, T) >= need:
            return ElementSet(T, f.n)
    return None
