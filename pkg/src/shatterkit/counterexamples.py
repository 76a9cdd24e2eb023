"""Odd-n counterexamples, r-element systems and disjoint representability."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb

import numpy as np

from .errors import InvalidInput
from .family import (
    ElementSet,
    Family,
    elements_of,
    full_mask,
    is_maximal_intersecting_halfsize,
    mask_of,
    subsets_of_size,
)
from .matchings import Matching, matching_table, snake_table
from .parallel import map_ordered, split_range


@dataclass(frozen=True)
class OddCounterexample:
    """Family on n = 2k+1 points built from a maximal family ``g`` on V = {0..n-2}.

    Members: the sets of ``g``, each of them plus x = n-1, and every
    (k+1)-subset of V.
    """

    n: int
    v_set: ElementSet
    x: int
    g: Family
    family: Family

    @property
    def k(self) -> int:
        return (self.n - 1) // 2


def build_odd_counterexample(g: Family, n: int) -> OddCounterexample:
    if n % 2 == 0:
        raise InvalidInput(f"ground size must be odd, got {n}")
    if g.n != n - 1:
        raise InvalidInput(f"base family must live on {n - 1} points, got {g.n}")
    if not is_maximal_intersecting_halfsize(g):
        raise InvalidInput("base family is not maximal intersecting with members of size (n-1)/2")
    k = (n - 1) // 2
    x = n - 1
    top = 1 << x
    members = set(g.masks)
    members.update(m | top for m in g.masks)
    members.update(subsets_of_size(n - 1, k + 1))
    return OddCounterexample(n, ElementSet(full_mask(n - 1), n), x, g, Family(n, members))


def odd_family_is_maximal(c: OddCounterexample) -> bool:
    """Exactly one of Y, X minus Y is a member for every k-set Y, and sizes are k or k+1."""
    n, k = c.n, c.k
    top = full_mask(n)
    fam = c.family
    if any(m.bit_count() not in (k, k + 1) for m in fam.masks):
        return False
    for y in subsets_of_size(n, k):
        if (y in fam) == ((top ^ y) in fam):
            return False
    return True


@dataclass(frozen=True)
class ConjectureBReport:
    n: int
    ys_checked: int
    matchings_per_y: int
    witness: tuple[int, Matching] | None

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            y, m = self.witness
            w = {"y": y, "matching": m.to_json()}
        return {
            "n": self.n,
            "ys_checked": self.ys_checked,
            "matchings_per_y": self.matchings_per_y,
            "witness": w,
        }


B_CHUNK = 1 << 14


@lru_cache(maxsize=4)
def _membership_table(masks: tuple[int, ...], n: int) -> np.ndarray:
    table = np.zeros(1 << n, dtype=bool)
    table[list(masks)] = True
    return table


def _b_slice(task) -> int:
    """First matching index in [start, stop) extending for y, or -1."""
    masks, n, y, start, stop = task
    others = np.array([e for e in range(n) if e != y], dtype=np.int8)
    pairs = others[matching_table(n - 1, (n - 1) // 2)[start:stop]]
    snakes = snake_table(pairs) | np.uint64(1 << y)
    if n <= 26:
        hit = _membership_table(masks, n)[snakes.astype(np.int64)]
    else:
        sorted_members = np.array(masks, dtype=np.uint64)
        pos = np.minimum(np.searchsorted(sorted_members, snakes), sorted_members.size - 1)
        hit = sorted_members[pos] == snakes
    good = np.flatnonzero(hit.all(axis=1))
    return start + int(good[0]) if good.size else -1


def verify_conjecture_B(c: OddCounterexample | Family, workers: int = 1) -> ConjectureBReport:
    """Search every y and perfect matching of X minus y whose snakes all extend by y.

    An empty witness certifies that the conjectured matching does not exist.
    """
    fam = c.family if isinstance(c, OddCounterexample) else c
    n = fam.n
    if n % 2 == 0:
        raise InvalidInput("conjecture B concerns odd ground sizes")
    table = matching_table(n - 1, (n - 1) // 2)
    per_y = table.shape[0]
    masks = fam.masks
    if n <= 26:
        _membership_table(masks, n)
    witness = None
    ys_checked = 0
    for y in range(n):
        ys_checked += 1
        tasks = [(masks, n, y, a, z) for a, z in split_range(0, per_y, B_CHUNK)]
        hits = [h for h in map_ordered(_b_slice, tasks, workers) if h >= 0]
        if hits:
            others = [e for e in range(n) if e != y]
            row = table[hits[0]]
            witness = (y, Matching(n, tuple((others[a], others[b]) for a, b in row.tolist())))
            break
    return ConjectureBReport(n, ys_checked, per_y, witness)


def conjecture_B_holds_for(fam: Family, y: int, m: Matching) -> bool:
    """Scalar check: every snake of m plus y is a member."""
    from .matchings import snakes

    return all((s.bits | 1 << y) in fam for s in snakes(m))


# -- r-element systems ------------------------------------------------------------------


@dataclass(frozen=True)
class RSystem:
    """Pairwise disjoint r-element sets; r = 2 is allowed for cross-checks."""

    n: int
    tuples: tuple[int, ...]
    r: int

    def __post_init__(self):
        if self.r < 2:
            raise InvalidInput("tuples need at least two elements")
        seen = 0
        for t in self.tuples:
            if t >> self.n or t.bit_count() != self.r:
                raise InvalidInput(f"tuple {elements_of(t)} is not an {self.r}-subset of [0, {self.n})")
            if seen & t:
                raise InvalidInput("tuples must be pairwise disjoint")
            seen |= t
        object.__setattr__(self, "tuples", tuple(self.tuples))

    @classmethod
    def from_sets(cls, n: int, tuples) -> RSystem:
        tuples = [ElementSet.of(n, t).bits for t in tuples]
        r = tuples[0].bit_count() if tuples else 3
        return cls(n, tuple(tuples), r)

    @property
    def support(self) -> int:
        out = 0
        for t in self.tuples:
            out |= t
        return out


def is_r_system_shattered(f: Family, sys: RSystem) -> bool:
    if sys.n != f.n:
        raise InvalidInput("system and family have different ground sizes")
    sup = sys.support
    traces = {F & sup for F in f.masks}
    if len(traces) < sys.r ** len(sys.tuples):
        return False
    return all(mask_of(pick) in traces for pick in product(*(elements_of(t) for t in sys.tuples)))


def kr_trivial_bound(n: int, r: int) -> int:
    """n / (2(r-1)), a strict upper bound on k_r(n) when 2(r-1) divides n."""
    if r < 3:
        raise InvalidInput(f"need r >= 3, got {r}")
    if n % (2 * (r - 1)):
        raise InvalidInput(f"{2 * (r - 1)} does not divide {n}")
    return n // (2 * (r - 1))


# -- disjoint representability -------------------------------------------------------------


def f_ab_family(n: int) -> Family:
    """Prefix-plus-suffix sets leaving a nonempty middle gap, plus the full set.

    With elements 1..n stored as 0..n-1 and cut points a < b among
    1/2, 3/2, ..., n+1/2, F(a, b) keeps the elements below a and above b.
    The degenerate cut a = b gives the whole ground set.
    """
    if n < 3:
        raise InvalidInput(f"need n >= 3, got {n}")
    members = {full_mask(n)}
    for a, b in combinations(range(n + 1), 2):
        # cut a sits just before 0-based element a
        prefix = (1 << a) - 1
        suffix = full_mask(n) ^ ((1 << b) - 1)
        members.add(prefix | suffix)
    return Family(n, members)


def has_disjointly_representable(f: Family, t: int) -> tuple[tuple[ElementSet, ...], tuple[int, ...]] | None:
    """t members with private representatives x_i (x_i in F_j iff i = j), or None.

    Searches t-sets of elements: members F_i with F_i & {x_1..x_t} = {x_i}
    are exactly a disjointly representable choice.
    """
    if t < 2:
        raise InvalidInput(f"need t >= 2, got {t}")
    for T in subsets_of_size(f.n, t):
        owner: dict[int, int] = {}
        for F in f.masks:
            tr = F & T
            if tr and tr & (tr - 1) == 0 and tr not in owner:
                owner[tr] = F
                if len(owner) == t:
                    reps = elements_of(T)
                    members = tuple(ElementSet(owner[1 << x], f.n) for x in reps)
                    return members, tuple(reps)
    return None


def disjointly_representable_by_members(f: Family, t: int) -> tuple[int, ...] | None:
    """Reference search over t-subsets of members using private elements."""
    masks = f.masks
    for combo in combinations(range(len(masks)), t):
        sets = [masks[i] for i in combo]
        ok = True
        for i, s in enumerate(sets):
            rest = 0
            for j, o in enumerate(sets):
                if j != i:
                    rest |= o
            if not s & ~rest:
                ok = False
                break
        if ok:
            return tuple(sets)
    return None


def max_family_without_disrep(n: int, t: int) -> int:
    """Largest family over an n-set (n <= 4) with no t disjointly representable members."""
    if n > 4:
        raise InvalidInput("exhaustive scan is limited to n <= 4")
    codes = np.arange(1 << (1 << n), dtype=np.uint64)
    has = np.zeros(codes.size, dtype=bool)
    for T in subsets_of_size(n, t):
        ok = np.ones(codes.size, dtype=bool)
        for x in elements_of(T):
            cls = sum(1 << S for S in range(1 << n) if S & T == 1 << x)
            ok &= (codes & np.uint64(cls)) != 0
        has |= ok
    sizes = np.bitwise_count(codes)
    return int(sizes[~has].max())


def disrep_threshold_claim(n: int) -> int:
    """C(n, 2) + n + 2."""
    return comb(n, 2) + n + 2
