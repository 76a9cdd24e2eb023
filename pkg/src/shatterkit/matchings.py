"""Matchings, snakes and shattered matchings.

A matching of size k is k pairwise-disjoint pairs of ground elements. A snake
picks one element from each pair; bit i of the choice selects the larger
element of pair i. A family shatters a matching when every snake occurs as
the trace of some member on the matching's support.

Canonical form puts the smaller element first in each pair and sorts pairs
by first element. Canonical order over all size-k matchings is the
lexicographic order of the flattened tuples ``(a1, b1, a2, b2, ...)``; it is
the order produced by pairing the smallest free element first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInput
from .family import ElementSet, Family, is_maximal_intersecting_halfsize, mask_of
from .parallel import imap_ordered, split_range

Pair = tuple[int, int]

SCAN_CHUNK = 1 << 15


@dataclass(frozen=True)
class Matching:
    n: int
    pairs: tuple[Pair, ...]

    def __post_init__(self):
        canon = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        seen: set[int] = set()
        for a, b in canon:
            if a == b:
                raise InvalidInput(f"pair ({a}, {b}) repeats an element")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise InvalidInput(f"pair ({a}, {b}) outside [0, {self.n})")
            if a in seen or b in seen:
                raise InvalidInput("pairs of a matching must be disjoint")
            seen.update((a, b))
        object.__setattr__(self, "pairs", canon)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def support(self) -> int:
        return mask_of(e for p in self.pairs for e in p)

    @property
    def support_set(self) -> ElementSet:
        return ElementSet(self.support, self.n)

    def snake_bits(self, choice: int) -> int:
        return snake_mask(self.pairs, choice)

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]

    def __repr__(self) -> str:
        return "Matching(" + " ".join(f"{{{a},{b}}}" for a, b in self.pairs) + f", n={self.n})"


@dataclass(frozen=True)
class Snake:
    matching: Matching
    choice: int

    def __post_init__(self):
        if not 0 <= self.choice < 1 << self.matching.k:
            raise InvalidInput(f"choice {self.choice} out of range for k={self.matching.k}")

    @property
    def bits(self) -> int:
        return snake_mask(self.matching.pairs, self.choice)

    @property
    def elements(self) -> ElementSet:
        return ElementSet(self.bits, self.matching.n)

    def complementary(self) -> Snake:
        """The snake picking the other element of every pair."""
        return Snake(self.matching, self.choice ^ ((1 << self.matching.k) - 1))


def snake_mask(pairs: Sequence[Pair], choice: int) -> int:
    mask = 0
    for i, (a, b) in enumerate(pairs):
        mask |= 1 << (b if choice >> i & 1 else a)
    return mask


def matching_count(n: int, k: int) -> int:
    """n! / ((n-2k)! k! 2^k)."""
    if k < 0 or 2 * k > n:
        raise InvalidInput(f"need 0 <= 2k <= n, got n={n}, k={k}")
    return factorial(n) // (factorial(n - 2 * k) * factorial(k) * 2**k)


def perfect_matching_count(m: int) -> int:
    """(m-1)!! perfect matchings on m points."""
    return matching_count(m, m // 2)


def _matching_tuples(n: int, k: int) -> Iterator[tuple[Pair, ...]]:
    used = [False] * n
    pairs: list[Pair] = []

    def rec(i: int, left: int) -> Iterator[tuple[Pair, ...]]:
        if left == 0:
            yield tuple(pairs)
            return
        while i < n and used[i]:
            i += 1
        free = sum(1 for j in range(i, n) if not used[j])
        if free < 2 * left:
            return
        used[i] = True
        for j in range(i + 1, n):
            if not used[j]:
                used[j] = True
                pairs.append((i, j))
                yield from rec(i + 1, left - 1)
                pairs.pop()
                used[j] = False
        used[i] = False
        if free - 1 >= 2 * left:
            yield from rec(i + 1, left)

    yield from rec(0, k)


def enumerate_matchings(n: int, k: int) -> Iterator[Matching]:
    """Every size-k matching of {0..n-1} exactly once, in canonical order."""
    matching_count(n, k)  # validates
    if n > 64:
        raise InvalidInput("ground size above 64")
    for pairs in _matching_tuples(n, k):
        yield Matching(n, pairs)


@lru_cache(maxsize=16)
def matching_table(n: int, k: int) -> np.ndarray:
    """All size-k matchings as an int8 array of shape (count, k, 2), canonical order."""
    count = matching_count(n, k)
    flat = np.fromiter(
        (e for pairs in _matching_tuples(n, k) for p in pairs for e in p),
        dtype=np.int8,
        count=count * 2 * k,
    )
    table = flat.reshape(count, k, 2)
    table.flags.writeable = False
    return table


def snakes(m: Matching) -> Iterator[Snake]:
    for c in range(1 << m.k):
        yield Snake(m, c)


def is_carved(f: Family, m: Matching, s: Snake) -> bool:
    if s.matching != m:
        raise InvalidInput("snake does not belong to the matching")
    sup = m.support
    target = s.bits
    return any(F & sup == target for F in f.masks)


def is_shattered(f: Family, m: Matching) -> bool:
    if m.k == 0:
        return f.size >= 1
    sup = m.support
    traces = {F & sup for F in f.masks}
    if len(traces) < 1 << m.k:
        return False
    return all(snake_mask(m.pairs, c) in traces for c in range(1 << m.k))


# -- vectorised scanning -------------------------------------------------------


def snake_table(pairs: np.ndarray) -> np.ndarray:
    """Snake bitmasks for a (m, k, 2) pair array; column c is choice c."""
    pairs = np.asarray(pairs)
    m, k = pairs.shape[0], pairs.shape[1]
    one = np.uint64(1)
    lo = one << pairs[:, :, 0].astype(np.uint64)
    hi = one << pairs[:, :, 1].astype(np.uint64)
    choices = np.arange(1 << k, dtype=np.int64)
    out = np.zeros((m, 1 << k), dtype=np.uint64)
    for i in range(k):
        pick_hi = ((choices >> i) & 1).astype(bool)
        out |= np.where(pick_hi[None, :], hi[:, i : i + 1], lo[:, i : i + 1])
    return out


def support_masks(pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs)
    one = np.uint64(1)
    bits = (one << pairs[:, :, 0].astype(np.uint64)) | (one << pairs[:, :, 1].astype(np.uint64))
    return np.bitwise_or.reduce(bits, axis=1) if pairs.shape[1] else np.zeros(pairs.shape[0], np.uint64)


def scan_pairs(members: np.ndarray, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shattered flag and first uncarved snake (or -1) for each matching row.

    Matchings are grouped by support so each group needs a single pass over
    the family to collect its traces.
    """
    members = np.asarray(members, dtype=np.uint64)
    rows = pairs.shape[0]
    snakes_ = snake_table(pairs)
    sup = support_masks(pairs)
    present = np.zeros(snakes_.shape, dtype=bool)
    if members.size:
        uniq, inv = np.unique(sup, return_inverse=True)
        order = np.argsort(inv, kind="stable")
        bounds = np.searchsorted(inv[order], np.arange(len(uniq) + 1))
        for g, u in enumerate(uniq):
            idx = order[bounds[g] : bounds[g + 1]]
            traces = np.unique(members & u)
            s = snakes_[idx]
            pos = np.minimum(np.searchsorted(traces, s), traces.size - 1)
            present[idx] = traces[pos] == s
    shattered = present.all(axis=1)
    first_missing = np.where(shattered, -1, np.argmin(present, axis=1)).astype(np.int64)
    assert first_missing.shape == (rows,)
    return shattered, first_missing


def _scan_slice(task):
    members, n, k, start, stop = task
    return scan_pairs(members, matching_table(n, k)[start:stop])


def scan_all_matchings(
    f: Family, k: int, workers: int = 1, stop_at_first: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Run :func:`scan_pairs` over every size-k matching in canonical order.

    With ``stop_at_first`` the scan ends after the first slice containing a
    shattered matching; the returned arrays are then truncated there.
    """
    table = matching_table(f.n, k)  # built before any fork
    slices = split_range(0, table.shape[0], SCAN_CHUNK)
    members = np.array(f.array)
    tasks = [(members, f.n, k, a, z) for a, z in slices]
    shattered_parts, missing_parts = [], []
    results = imap_ordered(_scan_slice, tasks, workers)
    try:
        for sh, miss in results:
            shattered_parts.append(sh)
            missing_parts.append(miss)
            if stop_at_first and sh.any():
                break
    finally:
        results.close()
    return np.concatenate(shattered_parts), np.concatenate(missing_parts)


def first_shattered(f: Family, k: int, workers: int = 1) -> Matching | None:
    if k == 0:
        return Matching(f.n, ()) if f.size else None
    shattered, _ = scan_all_matchings(f, k, workers, stop_at_first=True)
    hits = np.flatnonzero(shattered)
    if hits.size == 0:
        return None
    row = matching_table(f.n, k)[hits[0]]
    return Matching(f.n, tuple((int(a), int(b)) for a, b in row))


def max_shattered_size(
    f: Family, k_min: int, k_max: int, workers: int = 1
) -> tuple[int, Matching | None]:
    """Largest k in [k_min, k_max] with a shattered matching, and the first witness."""
    if not 0 <= k_min <= k_max <= f.n // 2:
        raise InvalidInput(f"need 0 <= k_min <= k_max <= n/2, got [{k_min}, {k_max}]")
    for k in range(k_max, k_min - 1, -1):
        witness = first_shattered(f, k, workers)
        if witness is not None:
            return k, witness
    return k_min - 1, None


# -- the lower-bound dichotomy -------------------------------------------------


@dataclass(frozen=True)
class DichotomyReport:
    first: Matching
    rest: Matching
    first_shattered: bool
    rest_shattered: bool

    @property
    def holds(self) -> bool:
        return self.first_shattered or self.rest_shattered


def dichotomy_check(f: Family, perfect: Matching | Sequence[Pair], k: int) -> DichotomyReport:
    """Split a perfect matching after its first k pairs and test both halves.

    ``perfect`` may be an ordered pair list; a :class:`Matching` is split in
    canonical order.
    """
    pairs = list(perfect.pairs if isinstance(perfect, Matching) else perfect)
    n = f.n
    if n % 2 or not is_maximal_intersecting_halfsize(f):
        raise InvalidInput("family is not maximal intersecting with members of size n/2")
    full = Matching(n, tuple(pairs))
    if 2 * full.k != n:
        raise InvalidInput("matching is not perfect")
    if not 1 <= k <= n // 2 - 1:
        raise InvalidInput(f"split k must be in [1, {n // 2 - 1}], got {k}")
    first = Matching(n, tuple(pairs[:k]))
    rest = Matching(n, tuple(pairs[k:]))
    return DichotomyReport(first, rest, is_shattered(f, first), is_shattered(f, rest))


def random_perfect_matching(rng: np.random.Generator, n: int) -> list[Pair]:
    """Uniform perfect matching of {0..n-1}, pairs in random order."""
    if n % 2:
        raise InvalidInput("perfect matchings need an even ground size")
    perm = [int(x) for x in rng.permutation(n)]
    return [(perm[2 * i], perm[2 * i + 1]) for i in range(n // 2)]


def claim1_bound(n: int, k: int) -> int:
    """n! / (k! 2^k); exceeds the number of size-k matchings unless n - 2k <= 1, where they are equal."""
    return factorial(n) // (factorial(k) * 2**k)


def complementary_snake_pairs(k: int) -> list[tuple[int, int]]:
    """The 2^(k-1) unordered {choice, flipped choice} pairs."""
    full = (1 << k) - 1
    return [(c, c ^ full) for c in range(1 << k) if c < c ^ full]

