"""Ground sets and set families over at most 64 elements.

Every subset of the ground set {0, ..., n-1} is a single machine-word
bitmask: bit ``i`` set means element ``i`` is present. :class:`ElementSet`
wraps one such mask together with its ground size; :class:`Family` keeps a
sorted, deduplicated tuple of masks plus a hash set for O(1) membership.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import InvalidInput

MAX_N = 64


def full_mask(n: int) -> int:
    return (1 << n) - 1


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << e
    return mask


def compress(mask: int, onto: int) -> int:
    """Re-index ``mask & onto`` onto {0, ..., |onto|-1} by ascending element."""
    out = 0
    j = 0
    while onto:
        low = onto & -onto
        if mask & low:
            out |= 1 << j
        j += 1
        onto ^= low
    return out


def compress_array(masks: np.ndarray, onto: int) -> np.ndarray:
    """Vectorised :func:`compress` over a uint64 array."""
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.zeros(masks.shape, dtype=np.uint64)
    for j, e in enumerate(elements_of(onto)):
        out |= ((masks >> np.uint64(e)) & np.uint64(1)) << np.uint64(j)
    return out


def subsets_of_size(n: int, k: int) -> Iterator[int]:
    """k-subsets of {0..n-1} as masks, in ascending numeric order (Gosper)."""
    if k < 0 or k > n:
        return
    if k == 0:
        yield 0
        return
    s = (1 << k) - 1
    limit = 1 << n
    while s < limit:
        yield s
        low = s & -s
        r = s + low
        s = (((r ^ s) >> 2) // low) | r


def _check_n(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise InvalidInput(f"ground size must be in [0, {MAX_N}], got {n}")


@dataclass(frozen=True, slots=True)
class ElementSet:
    """A subset of {0, ..., n-1} stored as a bitmask."""

    bits: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise InvalidInput(f"bitmask {self.bits:#x} does not fit ground size {self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> ElementSet:
        elements = list(elements)
        for e in elements:
            if not 0 <= e < n:
                raise InvalidInput(f"element {e} outside [0, {n})")
        return cls(mask_of(elements), n)

    def __iter__(self) -> Iterator[int]:
        return iter(elements_of(self.bits))

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool(self.bits >> x & 1)

    def elements(self) -> tuple[int, ...]:
        return tuple(elements_of(self.bits))

    def __repr__(self) -> str:
        return f"ElementSet({{{', '.join(map(str, self))}}}, n={self.n})"


SetLike = Union[ElementSet, int]


def _bits(s: SetLike) -> int:
    return s.bits if isinstance(s, ElementSet) else int(s)


class Family:
    """Deduplicated collection of subsets of a fixed ground set.

    Members are held as integer bitmasks sorted ascending; equality ignores
    construction order. Instances are treated as immutable.
    """

    __slots__ = ("n", "masks", "_lookup", "_array")

    def __init__(self, n: int, masks: Iterable[SetLike] = ()):
        _check_n(n)
        bits = {_bits(m) for m in masks}
        limit = 1 << n
        for b in bits:
            if b < 0 or b >= limit:
                raise InvalidInput(f"member {b:#x} does not fit ground size {n}")
        self.n = n
        self.masks: tuple[int, ...] = tuple(sorted(bits))
        self._lookup = frozenset(bits)
        self._array = None

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> Family:
        return cls(n, (ElementSet.of(n, s).bits for s in sets))

    @classmethod
    def powerset(cls, n: int, of: SetLike | None = None) -> Family:
        """All subsets of ``of`` (default: the whole ground set)."""
        top = full_mask(n) if of is None else _bits(of)
        return cls(n, submasks(top))

    @property
    def size(self) -> int:
        return len(self.masks)

    @property
    def array(self) -> np.ndarray:
        if self._array is None:
            arr = np.array(self.masks, dtype=np.uint64)
            arr.flags.writeable = False
            self._array = arr
        return self._array

    @property
    def sets(self) -> tuple[ElementSet, ...]:
        return tuple(ElementSet(m, self.n) for m in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[ElementSet]:
        return (ElementSet(m, self.n) for m in self.masks)

    def __contains__(self, item: SetLike) -> bool:
        return _bits(item) in self._lookup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.n == other.n and self._lookup == other._lookup

    def __hash__(self) -> int:
        return hash((self.n, self._lookup))

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, elements_of(m))) + "}" for m in self.masks[:8])
        more = ", ..." if self.size > 8 else ""
        return f"Family(n={self.n}, size={self.size}, [{body}{more}])"

    def union(self, other: Family) -> Family:
        if other.n != self.n:
            raise InvalidInput("ground sizes differ")
        return Family(self.n, self._lookup | other._lookup)

    def with_member(self, s: SetLike) -> Family:
        return Family(self.n, self._lookup | {_bits(s)})


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, largest first, ending with 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


# -- primitive algebra -----------------------------------------------------


def complement(s: ElementSet) -> ElementSet:
    return ElementSet(full_mask(s.n) ^ s.bits, s.n)


def trace_family(f: Family, t: SetLike) -> Family:
    """The traces ``F & t`` of all members, re-indexed onto {0, ..., |t|-1}."""
    t = _bits(t)
    if t >> f.n:
        raise InvalidInput("trace set does not fit the family's ground size")
    k = t.bit_count()
    if f.size > 256:
        traces = np.unique(compress_array(f.array & np.uint64(t), t))
        return Family(k, (int(x) for x in traces))
    return Family(k, {compress(m, t) for m in f.masks})


def trace_count(f: Family, t: SetLike) -> int:
    """Number of distinct traces on ``t`` (no re-indexing needed)."""
    t = _bits(t)
    if f.size > 256:
        return int(np.unique(f.array & np.uint64(t)).size)
    return len({m & t for m in f.masks})


def downward_closure(f: Family) -> Family:
    closed: set[int] = set()
    # largest first: a set already present had all its subsets added with it
    for m in sorted(f.masks, key=int.bit_count, reverse=True):
        if m not in closed:
            closed.update(submasks(m))
    return Family(f.n, closed)


def is_downward_closed(f: Family) -> bool:
    for m in f.masks:
        rest = m
        while rest:
            low = rest & -rest
            if (m ^ low) not in f:
                return False
            rest ^= low
    return True


def is_intersecting(f: Family) -> bool:
    masks = f.masks
    if len(masks) <= 1:
        return True
    if len(masks) > 512:
        arr = f.array
        for i, m in enumerate(masks):
            if np.any((arr[i:] & np.uint64(m)) == 0):
                return False
        return True
    for i, a in enumerate(masks):
        for b in masks[i:]:
            if not a & b:
                return False
    return True


def is_maximal_intersecting_halfsize(f: Family) -> bool:
    """Exactly one of each complementary pair of n/2-sets is a member."""
    n = f.n
    if n % 2:
        raise InvalidInput(f"ground size must be even, got {n}")
    half = n // 2
    if f.size != comb(n, half) // 2:
        return False
    top = full_mask(n)
    for m in f.masks:
        if m.bit_count() != half or (top ^ m) in f:
            return False
    return True


def shatters(f: Family, a: SetLike) -> bool:
    a = _bits(a)
    return trace_count(f, a) == 1 << a.bit_count()


def vc_dim(f: Family) -> int:
    """Size of the largest set shattered by ``f``.

    Shattering is hereditary, so the search goes up one size at a time and
    stops at the first size with no shattered set, or at floor(log2 |f|).
    """
    if f.size == 0:
        raise InvalidInput("VC dimension of the empty family is undefined")
    cap = min(f.size.bit_length() - 1, f.n)
    best = 0
    for d in range(1, cap + 1):
        if not any(shatters(f, a) for a in subsets_of_size(f.n, d)):
            break
        best = d
    return best


def shattered_set(f: Family, d: int) -> ElementSet | None:
    """First d-set (ascending bitmask) shattered by ``f``, if any."""
    for a in subsets_of_size(f.n, d):
        if shatters(f, a):
            return ElementSet(a, f.n)
    return None


def sauer_bound(n: int, k: int) -> int:
    """sum_{i<k} C(n, i): any larger family has VC dimension at least k."""
    return sum(comb(n, i) for i in range(k))


# -- text format -------------------------------------------------------------


def format_family(f: Family) -> str:
    lines = [f"n={f.n}"]
    for m in f.masks:
        lines.append(" ".join(map(str, elements_of(m))) if m else "-")
    return "\n".join(lines) + "\n"


def _parse_header(line: str, key: str) -> int:
    line = line.strip()
    if not line.startswith(key + "="):
        raise InvalidInput(f"expected '{key}=<int>' header, got {line!r}")
    try:
        return int(line[len(key) + 1:])
    except ValueError:
        raise InvalidInput(f"bad header {line!r}") from None


def _parse_member(line: str, n: int, lineno: int) -> int:
    if line == "-":
        return 0
    try:
        elems = [int(tok) for tok in line.split()]
    except ValueError:
        raise InvalidInput(f"line {lineno}: non-integer token in {line!r}") from None
    for a, b in zip(elems, elems[1:]):
        if a >= b:
            raise InvalidInput(f"line {lineno}: elements must be strictly ascending")
    for e in elems:
        if not 0 <= e < n:
            raise InvalidInput(f"line {lineno}: element {e} outside [0, {n})")
    return mask_of(elems)


def _parse_members(lines: list[str], n: int, first_lineno: int) -> list[int]:
    seen: set[int] = set()
    out = []
    for i, raw in enumerate(lines, start=first_lineno):
        line = raw.strip()
        if not line:
            continue
        m = _parse_member(line, n, i)
        if m in seen:
            raise InvalidInput(f"line {i}: duplicate member {line!r}")
        seen.add(m)
        out.append(m)
    return out


def parse_family(text: str) -> Family:
    lines = text.splitlines()
    if not lines:
        raise InvalidInput("empty family file")
    n = _parse_header(lines[0], "n")
    _check_n(n)
    return Family(n, _parse_members(lines[1:], n, 2))


def read_family(path) -> Family:
    with open(path) as fh:
        return parse_family(fh.read())


def write_family(path, f: Family) -> None:
    with open(path, "w") as fh:
        fh.write(format_family(f))


def family_hash(f: Family) -> str:
    """First 64 bits of SHA-256 over the serialized family, as 16 hex digits."""
    return hashlib.sha256(format_family(f).encode()).hexdigest()[:16]


def random_family(rng: np.random.Generator, n: int, size: int) -> Family:
    """``size`` distinct subsets of an n-set drawn uniformly without replacement."""
    total = 1 << n
    size = min(size, total)
    if n <= 20:
        picks = rng.choice(total, size=size, replace=False)
        return Family(n, (int(x) for x in picks))
    seen: set[int] = set()
    while len(seen) < size:
        seen.add(int(rng.integers(0, total, dtype=np.uint64)))
    return Family(n, seen)

