"""Random maximal intersecting families of n/2-sets, and the refutation search.

The n/2-subsets of an even ground set split into C(n, n/2)/2 complementary
pairs. Listing each pair by its smaller bitmask (the side without element
n-1) in ascending order, one fair coin per pair picks a side: 0 keeps the
listed set, 1 takes its complement. Any such choice is a maximal
intersecting family, and every such family arises from exactly one choice.

Coins come from PCG64 seeded with the trial seed: word j of
``random_raw`` supplies coins 64*j .. 64*j+63, least significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, exp, log1p, sqrt
from typing import Iterator

import numpy as np

from .errors import InvalidInput
from .family import Family, full_mask, is_maximal_intersecting_halfsize, subsets_of_size
from .matchings import (
    Matching,
    is_carved,
    matching_count,
    matching_table,
    scan_all_matchings,
    snake_mask,
    Snake,
)
from .parallel import map_ordered, split_range

GENERATOR_ID = "pcg64-rawbits-v1"


@dataclass(frozen=True)
class RandomFamilySpec:
    n: int
    seed: int
    generator_id: str = GENERATOR_ID


@lru_cache(maxsize=32)
def pair_representatives(n: int) -> np.ndarray:
    """Smaller side of each complementary n/2-pair, ascending."""
    if n % 2 or n < 2:
        raise InvalidInput(f"need an even ground size, got {n}")
    top = 1 << (n - 1)
    reps = np.fromiter(
        (s for s in subsets_of_size(n, n // 2) if not s & top), dtype=np.uint64
    )
    reps.flags.writeable = False
    return reps


def coin_bits(seed: int, count: int, generator_id: str = GENERATOR_ID) -> np.ndarray:
    if generator_id != GENERATOR_ID:
        raise InvalidInput(f"unknown generator {generator_id!r}")
    if not 0 <= seed < 1 << 64:
        raise InvalidInput("seed must be an unsigned 64-bit integer")
    words = np.random.PCG64(seed).random_raw((count + 63) // 64)
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")
    return bits[:count].astype(bool)


def _family_from_coins(n: int, coins: np.ndarray) -> Family:
    reps = pair_representatives(n)
    chosen = np.where(coins, reps ^ np.uint64(full_mask(n)), reps)
    return Family(n, (int(x) for x in chosen))


def random_mif(spec: RandomFamilySpec) -> Family:
    n = spec.n
    if n % 2:
        raise InvalidInput(f"ground size must be even, got {n}")
    if not 4 <= n <= 28:
        raise InvalidInput(f"ground size must be in [4, 28], got {n}")
    reps = pair_representatives(n)
    return _family_from_coins(n, coin_bits(spec.seed, reps.size, spec.generator_id))


def all_maximal_halfsize(n: int) -> Iterator[Family]:
    """Every maximal intersecting family of n/2-sets; only n <= 6 is allowed."""
    if n % 2 or not 2 <= n <= 6:
        raise InvalidInput("exhaustive enumeration is limited to n in {2, 4, 6}")
    reps = pair_representatives(n)
    p = reps.size
    for code in range(1 << p):
        coins = np.array([code >> i & 1 for i in range(p)], dtype=bool)
        yield _family_from_coins(n, coins)


# -- exact probabilities ---------------------------------------------------------


def _check_ell(ell: int) -> None:
    if ell < 1:
        raise InvalidInput(f"need ell >= 1, got {ell}")


def not_carved_probability(ell: int) -> Fraction:
    """Chance that a fixed snake is not carved: 2^-C(2l, l)."""
    _check_ell(ell)
    return Fraction(1, 2 ** comb(2 * ell, ell))


def shattered_probability(k: int, ell: int) -> float:
    """(1 - 2 * 2^-C(2l, l)) ** 2^(k-1)."""
    if k < 1:
        raise InvalidInput(f"need k >= 1, got {k}")
    _check_ell(ell)
    q = 2.0 * 2.0 ** -comb(2 * ell, ell)
    return exp(2 ** (k - 1) * log1p(-q))


def expected_shattered_count(n: int, k: int) -> float:
    if n % 2:
        raise InvalidInput("ground size must be even")
    ell = n // 2 - k
    _check_ell(ell)
    return matching_count(n, k) * shattered_probability(k, ell)


# -- Monte Carlo for the not-carved probability ----------------------------------


@dataclass(frozen=True)
class FrequencyReport:
    n: int
    k: int
    snake_index: int
    trials: int
    seed: int
    not_carved: int
    target: Fraction
    generator_id: str = GENERATOR_ID

    @property
    def frequency(self) -> float:
        return self.not_carved / self.trials

    @property
    def sigma(self) -> float:
        p = float(self.target)
        return sqrt(p * (1 - p) / self.trials)

    @property
    def z_score(self) -> float:
        return (self.frequency - float(self.target)) / self.sigma

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "ell": self.n // 2 - self.k,
            "snake_index": self.snake_index,
            "trials": self.trials,
            "seed": self.seed,
            "generator_id": self.generator_id,
            "not_carved": self.not_carved,
            "frequency": self.frequency,
            "target": float(self.target),
            "target_exact": str(self.target),
            "sigma": self.sigma,
            "z_score": self.z_score,
        }


MC_CHUNK = 20_000


def _not_carved_slice(task) -> np.ndarray:
    n, k, snake_indices, seed, start, stop = task
    reps = pair_representatives(n)
    comps = reps ^ np.uint64(full_mask(n))
    pairs = tuple((2 * i, 2 * i + 1) for i in range(k))
    support = np.uint64(full_mask(2 * k))
    targets = [np.uint64(snake_mask(pairs, c)) for c in snake_indices]
    coins = np.stack([coin_bits(seed + t, reps.size) for t in range(start, stop)])
    traces = np.where(coins, comps, reps) & support
    return np.stack([~np.any(traces == tg, axis=1) for tg in targets], axis=1)


def not_carved_matrix(
    n: int, k: int, snake_indices: list[int], trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Per-trial not-carved flags, shape (trials, len(snake_indices)).

    Trial t uses the family drawn from seed + t; the matching is
    {0,1},{2,3},...,{2k-2,2k-1}.
    """
    if n % 2:
        raise InvalidInput("ground size must be even")
    if not 1 <= k or n // 2 - k < 1:
        raise InvalidInput(f"need 1 <= k < n/2, got n={n}, k={k}")
    if trials < 1:
        raise InvalidInput("trials must be positive")
    for c in snake_indices:
        if not 0 <= c < 1 << k:
            raise InvalidInput(f"snake index {c} out of range for k={k}")
    pair_representatives(n)
    tasks = [(n, k, tuple(snake_indices), seed, a, z) for a, z in split_range(0, trials, MC_CHUNK)]
    return np.concatenate(map_ordered(_not_carved_slice, tasks, workers))


def monte_carlo_not_carved(
    n: int, k: int, snake_index: int, trials: int, seed: int, workers: int = 1
) -> FrequencyReport:
    flags = not_carved_matrix(n, k, [snake_index], trials, seed, workers)
    return FrequencyReport(
        n=n,
        k=k,
        snake_index=snake_index,
        trials=trials,
        seed=seed,
        not_carved=int(flags.sum()),
        target=not_carved_probability(n // 2 - k),
    )


# -- refutation search -------------------------------------------------------------


@dataclass
class RefutationCertificate:
    """Evidence that no size-k matching is shattered by ``family``.

    ``failing_snakes[i]`` is the choice index of an uncarved snake for the
    i-th matching in canonical order.
    """

    family: Family
    k: int
    seed: int
    matchings_checked: int
    failing_snakes: np.ndarray = field(repr=False)
    generator_id: str = GENERATOR_ID

    def matching(self, i: int) -> Matching:
        row = matching_table(self.family.n, self.k)[i]
        return Matching(self.family.n, tuple((int(a), int(b)) for a, b in row))

    def to_json(self) -> dict:
        from .family import family_hash

        table = matching_table(self.family.n, self.k)
        return {
            "n": self.family.n,
            "k": self.k,
            "seed": self.seed,
            "generator_id": self.generator_id,
            "family_hash": family_hash(self.family),
            "matchings_checked": self.matchings_checked,
            "witnesses": [
                {"matching": row, "snake_bits": c}
                for row, c in zip(table.tolist(), self.failing_snakes.tolist())
            ],
        }


def certificate_from_json(doc: dict, family: Family) -> RefutationCertificate:
    from .family import family_hash

    if doc["family_hash"] != family_hash(family):
        raise InvalidInput("certificate does not belong to this family")
    n, k = doc["n"], doc["k"]
    table = matching_table(n, k)
    if len(doc["witnesses"]) != table.shape[0]:
        raise InvalidInput("certificate does not list every matching")
    try:
        listed = np.array([w["matching"] for w in doc["witnesses"]], dtype=np.int64).reshape(table.shape)
    except ValueError as exc:
        raise InvalidInput("witness matchings have the wrong shape") from exc
    # canonicalize each listed matching, then demand canonical enumeration order
    listed = np.sort(listed, axis=2)
    order = np.argsort(listed[:, :, 0], axis=1, kind="stable")
    listed = np.take_along_axis(listed, order[:, :, None], axis=1)
    bad = np.flatnonzero((listed != table).any(axis=(1, 2)))
    if bad.size:
        raise InvalidInput(f"witness {int(bad[0])} is out of canonical order")
    return RefutationCertificate(
        family=family,
        k=k,
        seed=doc["seed"],
        matchings_checked=doc["matchings_checked"],
        failing_snakes=np.array([w["snake_bits"] for w in doc["witnesses"]], dtype=np.int64),
        generator_id=doc["generator_id"],
    )


def verify_certificate(
    cert: RefutationCertificate, samples: int | None = 1000, seed: int = 0
) -> bool:
    """Re-check witnesses with the scalar carve test.

    ``samples=None`` checks every witness; otherwise a seeded random sample.
    """
    n, k = cert.family.n, cert.k
    if cert.matchings_checked != matching_count(n, k):
        return False
    if len(cert.failing_snakes) != cert.matchings_checked:
        return False
    total = cert.matchings_checked
    if samples is None or samples >= total:
        idx = range(total)
    else:
        idx = np.random.default_rng(seed).choice(total, size=samples, replace=False)
    for i in idx:
        m = cert.matching(int(i))
        c = int(cert.failing_snakes[i])
        if c < 0 or is_carved(cert.family, m, Snake(m, c)):
            return False
    return True


@dataclass
class SearchResult:
    family: Family
    certificate: RefutationCertificate
    trial: int
    trials_used: int


def search_counterexample_A(
    n: int, max_trials: int, seed: int, workers: int = 1
) -> SearchResult | None:
    """First random family (seeds seed, seed+1, ...) with no shattered (n/2-1)-matching."""
    if n % 2 or n < 4:
        raise InvalidInput(f"need an even ground size >= 4, got {n}")
    k = n // 2 - 1
    matching_table(n, k)
    for trial in range(max_trials):
        fam = random_mif(RandomFamilySpec(n, seed + trial))
        shattered, missing = scan_all_matchings(fam, k, workers, stop_at_first=True)
        if shattered.any():
            continue
        cert = RefutationCertificate(
            family=fam,
            k=k,
            seed=seed + trial,
            matchings_checked=int(missing.size),
            failing_snakes=missing,
        )
        return SearchResult(fam, cert, trial, trial + 1)
    return None


def min_max_shattered(n: int) -> int:
    """k(n): min over all maximal families of the largest shattered matching size."""
    from .matchings import max_shattered_size

    best = n // 2
    for fam in all_maximal_halfsize(n):
        assert is_maximal_intersecting_halfsize(fam)
        k, _ = max_shattered_size(fam, 0, n // 2)
        best = min(best, k)
    return best
