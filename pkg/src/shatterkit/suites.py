"""Named end-to-end verification runs.

Each suite returns a JSON-ready dict with a boolean ``passed`` plus the
figures it checked. Results never depend on the worker count.
"""

from __future__ import annotations

from math import comb, prod
from typing import Callable

import numpy as np

from .counterexamples import (
    build_odd_counterexample,
    disjointly_representable_by_members,
    f_ab_family,
    has_disjointly_representable,
    max_family_without_disrep,
    odd_family_is_maximal,
    verify_conjecture_B,
)
from .family import (
    Family,
    downward_closure,
    family_hash,
    is_intersecting,
    subsets_of_size,
    trace_count,
)
from .hypergraph import (
    balanced_partite_hypergraph,
    extract_separating_T,
    find_generalized_triangle,
    g_reference,
)
from .matchings import (
    dichotomy_check,
    first_shattered,
    random_perfect_matching,
)
from .randommif import (
    GENERATOR_ID,
    RandomFamilySpec,
    all_maximal_halfsize,
    monte_carlo_not_carved,
    random_mif,
    search_counterexample_A,
    verify_certificate,
)
from .separability import (
    arrow_holds,
    balanced_partition,
    chain_product_family,
    is_separating_set,
    is_t_separable,
    s_exact_small,
    trace_threshold,
)


def conj_a_small(**_) -> dict:
    out = {}
    for n in (4, 6):
        families = exceptions = 0
        for fam in all_maximal_halfsize(n):
            families += 1
            if first_shattered(fam, n // 2 - 1) is None:
                exceptions += 1
        out[f"n={n}"] = {"families": families, "exceptions": exceptions}
    out["passed"] = (
        out["n=4"] == {"families": 8, "exceptions": 0}
        and out["n=6"] == {"families": 1024, "exceptions": 0}
    )
    return out


def refute_a_14(seed: int = 1, trials: int = 10, workers: int = 1, spot_checks: int = 1000, **_) -> dict:
    res = search_counterexample_A(14, trials, seed, workers)
    if res is None:
        return {"passed": False, "found": False, "seed": seed, "trials": trials}
    cert = res.certificate
    spot_ok = verify_certificate(cert, samples=spot_checks, seed=seed)
    return {
        "passed": spot_ok and cert.matchings_checked == 945_945,
        "found": True,
        "seed": seed,
        "generator_id": GENERATOR_ID,
        "trial": res.trial,
        "family_seed": cert.seed,
        "family_hash": family_hash(res.family),
        "matchings_checked": cert.matchings_checked,
        "spot_checks": spot_checks,
        "spot_check_ok": spot_ok,
    }


def dichotomy(seed: int = 0, samples: int = 10_000, **_) -> dict:
    rng = np.random.Generator(np.random.PCG64(seed))
    failures = 0
    per_n = {8: 0, 10: 0, 12: 0}
    for i in range(samples):
        n = (8, 10, 12)[i % 3]
        fam = random_mif(RandomFamilySpec(n, int(rng.integers(0, 2**63))))
        perfect = random_perfect_matching(rng, n)
        k = int(rng.integers(1, n // 2))
        rep = dichotomy_check(fam, perfect, k)
        per_n[n] += 1
        if not rep.holds:
            failures += 1
    return {
        "passed": failures == 0,
        "seed": seed,
        "generator_id": GENERATOR_ID,
        "samples": samples,
        "per_n": {str(k): v for k, v in per_n.items()},
        "failures": failures,
    }


def claim2(seed: int = 1, workers: int = 1, trials_l1: int = 100_000, trials_l2: int = 1_000_000, **_) -> dict:
    runs = [
        monte_carlo_not_carved(10, 4, 0, trials_l1, seed, workers),
        monte_carlo_not_carved(10, 3, 0, trials_l2, seed, workers),
    ]
    return {
        "passed": all(abs(r.z_score) <= 3 for r in runs),
        "seed": seed,
        "generator_id": GENERATOR_ID,
        "runs": [r.to_json() for r in runs],
    }


def thm5_small(allow_expensive: bool = False, workers: int = 1, **_) -> dict:
    found = {
        "s(4,2)": s_exact_small(4, 2, workers=workers),
        "s(4,3)": s_exact_small(4, 3, workers=workers),
    }
    expected = {"s(4,2)": 6, "s(4,3)": 10}
    if allow_expensive:
        found["s(5,2)"] = s_exact_small(5, 2, True, workers)
        found["s(5,3)"] = s_exact_small(5, 3, True, workers)
        expected.update({"s(5,2)": 7, "s(5,3)": 13})
    arrow = arrow_holds(4, 10, 3, 7)
    return {
        "passed": found == expected and arrow,
        "values": found,
        "expected": expected,
        "arrow(4,10)->(3,7)": arrow,
        "expensive": allow_expensive,
    }


def partition_shapes(n: int, parts: int) -> list[list[int]]:
    """Balanced split plus three fixed lopsided splits, deduplicated."""
    shapes = [balanced_partition(n, parts)]
    if parts >= 2:
        heavy = n - (parts - 1)
        shapes.append([heavy] + [1] * (parts - 1))
        shapes.append([1] * (parts - 1) + [heavy])
        surplus = n - (parts - 2)
        shapes.append([(surplus + 1) // 2, surplus // 2] + [1] * (parts - 2))
    out: list[list[int]] = []
    for s in shapes:
        if s not in out and all(x >= 1 for x in s):
            out.append(s)
    return out


def lemma7(max_n: int = 24, max_parts: int = 6, **_) -> dict:
    checked = exceptions = 0
    for n in range(2, max_n + 1):
        for parts in range(1, min(max_parts, n - 1) + 1):
            t = parts + 1
            for shape in partition_shapes(n, parts):
                fam = chain_product_family(shape)
                checked += 1
                ok = (
                    fam.size == prod(s + 1 for s in shape)
                    and is_t_separable(fam, t, "preorder") is None
                    and is_t_separable(fam, t, "direct") is None
                )
                exceptions += not ok
    return {"passed": exceptions == 0, "families_checked": checked, "exceptions": exceptions}


def refute_b_15(seed: int = 1, trials: int = 10, workers: int = 1, **_) -> dict:
    res = search_counterexample_A(14, trials, seed, workers)
    if res is None:
        return {"passed": False, "found_base": False, "seed": seed}
    c = build_odd_counterexample(res.family, 15)
    sizes = sorted({m.bit_count() for m in c.family.masks})
    maximal = odd_family_is_maximal(c) and is_intersecting(c.family)
    report = verify_conjecture_B(c, workers)
    star = Family.from_sets(4, [[0, 1], [0, 2], [0, 3]])
    small = verify_conjecture_B(build_odd_counterexample(star, 5))
    return {
        "passed": (
            c.family.size == 6435
            and sizes == [7, 8]
            and maximal
            and report.witness is None
            and report.ys_checked == 15
            and report.matchings_per_y == 135_135
            and small.witness is not None
        ),
        "seed": seed,
        "generator_id": GENERATOR_ID,
        "base_family_hash": family_hash(res.family),
        "family_hash": family_hash(c.family),
        "size": c.family.size,
        "member_sizes": sizes,
        "maximal": maximal,
        "certificate": report.to_json(),
        "n5_sanity_witness": small.to_json()["witness"],
    }


def random_downset_with_dense_level(rng: np.random.Generator, n: int, t: int) -> Family:
    """Downward closure of more than g(n, t-1) random (t-1)-sets, sometimes plus a larger set."""
    level = list(subsets_of_size(n, t - 1))
    floor = g_reference(n, t - 1)
    count = int(rng.integers(floor + 1, len(level) + 1))
    picks = rng.choice(len(level), size=count, replace=False)
    tops = [level[int(i)] for i in picks]
    if rng.random() < 0.25:
        big = rng.choice(n, size=int(rng.integers(t, n + 1)), replace=False)
        tops.append(sum(1 << int(e) for e in big))
    return downward_closure(Family(n, tops))


def thm6prime(seed: int = 0, samples: int = 1000, **_) -> dict:
    rng = np.random.Generator(np.random.PCG64(seed))
    failures = 0
    for i in range(samples):
        t = 4 + i % 2
        n = int(rng.integers(t, 13))
        fam = random_downset_with_dense_level(rng, n, t)
        T = extract_separating_T(fam, t)
        if T is None or trace_count(fam, T) < trace_threshold(t) or not is_separating_set(fam, T):
            failures += 1
    tight_fail = 0
    tight_checked = 0
    for k in (2, 3, 4):
        for n in range(max(k, 2), 17):
            g = balanced_partite_hypergraph(n, k)
            tight_checked += 1
            if len(g) != g_reference(n, k) or find_generalized_triangle(g) is not None:
                tight_fail += 1
    return {
        "passed": failures == 0 and tight_fail == 0,
        "seed": seed,
        "generator_id": GENERATOR_ID,
        "samples": samples,
        "failures": failures,
        "partite_checked": tight_checked,
        "partite_failures": tight_fail,
    }


def disrep(**_) -> dict:
    rows = []
    ok = True
    for n in range(3, 13):
        fam = f_ab_family(n)
        size_ok = fam.size == comb(n, 2) + n + 1
        none_ok = has_disjointly_representable(fam, 3) is None
        ref_ok = n > 9 or disjointly_representable_by_members(fam, 3) is None
        rows.append({"n": n, "size": fam.size, "no_3_disrep": none_ok})
        ok &= size_ok and none_ok and ref_ok
    largest = max_family_without_disrep(4, 3)
    return {
        "passed": ok and largest == 11,
        "f_ab": rows,
        "n4_largest_without_3_disrep": largest,
    }


SUITES: dict[str, Callable[..., dict]] = {
    "conjA-small": conj_a_small,
    "refute-a-14": refute_a_14,
    "dichotomy": dichotomy,
    "claim2": claim2,
    "thm5-small": thm5_small,
    "lemma7": lemma7,
    "refute-b-15": refute_b_15,
    "thm6prime": thm6prime,
    "disrep": disrep,
}
