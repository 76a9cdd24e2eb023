"""Acceptance criteria, one test each, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``--allow-expensive`` for
the n = 5 exhaustive values of criterion 5).
"""

import io
import json
import time
from math import comb, prod

import pytest

from shatterkit.cli import run
from shatterkit.counterexamples import (
    build_odd_counterexample,
    f_ab_family,
    has_disjointly_representable,
    max_family_without_disrep,
    odd_family_is_maximal,
    verify_conjecture_B,
)
from shatterkit.family import Family, family_hash, is_intersecting, read_family, trace_count
from shatterkit.hypergraph import (
    balanced_partite_hypergraph,
    extract_separating_T,
    find_generalized_triangle,
    g_reference,
)
from shatterkit.matchings import dichotomy_check, first_shattered, random_perfect_matching
from shatterkit.randommif import (
    RandomFamilySpec,
    all_maximal_halfsize,
    certificate_from_json,
    monte_carlo_not_carved,
    random_mif,
    verify_certificate,
)
from shatterkit.separability import (
    arrow_holds,
    chain_product_family,
    is_separating_set,
    is_t_separable,
    s_exact_small,
    trace_threshold,
)
from shatterkit.suites import partition_shapes, random_downset_with_dense_level

import numpy as np


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, passed: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        assert passed, detail

    return emit


def cli(*argv) -> tuple[int, dict]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, json.loads(out.getvalue())


_SUITE_REPORTS: dict[tuple[str, int], tuple[int, dict]] = {}


def suite_report(name: str, workers: int) -> tuple[int, dict]:
    key = (name, workers)
    if key not in _SUITE_REPORTS:
        _SUITE_REPORTS[key] = cli("verify-suite", name, "--seed", "1", "--threads", str(workers))
    return _SUITE_REPORTS[key]


def test_criterion_01_conjecture_a_small(verdict):
    start = time.perf_counter()
    counts, exceptions = {}, 0
    for n in (4, 6):
        fams = list(all_maximal_halfsize(n))
        counts[n] = len(fams)
        exceptions += sum(first_shattered(f, n // 2 - 1) is None for f in fams)
    elapsed = time.perf_counter() - start
    ok = counts == {4: 8, 6: 1024} and exceptions == 0 and elapsed < 10
    verdict(1, "conjecture A for n <= 6", ok, f"families {counts}, exceptions {exceptions}, {elapsed:.1f}s")


def test_criterion_02_refute_a_n14(verdict, tmp_path):
    cert_path = tmp_path / "cert.json"
    start = time.perf_counter()
    code, rep = cli("refute-a", "--n", "14", "--trials", "10", "--seed", "1", "--threads", "8", "--cert", str(cert_path))
    elapsed = time.perf_counter() - start
    res = rep["result"]
    fam = read_family(res["family_out"])
    doc = json.loads(cert_path.read_text())
    cert = certificate_from_json(doc, fam)
    spot = verify_certificate(cert, samples=1000, seed=1)
    ok = (
        code == 0
        and res["found"]
        and res["trial"] <= 1
        and doc["matchings_checked"] == 945_945
        and len(doc["witnesses"]) == 945_945
        and spot
        and elapsed <= 600
    )
    verdict(
        2,
        "conjecture A refuted at n = 14",
        ok,
        f"trial {res['trial']}, family {res['family_hash']}, 945945 matchings, 1000 spot checks {spot}, {elapsed:.0f}s",
    )


def test_criterion_03_dichotomy(verdict):
    rng = np.random.Generator(np.random.PCG64(0))
    failures = 0
    for i in range(10_000):
        n = (8, 10, 12)[i % 3]
        fam = random_mif(RandomFamilySpec(n, int(rng.integers(0, 2**63))))
        k = int(rng.integers(1, n // 2))
        if not dichotomy_check(fam, random_perfect_matching(rng, n), k).holds:
            failures += 1
    verdict(3, "lower-bound dichotomy", failures == 0, f"10000 triples at n in {{8,10,12}}, {failures} failures")


def test_criterion_04_claim2_frequencies(verdict):
    runs = [
        monte_carlo_not_carved(10, 4, 0, 100_000, seed=1),
        monte_carlo_not_carved(10, 3, 0, 1_000_000, seed=1),
    ]
    ok = all(abs(r.z_score) <= 3 for r in runs) and [float(r.target) for r in runs] == [0.25, 1 / 64]
    detail = ", ".join(f"ell={r.n // 2 - r.k}: {r.frequency:.5f} vs {float(r.target):.5f} (z={r.z_score:+.2f})" for r in runs)
    code, rep = suite_report("claim2", 1)
    ok = ok and code == 0 and rep["result"]["runs"] == [r.to_json() for r in runs]
    verdict(4, "not-carved probability", ok, detail)


def test_criterion_05_exact_small_values(verdict, allow_expensive):
    found = {"s(4,2)": s_exact_small(4, 2), "s(4,3)": s_exact_small(4, 3)}
    expected = {"s(4,2)": 6, "s(4,3)": 10}
    if allow_expensive:
        found["s(5,2)"] = s_exact_small(5, 2, True)
        found["s(5,3)"] = s_exact_small(5, 3, True)
        expected.update({"s(5,2)": 7, "s(5,3)": 25 // 4 + 5 + 2})
    arrow = arrow_holds(4, 10, 3, 7)
    scope = "" if allow_expensive else " (n = 5 values need --allow-expensive; not run)"
    verdict(5, "exact s(n,t) and arrow", found == expected and arrow, f"{found}, arrow(4,10)->(3,7) {arrow}{scope}")


def test_criterion_06_chain_products(verdict):
    checked = exceptions = 0
    for n in range(2, 25):
        for parts in range(1, min(6, n - 1) + 1):
            for shape in partition_shapes(n, parts):
                f = chain_product_family(shape)
                checked += 1
                ok = (
                    f.size == prod(s + 1 for s in shape)
                    and is_t_separable(f, parts + 1, "preorder") is None
                    and is_t_separable(f, parts + 1, "direct") is None
                )
                exceptions += not ok
    verdict(6, "chain products are not t-separable", exceptions == 0, f"{checked} families, {exceptions} exceptions")


def test_criterion_07_odd_counterexample_n15(verdict):
    code, rep = cli("refute-a", "--n", "14", "--trials", "10", "--seed", "1", "--threads", "1")
    from shatterkit.randommif import search_counterexample_A

    base = search_counterexample_A(14, 10, 1)
    assert family_hash(base.family) == rep["result"]["family_hash"]
    start = time.perf_counter()
    c = build_odd_counterexample(base.family, 15)
    sizes = sorted({m.bit_count() for m in c.family.masks})
    maximal = odd_family_is_maximal(c) and is_intersecting(c.family)
    report = verify_conjecture_B(c, workers=8)
    elapsed = time.perf_counter() - start
    star = Family.from_sets(4, [[0, 1], [0, 2], [0, 3]])
    small = verify_conjecture_B(build_odd_counterexample(star, 5))
    ok = (
        c.family.size == 6435
        and sizes == [7, 8]
        and maximal
        and report.witness is None
        and report.ys_checked == 15
        and report.matchings_per_y == 135_135
        and small.witness is not None
        and elapsed <= 900
    )
    verdict(
        7,
        "conjecture B fails at n = 15",
        ok,
        f"size {c.family.size}, sizes {sizes}, maximal {maximal}, 15 x 135135 scanned, "
        f"witness {report.witness}, n=5 witness {small.to_json()['witness']}, {elapsed:.0f}s",
    )


def test_criterion_08_trace_pipeline(verdict):
    rng = np.random.Generator(np.random.PCG64(0))
    failures = 0
    for i in range(1000):
        t = 4 + i % 2
        n = int(rng.integers(t, 13))
        f = random_downset_with_dense_level(rng, n, t)
        dense = sum(1 for m in f.masks if m.bit_count() == t - 1) > g_reference(n, t - 1)
        T = extract_separating_T(f, t)
        if not dense or T is None or trace_count(f, T) < trace_threshold(t) or not is_separating_set(f, T):
            failures += 1
    tight = 0
    for k in (2, 3, 4):
        for n in range(k, 17):
            g = balanced_partite_hypergraph(n, k)
            tight += len(g) != g_reference(n, k) or find_generalized_triangle(g) is not None
    verdict(8, "trace extraction and partite tightness", failures == 0 and tight == 0, f"1000 downsets, {failures} failures; partite failures {tight}")


def test_criterion_09_disjoint_representability(verdict):
    bad = []
    for n in range(3, 13):
        f = f_ab_family(n)
        if f.size != comb(n, 2) + n + 1 or has_disjointly_representable(f, 3) is not None:
            bad.append(n)
    largest = max_family_without_disrep(4, 3)
    verdict(9, "families without 3 disjointly representable members", not bad and largest == 11, f"bad n {bad}, n=4 largest {largest}")


def test_criterion_10_determinism(verdict):
    stripped = {}
    for name in ("refute-a-14", "claim2", "refute-b-15"):
        texts = []
        for w in (1, 4, 8):
            code, rep = suite_report(name, w)
            assert code == 0
            rep = {k: v for k, v in rep.items() if k not in ("elapsed_ms", "worker_count")}
            texts.append(json.dumps(rep, sort_keys=True).encode())
        stripped[name] = len(set(texts)) == 1
    verdict(10, "worker-count independence", all(stripped.values()), f"identical across 1/4/8 workers: {stripped}")
