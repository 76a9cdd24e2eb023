"""Command-line entry point: ``shatterkit <subcommand> [flags]``.

Every command prints a JSON run report (or a short text summary with
``--format text``). Exit status is 0 on success, 1 when a search came back
empty or a suite failed, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
from typing import Any, Callable

from . import suites
from .counterexamples import (
    RSystem,
    build_odd_counterexample,
    f_ab_family,
    has_disjointly_representable,
    is_r_system_shattered,
    odd_family_is_maximal,
    verify_conjecture_B,
)
from .errors import InvalidInput
from .family import ElementSet, family_hash, read_family, trace_count, vc_dim, write_family
from .hypergraph import extract_separating_T, find_generalized_triangle, read_hypergraph
from .matchings import Matching, is_shattered, max_shattered_size
from .parallel import default_workers
from .randommif import GENERATOR_ID, RandomFamilySpec, random_mif, search_counterexample_A
from .separability import (
    arrow_counterexample,
    chain_product_family,
    enumerate_monotone_families,
    is_t_separable,
    s_exact_small,
    separability_bounds,
)


class Absent(Exception):
    """A search finished without a result where absence is meaningful."""

    def __init__(self, payload: dict):
        self.payload = payload


def _set_json(s: ElementSet | None):
    return None if s is None else list(s)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidInput(f"expected integers, got {text!r}") from None


def _parse_groups(text: str) -> list[list[int]]:
    """'0 1,2 3' -> [[0, 1], [2, 3]]."""
    return [_parse_int_list(g) for g in text.split(",") if g.strip()]


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InvalidInput(f"--{name.replace('_', '-')} is required")


# -- subcommands ---------------------------------------------------------------------


def cmd_gen_mif(args) -> dict:
    _require(args, "n")
    fam = random_mif(RandomFamilySpec(args.n, args.seed))
    if args.out:
        write_family(args.out, fam)
    return {"n": fam.n, "size": fam.size, "family_hash": family_hash(fam), "out": args.out}


def cmd_shattered(args) -> dict:
    _require(args, "family")
    fam = read_family(args.family)
    if args.matching:
        m = Matching(fam.n, tuple(tuple(p) for p in _parse_groups(args.matching)))
        return {"matching": m.to_json(), "shattered": is_shattered(fam, m)}
    k_max = args.k if args.k is not None else (args.k_max if args.k_max is not None else fam.n // 2)
    k_min = args.k if args.k is not None else (args.k_min if args.k_min is not None else 0)
    k, witness = max_shattered_size(fam, k_min, k_max, args.threads)
    return {"k_min": k_min, "k_max": k_max, "k": k, "witness": witness.to_json() if witness else None}


def cmd_refute_a(args) -> dict:
    _require(args, "n")
    res = search_counterexample_A(args.n, args.trials, args.seed, args.threads)
    if res is None:
        raise Absent({"n": args.n, "trials": args.trials, "found": False})
    cert = res.certificate
    family_path = None
    if args.cert:
        with open(args.cert, "w") as fh:
            json.dump(cert.to_json(), fh, separators=(",", ":"))
        family_path = args.out or args.cert + ".family.txt"
    if args.out:
        family_path = args.out
    if family_path:
        write_family(family_path, res.family)
    return {
        "n": args.n,
        "found": True,
        "trial": res.trial,
        "family_seed": cert.seed,
        "k": cert.k,
        "family_hash": family_hash(res.family),
        "matchings_checked": cert.matchings_checked,
        "cert": args.cert,
        "family_out": family_path,
    }


def cmd_build_b(args) -> dict:
    _require(args, "family")
    g = read_family(args.family)
    c = build_odd_counterexample(g, g.n + 1)
    if args.out:
        write_family(args.out, c.family)
    return {
        "n": c.n,
        "size": c.family.size,
        "member_sizes": sorted({m.bit_count() for m in c.family.masks}),
        "maximal": odd_family_is_maximal(c),
        "family_hash": family_hash(c.family),
        "out": args.out,
    }


def cmd_verify_b(args) -> dict:
    _require(args, "family")
    fam = read_family(args.family)
    report = verify_conjecture_B(fam, args.threads)
    doc = {"n": fam.n, "family_hash": family_hash(fam)}
    doc.update(report.to_json())
    if args.cert:
        with open(args.cert, "w") as fh:
            json.dump(doc, fh)
    return doc


def cmd_separability(args) -> dict:
    _require(args, "family", "t")
    fam = read_family(args.family)
    w = is_t_separable(fam, args.t, args.method)
    return {"t": args.t, "method": args.method, "separable": w is not None, "witness": _set_json(w)}


def cmd_sep_bounds(args) -> dict:
    _require(args, "n", "t")
    return separability_bounds(args.n, args.t).to_json()


def cmd_s_exact(args) -> dict:
    _require(args, "n", "t")
    return {"n": args.n, "t": args.t, "s": s_exact_small(args.n, args.t, args.allow_expensive, args.threads)}


def cmd_arrow(args) -> dict:
    _require(args, "n", "m", "a", "b")
    bad = arrow_counterexample(args.n, args.m, args.a, args.b)
    return {
        "n": args.n,
        "m": args.m,
        "a": args.a,
        "b": args.b,
        "holds": bad is None,
        "counterexample": None if bad is None else [list(s) for s in bad],
    }


def cmd_monotone_count(args) -> dict:
    _require(args, "n")
    return {"n": args.n, "count": sum(1 for _ in enumerate_monotone_families(args.n))}


def cmd_triangle(args) -> dict:
    _require(args, "hypergraph")
    g = read_hypergraph(args.hypergraph)
    tri = find_generalized_triangle(g)
    if tri is None:
        return {"found": False, "triangle": None}
    return {"found": True, "triangle": [list(tri.e1), list(tri.e2), list(tri.e3)]}


def cmd_extract_t(args) -> dict:
    _require(args, "family", "t")
    fam = read_family(args.family)
    T = extract_separating_T(fam, args.t)
    return {
        "t": args.t,
        "T": _set_json(T),
        "traces": None if T is None else trace_count(fam, T),
    }


def cmd_chain_product(args) -> dict:
    _require(args, "parts")
    fam = chain_product_family(_parse_int_list(args.parts))
    if args.out:
        write_family(args.out, fam)
    return {"parts": _parse_int_list(args.parts), "n": fam.n, "size": fam.size, "family_hash": family_hash(fam), "out": args.out}


def cmd_f_ab(args) -> dict:
    _require(args, "n")
    fam = f_ab_family(args.n)
    if args.out:
        write_family(args.out, fam)
    return {"n": fam.n, "size": fam.size, "family_hash": family_hash(fam), "out": args.out}


def cmd_disrep(args) -> dict:
    _require(args, "family", "t")
    fam = read_family(args.family)
    hit = has_disjointly_representable(fam, args.t)
    if hit is None:
        return {"t": args.t, "found": False}
    members, reps = hit
    return {"t": args.t, "found": True, "members": [list(m) for m in members], "representatives": list(reps)}


def cmd_vc_dim(args) -> dict:
    _require(args, "family")
    fam = read_family(args.family)
    return {"size": fam.size, "vc_dim": vc_dim(fam)}


def cmd_r_system(args) -> dict:
    _require(args, "family", "tuples")
    fam = read_family(args.family)
    sys_ = RSystem.from_sets(fam.n, _parse_groups(args.tuples))
    return {"r": sys_.r, "tuples": [list(ElementSet(t, fam.n)) for t in sys_.tuples], "shattered": is_r_system_shattered(fam, sys_)}


def cmd_verify_suite(args) -> dict:
    fn = suites.SUITES[args.name]
    kwargs: dict[str, Any] = {"workers": args.threads, "allow_expensive": args.allow_expensive}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.trials is not None:
        kwargs["trials"] = args.trials
    result = fn(**kwargs)
    if not result["passed"]:
        raise Absent(result)
    return result


COMMANDS: dict[str, tuple[Callable, str]] = {
    "gen-mif": (cmd_gen_mif, "random maximal intersecting family of n/2-sets"),
    "shattered": (cmd_shattered, "test one matching or search the largest shattered matching"),
    "refute-a": (cmd_refute_a, "search a family with no shattered (n/2-1)-matching"),
    "build-b": (cmd_build_b, "odd-n family from an even maximal family"),
    "verify-b": (cmd_verify_b, "exhaustive conjecture-B check of an odd family"),
    "separability": (cmd_separability, "t-separability witness"),
    "sep-bounds": (cmd_sep_bounds, "bounds on s(n, t)"),
    "s-exact": (cmd_s_exact, "exact s(n, t) by exhaustion (n <= 5)"),
    "arrow": (cmd_arrow, "check (n, m) -> (a, b)"),
    "monotone-count": (cmd_monotone_count, "count downward-closed families"),
    "triangle": (cmd_triangle, "find a generalized triangle"),
    "extract-t": (cmd_extract_t, "separating t-set of a downward-closed family"),
    "chain-product": (cmd_chain_product, "chain-product family for given part sizes"),
    "f-ab": (cmd_f_ab, "family without 3 disjointly representable members"),
    "disrep": (cmd_disrep, "find t disjointly representable members"),
    "vc-dim": (cmd_vc_dim, "VC dimension"),
    "r-system": (cmd_r_system, "is a system of disjoint r-sets shattered"),
    "verify-suite": (cmd_verify_suite, "run a named acceptance suite"),
}

RANDOMIZED = {"gen-mif", "refute-a"}
RANDOMIZED_SUITES = {"refute-a-14", "dichotomy", "claim2", "refute-b-15", "thm6prime"}

# flags that shape execution but not the result; kept out of "params"
_NOT_PARAMS = {"command", "threads", "format", "out", "cert"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--threads", type=int, default=default_workers())
    common.add_argument("--out")
    common.add_argument("--cert")
    common.add_argument("--family")
    common.add_argument("--hypergraph")
    common.add_argument("--parts", help="comma-separated part sizes, e.g. 2,2,2")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--allow-expensive", action="store_true")

    parser = argparse.ArgumentParser(prog="shatterkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parsers = {}
    for name, (_, help_) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_)

    parsers["shattered"].add_argument("--matching", help="pairs like '0 1,2 3'")
    parsers["shattered"].add_argument("--k-min", type=int)
    parsers["shattered"].add_argument("--k-max", type=int)
    parsers["separability"].add_argument("--method", choices=("preorder", "direct"), default="preorder")
    for flag in ("--m", "--a", "--b"):
        parsers["arrow"].add_argument(flag, type=int)
    parsers["r-system"].add_argument("--tuples", help="disjoint tuples like '0 1 2,3 4 5'")
    parsers["verify-suite"].add_argument("name", choices=sorted(suites.SUITES))
    return parser


def _is_randomized(args) -> bool:
    return args.command in RANDOMIZED or (
        args.command == "verify-suite" and args.name in RANDOMIZED_SUITES
    )


def _report(args, result: dict, elapsed: float) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in _NOT_PARAMS and v is not None and v is not False}
    report: dict[str, Any] = {"command": args.command, "params": params, "result": result}
    if _is_randomized(args):
        report["seed"] = args.seed
        report["generator_id"] = GENERATOR_ID
    report["elapsed_ms"] = int(elapsed * 1000)
    report["worker_count"] = args.threads
    return report


def _emit(report: dict, fmt: str, stream) -> None:
    if fmt == "json":
        json.dump(report, stream, sort_keys=True)
        stream.write("\n")
        return
    stream.write(f"{report['command']}\n")
    for key, value in report["result"].items():
        stream.write(f"  {key}: {json.dumps(value) if isinstance(value, (dict, list)) else value}\n")


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None and _is_randomized(args):
        args.seed = suites_default_seed(args)
    if args.trials is None and args.command == "refute-a":
        args.trials = 10
    if args.threads < 1:
        stderr.write("error: --threads must be positive\n")
        return 2
    fn = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        result = fn(args)
        code = 0
    except Absent as absent:
        result, code = absent.payload, 1
    except (InvalidInput, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    _emit(_report(args, result, time.perf_counter() - start), args.format, stdout)
    return code


def suites_default_seed(args) -> int:
    if args.command == "verify-suite" and args.name in ("dichotomy", "thm6prime"):
        return 0
    return 1 if args.command in ("refute-a", "verify-suite") else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
