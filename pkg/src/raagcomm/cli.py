"""Command-line front end.

Exit codes: 0 feasible / success, 10 infeasible (not commensurable),
1 construction check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .covers import build_cover_S, build_cover_Z, validate_cover
from .solver import decide, verdict_report
from .splitting import (build_X, labelled_iso, m_labels, path_4k2_tree, quotient_graph,
                        x_expected_census)
from .system import build_full_system, check_assignment, emit_json
from .trees import TreeError, diameter, path_tree, parse_tree_spec, read_adjacency_file, tkk_tree

EXIT_FEASIBLE = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 10
SCHEMA_VERSION = 1
SWEEP_MAX = 14
DEFAULT_GUARD_VARS = 20000


class UsageError(Exception):
    pass


def _guard_vars() -> int:
    raw = os.environ.get("RAAG_GUARD_VARS")
    if raw is None:
        return DEFAULT_GUARD_VARS
    try:
        val = int(raw)
    except ValueError as exc:
        raise UsageError(f"RAAG_GUARD_VARS must be an integer, got {raw!r}") from exc
    if val < 1:
        raise UsageError("RAAG_GUARD_VARS must be positive")
    return val


def _tree(spec: str):
    if spec.startswith("@"):
        return read_adjacency_file(spec[1:])
    return parse_tree_spec(spec)


def _envelope(command: str, inputs: dict, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "command": command, "inputs": inputs, **body}


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- decide -----------------------------------------------------------------------

def _check_size(g1, g2) -> None:
    from .trees import reduce

    for g in (g1, g2):
        if diameter(g) < 3:
            raise UsageError(f"tree {g.spec or ''} has diameter {diameter(g)}; the pipeline needs >= 3")
    e1 = len(reduce(g1).tree.edges)
    e2 = len(reduce(g2).tree.edges)
    # each component carries half of the 4 * e1 * e2 oriented edges, 4 labels each
    n_vars = 8 * e1 * e2
    if n_vars > _guard_vars():
        raise UsageError(f"component system would have {n_vars} variables, above RAAG_GUARD_VARS={_guard_vars()}")


def cmd_decide(args: argparse.Namespace) -> int:
    g1, g2 = _tree(args.left), _tree(args.right)
    _check_size(g1, g2)
    if args.emit_system:
        for s in build_full_system(g1, g2):
            Path(f"{args.emit_system}-c{s.component}.json").write_text(emit_json(s), encoding="utf-8")
    v = decide(g1, g2)
    rep = verdict_report(v)
    code = EXIT_FEASIBLE if v.feasible else EXIT_INFEASIBLE
    if args.json:
        sys.stdout.write(_dump(_envelope("decide", {"left": args.left, "right": args.right}, rep)))
    else:
        print(f"left  {args.left}")
        print(f"right {args.right}")
        for c in rep["components"]:
            print(f"  component {c['component']}: {c['verdict']} ({c['variables']} variables, "
                  f"{c['rounds']} round(s), support {c['support_size']})")
        if v.feasible:
            print("verdict: FEASIBLE - the necessary condition for commensurability holds "
                  "(this alone does not prove commensurability)")
            print(f"witness on component {rep['witness_component']}: "
                  f"{len(rep['witness'])} positive labels, max {max(rep['witness'].values())}")
        else:
            print("verdict: INFEASIBLE - the RAAGs are not commensurable")
    return code


# -- sweep ------------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def _sweep_one(pair: tuple[int, int]) -> tuple[int, int, bool]:
    n, m = pair
    return n, m, decide(path_tree(n), path_tree(m)).feasible


def cmd_sweep(args: argparse.Namespace) -> int:
    mt = _RANGE.match(args.paths)
    if not mt:
        raise UsageError("--paths expects A..B")
    a, b = int(mt.group(1)), int(mt.group(2))
    if not (3 <= a <= b <= SWEEP_MAX):
        raise UsageError(f"--paths needs 3 <= A <= B <= {SWEEP_MAX}")
    _check_size(path_tree(b), path_tree(b))
    pairs = [(n, m) for n in range(a, b + 1) for m in range(n, b + 1)]
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_one, pairs))
    else:
        results = [_sweep_one(p) for p in pairs]
    rows = [{"n": n, "m": m, "verdict": "feasible" if f else "infeasible"} for n, m, f in results]
    off = [r for r in rows if r["n"] != r["m"]]
    summary = {
        "pairs": len(rows),
        "off_diagonal": len(off),
        "off_diagonal_infeasible": sum(r["verdict"] == "infeasible" for r in off),
    }
    if args.json:
        sys.stdout.write(_dump(_envelope("sweep", {"paths": f"{a}..{b}"}, {"rows": rows, "summary": summary})))
    else:
        print(f"{'n':>3} {'m':>3}  verdict")
        for r in rows:
            print(f"{r['n']:>3} {r['m']:>3}  {r['verdict']}")
        print(f"{summary['off_diagonal_infeasible']}/{summary['off_diagonal']} off-diagonal pairs infeasible")
    return EXIT_FEASIBLE


# -- covers ------------------------------------------------------------------------

def cmd_covers(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    out = {}
    dots = []
    ok = True
    if args.which in ("s", "both"):
        s = build_cover_S(args.k)
        rep = validate_cover(s)
        out["S"] = rep.to_dict()
        dots.append(("S", s))
        ok &= rep.ok
    if args.which in ("z", "both"):
        z, ab = build_cover_Z(args.k)
        rep = validate_cover(z)
        out["Z"] = rep.to_dict() | {"alpha_beta": ab.to_dict()}
        dots.append(("Z", z))
        ok &= rep.ok
    if args.dot:
        for name, c in dots:
            path = args.dot if len(dots) == 1 else f"{args.dot}.{name}.dot"
            Path(path).write_text(c.to_dot(), encoding="utf-8")
    if args.json:
        sys.stdout.write(_dump(_envelope("covers", {"k": args.k, "which": args.which}, out)))
    else:
        for name, rep in out.items():
            status = "pass" if rep["pass"] else "FAIL"
            print(f"cover {name} (k={args.k}): {status}, {rep['vertices']} vertices")
            for letter, census in rep["censuses"].items():
                desc = ", ".join(f"{m} x length {L}" for L, m in census.items())
                print(f"  {letter}: {desc}")
            for flag in rep["flags"]:
                print(f"  flag: {flag}")
            for bad in rep["violations"]:
                print(f"  violation: {bad}")
            if "alpha_beta" in rep:
                for fam, vals in rep["alpha_beta"].items():
                    if vals:
                        print(f"  {fam}: " + ", ".join(f"({k})={v}" for k, v in vals.items()))
    return EXIT_FEASIBLE if ok else EXIT_FAILED


# -- splittings --------------------------------------------------------------------

def cmd_splittings(args: argparse.Namespace) -> int:
    k = args.k
    if k < 1:
        raise UsageError("--k must be at least 1")
    X = build_X(k)
    H = quotient_graph(tkk_tree(k), build_cover_S(k))
    K = quotient_graph(path_4k2_tree(k), build_cover_Z(k)[0])
    phi_xh = labelled_iso(X, H)
    phi_hk = labelled_iso(H, K)
    out: dict = {
        "expected_vertices": k * k + 5 * k - 1,
        "expected_ranks": {str(r): m for r, m in x_expected_census(k).items()},
        "skeletons": {
            name: {"vertices": len(s.vertices), "edges": len(s.edges),
                   "ranks": {str(r): m for r, m in s.rank_multiset().items()},
                   "violations": s.violations()}
            for name, s in (("X", X), ("PsiH", H), ("PsiK", K))
        },
        "iso_X_PsiH": phi_xh is not None,
        "iso_PsiH_PsiK": phi_hk is not None,
        "phi_PsiH_PsiK": {str(a): b for a, b in sorted(phi_hk.items())} if phi_hk else None,
    }
    ok = phi_xh is not None and phi_hk is not None
    ok &= all(not s.violations() for s in (X, H, K))
    if args.cross_validate and phi_hk is not None:
        systems = build_full_system(tkk_tree(k), path_4k2_tree(k))
        res = m_labels(H, K, phi_hk, systems[0].product)
        s = systems[res.component - 1]
        rep = check_assignment(s, res.assignment(s))
        out["cross_validation"] = {
            "component": res.component,
            "system_violations": rep.violations,
            "ratio_violations": res.ratio_violations,
            "q_values": sorted({int(q) for q in res.ratios if q.denominator == 1}),
            "pass": rep.ok and not res.ratio_violations,
        }
        ok &= out["cross_validation"]["pass"]
    out["pass"] = bool(ok)
    if args.json:
        sys.stdout.write(_dump(_envelope("splittings", {"k": k, "cross_validate": args.cross_validate}, out)))
    else:
        print(f"k={k}: expected {out['expected_vertices']} vertices, ranks {out['expected_ranks']}")
        for name, sk in out["skeletons"].items():
            print(f"  {name}: {sk['vertices']} vertices, {sk['edges']} edges, ranks {sk['ranks']}")
        print(f"  X ~ Psi(H) on ranks: {out['iso_X_PsiH']}")
        print(f"  Psi(H) ~ Psi(K) on ranks: {out['iso_PsiH_PsiK']}")
        if "cross_validation" in out:
            cv = out["cross_validation"]
            print(f"  M-labels on component {cv['component']}: "
                  f"{'satisfy the system' if cv['pass'] else 'FAIL'}; q values {cv['q_values']}")
    return EXIT_FEASIBLE if ok else EXIT_FAILED


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="raagcomm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="decide the integer system for two trees")
    d.add_argument("--left", required=True, help="tree spec (path:N, tkk:K, t4:..., adj:..., or @file)")
    d.add_argument("--right", required=True, help="tree spec")
    d.add_argument("--emit-system", metavar="PREFIX", help="write PREFIX-c1.json and PREFIX-c2.json")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_decide)

    s = sub.add_parser("sweep", help="decide all pairs of paths in a range")
    s.add_argument("--paths", required=True, metavar="A..B")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("covers", help="build and validate the covers S and Z")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--which", choices=("s", "z", "both"), default="both")
    c.add_argument("--dot", metavar="PATH")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_covers)

    p = sub.add_parser("splittings", help="compare X with the quotient graphs of both subgroups")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cross-validate", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_splittings)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, TreeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
