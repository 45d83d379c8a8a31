"""Command-line entry point.

Every subcommand builds a JSON report.  The report depends only on the
arguments and the seed, so repeated runs are byte-identical.  Wall-clock
time goes into a one-line summary next to the report, never into it.

Exit codes: 0 when every case passes, 1 on a verification failure, 2 on a
precondition or parse error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import basic_affine as ba
from .linalg import Matrix, to_scalar
from .quiver import QuiverError, QuiverSpec, cartan, cv, is_finite_type, path_quiver
from .reflection import DomainError, coxeter_suite, relation_words
from .rep import RepPoint, a1_level_point, random_sl, unit_point
from .torsion import (
    La1Instance,
    La2Instance,
    NotExact,
    check_corollary_la,
    check_lemma_la1,
    check_lemma_la2,
    random_la1_instance,
    random_la2_instance,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- parsing helpers -----------------------------------------------------------

def parse_fractions(text: str) -> list[Fraction]:
    try:
        return [to_scalar(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse rational list {text!r}: {exc}") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_quiver(path: str) -> QuiverSpec:
    data = load_json(path)
    try:
        return QuiverSpec.from_json(data)
    except QuiverError as exc:
        raise UsageError(f"{path}: {exc}") from None


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def mat_str(m: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.tolist()]


# -- case runners (shared by normal runs and --replay) -------------------------

def run_la1(payload: dict) -> dict:
    return check_lemma_la1(La1Instance.from_json(payload)).to_json()


def run_la2(payload: dict) -> dict:
    return check_lemma_la2(La2Instance.from_json(payload)).to_json()


def run_corollary(payload: dict) -> dict:
    return check_corollary_la(La2Instance.from_json(payload)).to_json()


def _lambda_x(lam: list[Fraction]) -> Matrix:
    if len(set(lam)) != len(lam):
        raise UsageError("lambda entries must be pairwise distinct")
    return ba.traceless_diag(lam)


def run_compare(payload: dict) -> dict:
    lam = [to_scalar(x) for x in payload["lambda"]]
    k = int(payload["k"])
    g = Matrix.from_json(payload["g"])
    x = _lambda_x(lam)
    claim = ba.claim_check(x.diagonal(), k)
    lhs, rhs = ba.quiver_vs_closed_form(x, k)
    cmp = ba.compare_actions_report(g, x, k)
    return {
        "claim_check": claim,
        "quiver_vs_closed_form": lhs == rhs,
        "compare_actions": bool(cmp),
        "ok": claim and lhs == rhs and bool(cmp),
    }


def run_coxeter_point(payload: dict) -> dict:
    from .reflection import orbit_equal, reflect_word
    p = RepPoint.from_json(payload["point"])
    lhs, rhs = tuple(payload["lhs"]), tuple(payload["rhs"])
    try:
        verdict = orbit_equal(reflect_word(p, lhs), reflect_word(p, rhs)).to_json()
    except DomainError as exc:
        verdict = {"value": "NotEqual", "evidence": f"domain failure: {exc}"}
    return {"verdict": verdict, "ok": verdict["value"] == "Equal"}


RUNNERS: dict[str, Callable[[dict], dict]] = {
    "la1": run_la1,
    "la2": run_la2,
    "corollary": run_corollary,
    "compare": run_compare,
    "coxeter": run_coxeter_point,
}


# -- subcommands -----------------------------------------------------------------

def cmd_cartan(args) -> dict:
    q = load_quiver(args.quiver)
    c = cartan(q)
    return {
        "A": [list(r) for r in c.A],
        "C": [list(r) for r in c.C],
        "finite": is_finite_type(c),
        "ok": True,
    }


def _sampler_for(q: QuiverSpec, v: tuple, w: tuple):
    if all(x == 1 for x in v):
        return lambda rng: unit_point(q, w, rng)
    if q == path_quiver(1):
        def a1(rng):
            lam = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
            return a1_level_point(v[0], w[0], lam, rng)
        return a1
    n = q.n
    if q == path_quiver(n) and v == tuple(range(n, 0, -1)) and w == (n + 1,) + (0,) * (n - 1):
        def an(rng):
            while True:
                lam = [Fraction(rng.randint(-12, 12), rng.randint(1, 3)) for _ in range(n + 1)]
                if len(set(lam)) == n + 1:
                    break
            return ba.xi_inverse(random_sl(rng, n + 1), ba.traceless_diag(lam))
        return an
    return None


def cmd_coxeter(args) -> dict:
    q = load_quiver(args.quiver)
    v = tuple(parse_ints(args.v))
    w = tuple(parse_ints(args.w))
    if len(v) != q.n or len(w) != q.n:
        raise UsageError("v and w must have one entry per vertex")
    c = cartan(q)
    if cv(c, v) != w:
        raise UsageError(
            f"framing w = {list(w)} is not C v = {list(cv(c, v))}; "
            "the Weyl group action needs w = C v"
        )
    sampler = _sampler_for(q, v, w)
    if sampler is None:
        raise UsageError("no level-set sampler for this quiver and dimension vector")
    rng = random.Random(args.seed)
    reports, cases = [], []
    for k in range(1, q.n + 1):
        for l in range(k, q.n + 1):
            try:
                relation_words(c, k, l)
            except ValueError:
                continue
            r = coxeter_suite(q, v, w, k, l, sampler, args.samples, rng)
            reports.append(r.to_json() | {"failures": len(r.failures)})
            for f in r.failures:
                cases.append({
                    "kind": "coxeter", "ok": False,
                    "payload": {"point": f["point"], "lhs": f["lhs"], "rhs": f["rhs"]},
                    "detail": f["verdict"],
                })
    return {
        "quiver": q.to_json(), "v": list(v), "w": list(w),
        "relations": reports, "failing_cases": cases,
        "ok": all(r["ok"] for r in reports),
    }


def cmd_compare(args) -> dict:
    lam = parse_fractions(args.lam)
    n = args.n if args.n is not None else len(lam) - 1
    if len(lam) != n + 1:
        raise UsageError(f"--lambda needs n + 1 = {n + 1} entries")
    _lambda_x(lam)
    rng = random.Random(args.seed)
    ks = [args.k] if args.k else list(range(1, n + 1))
    cases = []
    for k in ks:
        if not 1 <= k <= n:
            raise UsageError(f"--k must lie in 1..{n}")
        if args.g == "identity":
            g = Matrix.identity(n + 1)
        elif args.g == "random":
            g = random_sl(rng, n + 1)
        else:
            g = Matrix.from_json(load_json(args.g))
        payload = {"lambda": [str(x) for x in lam], "k": k, "g": g.to_json()}
        result = run_compare(payload)
        cases.append({"kind": "compare", "k": k, "ok": result["ok"], "result": result, "payload": payload})
    return {"n": n, "lambda": [str(x) for x in lam], "cases": cases, "ok": all(c["ok"] for c in cases)}


def cmd_lemmas(args) -> dict:
    rng = random.Random(args.seed)
    summary = {"la1": 0, "la2": 0, "corollary": 0}
    failing = []
    if args.max_dim > 0:
        for i in range(args.samples):
            inst1 = random_la1_instance(rng, args.max_dim)
            inst2 = random_la2_instance(rng, args.max_dim)
            for kind, payload in (("la1", inst1.to_json()), ("la2", inst2.to_json()), ("corollary", inst2.to_json())):
                result = RUNNERS[kind](payload)
                if result["ok"]:
                    summary[kind] += 1
                else:
                    failing.append({"kind": kind, "index": i, "ok": False, "result": result, "payload": payload})
    total = args.samples if args.max_dim > 0 else 0
    return {
        "samples": total, "max_dim": args.max_dim,
        "passed": summary, "failing_cases": failing,
        "ok": not failing,
    }


def cmd_xi(args) -> dict:
    p = RepPoint.from_json(load_json(args.point))
    try:
        cp = ba.xi(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"cotangent": cp.to_json(), "ok": True}
    if len(set(cp.x.diagonal())) == cp.x.rows:
        out["canonical"] = ba.canonical_form(cp).to_json()
    return out


def _g_arg(args, m: int) -> Matrix:
    if args.g == "identity":
        return Matrix.identity(m)
    if args.g == "random":
        return random_sl(random.Random(args.seed), m)
    return Matrix.from_json(load_json(args.g))


def cmd_xi_inv(args) -> dict:
    lam = parse_fractions(args.lam)
    x = _lambda_x(lam)
    g = _g_arg(args, len(lam))
    p = ba.xi_inverse(g, x)
    back = ba.canonical_form(ba.xi(p))
    ok = back == ba.canonical_form(ba.CotangentPoint(g, x))
    return {"point": p.to_json(), "round_trip": ok, "ok": ok}


def cmd_reflect_wk(args) -> dict:
    lam = parse_fractions(args.lam)
    x = _lambda_x(lam)
    g = _g_arg(args, len(lam))
    if not 1 <= args.k < len(lam):
        raise UsageError(f"--k must lie in 1..{len(lam) - 1}")
    wk = ba.w_k_matrix(x.diagonal(), args.k)
    out = ba.skcal_reflect(ba.CotangentPoint(g, x), args.k)
    return {
        "W_k": wk.to_json(), "det": str(wk.det()),
        "image": out.to_json(), "canonical": ba.canonical_form(out).to_json(),
        "ok": wk.det() == 1,
    }


def cmd_claim_check(args) -> dict:
    lam = parse_fractions(args.lam)
    _lambda_x(lam)
    ks = [args.k] if args.k else list(range(1, len(lam)))
    cases = []
    for k in ks:
        prod = ba.claim_product(lam, k)
        cases.append({"k": k, "product": mat_str(prod), "ok": prod.is_unipotent_upper()})
    return {"lambda": [str(x) for x in lam], "cases": cases, "ok": all(c["ok"] for c in cases)}


def cmd_replay(path: str) -> dict:
    data = load_json(path)
    if "kind" in data and "payload" in data:
        items = [data]
    else:
        items = [c for key in ("failing_cases", "cases") for c in data.get(key, []) if "payload" in c]
    results = []
    for item in items:
        runner = RUNNERS.get(item["kind"])
        if runner is None:
            raise UsageError(f"unknown case kind {item['kind']!r}")
        try:
            res = runner(item["payload"])
        except (NotExact, KeyError, ValueError) as exc:
            raise UsageError(f"payload does not replay: {exc}") from None
        results.append({"kind": item["kind"], "result": res, "ok": res["ok"]})
    return {"replayed": len(results), "results": results, "ok": all(r["ok"] for r in results)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dksweyl", description="Weyl group actions on quiver varieties, exactly.")
    ap.add_argument("--json-out", metavar="PATH", help="write the JSON report here")
    ap.add_argument("--replay", metavar="PATH", help="re-run the failing cases stored in a report or payload file")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--json-out", metavar="PATH", default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cartan", help="adjacency and Cartan matrices of a quiver")
    p.add_argument("quiver")
    common(p)

    p = sub.add_parser("coxeter", help="check the Coxeter relations on sampled level-set points")
    p.add_argument("quiver")
    p.add_argument("--v", required=True, help="dimension vector, e.g. 1,1")
    p.add_argument("--w", required=True, help="framing vector, e.g. 1,1")
    p.add_argument("--samples", type=int, default=100)
    common(p)

    p = sub.add_parser("compare", help="quiver reflection versus the closed form and the Miura-triple action")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", required=True, help="n+1 distinct rationals, e.g. -1,0,1")
    p.add_argument("--k", type=int)
    p.add_argument("--g", default="identity", help="'identity', 'random' or a matrix JSON path")
    common(p)

    p = sub.add_parser("lemmas", help="brute-force the torsion lemmas")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-dim", type=int, default=3)
    common(p)

    p = sub.add_parser("xi", help="map an A_n family point to the cotangent bundle")
    p.add_argument("point")
    common(p)

    for name, helptext in (("xi-inv", "A_n family point for [g, x]"),
                           ("reflect-wk", "closed-form reflection [g W_k^-1, Ad_W_k x]"),
                           ("claim-check", "check W_k u^-1 n_k u is upper unipotent")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--lambda", dest="lam", required=True)
        p.add_argument("--k", type=int, required=name == "reflect-wk")
        if name != "claim-check":
            p.add_argument("--g", default="identity")
        common(p)
    return ap


COMMANDS = {
    "cartan": cmd_cartan, "coxeter": cmd_coxeter, "compare": cmd_compare, "lemmas": cmd_lemmas,
    "xi": cmd_xi, "xi-inv": cmd_xi_inv, "reflect-wk": cmd_reflect_wk, "claim-check": cmd_claim_check,
}


def _config(args) -> dict:
    skip = {"json_out", "replay", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--lambda -1,0,1" would otherwise read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--lambda" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--lambda={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        if args.replay:
            body = cmd_replay(args.replay)
            name = "replay"
        elif args.command:
            body = COMMANDS[args.command](args)
            name = args.command
        else:
            parser.print_help()
            return EXIT_USAGE
    except (UsageError, QuiverError, DomainError, ba.RegularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"subcommand": name, "config": _config(args), "tolerance": "exact", **body}
    text = dump_report(report)
    summary = f"{name}: {'PASS' if body['ok'] else 'FAIL'} ({time.perf_counter() - start:.2f}s)"
    if getattr(args, "json_out", None):
        Path(args.json_out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK if body["ok"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
