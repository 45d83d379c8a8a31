"""Acceptance criteria 1-8.

Every check is an exact equality of rationals; there are no numerical
tolerances anywhere.  The only thresholds are the wall-clock budgets below.
Each test records one PASS/FAIL line, printed at the end of the pytest run
(see conftest.py) or directly when this file is executed as a script.
"""
from __future__ import annotations

import json
import random
import time
from fractions import Fraction
from itertools import product

from dksweyl import basic_affine as ba
from dksweyl import cli
from dksweyl.quiver import (
    apply_word,
    cartan,
    cv,
    frame,
    framing_equivariance_check,
    path_quiver,
    reduced_words,
    reflect_linear,
)
from dksweyl.reflection import (
    coxeter_suite,
    lambda_of,
    reflect,
    relation_words,
    verify_zk,
)
from dksweyl.rep import (
    a1_level_point,
    assemble_ak_bk,
    coordinate_count,
    expected_fiber_dimension,
    gauge_act,
    jacobian_rank,
    locus_membership,
    moment_map,
    random_gauge,
    random_point,
    random_sl,
    unit_point,
)
from dksweyl.torsion import (
    check_corollary_la,
    check_lemma_la1,
    check_lemma_la2,
    random_la1_instance,
    random_la2_instance,
)

# Budgets in seconds, one per timed criterion.  Exactness is not a budget:
# every comparison below is equality in Q.
BUDGET = {1: 5.0, 2: 30.0, 3: 60.0, 4: 30.0, 5: 10.0, 6: 120.0, 7: 5.0}
COUNTS = {
    "moment_points": 500,
    "reflection_points": 200,
    "coxeter_samples": 100,
    "lemma_instances": 200,
    "jacobian_points": 20,
    "agreement_lambdas": 25,
    "max_word_length": 6,
}
SEED = 20240601

RESULTS: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> None:
    RESULTS[num] = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"


def _distinct_lambda(rng: random.Random, n: int) -> list[Fraction]:
    while True:
        lam = [Fraction(rng.randint(-20, 20), rng.randint(1, 5)) for _ in range(n + 1)]
        if len(set(lam)) == n + 1:
            return lam


def test_criterion_1_moment_identity():
    rng = random.Random(SEED + 1)
    quivers = [path_quiver(1), path_quiver(2), path_quiver(3)]
    start = time.perf_counter()
    bad = 0
    checks = 0
    for i in range(COUNTS["moment_points"]):
        q = quivers[i % 3]
        dims = tuple(rng.randint(0, 3) for _ in range(q.n))
        w = tuple(rng.randint(0, 3) for _ in range(q.n))
        p = random_point(frame(q, w), dims, rng)
        mu = moment_map(p)
        for k in range(1, q.n + 1):
            t = assemble_ak_bk(p, k)
            checks += 1
            if t.b @ t.a != mu[k]:
                bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < BUDGET[1]
    record(1, ok, f"b_k a_k = mu_k on {checks} vertex checks over {COUNTS['moment_points']} points, "
                  f"{bad} mismatches, {elapsed:.2f}s (< {BUDGET[1]}s)")
    assert bad == 0
    assert elapsed < BUDGET[1]


def _applicable_points(rng: random.Random, count: int):
    """Level-set points paired with a vertex where b_k is surjective and a_k
    injective; the reverse Z_k check needs the second condition."""
    a2, a3, a1 = path_quiver(2), path_quiver(3), path_quiver(1)
    makers = [
        lambda: unit_point(a2, (1, 1), rng),
        lambda: unit_point(a3, (1, 0, 1), rng),
        lambda: unit_point(a1, (2,), rng),
        lambda: a1_level_point(2, 4, Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 3)), rng),
        lambda: _twisted_family(rng, 2),
        lambda: _twisted_family(rng, 3),
    ]
    out = []
    i = 0
    while len(out) < count:
        p = makers[i % len(makers)]()
        i += 1
        ks = [k for k in range(1, p.n + 1) if p.dims[k - 1]
              and locus_membership(p, k).in_surjective and locus_membership(p, k).in_injective]
        if ks:
            out.append((p, rng.choice(ks)))
    return out


def _twisted_family(rng: random.Random, n: int):
    p = ba.xi_inverse(random_sl(rng, n + 1), ba.traceless_diag(_distinct_lambda(rng, n)))
    return gauge_act(random_gauge(p, rng), p)


def test_criterion_2_reflection_contract():
    rng = random.Random(SEED + 2)
    points = _applicable_points(rng, COUNTS["reflection_points"])
    start = time.perf_counter()
    failures = []
    for idx, (p, k) in enumerate(points):
        out = reflect(p, k)
        q = out.point
        c = cartan(p.fq.base)
        ok = (
            out.torsion_certificate == 1
            and verify_zk(p, q, k)
            and verify_zk(q, p, k)
            and lambda_of(q) == reflect_linear(c, k, lambda_of(p))
        )
        if not ok:
            failures.append(idx)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < BUDGET[2]
    record(2, ok, f"Z_k both ways + torsion 1 + mu equivariance on {len(points)} points, "
                  f"{len(failures)} failures, {elapsed:.2f}s (< {BUDGET[2]}s)")
    assert not failures, failures[:5]
    assert elapsed < BUDGET[2]


def test_criterion_3_coxeter_relations():
    rng = random.Random(SEED + 3)
    cases = [(path_quiver(2), (1, 1), (1, 1)), (path_quiver(3), (1, 1, 1), (1, 0, 1))]
    start = time.perf_counter()
    summary, all_ok = [], True
    for q, v, w in cases:
        assert cv(cartan(q), v) == w
        c = cartan(q)
        for k in range(1, q.n + 1):
            for l in range(k, q.n + 1):
                relation, _ = relation_words(c, k, l)
                rep = coxeter_suite(q, v, w, k, l, lambda r: unit_point(q, w, r),
                                    COUNTS["coxeter_samples"], rng)
                all_ok &= rep.ok
                summary.append(f"A{q.n}:{relation}({k},{l})={rep.equal}/{rep.samples}")
    elapsed = time.perf_counter() - start
    ok = all_ok and elapsed < BUDGET[3]
    record(3, ok, f"{' '.join(summary)}, {elapsed:.2f}s (< {BUDGET[3]}s)")
    assert all_ok
    assert elapsed < BUDGET[3]


def test_criterion_4_torsion_lemmas():
    rng = random.Random(SEED + 4)
    start = time.perf_counter()
    passed = {"la1": 0, "la2": 0, "corollary": 0}
    n = COUNTS["lemma_instances"]
    nontrivial_sign = 0
    for _ in range(n):
        i1 = random_la1_instance(rng, 3)
        r1 = check_lemma_la1(i1)
        passed["la1"] += r1.sign_ok and r1.exact1
        nontrivial_sign += r1.sign == -1
        i2 = random_la2_instance(rng, 3)
        passed["la2"] += check_lemma_la2(i2).product_ok
        passed["corollary"] += check_corollary_la(i2).ok
    elapsed = time.perf_counter() - start
    ok = all(v == n for v in passed.values()) and elapsed < BUDGET[4] and nontrivial_sign > 0
    record(4, ok, f"la1 {passed['la1']}/{n}, la2 {passed['la2']}/{n}, corollary {passed['corollary']}/{n} "
                  f"({nontrivial_sign} la1 instances with sign -1), {elapsed:.2f}s (< {BUDGET[4]}s)")
    assert all(v == n for v in passed.values()), passed
    assert nontrivial_sign > 0
    assert elapsed < BUDGET[4]


def test_criterion_5_jacobian_rank():
    rng = random.Random(SEED + 5)
    start = time.perf_counter()
    ranks, fibers = set(), set()
    bad = 0
    for _ in range(COUNTS["jacobian_points"]):
        p = _twisted_family(rng, 2)
        r = jacobian_rank(p)
        sl_dim = sum(d * d - 1 for d in p.dims if d)
        fiber = coordinate_count(p) - r
        ranks.add(r)
        fibers.add(fiber)
        if r != sl_dim or fiber != expected_fiber_dimension(p):
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < BUDGET[5]
    record(5, ok, f"rank {sorted(ranks)} = dim sl_v = 3, fiber {sorted(fibers)} = 13 at "
                  f"{COUNTS['jacobian_points']} points, {elapsed:.2f}s (< {BUDGET[5]}s)")
    assert bad == 0
    assert elapsed < BUDGET[5]


def test_criterion_6_weyl_actions_agree():
    rng = random.Random(SEED + 6)
    start = time.perf_counter()
    tally = {"quiver": 0, "ggkr": 0, "claim": 0}
    total = 0
    failures = []
    for n in (1, 2, 3):
        for _ in range(COUNTS["agreement_lambdas"]):
            lam = _distinct_lambda(rng, n)
            x = ba.traceless_diag(lam)
            g = random_sl(rng, n + 1)
            for k in range(1, n + 1):
                total += 1
                lhs, rhs = ba.quiver_vs_closed_form(x, k)
                a = lhs == rhs
                b = ba.compare_actions(g, x, k)
                c = ba.claim_check(x.diagonal(), k)
                tally["quiver"] += a
                tally["ggkr"] += b
                tally["claim"] += c
                if not (a and b and c):
                    failures.append((n, [str(t) for t in lam], k))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < BUDGET[6]
    record(6, ok, f"quiver=closed form {tally['quiver']}/{total}, Miura comparison {tally['ggkr']}/{total}, "
                  f"claim {tally['claim']}/{total}, {elapsed:.2f}s (< {BUDGET[6]}s)")
    assert not failures, failures[:3]
    assert elapsed < BUDGET[6]


def test_criterion_7_weyl_combinatorics():
    rng = random.Random(SEED + 7)
    start = time.perf_counter()
    q4 = path_quiver(4)
    c4 = cartan(q4)
    words = reduced_words(c4, COUNTS["max_word_length"])
    vs = [(4, 3, 2, 1)] + [tuple(rng.randint(0, 4) for _ in range(4)) for _ in range(5)]
    fixed_bad = 0
    for v in vs:
        w = cv(c4, v)
        if any(x < 0 for x in w):
            continue
        for word in words:
            if apply_word(c4, w, word, v, "affine") != tuple(v):
                fixed_bad += 1
    eq_bad, eq_total = 0, 0
    for n in (1, 2, 3, 4):
        q = path_quiver(n)
        for v, w in product(product(range(3), repeat=n), repeat=2):
            if rng.random() > 0.3 and n > 2:
                continue
            for k in range(1, n + 1):
                eq_total += 1
                eq_bad += not framing_equivariance_check(q, v, w, k)
    elapsed = time.perf_counter() - start
    ok = fixed_bad == 0 and eq_bad == 0 and elapsed < BUDGET[7]
    record(7, ok, f"{len(words)} reduced words of length <= 6 in A_4 fix v, framing equivariance "
                  f"{eq_total - eq_bad}/{eq_total}, {elapsed:.2f}s (< {BUDGET[7]}s)")
    assert fixed_bad == 0 and eq_bad == 0
    assert elapsed < BUDGET[7]


CLI_RUNS = [
    ["cartan", "{a2}"],
    ["coxeter", "{a2}", "--v", "1,1", "--w", "1,1", "--samples", "10", "--seed", "7"],
    ["coxeter", "{a3}", "--v", "1,1,1", "--w", "1,0,1", "--samples", "5", "--seed", "7"],
    ["compare", "--n", "2", "--lambda", "-1,0,1", "--g", "random", "--seed", "7"],
    ["lemmas", "--samples", "20", "--seed", "7"],
    ["xi", "{point}"],
    ["xi-inv", "--lambda", "0,1/2,3", "--g", "random", "--seed", "7"],
    ["reflect-wk", "--lambda", "0,1,3", "--k", "2", "--g", "random", "--seed", "7"],
    ["claim-check", "--lambda", "0,1,5,-2"],
]


def test_criterion_8_cli_determinism(tmp_path):
    a2 = tmp_path / "a2.json"
    a2.write_text(json.dumps({"vertices": 2, "edges": [[1, 2]]}))
    a3 = tmp_path / "a3.json"
    a3.write_text(json.dumps({"vertices": 3, "edges": [[1, 2], [2, 3]]}))
    point = tmp_path / "point.json"
    point.write_text(json.dumps(ba.an_family_point(2, [0, 1, 3]).to_json()))
    subs = {"{a2}": str(a2), "{a3}": str(a3), "{point}": str(point)}
    identical = 0
    codes = []
    for i, run in enumerate(CLI_RUNS):
        argv = [subs.get(a, a) for a in run]
        outs = []
        for rep in range(2):
            out = tmp_path / f"r{i}_{rep}.json"
            codes.append(cli.main(argv + ["--json-out", str(out)]))
            outs.append(out.read_bytes())
        identical += outs[0] == outs[1]
    ok = identical == len(CLI_RUNS) and all(c == 0 for c in codes)
    record(8, ok, f"{identical}/{len(CLI_RUNS)} subcommands byte-identical across two runs, exit codes {sorted(set(codes))}")
    assert identical == len(CLI_RUNS)
    assert all(c == 0 for c in codes)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
    for num in sorted(RESULTS):
        print(RESULTS[num])
