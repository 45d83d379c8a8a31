"""Torsion-normalised reflection functors and the Coxeter-relation harness."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .linalg import Matrix, kernel_matrix, solve
from .quiver import QuiverSpec, cartan, path_quiver, reflect_linear
from .rep import (
    DEFAULT_ORDER,
    RepPoint,
    TkData,
    assemble_ak_bk,
    closed_paths_at_infinity,
    gauge_act,
    lambda_of,
    moment_map,
    path_invariant,
    traceless_moment,
)
from .torsion import is_exact_ses, torsion_ses


class DomainError(ValueError):
    """The point is outside the locus where the reflection is defined."""


@dataclass(frozen=True)
class ReflectionOutput:
    point: RepPoint
    vertex: int
    torsion_certificate: Fraction
    # the output is a representative; other choices differ by SL(V_k)
    note: str = "canonical up to SL(V_k) gauge"


def _scalar_moment(p: RepPoint, k: int) -> Fraction:
    mu = moment_map(p)[k]
    vk = p.dims[k - 1]
    lam = mu.trace() / vk
    if mu != Matrix.identity(vk).scale(lam):
        raise DomainError(f"moment map at vertex {k} is not scalar")
    return lam


def reflect(p: RepPoint, k: int, order: str = DEFAULT_ORDER) -> ReflectionOutput:
    if not 1 <= k <= p.n:
        raise IndexError(f"vertex {k} outside 1..{p.n}")
    vk = p.dims[k - 1]
    if vk == 0:
        return ReflectionOutput(p, k, Fraction(1))
    if not traceless_moment(p).level_zero:
        raise DomainError("point is not on the level set")
    lam = _scalar_moment(p, k)
    t = assemble_ak_bk(p, k, order)
    if t.b.rank() != vk:
        raise DomainError(f"b_{k} is not surjective")
    a_new = kernel_matrix(t.b)
    if a_new.cols != vk:
        raise DomainError(f"ker b_{k} has dimension {a_new.cols}, expected {vk}; framing is not w = Cv")
    vol = p.volumes[k - 1]
    tau = torsion_ses(a_new, t.b, vol, t.volume, vol)
    a_new = a_new.with_column_scaled(0, 1 / tau)
    rhs = t.a @ t.b - Matrix.identity(t.a.rows).scale(lam)
    b_new = solve(a_new, rhs)
    cert = torsion_ses(a_new, t.b, vol, t.volume, vol)
    return ReflectionOutput(_unpack(p, k, t, a_new, b_new), k, cert)


def _unpack(p: RepPoint, k: int, t: TkData, a_new: Matrix, b_new: Matrix) -> RepPoint:
    edges = p.edges()
    updates = {}
    r = 0
    for eid in t.summands:
        e = edges[eid]
        d = p.dim(e.tail)
        updates[e.reverse] = a_new.submatrix(r, r + d, 0, a_new.cols)
        blk = b_new.submatrix(0, b_new.rows, r, r + d)
        updates[e.id] = blk if e.eps > 0 else -blk
        r += d
    return p.replace(updates)


def reflect_word(p: RepPoint, word: Sequence[int], order: str = DEFAULT_ORDER) -> RepPoint:
    """Apply reflections letter by letter, first letter first."""
    for i, k in enumerate(word):
        try:
            p = reflect(p, k, order).point
        except DomainError as exc:
            raise DomainError(f"after prefix {tuple(word[:i])}: {exc}") from None
    return p


@dataclass(frozen=True)
class ZkReport:
    c1: bool
    c2: bool
    c3: bool

    def __bool__(self) -> bool:
        return self.c1 and self.c2 and self.c3


def verify_zk_report(p: RepPoint, q: RepPoint, k: int, order: str = DEFAULT_ORDER) -> ZkReport:
    if p.fq != q.fq or p.dims != q.dims or p.volumes != q.volumes:
        return ZkReport(False, False, False)
    c1 = all(p.maps[e.id] == q.maps[e.id] for e in p.edges() if e.head != k and e.tail != k)
    if p.dims[k - 1] == 0:
        return ZkReport(c1, True, True)
    tp, tq = assemble_ak_bk(p, k, order), assemble_ak_bk(q, k, order)
    vol = p.volumes[k - 1]
    c2 = is_exact_ses(tq.a, tp.b) and torsion_ses(tq.a, tp.b, vol, tp.volume, vol) == 1
    try:
        lam = _scalar_moment(p, k)
    except DomainError:
        return ZkReport(c1, c2, False)
    c3 = tq.a @ tq.b == tp.a @ tp.b - Matrix.identity(tp.a.rows).scale(lam)
    return ZkReport(c1, c2, c3)


def verify_zk(p: RepPoint, q: RepPoint, k: int, order: str = DEFAULT_ORDER) -> bool:
    return bool(verify_zk_report(p, q, k, order))


def mu_weyl_check(p: RepPoint, k: int, order: str = DEFAULT_ORDER) -> bool:
    q = reflect(p, k, order).point
    c = cartan(p.fq.base)
    return lambda_of(q) == reflect_linear(c, k, lambda_of(p))


# -- orbit comparison --------------------------------------------------------

EQUAL, NOT_EQUAL, INCONCLUSIVE = "Equal", "NotEqual", "Inconclusive"


@dataclass(frozen=True)
class OrbitVerdict:
    value: str
    evidence: str

    def to_json(self) -> dict:
        return {"value": self.value, "evidence": self.evidence}


def is_an_family_shape(p: RepPoint) -> bool:
    n = p.n
    return (
        p.fq.base == path_quiver(n)
        and p.dims == tuple(range(n, 0, -1))
        and p.w == (n + 1,) + (0,) * (n - 1)
    )


def local_witness(p1: RepPoint, p2: RepPoint):
    """Look for ``g`` in SL(V_k) at a single vertex carrying ``p1`` to ``p2``.

    Applies when the points differ only on edges at one vertex ``k``; the
    candidate is read off from the injective maps ``a_k``.
    """
    edges = p1.edges()
    diff = {e.id for e in edges if p1.maps[e.id] != p2.maps[e.id]}
    if not diff:
        return None
    touched = set.intersection(*({edges[i].head, edges[i].tail} for i in diff))
    for k in sorted(touched):
        if k > p1.n:
            continue
        a1, a2 = assemble_ak_bk(p1, k).a, assemble_ak_bk(p2, k).a
        try:
            g_inv = solve(a1, a2)
        except ValueError:
            continue
        if g_inv.det() != 1:
            continue
        g = {k: g_inv.inv()}
        if gauge_act(g, p1) == p2:
            return k, g
    return None


def orbit_equal(p1: RepPoint, p2: RepPoint, witness: dict | None = None, path_length: int = 6,
                use_canonical: bool = True) -> OrbitVerdict:
    """Three-valued comparison of the SL_v orbits of two level-set points.

    The definitive tests (trivial gauge group, canonical forms on the A_n
    family) run before the path-invariant battery, which is only needed when
    neither applies.
    """
    if p1.fq != p2.fq or p1.dims != p2.dims:
        return OrbitVerdict(NOT_EQUAL, "different quivers or dimension vectors")
    if p1 == p2:
        return OrbitVerdict(EQUAL, "identical points")
    if witness is not None and gauge_act(witness, p1) == p2:
        return OrbitVerdict(EQUAL, "gauge witness supplied")
    local = local_witness(p1, p2)
    if local is not None:
        return OrbitVerdict(EQUAL, f"gauge witness at vertex {local[0]}")
    l1, l2 = lambda_of(p1), lambda_of(p2)
    if l1 != l2:
        return OrbitVerdict(NOT_EQUAL, f"moment scalars differ: {[str(x) for x in l1]} vs {[str(x) for x in l2]}")
    if all(d <= 1 for d in p1.dims):
        if p1.maps == p2.maps:
            return OrbitVerdict(EQUAL, "identical points, trivial gauge group")
        diff = [i for i, (a, b) in enumerate(zip(p1.maps, p2.maps)) if a != b]
        return OrbitVerdict(NOT_EQUAL, f"trivial gauge group, edges {diff} differ")
    if use_canonical and is_an_family_shape(p1):
        from .basic_affine import SurjectivityError, canonical_form, xi
        try:
            c1, c2 = canonical_form(xi(p1)), canonical_form(xi(p2))
        except (SurjectivityError, ValueError):
            # off the surjective chart; fall through to path invariants
            c1 = c2 = None
        if c1 is not None:
            if c1 == c2:
                return OrbitVerdict(EQUAL, "matching cotangent canonical forms")
            return OrbitVerdict(NOT_EQUAL, "cotangent canonical forms differ")
    for word in closed_paths_at_infinity(p1.fq, path_length):
        a, b = path_invariant(p1, word), path_invariant(p2, word)
        if a != b:
            return OrbitVerdict(NOT_EQUAL, f"path invariant {list(word)}: {a} vs {b}")
    return OrbitVerdict(INCONCLUSIVE, f"all path invariants up to length {path_length} agree")


# -- Coxeter relations -------------------------------------------------------

def in_braid_locus(p: RepPoint, k: int, l: int) -> bool:
    lam = lambda_of(p)
    a, b = lam[k - 1], lam[l - 1]
    return a != 0 and b != 0 and a + b != 0


@dataclass
class CoxeterReport:
    k: int
    l: int
    relation: str
    samples: int = 0
    equal: int = 0
    rejected: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.equal == self.samples and not self.failures

    def to_json(self) -> dict:
        return {
            "k": self.k, "l": self.l, "relation": self.relation,
            "samples": self.samples, "equal": self.equal, "rejected": self.rejected,
            "failures": self.failures, "ok": self.ok,
        }


def relation_words(c, k: int, l: int) -> tuple[str, list[tuple[tuple, tuple]]]:
    if k == l:
        return "involution", [((k, k), ())]
    a = c.A[k - 1][l - 1]
    if a == 0:
        return "commutation", [((k, l), (l, k))]
    if a == 1:
        return "braid", [((k, l, k), (l, k, l))]
    raise ValueError(f"no finite Coxeter relation between {k} and {l} (A_kl = {a})")


def coxeter_suite(q: QuiverSpec, v: Sequence[int], w: Sequence[int], k: int, l: int,
                  sampler: Callable[[random.Random], RepPoint], samples: int, rng: random.Random,
                  max_rejections: int = 10000, order: str = DEFAULT_ORDER) -> CoxeterReport:
    c = cartan(q)
    relation, pairs = relation_words(c, k, l)
    report = CoxeterReport(k, l, relation)
    letters = {k, l}
    while report.samples < samples:
        p = sampler(rng)
        ok_locus = all(lambda_of(p)[x - 1] != 0 for x in letters)
        if relation == "braid":
            ok_locus = ok_locus and in_braid_locus(p, k, l)
        if not ok_locus:
            report.rejected += 1
            if report.rejected > max_rejections:
                raise RuntimeError("sampler exhausted before reaching the requested sample count")
            continue
        report.samples += 1
        good = True
        for lhs, rhs in pairs:
            try:
                verdict = orbit_equal(reflect_word(p, lhs, order), reflect_word(p, rhs, order))
            except DomainError as exc:
                verdict = OrbitVerdict(NOT_EQUAL, f"domain failure: {exc}")
            if verdict.value != EQUAL:
                good = False
                report.failures.append({
                    "index": report.samples - 1, "lhs": list(lhs), "rhs": list(rhs),
                    "verdict": verdict.to_json(), "point": p.to_json(),
                })
        if good:
            report.equal += 1
    return report
