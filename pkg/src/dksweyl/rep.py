"""Points of the representation space of a framed double quiver.

A point stores one matrix per doubled edge of the framed quiver ``Q^w``
(vertex ``n + 1`` is the one-dimensional vertex at infinity) together with
a volume form on each ``V_k``.  The framing spaces ``W_k`` carry fixed
standard bases of volume 1, which is what makes the bijection with
``(B, i, j)`` data well defined.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import Matrix, ShapeError, hstack, inverse, kernel_matrix, to_scalar, vstack
from .quiver import FramedQuiver, QuiverSpec, cartan, cv, frame
from .torsion import VolumeForm, direct_sum

# Summand order of T_k.  "infinity-first" puts framing summands ahead of the
# base vertices; see ``assemble_ak_bk``.
INFINITY_FIRST = "infinity-first"
INFINITY_LAST = "infinity-last"
DEFAULT_ORDER = INFINITY_FIRST


@dataclass(frozen=True)
class RepPoint:
    fq: FramedQuiver
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]
    volumes: tuple[VolumeForm, ...]

    def __post_init__(self):
        n = self.fq.n
        if len(self.dims) != n:
            raise ShapeError(f"need {n} dimensions, got {len(self.dims)}")
        if len(self.volumes) != n or any(vol.dim != d for vol, d in zip(self.volumes, self.dims)):
            raise ShapeError("volume forms do not match dimensions")
        edges = self.fq.doubled().edges
        if len(self.maps) != len(edges):
            raise ShapeError(f"need {len(edges)} edge maps, got {len(self.maps)}")
        for e, m in zip(edges, self.maps):
            want = (self.dim(e.head), self.dim(e.tail))
            if m.shape != want:
                raise ShapeError(f"edge {e.id} ({e.tail}->{e.head}) has shape {m.shape}, expected {want}")

    @property
    def n(self) -> int:
        return self.fq.n

    @property
    def w(self) -> tuple[int, ...]:
        return self.fq.w

    def dim(self, vertex: int) -> int:
        return 1 if vertex == self.fq.infinity else self.dims[vertex - 1]

    def volume(self, vertex: int) -> VolumeForm:
        return VolumeForm(1) if vertex == self.fq.infinity else self.volumes[vertex - 1]

    def edges(self):
        return self.fq.doubled().edges

    def B(self, eid: int) -> Matrix:
        return self.maps[eid]

    def replace(self, updates: Mapping[int, Matrix]) -> "RepPoint":
        maps = list(self.maps)
        for eid, m in updates.items():
            maps[eid] = m
        return RepPoint(self.fq, self.dims, tuple(maps), self.volumes)

    def to_json(self) -> dict:
        return {
            "quiver": self.fq.base.to_json(),
            "dims": list(self.dims),
            "framing": list(self.fq.w),
            "maps": {str(i): m.to_json() for i, m in enumerate(self.maps)},
            "volumes": [str(v.value) for v in self.volumes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RepPoint":
        q = QuiverSpec.from_json(data["quiver"])
        fq = frame(q, data["framing"])
        dims = tuple(int(d) for d in data["dims"])
        vols = data.get("volumes") or ["1"] * len(dims)
        volumes = tuple(VolumeForm(d, to_scalar(x)) for d, x in zip(dims, vols))
        count = len(fq.doubled().edges)
        raw = data["maps"]
        if sorted(raw, key=int) != [str(i) for i in range(count)]:
            raise ShapeError(f"maps must be keyed by edge ids 0..{count - 1}")
        maps = tuple(Matrix.from_json(raw[str(i)]) for i in range(count))
        return cls(fq, dims, maps, volumes)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def standard_volumes(dims: Sequence[int]) -> tuple[VolumeForm, ...]:
    return tuple(VolumeForm(d) for d in dims)


def zero_point(fq: FramedQuiver, dims: Sequence[int], volumes=None) -> RepPoint:
    dims = tuple(dims)
    pt = [Matrix.zeros(1 if e.head == fq.infinity else dims[e.head - 1],
                       1 if e.tail == fq.infinity else dims[e.tail - 1])
          for e in fq.doubled().edges]
    return RepPoint(fq, dims, tuple(pt), tuple(volumes) if volumes else standard_volumes(dims))


# -- framed <-> (B, i, j) ----------------------------------------------------

def to_framed(q: QuiverSpec, dims: Sequence[int], B: Mapping[int, Matrix], i: Mapping[int, Matrix],
              j: Mapping[int, Matrix], volumes=None) -> RepPoint:
    """Build a framed point from base maps ``B`` (keyed by doubled base edge id)
    and framing maps ``i_k: W_k -> V_k``, ``j_k: V_k -> W_k``.

    Framing edge number ``a`` at vertex ``k`` carries row ``a`` of ``j_k`` on
    the edge towards infinity and minus column ``a`` of ``i_k`` on the way back.
    """
    w = tuple(i[k].cols if k in i else 0 for k in range(1, q.n + 1))
    fq = frame(q, w)
    maps = {}
    for eid, m in B.items():
        maps[eid] = m
    for k in range(1, q.n + 1):
        for a, e in enumerate(fq.framing_edges(k)):
            maps[2 * e.id] = j[k].submatrix(a, a + 1, 0, j[k].cols)
            maps[2 * e.id + 1] = -i[k].col(a)
    base = zero_point(fq, dims, volumes)
    return base.replace(maps)


def from_framed(p: RepPoint):
    nb = len(p.fq.base.edges)
    B = {eid: p.maps[eid] for eid in range(2 * nb)}
    i, j = {}, {}
    for k in range(1, p.n + 1):
        es = p.fq.framing_edges(k)
        vk = p.dims[k - 1]
        if es:
            j[k] = vstack([p.maps[2 * e.id] for e in es])
            i[k] = -hstack([p.maps[2 * e.id + 1] for e in es])
        else:
            j[k] = Matrix.zeros(0, vk)
            i[k] = Matrix.zeros(vk, 0)
    return B, i, j


# -- moment maps -------------------------------------------------------------

def moment_map(p: RepPoint) -> dict[int, Matrix]:
    """Framed moment map at every vertex, infinity included (key ``n + 1``).

    ``mu_l = sum over doubled edges h into l of eps(h) B_h B_hbar``.
    """
    out = {v: Matrix.zeros(p.dim(v), p.dim(v)) for v in range(1, p.n + 2)}
    dq = p.fq.doubled()
    for e in dq.edges:
        term = p.maps[e.id] @ p.maps[e.reverse]
        out[e.head] = out[e.head] + term if e.eps > 0 else out[e.head] - term
    return out


def lambda_of(p: RepPoint) -> tuple[Fraction, ...]:
    """``Tr mu_k / v_k`` per base vertex, 0 where ``v_k = 0``."""
    mu = moment_map(p)
    return tuple(mu[k].trace() / p.dims[k - 1] if p.dims[k - 1] else Fraction(0) for k in range(1, p.n + 1))


@dataclass(frozen=True)
class TracelessMoment:
    parts: dict
    level_zero: bool
    lam: tuple | None


def traceless_moment(p: RepPoint) -> TracelessMoment:
    mu = moment_map(p)
    parts = {}
    for k in range(1, p.n + 1):
        vk = p.dims[k - 1]
        if vk == 0:
            continue
        parts[k] = mu[k] - Matrix.identity(vk).scale(mu[k].trace() / vk)
    zero = all(m.is_zero() for m in parts.values())
    return TracelessMoment(parts, zero, lambda_of(p) if zero else None)


def on_level_set(p: RepPoint) -> bool:
    return traceless_moment(p).level_zero


# -- gauge and invariants ------------------------------------------------------

def gauge_act(g: Mapping[int, Matrix], p: RepPoint) -> RepPoint:
    """``B_h -> g_head B_h g_tail^{-1}``; vertices missing from ``g`` (and
    infinity) get the identity."""
    inv = {k: inverse(m) for k, m in g.items()}
    maps = []
    for e in p.edges():
        m = p.maps[e.id]
        if e.head in g:
            m = g[e.head] @ m
        if e.tail in inv:
            m = m @ inv[e.tail]
        maps.append(m)
    return RepPoint(p.fq, p.dims, tuple(maps), p.volumes)


def symplectic_pair(p: RepPoint, q: RepPoint) -> Fraction:
    if p.dims != q.dims or p.fq != q.fq:
        raise ShapeError("points live on different spaces")
    total = Fraction(0)
    for e in p.edges():
        if e.eps > 0:
            total += (p.maps[e.id] @ q.maps[e.reverse]).trace() - (p.maps[e.reverse] @ q.maps[e.id]).trace()
    return total


def path_invariant(p: RepPoint, word: Sequence[int]) -> Fraction:
    """Trace of the composite along a closed path at infinity (edges in
    travel order)."""
    inf = p.fq.infinity
    at = inf
    acc = Matrix.identity(1)
    edges = p.edges()
    for eid in word:
        e = edges[eid]
        if e.tail != at:
            raise ValueError(f"edge {eid} does not start at vertex {at}")
        acc = p.maps[eid] @ acc
        at = e.head
    if at != inf:
        raise ValueError("path does not return to infinity")
    return acc[0, 0]


def closed_paths_at_infinity(fq: FramedQuiver, max_len: int) -> list[tuple[int, ...]]:
    edges = fq.doubled().edges
    out = []
    frontier = [((), fq.infinity)]
    for _ in range(max_len):
        nxt = []
        for word, at in frontier:
            for e in edges:
                if e.tail == at:
                    w2 = word + (e.id,)
                    nxt.append((w2, e.head))
                    if e.head == fq.infinity:
                        out.append(w2)
        frontier = nxt
    return out


# -- the maps a_k, b_k -------------------------------------------------------

@dataclass(frozen=True)
class TkData:
    a: Matrix
    b: Matrix
    summands: tuple[int, ...]   # doubled edge ids h with head k, in T_k order
    volume: VolumeForm


def tk_edges(p: RepPoint, k: int, order: str = DEFAULT_ORDER) -> list:
    inf = p.fq.infinity
    es = [e for e in p.edges() if e.head == k]

    def key(e):
        is_inf = e.tail == inf
        first = (not is_inf) if order == INFINITY_FIRST else is_inf
        return (first, e.tail, e.id)

    if order not in (INFINITY_FIRST, INFINITY_LAST):
        raise ValueError(f"unknown T_k order {order!r}")
    return sorted(es, key=key)


def assemble_ak_bk(p: RepPoint, k: int, order: str = DEFAULT_ORDER) -> TkData:
    """``a_k: V_k -> T_k`` stacks ``B_hbar``; ``b_k: T_k -> V_k`` concatenates
    ``eps(h) B_h`` over doubled edges ``h`` with head ``k``.  Then ``b_k a_k = mu_k``."""
    if not 1 <= k <= p.n:
        raise IndexError(f"vertex {k} outside 1..{p.n}")
    es = tk_edges(p, k, order)
    vk = p.dims[k - 1]
    if es:
        a = vstack([p.maps[e.reverse] for e in es])
        b = hstack([p.maps[e.id] if e.eps > 0 else -p.maps[e.id] for e in es])
    else:
        a, b = Matrix.zeros(0, vk), Matrix.zeros(vk, 0)
    vol = direct_sum([p.volume(e.tail) for e in es])
    return TkData(a, b, tuple(e.id for e in es), vol)


@dataclass(frozen=True)
class Locus:
    in_surjective: bool
    in_injective: bool


def locus_membership(p: RepPoint, k: int) -> Locus:
    t = assemble_ak_bk(p, k)
    vk = p.dims[k - 1]
    return Locus(t.b.rank() == vk, t.a.rank() == vk)


# -- tangent computations ------------------------------------------------------

def coordinate_count(p: RepPoint) -> int:
    return sum(m.rows * m.cols for m in p.maps)


def moment_differential(p: RepPoint, q: RepPoint) -> dict[int, Matrix]:
    """``d mu_l`` at ``p`` in the direction ``q``."""
    out = {v: Matrix.zeros(p.dim(v), p.dim(v)) for v in range(1, p.n + 2)}
    for e in p.edges():
        term = q.maps[e.id] @ p.maps[e.reverse] + p.maps[e.id] @ q.maps[e.reverse]
        out[e.head] = out[e.head] + term if e.eps > 0 else out[e.head] - term
    return out


def jacobian_rank(p: RepPoint) -> int:
    """Rank of ``q -> traceless part of d mu_k(q)`` over the base vertices."""
    columns = []
    zero = zero_point(p.fq, p.dims, p.volumes)
    for eid, m in enumerate(p.maps):
        for r in range(m.rows):
            for c in range(m.cols):
                unit = [[0] * m.cols for _ in range(m.rows)]
                unit[r][c] = 1
                q = zero.replace({eid: Matrix(unit, m.shape)})
                d = moment_differential(p, q)
                col = []
                for k in range(1, p.n + 1):
                    vk = p.dims[k - 1]
                    if not vk:
                        continue
                    part = d[k] - Matrix.identity(vk).scale(d[k].trace() / vk)
                    col.extend(x for row in part.tolist() for x in row)
                columns.append(col)
    if not columns or not columns[0]:
        return 0
    return Matrix(columns, (len(columns), len(columns[0]))).rank()


def expected_fiber_dimension(p: RepPoint) -> int:
    """``v^T A v + 2 v^T w - v^T v + n`` with ``A`` counted on the doubled base quiver."""
    c = cartan(p.fq.base)
    v = p.dims
    vav = sum(v[k] * c.A[k][l] * v[l] for k in range(p.n) for l in range(p.n))
    return vav + 2 * sum(a * b for a, b in zip(v, p.w)) - sum(a * a for a in v) + p.n


# -- sampling ------------------------------------------------------------------

def _rand_entry(rng: random.Random, spread: int = 3) -> Fraction:
    return Fraction(rng.randint(-spread, spread))


def random_matrix(rng: random.Random, r: int, c: int, spread: int = 3) -> Matrix:
    return Matrix([[_rand_entry(rng, spread) for _ in range(c)] for _ in range(r)], (r, c))


def random_volume(rng: random.Random, d: int) -> VolumeForm:
    if d == 0:
        return VolumeForm(0)
    return VolumeForm(d, Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)))


def random_point(fq: FramedQuiver, dims: Sequence[int], rng: random.Random, spread: int = 3,
                 random_volumes: bool = True) -> RepPoint:
    """Uniform small-integer entries on every edge; not on the level set in general."""
    dims = tuple(dims)
    z = zero_point(fq, dims)
    maps = tuple(random_matrix(rng, m.rows, m.cols, spread) for m in z.maps)
    vols = tuple(random_volume(rng, d) for d in dims) if random_volumes else z.volumes
    return RepPoint(fq, dims, maps, vols)


def random_sl(rng: random.Random, n: int, spread: int = 2) -> Matrix:
    """A random element of ``SL(n)``: lower unipotent times upper unipotent
    times a diagonal of determinant 1."""
    if n <= 1:
        return Matrix.identity(n)
    lower = Matrix([[int(i == j) if i <= j else rng.randint(-spread, spread) for j in range(n)] for i in range(n)])
    upper = Matrix([[int(i == j) if i >= j else rng.randint(-spread, spread) for j in range(n)] for i in range(n)])
    d = Fraction(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 2, 3]))
    return lower @ upper @ Matrix.diag([d] + [1] * (n - 2) + [1 / d])


def random_gauge(p: RepPoint, rng: random.Random) -> dict[int, Matrix]:
    return {k: random_sl(rng, p.dims[k - 1]) for k in range(1, p.n + 1)}


def is_balanced(p: RepPoint) -> bool:
    """``w = C v``: the hypothesis under which reflections preserve ``v``."""
    return cv(cartan(p.fq.base), p.dims) == tuple(p.w)


def unit_point(q: QuiverSpec, w: Sequence[int], rng: random.Random, spread: int = 3,
               random_volumes: bool = True) -> RepPoint:
    """Every point with all ``v_k = 1`` lies on the level set."""
    return random_point(frame(q, w), (1,) * q.n, rng, spread, random_volumes)


def a1_level_point(v: int, w: int, lam: Fraction, rng: random.Random) -> RepPoint:
    """An ``A_1`` point with ``i j = lam * I``: ``j = lam i^T (i i^T)^{-1} + ker(i)`` part."""
    from .quiver import path_quiver
    q = path_quiver(1)
    while True:
        i = random_matrix(rng, v, w)
        if i.rank() == v:
            break
    j = (i.T @ inverse(i @ i.T)).scale(lam)
    ker = kernel_matrix(i)
    if ker.cols:
        j = j + ker @ random_matrix(rng, ker.cols, v)
    return to_framed(q, (v,), {}, {1: i}, {1: j}, (random_volume(rng, v),))
