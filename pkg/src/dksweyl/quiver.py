"""Quivers, doubling, framing and the Weyl group actions on dimension vectors.

Vertices are ``1..n``.  A framed quiver adds the vertex ``n + 1`` which
plays the role of the extra vertex ``inf`` carrying a one-dimensional space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .linalg import Matrix, det


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    id: int


@dataclass(frozen=True)
class QuiverSpec:
    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise QuiverError("vertex count must be non-negative")
        seen = set()
        for e in self.edges:
            if e.tail == e.head:
                raise QuiverError(f"edge {e.id} is a loop at vertex {e.tail}")
            for v in (e.tail, e.head):
                if not 1 <= v <= self.vertex_count:
                    raise QuiverError(f"edge {e.id} uses vertex {v} outside 1..{self.vertex_count}")
            if e.id in seen:
                raise QuiverError(f"duplicate edge id {e.id}")
            seen.add(e.id)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "QuiverSpec":
        return cls(n, tuple(Edge(int(t), int(h), i) for i, (t, h) in enumerate(pairs)))

    @property
    def n(self) -> int:
        return self.vertex_count

    def to_json(self) -> dict:
        return {"vertices": self.vertex_count, "edges": [[e.tail, e.head] for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "QuiverSpec":
        try:
            n = data["vertices"]
            pairs = data["edges"]
        except (KeyError, TypeError) as exc:
            raise QuiverError(f"quiver JSON needs 'vertices' and 'edges': {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise QuiverError("'vertices' must be an integer")
        for p in pairs:
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p)):
                raise QuiverError(f"bad edge entry {p!r}")
        return cls.from_pairs(n, pairs)

    @classmethod
    def loads(cls, text: str) -> "QuiverSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise QuiverError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_json(data)


def path_quiver(n: int) -> QuiverSpec:
    """The A_n quiver ``1 -> 2 -> ... -> n``."""
    return QuiverSpec.from_pairs(n, [(k, k + 1) for k in range(1, n)])


@dataclass(frozen=True)
class DoubledEdge:
    tail: int
    head: int
    id: int
    eps: int
    reverse: int

    @property
    def base_index(self) -> int:
        return self.id // 2


@dataclass(frozen=True)
class DoubledQuiver:
    base: QuiverSpec
    edges: tuple[DoubledEdge, ...]

    def edge(self, eid: int) -> DoubledEdge:
        e = self.edges[eid]
        assert e.id == eid
        return e

    def bar(self, eid: int) -> DoubledEdge:
        return self.edges[self.edges[eid].reverse]


def double(q: QuiverSpec) -> DoubledQuiver:
    """Base edge number ``i`` becomes id ``2i`` (eps=+1); its reversal gets ``2i+1``."""
    out = []
    for i, e in enumerate(q.edges):
        out.append(DoubledEdge(e.tail, e.head, 2 * i, +1, 2 * i + 1))
        out.append(DoubledEdge(e.head, e.tail, 2 * i + 1, -1, 2 * i))
    return DoubledQuiver(q, tuple(out))


@dataclass(frozen=True)
class CartanData:
    A: tuple[tuple[int, ...], ...]
    C: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.C)

    def matrix(self) -> Matrix:
        return Matrix(self.C, (self.n, self.n))


def cartan(q: QuiverSpec) -> CartanData:
    n = q.vertex_count
    a = [[0] * n for _ in range(n)]
    for e in double(q).edges:
        a[e.head - 1][e.tail - 1] += 1
    c = tuple(tuple((2 if k == l else 0) - a[k][l] for l in range(n)) for k in range(n))
    return CartanData(tuple(map(tuple, a)), c)


def is_finite_type(c: CartanData) -> bool:
    m = c.matrix()
    return all(det(m.submatrix(0, i, 0, i)) > 0 for i in range(1, c.n + 1))


@dataclass(frozen=True)
class FramedQuiver:
    base: QuiverSpec
    w: tuple[int, ...]
    quiver: QuiverSpec = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.w) != self.base.vertex_count:
            raise QuiverError(f"framing vector has length {len(self.w)}, expected {self.base.vertex_count}")
        if any(x < 0 for x in self.w):
            raise QuiverError("framing dimensions must be non-negative")
        n = self.base.vertex_count
        pairs = [(e.tail, e.head) for e in self.base.edges]
        for k, wk in enumerate(self.w, start=1):
            pairs.extend([(k, n + 1)] * wk)
        object.__setattr__(self, "quiver", QuiverSpec.from_pairs(n + 1, pairs))

    @property
    def n(self) -> int:
        return self.base.vertex_count

    @property
    def infinity(self) -> int:
        return self.n + 1

    def framing_edges(self, k: int | None = None) -> list[Edge]:
        es = self.quiver.edges[len(self.base.edges):]
        return [e for e in es if k is None or e.tail == k]

    def doubled(self) -> DoubledQuiver:
        return double(self.quiver)


def frame(q: QuiverSpec, w: Sequence[int]) -> FramedQuiver:
    return FramedQuiver(q, tuple(int(x) for x in w))


def hat_dim(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(v) + (1,)


def _check_vertex(c: CartanData, k: int) -> None:
    if not 1 <= k <= c.n:
        raise IndexError(f"vertex {k} outside 1..{c.n}")


def reflect_linear(c: CartanData, k: int, zeta: Sequence) -> tuple:
    """``s_k`` on parameter vectors: ``zeta_l - C_kl * zeta_k``."""
    _check_vertex(c, k)
    if len(zeta) != c.n:
        raise QuiverError("vector length does not match vertex count")
    zk = zeta[k - 1]
    return tuple(z - c.C[k - 1][l] * zk for l, z in enumerate(zeta))


def reflect_affine(c: CartanData, w: Sequence[int], k: int, v: Sequence[int]) -> tuple:
    _check_vertex(c, k)
    if len(w) != c.n or len(v) != c.n:
        raise QuiverError("vector length does not match vertex count")
    row = c.C[k - 1]
    new = v[k - 1] - sum(row[l] * v[l] for l in range(c.n)) + w[k - 1]
    out = list(v)
    out[k - 1] = new
    return tuple(out)


def apply_word(c: CartanData, w: Sequence[int] | None, word: Sequence[int], v: Sequence, mode: str = "linear") -> tuple:
    """Apply the letters of ``word`` one after another, first letter first."""
    out = tuple(v)
    for k in word:
        if mode == "linear":
            out = reflect_linear(c, k, out)
        elif mode == "affine":
            out = reflect_affine(c, w, k, out)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return out


def cv(c: CartanData, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(c.C[k][l] * v[l] for l in range(c.n)) for k in range(c.n))


def framing_equivariance_check(q: QuiverSpec, v: Sequence[int], w: Sequence[int], k: int) -> bool:
    """Affine action on ``v`` versus the unframed action on ``v`` with 1 at infinity."""
    fq = frame(q, w)
    cw = cartan(fq.quiver)
    lhs = reflect_affine(cw, (0,) * (fq.n + 1), k, hat_dim(v))
    rhs = hat_dim(reflect_affine(cartan(q), w, k, v))
    return lhs == rhs


def p_value(fq: FramedQuiver, alpha: Sequence[int]) -> int:
    if len(alpha) != fq.n + 1:
        raise QuiverError(f"expected a vector of length {fq.n + 1}")
    cross = sum(alpha[e.tail - 1] * alpha[e.head - 1] for e in fq.quiver.edges)
    return 1 + cross - sum(a * a for a in alpha)


def _root_reflect(c: CartanData, k: int, alpha: list[int]) -> list[int]:
    # s_k(alpha) = alpha - <alpha, alpha_k> alpha_k in simple-root coordinates
    pairing = sum(c.C[k - 1][l] * alpha[l] for l in range(c.n))
    out = list(alpha)
    out[k - 1] -= pairing
    return out


def is_reduced(c: CartanData, word: Sequence[int]) -> bool:
    """A word is reduced iff appending each letter lengthens the prefix,
    i.e. the prefix sends that simple root to a positive root."""
    for i, k in enumerate(word):
        _check_vertex(c, k)
        root = [0] * c.n
        root[k - 1] = 1
        for j in reversed(word[:i]):
            root = _root_reflect(c, j, root)
        if any(x < 0 for x in root):
            return False
    return True


def reduced_words(c: CartanData, max_len: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for k in range(1, c.n + 1):
                cand = w + (k,)
                if is_reduced(c, cand):
                    nxt.append(cand)
        out.extend(nxt)
        frontier = nxt
    return out


def words_up_to(n: int, max_len: int) -> list[tuple[int, ...]]:
    out = []
    for length in range(max_len + 1):
        out.extend(product(range(1, n + 1), repeat=length))
    return out
