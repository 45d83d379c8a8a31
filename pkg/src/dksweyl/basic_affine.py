"""The A_n quiver data versus the cotangent bundle of SL(n+1)/U.

Cotangent points are pairs ``[g, x]`` with ``g`` in SL(n+1) and ``x`` upper
triangular and traceless, modulo ``[g, x] ~ [g u^{-1}, Ad_u x]`` for ``u``
upper unipotent.  On the regular semisimple chart every class has a unique
representative with ``x`` in "y-shape": distinct diagonal, ones on the
superdiagonal, zeros further up.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import InconsistentSystem, Matrix, det, embed, hstack, inverse, solve, to_scalar, vstack
from .quiver import path_quiver
from .rep import RepPoint, from_framed, to_framed


class SurjectivityError(ValueError):
    """Some ``beta_k`` fails to be surjective, so the point is off the chart."""


class RegularityError(ValueError):
    """Repeated eigenvalues: outside the regular semisimple chart."""


def gamma(y: Matrix) -> Matrix:
    """Traceless part ``Y - Tr(Y)/(n+1) I``."""
    return y - Matrix.identity(y.rows).scale(y.trace() / y.rows)


def _lam(values: Sequence) -> tuple[Fraction, ...]:
    return tuple(to_scalar(v) for v in values)


def _require_distinct(lam: Sequence[Fraction]) -> None:
    if len(set(lam)) != len(lam):
        raise RegularityError(f"eigenvalues must be pairwise distinct, got {[str(x) for x in lam]}")


@dataclass(frozen=True)
class CotangentPoint:
    g: Matrix
    x: Matrix

    def __post_init__(self):
        if det(self.g) != 1:
            raise ValueError("g must have determinant 1")
        if not self.x.is_upper_triangular() or self.x.trace() != 0:
            raise ValueError("x must be upper triangular and traceless")

    @property
    def n(self) -> int:
        return self.g.rows - 1

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "x": self.x.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "CotangentPoint":
        return cls(Matrix.from_json(data["g"]), Matrix.from_json(data["x"]))


@dataclass(frozen=True)
class CanonicalCotangent:
    g_can: Matrix
    y: Matrix

    def to_json(self) -> dict:
        return {"g": self.g_can.to_json(), "y": self.y.to_json()}


# -- the A_n family ------------------------------------------------------------

def taus(lam: Sequence) -> tuple[Fraction, ...]:
    lam = _lam(lam)
    return tuple(lam[k] - lam[k - 1] for k in range(1, len(lam)))


def beta0(n: int, l: int) -> Matrix:
    """``(0 | I_{n-l})``, of shape ``(n-l) x (n+1-l)``."""
    return hstack([Matrix.zeros(n - l, 1), Matrix.identity(n - l)])


def alpha_l(n: int, l: int, tau: Sequence[Fraction]) -> Matrix:
    """``(0 ; C_{n-l})`` with ``C_{n-l} = diag(tau_{l+1}, tau_{l+1} + tau_{l+2}, ...)``."""
    partial, acc = [], Fraction(0)
    for p in range(l + 1, n + 1):
        acc += tau[p - 1]
        partial.append(acc)
    return vstack([Matrix.zeros(1, n - l), Matrix.diag(partial)])


def an_point_from_maps(n: int, alphas: Sequence[Matrix], betas: Sequence[Matrix]) -> RepPoint:
    """Assemble ``alpha_0..alpha_{n-1}``, ``beta_0..beta_{n-1}`` into a framed point.

    ``beta_k: V_k -> V_{k+1}`` is base edge ``k -> k+1``; ``alpha_k`` runs back.
    ``beta_0`` and ``alpha_0`` are the framing maps ``i_1`` and ``j_1``.
    """
    q = path_quiver(n)
    B = {}
    for k in range(1, n):
        B[2 * (k - 1)] = betas[k]
        B[2 * (k - 1) + 1] = alphas[k]
    dims = tuple(range(n, 0, -1))
    i = {1: betas[0]}
    j = {1: alphas[0]}
    for k in range(2, n + 1):
        i[k] = Matrix.zeros(dims[k - 1], 0)
        j[k] = Matrix.zeros(0, dims[k - 1])
    return to_framed(q, dims, B, i, j)


def an_maps(p: RepPoint) -> tuple[list[Matrix], list[Matrix]]:
    B, i, j = from_framed(p)
    n = p.n
    alphas = [j[1]] + [B[2 * (k - 1) + 1] for k in range(1, n)]
    betas = [i[1]] + [B[2 * (k - 1)] for k in range(1, n)]
    return alphas, betas


def an_family_point(n: int, lam: Sequence) -> RepPoint:
    lam = _lam(lam)
    if len(lam) != n + 1:
        raise ValueError(f"need {n + 1} eigenvalues for n = {n}")
    tau = taus(lam)
    return an_point_from_maps(n, [alpha_l(n, l, tau) for l in range(n)], [beta0(n, l) for l in range(n)])


def act_on_framing(h: Matrix, p: RepPoint) -> RepPoint:
    """SL(W) acts on the framing: ``alpha_0 -> h alpha_0``, ``beta_0 -> beta_0 h^{-1}``."""
    alphas, betas = an_maps(p)
    alphas[0] = h @ alphas[0]
    betas[0] = betas[0] @ inverse(h)
    return an_point_from_maps(p.n, alphas, betas)


def _complete_to_sl(bottom: Matrix) -> Matrix:
    """Prepend a first row so the square matrix has determinant 1.

    The row is ``e_j / c_j`` for the first column ``j`` whose cofactor ``c_j``
    is nonzero.
    """
    m = bottom.cols
    for j in range(m):
        minor = hstack([bottom.submatrix(0, m - 1, 0, j), bottom.submatrix(0, m - 1, j + 1, m)]) \
            if m > 1 else Matrix.identity(0)
        c = (-1) ** j * det(minor)
        if c:
            row = [Fraction(0)] * m
            row[j] = 1 / c
            return vstack([Matrix.row(row), bottom])
    raise SurjectivityError("rows are linearly dependent")


def xi(p: RepPoint) -> CotangentPoint:
    from .reflection import is_an_family_shape
    if not is_an_family_shape(p):
        raise ValueError("xi is defined on the A_n family shape v = (n..1), w = (n+1, 0..0)")
    n = p.n
    alphas, betas = an_maps(p)
    g_next = Matrix.identity(1)
    for k in range(n - 1, -1, -1):
        if betas[k].rank() != n - k:
            raise SurjectivityError(f"beta_{k} is not surjective")
        g_next = _complete_to_sl(g_next @ betas[k])
    g = g_next
    big_x = g @ alphas[0] @ betas[0] @ inverse(g)
    if not big_x.is_upper_triangular():
        raise ValueError("point is not on the level set: X is not upper triangular")
    return CotangentPoint(inverse(g), gamma(big_x))


def xi_inverse(g: Matrix, x: Matrix) -> RepPoint:
    if not x.is_diagonal():
        raise ValueError("x must be diagonal")
    lam = x.diagonal()
    _require_distinct(lam)
    return act_on_framing(g, an_family_point(len(lam) - 1, lam))


# -- canonical forms -------------------------------------------------------------

def y_shape(diag: Sequence[Fraction]) -> Matrix:
    m = len(diag)
    return Matrix([[diag[i] if i == j else (1 if j == i + 1 else 0) for j in range(m)] for i in range(m)], (m, m))


def unipotent_conjugator(x: Matrix, target: Matrix) -> Matrix:
    """The upper unipotent ``u`` with ``u x u^{-1} = target``.

    Both matrices are upper triangular with the same distinct diagonal;
    ``u`` is unique and solves the linear system ``u x - target u = 0``.
    """
    m = x.rows
    if x.diagonal() != target.diagonal():
        raise ValueError("diagonals differ")
    _require_distinct(x.diagonal())
    slots = [(i, j) for i in range(m) for j in range(i + 1, m)]
    if not slots:
        return Matrix.identity(m)
    const = x - target
    cols = []
    for (i, j) in slots:
        e = [[0] * m for _ in range(m)]
        e[i][j] = 1
        e = Matrix(e, (m, m))
        d = e @ x - target @ e
        cols.append([d[a, b] for (a, b) in slots])
    lin = Matrix(cols, (len(slots), len(slots))).T
    rhs = Matrix.column([-const[a, b] for (a, b) in slots])
    sol = solve(lin, rhs)
    u = Matrix.identity(m).tolist()
    for idx, (i, j) in enumerate(slots):
        u[i][j] = sol[idx, 0]
    return Matrix(u, (m, m))


def u_from_x(x: Matrix) -> Matrix:
    return unipotent_conjugator(x, y_shape(x.diagonal()))


def canonical_form(cp: CotangentPoint) -> CanonicalCotangent:
    u = u_from_x(cp.x)
    return CanonicalCotangent(cp.g @ inverse(u), y_shape(cp.x.diagonal()))


# -- the closed-form reflection ------------------------------------------------

def w_k_matrix(lam: Sequence, k: int) -> Matrix:
    lam = _lam(lam)
    if lam[k - 1] == lam[k]:
        raise RegularityError(f"lambda_{k - 1} = lambda_{k}")
    t = lam[k] - lam[k - 1]
    return embed(len(lam), k - 1, Matrix([[0, 1 / t], [-t, 0]]))


def skcal_reflect(cp: CotangentPoint, k: int) -> CotangentPoint:
    if not cp.x.is_diagonal():
        raise ValueError("x must be diagonal")
    w = w_k_matrix(cp.x.diagonal(), k)
    return CotangentPoint(cp.g @ inverse(w), w @ cp.x @ inverse(w))


def n_k_inverse(lam: Sequence, k: int) -> Matrix:
    lam = _lam(lam)
    return embed(len(lam), k - 1, Matrix([[1, 0], [lam[k - 1] - lam[k], 1]]))


def n_k_matrix(lam: Sequence, k: int) -> Matrix:
    return inverse(n_k_inverse(lam, k))


def claim_product(lam: Sequence, k: int, n_k: Matrix | None = None) -> Matrix:
    lam = _lam(lam)
    _require_distinct(lam)
    u = u_from_x(Matrix.diag(lam))
    nk = n_k_matrix(lam, k) if n_k is None else n_k
    return w_k_matrix(lam, k) @ inverse(u) @ nk @ u


def claim_check(lam: Sequence, k: int, n_k: Matrix | None = None) -> bool:
    return claim_product(lam, k, n_k).is_unipotent_upper()


# -- Miura triples -------------------------------------------------------------------

@dataclass(frozen=True)
class MiuraTriple:
    gbar: Matrix   # lower Borel Ad_gbar(lower triangular)
    gb: Matrix     # upper Borel Ad_gb(upper triangular)
    X: Matrix

    def to_json(self) -> dict:
        return {"gbar": self.gbar.to_json(), "gb": self.gb.to_json(), "X": self.X.to_json()}


def _unit(m: int, i: int, j: int) -> Matrix:
    e = [[0] * m for _ in range(m)]
    e[i][j] = 1
    return Matrix(e, (m, m))


def borel_intersection_dim(gbar: Matrix, gb: Matrix) -> int:
    """``dim (Ad_gbar lower) ∩ (Ad_gb upper)`` inside sl(n+1)."""
    m = gb.rows
    rel = inverse(gbar) @ gb
    rel_inv = inverse(rel)
    # upper traceless basis: strict upper units and diagonal differences
    basis = [_unit(m, i, j) for i in range(m) for j in range(i + 1, m)]
    basis += [_unit(m, i, i) - _unit(m, i + 1, i + 1) for i in range(m - 1)]
    upper_slots = [(i, j) for i in range(m) for j in range(i + 1, m)]
    cols = []
    for y in basis:
        z = rel @ y @ rel_inv
        cols.append([z[a, b] for (a, b) in upper_slots])
    if not upper_slots:
        return len(basis)
    cond = Matrix(cols, (len(basis), len(upper_slots))).T
    return len(basis) - cond.rank()


def in_open_cell(gbar: Matrix, X: Matrix) -> bool:
    """``Ad_{gbar^{-1}} X`` is lower triangular plus a superdiagonal with no zero entry."""
    z = inverse(gbar) @ X @ gbar
    m = z.rows
    if any(z[i, j] for i in range(m) for j in range(i + 2, m)):
        return False
    return all(z[i, i + 1] for i in range(m - 1))


def check_miura(mt: MiuraTriple) -> list[str]:
    problems = []
    n = mt.gb.rows - 1
    if not (inverse(mt.gb) @ mt.X @ mt.gb).is_upper_triangular():
        problems.append("X is not in the upper Borel")
    if borel_intersection_dim(mt.gbar, mt.gb) != n:
        problems.append("Borels are not in opposite position")
    if not in_open_cell(mt.gbar, mt.X):
        problems.append("X is not in the open cell over the lower Borel")
    return problems


def miura_of(cp: CotangentPoint, check: bool = True) -> MiuraTriple:
    if not cp.x.is_diagonal():
        raise ValueError("x must be diagonal")
    u = u_from_x(cp.x)
    mt = MiuraTriple(cp.g @ inverse(u), cp.g, cp.g @ cp.x @ inverse(cp.g))
    if check:
        problems = check_miura(mt)
        if problems:
            raise ValueError("; ".join(problems))
    return mt


def p_k_matrix(m: int, k: int) -> Matrix:
    return embed(m, k - 1, Matrix([[0, 1], [-1, 0]]))


def ggkr_reflect(mt: MiuraTriple, k: int) -> MiuraTriple:
    """Move the upper Borel by ``s_k`` relative to the torus centralising X."""
    z = inverse(mt.gb) @ mt.X @ mt.gb
    v = unipotent_conjugator(z, Matrix.diag(z.diagonal()))
    return MiuraTriple(mt.gbar, mt.gb @ inverse(v) @ p_k_matrix(z.rows, k), mt.X)


def kappa_r(mt: MiuraTriple) -> Matrix:
    """The unique ``r`` in the nilradical of the upper Borel with
    ``r - X`` in the lower Borel."""
    m = mt.gb.rows
    slots = [(i, j) for i in range(m) for j in range(i + 1, m)]
    if not slots:
        return Matrix.zeros(m, m)
    gbi, gbar_i = inverse(mt.gb), inverse(mt.gbar)
    cols = []
    for (i, j) in slots:
        r = mt.gb @ _unit(m, i, j) @ gbi
        z = gbar_i @ r @ mt.gbar
        cols.append([z[a, b] for (a, b) in slots])
    lin = Matrix(cols, (len(slots), len(slots))).T
    zx = gbar_i @ mt.X @ mt.gbar
    rhs = Matrix.column([zx[a, b] for (a, b) in slots])
    try:
        sol = solve(lin, rhs)
    except InconsistentSystem:
        raise ValueError("no nilradical element matches X; triple is degenerate") from None
    big_r = Matrix.zeros(m, m)
    for idx, (i, j) in enumerate(slots):
        big_r = big_r + _unit(m, i, j).scale(sol[idx, 0])
    return mt.gb @ big_r @ gbi


def kappa_map(mt: MiuraTriple) -> tuple[Matrix, tuple[Fraction, ...], Matrix]:
    r = kappa_r(mt)
    z = inverse(mt.gb) @ r @ mt.gb
    s = tuple(z[i, i + 1] for i in range(z.rows - 1))
    if any(x == 0 for x in s):
        raise ValueError("kappa coordinates vanish")
    return mt.gb, s, mt.X


def same_upper_borel(g1: Matrix, g2: Matrix) -> bool:
    return (inverse(g1) @ g2).is_upper_triangular()


def same_lower_borel(g1: Matrix, g2: Matrix) -> bool:
    return (inverse(g1) @ g2).is_lower_triangular()


@dataclass(frozen=True)
class Comparison:
    borel: bool
    element: bool
    coordinates: bool

    def __bool__(self) -> bool:
        return self.borel and self.element and self.coordinates


def compare_triples(lhs: MiuraTriple, rhs: MiuraTriple) -> Comparison:
    """Equality of images under kappa: same upper Borel, same X, and the same
    superdiagonal coordinates of ``r`` read in one common frame."""
    borel = same_upper_borel(lhs.gb, rhs.gb)
    element = lhs.X == rhs.X
    coords = False
    if borel:
        r1, r2 = kappa_r(lhs), kappa_r(rhs)
        d = inverse(lhs.gb) @ (r1 - r2) @ lhs.gb
        coords = all(d[i, i + 1] == 0 for i in range(d.rows - 1))
    return Comparison(borel, element, coords)


def compare_actions_report(g: Matrix, x: Matrix, k: int) -> Comparison:
    cp = CotangentPoint(g, x)
    lhs = ggkr_reflect(miura_of(cp), k)
    rhs = miura_of(skcal_reflect(cp, k))
    return compare_triples(lhs, rhs)


def compare_actions(g: Matrix, x: Matrix, k: int) -> bool:
    return bool(compare_actions_report(g, x, k))


def quiver_vs_closed_form(x: Matrix, k: int, order: str | None = None) -> tuple[CanonicalCotangent, CanonicalCotangent]:
    """Both sides of the agreement check at ``g = e``."""
    from .reflection import reflect
    from .rep import DEFAULT_ORDER
    m = x.rows
    p = xi_inverse(Matrix.identity(m), x)
    q = reflect(p, k, order or DEFAULT_ORDER).point
    lhs = canonical_form(xi(q))
    rhs = canonical_form(skcal_reflect(CotangentPoint(Matrix.identity(m), x), k))
    return lhs, rhs


def traceless_diag(lam: Sequence) -> Matrix:
    return gamma(Matrix.diag(_lam(lam)))
