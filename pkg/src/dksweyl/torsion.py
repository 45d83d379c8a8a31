"""Volume forms and the torsion of based short exact sequences.

A volume form on ``Q^d`` is stored as its value on the canonical basis.
The standard basis attached to a volume form is the canonical basis with
its first vector divided by that value, so the form evaluates to 1 on it.

The torsion of ``0 -> A -f-> B -g-> C -> 0`` is the value of the volume
form of ``B`` on the tuple (f of the standard basis of A, lifts through g
of the standard basis of C).  Lemma checkers below compare torsions of the
small complexes that appear when composing reflections.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import (
    LinalgError,
    Matrix,
    ShapeError,
    block,
    det,
    hstack,
    kernel_matrix,
    solve,
    to_scalar,
)


class NotExact(LinalgError):
    pass


@dataclass(frozen=True)
class VolumeForm:
    dim: int
    value: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "value", to_scalar(self.value))
        if self.value == 0:
            raise ValueError("a volume form must be nonzero")
        if self.dim < 0:
            raise ValueError("negative dimension")

    def standard_basis(self) -> Matrix:
        basis = Matrix.identity(self.dim)
        if self.dim:
            basis = basis.with_column_scaled(0, 1 / self.value)
        return basis

    def __add__(self, other: "VolumeForm") -> "VolumeForm":
        """Volume of the direct sum, summands in the written order."""
        return VolumeForm(self.dim + other.dim, self.value * other.value)


def direct_sum(vols: Sequence[VolumeForm]) -> VolumeForm:
    out = VolumeForm(0)
    for v in vols:
        out = out + v
    return out


def volume_eval(vol: VolumeForm, vectors: Sequence[Matrix] | Matrix) -> Fraction:
    m = vectors if isinstance(vectors, Matrix) else (
        Matrix.from_columns(list(vectors), vol.dim) if vectors else Matrix.zeros(vol.dim, 0)
    )
    if m.shape != (vol.dim, vol.dim):
        raise ShapeError(f"need {vol.dim} vectors of length {vol.dim}, got shape {m.shape}")
    return vol.value * det(m)


def is_exact_ses(f: Matrix, g: Matrix) -> bool:
    if f.rows != g.cols:
        raise ShapeError(f"maps {f.shape} and {g.shape} are not composable")
    dim_a, dim_b, dim_c = f.cols, f.rows, g.rows
    if not (g @ f).is_zero():
        return False
    rf, rg = f.rank(), g.rank()
    return rf == dim_a and rg == dim_c and rf + rg == dim_b


def torsion_ses(f: Matrix, g: Matrix, vol_a: VolumeForm, vol_b: VolumeForm, vol_c: VolumeForm) -> Fraction:
    if (vol_a.dim, vol_b.dim, vol_c.dim) != (f.cols, f.rows, g.rows) or g.cols != f.rows:
        raise ShapeError("volume dimensions do not match the maps")
    if not is_exact_ses(f, g):
        raise NotExact("sequence is not short exact")
    image = f @ vol_a.standard_basis()
    lifts = solve(g, vol_c.standard_basis())
    total = hstack([image, lifts])
    value = volume_eval(vol_b, total)
    # a zero-dimensional form still carries its scalar value
    if vol_a.dim == 0:
        value /= vol_a.value
    if vol_c.dim == 0:
        value /= vol_c.value
    return value


def lemma_sign(dim_y: int, dim_z: int) -> int:
    return -1 if (dim_z * dim_y + dim_y) % 2 else 1


def _z(r: int, c: int) -> Matrix:
    return Matrix.zeros(r, c)


def _eye(n: int) -> Matrix:
    return Matrix.identity(n)


def _safe_exact(f: Matrix, g: Matrix) -> bool:
    try:
        return is_exact_ses(f, g)
    except ShapeError:
        return False


def _safe_torsion(f, g, va, vb, vc):
    if not _safe_exact(f, g):
        return None
    return torsion_ses(f, g, va, vb, vc)


# -- first lemma -------------------------------------------------------------

@dataclass(frozen=True)
class La1Instance:
    """Maps ``alpha: V->W``, ``beta: V->X``, ``gamma: V->Y``, ``delta: W->Y``,
    ``eps: X->Z``, ``phi: Y->Z`` and volumes keyed by space name."""
    alpha: Matrix
    beta: Matrix
    gamma: Matrix
    delta: Matrix
    eps: Matrix
    phi: Matrix
    volumes: dict = field(hash=False)

    def dims(self) -> dict:
        return {
            "V": self.alpha.cols, "W": self.alpha.rows, "X": self.beta.rows,
            "Y": self.gamma.rows, "Z": self.eps.rows,
        }

    def to_json(self) -> dict:
        return {
            "maps": {k: getattr(self, k).to_json() for k in ("alpha", "beta", "gamma", "delta", "eps", "phi")},
            "volumes": {k: str(v.value) for k, v in sorted(self.volumes.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "La1Instance":
        maps = {k: Matrix.from_json(v) for k, v in data["maps"].items()}
        inst = cls(**maps, volumes={})
        d = inst.dims()
        vols = {k: VolumeForm(d[k], to_scalar(v)) for k, v in data["volumes"].items()}
        return cls(**maps, volumes=vols)


@dataclass(frozen=True)
class La1Report:
    exact1: bool
    exact2: bool
    gamma_eq: bool
    tau1: Fraction | None
    tau2: Fraction | None
    sign: int
    sign_ok: bool

    def to_json(self) -> dict:
        return {
            "exact1": self.exact1, "exact2": self.exact2, "gamma_eq": self.gamma_eq,
            "tau1": None if self.tau1 is None else str(self.tau1),
            "tau2": None if self.tau2 is None else str(self.tau2),
            "sign": self.sign, "ok": self.sign_ok,
        }


def la1_complexes(inst: La1Instance):
    d = inst.dims()
    f1 = block([[inst.alpha], [inst.beta], [inst.gamma]])
    g1 = block([
        [inst.delta, _z(d["Y"], d["X"]), -_eye(d["Y"])],
        [_z(d["Z"], d["W"]), inst.eps, inst.phi],
    ])
    f2 = block([[inst.alpha], [inst.beta]])
    g2 = block([[inst.phi @ inst.delta, inst.eps]])
    return (f1, g1), (f2, g2)


def check_lemma_la1(inst: La1Instance, sign_fn=None) -> La1Report:
    sign_fn = sign_fn or lemma_sign
    d = inst.dims()
    vol = inst.volumes
    (f1, g1), (f2, g2) = la1_complexes(inst)
    exact1, exact2 = _safe_exact(f1, g1), _safe_exact(f2, g2)
    gamma_eq = inst.gamma == inst.delta @ inst.alpha
    tau1 = torsion_ses(f1, g1, vol["V"], direct_sum([vol["W"], vol["X"], vol["Y"]]),
                       direct_sum([vol["Y"], vol["Z"]])) if exact1 else None
    tau2 = torsion_ses(f2, g2, vol["V"], direct_sum([vol["W"], vol["X"]]), vol["Z"]) if exact2 else None
    sign = sign_fn(d["Y"], d["Z"])
    ok = exact1 == (exact2 and gamma_eq)
    if exact1 and exact2:
        ok = ok and tau1 == sign * tau2
    return La1Report(exact1, exact2, gamma_eq, tau1, tau2, sign, ok)


# -- second lemma and its corollary -----------------------------------------

@dataclass(frozen=True)
class La2Instance:
    """``alpha: V->W``, ``beta: V->U``, ``gamma: W->Y``, ``delta: U->Y``,
    ``phi: U->X``, ``rho: X->Z``, ``eta: Y->Z``."""
    alpha: Matrix
    beta: Matrix
    gamma: Matrix
    delta: Matrix
    phi: Matrix
    rho: Matrix
    eta: Matrix
    volumes: dict = field(hash=False)

    def dims(self) -> dict:
        return {
            "V": self.alpha.cols, "W": self.alpha.rows, "U": self.beta.rows,
            "X": self.phi.rows, "Y": self.gamma.rows, "Z": self.rho.rows,
        }

    def to_json(self) -> dict:
        names = ("alpha", "beta", "gamma", "delta", "phi", "rho", "eta")
        return {
            "maps": {k: getattr(self, k).to_json() for k in names},
            "volumes": {k: str(v.value) for k, v in sorted(self.volumes.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "La2Instance":
        maps = {k: Matrix.from_json(v) for k, v in data["maps"].items()}
        d = cls(**maps, volumes={}).dims()
        vols = {k: VolumeForm(d[k], to_scalar(v)) for k, v in data["volumes"].items()}
        return cls(**maps, volumes=vols)


def la2_complexes(inst: La2Instance):
    d = inst.dims()
    cx1 = (block([[inst.alpha], [inst.beta]]), block([[inst.gamma, -inst.delta]]))
    cx2 = (block([[inst.phi], [inst.delta]]), block([[inst.rho, inst.eta]]))
    cx3 = (
        block([[inst.alpha], [inst.phi @ inst.beta], [inst.delta @ inst.beta]]),
        block([
            [inst.gamma, _z(d["Y"], d["X"]), -_eye(d["Y"])],
            [_z(d["Z"], d["W"]), inst.rho, inst.eta],
        ]),
    )
    reduced = (block([[inst.alpha], [inst.phi @ inst.beta]]), block([[inst.eta @ inst.gamma, inst.rho]]))
    return cx1, cx2, cx3, reduced


@dataclass(frozen=True)
class La2Report:
    tau1: Fraction
    tau2: Fraction
    tau3: Fraction | None
    exact3: bool
    product_ok: bool

    def to_json(self) -> dict:
        return {
            "tau1": str(self.tau1), "tau2": str(self.tau2),
            "tau3": None if self.tau3 is None else str(self.tau3),
            "exact3": self.exact3, "ok": self.product_ok,
        }


def _la2_torsions(inst: La2Instance):
    v = inst.volumes
    cx1, cx2, cx3, reduced = la2_complexes(inst)
    if not _safe_exact(*cx1) or not _safe_exact(*cx2):
        raise NotExact("input complexes of the composition lemma must be exact")
    tau1 = torsion_ses(*cx1, v["V"], v["W"] + v["U"], v["Y"])
    tau2 = torsion_ses(*cx2, v["U"], v["X"] + v["Y"], v["Z"])
    tau3 = _safe_torsion(*cx3, v["V"], direct_sum([v["W"], v["X"], v["Y"]]), v["Y"] + v["Z"])
    tau_r = _safe_torsion(*reduced, v["V"], v["W"] + v["X"], v["Z"])
    return tau1, tau2, tau3, tau_r


def check_lemma_la2(inst: La2Instance) -> La2Report:
    tau1, tau2, tau3, _ = _la2_torsions(inst)
    exact3 = tau3 is not None
    return La2Report(tau1, tau2, tau3, exact3, exact3 and tau3 == tau1 * tau2)


@dataclass(frozen=True)
class CorollaryReport:
    tau_reduced: Fraction | None
    predicted: Fraction
    ok: bool

    def to_json(self) -> dict:
        return {
            "tau_reduced": None if self.tau_reduced is None else str(self.tau_reduced),
            "predicted": str(self.predicted), "ok": self.ok,
        }


def check_corollary_la(inst: La2Instance, sign_fn=None) -> CorollaryReport:
    sign_fn = sign_fn or lemma_sign
    if inst.gamma @ inst.alpha != inst.delta @ inst.beta:
        raise NotExact("corollary needs gamma alpha = delta beta")
    d = inst.dims()
    tau1, tau2, _, tau_r = _la2_torsions(inst)
    predicted = sign_fn(d["Y"], d["Z"]) * tau1 * tau2
    return CorollaryReport(tau_r, predicted, tau_r is not None and tau_r == predicted)


# -- random exact instances --------------------------------------------------

ENTRY_RANGE = range(-3, 4)


def random_matrix(rng: random.Random, r: int, c: int) -> Matrix:
    return Matrix([[rng.choice(ENTRY_RANGE) for _ in range(c)] for _ in range(r)], (r, c))


def random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = random_matrix(rng, n, n)
        if det(m) != 0:
            return m


def random_surjective(rng: random.Random, r: int, c: int) -> Matrix:
    if r > c:
        raise ValueError("no surjection onto a larger space")
    while True:
        m = random_matrix(rng, r, c)
        if m.rank() == r:
            return m


def random_volume(rng: random.Random, dim: int) -> VolumeForm:
    if dim == 0:
        return VolumeForm(0)
    num = rng.choice([x for x in range(-5, 6) if x])
    return VolumeForm(dim, Fraction(num, rng.randint(1, 4)))


def _kernel_frame(rng: random.Random, g: Matrix) -> Matrix:
    k = kernel_matrix(g)
    if k.cols == 0:
        return k
    return k @ random_invertible(rng, k.cols)


def _split_rows(m: Matrix, sizes: Sequence[int]) -> list[Matrix]:
    out, r = [], 0
    for s in sizes:
        out.append(m.submatrix(r, r + s, 0, m.cols))
        r += s
    return out


def random_la1_instance(rng: random.Random, max_dim: int = 3) -> La1Instance:
    while True:
        w, x, y, z = (rng.randint(0, max_dim) for _ in range(4))
        v = w + x - z
        # phi delta factors through Y, so surjectivity needs room
        if 0 <= v <= max_dim and z <= min(y, w) + x:
            break
    while True:
        delta = random_matrix(rng, y, w)
        phi = random_matrix(rng, z, y)
        eps = random_matrix(rng, z, x)
        g2 = block([[phi @ delta, eps]]) if w + x else Matrix.zeros(z, 0)
        if g2.rank() == z:
            break
    f2 = _kernel_frame(rng, g2)
    alpha, beta = _split_rows(f2, [w, x])
    gamma = delta @ alpha
    vols = {name: random_volume(rng, d) for name, d in zip("VWXYZ", (v, w, x, y, z))}
    return La1Instance(alpha, beta, gamma, delta, eps, phi, vols)


def random_la2_instance(rng: random.Random, max_dim: int = 3) -> La2Instance:
    while True:
        w, x, y, z = (rng.randint(0, max_dim) for _ in range(4))
        u = x + y - z
        v = w + u - y
        if 0 <= u <= max_dim and 0 <= v <= max_dim:
            break
    while True:
        rho_eta = random_surjective(rng, z, x + y)
        rho, eta = rho_eta.submatrix(0, z, 0, x), rho_eta.submatrix(0, z, x, x + y)
        phi, delta = _split_rows(_kernel_frame(rng, rho_eta), [x, y])
        if y <= w + delta.rank():
            break
    while True:
        gamma = random_matrix(rng, y, w)
        g1 = block([[gamma, -delta]]) if w + u else Matrix.zeros(y, 0)
        if g1.rank() == y:
            break
    alpha, beta = _split_rows(_kernel_frame(rng, g1), [w, u])
    vols = {name: random_volume(rng, d) for name, d in zip("VWUXYZ", (v, w, u, x, y, z))}
    return La2Instance(alpha, beta, gamma, delta, phi, rho, eta, vols)
