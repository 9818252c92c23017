"""Lattices in (Z/l^N)^{2g}: saturation, complements, isotropy and lifting.

Lifting follows one power of l per step. At each step the defect of the
current solution is divided by l^n and corrected modulo l using a basis dual
(modulo l) to the vectors being lifted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .padic import (
    PrecisionContext,
    ResidueMatrix,
    mat_inv,
    rank_mod_ell,
    smith_normal_form,
)
from .rng import SplitMix64
from .symplectic import random_sp_matrix, standard_form
from .torsion import TorsionPoint, TorsionSubgroup, adapted_basis, is_totally_isotropic

__all__ = [
    "Lattice",
    "NotIsotropicModL",
    "NotMaximalIsotropic",
    "NotSaturated",
    "NotTotallyIsotropic",
    "SymplecticBasis",
    "complement_basis",
    "is_isotropic",
    "is_saturated",
    "isotropic_group_lift",
    "isotropic_lift",
    "random_lagrangian",
    "saturate",
    "symplectic_complete",
]


class NotSaturated(ValueError):
    pass


class NotMaximalIsotropic(ValueError):
    pass


class NotIsotropicModL(ValueError):
    pass


class NotTotallyIsotropic(ValueError):
    pass


def _pair(x: Sequence[int], y: Sequence[int], g: int) -> int:
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g))


@dataclass(frozen=True)
class Lattice:
    ctx: PrecisionContext
    ambient_rank: int
    rank: int
    generators: ResidueMatrix

    def __post_init__(self):
        if self.generators.ctx != self.ctx:
            raise ValueError("generator context differs from lattice context")
        if self.generators.rows != self.ambient_rank:
            raise ValueError("generator rows must equal ambient_rank")
        if self.ambient_rank % 2:
            raise ValueError("ambient rank must be even")

    @classmethod
    def span(cls, ctx: PrecisionContext, vectors: Sequence[Sequence[int]], rank: int | None = None) -> "Lattice":
        gens = ResidueMatrix.from_columns(ctx, vectors)
        return cls(ctx, gens.rows, gens.cols if rank is None else rank, gens)

    @property
    def g(self) -> int:
        return self.ambient_rank // 2

    def vectors(self) -> list[tuple[int, ...]]:
        return self.generators.columns()

    def gram(self) -> ResidueMatrix:
        j = standard_form(self.g, self.ctx)
        return self.generators.T @ j @ self.generators

    def reduce(self, precision: int) -> "Lattice":
        return Lattice(self.ctx.at(precision), self.ambient_rank, self.rank, self.generators.reduce(precision))

    def to_json(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "precision": self.ctx.precision,
            "ambient_rank": self.ambient_rank,
            "rank": self.rank,
            "generators": self.generators.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "Lattice":
        if isinstance(obj, str):
            obj = json.loads(obj)
        ctx = PrecisionContext(int(obj["ell"]), int(obj["precision"]))
        gens = ResidueMatrix.from_json(obj["generators"])
        if gens.ctx != ctx:
            raise ValueError("generator matrix context differs from lattice context")
        return cls(ctx, int(obj["ambient_rank"]), int(obj["rank"]), gens)


@dataclass(frozen=True)
class SymplecticBasis:
    ctx: PrecisionContext
    g: int
    vectors: ResidueMatrix

    def gram(self) -> ResidueMatrix:
        return self.vectors.T @ standard_form(self.g, self.ctx) @ self.vectors

    def is_valid(self) -> bool:
        return self.gram() == standard_form(self.g, self.ctx)

    def to_json(self) -> dict:
        return {"g": self.g, "vectors": self.vectors.to_json()}


def is_saturated(l: Lattice) -> bool:
    return rank_mod_ell(l.generators) == l.rank


def saturate(l: Lattice) -> Lattice:
    """Smallest saturated lattice containing l.

    With L A R = diag(l^e_i), the column span of A is spanned by the columns
    of L^-1 scaled by l^e_i; dropping the scalars saturates.
    """
    snf = smith_normal_form(l.generators)
    u = mat_inv(snf.left)
    N = l.ctx.precision
    keep = [i for i, e in enumerate(snf.exponents) if e < N]
    if not keep:
        return Lattice(l.ctx, l.ambient_rank, 0, ResidueMatrix.zeros(l.ctx, l.ambient_rank, 1))
    return Lattice.span(l.ctx, [u.column(i) for i in keep])


def _standard(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(k == i) for k in range(n))


def complement_basis(l: Lattice) -> Lattice:
    """Standard basis vectors completing l to a basis, chosen greedily mod l."""
    if not is_saturated(l):
        raise NotSaturated("complement requires a saturated lattice")
    n = l.ambient_rank
    cur = list(l.vectors()) if l.rank else []
    chosen = []
    rank = l.rank
    for i in range(n):
        if rank == n:
            break
        e = _standard(n, i)
        trial = ResidueMatrix.from_columns(l.ctx, cur + [e])
        if rank_mod_ell(trial) > rank:
            cur.append(e)
            chosen.append(e)
            rank += 1
    return Lattice.span(l.ctx, chosen)


def is_isotropic(l: Lattice) -> bool:
    return l.gram().is_zero()


def _dual_mod_ell(vectors: list[tuple[int, ...]], ctx: PrecisionContext, g: int) -> list[tuple[int, ...]]:
    """Vectors f_k with <v_i, f_k> = delta_ik modulo l (entries in [0, l))."""
    c1 = ctx.at(1)
    a = ResidueMatrix.from_columns(c1, vectors).T @ standard_form(g, c1)
    r = len(vectors)
    snf = smith_normal_form(a)
    if snf.rank != r:
        raise ValueError("vectors are dependent modulo l")
    # L A R = [I | 0] up to the (all-zero) exponents, so A R[:, :r] L = I
    rr = snf.right.submatrix(range(2 * g), range(r))
    f = rr @ snf.left
    return f.columns()


def symplectic_complete(l: Lattice) -> SymplecticBasis:
    """Extend a saturated lagrangian basis e_1..e_g by f_1..f_g with Gram J."""
    g, ctx = l.g, l.ctx
    if not is_saturated(l):
        raise NotSaturated("lattice is not saturated")
    if l.rank != g or l.generators.cols != g or not is_isotropic(l):
        raise NotMaximalIsotropic("need an isotropic lattice of rank g")
    ell, N = ctx.ell, ctx.precision
    es = l.vectors()

    # solution modulo l
    c1 = ctx.at(1)
    comp = complement_basis(l.reduce(1)).vectors()
    b = ResidueMatrix(c1, [[_pair(e, c, g) for c in comp] for e in es])
    fp = (ResidueMatrix.from_columns(c1, comp) @ mat_inv(b)).columns()
    fs = [list(f) for f in fp]
    for i in range(g):
        for j in range(i + 1, g):
            a = -_pair(fp[i], fp[j], g)
            fs[i] = [x + a * y for x, y in zip(fs[i], es[j])]
    fs = [[x % ell for x in f] for f in fs]

    # lift one power at a time; h_j has e-coordinates h_j^i and f-coordinates h_j^{g+i}
    for n in range(1, N):
        p = ell ** n
        y = [[((_pair(es[i], fs[j], g) - int(i == j)) // p) % ell for j in range(g)] for i in range(g)]
        alpha = [[(_pair(fs[i], fs[j], g) // p) % ell for j in range(g)] for i in range(g)]
        new = []
        for j in range(g):
            he = [alpha[i][j] if i < j else 0 for i in range(g)]
            hf = [-y[i][j] for i in range(g)]
            vec = list(fs[j])
            for k in range(g):
                for t in range(2 * g):
                    vec[t] += p * (he[k] * es[k][t] + hf[k] * fs[k][t])
            new.append(vec)
        fs = [[x % ell ** (n + 1) for x in f] for f in new]

    vectors = ResidueMatrix.from_columns(ctx, list(es) + [tuple(f) for f in fs])
    basis = SymplecticBasis(ctx, g, vectors)
    if not basis.is_valid():
        raise ArithmeticError("completion failed to reach the standard Gram matrix")
    return basis


def _lift_isotropic(vs: list[list[int]], fs: list[tuple[int, ...]], g: int, ell: int, start: int, stop: int) -> list[list[int]]:
    """Correct vs so that all pairings vanish mod l^stop, given they vanish mod l^start."""
    k = len(vs)
    for n in range(start, stop):
        p = ell ** n
        alpha = [[(_pair(vs[i], vs[j], g) // p) % ell for j in range(k)] for i in range(k)]
        new = []
        for j in range(k):
            vec = list(vs[j])
            for i in range(j):
                for t in range(2 * g):
                    vec[t] -= p * alpha[i][j] * fs[i][t]
            new.append(vec)
        vs = [[x % ell ** (n + 1) for x in v] for v in new]
    return vs


def isotropic_lift(sub: Lattice, precision: int) -> Lattice:
    """Lift an isotropic subspace mod l to an isotropic lattice mod l^precision."""
    g = sub.g
    c1 = sub.ctx.at(1)
    red = Lattice(c1, sub.ambient_rank, sub.rank, sub.generators.reduce(1))
    if not is_isotropic(red):
        raise NotIsotropicModL("input is not isotropic modulo l")
    if rank_mod_ell(red.generators) != red.generators.cols:
        raise ValueError("generators must be independent modulo l")
    ell = sub.ctx.ell
    vs = [list(v) for v in red.vectors()]
    fs = _dual_mod_ell(red.vectors(), sub.ctx, g)
    vs = _lift_isotropic(vs, fs, g, ell, 1, precision)
    ctx = PrecisionContext(ell, precision)
    return Lattice.span(ctx, vs)


def isotropic_group_lift(h: TorsionSubgroup) -> tuple[TorsionSubgroup, Lattice]:
    """Enlarge a totally isotropic h to a homogeneous one of exponent m^1.

    Returns the enlarged group and an isotropic lattice at the context
    precision whose image in A[l^{m^1}] is that group.
    """
    if not is_totally_isotropic(h):
        raise NotTotallyIsotropic("subgroup is not totally isotropic")
    basis, orders = adapted_basis(h)
    act = [(list(u), o) for u, o in zip(basis, orders) if o > 0]
    if not act:
        raise ValueError("trivial subgroup has no lift")
    ctx, g, ell = h.ctx, h.g, h.ctx.ell
    N = ctx.precision
    top = max(o for _, o in act)
    vs = [u for u, _ in act]
    os_ = [o for _, o in act]
    fs = _dual_mod_ell([tuple(v) for v in vs], ctx, g)
    k = len(vs)
    for p in range(min(os_), top):
        pw = ell ** p
        live = [i for i in range(k) if os_[i] <= p]
        alpha = [[(_pair(vs[i], vs[j], g) // pw) % ell for j in range(k)] for i in range(k)]
        new = [list(v) for v in vs]
        for i in live:
            for j in range(k):
                if os_[j] > p or j > i:
                    x = alpha[i][j]
                    if x:
                        for t in range(2 * g):
                            new[i][t] += pw * x * fs[j][t]
        vs = [[x % ctx.modulus for x in v] for v in new]
    vs = _lift_isotropic(vs, fs, g, ell, top, N)
    hti = TorsionSubgroup(ctx, g, tuple(TorsionPoint.of_order(ctx, v, top) for v in vs))
    return hti, Lattice.span(ctx, vs)


def random_lagrangian(g: int, ctx: PrecisionContext, rng: SplitMix64) -> Lattice:
    """Image of <e_1..e_g> under a random symplectic matrix."""
    m = random_sp_matrix(g, ctx, rng)
    return Lattice.span(ctx, [m.column(i) for i in range(g)])
