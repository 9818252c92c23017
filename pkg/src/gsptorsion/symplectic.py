"""Symplectic and similitude groups over Z/l^N.

The alternating form is J = [[0, I], [-I, 0]]. A similitude M satisfies
tM J M = lam J for a unit lam, its multiplier. The families handled here
are Sp, GSp, the pointwise stabilisers P_{r,s} of e_1..e_r, f_1..f_s
(with f_i = e_{g+i}), and the fibre product E of two similitude groups
over the multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .enumeration import (
    BudgetExceeded,
    ColumnProblem,
    EnumerationResult,
    enumerate_columns,
    problem,
)
from .padic import (
    DimensionMismatch,
    PrecisionContext,
    ResidueMatrix,
    is_prime,
    mat_inv,
)
from .rng import SplitMix64

__all__ = [
    "BudgetExceeded",
    "GroupDescriptor",
    "NotSymplecticSimilitude",
    "SymplecticElement",
    "chain_index_enumerate",
    "chain_index_exponent",
    "codim_pr",
    "codim_prs",
    "congruence_multiplier_check",
    "det_multiplier_check",
    "group_elements",
    "group_order_enumerate",
    "gsp_order",
    "hensel_order",
    "is_member",
    "level_one_order",
    "lie_trace_check",
    "multiplier",
    "order_bounds_check",
    "random_sp_matrix",
    "sp_factorize",
    "sp_order",
    "standard_form",
]

SP, GSP, P_R, P_RS, E = "Sp", "GSp", "P_r", "P_rs", "E"
FAMILIES = (SP, GSP, P_R, P_RS, E)


class NotSymplecticSimilitude(ValueError):
    pass


@dataclass(frozen=True)
class GroupDescriptor:
    family: str
    g: int
    r: int = 0
    s: int = 0
    g2: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.g < 1:
            raise ValueError("genus must be >= 1")
        if self.family == E:
            if self.g2 is None or self.g2 < 1:
                raise ValueError("family E needs a second genus g2 >= 1")
        if self.family == P_R and self.s != 0:
            raise ValueError("P_r has s = 0")
        if self.family in (P_R, P_RS) and not 0 <= self.s <= self.r <= self.g:
            raise ValueError(f"need 0 <= s <= r <= g, got r={self.r}, s={self.s}, g={self.g}")

    @classmethod
    def sp(cls, g: int) -> "GroupDescriptor":
        return cls(SP, g)

    @classmethod
    def gsp(cls, g: int) -> "GroupDescriptor":
        return cls(GSP, g)

    @classmethod
    def prs(cls, g: int, r: int, s: int = 0) -> "GroupDescriptor":
        return cls(P_RS, g, r, s)

    @classmethod
    def pair(cls, g1: int, g2: int) -> "GroupDescriptor":
        return cls(E, g1, g2=g2)

    @property
    def is_similitude(self) -> bool:
        return self.family in (GSP, E)

    @property
    def dimension(self) -> int:
        g = self.g
        if self.family == SP:
            return 2 * g * g + g
        if self.family == GSP:
            return 2 * g * g + g + 1
        if self.family == E:
            g2 = self.g2
            return 2 * g * g + g + 2 * g2 * g2 + g2 + 1
        return 2 * g * g + g - codim_prs(g, self.r, self.s)

    @property
    def rank(self) -> int:
        if self.family == SP:
            return self.g
        if self.family == GSP:
            return self.g + 1
        if self.family == E:
            return self.g + self.g2 + 1
        return self.g - self.r

    def fixed_columns(self) -> list[int]:
        if self.family not in (P_R, P_RS):
            return []
        return list(range(self.r)) + [self.g + i for i in range(self.s)]

    def label(self) -> str:
        if self.family in (P_R, P_RS):
            return f"P_{{{self.r},{self.s}}}(g={self.g})"
        if self.family == E:
            return f"E(g1={self.g},g2={self.g2})"
        return f"{self.family}(g={self.g})"


def standard_form(g: int, ctx: PrecisionContext | None = None) -> ResidueMatrix:
    if g < 1:
        raise ValueError("genus must be >= 1")
    ctx = ctx or PrecisionContext(2, 64)
    n = 2 * g
    rows = [[0] * n for _ in range(n)]
    for i in range(g):
        rows[i][g + i] = 1
        rows[g + i][i] = -1
    return ResidueMatrix(ctx, rows)


def _genus_of(m: ResidueMatrix) -> int:
    if m.rows != m.cols or m.rows % 2:
        raise DimensionMismatch(f"expected an even square matrix, got {m.shape}")
    return m.rows // 2


def gram(m: ResidueMatrix) -> ResidueMatrix:
    """tM J M."""
    g = _genus_of(m)
    return m.T @ standard_form(g, m.ctx) @ m


def multiplier(m: ResidueMatrix) -> int:
    g = _genus_of(m)
    gm = gram(m)
    lam = gm[0, g]
    if not m.ctx.is_unit(lam):
        raise NotSymplecticSimilitude("multiplier is not a unit")
    if gm != standard_form(g, m.ctx).scale(lam):
        raise NotSymplecticSimilitude("tM J M is not a multiple of J")
    return lam


def _multiplier_or_none(m: ResidueMatrix) -> int | None:
    try:
        return multiplier(m)
    except NotSymplecticSimilitude:
        return None


@dataclass(frozen=True)
class SymplecticElement:
    matrix: ResidueMatrix
    multiplier: int

    def __post_init__(self):
        lam = multiplier(self.matrix)
        if lam != self.multiplier % self.matrix.ctx.modulus:
            raise NotSymplecticSimilitude(f"declared multiplier {self.multiplier}, actual {lam}")

    @classmethod
    def of(cls, m: ResidueMatrix) -> "SymplecticElement":
        return cls(m, multiplier(m))

    @property
    def g(self) -> int:
        return self.matrix.rows // 2

    def __matmul__(self, other: "SymplecticElement") -> "SymplecticElement":
        return SymplecticElement.of(self.matrix @ other.matrix)

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_json(), "multiplier": str(self.multiplier)}

    @classmethod
    def from_json(cls, obj: dict) -> "SymplecticElement":
        return cls(ResidueMatrix.from_json(obj["matrix"]), int(obj["multiplier"]))


def is_member(m, d: GroupDescriptor) -> bool:
    """Membership test. For family E pass a pair ``(x, y)``."""
    if d.family == E:
        x, y = m
        if x.rows != 2 * d.g or y.rows != 2 * d.g2:
            raise DimensionMismatch("pair does not match descriptor genera")
        lx, ly = _multiplier_or_none(x), _multiplier_or_none(y)
        return lx is not None and ly is not None and lx == ly
    if m.rows != 2 * d.g or m.cols != 2 * d.g:
        raise DimensionMismatch(f"{m.shape} does not match genus {d.g}")
    lam = _multiplier_or_none(m)
    if lam is None:
        return False
    if d.family == GSP:
        return True
    if lam != 1:
        return False
    for j in d.fixed_columns():
        col = m.column(j)
        if any(col[i] != int(i == j) for i in range(m.rows)):
            return False
    return True


def det_multiplier_check(el: SymplecticElement) -> bool:
    ctx = el.matrix.ctx
    return el.matrix.det() == pow(el.multiplier, el.g, ctx.modulus)


def sp_order(g: int, ell: int, n: int) -> int:
    """|Sp_2g(Z/ell^n)|."""
    if g < 1 or n < 1:
        raise ValueError("need g >= 1 and n >= 1")
    if not is_prime(ell):
        raise ValueError(f"ell = {ell} is not prime")
    order = ell ** ((2 * g * g + g) * (n - 1) + g * g)
    for i in range(1, g + 1):
        order *= ell ** (2 * i) - 1
    return order


def gsp_order(g: int, ell: int, n: int) -> int:
    return sp_order(g, ell, n) * (ell - 1) * ell ** (n - 1)


def codim_pr(g: int, r: int) -> int:
    if not 1 <= r <= g:
        raise ValueError(f"need 1 <= r <= g, got r={r}, g={g}")
    return 2 * r * g - r * (r - 1) // 2


def codim_prs(g: int, r: int, s: int) -> int:
    if not 0 <= s <= r <= g:
        raise ValueError(f"need 0 <= s <= r <= g, got r={r}, s={s}, g={g}")
    return 2 * s * g + 2 * r * g - r * s - r * (r - 1) // 2 - s * (s - 1) // 2


def _problem_for(d: GroupDescriptor, ell: int, m: int) -> ColumnProblem:
    if d.family == E:
        raise ValueError("family E supports membership only")
    orders = [0] * (2 * d.g)
    for j in d.fixed_columns():
        orders[j] = m
    return problem(d.g, ell, m, orders, similitude=d.family == GSP)


def group_order_enumerate(d: GroupDescriptor, ell: int, m: int, budget_log2: int = 34) -> int:
    if not is_prime(ell) or m < 1:
        raise ValueError("need a prime ell and a level m >= 1")
    return enumerate_columns(_problem_for(d, ell, m), budget_log2).total


def group_elements(d: GroupDescriptor, ell: int, m: int, budget_log2: int = 34) -> np.ndarray:
    """All elements as an array of shape (K, 2g, 2g) with entries in [0, ell^m)."""
    res: EnumerationResult = enumerate_columns(_problem_for(d, ell, m), budget_log2, collect=True)
    return res.elements


def level_one_order(d: GroupDescriptor, ell: int, budget_log2: int = 34) -> int:
    if d.family == SP:
        return sp_order(d.g, ell, 1)
    if d.family == GSP:
        return gsp_order(d.g, ell, 1)
    return group_order_enumerate(d, ell, 1, budget_log2)


def hensel_order(d: GroupDescriptor, ell: int, m: int, budget_log2: int = 34) -> int:
    if m < 1:
        raise ValueError("level must be >= 1")
    return ell ** ((m - 1) * d.dimension) * level_one_order(d, ell, budget_log2)


def order_ratio(d: GroupDescriptor, ell: int, budget_log2: int = 34) -> Fraction:
    return Fraction(level_one_order(d, ell, budget_log2), ell ** d.dimension)


def order_corridor(dim: int, ell: int) -> tuple[Fraction, Fraction]:
    lo = Fraction(ell - 1, ell) ** dim
    hi = Fraction(ell + 1, ell) ** dim
    return lo, hi


def order_bounds_check(d: GroupDescriptor, ell: int, budget_log2: int = 34) -> bool:
    ratio = order_ratio(d, ell, budget_log2)
    lo, hi = order_corridor(d.dimension, ell)
    return lo <= ratio <= hi


def _check_chain(g: int, chain: Sequence[tuple[int, int]], levels: Sequence[int]) -> None:
    if len(chain) != len(levels) or not chain:
        raise ValueError("chain and levels must be nonempty and of equal length")
    if any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 1:
        raise ValueError("levels must be positive and strictly increasing")
    for (r1, s1), (r2, s2) in zip(chain, chain[1:]):
        if r1 < r2 or s1 < s2:
            raise ValueError("chain is not nested")
    for r, s in chain:
        codim_prs(g, r, s)


def chain_index_exponent(g: int, chain: Sequence[tuple[int, int]], levels: Sequence[int]) -> int:
    """sum_i codim(P_{r_i,s_i}) * (m_i - m_{i-1}) with m_0 = 0."""
    _check_chain(g, chain, levels)
    total, prev = 0, 0
    for (r, s), m in zip(chain, levels):
        total += codim_prs(g, r, s) * (m - prev)
        prev = m
    return total


def chain_orders(g: int, chain: Sequence[tuple[int, int]], levels: Sequence[int]) -> list[int]:
    """Congruence depth of each basis column in the group H(m_1, ..., m_t)."""
    orders = [0] * (2 * g)
    for (r, s), m in zip(chain, levels):
        for k in range(r):
            orders[k] = max(orders[k], m)
        for k in range(s):
            orders[g + k] = max(orders[g + k], m)
    return orders


def chain_index_enumerate(
    g: int, ell: int, chain: Sequence[tuple[int, int]], levels: Sequence[int], budget_log2: int = 34
) -> tuple[int, int, int]:
    """(exponent, exact index, subgroup order) at level m_t inside Sp."""
    exponent = chain_index_exponent(g, chain, levels)
    top = levels[-1]
    prob = problem(g, ell, top, chain_orders(g, chain, levels))
    order = enumerate_columns(prob, budget_log2).total
    return exponent, sp_order(g, ell, top) // order, order


def sp_factorize(el: SymplecticElement) -> tuple[SymplecticElement, SymplecticElement]:
    """M = diag(I, lam I) S with S symplectic."""
    g, ctx, lam = el.g, el.matrix.ctx, el.multiplier
    scal = ResidueMatrix.diagonal(ctx, [1] * g + [lam] * g)
    inv = ResidueMatrix.diagonal(ctx, [1] * g + [ctx.inverse(lam)] * g)
    return SymplecticElement(scal, lam), SymplecticElement(inv @ el.matrix, 1)


def congruence_multiplier_check(el: SymplecticElement, k: int) -> bool:
    """Whether M e_1 = e_1 and M e_{g+1} = e_{g+1} modulo ell^k."""
    ctx = el.matrix.ctx
    if not 0 <= k <= ctx.precision:
        raise ValueError("need 0 <= k <= N")
    mod = ctx.ell ** k
    g = el.g
    for j in (0, g):
        col = el.matrix.column(j)
        if any((col[i] - int(i == j)) % mod for i in range(2 * g)):
            return False
    return True


def lie_trace_check(x: ResidueMatrix, y: ResidueMatrix, g1: int, g2: int) -> bool:
    if x.rows != 2 * g1 or y.rows != 2 * g2:
        raise DimensionMismatch("matrix sizes do not match the genera")
    if x.ctx != y.ctx:
        raise ValueError("context mismatch")
    return (g2 * x.trace() - g1 * y.trace()) % x.ctx.modulus == 0


def random_sp_matrix(g: int, ctx: PrecisionContext, rng: SplitMix64, steps: int = 6) -> ResidueMatrix:
    """Product of random elementary symplectic matrices.

    Uses [[I, S], [0, I]], [[I, 0], [S, I]] with S symmetric and
    [[A, 0], [0, tA^-1]] with A unipotent upper triangular; these generate
    Sp over the local ring.
    """
    q = ctx.modulus
    n = 2 * g
    out = ResidueMatrix.identity(ctx, n)
    for step in range(steps):
        kind = step % 3
        rows = [[int(i == j) for j in range(n)] for i in range(n)]
        if kind < 2:
            s = [[0] * g for _ in range(g)]
            for i in range(g):
                for j in range(i, g):
                    s[i][j] = s[j][i] = rng.below(q)
            for i in range(g):
                for j in range(g):
                    if kind == 0:
                        rows[i][g + j] = s[i][j]
                    else:
                        rows[g + i][j] = s[i][j]
        else:
            a = [[int(i == j) for j in range(g)] for i in range(g)]
            for i in range(g):
                for j in range(i + 1, g):
                    a[i][j] = rng.below(q)
            if rng.below(2):
                a = [list(r) for r in zip(*a)]
            am = ResidueMatrix(ctx, a)
            ait = mat_inv(am).T
            for i in range(g):
                for j in range(g):
                    rows[i][j] = am[i, j]
                    rows[g + i][g + j] = ait[i, j]
        out = out @ ResidueMatrix(ctx, rows)
    return out
