"""Finite subgroups of (Q_l/Z_l)^{2g} and their pairing invariants.

A point is stored as an integer vector x at precision N and stands for
x / l^N. The pairing of two points of A[l^n] is zeta_{l^n}^{<x', y'>} where
x' = x / l^(N-n) and <.,.> is the form J.

Most invariants are read off an adapted basis: the Smith normal form of the
generator matrix gives a unimodular U and orders o_i with
H = sum_i <u_i / l^{o_i}>.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .enumeration import enumerate_columns, problem
from .padic import (
    PrecisionContext,
    ResidueMatrix,
    mat_inv,
    smith_normal_form,
    valuation,
)
from .symplectic import codim_prs, gsp_order, sp_order

__all__ = [
    "FlagChain",
    "SubgroupType",
    "TorsionPoint",
    "TorsionSubgroup",
    "adapted_basis",
    "all_subgroups_rank2",
    "canonical_type",
    "degree_exponent_prediction",
    "delta_estimate",
    "is_totally_isotropic",
    "isotropy_chain",
    "m1_bruteforce",
    "m1_invariant",
    "m_bruteforce",
    "m_invariant",
    "product_degree_exponent",
    "stabilizer_enumerate",
    "weil_pairing",
]


def _pair(x: Sequence[int], y: Sequence[int], g: int) -> int:
    """<x, y> = tx J y."""
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g))


@dataclass(frozen=True)
class TorsionPoint:
    ctx: PrecisionContext
    coords: tuple[int, ...]

    def __post_init__(self):
        q = self.ctx.modulus
        object.__setattr__(self, "coords", tuple(int(c) % q for c in self.coords))
        if len(self.coords) % 2:
            raise ValueError("ambient rank must be even")

    @classmethod
    def of_order(cls, ctx: PrecisionContext, vec: Sequence[int], n: int) -> "TorsionPoint":
        """The point vec / l^n."""
        if not 0 <= n <= ctx.precision:
            raise ValueError(f"order exponent {n} outside [0, {ctx.precision}]")
        scale = ctx.ell ** (ctx.precision - n)
        return cls(ctx, tuple(scale * v for v in vec))

    @property
    def g(self) -> int:
        return len(self.coords) // 2

    @property
    def order_exponent(self) -> int:
        N = self.ctx.precision
        return N - min(valuation(c, self.ctx.ell, N) for c in self.coords)

    def at_layer(self, n: int) -> tuple[int, ...]:
        """Coordinates x' with the point equal to x' / l^n (requires order <= n)."""
        if self.order_exponent > n:
            raise ValueError("point does not lie in that layer")
        d = self.ctx.ell ** (self.ctx.precision - n)
        return tuple(c // d for c in self.coords)

    def scale(self, c: int) -> "TorsionPoint":
        return TorsionPoint(self.ctx, tuple(c * x for x in self.coords))

    def __add__(self, other: "TorsionPoint") -> "TorsionPoint":
        return TorsionPoint(self.ctx, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def apply(self, m: ResidueMatrix) -> "TorsionPoint":
        """M acting on the point; M may live at any precision >= the order."""
        n = self.order_exponent
        if n == 0:
            return self
        x = self.at_layer(n)
        mod = self.ctx.ell ** n
        y = [sum(m[i, j] * x[j] for j in range(len(x))) % mod for i in range(len(x))]
        return TorsionPoint.of_order(self.ctx, y, n)

    def to_json(self) -> dict:
        return {"coords": [str(c) for c in self.coords], "order_exp": self.order_exponent}


@dataclass(frozen=True)
class TorsionSubgroup:
    ctx: PrecisionContext
    g: int
    generators: tuple[TorsionPoint, ...]

    def __post_init__(self):
        for p in self.generators:
            if p.ctx != self.ctx:
                raise ValueError("generators use a different precision context")
            if len(p.coords) != 2 * self.g:
                raise ValueError("generator has the wrong ambient rank")

    @classmethod
    def from_vectors(
        cls, ctx: PrecisionContext, g: int, items: Iterable[tuple[Sequence[int], int]]
    ) -> "TorsionSubgroup":
        """Build from pairs (v, n), each standing for the point v / l^n."""
        return cls(ctx, g, tuple(TorsionPoint.of_order(ctx, v, n) for v, n in items))

    @classmethod
    def full_layer(cls, ctx: PrecisionContext, g: int, n: int) -> "TorsionSubgroup":
        """A[l^n]."""
        basis = [[int(i == j) for j in range(2 * g)] for i in range(2 * g)]
        return cls.from_vectors(ctx, g, [(v, n) for v in basis])

    @classmethod
    def lagrangian_layer(cls, ctx: PrecisionContext, g: int, n: int) -> "TorsionSubgroup":
        """<e_1, ..., e_g> / l^n."""
        basis = [[int(i == j) for j in range(2 * g)] for i in range(g)]
        return cls.from_vectors(ctx, g, [(v, n) for v in basis])

    @property
    def ambient_rank(self) -> int:
        return 2 * self.g

    def generator_matrix(self) -> ResidueMatrix:
        if not self.generators:
            return ResidueMatrix.zeros(self.ctx, 2 * self.g, 1)
        return ResidueMatrix.from_columns(self.ctx, [p.coords for p in self.generators])

    def scale(self, c: int) -> "TorsionSubgroup":
        return TorsionSubgroup(self.ctx, self.g, tuple(p.scale(c) for p in self.generators))

    def order(self) -> int:
        _, orders = adapted_basis(self)
        return self.ctx.ell ** sum(orders)

    def elements(self) -> Iterator[TorsionPoint]:
        basis, orders = adapted_basis(self)
        ell, N = self.ctx.ell, self.ctx.precision
        active = [(u, o) for u, o in zip(basis, orders) if o > 0]
        ranges = [range(ell ** o) for _, o in active]
        for coeffs in itertools.product(*ranges):
            vec = [0] * (2 * self.g)
            for c, (u, o) in zip(coeffs, active):
                s = c * ell ** (N - o)
                for i in range(2 * self.g):
                    vec[i] += s * u[i]
            yield TorsionPoint(self.ctx, tuple(vec))

    def contains(self, p: TorsionPoint) -> bool:
        """Membership via the adapted basis: solve in U-coordinates."""
        basis, orders = adapted_basis(self)
        u = ResidueMatrix.from_columns(self.ctx, basis)
        coords = mat_inv(u) @ ResidueMatrix.from_columns(self.ctx, [p.coords])
        ell, N = self.ctx.ell, self.ctx.precision
        return all(
            coords[i, 0] % (ell ** (N - o)) == 0 for i, o in enumerate(orders)
        )

    def to_json(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "precision": self.ctx.precision,
            "ambient_rank": 2 * self.g,
            "generators": [p.to_json() for p in self.generators],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "TorsionSubgroup":
        if isinstance(obj, str):
            obj = json.loads(obj)
        ctx = PrecisionContext(int(obj["ell"]), int(obj["precision"]))
        amb = int(obj["ambient_rank"])
        if amb % 2 or amb < 2:
            raise ValueError("ambient_rank must be a positive even integer")
        gens = []
        for item in obj["generators"]:
            coords = [int(c) for c in item["coords"]]
            if len(coords) != amb:
                raise ValueError("generator length differs from ambient_rank")
            p = TorsionPoint(ctx, tuple(coords))
            if "order_exp" in item and int(item["order_exp"]) != p.order_exponent:
                raise ValueError(
                    f"declared order_exp {item['order_exp']} but coords give {p.order_exponent}"
                )
            gens.append(p)
        return cls(ctx, amb // 2, tuple(gens))


def adapted_basis(h: TorsionSubgroup) -> tuple[list[tuple[int, ...]], list[int]]:
    """Unimodular basis u_1..u_2g and orders with H = sum <u_i / l^{o_i}>."""
    N = h.ctx.precision
    snf = smith_normal_form(h.generator_matrix())
    u = mat_inv(snf.left)
    orders = [0] * (2 * h.g)
    for i, e in enumerate(snf.exponents):
        orders[i] = N - e
    return u.columns(), orders


@dataclass(frozen=True)
class SubgroupType:
    exponents: tuple[int, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.multiplicities):
            raise ValueError("exponents and multiplicities differ in length")
        if any(b >= a for a, b in zip(self.exponents, self.exponents[1:])):
            raise ValueError("exponents must be strictly decreasing")
        if any(e < 1 for e in self.exponents) or any(a < 1 for a in self.multiplicities):
            raise ValueError("exponents and multiplicities must be positive")

    @property
    def t(self) -> int:
        return len(self.exponents)

    def log_order(self) -> int:
        return sum(m * a for m, a in zip(self.exponents, self.multiplicities))

    def partial_sums(self) -> list[int]:
        return list(itertools.accumulate(self.multiplicities))

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "exponents": list(self.exponents),
            "multiplicities": list(self.multiplicities),
        }


def canonical_type(h: TorsionSubgroup) -> SubgroupType:
    _, orders = adapted_basis(h)
    counts: dict[int, int] = {}
    for o in orders:
        if o > 0:
            counts[o] = counts.get(o, 0) + 1
    exps = sorted(counts, reverse=True)
    return SubgroupType(tuple(exps), tuple(counts[e] for e in exps))


def weil_pairing(p: TorsionPoint, q: TorsionPoint) -> tuple[int, int]:
    """(n, k): the pairing on A[l^n], n the larger order, has exact order l^k."""
    if p.ctx != q.ctx or p.g != q.g:
        raise ValueError("points live in different ambients")
    n = max(p.order_exponent, q.order_exponent)
    if n == 0:
        return 0, 0
    x, y = p.at_layer(n), q.at_layer(n)
    v = valuation(_pair(x, y, p.g), p.ctx.ell, n)
    return n, n - v


def _gram_profile(h: TorsionSubgroup) -> dict[int, int]:
    """n -> minimal valuation of pairings on H ∩ A[l^n], for 1 <= n <= m^1."""
    basis, orders = adapted_basis(h)
    ell = h.ctx.ell
    act = [(u, o) for u, o in zip(basis, orders) if o > 0]
    top = max((o for _, o in act), default=0)
    big = h.ctx.precision + top + 1
    vals = {}
    for i, (ui, _) in enumerate(act):
        for j in range(i + 1, len(act)):
            x = _pair(ui, act[j][0], h.g)
            vals[i, j] = valuation(x, ell, big)
    prof = {}
    for n in range(1, top + 1):
        f = [max(0, n - o) for _, o in act]
        best = n
        for (i, j), v in vals.items():
            best = min(best, f[i] + f[j] + v)
        prof[n] = best
    return prof


def m1_invariant(h: TorsionSubgroup) -> int:
    prof = _gram_profile(h)
    return max((n - v for n, v in prof.items()), default=0)


def m_invariant(h: TorsionSubgroup) -> int:
    prof = _gram_profile(h)
    return max((n for n, v in prof.items() if v == 0), default=0)


def is_totally_isotropic(h: TorsionSubgroup) -> bool:
    return m1_invariant(h) == 0


def _pair_scan(h: TorsionSubgroup) -> list[tuple[int, int]]:
    pts = list(h.elements())
    by_order: dict[int, list[TorsionPoint]] = {}
    for p in pts:
        by_order.setdefault(p.order_exponent, []).append(p)
    out = []
    for n, group in by_order.items():
        best = 0
        for a in group:
            for b in group:
                best = max(best, weil_pairing(a, b)[1])
        out.append((n, best))
    return out


def m1_bruteforce(h: TorsionSubgroup) -> int:
    """Oracle: scan every equal-order pair of elements."""
    return max((k for _, k in _pair_scan(h)), default=0)


def m_bruteforce(h: TorsionSubgroup) -> int:
    return max((n for n, k in _pair_scan(h) if k == n and n > 0), default=0)


@dataclass(frozen=True)
class FlagChain:
    """Parameters (r_i, s_i) of the nested chain, listed smallest group first.

    ``pairs[0]`` belongs to the lowest level m^t (the most fixed vectors),
    ``pairs[-1]`` to the top level m^1.
    """

    g: int
    pairs: tuple[tuple[int, int], ...]
    deltas: tuple[int, ...]

    def __post_init__(self):
        if len(self.pairs) != len(self.deltas):
            raise ValueError("pairs and deltas differ in length")
        for r, s in self.pairs:
            if not 0 <= s <= r <= self.g:
                raise ValueError(f"bad pair {(r, s)} for g={self.g}")
        for (r1, s1), (r2, s2) in zip(self.pairs, self.pairs[1:]):
            if r1 < r2 or s1 < s2:
                raise ValueError("chain is not nested")
        if any(d not in (0, 1) for d in self.deltas):
            raise ValueError("delta flags must be 0 or 1")

    def by_level(self) -> list[tuple[int, int]]:
        """Pairs indexed by level k = 1..t (top exponent first)."""
        return list(reversed(self.pairs))

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "pairs": [list(p) for p in self.pairs],
            "deltas": list(self.deltas),
        }


def _rank_mod_ell(rows: list[list[int]], ell: int) -> int:
    if not rows:
        return 0
    ctx = PrecisionContext(ell, 1)
    return smith_normal_form(ResidueMatrix(ctx, rows)).rank


def isotropy_chain(h: TorsionSubgroup) -> FlagChain:
    typ = canonical_type(h)
    basis, orders = adapted_basis(h)
    ell, g = h.ctx.ell, h.g
    by_level = []
    for mk in typ.exponents:
        idx = [i for i, o in enumerate(orders) if o >= mk]
        gram = [[_pair(basis[i], basis[j], g) for j in idx] for i in idx]
        s = _rank_mod_ell(gram, ell) // 2
        by_level.append((len(idx) - s, s))
    t = typ.t
    m = m_invariant(h)
    hlev = next((k + 1 for k, mk in enumerate(typ.exponents) if mk <= m), t + 1)
    deltas = tuple(int(i <= t + 1 - hlev) for i in range(1, t + 1))
    return FlagChain(g, tuple(reversed(by_level)), deltas)


def _check_consistent(typ: SubgroupType, chain: FlagChain) -> None:
    if len(chain.pairs) != typ.t:
        raise ValueError("chain length differs from the number of exponents")
    sums = typ.partial_sums()
    for k, (r, s) in enumerate(chain.by_level()):
        if r + s != sums[k]:
            raise ValueError(
                f"level {k + 1}: r + s = {r + s} but the type needs {sums[k]}"
            )


def _level_steps(typ: SubgroupType) -> list[int]:
    """m^{t+1-i} - m^{t+2-i} for i = 1..t, with m^{t+1} = 0."""
    m = list(typ.exponents) + [0]
    t = typ.t
    return [m[t - i] - m[t + 1 - i] for i in range(1, t + 1)]


def degree_exponent_prediction(typ: SubgroupType, chain: FlagChain) -> int:
    _check_consistent(typ, chain)
    total = 0
    for step, (r, s), d in zip(_level_steps(typ), chain.pairs, chain.deltas):
        total += step * (d + codim_prs(chain.g, r, s))
    return total


def _cyclotomic_and_sp(typ: SubgroupType, chain: FlagChain) -> tuple[int, int]:
    _check_consistent(typ, chain)
    cyc, sp = 0, 0
    for step, (r, s), d in zip(_level_steps(typ), chain.pairs, chain.deltas):
        cyc += step * d
        sp += step * codim_prs(chain.g, r, s)
    return cyc, sp


def product_degree_exponent(parts: Sequence[tuple[SubgroupType, FlagChain]]) -> tuple[int, int]:
    if not parts:
        raise ValueError("need at least one factor")
    split = [_cyclotomic_and_sp(t, c) for t, c in parts]
    m = max(c for c, _ in split)
    return m, m + sum(s for _, s in split)


def _stabilizer_problem(h: TorsionSubgroup, similitude: bool):
    basis, orders = adapted_basis(h)
    level = max(orders)
    if level == 0:
        return None, 0
    rows = [[basis[j][i] for j in range(2 * h.g)] for i in range(2 * h.g)]
    return problem(h.g, h.ctx.ell, level, orders, similitude, rows), level


def stabilizer_enumerate(h: TorsionSubgroup, family: str = "Sp", budget_log2: int = 34) -> tuple[int, int]:
    """(order, index) of the pointwise stabiliser of h at level m^1."""
    if family not in ("Sp", "GSp"):
        raise ValueError("family must be Sp or GSp")
    sim = family == "GSp"
    prob, level = _stabilizer_problem(h, sim)
    if prob is None:
        return 1, 1
    order = enumerate_columns(prob, budget_log2).total
    full = (gsp_order if sim else sp_order)(h.g, h.ctx.ell, level)
    return order, full // order


def multiplier_image(h: TorsionSubgroup, budget_log2: int = 34) -> tuple[int, list[int]]:
    prob, level = _stabilizer_problem(h, True)
    if prob is None:
        return 0, [1]
    return level, enumerate_columns(prob, budget_log2).multiplier_image


def delta_estimate(h: TorsionSubgroup, budget_log2: int = 34) -> int:
    """Index of the multiplier image of the GSp stabiliser in (Z/l^{m^1})^x."""
    level, image = multiplier_image(h, budget_log2)
    if level == 0:
        return 1
    ell = h.ctx.ell
    return (ell - 1) * ell ** (level - 1) // len(image)


def all_subgroups_rank2(ell: int, n: int) -> list[TorsionSubgroup]:
    """Every subgroup of (Z/l^n)^2 (g = 1), one per Hermite normal form."""
    ctx = PrecisionContext(ell, n)
    q = ell ** n
    divisors = [ell ** k for k in range(n + 1)]
    out = []
    # lattices with basis (a, 0), (b, d), 0 <= b < a, containing q Z^2
    for a in divisors:
        for d in divisors:
            for b in range(a):
                if ((q // d) * b) % a:
                    continue
                gens = [v for v in ((a, 0), (b, d)) if any(x % q for x in v)]
                out.append(TorsionSubgroup(ctx, 1, tuple(TorsionPoint(ctx, v) for v in gens)))
    return out
