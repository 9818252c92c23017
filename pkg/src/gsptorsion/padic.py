"""Exact arithmetic over the truncated ring Z/l^N.

Everything here works on Python integers; no floating point is involved.
Rationals are ``fractions.Fraction``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "ContextMismatch",
    "DimensionMismatch",
    "ExactRational",
    "NotInvertible",
    "PrecisionContext",
    "ResidueMatrix",
    "SmithForm",
    "is_prime",
    "determinant",
    "kernel_mod_ell",
    "mat_inv",
    "mat_mul",
    "rank_mod_ell",
    "smith_normal_form",
    "valuation",
]

ExactRational = Fraction


class DimensionMismatch(ValueError):
    pass


class ContextMismatch(ValueError):
    pass


class NotInvertible(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrecisionContext:
    """A prime ``ell`` and a working exponent ``precision``; the ring is Z/ell**precision."""

    ell: int
    precision: int

    def __post_init__(self):
        if not is_prime(self.ell):
            raise ValueError(f"ell={self.ell} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")

    @property
    def modulus(self) -> int:
        return self.ell ** self.precision

    def reduce(self, x: int) -> int:
        return x % self.modulus

    def is_unit(self, x: int) -> bool:
        return x % self.ell != 0

    def inverse(self, x: int) -> int:
        if not self.is_unit(x):
            raise NotInvertible(f"{x} is not a unit mod {self.ell}")
        return pow(x, -1, self.modulus)

    def valuation(self, x: int) -> int:
        return valuation(x, self.ell, self.precision)

    def at(self, precision: int) -> "PrecisionContext":
        return PrecisionContext(self.ell, precision)


def valuation(x: int, ell: int, precision: int) -> int:
    """l-adic valuation of ``x`` truncated at ``precision`` (zero has valuation ``precision``)."""
    x %= ell ** precision
    if x == 0:
        return precision
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


class ResidueMatrix:
    """Immutable matrix over Z/l^N, stored row-major as a tuple of tuples."""

    __slots__ = ("ctx", "rows", "cols", "_data")

    def __init__(self, ctx: PrecisionContext, data: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) % ctx.modulus for x in row) for row in data)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrices must have positive dimensions")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        self.ctx = ctx
        self.rows = len(rows)
        self.cols = width
        self._data = rows

    # construction helpers
    @classmethod
    def identity(cls, ctx: PrecisionContext, n: int) -> "ResidueMatrix":
        return cls(ctx, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ctx: PrecisionContext, rows: int, cols: int) -> "ResidueMatrix":
        return cls(ctx, [[0] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, ctx: PrecisionContext, diag: Sequence[int]) -> "ResidueMatrix":
        n = len(diag)
        return cls(ctx, [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, ctx: PrecisionContext, columns: Sequence[Sequence[int]]) -> "ResidueMatrix":
        columns = list(columns)
        if not columns:
            raise DimensionMismatch("need at least one column")
        n = len(columns[0])
        return cls(ctx, [[c[i] for c in columns] for i in range(n)])

    @property
    def data(self) -> tuple[tuple[int, ...], ...]:
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def entries(self) -> list[int]:
        return [x for r in self._data for x in r]

    def transpose(self) -> "ResidueMatrix":
        return ResidueMatrix(self.ctx, list(zip(*self._data)))

    @property
    def T(self) -> "ResidueMatrix":
        return self.transpose()

    def reduce(self, precision: int) -> "ResidueMatrix":
        """Reduction to a lower precision k <= N."""
        if precision > self.ctx.precision:
            raise ValueError("cannot raise precision by reduction")
        return ResidueMatrix(self.ctx.at(precision), self._data)

    def lift(self, precision: int) -> "ResidueMatrix":
        """Reinterpret the representatives in [0, l^N) at a higher precision."""
        return ResidueMatrix(self.ctx.at(precision), self._data)

    def scale(self, c: int) -> "ResidueMatrix":
        return ResidueMatrix(self.ctx, [[c * x for x in r] for r in self._data])

    def hstack(self, other: "ResidueMatrix") -> "ResidueMatrix":
        _check_ctx(self, other)
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return ResidueMatrix(self.ctx, [a + b for a, b in zip(self._data, other._data)])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "ResidueMatrix":
        cols = list(cols)
        return ResidueMatrix(self.ctx, [[self._data[i][j] for j in cols] for i in rows])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def trace(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("trace of non-square matrix")
        return sum(self._data[i][i] for i in range(self.rows)) % self.ctx.modulus

    def det(self) -> int:
        return determinant(self)

    def __add__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        _check_ctx(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch("shapes differ")
        return ResidueMatrix(
            self.ctx, [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        )

    def __sub__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        _check_ctx(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch("shapes differ")
        return ResidueMatrix(
            self.ctx, [[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        )

    def __neg__(self) -> "ResidueMatrix":
        return self.scale(-1)

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        return mat_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return self.ctx == other.ctx and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.ctx, self._data))

    def __repr__(self) -> str:
        return f"ResidueMatrix(mod {self.ctx.ell}^{self.ctx.precision}, {[list(r) for r in self._data]})"

    # JSON
    def to_json(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "precision": self.ctx.precision,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [str(x) for x in self.entries()],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "ResidueMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        ctx = PrecisionContext(int(obj["ell"]), int(obj["precision"]))
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = [int(x) for x in obj["entries"]]
        if len(entries) != rows * cols:
            raise DimensionMismatch(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(ctx, [entries[i * cols:(i + 1) * cols] for i in range(rows)])


def _check_ctx(a: ResidueMatrix, b: ResidueMatrix) -> None:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")


def mat_mul(a: ResidueMatrix, b: ResidueMatrix) -> ResidueMatrix:
    _check_ctx(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    bt = list(zip(*b.data))
    return ResidueMatrix(a.ctx, [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a.data])


def determinant(m: ResidueMatrix) -> int:
    """Exact determinant of the integer representatives (Bareiss), reduced mod l^N."""
    if m.rows != m.cols:
        raise DimensionMismatch("determinant of non-square matrix")
    a = [list(r) for r in m.data]
    n = m.rows
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return (sign * a[n - 1][n - 1]) % m.ctx.modulus


def mat_inv(m: ResidueMatrix) -> ResidueMatrix:
    """Inverse over Z/l^N by Gauss-Jordan with unit pivots."""
    if m.rows != m.cols:
        raise DimensionMismatch("inverse of non-square matrix")
    ctx, n, q = m.ctx, m.rows, m.ctx.modulus
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m.data)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] % ctx.ell), None)
        if piv is None:
            raise NotInvertible("determinant is divisible by ell")
        a[k], a[piv] = a[piv], a[k]
        inv = pow(a[k][k], -1, q)
        a[k] = [x * inv % q for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[k])]
    return ResidueMatrix(ctx, [r[n:] for r in a])


@dataclass(frozen=True)
class SmithForm:
    """``left @ m @ right`` is diagonal with entries ``ell**exponents[i]`` (exponent N encodes 0)."""

    exponents: tuple[int, ...]
    left: ResidueMatrix
    right: ResidueMatrix

    def diagonal(self) -> ResidueMatrix:
        ctx = self.left.ctx
        rows, cols = self.left.rows, self.right.cols
        d = [[0] * cols for _ in range(rows)]
        for i, e in enumerate(self.exponents):
            d[i][i] = ctx.ell ** e
        return ResidueMatrix(ctx, d)

    @property
    def rank(self) -> int:
        """Number of nonzero elementary divisors."""
        n = self.left.ctx.precision
        return sum(1 for e in self.exponents if e < n)


def smith_normal_form(m: ResidueMatrix) -> SmithForm:
    """Smith normal form over the local ring Z/l^N.

    The pivot at each stage is the entry of least valuation, ties broken by
    row-major position. Because the ring is local such a pivot divides every
    remaining entry, so one elimination pass per pivot suffices.
    """
    ctx = m.ctx
    ell, q, N = ctx.ell, ctx.modulus, ctx.precision
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.data]
    L = [[int(i == j) for j in range(rows)] for i in range(rows)]
    R = [[int(i == j) for j in range(cols)] for i in range(cols)]
    exps: list[int] = []

    def swap_rows(mat, i, j):
        mat[i], mat[j] = mat[j], mat[i]

    def swap_cols(mat, i, j):
        for r in mat:
            r[i], r[j] = r[j], r[i]

    for k in range(min(rows, cols)):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                v = valuation(a[i][j], ell, N)
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, pi, pj = best
        if v == N:
            exps.extend([N] * (min(rows, cols) - k))
            break
        swap_rows(a, k, pi)
        swap_rows(L, k, pi)
        swap_cols(a, k, pj)
        swap_cols(R, k, pj)
        # normalise pivot to ell**v
        unit = a[k][k] // ell ** v
        uinv = pow(unit, -1, q)
        a[k] = [x * uinv % q for x in a[k]]
        L[k] = [x * uinv % q for x in L[k]]
        p = ell ** v
        for i in range(k + 1, rows):
            if a[i][k]:
                f = a[i][k] // p
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[k])]
                L[i] = [(x - f * y) % q for x, y in zip(L[i], L[k])]
        for j in range(k + 1, cols):
            if a[k][j]:
                f = a[k][j] // p
                for r in a:
                    r[j] = (r[j] - f * r[k]) % q
                for r in R:
                    r[j] = (r[j] - f * r[k]) % q
        exps.append(v)

    # reorder to nonincreasing exponents (stable, so ties keep pivot order)
    order = sorted(range(len(exps)), key=lambda i: -exps[i])
    if order != list(range(len(exps))):
        perm = order + list(range(len(exps), rows))
        L = [L[i] for i in perm]
        cperm = order + list(range(len(exps), cols))
        R = [[r[j] for j in cperm] for r in R]
        exps = [exps[i] for i in order]
    return SmithForm(tuple(exps), ResidueMatrix(ctx, L), ResidueMatrix(ctx, R))


def rank_mod_ell(m: ResidueMatrix) -> int:
    return smith_normal_form(m.reduce(1)).rank


def kernel_mod_ell(m: ResidueMatrix) -> list[tuple[int, ...]]:
    """Basis of the right kernel of ``m`` over F_l, as integer vectors in [0, l)."""
    m1 = m.reduce(1)
    snf = smith_normal_form(m1)
    ex = snf.exponents
    return [snf.right.column(j) for j in range(m1.cols) if j >= len(ex) or ex[j] >= 1]
