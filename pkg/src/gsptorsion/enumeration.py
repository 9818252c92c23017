"""Brute-force enumeration of symplectic similitudes with column constraints.

The engine counts (or lists) matrices M over Z/q, q = ell**m, such that

* tM J' M = lam J' for lam in a prescribed set of units, and
* column i of M is congruent to e_i modulo ell**orders[i].

Here J' = tU J U for an invertible change of basis U. Conjugating by U turns
"M fixes u_i mod ell**o_i" into "U^-1 M U fixes e_i mod ell**o_i", so one
engine serves Sp, GSp, P_{r,s} and stabilisers of finite subgroups.

Columns are chosen one at a time. A candidate for the next column must pair
correctly with every column chosen so far; those tests are answered from a
precomputed table of packed bit masks, one per (vector, pairing value).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "BudgetExceeded",
    "ColumnProblem",
    "EnumerationResult",
    "enumerate_columns",
    "full_scan",
    "problem",
    "standard_j",
]

_VECTOR_CAP = 8192
_CHUNK = 1 << 16


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget_log2: int):
        self.estimate = estimate
        self.budget_log2 = budget_log2
        super().__init__(
            f"estimated search space {estimate} exceeds 2^{budget_log2}"
        )


def standard_j(g: int) -> np.ndarray:
    j = np.zeros((2 * g, 2 * g), dtype=np.int64)
    j[:g, g:] = np.eye(g, dtype=np.int64)
    j[g:, :g] = -np.eye(g, dtype=np.int64)
    return j


def units(q: int, ell: int) -> list[int]:
    return [x for x in range(1, q) if x % ell]


@dataclass(frozen=True)
class ColumnProblem:
    """Search description at modulus ``ell**level``.

    ``basis`` is U (columns are the adapted basis), ``orders[i]`` the
    congruence depth for column i, ``multipliers`` the admissible lambdas.
    """

    g: int
    ell: int
    level: int
    orders: tuple[int, ...]
    multipliers: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...] | None = None

    @property
    def q(self) -> int:
        return self.ell ** self.level

    @property
    def dim(self) -> int:
        return 2 * self.g

    def basis_array(self) -> np.ndarray:
        if self.basis is None:
            return np.eye(self.dim, dtype=np.int64)
        return np.array(self.basis, dtype=np.int64) % self.q

    def form(self) -> np.ndarray:
        u = self.basis_array()
        return (u.T @ standard_j(self.g) @ u) % self.q


@dataclass
class EnumerationResult:
    counts: dict[int, int]
    estimate: int
    elements: np.ndarray | None = field(default=None, repr=False)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def multiplier_image(self) -> list[int]:
        return sorted(lam for lam, c in self.counts.items() if c > 0)


def _all_vectors(dim: int, q: int) -> np.ndarray:
    grids = np.indices((q,) * dim).reshape(dim, -1).T
    return grids.astype(np.int64)


def _column_sets(vecs: np.ndarray, prob: ColumnProblem) -> list[np.ndarray]:
    """Indices into ``vecs`` allowed for each column."""
    out = []
    for i, o in enumerate(prob.orders):
        if o <= 0:
            out.append(np.arange(len(vecs)))
            continue
        mod = prob.ell ** o
        target = np.zeros(prob.dim, dtype=np.int64)
        target[i] = 1
        ok = np.all((vecs - target) % mod == 0, axis=1)
        out.append(np.nonzero(ok)[0])
    return out


def _column_order(prob: ColumnProblem) -> list[int]:
    # most constrained columns first
    return sorted(range(prob.dim), key=lambda i: -prob.orders[i])


def estimate_work(prob: ColumnProblem) -> int:
    """Rough count of candidate tests, used for the budget check."""
    q = prob.q
    sizes = []
    for o in prob.orders:
        sizes.append(q ** prob.dim // (prob.ell ** (min(o, prob.level) * prob.dim)))
    order = _column_order(prob)
    partial, work = 1, 0
    for k, col in enumerate(order):
        size = sizes[col]
        work += partial * size
        partial = max(1, partial * size // (q ** k))
    return work * len(prob.multipliers)


def enumerate_columns(
    prob: ColumnProblem, budget_log2: int = 34, collect: bool = False
) -> EnumerationResult:
    """Count solutions per multiplier; optionally return all of them.

    Returned elements are expressed in the standard basis, i.e. already
    conjugated back by U.
    """
    estimate = estimate_work(prob)
    if estimate > 2 ** budget_log2:
        raise BudgetExceeded(estimate, budget_log2)
    q, dim = prob.q, prob.dim
    if q ** dim > _VECTOR_CAP:
        raise BudgetExceeded(estimate, budget_log2)

    vecs = _all_vectors(dim, q)
    jp = prob.form()
    pair = (vecs @ jp @ vecs.T) % q
    sets = _column_sets(vecs, prob)
    order = _column_order(prob)

    # masks[k][u, t] = packed bits over sets[order[k]] of (pair[u, v] == t)
    masks = []
    for col in order:
        sub = pair[:, sets[col]]
        table = np.stack([np.packbits(sub == t, axis=1) for t in range(q)], axis=1)
        masks.append(table)

    counts: dict[int, int] = {}
    found: list[np.ndarray] = []
    for lam in prob.multipliers:
        targets = (lam * jp) % q
        total, chunks = _search(order, sets, masks, targets, collect)
        counts[lam] = total
        found.extend(chunks)

    elements = None
    if collect:
        idx = np.concatenate(found, axis=0) if found else np.zeros((0, dim), dtype=np.int64)
        # idx[:, k] is the vector index placed in column order[k]
        mats = np.zeros((len(idx), dim, dim), dtype=np.int64)
        for k, col in enumerate(order):
            mats[:, :, col] = vecs[idx[:, k]]
        u = prob.basis_array()
        if prob.basis is not None:
            uinv = _inverse_mod(u, prob.ell, q)
            mats = (u @ mats @ uinv) % q
        elements = mats
    return EnumerationResult(counts, estimate, elements)


def _search(order, sets, masks, targets, collect):
    dim = len(order)
    # partials: array (K, depth) of vector indices
    frontier = [np.zeros((1, 0), dtype=np.int64)]
    for k in range(dim):
        col = order[k]
        size = len(sets[col])
        last = k == dim - 1
        nxt = []
        total = 0
        for block in frontier:
            for start in range(0, len(block), _CHUNK):
                part = block[start:start + _CHUNK]
                if len(part) == 0:
                    continue
                acc = None
                for a in range(k):
                    t = targets[order[a], col]
                    m = masks[k][part[:, a], t]
                    acc = m if acc is None else acc & m
                if acc is None:
                    acc = np.full((len(part), masks[k].shape[2]), 0xFF, dtype=np.uint8)
                    # clear padding bits beyond ``size``
                    bits = np.unpackbits(acc, axis=1, count=size)
                    acc = np.packbits(bits, axis=1)
                if last and not collect:
                    total += int(np.bitwise_count(acc).sum())
                    continue
                bits = np.unpackbits(acc, axis=1, count=size).astype(bool)
                rows, cols = np.nonzero(bits)
                if len(rows) == 0:
                    continue
                chosen = sets[col][cols]
                nxt.append(np.concatenate([part[rows], chosen[:, None]], axis=1))
        if last:
            if collect:
                return sum(len(b) for b in nxt), nxt
            return total, []
        frontier = nxt
        if not frontier:
            return 0, []
    return 0, []


def _inverse_mod(u: np.ndarray, ell: int, q: int) -> np.ndarray:
    n = u.shape[0]
    a = [[int(x) % q for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(u)]
    for k in range(n):
        piv = next(i for i in range(k, n) if a[i][k] % ell)
        a[k], a[piv] = a[piv], a[k]
        inv = pow(a[k][k], -1, q)
        a[k] = [x * inv % q for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[k])]
    return np.array([r[n:] for r in a], dtype=np.int64)


def full_scan(prob: ColumnProblem, budget_log2: int = 26) -> dict[int, int]:
    """Independent oracle: test every matrix over Z/q. Only for tiny spaces."""
    q, dim = prob.q, prob.dim
    space = q ** (dim * dim)
    if space > 2 ** budget_log2:
        raise BudgetExceeded(space, budget_log2)
    jp = prob.form()
    allowed = set(prob.multipliers)
    counts = {lam: 0 for lam in prob.multipliers}
    powers = q ** np.arange(dim * dim, dtype=np.int64)
    step = 1 << 18
    cols_fixed = [(i, prob.ell ** o) for i, o in enumerate(prob.orders) if o > 0]
    for start in range(0, space, step):
        idx = np.arange(start, min(space, start + step), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % q
        mats = digits.reshape(-1, dim, dim)
        keep = np.ones(len(mats), dtype=bool)
        for i, mod in cols_fixed:
            target = np.zeros(dim, dtype=np.int64)
            target[i] = 1
            keep &= np.all((mats[:, :, i] - target) % mod == 0, axis=1)
        mats = mats[keep]
        if len(mats) == 0:
            continue
        gram = np.einsum("kji,jl,klm->kim", mats, jp, mats) % q
        for lam in allowed:
            ok = np.all(gram == (lam * jp) % q, axis=(1, 2))
            counts[lam] += int(ok.sum())
    return counts


def iter_vectors(dim: int, q: int) -> Iterator[tuple[int, ...]]:
    for row in _all_vectors(dim, q):
        yield tuple(int(x) for x in row)


def problem(
    g: int,
    ell: int,
    level: int,
    orders: Sequence[int] | None = None,
    similitude: bool = False,
    basis: Sequence[Sequence[int]] | None = None,
) -> ColumnProblem:
    q = ell ** level
    lams = tuple(units(q, ell)) if similitude else (1,)
    orders = tuple(min(int(o), level) for o in (orders or [0] * (2 * g)))
    b = None if basis is None else tuple(tuple(int(x) % q for x in row) for row in basis)
    return ColumnProblem(g, ell, level, orders, lams, b)
