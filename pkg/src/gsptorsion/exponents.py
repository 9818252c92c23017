"""Exact exponent calculus for torsion growth of GSp-type varieties and products."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .symplectic import codim_prs

__all__ = [
    "ExponentReport",
    "ProductShape",
    "alpha_product",
    "exceptional_scan",
    "full_level_witness",
    "gamma_ratio_search",
    "gamma_simple",
    "is_exceptional",
    "masser_bound",
    "mt_dimension",
    "prefix_max",
    "prefix_max_multi",
    "rho0",
    "rho0_rs",
    "rho1",
    "sup_bruteforce",
    "sup_bruteforce_multi",
    "verify_prop63",
]


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class ProductShape:
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a shape needs at least one factor")
        for g, n in self.factors:
            if g < 1 or n < 1:
                raise ValueError("genus and multiplicity must be >= 1")

    @classmethod
    def of(cls, factors: Iterable[tuple[int, int]]) -> "ProductShape":
        return cls(tuple((int(g), int(n)) for g, n in factors))

    def __len__(self) -> int:
        return len(self.factors)


@dataclass
class ExponentReport:
    value: Fraction
    maximizers: list[Any]
    table: list[tuple[Any, Fraction]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": _frac(self.value),
            "maximizers": [_jsonable(m) for m in self.maximizers],
            "table": [{"candidate": _jsonable(c), "value": _frac(v)} for c, v in self.table],
        }


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _jsonable(x: Any) -> Any:
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, list):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _report(table: list[tuple[Any, Fraction]], keep_table: bool = True) -> ExponentReport:
    best = max(v for _, v in table)
    winners = sorted(c for c, v in table if v == best)
    return ExponentReport(best, winners, table if keep_table else [])


def gamma_simple(g: int) -> Fraction:
    if g < 1:
        raise ValueError("genus must be >= 1")
    return Fraction(2 * g, 2 * g * g + g + 1)


def masser_bound(shape: ProductShape) -> int:
    return sum(g * n for g, n in shape.factors)


def mt_dimension(shape: ProductShape, subset: Iterable[int]) -> int:
    """1 + sum over the subset (1-based indices) of 2g^2 + g."""
    idx = sorted(set(subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    if idx[0] < 1 or idx[-1] > len(shape):
        raise ValueError("subset index out of range")
    return 1 + sum(2 * g * g + g for g, _ in (shape.factors[i - 1] for i in idx))


def alpha_product(shape: ProductShape) -> ExponentReport:
    d = len(shape)
    if d > 30:
        raise BudgetError("at most 30 factors")
    table = []
    for size in range(1, d + 1):
        for sub in itertools.combinations(range(1, d + 1), size):
            num = 2 * sum(shape.factors[i - 1][0] * shape.factors[i - 1][1] for i in sub)
            table.append((sub, Fraction(num, mt_dimension(shape, sub))))
    return _report(table)


def _box_budget(sizes: Sequence[int], limit: int = 10 ** 7) -> None:
    if math.prod(sizes) > limit:
        raise BudgetError(f"box of size {math.prod(sizes)} exceeds {limit}")


def rho0(shape: ProductShape) -> ExponentReport:
    """max over 2 <= x_i <= 2 g_i of sum n x / (1 + sum x (2g - (x - 1)/2))."""
    ranges = [range(2, 2 * g + 1) for g, _ in shape.factors]
    _box_budget([len(r) for r in ranges])
    table = []
    for xs in itertools.product(*ranges):
        num = sum(n * x for (_, n), x in zip(shape.factors, xs))
        # x (2g - (x-1)/2) = (4gx - x(x-1)) / 2, always an integer
        den = 1 + sum((4 * g * x - x * (x - 1)) // 2 for (g, _), x in zip(shape.factors, xs))
        table.append((xs, Fraction(num, den)))
    return _report(table)


def rho0_rs(shape: ProductShape) -> Fraction:
    """Same maximum taken over pairs 1 <= s_i <= r_i <= g_i."""
    per = []
    for g, _ in shape.factors:
        per.append([(r, s) for r in range(1, g + 1) for s in range(1, r + 1)])
    _box_budget([len(p) for p in per])
    best = None
    for choice in itertools.product(*per):
        num = sum(n * (r + s) for (_, n), (r, s) in zip(shape.factors, choice))
        den = 1 + sum(codim_prs(g, r, s) for (g, _), (r, s) in zip(shape.factors, choice))
        v = Fraction(num, den)
        best = v if best is None or v > best else best
    return best


def rho1(shape: ProductShape) -> ExponentReport:
    """max over 0 <= r_i <= g_i, not all zero, of sum n r / sum r (2g - (r-1)/2)."""
    ranges = [range(0, g + 1) for g, _ in shape.factors]
    _box_budget([len(r) for r in ranges])
    table = []
    for rs in itertools.product(*ranges):
        if not any(rs):
            continue
        num = sum(n * r for (_, n), r in zip(shape.factors, rs))
        den = sum((4 * g * r - r * (r - 1)) // 2 for (g, _), r in zip(shape.factors, rs))
        table.append((rs, Fraction(num, den)))
    return _report(table)


def verify_prop63(shape: ProductShape) -> bool:
    alpha = alpha_product(shape).value
    return max(rho0(shape).value, rho1(shape).value) <= alpha


def _check_ab(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b) or not a:
        raise ValueError("a and b must be nonempty and of equal length")
    if any(x < 1 for x in a) or any(x < 1 for x in b):
        raise ValueError("entries must be positive integers")


def prefix_max(a: Sequence[int], b: Sequence[int]) -> ExponentReport:
    """max over h of (a_1 + .. + a_h) / (b_1 + .. + b_h); maximizers are h values."""
    _check_ab(a, b)
    table = []
    sa = sb = 0
    for h, (x, y) in enumerate(zip(a, b), start=1):
        sa += x
        sb += y
        table.append((h, Fraction(sa, sb)))
    return _report(table)


def prefix_max_multi(
    a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], require_all: bool = False
) -> ExponentReport:
    """Maximum over cut tuples (h_1, .., h_d) of the pooled prefix ratio.

    By default a factor may be cut at h_i = 0 (not all simultaneously); this
    equals the supremum over the product of cones. ``require_all`` restricts
    to h_i >= 1 for every factor.
    """
    if len(a) != len(b) or not a:
        raise ValueError("a and b must list the same number of factors")
    for x, y in zip(a, b):
        _check_ab(x, y)
    lo = 1 if require_all else 0
    prefixes = []
    for x, y in zip(a, b):
        pa = [0] + list(itertools.accumulate(x))
        pb = [0] + list(itertools.accumulate(y))
        prefixes.append(list(zip(pa, pb)))
    table = []
    for cut in itertools.product(*[range(lo, len(x) + 1) for x in a]):
        if not any(cut):
            continue
        num = sum(p[h][0] for p, h in zip(prefixes, cut))
        den = sum(p[h][1] for p, h in zip(prefixes, cut))
        table.append((cut, Fraction(num, den)))
    return _report(table)


def _cone(k: int, bound: int) -> list[tuple[int, ...]]:
    """Nonincreasing tuples of length k with entries in [0, bound]."""
    return [
        tuple(reversed(c))
        for c in itertools.combinations_with_replacement(range(bound + 1), k)
    ]


def sup_bruteforce(a: Sequence[int], b: Sequence[int], grid_bound: int = 6, limit: int = 10 ** 6) -> Fraction:
    _check_ab(a, b)
    if math.comb(len(a) + grid_bound, len(a)) > limit:
        raise BudgetError("grid too large")
    best_n, best_d = 0, 1
    for m in _cone(len(a), grid_bound):
        d = sum(y * t for y, t in zip(b, m))
        if d == 0:
            continue
        n = sum(x * t for x, t in zip(a, m))
        if n * best_d > best_n * d:
            best_n, best_d = n, d
    return Fraction(best_n, best_d)


def sup_bruteforce_multi(
    a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], grid_bound: int = 3, limit: int = 10 ** 6
) -> Fraction:
    """Grid maximum over per-factor nonincreasing tuples, not all zero."""
    per = []
    size = 1
    for x, y in zip(a, b):
        _check_ab(x, y)
        sums = {
            (sum(p * t for p, t in zip(x, m)), sum(p * t for p, t in zip(y, m)))
            for m in _cone(len(x), grid_bound)
        }
        per.append(sorted(sums))
        size *= len(per[-1])
    if size > limit:
        raise BudgetError("grid too large")
    best_n, best_d = 0, 1
    for combo in itertools.product(*per):
        d = sum(c[1] for c in combo)
        if d == 0:
            continue
        n = sum(c[0] for c in combo)
        if n * best_d > best_n * d:
            best_n, best_d = n, d
    return Fraction(best_n, best_d)


def is_exceptional(g: int) -> tuple[bool, dict | None]:
    """Membership of g in the exceptional set, with a witness."""
    if g < 1:
        raise ValueError("g must be >= 1")
    kmax = 2 + (2 * g).bit_length()
    for k in range(3, kmax + 1, 2):
        a = 1
        while 2 ** (k - 1) * a ** k <= g:
            if 2 ** (k - 1) * a ** k == g:
                return True, {"kind": "power", "k": k, "a": a}
            a += 1
    for k in range(3, kmax + 1, 2):
        if math.comb(2 * k, k) == 2 * g:
            return True, {"kind": "binomial", "k": k}
    return False, None


def witness_value(w: dict) -> int:
    if w["kind"] == "power":
        return 2 ** (w["k"] - 1) * w["a"] ** w["k"]
    return math.comb(2 * w["k"], w["k"]) // 2


def exceptional_scan(limit: int) -> list[int]:
    """Independent listing: run over all (k, a) directly."""
    found = set()
    k = 3
    while 2 ** (k - 1) <= limit or math.comb(2 * k, k) // 2 <= limit:
        a = 1
        while 2 ** (k - 1) * a ** k <= limit:
            found.add(2 ** (k - 1) * a ** k)
            a += 1
        if math.comb(2 * k, k) // 2 <= limit:
            found.add(math.comb(2 * k, k) // 2)
        k += 2
    return sorted(found)


def _chains(g: int, sums: Sequence[int]) -> Iterable[tuple[tuple[int, int], ...]]:
    """Per-level (r, s) with r + s = sums[k], r and s nondecreasing in k."""
    def rec(k, prev_r, prev_s):
        if k == len(sums):
            yield ()
            return
        x = sums[k]
        for s in range(prev_s, x // 2 + 1):
            r = x - s
            if r < prev_r or r > g or s > r:
                continue
            for rest in rec(k + 1, r, s):
                yield ((r, s),) + rest
    yield from rec(0, 0, 0)


def gamma_ratio_search(g: int, max_t: int, max_level: int, limit: int = 10 ** 6) -> ExponentReport:
    """Brute-force maximum of log|H| / predicted degree exponent.

    Runs over types with at most ``max_t`` distinct exponents in
    [1, max_level], total rank at most 2g, and every nested chain of
    stabiliser parameters compatible with the type.
    """
    if g < 1 or max_t < 1 or max_level < 1:
        raise ValueError("g, max_t and max_level must be >= 1")
    table = []
    for t in range(1, max_t + 1):
        for exps in itertools.combinations(range(max_level, 0, -1), t):
            for mults in itertools.product(range(1, 2 * g + 1), repeat=t):
                sums = list(itertools.accumulate(mults))
                if sums[-1] > 2 * g:
                    continue
                steps = [e - f for e, f in zip(exps, list(exps[1:]) + [0])]
                logh = sum(e * a for e, a in zip(exps, mults))
                for levels in _chains(g, sums):
                    deg = sum(
                        st * (int(s > 0) + codim_prs(g, r, s))
                        for st, (r, s) in zip(steps, levels)
                    )
                    pairs = tuple(reversed(levels))
                    key = (exps, mults, pairs)
                    table.append((key, Fraction(logh, deg)))
                    if len(table) > limit:
                        raise BudgetError("search space too large")
    return _report(table)


def full_level_witness(g: int, report: ExponentReport) -> tuple | None:
    """The maximizer of A[l^m] shape (one exponent, rank 2g, r = s = g), smallest m."""
    hits = [
        k for k in report.maximizers
        if len(k[0]) == 1 and k[1] == (2 * g,) and k[2] == ((g, g),)
    ]
    return min(hits) if hits else None
