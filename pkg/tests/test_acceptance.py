"""Acceptance criteria, one test each, with wall-clock limits.

Every test appends a one-line verdict; conftest prints them after the run.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction

from gsptorsion.enumeration import enumerate_columns, problem
from gsptorsion.exponents import (
    ProductShape,
    alpha_product,
    exceptional_scan,
    full_level_witness,
    gamma_ratio_search,
    gamma_simple,
    is_exceptional,
    prefix_max,
    prefix_max_multi,
    sup_bruteforce,
    sup_bruteforce_multi,
    verify_prop63,
    witness_value,
)
from gsptorsion.lattice import random_lagrangian, symplectic_complete
from gsptorsion.padic import PrecisionContext
from gsptorsion.rng import SplitMix64
from gsptorsion.symplectic import (
    GroupDescriptor,
    group_order_enumerate,
    order_bounds_check,
    order_corridor,
    sp_order,
    standard_form,
)
from gsptorsion.torsion import (
    all_subgroups_rank2,
    delta_estimate,
    is_totally_isotropic,
    m1_invariant,
)


@contextmanager
def criterion(log: list[str], number: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        took = time.perf_counter() - start
        within = took < limit
        verdict = "PASS" if ok and within else "FAIL"
        log.append(f"[{verdict}] criterion {number:>2}: {title} ({took:.2f}s, limit {limit:g}s)")
    assert within, f"criterion {number} took {took:.1f}s, limit {limit}s"


def test_01_order_formulas(acceptance_log):
    cases = [(1, 2, 1), (1, 2, 2), (1, 3, 1), (1, 3, 2), (1, 5, 1), (1, 5, 2), (2, 2, 1), (2, 3, 1)]
    with criterion(acceptance_log, 1, "sp_order equals enumeration on 8 cases", 300):
        for g, ell, m in cases:
            assert sp_order(g, ell, m) == group_order_enumerate(GroupDescriptor.sp(g), ell, m), (g, ell, m)
        assert [sp_order(*c) for c in [(1, 3, 1), (1, 3, 2), (1, 5, 2), (2, 2, 1), (2, 3, 1)]] == [
            24, 648, 15000, 720, 51840]


def test_02_hensel_ratio(acceptance_log):
    with criterion(acceptance_log, 2, "|Sp2(Z/l^2)| / |Sp2(F_l)| = l^3 for l in 2, 3, 5", 60):
        for ell in (2, 3, 5):
            d = GroupDescriptor.sp(1)
            ratio = Fraction(group_order_enumerate(d, ell, 2), group_order_enumerate(d, ell, 1))
            assert ratio == ell ** 3


def test_03_prs_corridor(acceptance_log):
    with criterion(acceptance_log, 3, "P_{r,s}(F_l) orders inside the dimension corridor", 300):
        for g in (1, 2):
            for ell in (3, 5):
                for r in range(g + 1):
                    for s in range(r + 1):
                        d = GroupDescriptor.prs(g, r, s) if r else GroupDescriptor.sp(g)
                        lo, hi = order_corridor(d.dimension, ell)
                        ratio = Fraction(group_order_enumerate(d, ell, 1), ell ** d.dimension)
                        assert lo <= ratio <= hi, (g, ell, r, s)
                        assert order_bounds_check(d, ell)


def test_04_congruence_multiplier(acceptance_log):
    with criterion(acceptance_log, 4, "GSp2(Z/9) fixing e1, e2 mod 3^k forces lambda = 1 mod 3^k", 60):
        res = enumerate_columns(problem(1, 3, 2, similitude=True), collect=True)
        assert len(res.elements) == 3888
        for k in (1, 2):
            mod = 3 ** k
            hits = 0
            for m in res.elements:
                if ((m - [[1, 0], [0, 1]]) % mod == 0).all():
                    hits += 1
                    lam = int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) % 9
                    assert (lam - 1) % mod == 0
            assert hits > 0


def test_05_symplectic_completion(acceptance_log):
    rng = SplitMix64(2024)
    with criterion(acceptance_log, 5, "200 random lagrangians complete to Gram = J exactly", 60):
        for _ in range(200):
            g, ell, n = rng.randint(1, 3), rng.choice([2, 3, 5]), rng.randint(1, 6)
            ctx = PrecisionContext(ell, n)
            basis = symplectic_complete(random_lagrangian(g, ctx, rng))
            assert basis.gram() == standard_form(g, ctx)


def test_06_torsion_mu(acceptance_log):
    ell = 3
    lo, hi = Fraction(ell - 1, ell), Fraction(1)
    with criterion(acceptance_log, 6, "all subgroups of (Z/27)^2: isotropy after scaling, delta bracket", 600):
        subs = all_subgroups_rank2(ell, 3)
        assert len(subs) == 76
        for h in subs:
            m1 = m1_invariant(h)
            assert is_totally_isotropic(h.scale(ell ** m1))
            ratio = Fraction(delta_estimate(h), ell ** m1)
            assert lo <= ratio <= hi, (h.to_json(), ratio)


def test_07_gamma(acceptance_log):
    with criterion(acceptance_log, 7, "gamma table and exhaustive ratio search for g = 1, 2, 3", 60):
        table = [gamma_simple(g) for g in range(1, 6)]
        assert table == [Fraction(1, 2), Fraction(4, 11), Fraction(3, 11), Fraction(8, 37), Fraction(5, 28)]
        assert all(v == Fraction(2 * g, 2 * g * g + g + 1) for g, v in enumerate(table, start=1))
        for g, lv in [(1, 3), (2, 3), (3, 2)]:
            rep = gamma_ratio_search(g, 2, lv)
            assert rep.value == gamma_simple(g)
            assert full_level_witness(g, rep) is not None


def test_08_abel(acceptance_log):
    rng = SplitMix64(7)
    with criterion(acceptance_log, 8, "prefix maxima equal grid suprema (500 single, 200 multi)", 60):
        for _ in range(500):
            k = rng.randint(1, 4)
            a = [rng.randint(1, 9) for _ in range(k)]
            b = [rng.randint(1, 9) for _ in range(k)]
            assert prefix_max(a, b).value == sup_bruteforce(a, b, 6)
        for _ in range(200):
            d = rng.randint(1, 3)
            a, b = [], []
            for _ in range(d):
                k = rng.randint(1, 3)
                a.append([rng.randint(1, 9) for _ in range(k)])
                b.append([rng.randint(1, 9) for _ in range(k)])
            assert prefix_max_multi(a, b).value == sup_bruteforce_multi(a, b, 3)


def test_09_product_bound(acceptance_log):
    rng = SplitMix64(1)
    with criterion(acceptance_log, 9, "max(rho0, rho1) <= alpha on 1000 shapes; singletons match gamma", 60):
        for _ in range(1000):
            d = rng.randint(1, 3)
            shape = ProductShape.of([(rng.randint(1, 4), rng.randint(1, 4)) for _ in range(d)])
            assert verify_prop63(shape), shape
        for g in range(1, 13):
            assert alpha_product(ProductShape.of([(g, 1)])).value == gamma_simple(g)


def test_10_exceptional(acceptance_log):
    with criterion(acceptance_log, 10, "exceptional members below 130 with witnesses", 1):
        members = [g for g in range(1, 131) if is_exceptional(g)[0]]
        assert members == [4, 10, 16, 32, 64, 108, 126]
        assert members == exceptional_scan(130)
        for g in members:
            assert witness_value(is_exceptional(g)[1]) == g
