from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from gsptorsion.padic import PrecisionContext, ResidueMatrix, rank_mod_ell, smith_normal_form
from gsptorsion.rng import SplitMix64
from gsptorsion.symplectic import GroupDescriptor, is_member, random_sp_matrix, standard_form
from gsptorsion.lattice import (
    Lattice,
    NotIsotropicModL,
    NotMaximalIsotropic,
    NotSaturated,
    NotTotallyIsotropic,
    complement_basis,
    is_isotropic,
    is_saturated,
    isotropic_group_lift,
    isotropic_lift,
    random_lagrangian,
    saturate,
    symplectic_complete,
)
from gsptorsion.torsion import (
    TorsionSubgroup,
    canonical_type,
    is_totally_isotropic,
)

C3 = PrecisionContext(3, 1)
C9 = PrecisionContext(3, 2)
C27 = PrecisionContext(3, 3)
C81 = PrecisionContext(3, 4)


def span(ctx, *vecs):
    return Lattice.span(ctx, vecs)


def _log_size(m: ResidueMatrix) -> int:
    return sum(m.ctx.precision - e for e in smith_normal_form(m).exponents)


def _contains(big: Lattice, small: Lattice) -> bool:
    """small inside big iff adjoining it does not enlarge the span."""
    return _log_size(big.generators.hstack(small.generators)) == _log_size(big.generators)


def _same_span(a: Lattice, b: Lattice) -> bool:
    return _contains(a, b) and _contains(b, a)


def test_is_saturated_examples():
    assert is_saturated(span(C9, (1, 0)))
    assert not is_saturated(span(C9, (3, 0)))
    assert is_saturated(span(C27, (1, 3), (3, 1)))


def test_saturate_examples():
    assert saturate(span(C27, (3, 0))).vectors() == [(1, 0)]
    sat = span(C9, (1, 3))
    assert _same_span(saturate(sat), sat)
    # (3, 9) is 3 * (1, 3), and (0, 27) is a nonzero vector of valuation 3
    out = saturate(span(C81, (3, 9), (0, 27)))
    assert out.rank == 2 and is_saturated(out)
    assert saturate(span(C81, (3, 9))).vectors() == [(1, 3)]


def test_complement_examples():
    assert complement_basis(span(C9, (1, 0))).vectors() == [(0, 1)]
    l = span(C9, (1, 1))
    c = complement_basis(l)
    assert C9.is_unit(l.generators.hstack(c.generators).det())
    with pytest.raises(NotSaturated):
        complement_basis(span(C9, (3, 0)))


def test_complement_random_rank2_in_rank4():
    rng = SplitMix64(21)
    for _ in range(100):
        ctx = PrecisionContext(rng.choice([2, 3, 5]), rng.randint(1, 3))
        m = random_sp_matrix(2, ctx, rng)
        l = Lattice.span(ctx, [m.column(0), m.column(rng.randint(1, 3))])
        full = l.generators.hstack(complement_basis(l).generators)
        assert ctx.is_unit(full.det())


def test_isotropy_examples():
    for g in (1, 2, 3):
        e = [tuple(int(i == j) for i in range(2 * g)) for j in range(2 * g)]
        assert is_isotropic(Lattice.span(C9, e[:g]))
        assert not is_isotropic(Lattice.span(C9, [e[0], e[g]]))
    rng = SplitMix64(4)
    std = [(1, 0, 0, 0), (0, 1, 0, 0)]
    for _ in range(100):
        m = random_sp_matrix(2, C9, rng)
        img = m @ ResidueMatrix.from_columns(C9, std)
        assert is_isotropic(Lattice.span(C9, img.columns()))


def test_complete_examples():
    std = span(C27, (1, 0, 0, 0), (0, 1, 0, 0))
    basis = symplectic_complete(std)
    assert basis.vectors == ResidueMatrix.identity(C27, 4)
    b = symplectic_complete(span(C9, (1, 3)))
    assert b.vectors.column(1) == (0, 1)
    assert b.is_valid()


def test_complete_rejects_bad_input():
    with pytest.raises(NotSaturated):
        symplectic_complete(span(C9, (3, 0)))
    with pytest.raises(NotMaximalIsotropic):
        symplectic_complete(span(C9, (1, 0, 0, 0)))
    with pytest.raises(NotMaximalIsotropic):
        symplectic_complete(span(C9, (1, 0, 0, 0), (0, 0, 1, 0)))


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 3), st.sampled_from([2, 3, 5]), st.integers(1, 6))
def test_completion_is_symplectic(seed, g, ell, n):
    ctx = PrecisionContext(ell, n)
    l = random_lagrangian(g, ctx, SplitMix64(seed))
    basis = symplectic_complete(l)
    assert basis.gram() == standard_form(g, ctx)
    assert is_member(basis.vectors, GroupDescriptor.sp(g))
    assert basis.vectors.submatrix(range(2 * g), range(g)) == l.generators


@given(st.integers(0, 2 ** 64 - 1))
def test_saturate_idempotent_and_containing(seed):
    rng = SplitMix64(seed)
    ctx = PrecisionContext(rng.choice([2, 3]), rng.randint(1, 4))
    vecs = [tuple(rng.below(ctx.modulus) * ctx.ell ** rng.below(2) for _ in range(4)) for _ in range(2)]
    l = Lattice.span(ctx, vecs)
    s = saturate(l)
    assert is_saturated(s)
    assert _same_span(saturate(s), s)
    assert _contains(s, l)


@pytest.mark.parametrize("g", [1, 2])
def test_saturated_lagrangian_is_maximal(g):
    ell = 3
    c1 = PrecisionContext(ell, 1)
    rng = SplitMix64(g)
    for _ in range(5):
        l = random_lagrangian(g, c1, rng)
        j = standard_form(g, c1)
        for v in itertools.product(range(ell), repeat=2 * g):
            col = ResidueMatrix.from_columns(c1, [v])
            if (l.generators.T @ j @ col).is_zero():
                # isotropic to l means v already lies in l mod l
                assert rank_mod_ell(l.generators.hstack(col)) == g


def test_complement_lifts_are_invertible():
    rng = SplitMix64(8)
    for g, ell in [(1, 3), (2, 3), (2, 5), (3, 2)]:
        for _ in range(100):
            ctx = PrecisionContext(ell, 3)
            m = random_sp_matrix(g, ctx, rng)
            l = Lattice.span(ctx, [m.column(i) for i in range(g)])
            comp = complement_basis(l.reduce(1)).vectors()
            lifted = [tuple(c + ell * rng.below(ctx.modulus) for c in v) for v in comp]
            full = l.generators.hstack(ResidueMatrix.from_columns(ctx, lifted))
            assert rank_mod_ell(full) == 2 * g


def _check_lift(sub: Lattice, out: Lattice, precision: int) -> None:
    assert out.ctx.precision == precision
    assert is_isotropic(out)
    assert out.reduce(1).generators == sub.generators.reduce(1)


def test_isotropic_lift_examples():
    e1 = span(C3, (1, 0))
    _check_lift(e1, isotropic_lift(e1, 4), 4)
    s = span(C3, (1, 1, 0, 0))
    _check_lift(s, isotropic_lift(s, 5), 5)
    t = span(C3, (1, 0, 0, 1), (0, 1, 1, 0))
    assert is_isotropic(t)
    _check_lift(t, isotropic_lift(t, 5), 5)
    with pytest.raises(NotIsotropicModL):
        isotropic_lift(span(C3, (1, 0, 0, 0), (0, 0, 1, 0)), 3)


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 3), st.sampled_from([2, 3, 5]), st.integers(1, 5))
def test_isotropic_lift_random(seed, g, ell, n):
    rng = SplitMix64(seed)
    c1 = PrecisionContext(ell, 1)
    m = random_sp_matrix(g, PrecisionContext(ell, n), rng)
    k = rng.randint(1, g)
    cols = [tuple(x % ell for x in m.column(i)) for i in range(k)]
    sub = Lattice.span(c1, cols)
    _check_lift(sub, isotropic_lift(sub, n), n)


def _sub(ctx, g, items):
    return TorsionSubgroup.from_vectors(ctx, g, items)


def test_group_lift_examples():
    h = _sub(C27, 1, [((1, 0), 1)])
    hti, lat = isotropic_group_lift(h)
    assert canonical_type(hti) == canonical_type(h)
    assert all(hti.contains(p) for p in h.generators)
    assert is_isotropic(lat)

    h = _sub(C27, 2, [((1, 0, 0, 0), 2), ((0, 1, 0, 0), 1)])
    hti, lat = isotropic_group_lift(h)
    t = canonical_type(hti)
    assert (t.exponents, t.multiplicities) == ((2,), (2,))
    assert is_totally_isotropic(hti)
    assert all(hti.contains(p) for p in h.generators)

    full = TorsionSubgroup.lagrangian_layer(C27, 2, 2)
    hti, _ = isotropic_group_lift(full)
    assert canonical_type(hti) == canonical_type(full)
    assert all(hti.contains(p) for p in full.generators)
    assert all(full.contains(p) for p in hti.generators)


def test_group_lift_rejects():
    with pytest.raises(NotTotallyIsotropic):
        isotropic_group_lift(TorsionSubgroup.full_layer(C9, 1, 1))


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 3), st.sampled_from([2, 3]))
def test_group_lift_random(seed, g, ell):
    rng = SplitMix64(seed)
    ctx = PrecisionContext(ell, 4)
    m = random_sp_matrix(g, ctx, rng)
    items = [(m.column(i), rng.randint(1, 3)) for i in range(rng.randint(1, g))]
    h = _sub(ctx, g, items)
    hti, lat = isotropic_group_lift(h)
    top = max(o for _, o in items)
    t = canonical_type(hti)
    assert t.exponents == (top,) and t.multiplicities == (len(items),)
    assert is_totally_isotropic(hti) and is_isotropic(lat)
    assert all(hti.contains(p) for p in h.generators)
