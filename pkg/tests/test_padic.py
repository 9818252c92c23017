from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from gsptorsion.padic import (
    ContextMismatch,
    DimensionMismatch,
    NotInvertible,
    PrecisionContext,
    ResidueMatrix,
    determinant,
    kernel_mod_ell,
    mat_inv,
    mat_mul,
    rank_mod_ell,
    smith_normal_form,
    valuation,
)

C9 = PrecisionContext(3, 2)
C27 = PrecisionContext(3, 3)


@st.composite
def matrices(draw, square=True, unit_det=False):
    ell = draw(st.sampled_from([2, 3, 5]))
    n_prec = draw(st.integers(1, 3))
    ctx = PrecisionContext(ell, n_prec)
    r = draw(st.integers(1, 4))
    c = r if square else draw(st.integers(1, 4))
    q = ctx.modulus
    rows = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    m = ResidueMatrix(ctx, rows)
    if unit_det and not ctx.is_unit(m.det()):
        # push onto the identity mod l to force a unit determinant
        m = ResidueMatrix.identity(ctx, r) + m.scale(ell)
    return m


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(4, 2)
    with pytest.raises(ValueError):
        PrecisionContext(3, 0)
    assert C27.modulus == 27
    assert C27.inverse(2) == 14
    with pytest.raises(NotInvertible):
        C27.inverse(3)


@pytest.mark.parametrize("x, v", [(0, 3), (6, 1), (18, 2), (1, 0), (27, 3), (-9, 2)])
def test_valuation_table(x, v):
    assert valuation(x, 3, 3) == v
    assert C27.valuation(x) == v


def test_mul_hand_example():
    a = ResidueMatrix(C9, [[1, 1], [0, 1]])
    b = ResidueMatrix(C9, [[1, 0], [1, 1]])
    assert mat_mul(a, b) == ResidueMatrix(C9, [[2, 1], [1, 1]])
    assert a @ b == mat_mul(a, b)


def test_inverse_examples():
    i2 = ResidueMatrix.identity(C9, 2)
    assert mat_inv(i2) == i2
    assert mat_inv(ResidueMatrix(C9, [[1, 1], [0, 1]])) == ResidueMatrix(C9, [[1, 8], [0, 1]])
    m = ResidueMatrix(C9, [[3, 1], [1, 1]])
    assert m @ mat_inv(m) == i2 == mat_inv(m) @ m
    with pytest.raises(NotInvertible):
        mat_inv(ResidueMatrix(C9, [[3, 0], [0, 1]]))


def test_shape_and_context_errors():
    a = ResidueMatrix.identity(C9, 2)
    with pytest.raises(DimensionMismatch):
        a @ ResidueMatrix.identity(C9, 3)
    with pytest.raises(ContextMismatch):
        a @ ResidueMatrix.identity(C27, 2)
    with pytest.raises(DimensionMismatch):
        ResidueMatrix(C9, [[1, 2], [3]])


def test_json_roundtrip():
    m = ResidueMatrix(C27, [[1, 26], [13, 0], [5, 9]])
    obj = m.to_json()
    assert all(isinstance(x, str) for x in obj["entries"])
    assert ResidueMatrix.from_json(obj) == m


def _check_transform(m: ResidueMatrix, snf) -> None:
    assert snf.left @ m @ snf.right == snf.diagonal()
    assert snf.left.ctx.is_unit(snf.left.det())
    assert snf.right.ctx.is_unit(snf.right.det())
    assert list(snf.exponents) == sorted(snf.exponents, reverse=True)


def test_snf_examples():
    assert smith_normal_form(ResidueMatrix.identity(C27, 2)).exponents == (0, 0)
    d = ResidueMatrix.diagonal(C27, [3, 9])
    assert smith_normal_form(d).exponents == (2, 1)
    # det = -8 is a unit, so both elementary divisors are units
    m = ResidueMatrix(C27, [[1, 3], [3, 1]])
    snf = smith_normal_form(m)
    _check_transform(m, snf)
    assert snf.exponents == (0, 0)
    assert sum(snf.exponents) == valuation(determinant(m), 3, 3)


def test_snf_zero_divisors_first():
    m = ResidueMatrix(C9, [[0, 0], [0, 3]])
    snf = smith_normal_form(m)
    _check_transform(m, snf)
    assert snf.exponents == (2, 1)
    assert snf.rank == 1


def test_kernel_mod_ell():
    c3 = PrecisionContext(3, 1)
    m = ResidueMatrix(c3, [[1, 2, 0], [2, 1, 0]])
    ker = kernel_mod_ell(m)
    assert len(ker) == 3 - rank_mod_ell(m) == 2
    for v in ker:
        assert all(x == 0 for x in (m @ ResidueMatrix.from_columns(c3, [v])).entries())


@given(matrices(square=False))
def test_snf_transform_identity(m):
    _check_transform(m, smith_normal_form(m))


@given(matrices())
def test_snf_exponent_sum_is_det_valuation(m):
    N = m.ctx.precision
    v = valuation(m.det(), m.ctx.ell, N)
    if v < N:
        assert sum(smith_normal_form(m).exponents) == v


@given(matrices(square=False), st.data())
def test_reduction_commutes(m, data):
    k = data.draw(st.integers(1, m.ctx.precision))
    ex = smith_normal_form(m).exponents
    assert smith_normal_form(m.reduce(k)).exponents == tuple(min(e, k) for e in ex)
    b = ResidueMatrix.identity(m.ctx, m.cols) + m.T @ m
    assert (m @ b).reduce(k) == m.reduce(k) @ b.reduce(k)


@given(matrices(unit_det=True))
def test_inverse_involution(m):
    inv = mat_inv(m)
    assert mat_inv(inv) == m
    assert m @ inv == ResidueMatrix.identity(m.ctx, m.rows)


@given(matrices())
def test_determinant_invariance(m):
    u = ResidueMatrix.identity(m.ctx, m.rows) + ResidueMatrix(
        m.ctx, [[int(j > i) for j in range(m.rows)] for i in range(m.rows)]
    )
    assert determinant(m @ u) == determinant(m) == determinant(m.T)
