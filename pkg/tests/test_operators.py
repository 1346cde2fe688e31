import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_sparse_operator
from noisygames import operators as ops
from noisygames.basis import build_standard_basis
from noisygames.errors import (
    InvalidDimensionError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
    SizeLimitError,
)


def test_synthesize_identity(pauli):
    op = ops.identity_operator(2, 3, pauli.tag)
    assert np.allclose(ops.synthesize(op, pauli), np.eye(8), atol=1e-14)


def test_synthesize_pauli_z(pauli):
    op = ops.FourierOperator(2, 1, {(3,): 1.0}, pauli.tag)
    assert np.allclose(ops.synthesize(op, pauli), np.diag([1.0, -1.0]), atol=1e-14)


def test_analyze_identity(pauli):
    op = ops.analyze(np.eye(4), 2, 2, pauli, drop_tol=1e-13)
    assert op.coeffs == {(0, 0): 1.0}


def test_analyze_zz(pauli):
    zz = np.kron(np.diag([1.0, -1.0]), np.diag([1.0, -1.0]))
    op = ops.analyze(zz, 2, 2, pauli, drop_tol=1e-13)
    assert set(op.coeffs) == {(3, 3)}
    assert op.coeffs[(3, 3)] == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("m,D", [(2, 1), (2, 3), (3, 2)])
def test_roundtrip_both_ways(m, D):
    rng = np.random.default_rng(100 + m + D)
    basis = build_standard_basis(m)
    M = random_hermitian(rng, m**D)
    op = ops.analyze(M, m, D, basis)
    assert np.abs(ops.synthesize(op, basis) - M).max() < 1e-10
    sparse = random_sparse_operator(rng, m, D, degree=D, nnz=3, basis_tag=basis.tag)
    back = ops.analyze(ops.synthesize(sparse, basis), m, D, basis, drop_tol=1e-12)
    for key in set(sparse.coeffs) | set(back.coeffs):
        assert back.coefficient(key) == pytest.approx(sparse.coefficient(key), abs=1e-10)


def test_parseval(pauli):
    rng = np.random.default_rng(17)
    M = random_hermitian(rng, 8)
    op = ops.analyze(M, 2, 3, pauli)
    assert op.two_norm_sq() == pytest.approx(np.trace(M @ M).real / 8, abs=1e-10)


def test_influence_single_term(pauli):
    op = ops.FourierOperator(2, 2, {(1, 0): 1.0}, pauli.tag)
    assert ops.influence(op, 0) == 1.0
    assert ops.influence(op, 1) == 0.0


def test_influence_two_terms(pauli):
    op = ops.FourierOperator(2, 2, {(1, 0): 0.5, (0, 2): 0.25}, pauli.tag)
    assert ops.influence(op, 0) == pytest.approx(0.25)
    assert ops.influence(op, 1) == pytest.approx(0.0625)


def test_total_influence_bound(pauli):
    rng = np.random.default_rng(3)
    op = random_sparse_operator(rng, 2, 4, degree=2, nnz=6, basis_tag=pauli.tag)
    total = ops.total_influence(op)
    assert total <= 2 * op.two_norm_sq() + 1e-12
    assert total == pytest.approx(
        math.fsum(ops.influence(op, i) for i in range(4)), abs=1e-12
    )


def test_influence_dense_oracle(pauli):
    # Inf_i(P) = nnorm2(P - I_i (x) Tr_i P / m)^2, computed densely
    rng = np.random.default_rng(23)
    m, D = 2, 3
    op = random_sparse_operator(rng, m, D, degree=2, nnz=5, basis_tag=pauli.tag)
    M = ops.synthesize(op, pauli)
    dim = m**D
    t = M.reshape((m,) * (2 * D))
    for i in range(D):
        axes_row = i
        axes_col = D + i
        marg = np.trace(t, axis1=axes_row, axis2=axes_col)  # partial trace over i
        # re-insert identity at register i
        marg_full = np.tensordot(np.eye(m), marg, axes=0)  # (i_row, i_col, rest...)
        order = []
        rest_row = [2 + k for k in range(D - 1)]
        rest_col = [2 + (D - 1) + k for k in range(D - 1)]
        row_axes = rest_row[:i] + [0] + rest_row[i:]
        col_axes = rest_col[:i] + [1] + rest_col[i:]
        marg_mat = marg_full.transpose(row_axes + col_axes).reshape(dim, dim)
        diff = M - marg_mat / m
        dense_inf = np.trace(diff.conj().T @ diff).real / dim
        assert ops.influence(op, i) == pytest.approx(dense_inf, abs=1e-10)


def test_influence_index_error(pauli):
    op = ops.identity_operator(2, 2, pauli.tag)
    with pytest.raises(InvalidIndexError):
        ops.influence(op, 2)


def test_apply_noise_examples(pauli):
    op = ops.FourierOperator(2, 3, {(1, 0, 2): 0.5, (0, 0, 3): 0.25, (0, 0, 0): 1.0}, pauli.tag)
    same = ops.apply_noise(op, 1.0)
    assert same.coeffs == op.coeffs
    noisy = ops.apply_noise(op, 0.5)
    assert noisy.coeffs[(1, 0, 2)] == pytest.approx(0.5 * 0.25)
    assert noisy.coeffs[(0, 0, 3)] == pytest.approx(0.25 * 0.5)
    assert noisy.coeffs[(0, 0, 0)] == 1.0
    zero = ops.apply_noise(op, 0.0)
    assert zero.coeffs == {(0, 0, 0): 1.0}


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.75, 1.0])
def test_apply_noise_matches_dense_channel(pauli, rho):
    from conftest import dense_depolarize

    rng = np.random.default_rng(31)
    op = random_sparse_operator(rng, 2, 3, degree=3, nnz=6, basis_tag=pauli.tag)
    fourier_route = ops.synthesize(ops.apply_noise(op, rho), pauli)
    dense_route = dense_depolarize(ops.synthesize(op, pauli), 2, 3, rho)
    assert np.abs(fourier_route - dense_route).max() < 1e-10


def test_apply_noise_domain(pauli):
    op = ops.identity_operator(2, 1, pauli.tag)
    with pytest.raises(InvalidParameterError):
        ops.apply_noise(op, 1.5)


def test_truncate_degree(pauli):
    op = ops.FourierOperator(2, 3, {(1, 2, 3): 1.0, (1, 0, 0): 0.5, (0, 0, 0): 0.25}, pauli.tag)
    assert ops.truncate_degree(op, 3).coeffs == op.coeffs
    assert ops.truncate_degree(op, 0).coeffs == {(0, 0, 0): 0.25}
    cut = ops.truncate_degree(op, 1)
    assert set(cut.coeffs) == {(1, 0, 0), (0, 0, 0)}
    assert cut.two_norm_sq() <= op.two_norm_sq()


@given(st.integers(0, 4), st.integers(0, 60))
@settings(max_examples=30, deadline=None)
def test_truncate_norm_monotone(d, seed):
    rng = np.random.default_rng(seed)
    op = random_sparse_operator(rng, 2, 4, degree=4, nnz=5, basis_tag="std:2")
    assert ops.truncate_degree(op, d).two_norm_sq() <= op.two_norm_sq() + 1e-15


@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 50))
@settings(max_examples=30, deadline=None)
def test_noise_composes(r1, r2, seed):
    rng = np.random.default_rng(seed)
    op = random_sparse_operator(rng, 2, 3, degree=3, nnz=4, basis_tag="std:2")
    a = ops.apply_noise(ops.apply_noise(op, r1), r2)
    b = ops.apply_noise(op, r1 * r2)
    for key in set(a.coeffs) | set(b.coeffs):
        assert a.coefficient(key) == pytest.approx(b.coefficient(key), abs=1e-12)


def test_serialization_roundtrip(pauli):
    rng = np.random.default_rng(41)
    op = random_sparse_operator(rng, 2, 4, degree=3, nnz=7, basis_tag=pauli.tag)
    back = ops.from_text(ops.to_text(op))
    assert back == op  # exact: repr round-trips doubles


def test_from_text_errors():
    with pytest.raises(InvalidInputError):
        ops.from_text("")
    with pytest.raises(InvalidInputError):
        ops.from_text("2 x std:2\n")
    with pytest.raises(InvalidInputError):
        ops.from_text("2 2 std:2\n0,0 ; 1.0\n")


def test_dense_budget_guard(pauli, monkeypatch):
    monkeypatch.setenv("NGA_DENSE_BUDGET", "4")
    op = ops.identity_operator(2, 3, pauli.tag)
    with pytest.raises(SizeLimitError):
        ops.synthesize(op, pauli)
    monkeypatch.delenv("NGA_DENSE_BUDGET")
    ops.synthesize(op, pauli)


def test_constructor_validation(pauli):
    with pytest.raises(InvalidInputError):
        ops.FourierOperator(2, 2, {(0, 4): 1.0}, pauli.tag)
    with pytest.raises(InvalidInputError):
        ops.FourierOperator(2, 2, {(0,): 1.0}, pauli.tag)
    with pytest.raises(InvalidInputError):
        ops.FourierOperator(2, 2, {(0, 0): float("nan")}, pauli.tag)
    with pytest.raises(InvalidDimensionError):
        ops.FourierOperator(1, 2, {}, pauli.tag)


def test_basis_mismatch(pauli, basis3):
    op = ops.identity_operator(3, 1, "std:3")
    with pytest.raises(Exception):
        ops.synthesize(op, pauli)
