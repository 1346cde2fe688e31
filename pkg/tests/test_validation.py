import numpy as np
import pytest

from conftest import random_sparse_operator
from noisygames import validation
from noisygames.errors import EnumerationLimitError, NormalizationError
from noisygames.operators import FourierOperator, identity_operator
from noisygames.selftest import random_operator_spec


def test_apply_gamma_identity():
    spec = validation.RandomOperatorSpec(
        m=2, h=1, n=2, terms={((0,), (1,)): 0.5, ((), (0,)): 0.25}
    )
    same = validation.apply_gamma(spec, 1.0)
    assert same.terms == spec.terms


def test_apply_gamma_single_term():
    spec = validation.RandomOperatorSpec(m=2, h=1, n=2, terms={((1,), (3,)): 1.0})
    out = validation.apply_gamma(spec, 0.5)
    assert out.terms[((1,), (3,))] == pytest.approx(0.25)  # gamma^(|S|+|sigma|) = gamma^2


def test_apply_gamma_zero():
    spec = validation.RandomOperatorSpec(
        m=2, h=1, n=2, terms={((0,), (1,)): 0.5, ((), (0,)): 0.25}
    )
    out = validation.apply_gamma(spec, 0.0)
    live = {k: v for k, v in out.terms.items() if v != 0.0}
    assert live == {((), (0,)): 0.25}


def test_hypercontractivity_single_basis_term(pauli):
    spec = validation.RandomOperatorSpec(m=2, h=1, n=1, terms={((), (1,)): 1.0})
    report = validation.check_hypercontractivity(spec, pauli)
    assert report.lhs == pytest.approx(1.0)  # Pauli eigenvalues +-1
    assert report.factor == pytest.approx(18.0)
    assert report.holds


def test_hypercontractivity_scalar_equality(pauli):
    spec = validation.RandomOperatorSpec(m=2, h=1, n=1, terms={((), (0,)): 0.7})
    report = validation.check_hypercontractivity(spec, pauli)
    # degree 0: lhs = c^4 equals rhs^2 exactly
    assert report.degree == 0
    assert report.lhs == pytest.approx(report.rhs**2, abs=1e-15)
    assert report.holds


def test_hypercontractivity_random_batch(pauli):
    rng = np.random.default_rng(9)
    for _ in range(150):
        spec = random_operator_spec(
            rng, 2, int(rng.integers(1, 3)), int(rng.integers(1, 9)),
            degree=int(rng.integers(1, 4)), nterms=int(rng.integers(1, 7)),
        )
        assert validation.check_hypercontractivity(spec, pauli).holds


def test_hypercontractivity_enumeration_limit(pauli):
    spec = validation.RandomOperatorSpec(m=2, h=1, n=13, terms={((), (0,)): 1.0})
    with pytest.raises(EnumerationLimitError):
        validation.check_hypercontractivity(spec, pauli)


def test_zeta_invariance_h_all(pauli):
    rng = np.random.default_rng(10)
    op = random_sparse_operator(rng, 2, 3, 2, 4, pauli.tag)
    if op.two_norm_sq() > 1:
        op = op.scaled(0.9 / op.two_norm_sq() ** 0.5)
    report = validation.check_zeta_invariance(op, (0, 1, 2), pauli)
    # both sides are the same quantity; only the eigensolver driver differs
    assert report.gap < 1e-14
    assert report.tau == 0.0


def test_zeta_invariance_identity(pauli):
    op = identity_operator(2, 3, pauli.tag)
    report = validation.check_zeta_invariance(op, (0,), pauli)
    assert report.matrix_side == 0.0
    assert report.ensemble_side == 0.0
    assert report.gap == 0.0


def test_zeta_invariance_random(pauli):
    rng = np.random.default_rng(11)
    for _ in range(15):
        D = int(rng.integers(2, 5))
        op = random_sparse_operator(rng, 2, D, 2, 5, pauli.tag)
        if op.two_norm_sq() > 1:
            op = op.scaled(0.9 / op.two_norm_sq() ** 0.5)
        H = (0,)
        report = validation.check_zeta_invariance(op, H, pauli)
        assert report.holds, (report.gap, report.paper_bound)
        assert report.paper_bound >= 0.0


def test_zeta_invariance_norm_precondition(pauli):
    op = FourierOperator(2, 2, {(1, 0): 1.5}, pauli.tag)
    with pytest.raises(NormalizationError):
        validation.check_zeta_invariance(op, (0,), pauli)


def test_derandomization_full_cover_gap_zero(pauli):
    # 4d-wise blocks with d = 1 are exactly uniform on <= 4 coordinates,
    # so an operator with <= 4 active sign coordinates has gap exactly 0
    op = FourierOperator(2, 2, {(3, 1): 0.5, (0, 2): 0.3, (0, 0): -0.4}, pauli.tag)
    report = validation.check_derandomization(op, (0,), 1, pauli, p=2)
    assert report.gap <= 1e-12
    assert report.holds


def test_derandomization_single_block_moment_matching(pauli):
    op = FourierOperator(2, 2, {(0, 1): 0.4, (0, 2): 0.3, (0, 0): -0.3}, pauli.tag)
    report = validation.check_derandomization(op, (0,), 1, pauli, p=2)
    assert report.gap <= 1e-12


def test_derandomization_random_instances(pauli):
    rng = np.random.default_rng(12)
    for _ in range(10):
        op = random_sparse_operator(rng, 2, 3, 1, 4, pauli.tag)
        if op.two_norm_sq() > 1:
            op = op.scaled(0.9 / op.two_norm_sq() ** 0.5)
        report = validation.check_derandomization(op, (0,), 1, pauli, p=2)
        assert report.holds, report.gap
        assert report.seeds_total > 0


def test_derandomization_reports_seeds(pauli):
    op = FourierOperator(2, 2, {(3, 1): 0.5, (0, 0): -0.2}, pauli.tag)
    report = validation.check_derandomization(op, (0,), 1, pauli, p=2)
    d = report.to_dict()
    assert d["p"] == 2 and d["seeds_total"] > 0
