import numpy as np
import pytest

from noisygames import _kernels
from noisygames._kernels import pyref

try:
    from noisygames._kernels import _zeta_cy
except ImportError:
    _zeta_cy = None

needs_ext = pytest.mark.skipif(_zeta_cy is None, reason="compiled kernel not built")


def _workload(seed, R=6, dim=4, P=40, n=5):
    rng = np.random.default_rng(seed)
    kb = rng.standard_normal((R, dim, dim)) + 1j * rng.standard_normal((R, dim, dim))
    kb = (kb + kb.conj().transpose(0, 2, 1)) / 2
    coeff = rng.standard_normal(R)
    lens = rng.integers(0, 4, R)
    ptr = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    idx = rng.integers(0, n, int(ptr[-1])).astype(np.int64)
    pats = rng.choice([-1, 1], size=(P, n)).astype(np.int8)
    w = rng.random(P)
    w /= w.sum()
    return kb, coeff, ptr, idx, pats, w


def _direct(kb, coeff, ptr, idx, pats, w):
    total = 0.0
    for p in range(pats.shape[0]):
        M = np.zeros(kb.shape[1:], dtype=complex)
        for r in range(coeff.shape[0]):
            s = coeff[r]
            for t in range(ptr[r], ptr[r + 1]):
                s *= pats[p, idx[t]]
            M += s * kb[r]
        eigs = np.linalg.eigvalsh(M)
        total += w[p] * float(np.sum(np.minimum(eigs, 0.0) ** 2))
    return total


def test_pyref_matches_direct():
    args = _workload(1)
    assert pyref.mean_zeta(*args) == pytest.approx(_direct(*args), abs=1e-12)


@needs_ext
@pytest.mark.parametrize("seed", [2, 3, 4])
def test_backends_agree(seed):
    args = _workload(seed)
    assert _zeta_cy.mean_zeta(*args) == pytest.approx(pyref.mean_zeta(*args), abs=1e-12)


@needs_ext
def test_backends_agree_no_signs():
    kb, coeff, ptr, idx, pats, w = _workload(5)
    ptr = np.zeros_like(ptr)  # every record sign-free
    idx = idx[:0]
    a = _zeta_cy.mean_zeta(kb, coeff, ptr, idx, pats, w)
    b = pyref.mean_zeta(kb, coeff, ptr, idx, pats, w)
    assert a == pytest.approx(b, abs=1e-12)


@needs_ext
def test_backends_agree_empty_coordinates():
    kb, coeff, ptr, idx, _, _ = _workload(6)
    pats = np.empty((3, 0), dtype=np.int8)
    ptr = np.zeros_like(ptr)
    idx = idx[:0]
    w = np.full(3, 1 / 3)
    a = _zeta_cy.mean_zeta(kb, coeff, ptr, idx, pats, w)
    b = pyref.mean_zeta(kb, coeff, ptr, idx, pats, w)
    assert a == pytest.approx(b, abs=1e-12)


def test_selected_backend_exposed():
    assert _kernels.BACKEND in ("cython", "python")
    if _zeta_cy is not None:
        import os

        if os.environ.get("NGA_KERNEL", "").lower() != "python":
            assert _kernels.BACKEND == "cython"


def test_weight_scaling():
    kb, coeff, ptr, idx, pats, w = _workload(7)
    one = _kernels.mean_zeta(kb, coeff, ptr, idx, pats, w)
    two = _kernels.mean_zeta(kb, coeff, ptr, idx, pats, 2.0 * w)
    assert two == pytest.approx(2.0 * one, abs=1e-12)
