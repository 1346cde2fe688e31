import numpy as np
import pytest

from noisygames import dense
from noisygames.basis import build_standard_basis


@pytest.fixture(scope="session")
def pauli():
    return build_standard_basis(2)


@pytest.fixture(scope="session")
def basis3():
    return build_standard_basis(3)


def random_hermitian(rng, dim):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (M + M.conj().T) / 2


def random_povm(rng, dim, t):
    """t random PSD matrices renormalized to sum to the identity."""
    mats = []
    for _ in range(t):
        A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        mats.append(A @ A.conj().T + 1e-3 * np.eye(dim))
    s_isqrt = dense.inv_sqrt_psd(sum(mats))
    return [s_isqrt @ M @ s_isqrt for M in mats]


def random_sparse_operator(rng, m, D, degree, nnz, basis_tag, scale=1.0):
    from noisygames.operators import FourierOperator

    coeffs = {}
    for _ in range(nnz):
        wt = int(rng.integers(0, degree + 1))
        key = [0] * D
        if wt:
            for pos in rng.choice(D, size=min(wt, D), replace=False):
                key[pos] = int(rng.integers(1, m * m))
        coeffs[tuple(key)] = coeffs.get(tuple(key), 0.0) + float(rng.normal()) * scale
    if not coeffs:
        coeffs[(0,) * D] = 1.0
    return FourierOperator(m, D, coeffs, basis_tag)


def dense_depolarize(M, m, D, rho):
    """Independent oracle for the noise operator: apply the per-register
    channel rho P + (1 - rho)/m Tr_i P (x) I_i to every register."""
    t = np.asarray(M).reshape((m,) * (2 * D))
    for i in range(D):
        marg = np.trace(t, axis1=i, axis2=D + i)
        lifted = np.tensordot(np.eye(m), marg, axes=0)
        rest_row = [2 + k for k in range(D - 1)]
        rest_col = [2 + (D - 1) + k for k in range(D - 1)]
        row_axes = rest_row[:i] + [0] + rest_row[i:]
        col_axes = rest_col[:i] + [1] + rest_col[i:]
        lifted = lifted.transpose(row_axes + col_axes)
        t = rho * t + (1.0 - rho) / m * lifted
    return t.reshape(m**D, m**D)
