"""Dense-matrix oracles: eigenvalue clamps, zeta distance, Schatten norms.

Everything here works on explicit numpy arrays and is intended for
desk-scale validation; sizes are guarded by a configurable budget on the
synthesized dimension (default m^D <= 4096, override with the
NGA_DENSE_BUDGET environment variable).
"""

import os

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, SizeLimitError

DEFAULT_DENSE_BUDGET = 4096
HERMITICITY_TOL = 1e-10


def dense_budget():
    """Current dense-dimension budget (entries of one axis, not bytes)."""
    value = os.environ.get("NGA_DENSE_BUDGET")
    if value is None:
        return DEFAULT_DENSE_BUDGET
    try:
        budget = int(value)
    except ValueError as exc:
        raise InvalidParameterError(f"NGA_DENSE_BUDGET must be an integer, got {value!r}") from exc
    if budget < 1:
        raise InvalidParameterError("NGA_DENSE_BUDGET must be positive")
    return budget


def check_dense_dim(dim, what="dense synthesis"):
    budget = dense_budget()
    if dim > budget:
        raise SizeLimitError(f"{what} needs dimension {dim} > budget {budget}")
    return dim


def ensure_hermitian(M, tol=HERMITICITY_TOL, what="matrix"):
    """Return M as a complex array, raising if it is not square Hermitian."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{what} must be square, got shape {M.shape}")
    dev = np.abs(M - M.conj().T).max() if M.size else 0.0
    if dev > tol:
        raise InvalidInputError(f"{what} not Hermitian within {tol:g} (max dev {dev:.3e})")
    return M


def zeta_trace(M, tol=HERMITICITY_TOL):
    """Tr zeta(M) = sum of squared negative eigenvalues of Hermitian M.

    Equals the squared (un-normalized) Frobenius distance from M to the
    nearest positive semidefinite matrix.
    """
    M = ensure_hermitian(M, tol)
    eigs = np.linalg.eigvalsh(M)
    neg = np.minimum(eigs, 0.0)
    return float(np.dot(neg, neg))


def positive_part(M, tol=HERMITICITY_TOL):
    """Clamp the eigenvalues of Hermitian M at zero, keeping eigenvectors."""
    M = ensure_hermitian(M, tol)
    eigs, vecs = np.linalg.eigh(M)
    clipped = np.maximum(eigs, 0.0)
    out = (vecs * clipped) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


def normalized_p_norm(M, p):
    """Normalized Schatten p-norm ((1/m) sum_i s_i^p)^(1/p) via singular values."""
    if p < 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    M = np.asarray(M, dtype=np.complex128)
    s = np.linalg.svd(M, compute_uv=False)
    m = M.shape[0]
    if np.isinf(p):
        return float(s[0]) if s.size else 0.0
    return float((np.sum(s**p) / m) ** (1.0 / p))


def inv_sqrt_psd(M, floor=1e-12):
    """Inverse square root of a PSD matrix, flooring eigenvalues at `floor`."""
    M = ensure_hermitian(M)
    eigs, vecs = np.linalg.eigh(M)
    inv = 1.0 / np.sqrt(np.maximum(eigs, floor))
    out = (vecs * inv) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


def interleaved_state_power(state, m, copies):
    """psi^(x copies) reordered so all A registers precede all B registers.

    `state` is an (m^2, m^2) density matrix on A (x) B.  The returned matrix
    acts on A^copies (x) B^copies and is what (P (x) Q) contracts against,
    for P on A^copies and Q on B^copies.
    """
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (m * m, m * m):
        raise InvalidInputError(f"state must be {m * m}x{m * m}, got {state.shape}")
    dim = m ** (2 * copies)
    check_dense_dim(dim, "state tensor power")
    tensor = state.reshape(m, m, m, m)  # (a, b, a', b')
    full = tensor
    for _ in range(copies - 1):
        full = np.tensordot(full, tensor, axes=0)
    # axes are now (a1,b1,a1',b1', a2,b2,a2',b2', ...); bring to
    # (a1..aD, b1..bD, a1'..aD', b1'..bD')
    perm = []
    for offset in (0, 1, 2, 3):
        perm.extend(4 * i + offset for i in range(copies))
    full = full.transpose(perm)
    return full.reshape(dim, dim)


def pair_state_expectation(P, Q, state, m, copies):
    """Tr((P (x) Q) psi^(x copies)) for dense P, Q on m^copies dimensions."""
    psi = interleaved_state_power(state, m, copies)
    return float(np.trace(np.kron(P, Q) @ psi).real)
