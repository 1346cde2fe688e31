"""Noisy maximally entangled states and their correlation spectrum.

A noisy MES is a bipartite state with both marginals maximally mixed and
maximal correlation strictly below 1.  For any such state there is a
pair of standard orthonormal bases (A_i), (B_j) aligned so that
Tr((A_i (x) B_j) psi) = delta_ij c_i with c_0 = 1 >= c_1 >= ... >= 0;
c_1 is the maximal correlation.  Alignment is computed by a singular
value decomposition of the traceless correlation matrix.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import basis as basis_mod
from . import dense
from .errors import InvalidInputError, InvalidParameterError, InvalidStateError, NotNoisyError
from .operators import FourierOperator

MARGINAL_TOL = 1e-9
ALIGNMENT_TOL = 1e-9
NOT_NOISY_TOL = 1e-9


@dataclass(frozen=True)
class NoisyMES:
    """A noisy MES with its aligned bases and correlation spectrum c."""

    m: int
    state: np.ndarray = field(repr=False)
    c: np.ndarray
    basisA: basis_mod.StandardBasis
    basisB: basis_mod.StandardBasis

    @property
    def rho(self):
        """Maximal correlation c_1."""
        return float(self.c[1])


def maximally_entangled_state(m):
    """Projector onto (1/sqrt(m)) sum_i |ii>."""
    vec = np.zeros(m * m, dtype=np.complex128)
    vec[:: m + 1] = 1.0 / math.sqrt(m)
    return np.outer(vec, vec.conj())


def depolarized_mes(m, eps):
    """(1 - eps) |MES><MES| + eps * I/m (x) I/m, aligned.

    The maximal correlation of this state is exactly 1 - eps, so eps = 0
    is rejected (the state would not be noisy).
    """
    if m < 2:
        raise InvalidParameterError(f"local dimension must be >= 2, got {m}")
    if not 0.0 < eps <= 1.0:
        if eps == 0:
            raise NotNoisyError("eps = 0 gives maximal correlation 1; not a noisy MES")
        raise InvalidParameterError(f"eps must lie in (0, 1], got {eps}")
    state = (1.0 - eps) * maximally_entangled_state(m) + eps * np.eye(m * m) / (m * m)
    mes = align_bases(state, m)
    if abs(mes.rho - (1.0 - eps)) > ALIGNMENT_TOL:
        raise InvalidStateError(
            f"depolarized state aligned with c_1 = {mes.rho}, expected {1.0 - eps}"
        )
    return mes


def _check_marginals(state, m):
    state = dense.ensure_hermitian(state, 1e-10, "state")
    if state.shape != (m * m, m * m):
        raise InvalidInputError(f"state must be {m * m}x{m * m}, got {state.shape}")
    eigs = np.linalg.eigvalsh(state)
    if eigs.min() < -1e-10:
        raise InvalidStateError(f"state not PSD (min eigenvalue {eigs.min():.3e})")
    if abs(np.trace(state).real - 1.0) > 1e-10:
        raise InvalidStateError(f"state trace {np.trace(state).real} != 1")
    t = state.reshape(m, m, m, m)
    margA = np.einsum("ibjb->ij", t)
    margB = np.einsum("aiaj->ij", t)
    target = np.eye(m) / m
    devA = np.abs(margA - target).max()
    devB = np.abs(margB - target).max()
    if max(devA, devB) > MARGINAL_TOL:
        raise InvalidStateError(
            f"marginals not maximally mixed (deviations {devA:.3e}, {devB:.3e})"
        )
    return state


def align_bases(state, m):
    """Rotate a reference basis pair so the correlation matrix is diagonal.

    Computes M_ij = Tr((B_i (x) B_j) state) over the traceless reference
    elements, takes M = U diag(c) V^T, and absorbs U and V into the two
    bases.  Singular values come back sorted nonincreasing, which gives
    the spectrum c_1 >= c_2 >= ... >= 0; c_0 = 1 is the trace term.
    """
    state = _check_marginals(state, m)
    ref = basis_mod.build_standard_basis(m)
    # corr[i, j] = Tr((B_i (x) B_j) state) over traceless elements (i, j >= 1):
    # Tr(kron(A, B) psi) = sum A[a1,a2] B[b1,b2] psi4[a2,b2,a1,b1]
    state4 = state.reshape(m, m, m, m)
    corr = np.einsum("iab,jcd,bdac->ij", ref.elements[1:], ref.elements[1:], state4).real
    u, s, vt = np.linalg.svd(corr)
    if s[0] >= 1.0 - NOT_NOISY_TOL:
        raise NotNoisyError(f"maximal correlation {s[0]} is not below 1")
    digest = basis_mod.basis_digest(state)
    basisA = basis_mod.rotated_basis(ref, u, tag=f"alignedA:{m}:{digest}")
    basisB = basis_mod.rotated_basis(ref, vt.T, tag=f"alignedB:{m}:{digest}")
    c = np.concatenate([[1.0], s])
    mes = NoisyMES(m=m, state=state, c=c, basisA=basisA, basisB=basisB)
    residual = alignment_residual(mes)
    if residual > ALIGNMENT_TOL:
        raise InvalidStateError(f"alignment residual {residual:.3e} exceeds tolerance")
    return mes


def alignment_residual(mes):
    """max_ij |Tr((A_i (x) B_j) state) - delta_ij c_i|, recomputed from scratch."""
    m = mes.m
    state4 = mes.state.reshape(m, m, m, m)
    table = np.einsum(
        "iab,jcd,bdac->ij", mes.basisA.elements, mes.basisB.elements, state4
    ).real
    return float(np.abs(table - np.diag(mes.c)).max())


def correlation_weight(mes, sigma):
    """c_sigma = prod_k c_{sigma_k}."""
    out = 1.0
    for s in sigma:
        out *= mes.c[s]
    return float(out)


def pair_expectation(P, Q, mes):
    """Tr((P (x) Q) psi^(x D)) = sum_sigma P_hat(sigma) Q_hat(sigma) c_sigma.

    P must be expressed in mes.basisA and Q in mes.basisB, on the same
    number of registers.
    """
    if not isinstance(P, FourierOperator) or not isinstance(Q, FourierOperator):
        raise InvalidInputError("pair_expectation expects FourierOperator inputs")
    if P.m != mes.m or Q.m != mes.m or P.registers != Q.registers:
        raise InvalidInputError(
            f"shape mismatch: P is (m={P.m}, D={P.registers}), "
            f"Q is (m={Q.m}, D={Q.registers}), mes has m={mes.m}"
        )
    if P.basis_tag != mes.basisA.tag:
        raise InvalidInputError(f"P basis {P.basis_tag!r} is not the aligned A basis")
    if Q.basis_tag != mes.basisB.tag:
        raise InvalidInputError(f"Q basis {Q.basis_tag!r} is not the aligned B basis")
    terms = []
    qc = Q.coeffs
    for key, pv in P.items():
        qv = qc.get(key)
        if qv is not None:
            terms.append(pv * qv * correlation_weight(mes, key))
    return math.fsum(terms)
