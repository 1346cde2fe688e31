"""Sparse Fourier representation of Hermitian operators on D qudits.

An operator P on (C^m)^(x D) is stored as a map from multi-indices
sigma in [m^2]^D to real coefficients, relative to a standard
orthonormal basis: P = sum_sigma P_hat(sigma) * B_{sigma_1} (x) ... (x)
B_{sigma_D}.  The weight |sigma| is the number of nonzero entries and
the degree of P is the largest weight present.
"""

from functools import reduce
import math

import numpy as np

from . import dense
from .errors import (
    BasisMismatchError,
    InvalidDimensionError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
)

# above this many stored coefficients, dense tensor contraction beats
# per-key Kronecker products
_KRON_NNZ_CUTOFF = 64
_TENSOR_ENTRY_CAP = 1 << 20


def weight(sigma):
    """|sigma|: number of nonzero entries of a multi-index."""
    return sum(1 for s in sigma if s != 0)


class FourierOperator:
    """Hermitian operator given by its sparse Fourier coefficient map."""

    __slots__ = ("m", "registers", "coeffs", "basis_tag")

    def __init__(self, m, registers, coeffs, basis_tag):
        if m < 2:
            raise InvalidDimensionError(f"qudit dimension must be >= 2, got {m}")
        if registers < 1:
            raise InvalidDimensionError(f"register count must be >= 1, got {registers}")
        self.m = int(m)
        self.registers = int(registers)
        self.basis_tag = basis_tag
        clean = {}
        limit = m * m
        for key, value in coeffs.items():
            key = tuple(int(s) for s in key)
            if len(key) != registers:
                raise InvalidInputError(f"multi-index {key} has length != {registers}")
            if any(s < 0 or s >= limit for s in key):
                raise InvalidInputError(f"multi-index {key} has entries outside [0, {limit - 1}]")
            value = float(value)
            if not math.isfinite(value):
                raise InvalidInputError(f"non-finite coefficient at {key}")
            if value != 0.0:
                clean[key] = value
        self.coeffs = clean

    def items(self):
        """Coefficient pairs in lexicographic multi-index order."""
        return sorted(self.coeffs.items())

    def coefficient(self, sigma):
        return self.coeffs.get(tuple(sigma), 0.0)

    def degree(self):
        return max((weight(k) for k in self.coeffs), default=0)

    def two_norm_sq(self):
        """Parseval: squared normalized 2-norm = sum of squared coefficients."""
        return math.fsum(c * c for c in self.coeffs.values())

    def support(self):
        """Registers touched by at least one nonzero coefficient."""
        hit = set()
        for key in self.coeffs:
            hit.update(i for i, s in enumerate(key) if s != 0)
        return hit

    def scaled(self, factor):
        return FourierOperator(
            self.m,
            self.registers,
            {k: factor * v for k, v in self.coeffs.items()},
            self.basis_tag,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FourierOperator)
            and self.m == other.m
            and self.registers == other.registers
            and self.basis_tag == other.basis_tag
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return (
            f"FourierOperator(m={self.m}, registers={self.registers}, "
            f"nnz={len(self.coeffs)}, basis_tag={self.basis_tag!r})"
        )


def identity_operator(m, registers, basis_tag="std"):
    return FourierOperator(m, registers, {(0,) * registers: 1.0}, basis_tag)


def add(ops):
    """Coefficient-wise sum of operators sharing shape and basis."""
    ops = list(ops)
    first = ops[0]
    for op in ops[1:]:
        if (op.m, op.registers) != (first.m, first.registers):
            raise InvalidInputError("operator shapes differ")
        if op.basis_tag != first.basis_tag:
            raise BasisMismatchError(f"basis tags differ: {op.basis_tag} vs {first.basis_tag}")
    total = {}
    for op in ops:
        for key, value in op.coeffs.items():
            total[key] = total.get(key, 0.0) + value
    return FourierOperator(first.m, first.registers, total, first.basis_tag)


def _check_basis(op, basis):
    if basis.m != op.m:
        raise BasisMismatchError(f"basis is for m={basis.m}, operator has m={op.m}")
    if basis.tag != op.basis_tag:
        raise BasisMismatchError(f"operator basis {op.basis_tag!r} != supplied {basis.tag!r}")


def synthesize(op, basis):
    """Dense matrix sum_sigma coeff(sigma) * (x)_k B_{sigma_k}."""
    _check_basis(op, basis)
    m, D = op.m, op.registers
    dim = m**D
    dense.check_dense_dim(dim)
    nnz = len(op.coeffs)
    if nnz > _KRON_NNZ_CUTOFF and (m * m) ** D <= _TENSOR_ENTRY_CAP:
        tensor = np.zeros(((m * m),) * D)
        for key, value in op.coeffs.items():
            tensor[key] = value
        return _tensor_to_matrix(tensor, basis.elements, m, D)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for key, value in op.items():
        factors = [basis.elements[s] for s in key]
        out += value * reduce(np.kron, factors)
    return out


def _tensor_to_matrix(tensor, elements, m, D):
    t = tensor
    for _ in range(D):
        # consume leading sigma axis, append (row, col) axes for that register
        t = np.tensordot(t, elements, axes=([0], [0]))
    perm = [2 * k for k in range(D)] + [2 * k + 1 for k in range(D)]
    return np.ascontiguousarray(t.transpose(perm)).reshape(m**D, m**D)


def analyze(M, m, D, basis, drop_tol=0.0):
    """Fourier coefficients coeff(sigma) = m^-D * Tr(B_sigma M) of a dense M.

    synthesize(analyze(M)) reproduces Hermitian M within 1e-10.  Entries
    with |coefficient| <= drop_tol are omitted from the sparse map.
    """
    if basis.m != m:
        raise BasisMismatchError(f"basis is for m={basis.m}, requested m={m}")
    dim = m**D
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (dim, dim):
        raise InvalidDimensionError(f"matrix shape {M.shape} != ({dim}, {dim})")
    t = M.reshape((m,) * (2 * D))
    order = []
    for k in range(D):
        order.extend((k, D + k))  # (row_k, col_k) interleaved
    t = t.transpose(order)
    for _ in range(D):
        t = np.tensordot(basis.elements, t, axes=([2, 1], [0, 1]))
        t = np.moveaxis(t, 0, -1)
    t = t.real / dim
    coeffs = {}
    flat = t.reshape(-1)
    for pos in np.nonzero(np.abs(flat) > drop_tol)[0]:
        key = np.unravel_index(pos, ((m * m),) * D)
        coeffs[tuple(int(s) for s in key)] = float(flat[pos])
    return FourierOperator(m, D, coeffs, basis.tag)


def influence(op, i):
    """Influence of register i (0-based): squared weight on terms with sigma_i != 0."""
    if not 0 <= i < op.registers:
        raise InvalidIndexError(f"register {i} out of range for D={op.registers}")
    return math.fsum(v * v for k, v in op.coeffs.items() if k[i] != 0)


def total_influence(op):
    """sum_sigma |sigma| coeff(sigma)^2 = sum of per-register influences."""
    return math.fsum(weight(k) * v * v for k, v in op.coeffs.items())


def apply_noise(op, rho):
    """Depolarizing noise: multiply each coefficient by rho^|sigma|."""
    if not 0.0 <= rho <= 1.0:
        raise InvalidParameterError(f"noise rate must lie in [0, 1], got {rho}")
    coeffs = {k: v * rho ** weight(k) for k, v in op.coeffs.items()}
    return FourierOperator(op.m, op.registers, coeffs, op.basis_tag)


def truncate_degree(op, d):
    """Drop all terms of weight exceeding d."""
    if d < 0:
        raise InvalidParameterError(f"degree bound must be >= 0, got {d}")
    coeffs = {k: v for k, v in op.coeffs.items() if weight(k) <= d}
    return FourierOperator(op.m, op.registers, coeffs, op.basis_tag)


def restrict_to(op, kept):
    """Project keys onto the registers in `kept` (must carry all support)."""
    kept = sorted(kept)
    missing = op.support().difference(kept)
    if missing:
        raise InvalidInputError(f"support registers {sorted(missing)} not in kept set")
    coeffs = {}
    for key, value in op.coeffs.items():
        short = tuple(key[i] for i in kept)
        coeffs[short] = coeffs.get(short, 0.0) + value
    return FourierOperator(op.m, max(len(kept), 1), coeffs, op.basis_tag) if kept else None


def to_text(op):
    """Serialize: header "m D basis_tag", then one "digits : value" line per term."""
    lines = [f"{op.m} {op.registers} {op.basis_tag}"]
    for key, value in op.items():
        lines.append(f"{','.join(str(s) for s in key)} : {value!r}")
    return "\n".join(lines) + "\n"


def from_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError("empty operator file")
    header = lines[0].split()
    if len(header) != 3:
        raise InvalidInputError(f"bad operator header {lines[0]!r}, want 'm D basis_tag'")
    try:
        m, D = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InvalidInputError(f"bad operator header {lines[0]!r}") from exc
    coeffs = {}
    for ln in lines[1:]:
        try:
            key_part, value_part = ln.split(":")
            key = tuple(int(s) for s in key_part.strip().split(","))
            coeffs[key] = coeffs.get(key, 0.0) + float(value_part)
        except ValueError as exc:
            raise InvalidInputError(f"bad coefficient record {ln!r}") from exc
    return FourierOperator(m, D, coeffs, header[2])
