"""Standard orthonormal Hermitian bases of m x m matrix space.

A standard orthonormal basis is a family of m^2 Hermitian matrices
B_0, ..., B_{m^2-1} with B_0 the identity, orthonormal under the
normalized trace inner product <P, Q> = Tr(P^dag Q) / m.  For m = 2 this
is the Pauli basis {I, X, Y, Z}; for general m the identity plus the
generalized Gell-Mann matrices rescaled so that Tr(B_i^2) / m = 1.
"""

from dataclasses import dataclass, field
import hashlib
import math

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError

HERMITICITY_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-12


@dataclass(frozen=True)
class StandardBasis:
    """An orthonormal Hermitian basis with the identity in slot 0.

    Attributes:
        m: local dimension.
        elements: complex array of shape (m^2, m, m).
        tag: stable identifier; two bases with equal tags are equal.
    """

    m: int
    elements: np.ndarray = field(repr=False)
    tag: str

    def __post_init__(self):
        validate_standard_basis(self.m, self.elements)
        self.elements.setflags(write=False)

    def __len__(self):
        return self.m * self.m


def validate_standard_basis(m, elements):
    """Raise InvalidInputError unless `elements` is a standard basis for H_m."""
    elements = np.asarray(elements)
    if elements.shape != (m * m, m, m):
        raise InvalidInputError(
            f"expected {m * m} matrices of shape {m}x{m}, got {elements.shape}"
        )
    if not np.allclose(elements[0], np.eye(m), atol=HERMITICITY_TOL):
        raise InvalidInputError("element 0 must be the identity")
    herm_err = np.abs(elements - elements.conj().transpose(0, 2, 1)).max()
    if herm_err > HERMITICITY_TOL:
        raise InvalidInputError(f"basis elements not Hermitian (max dev {herm_err:.2e})")
    gram = np.einsum("aij,bji->ab", elements, elements).real / m
    gram_err = np.abs(gram - np.eye(m * m)).max()
    if gram_err > ORTHONORMALITY_TOL:
        raise InvalidInputError(f"basis not orthonormal (max dev {gram_err:.2e})")


def basis_digest(elements):
    """Short content digest used to build tags for derived bases."""
    rounded = np.round(np.asarray(elements, dtype=np.complex128), 12) + 0.0
    return hashlib.sha256(rounded.tobytes()).hexdigest()[:12]


def build_standard_basis(m):
    """Construct the canonical standard orthonormal basis for H_m.

    Ordering: identity, then the symmetric pair matrices (j < k,
    lexicographic), then the antisymmetric pair matrices (same order),
    then the diagonal matrices.  Each element is scaled so that
    Tr(B^2) / m = 1.  For m = 2 this yields exactly (I, X, Y, Z).
    """
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise InvalidDimensionError(f"qudit dimension must be an integer >= 2, got {m!r}")
    m = int(m)
    scale = math.sqrt(m / 2.0)
    elems = [np.eye(m, dtype=np.complex128)]
    for j in range(m):
        for k in range(j + 1, m):
            sym = np.zeros((m, m), dtype=np.complex128)
            sym[j, k] = sym[k, j] = scale
            elems.append(sym)
    for j in range(m):
        for k in range(j + 1, m):
            anti = np.zeros((m, m), dtype=np.complex128)
            anti[j, k] = -1j * scale
            anti[k, j] = 1j * scale
            elems.append(anti)
    for l in range(1, m):
        diag = np.zeros(m, dtype=np.complex128)
        diag[:l] = 1.0
        diag[l] = -l
        diag *= scale * math.sqrt(2.0 / (l * (l + 1)))
        elems.append(np.diag(diag))
    return StandardBasis(m=m, elements=np.stack(elems), tag=f"std:{m}")


def rotated_basis(base, orthogonal, tag):
    """Rotate the traceless part of `base` by an orthogonal matrix.

    New element i (i >= 1) is sum_k orthogonal[k-1, i-1] * base[k]; the
    identity stays in slot 0.  Any real orthogonal rotation of a standard
    basis is again a standard basis.
    """
    o = np.asarray(orthogonal, dtype=float)
    n = base.m * base.m - 1
    if o.shape != (n, n):
        raise InvalidInputError(f"rotation must be {n}x{n}, got {o.shape}")
    traceless = np.tensordot(o.T, base.elements[1:], axes=(1, 0))
    elements = np.concatenate([base.elements[:1], traceless])
    return StandardBasis(m=base.m, elements=elements, tag=tag)
