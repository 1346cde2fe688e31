# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: weighted mean of Tr zeta over substituted operators.

Same contract as pyref.mean_zeta; per pattern it accumulates the small
Hermitian matrix in a preallocated buffer and calls LAPACK zheev for the
eigenvalues, so the whole seed loop runs without touching Python.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()


cdef inline double _zeta_dim2(double complex * a) noexcept:
    # analytic eigenvalues of a 2x2 Hermitian matrix
    cdef double mean = 0.5 * (a[0].real + a[3].real)
    cdef double gap = 0.5 * (a[0].real - a[3].real)
    cdef double off = a[1].real * a[1].real + a[1].imag * a[1].imag
    cdef double radius = sqrt(gap * gap + off)
    cdef double lo = mean - radius
    cdef double hi = mean + radius
    cdef double out = 0.0
    if lo < 0.0:
        out += lo * lo
    if hi < 0.0:
        out += hi * hi
    return out


def mean_zeta(kb, coeff, sign_ptr, sign_idx, patterns, weights):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] kb_c = \
        np.ascontiguousarray(kb, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] coeff_c = \
        np.ascontiguousarray(coeff, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] ptr_c = \
        np.ascontiguousarray(sign_ptr, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] idx_c = \
        np.ascontiguousarray(sign_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=2, mode="c"] pat_c = \
        np.ascontiguousarray(patterns, dtype=np.int8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] w_c = \
        np.ascontiguousarray(weights, dtype=np.float64)

    cdef Py_ssize_t n_pat = pat_c.shape[0]
    cdef Py_ssize_t n_coord = pat_c.shape[1]
    cdef Py_ssize_t nr = coeff_c.shape[0]
    cdef int dim = <int> kb_c.shape[1]
    if w_c.shape[0] != n_pat:
        raise ValueError("weights length != number of patterns")
    if kb_c.shape[0] != nr:
        raise ValueError("kb block count != coefficient count")

    cdef int lwork = 2 * dim + 1 if dim > 0 else 1
    cdef double complex * a = <double complex *> malloc(dim * dim * sizeof(double complex))
    cdef double * eig = <double *> malloc(dim * sizeof(double))
    cdef double complex * work = <double complex *> malloc(lwork * sizeof(double complex))
    cdef double * rwork = <double *> malloc((3 * dim + 1) * sizeof(double))
    if a == NULL or eig == NULL or work == NULL or rwork == NULL:
        free(a); free(eig); free(work); free(rwork)
        raise MemoryError()

    cdef double total = 0.0, comp = 0.0  # Neumaier compensated sum
    cdef double term, t_new, s, ev
    cdef double complex scale
    cdef double complex * kb_flat = <double complex *> kb_c.data
    cdef Py_ssize_t p, r, t, q
    cdef int info = 0, n_lap = dim
    cdef char jobz = b'N', uplo = b'L'
    try:
        for p in range(n_pat):
            for q in range(dim * dim):
                a[q] = 0
            for r in range(nr):
                s = coeff_c[r]
                for t in range(ptr_c[r], ptr_c[r + 1]):
                    s *= pat_c[p, idx_c[t]]
                if s != 0.0:
                    scale = s
                    for q in range(dim * dim):
                        a[q] = a[q] + scale * kb_flat[r * dim * dim + q]
            if dim == 1:
                term = a[0].real * a[0].real if a[0].real < 0.0 else 0.0
            elif dim == 2:
                term = _zeta_dim2(a)
            else:
                zheev(&jobz, &uplo, &n_lap, a, &n_lap, eig, work, &lwork, rwork, &info)
                if info != 0:
                    raise RuntimeError(f"zheev failed with info={info}")
                term = 0.0
                for q in range(dim):
                    ev = eig[q]
                    if ev < 0.0:
                        term += ev * ev
            term *= w_c[p]
            t_new = total + term
            if fabs(total) >= fabs(term):
                comp += (total - t_new) + term
            else:
                comp += (term - t_new) + total
            total = t_new
        return total + comp
    finally:
        free(a); free(eig); free(work); free(rwork)
