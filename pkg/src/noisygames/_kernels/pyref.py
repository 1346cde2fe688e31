"""Pure-Python/numpy reference implementation of the hot kernel.

The compiled extension (_zeta_cy) implements the same contract; this
module is the fallback selected at import when the extension is missing
or when NGA_KERNEL=python is set.
"""

import numpy as np

_CHUNK = 512


def mean_zeta(kb, coeff, sign_ptr, sign_idx, patterns, weights):
    """Weighted mean of Tr zeta over substituted operators.

    For each pattern row x (entries +-1):

        M(x) = sum_r coeff[r] * prod_{t in sign_idx[sign_ptr[r]:sign_ptr[r+1]]} x[t] * kb[r]

    and the result is sum_p weights[p] * Tr zeta(M(x_p)), with
    Tr zeta(M) the sum of squared negative eigenvalues.

    kb: (R, dim, dim) complex Hermitian basis blocks.
    coeff: (R,) float.
    sign_ptr/sign_idx: CSR-style layout of the sign coordinates per block.
    patterns: (P, n_active) int8 matrix of +-1.
    weights: (P,) float.
    """
    kb = np.asarray(kb, dtype=np.complex128)
    coeff = np.asarray(coeff, dtype=np.float64)
    sign_ptr = np.asarray(sign_ptr, dtype=np.int64)
    sign_idx = np.asarray(sign_idx, dtype=np.int64)
    patterns = np.asarray(patterns, dtype=np.int8)
    weights = np.asarray(weights, dtype=np.float64)
    n_pat = patterns.shape[0]
    total = 0.0
    for start in range(0, n_pat, _CHUNK):
        stop = min(start + _CHUNK, n_pat)
        chunk = patterns[start:stop].astype(np.float64)
        prods = np.empty((stop - start, coeff.shape[0]))
        for r in range(coeff.shape[0]):
            idx = sign_idx[sign_ptr[r] : sign_ptr[r + 1]]
            if idx.size:
                prods[:, r] = coeff[r] * chunk[:, idx].prod(axis=1)
            else:
                prods[:, r] = coeff[r]
        mats = np.einsum("pr,rij->pij", prods, kb)
        eigs = np.linalg.eigvalsh(mats)
        neg = np.minimum(eigs, 0.0)
        total += float(np.dot(weights[start:stop], np.einsum("pi,pi->p", neg, neg)))
    return total
