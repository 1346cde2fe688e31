"""Verification toolkit for nonlocal games with noisy maximally entangled states.

Submodules:
    basis        standard orthonormal Hermitian bases
    operators    sparse Fourier operators on qudit registers
    dense        dense eigenvalue oracles (zeta distance, PSD projection)
    correlation  noisy MES states, aligned bases, correlation spectrum
    prg          k-wise uniform hash families and the sign combiner
    tester       deterministic positivity tester
    games        game/certificate types, NP-style verifier
    prover       honest-prover pipeline (smoothing, truncation, rounding)
    validation   executable checks of the underlying inequalities
    cli          command-line interface
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
