"""Honest-prover pipeline: smoothing, fixed-point truncation, POVM rounding.

An explicit strategy is a dense POVM per question and party.  To turn
it into a certificate, every POVM element is smoothed (per-register
depolarizing noise followed by degree truncation, which keeps the
element close in game value while pushing its negative part below
delta) and the resulting coefficient tables are floor-quantized to w
fractional bits with an exact integer correction so the per-question
sums stay identical to the identity.  The rounding map turns any
near-POVM family back into an exact POVM; the brute-force value oracle
contracts dense operators against the full tensor power of the state.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import dense
from .errors import InvalidInputError, InvalidParameterError
from .games import Certificate
from .operators import FourierOperator, analyze, apply_noise, truncate_degree
from .tester import NORM_SLACK

POVM_TOL = 1e-9


@dataclass(frozen=True)
class ExplicitStrategy:
    """Per-question POVMs as dense matrices on (C^m)^(x D)."""

    m: int
    D: int
    alice: list = field(repr=False)  # alice[x][a] is an (m^D, m^D) matrix
    bob: list = field(repr=False)

    def __post_init__(self):
        dim = self.m**self.D
        for party in (self.alice, self.bob):
            for povm in party:
                total = np.zeros((dim, dim), dtype=np.complex128)
                for element in povm:
                    element = dense.ensure_hermitian(element, 1e-9, "POVM element")
                    if element.shape != (dim, dim):
                        raise InvalidInputError(
                            f"POVM element has shape {element.shape}, expected {(dim, dim)}"
                        )
                    if np.linalg.eigvalsh(element).min() < -POVM_TOL:
                        raise InvalidInputError("POVM element is not PSD within tolerance")
                    total += element
                if np.abs(total - np.eye(dim)).max() > POVM_TOL:
                    raise InvalidInputError("POVM does not sum to the identity")


def smoothing_rates(rho, delta, c_smooth=1.0):
    """Noise rate gamma = 1 - c * delta (1 - rho) / ln(1/delta) and the
    truncation degree d = ceil(ln(1/delta) / (1 - gamma))."""
    if not 0.0 <= rho < 1.0:
        raise InvalidParameterError(f"rho must lie in [0, 1), got {rho}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    log_inv = math.log(1.0 / delta)
    gamma = 1.0 - c_smooth * delta * (1.0 - rho) / log_inv
    if not 0.0 <= gamma <= 1.0:
        raise InvalidParameterError(
            f"smoothing rate gamma={gamma:.4g} outside [0, 1]; "
            "delta (or c_smooth) is too large for this rho"
        )
    d = math.ceil(log_inv / (1.0 - gamma))
    return gamma, d


def smooth_strategy(P, m, D, basis, rho, delta, c_smooth=1.0):
    """Low-degree approximation of a PSD element: truncate(noise(analyze(P))).

    The map is linear and unital, never increases a coefficient in
    absolute value, and leaves the output's normalized zeta distance
    below delta whenever P is PSD with normalized 2-norm at most 1.
    """
    gamma, d = smoothing_rates(rho, delta, c_smooth)
    op = analyze(P, m, D, basis, drop_tol=0.0)
    if op.two_norm_sq() > 1.0 + NORM_SLACK:
        raise InvalidParameterError(
            f"element has normalized squared 2-norm {op.two_norm_sq():.6g} > 1"
        )
    return truncate_degree(apply_noise(op, gamma), min(d, D))


def truncate_to_certificate(ops_by_answer, w):
    """Floor-quantize one question's coefficient tables to w fractional bits.

    Every coefficient becomes floor(c * 2^w) (an integer numerator);
    the per-sigma deficit k (the exact integer amount by which the
    quantized sum misses 0, or misses 2^w at sigma = 0) is repaid by
    adding one unit to the k lowest-indexed answers whose coefficient
    was strictly reduced.  The result satisfies the identity sums
    exactly and moves no coefficient by 2^(1-w) or more.
    """
    if w < 1:
        raise InvalidParameterError(f"width must be >= 1, got {w}")
    scale = 1 << w
    tables = [
        {sigma: int(math.floor(value * scale)) for sigma, value in op.items()}
        for op in ops_by_answer
    ]
    all_sigmas = sorted({sigma for op in ops_by_answer for sigma in op.coeffs})
    zero_key = (0,) * ops_by_answer[0].registers
    check = math.fsum(
        op.coefficient(zero_key) for op in ops_by_answer
    )
    if abs(check - 1.0) > 1e-9:
        raise InvalidInputError(f"identity-sum precondition fails at sigma=0: {check}")
    for sigma in all_sigmas:
        target = scale if sigma == zero_key else 0
        if sigma != zero_key:
            total = math.fsum(op.coefficient(sigma) for op in ops_by_answer)
            if abs(total) > 1e-9:
                raise InvalidInputError(
                    f"identity-sum precondition fails at sigma={sigma}: {total}"
                )
        got = sum(table.get(sigma, 0) for table in tables)
        k = target - got
        reduced = [
            a
            for a, op in enumerate(ops_by_answer)
            if tables[a].get(sigma, 0) < op.coefficient(sigma) * scale
        ]
        if k < 0 or k > len(reduced):
            raise InvalidInputError(
                f"correction count {k} out of range at sigma={sigma} "
                f"({len(reduced)} strictly reduced coefficients)"
            )
        for a in reduced[:k]:
            tables[a][sigma] = tables[a].get(sigma, 0) + 1
    cleaned = []
    for table in tables:
        cleaned.append({sigma: num for sigma, num in table.items() if num != 0})
    return cleaned


def round_to_povm(elements, floor=1e-12):
    """Nearest-feasible POVM from matrices that sum to the identity.

    Uses L_i = Y^-1/2 pos(X_i) Y^-1/2 with Y = sum_i pos(X_i) >= I.
    The output is an exact POVM (up to numerics) and its normalized
    squared 2-distance from the input is at most 6 t times the summed
    normalized zeta distances of the inputs.
    """
    elements = [dense.ensure_hermitian(x, 1e-9, "input element") for x in elements]
    dim = elements[0].shape[0]
    total = sum(elements)
    if np.abs(total - np.eye(dim)).max() > POVM_TOL:
        raise InvalidInputError("input elements do not sum to the identity")
    positives = [dense.positive_part(x) for x in elements]
    Y = sum(positives)
    Y_isqrt = dense.inv_sqrt_psd(Y, floor=floor)
    rounded = []
    for pos in positives:
        out = Y_isqrt @ pos @ Y_isqrt
        rounded.append(0.5 * (out + out.conj().T))
    return rounded


def brute_force_value(strategy, game, mes):
    """Game value by full tensor contraction against the state power.

    sum_{x,y,a,b} mu V Tr((A^x_a (x) B^y_b) psi^(x D)); requires
    m^(2D) within the dense budget.
    """
    m, D = strategy.m, strategy.D
    psi = dense.interleaved_state_power(mes.state, m, D)
    total = []
    for x in range(game.s_x):
        for y in range(game.s_y):
            if game.mu[x, y] == 0.0:
                continue
            for a in range(game.t_a):
                for b in range(game.t_b):
                    if game.V[x, y, a, b] == 0:
                        continue
                    val = np.trace(
                        np.kron(strategy.alice[x][a], strategy.bob[y][b]) @ psi
                    ).real
                    total.append(game.mu[x, y] * float(val))
    return math.fsum(total)


def honest_certificate(strategy, game, mes, delta, w, c_smooth=1.0):
    """Smooth every POVM element and quantize the tables into a certificate.

    Alice elements are analyzed in the aligned A basis and bob elements
    in the aligned B basis, with the noise rate tied to the state's
    maximal correlation.  The output passes the exact identity check by
    construction; its game value stays within 2 delta t^2 +
    2 m^D 2^-w t^2 (plus float noise) of the strategy's true value.
    """
    m, D = strategy.m, strategy.D
    rho = mes.rho
    _, d_smooth = smoothing_rates(rho, delta, c_smooth)
    degree = min(d_smooth, D)
    alice = {}
    bob = {}
    for party, povms, questions, answers, basis, out in (
        ("A", strategy.alice, game.s_x, game.t_a, mes.basisA, alice),
        ("B", strategy.bob, game.s_y, game.t_b, mes.basisB, bob),
    ):
        for q in range(questions):
            smoothed = [
                smooth_strategy(povms[q][ans], m, D, basis, rho, delta, c_smooth)
                for ans in range(answers)
            ]
            tables = truncate_to_certificate(smoothed, w)
            for ans in range(answers):
                out[(q, ans)] = tables[ans]
    return Certificate(m=m, D=D, d=degree, w=w, alice=alice, bob=bob)
