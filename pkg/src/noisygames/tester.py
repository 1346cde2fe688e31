"""Deterministic positivity tester for low-degree Fourier operators.

Given a degree-d operator P on D qudits and thresholds beta > delta > 0,
the tester estimates the normalized distance m^-D Tr zeta(P) to the PSD
cone and accepts when the estimate is below beta.  High-influence
registers (influence > tau) are kept as matrices; the basis elements on
the remaining registers are replaced by pseudorandom signs produced by
the pairwise-hash / k-wise-block combiner, and the estimate is the mean
of m^-|H| Tr zeta over the seed space.

Exact evaluation of that mean: for a fixed hash member the generated
sign vectors are uniform over a GF(2)-affine subspace of the active
coordinates (see prg.sign_subspace_basis), so the mean over all block
seeds collapses to a uniform average over at most 2^|active| patterns.
The tester uses this collapsed form whenever the work bound allows,
enumerates seeds directly when the space is tiny, and otherwise falls
back to a deterministic fixed-stride subsample of the declared seed
space (flagged in the report).
"""

from dataclasses import dataclass, field
from functools import reduce
import math

import numpy as np

from . import _kernels, prg
from .basis import StandardBasis
from .dense import check_dense_dim, zeta_trace
from .errors import (
    EnumerationLimitError,
    InvalidInputError,
    InvalidParameterError,
    NormalizationError,
)
from .operators import FourierOperator, influence, synthesize

NORM_SLACK = 1e-9
RADEMACHER_LIMIT = 14


@dataclass(frozen=True)
class TesterParams:
    """Inputs of the positivity test: thresholds, degree bound, knobs.

    tau_override replaces the algorithm's tau (whose default value is so
    small at desk scale that every supported register lands in H); it
    exists to exercise the derandomized path.  c_derand is the universal
    constant of the derandomization bound, configurable because the
    analysis does not pin it.  collapse_limit bounds the work (in zeta
    evaluations) allowed for exact seed-space collapsing before the
    tester degrades to a budgeted subsample of seed_budget seeds.
    """

    beta: float
    delta: float
    d: int
    m: int
    tau_override: float | None = None
    seed_budget: int = 4096
    c_derand: float = 1.0
    collapse_limit: int = 1 << 20

    def __post_init__(self):
        if not self.beta > self.delta > 0:
            raise InvalidParameterError(
                f"need beta > delta > 0, got beta={self.beta}, delta={self.delta}"
            )
        if self.d < 0:
            raise InvalidParameterError(f"degree bound must be >= 0, got {self.d}")
        if self.tau_override is not None and self.tau_override <= 0:
            raise InvalidParameterError("tau override must be positive")
        if self.seed_budget < 1:
            raise InvalidParameterError("seed budget must be >= 1")


@dataclass(frozen=True)
class TesterReport:
    estimate: float
    accept: bool
    H: tuple
    tau: float
    p: int
    n: int
    seeds_total: int
    seeds_used: int
    exact_mode: bool
    mode: str
    bound_regularize: float
    bound_derandomize: float
    beta: float
    delta: float

    @property
    def budgeted(self):
        return self.seeds_used < self.seeds_total

    def to_dict(self):
        return {
            "estimate": self.estimate,
            "accept": self.accept,
            "H": list(self.H),
            "tau": self.tau if math.isfinite(self.tau) else "inf",
            "p": self.p,
            "n": self.n,
            "seeds_total": self.seeds_total if isinstance(self.seeds_total, int) else "inf",
            "seeds_used": self.seeds_used,
            "exact_mode": self.exact_mode,
            "budgeted": self.budgeted,
            "mode": self.mode,
            "bound_regularize": self.bound_regularize,
            "bound_derandomize": self.bound_derandomize,
            "beta": self.beta,
            "delta": self.delta,
        }


def default_tau(delta, d, m):
    """tau = delta^3 / (8 * 3^(2d) * m^d * d^2)."""
    if delta <= 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if d < 1:
        raise InvalidParameterError(
            "tau is undefined at degree 0; degree-0 operators run in exact mode"
        )
    return delta**3 / (8.0 * 3.0 ** (2 * d) * float(m) ** d * d * d)


def regularize(op, tau):
    """High-influence register set H = {i : Inf_i(P) > tau}.

    Requires sum of squared coefficients <= 1 (+ slack); then
    |H| <= deg(P)/tau since total influence is at most the degree.
    """
    norm_sq = op.two_norm_sq()
    if norm_sq > 1.0 + NORM_SLACK:
        raise NormalizationError(f"operator has squared 2-norm {norm_sq:.6g} > 1")
    H = tuple(i for i in range(op.registers) if influence(op, i) > tau)
    assert len(H) <= max(op.degree(), 1) * (1.0 + 2 * NORM_SLACK) / tau
    return H


def removed_registers(op, H):
    return [i for i in range(op.registers) if i not in set(H)]


def coordinate_count(op, H):
    """n = (m^2 - 1) * (D - |H|): one sign per non-identity basis element."""
    return (op.m * op.m - 1) * (op.registers - len(H))


def substitute(op, H, x):
    """Replace off-H basis elements by the signs in x.

    Register i removed at rank r (removed registers sorted increasing)
    owns the coordinate block [r*(m^2-1), (r+1)*(m^2-1)); a key with
    sigma_i = s != 0 picks up the factor x[r*(m^2-1) + s - 1].  Keys
    collapsing to the same restriction accumulate.  When H is empty the
    result lives on one dummy identity register (same normalized zeta).
    """
    x = np.asarray(x)
    n = coordinate_count(op, H)
    if x.shape != (n,):
        raise InvalidInputError(f"substitution vector has shape {x.shape}, expected ({n},)")
    kept = sorted(H)
    rank = {reg: r for r, reg in enumerate(removed_registers(op, H))}
    msq = op.m * op.m - 1
    coeffs = {}
    for key, value in op.items():
        factor = value
        for reg, digit in enumerate(key):
            if digit != 0 and reg in rank:
                factor *= float(x[rank[reg] * msq + digit - 1])
        new_key = tuple(key[i] for i in kept) if kept else (0,)
        coeffs[new_key] = coeffs.get(new_key, 0.0) + factor
    return FourierOperator(op.m, max(len(kept), 1), coeffs, op.basis_tag)


def exact_reference(op, basis):
    """m^-D Tr zeta(P) by full synthesis and eigendecomposition."""
    return zeta_trace(synthesize(op, basis)) / op.m**op.registers


def delta_for_seed(op, H, seed, space, basis):
    """m^-|H| Tr zeta of the substituted operator for one literal seed."""
    f_table, blocks = space.realize(seed)
    x = prg.mz_generate(f_table, blocks)
    sub = substitute(op, H, x)
    return zeta_trace(synthesize(sub, basis)) / op.m**sub.registers


@dataclass
class _KernelPlan:
    """Precomputed blocks for the kernel: one record per coefficient."""

    kb: np.ndarray           # (R, dim, dim) kept-register basis blocks
    coeff: np.ndarray        # (R,)
    sign_ptr: np.ndarray     # (R+1,)
    sign_idx: np.ndarray     # indices into `active`
    active: list             # global coordinates that appear in any record
    dim: int
    n: int
    pos: dict = field(default_factory=dict)


def _prepare_plan(op, H, basis):
    kept = sorted(H)
    removed = removed_registers(op, H)
    rank = {reg: r for r, reg in enumerate(removed)}
    msq = op.m * op.m - 1
    dim = op.m ** max(len(kept), 1)
    check_dense_dim(dim, "kept-register synthesis")
    merged = {}
    for key, value in op.items():
        coords = tuple(
            sorted(rank[reg] * msq + digit - 1 for reg, digit in enumerate(key) if digit != 0 and reg in rank)
        )
        kept_key = tuple(key[i] for i in kept)
        merged[(kept_key, coords)] = merged.get((kept_key, coords), 0.0) + value
    records = sorted(merged.items())
    eye = np.eye(op.m, dtype=np.complex128)
    kb = np.empty((len(records), dim, dim), dtype=np.complex128)
    coeff = np.empty(len(records))
    for r, ((kept_key, _), value) in enumerate(records):
        factors = [basis.elements[s] for s in kept_key] if kept_key else [eye]
        kb[r] = reduce(np.kron, factors)
        coeff[r] = value
    active = sorted({c for (_, coords), _ in records for c in coords})
    pos = {c: i for i, c in enumerate(active)}
    ptr = [0]
    idx = []
    for (_, coords), _ in records:
        idx.extend(pos[c] for c in coords)
        ptr.append(len(idx))
    return _KernelPlan(
        kb=kb,
        coeff=coeff,
        sign_ptr=np.asarray(ptr, dtype=np.int64),
        sign_idx=np.asarray(idx, dtype=np.int64),
        active=active,
        dim=dim,
        n=coordinate_count(op, H),
        pos=pos,
    )


def _plan_mean(plan, patterns, weights):
    """Normalized weighted zeta mean over sign patterns (rows of `patterns`)."""
    total = _kernels.mean_zeta(
        plan.kb, plan.coeff, plan.sign_ptr, plan.sign_idx, patterns, weights
    )
    return total / plan.dim


def rademacher_reference(op, H, basis, limit=RADEMACHER_LIMIT):
    """Exact mean of m^-|H| Tr zeta over uniform signs on the removed registers.

    Coordinates not touched by any coefficient average out, so only the
    active ones are enumerated; the value equals the full 2^n average.
    """
    n = coordinate_count(op, H)
    if n > limit:
        raise EnumerationLimitError(f"n={n} exceeds the enumeration limit {limit}")
    plan = _prepare_plan(op, H, basis)
    k = len(plan.active)
    bits = (np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1
    patterns = (1 - 2 * bits).astype(np.int8)
    weights = np.full(1 << k, 1.0 / (1 << k))
    return _plan_mean(plan, patterns, weights)


def correctness_bounds(tau, d, m, c_derand):
    """The two error terms the analysis charges: regularization-invariance
    term (3^d m^(d/2) sqrt(tau) d)^(2/3) and derandomization term
    C sqrt((9m)^d d tau).  Reported, not asserted: the universal
    constants are not pinned by the analysis."""
    if d < 1:
        return 0.0, 0.0
    reg = (3.0**d * m ** (d / 2.0) * math.sqrt(tau) * d) ** (2.0 / 3.0)
    der = c_derand * math.sqrt((9.0 * m) ** d * d * tau)
    return reg, der


def _collapsed_estimate(plan, hashes, vectors):
    """Exact seed-space mean via per-hash-member subspace collapsing."""
    tables = prg.table_multiplicities(hashes, plan.active)
    basis_cache = {}
    pattern_cache = {}
    terms = []
    for table, count in sorted(tables.items()):
        blocks = {}
        for coord, value in zip(plan.active, table):
            blocks.setdefault(value, []).append(coord)
        union = []
        for value in sorted(blocks):
            coords = tuple(blocks[value])
            lifted = basis_cache.get(coords)
            if lifted is None:
                local = prg.sign_subspace_basis(vectors, coords)
                lifted = []
                for mask in local:
                    out = 0
                    for j, c in enumerate(coords):
                        if (mask >> j) & 1:
                            out |= 1 << plan.pos[c]
                    lifted.append(out)
                basis_cache[coords] = lifted
            union.extend(lifted)
        key = tuple(sorted(union))
        cached = pattern_cache.get(key)
        if cached is None:
            patterns = prg.enumerate_subspace(union, len(plan.active))
            weights = np.full(patterns.shape[0], 1.0 / patterns.shape[0])
            cached = (patterns, weights)
            pattern_cache[key] = cached
        patterns, weights = cached
        terms.append(count * _plan_mean(plan, patterns, weights))
    return math.fsum(terms) / hashes.size


def _enumerated_estimate(plan, space):
    """Mean over every literal seed of a small seed space."""
    hashes, vectors = space.hashes, space.vectors
    count = space.cardinality
    rows = np.empty((count, len(plan.active)), dtype=np.int8)
    for row, seed in enumerate(space):
        for j, coord in enumerate(plan.active):
            block = seed.block_indices[hashes.evaluate(seed.hash_index, coord)]
            rows[row, j] = 1 - 2 * vectors.hashes.evaluate(block, coord)
    weights = np.full(count, 1.0 / count)
    return _plan_mean(plan, rows, weights)


def _lattice_estimate(plan, space):
    """Mean over the deterministic lattice subsample of a budgeted space."""
    count = space.budget
    rows = np.empty((count, len(plan.active)), dtype=np.int8)
    for i in range(count):
        for j, coord in enumerate(plan.active):
            rows[i, j] = space.lattice_sign(i, coord)
    weights = np.full(count, 1.0 / count)
    return _plan_mean(plan, rows, weights)


def run_tester(op, params, basis):
    """Run the positivity test; accept iff the estimate is below beta.

    Short-circuits to exact evaluation when every supported register is
    in H (the substitution then has no randomness and the estimate
    equals m^-D Tr zeta(P) exactly).  Otherwise the seed-space mean is
    computed exactly (collapsed or enumerated) or, past the configured
    budget, over a deterministic subsample flagged in the report.
    """
    if not isinstance(basis, StandardBasis) or basis.tag != op.basis_tag:
        raise InvalidInputError("basis does not match the operator's basis tag")
    if params.m != op.m:
        raise InvalidParameterError(f"params.m={params.m} != operator m={op.m}")
    deg = op.degree()
    if deg > params.d:
        raise InvalidParameterError(f"operator degree {deg} exceeds declared bound {params.d}")

    if deg == 0:
        tau = math.inf
        H = ()
        bound_reg = bound_der = 0.0
    else:
        tau = params.tau_override if params.tau_override is not None else default_tau(
            params.delta, params.d, params.m
        )
        H = regularize(op, tau)
        bound_reg, bound_der = correctness_bounds(tau, params.d, params.m, params.c_derand)
    n = coordinate_count(op, H)

    if op.support().issubset(H):
        sub = substitute(op, H, np.ones(n, dtype=np.int8))
        estimate = zeta_trace(synthesize(sub, basis)) / op.m**sub.registers
        return TesterReport(
            estimate=estimate,
            accept=estimate < params.beta,
            H=H,
            tau=tau,
            p=0,
            n=n,
            seeds_total=1,
            seeds_used=1,
            exact_mode=True,
            mode="exact",
            bound_regularize=bound_reg,
            bound_derandomize=bound_der,
            beta=params.beta,
            delta=params.delta,
        )

    # smallest power of 2 >= d/tau, clamped to >= 2 (a larger p only
    # tightens the derandomization error, and the hash range needs p >= 2)
    p = max(2, 1 << max(0, math.ceil(math.log2(params.d / tau))))
    hashes = prg.make_hash_family(n, p, 2)
    vectors = prg.make_kwise_vectors(n, 4 * params.d)
    plan = _prepare_plan(op, H, basis)
    seeds_total = prg.seed_space(hashes, vectors, p).cardinality

    collapse_work = hashes.size * (1 << min(len(plan.active), 62))
    if collapse_work <= params.collapse_limit:
        estimate = _collapsed_estimate(plan, hashes, vectors)
        seeds_used = seeds_total
        mode = "collapsed"
    elif seeds_total <= params.seed_budget:
        estimate = _enumerated_estimate(plan, prg.seed_space(hashes, vectors, p))
        seeds_used = seeds_total
        mode = "enumerated"
    else:
        space = prg.seed_space(hashes, vectors, p, budget=params.seed_budget)
        estimate = _lattice_estimate(plan, space)
        seeds_used = space.seeds_used
        mode = "subsampled"

    return TesterReport(
        estimate=estimate,
        accept=estimate < params.beta,
        H=H,
        tau=tau,
        p=p,
        n=n,
        seeds_total=seeds_total,
        seeds_used=seeds_used,
        exact_mode=False,
        mode=mode,
        bound_regularize=bound_reg,
        bound_derandomize=bound_der,
        beta=params.beta,
        delta=params.delta,
    )
