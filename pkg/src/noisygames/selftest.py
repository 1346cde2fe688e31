"""Randomized self-test suites behind the `selftest` CLI subcommand.

Each suite returns (ok, report_dict); generation is seeded, so a rerun
with the same flags reproduces the same instances and numbers.
"""

import math

import numpy as np

from . import prg, tester, validation
from .basis import build_standard_basis
from .operators import FourierOperator, influence

DEFAULT_SEED = 2024


def random_fourier_operator(rng, m, D, degree, nnz, basis_tag, include_constant=True):
    coeffs = {}
    for _ in range(nnz):
        wt = int(rng.integers(1, degree + 1))
        positions = rng.choice(D, size=min(wt, D), replace=False)
        key = [0] * D
        for pos in positions:
            key[pos] = int(rng.integers(1, m * m))
        coeffs[tuple(key)] = coeffs.get(tuple(key), 0.0) + float(rng.normal())
    if include_constant:
        key0 = (0,) * D
        coeffs[key0] = coeffs.get(key0, 0.0) + float(rng.normal()) * 0.5
    op = FourierOperator(m, D, coeffs, basis_tag)
    norm = math.sqrt(op.two_norm_sq())
    if norm > 1.0:
        op = op.scaled(0.95 / norm)
    return op


def random_operator_spec(rng, m, h, n, degree, nterms):
    terms = {}
    for _ in range(nterms):
        total = int(rng.integers(0, degree + 1))
        s_size = int(rng.integers(0, min(total, n) + 1))
        sig_weight = min(total - s_size, h)
        S = tuple(sorted(rng.choice(n, size=s_size, replace=False))) if s_size else ()
        sigma = [0] * h
        if sig_weight:
            for pos in rng.choice(h, size=sig_weight, replace=False):
                sigma[pos] = int(rng.integers(1, m * m))
        key = (S, tuple(sigma))
        terms[key] = terms.get(key, 0.0) + float(rng.normal())
    return validation.RandomOperatorSpec(m=m, h=h, n=n, terms=terms)


def selftest_prg(max_n=8, max_k=3, ranges=(2, 4)):
    """Exhaustive k-wise uniformity for every built family at small sizes."""
    checked = []
    ok = True
    for p in ranges:
        for n in range(1, max_n + 1):
            for k in range(1, max_k + 1):
                family = prg.make_hash_family(n, p, k)
                uniform = prg.is_exactly_kwise_uniform(family, k)
                ok = ok and uniform
                checked.append(
                    {"n": n, "p": p, "k": k, "size": family.size, "uniform": uniform}
                )
    return ok, {"suite": "prg", "ok": ok, "families": len(checked), "checked": checked}


def selftest_hyper(trials=300, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    basis = build_standard_basis(2)
    worst = 0.0
    violations = 0
    for _ in range(trials):
        h = int(rng.integers(1, 3))
        n = int(rng.integers(1, 9))
        spec = random_operator_spec(rng, 2, h, n, degree=int(rng.integers(1, 4)), nterms=int(rng.integers(1, 7)))
        report = validation.check_hypercontractivity(spec, basis)
        if not report.holds:
            violations += 1
        if report.rhs > 0:
            worst = max(worst, report.lhs / (report.factor * report.rhs**2))
    ok = violations == 0
    return ok, {
        "suite": "hyper",
        "ok": ok,
        "trials": trials,
        "violations": violations,
        "worst_ratio": worst,
    }


def selftest_invariance(trials=60, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    basis = build_standard_basis(2)
    failures = 0
    worst_gap = 0.0
    for _ in range(trials):
        D = int(rng.integers(2, 5))
        op = random_fourier_operator(rng, 2, D, degree=2, nnz=int(rng.integers(2, 7)), basis_tag=basis.tag)
        influences = sorted(
            ((i, influence(op, i)) for i in range(D)), key=lambda pair: -pair[1]
        )
        h = int(rng.integers(1, D))
        H = tuple(sorted(i for i, _ in influences[:h]))
        if tester.coordinate_count(op, H) > validation.ENUM_LIMIT:
            continue
        report = validation.check_zeta_invariance(op, H, basis)
        worst_gap = max(worst_gap, report.gap)
        if not report.holds:
            failures += 1
    ok = failures == 0
    return ok, {
        "suite": "invariance",
        "ok": ok,
        "trials": trials,
        "failures": failures,
        "worst_gap": worst_gap,
    }


def selftest_derand(trials=40, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    basis = build_standard_basis(2)
    failures = 0
    worst_gap = 0.0
    for _ in range(trials):
        D = int(rng.integers(2, 4))
        d = int(rng.integers(1, 3))
        op = random_fourier_operator(rng, 2, D, degree=d, nnz=int(rng.integers(2, 6)), basis_tag=basis.tag)
        H = (0,)
        if tester.coordinate_count(op, H) > validation.ENUM_LIMIT:
            continue
        report = validation.check_derandomization(op, H, max(op.degree(), 1), basis, p=2)
        worst_gap = max(worst_gap, report.gap)
        if not report.holds:
            failures += 1
    ok = failures == 0
    return ok, {
        "suite": "derand",
        "ok": ok,
        "trials": trials,
        "failures": failures,
        "worst_gap": worst_gap,
    }


def run_all(trials=None, seed=DEFAULT_SEED):
    suites = [
        ("prg", lambda: selftest_prg()),
        ("hyper", lambda: selftest_hyper(trials or 300, seed)),
        ("invariance", lambda: selftest_invariance(trials or 60, seed)),
        ("derand", lambda: selftest_derand(trials or 40, seed)),
    ]
    results = []
    all_ok = True
    for name, fn in suites:
        ok, report = fn()
        all_ok = all_ok and ok
        results.append(report)
    return all_ok, {"suite": "all", "ok": all_ok, "results": results}
