"""Nonlocal games, fixed-point certificates, and the NP-style verifier.

A certificate holds the Fourier coefficients of a degree-d
pseudo-strategy as signed integer numerators with denominator 2^w, one
table per (question, answer) pair and party.  Verification is three
checks: the game value computed from the correlation spectrum must
reach beta, the per-question coefficient tables must sum to the
identity exactly (integer arithmetic), and every operator must pass the
positivity tester with thresholds (4 delta, 2 delta).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .correlation import correlation_weight
from .errors import InvalidInputError, InvalidParameterError
from .operators import FourierOperator, weight
from .tester import TesterParams, run_tester

DEFAULT_D_MCC = 300.0
DEFAULT_C_SMOOTH = 1.0


@dataclass(frozen=True)
class GameSpec:
    """A two-player one-round game (question sets, answer sets, mu, V)."""

    s_x: int
    s_y: int
    t_a: int
    t_b: int
    mu: np.ndarray = field(repr=False)     # (s_x, s_y) probabilities
    V: np.ndarray = field(repr=False)      # (s_x, s_y, t_a, t_b) in {0, 1}

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        V = np.asarray(self.V)
        if mu.shape != (self.s_x, self.s_y):
            raise InvalidInputError(f"mu shape {mu.shape} != ({self.s_x}, {self.s_y})")
        if V.shape != (self.s_x, self.s_y, self.t_a, self.t_b):
            raise InvalidInputError(
                f"V shape {V.shape} != ({self.s_x}, {self.s_y}, {self.t_a}, {self.t_b})"
            )
        if mu.min() < 0 or abs(mu.sum() - 1.0) > 1e-12:
            raise InvalidInputError("mu must be nonnegative and sum to 1")
        if not np.isin(V, (0, 1)).all():
            raise InvalidInputError("V entries must be 0 or 1")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "V", np.asarray(V, dtype=np.int8))


def chsh_game():
    """CHSH: uniform questions, win iff a xor b = x and y."""
    V = np.zeros((2, 2, 2, 2), dtype=np.int8)
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    V[x, y, a, b] = 1 if (a ^ b) == (x & y) else 0
    return GameSpec(s_x=2, s_y=2, t_a=2, t_b=2, mu=np.full((2, 2), 0.25), V=V)


@dataclass(frozen=True)
class Certificate:
    """Fixed-point coefficient tables: value = numerator * 2^-w.

    alice maps (x, a) to {sigma tuple: integer numerator}, bob maps
    (y, b) likewise.  Stored weights never exceed the degree bound d and
    decoded values never exceed 1 in absolute value.
    """

    m: int
    D: int
    d: int
    w: int
    alice: dict
    bob: dict

    def __post_init__(self):
        if self.w < 1:
            raise InvalidParameterError(f"width must be >= 1, got {self.w}")
        limit = 1 << self.w
        for party, tables in (("A", self.alice), ("B", self.bob)):
            for (q, ans), table in tables.items():
                for sigma, num in table.items():
                    if len(sigma) != self.D:
                        raise InvalidInputError(
                            f"{party}[{q},{ans}] key {sigma} has length != D={self.D}"
                        )
                    if weight(sigma) > self.d:
                        raise InvalidInputError(
                            f"{party}[{q},{ans}] key {sigma} exceeds degree bound {self.d}"
                        )
                    if not isinstance(num, int):
                        raise InvalidInputError("numerators must be integers")
                    if abs(num) > limit:
                        raise InvalidInputError(
                            f"numerator {num} at {party}[{q},{ans}]{sigma} exceeds |2^w|"
                        )

    def operator(self, party, question, answer, basis_tag):
        """Decode one table into a FourierOperator (floats n * 2^-w)."""
        tables = self.alice if party == "A" else self.bob
        table = tables.get((question, answer), {})
        scale = 2.0**-self.w
        coeffs = {sigma: num * scale for sigma, num in table.items()}
        return FourierOperator(self.m, self.D, coeffs, basis_tag)


@dataclass(frozen=True)
class VerifierParams:
    """Derived parameter set of the NP verifier (see derive_params)."""

    beta: float
    epsilon: float
    rho: float
    t: int
    s: int
    m: int
    eps_prime: float
    delta: float
    d: float
    d_alt: float
    w: float
    D: float
    log10_D: float
    d_mcc: float = DEFAULT_D_MCC
    c_smooth: float = DEFAULT_C_SMOOTH

    def to_dict(self):
        return {
            "beta": self.beta,
            "epsilon": self.epsilon,
            "rho": self.rho,
            "t": self.t,
            "s": self.s,
            "m": self.m,
            "eps_prime": self.eps_prime,
            "delta": self.delta,
            "d": self.d,
            "d_alt": self.d_alt,
            "w": self.w,
            "D": self.D,
            "log10_D": self.log10_D,
            "d_mcc": self.d_mcc,
            "c_smooth": self.c_smooth,
            "formulas": {
                "eps_prime": "epsilon^2 / (4 t^3)",
                "delta": "eps_prime^2 / (d_mcc * t * (t + 1))",
                "d": "c_smooth * ln(1/delta)^2 / (delta * ln(1/rho))",
                "d_alt": "c_smooth * ln(1/delta)^2 / (delta * (1 - rho))",
                "w": "ceil(D * log2(m) + log2(2/delta))",
                "log10_D": "log10 of poly(s) * exp(600 t^9 ln(m) / (eps^4 (1-rho)) * ln(t/(eps(1-rho)))^2)",
            },
        }


def derive_params(s, t, m, rho, epsilon, beta=1.0, d_mcc=DEFAULT_D_MCC, c_smooth=DEFAULT_C_SMOOTH):
    """Parameter cascade of the verifier.

    eps' = eps^2/(4 t^3); delta = eps'^2/(d_mcc t (t+1)); the degree is
    d = c log^2(1/delta) / (delta log(1/rho)) (the alternative form with
    (1 - rho) in place of log(1/rho) is reported as d_alt); the
    coefficient width is w = ceil(D log2 m + log2(2/delta)).  D is the
    closed-form register bound s^12 t^120 / eps^48 *
    exp(600 t^9 ln m / (eps^4 (1-rho)) * ln^2(t / (eps (1-rho)))),
    astronomically large at any real parameters, so it is reported both
    directly (usually inf in floating point) and as log10_D; desk-scale
    runs supply their own D.
    """
    if not 0 < epsilon < 1:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < rho < 1:
        raise InvalidParameterError(f"rho must lie in (0, 1), got {rho}")
    if t < 1 or s < 1 or m < 2:
        raise InvalidParameterError("need s >= 1, t >= 1, m >= 2")
    eps_prime = epsilon**2 / (4.0 * t**3)
    delta = eps_prime**2 / (d_mcc * t * (t + 1))
    log_inv_delta = math.log(1.0 / delta)
    d = c_smooth * log_inv_delta**2 / (delta * math.log(1.0 / rho))
    d_alt = c_smooth * log_inv_delta**2 / (delta * (1.0 - rho))
    ln_arg = math.log(t / (epsilon * (1.0 - rho)))
    ln_D = (
        12.0 * math.log(s)
        + 120.0 * math.log(t)
        + 48.0 * math.log(1.0 / epsilon)
        + (600.0 * t**9 * math.log(m) / (epsilon**4 * (1.0 - rho))) * ln_arg**2
    )
    log10_D = ln_D / math.log(10.0)
    D = math.exp(ln_D) if ln_D < 700 else math.inf
    w = (
        math.ceil(D * math.log2(m) + math.log2(2.0 / delta))
        if math.isfinite(D)
        else math.inf
    )
    return VerifierParams(
        beta=beta, epsilon=epsilon, rho=rho, t=t, s=s, m=m,
        eps_prime=eps_prime, delta=delta, d=d, d_alt=d_alt, w=w,
        D=D, log10_D=log10_D, d_mcc=d_mcc, c_smooth=c_smooth,
    )


def check_identity_sums(cert, game):
    """Exact integer check that each question's operators sum to the identity.

    For every question and every sigma != 0 the numerators must sum to
    0; for sigma = 0 they must sum to 2^w.  Returns (ok, violations)
    with one (party, question, sigma) entry per failed sum.
    """
    violations = []
    target0 = 1 << cert.w
    zero_key = (0,) * cert.D
    for party, tables, questions, answers in (
        ("A", cert.alice, game.s_x, game.t_a),
        ("B", cert.bob, game.s_y, game.t_b),
    ):
        for q in range(questions):
            sums = {}
            for ans in range(answers):
                for sigma, num in tables.get((q, ans), {}).items():
                    sums[sigma] = sums.get(sigma, 0) + num
            for sigma in sorted(sums):
                want = target0 if sigma == zero_key else 0
                if sums[sigma] != want:
                    violations.append((party, q, sigma))
            if zero_key not in sums:
                violations.append((party, q, zero_key))
    return not violations, violations


def game_value(cert, game, mes):
    """Winning probability of the pseudo-strategy from the spectrum:

    sum_{x,y,a,b} mu V sum_sigma c_sigma P_hat(sigma) Q_hat(sigma),
    with c_sigma the product of per-register correlation coefficients.
    Accumulation order is fixed (questions, answers, then sorted sigma),
    so results are exactly reproducible.
    """
    if cert.m != mes.m:
        raise InvalidInputError(f"certificate m={cert.m} != mes m={mes.m}")
    scale = 4.0 ** (-cert.w)  # two decoded factors of 2^-w
    total = []
    for x in range(game.s_x):
        for y in range(game.s_y):
            if game.mu[x, y] == 0.0:
                continue
            for a in range(game.t_a):
                alice = cert.alice.get((x, a), {})
                if not alice:
                    continue
                for b in range(game.t_b):
                    if game.V[x, y, a, b] == 0:
                        continue
                    bob = cert.bob.get((y, b), {})
                    inner = []
                    for sigma in sorted(alice):
                        num_b = bob.get(sigma)
                        if num_b is not None:
                            inner.append(
                                alice[sigma] * num_b * correlation_weight(mes, sigma)
                            )
                    if inner:
                        total.append(game.mu[x, y] * scale * math.fsum(inner))
    return math.fsum(total)


@dataclass(frozen=True)
class OperatorTestResult:
    party: str
    question: int
    answer: int
    report: object

    def to_dict(self):
        return {
            "party": self.party,
            "question": self.question,
            "answer": self.answer,
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class VerifierReport:
    value: float
    beta: float
    value_ok: bool
    identity_ok: bool
    positivity_ok: bool
    accept: bool
    violations: list
    operator_reports: list

    def to_dict(self):
        return {
            "value": self.value,
            "beta": self.beta,
            "value_ok": self.value_ok,
            "identity_ok": self.identity_ok,
            "positivity_ok": self.positivity_ok,
            "accept": self.accept,
            "violations": [
                {"party": p, "question": q, "sigma": list(sig)} for p, q, sig in self.violations
            ],
            "operator_reports": [r.to_dict() for r in self.operator_reports],
        }


def verify(cert, game, mes, beta, delta, tau_override=None, seed_budget=4096, degree=None):
    """Run all three verifier checks and report their conjunction.

    The positivity tester runs on every decoded operator with
    thresholds beta <- 4 delta and tolerance delta <- 2 delta; alice
    operators are read in the aligned A basis and bob operators in the
    aligned B basis.  Ties at value == beta are accepted.  The tester's
    degree bound defaults to the certificate header; `degree` overrides
    it.
    """
    value = game_value(cert, game, mes)
    value_ok = value >= beta
    identity_ok, violations = check_identity_sums(cert, game)
    params = TesterParams(
        beta=4.0 * delta,
        delta=2.0 * delta,
        d=cert.d if degree is None else degree,
        m=cert.m,
        tau_override=tau_override,
        seed_budget=seed_budget,
    )
    operator_reports = []
    positivity_ok = True
    for party, tables, questions, answers, basis in (
        ("A", cert.alice, game.s_x, game.t_a, mes.basisA),
        ("B", cert.bob, game.s_y, game.t_b, mes.basisB),
    ):
        for q in range(questions):
            for ans in range(answers):
                op = cert.operator(party, q, ans, basis.tag)
                report = run_tester(op, params, basis)
                operator_reports.append(
                    OperatorTestResult(party=party, question=q, answer=ans, report=report)
                )
                positivity_ok = positivity_ok and report.accept
    accept = value_ok and identity_ok and positivity_ok
    return VerifierReport(
        value=value,
        beta=beta,
        value_ok=value_ok,
        identity_ok=identity_ok,
        positivity_ok=positivity_ok,
        accept=accept,
        violations=violations,
        operator_reports=operator_reports,
    )
