"""Command line interface.

Subcommands: verify, prove, psd-test, params, selftest.  Exit codes are
0 for accept/pass, 1 for reject/fail, and 2 for usage or parse errors.
Reports print as human-oriented text or, with --json, as a versioned
JSON record ("schema": "1"); identical inputs and flags produce
byte-identical output.
"""

import argparse
import json
import sys

from . import io as io_mod
from . import selftest as selftest_mod
from .basis import build_standard_basis
from .errors import NoisyGamesError
from .games import derive_params, verify
from .operators import from_text
from .prover import brute_force_value, honest_certificate
from .tester import TesterParams, run_tester

SCHEMA = "1"


def _emit(args, payload, text_lines):
    if args.json:
        payload = {"schema": SCHEMA, **payload}
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        for line in text_lines:
            print(line)


def cmd_verify(args):
    game = io_mod.load_game(args.game)
    cert = io_mod.load_certificate(args.cert)
    mes = io_mod.parse_mes_spec(args.mes)
    report = verify(
        cert,
        game,
        mes,
        beta=args.beta,
        delta=args.delta,
        tau_override=args.tau,
        seed_budget=args.seed_budget,
        degree=args.degree,
    )
    lines = [
        f"value      {report.value!r} (beta {args.beta!r}) -> {'ok' if report.value_ok else 'FAIL'}",
        f"identity   {'ok' if report.identity_ok else 'FAIL'}",
        f"positivity {'ok' if report.positivity_ok else 'FAIL'}",
        f"result     {'ACCEPT' if report.accept else 'REJECT'}",
    ]
    for p, q, sigma in report.violations[:20]:
        lines.append(f"  identity violation: party {p} question {q} sigma {sigma}")
    for item in report.operator_reports:
        r = item.report
        lines.append(
            f"  op {item.party}[{item.question},{item.answer}] estimate {r.estimate!r} "
            f"mode {r.mode} accept {r.accept}"
        )
    _emit(args, {"report": report.to_dict()}, lines)
    return 0 if report.accept else 1


def cmd_prove(args):
    game = io_mod.load_game(args.game)
    strategy = io_mod.load_strategy(args.strategy)
    mes = io_mod.parse_mes_spec(args.mes)
    value = brute_force_value(strategy, game, mes)
    cert = honest_certificate(strategy, game, mes, delta=args.delta, w=args.width)
    io_mod.save_certificate(cert, args.out)
    t_sq = max(game.t_a, game.t_b) ** 2
    tolerance = 2 * args.delta * t_sq + 2 * strategy.m**strategy.D * 2**-args.width * t_sq
    lines = [
        f"strategy value {value!r}",
        f"certificate    {args.out} (degree {cert.d}, width {cert.w})",
        f"value drop bound {tolerance!r}",
    ]
    _emit(
        args,
        {"value": value, "tolerance": tolerance, "certificate": args.out,
         "degree": cert.d, "width": cert.w},
        lines,
    )
    return 0


def cmd_psd_test(args):
    with open(args.op) as fh:
        op = from_text(fh.read())
    basis = build_standard_basis(op.m)
    if op.basis_tag != basis.tag:
        raise NoisyGamesError(
            f"operator file uses basis {op.basis_tag!r}; the CLI only reconstructs "
            f"the canonical basis {basis.tag!r}"
        )
    params = TesterParams(
        beta=args.beta,
        delta=args.delta,
        d=args.degree,
        m=op.m,
        tau_override=args.tau,
        seed_budget=args.seed_budget,
    )
    report = run_tester(op, params, basis)
    lines = [
        f"estimate    {report.estimate!r}",
        f"accept      {report.accept}",
        f"H           {list(report.H)}",
        f"tau         {report.tau!r}",
        f"p           {report.p}",
        f"n           {report.n}",
        f"seeds_total {report.seeds_total}",
        f"seeds_used  {report.seeds_used}",
        f"mode        {report.mode} (exact_mode={report.exact_mode}, budgeted={report.budgeted})",
    ]
    _emit(args, {"report": report.to_dict()}, lines)
    return 0 if report.accept else 1


def cmd_params(args):
    params = derive_params(
        s=args.s, t=args.t, m=args.m, rho=args.rho, epsilon=args.epsilon
    )
    d = params.to_dict()
    lines = [f"{key} = {d[key]!r}" for key in (
        "eps_prime", "delta", "d", "d_alt", "w", "D", "log10_D")]
    lines += [f"  {name}: {formula}" for name, formula in d["formulas"].items()]
    _emit(args, {"params": d}, lines)
    return 0


def cmd_selftest(args):
    suite = args.suite
    if suite == "prg":
        ok, report = selftest_mod.selftest_prg()
    elif suite == "hyper":
        ok, report = selftest_mod.selftest_hyper(args.trials or 300, args.seed)
    elif suite == "invariance":
        ok, report = selftest_mod.selftest_invariance(args.trials or 60, args.seed)
    elif suite == "derand":
        ok, report = selftest_mod.selftest_derand(args.trials or 40, args.seed)
    else:
        ok, report = selftest_mod.run_all(args.trials, args.seed)
    lines = []
    for item in report.get("results", [report]):
        status = "pass" if item["ok"] else "FAIL"
        extra = {k: v for k, v in item.items() if k not in ("suite", "ok", "checked", "results")}
        lines.append(f"[{status}] {item['suite']}: {extra}")
        for row in item.get("checked", []):
            mark = "uniform" if row["uniform"] else "NOT UNIFORM"
            lines.append(
                f"    n={row['n']} p={row['p']} k={row['k']} size={row['size']}: {mark}"
            )
    _emit(args, {"report": report}, lines)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noisygames",
        description="Certificate verification for nonlocal games with noisy MES states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify a certificate against a game")
    p.add_argument("--game", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--mes", required=True, help="depolarized:m=..,eps=.. or file:PATH")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--degree", type=int, default=None,
                   help="override the certificate's degree bound for the tester")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--seed-budget", type=int, default=4096)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove", help="build an honest certificate from a strategy")
    p.add_argument("--game", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--mes", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("psd-test", help="positivity-test a serialized operator")
    p.add_argument("--op", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--seed-budget", type=int, default=4096)
    p.set_defaults(func=cmd_psd_test)

    p = sub.add_parser("params", help="print the derived verifier parameters")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("selftest", help="run the built-in property suites")
    p.add_argument("suite", choices=["prg", "hyper", "invariance", "derand", "all"])
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=selftest_mod.DEFAULT_SEED)
    p.set_defaults(func=cmd_selftest)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoisyGamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
