"""File formats: games (JSON), certificates, strategies, states, operators.

Certificates are bit-exact text: one decimal integer numerator per
record, so identity sums survive a round trip unchanged.  Dense
matrices use a row per matrix row with "re,im" entries.
"""

import json

import numpy as np

from .correlation import align_bases, depolarized_mes
from .errors import InvalidInputError
from .games import Certificate, GameSpec
from .prover import ExplicitStrategy


def load_game(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read game file {path}: {exc}") from exc
    try:
        return GameSpec(
            s_x=int(data["s_x"]),
            s_y=int(data["s_y"]),
            t_a=int(data["t_a"]),
            t_b=int(data["t_b"]),
            mu=np.asarray(data["mu"], dtype=float),
            V=np.asarray(data["V"]),
        )
    except KeyError as exc:
        raise InvalidInputError(f"game file {path} is missing field {exc}") from exc


def save_game(game, path):
    data = {
        "s_x": game.s_x,
        "s_y": game.s_y,
        "t_a": game.t_a,
        "t_b": game.t_b,
        "mu": game.mu.tolist(),
        "V": game.V.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True)
        fh.write("\n")


def save_certificate(cert, path):
    """Header "m D d w", then lines "party question answer sigma numerator"."""
    lines = [f"{cert.m} {cert.D} {cert.d} {cert.w}"]
    for party, tables in (("A", cert.alice), ("B", cert.bob)):
        for (q, ans) in sorted(tables):
            for sigma in sorted(tables[(q, ans)]):
                digits = ",".join(str(s) for s in sigma)
                lines.append(f"{party} {q} {ans} {digits} {tables[(q, ans)][sigma]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_certificate(path):
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InvalidInputError(f"cannot read certificate file {path}: {exc}") from exc
    if not lines:
        raise InvalidInputError(f"certificate file {path} is empty")
    header = lines[0].split()
    if len(header) != 4:
        raise InvalidInputError(f"bad certificate header {lines[0]!r}, want 'm D d w'")
    try:
        m, D, d, w = (int(x) for x in header)
    except ValueError as exc:
        raise InvalidInputError(f"bad certificate header {lines[0]!r}") from exc
    alice, bob = {}, {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 5 or parts[0] not in ("A", "B"):
            raise InvalidInputError(f"bad certificate record {ln!r}")
        try:
            q, ans = int(parts[1]), int(parts[2])
            sigma = tuple(int(s) for s in parts[3].split(","))
            numerator = int(parts[4])
        except ValueError as exc:
            raise InvalidInputError(f"bad certificate record {ln!r}") from exc
        side = alice if parts[0] == "A" else bob
        table = side.setdefault((q, ans), {})
        if sigma in table:
            raise InvalidInputError(f"duplicate certificate record {ln!r}")
        table[sigma] = numerator
    return Certificate(m=m, D=D, d=d, w=w, alice=alice, bob=bob)


def format_complex_matrix(M):
    rows = []
    for row in np.asarray(M, dtype=np.complex128):
        rows.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(rows)


def parse_complex_rows(lines, dim, what):
    if len(lines) != dim:
        raise InvalidInputError(f"{what}: expected {dim} matrix rows, got {len(lines)}")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, ln in enumerate(lines):
        cells = ln.split()
        if len(cells) != dim:
            raise InvalidInputError(f"{what}: row {i} has {len(cells)} entries, want {dim}")
        for j, cell in enumerate(cells):
            try:
                re, im = cell.split(",")
                out[i, j] = complex(float(re), float(im))
            except ValueError as exc:
                raise InvalidInputError(f"{what}: bad entry {cell!r} at ({i},{j})") from exc
    return out


def load_state_matrix(path):
    """State file: first line "m", then m^2 rows of m^2 "re,im" entries."""
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InvalidInputError(f"cannot read state file {path}: {exc}") from exc
    if not lines:
        raise InvalidInputError(f"state file {path} is empty")
    try:
        m = int(lines[0])
    except ValueError as exc:
        raise InvalidInputError(f"bad state header {lines[0]!r}") from exc
    return m, parse_complex_rows(lines[1:], m * m, f"state file {path}")


def save_strategy(strategy, path):
    """Header "m D s_x t_a s_y t_b", then "party q a" + matrix rows per element."""
    dim = strategy.m**strategy.D
    lines = [
        f"{strategy.m} {strategy.D} {len(strategy.alice)} "
        f"{len(strategy.alice[0])} {len(strategy.bob)} {len(strategy.bob[0])}"
    ]
    for party, povms in (("A", strategy.alice), ("B", strategy.bob)):
        for q, povm in enumerate(povms):
            for a, element in enumerate(povm):
                lines.append(f"{party} {q} {a}")
                lines.append(format_complex_matrix(element))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_strategy(path):
    try:
        with open(path) as fh:
            lines = [ln.rstrip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InvalidInputError(f"cannot read strategy file {path}: {exc}") from exc
    if not lines:
        raise InvalidInputError(f"strategy file {path} is empty")
    header = lines[0].split()
    if len(header) != 6:
        raise InvalidInputError(
            f"bad strategy header {lines[0]!r}, want 'm D s_x t_a s_y t_b'"
        )
    try:
        m, D, s_x, t_a, s_y, t_b = (int(x) for x in header)
    except ValueError as exc:
        raise InvalidInputError(f"bad strategy header {lines[0]!r}") from exc
    dim = m**D
    alice = [[None] * t_a for _ in range(s_x)]
    bob = [[None] * t_b for _ in range(s_y)]
    pos = 1
    while pos < len(lines):
        marker = lines[pos].split()
        if len(marker) != 3 or marker[0] not in ("A", "B"):
            raise InvalidInputError(f"bad strategy marker {lines[pos]!r}")
        try:
            q, a = int(marker[1]), int(marker[2])
        except ValueError as exc:
            raise InvalidInputError(f"bad strategy marker {lines[pos]!r}") from exc
        block = lines[pos + 1 : pos + 1 + dim]
        matrix = parse_complex_rows(block, dim, f"strategy element {marker}")
        try:
            if marker[0] == "A":
                alice[q][a] = matrix
            else:
                bob[q][a] = matrix
        except IndexError as exc:
            raise InvalidInputError(f"strategy marker {lines[pos]!r} out of range") from exc
        pos += 1 + dim
    for party, grid in (("A", alice), ("B", bob)):
        for q, row in enumerate(grid):
            for a, element in enumerate(row):
                if element is None:
                    raise InvalidInputError(f"strategy missing element {party} {q} {a}")
    return ExplicitStrategy(m=m, D=D, alice=alice, bob=bob)


def parse_mes_spec(spec):
    """MES specifier: "depolarized:m=<int>,eps=<float>" or "file:<path>"."""
    if spec.startswith("depolarized:"):
        fields = {}
        for item in spec[len("depolarized:") :].split(","):
            if "=" not in item:
                raise InvalidInputError(f"bad MES field {item!r} in {spec!r}")
            key, value = item.split("=", 1)
            fields[key.strip()] = value.strip()
        try:
            m = int(fields["m"])
            eps = float(fields["eps"])
        except (KeyError, ValueError) as exc:
            raise InvalidInputError(f"bad depolarized MES spec {spec!r}") from exc
        return depolarized_mes(m, eps)
    if spec.startswith("file:"):
        m, state = load_state_matrix(spec[len("file:") :])
        return align_bases(state, m)
    raise InvalidInputError(
        f"unknown MES specifier {spec!r}; use depolarized:m=..,eps=.. or file:PATH"
    )
