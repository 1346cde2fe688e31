import json

import numpy as np
import pytest

from conftest import random_povm
from noisygames import games, io, prover
from noisygames.cli import main


@pytest.fixture()
def chsh_setup(tmp_path):
    game_path = tmp_path / "game.json"
    io.save_game(games.chsh_game(), game_path)
    rng = np.random.default_rng(77)
    strat = prover.ExplicitStrategy(
        m=2,
        D=1,
        alice=[random_povm(rng, 2, 2) for _ in range(2)],
        bob=[random_povm(rng, 2, 2) for _ in range(2)],
    )
    strat_path = tmp_path / "strategy.txt"
    io.save_strategy(strat, strat_path)
    return tmp_path, game_path, strat_path


MES = "depolarized:m=2,eps=0.25"


def test_prove_then_verify_roundtrip(chsh_setup, capsys):
    tmp_path, game_path, strat_path = chsh_setup
    cert_path = tmp_path / "cert.txt"
    rc = main([
        "prove", "--game", str(game_path), "--strategy", str(strat_path),
        "--mes", MES, "--delta", "0.05", "--width", "20", "--out", str(cert_path),
    ])
    assert rc == 0
    assert cert_path.exists()
    rc = main([
        "verify", "--game", str(game_path), "--cert", str(cert_path),
        "--mes", MES, "--beta", "0.1", "--delta", "0.05",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ACCEPT" in out


def test_verify_rejects_high_beta(chsh_setup):
    tmp_path, game_path, strat_path = chsh_setup
    cert_path = tmp_path / "cert.txt"
    main([
        "prove", "--game", str(game_path), "--strategy", str(strat_path),
        "--mes", MES, "--delta", "0.05", "--width", "20", "--out", str(cert_path),
    ])
    rc = main([
        "verify", "--game", str(game_path), "--cert", str(cert_path),
        "--mes", MES, "--beta", "0.999", "--delta", "0.05",
    ])
    assert rc == 1


def test_verify_identity_violation_lists_record(chsh_setup, capsys):
    tmp_path, game_path, strat_path = chsh_setup
    cert_path = tmp_path / "cert.txt"
    main([
        "prove", "--game", str(game_path), "--strategy", str(strat_path),
        "--mes", MES, "--delta", "0.05", "--width", "20", "--out", str(cert_path),
    ])
    cert = io.load_certificate(cert_path)
    key = sorted(cert.alice[(0, 0)])[0]
    cert.alice[(0, 0)][key] += 1
    io.save_certificate(cert, cert_path)
    rc = main([
        "verify", "--game", str(game_path), "--cert", str(cert_path),
        "--mes", MES, "--beta", "0.1", "--delta", "0.05",
    ])
    assert rc == 1
    out = capsys.readouterr().out
    assert "identity violation" in out


def test_verify_truncated_file_exits_2(chsh_setup, capsys):
    tmp_path, game_path, _ = chsh_setup
    cert_path = tmp_path / "cert.txt"
    cert_path.write_text("2 1 1\n")
    rc = main([
        "verify", "--game", str(game_path), "--cert", str(cert_path),
        "--mes", MES, "--beta", "0.1",
    ])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_prove_rejects_non_povm(tmp_path, capsys):
    game_path = tmp_path / "game.json"
    io.save_game(games.chsh_game(), game_path)
    strat_path = tmp_path / "strategy.txt"
    eye = "1.0,0.0 0.0,0.0\n0.0,0.0 1.0,0.0"
    blocks = []
    for party, q_count in (("A", 2), ("B", 2)):
        for q in range(q_count):
            for a in range(2):
                blocks.append(f"{party} {q} {a}\n{eye}")
    strat_path.write_text("2 1 2 2 2 2\n" + "\n".join(blocks) + "\n")
    rc = main([
        "prove", "--game", str(game_path), "--strategy", str(strat_path),
        "--mes", MES, "--delta", "0.05", "--width", "16",
        "--out", str(tmp_path / "c.txt"),
    ])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_psd_test_accept_reject(tmp_path, capsys):
    op_path = tmp_path / "op.txt"
    op_path.write_text("2 3 std:2\n0,0,0 : 1.0\n")
    rc = main(["psd-test", "--op", str(op_path), "--beta", "0.5", "--delta", "0.1",
               "--degree", "1"])
    assert rc == 0
    op_path.write_text("2 3 std:2\n0,0,0 : -1.0\n")
    rc = main(["psd-test", "--op", str(op_path), "--beta", "0.5", "--delta", "0.1",
               "--degree", "1"])
    assert rc == 1


def test_psd_test_json_schema(tmp_path, capsys):
    op_path = tmp_path / "op.txt"
    op_path.write_text("2 2 std:2\n0,0 : 0.75\n3,3 : 0.25\n")
    rc = main(["psd-test", "--op", str(op_path), "--beta", "0.5", "--delta", "0.1",
               "--degree", "2", "--json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == "1"
    assert payload["report"]["accept"] is True


def test_reports_byte_identical(tmp_path, capsys):
    op_path = tmp_path / "op.txt"
    op_path.write_text("2 3 std:2\n3,1,0 : 0.5\n0,2,1 : 0.4\n0,0,0 : -0.4\n")
    args = ["psd-test", "--op", str(op_path), "--beta", "0.5", "--delta", "0.2",
            "--degree", "2", "--tau", "0.4", "--json"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    second = capsys.readouterr().out
    assert first == second


def test_params_subcommand(capsys):
    rc = main(["params", "--s", "2", "--t", "2", "--m", "2", "--rho", "0.75",
               "--epsilon", "0.1", "--json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["params"]["eps_prime"] == pytest.approx(3.125e-4)
    assert payload["params"]["delta"] == pytest.approx(5.425347222222225e-11)


def test_selftest_prg(capsys):
    rc = main(["selftest", "prg"])
    assert rc == 0
    assert "[pass] prg" in capsys.readouterr().out


def test_missing_file_exits_2(tmp_path, capsys):
    rc = main(["verify", "--game", str(tmp_path / "nope.json"), "--cert",
               str(tmp_path / "nope.txt"), "--mes", MES, "--beta", "0.5"])
    assert rc == 2
