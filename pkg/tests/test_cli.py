import json
import random

import pytest

from kcommute.cli import main
from kcommute.demos import DEMOS
from kcommute.mat import Banded, Mat, PeriodicSeq
from kcommute.serialize import canonicalize, dumps, matrix_to_json

from .helpers import cyclo_k, rand_seq, rand_sl, rand_unitriangular, rand_vk, ring


def write(path, obj):
    path.write_text(dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def factor(tmp_path, A, ringdesc, k, mode="ut", extra=()):
    inp = write(tmp_path / "in.json", matrix_to_json(A))
    out = str(tmp_path / "cert.json")
    code = main(["factor", "--ring", ringdesc, "--k", str(k), "--mode", mode,
                 "--input", inp, "--out", out, *extra])
    return code, inp, out


def test_factor_verify_round_trip(tmp_path, capsys):
    ctx = ring("Fp:7", 3)
    A = rand_unitriangular(ctx, 4, random.Random(1))
    code, inp, out = factor(tmp_path, A, "Fp:7", 3)
    assert code == 0
    assert "word length 6" in capsys.readouterr().out
    assert main(["verify", "--cert", out, "--input", inp]) == 0
    assert "verified" in capsys.readouterr().out
    text = open(out).read().strip()
    assert canonicalize(text) == text


def test_factor_to_stdout(tmp_path, capsys):
    ctx = ring("Q", 2)
    inp = write(tmp_path / "in.json", matrix_to_json(rand_unitriangular(ctx, 3, random.Random(2))))
    assert main(["factor", "--k", "2", "--input", inp]) == 0
    cap = capsys.readouterr()
    cert = json.loads(cap.out)
    assert cert["producer"] == "theorem1" and cert["claimed_length"] == 2
    assert "producer theorem1" in cap.err


def test_sl_and_vk_modes(tmp_path, capsys):
    ctx = cyclo_k(3)
    rng = random.Random(4)
    code, inp, out = factor(tmp_path, rand_sl(ctx, 3, rng), "cyclo:3", 3, "sl")
    assert code == 0 and main(["verify", "--cert", out, "--input", inp]) == 0
    code, inp, out = factor(tmp_path, rand_vk(ctx, 2, rng), "cyclo:3", 3, "vk", ["--window", "14"])
    assert code == 0 and main(["verify", "--cert", out, "--input", inp, "--window", "14"]) == 0


def test_infinite_input_json_report(tmp_path, capsys):
    ctx = cyclo_k(3)
    A = Banded(ctx, {0: PeriodicSeq.constant(ctx.one), 1: rand_seq(ctx, random.Random(3))})
    code, inp, out = factor(tmp_path, A, "cyclo:3", 3, extra=["--report", "json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["length"] == 6 and report["verification"]["passed"]
    assert main(["verify", "--cert", out, "--input", inp, "--report", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"]


def test_tampered_certificates(tmp_path, capsys):
    ctx = cyclo_k(3)
    A = rand_unitriangular(ctx, 4, random.Random(6))
    code, inp, out = factor(tmp_path, A, "cyclo:3", 3)
    cert = json.loads(open(out).read())
    capsys.readouterr()

    swapped = dict(cert, word=[cert["word"][1], cert["word"][0]] + cert["word"][2:])
    assert main(["verify", "--cert", write(tmp_path / "t1.json", swapped), "--input", inp]) == 1
    assert "FAIL product" in capsys.readouterr().out

    wrong_k = dict(cert, k=4)
    assert main(["verify", "--cert", write(tmp_path / "t2.json", wrong_k), "--input", inp]) == 1
    assert "order check failed" in capsys.readouterr().out

    longer = dict(cert, claimed_length=7)
    assert main(["verify", "--cert", write(tmp_path / "t3.json", longer), "--input", inp]) == 1
    assert "FAIL length" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", "{nope")
    assert main(["factor", "--k", "2", "--input", bad]) == 2
    assert main(["factor", "--k", "2", "--input", str(tmp_path / "missing.json")]) == 2
    assert main(["factor", "--k", "3", "--ring", "Q", "--input", bad]) == 2
    Q = ring("Q", 2)
    lower = rand_unitriangular(Q, 3, random.Random(1)).transpose()
    inp = write(tmp_path / "low.json", matrix_to_json(lower))
    assert main(["factor", "--k", "2", "--input", inp]) == 3
    assert main(["factor", "--k", "3", "--ring", "Q", "--input", inp]) == 3
    assert "precondition failed" in capsys.readouterr().err


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demos(name, capsys):
    assert main(["demo", name]) == 0
    assert "identity verified" in capsys.readouterr().out


def test_unknown_demo(capsys):
    assert main(["demo", "nope"]) == 2


def test_spec_style_cli_examples(tmp_path, capsys):
    Q = ring("Q", 2)
    inp = write(tmp_path / "id.json", matrix_to_json(Mat.identity(Q, 3)))
    out = str(tmp_path / "id-cert.json")
    assert main(["factor", "--k", "2", "--input", inp, "--out", out]) == 0
    assert json.loads(open(out).read())["claimed_length"] == 2

    minus = write(tmp_path / "minus.json", matrix_to_json(Mat.identity(Q, 2).scale(-Q.one)))
    assert main(["factor", "--k", "2", "--mode", "sl", "--input", minus]) == 3
    assert "k=2 scalar case out of scope" in capsys.readouterr().err

    A = rand_unitriangular(Q, 3, random.Random(3))
    code, inp, out = factor(tmp_path, A, "Q", 2)
    cert = json.loads(open(out).read())
    name = sorted(cert["generators"])[0]
    g = cert["generators"][name]
    g["rows"][0][1] = str(Q.from_json(g["rows"][0][1]) + 1)
    capsys.readouterr()
    assert main(["verify", "--cert", write(tmp_path / "bad.json", cert), "--input", inp]) == 1
    assert "product mismatch at (" in capsys.readouterr().out
