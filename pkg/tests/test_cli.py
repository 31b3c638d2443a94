import json
import subprocess
import sys
from pathlib import Path

import pytest

from bigcheck.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_check_identity(capsys):
    code, out = run(["check", str(DATA / "groups" / "identity_gl2_f7.json")], capsys)
    assert code == 0 and json.loads(out.out)["verdict"] == "not_big"


def test_check_with_oracle(capsys):
    code, out = run(["check", str(DATA / "groups" / "gl2_f7.json"), "--M", "2", "--oracle"],
                    capsys)
    rep = json.loads(out.out)
    assert code == 0 and rep["oracle"]["agree"] and rep["verdict"] == "big"


def test_check_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["check", str(bad)], capsys)[0] == 2
    singular = tmp_path / "singular.json"
    singular.write_text(json.dumps({"field": {"char": 7, "degree": 1, "modulus": [0, 1]},
                                    "n": 2, "generators": [[[1, 1], [1, 1]]]}))
    assert run(["check", str(singular)], capsys)[0] == 2


def test_check_cap_exceeded(capsys):
    code, _ = run(["check", str(DATA / "groups" / "gl2_f7.json"), "--cap", "10"], capsys)
    assert code == 3


def test_trichotomy_empty_and_bad(tmp_path, capsys):
    cfg = tmp_path / "empty.json"
    cfg.write_text("{}")
    out = tmp_path / "out.jsonl"
    assert run(["trichotomy", str(cfg), "--out", str(out)], capsys)[0] == 0
    assert out.read_text() == ""
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(["trichotomy", str(bad), "--out", str(out)], capsys)[0] == 2


def test_lemma_suites(capsys):
    assert run(["lemmas", "--suite", "forced_zero", "--dmax", "6"], capsys)[0] == 0
    code, out = run(["lemmas", "--suite", "niveau", "--N", "2", "--delta", "1", "--l", "11",
                     "--d", "2"], capsys)
    assert code == 0 and json.loads(out.out)["injective"]
    assert run(["lemmas", "--suite", "convolution", "--random", "200", "--seed", "7"],
               capsys)[0] == 0


def test_build_and_parse_errors(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["build", "borel", "--field", "5", "--params", '{"n": 2, "d": 1}',
                "--out", str(out)], capsys)[0] == 0
    code, o = run(["check", str(out)], capsys)
    assert code == 0 and json.loads(o.out)["order"] == 80
    with pytest.raises(SystemExit) as e:
        main(["check"])
    assert e.value.code == 2


def test_seed_position(capsys):
    a = run(["--seed", "7", "lemmas", "--suite", "convolution", "--random", "50"], capsys)[1].out
    b = run(["lemmas", "--suite", "convolution", "--random", "50", "--seed", "7"], capsys)[1].out
    assert a == b


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "bigcheck.cli", "check",
                        str(DATA / "groups" / "identity_gl2_f7.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and '"not_big"' in r.stdout
