import json
import os
import re
import shlex
import subprocess
import sys

import pytest

from adt.cli import main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _readme_examples():
    with open(os.path.join(ROOT, "README.md"), encoding="utf-8") as fh:
        text = fh.read()
    out = []
    for block in re.findall(r"```console\n(.*?)```", text, re.S):
        cmd = None
        for line in block.splitlines():
            if line.startswith("$ "):
                if cmd is not None:
                    out.append(cmd)
                cmd = [line[2:], [], 0]
            elif line.startswith("[exit "):
                cmd[2] = int(line[6:-1])
            else:
                cmd[1].append(line)
        if cmd is not None:
            out.append(cmd)
    return out


def _adt(argv, env=None):
    return subprocess.run([sys.executable, "-m", "adt.cli"] + argv, cwd=ROOT, capture_output=True,
                          text=True, env=env, timeout=600)


EXAMPLES = _readme_examples()


def test_readme_has_examples():
    assert len(EXAMPLES) >= 15


@pytest.mark.parametrize("line,expected,code", EXAMPLES, ids=[e[0][4:40] for e in EXAMPLES])
def test_readme_example(line, expected, code):
    argv = shlex.split(line)
    assert argv[0] == "adt"
    r = _adt(argv[1:])
    assert r.returncode == code, r.stderr
    got = r.stdout.splitlines()
    for i, want in enumerate(expected):
        if want == "...":
            return
        assert i < len(got) and got[i] == want
    assert len(got) == len(expected)


def test_eval_in_process(capsys):
    assert main(["eval", "--alg", "N", "--der", "add", "--args", "(2 3)"]) == 0
    assert capsys.readouterr().out == "5\n"


def test_usage_errors():
    assert main(["eval", "--der", "no_such_derivation", "--args", "()"]) == 2
    assert main(["eval", "--der", "add", "--args", "(1 2", "--alg", "N"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["eval", "--bogus"])
    assert e.value.code == 2


def test_seed_is_required_for_sampling_commands():
    with pytest.raises(SystemExit) as e:
        main(["corpus-run"])
    assert e.value.code == 2


def test_ceiling_exhaustion_exits_with_three():
    env = dict(os.environ, ADT_CEILING="50")
    r = _adt(["model", "--spec", "samples/flag.spec", "--nstdax", "--depth", "5", "--nat-cap", "8"], env)
    assert r.returncode == 3
    assert "resource" in r.stderr


def test_extract_budget_exhaustion():
    r = _adt(["extract", "--der", "fact", "--args", "(4)", "--budget-ms", "1"])
    assert r.returncode == 3


def test_reports_are_sorted_json():
    r = _adt(["approx", "--der", "exp_fast", "--modulus", "zero", "--nmax", "2", "--samples", "3", "--seed", "1"])
    assert r.returncode == 1
    obj = json.loads(r.stdout)
    assert list(obj) == sorted(obj)
    assert obj["status"] == "fail" and obj["counterexample"]["n"] == 0


def test_compile_then_eliminate_round_trip(tmp_path):
    r = _adt(["compile", "--der", "isqrt"])
    p = tmp_path / "isqrt.spec"
    p.write_text(r.stdout)
    e = _adt(["eliminate-bu", "--spec", str(p), "--mode", "bool"])
    assert e.returncode == 0
    q = tmp_path / "elim.spec"
    q.write_text(e.stdout)
    c = _adt(["counts", "--spec", str(q), "--before", str(p)])
    detail = json.loads(c.stdout)["detail"]
    assert detail["axioms"] == detail["axioms_before"] + 4 and detail["bu_occurrences"] == 0
