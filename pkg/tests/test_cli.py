import subprocess
import sys

import pytest

from opendef.cli import run
from opendef.formulas import extension, parse_formula
from opendef.model import parse_instance, print_instance, Target

from gen import K3, P3

K3_T01 = print_instance(K3, Target(2, ((0, 1),)))
P3_E = print_instance(P3, Target(2, tuple(sorted(P3.rel("E")))))
EMPTY = print_instance(P3, Target(2, ()))


@pytest.fixture
def inst(tmp_path):
    def write(text, name="x.inst"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_decide(inst):
    assert run(["decide", inst(K3_T01)]) == (0, "NOT_DEFINABLE\nwitness: 0 1 -> 0 2 ; map: 0>0, 1>2\n", "")
    assert run(["decide", inst(EMPTY)]) == (0, "DEFINABLE\n", "")


def test_decide_oracle_first_line(inst):
    for text in (K3_T01, P3_E, EMPTY):
        f = inst(text)
        a = run(["decide", f])[1].splitlines()[0]
        b = run(["decide", "--oracle", f])[1].splitlines()[0]
        assert a == b


def test_threads_output_identical(inst):
    f = inst(K3_T01)
    assert run(["decide", f, "--threads", "4"]) == run(["decide", f])


def test_witness(inst):
    assert run(["witness", inst(K3_T01)])[1] == "witness: 0 1 -> 0 2 ; map: 0>0, 1>2\n"
    assert run(["witness", inst(P3_E)])[1] == "NONE\n"


def test_stats(inst):
    code, out, _ = run(["stats", inst(K3_T01)])
    assert code == 0
    assert out == "size_vocab: 3.000\nsize_structure: 26.774\nsize_instance: 45.606\nkappa: 2\n"


def test_synth_reproduces_target(inst):
    code, out, _ = run(["synth", inst(P3_E)])
    assert code == 0
    f = parse_formula(out.strip())
    assert extension(P3, f, 2) == P3.rel("E")
    assert run(["synth", inst(EMPTY)])[1] == "x1!=x1\n"
    assert run(["synth", inst(K3_T01)])[1].startswith("NOT_DEFINABLE\n")


def test_mc_with_sentence(inst):
    f = inst(K3_T01)
    assert run(["mc", f, "--sentence", "exists x1 . E(x1,x1)"])[1] == "FALSE\n"
    assert run(["mc", f, "--sentence", "exists x1,x2 . E(x1,x2)"])[1] == "TRUE\nassignment: 0 1\n"


def test_reduce_mc_roundtrip(inst, tmp_path):
    out = tmp_path / "k3.mc"
    assert run(["reduce", "mc", inst(K3_T01), "-o", str(out)])[0] == 0
    assert out.read_text().splitlines()[-1].startswith("exists x1,x2,x3,x4 . ")
    assert run(["mc", str(out)])[1] == "TRUE\nassignment: 0 1 0 2\n"
    out2 = tmp_path / "p3.mc"
    run(["reduce", "mc", inst(P3_E, "p3.inst"), "-o", str(out2)])
    assert run(["mc", str(out2)])[1] == "FALSE\n"


def test_reduce_gadgets(inst, tmp_path):
    g = inst("vocab E 2\ndomain 3\nrel E 0 1\nrel E 1 0\nrel E 1 2\nrel E 2 1\n", "p3.graph")
    out = tmp_path / "ip.inst"
    assert run(["reduce", "induced-path", g, "-k", "3", "-o", str(out)])[0] == 0
    text = out.read_text()
    assert "# source: induced-path" in text
    s, t = parse_instance(text)
    assert t.tuples == ((3, 4, 5), (5, 4, 3))
    assert run(["decide", str(out)])[1].startswith("NOT_DEFINABLE")
    code, text, _ = run(["reduce", "clique", g, "-k", "3"])
    assert code == 0 and len(parse_instance(text)[1]) == 6
    assert run(["decide", inst(text, "cl.inst")])[1] == "DEFINABLE\n"


def test_gen_and_check_family(tmp_path):
    out = tmp_path / "h3.inst"
    assert run(["gen", "hard", "-n", "3", "-o", str(out)])[0] == 0
    s, t = parse_instance(out.read_text())
    assert s.size == 12 and t.arity == 9
    code, text, _ = run(["check-family", "-n", "3"])
    assert code == 0
    assert "iii_decide_definable: true" in text.splitlines()
    code, text, _ = run(["check-family", "-n", "3", "--alpha=columns"])
    assert "alpha: columns" in text


def test_usage_errors(inst, tmp_path):
    assert run([])[0] == 2
    assert run(["bogus"])[0] == 2
    assert run(["decide", str(tmp_path / "missing")])[0] == 2
    code, _, err = run(["decide", inst("vocab E 2\ndomain 3\nrel E 0 5\ntarget 1\n")])
    assert code == 2 and "line 3" in err
    assert run(["mc", inst(K3_T01), "--sentence", "exists x1 . E(x1"])[0] == 2
    assert run(["reduce", "clique", inst(K3_T01)])[0] == 2
    assert run(["reduce", "clique", inst("vocab E 2\ndomain 2\nrel E 0 1\n")])[0] == 2
    assert run(["gen", "hard", "-n", "2"])[0] == 2
    assert run(["decide", inst(K3_T01), "--threads", "0"])[0] == 2


def test_budget_exit_code(inst):
    big = "domain 12\ntarget 6\ntup 0 1 2 3 4 5\n"
    code, _, err = run(["decide", "--oracle", inst(big)])
    assert code == 3 and "budget" in err
    big_synth = "domain 12\ntarget 7\n"  # definable (empty), 12^7 tuples to verify
    assert run(["synth", inst(big_synth)])[0] == 3
    assert run(["synth", "--no-verify", inst(big_synth)])[0] == 0


def test_module_entry_point(inst):
    proc = subprocess.run([sys.executable, "-m", "opendef.cli", "decide", inst(K3_T01)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("NOT_DEFINABLE")
