import io
import json

import numpy as np
import pytest

from bkrlab import cli
from bkrlab.dyadic import DyadicSet, dump_dyadic, grid_shape, refine
from bkrlab.formats import load_event, dump_event
from bkrlab.sampling import bernoulli_event
from bkrlab.space import Event, SpaceShape, cylinder_from_pattern

EX83_TEXT = "shape: 2^6\n11****\n**11**\n1**0**\n*11***\n**00**\n****00\n**1**0\n***00*\n"


@pytest.fixture
def run(capsys, monkeypatch):
    def go(*argv, stdin=None):
        monkeypatch.setattr(cli, "_stdin_cache", None)
        if stdin is not None:
            monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
        code = cli.main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return go


@pytest.fixture
def ex83(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text(EX83_TEXT)
    return p


def test_prod_from_stdin(run, tmp_path):
    out_path = tmp_path / "aa.bkr"
    code, out, _ = run("prod", "-", "-", "--out", out_path, stdin=EX83_TEXT)
    assert code == 0
    doc = json.loads(out)
    assert doc["card_a"] == 54 and doc["check"]["holds"]
    aa = load_event(out_path.read_bytes())
    sh = SpaceShape((2,) * 6)
    assert cylinder_from_pattern(sh, "111***") <= aa
    assert cylinder_from_pattern(sh, "***000") <= aa


def test_prod_empty_and_mismatch(run, tmp_path):
    e = tmp_path / "e.txt"
    e.write_text("shape: 2,2\n")
    code, out, _ = run("prod", e, e)
    assert code == 0 and json.loads(out)["card_prod"] == 0
    other = tmp_path / "o.txt"
    other.write_text("shape: 2,2,2\n***\n")
    code, _, err = run("prod", e, other)
    assert code == 2 and err.startswith("error[input]:")


def test_prod_with_measure_file(run, tmp_path, ex83):
    m = tmp_path / "m.txt"
    m.write_text("1/3 2/3\n" * 6)
    code, out, _ = run("prod", ex83, ex83, "--measure", m)
    assert code == 0 and json.loads(out)["measure"] == "file"
    code, _, err = run("prod", ex83, ex83, "--measure", tmp_path / "missing.txt")
    assert code == 2 and err.startswith("error[io]:")


def test_rfold_and_chain(run, ex83, tmp_path):
    code, out, _ = run("rfold", ex83, ex83, ex83, ex83)
    assert code == 0 and json.loads(out)["card_prod"] == 0
    code, out, _ = run("rfold", ex83)
    assert code == 0 and json.loads(out)["card_prod"] == 54
    code, out, _ = run("chain", ex83, ex83, ex83, ex83)
    assert code == 0 and json.loads(out)["card_prod"] == 0
    out_path = tmp_path / "bal.bkr"
    code, out, _ = run("chain", ex83, ex83, ex83, ex83, "--tree", "((0,1),(2,3))", "--out", out_path)
    assert code == 0 and json.loads(out)["tree"] == "(A1A2)(A3A4)"
    assert (1, 1, 1, 0, 0, 0) in load_event(out_path.read_bytes())
    code, _, err = run("chain", ex83)
    assert code == 2 and err.startswith("error[input]:")
    code, _, err = run("chain", ex83, ex83, "--tree", "((0,1),5)")
    assert code == 2


def test_binary_event_input(run, tmp_path):
    sh = SpaceShape((3, 2))
    a = bernoulli_event(sh, np.random.default_rng(0))
    p = tmp_path / "a.bkr"
    p.write_bytes(dump_event(a))
    code, out, _ = run("prod", p, p)
    assert code == 0 and json.loads(out)["card_a"] == len(a)


def test_fuzz_suites_pass(run):
    for kind in ["ineq2", "ineqr", "oracle", "containment", "dyadic", "quantile"]:
        code, out, _ = run("fuzz", kind, "--trials", 40, "--seed", 5)
        doc = json.loads(out)
        assert code == 0 and doc["status"] == "pass", kind


def test_fuzz_usage_errors(run):
    code, _, err = run("fuzz", "ineq2", "--trials", 0, "--seed", 1)
    assert code == 2 and err.startswith("error[usage]:")
    code, _, err = run("fuzz", "nonsense")
    assert code == 2 and "error[usage]:" in err
    code, _, err = run("fuzz", "ineq2", "--workers", 0)
    assert code == 2


def test_fuzz_auto_seed_is_printed(run):
    code, out, err = run("fuzz", "ineq2", "--trials", 5)
    assert code == 0
    seed = int(err.split("seed:")[1].split()[0])
    assert json.loads(out)["seed"] == seed


def test_fuzz_oracle_exhaustive(run):
    code, out, _ = run("fuzz", "oracle", "--exhaustive", "--shape", "2,2")
    doc = json.loads(out)
    assert code == 0 and doc["pairs"] == 256 and doc["status"] == "pass"


def test_assoc_commands(run, tmp_path):
    code, out, _ = run("assoc", "--fixture", "example-8-3")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run("assoc", "--r", 3, "--shape", "2^4", "--seed", 0)
    assert code == 0 and json.loads(out)["note"] == "1 class"
    code, out, err = run("assoc", "--r", 4, "--shape", "2^5", "--strategy", "exhaustive", "--budget", 1000)
    assert code == 3 and err.startswith("error[resource]:")
    assert json.loads(out)["instance_count"] == 1228158
    report = tmp_path / "r.json"
    code, out, _ = run("assoc", "--r", 4, "--shape", "2^6", "--seed", 1, "--budget", 5000, "--out", report)
    doc = json.loads(report.read_text())
    assert code == 0 and doc["status"] == "witness" and doc["witness"]["verified"]
    code, _, err = run("assoc", "--r", 4)
    assert code == 2 and err.startswith("error[usage]:")


def test_approximation_command(run, tmp_path):
    rng = np.random.default_rng(3)
    a = DyadicSet(2, 3, bernoulli_event(grid_shape(2, 3), rng))
    b = DyadicSet(2, 3, bernoulli_event(grid_shape(2, 3), rng))
    pa, pb = tmp_path / "a.bkd", tmp_path / "b.bkd"
    pa.write_bytes(dump_dyadic(a))
    pb.write_bytes(dump_dyadic(b))
    code, out, _ = run("section4", pa, pb, "--n", 2, "--show", "--save-prime", tmp_path / "p")
    assert code == 0
    doc = json.loads(out[:out.index("A:\n")])
    assert doc["status"] == "pass" and all(doc["checks"].values())
    assert (tmp_path / "p.a.bkd").exists()
    code, _, err = run("section4", pa, pb, "--n", 4)
    assert code == 2 and err.startswith("error[usage]:")
    # already resolution-2 measurable: zero error
    c = refine(DyadicSet(2, 2, bernoulli_event(grid_shape(2, 2), rng)), 3)
    pc = tmp_path / "c.bkd"
    pc.write_bytes(dump_dyadic(c))
    code, out, _ = run("section4", pc, pc, "--n", 2)
    doc = json.loads(out)
    assert code == 0 and doc["delta"] == "0"
    assert all(t["err_a"] == "0" and t["err_b"] == "0" for t in doc["terms"])


def test_quantile_command(run, tmp_path):
    d = tmp_path / "d.txt"
    d.write_text("0 1/3\n5 2/3\n")
    ev = tmp_path / "e.txt"
    ev.write_text("shape: 2,2\n0*\n")
    code, out, _ = run("quantile", "--dist", d, "--dist", d, "--u", "1/4", "1/3", "--event", ev)
    doc = json.loads(out)
    assert code == 0
    assert doc["distributions"][0]["quantiles"] == {"1/4": "0", "1/3": "5"}
    assert doc["pullback"]["probability_support"] == doc["pullback"]["probability_interval_grid"] == "1/3"
    code, _, err = run("quantile", "--dist", d, "--u", "1")
    assert code == 2 and err.startswith("error[input]:")
    code, _, err = run("quantile", "--dist", d, "--u", "half")
    assert code == 2 and err.startswith("error[input]:")
    code, _, err = run("quantile", "--dist", tmp_path / "nope.txt")
    assert code == 2 and err.startswith("error[io]:")


@pytest.mark.parametrize("argv", [
    ("fuzz", "ineq2", "--trials", 600, "--seed", 11),
    ("fuzz", "dyadic", "--trials", 100, "--seed", 2),
    ("fuzz", "oracle", "--trials", 300, "--seed", 8, "--shape", "2,2,2"),
    ("assoc", "--r", 4, "--shape", "2^6", "--seed", 1, "--budget", 5000, "--dump-events"),
    ("assoc", "--r", 4, "--shape", "2^4", "--strategy", "exhaustive", "--budget", 500),
])
def test_reports_byte_identical_across_workers(run, argv):
    outs = set()
    for w in (1, 4, 1):
        code, out, _ = run(*argv, "--workers", w)
        assert code == 0
        outs.add(out)
    assert len(outs) == 1


def test_empty_text_event_for_singleton_alphabet(run, tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("shape: 1\n*\n")
    code, out, _ = run("prod", p, p)
    assert code == 0 and json.loads(out)["card_prod"] == 1
    assert Event.full(SpaceShape((1,))).is_full()
