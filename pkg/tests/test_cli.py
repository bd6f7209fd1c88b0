import copy
import json
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxreg.cli import main
from maxreg.config import ConfigError, emit, load, normalize, parse
from maxreg.spaces import weight_bound

HERE = os.path.dirname(__file__)
DEMO = os.path.join(HERE, "..", "configs", "demo_scalar.json")


def demo():
    with open(DEMO) as fh:
        return json.load(fh)


def run(tmp_path, doc, command, *extra, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    out = tmp_path / "out"
    code = main([command, "--config", str(path), "--out", str(out), *extra])
    return code, out


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---- config -------------------------------------------------------------

def test_demo_round_trip():
    cfg = load(DEMO)
    text = emit(cfg)
    assert emit(parse(text)) == text


def test_malformed_row_reports_field(tmp_path, capsys):
    doc = demo()
    doc["pencil"]["n"] = 2
    doc["pencil"]["A"] = [[[1, 0], [0, 0]], [[0, 0]]]
    code, _ = run(tmp_path, doc, "solve")
    err = capsys.readouterr().err
    assert code == 2 and "pencil.A[1]" in err and "row must have 2 entries" in err


def test_syntax_error_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "grid": {"T": 64.0, "N": 4096},\n  "seed": ,\n}\n')
    assert main(["solve", "--config", str(path)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_unknown_field_rejected():
    doc = demo()
    doc["pencil"]["Q"] = 1
    with pytest.raises(ConfigError) as err:
        normalize(doc)
    assert err.value.field == "pencil.Q"


# ---- solve --------------------------------------------------------------

def test_solve_zero_forcing(tmp_path):
    doc = demo()
    doc["forcing"] = {"kind": "zero"}
    code, out = run(tmp_path, doc, "solve")
    assert code == 0
    s = read_json(out / "summary.json")
    assert all(v == 0 for v in s["norms_l2"].values())


def test_solve_demo(tmp_path):
    code, out = run(tmp_path, demo(), "solve")
    assert code == 0
    s = read_json(out / "summary.json")
    assert s["residual_sup"] <= 1e-9
    for key in ("config_sha256", "version", "grid", "kappa", "seed", "tool"):
        assert key in s
    assert s["grid"]["N"] == 4096
    assert s["kappa"]["L^2"] == {"kappa": 4.0, "kappa_dual": 4.0}
    names = sorted(os.listdir(out))
    assert "u.csv" in names and "component_first_order.csv" in names


def test_csv_format(tmp_path):
    _, out = run(tmp_path, demo(), "solve")
    raw = (out / "u.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").split("\n")
    assert lines[0] == "t,Re_u0,Im_u0" and lines[-1] == ""
    assert len(lines) == 4096 + 2
    first = lines[1].split(",")
    assert float(first[0]) == -64.0
    value = float(first[1])
    assert "%.17g" % value == first[1]


def test_solve_singular_pencil(tmp_path, capsys):
    doc = demo()
    doc["pencil"]["A"] = [[[0.0, 0.0]]]
    code, _ = run(tmp_path, doc, "solve")
    err = capsys.readouterr().err
    assert code == 3 and "tau = [0]" in err


def test_grid_overrides(tmp_path):
    code, out = run(tmp_path, demo(), "solve", "--grid-n", "1024", "--grid-t", "32")
    assert code == 0
    s = read_json(out / "summary.json")
    assert s["grid"]["N"] == 1024 and s["grid"]["T"] == 32.0


# ---- certify ------------------------------------------------------------

def test_certify_demo(tmp_path):
    code, out = run(tmp_path, demo(), "certify")
    assert code == 0
    c = read_json(out / "certificates.json")
    assert c["pass"] and c["route"] == "i"
    for name in ("a", "a0", "a1", "d", "c_hat_a"):
        assert c["route_i"][name]["finite"]
    assert c["route_i"]["a"]["constant"] > 0
    assert "kernel" in c and "envelope" in c


def test_certify_singular_pencil(tmp_path, capsys):
    doc = demo()
    doc["pencil"]["A"] = [[[0.0, 0.0]]]
    code, out = run(tmp_path, doc, "certify")
    err = capsys.readouterr().err
    assert code == 3
    assert "singular at tau = 0" in err
    c = read_json(out / "certificates.json")
    assert not c["pass"]


def test_certify_jump_takes_second_route(tmp_path):
    doc = demo()
    doc["pencil"]["chat"] = {"kind": "jump", "C": [[[0.5, 0.0]]]}
    code, out = run(tmp_path, doc, "certify")
    c = read_json(out / "certificates.json")
    assert c["route_i"]["c_hat"]["continuity_at_0"] is False
    assert not c["route_i"]["pass"]
    assert code == 0 and c["route"] == "ii"


# ---- regularity ---------------------------------------------------------

def test_regularity_single_l2(tmp_path):
    doc = demo()
    doc["spaces"] = [{"kind": "Lp", "p": 2.0}]
    code, out = run(tmp_path, doc, "regularity")
    assert code == 0
    r = read_json(out / "regularity.json")
    assert r["spaces"][0]["empirical"]["first_order"] <= 1 + 1e-8
    reports = [n for n in os.listdir(out) if n.startswith("regularity_space")]
    assert len(reports) == 1


def test_regularity_two_spaces(tmp_path):
    code, out = run(tmp_path, demo(), "regularity")
    assert code == 0
    reports = sorted(n for n in os.listdir(out) if n.startswith("regularity_space"))
    assert len(reports) == 2
    header = (out / "regularity.csv").read_text().split("\n")[0]
    assert header == "space,component,index,label,ratio"


def test_regularity_empty_bank(tmp_path, capsys):
    doc = demo()
    doc["bank"]["size"] = 0
    code, _ = run(tmp_path, doc, "regularity")
    assert code == 2 and "bank" in capsys.readouterr().err


def test_regularity_without_spaces(tmp_path):
    doc = demo()
    doc["spaces"] = []
    assert run(tmp_path, doc, "regularity")[0] == 2


# ---- weights ------------------------------------------------------------

def test_weights_demo(tmp_path):
    code, out = run(tmp_path, demo(), "weights")
    assert code == 0
    w = read_json(out / "weights.json")
    assert w["ap_bound"] == 64.0
    assert w["ap_constant"] <= 70.4 and w["within_bound"]
    for key in ("a1_slack", "a1_ok", "clamped_nodes", "config_sha256"):
        assert key in w


def test_weights_constant_inputs(tmp_path):
    doc = demo()
    doc["weights"]["g"] = {"kind": "constant", "value": 1.0}
    doc["weights"]["h"] = {"kind": "constant", "value": 1.0}
    code, out = run(tmp_path, doc, "weights")
    assert code == 0
    w = read_json(out / "weights.json")
    assert w["ap_constant"] == pytest.approx(1.0, abs=1e-6)
    vals = np.loadtxt(out / "weight.csv", delimiter=",", skiprows=1)[:, 1]
    assert np.max(np.abs(vals - 1)) <= 1e-9


def test_weights_p3_bound(tmp_path):
    doc = demo()
    doc["weights"]["p"] = 3.0
    code, out = run(tmp_path, doc, "weights")
    assert code == 0
    w = read_json(out / "weights.json")
    # kappa for L^2 is 4 and equals its dual
    assert w["ap_bound"] == pytest.approx(2**3 * 4.0**2 * 4.0)
    assert w["ap_bound"] == pytest.approx(weight_bound(3.0, 4.0, 4.0))


def test_weights_zero_input(tmp_path, capsys):
    doc = demo()
    doc["weights"]["g"] = {"kind": "zero"}
    code, _ = run(tmp_path, doc, "weights")
    assert code == 3 and "mathematical failure" in capsys.readouterr().err


# ---- determinism --------------------------------------------------------

def test_seeded_runs_are_byte_identical(tmp_path):
    doc = demo()
    doc["forcing"] = {"kind": "noise", "band": 10.0}
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        d.mkdir()
        code, out = run(d, doc, "solve", "--seed", "7")
        assert code == 0
        outs.append(out)
    for name in os.listdir(outs[0]):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


# ---- properties ---------------------------------------------------------

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
entry = st.tuples(finite, finite).map(list)


@st.composite
def configs(draw):
    n = draw(st.integers(1, 3))
    mat = lambda: [[draw(entry) for _ in range(n)] for _ in range(n)]
    doc = {
        "grid": {"T": draw(st.floats(1.0, 100.0)), "N": draw(st.sampled_from([64, 256, 4096]))},
        "pencil": {"n": n, "A": mat(), "B": mat(), "P": mat(),
                   "chat": draw(st.sampled_from([{"kind": "zero"}, {"kind": "memory", "lam": 2.0, "C": None}]))},
        "spaces": draw(st.lists(st.sampled_from([
            {"kind": "Lp", "p": 3.0}, {"kind": "Lorentz", "p": 1.5},
            {"kind": "Besov", "s": 0.5, "q": "inf", "phi": {"kind": "Lp", "p": 2.0}},
            {"kind": "TriebelLizorkin", "s": -1.0, "q": 2.0, "phi": {"kind": "Lp", "p": 4.0}}]), max_size=3)),
        "bank": {"kind": "standard", "size": draw(st.integers(0, 200))},
        "seed": draw(st.integers(0, 2**63)),
    }
    if doc["pencil"]["chat"]["kind"] == "memory":
        doc["pencil"]["chat"] = dict(doc["pencil"]["chat"], C=mat())
    return doc


@settings(max_examples=60, deadline=None)
@given(configs())
def test_emit_parse_emit_is_byte_identical(doc):
    once = emit(parse(json.dumps(doc)))
    assert emit(parse(once)) == once
    assert parse(once).digest() == parse(json.dumps(copy.deepcopy(doc))).digest()
