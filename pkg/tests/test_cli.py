import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glsmcharge import cli
from glsmcharge import errors as E
from glsmcharge.toriccomb import GlsmSpec

CON_ALPHA = "0.11,0.13,0.17,0.19"
Q_ALPHA = "0.21,0.23,0.27,0.29,0.31,1.17"


def test_bundled_specs():
    assert cli.bundled_specs() == ["barnes.spec", "conifold.spec", "kp1p1.spec", "quintic.spec"]
    q = cli.parse_spec("quintic.spec")
    assert q.kappa == 1 and q.n_fields - q.kappa == 5 and q.is_calabi_yau
    assert q.r_charges[5] == 2
    assert cli.parse_spec("conifold").is_calabi_yau


def test_bad_rational_is_located(tmp_path):
    text = '{\n  "name": "x",\n  "charges": [[1], [-1]],\n  "r_charges": ["0", "1/3/5"]\n}\n'
    p = tmp_path / "bad.spec"
    p.write_text(text)
    with pytest.raises(E.ParseError, match=r"bad.spec:4: r_charges\[1\]"):
        cli.parse_spec(p)


def test_malformed_json_is_located(tmp_path):
    p = tmp_path / "broken.spec"
    p.write_text('{"name": "x",\n "charges": [[1], [-1]\n}')
    with pytest.raises(E.ParseError, match=r"broken.spec:3:1"):
        cli.parse_spec(p)


def test_float_r_charge_rejected():
    with pytest.raises(E.ParseError):
        cli.parse_spec_text('{"name": "x", "charges": [[1], [-1]], "r_charges": [0.5, 0]}')


def test_kappa_mismatch_rejected():
    with pytest.raises(E.ParseError):
        cli.parse_spec_text('{"name": "x", "kappa": 2, "charges": [[1], [-1]]}')


def test_validation_errors_propagate():
    with pytest.raises(E.RankDeficient):
        cli.parse_spec_text('{"name": "x", "charges": [[0]]}')


@pytest.mark.parametrize("name", ["quintic", "conifold", "barnes", "kp1p1"])
def test_round_trip_bundled(name):
    spec = cli.parse_spec(name)
    assert cli.parse_spec_text(cli.emit_spec(spec)) == spec


@pytest.mark.filterwarnings("ignore:charges of")
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.tuples(
    st.lists(st.lists(st.integers(-4, 4), min_size=k, max_size=k), min_size=k + 1, max_size=6),
    st.lists(st.fractions(min_value=0, max_value=4, max_denominator=12), min_size=6, max_size=6))))
def test_round_trip_random(data):
    rows, qs = data
    try:
        spec = cli.parse_spec_text(json.dumps({"name": "r", "charges": rows,
                                               "r_charges": [str(q) for q in qs[:len(rows)]]}))
    except E.RankDeficient:
        return
    again = cli.parse_spec_text(cli.emit_spec(spec))
    assert again == spec and isinstance(again, GlsmSpec)
    assert all(isinstance(q, Fraction) for q in again.r_charges)


def test_exit_codes_distinct():
    codes = [e.exit_code for e in E.ALL_ERRORS]
    assert len(set(codes)) == len(codes) and 0 not in codes and 2 not in codes
    exported = {v for v in vars(E).values() if isinstance(v, type) and issubclass(v, E.GlsmError)}
    assert exported - {E.GlsmError} == set(E.ALL_ERRORS)


def _run(argv):
    return cli.run(argv)


def test_phases_quintic_lg():
    env = _run(["phases", "quintic", "--zeta=-1"])
    assert env["schema"] == "glsm-charge/1"
    box = env["result"]["box"]
    assert [b["age"] for b in box] == ["0", "1", "2", "3", "4"]
    assert all(b["group_order"] == 5 for b in box)
    assert env["result"]["anticones"] == [{"indices": [5], "group_order": 5, "cyclic_factors": [5]}]


def test_wall_command():
    env = _run(["wall", "conifold.spec", "--zeta-plus", "3", "--zeta-minus=-3", "--b", "0",
                "--brane", "0:1", "--alpha", CON_ALPHA])
    assert env["result"]["max_discrepancy"] < 1e-6
    assert env["diagnostics"]["grr_margin"] == "1"


def test_zd2_below_threshold_exit_code(capsys):
    code = cli.main(["zd2", "quintic.spec", "--zeta", "7", "--alpha", Q_ALPHA])
    assert code == E.NotConverging.exit_code
    captured = capsys.readouterr()
    assert captured.out == "" and "NotConverging" in captured.err


def test_zd2_and_csv(tmp_path):
    out = tmp_path / "series.csv"
    env = _run(["zd2", "barnes", "--zeta", "2", "--alpha", "0.3,0.4", "--emit-csv", str(out)])
    assert env["value"]["re"] == pytest.approx(-0.6518229120723478, rel=1e-10)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["index", "partial_re", "partial_im", "tail_estimate"]
    assert float(rows[-1][1]) == env["value"]["re"]


def test_mb_and_csv(tmp_path):
    out = tmp_path / "contour.csv"
    env = _run(["mb", "barnes", "--zeta", "2", "--alpha", "0.3,0.4", "--delta", "0.1",
                "--emit-csv", str(out)])
    assert env["value"]["re"] == pytest.approx(-0.6518229120723478, rel=1e-9)
    assert env["diagnostics"]["decay_certified"] is True
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["s", "integrand_re", "integrand_im"] and len(rows) > 100


def test_brane_flag_two_dimensional():
    env = _run(["zd2", "kp1p1", "--zeta", "4,8", "--alpha", "0.11,0.13,0.17,0.19,0.23",
                "--brane", "1 0:2,0 -1:-1", "--b", "0.1,0"])
    a = _run(["zd2", "kp1p1", "--zeta", "4,8", "--alpha", "0.11,0.13,0.17,0.19,0.23",
              "--brane", "1 0:1", "--b", "0.1,0"])["value"]
    b = _run(["zd2", "kp1p1", "--zeta", "4,8", "--alpha", "0.11,0.13,0.17,0.19,0.23",
              "--brane", "0 -1:1", "--b", "0.1,0"])["value"]
    assert env["value"]["re"] == pytest.approx(2 * a["re"] - b["re"], rel=1e-12)


def test_central_charge_command():
    env = _run(["central-charge", "barnes", "--zeta", "2", "--log-y=-2", "--lambda", "0.3,0.4",
                "--z", "1,0"])
    assert env["value"]["re"] == pytest.approx(-0.6518229120723478, rel=1e-10)


def test_ifun_commands():
    env = _run(["ifun", "quintic", "--zeta=-1", "--anticone", "5", "--lambda",
                "0.1,0.2,0.3,0.4,0.5,0.6", "--z", "1.3,0.1", "--log-y", "0.2", "--cutoff", "9"])
    assert len(env["result"]["box_values"]) == 5
    env = _run(["ifun", "quintic", "--zeta", "1", "--anticone", "0", "--lambda",
                "1.1,1.2,1.3,1.4,1.5,0.9", "--cutoff", "4", "--k-theory", "--q", "0.5,0.1",
                "--y", "0.3"])
    assert len(env["result"]["box_values"]) == 1


def test_convergence_command():
    env = _run(["convergence", "quintic", "--zeta", "9", "--anticone", "0"])
    assert env["result"]["contains"] is True
    env = _run(["convergence", "quintic", "--zeta", "7", "--anticone", "0"])
    assert env["result"]["contains"] is False


def test_envelope_determinism():
    argv = ["mb", "quintic", "--zeta", "10", "--alpha", Q_ALPHA]
    a, b = _run(argv), _run(argv + ["--threads", "4"])
    assert a["value"] == b["value"] and a["spec_hash"] == b["spec_hash"]
    assert a["input_hash"] == b["input_hash"]
    c = _run(["mb", "quintic", "--zeta", "10", "--alpha", Q_ALPHA, "--tol", "1e-9"])
    assert c["input_hash"] != a["input_hash"]


def test_missing_alpha_is_usage_error(capsys):
    assert cli.main(["zd2", "conifold", "--zeta", "3"]) == 2
    assert "alpha" in capsys.readouterr().err


def test_console_module_entry():
    out = subprocess.run([sys.executable, "-m", "glsmcharge", "phases", "conifold", "--zeta", "1"],
                         capture_output=True, text=True, check=True)
    env = json.loads(out.stdout)
    assert env["result"]["walls"] == [{"normal": [1], "interior_point": ["0"]}]


def test_on_wall_exit_code():
    out = subprocess.run([sys.executable, "-m", "glsmcharge", "phases", "conifold", "--zeta", "0"],
                         capture_output=True, text=True)
    assert out.returncode == E.OnWall.exit_code and out.stdout == ""
