import io
import json
import shlex

import numpy as np
import pytest

from lipfree.cli import Report, dispatch


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


VEE = {"labels": ["0", "a", "b"], "dist": [[0, 1, 1], [1, 0, 2], [1, 2, 0]], "base": 0}
SUPER = {"labels": ["0", "a", "b", "m"],
         "dist": [[0, 1, 1, 1], [1, 0, 2, 1], [1, 2, 0, 1], [1, 1, 1, 0]], "base": 0}


@pytest.fixture
def files(tmp_path):
    vee = write(tmp_path, "vee.json", VEE)
    return {
        "vee": vee,
        "super": write(tmp_path, "super.json", SUPER),
        "bad": write(tmp_path, "bad.json", {"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}),
        "map": write(tmp_path, "map.json", {"space": "vee.json", "codomain": "scalar", "values": [0, 1, -1]}),
        "vmap": write(tmp_path, "vmap.json", {"space": VEE, "codomain": "l2:2", "values": [[0, 0], [1, 0], [-1, 0]]}),
        "mu": write(tmp_path, "mu.json", {"space": VEE, "coeffs": {"a": 1, "b": 1}}),
        "balls": write(tmp_path, "balls.json", {"norm": "l2:2", "balls": [
            {"center": [0, 0], "radius": 1}, {"center": [2, 0], "radius": 1},
            {"center": [1, 1.7320508075688772], "radius": 1}, {"center": [1, 0.5773502691896257], "radius": 1.2}]}),
        "lballs": write(tmp_path, "lballs.json", {"norm": "linf:2", "balls": [
            {"center": [0, 0], "radius": 1}, {"center": [2, 0], "radius": 1}, {"center": [1, 2], "radius": 1.1}]}),
    }


def test_validate(files):
    code, out, _ = run(["validate", files["vee"]])
    assert code == 0 and json.loads(out)["result"]["valid"]
    code, out, err = run(["validate", files["bad"]])
    assert code == 1
    assert "TriangleViolation" in err
    assert json.loads(out)["result"]["violations"][0]["kind"] == "TriangleViolation"
    code, out, _ = run(["validate", files["bad"], "--repair", "shortest-path"])
    assert code == 0 and json.loads(out)["result"]["space"]["dist"][0][2] == 2


def test_lipnorm(files):
    code, out, _ = run(["lipnorm", files["map"], "--quotients"])
    res = json.loads(out)["result"]
    assert code == 0 and res["lip_norm"] == 1.0 and len(res["quotients"]) == 6
    code, out, _ = run(["lipnorm", files["vmap"]])
    assert json.loads(out)["result"]["lip_norm"] == 1.0


def test_mcshane_and_extend(files):
    code, out, _ = run(["mcshane", files["map"], files["super"], "--variant", "sup"])
    res = json.loads(out)["result"]
    assert code == 0 and res["values"][:3] == [0, 1, -1] and res["lip_norm"] == 1.0
    code, out, _ = run(["extend", files["vmap"], files["super"]])
    res = json.loads(out)["result"]
    assert code == 0 and res["constant"] == pytest.approx(1.0) and res["certified"]


def test_krnorm(files):
    code, out, _ = run(["krnorm", files["mu"], "--dual", "--witness"])
    res = json.loads(out)["result"]
    assert code == 0
    assert res["primal"] == pytest.approx(2.0) and res["dual"] == pytest.approx(2.0)
    assert res["gap_within_tol"] and res["witness"]["a"] == pytest.approx(1.0)


def test_balls(files):
    code, out, _ = run(["balls", "check", files["balls"]])
    res = json.loads(out)["result"]
    assert code == 0 and res["joint"]["status"] == "empty"
    assert res["joint"]["lower_bound"] >= 0.154
    code, out, _ = run(["balls", "bridge", files["lballs"]])
    res = json.loads(out)["result"]
    assert code == 0 and res["verified"]
    code, out, _ = run(["balls", "sample", "--norm", "l2:2", "--trials", "5", "--canonical"])
    assert code == 0 and json.loads(out)["result"]["violations"]
    code, _, err = run(["balls", "bridge", files["balls"]])
    assert code == 1 and "polyhedral" in err


def test_witness_and_embed():
    code, out, _ = run(["witness", "--target", "l2:2", "--trials", "3", "--canonical", "--refine-steps", "0"])
    res = json.loads(out)["result"]
    assert code == 0 and res["exceeds_one"] and res["source"] == "seeded:0"
    code, out, _ = run(["embed", "l1:3"])
    res = json.loads(out)["result"]
    assert code == 0 and res["rows"] == 4 and res["isometry_max_error"] <= 1e-12
    code, _, err = run(["embed", "l2:2"])
    assert code == 1 and "InvalidNorm" in err


def test_classify_exit_codes_and_replay():
    code, out, _ = run(["classify", "--target", "linf:2", "--trials", "20", "--seed", "1", "--refine-steps", "10"])
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "CONSISTENT-WITH-L1-PREDUAL"
    assert rep["config"]["seed"] == 1 and "feas_tol" in rep["config"]["tolerances"]
    code, out, _ = run(["classify", "--target", "l2:2", "--trials", "20", "--seed", "1", "--refine-steps", "10"])
    rep = Report.from_json(json.loads(out))
    assert code == 2 and rep.verdict == "REFUTED"
    code2, out2, _ = run(shlex.split(rep.replay)[1:])
    assert code2 == 2
    assert Report.from_json(json.loads(out2)).stable_json() == rep.stable_json()


def test_report_round_trip():
    code, out, _ = run(["embed", "linf:2"])
    rep = Report.from_json(json.loads(out))
    assert rep.to_json() == json.loads(out)


def test_markdown_and_out(tmp_path):
    target = tmp_path / "r.md"
    code, out, _ = run(["classify", "--target", "l2:2", "--trials", "5", "--refine-steps", "0",
                        "--format", "md", "--out", str(target)])
    assert code == 2 and out == ""
    text = target.read_text()
    assert "**Verdict: REFUTED**" in text and "| L1-predual |" in text and "Replay:" in text


def test_usage_errors(capsys):
    assert run(["classify"])[0] == 1
    assert "input schemas" in capsys.readouterr().err
    assert run(["nonsense"])[0] == 1
    assert run(["lipnorm", "/does/not/exist.json"])[0] == 1
    assert run(["classify", "--target", "lp:2"])[0] == 1
