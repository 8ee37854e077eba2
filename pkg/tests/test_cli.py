import json
import subprocess
import sys

from carnot_jets import cli
from carnot_jets.contact import counterexample_automorphism, identity_map, translation_map
from carnot_jets.formats import map_from_json, map_to_json, point_from_json, point_to_json
from carnot_jets.jets import jet_space

from conftest import alg


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out else None), err


def test_report_is_stable(capsys):
    c1, a, _ = run(capsys, "heisenberg-report")
    c2, b, _ = run(capsys, "heisenberg-report")
    assert c1 == c2 == 0 and a == b
    assert "dual basis of P^2_e: {x^2/2, xy, y^2/2, z - xy/2}" in a
    assert "A_(1,0,1) = -2X*⊗X*⊗Y* - X*⊗Y*⊗X*" in a
    assert "X~ = d_x + (-y/2) d_z" in a


def test_hd_basis(capsys):
    code, data, _ = run_json(capsys, "hd-basis", "heisenberg(1)", "2")
    assert code == 0
    last = data[-1]
    assert last["index"] == [0, 0, 1] and last["tensor"] == {"XY": ["-1/1"]}
    code, data, _ = run_json(capsys, "hd-basis", "heisenberg(1)", "1", "--wdim", "2")
    assert code == 0 and len(data) == 4 and data[1]["w"] == 2


def test_tau_table(capsys):
    code, data, _ = run_json(capsys, "tau-table", "heisenberg(1)", "3")
    row = next(r for r in data["rows"] if r["label"] == "XXY")
    cols = [tuple(c) for c in data["columns"]]
    assert row["tau"][cols.index((2, 1, 0))] == "1/1"
    assert row["tau"][cols.index((1, 0, 1))] == "-2/1"


def test_dual_poly_basis_and_taylor(capsys, tmp_path):
    code, data, _ = run_json(capsys, "dual-poly-basis", "heisenberg(1)", "3")
    assert [d["text"] for d in data] == ["x^3/6", "x^2y/2", "xy^2/2", "y^3/6", "xz - x^2y/2", "yz - xy^2/2"]
    poly = tmp_path / "f.json"
    poly.write_text(json.dumps({"0,0,1": ["1"], "1,1,0": ["-1/2"]}))
    code, data, _ = run_json(capsys, "taylor", "heisenberg(1)", "2", "--poly", str(poly), "--point", "0,0,0")
    assert code == 0
    assert data["components"][2]["poly"] == {"0,0,1": ["1/1"], "1,1,0": ["-1/2"]}
    assert data["components"][1]["poly"] == {}


def test_bch_and_validate(capsys, tmp_path):
    code, data, _ = run_json(capsys, "bch", "heisenberg(1)", "1,0,0", "0,1,0")
    assert data["bch"] == ["1/1", "1/1", "1/2"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "labels": ["A", "B"], "weights": [1, 2], "brackets": {}}))
    code, data, _ = run_json(capsys, "validate", str(bad))
    assert code == 2 and not data["checks"]["bracket_generating"]["ok"]


def test_jet_algebra(capsys):
    code, data, _ = run_json(capsys, "jet-algebra", "heisenberg(1)", "1", "1")
    assert code == 0 and data["valid"] and data["layer_dims"] == [4, 2]


def test_jet_points_round_trip(capsys, tmp_path):
    js = jet_space(alg("heisenberg(1)"), 1, 1)
    p = js.unflat([1, 2, 3, 4, 5, 6])
    q = js.unflat([-1, 0, "1/2", 0, 1, 1])
    assert point_from_json(js, point_to_json(p)) == p
    (tmp_path / "p.json").write_text(json.dumps(point_to_json(p)))
    (tmp_path / "q.json").write_text(json.dumps(point_to_json(q)))
    code, data, _ = run_json(capsys, "jet-mul", "heisenberg(1)", "1", "1", "--p", str(tmp_path / "p.json"),
                             "--q", str(tmp_path / "q.json"))
    assert code == 0 and point_from_json(js, data) == p * q


def test_jet_exp(capsys, tmp_path):
    f = tmp_path / "x.json"
    f.write_text(json.dumps({"x": ["1", "0", "0"], "X": {"1": {"X": ["0"], "Y": ["1"]}}}))
    code, data, _ = run_json(capsys, "jet-exp", "heisenberg(1)", "1", "1", "--x", str(f))
    js = jet_space(alg("heisenberg(1)"), 1, 1)
    assert code == 0 and point_from_json(js, data) == js.exp([1, 0, 0], {1: [0, 1]})


def test_map_round_trip_and_contact(capsys, tmp_path):
    js = jet_space(alg("heisenberg(1)"), 1, 1)
    F = translation_map(js, js.unflat([1, 0, 2, 0, 1, 0]))
    assert map_from_json(map_to_json(F)).equals(F)
    f = tmp_path / "F.json"
    f.write_text(json.dumps(map_to_json(F)))
    code, data, _ = run_json(capsys, "contact-check", "--map", str(f))
    assert code == 0 and data["contact"]
    pt = tmp_path / "p.json"
    hi = js.higher()
    pt.write_text(json.dumps(point_to_json(hi.unflat([0] * hi.N))))
    code, data, _ = run_json(capsys, "prolong", "heisenberg(1)", "1", "1", "--map", str(f), "--point", str(pt))
    assert code == 0 and data["base"] == ["1/1", "0/1", "2/1"]


def test_non_contact_map_exit_code(capsys, tmp_path):
    js = jet_space(alg("heisenberg(1)"), 1, 1)
    data = map_to_json(identity_map(js))
    data["F^1"][0] = {**data["F^1"][0], "0,0,0,0,0,0": "1"}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, out, _ = run_json(capsys, "contact-check", "--map", str(f))
    assert code == 2 and out["witness"]["form"] == "omega^0"


def test_deprolong_obstruction_exit_code(capsys, tmp_path):
    F, _ = counterexample_automorphism(alg("abelian(1)"))
    f = tmp_path / "F.json"
    f.write_text(json.dumps(map_to_json(F)))
    code, out, err = run(capsys, "deprolong", "--map", str(f))
    assert code == 2 and "depends on A1_2" in err


def test_non_member_exit_code(capsys, tmp_path):
    f = tmp_path / "t.json"
    f.write_text(json.dumps({"XXY": ["1"]}))
    code, data, _ = run_json(capsys, "hd-member", "heisenberg(1)", "3", "--tensor", str(f))
    assert code == 2 and not data["member"]
    f.write_text(json.dumps({"XY": ["1"], "YX": ["1"]}))
    code, data, _ = run_json(capsys, "hd-member", "heisenberg(1)", "2", "--tensor", str(f))
    assert code == 0 and data["expansion"] == [{"index": [1, 1, 0], "w": 1, "coeff": "1/1"}]


def test_embed_output_file(capsys, tmp_path):
    out = tmp_path / "e.json"
    code, _, _ = run(capsys, "-o", str(out), "embed", "engel")
    data = json.loads(out.read_text())
    assert code == 0 and all(data["certificates"].values())
    assert data["target"] == "j^2(engel'; V_3)"


def test_usage_errors(capsys):
    assert run(capsys, "hd-basis", "nonsense", "2")[0] == 1
    assert run(capsys, "hd-basis", "heisenberg(1)", "-1")[0] == 1
    assert run(capsys, "bch", "heisenberg(1)", "1,0")[0] == 1
    assert run(capsys, "bch", "heisenberg(1)", "1,x,0", "0,0,0")[0] == 1
    assert run(capsys, "taylor", "heisenberg(1)", "2", "--poly", "/nonexistent", "--point", "0,0,0")[0] == 1
    assert run(capsys)[0] == 1


def test_internal_failure_exit_code(capsys, monkeypatch):
    from carnot_jets.embed import CertificateError

    def boom(g):
        raise CertificateError("forced")
    monkeypatch.setattr(cli, "embed", boom)
    code, _, err = run(capsys, "embed", "heisenberg(1)")
    assert code == 3 and "forced" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "carnot_jets.cli", "bch", "engel", "1,0,0,0", "0,1,0,0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bch"] == ["1/1", "1/1", "1/2", "1/12"]
