import json
import subprocess
import sys

import numpy as np
import pytest

from conelab.cli import main
from conelab.fixtures import ex7_2
from conelab.schemas import dumps, family_to_json
from conelab.planar import classify2


@pytest.fixture
def emit(tmp_path):
    def _emit(name):
        path = tmp_path / f"{name.replace('(', '_').replace(')', '')}.json"
        assert main(["fixtures", "emit", name, "--out", str(path)]) == 0
        return str(path)

    return _emit


class TestExitCodes:
    def test_yes(self, emit, tmp_path):
        assert main(["common", emit("diag_pair"), "--out", str(tmp_path / "d.json")]) == 0

    def test_no(self, emit, tmp_path):
        assert main(["common", emit("ex7_1"), "--out", str(tmp_path / "d.json")]) == 1

    def test_undecided(self, emit, tmp_path):
        code = main(["common", emit("ex7_4"), "--method", "shared-dominant",
                     "--out", str(tmp_path / "d.json")])
        assert code == 3
        payload = json.loads((tmp_path / "d.json").read_text())
        assert payload["answer"] == "undecided"
        assert payload["certificate"]["evidence"]["hypothesis"] == "NotSemisimple"

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["classify", str(bad)]) == 2

    def test_bad_schema(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dimension": 2, "matrices": [[[1, 2], [3]]]}))
        assert main(["classify", str(bad)]) == 2

    def test_unknown_fixture(self, tmp_path):
        assert main(["fixtures", "emit", "nope", "--out", str(tmp_path / "x.json")]) == 2


class TestClassify:
    def test_ex7_1(self, emit, capsys):
        assert main(["classify", emit("ex7_1")]) == 0
        out = capsys.readouterr().out
        assert "A: Vandergraft" in out and "B: Vandergraft" in out
        assert "all 30 words are Vandergraft" in out

    def test_rotation_reported(self, tmp_path, capsys):
        path = tmp_path / "rot.json"
        path.write_text(json.dumps({
            "dimension": 2, "matrices": [[[0, -1], [1, 0]]],
        }))
        assert main(["classify", str(path)]) == 0
        assert "not Vandergraft: rho-not-eigenvalue" in capsys.readouterr().out

    def test_ex7_5_word_screen_clean(self, emit, capsys):
        assert main(["classify", emit("ex7_5")]) == 0
        assert "all 30 words are Vandergraft" in capsys.readouterr().out


class TestVerify:
    def test_orthant_identity(self, tmp_path):
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 2, "matrices": [[[1, 0], [0, 1]]]}))
        cone = tmp_path / "cone.json"
        cone.write_text(json.dumps({
            "type": "polyhedral", "dim": 2, "generators": [[1, 0], [0, 1]],
        }))
        assert main(["verify", str(fam), str(cone)]) == 0

    def test_known_witness_pair_passes_and_third_fails(self, tmp_path, capsys):
        A, B, C = ex7_2().matrices
        pair = tmp_path / "pair.json"
        pair.write_text(dumps(family_to_json(
            __import__("conelab.fixtures", fromlist=["FamilyData"]).FamilyData(2, (A, B)))))
        s5 = np.sqrt(5)
        cone = tmp_path / "cone.json"
        cone.write_text(json.dumps({
            "type": "polyhedral", "dim": 2,
            "generators": [[1, 0], [1 / s5, 2 / s5]],
        }))
        assert main(["verify", str(pair), str(cone)]) == 0
        triple = tmp_path / "triple.json"
        triple.write_text(dumps(family_to_json(ex7_2())))
        assert main(["verify", str(triple), str(cone)]) == 1
        assert "VIOLATION" in capsys.readouterr().out

    def test_dimension_mismatch(self, tmp_path):
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 3, "matrices": [np.eye(3).tolist()]}))
        cone = tmp_path / "cone.json"
        cone.write_text(json.dumps({"type": "polyhedral", "dim": 2, "generators": [[1, 0]]}))
        assert main(["verify", str(fam), str(cone)]) == 2


class TestDeterminism:
    def test_byte_identical_decisions(self, emit, tmp_path):
        fam = emit("ex7_2")
        outs = []
        for name in ("a.json", "b.json"):
            main(["common", fam, "--seed", "5", "--reproducible", "--out", str(tmp_path / name)])
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1]

    def test_seed_env_override(self, emit, tmp_path, monkeypatch):
        fam = emit("diag_pair")
        monkeypatch.setenv("CONELAB_SEED", "421")
        main(["common", fam, "--reproducible", "--out", str(tmp_path / "d.json")])
        assert json.loads((tmp_path / "d.json").read_text())["seed"] == 421

    def test_plot_bytes_deterministic(self, emit, tmp_path):
        fam = emit("ex7_2")
        svgs = []
        for name in ("p1.svg", "p2.svg"):
            assert main(["plot", fam, "--out", str(tmp_path / name)]) == 0
            svgs.append((tmp_path / name).read_bytes())
        assert svgs[0] == svgs[1]
        assert svgs[0].startswith(b"<svg")

    def test_plot_rejects_3d(self, emit, tmp_path):
        assert main(["plot", emit("ex7_5"), "--out", str(tmp_path / "p.svg")]) == 2

    def test_plot_with_decision_overlay(self, emit, tmp_path):
        fam = emit("diag_pair")
        dec = tmp_path / "d.json"
        assert main(["common", fam, "--reproducible", "--out", str(dec)]) == 0
        out = tmp_path / "p.svg"
        assert main(["plot", fam, "--decision", str(dec), "--out", str(out)]) == 0
        assert "decision: yes" in out.read_text()


class TestRouting:
    def _rotation_family(self):
        out = []
        for th in (0.3, 1.1):
            M = np.zeros((3, 3))
            M[0, 0] = 2.0
            M[1:, 1:] = [[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]
            out.append(M.tolist())
        return out

    def test_shared_dominant_quadratic_witness_verifies(self, tmp_path):
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 3, "matrices": self._rotation_family()}))
        dec = tmp_path / "d.json"
        assert main(["common", str(fam), "--method", "shared-dominant",
                     "--reproducible", "--out", str(dec)]) == 0
        payload = json.loads(dec.read_text())
        assert payload["witness"]["type"] == "quadratic"
        cone = tmp_path / "w.json"
        cone.write_text(json.dumps(payload["witness"]))
        assert main(["verify", str(fam), str(cone)]) == 0

    def test_similarity_field_feeds_case_one(self, tmp_path):
        T = np.array([[1.0, 0.4, 0.0], [0.0, 1.0, 0.3], [0.0, 0.0, 1.0]])
        Ti = np.linalg.inv(T)
        mats = [(T @ np.array(M) @ Ti).tolist() for M in self._rotation_family()]
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 3, "matrices": mats, "similarity": T.tolist()}))
        assert main(["common", str(fam), "--method", "shared-dominant",
                     "--reproducible", "--out", str(tmp_path / "d.json")]) == 0

    def test_no_applicable_procedure(self, tmp_path):
        # non-commuting, non-normal 3x3 members without a shared dominant vector
        A = np.diag([2.0, 1.0, 0.5]) + np.triu(np.ones((3, 3)), 1)
        B = np.diag([1.0, 3.0, 0.2]) + np.tril(np.ones((3, 3)), -1) * 0.5
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 3, "matrices": [A.tolist(), B.tolist()]}))
        dec = tmp_path / "d.json"
        assert main(["common", str(fam), "--reproducible", "--out", str(dec)]) == 3
        assert json.loads(dec.read_text())["route"] == "none-applicable"

    def test_non_vandergraft_member_is_definitive_no(self, tmp_path):
        # dominant complex pair: the member alone has no invariant proper cone
        R = np.diag([0.5, 0.0, 0.0])
        R[1:, 1:] = 2.0 * np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]])
        A = np.diag([2.0, 1.0, 0.5]) + np.triu(np.ones((3, 3)), 1)
        fam = tmp_path / "fam.json"
        fam.write_text(json.dumps({"dimension": 3, "matrices": [A.tolist(), R.tolist()]}))
        dec = tmp_path / "d.json"
        assert main(["common", str(fam), "--reproducible", "--out", str(dec)]) == 1
        payload = json.loads(dec.read_text())
        assert payload["certificate"]["failed_condition"] == "NotVandergraftInA1"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "conelab.cli", "fixtures", "list"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "ex7_1" in proc.stdout


def test_fixture_matrices_match_classify_kinds(emit):
    # the emitted files reproduce the intended case split when reloaded
    from conelab.schemas import family_from_json

    fd = family_from_json(json.load(open(emit("ex7_1"))))
    kinds = [classify2(M).kind for M in fd.matrices]
    assert kinds == ["NegDet", "NegDet"]
