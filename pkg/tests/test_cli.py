import csv
import hashlib
import io
import json
import math
from pathlib import Path

import pytest

from alphabounds import cli
from alphabounds import learning as lrn

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
DESK = CONFIGS / "desk.toml"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def diag_files(tmp_path):
    return (
        write(tmp_path / "j.csv", "nx,ny\n2,2\n0.4,0.1\n0.1,0.4\n"),
        write(tmp_path / "e.csv", "nx,ny\n2,2\n1,0\n0,1\n"),
    )


class TestMeasure:
    def test_nats_and_bits(self, capsys, diag_files):
        code, out, _ = run(capsys, "measure", diag_files[0], "--alpha", "2")
        assert code == 0
        r = {(x["measure"], x["alpha"]): float(x["nats"]) for x in rows(out)}
        assert r[("sibson_mi", "2.0")] == pytest.approx(0.307484699748, abs=1e-11)
        assert r[("maximal_leakage", "inf")] == pytest.approx(math.log(1.6), abs=1e-11)
        code, out, _ = run(capsys, "measure", diag_files[0], "--alpha", "2", "--units", "bits")
        b = {(x["measure"], x["alpha"]): float(x["bits"]) for x in rows(out)}
        assert b[("maximal_leakage", "inf")] == pytest.approx(math.log2(1.6), abs=1e-11)

    def test_bad_grid(self, capsys, tmp_path):
        bad = write(tmp_path / "j.csv", "nx,ny\n2,2\n0.4,0.1\n0.1,0.3\n")
        code, _, err = run(capsys, "measure", bad)
        assert code == 2 and "j.csv" in err
        bad = write(tmp_path / "k.csv", "nx,ny\n2,2\n0.4,0.1\n")
        code, _, err = run(capsys, "measure", bad)
        assert code == 2 and "expected 2 grid rows" in err


class TestBound:
    def test_tight_leakage(self, capsys, diag_files):
        code, out, _ = run(capsys, "bound", *diag_files, "--kind", "leakage")
        (r,) = rows(out)
        assert code == 0 and r["lhs"] == "0.8" and r["rhs"] == "0.8" and r["holds"] == "true"

    def test_theorem1(self, capsys, diag_files):
        code, out, _ = run(capsys, "bound", *diag_files, "--kind", "theorem1", "--alpha", "2", "--alpha-prime", "inf")
        (r,) = rows(out)
        assert code == 0 and r["alpha_prime"] == "inf"
        assert float(r["rhs"]) >= 0.8

    def test_shape_mismatch(self, capsys, diag_files, tmp_path):
        ev = write(tmp_path / "e3.csv", "nx,ny\n3,2\n1,0\n0,1\n1,1\n")
        code, _, err = run(capsys, "bound", diag_files[0], ev)
        assert code == 2 and "does not match" in err

    def test_non_binary_event(self, capsys, diag_files, tmp_path):
        ev = write(tmp_path / "e.csv", "nx,ny\n2,2\n1,0.5\n0,1\n")
        assert run(capsys, "bound", diag_files[0], ev)[0] == 2


class TestSweep:
    def test_columns_and_best(self, capsys, diag_files):
        code, out, err = run(capsys, "sweep", *diag_files, "--alpha", "1,2,inf")
        assert code == 0
        r = rows(out)
        assert [x["alpha"] for x in r] == ["1.0", "2.0", "inf"]
        assert float(r[0]["rhs"]) == 1.0
        assert float(r[-1]["rhs"]) == pytest.approx(0.8)
        assert "best alpha: inf" in err
        for x in r[1:]:
            assert math.exp(float(x["info_term"]) + float(x["fiber_term"])) == pytest.approx(float(x["rhs"]), rel=1e-10)


class TestVerify:
    def test_desk_all_hold(self, capsys):
        code, out, err = run(capsys, "verify", DESK)
        assert code == 0
        r = rows(out)
        assert {x["kind"] for x in r} == {"fiber", "cor5", "sibson_exact", "expected", "leakage_expected"}
        assert all(x["holds"] == "true" for x in r)
        assert "0 violated" in err

    def test_deterministic_bytes(self, capsys, tmp_path):
        spec = tmp_path / "p.toml"
        assert run(capsys, "gen-problem", "--seed", "5", "--learner", "random", "--z-size", "3", "-n", "4", "--out", spec)[0] == 0
        digests = []
        for _ in range(2):
            code, out, _ = run(capsys, "verify", spec, "--seed", "11")
            assert code == 0
            digests.append(hashlib.sha256(out.encode()).hexdigest())
        assert digests[0] == digests[1]
        _, other, _ = run(capsys, "verify", spec, "--seed", "12")
        assert hashlib.sha256(other.encode()).hexdigest() != digests[0]

    def test_injected_violation(self, capsys, monkeypatch):
        monkeypatch.setattr(lrn, "cor5_bound", lambda *a, **k: 1e-6)
        code, out, err = run(capsys, "verify", DESK)
        assert code == 1
        assert any(x["holds"] == "false" for x in rows(out))

    def test_constant_learner_zero_info(self, capsys, tmp_path):
        spec = write(
            tmp_path / "c.toml",
            '[problem]\ndata_dist = [0.5, 0.5]\nn = 6\nloss = [[0, 1], [1, 0]]\n[learner]\nkind = "constant"\nhypothesis = 1\n',
        )
        code, out, _ = run(capsys, "verify", spec)
        assert code == 0
        assert all(float(x["info"]) == 0 for x in rows(out) if x["info"])

    def test_collapse_matches_full(self, capsys, tmp_path):
        base = DESK.read_text()
        full = rows(run(capsys, "verify", DESK)[1])
        coll = write(tmp_path / "c.toml", base.replace("[verify]", "[verify]\ncollapse = true"))
        small = rows(run(capsys, "verify", coll)[1])
        for a, b in zip(full, small):
            for key in ("lhs", "rhs"):
                assert float(a[key]) == pytest.approx(float(b[key]), abs=1e-10)

    def test_cap(self, capsys):
        code, _, err = run(capsys, "verify", DESK, "--cap", "10")
        assert code == 2 and "cap" in err.lower()

    @pytest.mark.parametrize(
        "text,needle",
        [
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 6\nloss = [[0, 1]]\ncolour = 1\n[learner]\nkind = "erm"\n', "colour"),
            ('[problem]\ndata_dist = [0.5, 0.4]\nn = 6\nloss = [[0, 1]]\n[learner]\nkind = "erm"\n', "data_dist"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 0\nloss = [[0, 1]]\n[learner]\nkind = "erm"\n', ".n"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 1]]\n[learner]\nkind = "svm"\n', "kind"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 1]]\n[learner]\nkind = "erm"\ntemperature = 1\n', "temperature"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 1, 0]]\n[learner]\nkind = "erm"\n', "loss"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 1]]\n[learner]\nkind = "erm"\n[verify]\neta = [1.5]\n', "eta"),
            ('[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 1]]\n[learner]\nkind = "erm"\n[verify]\nalpha = [0.5]\n', "alpha"),
            ("[problem\n", "p.toml"),
        ],
    )
    def test_strict_parsing(self, capsys, tmp_path, text, needle):
        code, _, err = run(capsys, "verify", write(tmp_path / "p.toml", text))
        assert code == 2 and needle in err

    def test_loss_out_of_range(self, capsys, tmp_path):
        spec = write(tmp_path / "p.toml", '[problem]\ndata_dist = [0.5, 0.5]\nn = 3\nloss = [[0, 3]]\n[learner]\nkind = "erm"\n')
        assert run(capsys, "verify", spec)[0] == 2
        asserted = spec.read_text().replace("n = 3", "n = 3\nsigma = 1.5\nsigma_asserted = true")
        code, out, _ = run(capsys, "verify", write(spec, asserted))
        assert code == 0 and "cor7" in out


class TestTable:
    def test_full(self, capsys):
        code, out, _ = run(capsys, "table", CONFIGS / "table.toml")
        r = rows(out)
        assert code == 0
        assert list(r[0]) == ["name", "robust", "adaptive", "bound", "sample_complexity", "valid"]
        assert [x["name"] for x in r] == ["eps-DP", "MI", "Maximal Leakage", "alpha-Sibson MI", "VC-Dim K"]
        assert r[3]["adaptive"] == "Unknown"
        assert r[2]["bound"] == r[4]["bound"] == "0.00134185051161"

    def test_only_vc(self, capsys, tmp_path):
        code, out, err = run(capsys, "table", write(tmp_path / "t.toml", "n = 100\neta = 0.2\ndelta = 0.05\nvc_K = 4\n"))
        assert code == 0 and [x["name"] for x in rows(out)] == ["VC-Dim K"]
        assert err.count("notice") == 4

    def test_missing_required(self, capsys, tmp_path):
        code, _, err = run(capsys, "table", write(tmp_path / "t.toml", "n = 100\neta = 0.2\n"))
        assert code == 2 and "delta" in err


class TestGenAndManifest:
    def test_gen_joint_roundtrip(self, capsys, tmp_path):
        out = tmp_path / "j.csv"
        assert run(capsys, "gen-problem", "--emit", "joint", "--shape", "3", "4", "--seed", "2", "--out", out)[0] == 0
        code, text, _ = run(capsys, "measure", out)
        assert code == 0 and len(rows(text)) == 8

    def test_gen_problem_is_seeded(self, capsys):
        a = run(capsys, "gen-problem", "--seed", "9")[1]
        b = run(capsys, "gen-problem", "--seed", "9")[1]
        c = run(capsys, "gen-problem", "--seed", "10")[1]
        assert a == b != c

    def test_manifest(self, capsys, tmp_path):
        out = tmp_path / "v.csv"
        code, stdout, _ = run(capsys, "verify", DESK, "--units", "bits", "--out", out)
        assert code == 0 and stdout == ""
        man = json.loads(Path(str(out) + ".manifest.json").read_text())
        assert man["seed"] == 0 and man["units"] == "bits"
        assert man["inputs"][str(DESK)] == hashlib.sha256(DESK.read_bytes()).hexdigest()
        assert out.read_text().startswith("eta,alpha,kind")
