import json

import numpy as np
import pytest

from lightlike.cli import CSV_HEADER, InputError, RunConfig, main, read_samples
from lightlike.surface import closed_form_example


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    """generate --f const:-1 on [-1, 1]^2 (default grid 101 x 101)."""
    out = tmp_path_factory.mktemp("gen")
    assert run("generate", "--f", "const:-1", "--u-range=-1:1", "--out", out) == 0
    return out


def read_obj(path):
    verts, faces = [], []
    for line in path.read_text().splitlines():
        tag, *rest = line.split()
        (verts if tag == "v" else faces).append([float(t) for t in rest])
    return np.array(verts), np.array(faces, dtype=int)


@pytest.mark.parametrize("spec, example", [("const:0", "f0"), ("const:1", "f1")])
def test_generate_mesh_matches_closed_form(tmp_path, spec, example):
    assert run("generate", "--f", spec, "--u-range=-1:1", "--nu", 21, "--nv", 21, "--out", tmp_path, "--format", "obj") == 0
    verts, faces = read_obj(tmp_path / "surface.obj")
    U, V = np.meshgrid(np.linspace(-1, 1, 21), np.linspace(-1, 1, 21), indexing="ij")
    X = closed_form_example(example, U, V).reshape(-1, 3)
    # OBJ vertices are (x1, x2, x0)
    assert np.max(np.abs(verts - X[:, [1, 2, 0]])) < 1e-7
    assert faces.shape == (20 * 20, 4)
    assert faces.min() == 1 and faces.max() == 21 * 21
    assert not (tmp_path / "surface.csv").exists()


def test_generate_outputs(generated):
    header = (generated / "surface.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_HEADER)
    data = np.loadtxt(generated / "surface.csv", delimiter=",", skiprows=1)
    assert data.shape == (101 * 101, 10)
    report = json.loads((generated / "surface.json").read_text())
    assert list(report) == ["verdict", "thresholds", "residuals", "f_table"]
    assert report["verdict"]["kind"] == "NonConical"
    # every row satisfies the degeneracy bound recorded in the report
    assert np.all(data[:, 9] < report["thresholds"]["degeneracy"])
    assert np.max(np.abs(data[:, 8] + 1)) < 1e-3


def test_generate_sin_report_passes_checks(tmp_path):
    assert run("generate", "--f", "sin", "--nu", 21, "--nv", 41, "--out", tmp_path, "--format", "json") == 0
    res = json.loads((tmp_path / "surface.json").read_text())["residuals"]
    assert res["degeneracy"] < 1e-6
    assert res["ruling_collinearity"] < 1e-9 and res["ruling_nullity"] < 1e-8


def test_outputs_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run("generate", "--f", "sin:0.5:2", "--nu", 11, "--nv", 21, "--out", tmp_path / d) == 0
    for name in ("surface.obj", "surface.csv", "surface.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert not list(tmp_path.glob("**/*.tmp"))


def test_classify_generated_csv(generated, tmp_path, capsys):
    assert run("classify", "--surface", generated / "surface.csv", "--out", tmp_path) == 0
    assert "NonConical" in capsys.readouterr().out
    report = json.loads((tmp_path / "classify.json").read_text())
    assert report["verdict"] == {"kind": "NonConical", "f_coordinate": "v"}
    f = np.array([row["f"] for row in report["f_table"]])
    assert np.max(np.abs(f + 1)) < 1e-3


def test_classify_builtins(tmp_path):
    assert run("classify", "--surface", "plane", "--out", tmp_path, "--format", "json") == 0
    assert json.loads((tmp_path / "classify.json").read_text())["verdict"]["kind"] == "Plane"
    assert run("classify", "--surface", "cone:1,2,3", "--u-range=-0.4:0.4", "--v-range=0.2:1.8", "--nu", 9, "--nv", 17, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "classify.json").read_text())
    assert report["verdict"]["kind"] == "Cone"
    assert list(report) == ["verdict", "thresholds", "residuals", "vertex"]
    np.testing.assert_allclose(report["vertex"]["point"], [1, 2, 3], atol=1e-6)
    assert run("classify", "--surface", "graph", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "classify.json").read_text())["verdict"]["kind"] == "NotLightlike"


def test_classify_thresholds_are_recorded(tmp_path):
    assert run("classify", "--surface", "f1", "--tol-plane", "2e-5", "--tol-cone", "3e-5", "--nu", 11, "--nv", 21, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "classify.json").read_text())
    assert report["thresholds"]["plane"] == 2e-5 and report["thresholds"]["cone"] == 3e-5
    assert report["verdict"]["kind"] == "NonConical"


@pytest.mark.parametrize(
    "content",
    ["", "a,b\n1,2\n", "u,v,x0,x1,x2\n0,0,1,2\n", "u,v,x0,x1,x2\n0,0,1,2,x\n", "u,v,x0,x1,x2\n0,0,0,0,0\n0,1,0,0,0\n1,0,0,0,0\n"],
)
def test_classify_malformed_csv(tmp_path, content, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    assert run("classify", "--surface", path, "--out", tmp_path) == 2
    assert "error" in capsys.readouterr().err


def test_read_samples_roundtrip(generated):
    us, vs, X = read_samples(generated / "surface.csv")
    assert X.shape == (101, 101, 3)
    np.testing.assert_allclose(us, np.linspace(-1, 1, 101), atol=1e-15)


@pytest.mark.parametrize(
    "args",
    [
        ["generate", "--nu", "1"],
        ["generate", "--u-range=1:-1"],
        ["generate", "--step", "0"],
        ["generate", "--f", "cos"],
        ["classify"],
        ["classify", "--surface", "torus"],
        ["classify", "--surface", "cone:1,2"],
        ["generate", "--f", "const:1e6"],
    ],
)
def test_bad_input_exits_nonzero(tmp_path, args):
    assert run(*args, "--out", tmp_path) == 2


def test_argparse_errors_exit_nonzero():
    with pytest.raises(SystemExit) as info:
        main(["generate", "--format", "png"])
    assert info.value.code != 0


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig("generate", nv=1)
    with pytest.raises(InputError):
        RunConfig("generate", v_range=(0.0, 0.0))
    with pytest.raises(InputError):
        RunConfig("generate", formats=("png",))


def test_verify_passes_for_f0(tmp_path, capsys):
    assert run("verify", "--f", "const:0", "--nu", 11, "--nv", 21, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["verdict"] == {"passed": True, "failed": []}
    assert "closed_form" in report["residuals"]
    assert "FAIL" not in capsys.readouterr().out


def test_verify_negative_control(tmp_path):
    assert run("verify", "--surface", "graph", "--nu", 11, "--nv", 11, "--out", tmp_path) == 1
    report = json.loads((tmp_path / "verify.json").read_text())
    assert "degeneracy" in report["verdict"]["failed"]


def test_verify_records_halving_ratio(tmp_path):
    assert run("verify", "--f", "const:1", "--nu", 11, "--nv", 21, "--out", tmp_path) == 0
    suite = json.loads((tmp_path / "verify.json").read_text())["residuals"]["structure_equations"]
    assert 3.5 < suite["halving_ratio"] < 4.5
