import json
import subprocess
import sys

import jsonschema
import pytest

from subordination import cli
from subordination.config import load_preset

FAST = ["--points-per-decade", "8"]


def write_cfg(tmp_path, name="rho-half", **mc):
    d = load_preset(name).to_dict()
    d["mc"].update(mc)
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(d))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_bernstein(tmp_path, capsys, schema):
    code, out, _ = run(["bernstein", "--config", "rho-half", "--out", str(tmp_path), "--lambdas", "1,4"], capsys)
    assert code == 0 and "phi_bar=3.5449077018" in out
    doc = json.loads((tmp_path / "bernstein.json").read_text())
    jsonschema.validate(doc, schema("bernstein"))
    assert [r["lambda"] for r in doc["rows"]] == [1.0, 4.0]
    assert (tmp_path / "bernstein.csv").read_bytes().startswith(b"lambda,phi_bar,error\n")


def test_jump_kernel(tmp_path, capsys, schema):
    code, out, _ = run(["jump-kernel", "--config", "brownian-stable", "--out", str(tmp_path), *FAST], capsys)
    assert code == 0 and "comparable C=" in out
    jsonschema.validate(json.loads((tmp_path / "report.json").read_text()), schema("jump_kernel"))
    raw = (tmp_path / "report.csv").read_bytes()
    assert b"\r" not in raw and raw.count(b"\n") == 1 + 6 * 8 + 1
    dat = (tmp_path / "ratio.dat").read_text().splitlines()
    assert dat[0].startswith("#") and len(dat) == 1 + 6 * 8 + 1


def test_not_comparable_exits_zero(tmp_path, capsys):
    code, out, _ = run(["jump-kernel", "--config", "kinked-psi-vs-diffusion", "--out", str(tmp_path), *FAST],
                       capsys)
    assert code == 0 and "not_comparable in the large-r regime" in out


def test_format_selection(tmp_path, capsys):
    run(["bernstein", "--config", "rho-half", "--out", str(tmp_path), "--format", "csv"], capsys)
    assert (tmp_path / "bernstein.csv").exists() and not (tmp_path / "bernstein.json").exists()


@pytest.mark.parametrize("preset,line", [("rho-half", "finite"), ("criterion-infinite", "infinite"),
                                         ("psi-equals-phi", "infinite (boundary)")])
def test_criterion(tmp_path, capsys, schema, preset, line):
    code, out, _ = run(["criterion", "--config", preset, "--out", str(tmp_path)], capsys)
    first, rest = out.split("\n", 1)
    assert code == 0 and first == line
    doc = json.loads(rest)
    jsonschema.validate(doc, schema("criterion"))
    assert doc == json.loads((tmp_path / "criterion.json").read_text())


def test_divergence_exit_code(tmp_path, capsys, schema):
    code, out, err = run(["jump-kernel", "--config", "criterion-infinite", "--out", str(tmp_path)], capsys)
    assert code == 2 and "divergence" in err
    jsonschema.validate(json.loads(out), schema("divergence"))


@pytest.mark.parametrize("argv", [
    ["bernstein", "--config", "does-not-exist.json"],
    ["bernstein", "--config", "rho-half", "--lambdas", ""],
    ["bernstein", "--config", "rho-half", "--lambdas", "1,-2"],
    ["jump-kernel", "--config", "rho-half", "--grid-decades=-1:1", "--points-per-decade", "1"],
    ["jump-kernel", "--config", "rho-half", "--grid-decades=3:-3"],
    ["mc", "--config", "rho-half", "--seed", "-4"],
    ["bernstein"],
    ["frobnicate"],
])
def test_usage_errors(tmp_path, capsys, argv):
    code, _, err = run([*argv, "--out", str(tmp_path)], capsys)
    assert code == 1 and err.startswith("error:")


def test_mc_reproducible(tmp_path, capsys, schema):
    cfg = write_cfg(tmp_path, n_paths=5000)
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        code, _, _ = run(["mc", "--config", cfg, "--out", str(d), "--seed", "17", "--dump-samples"], capsys)
        assert code == 0
        outs.append(((d / "mc.json").read_bytes(), (d / "samples.csv").read_bytes()))
    assert outs[0] == outs[1]
    doc = json.loads(outs[0][0])
    jsonschema.validate(doc, schema("mc"))
    assert doc["seed"] == 17 and doc["pass"]
    samples = outs[0][1].decode().splitlines()
    assert samples[0] == "S_T" and len(samples) == 5001 and b"\r" not in outs[0][1]


def test_mc_failure_exit_code(tmp_path, capsys, monkeypatch):
    def failing(*a, **k):
        return {"rows": [], "pass": False}
    monkeypatch.setattr(cli, "validate_laplace", failing)
    code, _, err = run(["mc", "--config", write_cfg(tmp_path, n_paths=10), "--out", str(tmp_path)], capsys)
    assert code == 3 and "numerical failure" in err


def test_gallery_deterministic(tmp_path, capsys, schema):
    blobs = []
    for k in range(2):
        d = tmp_path / f"g{k}"
        code, out, _ = run(["gallery", "--out", str(d), *FAST], capsys)
        assert code == 0
        blobs.append({p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()})
    assert blobs[0] == blobs[1]
    index = json.loads(blobs[0]["gallery.json"])
    jsonschema.validate(index, schema("gallery"))
    by = {e["name"]: e for e in index["presets"]}
    assert len(by) >= 6
    assert by["criterion-infinite"]["verdict"] == "no_subordinator"
    assert "criterion-infinite/divergence.json" in blobs[0]
    assert by["kinked-psi-vs-diffusion"]["verdict"] == "not_comparable"
    for name in ("brownian-stable", "carpet-tiling", "gasket-diffjump", "rho-half"):
        assert by[name]["verdict"] == "comparable"
    assert not any(name.startswith(".") for name in blobs[0])


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "subordination", "criterion", "--config", "rho-half",
                          "--out", str(tmp_path), "--format", "json"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("finite\n")
