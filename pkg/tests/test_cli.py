import json

import numpy as np
import pytest

from qconstel.circuit import from_text, netlist_unitary, to_text, preset_circuit
from qconstel.cli import config_hash, main, resolve_config
from qconstel.linalg import unitary_distance


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_qfi_pair(capsys):
    code, out, _ = run(capsys, ["qfi", "--kind", "pair", "--p", "1", "--r", "0.3"])
    assert code == 0
    assert "# config " in out
    assert "max |numeric - analytic|" in out


def test_qfi_check_pass_and_fail(capsys):
    code, _, _ = run(capsys, ["qfi", "--kind", "pair", "--p", "1", "--r", "0.3", "--check", "1e-5"])
    assert code == 0
    code, _, err = run(
        capsys, ["qfi", "--kind", "ring", "--n", "3", "--p", "1", "--r", "0.7", "--check", "1e-5"]
    )
    assert code == 4
    assert "self-check failed" in err


def test_qfi_csv_and_json_outputs(tmp_path, capsys):
    csv_path = tmp_path / "out.csv"
    code, _, _ = run(
        capsys,
        ["qfi", "--kind", "rect", "--px", "1", "--py", "0.5", "--x0", "0.4", "--y0", "0.8",
         "--out", str(csv_path)],
    )
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == "mu,nu,numeric,analytic,abs_diff"
    assert len(lines) == 6  # 2x2 matrix entries

    json_path = tmp_path / "out.json"
    code, _, _ = run(
        capsys,
        ["qfi", "--kind", "pair", "--r", "0.3", "--out", str(json_path), "--format", "json"],
    )
    assert code == 0
    doc = json.loads(json_path.read_text())
    assert abs(doc["qfim"][0][0] - 4.0) <= 1e-5
    assert "config_hash" in doc


def test_byte_identical_reruns(tmp_path, capsys):
    args = ["sweep", "--kind", "ring", "--n", "4", "--p", "1", "--start", "0.2",
            "--stop", "0.8", "--count", "4"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run(capsys, args + ["--out", str(a)])[0] == 0
    assert run(capsys, args + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_eigen_zero_radius(capsys):
    code, out, _ = run(capsys, ["eigen", "--kind", "ring", "--n", "4", "--p", "1", "--r", "0"])
    assert code == 0
    rows = [ln.split() for ln in out.splitlines() if ln and not ln.startswith(("#", "lambda"))]
    weights = [float(r[1]) for r in rows]
    assert np.allclose(weights, [1, 0, 0, 0], atol=1e-12)


def test_eigen_matches_table(capsys):
    code, out, _ = run(capsys, ["eigen", "--kind", "pair", "--p", "1", "--r", "0.4"])
    assert code == 0
    rows = [ln.split() for ln in out.splitlines() if ln and not ln.startswith(("#", "lambda"))]
    diffs = [float(r[3]) for r in rows]
    assert max(diffs) <= 1e-9


def test_simulate_csv_format(tmp_path, capsys):
    out_path = tmp_path / "study.csv"
    code, out, _ = run(
        capsys,
        ["simulate", "--kind", "pair", "--p", "1", "--r", "0.3", "--photons", "300,900",
         "--trials", "20", "--seed", "3", "--out", str(out_path)],
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[1] == "M,trials,mse,crb,ratio"
    assert len(lines) == 4
    first = lines[2].split(",")
    assert first[0] == "300" and first[1] == "20"


def test_simulate_direct_detection_exit_3(capsys):
    code, _, err = run(
        capsys,
        ["simulate", "--kind", "pair", "--r", "0.3", "--photons", "100", "--trials", "5",
         "--basis", "direct"],
    )
    assert code == 3
    assert "numerical failure" in err


def test_simulate_netlist_basis(tmp_path, capsys):
    netfile = tmp_path / "pair.net"
    netfile.write_text(to_text(preset_circuit("pair")) or "BS 0 1 0.78539816339744828 0\n")
    code, out, _ = run(
        capsys,
        ["simulate", "--kind", "pair", "--r", "0.3", "--photons", "400", "--trials", "10",
         "--basis", "netlist", "--netlist", str(netfile)],
    )
    assert code == 0


def test_decompose_roundtrip_through_file(tmp_path, capsys):
    rng = np.random.default_rng(0)
    from qconstel.linalg import haar_unitary

    u = haar_unitary(4, rng)
    ufile = tmp_path / "u.json"
    ufile.write_text(json.dumps({"matrix": [[[z.real, z.imag] for z in row] for row in u]}))
    netfile = tmp_path / "net.txt"
    code, out, _ = run(capsys, ["decompose", "--unitary", str(ufile), "--out", str(netfile)])
    assert code == 0
    assert "round-trip residual" in out
    parsed = from_text(netfile.read_text(), n_modes=4)
    assert unitary_distance(netlist_unitary(parsed), u) <= 1e-9


def test_decompose_preset_json(tmp_path, capsys):
    out_path = tmp_path / "ring.json"
    code, _, _ = run(
        capsys,
        ["decompose", "--kind", "ring", "--n", "4", "--out", str(out_path), "--format", "json"],
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["residual"] <= 1e-9
    assert doc["netlist"]["modes"] == 4


def test_sweep_eigenvalues(tmp_path, capsys):
    out_path = tmp_path / "eigs.csv"
    code, _, _ = run(
        capsys,
        ["sweep", "--kind", "pair", "--quantity", "eigenvalues", "--start", "0.0",
         "--stop", "1.0", "--count", "5", "--out", str(out_path)],
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[1] == "r,lambda_0,lambda_1"
    row0 = [float(x) for x in lines[2].split(",")]
    assert row0[1] == pytest.approx(1.0)  # zero separation: trivial weight only
    row_last = [float(x) for x in lines[-1].split(",")]
    assert row_last[1] == pytest.approx(np.cos(1.0) ** 2, abs=1e-12)


def test_sweep_check(capsys):
    code, _, _ = run(
        capsys,
        ["sweep", "--kind", "pair", "--start", "0.1", "--stop", "0.9", "--count", "5",
         "--check", "1e-5"],
    )
    assert code == 0


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[model]\nkind = ring\nn = 4\np = 1.0\nr = 0.5\n\n[output]\nformat = csv\n"
    )
    code, out, _ = run(capsys, ["qfi", "-c", str(cfg)])
    assert code == 0

    class Args:
        pass

    ns = Args()
    ns.config = str(cfg)
    for k in ("kind", "p", "px", "py", "n", "theta", "psf_angle", "phase", "psf_phase",
              "r", "x0", "y0", "basis", "netlist", "parameter", "start", "stop", "count",
              "quantity", "photons", "trials", "seed", "bounds", "grid", "out", "format"):
        setattr(ns, k, None)
    base = resolve_config(ns)
    assert base["model"]["kind"] == "ring" and base["model"]["r"] == 0.5
    ns.r = 0.7
    over = resolve_config(ns)
    assert over["model"]["r"] == 0.7
    # hash tracks scientific content, not output paths
    assert config_hash(base) != config_hash(over)
    over["output"]["path"] = "elsewhere.csv"
    over2 = {s: dict(v) for s, v in over.items()}
    assert config_hash(over) == config_hash(over2)


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nkind = hexagon\n")
    code, _, err = run(capsys, ["qfi", "-c", str(bad)])
    assert code == 2
    assert "config error" in err

    bad2 = tmp_path / "bad2.ini"
    bad2.write_text("[model]\nwavelength = 5\n")
    assert run(capsys, ["qfi", "-c", str(bad2)])[0] == 2

    bad3 = tmp_path / "bad3.ini"
    bad3.write_text("[model]\np = fast\n")
    assert run(capsys, ["qfi", "-c", str(bad3)])[0] == 2

    assert run(capsys, ["qfi", "-c", str(tmp_path / "missing.ini")])[0] == 2
    assert run(capsys, ["qfi", "--kind", "pair", "--r", "-0.5"])[0] == 2
    assert run(capsys, ["qfi", "--kind", "pair", "--r", "0"])[0] == 2  # boundary: no derivative
    assert run(capsys, ["simulate", "--kind", "rect"])[0] == 2
    assert run(capsys, ["sweep", "--kind", "pair", "--parameter", "zz"])[0] == 2
    assert run(capsys, ["simulate", "--kind", "pair", "--bounds", "oops"])[0] == 2
    assert run(capsys, ["simulate", "--kind", "pair", "--basis", "netlist"])[0] == 2
