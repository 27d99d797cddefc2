import subprocess
import sys

import numpy as np
import pytest

from diracembed import ConvergenceError, cli


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path / "run")])


def read_table(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header, body[0].split(","), [row.split(",") for row in body[1:]]


def test_converge_reproduces_table(tmp_path):
    assert run(tmp_path, "converge") == 0
    header, columns, rows = read_table(tmp_path / "run_converge.csv")
    assert "# command = converge" in header
    assert columns[0] == "N" and len(columns) == 7
    table = {row[0]: [float(x) for x in row[1:]] for row in rows}
    expected = {
        "2": [-0.4111620, 1.6980995, -0.4111527, 1.6949300, -0.4111624, 1.6896482],
        "6": [-0.4455519, 0.8914789, -0.4455477, 0.8912219, -0.4455520, 0.8910268],
        "8": [-0.4455532, 0.8912708, -0.4455488, 0.8910141, -0.4455532, 0.8908194],
    }
    for N, values in expected.items():
        assert np.abs(np.array(table[N]) - values).max() < 1e-6
    assert np.abs(np.array(table["4"][:4]) - [-0.4451482, 0.9129418, -0.4451439, 0.9126817]).max() < 1e-6
    assert np.abs(np.array(table["exact"][:2]) - [-0.4455532, 0.8908194]).max() < 1e-7


def test_spectrum_is_deterministic(tmp_path):
    path = tmp_path / "run_spectrum.csv"
    assert run(tmp_path, "spectrum", "--N", "6", "--w-mode", "scf") == 0
    first = path.read_bytes()
    path.unlink()
    assert run(tmp_path, "spectrum", "--N", "6", "--w-mode", "scf") == 0
    assert path.read_bytes() == first
    header, columns, rows = read_table(path)
    assert columns == ["state", "E", "w_minus_mc2", "iterations"]
    assert "# w provenance: scf" in header
    assert abs(float(rows[0][1]) - -0.4455520) < 5e-7


def test_ldos_output_and_plot(tmp_path):
    args = ["ldos", "--V0", "1", "--N", "12", "--Emin", "1", "--Emax", "5", "--points", "41", "--emit-plot"]
    assert cli.main([*args, "--jobs", "1", "--out", str(tmp_path / "one")]) == 0
    assert cli.main([*args, "--jobs", "3", "--out", str(tmp_path / "three")]) == 0
    one = (tmp_path / "one_ldos.csv").read_text(encoding="utf-8")
    three = (tmp_path / "three_ldos.csv").read_text(encoding="utf-8")
    # only the recorded thread count and output prefix may differ
    strip = lambda text: [ln for ln in text.splitlines() if not ln.startswith(("# jobs", "# output"))]
    assert strip(one) == strip(three)
    _, columns, rows = read_table(tmp_path / "one_ldos.csv")
    assert columns == ["E", "n"] and len(rows) == 41
    assert all(float(n) >= -1e-10 for _, n in rows)
    script = (tmp_path / "one_ldos.gp").read_text(encoding="utf-8")
    assert "one_ldos.csv" in script and "plot" in script


def test_values_use_twelve_significant_digits(tmp_path):
    assert run(tmp_path, "oracle", "--Emin", "-0.6", "--Emax", "2") == 0
    _, _, rows = read_table(tmp_path / "run_oracle.csv")
    assert rows[0][1] == f"{float(rows[0][1]):.12g}"
    assert len(rows) == 2


def test_gamma_command(tmp_path):
    assert run(tmp_path, "gamma", "--Emin", "0", "--Emax", "12", "--points", "4") == 0
    _, columns, rows = read_table(tmp_path / "run_gamma.csv")
    assert columns[0] == "E_w" and len(rows) == 4
    assert float(rows[0][3]) == 0.0  # real below the edge
    assert float(rows[-1][3]) != 0.0  # complex above it


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# cavity\nR = 4\nV0=20\nN = 5\nw-mode = fixed\nEw = -0.4\n", encoding="utf-8")
    config, _ = cli.config_from_args(["spectrum", "--config", str(cfg), "--N", "7"])
    assert config.model.R == 4.0 and config.model.V0 == 20.0
    assert config.N == 7 and config.Ew == -0.4


def test_header_records_resolved_config(tmp_path):
    assert run(tmp_path, "spectrum", "--R", "3.5", "--N", "5") == 0
    header, _, _ = read_table(tmp_path / "run_spectrum.csv")
    assert "# R = 3.5" in header and "# N = 5" in header and "# V0 = 10.0" in header


@pytest.mark.parametrize("args", [
    ["spectrum", "--R", "-1"],
    ["spectrum", "--kappa", "0"],
    ["ldos", "--Emin", "3", "--Emax", "1"],
    ["ldos", "--eta", "0"],
    ["spectrum", "--Z", "500"],
])
def test_config_errors(tmp_path, capsys, args):
    assert run(tmp_path, *args) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error code=2 type=")
    assert not list(tmp_path.iterdir())


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("radius = 3\n", encoding="utf-8")
    assert cli.main(["spectrum", "--config", str(cfg)]) == 2
    assert "unknown configuration key" in capsys.readouterr().err


def test_numerical_failure(tmp_path, capsys):
    assert run(tmp_path, "gamma", "--V0", "1", "--Emin", "0.999999999999", "--points", "1") == 3
    assert "type=BranchPointError" in capsys.readouterr().err
    assert not list(tmp_path.iterdir())


def test_non_convergence(tmp_path, capsys):
    assert run(tmp_path, "spectrum", "--w-mode", "scf", "--tol", "1e-16", "--max-iter", "1") == 4
    assert "type=ConvergenceError" in capsys.readouterr().err
    assert not (tmp_path / "run_spectrum.csv").exists()


def test_partial_output_removed(tmp_path, monkeypatch):
    def half_done(config, out):
        out.data("partial.csv", ("x",), [(1.0,)])
        raise ConvergenceError("stopped part way")

    monkeypatch.setitem(cli._DISPATCH, "oracle", half_done)
    assert run(tmp_path, "oracle") == 4
    assert not (tmp_path / "run_partial.csv").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "diracembed", "spectrum", "--N", "4",
                           "--out", str(tmp_path / "m")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "state 0" in proc.stdout
