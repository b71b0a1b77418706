import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracred import io as fio
from fracred.chain import frequency_response
from fracred.cli import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, UsageError, parse_grid, run
from fracred.reduction import sweep_fsdof

BENCH = {"masses": [1, 2, 1, 2], "stiffnesses": [1, 2, 1, 2], "dampers": [1, 2, 1, 2],
         "force_dof": 1, "active_dofs": [1, 3]}
UNDAMPED = {"masses": [1], "stiffnesses": [1], "dampers": [0]}


@pytest.fixture
def bench(tmp_path):
    path = tmp_path / "bench4dof.json"
    path.write_text(json.dumps(BENCH))
    return path


def _write_model(tmp_path, data, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fio.read_result_csv(fh)


class TestParseGrid:
    def test_default_grid(self):
        w = parse_grid("0.01:100:100:log")
        assert w.size == 100
        assert_allclose([w[0], w[-1]], [0.01, 100])
        assert not np.any(np.isclose(w, 1.0, rtol=1e-9))

    def test_101_points_hit_one(self):
        assert np.any(parse_grid("0.01:100:101") == 1.0)

    def test_linear(self):
        assert_allclose(parse_grid("1:2:3:lin"), [1.0, 1.5, 2.0])

    def test_single_point(self):
        assert_allclose(parse_grid("1:1:1"), [1.0])

    @pytest.mark.parametrize("text", ["1:2", "2:1:5", "0:1:5", "1:2:1", "1:2:5:cubic", "a:b:c"])
    def test_rejects(self, text):
        with pytest.raises(UsageError):
            parse_grid(text)


class TestBode:
    def test_writes_tables_and_plots(self, bench, tmp_path):
        out = tmp_path / "out"
        assert run(["bode", str(bench), "--out", str(out), "--grid", "0.1:10:20"]) == EXIT_OK
        for d in (1, 3):
            with open(out / f"bode-dof{d}.csv", encoding="utf-8") as fh:
                data = fio.read_bode_csv(fh)
            assert_allclose(data.to_complex(),
                            frequency_response(*_model(bench), data.omegas, [d])[:, 0],
                            rtol=1e-14)
        assert (out / "bode-magnitude.svg").exists() and (out / "bode-phase.svg").exists()

    def test_singular_point_strict(self, tmp_path):
        model = _write_model(tmp_path, UNDAMPED)
        args = ["bode", str(model), "--out", str(tmp_path), "--grid", "1:1:1"]
        assert run(args + ["--strict"]) == EXIT_NUMERIC
        assert run(args) == EXIT_OK
        assert "# singular,1" in (tmp_path / "bode-dof1.csv").read_text()

    def test_no_plot(self, bench, tmp_path):
        run(["bode", str(bench), "--out", str(tmp_path), "--grid", "0.1:10:5", "--no-plot"])
        assert not list(tmp_path.glob("*.svg"))


def _model(path):
    model, force, _ = fio.parse_model_file(path)
    return model, force


class TestReduce:
    def test_reduce_sdof_row_at_one(self, bench, tmp_path):
        code = run(["reduce-sdof", str(bench), "--active", "1", "--grid", "0.01:100:101:log",
                    "--out", str(tmp_path)])
        assert code == EXIT_OK
        res = _read(tmp_path / "reduce-sdof.csv")
        assert res.omegas.size == 101 and res.converged.all()
        i = int(np.flatnonzero(res.omegas == 1.0)[0])
        direct = sweep_fsdof(*_model(bench), 1, [1.0])
        assert res.alphas[i] == direct.alphas[0]
        for name in ("alpha", "magnitude", "phase"):
            assert (tmp_path / f"reduce-sdof-{name}.svg").exists()

    def test_reduce_sdof_needs_one_dof(self, bench, tmp_path):
        assert run(["reduce-sdof", str(bench), "--active", "1,3", "--out", str(tmp_path)]) \
            == EXIT_USAGE

    def test_reduce_ndof_round_trip(self, bench, tmp_path):
        assert run(["reduce-ndof", str(bench), "--out", str(tmp_path), "--grid",
                    "0.1:100:40"]) == EXIT_OK
        res = _read(tmp_path / "reduce-ndof.csv")
        assert res.n_beta == 1 and res.converged.all()
        # the stored schedules reproduce the recorded residual level
        H = frequency_response(*_model(bench), res.omegas, [1, 3])
        G = res.response()
        d = (G - H) / np.abs(H)
        recomputed = np.max(np.maximum(np.abs(d.real), np.abs(d.imag)), axis=1)
        assert np.all(recomputed <= np.maximum(res.residuals, 1e-13) * 10)
        assert (tmp_path / "reduce-ndof-beta.svg").exists()

    def test_bad_partition(self, bench, tmp_path):
        assert run(["reduce-ndof", str(bench), "--partition", "1,3|2,4",
                    "--out", str(tmp_path)]) == EXIT_USAGE

    def test_deterministic_outputs(self, bench, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["reduce-ndof", str(bench), "--grid", "0.1:100:30",
                        "--out", str(out)]) == EXIT_OK
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestIdentify:
    def _bode_files(self, bench, tmp_path):
        assert run(["bode", str(bench), "--out", str(tmp_path), "--grid", "0.1:100:50",
                    "--no-plot"]) == EXIT_OK
        return tmp_path / "bode-dof1.csv", tmp_path / "bode-dof3.csv"

    def test_identify_sdof(self, bench, tmp_path, capsys):
        b1, _ = self._bode_files(bench, tmp_path)
        assert run(["identify-sdof", str(b1), "--m-bar", "6", "--out", str(tmp_path)]) == EXIT_OK
        assert "k_bar estimated" in capsys.readouterr().out
        res = _read(tmp_path / "identify-sdof.csv")
        assert res.converged.all() and res.max_reconstruction_error < 1e-9

    def test_identify_sdof_needs_mass(self, bench, tmp_path):
        b1, _ = self._bode_files(bench, tmp_path)
        assert run(["identify-sdof", str(b1), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_identify_ndof(self, bench, tmp_path):
        b1, b3 = self._bode_files(bench, tmp_path)
        code = run(["identify-ndof", str(b1), str(b3), "--masses", "3,3", "--k-bar",
                    str(1 / 3), "--out", str(tmp_path), "--strict"])
        assert code == EXIT_OK
        res = _read(tmp_path / "identify-ndof.csv")
        assert res.converged.all() and res.max_reconstruction_error < 1e-9

    def test_identify_sdof_parallel(self, bench, tmp_path):
        b1, _ = self._bode_files(bench, tmp_path)
        seq, par = tmp_path / "seq", tmp_path / "par"
        common = [str(b1), "--m-bar", "6", "--no-plot"]
        assert run(["identify-sdof", *common, "--out", str(seq)]) == EXIT_OK
        assert run(["identify-sdof", *common, "--out", str(par), "--parallel"]) == EXIT_OK
        a, b = _read(seq / "identify-sdof.csv"), _read(par / "identify-sdof.csv")
        assert b.converged.all()
        assert_allclose(b.alphas, a.alphas, rtol=1e-10)

    def test_identify_ndof_parallel_falls_back(self, bench, tmp_path, capsys):
        b1, b3 = self._bode_files(bench, tmp_path)
        assert run(["identify-ndof", str(b1), str(b3), "--masses", "3,3", "--k-bar",
                    str(1 / 3), "--no-plot", "--parallel", "--out", str(tmp_path)]) == EXIT_OK
        assert "--parallel ignored" in capsys.readouterr().err
        assert _read(tmp_path / "identify-ndof.csv").converged.all()

    def test_mismatched_masses(self, bench, tmp_path):
        b1, b3 = self._bode_files(bench, tmp_path)
        assert run(["identify-ndof", str(b1), str(b3), "--masses", "3", "--k-bar", "1",
                    "--out", str(tmp_path)]) == EXIT_USAGE


class TestSteadyAndVerify:
    def test_steady_state(self, bench, tmp_path):
        assert run(["steady-state", str(bench), "--omega", "1", "--out", str(tmp_path)]) \
            == EXIT_OK
        rows = (tmp_path / "steady-state.csv").read_text().splitlines()
        assert rows[0] == "dof,amplitude,phase,tf_amplitude,tf_phase,fit_residual"
        vals = np.array([r.split(",") for r in rows[1:]], dtype=float)
        assert_allclose(vals[:, 1], vals[:, 3], rtol=1e-3)
        assert (tmp_path / "trajectory.csv").read_text().startswith("t,x1,x2,x3,x4,v1")
        assert (tmp_path / "steady-state.svg").exists()

    def test_verify(self, bench, capsys):
        assert run(["verify", str(bench)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "max deviation" in out and "FAIL" not in out

    def test_bad_omega(self, bench, tmp_path):
        assert run(["steady-state", str(bench), "--omega", "-1", "--out", str(tmp_path)]) \
            == EXIT_USAGE


class TestExitCodes:
    def test_no_command(self):
        assert run([]) == EXIT_USAGE

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"masses": [1], "masses": [2]}')
        assert run(["bode", str(bad), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_validation_error(self, tmp_path):
        model = _write_model(tmp_path, {**BENCH, "masses": []})
        assert run(["bode", str(model), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_dof_out_of_range(self, bench, tmp_path):
        assert run(["bode", str(bench), "--active", "7", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert run(["bode", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_IO

    def test_unwritable_output(self, bench, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run(["bode", str(bench), "--out", str(blocker / "sub")]) == EXIT_IO

    def test_bad_tolerance(self, bench, tmp_path):
        assert run(["reduce-ndof", str(bench), "--tol", "-1", "--out", str(tmp_path)]) \
            == EXIT_USAGE


def test_console_entry_point(bench, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fracred", "bode", str(bench), "--grid",
                           "1:10:3", "--out", str(tmp_path), "--no-plot"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "bode-dof3.csv").exists()
