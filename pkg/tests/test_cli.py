import json
import os

import numpy as np
import pytest

from fkdv.cli import main


def run(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(argv)
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip() else None
    return code, report


class TestClassify:
    def test_power_case(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--alpha", "0", "--beta", "t^1.5"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "power"
        assert rep["extension_dim"] == 1
        assert rep["parameters"]["rho"] == pytest.approx(1.5)
        assert rep["table2_basis"] is None
        assert os.path.exists(tmp_path / "fkdv-classify.manifest.json")

    def test_constant_case(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--alpha", "0", "--beta", "1"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "constant"
        assert rep["extension_dim"] == 2
        assert len(rep["basis"]) == 4

    def test_generic_case(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--alpha", "0", "--beta", "exp(t)+t"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "generic"
        assert rep["extension_dim"] == 0

    def test_damped_reports_table2(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--alpha", "1", "--beta", "exp(-t)",
                         "--t-lo", "0", "--t-hi", "2", "--t-ref", "0"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "constant"
        assert rep["table2_basis"] is not None
        assert len(rep["table2_basis"]) == 4

    def test_parse_error_exit1(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["classify", "--alpha", "0", "--beta", "t^^2"]) == 1

    def test_inconclusive_exit2(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--alpha", "0",
                         "--beta", "t^2*(1+0.000001*sin(t))"],
                        tmp_path, monkeypatch, capsys)
        assert code == 2
        assert rep["error"] == "inconclusive classification"


class TestReduce:
    def test_g42_taylor(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["reduce", "--case", "4", "--subalgebra", "g4.2",
                         "--sigma", "1", "--ic", "0,0,0,0,0", "--span", "0:2"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["steps"] > 0
        data = np.loadtxt(tmp_path / "fkdv-reduce.trajectory.csv",
                          delimiter=",", skiprows=1)
        om = data[:, 0]
        phi = data[:, 1]
        small = om[(om > 0.05) & (om < 0.25)]
        for o in small:
            row = phi[np.argmin(np.abs(om - o))]
            assert row == pytest.approx(o**5 / 120.0, rel=1e-4)

    def test_case0_closed_form(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["reduce", "--case", "0", "--subalgebra", "ga",
                         "--a", "1", "--phi0", "2", "--span", "1:3"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["order"] == 1
        data = np.loadtxt(tmp_path / "fkdv-reduce.trajectory.csv",
                          delimiter=",", skiprows=1)
        # phi = C/(omega+1), C = 2*(1+1) = 4
        i = np.argmin(np.abs(data[:, 0] - 3.0))
        assert data[i, 1] == pytest.approx(1.0, rel=1e-10)

    def test_invalid_pair_exit1(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["reduce", "--case", "2", "--subalgebra", "g4.1",
                     "--ic", "0,0,0,0,0", "--span", "0:1"]) == 1

    def test_blowup_exit3(self, tmp_path, monkeypatch, capsys):
        # boost reduction with a pole inside the span
        code, rep = run(["reduce", "--case", "0", "--subalgebra", "ga",
                         "--a", "-2", "--phi0", "1", "--span", "1:3"],
                        tmp_path, monkeypatch, capsys)
        assert code == 3
        assert rep["error"] == "numerical blow-up"


class TestSolve:
    def test_small_run_writes_artifacts(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["solve", "--alpha", "0", "--beta", "-1",
                         "--dt", "1e-3", "--t-end", "0.02", "--N", "32",
                         "--u0", "0.05*sin(x)"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert os.path.exists(tmp_path / "fkdv-solve.fields.csv")
        assert os.path.exists(tmp_path / "fkdv-solve.monitors.csv")
        assert rep["mass_drift"] < 1e-10

    def test_blowup_exit3(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["solve", "--alpha", "0", "--beta", "0.0001",
                         "--dt", "0.5", "--t-end", "5", "--N", "64",
                         "--u0", "50*sin(x)"],
                        tmp_path, monkeypatch, capsys)
        assert code == 3


class TestExact:
    def test_cn4_check(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["exact", "cn4", "--alpha", "0", "--c1", "0", "--c2", "1",
                         "--a", "1", "--check"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["periodic"] is True
        assert rep["residual"] < 1e-6

    def test_degenerate_check(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["exact", "degenerate", "--alpha", "1", "--a", "1",
                         "--b", "0.5", "--t-lo", "0", "--t-hi", "2",
                         "--t-ref", "0", "--check"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["residual"] < 1e-8


class TestVerify:
    def test_x_translation_ratio_one(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["solve", "--alpha", "0", "--beta", "t^2", "--t0", "1",
                     "--t-end", "1.01", "--dt", "1e-3", "--N", "64",
                     "--monitor-stride", "2", "--u0", "0.1*sin(x)",
                     "--t-lo", "0.5", "--t-hi", "3", "--out", "sol"]) == 0
        capsys.readouterr()
        code, rep = run(["verify", "--generator", "0,0,0,0,0,1",
                         "--alpha", "0", "--beta", "t^2",
                         "--t-lo", "0.5", "--t-hi", "3",
                         "--solution", "sol.fields.csv", "--epsilon", "0.01"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["ratio"] == pytest.approx(1.0, abs=0.2)


class TestTransform:
    def test_reduce_to_constant(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["transform", "reduce-to-constant", "--alpha", "0",
                         "--beta", "(t+1)^3", "--t-lo", "0", "--t-hi", "2",
                         "--t-ref", "0"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["reducible"] is True
        assert rep["c1"] == pytest.approx(1.0, abs=1e-7)
        assert rep["c2"] == pytest.approx(1.0, abs=1e-7)
        assert rep["mu"] == pytest.approx(1.0)
        assert rep["image_beta_max_error"] < 1e-6
        assert len(rep["chain"]) == 2

    def test_not_reducible(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["transform", "reduce-to-constant", "--alpha", "0",
                         "--beta", "exp(t)"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["reducible"] is False

    def test_gauge(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["transform", "gauge", "--alpha", "1", "--beta", "1",
                         "--t-lo", "0", "--t-hi", "2", "--t-ref", "0"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        ts = np.array(rep["t"])
        np.testing.assert_allclose(rep["T"], 1 - np.exp(-ts), atol=1e-9)
        np.testing.assert_allclose(rep["beta_hat_at_T"], np.exp(ts), rtol=1e-8)

    def test_mobius(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["transform", "mobius", "--alpha", "0", "--beta", "t^3",
                         "--abcd", "0,1,1,0", "--e", "0,0,1",
                         "--t-lo", "0.5", "--t-hi", "2"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        np.testing.assert_allclose(rep["beta_image"], -1.0, atol=1e-9)


class TestConfigPrecedence:
    def test_toml_overridden_by_flag(self, tmp_path, monkeypatch, capsys):
        cfgfile = tmp_path / "run.toml"
        cfgfile.write_text('[classify]\nbeta = "exp(t)"\nsamples = 32\n')
        code, rep = run(["classify", "--config", str(cfgfile)],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "exponential"  # beta from TOML
        capsys.readouterr()
        code, rep = run(["classify", "--config", str(cfgfile), "--beta", "t^2"],
                        tmp_path, monkeypatch, capsys)
        assert code == 0
        assert rep["case"] == "power"  # flag wins over TOML

    def test_unknown_toml_key_rejected(self, tmp_path, monkeypatch, capsys):
        cfgfile = tmp_path / "bad.toml"
        cfgfile.write_text('[classify]\nbogus = 3\n')
        monkeypatch.chdir(tmp_path)
        assert main(["classify", "--config", str(cfgfile)]) == 1


class TestManifest:
    def test_manifest_reproducible_except_timestamp(self, tmp_path, monkeypatch, capsys):
        run(["classify", "--beta", "t^2", "--out", "m1"], tmp_path, monkeypatch, capsys)
        run(["classify", "--beta", "t^2", "--out", "m2"], tmp_path, monkeypatch, capsys)
        m1 = json.loads((tmp_path / "m1.manifest.json").read_text())
        m2 = json.loads((tmp_path / "m2.manifest.json").read_text())
        m1["timestamp"] = m2["timestamp"] = None
        m1["inputs"]["out"] = m2["inputs"]["out"] = None
        assert m1 == m2

    def test_threads_env_recorded(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("FKDV_THREADS", "2")
        run(["classify", "--beta", "1", "--out", "m"], tmp_path, monkeypatch, capsys)
        m = json.loads((tmp_path / "m.manifest.json").read_text())
        assert m["threads_cap"] == 2

    def test_bad_threads_env_exit1(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("FKDV_THREADS", "zero")
        monkeypatch.chdir(tmp_path)
        assert main(["classify", "--beta", "1"]) == 1

    def test_float_formatting_17g(self, tmp_path, monkeypatch, capsys):
        code, rep = run(["classify", "--beta", "t^1.5", "--out", "m"],
                        tmp_path, monkeypatch, capsys)
        text = (tmp_path / "m.manifest.json").read_text()
        # round-trip: parsing the manifest reproduces the float exactly
        val = json.loads(text)["results"]["parameters"]["rho"]
        assert val == rep["parameters"]["rho"]
