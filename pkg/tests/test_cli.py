import json
from pathlib import Path

import pytest

from spinibr.cli import main


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def sidecar(path):
    return json.loads(Path(path).with_suffix(".json").read_text())


class TestNqcrbCurve:
    def test_writes_curve_and_sidecar(self, tmp_path):
        rc = main(["nqcrb-curve", "--out", str(tmp_path), "--n", "10", "--points", "6"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "nqcrb_n10.csv")
        assert header == ["sigma_over_n", "f_numeric", "f_analytic", "f_q"]
        assert len(rows) == 6
        meta = sidecar(tmp_path / "nqcrb_n10.csv")
        assert meta["command"] == "nqcrb-curve"
        assert meta["config"]["points"] == 6
        assert meta["config"]["sigma_over_n_min"] == 0.01  # default echoed
        assert "version" in meta

    def test_default_triple(self, tmp_path):
        rc = main(["nqcrb-curve", "--out", str(tmp_path), "--points", "3",
                   "--n", "4", "--n", "8"])
        assert rc == 0
        assert (tmp_path / "nqcrb_n4.csv").exists()
        assert (tmp_path / "nqcrb_n8.csv").exists()

    def test_byte_identical_reruns(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            main(["nqcrb-curve", "--out", str(out), "--n", "12", "--points", "4"])
        assert (a / "nqcrb_n12.csv").read_bytes() == (b / "nqcrb_n12.csv").read_bytes()
        assert (a / "nqcrb_n12.json").read_bytes() == (b / "nqcrb_n12.json").read_bytes()


class TestCfiSweep:
    def test_rows_sorted_and_complete(self, tmp_path):
        rc = main(["cfi-sweep", "--out", str(tmp_path), "--scheme", "css", "--n", "8",
                   "--sigmas", "1,0", "--readouts", "echo,linear"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "sweep_css.csv")
        assert header == ["scheme", "readout", "sigma", "phi_opt", "f_c", "f_n", "f_q"]
        keys = [(r[0], r[1], float(r[2])) for r in rows]
        assert keys == sorted(keys)
        assert len(rows) == 4
        meta = sidecar(tmp_path / "sweep_css.csv")
        assert meta["config"]["readouts"] == ["echo", "linear"]
        assert meta["config"]["sigmas"] == [1.0, 0.0]

    def test_threads_flag_is_deterministic(self, tmp_path):
        outs = []
        for name, threads in (("t1", "1"), ("t2", "3")):
            out = tmp_path / name
            main(["cfi-sweep", "--out", str(out), "--scheme", "oat", "--n", "10",
                  "--sigmas", "0,2", "--readouts", "echo", "--threads", threads])
            outs.append((out / "sweep_oat.csv").read_text())
        assert outs[0] == outs[1]

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "scheme": {"kind": "oat", "n": 8, "r": 0.3},
            "sigmas": [0.0],
            "readouts": ["echo"],
        }))
        rc = main(["cfi-sweep", "--out", str(tmp_path), "--config", str(cfg),
                   "--r", "0.2"])
        assert rc == 0
        meta = sidecar(tmp_path / "sweep_oat.csv")
        assert meta["config"]["scheme"]["r"] == 0.2  # flag wins
        assert meta["config"]["scheme"]["n"] == 8


class TestProbSnapshot:
    def test_eight_panels_with_hellinger_sidecar(self, tmp_path):
        rc = main(["prob-snapshot", "--out", str(tmp_path), "--scheme", "oat",
                   "--n", "8", "--sigma", "2"])
        assert rc == 0
        for panel in "abcdefgh":
            header, rows = read_csv(tmp_path / f"snapshot_{panel}.csv")
            assert header == ["m", "p_phi", "dp_phi", "p_phi_delta", "dp_phi_delta"]
            assert len(rows) == 9
            total = sum(float(r[1]) for r in rows)
            assert total == pytest.approx(1.0, abs=1e-9)
        summary = json.loads((tmp_path / "snapshot_summary.json").read_text())
        hell = summary["config"]["hellinger"]
        assert set(hell) == set("abcdefgh")
        assert summary["config"]["dphi"] == pytest.approx(1 / 8)

    def test_noiseless_panels_agree(self, tmp_path):
        main(["prob-snapshot", "--out", str(tmp_path), "--scheme", "oat",
              "--n", "8", "--sigma", "2"])
        summary = json.loads((tmp_path / "snapshot_summary.json").read_text())
        hell = summary["config"]["hellinger"]
        assert hell["a"] == pytest.approx(hell["b"], abs=5e-3)
        assert hell["c"] == pytest.approx(hell["d"], abs=1e-9)


class TestOptVerify:
    def test_three_traces(self, tmp_path):
        rc = main(["opt-verify", "--out", str(tmp_path), "--n", "6",
                   "--iterations", "300", "--seed", "5"])
        assert rc == 0
        for name in ("uniform", "edge_pair", "mid_pair"):
            header, rows = read_csv(tmp_path / f"opt_trace_{name}.csv")
            assert header == ["iteration", "f_sigma", "f_zero", "d_h"]
            assert len(rows) == 300
            meta = sidecar(tmp_path / f"opt_trace_{name}.csv")
            assert "nqcrb_numeric" in meta and "final_f_sigma" in meta
            f_sig = [float(r[1]) for r in rows]
            assert all(b >= a for a, b in zip(f_sig, f_sig[1:]))


class TestBoundCert:
    def test_no_violations_reported(self, tmp_path):
        rc = main(["bound-cert", "--out", str(tmp_path), "--n", "6",
                   "--samples", "60", "--seed", "3"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "bound_cert.csv")
        assert header == ["seed", "f_sigma", "bound"]
        assert len(rows) == 60
        meta = sidecar(tmp_path / "bound_cert.csv")
        assert meta["violations"] == 0
        for r in rows:
            assert float(r[1]) <= float(r[2]) + 1e-9


class TestHusimi:
    def test_field_export_and_normalization(self, tmp_path):
        rc = main(["husimi", "--out", str(tmp_path), "--scheme", "cat", "--n", "8",
                   "--theta-points", "60", "--phi-points", "120"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "husimi_cat.csv")
        assert header == ["theta", "phi", "q"]
        assert len(rows) == 60 * 120
        meta = sidecar(tmp_path / "husimi_cat.csv")
        assert meta["integral"] == pytest.approx(1.0, abs=0.02)
        # row-major: phi varies fastest
        assert float(rows[0][0]) == float(rows[1][0])
        assert float(rows[0][1]) != float(rows[1][1])


class TestStateReport:
    def test_three_bases_and_summary(self, tmp_path):
        rc = main(["state-report", "--out", str(tmp_path), "--scheme", "qnd", "--n", "8"])
        assert rc == 0
        for basis in ("x", "y", "z"):
            header, rows = read_csv(tmp_path / f"dist_qnd_{basis}.csv")
            assert header == ["m", "p", "dp"]
            assert sum(float(r[1]) for r in rows) == pytest.approx(1.0, abs=1e-9)
        meta = sidecar(tmp_path / "dist_qnd_y.csv")
        assert meta["purity"] == pytest.approx(0.47, abs=0.2)
        assert meta["axis"] == [0.0, 1.0, 0.0]

    def test_pure_scheme_reports_unit_purity(self, tmp_path):
        main(["state-report", "--out", str(tmp_path), "--scheme", "cat", "--n", "8"])
        meta = sidecar(tmp_path / "dist_cat_z.csv")
        assert meta["purity"] == 1.0
        assert meta["f_q"] == pytest.approx(64.0, rel=1e-9)


class TestErrors:
    def test_invalid_scheme_parameter(self, tmp_path, capsys):
        rc = main(["cfi-sweep", "--out", str(tmp_path), "--scheme", "qnd",
                   "--n", "9", "--sigmas", "0"])
        assert rc == 2
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "\n" not in err.strip()

    def test_missing_scheme(self, tmp_path):
        assert main(["prob-snapshot", "--out", str(tmp_path), "--n", "8"]) == 2

    def test_malformed_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        rc = main(["cfi-sweep", "--out", str(tmp_path), "--config", str(cfg)])
        assert rc == 2
