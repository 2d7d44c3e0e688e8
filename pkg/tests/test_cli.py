import json

import numpy as np
import pytest

from spectrend.cli import main
from spectrend.data import benthic_fixture_path


def read_table(path, **kw):
    return np.loadtxt(path, **kw)


class TestSynth:
    def test_writes_exactly_two_files(self, tmp_path):
        out = tmp_path / "o"
        assert main(["synth", "--model", "F", "--steps", "2000", "--seed", "7",
                     "--out", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == ["series.meta.json", "series.txt"]

    def test_drift_model_starts_at_one(self, tmp_path):
        out = tmp_path / "o"
        assert main(["synth", "--model", "M", "--drift", "linear",
                     "--out", str(out)]) == 0
        data = read_table(out / "series.txt")
        assert data[0, 1] == pytest.approx(1.0, abs=1e-15)

    def test_invalid_delta_exits_2(self, tmp_path, capsys):
        code = main(["synth", "--model", "F", "--delta", "1.5",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "delta" in capsys.readouterr().err

    def test_metadata_reproduces_series(self, tmp_path):
        out = tmp_path / "o"
        main(["synth", "--model", "F", "--steps", "300", "--seed", "5",
              "--out", str(out)])
        meta = json.loads((out / "series.meta.json").read_text())
        out2 = tmp_path / "o2"
        main(["synth", "--model", meta["model"]["kind"],
              "--steps", str(meta["model"]["n_steps"]),
              "--seed", str(meta["model"]["seed"]), "--out", str(out2)])
        assert (out / "series.txt").read_bytes() == (out2 / "series.txt").read_bytes()

    def test_env_var_default_output(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("SPECTREND_OUT", str(target))
        assert main(["synth", "--model", "M", "--steps", "50"]) == 0
        assert (target / "series.txt").exists()


class TestAnalyze:
    def test_default_switching_run_tables(self, tmp_path):
        out = tmp_path / "o"
        assert main(["analyze", "--model", "F", "--out", str(out)]) == 0
        for name in ("eigenvalues.txt", "periods.txt", "modes.txt", "run_config.json"):
            assert (out / name).exists(), name
        eigs = read_table(out / "eigenvalues.txt")
        assert eigs[0, 3] == pytest.approx(1.0, abs=1e-10)  # modulus of mode 1
        periods = read_table(out / "periods.txt", usecols=(0, 1, 2, 4))
        with open(out / "periods.txt") as f:
            rows = [line.split() for line in f if not line.startswith("#")]
        osc = [float(r[3]) for r in rows if r[5] == "oscillatory"]
        assert any(abs(p - 40.39) < 2.5 for p in osc)
        assert any(abs(p - 94.95) < 2.5 for p in osc)

    def test_deterministic_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["analyze", "--model", "F", "--steps", "600", "--knn", "15"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for name in ("eigenvalues.txt", "periods.txt", "modes.txt"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = {"source": {"kind": "synthetic",
                          "model": {"kind": "F", "n_steps": 500, "seed": 2}},
               "operator": {"knn": 12, "modes": 8}}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "o"
        assert main(["analyze", "--config", str(cfg_path), "--steps", "600",
                     "--out", str(out)]) == 0
        resolved = json.loads((out / "run_config.json").read_text())
        assert resolved["source"]["model"]["n_steps"] == 600  # flag wins
        assert resolved["operator"]["knn"] == 12              # config survives
        n_rows = read_table(out / "modes.txt").shape[0]
        assert n_rows == 600 - 2 * 10 - 1

    def test_unknown_config_section_exits_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"sources": {}}))
        code = main(["analyze", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "unknown config section" in capsys.readouterr().err

    def test_embedding_too_long_exits_2(self, tmp_path, capsys):
        code = main(["analyze", "--model", "F", "--Q", "300", "--lag", "10",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        err = capsys.readouterr().err
        assert "[embed]" in err and "too short" in err

    def test_missing_source_file_exits_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(
            {"source": {"kind": "scalar", "path": str(tmp_path / "absent.txt")}}))
        code = main(["analyze", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "does not exist" in capsys.readouterr().err

    def test_benthic_fixture_pipeline(self, tmp_path):
        cfg = {"source": {"kind": "scalar", "path": str(benthic_fixture_path()),
                          "dt": 1.0, "t_start": 0.0, "t_end": 3000.0,
                          "reverse_time": True},
               "embedding": {"Q": 5, "lag": 10},
               "operator": {"step": 7, "knn": 7, "modes": 12}}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "o"
        assert main(["analyze", "--config", str(cfg_path), "--out", str(out)]) == 0
        eigs = read_table(out / "eigenvalues.txt")
        assert eigs[1, 3] == pytest.approx(0.9632, abs=0.02)  # second modulus


class TestReconstruct:
    def test_single_pair_member_auto_closed(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert main(["reconstruct", "--model", "F", "--steps", "600",
                     "--knn", "15", "--indices", "2", "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "notice" in captured and "conjugate" in captured
        header = (out / "reconstruction.txt").read_text().splitlines()[0]
        assert "real=yes" in header

    def test_constant_mode_projection_constant(self, tmp_path):
        out = tmp_path / "o"
        assert main(["reconstruct", "--model", "F", "--steps", "600",
                     "--knn", "15", "--indices", "1", "--out", str(out)]) == 0
        data = read_table(out / "reconstruction.txt")
        assert np.ptp(data[:, 1]) < 1e-8 * max(1.0, abs(data[:, 1].mean()))

    def test_unknown_index_exits_2(self, tmp_path, capsys):
        code = main(["reconstruct", "--model", "F", "--steps", "600",
                     "--knn", "15", "--indices", "99", "--out", str(tmp_path / "o")])
        assert code == 2
        assert "out of range" in capsys.readouterr().err


class TestPeriods:
    def test_prints_mode_table(self, tmp_path, capsys):
        assert main(["periods", "--model", "F", "--steps", "600",
                     "--knn", "15", "--out", str(tmp_path / "o")]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("# j")
        first = lines[1].split()
        assert first[0] == "1" and first[3] == "inf" and first[5] == "constant"
        kinds = {line.split()[5] for line in lines[1:]}
        assert "oscillatory" in kinds

    def test_writes_config_sidecar(self, tmp_path):
        out = tmp_path / "o"
        main(["periods", "--model", "F", "--steps", "600", "--knn", "15",
              "--out", str(out)])
        resolved = json.loads((out / "run_config.json").read_text())
        assert resolved["embedding"] == {"Q": 3, "lag": 10}
