"""
Tests for the command-line interface
"""
import json

import pytest

from sepca.cli.main import main
from sepca.core.bench import RESULT_COLUMNS

pytestmark = pytest.mark.integration


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def data_file(tmp_path, capsys):
    path = tmp_path / "x.csv"
    code, out = run(capsys, "generate", "--p", "30", "--n", "40", "--theta", "20",
                    "--seed", "3", "--output", str(path))
    assert code == 0
    assert json.loads(out)["support"] == [0]
    return path


class TestDataCommands:
    """Test generate / select / estimate / sigma"""

    def test_select(self, data_file, capsys):
        code, out = run(capsys, "select", "--input", str(data_file), "--algorithm", "sum",
                        "--sigma", "1")
        payload = json.loads(out)
        assert code == 0
        assert payload["selected"] == [0]
        assert payload["indexing"] == "0-based"

    def test_estimate(self, data_file, capsys):
        code, out = run(capsys, "estimate", "--input", str(data_file), "--algorithm", "hc-sum",
                        "--sigma", "1")
        payload = json.loads(out)
        assert code == 0
        assert 0 in payload["selected"]
        assert len(payload["u_hat"]) == 30
        assert abs(payload["u_hat"][0]) > 0.9
        assert payload["empty"] is False

    def test_estimated_sigma(self, data_file, capsys):
        code, out = run(capsys, "select", "--input", str(data_file), "--algorithm", "ell2")
        assert code == 0
        assert 0.5 < json.loads(out)["sigma"] < 1.5

    def test_sigma(self, data_file, capsys):
        code, out = run(capsys, "sigma", "--input", str(data_file))
        assert code == 0
        assert json.loads(out)["coefficients"] == 30 * 20

    def test_binary_output(self, tmp_path, capsys):
        path = tmp_path / "x.bin"
        code, _ = run(capsys, "generate", "--p", "20", "--n", "8", "--theta", "1",
                      "--u-kind", "explicit", "--support", "2,5", "--output", str(path))
        assert code == 0
        assert path.read_bytes()[:6] == b"SEPCA1"


class TestAnalysisCommands:
    """Test theory / geometry / bench"""

    def test_theory_curves(self, capsys):
        code, out = run(capsys, "theory", "--p", "1000", "--n-grid", "100,1000",
                        "--algorithms", "sum,ell2")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "algorithm,n,beta_crit,asymptotic"
        assert len(lines) == 5

    def test_theory_constants(self, capsys):
        code, out = run(capsys, "theory", "--constants", "--p", "100")
        assert code == 0
        assert json.loads(out)["U"] == pytest.approx(2.5758, abs=1e-4)

    def test_geometry(self, capsys):
        code, out = run(capsys, "geometry", "--alg-a", "sum", "--alg-b", "ell2",
                        "--n", "400", "--p", "1000", "--profile", "rise-fall")
        payload = json.loads(out)
        assert code == 0
        assert payload["cap_exists"] is True
        assert payload["preferred"] == "sum"

    def test_bench_config(self, tmp_path, capsys):
        config = tmp_path / "exp.yaml"
        output = tmp_path / "out.csv"
        config.write_text(
            "experiment:\n  p: 20\n  n_grid: [16]\n  theta_grid: [2.0]\n"
            "  algorithms: [sum, fdr]\n  trials: 2\n"
        )
        code, _ = run(capsys, "bench", "--config", str(config), "--output", str(output))
        assert code == 0
        assert output.read_text().splitlines()[0].startswith(",".join(RESULT_COLUMNS))

    def test_bench_stdout(self, tmp_path, capsys):
        config = tmp_path / "exp.yaml"
        config.write_text("p: 20\nn_grid: [16]\ntheta_grid: [2.0]\nalgorithms: [ell2]\n")
        code, out = run(capsys, "bench", "--config", str(config), "--trials", "1")
        assert code == 0
        assert len(out.strip().splitlines()) == 2

    def test_bench_null(self, capsys):
        code, out = run(capsys, "bench", "--null", "sum", "--p", "30", "--n", "10", "--trials", "5")
        assert code == 0
        assert 0.0 <= json.loads(out)["rate"] <= 1.0


class TestExitCodes:
    """Test error mapping"""

    def test_usage_error(self, capsys):
        assert main(["select"]) == 2
        assert main(["theory", "--algorithms", "sum,pca"]) == 2

    def test_missing_matrix(self, tmp_path, capsys):
        assert main(["select", "--input", str(tmp_path / "nope.csv"), "--sigma", "1"]) == 3

    def test_ragged_matrix(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3\n")
        assert main(["sigma", "--input", str(path)]) == 3
        assert "line 2" in capsys.readouterr().err

    def test_domain_error(self, capsys):
        assert main(["geometry", "--alg-a", "ell1", "--alg-b", "sum", "--n", "10", "--p", "10"]) == 2

    def test_bad_log_level(self, data_file, capsys):
        assert main(["--log-level", "LOUD", "sigma", "--input", str(data_file)]) == 2

    def test_invalid_config(self, tmp_path, capsys):
        config = tmp_path / "exp.yaml"
        config.write_text("n_grid: []\ntheta_grid: [1.0]\n")
        assert main(["bench", "--config", str(config)]) == 2
