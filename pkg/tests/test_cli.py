import numpy as np
import pytest
from click.testing import CliRunner

from veesys import catalogue, io
from veesys.cli import main
from veesys.core import CovectorConfiguration


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def h3_file(tmp_path):
    path = tmp_path / "h3.json"
    io.save_document(catalogue.construct("H3", {}), path)
    return str(path)


@pytest.fixture
def broken_file(tmp_path):
    config = catalogue.construct("A3", {"c1": 1, "c2": 1, "c3": 1})
    rng = np.random.default_rng(7)
    noisy = CovectorConfiguration(
        config.matrix + 1e-2 * rng.standard_normal(config.matrix.shape),
        config.labels,
    )
    path = tmp_path / "noisy.json"
    io.save_document(noisy, path)
    return str(path)


def _body(output):
    return [line for line in output.splitlines() if not line.startswith("# elapsed")]


def test_verify_catalogue_pass(runner):
    result = runner.invoke(main, ["verify", "--catalogue", "H3"])
    assert result.exit_code == 0, result.output
    assert "isVeeSystem: True" in result.output


def test_verify_file_pass(runner, h3_file):
    result = runner.invoke(main, ["verify", h3_file])
    assert result.exit_code == 0, result.output


def test_verify_perturbed_fails(runner, broken_file):
    result = runner.invoke(main, ["verify", broken_file])
    assert result.exit_code == 1
    assert "isVeeSystem: False" in result.output


def test_garbage_input_is_usage_error(runner, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{not json")
    result = runner.invoke(main, ["verify", str(path)])
    assert result.exit_code == 2


def test_unknown_catalogue_id(runner):
    result = runner.invoke(main, ["verify", "--catalogue", "Z9"])
    assert result.exit_code == 2


def test_both_input_sources_rejected(runner, h3_file):
    result = runner.invoke(main, ["verify", h3_file, "--catalogue", "H3"])
    assert result.exit_code == 2


def test_inadmissible_params_usage_error(runner):
    result = runner.invoke(
        main, ["verify", "--catalogue", "D3", "--params", "t=5,s=1"]
    )
    assert result.exit_code == 2


def test_report_is_deterministic(runner):
    args = ["verify", "--catalogue", "G3", "--params", "t=1.25"]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert _body(first.output) == _body(second.output)
    assert any(line.startswith("# elapsed:") for line in first.output.splitlines())


def test_out_writes_file(runner, tmp_path):
    target = tmp_path / "report.txt"
    result = runner.invoke(
        main, ["nu", "--catalogue", "H3", "--out", str(target)]
    )
    assert result.exit_code == 0
    assert "nu" in target.read_text()


def test_matroid_reports_fingerprint(runner):
    result = runner.invoke(main, ["matroid", "--catalogue", "A3",
                                  "--params", "c1=1,c2=1,c3=1"])
    assert result.exit_code == 0
    assert "fingerprint:" in result.output
    assert "pairFlats: 3" in result.output
    assert "multiFlats: 4" in result.output


def test_weights_infeasible_exit(runner):
    result = runner.invoke(main, ["weights", "--catalogue", "D3",
                                  "--params", "t=1,s=1"])
    assert result.exit_code == 1
    assert "status: infeasible" in result.output


def test_weights_universal_value(runner):
    result = runner.invoke(main, ["weights", "--catalogue", "A3",
                                  "--params", "c1=1,c2=1,c3=1"])
    assert result.exit_code == 0
    assert "universalValue: 1.5" in result.output


def test_harmonic_b3(runner):
    result = runner.invoke(main, ["harmonic", "--catalogue", "B3",
                                  "--params", "c1=1,c2=1,c3=1,gamma=0"])
    assert result.exit_code == 0
    assert "allHarmonic: True" in result.output


def test_deform_single(runner):
    result = runner.invoke(main, ["deform", "--catalogue", "H3"])
    assert result.exit_code == 0
    assert "corank: 1" in result.output


def test_deform_fixed_mode(runner):
    result = runner.invoke(main, ["deform", "--catalogue", "A3",
                                  "--params", "c1=1,c2=1,c3=1",
                                  "--mode", "fixed"])
    assert result.exit_code == 0
    assert "corank: 1" in result.output


def test_deform_grid(runner):
    result = runner.invoke(main, ["deform", "--catalogue", "B3", "--grid"])
    assert result.exit_code == 0
    assert "freeNu=4 fixedNu=1" in result.output


def test_deform_grid_requires_catalogue(runner):
    result = runner.invoke(main, ["deform", "--grid"])
    assert result.exit_code == 2


def test_reconstruct_without_branch(runner):
    result = runner.invoke(main, ["reconstruct", "h3"])
    assert result.exit_code == 2


def test_reconstruct_minus_branch(runner):
    result = runner.invoke(main, ["reconstruct", "h3", "--branch", "minus"])
    assert result.exit_code == 0
    assert "matchesReference: True" in result.output


def test_reconstruct_pure_meets(runner):
    result = runner.invoke(main, ["reconstruct", "a3"])
    assert result.exit_code == 0


def test_catalogue_list(runner):
    result = runner.invoke(main, ["catalogue", "list"])
    assert result.exit_code == 0
    assert "H4A1" in result.output


def test_catalogue_relations(runner):
    result = runner.invoke(main, ["catalogue", "relations"])
    assert result.exit_code == 0
    assert "extensions: 5" in result.output
    assert "degenerations: 11" in result.output


def test_catalogue_verify_all_strict(runner):
    result = runner.invoke(main, ["catalogue", "verify-all", "--strict"])
    assert result.exit_code == 0, result.output
    assert "failures: 0" in result.output
    assert result.output.count("skipped (flagged, --strict)") == 2


def test_bad_rtol_rejected(runner):
    result = runner.invoke(main, ["--rtol", "-1", "verify", "--catalogue", "H3"])
    assert result.exit_code == 2
