import csv
import io
import json
import math

import pytest

from cli.triangle_lab import (EXIT_DOMAIN, EXIT_OK, build_parser, cmd_region, config_from_args, main,
                              parse_range, parse_vector)
from models.exceptions import DomainError


def _run(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


# ============================================================================
# PARSING HELPERS
# ============================================================================

def test_parse_vector():
    assert parse_vector("1, 0,-2.5", 3).tolist() == [1.0, 0.0, -2.5]
    for text in ("1,2", "a,b,c", "1,inf,0"):
        with pytest.raises(DomainError):
            parse_vector(text, 3)


def test_parse_range():
    assert parse_range("3..6") == [3, 4, 5, 6]
    assert parse_range("0,2") == [0, 2]
    assert parse_range("4") == [4]
    with pytest.raises(DomainError):
        parse_range("x..3")


def test_flags_reach_the_config():
    args = build_parser().parse_args(["apply", "-d", "3", "--f", "const(1)", "--g", "const(1)", "--x", "0,0,0",
                                      "--full", "--seed", "7", "--n-outer", "40", "--format", "csv"])
    config = config_from_args(args)
    assert (config.dimension, config.seed, config.tier, config.output_format) == (3, 7, "full", "csv")
    assert config.quadrature.n_outer == 40
    assert config.quadrature.seed == 7


def test_argument_errors_exit_with_usage():
    with pytest.raises(SystemExit) as excinfo:
        main(["region", "-p", "2"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit):
        main(["region", "-p", "2", "-q", "2", "--fast", "--full"])


# ============================================================================
# COMMANDS
# ============================================================================

def test_region_at_the_origin(tmp_path):
    code, out = _run(tmp_path, "region", "-d", "5", "-p", "inf", "-q", "inf")
    assert code == EXIT_OK
    result = json.loads(out.read_text(encoding="utf-8"))["results"][0]
    assert result["inside"] and result["banach"]
    assert result["r"] == "inf"
    assert result["critical_exponent"] == "25/13"


def test_region_rejects_points_past_the_critical_diagonal(config):
    result = cmd_region(config, "3/2", "3/2", "3/4", s="2").results[0]
    assert not result["inside"]
    assert result["holder_scaling"]
    assert result["spherical_improving"]


def test_mu_hat_reports_both_methods(tmp_path):
    code, out = _run(tmp_path, "mu-hat", "-d", "3", "--xi", "1,0,0", "--eta", "0,0.5,0", "--n-samples", "20000")
    assert code == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert [r["method"] for r in data["results"]] == ["closed", "monte_carlo"]
    assert data["checks"][0]["name"] == "methods_agree"


def test_mu_hat_needs_three_dimensions(tmp_path):
    code, out = _run(tmp_path, "mu-hat", "-d", "2", "--xi", "1,0", "--eta", "0,1")
    assert code == EXIT_DOMAIN
    assert not out.exists()


def test_bad_test_function_is_a_domain_error(tmp_path):
    code, _ = _run(tmp_path, "apply", "-d", "3", "--f", "gauss(0;1)", "--g", "const(1)", "--x", "0,0,0")
    assert code == EXIT_DOMAIN


def test_apply_with_majorization(tmp_path):
    code, out = _run(tmp_path, "apply", "-d", "3", "--f", "gaussian(0;2)", "--g", "const(1)", "--x", "0,0,0")
    assert code == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["results"][0]["value"] == pytest.approx(math.exp(-math.pi / 4.0), rel=1e-10)
    assert data["checks"] == [data["checks"][0]]
    assert data["checks"][0]["name"] == "majorization" and data["checks"][0]["passed"]


def test_volume_as_csv(tmp_path):
    code, out = _run(tmp_path, "volume", "-d", "5", "--i", "3..5", "--j", "0..1", "--k", "0..1", "--format",
                     "csv", name="volume.csv")
    assert code == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# version: ")
    header = next(line for line in lines if not line.startswith("#"))
    assert header.split(",")[:4] == ["i", "j", "k", "volume"]


def test_volume_monte_carlo_columns_are_numbers(tmp_path):
    code, out = _run(tmp_path, "volume", "-d", "5", "--i", "3", "--j", "0", "--k", "0..1", "--mc", "2000", "--format",
                     "csv", name="volume.csv")
    assert code == EXIT_OK
    body = [line for line in out.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert len(rows) == 2
    for row in rows:
        assert float(row["mc_volume"]) >= 0
        assert float(row["mc_se"]) >= 0


def test_volume_without_valid_indices(tmp_path):
    code, _ = _run(tmp_path, "volume", "--i", "1", "--j", "5", "--k", "0")
    assert code == EXIT_DOMAIN


def test_decompose_below_the_critical_dimension(tmp_path):
    code, out = _run(tmp_path, "decompose", "-d", "4", "--i-max", "10")
    assert code == EXIT_OK
    result = json.loads(out.read_text(encoding="utf-8"))["results"][0]
    assert result["divergent"]
    assert "critical_exponent" not in result


def test_decay_rejects_small_radii(tmp_path):
    code, _ = _run(tmp_path, "decay", "--ray", "axis", "--r-min", "1")
    assert code == EXIT_DOMAIN


def test_maximal_rows(tmp_path):
    code, out = _run(tmp_path, "maximal", "-d", "3", "--f", "gaussian(0;2)", "--g", "gaussian(0;2)", "--x",
                     "0,0,0", "--t-min", "0.5", "--t-max", "2", "--n-t", "5", "--format", "csv", name="max.csv")
    assert code == EXIT_OK
    body = [line for line in out.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]
    assert body[0] == "x,t,value,error"
    assert len(body) == 6


@pytest.mark.parametrize("output_format", ["json", "csv"])
def test_seeded_runs_are_byte_identical(tmp_path, output_format):
    argv = ["mu-hat", "-d", "4", "--xi", "1,0.5,0,0", "--eta", "0,0.3,0.2,0", "--n-samples", "5000", "--seed", "9",
            "--format", output_format]
    first = _run(tmp_path, *argv, name="first")[1].read_bytes()
    second = _run(tmp_path, *argv, name="second")[1].read_bytes()
    assert first == second
    reseeded = _run(tmp_path, *argv[:-4], "--seed", "10", *argv[-2:], name="third")[1].read_bytes()
    assert reseeded != first


@pytest.mark.slow
def test_verify_fast_tier_is_reproducible(tmp_path):
    code, out = _run(tmp_path, "verify", "-d", "5", name="first.json")
    assert code == EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8"))["command"] == "verify"
    _, again = _run(tmp_path, "verify", "-d", "5", name="second.json")
    assert out.read_bytes() == again.read_bytes()
