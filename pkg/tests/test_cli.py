"""Command-line entry points: product computation and experiment runs."""

import json
import math

import numpy as np
import numpy.testing as npt
import pytest

from splineprod import Spline, bernstein_knots, make_spline, uniform_open_knots
from splineprod.bench import CSV_HEADER
from splineprod.cli import build_parser, main


def write_spline(path, spline):
    path.write_text(json.dumps(spline.to_dict()))
    return str(path)


@pytest.fixture
def cubic_pair(tmp_path):
    rng = np.random.default_rng(17)
    kv = uniform_open_knots(3, 5)
    f = Spline(kv, rng.uniform(-1, 1, size=kv.dimension))
    g = Spline(kv, rng.uniform(-1, 1, size=kv.dimension))
    return (
        write_spline(tmp_path / "f.json", f),
        write_spline(tmp_path / "g.json", g),
    )


def test_parser_rejects_bad_invocations():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args([])
    with pytest.raises(SystemExit):
        parser.parse_args(["product", "f.json", "g.json"])  # --method required
    with pytest.raises(SystemExit):
        parser.parse_args(["product", "f.json", "g.json", "--method", "magic"])
    with pytest.raises(SystemExit):
        parser.parse_args(["experiment", "--family", "spline_poly"])  # no seed
    with pytest.raises(SystemExit):
        parser.parse_args(
            ["experiment", "--family", "spline_poly", "--seed", "-3"]
        )
    with pytest.raises(SystemExit):
        parser.parse_args(
            ["experiment", "--family", "spline_poly", "--seed", str(2**64)]
        )


def test_product_direct_writes_document(cubic_pair, tmp_path, capsys):
    f_path, g_path = cubic_pair
    out = tmp_path / "product.json"
    code = main(["product", f_path, g_path, "--method", "direct", "-o", str(out)])
    assert code == 0
    document = json.loads(out.read_text())
    assert document["degree"] == 6
    assert len(document["coefficients"]) == len(document["knots"]) - 7
    stats = document["stats"]
    assert stats["naive_terms"] == math.comb(6, 3)
    assert 0 < stats["nu_bar"] <= stats["naive_terms"]
    assert len(stats["distinct_counts"]) == len(document["coefficients"])
    # the emitted document is a valid spline input again
    assert Spline.from_dict(document).degree == 6


def test_product_stdout_and_method_agreement(cubic_pair, capsys):
    f_path, g_path = cubic_pair
    assert main(["product", f_path, g_path, "--method", "direct"]) == 0
    direct = json.loads(capsys.readouterr().out)
    assert main(["product", f_path, g_path, "--method", "naive"]) == 0
    naive = json.loads(capsys.readouterr().out)
    assert main(["product", f_path, g_path, "--method", "collocation"]) == 0
    colloc = json.loads(capsys.readouterr().out)
    npt.assert_allclose(direct["coefficients"], naive["coefficients"], atol=1e-13)
    npt.assert_allclose(direct["coefficients"], colloc["coefficients"], atol=1e-10)
    assert "stats" not in colloc


def test_product_span_mismatch_exits_2(tmp_path, capsys):
    f = Spline(bernstein_knots(2), np.ones(3))
    g = Spline(bernstein_knots(2, end=2.0), np.ones(3))
    code = main(
        [
            "product",
            write_spline(tmp_path / "f.json", f),
            write_spline(tmp_path / "g.json", g),
            "--method",
            "direct",
        ]
    )
    assert code == 2
    assert "span" in capsys.readouterr().err


def test_product_invalid_documents_exit_2(tmp_path, capsys, cubic_pair):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["product", str(bad), cubic_pair[1], "--method", "direct"]) == 2
    assert "bad.json" in capsys.readouterr().err
    missing = tmp_path / "missing.json"
    assert main(["product", str(missing), cubic_pair[1], "--method", "direct"]) == 2
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"degree": 1, "knots": [0, 0, 1, 1]}))
    assert main(["product", str(invalid), cubic_pair[1], "--method", "direct"]) == 2
    assert "missing required field" in capsys.readouterr().err


def test_naive_guard_exits_3(tmp_path, capsys):
    f = Spline(bernstein_knots(30), np.ones(31))
    g = Spline(bernstein_knots(31), np.ones(32))
    f_path = write_spline(tmp_path / "f.json", f)
    g_path = write_spline(tmp_path / "g.json", g)
    assert main(["product", f_path, g_path, "--method", "naive"]) == 3
    assert "force" in capsys.readouterr().err
    # the direct method handles the same pair fine
    assert main(["product", f_path, g_path, "--method", "direct"]) == 0


def test_experiment_writes_csv(tmp_path):
    out = tmp_path / "rows.csv"
    code = main(
        [
            "experiment",
            "--family",
            "mesh_refine",
            "--seed",
            "99",
            "-o",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 11
    assert all(line.startswith("mesh_refine,") for line in lines[1:])


def test_experiment_stdout_grid_points(capsys):
    code = main(
        [
            "experiment",
            "--family",
            "mesh_refine",
            "--seed",
            "7",
            "--grid-points",
            "11",
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 11


def test_module_entry_point():
    import splineprod.__main__  # noqa: F401  -- import must not execute main
