import json

import jsonschema
import numpy as np
import pytest

import royden as R
from royden.cli import main, parse_generator_spec, parse_levels, UsageError
from royden.schemas import available, schema_for


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0, out
    payload = json.loads(out)
    jsonschema.validate(payload, schema_for(payload["command"]))
    return payload


@pytest.fixture
def graph_file(tmp_path):
    s = R.generate_lattice(1, 3)
    path = tmp_path / "z1r3.graph"
    path.write_text(R.serialize_graph_file(s))
    return str(path)


@pytest.fixture
def fn_file(tmp_path, graph_file):
    s = R.parse_graph_file(open(graph_file).read())
    f = R.solve_dirichlet(s, {-3: 0.0, 3: 1.0})
    path = tmp_path / "sol.fn"
    path.write_text(R.serialize_vertex_fn(f))
    return str(path)


def test_spec_parsing_helpers():
    gen, level = parse_generator_spec("lattice:d=2,r=4")
    assert gen.family == "lattice" and level == 4
    gen, level = parse_generator_spec("tree:k=3,depth=5,c=0.5")
    assert gen.family.startswith("tree") and level == 5
    assert parse_levels("8:64") == (8, 16, 32, 64)
    assert parse_levels("4:10:2") == (4, 6, 8, 10)
    assert parse_levels("3,5,9") == (3, 5, 9)
    with pytest.raises(UsageError):
        parse_generator_spec("torus:n=3")
    with pytest.raises(UsageError):
        parse_generator_spec("lattice:d=2,bogus=1")


def test_validate_and_gen_round_trip(capsys, graph_file):
    payload = run_json(capsys, "validate", "--graph", graph_file)
    assert payload["ok"] and payload["n"] == 7
    code, text = run(capsys, "gen", "--generator", "lattice:d=1,r=3")
    assert code == 0
    assert R.sections_equal(
        R.parse_graph_file(text), R.parse_graph_file(open(graph_file).read())
    )


def test_cap_command(capsys):
    payload = run_json(capsys, "cap", "--generator", "lattice:d=1,r=4", "--vertex", "0")
    assert payload["cap"] == pytest.approx(0.5, abs=1e-10)
    assert payload["level"] == 4


def test_cap_profile_json_and_csv(capsys):
    payload = run_json(
        capsys, "cap-profile", "--generator", "lattice:d=1", "--levels", "2:16"
    )
    assert payload["levels"] == [2, 4, 8, 16]
    np.testing.assert_allclose(payload["values"], [1.0, 0.5, 0.25, 0.125], atol=1e-10)
    code, out = run(
        capsys, "cap-profile", "--generator", "lattice:d=1", "--levels", "2:16",
        "--output", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "level,cap,plateau_residual,decay_residual"
    assert len(lines) == 5


def test_classify_command(capsys):
    payload = run_json(capsys, "classify", "--generator", "lattice:d=2")
    assert payload["verdict"] == "recurrent"
    assert payload["profile"]["model"] == "log-decay"


def test_gamma_commands(capsys, graph_file):
    # wired resistance 0<->1: direct 1 Ohm in parallel with 3+2 through ground
    payload = run_json(capsys, "gamma", "--graph", graph_file, "--x", "0", "--y", "1")
    assert payload["value"] == pytest.approx(np.sqrt(5 / 6), abs=1e-9)
    payload = run_json(
        capsys, "gamma-o", "--graph", graph_file, "--pin", "0", "--x", "-1", "--y", "1"
    )
    assert payload["value"] > 0
    payload = run_json(
        capsys, "resistance", "--graph", graph_file, "--x", "-1", "--y", "1"
    )
    assert payload["value"] == pytest.approx(2.0, abs=1e-10)


def test_ut_report_command(capsys):
    payload = run_json(capsys, "ut-report", "--generator", "tree:k=3")
    assert payload["verdict"] == "certified-UT"
    assert payload["evidence"] == "spectral-gap"


def test_dirichlet_decompose_maxcheck(capsys, graph_file, fn_file, tmp_path):
    bd = tmp_path / "bd.fn"
    bd.write_text("0 0.0\n6 1.0\n")
    payload = run_json(capsys, "dirichlet", "--graph", graph_file, "--boundary", str(bd))
    np.testing.assert_allclose(payload["values"], np.arange(7) / 6, atol=1e-10)
    payload = run_json(capsys, "decompose", "--graph", graph_file, "--fn", fn_file)
    assert payload["energy_f0"] == pytest.approx(0.0, abs=1e-12)
    assert payload["energy_fh"] == pytest.approx(payload["energy"], abs=1e-12)
    payload = run_json(capsys, "maxcheck", "--graph", graph_file, "--fn", fn_file)
    assert payload["passed"]


def test_truncate_and_heat(capsys, graph_file, fn_file):
    payload = run_json(
        capsys, "truncate-harmonic", "--graph", graph_file, "--fn", fn_file,
        "--bound", "0.5",
    )
    assert payload["fh_nonconstant"]
    assert payload["energy_truncated"] <= payload["energy_input"] + 1e-12
    payload = run_json(
        capsys, "heat", "--graph", graph_file, "--t", "0.25", "--fn", fn_file,
        "--check", "--seed", "5",
    )
    assert payload["ultra"]["passed"]
    code, _ = run(
        capsys, "heat", "--graph", graph_file, "--t", "0.25", "--fn", fn_file, "--check"
    )
    assert code == 2  # --check without --seed


def test_spectrum_bounds_trace_gapcheck(capsys, graph_file):
    payload = run_json(capsys, "spectrum", "--graph", graph_file)
    assert len(payload["eigenvalues"]) == 5
    code, out = run(capsys, "bounds", "--graph", graph_file, "--output", "csv")
    assert code == 0 and out.splitlines()[0] == "n,bound,eigenvalue,slack"
    payload = run_json(capsys, "bounds", "--graph", graph_file)
    assert payload["passed"]
    payload = run_json(capsys, "trace", "--graph", graph_file, "--times", "0.5,1")
    assert len(payload["points"]) == 2
    payload = run_json(capsys, "gapcheck", "--graph", graph_file, "--seed", "3")
    assert payload["verified"]


def test_hbempty_and_liouville(capsys):
    payload = run_json(capsys, "hbempty", "--generator", "lattice:d=2,c0=1")
    assert payload["status"] == "empty"
    payload = run_json(
        capsys, "liouville", "--generator", "tree:k=3", "--levels", "3,4,5",
        "--seed", "2", "--ut-window", "2",
    )
    assert payload["trend"] == "non-liouville-trend"
    assert "not one-point" in payload["note"]


def test_walk_command(capsys, graph_file):
    payload = run_json(
        capsys, "walk", "--graph", graph_file, "--vertex", "0", "--trials", "20000",
        "--seed", "4",
    )
    assert payload["cap_estimate"] == pytest.approx(2.0 / 3.0, abs=0.02)
    assert payload["pi"] == 2.0


def test_error_record_and_exit_codes(capsys, graph_file):
    code, out = run(capsys, "cap", "--graph", graph_file, "--vertex", "99")
    assert code == 1
    payload = json.loads(out)
    jsonschema.validate(payload, schema_for("error"))
    assert payload["error"] == "UnknownVertex"
    code, _ = run(capsys, "cap", "--generator", "lattice:d=0,r=2", "--vertex", "0")
    assert code == 2
    code, _ = run(capsys, "cap", "--vertex", "0")
    assert code == 2
    code, _ = run(capsys, "validate", "--graph", graph_file, "--generator", "lattice:d=1,r=2")
    assert code == 2
    # csv requested for a command without tabular output
    code, _ = run(capsys, "validate", "--graph", graph_file, "--output", "csv")
    assert code == 2


def test_vertex_cap_env_respected(capsys, monkeypatch):
    monkeypatch.setenv("ROYDEN_VERTEX_CAP", "10")
    code, out = run(capsys, "cap", "--generator", "lattice:d=2,r=4", "--vertex", "0,0")
    assert code == 1
    assert json.loads(out)["error"] == "SizeOverflow"


def test_schema_inventory_covers_commands():
    names = set(available())
    for cmd in (
        "validate", "cap", "cap-profile", "classify", "gamma", "gamma-o",
        "resistance", "ut-report", "dirichlet", "decompose", "maxcheck",
        "hbempty", "truncate-harmonic", "liouville", "spectrum", "bounds",
        "heat", "trace", "gapcheck", "walk", "error",
    ):
        assert cmd in names
        schema_for(cmd)  # parses
