import csv
import json

import pytest

from plateforge.cli import build_parser, main, overrides_from_args


def test_parser_maps_options_to_case_parameters():
    args = build_parser().parse_args(["run", "clamped-square-udl", "--t", "0.01", "--n", "2", "4", "--mesh", "tri"])
    overrides = overrides_from_args("clamped-square-udl", args)
    assert overrides["n_list"] == [2, 4]
    assert overrides["mesh_types"] == ["tri"]


def test_option_not_taken_by_case_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "l-bracket", "--n", "3"])
    assert exc.value.code == 2
    assert "does not take --n" in capsys.readouterr().err


def test_unknown_case_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["run", "no-such-case"])
    assert exc.value.code == 2


def test_small_run_writes_reports(tmp_path, capsys):
    code = main(["run", "cantilever-moment", "--t", "0.1", "-o", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0 and "cantilever-moment: PASS" in out
    assert (tmp_path / "cantilever-moment.csv").exists()
    summary = json.loads((tmp_path / "cantilever-moment.json").read_text())
    assert summary["case"] == "cantilever-moment"


def test_mesh_commands(tmp_path):
    domain = tmp_path / "square.json"
    domain.write_text(json.dumps({"domain": {"type": "rectangle", "lower": [0, 0], "upper": [1, 1]}}))
    vor = tmp_path / "vor.json"
    assert main(["mesh", "voronoi", "--domain", str(domain), "--n", "12", "-o", str(vor)]) == 0
    assert len(json.loads(vor.read_text())["elements"]) == 12
    grid = tmp_path / "grid.json"
    assert main(["mesh", "structured", "--upper", "100", "100", "--nx", "2", "-o", str(grid)]) == 0
    moved = tmp_path / "moved.json"
    assert main(["mesh", "distort", str(grid), "--s", "5", "-o", str(moved)]) == 0
    assert json.loads(moved.read_text())["nodes"][4] == [55.0, 45.0]
    assert main(["mesh", "distort", str(grid), "--s", "25", "--sc", "fixed", "-o", str(moved)]) == 2


def test_solve_config(tmp_path, capsys):
    cfg = {
        "mesh": {"structured": {"lower": [0, 0], "upper": [1, 1], "nx": 4}},
        "material": {"E": 10.92e6, "nu": 0.3, "t": 0.01},
        "loads": [{"type": "pressure", "q": 1.0}],
        "constraints": [{"on": "boundary", "dofs": "clamp"}],
        "probes": [[0.5, 0.5]],
    }
    path = tmp_path / "plate.json"
    path.write_text(json.dumps(cfg))
    assert main(["solve", str(path), "-o", str(tmp_path / "out")]) == 0
    assert "w=" in capsys.readouterr().out
    csvs = list((tmp_path / "out").glob("*.csv"))
    assert csvs
    rows = list(csv.DictReader(csvs[0].open()))
    assert float(rows[0]["w"]) > 0


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "property suite" in out and "0 failing" in out


def test_elements_option_selects_six_polygon_mesh(tmp_path, capsys):
    assert main(["run", "cantilever-moment", "--elements", "6", "--formulation", "ans", "--t", "0.001",
                 "-o", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "cantilever-moment.csv").open()))
    assert rows[0]["elements"] == "6"
