"""Tests for model, BT+AC and map files."""

import json

import pytest

from stitkit import mc
from stitkit.btac import validate_btac
from stitkit.model_files import (
    btac_model_from_dict,
    dump_btac_model,
    dump_nbhd_model,
    load_btac_model,
    load_nbhd_model,
    load_state_map,
    nbhd_model_from_dict,
    read_document,
    report_json,
)
from stitkit.models import (
    CheckReport,
    FrameValidationError,
    ModelFileError,
    SearchResult,
    UnknownSymbolError,
    Verdict,
)
from stitkit.nbhd import is_class_C, is_class_P
from stitkit.syntax import parse


class TestLoadExamples:
    def test_fixture_frames(self, examples_dir, fixture_frames):
        f1, f2, _ = fixture_frames
        assert load_nbhd_model(examples_dir / "f1.json").frame == f1
        assert load_nbhd_model(examples_dir / "f2.json").frame == f2

    def test_yaml_grid(self, examples_dir, grid_model):
        model = load_nbhd_model(examples_dir / "grid.yaml")
        assert model == grid_model
        assert is_class_P(model.frame).holds

    def test_uniform_shorthand(self, examples_dir, two_cell_model):
        assert load_nbhd_model(examples_dir / "two_cells.json") == two_cell_model

    def test_fork(self, examples_dir, fork_model):
        model = load_btac_model(examples_dir / "fork.json")
        assert model == fork_model
        assert validate_btac(model).holds

    def test_state_map(self, examples_dir):
        assert load_state_map(examples_dir / "f1_to_f2.json") == {
            "w1": "w1",
            "w2": "w2",
            "w3": "w3",
            "w4": "w2",
        }


class TestMalformedFiles:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFileError):
            read_document(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{states: ", encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_nbhd_model(path)

    def test_bad_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("states: [w1\nagents: : :", encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_nbhd_model(path)

    def test_unknown_field(self):
        data = {"states": ["w1"], "agents": ["a"], "choice": {"a": {"uniform": [["w1"]]}}, "extra": 1}
        with pytest.raises(ModelFileError) as exc:
            nbhd_model_from_dict(data)
        assert "extra" in str(exc.value)

    def test_missing_states(self):
        with pytest.raises(ModelFileError):
            nbhd_model_from_dict({"agents": ["a"], "choice": {}})

    def test_invalid_frame(self):
        data = {"states": ["w1", "w2"], "agents": ["a"], "choice": {"a": {"uniform": [["w1"], ["w1", "w2"]]}}}
        with pytest.raises(FrameValidationError):
            nbhd_model_from_dict(data)

    def test_unknown_state_in_valuation(self):
        data = {
            "states": ["w1"],
            "agents": ["a"],
            "choice": {"a": {"uniform": [["w1"]]}},
            "valuation": {"p": ["w5"]},
        }
        with pytest.raises(UnknownSymbolError):
            nbhd_model_from_dict(data)

    def test_map_must_name_states(self, tmp_path):
        path = tmp_path / "map.json"
        path.write_text(json.dumps({"w1": 3}), encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_state_map(path)


class TestDump:
    def test_uniform_agents_use_shorthand(self, grid_model):
        data = dump_nbhd_model(grid_model)
        assert data["choice"]["a"] == {"uniform": [["w1", "w2"], ["w3", "w4"]]}
        assert data["valuation"] == {"p": ["w1", "w2"], "q": ["w1", "w3"]}

    def test_varying_agents_list_every_state(self, f1_model):
        data = dump_nbhd_model(f1_model)
        assert sorted(data["choice"]["a"]) == ["w1", "w2", "w3", "w4"]
        assert data["choice"]["a"]["w1"] == [["w1", "w2"], ["w3", "w4"]]

    def test_reload(self, f1_model, grid_model):
        for model in (f1_model, grid_model):
            assert nbhd_model_from_dict(dump_nbhd_model(model)) == model

    def test_reload_btac(self, fork_model):
        again = btac_model_from_dict(dump_btac_model(fork_model))
        assert again == fork_model
        assert again.through("m1") == ("h:m2", "h:m3")

    def test_reloaded_model_checks_the_same(self, grid_model):
        again = nbhd_model_from_dict(dump_nbhd_model(grid_model))
        f = parse("[a] p & <E:b> ~q")
        assert mc.extension(again, f) == mc.extension(grid_model, f)
        assert is_class_C(again.frame).holds


class TestReportJson:
    def test_sorted_keys(self):
        text = report_json({"b": 1, "a": [2, 1]}, indent=0)
        assert text == '{"a": [2, 1], "b": 1}'

    def test_check_report(self):
        data = json.loads(report_json(CheckReport.fail("un", {"state": "w1"})))
        assert data == {"label": "un", "holds": False, "witness": {"state": "w1"}, "checks": [], "details": {}}

    def test_search_result_uses_report_keys(self):
        result = SearchResult(verdict=Verdict.COUNTERMODEL, witness={"state": "w2"}, states_explored=5)
        data = json.loads(report_json(result, indent=2))
        assert data["statesExplored"] == 5
        assert "elapsedMs" in data

    def test_non_ascii_is_kept(self):
        assert "□" in report_json({"tag": "K□"}, indent=0)
