# tests/test_adapters.py
import json

import numpy as np
import pytest
from pydantic import ValidationError

from polarorder.adapters.inbound.run_config import RunConfig
from polarorder.adapters.outbound.channel_loader import ChannelSpecLoader
from polarorder.adapters.outbound.report_writer import (
    FileReportWriter,
    render_containment_grid_json,
    render_distribution_csv,
    render_infoset_csv,
    render_infoset_summary,
    render_verdict_json,
)
from polarorder.config import DEFAULT_CONFIG, load_config
from polarorder.core.channel import delta_distribution, make_bec, make_bsc, make_z
from polarorder.core.errors import ChannelValidationError
from polarorder.core.functionals import bhattacharyya_complement, capacity
from polarorder.core.infoset import build_info_set, containment_grid
from polarorder.core.ordering import degradation_check


@pytest.fixture
def loader():
    return ChannelSpecLoader()


class TestChannelSpecLoader:
    def test_full_form(self, loader, tmp_path):
        path = tmp_path / "w.json"
        path.write_text(json.dumps({"outputs": ["a", "b"], "row0": [0.9, 0.1], "row1": [0.1, 0.9]}))
        w = loader.load(path)
        assert w.output_labels == ("a", "b")
        np.testing.assert_allclose(w.matrix, make_bsc(0.1).matrix)

    @pytest.mark.parametrize(
        "spec, expected",
        [({"bsc": 0.25}, make_bsc(0.25)), ({"bec": 0.5}, make_bec(0.5)), ({"z": 0.5}, make_z(0.5))],
    )
    def test_shorthands(self, loader, spec, expected):
        w = loader.from_spec(spec)
        assert w.output_labels == expected.output_labels
        np.testing.assert_allclose(w.matrix, expected.matrix)

    def test_yaml(self, loader, tmp_path):
        path = tmp_path / "z.yaml"
        path.write_text("z: 0.3\n")
        np.testing.assert_allclose(loader.load(path).matrix, make_z(0.3).matrix)

    @pytest.mark.parametrize(
        "spec",
        [
            {"bsc": 0.1, "z": 0.2},
            {"bsc": "0.1"},
            {"outputs": ["a"], "row0": [1.0]},
            {"outputs": ["a", "b"], "row0": [0.5, 0.5], "row1": [0.5, 0.4]},
            [0.5, 0.5],
        ],
    )
    def test_rejects(self, loader, spec):
        with pytest.raises(ChannelValidationError):
            loader.from_spec(spec)

    def test_missing_file(self, loader, tmp_path):
        with pytest.raises(FileNotFoundError):
            loader.load(tmp_path / "nope.json")

    def test_bad_json(self, loader, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{bsc: ")
        with pytest.raises(ChannelValidationError):
            loader.load(path)


class TestReportWriter:
    def test_distribution_csv(self):
        text = render_distribution_csv(delta_distribution(make_bec(0.5)))
        assert text == "value,weight\n-1,0.25\n0,0.5\n1,0.25\n"

    def test_infoset_outputs(self):
        info_set = build_info_set(make_bec(0.5), 2, bhattacharyya_complement(), 0.1)
        lines = render_infoset_csv(info_set).splitlines()
        assert lines[0] == "sequence,index,value,member"
        assert lines[1] == "--,1,0.0625,0"
        assert lines[4] == "++,4,0.9375,1"
        summary = json.loads(render_infoset_summary(info_set))
        assert summary == {
            "n": 2,
            "phi": "bhattacharyya_complement",
            "eps": 0.1,
            "budget": None,
            "tol": 1e-12,
            "size": 1,
            "members": ["++"],
        }

    def test_verdict_json_carries_kernel(self):
        verdict = degradation_check(make_bsc(0.1), make_bsc(0.18))
        payload = json.loads(render_verdict_json(verdict))
        assert payload["holds"] is True
        assert payload["method"] == "degradation"
        assert payload["witness"]["kind"] == "degrading_kernel"
        rows = np.array(payload["witness"]["kernel"]["rows"])
        assert rows.shape == (2, 2)
        np.testing.assert_allclose(rows.sum(axis=1), [1.0, 1.0])

    def test_containment_grid_json(self):
        reports = containment_grid(make_bec(0.3), make_bec(0.5), 2, [capacity()], [0.5, 0.01])
        payload = json.loads(render_containment_grid_json(reports))
        assert payload["contained"] is all(r.contained for r in reports)
        assert [r["eps"] for r in payload["reports"]] == [0.5, 0.01]
        assert payload["reports"][0]["recheck_budget"] is None

    def test_file_writer(self, tmp_path):
        target = tmp_path / "out" / "report.csv"
        FileReportWriter().write("a,b\n", str(target))
        assert target.read_text() == "a,b\n"

    def test_stdout_writer(self, capsys):
        FileReportWriter().write("hello\n")
        assert capsys.readouterr().out == "hello\n"


class TestConfig:
    def test_defaults_without_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert load_config() == DEFAULT_CONFIG

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("delta:\n  budget: 64\nlogging:\n  level: DEBUG\n")
        config = load_config(path)
        assert config["delta"]["budget"] == 64
        assert config["delta"]["merge_tol"] == DEFAULT_CONFIG["delta"]["merge_tol"]
        assert config["logging"]["level"] == "DEBUG"

    def test_missing_explicit_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "missing.yaml")

    def test_non_mapping(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            load_config(path)


class TestRunConfig:
    def test_budget_and_exact_are_exclusive(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand="synth", budget=16, exact=True)

    def test_effective_budget(self):
        assert RunConfig(subcommand="synth").effective_budget(DEFAULT_CONFIG) == 256
        assert RunConfig(subcommand="synth", exact=True).effective_budget(DEFAULT_CONFIG) is None
        assert RunConfig(subcommand="synth", budget=8).effective_budget(DEFAULT_CONFIG) == 8

    @pytest.mark.parametrize(
        "kwargs",
        [{"eps": 1.0}, {"n": 21}, {"budget": 1}, {"phi": "entropy"}, {"sequence": "+*"}],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            RunConfig(subcommand="infoset", **kwargs)

    def test_missing_channel_file(self, tmp_path):
        with pytest.raises(ValidationError):
            RunConfig(subcommand="params", channels=[tmp_path / "w.json"])
