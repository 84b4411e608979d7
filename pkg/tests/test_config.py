from __future__ import annotations

import pytest

from dimgroups.config import ConfigError, RunConfig, build_config, flatten, load_file


def test_flatten_maps_sections():
    out = flatten({"subcommand": "certify", "caps": {"stage": 5}, "sequence": {"period": ["2x+3"]}})
    assert out == {"subcommand": "certify", "stage_cap": 5, "period": ["2x+3"]}


@pytest.mark.parametrize("doc", [{"bogus": 1}, {"caps": {"bogus": 1}}, {"nosuch": {"a": 1}}])
def test_unknown_keys_rejected(doc):
    with pytest.raises(ConfigError):
        flatten(doc)


def test_flags_override_file():
    cfg = build_config({"subcommand": "certify", "stage_cap": 5}, {"stage_cap": 9, "format": None})
    assert cfg.stage_cap == 9 and cfg.format == "human"


@pytest.mark.parametrize("field, value", [("stage_cap", 0), ("mult_cap", -1), ("retries", 0), ("depth", -1)])
def test_caps_must_be_positive(field, value):
    with pytest.raises(ConfigError):
        build_config({"subcommand": "certify", field: value}, {})


def test_bad_subcommand_and_format():
    with pytest.raises(ConfigError):
        RunConfig(subcommand="nope").validate()
    with pytest.raises(ConfigError):
        RunConfig(subcommand="tree", format="xml").validate()


def test_load_file(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('subcommand = "tree"\n[tree]\nweights = [2, 3]\ndepth = 3\n')
    cfg = build_config(load_file(str(p)), {})
    assert (cfg.subcommand, cfg.weights, cfg.depth) == ("tree", [2, 3], 3)
    bad = tmp_path / "bad.toml"
    bad.write_text("subcommand = \n")
    with pytest.raises(ConfigError):
        load_file(str(bad))
    with pytest.raises(ConfigError):
        load_file(str(tmp_path / "missing.toml"))
