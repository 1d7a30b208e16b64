import pytest

from gallerysim.config import (
    ConfigError,
    build_sim_config,
    load_run_setup,
    parse_cells,
    parse_config_file,
)


def test_parse_rectangle_is_inclusive():
    cells = parse_cells("1,2,3,4")
    assert (2, 1) in cells and (4, 3) in cells
    assert len(cells) == 9  # 3 columns x 3 rows


def test_parse_single_cell_and_list():
    assert parse_cells("5,7") == [(7, 5)]
    assert parse_cells("1,2;3,4") == [(2, 1), (4, 3)]


def test_parse_degenerate_rectangle_rejected():
    with pytest.raises(ConfigError):
        parse_cells("5,5,1,1")


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("wibble = 3\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)


def test_duplicate_key_rejected(tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("seed = 1\nseed = 2\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)


def test_comments_and_blanks_ignored(tmp_path):
    cfg = tmp_path / "ok.conf"
    cfg.write_text("# header\n\nseed = 9  # trailing\n")
    assert parse_config_file(cfg) == {"seed": "9"}


def test_sim_config_defaults_match_reported_parameters():
    sim = build_sim_config({})
    assert sim.spawn_threshold == 30
    assert sim.spawn_batch_max == 10
    assert sim.planner.weight == 10.0
    assert sim.planner.noise_variance == 1000.0
    assert sim.planner.noise_enabled
    assert sim.replan_after_waits is None


def test_overrides_beat_file_values():
    sim = build_sim_config({"seed": "1", "weight": "3"},
                           overrides={"seed": 5, "noise": False})
    assert sim.seed == 5
    assert sim.planner.weight == 3.0
    assert not sim.planner.noise_enabled


def test_flag_and_file_values_agree(tmp_path, bundled_plan_path):
    # the same setting via file or override must configure identically
    base = parse_config_file(bundled_plan_path)
    via_file = dict(base, seed="123")
    sim_file = build_sim_config(via_file)
    sim_flag = build_sim_config(base, overrides={"seed": 123})
    assert sim_file == sim_flag


def test_bundled_plan_config_loads(bundled_plan_path):
    layers, load, sim = load_run_setup(bundled_plan_path)
    assert len(load.spawn_cells) == 725
    assert sim.max_ticks == 10000


def test_missing_layer_key_rejected(tmp_path):
    cfg = tmp_path / "p.conf"
    cfg.write_text("window = w.png\n")
    with pytest.raises(ConfigError):
        load_run_setup(cfg)


def test_bad_numeric_value_rejected():
    with pytest.raises(ConfigError):
        build_sim_config({"seed": "forty"})
    with pytest.raises(ConfigError):
        build_sim_config({"weight": "0.2"})  # below the >= 1 contract
