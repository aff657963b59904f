import pytest

from roadstretch.config import (CAMERA_KEYS, KEYS, CliConfig, ConfigError, dump_config, load_config,
                                parse_config, with_overrides)
from roadstretch.dbs import InternalRule
from roadstretch.edges import ThresholdMode
from roadstretch.pipeline import FrontEnd, OutputMode, PipelineConfig

CAMERA = """
camera.height_m = 1.5
camera.pitch_deg = 14.3
camera.vfov_deg = 40
camera.hfov_deg = 80
"""


def test_defaults_match_library():
    assert CliConfig().pipeline() == PipelineConfig()


def test_parse_comments_and_values():
    cfg = parse_config("""
# comment line
dbs.max_iterations = 7   # trailing comment
dbs.internal_rule = min
dbs.flat_handling = no
threshold.mode = FIXED
led.bins = -10,-3,3,10
dbs.dt_max_iters = none
""")
    assert cfg.get("dbs.max_iterations") == 7
    assert cfg.get("dbs.internal_rule") is InternalRule.PROSE_MIN
    assert cfg.get("dbs.flat_handling") is False
    assert cfg.get("threshold.mode") is ThresholdMode.FIXED
    assert cfg.get("led.bins") == (-10.0, -3.0, 3.0, 10.0)
    assert cfg.get("dbs.dt_max_iters") is None
    p = cfg.pipeline()
    assert p.dbs.max_iterations == 7 and p.led_bins == (-10.0, -3.0, 3.0, 10.0)


def test_unknown_key_names_key_and_line():
    with pytest.raises(ConfigError, match=r"line 2: unknown config key: dbs\.bogus"):
        parse_config("dbs.max_iterations = 3\ndbs.bogus = 1\n")


@pytest.mark.parametrize("text", ["dbs.max_iterations = lots", "dbs.flat_handling = maybe",
                                  "front_end.kind = lidar", "just words"])
def test_bad_values(text):
    with pytest.raises(ConfigError, match="line 1"):
        parse_config(text)


def test_ipm_needs_camera():
    with pytest.raises(ConfigError, match="camera.height_m"):
        parse_config("front_end.kind = ipm").pipeline()
    cfg = parse_config("front_end.kind = ipm\n" + CAMERA)
    p = cfg.pipeline()
    assert p.front_end is FrontEnd.IPM and p.cam.image_w == 256
    assert cfg.has_camera() and set(CAMERA_KEYS) <= set(cfg.values)


def test_stripe_rows_together():
    with pytest.raises(ConfigError):
        parse_config("led.stripe_first = 40").pipeline()
    assert parse_config("led.stripe_first = 40\nled.stripe_last = 50").pipeline().led_stripe_rows == (40, 50)


def test_dump_roundtrip(tmp_path):
    cfg = parse_config("led.output_mode = led\nthreshold.fixed_left = 12\n" + CAMERA)
    text = dump_config(cfg)
    again = parse_config(text)
    assert all(again.get(k) == cfg.get(k) for k in KEYS)
    (tmp_path / "c.cfg").write_text(text)
    assert load_config(tmp_path / "c.cfg").get("led.output_mode") is OutputMode.LED


def test_overrides_do_not_mutate():
    cfg = parse_config("dbs.max_iterations = 3")
    out = with_overrides(cfg, {"dbs.max_iterations": 9, "dbs.temporal": None})
    assert out.get("dbs.max_iterations") == 9 and cfg.get("dbs.max_iterations") == 3
    assert "dbs.temporal" not in out.values
    with pytest.raises(ConfigError):
        with_overrides(cfg, {"nope.key": 1})


def test_model_spec_uses_coarse_size():
    spec = parse_config("schedule.coarse_size = 16\nmodel.vp_col = 7.5\nmodel.bottom_right_col = 14").model_spec()
    assert (spec.image_w, spec.vp_col, spec.bottom_right_col) == (16, 7.5, 14)
