import math

import pytest

from cli_io.config import RunConfig, parse_config
from quantum_core.errors import ConfigError, ConfigMissingKeyError, ConfigRangeError, ConfigTypeError


def _write(tmp_path, text, name='run.ini'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


def test_empty_file_gives_reference_defaults(tmp_path):
    config = parse_config(_write(tmp_path, ''), environ={})
    assert config.physical.v_B == 767.7
    assert config.physical.v_A == 987.0
    assert config.teleport.theta == pytest.approx(math.pi / 4)
    assert config.teleport.phi == pytest.approx(-math.pi / 6)
    assert config.shots.n_per_delta == 20000
    assert config.tomography.deltas is None
    assert config.warnings == ()
    assert config.config_hash() == RunConfig().config_hash()


def test_negative_velocity_names_field_and_line(tmp_path):
    path = _write(tmp_path, '[physical]\nv_B = -1\n')
    with pytest.raises(ConfigRangeError) as info:
        parse_config(path, environ={})
    assert info.value.field == 'physical.v_B'
    assert info.value.line == 2
    assert str(info.value).startswith('[physical.v_B, line 2] ')
    assert info.value.exit_code == 2


def test_unreadable_value_is_a_type_error(tmp_path):
    path = _write(tmp_path, '[shots]\n# seed below\nseed = many\n')
    with pytest.raises(ConfigTypeError) as info:
        parse_config(path, environ={})
    assert info.value.field == 'shots.seed'
    assert info.value.line == 3


def test_unknown_keys_and_sections_only_warn(tmp_path):
    path = _write(tmp_path, '[shots]\nseed = 3\ncolour = blue\n\n[extras]\nfoo = 1\n')
    config = parse_config(path, environ={'PCQC_SHOTS_FLAVOUR': 'x'})
    assert config.shots.seed == 3
    assert any('shots.colour' in w for w in config.warnings)
    assert any('[extras]' in w for w in config.warnings)
    assert any('PCQC_SHOTS_FLAVOUR' in w for w in config.warnings)


def test_environment_overrides_file(tmp_path):
    path = _write(tmp_path, '[shots]\nseed = 3\n[physical]\nv_B = 700\n')
    config = parse_config(path, environ={'PCQC_SHOTS_SEED': '5', 'PCQC_PHYSICAL_V_B': '800'})
    assert config.shots.seed == 5
    assert config.physical.v_B == 800.0
    assert config.warnings == ()


def test_bad_environment_value_has_no_line(tmp_path):
    with pytest.raises(ConfigTypeError) as info:
        parse_config(_write(tmp_path, ''), environ={'PCQC_SHOTS_WORKERS': 'two'})
    assert info.value.field == 'shots.workers'
    assert info.value.line is None


def test_file_model_needs_a_path(tmp_path):
    path = _write(tmp_path, '[cavity]\nmodel = file\n')
    with pytest.raises(ConfigMissingKeyError) as info:
        parse_config(path, environ={})
    assert info.value.field == 'cavity.path'


def test_missing_profile_file_is_rejected(tmp_path):
    path = _write(tmp_path, '[waveguide]\nmodel = file\npath = nowhere.txt\n')
    with pytest.raises(ConfigRangeError) as info:
        parse_config(path, environ={})
    assert info.value.field == 'waveguide.path'
    assert info.value.line == 3


def test_relative_paths_resolve_against_config_directory(tmp_path):
    (tmp_path / 'p1.csv').write_text('delta,P1\n', encoding='utf-8')
    config = parse_config(_write(tmp_path, '[tomography]\nmeasurements = p1.csv\n'), environ={})
    assert config.tomography.measurements == str(tmp_path / 'p1.csv')


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / 'absent.ini', environ={})


def test_delta_list_needs_four_distinct_values(tmp_path):
    config = parse_config(_write(tmp_path, '[tomography]\ndeltas = -6e4, -2e4, 2e4, 6e4\n'), environ={})
    assert config.tomography.deltas == (-6e4, -2e4, 2e4, 6e4)
    with pytest.raises(ConfigRangeError):
        parse_config(_write(tmp_path, '[tomography]\ndeltas = 1e4, 1e4, 2e4, 3e4\n', 'b.ini'), environ={})


def test_out_of_range_choice(tmp_path):
    with pytest.raises(ConfigRangeError):
        parse_config(_write(tmp_path, '[readout]\nreadout_input = guessed\n'), environ={})
    with pytest.raises(ConfigRangeError):
        parse_config(_write(tmp_path, '[teleport]\noutcome = 2\n', 'c.ini'), environ={})


def test_hash_ignores_output_section():
    base = RunConfig()
    assert base.with_overrides(**{'output.out_dir': 'elsewhere'}).config_hash() == base.config_hash()
    assert base.with_overrides(**{'shots.seed': 1}).config_hash() != base.config_hash()


def test_with_overrides_skips_none():
    config = RunConfig().with_overrides(**{'shots.seed': None, 'shots.workers': 4})
    assert config.shots.seed == RunConfig().shots.seed
    assert config.shots.workers == 4
