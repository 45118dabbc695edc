import pytest
from coopsim import settings
from coopsim.common import ConfigError
from coopsim.config import dump_config, parse_config, read_config, to_sweep_config, to_world_config
from coopsim.game import Strategy
from coopsim.tuning import TuningCriterion

TABLE_KS = """
# Table settings for kin selection
[run]
seed = 4
iterations = 100000

[game]
strategy = KS
b = 4
c = 2
x = 0.75

[population]
size = 60
ipc = 0.5
icpc = 0.65
icpd = 0.35

[tuning]
rule = sf
delta = 0.01
"""


def test_parse_types_every_value():
    cfg = parse_config(TABLE_KS)
    assert cfg.get('game', 'strategy') is Strategy.KinSelection
    assert cfg.get('game', 'b') == 4.0 and isinstance(cfg.get('game', 'b'), float)
    assert cfg.get('population', 'size') == 60 and isinstance(cfg.get('population', 'size'), int)
    assert cfg.get('tuning', 'rule') is TuningCriterion.SelfishFitness


def test_dump_is_a_fixed_point():
    text = dump_config(parse_config(TABLE_KS))
    assert text.startswith('[game]\nstrategy = KS\nb = 4.0\nc = 2.0\nx = 0.75\n\n[population]\n')
    assert dump_config(parse_config(text)) == text
    assert parse_config(text).values == parse_config(TABLE_KS).values


def test_world_config_from_file():
    config = to_world_config(parse_config(TABLE_KS))
    assert config.spec.x == 0.75 and config.seed == 4 and config.iterations == 100000
    assert config.init.population == 60 and config.tuning.delta == 0.01
    assert config.width == 13.0 and config.neighbor_radius == 1.0
    config = to_world_config(parse_config(TABLE_KS), seed=9, iterations=10, window=5)
    assert (config.seed, config.iterations, config.window) == (9, 10, 5)


def test_seed_falls_back_to_environment(monkeypatch):
    monkeypatch.setenv('COOPSIM_SEED', '17')
    cfg = parse_config('[game]\nstrategy = DR\nx = 0.6\n')
    assert to_world_config(cfg).seed == 17
    monkeypatch.delenv('COOPSIM_SEED')
    assert to_world_config(cfg).seed == 0


def test_missing_values_fall_back_to_settings(monkeypatch):
    monkeypatch.setattr(settings, 'benefit', 5.0)
    monkeypatch.setattr(settings, 'population', 24)
    monkeypatch.setattr(settings, 'icpc', 0.8)
    cfg = parse_config('[game]\nstrategy = KS\nx = 0.6\n')
    config = to_world_config(cfg)
    assert (config.spec.b, config.spec.c) == (5.0, settings.cost)
    assert (config.init.population, config.init.ipc, config.init.icpc, config.init.icpd) == \
        (24, settings.ipc, 0.8, settings.icpd)
    sweep = to_sweep_config(parse_config('[game]\nstrategy = KS\n\n[sweep]\nx_lo = 0.5\n'))
    assert (sweep.b, sweep.population, sweep.icpc) == (5.0, 24, 0.8)


def test_unknown_key_names_its_line():
    with pytest.raises(ConfigError) as e:
        parse_config('[game]\nstrategy = KS\n\n[population]\nsize = 60\ncooperators = 30\n', 'exp.cfg')
    assert (e.value.section, e.value.key, e.value.lineno) == ('population', 'cooperators', 6)
    assert str(e.value) == 'exp.cfg:6: [population] cooperators: unknown key'


def test_unknown_section():
    with pytest.raises(ConfigError) as e:
        parse_config('[game]\nx = 0.5\n[plot]\ncolor = red\n')
    assert (e.value.section, e.value.lineno) == ('plot', 3)


def test_numbers_must_be_decimal_literals():
    for raw in ('1e-3', 'nan', 'inf', '0x10', '1/2', ''):
        with pytest.raises(ConfigError) as e:
            parse_config('[game]\nx = {}\n'.format(raw))
        assert (e.value.key, e.value.lineno) == ('x', 2)
    with pytest.raises(ConfigError) as e:
        parse_config('[run]\niterations = 1000.0\n')
    assert e.value.key == 'iterations'


def test_duplicate_key():
    with pytest.raises(ConfigError) as e:
        parse_config('[game]\nx = 0.5\nx = 0.6\n')
    assert (e.value.key, e.value.lineno) == ('x', 3)


def test_key_outside_section():
    with pytest.raises(ConfigError) as e:
        parse_config('x = 0.5\n')
    assert e.value.lineno == 1


def test_direct_reciprocity_with_certain_repetition_is_rejected():
    cfg = parse_config('[game]\nstrategy = DR\nb = 4\nc = 2\nx = 1\n', 'dr.cfg')
    with pytest.raises(ConfigError) as e:
        to_world_config(cfg)
    assert (e.value.section, e.value.key, e.value.lineno) == ('game', 'x', 5)
    assert 'w=1' in str(e.value)


def test_validation_errors_point_at_the_file():
    cfg = parse_config('[game]\nstrategy = KS\nx = 0.5\n[population]\nicpc = 0.4\n')
    with pytest.raises(ConfigError) as e:
        to_world_config(cfg)
    assert (e.value.key, e.value.lineno) == ('icpc', 5)
    with pytest.raises(ConfigError) as e:
        to_world_config(parse_config('[game]\nstrategy = KS\n'))
    assert e.value.key == 'x'


def test_sweep_config_from_file():
    cfg = parse_config('[game]\nstrategy = DR\n[sweep]\nx_lo = 0.1\nx_step = 0.1\nrepetitions = 2\n'
                       '[run]\niterations = 50\nseed = 3\n')
    sweep = to_sweep_config(cfg)
    assert sweep.strategy is Strategy.DirectReciprocity
    assert sweep.x_range == (0.1, 0.99) and sweep.repetitions == 2 and sweep.base_seed == 3
    assert to_sweep_config(cfg, strategy='IR').x_range == (0.1, 1.0)
    with pytest.raises(ConfigError) as e:
        to_sweep_config(parse_config('[game]\nstrategy = DR\nx = 0.5\n'))
    assert e.value.section == 'sweep'
    with pytest.raises(ConfigError) as e:
        to_sweep_config(parse_config('[game]\nstrategy = DR\n[sweep]\nx_hi = 1\n'))
    assert (e.value.key, e.value.lineno) == ('x_hi', 4)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config(str(tmp_path / 'absent.cfg'))
