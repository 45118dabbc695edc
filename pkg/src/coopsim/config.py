__doc__ = """
Experiment definition files.

An INI document with the sections [game], [world], [population], [tuning], [run]
and [sweep]. Unknown sections or keys are errors, numbers must be plain decimal
literals, and every error names the key and, when it appears in the file, its line.

    [game]
    strategy = KS
    b = 4.0
    c = 2.0
    x = 0.75

    [population]
    size = 60
    ipc = 0.5
    icpc = 0.65
    icpd = 0.35
"""

import configparser
import re
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Tuple
import numpy as np
from . import settings
from .agents import PopulationInit
from .common import ConfigError, InvalidParameter
from .experiments import SweepConfig
from .game import GameSpec, Strategy
from .tuning import TuningCriterion, TuningRule
from .world import WorldConfig

REAL, INT, STRATEGY, RULE = 'real', 'int', 'strategy', 'rule'

SCHEMA = OrderedDict([
    ('game', OrderedDict([('strategy', STRATEGY), ('b', REAL), ('c', REAL), ('x', REAL)])),
    ('world', OrderedDict([('width', REAL), ('height', REAL), ('radius', REAL), ('step_length', REAL)])),
    ('population', OrderedDict([('size', INT), ('ipc', REAL), ('icpc', REAL), ('icpd', REAL)])),
    ('tuning', OrderedDict([('rule', RULE), ('delta', REAL)])),
    ('run', OrderedDict([('iterations', INT), ('seed', INT), ('window', INT)])),
    ('sweep', OrderedDict([('x_lo', REAL), ('x_hi', REAL), ('x_step', REAL), ('repetitions', INT)])),
])

# parameter name reported by validation -> (section, key) in the file
FIELD_KEYS = {
    'strategy': ('game', 'strategy'), 'b': ('game', 'b'), 'c': ('game', 'c'),
    'x': ('game', 'x'), 'r': ('game', 'x'), 'w': ('game', 'x'), 'q': ('game', 'x'),
    'width': ('world', 'width'), 'height': ('world', 'height'), 'neighbor_radius': ('world', 'radius'),
    'step_length': ('world', 'step_length'),
    'population': ('population', 'size'), 'ipc': ('population', 'ipc'), 'icpc': ('population', 'icpc'),
    'icpd': ('population', 'icpd'),
    'rule': ('tuning', 'rule'), 'delta': ('tuning', 'delta'),
    'iterations': ('run', 'iterations'), 'seed': ('run', 'seed'), 'window': ('run', 'window'),
    'x_lo': ('sweep', 'x_lo'), 'x_hi': ('sweep', 'x_hi'), 'x_step': ('sweep', 'x_step'),
    'repetitions': ('sweep', 'repetitions'),
}

DECIMAL_RE = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)$')
INTEGER_RE = re.compile(r'^[+-]?\d+$')
SECTION_RE = re.compile(r'^\s*\[([^\]]+)\]')
KEY_RE = re.compile(r'^([^\s=:#;\[][^=:]*?)\s*[=:]')


@dataclass
class ConfigFile:
    path: str
    values: Dict[Tuple[str, str], object] = field(default_factory=dict)
    lines: Dict[Tuple[str, str], int] = field(default_factory=dict)
    sections: List[str] = field(default_factory=list)

    def get(self, section, key, default=None):
        return self.values.get((section, key), default)

    def has_section(self, section):
        return section in self.sections

    def error(self, section, key, problem):
        return ConfigError(self.path, section, key, problem, self.lines.get((section, key)))


def _index_lines(text):
    lines = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        match = SECTION_RE.match(line)
        if match:
            section = match.group(1).strip()
            lines.setdefault((section, None), lineno)
            continue
        match = KEY_RE.match(line)
        if match and section is not None:
            lines.setdefault((section, match.group(1).strip().lower()), lineno)
    return lines


def _convert(cfg, section, key, kind, raw):
    raw = raw.strip()
    if kind == REAL:
        if not DECIMAL_RE.match(raw):
            raise cfg.error(section, key, 'expected a decimal number, got {!r}'.format(raw))
        return float(raw)
    elif kind == INT:
        if not INTEGER_RE.match(raw):
            raise cfg.error(section, key, 'expected an integer, got {!r}'.format(raw))
        return int(raw)
    try:
        return Strategy.parse(raw) if kind == STRATEGY else TuningCriterion.parse(raw)
    except InvalidParameter as e:
        raise cfg.error(section, key, e.problem)


def parse_config(text, path='<config>'):
    """Parse and type check a config document

    >>> cfg = parse_config('[game]\\nstrategy = DR\\nx = 0.5\\n')
    >>> cfg.get('game', 'strategy'), cfg.get('game', 'x')
    (<Strategy.DirectReciprocity: 'DR'>, 0.5)
    >>> parse_config('[game]\\nstrategy = DR\\nbenefit = 4\\n', 'run.cfg')
    Traceback (most recent call last):
    ...
    coopsim.common.ConfigError: run.cfg:3: [game] benefit: unknown key
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True, inline_comment_prefixes=('#', ';'))
    try:
        parser.read_string(text, source=path)
    except configparser.DuplicateOptionError as e:
        raise ConfigError(path, e.section, e.option, 'duplicate key', e.lineno)
    except configparser.DuplicateSectionError as e:
        raise ConfigError(path, e.section, None, 'duplicate section', e.lineno)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(path, 'none', None, 'key outside any section', e.lineno)
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ConfigError(path, 'none', None, 'cannot parse {}'.format(line.strip()), lineno)

    cfg = ConfigFile(path=path, lines=_index_lines(text))
    if parser.defaults():
        raise cfg.error('DEFAULT', None, 'unknown section')
    for section in parser.sections():
        if section not in SCHEMA:
            raise cfg.error(section, None, 'unknown section')
        cfg.sections.append(section)
        for key, raw in parser.items(section):
            kind = SCHEMA[section].get(key)
            if kind is None:
                raise cfg.error(section, key, 'unknown key')
            cfg.values[(section, key)] = _convert(cfg, section, key, kind, raw)
    return cfg


def read_config(path):
    try:
        with open(path, encoding='utf-8') as fp:
            text = fp.read()
    except OSError as e:
        raise ConfigError(path, 'file', None, e.strerror or str(e))
    return parse_config(text, path)


def _format_value(kind, value):
    if kind == REAL:
        return np.format_float_positional(float(value), unique=True, trim='0')
    elif kind == INT:
        return str(int(value))
    return value.value


def dump_config(cfg):
    """Normalized text: sections and keys in schema order, numbers in shortest exact form

    >>> text = dump_config(parse_config('[game]\\nx=0.75\\nstrategy=ks\\n\\n[run]\\nseed=3'))
    >>> print(text, end='')
    [game]
    strategy = KS
    x = 0.75
    <BLANKLINE>
    [run]
    seed = 3
    """
    blocks = []
    for section, keys in SCHEMA.items():
        lines = ['{} = {}'.format(key, _format_value(kind, cfg.values[(section, key)]))
                 for key, kind in keys.items() if (section, key) in cfg.values]
        if lines:
            blocks.append('[{}]\n{}\n'.format(section, '\n'.join(lines)))
    return '\n'.join(blocks)


def _located(cfg, error):
    """Turn a validation error into a ConfigError pointing into the file
    """
    section, key = FIELD_KEYS.get(error.field, ('config', error.field))
    return cfg.error(section, key, error.problem)


def _common(cfg, seed=None, iterations=None, window=None):
    seed = seed if seed is not None else cfg.get('run', 'seed', settings.env_seed())
    return dict(
        seed=seed,
        iterations=iterations if iterations is not None else cfg.get('run', 'iterations', settings.iterations),
        window=window if window is not None else cfg.get('run', 'window'),
        width=cfg.get('world', 'width', settings.width),
        height=cfg.get('world', 'height', settings.height),
        neighbor_radius=cfg.get('world', 'radius', settings.neighbor_radius),
        step_length=cfg.get('world', 'step_length', settings.step_length),
    )


def _strategy(cfg, override=None):
    if override is not None:
        return override if isinstance(override, Strategy) else Strategy.parse(override)
    strategy = cfg.get('game', 'strategy')
    if strategy is None:
        raise cfg.error('game', 'strategy', 'missing required key')
    return strategy


def _tuning(cfg):
    return TuningRule(cfg.get('tuning', 'rule', TuningCriterion.SelfishFitness), cfg.get('tuning', 'delta', settings.delta))


def _population(cfg):
    return dict(population=cfg.get('population', 'size', settings.population),
                ipc=cfg.get('population', 'ipc', settings.ipc),
                icpc=cfg.get('population', 'icpc', settings.icpc),
                icpd=cfg.get('population', 'icpd', settings.icpd))


def to_world_config(cfg, seed=None, iterations=None, window=None):
    """Build the WorldConfig of a single run; flags given here override the file
    """
    if cfg.get('game', 'x') is None:
        raise cfg.error('game', 'x', 'missing required key')
    try:
        spec = GameSpec(_strategy(cfg), cfg.get('game', 'b', settings.benefit), cfg.get('game', 'c', settings.cost),
                        cfg.get('game', 'x'))
        return WorldConfig(spec=spec, tuning=_tuning(cfg), init=PopulationInit(**_population(cfg)),
                           **_common(cfg, seed, iterations, window))
    except InvalidParameter as e:
        raise _located(cfg, e)


def to_sweep_config(cfg, strategy=None, seed=None, iterations=None, window=None, repetitions=None):
    """Build the SweepConfig of a [sweep] document; [game] x is ignored
    """
    if not cfg.has_section('sweep'):
        raise cfg.error('sweep', None, 'missing section')
    try:
        strategy = _strategy(cfg, strategy)
        default_hi = 0.99 if strategy is Strategy.DirectReciprocity else 1.0
        common = _common(cfg, seed, iterations, window)
        return SweepConfig(
            strategy=strategy, tuning=_tuning(cfg), **_population(cfg),
            x_range=(cfg.get('sweep', 'x_lo', 0.01), cfg.get('sweep', 'x_hi', default_hi)),
            x_step=cfg.get('sweep', 'x_step', 0.01),
            repetitions=repetitions if repetitions is not None else cfg.get('sweep', 'repetitions', 1),
            base_seed=common.pop('seed'), b=cfg.get('game', 'b', settings.benefit),
            c=cfg.get('game', 'c', settings.cost), **common,
        )
    except InvalidParameter as e:
        raise _located(cfg, e)
