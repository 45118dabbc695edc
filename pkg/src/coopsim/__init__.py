__doc__ = 'Agent-based simulator for the cultural evolution of cooperation under kin selection, direct and indirect reciprocity'

from .common import CoopSimError, ConfigError, InvalidParameter, SimulationError, UnreachableThreshold
from .game import GameClass, GameSpec, PayoffMatrix, Regime, Strategy, classify_game, payoff_matrix, thresholds
from .tuning import TuningCriterion, TuningRule
from .agents import PopulationInit
from .metrics import RunMetrics
from .world import WorldConfig, run
from .experiments import NamedExperiment, SweepConfig, expand_experiment, regime_experiment, run_sweep

__version__ = '1.0.0'
