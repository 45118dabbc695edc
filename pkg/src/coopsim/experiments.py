__doc__ = """
Parameter sweeps over the strategy probability x and the six experiment schedules.

A sweep runs every x of its grid `repetitions` times. Each (x index, repetition)
cell gets its own seed mixed from the sweep's base seed, so any cell can be rerun
alone and results do not depend on how cells are scheduled across workers.
"""

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional, Tuple
import numpy as np
from scipy import stats
from . import settings
from .adt import Bag
from .agents import PopulationInit
from .common import CoopSimError, InvalidParameter, logger
from .game import GameSpec, Regime, Strategy
from .metrics import RunMetrics, effective_window  # noqa: F401 RunMetrics is re-exported
from .tuning import TuningCriterion, TuningRule
from .world import WorldConfig, run

# initial cp of IR cooperators in the sensitivity runs; the schedules use 0.98
IR_ICPC_SENSITIVITY = 0.99

SF = TuningCriterion.SelfishFitness
SP = TuningCriterion.SelfishProfit


class NamedExperiment(enum.Enum):
    PayoffTableBehavior = 'payoff'
    TuningCriterion = 'tuning'
    InitialProbabilities = 'initial'
    Population = 'population'
    Robustness = 'robustness'
    Behavior = 'behavior'

    @classmethod
    def parse(cls, text):
        """
        >>> NamedExperiment.parse('Behavior')
        <NamedExperiment.Behavior: 'behavior'>
        """
        key = str(text).strip().lower()
        for experiment in cls:
            if key in (experiment.value, experiment.name.lower()):
                return experiment
        raise InvalidParameter('experiment', 'unknown experiment {!r}'.format(text))


def _row(strategy, icpc, icpd, population, ipc, step, tuning, repetitions=1):
    def listed(value):
        return list(value) if isinstance(value, (list, tuple)) else [value]
    x_range = (0.01, 0.99) if strategy is Strategy.DirectReciprocity else (0.01, 1.0)
    return Bag(icpc=listed(icpc), icpd=listed(icpd), population=listed(population), ipc=listed(ipc),
               x_range=x_range, step=step, tuning=listed(tuning), repetitions=repetitions)


KS, DR, IR = Strategy.KinSelection, Strategy.DirectReciprocity, Strategy.IndirectReciprocity
E = NamedExperiment

TABLES = {
    (E.PayoffTableBehavior, KS): _row(KS, 0.65, 0.35, 60, 0.5, 0.01, SF),
    (E.PayoffTableBehavior, DR): _row(DR, 0.65, 0.35, 20, 0.5, 0.01, SF),
    (E.PayoffTableBehavior, IR): _row(IR, 0.65, 0.35, 60, 0.5, 0.01, SF),

    (E.TuningCriterion, KS): _row(KS, 0.65, 0.35, 60, 0.5, 0.01, [SF, SP]),
    (E.TuningCriterion, DR): _row(DR, 0.65, 0.35, 20, 0.5, 0.01, [SF, SP]),
    (E.TuningCriterion, IR): _row(IR, 0.65, 0.35, 60, 0.5, 0.02, [SF, SP]),

    (E.InitialProbabilities, KS): _row(KS, [0.65, 0.75, 0.85, 0.95, 0.99], [0.01, 0.05, 0.15, 0.25, 0.35], 60, 0.5, 0.05, SF),
    (E.InitialProbabilities, DR): _row(DR, [0.65, 0.75, 0.85, 0.95, 0.99], [0.01, 0.05, 0.15, 0.25, 0.35], 20, 0.5, 0.05, SP),
    (E.InitialProbabilities, IR): _row(IR, [0.5, 0.51, 0.55, 0.65, 0.75, 0.85, 0.95, 0.99],
                                       [0.01, 0.05, 0.15, 0.25, 0.35, 0.45, 0.49, 0.5], 60, 0.5, 0.05, SP),

    (E.Population, KS): _row(KS, 0.65, 0.35, [10, 20, 30, 40, 50, 60, 70, 80, 90, 100], 0.5, 0.04, SF),
    (E.Population, DR): _row(DR, 0.65, 0.35, [2, 4, 6, 8, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100], 0.5, 0.04, SP),
    (E.Population, IR): _row(IR, 0.98, 0.45, [10, 20, 30, 40, 50, 60, 70, 80, 90, 100], 0.5, 0.04, SP),

    # ipd is always 1 - ipc
    (E.Robustness, KS): _row(KS, 0.65, 0.35, 60, [0, 0.333, 0.5, 0.666, 1], 0.02, SF),
    (E.Robustness, DR): _row(DR, 0.65, 0.35, 20, [0, 0.333, 0.5, 0.666, 1], 0.02, SP),
    (E.Robustness, IR): _row(IR, 0.98, 0.45, 60, [0, 0.333, 0.5, 0.666, 1], 0.02, SP),

    (E.Behavior, KS): _row(KS, 0.65, 0.35, 60, 0.5, 0.02, SF, repetitions=10),
    (E.Behavior, DR): _row(DR, 0.65, 0.35, 20, 1, 0.02, SP, repetitions=10),
    (E.Behavior, IR): _row(IR, 0.98, 0.45, 60, 0.5, 0.02, SP, repetitions=10),
}

del E


def table_row(name, strategy):
    if not isinstance(name, NamedExperiment):
        name = NamedExperiment.parse(name)
    if not isinstance(strategy, Strategy):
        strategy = Strategy.parse(strategy)
    try:
        return TABLES[(name, strategy)]
    except KeyError:
        raise InvalidParameter('experiment', 'no settings for {} under {}'.format(name.value, strategy.value))


def x_grid(lo, hi, step):
    """Inclusive grid lo, lo + step, ... up to hi

    >>> x_grid(0.01, 1.0, 0.02)[:3], len(x_grid(0.01, 1.0, 0.02))
    ([0.01, 0.03, 0.05], 50)
    >>> len(x_grid(0.01, 1.0, 0.01)), len(x_grid(0.01, 0.99, 0.01)), len(x_grid(0.01, 0.99, 0.04))
    (100, 99, 25)
    >>> x_grid(0.9, 0.9, 0.05)
    [0.9]
    """
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 10) for k in range(count)]


def cell_seed(base_seed, x_index, repetition):
    """Seed of one sweep cell, hashed from the base seed and the cell's position

    >>> cell_seed(0, 3, 1) == cell_seed(0, 3, 1), cell_seed(0, 3, 1) == cell_seed(0, 1, 3)
    (True, False)
    """
    sequence = np.random.SeedSequence([int(base_seed), int(x_index), int(repetition)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepConfig:
    strategy: Strategy
    tuning: TuningRule
    population: int
    ipc: float
    icpc: float
    icpd: float
    x_range: Tuple[float, float] = (0.01, 1.0)
    x_step: float = 0.01
    repetitions: int = 1
    window: Optional[int] = None
    iterations: int = settings.iterations
    base_seed: int = settings.default_seed
    b: float = settings.benefit
    c: float = settings.cost
    width: float = settings.width
    height: float = settings.height
    neighbor_radius: float = settings.neighbor_radius
    step_length: float = settings.step_length

    def __post_init__(self):
        if not isinstance(self.strategy, Strategy):
            object.__setattr__(self, 'strategy', Strategy.parse(self.strategy))
        if not isinstance(self.tuning, TuningRule):
            object.__setattr__(self, 'tuning', TuningRule(self.tuning))
        lo, hi = self.x_range
        if not 0 <= lo <= 1:
            raise InvalidParameter('x_lo', 'must lie in [0, 1], got {}'.format(lo))
        if not lo <= hi <= 1:
            raise InvalidParameter('x_hi', 'must lie in [x_lo, 1], got {}'.format(hi))
        if self.strategy is Strategy.DirectReciprocity and hi > 0.99:
            raise InvalidParameter('x_hi', 'direct reciprocity sweeps stop at 0.99 (w=1 divides by zero)')
        if not self.x_step > 0:
            raise InvalidParameter('x_step', 'must be positive, got {}'.format(self.x_step))
        if isinstance(self.repetitions, bool) or int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise InvalidParameter('repetitions', 'must be a positive integer, got {}'.format(self.repetitions))
        if isinstance(self.iterations, bool) or int(self.iterations) != self.iterations or self.iterations < 0:
            raise InvalidParameter('iterations', 'must be a non-negative integer, got {}'.format(self.iterations))
        if isinstance(self.base_seed, bool) or int(self.base_seed) != self.base_seed or not 0 <= self.base_seed < 2 ** 64:
            raise InvalidParameter('seed', 'must be an integer in [0, 2**64), got {}'.format(self.base_seed))
        effective_window(self.iterations, self.window)

    def xs(self):
        return x_grid(self.x_range[0], self.x_range[1], self.x_step)

    def world_config(self, x, seed):
        """The run of one cell; raises InvalidParameter when the derived parameters are invalid
        """
        return WorldConfig(
            spec=GameSpec(self.strategy, self.b, self.c, x),
            tuning=self.tuning,
            init=PopulationInit(self.population, self.ipc, self.icpc, self.icpd),
            seed=seed, iterations=self.iterations, width=self.width, height=self.height,
            neighbor_radius=self.neighbor_radius, step_length=self.step_length, window=self.window,
        )

    def metadata(self):
        return Bag(strategy=self.strategy.value, tuning=self.tuning.criterion.value, population=self.population,
                   ipc=self.ipc, icpc=self.icpc, icpd=self.icpd)


@dataclass(frozen=True)
class Cell:
    sweep_index: int
    x_index: int
    repetition: int
    x: float
    seed: int
    config: Optional[WorldConfig]
    error: Optional[str]
    key: str


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    tail_mean: Optional[float]
    final_fraction: Optional[float]
    status: str


@dataclass
class SweepRow:
    x: float
    tail_mean: Optional[float]
    final_fraction: Optional[float]
    seeds: List[int]
    tails: List[Optional[float]]
    finals: List[Optional[float]]
    status: str


@dataclass
class SweepResult:
    sweep: SweepConfig
    rows: List[SweepRow]
    cells: List[CellResult]

    def curve(self):
        """(x, mean tail) of every row that ran
        """
        return [(row.x, row.tail_mean) for row in self.rows if row.status == 'ok']

    def spearman(self):
        """Rank correlation between x and the mean tail fraction
        """
        curve = self.curve()
        if len(curve) < 2:
            return float('nan')
        xs, means = zip(*curve)
        rho, _ = stats.spearmanr(xs, means)
        return float(rho)

    def onset(self, threshold=0.5):
        """Smallest x whose mean tail fraction exceeds threshold, None if none does
        """
        for x, mean in self.curve():
            if mean > threshold:
                return x
        return None


def sweep_cells(sweep, sweep_index=0):
    cells = []
    meta = sweep.metadata()
    meta.update(b=sweep.b, c=sweep.c, delta=sweep.tuning.delta, width=sweep.width, height=sweep.height,
                radius=sweep.neighbor_radius, step_length=sweep.step_length, iterations=sweep.iterations,
                window=sweep.window)
    for x_index, x in enumerate(sweep.xs()):
        for repetition in range(sweep.repetitions):
            seed = cell_seed(sweep.base_seed, x_index, repetition)
            try:
                config, error = sweep.world_config(x, seed), None
            except InvalidParameter as e:
                config, error = None, str(e)
            key = Bag(meta, x=x, seed=seed).fingerprint()
            cells.append(Cell(sweep_index, x_index, repetition, x, seed, config, error, key))
    return cells


def simulate(config):
    """Tail mean and final fraction of one run; module level so worker processes can import it
    """
    metrics = run(config)
    return metrics.tail_mean, metrics.final_fraction


def run_cells(cells, jobs=1, cache=None):
    """Run every cell and return results in the order of `cells`

    jobs:
        worker processes; 1 runs inline
    cache:
        optional RunCache of finished cells, read before and written after each run
    """
    results = [None] * len(cells)
    pending = []
    for index, cell in enumerate(cells):
        if cell.config is None:
            results[index] = CellResult(cell, None, None, 'error: {}'.format(cell.error))
            continue
        cached = cache.get(cell.key) if cache is not None else None
        if cached is not None:
            results[index] = CellResult(cell, cached['tail_mean'], cached['final_fraction'], cached['status'])
        else:
            pending.append(index)
    if len(pending) < len(cells):
        logger.info('%d of %d cells already known', len(cells) - len(pending), len(cells))

    def finish(index, outcome):
        cell = cells[index]
        if isinstance(outcome, Exception):
            logger.error('cell x=%s seed=%s failed: %s', cell.x, cell.seed, outcome)
            results[index] = CellResult(cell, None, None, 'error: {}'.format(outcome))
            return
        tail_mean, final_fraction = outcome
        results[index] = CellResult(cell, tail_mean, final_fraction, 'ok')
        if cache is not None:
            cache[cell.key] = dict(tail_mean=tail_mean, final_fraction=final_fraction, status='ok')
        done = sum(result is not None for result in results)
        if done % 100 == 0:
            logger.info('%d/%d cells done', done, len(cells))

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            future_to_index = {executor.submit(simulate, cells[index].config): index for index in pending}
            for future in as_completed(future_to_index):
                try:
                    outcome = future.result()
                except CoopSimError as e:
                    outcome = e
                finish(future_to_index[future], outcome)
    else:
        for index in pending:
            try:
                outcome = simulate(cells[index].config)
            except CoopSimError as e:
                outcome = e
            finish(index, outcome)
    return results


def _mean(values):
    return math.fsum(values) / len(values)


def aggregate(sweep, results):
    """Average the repetitions of every x; a failed repetition marks the whole row
    """
    rows = []
    for x_index, group in itertools.groupby(results, key=lambda result: result.cell.x_index):
        group = list(group)
        errors = [result.status for result in group if result.status != 'ok']
        tails = [result.tail_mean for result in group]
        finals = [result.final_fraction for result in group]
        if errors:
            rows.append(SweepRow(group[0].cell.x, None, None, [r.cell.seed for r in group], tails, finals, errors[0]))
        else:
            rows.append(SweepRow(group[0].cell.x, _mean(tails), _mean(finals), [r.cell.seed for r in group],
                                 tails, finals, 'ok'))
    rows.sort(key=lambda row: row.x)
    return SweepResult(sweep, rows, results)


def run_sweeps(sweeps, jobs=1, cache=None):
    """Run several sweeps with their cells fanned out together
    """
    cells = []
    for index, sweep in enumerate(sweeps):
        cells.extend(sweep_cells(sweep, index))
    logger.info('running %d sweeps, %d cells, jobs=%d', len(sweeps), len(cells), jobs)
    results = run_cells(cells, jobs=jobs, cache=cache)
    return [aggregate(sweep, [result for result in results if result.cell.sweep_index == index])
            for index, sweep in enumerate(sweeps)]


def run_sweep(sweep, jobs=1, cache=None):
    return run_sweeps([sweep], jobs=jobs, cache=cache)[0]


def experiment_sweeps(name, strategy, iterations=settings.iterations, base_seed=settings.default_seed,
                      window=None, repetitions=None, delta=settings.delta):
    """One sweep per point of the table row's parameter grid
    """
    strategy = strategy if isinstance(strategy, Strategy) else Strategy.parse(strategy)
    row = table_row(name, strategy)
    sweeps = []
    for criterion, population, ipc, icpc, icpd in itertools.product(row.tuning, row.population, row.ipc, row.icpc, row.icpd):
        sweeps.append(SweepConfig(
            strategy=strategy, tuning=TuningRule(criterion, delta), population=population, ipc=ipc,
            icpc=icpc, icpd=icpd, x_range=row.x_range, x_step=row.step,
            repetitions=repetitions or row.repetitions, window=window, iterations=iterations, base_seed=base_seed,
        ))
    return sweeps


def expand_experiment(name, strategy, **kwargs):
    """Every (config, metadata) of an experiment, one per grid point and x

    Configs use the seed of the first repetition. Cells whose parameters are
    invalid come back with config None and the reason in metadata.error.

    >>> cells = expand_experiment('initial', 'KS', iterations=100)
    >>> len(cells)
    500
    >>> config, meta = cells[0]
    >>> meta.population, meta.icpc, meta.icpd, meta.x, meta.tuning
    (60, 0.65, 0.01, 0.01, 'sf')
    """
    if not isinstance(name, NamedExperiment):
        name = NamedExperiment.parse(name)
    expanded = []
    for sweep in experiment_sweeps(name, strategy, **kwargs):
        for x_index, x in enumerate(sweep.xs()):
            meta = sweep.metadata()
            meta.update(experiment=name.value, x=x, repetitions=sweep.repetitions, x_step=sweep.x_step)
            try:
                config = sweep.world_config(x, cell_seed(sweep.base_seed, x_index, 0))
            except InvalidParameter as e:
                config = None
                meta.error = str(e)
            expanded.append((config, meta))
    return expanded


REGIME_STARTS = ((Regime.ESS, 2.0 / 3), (Regime.RD, 0.5), (Regime.AD, 1.0 / 3))


def regime_experiment(strategy, b, c, x, tuning, iterations=settings.iterations, repetitions=5,
                      base_seed=settings.default_seed, population=None, icpc=None, icpd=None, jobs=1, cache=None):
    """Tail means with 2/3, 1/2 and 1/3 initial cooperators, the ESS, RD and AD starts

    Population and initial cps default to the strategy's Behavior settings.
    Returns a Bag keyed 'ESS', 'RD', 'AD', each a Bag of ipc, tail_mean and tails.
    """
    strategy = strategy if isinstance(strategy, Strategy) else Strategy.parse(strategy)
    tuning = tuning if isinstance(tuning, TuningRule) else TuningRule(tuning)
    row = table_row(NamedExperiment.Behavior, strategy)
    population = row.population[0] if population is None else population
    icpc = row.icpc[0] if icpc is None else icpc
    icpd = row.icpd[0] if icpd is None else icpd
    sweeps = [SweepConfig(strategy=strategy, tuning=tuning, population=population, ipc=ipc, icpc=icpc, icpd=icpd,
                          x_range=(x, x), x_step=1.0, repetitions=repetitions, iterations=iterations,
                          base_seed=base_seed, b=b, c=c)
              for _, ipc in REGIME_STARTS]
    results = run_sweeps(sweeps, jobs=jobs, cache=cache)
    report = Bag()
    for (regime, ipc), result in zip(REGIME_STARTS, results):
        row = result.rows[0]
        report[regime.value] = Bag(ipc=ipc, tail_mean=row.tail_mean, tails=row.tails, status=row.status)
    return report
