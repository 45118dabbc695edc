__doc__ = """
The spatial simulation loop.

Each tick runs three phases with a barrier between them: every agent turns and
moves, then pairs are matched among neighbors, then every pair plays, is paid and
tunes its cp. Agent state lives in numpy arrays indexed by agent id; movement is
vectorized and matching and play run in compiled kernels. A run uses a single
PCG64 stream drawn in this order:

    init:     2 position draws per agent (x then y), then 1 heading draw per agent
    per tick: an (n, 2) block of turn draws in id order (left then right),
              one permutation for the matching visit order,
              n neighbor-choice uniforms, one per visit slot whether used or not,
              the game draws of every pair in matching order, the smaller id first

A visiting agent with k eligible neighbors takes the one at index
min(floor(u * k), k - 1) in ascending id order, u being the uniform of its slot.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
from numba import jit
from . import settings
from .agents import COOPERATOR_CP, Agent, PopulationInit, init_population, wrap_array
from .common import InvalidParameter, SimulationError, logger
from .game import GameSpec, payoff_matrix
from .metrics import RunMetrics, effective_window
from .strategies import DIRECT, STRATEGY_CODES, decide, draws_per_agent
from .tuning import TuningRule, tune

# memory entries of the direct reciprocity table
UNSEEN, DEFECTED, COOPERATED = -1, 0, 1


def make_rng(seed):
    """The run's generator: PCG64 seeded with a 64-bit integer

    >>> make_rng(7).random() == make_rng(7).random()
    True
    """
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class WorldConfig:
    spec: GameSpec
    tuning: TuningRule
    init: PopulationInit
    seed: int = settings.default_seed
    iterations: int = settings.iterations
    width: float = settings.width
    height: float = settings.height
    neighbor_radius: float = settings.neighbor_radius
    step_length: float = settings.step_length
    window: Optional[int] = None
    record_ledger: bool = False

    def __post_init__(self):
        for name in ('width', 'height', 'neighbor_radius', 'step_length'):
            if not getattr(self, name) > 0:
                raise InvalidParameter(name, 'must be positive, got {}'.format(getattr(self, name)))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise InvalidParameter('seed', 'must be an integer in [0, 2**64), got {}'.format(self.seed))
        if isinstance(self.iterations, bool) or int(self.iterations) != self.iterations or self.iterations < 0:
            raise InvalidParameter('iterations', 'must be a non-negative integer, got {}'.format(self.iterations))
        effective_window(self.iterations, self.window)


@dataclass(frozen=True)
class GameRecord:
    tick: int
    i: int
    j: int
    action_i: bool
    action_j: bool
    payoff_i: float
    payoff_j: float


@dataclass
class WorldState:
    """Agent columns indexed by id

    last_profit is NaN before an agent's first game. memory[i, j] holds what j
    last did to i under direct reciprocity: UNSEEN, DEFECTED or COOPERATED.
    """
    pos: np.ndarray
    heading: np.ndarray
    cp: np.ndarray
    fitness: np.ndarray
    last_profit: np.ndarray
    memory: np.ndarray
    rng: np.random.Generator
    tick: int = 0
    ledger: Optional[List[GameRecord]] = None

    @classmethod
    def from_agents(cls, agents, rng, ledger=None):
        """Pack Agent records, whose ids must run 0..n-1 in order

        >>> state = WorldState.from_agents([Agent(0, (1.0, 2.0), 90.0, 0.65)], make_rng(0))
        >>> state.pos.tolist(), state.cooperator_fraction()
        ([[1.0, 2.0]], 1.0)
        """
        n = len(agents)
        if [agent.id for agent in agents] != list(range(n)):
            raise InvalidParameter('agents', 'ids must run 0..{} in order'.format(n - 1))
        memory = np.full((n, n), UNSEEN, dtype=np.int8)
        for agent in agents:
            for partner, action in agent.memory.items():
                memory[agent.id, partner] = COOPERATED if action else DEFECTED
        return cls(
            pos=np.array([agent.pos for agent in agents], dtype=float).reshape(-1, 2),
            heading=np.array([agent.heading for agent in agents], dtype=float),
            cp=np.array([agent.cp for agent in agents], dtype=float),
            fitness=np.array([agent.fitness for agent in agents], dtype=float),
            last_profit=np.array([np.nan if agent.last_profit is None else agent.last_profit for agent in agents],
                                 dtype=float),
            memory=memory, rng=rng, ledger=ledger,
        )

    @property
    def population(self):
        return len(self.cp)

    def agent(self, i):
        """Snapshot of one agent as an Agent record
        """
        profit = self.last_profit[i]
        seen = np.flatnonzero(self.memory[i] != UNSEEN)
        return Agent(id=int(i), pos=(float(self.pos[i, 0]), float(self.pos[i, 1])), heading=float(self.heading[i]),
                     cp=float(self.cp[i]), fitness=float(self.fitness[i]),
                     last_profit=None if np.isnan(profit) else float(profit),
                     memory={int(j): bool(self.memory[i, j] == COOPERATED) for j in seen})

    @property
    def agents(self):
        return [self.agent(i) for i in range(self.population)]

    def cooperator_fraction(self):
        if not self.population:
            return 0.0
        return np.count_nonzero(self.cp > COOPERATOR_CP) / self.population


@dataclass
class Matching:
    pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))
    unmatched: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.unmatched = np.asarray(self.unmatched, dtype=np.int64).ravel()


@jit(nopython=True, cache=True)
def _torus_distance(x1, y1, x2, y2, width, height):
    dx = abs(x1 - x2)
    dy = abs(y1 - y2)
    dx = min(dx, width - dx)
    dy = min(dy, height - dy)
    return math.sqrt(dx * dx + dy * dy)


def toroidal_distance(p, q, width=settings.width, height=settings.height):
    """Euclidean distance with wrap-around edges

    >>> toroidal_distance((0.5, 0.0), (12.5, 0.0), 13, 13)
    1.0
    """
    return _torus_distance(float(p[0]), float(p[1]), float(q[0]), float(q[1]), float(width), float(height))


def pair_distances(positions, pairs, width=settings.width, height=settings.height):
    """Toroidal distance of every (i, j) row of pairs

    >>> positions = np.array([[0.5, 0.0], [12.5, 0.0], [3.5, 4.0]])
    >>> pair_distances(positions, np.array([[0, 1], [0, 2]]), 13, 13).tolist()
    [1.0, 5.0]
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    delta = np.abs(positions[pairs[:, 0]] - positions[pairs[:, 1]])
    delta = np.minimum(delta, np.array([width, height]) - delta)
    return np.sqrt(delta[:, 0] * delta[:, 0] + delta[:, 1] * delta[:, 1])


@jit(nopython=True, cache=True)
def _match(pos, order, choices, width, height, radius):
    n = pos.shape[0]
    eligible = np.ones(n, dtype=np.bool_)
    pairs = np.empty((n // 2, 2), dtype=np.int64)
    candidates = np.empty(n, dtype=np.int64)
    count = 0
    for slot in range(n):
        i = order[slot]
        if not eligible[i]:
            continue
        k = 0
        for j in range(n):
            if j != i and eligible[j] and _torus_distance(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1],
                                                          width, height) <= radius:
                candidates[k] = j
                k += 1
        if k:
            j = candidates[min(int(choices[slot] * k), k - 1)]
            eligible[i] = False
            eligible[j] = False
            pairs[count, 0] = min(i, j)
            pairs[count, 1] = max(i, j)
            count += 1
    return pairs[:count], eligible


@jit(nopython=True, cache=True)
def _play(pairs, draws, strategy, q, table, criterion, delta, cp, fitness, last_profit, memory, actions, payoffs):
    last = draws.shape[2] - 1
    for k in range(pairs.shape[0]):
        i = pairs[k, 0]
        j = pairs[k, 1]
        # both actions are fixed before either agent changes
        action_i = decide(strategy, q, cp[i], cp[j], memory[i, j] != DEFECTED, draws[k, 0, 0], draws[k, 0, last])
        action_j = decide(strategy, q, cp[j], cp[i], memory[j, i] != DEFECTED, draws[k, 1, 0], draws[k, 1, last])
        payoff_i = table[0 if action_i else 1, 0 if action_j else 1]
        payoff_j = table[0 if action_j else 1, 0 if action_i else 1]
        previous_i = 0.0 if np.isnan(last_profit[i]) else last_profit[i]
        previous_j = 0.0 if np.isnan(last_profit[j]) else last_profit[j]
        fitness[i] += payoff_i
        fitness[j] += payoff_j
        last_profit[i] = payoff_i
        last_profit[j] = payoff_j
        if strategy == DIRECT:
            memory[i, j] = COOPERATED if action_j else DEFECTED
            memory[j, i] = COOPERATED if action_i else DEFECTED
        cp[i] = tune(criterion, action_i, payoff_i, previous_i, cp[i], delta)
        cp[j] = tune(criterion, action_j, payoff_j, previous_j, cp[j], delta)
        actions[k, 0] = action_i
        actions[k, 1] = action_j
        payoffs[k, 0] = payoff_i
        payoffs[k, 1] = payoff_j


def init_world(config):
    rng = make_rng(config.seed)
    agents = init_population(config.init, rng, config.width, config.height)
    return WorldState.from_agents(agents, rng, ledger=[] if config.record_ledger else None)


def move_phase(state, config, rng=None):
    """Turn left then right by random(50) degrees each, then step forward
    """
    rng = state.rng if rng is None else rng
    if not state.population:
        return state
    turns = rng.integers(0, settings.max_turn, size=(state.population, 2))
    state.heading = wrap_array(state.heading + turns[:, 0] - turns[:, 1], 360.0)
    radians = np.radians(state.heading)
    state.pos[:, 0] = wrap_array(state.pos[:, 0] + config.step_length * np.cos(radians), config.width)
    state.pos[:, 1] = wrap_array(state.pos[:, 1] + config.step_length * np.sin(radians), config.height)
    return state


def match_phase(state, config, rng=None):
    """Greedy pairing of neighbors in a shuffled visit order
    """
    rng = state.rng if rng is None else rng
    n = state.population
    if not n:
        return Matching()
    order = np.asarray(rng.permutation(n), dtype=np.int64)
    choices = np.asarray(rng.random(n), dtype=float)
    pairs, eligible = _match(state.pos, order, choices, float(config.width), float(config.height),
                             float(config.neighbor_radius))
    return Matching(pairs=pairs, unmatched=np.flatnonzero(eligible))


def validate_matching(matching, state, config):
    """Raise SimulationError unless every agent appears once and pairs are neighbors
    """
    seen = np.sort(np.concatenate([matching.pairs.ravel(), matching.unmatched]))
    if not np.array_equal(seen, np.arange(state.population)):
        raise SimulationError('tick {}: matching does not cover every agent exactly once'.format(state.tick))
    if len(matching.pairs):
        distances = pair_distances(state.pos, matching.pairs, config.width, config.height)
        far = np.flatnonzero(distances > config.neighbor_radius)
        if len(far):
            i, j = matching.pairs[far[0]].tolist()
            raise SimulationError('tick {}: pair ({}, {}) is {:.6g} apart'.format(state.tick, i, j, distances[far[0]]))
    return True


def game_phase(state, matching, config, rng=None, matrix=None):
    """Play, pay and tune every matched pair; unmatched agents are untouched
    """
    rng = state.rng if rng is None else rng
    count = len(matching.pairs)
    if not count:
        return state
    if matrix is None:
        matrix = payoff_matrix(config.spec)
    draws = rng.random((count, 2, draws_per_agent(config.spec.strategy)))
    actions = np.empty((count, 2), dtype=np.bool_)
    payoffs = np.empty((count, 2), dtype=float)
    _play(matching.pairs, draws, STRATEGY_CODES[config.spec.strategy], float(config.spec.x), matrix.table(),
          config.tuning.code, float(config.tuning.delta), state.cp, state.fitness, state.last_profit, state.memory,
          actions, payoffs)
    if state.ledger is not None:
        state.ledger.extend(
            GameRecord(state.tick, i, j, action_i, action_j, payoff_i, payoff_j)
            for (i, j), (action_i, action_j), (payoff_i, payoff_j)
            in zip(matching.pairs.tolist(), actions.tolist(), payoffs.tolist())
        )
    return state


def step(state, config, matrix=None):
    """Advance the world one tick
    """
    move_phase(state, config)
    matching = match_phase(state, config)
    if __debug__:
        validate_matching(matching, state, config)
    game_phase(state, matching, config, matrix=matrix)
    state.tick += 1
    return state


def run(config, progress=None, progress_every=10000):
    """Simulate config.iterations ticks and record the cooperator fraction after each

    progress:
        optional callback(tick, fraction) called every progress_every ticks

    >>> from coopsim.game import Strategy
    >>> config = WorldConfig(GameSpec(Strategy.KinSelection, 4, 2, 0.75), TuningRule(),
    ...                      PopulationInit(20, 0.5, 0.65, 0.35), seed=1, iterations=0)
    >>> metrics = run(config)
    >>> metrics.series.tolist(), metrics.tail_mean
    ([0.5], 0.5)
    """
    state = init_world(config)
    matrix = payoff_matrix(config.spec)
    series = np.empty(config.iterations + 1, dtype=float)
    series[0] = state.cooperator_fraction()
    logger.debug('run start: %s x=%s seed=%s iterations=%s', config.spec.strategy.value, config.spec.x,
                 config.seed, config.iterations)
    for tick in range(1, config.iterations + 1):
        step(state, config, matrix)
        series[tick] = state.cooperator_fraction()
        if progress is not None and tick % progress_every == 0:
            progress(tick, series[tick])
    metrics = RunMetrics.from_series(series, config.window)
    logger.debug('run done: tail_mean=%s final=%s', metrics.tail_mean, metrics.final_fraction)
    return metrics
