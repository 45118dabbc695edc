__doc__ = """
Self-organizing cp updates applied after every game.

Selfish fitness looks only at whether the agent's own fitness went up or down in
the game just played. Selfish profit compares the profit of this game with the
profit of the agent's previous game.
"""

import enum
from dataclasses import dataclass
from numba import jit
from . import settings
from .common import InvalidParameter


class TuningCriterion(enum.Enum):
    SelfishFitness = 'sf'
    SelfishProfit = 'sp'

    @classmethod
    def parse(cls, text):
        """
        >>> TuningCriterion.parse('SP')
        <TuningCriterion.SelfishProfit: 'sp'>
        """
        key = str(text).strip().lower()
        for criterion in cls:
            if key in (criterion.value, criterion.name.lower()):
                return criterion
        raise InvalidParameter('rule', 'unknown tuning rule {!r}'.format(text))


# criterion codes understood by the compiled game loop
SELFISH_FITNESS, SELFISH_PROFIT = 0, 1


@jit(nopython=True, cache=True)
def clamp(cp):
    return min(1.0, max(0.0, cp))


@jit(nopython=True, cache=True)
def _nudge(cooperated, went_up, cp, delta):
    # cooperating pays -> more cooperation; defecting pays -> less
    if cooperated == went_up:
        return clamp(cp + delta)
    return clamp(cp - delta)


@jit(nopython=True, cache=True)
def tune_selfish_fitness(cooperated, payoff, cp, delta=settings.delta):
    """Move cp by the sign of this game's fitness change

    >>> round(tune_selfish_fitness(True, 3.5, 0.65, 0.01), 12)
    0.66
    >>> tune_selfish_fitness(False, 0, 0.35, 0.01)
    0.35
    >>> tune_selfish_fitness(True, -2, 0.005, 0.01)
    0.0
    """
    if payoff == 0:
        return cp
    return _nudge(cooperated, payoff > 0, cp, delta)


@jit(nopython=True, cache=True)
def tune_selfish_profit(cooperated, profit_now, profit_prev, cp, delta=settings.delta):
    """Move cp by comparing this game's profit with the previous one

    >>> round(tune_selfish_profit(True, 3.5, 1.0, 0.65, 0.01), 12)
    0.66
    >>> round(tune_selfish_profit(False, 0, 4, 0.35, 0.01), 12)
    0.36
    >>> tune_selfish_profit(True, 2, 2, 0.9, 0.01)
    0.9
    """
    if profit_now == profit_prev:
        return cp
    return _nudge(cooperated, profit_now > profit_prev, cp, delta)


@jit(nopython=True, cache=True)
def tune(criterion, cooperated, profit, previous, cp, delta):
    if criterion == SELFISH_FITNESS:
        return tune_selfish_fitness(cooperated, profit, cp, delta)
    return tune_selfish_profit(cooperated, profit, previous, cp, delta)


@dataclass(frozen=True)
class TuningRule:
    criterion: TuningCriterion = TuningCriterion.SelfishFitness
    delta: float = settings.delta

    def __post_init__(self):
        if not isinstance(self.criterion, TuningCriterion):
            object.__setattr__(self, 'criterion', TuningCriterion.parse(self.criterion))
        if not 0 < self.delta <= 0.5:
            raise InvalidParameter('delta', 'must lie in (0, 0.5], got {}'.format(self.delta))

    @property
    def code(self):
        return SELFISH_FITNESS if self.criterion is TuningCriterion.SelfishFitness else SELFISH_PROFIT

    def tune(self, cooperated, payoff, previous_profit, cp):
        """New cp for an agent that just played

        previous_profit:
            profit of the agent's game before this one, None before its first game
        """
        prev = 0.0 if previous_profit is None else previous_profit
        return tune(self.code, bool(cooperated), float(payoff), float(prev), float(cp), float(self.delta))
