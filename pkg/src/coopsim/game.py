__doc__ = """
Payoff matrices, threshold conditions and game classification for the three
cooperation strategies: kin selection, direct reciprocity and indirect reciprocity.

Everything here is a pure function of (strategy, b, c, x).

Under indirect reciprocity a defector facing a cooperator earns b(1-q), the benefit
of going unrecognized, so R > T exactly when bq > c.
"""

import enum
from dataclasses import dataclass
import numpy as np
from . import settings
from .common import InvalidParameter, UnreachableThreshold


class Strategy(enum.Enum):
    KinSelection = 'KS'
    DirectReciprocity = 'DR'
    IndirectReciprocity = 'IR'

    @classmethod
    def parse(cls, text):
        """Accept the short code or the full name, case insensitive

        >>> Strategy.parse('dr')
        <Strategy.DirectReciprocity: 'DR'>
        >>> Strategy.parse('IndirectReciprocity').value
        'IR'
        """
        key = str(text).strip().lower()
        for strategy in cls:
            if key in (strategy.value.lower(), strategy.name.lower()):
                return strategy
        raise InvalidParameter('strategy', 'unknown strategy {!r}'.format(text))

    @property
    def variable(self):
        """Name of the probability variable the strategy depends on
        """
        return {'KS': 'r', 'DR': 'w', 'IR': 'q'}[self.value]


class GameClass(enum.Enum):
    PrisonersDilemma = 'PrisonersDilemma'
    StagHunt = 'StagHunt'
    UnidentifiedCooperatorsWin = 'UnidentifiedCooperatorsWin'
    UnidentifiedTieTS = 'UnidentifiedTieTS'
    UnidentifiedOnlyMutual = 'UnidentifiedOnlyMutual'
    Boundary = 'Boundary'


class Regime(enum.Enum):
    NONE = 'None'
    ESS = 'ESS'
    RD = 'RD'
    AD = 'AD'


@dataclass(frozen=True)
class GameSpec:
    strategy: Strategy
    b: float
    c: float
    x: float

    def __post_init__(self):
        if not isinstance(self.strategy, Strategy):
            object.__setattr__(self, 'strategy', Strategy.parse(self.strategy))
        if not self.b > 0:
            raise InvalidParameter('b', 'benefit must be positive, got {}'.format(self.b))
        if not self.c > 0:
            raise InvalidParameter('c', 'cost must be positive, got {}'.format(self.c))
        if not self.b > self.c:
            raise InvalidParameter('b', 'benefit must exceed cost ({} <= {})'.format(self.b, self.c))
        name = self.strategy.variable
        if not 0 <= self.x <= 1:
            raise InvalidParameter(name, 'must lie in [0, 1], got {}'.format(self.x))
        if self.strategy is Strategy.DirectReciprocity and self.x >= 1:
            raise InvalidParameter(name, 'w=1 divides by zero, must be below 1')


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoffs to the focal player: R both cooperate, S focal cooperates alone,
    T focal defects on a cooperator, P both defect
    """
    R: float
    S: float
    T: float
    P: float

    def payoff(self, own, other):
        """Look up the focal payoff by (own action, partner action), True meaning cooperate

        >>> m = PayoffMatrix(R=3.0, S=-1.0, T=4.0, P=0.0)
        >>> m.payoff(True, False), m.payoff(False, True)
        (-1.0, 4.0)
        """
        if own:
            return self.R if other else self.S
        return self.T if other else self.P

    def items(self):
        return (('R', self.R), ('S', self.S), ('T', self.T), ('P', self.P))

    def table(self):
        """Payoffs as a 2x2 array indexed [own defected][partner defected]

        >>> PayoffMatrix(R=3.0, S=-1.0, T=4.0, P=0.0).table().tolist()
        [[3.0, -1.0], [4.0, 0.0]]
        """
        return np.array([[self.R, self.S], [self.T, self.P]], dtype=float)


@dataclass(frozen=True)
class Thresholds:
    ess_x: float
    rd_x: float
    ad_x: float


def payoff_matrix(spec):
    """Build the payoff matrix of a game

    >>> payoff_matrix(GameSpec(Strategy.KinSelection, 4, 2, 0.75))
    PayoffMatrix(R=3.5, S=1.0, T=2.5, P=0.0)
    >>> payoff_matrix(GameSpec(Strategy.DirectReciprocity, 4, 2, 0.5))
    PayoffMatrix(R=4.0, S=-2.0, T=4.0, P=0.0)
    >>> payoff_matrix(GameSpec(Strategy.IndirectReciprocity, 4, 2, 1.0))
    PayoffMatrix(R=2.0, S=0.0, T=0.0, P=0.0)
    """
    b, c, x = float(spec.b), float(spec.c), float(spec.x)
    if spec.strategy is Strategy.KinSelection:
        return PayoffMatrix(R=(b - c) * (1 + x), S=b * x - c, T=b - x * c, P=0.0)
    elif spec.strategy is Strategy.DirectReciprocity:
        return PayoffMatrix(R=(b - c) / (1 - x), S=-c, T=b, P=0.0)
    else:
        # + 0.0 turns the -0.0 of q=1 into 0.0
        return PayoffMatrix(R=b - c, S=-c * (1 - x) + 0.0, T=b * (1 - x), P=0.0)


def solve_threshold(strategy, condition, b, c):
    """Solve one condition b/c > f(x) for equality in x

    condition:
        one of Regime.ESS, Regime.RD, Regime.AD
    """
    if not b > 0:
        raise InvalidParameter('b', 'benefit must be positive, got {}'.format(b))
    if not c > 0:
        raise InvalidParameter('c', 'cost must be positive, got {}'.format(c))
    b, c = float(b), float(c)
    if condition is Regime.ESS or strategy is Strategy.KinSelection:
        x = c / b
    elif condition is Regime.RD:
        x = 2 * c / (b + c)
    elif condition is Regime.AD:
        x = 3 * c / (b + 2 * c)
    else:
        raise InvalidParameter('condition', 'no threshold for {}'.format(condition))
    if x > 1:
        raise UnreachableThreshold(condition.value, x)
    return x


def thresholds(strategy, b, c):
    """Values of x at which the ESS, RD and AD conditions become equalities

    >>> thresholds(Strategy.KinSelection, 4, 2)
    Thresholds(ess_x=0.5, rd_x=0.5, ad_x=0.5)
    >>> t = thresholds(Strategy.DirectReciprocity, 4, 2)
    >>> t.ess_x, round(t.rd_x, 12), t.ad_x
    (0.5, 0.666666666667, 0.75)
    >>> thresholds(Strategy.KinSelection, 2, 4)
    Traceback (most recent call last):
    ...
    coopsim.common.UnreachableThreshold: ESS threshold unreachable: x=2 > 1
    """
    return Thresholds(*(solve_threshold(strategy, condition, b, c) for condition in (Regime.ESS, Regime.RD, Regime.AD)))


def is_tie(a, b, tolerance=settings.tie_tolerance):
    """Whether two payoffs count as equal

    >>> is_tie(4.0, 4.0 + 1e-12), is_tie(4.0, 4.001)
    (True, False)
    """
    return abs(a - b) <= tolerance * max(1.0, abs(a), abs(b))


def ordering(matrix, tolerance=settings.tie_tolerance):
    """Rank the four payoffs from highest to lowest, grouping ties

    >>> groups = ordering(PayoffMatrix(R=4.0, S=2.0, T=2.0, P=0.0))
    >>> [sorted(group) for group in groups]
    [['R'], ['S', 'T'], ['P']]
    """
    ranked = sorted(matrix.items(), key=lambda item: item[1], reverse=True)
    groups = [[ranked[0]]]
    for name, value in ranked[1:]:
        if is_tie(groups[-1][-1][1], value, tolerance):
            groups[-1].append((name, value))
        else:
            groups.append([(name, value)])
    return tuple(frozenset(name for name, _ in group) for group in groups)


def format_ordering(groups):
    """Text form such as 'R > T = S > P'

    >>> format_ordering(ordering(PayoffMatrix(R=2.0, S=0.0, T=0.0, P=0.0)))
    'R > T = P = S'
    """
    order = 'RTPS'
    return ' > '.join(' = '.join(sorted(group, key=order.index)) for group in groups)


_CLASSES = {
    'T > R > P > S': GameClass.PrisonersDilemma,
    'R > T > P > S': GameClass.StagHunt,
    'R > T > S > P': GameClass.UnidentifiedCooperatorsWin,
    'R > T = S > P': GameClass.UnidentifiedTieTS,
    'R > T = P = S': GameClass.UnidentifiedOnlyMutual,
}


def classify_game(spec, tolerance=settings.tie_tolerance):
    """Name the game by the ordering of its payoffs

    >>> classify_game(GameSpec(Strategy.KinSelection, 4, 2, 0.25))
    <GameClass.PrisonersDilemma: 'PrisonersDilemma'>
    >>> classify_game(GameSpec(Strategy.DirectReciprocity, 4, 2, 0.9))
    <GameClass.StagHunt: 'StagHunt'>
    >>> classify_game(GameSpec(Strategy.KinSelection, 4, 2, 1.0))
    <GameClass.UnidentifiedTieTS: 'UnidentifiedTieTS'>
    >>> classify_game(GameSpec(Strategy.DirectReciprocity, 4, 2, 0.5))
    <GameClass.Boundary: 'Boundary'>
    """
    groups = ordering(payoff_matrix(spec), tolerance)
    return _CLASSES.get(format_ordering(groups), GameClass.Boundary)


def regime(spec):
    """Strongest of the ESS, RD and AD conditions satisfied by x

    >>> regime(GameSpec(Strategy.DirectReciprocity, 4, 2, 0.7))
    <Regime.RD: 'RD'>
    >>> regime(GameSpec(Strategy.KinSelection, 4, 2, 0.4))
    <Regime.NONE: 'None'>
    >>> regime(GameSpec(Strategy.IndirectReciprocity, 4, 2, 0.8))
    <Regime.AD: 'AD'>
    """
    result = Regime.NONE
    for condition in (Regime.ESS, Regime.RD, Regime.AD):
        try:
            threshold = solve_threshold(spec.strategy, condition, spec.b, spec.c)
        except UnreachableThreshold:
            break
        if spec.x > threshold:
            result = condition
        else:
            break
    return result
