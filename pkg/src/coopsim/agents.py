__doc__ = 'Agent state, the cooperator/defector partition and population initialization'

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
import numpy as np
from numba import jit
from . import settings
from .common import InvalidParameter


# cp above this makes an agent a cooperator
COOPERATOR_CP = 0.5


class Role(enum.Enum):
    Cooperator = 'Cooperator'
    Defector = 'Defector'


def classify_agent(cp):
    """An agent is a cooperator while its cp is above one half

    >>> classify_agent(0.65)
    <Role.Cooperator: 'Cooperator'>
    >>> classify_agent(0.5)
    <Role.Defector: 'Defector'>
    """
    return Role.Cooperator if cp > COOPERATOR_CP else Role.Defector


@jit(nopython=True, cache=True)
def is_cooperator(cp):
    return cp > COOPERATOR_CP


@dataclass
class Agent:
    id: int
    pos: Tuple[float, float]
    heading: float
    cp: float
    fitness: float = 0.0
    last_profit: Optional[float] = None
    # direct reciprocity only: partner id -> that partner's last action toward this agent
    memory: Dict[int, bool] = field(default_factory=dict)

    @property
    def role(self):
        return classify_agent(self.cp)

    def remembers(self, partner_id):
        """Last recorded action of the partner, unseen partners count as cooperating
        """
        return self.memory.get(partner_id, True)


@dataclass(frozen=True)
class PopulationInit:
    population: int
    ipc: float
    icpc: float
    icpd: float

    def __post_init__(self):
        if isinstance(self.population, bool) or int(self.population) != self.population or self.population < 1:
            raise InvalidParameter('population', 'must be a positive integer, got {}'.format(self.population))
        if not 0 <= self.ipc <= 1:
            raise InvalidParameter('ipc', 'must lie in [0, 1], got {}'.format(self.ipc))
        if not 0.5 < self.icpc <= 1:
            raise InvalidParameter('icpc', 'initial cp of cooperators must lie in (0.5, 1], got {}'.format(self.icpc))
        if not 0 <= self.icpd <= 0.5:
            raise InvalidParameter('icpd', 'initial cp of defectors must lie in [0, 0.5], got {}'.format(self.icpd))

    @property
    def ipd(self):
        return 1 - self.ipc

    @property
    def cooperators(self):
        """Number of initial cooperators, population * ipc rounded half up

        >>> PopulationInit(population=5, ipc=0.5, icpc=0.65, icpd=0.35).cooperators
        3
        """
        return int(math.floor(self.population * self.ipc + 0.5))


def wrap(value, size):
    """Map a coordinate onto [0, size)

    >>> wrap(13.5, 13), wrap(-0.5, 13)
    (0.5, 12.5)
    >>> wrap(-1e-18, 13)
    0.0
    """
    value = value % size
    if value >= size:
        # a tiny negative value rounds up to size
        value = 0.0
    return value


def wrap_array(values, size):
    """Vectorized wrap of an array of coordinates

    >>> wrap_array(np.array([13.5, -0.5, -1e-18]), 13).tolist()
    [0.5, 12.5, 0.0]
    """
    values = np.mod(values, size)
    values[values >= size] = 0.0
    return values


def init_population(init, rng, width=settings.width, height=settings.height):
    """Create the agents of a run

    The first `init.cooperators` ids get cp=icpc and the rest cp=icpd.
    Positions are drawn first (x then y per agent), then headings.

    >>> import numpy as np
    >>> agents = init_population(PopulationInit(60, 0.5, 0.65, 0.35), np.random.default_rng(1))
    >>> sum(agent.cp == 0.65 for agent in agents), sum(agent.cp == 0.35 for agent in agents)
    (30, 30)
    """
    if not isinstance(init, PopulationInit):
        raise InvalidParameter('init', 'expected PopulationInit')
    n = init.population
    positions = rng.random((n, 2))
    headings = rng.random(n) * 360.0
    cooperators = init.cooperators
    agents = []
    for i in range(n):
        pos = (wrap(float(positions[i, 0]) * width, width), wrap(float(positions[i, 1]) * height, height))
        cp = init.icpc if i < cooperators else init.icpd
        agents.append(Agent(id=i, pos=pos, heading=wrap(float(headings[i]), 360.0), cp=float(cp)))
    return agents
