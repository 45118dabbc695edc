__doc__ = """
How a matched pair decides to cooperate or defect, and what the game pays.

Each agent draws `decision` uniform on [0, 1); under indirect reciprocity it then
draws `recognition` as well, whether or not its branch reads it. Within a pair the
agent with the smaller id draws first. Both actions are fixed before either agent's
state changes.
"""

from dataclasses import dataclass
from typing import Tuple
from numba import jit
from .agents import Agent, is_cooperator
from .game import Strategy, payoff_matrix


# strategy codes understood by the compiled game loop
KIN, DIRECT, INDIRECT = 0, 1, 2
STRATEGY_CODES = {Strategy.KinSelection: KIN, Strategy.DirectReciprocity: DIRECT,
                  Strategy.IndirectReciprocity: INDIRECT}


@dataclass(frozen=True)
class PairDecision:
    action_i: bool
    action_j: bool
    # (decision,) or (decision, recognition) for agent i then agent j
    draws_used: Tuple[Tuple[float, ...], Tuple[float, ...]]


@jit(nopython=True, cache=True)
def kin_selection_rule(cp, decision):
    return decision <= cp


@jit(nopython=True, cache=True)
def direct_reciprocity_rule(cp, remembered, decision):
    """Mirror the partner's last action when the cp gate passes, otherwise defect

    >>> direct_reciprocity_rule(1.0, False, 0.3), direct_reciprocity_rule(1.0, True, 0.3)
    (False, True)
    """
    if decision <= cp:
        return remembered
    return False


@jit(nopython=True, cache=True)
def indirect_reciprocity_rule(cp, partner_cp, q, decision, recognition):
    """Cooperators who recognize the partner act on the partner's role,
    otherwise play falls back to the cp gate; defectors always use the cp gate

    >>> indirect_reciprocity_rule(0.99, 0.9, 1.0, 0.995, 0.2)
    True
    >>> indirect_reciprocity_rule(0.99, 0.1, 1.0, 0.0, 0.2)
    False
    """
    if is_cooperator(cp):
        if recognition <= 1 - q:
            return decision <= cp
        return is_cooperator(partner_cp)
    return decision <= cp


@jit(nopython=True, cache=True)
def decide(strategy, q, cp, partner_cp, remembered, decision, recognition):
    """Action of one agent given its own draws, strategy being one of KIN, DIRECT, INDIRECT
    """
    if strategy == KIN:
        return kin_selection_rule(cp, decision)
    if strategy == DIRECT:
        return direct_reciprocity_rule(cp, remembered, decision)
    return indirect_reciprocity_rule(cp, partner_cp, q, decision, recognition)


def play_kin_selection(agent, rng):
    """
    >>> import numpy as np
    >>> play_kin_selection(Agent(0, (0.0, 0.0), 0.0, cp=1.0), np.random.default_rng(3))
    True
    """
    return kin_selection_rule(agent.cp, rng.random())


def play_direct_reciprocity(agent_i, partner_id, rng):
    return direct_reciprocity_rule(agent_i.cp, bool(agent_i.remembers(partner_id)), rng.random())


def play_indirect_reciprocity(agent_i, agent_j, q, rng):
    decision = rng.random()
    recognition = rng.random()
    return indirect_reciprocity_rule(agent_i.cp, agent_j.cp, q, decision, recognition)


def _decide(spec, agent, partner, draws):
    return decide(STRATEGY_CODES[spec.strategy], float(spec.x), float(agent.cp), float(partner.cp),
                  bool(agent.remembers(partner.id)), draws[0], draws[-1])


def draws_per_agent(strategy):
    return 2 if strategy is Strategy.IndirectReciprocity else 1


def decide_pair(spec, agent_i, agent_j, rng):
    """Simultaneous decisions of a matched pair, drawn in canonical order

    The returned actions follow the argument order even when agent_j has the smaller id.
    """
    count = draws_per_agent(spec.strategy)
    first, second = (agent_i, agent_j) if agent_i.id <= agent_j.id else (agent_j, agent_i)
    first_draws = tuple(float(rng.random()) for _ in range(count))
    second_draws = tuple(float(rng.random()) for _ in range(count))
    draws = {first.id: first_draws, second.id: second_draws}
    action_i = _decide(spec, agent_i, agent_j, draws[agent_i.id])
    action_j = _decide(spec, agent_j, agent_i, draws[agent_j.id])
    return PairDecision(action_i, action_j, (draws[agent_i.id], draws[agent_j.id]))


def apply_consequences(spec, action_i, action_j, agent_i, agent_j, matrix=None):
    """Pay both agents from the game's payoff matrix and update their records

    matrix:
        the precomputed payoff_matrix(spec), recomputed when omitted

    >>> from coopsim.game import GameSpec
    >>> spec = GameSpec(Strategy.DirectReciprocity, 4, 2, 0.5)
    >>> i, j = Agent(0, (0.0, 0.0), 0.0, 0.9), Agent(1, (0.5, 0.0), 0.0, 0.1)
    >>> _ = apply_consequences(spec, True, False, i, j)
    >>> i.fitness, j.fitness, i.memory, j.memory
    (-2.0, 4.0, {1: False}, {0: True})
    """
    if matrix is None:
        matrix = payoff_matrix(spec)
    payoff_i = matrix.payoff(action_i, action_j)
    payoff_j = matrix.payoff(action_j, action_i)
    agent_i.fitness += payoff_i
    agent_j.fitness += payoff_j
    agent_i.last_profit = payoff_i
    agent_j.last_profit = payoff_j
    if spec.strategy is Strategy.DirectReciprocity:
        agent_i.memory[agent_j.id] = bool(action_j)
        agent_j.memory[agent_i.id] = bool(action_i)
    return agent_i, agent_j
