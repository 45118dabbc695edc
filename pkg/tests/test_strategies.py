import numpy as np
import pytest
from scipy import stats
from coopsim.agents import Agent
from coopsim.game import GameSpec, Strategy, payoff_matrix
from coopsim.strategies import (apply_consequences, decide_pair, direct_reciprocity_rule, draws_per_agent,
                                indirect_reciprocity_rule, kin_selection_rule, play_direct_reciprocity,
                                play_indirect_reciprocity, play_kin_selection)

KS, DR, IR = Strategy.KinSelection, Strategy.DirectReciprocity, Strategy.IndirectReciprocity
TRIALS = 100000


def agent(id, cp, pos=(0.0, 0.0)):
    return Agent(id=id, pos=pos, heading=0.0, cp=cp)


def test_kin_selection_examples():
    rng = np.random.default_rng(0)
    assert all(play_kin_selection(agent(0, 1.0), rng) for _ in range(1000))
    assert kin_selection_rule(0.0, 0.3) is False


def test_kin_selection_frequency():
    rng = np.random.default_rng(1)
    a = agent(0, 0.65)
    frequency = sum(play_kin_selection(a, rng) for _ in range(TRIALS)) / TRIALS
    assert abs(frequency - 0.65) <= 0.01


def test_direct_reciprocity_examples():
    rng = np.random.default_rng(2)
    a = agent(0, 1.0)
    a.memory[1] = True
    a.memory[2] = False
    assert play_direct_reciprocity(a, 1, rng) is True
    assert play_direct_reciprocity(a, 2, rng) is False
    assert play_direct_reciprocity(a, 3, rng) is True
    b = agent(5, 0.0)
    b.memory[1] = True
    assert not any(play_direct_reciprocity(b, 1, rng) for _ in range(1000))


def test_indirect_reciprocity_examples():
    rng = np.random.default_rng(3)
    assert all(play_indirect_reciprocity(agent(0, 0.99), agent(1, 0.9), 1.0, rng) for _ in range(1000))
    assert not any(play_indirect_reciprocity(agent(0, 0.99), agent(1, 0.1), 1.0, rng) for _ in range(1000))


def test_indirect_reciprocity_defector_uses_its_cp():
    rng = np.random.default_rng(4)
    i, j = agent(0, 0.45), agent(1, 0.9)
    frequency = sum(play_indirect_reciprocity(i, j, 0.7, rng) for _ in range(TRIALS)) / TRIALS
    assert abs(frequency - 0.45) <= 0.01


def test_indirect_reciprocity_without_recognition_is_kin_selection_play():
    for cp in (0.51, 0.7, 0.99):
        for partner_cp in (0.1, 0.9):
            for decision in np.linspace(0, 0.999, 37):
                for recognition in np.linspace(0, 0.999, 11):
                    assert indirect_reciprocity_rule(cp, partner_cp, 0.0, decision, recognition) == \
                        kin_selection_rule(cp, decision)


def test_indirect_reciprocity_without_recognition_is_bernoulli():
    rng = np.random.default_rng(5)
    i, j = agent(0, 0.7), agent(1, 0.1)
    cooperations = sum(play_indirect_reciprocity(i, j, 0.0, rng) for _ in range(TRIALS))
    result = stats.chisquare([cooperations, TRIALS - cooperations], [TRIALS * 0.7, TRIALS * 0.3])
    assert result.pvalue > 0.01


def test_draw_counts():
    assert draws_per_agent(KS) == draws_per_agent(DR) == 1
    assert draws_per_agent(IR) == 2
    rng = np.random.default_rng(6)
    decision = decide_pair(GameSpec(IR, 4, 2, 0.5), agent(0, 0.9), agent(1, 0.2), rng)
    assert [len(draws) for draws in decision.draws_used] == [2, 2]
    decision = decide_pair(GameSpec(KS, 4, 2, 0.5), agent(0, 0.9), agent(1, 0.2), rng)
    assert [len(draws) for draws in decision.draws_used] == [1, 1]


def test_smaller_id_draws_first():
    spec = GameSpec(IR, 4, 2, 0.5)
    decision = decide_pair(spec, agent(7, 0.9), agent(2, 0.2), np.random.default_rng(8))
    draws = np.random.default_rng(8).random(4).tolist()
    assert decision.draws_used[1] == tuple(draws[:2])
    assert decision.draws_used[0] == tuple(draws[2:])


def test_decisions_are_simultaneous():
    spec = GameSpec(DR, 4, 2, 0.5)
    i, j = agent(0, 1.0), agent(1, 1.0)
    i.memory[1] = False
    decision = decide_pair(spec, i, j, np.random.default_rng(0))
    assert (decision.action_i, decision.action_j) == (False, True)
    assert i.fitness == j.fitness == 0


def test_apply_consequences_examples():
    i, j = agent(0, 0.9), agent(1, 0.9)
    apply_consequences(GameSpec(KS, 4, 2, 0.75), True, True, i, j)
    assert (i.fitness, j.fitness) == (3.5, 3.5)
    assert (i.last_profit, j.last_profit) == (3.5, 3.5)

    i, j = agent(0, 0.9), agent(1, 0.1)
    apply_consequences(GameSpec(DR, 4, 2, 0.5), True, False, i, j)
    assert (i.fitness, j.fitness) == (-2.0, 4.0)
    assert i.memory == {1: False} and j.memory == {0: True}

    for strategy in (KS, DR, IR):
        i, j = agent(0, 0.2), agent(1, 0.2)
        apply_consequences(GameSpec(strategy, 4, 2, 0.3), False, False, i, j)
        assert (i.fitness, j.fitness) == (0.0, 0.0)


def test_memory_only_kept_under_direct_reciprocity():
    i, j = agent(0, 0.9), agent(1, 0.1)
    apply_consequences(GameSpec(IR, 4, 2, 0.5), True, False, i, j)
    assert i.memory == {} and j.memory == {}


def test_consequences_match_payoff_matrix():
    rng = np.random.default_rng(10)
    for _ in range(500):
        strategy = [KS, DR, IR][rng.integers(3)]
        c = rng.uniform(0.1, 3)
        spec = GameSpec(strategy, c + rng.uniform(0.01, 3), c, rng.uniform(0, 0.99))
        action_i, action_j = bool(rng.integers(2)), bool(rng.integers(2))
        i, j = agent(0, 0.5), agent(1, 0.5)
        i.fitness = j.fitness = 1.25
        apply_consequences(spec, action_i, action_j, i, j)
        matrix = payoff_matrix(spec)
        assert i.fitness - 1.25 == pytest.approx(matrix.payoff(action_i, action_j))
        assert j.fitness - 1.25 == pytest.approx(matrix.payoff(action_j, action_i))
        assert i.last_profit == matrix.payoff(action_i, action_j)


def test_direct_reciprocity_rule_gate():
    assert direct_reciprocity_rule(0.5, True, 0.6) is False
    assert direct_reciprocity_rule(0.5, True, 0.4) is True
