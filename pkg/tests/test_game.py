import dataclasses
import math
import numpy as np
import pytest
from coopsim.common import InvalidParameter, UnreachableThreshold
from coopsim.experiments import x_grid
from coopsim.game import (GameClass, GameSpec, Regime, Strategy, classify_game, format_ordering, ordering,
                          payoff_matrix, regime, solve_threshold, thresholds)

KS, DR, IR = Strategy.KinSelection, Strategy.DirectReciprocity, Strategy.IndirectReciprocity


def test_payoff_matrix_examples():
    m = payoff_matrix(GameSpec(KS, 4, 2, 0.75))
    assert (m.R, m.T, m.S, m.P) == (3.5, 2.5, 1.0, 0.0)
    m = payoff_matrix(GameSpec(KS, 4, 2, 0.0))
    assert (m.R, m.T, m.S, m.P) == (2.0, 4.0, -2.0, 0.0)
    m = payoff_matrix(GameSpec(IR, 4, 2, 1.0))
    assert (m.R, m.T, m.S, m.P) == (2.0, 0.0, 0.0, 0.0)
    assert math.copysign(1.0, m.S) == 1.0
    m = payoff_matrix(GameSpec(DR, 4, 2, 0.5))
    assert (m.R, m.T, m.S, m.P) == (4.0, 4.0, -2.0, 0.0)


def test_punishment_is_always_zero():
    rng = np.random.default_rng(11)
    for _ in range(500):
        c = rng.uniform(0.1, 5)
        b = c + rng.uniform(0.01, 5)
        strategy = [KS, DR, IR][rng.integers(3)]
        x = rng.uniform(0, 0.999)
        assert payoff_matrix(GameSpec(strategy, b, c, x)).P == 0.0


def test_invalid_specs_name_the_field():
    with pytest.raises(InvalidParameter) as e:
        GameSpec(DR, 4, 2, 1.0)
    assert e.value.field == 'w'
    with pytest.raises(InvalidParameter) as e:
        GameSpec(IR, 4, 2, 1.2)
    assert e.value.field == 'q'
    with pytest.raises(InvalidParameter) as e:
        GameSpec(KS, 2, 4, 0.5)
    assert e.value.field == 'b'
    with pytest.raises(InvalidParameter) as e:
        GameSpec(KS, 4, 0, 0.5)
    assert e.value.field == 'c'


def test_threshold_examples():
    t = thresholds(KS, 4, 2)
    assert t.ess_x == t.rd_x == t.ad_x == 0.5
    for strategy in (DR, IR):
        t = thresholds(strategy, 4, 2)
        assert t.ess_x == pytest.approx(0.5)
        assert t.rd_x == pytest.approx(2.0 / 3)
        assert t.ad_x == pytest.approx(0.75)


def test_unreachable_threshold():
    with pytest.raises(UnreachableThreshold):
        thresholds(KS, 2, 4)
    with pytest.raises(UnreachableThreshold):
        solve_threshold(DR, Regime.AD, 2, 4)


def _bisect(holds, lo=1e-12, hi=1.0, tolerance=1e-12):
    # smallest x where holds(x) turns true, holds is monotone in x
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def test_thresholds_match_bisection_on_conditions():
    conditions = {
        Regime.ESS: lambda x: 1 / x,
        Regime.RD: lambda x: (2 - x) / x,
        Regime.AD: lambda x: (3 - 2 * x) / x,
    }
    for b, c in [(4, 2), (3, 1), (10, 7), (5.5, 0.5)]:
        for strategy in (DR, IR):
            for condition, f in conditions.items():
                x = _bisect(lambda x: b / c > f(x))
                assert abs(x - solve_threshold(strategy, condition, b, c)) <= 1e-9
        x = _bisect(lambda x: b / c > 1 / x)
        for condition in conditions:
            assert abs(x - solve_threshold(KS, condition, b, c)) <= 1e-9


def test_thresholds_match_payoff_inequalities():
    # the ESS threshold is where R overtakes T
    for strategy in (KS, DR, IR):
        x = _bisect(lambda x: (lambda m: m.R > m.T)(payoff_matrix(GameSpec(strategy, 4, 2, min(x, 0.999)))))
        assert abs(x - thresholds(strategy, 4, 2).ess_x) <= 1e-9


def test_thresholds_nest():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        c = rng.uniform(0.01, 10)
        b = c + rng.uniform(1e-3, 10)
        for strategy in (KS, DR, IR):
            t = thresholds(strategy, b, c)
            assert t.ess_x <= t.rd_x <= t.ad_x <= 1


def test_thresholds_are_scale_invariant():
    for k in (0.5, 3.0, 100.0):
        for strategy in (KS, DR, IR):
            t, scaled = thresholds(strategy, 4, 2), thresholds(strategy, 4 * k, 2 * k)
            assert scaled.ess_x == pytest.approx(t.ess_x)
            assert scaled.rd_x == pytest.approx(t.rd_x)
            assert scaled.ad_x == pytest.approx(t.ad_x)


def test_kin_selection_flips_at_c_over_b():
    for b, c in [(4, 2), (5, 1), (3, 2.5)]:
        r = c / b
        assert classify_game(GameSpec(KS, b, c, r - 0.01)) is GameClass.PrisonersDilemma
        assert classify_game(GameSpec(KS, b, c, min(r + 0.01, 0.999))) is GameClass.UnidentifiedCooperatorsWin


def _brute_force_class(matrix):
    values = dict(matrix.items())
    R, S, T, P = values['R'], values['S'], values['T'], values['P']
    if T > R > P > S:
        return GameClass.PrisonersDilemma
    if R > T > P > S:
        return GameClass.StagHunt
    if R > T > S > P:
        return GameClass.UnidentifiedCooperatorsWin
    if R > T == S > P:
        return GameClass.UnidentifiedTieTS
    if R > T == P == S:
        return GameClass.UnidentifiedOnlyMutual
    return GameClass.Boundary


def test_dense_scan_of_game_transitions():
    for strategy in (KS, DR, IR):
        hi = 0.99 if strategy is DR else 1.0
        for x in x_grid(0.01, hi, 0.01):
            spec = GameSpec(strategy, 4, 2, x)
            found = classify_game(spec)
            if x < 0.5:
                expected = GameClass.PrisonersDilemma
            elif x == 0.5:
                expected = GameClass.Boundary
            elif strategy is KS:
                expected = GameClass.UnidentifiedTieTS if x == 1.0 else GameClass.UnidentifiedCooperatorsWin
            elif strategy is IR and x == 1.0:
                expected = GameClass.UnidentifiedOnlyMutual
            else:
                expected = GameClass.StagHunt
            assert found is expected, (strategy, x)
            if expected is not GameClass.Boundary:
                assert _brute_force_class(payoff_matrix(spec)) is expected, (strategy, x)


def test_classify_examples():
    assert classify_game(GameSpec(KS, 4, 2, 0.25)) is GameClass.PrisonersDilemma
    assert classify_game(GameSpec(DR, 4, 2, 0.9)) is GameClass.StagHunt
    assert classify_game(GameSpec(KS, 4, 2, 1.0)) is GameClass.UnidentifiedTieTS
    assert classify_game(GameSpec(IR, 4, 2, 1.0)) is GameClass.UnidentifiedOnlyMutual
    assert classify_game(GameSpec(DR, 4, 2, 0.5)) is GameClass.Boundary


def test_ordering_text():
    assert format_ordering(ordering(payoff_matrix(GameSpec(KS, 4, 2, 0.25)))) == 'T > R > P > S'
    assert format_ordering(ordering(payoff_matrix(GameSpec(DR, 4, 2, 0.5)))) == 'R = T > P > S'


def test_regime_examples():
    assert regime(GameSpec(DR, 4, 2, 0.7)) is Regime.RD
    assert regime(GameSpec(KS, 4, 2, 0.4)) is Regime.NONE
    assert regime(GameSpec(IR, 4, 2, 0.8)) is Regime.AD
    assert regime(GameSpec(DR, 4, 2, 0.6)) is Regime.ESS
    assert regime(GameSpec(KS, 4, 2, 0.9)) is Regime.AD


def test_strategy_parse():
    assert Strategy.parse('ks') is KS
    assert Strategy.parse(' DirectReciprocity ') is DR
    with pytest.raises(InvalidParameter):
        Strategy.parse('TFT')


def test_payoff_table_matches_lookup():
    for strategy in (KS, DR, IR):
        matrix = payoff_matrix(GameSpec(strategy, 4, 2, 0.3))
        table = matrix.table()
        for own in (True, False):
            for other in (True, False):
                assert table[0 if own else 1, 0 if other else 1] == matrix.payoff(own, other)


def test_new_x_goes_through_validation():
    assert not hasattr(GameSpec, 'with_x')
    spec = GameSpec(DR, 4, 2, 0.5)
    assert dataclasses.replace(spec, x=0.7) == GameSpec(DR, 4, 2, 0.7)
    with pytest.raises(InvalidParameter):
        dataclasses.replace(spec, x=1.0)
