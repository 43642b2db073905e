from fractions import Fraction

import pytest

from windowmdp import instances
from windowmdp.oracle import Claim, random_case, validate_strategy
from windowmdp.probabilistic import almost_sure_fwmp
from windowmdp.strategy import (MealyStrategy, StartNotWinning, compute_N, merge_states,
                                streak_recurrence, synth_almost_sure_buchi,
                                synth_almost_sure_fwmp, synth_sdab, synth_sdpr, synth_sls,
                                synth_sure_fwmp)
from windowmdp.sure import sure_fwmp


def test_sure_witnesses_validate():
    checked = 0
    for index in range(60):
        m, length, lam, _ = random_case(51, index)
        if not sure_fwmp(m, length, lam).region:
            continue
        sigma = synth_sure_fwmp(m, length, lam)
        assert validate_strategy(m, sigma, Claim("sure-fwmp", length, lam)).ok, index
        checked += 1
    assert checked >= 20


def test_almost_sure_witnesses_validate():
    checked = 0
    for index in range(60):
        m, length, lam, _ = random_case(52, index)
        if not almost_sure_fwmp(m, length, lam).region:
            continue
        sigma = synth_almost_sure_fwmp(m, length, lam)
        assert validate_strategy(m, sigma, Claim("as-fwmp", length, lam)).ok, index
        checked += 1
    assert checked >= 20


def test_pos_reach_strategy(fig4):
    t = fig4.ids(["v4"])
    sigma = synth_sdpr(fig4, 3, 0, t, start=fig4.vertex("v1"))
    assert validate_strategy(fig4, sigma, Claim("sure-dirfwmp", 3, Fraction(0))).ok
    within = Claim("pos-reach-within", target=t, steps=15, bound=Fraction(1, 2) ** 15)
    verdict = validate_strategy(fig4, sigma, within)
    assert verdict.ok and verdict.probability > 0


def test_sdab_strategy(fig4):
    t = fig4.ids(["v4"])
    sigma = synth_sdab(fig4, 3, 0, t)
    assert validate_strategy(fig4, sigma, Claim("sure-dirfwmp", 3, Fraction(0))).ok
    assert validate_strategy(fig4, sigma, Claim("as-buchi", target=t)).ok


def test_buchi_strategy_is_memoryless(fig3):
    sigma = synth_almost_sure_buchi(fig3, fig3.ids(["v1"]))
    assert sigma.memory == 1
    assert validate_strategy(fig3, sigma, Claim("as-buchi", target=fig3.ids(["v1"]))).ok


def test_start_outside_region_is_refused(fig1, fig3):
    with pytest.raises(StartNotWinning):
        synth_sure_fwmp(fig1, 2, 2, start=fig1.vertex("v1"))
    with pytest.raises(StartNotWinning):
        synth_sdab(fig3, 2, 0, fig3.ids(["v1"]))


def test_wrong_strategy_is_rejected(fig1):
    v1, v2, v3 = sorted(fig1.vertices)
    # always leave v1: the v1 -> v2 -> v1 loop keeps windows open forever
    bad = MealyStrategy(1, 0, {(0, v1): (0, v2), (0, v2): (0, None), (0, v3): (0, v3)},
                        frozenset({v1}))
    verdict = validate_strategy(fig1, bad, Claim("sure-fwmp", 2, Fraction(1)))
    assert not verdict.ok and verdict.witness


def test_json_round_trip_and_merge(fig5):
    sigma = synth_sure_fwmp(fig5, 2, 0)
    again = MealyStrategy.from_json(fig5, sigma.to_json(fig5))
    assert again.transitions == sigma.transitions and again.starts == sigma.starts
    assert merge_states(sigma).memory <= sigma.memory <= sigma.meta["unmergedStates"]


def test_limit_sure_on_chain():
    m = instances.chain_m_p(2, Fraction(1, 2))
    eps = Fraction(1, 4)
    sigma = synth_sls(m, 2, 0, 1, eps, start=m.vertex("u1"), n=40)
    assert validate_strategy(m, sigma, Claim("sure-fwmp", 2, Fraction(0))).ok
    verdict = validate_strategy(m, sigma, Claim("prob-fwmp", 2, Fraction(1), bound=1 - eps))
    assert verdict.ok


def test_compute_n():
    assert compute_N(3, Fraction(1, 2), Fraction(1, 2)) == 40
    assert compute_N(1, 1, Fraction(1, 2)) == 1
    with pytest.raises(ValueError):
        compute_N(3, Fraction(1, 2), 0)


def test_streak_recurrence_small_cases():
    assert streak_recurrence(1, Fraction(1, 3), 0) == 0
    assert streak_recurrence(1, Fraction(1, 3), 2) == 1 - Fraction(2, 3) ** 2
    assert streak_recurrence(2, Fraction(1, 2), 3) == Fraction(3, 8)
