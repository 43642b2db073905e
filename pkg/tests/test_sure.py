from fractions import Fraction

import pytest

from windowmdp.mdp import satisfies_subset_conditions
from windowmdp.oracle import random_case
from windowmdp.sure import (bwmp_window_bound, horizon_values, sure_bwmp, sure_dir_bwmp,
                            sure_dir_fwmp, sure_fwmp, sure_good_win)
from windowmdp.windows import MonitorState, scale_payoffs

CASES = [random_case(11, i) for i in range(60)]


def test_horizon_values_on_naive_example(fig1):
    sc = scale_payoffs(fig1, 1)
    h = horizon_values(fig1, frozenset(fig1.vertices), sc, 2)
    v1, v2, v3 = sorted(fig1.vertices)
    assert h[0][v1] is None
    # one step: v1 can take its self-loop (scaled payoff 0)
    assert h[1][v1] == 0
    # from v2 chance picks the worse of -2 and +1
    assert h[1][v2] == -2
    assert h[2][v3] == 2


def test_good_window_region(fig1):
    assert fig1.names_of(sure_good_win(fig1, 1, 1).region) == ["v1", "v3"]


def test_layers_of_sure_fwmp(fig1):
    res = sure_fwmp(fig1, 2, 2)
    assert fig1.names_of(res.region) == ["v3"]
    assert res.layers == [(res.region, frozenset())]
    wide = sure_fwmp(fig1, 2, 1)
    covered = frozenset().union(*(d | a for d, a in wide.layers))
    assert covered == wide.region and all(not d & a for d, a in wide.layers)


@pytest.mark.parametrize("m,length,lam,_", CASES[:30])
def test_regions_are_traps_and_nested(m, length, lam, _):
    d = sure_dir_fwmp(m, length, lam).region
    f = sure_fwmp(m, length, lam).region
    assert d <= f
    for region in (d, f):
        if region:
            assert satisfies_subset_conditions(m, region)
    assert f <= sure_fwmp(m, length + 1, lam).region
    assert f <= sure_fwmp(m, length, lam - 1).region


def test_bounded_window_saturates():
    m = random_case(5, 3)[0]
    bound = bwmp_window_bound(m, 0)
    assert sure_bwmp(m, 0).region == sure_fwmp(m, bound, 0).region
    assert sure_dir_bwmp(m, 0).region == sure_dir_fwmp(m, bound, 0).region
    assert bound == len(m) * (len(m) * scale_payoffs(m, 0).w_max + 1)


def test_monitor_state_is_a_tuple():
    assert MonitorState(1, -2) == (1, -2, False)
    assert sure_fwmp(CASES[0][0], 1, Fraction(10)).region == frozenset()
