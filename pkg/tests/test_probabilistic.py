import pytest

from windowmdp.mdp import sub_mdp
from windowmdp.oracle import oracle_almost_sure_buchi, random_case
from windowmdp.probabilistic import (almost_sure_buchi, almost_sure_buchi_strategy,
                                     almost_sure_bwmp, almost_sure_fwmp)
from windowmdp.sure import bwmp_window_bound, sure_fwmp


def test_naive_example(fig1):
    res = almost_sure_fwmp(fig1, 2, 2)
    assert fig1.names_of(res.region) == ["v1", "v2", "v3"]
    assert [fig1.names_of(c) for c in res.good_mecs] == [["v3"]]


def test_bounded_variant_matches_fixed_length_at_the_bound(fig6):
    assert almost_sure_bwmp(fig6, 5).region == almost_sure_fwmp(
        fig6, bwmp_window_bound(fig6, 5), 5).region


@pytest.mark.parametrize("seed", range(40))
def test_sure_is_contained_in_almost_sure(seed):
    m, length, lam, target = random_case(21, seed)
    assert sure_fwmp(m, length, lam).region <= almost_sure_fwmp(m, length, lam).region
    assert almost_sure_buchi(m, target) == oracle_almost_sure_buchi(m, target)


def test_buchi_strategy_stays_in_region(fig3):
    t = fig3.ids(["v1"])
    region = almost_sure_buchi(fig3, t)
    choice = almost_sure_buchi_strategy(fig3, t)
    for v, u in choice.items():
        assert v in region and u in region and fig3.has_edge(v, u)
    # the region is a trap for the strategy, so the subMDP exists
    assert len(sub_mdp(fig3, region)) == len(region)
