from fractions import Fraction

from windowmdp.mdp import mec_decomposition
from windowmdp.oracle import (Arena, almost_sure_reach, build_window_product, end_components,
                              mdp_arena, oracle_regions, random_case, reach_probabilities,
                              simulate, solve_co_buchi, solve_safety)
from windowmdp.strategy import synth_sure_fwmp

# a: player, b: chance.  a -> {a, b}, b -> {a, c}, c -> c
TOY = Arena({"a": ["a", "b"], "b": ["a", "c"], "c": ["c"]}, frozenset({"b"}),
            {("b", "a"): Fraction(1, 2), ("b", "c"): Fraction(1, 2)})


def test_small_games():
    assert solve_safety(TOY, {"c"}) == {"a"}
    # chance is adversarial here: b can always bounce back to a
    assert solve_co_buchi(TOY, {"a"}) == {"c"}
    assert solve_co_buchi(TOY, {"c"}) == {"a"}
    assert almost_sure_reach(TOY, {"c"}) == {"a", "b", "c"}


def test_end_components_agree_with_solver_side():
    for i in range(40):
        m = random_case(61, i)[0]
        ours = {frozenset(c) for c in end_components(mdp_arena(m), set(m.vertices))}
        assert ours == set(mec_decomposition(m))


def test_exact_reach_probabilities():
    # gambler's ruin on 0..3 with fair coin
    trans = {0: [(0, Fraction(1))], 3: [(3, Fraction(1))]}
    for k in (1, 2):
        trans[k] = [(k - 1, Fraction(1, 2)), (k + 1, Fraction(1, 2))]
    value = reach_probabilities(trans, {3})
    assert value == {0: 0, 1: Fraction(1, 3), 2: Fraction(2, 3), 3: 1}


def test_product_size_is_bounded(fig1):
    product = build_window_product(fig1, 2, 1)
    # (vertex, c, s, bad) with c < length
    assert len(product.arena.succ) <= len(fig1) * 2 * 2 * (2 * 4 + 1)


def test_oracle_on_naive_example(fig1):
    regions = oracle_regions(fig1, 2, 2, fig1.ids(["v3"]))
    assert fig1.names_of(regions["sure_fwmp"]) == ["v3"]
    assert fig1.names_of(regions["almost_sure_fwmp"]) == ["v1", "v2", "v3"]


def test_simulation_is_seeded(fig1):
    sigma = synth_sure_fwmp(fig1, 2, 1)
    a = simulate(fig1, sigma, fig1.vertex("v1"), 50, 20, 3, [(2, 1), (2, 2)])
    b = simulate(fig1, sigma, fig1.vertex("v1"), 50, 20, 3, [(2, 1), (2, 2)])
    assert a == b
    assert a["windows"][0]["overflows"] == 0
