from fractions import Fraction

import pytest

from windowmdp import instances
from windowmdp.combined import (build_gadget, combined_window_bound, is_good_edge, sas_bwmp,
                                sas_fwmp, sls_bwmp, sls_fwmp, sure_dirfwmp_as_buchi,
                                sure_dirfwmp_pos_reach)
from windowmdp.mdp import MdpError, validate
from windowmdp.oracle import random_case
from windowmdp.probabilistic import almost_sure_bwmp, almost_sure_buchi, almost_sure_fwmp
from windowmdp.sure import sure_bwmp, sure_dir_fwmp, sure_fwmp


def _run(m, op, params):
    p = dict(params)
    for key in ("threshold", "alpha", "beta"):
        if key in p:
            p[key] = Fraction(p[key])
    if "target" in p:
        p["target"] = m.ids(p["target"])
    region = {
        "sure_dir_fwmp": lambda: sure_dir_fwmp(m, p["length"], p["threshold"]).region,
        "sure_fwmp": lambda: sure_fwmp(m, p["length"], p["threshold"]).region,
        "almost_sure_fwmp": lambda: almost_sure_fwmp(m, p["length"], p["threshold"]).region,
        "sure_bwmp": lambda: sure_bwmp(m, p["threshold"]).region,
        "almost_sure_bwmp": lambda: almost_sure_bwmp(m, p["threshold"]).region,
        "almost_sure_buchi": lambda: almost_sure_buchi(m, p["target"]),
        "sure_dirfwmp_pos_reach": lambda: sure_dirfwmp_pos_reach(
            m, p["length"], p["alpha"], p["target"]).region,
        "sure_dirfwmp_as_buchi": lambda: sure_dirfwmp_as_buchi(
            m, p["length"], p["alpha"], p["target"]).region,
        "sas_fwmp": lambda: sas_fwmp(m, p["length"], p["alpha"], p["beta"])[0],
        "sls_fwmp": lambda: sls_fwmp(m, p["length"], p["alpha"], p["beta"]),
        "sas_bwmp": lambda: sas_bwmp(m, p["alpha"], p["beta"])[0],
        "sls_bwmp": lambda: sls_bwmp(m, p["alpha"], p["beta"]),
    }[op]()
    return sorted(m.names_of(region))


SIDE_CHECKS = [(name, i, check) for name in instances.NAMES
               for i, check in enumerate(instances.expected(name)["checks"])]


@pytest.mark.parametrize("name,index,check", SIDE_CHECKS,
                         ids=[f"{n}-{c['op']}-{i}" for n, i, c in SIDE_CHECKS])
def test_sidecar_expectations(name, index, check):
    m = instances.load(name)
    assert _run(m, check["op"], check["params"]) == sorted(check["region"])


def test_gadget_shape(fig4):
    t = fig4.ids(["v4"])
    e = fig4.edge_between(fig4.vertex("v2"), fig4.vertex("v4"))
    g = build_gadget(fig4, e, [], t, t)
    assert validate(g.mdp) == []
    assert g.mdp.name(g.hat) == "^v2"
    assert g.copies == {}
    assert g.project(g.hat) == e.src
    assert is_good_edge(fig4, e, [], t, t, 3, 0)
    with pytest.raises(MdpError):
        build_gadget(fig4, e, [e], t, t)


def test_pos_reach_order_independent_on_random_instances():
    for i in range(25):
        m, length, _, target = random_case(31, i)
        base = sure_dirfwmp_pos_reach(m, length, 0, target).region
        flipped = sure_dirfwmp_pos_reach(m, length, 0, target, lambda e: -e.id).region
        assert base == flipped


@pytest.mark.parametrize("seed", range(30))
def test_sas_between_sure_and_sls(seed):
    m, length, _, _ = random_case(41, seed)
    sas, trace = sas_fwmp(m, length, 0, 1)
    sls = sls_fwmp(m, length, 0, 1)
    sure_both = sure_fwmp(m, length, 1).region
    assert sure_both <= sas <= sls <= sure_fwmp(m, length, 0).region
    assert trace.check_partition() == []


def test_degenerate_thresholds(fig1):
    region, trace = sas_fwmp(fig1, 2, 2, 1)
    assert trace.degenerate and region == sure_fwmp(fig1, 2, 2).region
    assert sls_fwmp(fig1, 2, 2, 1) == region


def test_combined_window_bound(fig6):
    assert combined_window_bound(fig6, 0, 5) == 244
    assert "v1" in fig6.names_of(sls_bwmp(fig6, 0, 5))


def test_sidecar_good_edge_trace(fig4):
    want = [tuple(row) for row in instances.expected("fig4_posreach")["goodEdgeTrace"]["verdicts"]]
    pr = sure_dirfwmp_pos_reach(fig4, 3, 0, fig4.ids(["v4"]))
    got = [(fig4.name(fig4.edge(e).src), fig4.name(fig4.edge(e).dst), ok) for e, ok in pr.verdicts]
    assert got == want


def test_sidecar_provenance_tags():
    assert {c["provenance"] for _, _, c in SIDE_CHECKS} == {"stated", "derived"}
