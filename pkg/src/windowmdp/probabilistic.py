"""Almost-sure regions: fixed and bounded windows, and Büchi."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .mdp import (Mdp, almost_sure_reach, almost_sure_reach_strategy,
                  mec_decomposition, sub_mdp, sure_safe)
from .sure import SureSolveResult, bwmp_window_bound, sure_fwmp


@dataclass
class AsSolveResult:
    region: frozenset
    good_mecs: list = field(default_factory=list)
    strategy_hint: dict = field(default_factory=dict)
    sure: SureSolveResult | None = None


def almost_sure_fwmp(m: Mdp, length: int, lam) -> AsSolveResult:
    """Good end components are the maximal ones meeting the sure region; the
    almost-sure region is everything that reaches them with probability 1."""
    sure = sure_fwmp(m, length, lam)
    good = [mec for mec in mec_decomposition(m) if mec & sure.region]
    union = frozenset().union(*good) if good else frozenset()
    region = almost_sure_reach(m, union)
    hint = almost_sure_reach_strategy(m, union) if union else {}
    return AsSolveResult(region, good, hint, sure)


def almost_sure_bwmp(m: Mdp, lam) -> AsSolveResult:
    return almost_sure_fwmp(m, bwmp_window_bound(m, lam), lam)


def almost_sure_buchi(m: Mdp, target: Iterable[int]) -> frozenset:
    """Classical nested fixpoint: shrink to the vertices that reach the target
    almost surely without leaving the current candidate set."""
    target = frozenset(target)
    region = sure_safe(m, m.vertices)
    while region:
        inner = sub_mdp(m, region)
        reach = almost_sure_reach(inner, target & region)
        if reach == region:
            return region
        region = sure_safe(m, reach)
    return frozenset()


def almost_sure_buchi_strategy(m: Mdp, target: Iterable[int]) -> dict[int, int]:
    """Memoryless witness: the almost-sure reachability moves inside the
    Büchi region (lowest id on ties)."""
    region = almost_sure_buchi(m, target)
    if not region:
        return {}
    inner = sub_mdp(m, region)
    return almost_sure_reach_strategy(inner, frozenset(target) & region)
