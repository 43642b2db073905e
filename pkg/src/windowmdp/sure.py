"""Sure winning regions (probabilistic vertices played adversarially).

The good-window game is solved by a finite-horizon backward induction.  For a
vertex ``v`` and a horizon ``k`` let ``h[k][v]`` be the largest value of
``max(S_1, ..., S_k)`` Player 1 can guarantee, where ``S_j`` is the scaled
payoff sum of the first ``j`` steps.  Since
``max(S_1..S_k) = w(e) + max(0, max(S'_1..S'_{k-1}))`` for the first edge
``e``, the values satisfy

    h[1][v] = opt_e w(e)
    h[k][v] = opt_e ( w(e) + max(0, h[k-1][u]) )

with ``opt`` a maximum at Player 1 vertices and a minimum at probabilistic
ones.  A window opened at ``v`` with ``k`` steps left and current sum ``s``
can be closed exactly when ``s + h[k][v] >= 0``; this invariant is also what
the window strategies below maintain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .mdp import (Mdp, sub_mdp_closure, sure_attractor, sure_attractor_strategy,
                  sure_safe)
from .windows import MonitorState, ScaledPayoffs, monitor_step, scale_payoffs

NEG_INF = None  # sentinel for "no step left"


def horizon_values(m: Mdp, region: frozenset, scaled: ScaledPayoffs, length: int) -> list[dict]:
    """``h[k][v]`` for ``k = 0..length`` and ``v`` in ``region``, using only
    edges that stay inside ``region``.  ``h[0]`` is all ``None``."""
    h = [{v: NEG_INF for v in region}]
    for _ in range(length):
        prev = h[-1]
        cur = {}
        for v in region:
            vals = [scaled[e.id] + max(0, prev[e.dst] if prev[e.dst] is not None else 0)
                    for e in m.out_edges(v) if e.dst in region]
            if not vals:
                cur[v] = NEG_INF
            elif m.is_player(v):
                cur[v] = max(vals)
            elif len(vals) < len(m.out_edges(v)):
                cur[v] = NEG_INF  # chance can leave the region
            else:
                cur[v] = min(vals)
        h.append(cur)
    return h


@dataclass
class SureSolveResult:
    region: frozenset
    length: int
    threshold: Fraction
    witness: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    layers: list = field(default_factory=list)


def _good_window(m, region, scaled, length):
    h = horizon_values(m, region, scaled, length)
    good = frozenset(v for v in region if h[length][v] is not None and h[length][v] >= 0)
    witness = {}
    for v in good:
        witness[v] = next(k for k in range(1, length + 1)
                          if h[k][v] is not None and h[k][v] >= 0)
    return good, witness


def sure_good_win(m: Mdp, length: int, lam) -> SureSolveResult:
    """Vertices from which Player 1 surely closes the window opened now within
    ``length`` steps.  ``witness[v]`` is the least horizon that suffices."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    scaled = scale_payoffs(m, lam)
    good, witness = _good_window(m, frozenset(m.vertices), scaled, length)
    return SureSolveResult(good, length, Fraction(lam), witness, [good])


def sure_dir_fwmp(m: Mdp, length: int, lam) -> SureSolveResult:
    """Greatest set whose vertices can close every window within ``length``
    steps while staying in the set."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    scaled = scale_payoffs(m, lam)
    region = sure_safe(m, m.vertices)
    trace = [region]
    while True:
        good, witness = _good_window(m, region, scaled, length)
        if good == region:
            break
        region = sure_safe(m, good)
        trace.append(region)
    return SureSolveResult(region, length, Fraction(lam), witness, trace)


def sure_fwmp(m: Mdp, length: int, lam) -> SureSolveResult:
    """Sure region of the prefix-independent fixed-window objective.

    Each round solves the direct objective on the residual game (chance kept
    inside the residual, which can only hurt Player 1) and adds the attractor
    of what was found.  ``layers`` records ``(D_i, A_i)``: the direct region of
    round ``i`` and the attractor vertices added with it.
    """
    if length < 1:
        raise ValueError("window length must be >= 1")
    won = frozenset()
    layers = []
    trace = []
    witness = {}
    while len(won) < len(m.vertices):
        rest = frozenset(m.vertices) - won
        residual = sub_mdp_closure(m, rest)
        direct = sure_dir_fwmp(residual, length, lam)
        if not direct.region:
            break
        grown = sure_attractor(m, won | direct.region)
        layers.append((direct.region, grown - won - direct.region))
        witness.update(direct.witness)
        won = grown
        trace.append(won)
    return SureSolveResult(won, length, Fraction(lam), witness, trace, layers)


def bwmp_window_bound(m: Mdp, lam=0) -> int:
    """``|V| * (|V| * w + 1)`` with ``w`` the largest scaled |payoff|."""
    n = len(m.vertices)
    w = scale_payoffs(m, lam).w_max
    return n * (n * w + 1)


def sure_dir_bwmp(m: Mdp, lam) -> SureSolveResult:
    return sure_dir_fwmp(m, bwmp_window_bound(m, lam), lam)


def sure_bwmp(m: Mdp, lam) -> SureSolveResult:
    return sure_fwmp(m, bwmp_window_bound(m, lam), lam)


# witnesses ----------------------------------------------------------------------

class DirFwmpPlan:
    """Window-closing strategy on a set ``region`` that is closed in ``m``.

    With the monitor at ``(c, s)`` the plan moves along an edge maximising
    ``w(e) + max(0, h[l-c-1][u])``; that keeps ``s + h[l-c][v] >= 0``, so the
    open window is closed before the deadline.
    """

    def __init__(self, m: Mdp, region: Iterable[int], length: int, lam):
        self.m = m
        self.region = frozenset(region)
        self.length = length
        self.scaled = scale_payoffs(m, lam)
        self.h = horizon_values(m, self.region, self.scaled, length)

    def choose(self, v: int, st: MonitorState) -> int:
        left = self.length - st.c
        best = None
        for e in self.m.out_edges(v):
            if e.dst not in self.region:
                continue
            tail = self.h[left - 1][e.dst]
            val = self.scaled[e.id] + max(0, tail if tail is not None else 0)
            key = (-val, e.dst)
            if best is None or key < best[0]:
                best = (key, e.dst)
        if best is None:
            raise ValueError(f"vertex {self.m.name(v)} has no move inside the plan region")
        return best[1]

    def step(self, st: MonitorState, v: int, u: int) -> MonitorState:
        return monitor_step(st, self.scaled[self.m.edge_between(v, u).id], self.length)


class SureFwmpWitness:
    """Zone data for a sure fixed-window strategy built from the layers of
    :func:`sure_fwmp`: window plans on the direct parts and attractor moves on
    the rest."""

    def __init__(self, m: Mdp, length: int, lam, result: SureSolveResult | None = None):
        self.m = m
        self.result = result or sure_fwmp(m, length, lam)
        self.zone = {}
        self.plans = []
        self.attract = {}
        won = frozenset()
        for i, (direct, attr) in enumerate(self.result.layers):
            residual = sub_mdp_closure(m, frozenset(m.vertices) - won)
            self.plans.append(DirFwmpPlan(residual, direct, length, lam))
            for v in direct:
                self.zone[v] = ("D", i)
            moves = sure_attractor_strategy(m, won | direct)
            for v in attr:
                self.zone[v] = ("A", i)
                if m.is_player(v):
                    self.attract[v] = moves[v]
            won = won | direct | attr

    @property
    def region(self) -> frozenset:
        return self.result.region
