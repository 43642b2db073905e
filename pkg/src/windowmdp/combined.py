"""Sure-almost-sure and sure-limit-sure solvers.

The entry points are :func:`sas_fwmp` / :func:`sls_fwmp` and their bounded
window variants.  They are assembled from two building blocks:

* :func:`sure_dirfwmp_pos_reach`, which grows a set ``R`` of vertices from
  which the direct window objective can be kept surely while the target is
  reached with positive probability, one "good" edge at a time; and
* :func:`sure_dirfwmp_as_buchi`, which shrinks the vertex set until every
  vertex is in ``R``, so that reaching the target is repeated almost surely.

Whether an edge is good is decided on a gadget MDP that appends a copy of
``R`` (minus the target) in which Player 1 may only use good edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .mdp import (Edge, Mdp, MdpError, pos_cpre, sub_mdp,
                  sub_mdp_closure, sure_attractor, sure_safe)
from .probabilistic import almost_sure_fwmp
from .sure import bwmp_window_bound, sure_dir_fwmp, sure_fwmp


# gadget --------------------------------------------------------------------------

@dataclass
class GadgetMdp:
    """The gadget for one candidate edge.

    ``copy_of`` maps each fresh copy vertex to the vertex it copies and
    ``hat`` is the fresh entry vertex; :meth:`project` forgets the decoration.
    Target vertices are not copied: their copies are the vertices themselves.
    """

    mdp: Mdp
    hat: int
    edge: Edge
    copy_of: dict
    copies: dict
    targets: frozenset

    def project(self, g: int) -> int:
        if g == self.hat:
            return self.edge.src
        return self.copy_of.get(g, g)

    def layer(self, g: int) -> str:
        if g == self.hat:
            return "hat"
        return "copy" if g in self.copy_of else "orig"

    def copy(self, v: int) -> int:
        return v if v in self.targets else self.copies[v]

    def step_to(self, g: int, u: int) -> int:
        """The successor of ``g`` in the gadget that projects to ``u``."""
        for e in self.mdp.out_edges(g):
            if self.project(e.dst) == u:
                return e.dst
        raise KeyError((g, u))


def build_gadget(m: Mdp, e: Edge, good: Iterable[Edge], reach: Iterable[int],
                 target: Iterable[int]) -> GadgetMdp:
    good = list(good)
    reach = frozenset(reach)
    target = frozenset(target)
    good_ids = {g.id for g in good}
    if e.src in target:
        raise MdpError("candidate edge must start outside the target")
    if e.dst not in reach:
        raise MdpError("candidate edge must end inside R")
    if e.id in good_ids:
        raise MdpError("candidate edge is already good")

    next_vertex = max(m.vertices) + 1
    next_edge = max(x.id for x in m.edges) + 1
    owners = {v: m.owner(v) for v in m.vertices}
    names = {v: m.name(v) for v in m.vertices}
    edges = list(m.edges)

    copies = {}
    for v in sorted(reach - target):
        copies[v] = next_vertex
        owners[next_vertex] = m.owner(v)
        names[next_vertex] = "~" + m.name(v)
        next_vertex += 1
    hat = next_vertex
    owners[hat] = m.owner(e.src)
    names[hat] = "^" + m.name(e.src)

    def tilde(v):
        return v if v in target else copies[v]

    def add(src, dst, like):
        nonlocal next_edge
        edges.append(Edge(next_edge, src, dst, like.payoff, like.prob))
        next_edge += 1

    for u, cu in copies.items():
        for x in m.out_edges(u):
            if x.id in good_ids:
                add(cu, tilde(x.dst), x)
            elif m.is_random(u):
                add(cu, x.dst, x)
    add(hat, tilde(e.dst), e)
    if m.is_random(e.src):
        for x in m.out_edges(e.src):
            if x.dst != e.dst:
                add(hat, x.dst, x)

    gadget = Mdp(owners, edges, names)
    copy_of = {cu: u for u, cu in copies.items()}
    return GadgetMdp(gadget, hat, e, copy_of, copies, target)


def is_good_edge(m: Mdp, e: Edge, good: Iterable[Edge], reach: Iterable[int],
                 target: Iterable[int], length: int, alpha) -> bool:
    g = build_gadget(m, e, good, reach, target)
    return g.hat in sure_dir_fwmp(g.mdp, length, alpha).region


# positive reachability -----------------------------------------------------------

@dataclass
class Stage:
    """One vertex added to ``R`` with the edge that justified it."""
    vertex: int
    edge: Edge
    gadget: GadgetMdp


@dataclass
class PosReachResult:
    region: frozenset
    good: list
    bad: list
    verdicts: list
    stages: list
    base: Mdp
    target: frozenset
    length: int
    alpha: Fraction


def sure_dirfwmp_pos_reach(m: Mdp, length: int, alpha, target: Iterable[int],
                           priority: Callable[[Edge], object] | None = None) -> PosReachResult:
    """Grow ``R`` from the target by good edges.

    ``priority`` orders the candidate edges (lowest edge id by default); the
    returned region does not depend on it.
    """
    key = priority or (lambda x: x.id)
    safe = sure_dir_fwmp(m, length, alpha).region
    base = sub_mdp(m, safe) if safe else None
    target = frozenset(target) & safe
    reach = set(target)
    good, bad, verdicts, stages = [], set(), [], []
    if base is None:
        return PosReachResult(frozenset(), [], [], [], [], m, target, length, Fraction(alpha))
    while True:
        cands = [x for x in base.edges
                 if x.src not in target and x.dst in reach
                 and x.id not in bad and all(x.id != g.id for g in good)]
        if not cands:
            break
        e = min(cands, key=key)
        gadget = build_gadget(base, e, good, reach, target)
        ok = gadget.hat in sure_dir_fwmp(gadget.mdp, length, alpha).region
        verdicts.append((e.id, ok))
        if ok:
            good.append(e)
            bad.clear()
            if e.src not in reach:
                reach.add(e.src)
                stages.append(Stage(e.src, e, gadget))
        else:
            bad.add(e.id)
    return PosReachResult(frozenset(reach), good, sorted(bad), verdicts, stages,
                          base, target, length, Fraction(alpha))


# almost-sure Büchi ---------------------------------------------------------------

@dataclass
class SdabResult:
    region: frozenset
    levels: list = field(default_factory=list)

    @property
    def final(self) -> PosReachResult | None:
        return self.levels[-1] if self.levels and self.region else None


def sure_dirfwmp_as_buchi(m: Mdp, length: int, alpha, target: Iterable[int],
                          priority=None) -> SdabResult:
    """Shrink the arena until every vertex lies in the positive-reach region."""
    target = frozenset(target)
    current = m
    levels = []
    for _ in range(len(m.vertices) + 1):
        if not current.vertices:
            return SdabResult(frozenset(), levels)
        pr = sure_dirfwmp_pos_reach(current, length, alpha,
                                    target & frozenset(current.vertices), priority)
        levels.append(pr)
        if pr.region == frozenset(current.vertices):
            return SdabResult(pr.region, levels)
        keep = sure_safe(current, pr.region)
        if not keep:
            return SdabResult(frozenset(), levels)
        current = sub_mdp(current, keep)
    raise AssertionError("recursion deeper than the number of vertices")


# sure-almost-sure ----------------------------------------------------------------

@dataclass
class SasIteration:
    pos: frozenset
    sdab: frozenset
    attractor: frozenset
    won: frozenset
    detail: SdabResult | None = None


@dataclass
class SasTrace:
    sure_alpha: frozenset
    w0: frozenset
    iterations: list
    region: frozenset
    length: int
    alpha: Fraction
    beta: Fraction
    degenerate: bool = False

    def check_partition(self) -> list[str]:
        """Violations of the bookkeeping invariants (empty when sound)."""
        problems = []
        prev = self.w0
        for i, it in enumerate(self.iterations, 1):
            parts = [prev, it.sdab, it.attractor]
            if sum(len(p) for p in parts) != len(it.won) or frozenset().union(*parts) != it.won:
                problems.append(f"iteration {i}: sets do not partition W")
            if not prev <= it.won:
                problems.append(f"iteration {i}: W shrank")
            if it.sdab and not (it.pos & it.sdab):
                problems.append(f"iteration {i}: P misses the sdab region")
            prev = it.won
        if self.iterations and self.iterations[-1].sdab:
            problems.append("last iteration added vertices")
        if not self.region <= self.sure_alpha:
            problems.append("region leaves the sure region")
        return problems

    def to_json(self, m: Mdp) -> dict:
        def names(vs):
            return m.names_of(vs)
        return {
            "sureAlpha": names(self.sure_alpha),
            "W0": names(self.w0),
            "iterations": [{"P": names(it.pos), "Wsdab": names(it.sdab),
                            "A": names(it.attractor), "W": names(it.won)}
                           for it in self.iterations],
            "region": names(self.region),
            "degenerate": self.degenerate,
        }


def sas_fwmp(m: Mdp, length: int, alpha, beta, priority=None) -> tuple[frozenset, SasTrace]:
    alpha, beta = Fraction(alpha), Fraction(beta)
    sure_a = sure_fwmp(m, length, alpha).region
    if alpha >= beta:
        return sure_a, SasTrace(sure_a, sure_a, [], sure_a, length, alpha, beta, True)
    if not sure_a:
        return sure_a, SasTrace(sure_a, sure_a, [], sure_a, length, alpha, beta)
    inner = sub_mdp(m, sure_a)
    won = sure_fwmp(inner, length, beta).region
    w0 = won
    iterations = []
    while True:
        pos = pos_cpre(inner, won)
        rest = sure_a - won
        if rest:
            detail = sure_dirfwmp_as_buchi(sub_mdp_closure(m, rest), length, alpha, pos, priority)
        else:
            detail = SdabResult(frozenset())
        grown = sure_attractor(inner, won | detail.region)
        iterations.append(SasIteration(pos, detail.region, grown - won - detail.region,
                                       grown, detail))
        won = grown
        if not detail.region:
            break
    return won, SasTrace(sure_a, w0, iterations, won, length, alpha, beta)


def sls_fwmp(m: Mdp, length: int, alpha, beta) -> frozenset:
    sure_a = sure_fwmp(m, length, alpha).region
    if Fraction(alpha) >= Fraction(beta) or not sure_a:
        return sure_a
    return almost_sure_fwmp(sub_mdp(m, sure_a), length, beta).region


# bounded windows -----------------------------------------------------------------

def combined_window_bound(m: Mdp, *thresholds) -> int:
    """A single fixed length at which every bounded-window question below
    saturates: the largest reduction bound over the given thresholds."""
    return max(bwmp_window_bound(m, t) for t in thresholds)


def sas_bwmp(m: Mdp, alpha, beta, priority=None) -> tuple[frozenset, SasTrace]:
    return sas_fwmp(m, combined_window_bound(m, alpha, beta), alpha, beta, priority)


def sure_dirbwmp_as_buchi(m: Mdp, alpha, target) -> SdabResult:
    return sure_dirfwmp_as_buchi(m, bwmp_window_bound(m, alpha), alpha, target)


def sure_dirbwmp_pos_reach(m: Mdp, alpha, target) -> PosReachResult:
    return sure_dirfwmp_pos_reach(m, bwmp_window_bound(m, alpha), alpha, target)


def sls_bwmp(m: Mdp, alpha, beta) -> frozenset:
    return sls_fwmp(m, combined_window_bound(m, alpha, beta), alpha, beta)
