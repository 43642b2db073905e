"""Finite-memory witness strategies.

Strategies are first written as *controllers*: small objects that update an
arbitrary hashable memory value when a vertex is reached (``arrive``) and
when an edge is taken (``traverse``), and that pick a successor at Player 1
vertices (``choose``).  :func:`compile_controller` unfolds a controller from
a set of start vertices into an explicit :class:`MealyStrategy` and then
merges memory states greedily wherever no reachable input can tell them
apart.  The memory size reported for a strategy is the state count after
merging.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .combined import (PosReachResult, SasTrace, combined_window_bound,
                       sas_fwmp, sure_dirfwmp_as_buchi, sure_dirfwmp_pos_reach)
from .mdp import (Mdp, almost_sure_reach_strategy, sub_mdp,
                  sure_attractor_strategy)
from .probabilistic import almost_sure_buchi, almost_sure_fwmp
from .sure import DirFwmpPlan, SureFwmpWitness, sure_dir_fwmp, sure_fwmp
from .windows import MonitorState


class StartNotWinning(ValueError):
    """Raised when synthesis is asked for a start vertex outside the region."""


# Mealy machines ------------------------------------------------------------------

@dataclass
class MealyStrategy:
    """Reading vertex ``v`` in state ``q`` moves to ``transitions[q, v][0]``;
    at Player 1 vertices ``transitions[q, v][1]`` is the chosen successor."""

    states: int
    initial: int
    transitions: dict
    starts: frozenset = frozenset()
    meta: dict = field(default_factory=dict)

    @property
    def memory(self) -> int:
        return self.states

    def step(self, q: int, v: int) -> tuple[int, int | None]:
        try:
            return self.transitions[q, v]
        except KeyError:
            raise ValueError(f"strategy undefined in state {q} at vertex {v}") from None

    def play(self, m: Mdp, path: Iterable[int]) -> list:
        """Choices along a path of observed vertices (``None`` at chance)."""
        q, out = self.initial, []
        for v in path:
            q, c = self.step(q, v)
            out.append(c)
        return out

    def to_json(self, m: Mdp) -> dict:
        rows = []
        for (q, v), (nq, c) in sorted(self.transitions.items()):
            row = {"state": q, "vertex": m.name(v), "nextState": nq}
            if c is not None:
                row["choice"] = m.name(c)
            rows.append(row)
        return {"states": self.states, "initial": self.initial, "transitions": rows,
                "starts": sorted(m.names_of(self.starts)),
                "meta": {k: str(v) if isinstance(v, Fraction) else v
                         for k, v in self.meta.items()}}

    @classmethod
    def from_json(cls, m: Mdp, data: dict) -> "MealyStrategy":
        trans = {}
        for row in data["transitions"]:
            choice = m.vertex(row["choice"]) if "choice" in row else None
            trans[row["state"], m.vertex(row["vertex"])] = (row["nextState"], choice)
        starts = m.ids(data.get("starts", []))
        return cls(int(data["states"]), int(data["initial"]), trans, starts,
                   dict(data.get("meta", {})))


class Controller:
    initial: Hashable = None

    def arrive(self, mem, v):
        return mem

    def choose(self, mem, v):
        raise NotImplementedError

    def traverse(self, mem, v, u):
        return mem


@dataclass(frozen=True)
class _Pending:
    mem: Hashable
    src: int


def compile_controller(m: Mdp, ctrl: Controller, starts: Iterable[int],
                       meta: dict | None = None, merge: bool = True) -> MealyStrategy:
    starts = frozenset(starts)
    index = {ctrl.initial: 0}
    order = [ctrl.initial]
    trans = {}
    seen = set()
    work = deque((ctrl.initial, v) for v in sorted(starts))

    def state(x):
        if x not in index:
            index[x] = len(order)
            order.append(x)
        return index[x]

    while work:
        q, v = work.popleft()
        if (q, v) in seen:
            continue
        seen.add((q, v))
        mem = ctrl.traverse(q.mem, q.src, v) if isinstance(q, _Pending) else q
        mem = ctrl.arrive(mem, v)
        if m.is_player(v):
            u = ctrl.choose(mem, v)
            if not m.has_edge(v, u):
                raise ValueError(f"controller chose a non-edge {m.name(v)}->{m.name(u)}")
            nxt = ctrl.traverse(mem, v, u)
            trans[state(q), v] = (state(nxt), u)
            work.append((nxt, u))
        else:
            outs = {u: ctrl.traverse(mem, v, u) for u in m.successors(v)}
            if len(set(outs.values())) == 1:
                nxt = next(iter(outs.values()))
            else:
                nxt = _Pending(mem, v)
            trans[state(q), v] = (state(nxt), None)
            for u in m.successors(v):
                work.append((nxt, u))
    machine = MealyStrategy(len(order), 0, trans, starts, dict(meta or {}))
    machine.meta.setdefault("unmergedStates", len(order))
    return merge_states(machine) if merge else machine


def merge_states(s: MealyStrategy) -> MealyStrategy:
    """Greedy merging of states whose defined behaviours agree.

    Two states can be merged when every input defined in both yields the same
    output and the successor states can be merged as well; inputs defined in
    only one of them are free.  Plays from the start vertices only exercise
    defined inputs, so their behaviour is unchanged.
    """
    n = s.states
    table = [dict() for _ in range(n)]
    for (q, v), x in s.transitions.items():
        table[q][v] = x
    parent = list(range(n))

    def find(x, over):
        while True:
            p = over.get(x, parent[x])
            if p == x:
                return x
            x = p

    def attempt(i, j):
        over, tab = {}, {}
        stack = [(i, j)]
        while stack:
            a, b = stack.pop()
            a, b = find(a, over), find(b, over)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            ta = tab.get(a, table[a])
            tb = tab.get(b, table[b])
            merged = dict(ta)
            for v, (nb, ob) in tb.items():
                if v in merged:
                    na, oa = merged[v]
                    if oa != ob:
                        return None
                    stack.append((na, nb))
                else:
                    merged[v] = (nb, ob)
            over[b] = a
            tab[a] = merged
        return over, tab

    roots = []
    for j in range(n):
        if find(j, {}) != j:
            continue
        for i in roots:
            res = attempt(i, j)
            if res is not None:
                over, tab = res
                for b, a in over.items():
                    parent[b] = a
                for a, t in tab.items():
                    table[a] = t
                break
        else:
            roots.append(j)

    # renumber reachable states breadth first
    start = find(s.initial, {})
    ids = {start: 0}
    queue = deque([start])
    trans = {}
    while queue:
        q = queue.popleft()
        for v, (nq, out) in sorted(table[q].items()):
            r = find(nq, {})
            if r not in ids:
                ids[r] = len(ids)
                queue.append(r)
            trans[ids[q], v] = (ids[r], out)
    return MealyStrategy(len(ids), 0, trans, s.starts, dict(s.meta))


# controllers ---------------------------------------------------------------------

class MemorylessController(Controller):
    def __init__(self, m: Mdp, moves: dict, fallback: Iterable[int] = ()):
        self.m = m
        self.moves = moves
        self.fallback = frozenset(fallback)

    def choose(self, mem, v):
        if v in self.moves:
            return self.moves[v]
        inside = [u for u in self.m.successors(v) if u in self.fallback]
        return min(inside or self.m.successors(v))


class SureFwmpController(Controller):
    """Window plan on the direct parts, attractor moves elsewhere.  Memory is
    ``(layer, c, s)`` while a plan is active and ``None`` otherwise."""

    def __init__(self, w: SureFwmpWitness):
        self.w = w

    def arrive(self, mem, v):
        if mem is not None:
            return mem
        z = self.w.zone.get(v)
        if z is not None and z[0] == "D":
            return (z[1], 0, 0)
        return None

    def choose(self, mem, v):
        if mem is None:
            if v in self.w.attract:
                return self.w.attract[v]
            inside = [u for u in self.w.m.successors(v) if u in self.w.region]
            return min(inside or self.w.m.successors(v))
        i, c, s = mem
        return self.w.plans[i].choose(v, MonitorState(c, s, False))

    def traverse(self, mem, v, u):
        if mem is None:
            return None
        i, c, s = mem
        plan = self.w.plans[i]
        if u not in plan.region:
            return None
        st = plan.step(MonitorState(c, s, False), v, u)
        return (i, st.c, st.s)


class PosReachController(Controller):
    """Stage strategies read off the gadgets of a positive-reach run.

    Memory is ``(stage, g, c, s)`` where ``g`` is the current gadget vertex
    of stage ``stage`` (``stage is None`` means the plain window plan of the
    base arena, used from target vertices).  With ``restart=True`` the
    machine forgets everything whenever a window closes, which turns the
    positive-reach witness into the repeated-reach one; otherwise it only
    switches stage when a window closes on a copy vertex.
    """

    def __init__(self, pr: PosReachResult, restart: bool):
        self.pr = pr
        self.restart = restart
        self.base_plan = DirFwmpPlan(pr.base, pr.base.vertices, pr.length, pr.alpha)
        self.stage_of = {st.vertex: k for k, st in enumerate(pr.stages)}
        self.plans = []
        for st in pr.stages:
            g = st.gadget.mdp
            region = sure_dir_fwmp(g, pr.length, pr.alpha).region
            self.plans.append(DirFwmpPlan(g, region, pr.length, pr.alpha))

    def fresh(self, v):
        if v in self.pr.target:
            return (None, None, 0, 0)
        k = self.stage_of[v]
        return (k, self.pr.stages[k].gadget.hat, 0, 0)

    def arrive(self, mem, v):
        return self.fresh(v) if mem is None else mem

    def choose(self, mem, v):
        k, g, c, s = mem
        st = MonitorState(c, s, False)
        if k is None:
            return self.base_plan.choose(v, st)
        gadget = self.pr.stages[k].gadget
        return gadget.project(self.plans[k].choose(g, st))

    def traverse(self, mem, v, u):
        k, g, c, s = mem
        st = MonitorState(c, s, False)
        if k is None:
            nst = self.base_plan.step(st, v, u)
            if nst.c == 0 and self.restart:
                return None
            return (None, None, nst.c, nst.s)
        gadget = self.pr.stages[k].gadget
        ng = gadget.step_to(g, u)
        nst = self.plans[k].step(st, g, ng)
        if nst.c == 0:
            if self.restart:
                return None
            if gadget.layer(ng) == "copy":
                return None
        return (k, ng, nst.c, nst.s)


class ZoneController(Controller):
    """Runs one sub-controller per zone and restarts it on every zone change."""

    def __init__(self, zone_of: dict, inner: dict):
        self.zone_of = zone_of
        self.inner = inner

    def arrive(self, mem, v):
        z = self.zone_of[v]
        ctrl = self.inner[z]
        if mem is not None and mem[0] == z:
            return (z, ctrl.arrive(mem[1], v))
        return (z, ctrl.arrive(ctrl.initial, v))

    def choose(self, mem, v):
        return self.inner[mem[0]].choose(mem[1], v)

    def traverse(self, mem, v, u):
        if self.zone_of.get(u) != mem[0]:
            return None
        return (mem[0], self.inner[mem[0]].traverse(mem[1], v, u))


class SlsController(Controller):
    """Phase 1 steers towards the sure-β region while counting visits to
    probabilistic vertices; after ``n`` of them (or on arrival in that
    region) it hands over to a sure witness for good."""

    def __init__(self, m, n, target, moves, region, beta_ctrl, alpha_ctrl):
        self.m, self.n, self.target = m, n, target
        self.moves, self.region = moves, region
        self.beta_ctrl, self.alpha_ctrl = beta_ctrl, alpha_ctrl

    def arrive(self, mem, v):
        if mem is None:
            mem = ("count", 0)
        tag, inner = mem
        if tag == "count":
            if v in self.target:
                return ("beta", self.beta_ctrl.arrive(self.beta_ctrl.initial, v))
            if inner >= self.n:
                return ("alpha", self.alpha_ctrl.arrive(self.alpha_ctrl.initial, v))
            return ("count", inner + (1 if self.m.is_random(v) else 0))
        ctrl = self.beta_ctrl if tag == "beta" else self.alpha_ctrl
        return (tag, ctrl.arrive(inner, v))

    def choose(self, mem, v):
        tag, inner = mem
        if tag == "count":
            if v in self.moves:
                return self.moves[v]
            inside = [u for u in self.m.successors(v) if u in self.region]
            return min(inside or self.m.successors(v))
        ctrl = self.beta_ctrl if tag == "beta" else self.alpha_ctrl
        return ctrl.choose(inner, v)

    def traverse(self, mem, v, u):
        tag, inner = mem
        if tag == "count":
            return mem
        ctrl = self.beta_ctrl if tag == "beta" else self.alpha_ctrl
        return (tag, ctrl.traverse(inner, v, u))


# synthesis entry points ----------------------------------------------------------

def _starts(region, start, m):
    if start is None:
        return frozenset(region)
    if start not in region:
        raise StartNotWinning(f"start vertex {m.name(start)} is not in the winning region")
    return frozenset([start])


def synth_sure_fwmp(m: Mdp, length: int, lam, start: int | None = None) -> MealyStrategy:
    w = SureFwmpWitness(m, length, lam)
    starts = _starts(w.region, start, m)
    return compile_controller(m, SureFwmpController(w), starts,
                              {"construction": "sure-fwmp", "length": length,
                               "threshold": Fraction(lam)})


def synth_almost_sure_fwmp(m: Mdp, length: int, lam, start: int | None = None) -> MealyStrategy:
    """Reach the sure region almost surely, then play the sure witness."""
    res = almost_sure_fwmp(m, length, lam)
    starts = _starts(res.region, start, m)
    w = SureFwmpWitness(m, length, lam, res.sure)
    moves = almost_sure_reach_strategy(m, w.region) if w.region else {}
    zone = {v: ("sure" if v in w.region else "reach") for v in m.vertices}
    ctrl = ZoneController(zone, {"sure": SureFwmpController(w),
                                 "reach": MemorylessController(m, moves, res.region)})
    return compile_controller(m, ctrl, starts,
                              {"construction": "almost-sure-fwmp", "length": length,
                               "threshold": Fraction(lam)})


def synth_almost_sure_buchi(m: Mdp, target: Iterable[int], start: int | None = None) -> MealyStrategy:
    target = frozenset(target)
    region = almost_sure_buchi(m, target)
    starts = _starts(region, start, m)
    moves = almost_sure_reach_strategy(sub_mdp(m, region), target & region) if region else {}
    ctrl = MemorylessController(m, moves, region)
    return compile_controller(m, ctrl, starts, {"construction": "almost-sure-buchi"})


def synth_sdpr(m: Mdp, length: int, alpha, target: Iterable[int], start: int | None = None,
               result: PosReachResult | None = None) -> MealyStrategy:
    pr = result or sure_dirfwmp_pos_reach(m, length, alpha, target)
    starts = _starts(pr.region, start, m)
    return compile_controller(m, PosReachController(pr, restart=False), starts,
                              {"construction": "sure-dirfwmp-pos-reach", "length": length,
                               "threshold": Fraction(alpha)})


def synth_sdab(m: Mdp, length: int, alpha, target: Iterable[int],
               start: int | None = None) -> MealyStrategy:
    res = sure_dirfwmp_as_buchi(m, length, alpha, target)
    if not res.region:
        raise StartNotWinning("the sure-direct-window / almost-sure-Büchi region is empty")
    starts = _starts(res.region, start, m)
    return compile_controller(m, PosReachController(res.final, restart=True), starts,
                              {"construction": "sure-dirfwmp-as-buchi", "length": length,
                               "threshold": Fraction(alpha)})


def sas_controller(m: Mdp, trace: SasTrace) -> Controller:
    length = trace.length
    if trace.degenerate:
        return SureFwmpController(SureFwmpWitness(m, length, trace.alpha))
    inner_m = sub_mdp(m, trace.sure_alpha)
    zone = {}
    inner = {}
    for v in trace.w0:
        zone[v] = "W0"
    if trace.w0:
        inner["W0"] = SureFwmpController(SureFwmpWitness(inner_m, length, trace.beta))
    prev = trace.w0
    for i, it in enumerate(trace.iterations):
        if not it.sdab:
            break
        for v in it.sdab:
            zone[v] = ("S", i)
        inner[("S", i)] = PosReachController(it.detail.final, restart=True)
        if it.attractor:
            moves = sure_attractor_strategy(inner_m, prev | it.sdab)
            for v in it.attractor:
                zone[v] = ("A", i)
            inner[("A", i)] = MemorylessController(inner_m, moves, trace.region)
        prev = it.won
    return ZoneController(zone, inner)


def synth_sas(m: Mdp, length: int, alpha, beta, start: int | None = None,
              trace: SasTrace | None = None) -> MealyStrategy:
    if trace is None:
        _, trace = sas_fwmp(m, length, alpha, beta)
    starts = _starts(trace.region, start, m)
    return compile_controller(m, sas_controller(m, trace), starts,
                              {"construction": "sas", "length": length,
                               "alpha": Fraction(alpha), "beta": Fraction(beta)})


def synth_sas_bwmp(m: Mdp, alpha, beta, start: int | None = None) -> MealyStrategy:
    return synth_sas(m, combined_window_bound(m, alpha, beta), alpha, beta, start)


def compute_N(n_vertices: int, p_min, eps) -> int:
    """Length of the first phase of the limit-sure witness.

    With ``q = p_min ** n`` a run of ``n`` favourable outcomes has probability
    ``q``; for ``p_min <= 1/2`` the bound ``2.4 * n * ln(1/eps) / q`` is used,
    otherwise the exact ``n * ln(1/eps) / -ln(1 - q)``.
    """
    eps = Fraction(eps)
    p = Fraction(p_min)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if not 0 < p <= 1:
        raise ValueError("minimum probability must lie in (0, 1]")
    n = max(1, n_vertices)
    q = float(p) ** n
    log_eps = math.log(1 / float(eps))
    if p <= Fraction(1, 2):
        value = 2.4 * n * log_eps / q
    elif q >= 1:
        value = 1
    else:
        value = n * log_eps / -math.log1p(-q)
    return max(1, math.ceil(value))


def streak_recurrence(m_len: int, p, n: int) -> Fraction:
    """Probability that ``n`` independent tosses with success probability
    ``p`` contain ``m_len`` consecutive successes."""
    p = Fraction(p)
    if m_len < 1 or n < 0 or not 0 < p < 1:
        raise ValueError("need m_len >= 1, n >= 0 and 0 < p < 1")
    x = [Fraction(0)] * max(n + 1, m_len)
    run = p ** m_len
    for k in range(m_len, n + 1):
        x[k] = run + sum(p ** (i - 1) * (1 - p) * x[k - i] for i in range(1, m_len + 1))
    return x[n]


def sls_controller(m: Mdp, length: int, alpha, beta, n: int) -> tuple[Controller, frozenset]:
    sure_a = sure_fwmp(m, length, alpha)
    alpha_ctrl = SureFwmpController(SureFwmpWitness(m, length, alpha, sure_a))
    if not sure_a.region:
        return alpha_ctrl, frozenset()
    inner = sub_mdp(m, sure_a.region)
    wb = SureFwmpWitness(inner, length, beta)
    region = almost_sure_fwmp(inner, length, beta).region
    moves = almost_sure_reach_strategy(inner, wb.region) if wb.region else {}
    ctrl = SlsController(m, n, wb.region, moves, sure_a.region,
                         SureFwmpController(wb), alpha_ctrl)
    return ctrl, region


def synth_sls(m: Mdp, length: int, alpha, beta, eps, start: int | None = None,
              n: int | None = None) -> MealyStrategy:
    if n is None:
        n = compute_N(len(m.vertices), m.p_min, eps)
    ctrl, region = sls_controller(m, length, alpha, beta, n)
    starts = _starts(region, start, m)
    return compile_controller(m, ctrl, starts,
                              {"construction": "sls", "length": length, "alpha": Fraction(alpha),
                               "beta": Fraction(beta), "epsilon": Fraction(eps), "N": n})
