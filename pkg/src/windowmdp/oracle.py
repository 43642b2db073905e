"""Independent ground truth for the solvers and strategies.

Nothing here calls the fixpoint code of the solver modules.  Regions are
computed on the explicit product of the MDP with the window monitor, using
a small generic game solver written for this module and networkx for graph
components.  Strategies are checked on the Markov chain they induce.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import networkx as nx

from .mdp import Mdp
from .windows import RESET, MonitorState, monitor_step, scale_payoffs


# generic two-player arenas -------------------------------------------------------

@dataclass
class Arena:
    """A game graph: ``chance`` nodes belong to the opponent, the rest to
    Player 1.  ``prob`` carries the edge probabilities of chance nodes."""

    succ: dict
    chance: frozenset
    prob: dict = field(default_factory=dict)

    def preds(self) -> dict:
        pred = {x: [] for x in self.succ}
        for x, ys in self.succ.items():
            for y in ys:
                pred[y].append(x)
        return pred


def _attract(arena: Arena, nodes: set, goal: set, for_player: bool) -> set:
    """Nodes of the subgame ``nodes`` from which ``for_player`` (True: Player
    1, False: opponent) forces a visit to ``goal``."""
    pred = arena.preds()
    count = {x: sum(1 for y in arena.succ[x] if y in nodes) for x in nodes}
    won = set(goal & nodes)
    queue = deque(won)
    while queue:
        y = queue.popleft()
        for x in pred[y]:
            if x not in nodes or x in won:
                continue
            mine = (x not in arena.chance) == for_player
            if mine:
                won.add(x)
                queue.append(x)
            else:
                count[x] -= 1
                if count[x] == 0:
                    won.add(x)
                    queue.append(x)
    return won


def solve_safety(arena: Arena, bad: set) -> set:
    nodes = set(arena.succ)
    return nodes - _attract(arena, nodes, bad, for_player=False)


def solve_co_buchi(arena: Arena, bad: set) -> set:
    """Player 1 wins if ``bad`` is visited finitely often.  The opponent's
    Büchi region is computed by the classical nested fixpoint and Player 1
    gets the rest."""
    nodes = set(arena.succ)
    while True:
        reach_bad = _attract(arena, nodes, bad & nodes, for_player=False)
        avoid = nodes - reach_bad
        if not avoid:
            break
        lost = _attract(arena, nodes, avoid, for_player=True)
        nodes -= lost
    return set(arena.succ) - nodes


def end_components(arena: Arena, allowed: set) -> list[set]:
    """Maximal end components of the MDP arena restricted to ``allowed``."""
    result = []
    pending = [set(allowed)]
    while pending:
        part = pending.pop()
        changed = True
        while changed:
            changed = False
            for x in list(part):
                if x not in part:
                    continue
                inside = [y for y in arena.succ[x] if y in part]
                if not inside or (x in arena.chance and len(inside) < len(arena.succ[x])):
                    part.discard(x)
                    changed = True
        if not part:
            continue
        g = nx.DiGraph()
        g.add_nodes_from(part)
        g.add_edges_from((x, y) for x in part for y in arena.succ[x] if y in part)
        comps = [set(c) for c in nx.strongly_connected_components(g)]
        stable = True
        for c in comps:
            ok = all(
                any(y in c for y in arena.succ[x]) and
                (x not in arena.chance or all(y in c for y in arena.succ[x]))
                for x in c)
            if len(comps) == 1 and ok:
                continue
            stable = False
            pending.append(c)
        if stable:
            result.append(part)
    return result


def almost_sure_reach(arena: Arena, goal: set) -> set:
    """Greatest set ``S`` such that from ``S`` Player 1 can stay in ``S`` and
    reach ``goal`` with positive probability, which is the almost-sure
    reachability region."""
    nodes = set(arena.succ)
    pred = arena.preds()
    while True:
        # positive reach within nodes
        can = set(goal & nodes)
        queue = deque(can)
        while queue:
            y = queue.popleft()
            for x in pred[y]:
                if x in nodes and x not in can:
                    if x in arena.chance and not all(z in nodes for z in arena.succ[x]):
                        continue
                    can.add(x)
                    queue.append(x)
        # keep only nodes that can stay inside ``can``
        stay = set(can)
        changed = True
        while changed:
            changed = False
            for x in list(stay):
                if x in goal:
                    continue
                succ = arena.succ[x]
                if x in arena.chance:
                    ok = all(y in stay for y in succ)
                else:
                    ok = any(y in stay for y in succ)
                if not ok:
                    stay.discard(x)
                    changed = True
        if stay == nodes:
            return nodes
        nodes = stay


# window product -----------------------------------------------------------------

@dataclass
class WindowProduct:
    mdp: Mdp
    length: int
    threshold: Fraction
    arena: Arena
    bad: set
    initial: dict

    @property
    def size(self) -> int:
        return len(self.arena.succ)

    def project(self, winning: set) -> frozenset:
        return frozenset(v for v, x in self.initial.items() if x in winning)


def build_window_product(m: Mdp, length: int, lam) -> WindowProduct:
    """Product states are ``(v, c, s, bad)`` where ``bad`` marks that the
    step into this state overflowed the window."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    scaled = scale_payoffs(m, lam)
    init = {v: (v, 0, 0, False) for v in m.vertices}
    succ, prob, chance, bad = {}, {}, set(), set()
    queue = deque(init.values())
    while queue:
        x = queue.popleft()
        if x in succ:
            continue
        v, c, s, flag = x
        if flag:
            bad.add(x)
        if m.is_random(v):
            chance.add(x)
        outs = []
        for e in m.out_edges(v):
            st = monitor_step(MonitorState(c, s, False), scaled[e.id], length)
            y = (e.dst, st.c, st.s, st.overflow)
            outs.append(y)
            if e.prob is not None:
                prob[x, y] = prob.get((x, y), 0) + e.prob
            if y not in succ:
                queue.append(y)
        succ[x] = outs
    arena = Arena(succ, frozenset(chance), prob)
    return WindowProduct(m, length, Fraction(lam), arena, bad, init)


def oracle_sure_region(product: WindowProduct, objective: str) -> frozenset:
    if objective == "safe":
        return product.project(solve_safety(product.arena, product.bad))
    if objective == "cobuchi":
        return product.project(solve_co_buchi(product.arena, product.bad))
    raise ValueError(f"unknown objective {objective!r}")


def oracle_almost_sure_region(product: WindowProduct) -> frozenset:
    arena = product.arena
    good = set()
    for ec in end_components(arena, set(arena.succ) - product.bad):
        good |= ec
    return product.project(almost_sure_reach(arena, good))


def mdp_arena(m: Mdp) -> Arena:
    return Arena({v: list(m.successors(v)) for v in m.vertices},
                 frozenset(v for v in m.vertices if m.is_random(v)))


def oracle_almost_sure_buchi(m: Mdp, target: Iterable[int]) -> frozenset:
    arena = mdp_arena(m)
    target = set(target)
    good = set()
    for ec in end_components(arena, set(arena.succ)):
        if ec & target:
            good |= ec
    return frozenset(almost_sure_reach(arena, good))


def oracle_regions(m: Mdp, length: int, lam, target: Iterable[int]) -> dict:
    product = build_window_product(m, length, lam)
    return {
        "sure_dir_fwmp": oracle_sure_region(product, "safe"),
        "sure_fwmp": oracle_sure_region(product, "cobuchi"),
        "almost_sure_fwmp": oracle_almost_sure_region(product),
        "almost_sure_buchi": oracle_almost_sure_buchi(m, target),
    }


# induced chains ------------------------------------------------------------------

@dataclass
class Claim:
    """What a strategy is supposed to guarantee.

    ``kind`` is one of ``sure-dirfwmp``, ``sure-fwmp``, ``as-fwmp``,
    ``prob-fwmp`` (probability at least ``bound``), ``as-buchi`` and
    ``pos-reach-within`` (reach ``target`` within ``steps`` steps with
    probability at least ``bound``).
    """

    kind: str
    length: int = 1
    threshold: Fraction = Fraction(0)
    target: frozenset = frozenset()
    bound: Fraction = Fraction(1)
    steps: int = 0


@dataclass
class Verdict:
    ok: bool
    claim: Claim
    witness: object = None
    probability: Fraction | None = None
    states: int = 0

    def to_json(self, m: Mdp) -> dict:
        out = {"ok": self.ok, "claim": self.claim.kind, "chainStates": self.states}
        if self.probability is not None:
            out["probability"] = str(self.probability)
        if self.witness is not None:
            out["witness"] = [m.name(v) for v in self.witness]
        return out


def induced_chain(m: Mdp, sigma, starts: Iterable[int], monitor: tuple | None = None):
    """States ``(q, v, monitor-or-None)``.  ``transitions[x]`` lists
    ``(y, probability)``; a state is bad when entering it overflowed."""
    if monitor is not None:
        length, lam = monitor
        scaled = scale_payoffs(m, lam)
    init = [(sigma.initial, v, RESET if monitor else None) for v in sorted(starts)]
    trans = {}
    queue = deque(init)
    while queue:
        x = queue.popleft()
        if x in trans:
            continue
        q, v, st = x
        nq, choice = sigma.step(q, v)
        if m.is_player(v):
            if choice is None or not m.has_edge(v, choice):
                raise ValueError(f"strategy makes an invalid move at {m.name(v)}")
            edges = [(m.edge_between(v, choice), Fraction(1))]
        else:
            edges = [(e, e.prob) for e in m.out_edges(v)]
        outs = []
        for e, p in edges:
            nst = None
            if monitor is not None:
                nst = monitor_step(MonitorState(st.c, st.s, False), scaled[e.id], length)
            y = (nq, e.dst, nst)
            outs.append((y, p))
            if y not in trans:
                queue.append(y)
        trans[x] = outs
    return init, trans


def _is_bad(x) -> bool:
    return x[2] is not None and x[2].overflow


def _graph(trans) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(trans)
    for x, outs in trans.items():
        for y, _ in outs:
            g.add_edge(x, y)
    return g


def _bsccs(g: nx.DiGraph) -> list[set]:
    cond = nx.condensation(g)
    return [set(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(b)
    rows = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


def reach_probabilities(trans, good: set) -> dict:
    """Exact probability of eventually reaching ``good`` (assumed closed, as
    a union of bottom components) from every chain state."""
    g = _graph(trans)
    cond = nx.condensation(g)
    value = {}
    for c in reversed(list(nx.topological_sort(cond))):
        members = sorted(cond.nodes[c]["members"], key=repr)
        if all(x in good for x in members):
            for x in members:
                value[x] = Fraction(1)
            continue
        idx = {x: i for i, x in enumerate(members)}
        a = [[Fraction(0)] * len(members) for _ in members]
        b = [Fraction(0)] * len(members)
        for x in members:
            i = idx[x]
            a[i][i] += 1
            for y, p in trans[x]:
                if y in idx:
                    a[i][idx[y]] -= p
                else:
                    b[i] += p * value[y]
        if cond.out_degree(c) == 0:
            for x in members:
                value[x] = Fraction(0)
            continue
        sol = _solve_exact(a, b)
        for x in members:
            value[x] = sol[idx[x]]
    return value


def validate_strategy(m: Mdp, sigma, claim: Claim, starts: Iterable[int] | None = None) -> Verdict:
    starts = frozenset(sigma.starts if starts is None else starts)
    needs_monitor = claim.kind in ("sure-dirfwmp", "sure-fwmp", "as-fwmp", "prob-fwmp")
    monitor = (claim.length, claim.threshold) if needs_monitor else None
    init, trans = induced_chain(m, sigma, starts, monitor)
    size = len(trans)
    g = _graph(trans)

    if claim.kind == "sure-dirfwmp":
        for x in trans:
            if _is_bad(x):
                path = nx.shortest_path(g, next(i for i in init if nx.has_path(g, i, x)), x)
                return Verdict(False, claim, [y[1] for y in path], states=size)
        return Verdict(True, claim, states=size)

    if claim.kind == "sure-fwmp":
        for comp in nx.strongly_connected_components(g):
            cyclic = len(comp) > 1 or any(g.has_edge(x, x) for x in comp)
            if cyclic and any(_is_bad(x) for x in comp):
                bad = next(x for x in comp if _is_bad(x))
                nxt = next(y for y, _ in trans[bad] if y in comp)
                cycle = [bad] + nx.shortest_path(g.subgraph(comp), nxt, bad)
                return Verdict(False, claim, [y[1] for y in cycle], states=size)
        return Verdict(True, claim, states=size)

    bottoms = _bsccs(g)
    if claim.kind in ("as-fwmp", "as-buchi"):
        for b in bottoms:
            failed = any(_is_bad(x) for x in b) if claim.kind == "as-fwmp" else \
                not any(x[1] in claim.target for x in b)
            if failed:
                return Verdict(False, claim, sorted({x[1] for x in b}), states=size)
        return Verdict(True, claim, states=size)

    if claim.kind == "prob-fwmp":
        good = set()
        for b in bottoms:
            if not any(_is_bad(x) for x in b):
                good |= b
        value = reach_probabilities(trans, good)
        worst = min(value[x] for x in init)
        return Verdict(worst >= claim.bound, claim, probability=worst, states=size)

    if claim.kind == "pos-reach-within":
        cur = {x: Fraction(1) if x[1] in claim.target else Fraction(0) for x in trans}
        for _ in range(claim.steps):
            cur = {x: Fraction(1) if x[1] in claim.target else
                   sum(p * cur[y] for y, p in trans[x]) for x in trans}
        worst = min(cur[x] for x in init)
        return Verdict(worst >= claim.bound and worst > 0, claim, probability=worst, states=size)

    raise ValueError(f"unknown claim kind {claim.kind!r}")


# simulation ----------------------------------------------------------------------

def simulate(m: Mdp, sigma, start: int, steps: int, runs: int, seed: int,
             windows: Iterable[tuple[int, Fraction]] = ()) -> dict:
    """Monte-Carlo smoke evidence: overflow counts per window/threshold.

    ``late_ok`` is the share of runs without an overflow in their second
    half, a finite proxy for the prefix-independent objective.
    """
    rng = random.Random(seed)
    windows = [(int(l), Fraction(t)) for l, t in windows]
    scaled = [scale_payoffs(m, t) for _, t in windows]
    totals = [0] * len(windows)
    clean = [0] * len(windows)
    late = [0] * len(windows)
    if steps <= 0 or runs <= 0:
        return {"steps": steps, "runs": runs, "seed": seed, "windows": []}
    for _ in range(runs):
        q, v = sigma.initial, start
        states = [RESET] * len(windows)
        over = [0] * len(windows)
        over_late = [0] * len(windows)
        for k in range(steps):
            q, choice = sigma.step(q, v)
            if m.is_player(v):
                e = m.edge_between(v, choice)
            else:
                outs = m.out_edges(v)
                e = rng.choices(outs, weights=[float(x.prob) for x in outs])[0]
            for i, (l, _) in enumerate(windows):
                states[i] = monitor_step(states[i], scaled[i][e.id], l)
                if states[i].overflow:
                    over[i] += 1
                    if 2 * k >= steps:
                        over_late[i] += 1
            v = e.dst
        for i in range(len(windows)):
            totals[i] += over[i]
            clean[i] += over[i] == 0
            late[i] += over_late[i] == 0
    return {
        "steps": steps, "runs": runs, "seed": seed,
        "windows": [{"length": l, "threshold": str(t), "overflows": totals[i],
                     "direct_ok": clean[i] / runs, "late_ok": late[i] / runs}
                    for i, (l, t) in enumerate(windows)],
    }


# random instances ----------------------------------------------------------------

def random_mdp(rng: random.Random, max_vertices: int = 8, max_out: int = 3,
               payoff_range: int = 3) -> Mdp:
    n = rng.randint(1, max_vertices)
    vertices = [(f"v{i}", rng.choice(("p1", "prob"))) for i in range(n)]
    edges = []
    for i in range(n):
        k = rng.randint(1, min(max_out, n))
        targets = rng.sample(range(n), k)
        weights = [rng.randint(1, 3) for _ in targets]
        total = sum(weights)
        for t, w in zip(targets, weights):
            payoff = rng.randint(-payoff_range, payoff_range)
            if vertices[i][1] == "prob":
                edges.append((f"v{i}", f"v{t}", payoff, Fraction(w, total)))
            else:
                edges.append((f"v{i}", f"v{t}", payoff))
    return Mdp.build(vertices, edges)


def random_case(seed: int, index: int) -> tuple[Mdp, int, Fraction, frozenset]:
    """Instance ``index`` of the seeded family: MDP, window length,
    threshold 0 and a random Büchi target."""
    rng = random.Random(f"{seed}:{index}")
    m = random_mdp(rng)
    length = rng.randint(1, 4)
    target = frozenset(v for v in m.vertices if rng.random() < 0.4)
    return m, length, Fraction(0), target
