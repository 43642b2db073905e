"""Explicit MDPs and the graph primitives the solvers are built from.

Vertices and edges carry integer ids that survive restriction: a subMDP keeps
the ids of the vertices and edges it retains, so vertex sets computed in a
subMDP can be compared directly with sets computed in the parent.  Names are
only used for input and output.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

VertexSet = frozenset
"""A set of vertex ids (alias used in signatures for readability)."""


class Owner(enum.Enum):
    PLAYER = "p1"
    RANDOM = "prob"


class MdpError(ValueError):
    """Raised for structurally invalid MDPs or illegal restrictions."""


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    payoff: Fraction
    prob: Fraction | None = None


def _rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use Fraction or a string like '1/2'")
    return Fraction(x)


class Mdp:
    """An immutable MDP with Player 1 and probabilistic vertices.

    The constructor checks referential integrity only.  Model invariants
    (no deadlocks, proper distributions, no parallel edges) are reported by
    :func:`validate`; :meth:`build` runs it and raises on any violation.
    """

    def __init__(
        self,
        owners: Mapping[int, Owner],
        edges: Iterable[Edge],
        names: Mapping[int, str] | None = None,
    ):
        self._owner = dict(owners)
        self._names = {v: (names or {}).get(v, f"v{v}") for v in self._owner}
        self._edges = {}
        for e in edges:
            if e.id in self._edges:
                raise MdpError(f"duplicate edge id {e.id}")
            if e.src not in self._owner or e.dst not in self._owner:
                raise MdpError(f"edge {e.id} references an unknown vertex")
            self._edges[e.id] = e
        self.vertices: tuple[int, ...] = tuple(sorted(self._owner))
        out: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        inc: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        for eid in sorted(self._edges):
            e = self._edges[eid]
            out[e.src].append(e)
            inc[e.dst].append(e)
        self._out = {v: tuple(es) for v, es in out.items()}
        self._in = {v: tuple(es) for v, es in inc.items()}
        self._by_pair = {(e.src, e.dst): e for e in self._edges.values()}
        self._by_name = {n: v for v, n in self._names.items()}

    # construction helpers -------------------------------------------------

    @classmethod
    def build(cls, vertices: Sequence[tuple[str, str]], edges: Sequence[tuple]) -> "Mdp":
        """Build from names: ``vertices=[(name, "p1"|"prob")]`` and
        ``edges=[(src, dst, payoff[, prob])]`` with rationals as ints,
        Fractions or strings.  Ids follow list order.  Raises on any
        invariant violation."""
        ids = {}
        owners = {}
        names = {}
        for i, (name, kind) in enumerate(vertices):
            if name in ids:
                raise MdpError(f"duplicate vertex name {name!r}")
            ids[name] = i
            owners[i] = Owner(kind)
            names[i] = name
        es = []
        for j, spec in enumerate(edges):
            src, dst, payoff = spec[0], spec[1], spec[2]
            prob = spec[3] if len(spec) > 3 else None
            if src not in ids or dst not in ids:
                raise MdpError(f"edge {src}->{dst} references an unknown vertex")
            es.append(Edge(j, ids[src], ids[dst], _rational(payoff),
                           None if prob is None else _rational(prob)))
        m = cls(owners, es, names)
        problems = validate(m)
        if problems:
            raise MdpError("; ".join(problems))
        return m

    # accessors ------------------------------------------------------------

    def owner(self, v: int) -> Owner:
        return self._owner[v]

    def is_random(self, v: int) -> bool:
        return self._owner[v] is Owner.RANDOM

    def is_player(self, v: int) -> bool:
        return self._owner[v] is Owner.PLAYER

    def name(self, v: int) -> str:
        return self._names[v]

    def vertex(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise MdpError(f"unknown vertex {name!r}") from None

    def ids(self, names: Iterable[str]) -> frozenset:
        return frozenset(self.vertex(n) for n in names)

    def names_of(self, vs: Iterable[int]) -> list[str]:
        return [self._names[v] for v in sorted(vs)]

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges[i] for i in sorted(self._edges))

    def edge(self, eid: int) -> Edge:
        return self._edges[eid]

    def edge_between(self, u: int, v: int) -> Edge:
        return self._by_pair[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._by_pair

    def out_edges(self, v: int) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[Edge, ...]:
        return self._in[v]

    def successors(self, v: int) -> tuple[int, ...]:
        return tuple(e.dst for e in self._out[v])

    def predecessors(self, v: int) -> tuple[int, ...]:
        return tuple(e.src for e in self._in[v])

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._owner

    @property
    def p_min(self) -> Fraction:
        probs = [e.prob for e in self._edges.values() if self.is_random(e.src)]
        return min(probs) if probs else Fraction(1)

    @property
    def w_max(self) -> Fraction:
        return max((abs(e.payoff) for e in self._edges.values()), default=Fraction(0))

    def with_payoffs(self, payoffs: Mapping[int, Fraction]) -> "Mdp":
        """Copy of this MDP with edge payoffs replaced by ``payoffs[edge id]``."""
        es = [Edge(e.id, e.src, e.dst, Fraction(payoffs[e.id]), e.prob) for e in self.edges]
        return Mdp(self._owner, es, self._names)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mdp):
            return NotImplemented
        return (self._owner == other._owner and self._names == other._names
                and self._edges == other._edges)

    def __hash__(self) -> int:
        return hash((tuple(self.vertices), tuple(self._edges)))

    def __repr__(self) -> str:
        return f"Mdp(|V|={len(self.vertices)}, |E|={len(self._edges)})"


def validate(m: Mdp) -> list[str]:
    """Return every violated model invariant as a readable message."""
    problems = []
    seen = set()
    for e in m.edges:
        if (e.src, e.dst) in seen:
            problems.append(f"parallel edge {m.name(e.src)}->{m.name(e.dst)}")
        seen.add((e.src, e.dst))
    for v in m.vertices:
        out = m.out_edges(v)
        if not out:
            problems.append(f"deadlock at {m.name(v)}")
            continue
        if m.is_random(v):
            bad = [e for e in out if e.prob is None or e.prob <= 0 or e.prob > 1]
            for e in bad:
                problems.append(
                    f"edge {m.name(e.src)}->{m.name(e.dst)} has probability {e.prob}")
            if not bad:
                total = sum(e.prob for e in out)
                if total != 1:
                    problems.append(f"distribution at {m.name(v)} sums to {total}")
        else:
            for e in out:
                if e.prob is not None:
                    problems.append(
                        f"edge {m.name(e.src)}->{m.name(e.dst)} leaves a player vertex "
                        "but carries a probability")
    return problems


# restrictions ---------------------------------------------------------------

def _check_members(m: Mdp, vs) -> frozenset:
    vs = frozenset(vs)
    unknown = [v for v in vs if v not in m]
    if unknown:
        raise MdpError(f"unknown vertex ids {sorted(unknown)}")
    return vs


def sub_mdp(m: Mdp, vs: Iterable[int]) -> Mdp:
    """The subMDP induced by ``vs``.

    Every vertex needs an out-neighbour inside ``vs`` and probabilistic
    vertices must keep all of their out-neighbours.
    """
    vs = _check_members(m, vs)
    for v in sorted(vs):
        succ = m.successors(v)
        if not any(u in vs for u in succ):
            raise MdpError(f"{m.name(v)} has no out-neighbour inside the set")
        if m.is_random(v) and not all(u in vs for u in succ):
            raise MdpError(f"probabilistic vertex {m.name(v)} has an out-neighbour outside the set")
    if len(vs) == len(m.vertices):
        return m
    owners = {v: m.owner(v) for v in vs}
    es = [e for e in m.edges if e.src in vs and e.dst in vs]
    return Mdp(owners, es, {v: m.name(v) for v in vs})


def sub_mdp_closure(m: Mdp, vs: Iterable[int]) -> Mdp:
    """Restrict to ``vs`` keeping only in-set edges and renormalising the
    distributions of probabilistic vertices exactly."""
    vs = _check_members(m, vs)
    es = []
    for v in sorted(vs):
        inside = [e for e in m.out_edges(v) if e.dst in vs]
        if not inside:
            raise MdpError(f"{m.name(v)} has no out-neighbour inside the set")
        if m.is_random(v):
            mass = sum(e.prob for e in inside)
            inside = [Edge(e.id, e.src, e.dst, e.payoff, e.prob / mass) for e in inside]
        es.extend(inside)
    if len(vs) == len(m.vertices):
        return m
    return Mdp({v: m.owner(v) for v in vs}, es, {v: m.name(v) for v in vs})


def satisfies_subset_conditions(m: Mdp, vs: Iterable[int], closure: bool = False) -> bool:
    vs = frozenset(vs)
    for v in vs:
        succ = m.successors(v)
        if not any(u in vs for u in succ):
            return False
        if not closure and m.is_random(v) and not all(u in vs for u in succ):
            return False
    return True


# attractors and traps ---------------------------------------------------------

def sure_attractor(m: Mdp, target: Iterable[int]) -> frozenset:
    """Vertices from which Player 1 surely reaches ``target`` (probabilistic
    vertices resolved adversarially)."""
    return frozenset(sure_attractor_ranks(m, target))


def sure_attractor_ranks(m: Mdp, target: Iterable[int]) -> dict[int, int]:
    """Attractor membership with the round in which each vertex joined.

    Round 0 is the target itself; a Player 1 vertex of rank ``r > 0`` has a
    successor of rank ``< r``, which is what an attractor strategy follows.
    """
    rank = {v: 0 for v in target if v in m}
    missing = {v: len(m.out_edges(v)) for v in m.vertices if m.is_random(v)}
    frontier = deque(rank)
    while frontier:
        u = frontier.popleft()
        for e in m.in_edges(u):
            p = e.src
            if p in rank:
                continue
            if m.is_random(p):
                missing[p] -= 1
                if missing[p] > 0:
                    continue
            rank[p] = rank[u] + 1
            frontier.append(p)
    return rank


def sure_attractor_strategy(m: Mdp, target: Iterable[int]) -> dict[int, int]:
    """Memoryless attractor strategy: each Player 1 vertex of the attractor
    outside the target moves to its lowest-ranked successor (lowest id on ties)."""
    rank = sure_attractor_ranks(m, target)
    choice = {}
    for v, r in rank.items():
        if r == 0 or not m.is_player(v):
            continue
        best = min((rank[u], u) for u in m.successors(v) if u in rank)
        choice[v] = best[1]
    return choice


def sure_safe(m: Mdp, safe: Iterable[int]) -> frozenset:
    """Greatest subset of ``safe`` in which Player 1 can keep the token forever."""
    keep = set(v for v in safe if v in m)
    inside = {v: sum(1 for u in m.successors(v) if u in keep) for v in keep}
    doomed = deque(v for v in keep if _must_leave(m, v, inside[v]))
    removed = set()
    while doomed:
        v = doomed.popleft()
        if v in removed:
            continue
        removed.add(v)
        keep.discard(v)
        for e in m.in_edges(v):
            p = e.src
            if p in keep and p not in removed:
                inside[p] -= 1
                if _must_leave(m, p, inside[p]):
                    doomed.append(p)
    return frozenset(keep)


def _must_leave(m: Mdp, v: int, inside: int) -> bool:
    if m.is_random(v):
        return inside < len(m.out_edges(v))
    return inside == 0


def pos_cpre(m: Mdp, w: Iterable[int]) -> frozenset:
    """Probabilistic vertices outside ``w`` that enter ``w`` with positive
    probability but not surely."""
    w = frozenset(w)
    out = set()
    for v in m.vertices:
        if v in w or not m.is_random(v):
            continue
        succ = m.successors(v)
        if any(u in w for u in succ) and any(u not in w for u in succ):
            out.add(v)
    return frozenset(out)


# end components ---------------------------------------------------------------

def strongly_connected_components(nodes: Iterable, succ) -> list[frozenset]:
    """Iterative Tarjan over ``nodes`` with successor function ``succ``."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if u not in index:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack.add(u)
                    work.append((u, iter(succ(u))))
                    advanced = True
                    break
                if u in on_stack:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    comp.add(x)
                    if x == v:
                        break
                comps.append(frozenset(comp))
    return comps


def mec_decomposition(m: Mdp) -> list[frozenset]:
    """Maximal end components, ordered by their smallest vertex id."""
    pending = [frozenset(m.vertices)]
    mecs = []
    while pending:
        part = sure_safe(m, pending.pop())
        if not part:
            continue
        comps = strongly_connected_components(
            sorted(part), lambda v: [u for u in m.successors(v) if u in part])
        for comp in comps:
            if len(comp) == 1:
                (v,) = comp
                if not m.has_edge(v, v):
                    continue
            if sure_safe(m, comp) == comp:
                mecs.append(comp)
            else:
                pending.append(comp)
    return sorted(mecs, key=min)


# almost-sure reachability -----------------------------------------------------

def _backward_reach(m: Mdp, target: frozenset, within: frozenset) -> dict[int, int]:
    dist = {v: 0 for v in target if v in within}
    frontier = deque(sorted(dist))
    while frontier:
        u = frontier.popleft()
        for e in m.in_edges(u):
            p = e.src
            if p in within and p not in dist:
                dist[p] = dist[u] + 1
                frontier.append(p)
    return dist


def _stay_or_done(m: Mdp, cand: frozenset, target: frozenset) -> frozenset:
    """Greatest subset of ``cand`` where non-target vertices can stay inside
    (probabilistic: all successors, player: some successor)."""
    keep = set(cand)
    changed = True
    while changed:
        changed = False
        for v in sorted(keep):
            if v in target:
                continue
            succ = m.successors(v)
            ok = (all(u in keep for u in succ) if m.is_random(v)
                  else any(u in keep for u in succ))
            if not ok:
                keep.discard(v)
                changed = True
    return frozenset(keep)


def _almost_sure_reach_with_dist(m: Mdp, target) -> tuple[frozenset, dict[int, int]]:
    target = frozenset(v for v in target if v in m)
    region = frozenset(m.vertices)
    while True:
        dist = _backward_reach(m, target, region)
        reach = frozenset(dist)
        if reach == region:
            return region, dist
        region = _stay_or_done(m, reach, target)


def almost_sure_reach(m: Mdp, target: Iterable[int]) -> frozenset:
    """Vertices from which Player 1 reaches ``target`` with probability 1."""
    return _almost_sure_reach_with_dist(m, target)[0]


def almost_sure_reach_strategy(m: Mdp, target: Iterable[int]) -> dict[int, int]:
    """Memoryless witness for :func:`almost_sure_reach`: move to a successor in
    the region that is closest to the target (lowest id on ties).  Target
    vertices stay inside the region when they can."""
    region, dist = _almost_sure_reach_with_dist(m, target)
    choice = {}
    for v in sorted(region):
        if not m.is_player(v):
            continue
        inside = [u for u in m.successors(v) if u in region]
        if dist[v] == 0:
            choice[v] = min(inside) if inside else min(m.successors(v))
        else:
            choice[v] = min(inside, key=lambda u: (dist[u], u))
    return choice


def random_attractor(m: Mdp, bad: Iterable[int], within: Iterable[int] | None = None) -> frozenset:
    """Vertices from which chance (with positive probability) or necessity
    forces the token into ``bad``; the dual of :func:`sure_safe`."""
    within = frozenset(m.vertices if within is None else within)
    return within - sure_safe(m, within - frozenset(bad))
