"""Window semantics on finite prefixes and lassos.

Thresholds are removed by scaling: with ``K`` the least common multiple of all
payoff denominators and of the threshold's denominator, an edge of payoff
``w`` gets the integer payoff ``K*w - K*lam``.  An infix then has mean payoff
at least ``lam`` exactly when its scaled sum is non-negative, so every window
question becomes a question about signs of integer sums.

The window monitor keeps a pair ``(c, s)``: the number of steps since the last
reset and the scaled sum accumulated since then.  If the window opened at a
reset point closes at position ``j``, every window opened between the reset
point and ``j`` has closed by ``j`` as well (its sum is the closing sum minus
a negative prefix).  Tracking only the window opened at the last reset is
therefore enough, and after an overflow the monitor restarts, which keeps the
count of overflow events finite exactly when finitely many windows stay open
for more than ``l`` steps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .mdp import Mdp, MdpError


# scaling ------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledPayoffs:
    """Integer payoffs per edge id together with the scaling certificate."""
    threshold: Fraction
    factor: int
    payoffs: dict

    def __getitem__(self, eid: int) -> int:
        return self.payoffs[eid]

    @property
    def w_max(self) -> int:
        return max((abs(w) for w in self.payoffs.values()), default=0)

    def unscale(self, total: int, steps: int) -> Fraction:
        """Recover the raw payoff sum of ``steps`` edges with scaled sum ``total``."""
        return Fraction(total, self.factor) + steps * self.threshold


def scale_payoffs(m: Mdp, threshold) -> ScaledPayoffs:
    lam = Fraction(threshold)
    factor = lam.denominator
    for e in m.edges:
        factor = math.lcm(factor, e.payoff.denominator)
    scaled = {}
    for e in m.edges:
        value = factor * e.payoff - factor * lam
        assert value.denominator == 1
        scaled[e.id] = int(value)
    return ScaledPayoffs(lam, factor, scaled)


def scaled_mdp(m: Mdp, threshold) -> Mdp:
    """The MDP with scaled integer payoffs (threshold becomes 0)."""
    return m.with_payoffs(scale_payoffs(m, threshold).payoffs)


# monitor -------------------------------------------------------------------------

class MonitorState(NamedTuple):
    c: int = 0
    s: int = 0
    overflow: bool = False

    @property
    def is_reset(self) -> bool:
        return self.c == 0


RESET = MonitorState()


def monitor_step(state: MonitorState, payoff: int, length: int) -> MonitorState:
    s = state.s + payoff
    c = state.c + 1
    if s >= 0:
        return MonitorState(0, 0, False)
    if c == length:
        return MonitorState(0, 0, True)
    return MonitorState(c, s, False)


def run_monitor(payoffs: Iterable[int], length: int, start: MonitorState = RESET):
    """Yield the monitor state after each payoff."""
    st = start
    for w in payoffs:
        st = monitor_step(st, w, length)
        yield st


# objectives -----------------------------------------------------------------------

class Kind(enum.Enum):
    GW = "GW"
    DIR_FWMP = "DirFWMP"
    FWMP = "FWMP"
    DIR_BWMP = "DirBWMP"
    BWMP = "BWMP"
    MP = "MP"
    REACH = "Reach"
    SAFE = "Safe"
    BUCHI = "Buchi"
    CO_BUCHI = "CoBuchi"
    BOUNDED_REACH = "BoundedReach"
    EDGE_RESTRICTED_REACH = "EdgeRestrictedReach"
    TP = "TP"


_WINDOWED = {Kind.GW, Kind.DIR_FWMP, Kind.FWMP}
_PAYOFF = _WINDOWED | {Kind.DIR_BWMP, Kind.BWMP, Kind.MP, Kind.TP}


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: Kind
    length: int | None = None
    threshold: Fraction = Fraction(0)
    target: frozenset = frozenset()
    edges: frozenset = frozenset()
    bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "threshold", Fraction(self.threshold))
        object.__setattr__(self, "target", frozenset(self.target))
        object.__setattr__(self, "edges", frozenset(self.edges))
        if self.kind in _WINDOWED and (self.length is None or self.length < 1):
            raise ValueError(f"{self.kind.value} needs a window length >= 1")
        if self.kind is Kind.BOUNDED_REACH and (self.bound is None or self.bound < 0):
            raise ValueError("BoundedReach needs a step bound >= 0")

    @classmethod
    def gw(cls, length, lam):
        return cls(Kind.GW, length, lam)

    @classmethod
    def dir_fwmp(cls, length, lam):
        return cls(Kind.DIR_FWMP, length, lam)

    @classmethod
    def fwmp(cls, length, lam):
        return cls(Kind.FWMP, length, lam)

    @classmethod
    def dir_bwmp(cls, lam):
        return cls(Kind.DIR_BWMP, None, lam)

    @classmethod
    def bwmp(cls, lam):
        return cls(Kind.BWMP, None, lam)

    @classmethod
    def mp(cls, lam):
        return cls(Kind.MP, None, lam)


# lassos ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    stem: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("a lasso needs a non-empty cycle")

    def check(self, m: Mdp) -> None:
        seq = self.stem + self.cycle + self.cycle[:1]
        for u, v in zip(seq, seq[1:]):
            if u not in m or v not in m or not m.has_edge(u, v):
                raise MdpError(f"lasso uses a missing edge {u}->{v}")

    def vertex_at(self, i: int) -> int:
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    def prefix(self, n: int) -> list[int]:
        """The first ``n`` vertices of the play."""
        return [self.vertex_at(i) for i in range(n)]

    @classmethod
    def parse(cls, m: Mdp, text: str) -> "Lasso":
        """Parse ``"stem|cycle"`` with comma-separated vertex names."""
        if "|" not in text:
            raise ValueError("lasso literal must look like 'a,b|c,d'")
        left, right = text.split("|", 1)
        names = lambda part: [p.strip() for p in part.split(",") if p.strip()]
        lasso = cls(tuple(m.vertex(n) for n in names(left)),
                    tuple(m.vertex(n) for n in names(right)))
        lasso.check(m)
        return lasso

    def format(self, m: Mdp) -> str:
        return ",".join(m.name(v) for v in self.stem) + "|" + ",".join(m.name(v) for v in self.cycle)


def _edge_weights(m: Mdp, path: Sequence[int], scaled: ScaledPayoffs) -> list[int]:
    return [scaled[m.edge_between(u, v).id] for u, v in zip(path, path[1:])]


def _monitor_periodic(m, lasso, scaled, length):
    """Run the monitor over the stem and then cycle iterations until the
    state at the start of an iteration repeats.

    Returns (overflow seen anywhere, overflow inside the periodic part).
    """
    stem_path = list(lasso.stem) + [lasso.cycle[0]]
    st = RESET
    any_overflow = False
    for st in run_monitor(_edge_weights(m, stem_path, scaled), length, RESET):
        any_overflow |= st.overflow
    cyc_w = _edge_weights(m, list(lasso.cycle) + [lasso.cycle[0]], scaled)
    seen = {}
    history = []
    start = st._replace(overflow=False)
    while start not in seen:
        seen[start] = len(history)
        flagged = False
        cur = start
        for cur in run_monitor(cyc_w, length, start):
            flagged |= cur.overflow
        history.append(flagged)
        any_overflow |= flagged
        start = cur._replace(overflow=False)
    periodic = any(history[seen[start]:])
    return any_overflow, periodic


def lasso_window_bound(m: Mdp, lasso: Lasso, scaled: ScaledPayoffs) -> int:
    """Cycle-local analogue of the bounded-window reduction:
    ``k * (k * w + 1)`` for cycle length ``k`` and largest scaled |payoff| ``w``
    on the cycle."""
    k = len(lasso.cycle)
    w = max((abs(x) for x in _edge_weights(m, list(lasso.cycle) + [lasso.cycle[0]], scaled)),
            default=0)
    return k * (k * w + 1)


def eval_on_lasso(m: Mdp, lasso: Lasso, obj: ObjectiveSpec) -> bool:
    """Exact truth value of ``obj`` on the ultimately periodic play ``lasso``."""
    lasso.check(m)
    kind = obj.kind
    if kind in _PAYOFF:
        scaled = scale_payoffs(m, obj.threshold)
    if kind is Kind.GW:
        path = lasso.prefix(obj.length + 1)
        return any(st.c == 0 and not st.overflow
                   for st in run_monitor(_edge_weights(m, path, scaled), obj.length))
    if kind is Kind.DIR_FWMP:
        return not _monitor_periodic(m, lasso, scaled, obj.length)[0]
    if kind is Kind.FWMP:
        return not _monitor_periodic(m, lasso, scaled, obj.length)[1]
    if kind is Kind.BWMP:
        bound = lasso_window_bound(m, lasso, scaled)
        return not _monitor_periodic(m, lasso, scaled, bound)[1]
    if kind is Kind.DIR_BWMP:
        return _all_windows_close(m, lasso, scaled)
    if kind is Kind.MP:
        return _cycle_sum(m, lasso, scaled) >= 0
    if kind is Kind.TP:
        return _total_payoff_holds(m, lasso, obj.threshold)
    visits = list(lasso.stem) + list(lasso.cycle)
    if kind is Kind.REACH:
        return any(v in obj.target for v in visits)
    if kind is Kind.SAFE:
        return all(v in obj.target for v in visits)
    if kind is Kind.BUCHI:
        return any(v in obj.target for v in lasso.cycle)
    if kind is Kind.CO_BUCHI:
        return all(v in obj.target for v in lasso.cycle)
    if kind is Kind.BOUNDED_REACH:
        return any(v in obj.target for v in lasso.prefix(obj.bound + 1))
    if kind is Kind.EDGE_RESTRICTED_REACH:
        return _edge_restricted_reach(m, lasso, obj)
    raise ValueError(f"unsupported objective {kind}")


def _cycle_sum(m, lasso, scaled) -> int:
    return sum(_edge_weights(m, list(lasso.cycle) + [lasso.cycle[0]], scaled))


def _all_windows_close(m, lasso, scaled) -> bool:
    total = _cycle_sum(m, lasso, scaled)
    if total > 0:
        return True
    if total < 0:
        return False
    # Zero drift: sums repeat with the cycle, so any window closes within the
    # stem plus one full period or never.
    horizon = len(lasso.stem) + 2 * len(lasso.cycle) + 1
    weights = _edge_weights(m, lasso.prefix(horizon), scaled)
    for i in range(len(lasso.stem) + len(lasso.cycle)):
        acc = 0
        for w in weights[i:]:
            acc += w
            if acc >= 0:
                break
        else:
            return False
    return True


def _total_payoff_holds(m, lasso, lam: Fraction) -> bool:
    path = lasso.prefix(len(lasso.stem) + len(lasso.cycle) + 1)
    raw = [m.edge_between(u, v).payoff for u, v in zip(path, path[1:])]
    stem_part = raw[:len(lasso.stem)]
    cyc = raw[len(lasso.stem):]
    drift = sum(cyc)
    if drift > 0:
        return True
    if drift < 0:
        return False
    acc = sum(stem_part)
    peak = acc
    for w in cyc:
        acc += w
        peak = max(peak, acc)
    return peak >= lam


def _edge_restricted_reach(m, lasso, obj) -> bool:
    n = len(lasso.stem) + len(lasso.cycle)
    path = lasso.prefix(n + 1)
    for i, v in enumerate(path):
        if v in obj.target:
            return True
        if i + 1 < len(path) and m.edge_between(v, path[i + 1]).id not in obj.edges:
            return False
    return False


# brute force ------------------------------------------------------------------------

def window_closes(weights: Sequence[int], start: int, length: int) -> bool | None:
    """Does the window opened at ``start`` close within ``length`` steps?

    ``None`` when the prefix ends before the deadline without closing.
    """
    acc = 0
    for k in range(length):
        if start + k >= len(weights):
            return None
        acc += weights[start + k]
        if acc >= 0:
            return True
    return False


def brute_force_dir_violations(weights: Sequence[int], length: int) -> list[int]:
    """Start positions of windows that stay open for ``length`` steps."""
    return [i for i in range(len(weights)) if window_closes(weights, i, length) is False]


def brute_force_lasso(m: Mdp, lasso: Lasso, length: int, lam) -> tuple[bool, bool]:
    """(DirFWMP, FWMP) on a lasso by checking every window explicitly."""
    scaled = scale_payoffs(m, lam)
    stem, k = len(lasso.stem), len(lasso.cycle)
    horizon = stem + 3 * k + length + 1
    weights = _edge_weights(m, lasso.prefix(horizon), scaled)
    dir_ok = all(window_closes(weights, i, length) for i in range(stem + k))
    periodic_ok = all(window_closes(weights, i, length) for i in range(stem, stem + k))
    return dir_ok, periodic_ok


def inclusion_chain_check(m: Mdp, lasso: Lasso, length: int, lam) -> bool:
    """Check the inclusion chain between the window objectives on one lasso,
    plus monotonicity in the window length and antitonicity in the threshold."""
    lam = Fraction(lam)
    ev = lambda spec: eval_on_lasso(m, lasso, spec)
    dfw = ev(ObjectiveSpec.dir_fwmp(length, lam))
    fw = ev(ObjectiveSpec.fwmp(length, lam))
    dbw = ev(ObjectiveSpec.dir_bwmp(lam))
    bw = ev(ObjectiveSpec.bwmp(lam))
    mp = ev(ObjectiveSpec.mp(lam))
    implied = lambda a, b: (not a) or b
    chain = (implied(dfw, fw) and implied(fw, bw) and implied(bw, mp)
             and implied(dfw, dbw) and implied(dbw, bw))
    longer = (implied(fw, ev(ObjectiveSpec.fwmp(length + 1, lam)))
              and implied(dfw, ev(ObjectiveSpec.dir_fwmp(length + 1, lam))))
    lower = lam - 1
    easier = (implied(fw, ev(ObjectiveSpec.fwmp(length, lower)))
              and implied(dfw, ev(ObjectiveSpec.dir_fwmp(length, lower)))
              and implied(mp, ev(ObjectiveSpec.mp(lower))))
    return chain and longer and easier
