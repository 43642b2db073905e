"""Bundled example MDPs with sidecar files of expected results."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from ..io import parse_mdp
from ..mdp import Mdp

NAMES = ("fig1_naive", "fig3_sdab", "fig4_posreach", "fig5_memory_fwmp", "fig6_memory_bwmp")


def _text(filename: str) -> str:
    return resources.files(__name__).joinpath(filename).read_text()


def load(name: str) -> Mdp:
    if name not in NAMES:
        raise KeyError(f"unknown instance {name!r}; known: {', '.join(NAMES)}")
    return parse_mdp(_text(f"{name}.mdp"))


def source(name: str) -> str:
    return _text(f"{name}.mdp")


def expected(name: str) -> dict:
    return json.loads(_text(f"{name}.expected.json"))


def chain_m_p(m: int, p, alpha=0, beta=1) -> Mdp:
    """Chain of ``m`` coin tosses: each probabilistic ``v_i`` moves on to
    ``u_{i+1}`` with probability ``p`` and falls back to ``u_1`` otherwise.
    ``u_1`` loops with payoff ``alpha``, ``u_{m+1}`` with payoff ``beta`` and
    every other edge pays ``alpha - 1``."""
    p, alpha, beta = Fraction(p), Fraction(alpha), Fraction(beta)
    if m < 1 or not 0 < p < 1:
        raise ValueError("need m >= 1 and 0 < p < 1")
    vertices = [(f"u{i}", "p1") for i in range(1, m + 2)]
    vertices += [(f"v{i}", "prob") for i in range(1, m + 1)]
    low = alpha - 1
    edges = [("u1", "u1", alpha), (f"u{m + 1}", f"u{m + 1}", beta)]
    for i in range(1, m + 1):
        edges.append((f"u{i}", f"v{i}", low))
        edges.append((f"v{i}", "u1", low, 1 - p))
        edges.append((f"v{i}", f"u{i + 1}", low, p))
    return Mdp.build(vertices, edges)
