"""Text format for MDPs.

::

    mdp v1
    # comment
    vertex v1 p1
    vertex v2 prob
    edge v1 v2 payoff=-1
    edge v2 v1 payoff=-1 prob=1/2

Rationals are integers or ``a/b``.  Vertex and edge ids follow file order.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .mdp import Mdp, MdpError

HEADER = "mdp v1"
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")
_NAME = re.compile(r"^[A-Za-z0-9_~^.\-]+$")


class MdpSyntaxError(MdpError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_rational(text: str, line: int = 0) -> Fraction:
    if not _RATIONAL.match(text):
        raise MdpSyntaxError(line, f"not a rational: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise MdpSyntaxError(line, f"zero denominator in {text!r}") from None


def parse_mdp(text: str) -> Mdp:
    vertices, edges = [], []
    seen = set()
    header = False
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line != HEADER:
                raise MdpSyntaxError(no, f"expected header {HEADER!r}")
            header = True
            continue
        words = line.split()
        if words[0] == "vertex":
            if len(words) != 3 or words[2] not in ("p1", "prob"):
                raise MdpSyntaxError(no, "expected 'vertex <name> p1|prob'")
            if not _NAME.match(words[1]):
                raise MdpSyntaxError(no, f"bad vertex name {words[1]!r}")
            if words[1] in seen:
                raise MdpSyntaxError(no, f"duplicate vertex {words[1]!r}")
            seen.add(words[1])
            vertices.append((words[1], words[2]))
        elif words[0] == "edge":
            if len(words) not in (4, 5):
                raise MdpSyntaxError(no, "expected 'edge <from> <to> payoff=<rat> [prob=<rat>]'")
            src, dst = words[1], words[2]
            for v in (src, dst):
                if v not in seen:
                    raise MdpSyntaxError(no, f"unknown vertex {v!r}")
            attrs = {}
            for item in words[3:]:
                key, _, value = item.partition("=")
                if key not in ("payoff", "prob") or key in attrs or not value:
                    raise MdpSyntaxError(no, f"bad attribute {item!r}")
                attrs[key] = parse_rational(value, no)
            if "payoff" not in attrs:
                raise MdpSyntaxError(no, "edge without payoff")
            if "prob" in attrs:
                edges.append((src, dst, attrs["payoff"], attrs["prob"]))
            else:
                edges.append((src, dst, attrs["payoff"]))
        else:
            raise MdpSyntaxError(no, f"unknown directive {words[0]!r}")
    if not header:
        raise MdpSyntaxError(1, f"empty input, expected header {HEADER!r}")
    if not vertices:
        raise MdpSyntaxError(1, "no vertices")
    return Mdp.build(vertices, edges)


def read_mdp(path) -> Mdp:
    return parse_mdp(Path(path).read_text())


def format_mdp(m: Mdp) -> str:
    lines = [HEADER]
    for v in sorted(m.vertices):
        lines.append(f"vertex {m.name(v)} {m.owner(v).value}")
    for e in m.edges:
        item = f"edge {m.name(e.src)} {m.name(e.dst)} payoff={e.payoff}"
        if m.is_random(e.src):
            item += f" prob={e.prob}"
        lines.append(item)
    return "\n".join(lines) + "\n"
