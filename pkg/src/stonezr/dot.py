"""Deterministic Graphviz DOT output for posets, lattices and models."""

from __future__ import annotations

from .field import Place
from .lattice import Lattice
from .model import DedekindModel, witness_places
from .topology import FinitePoset
from .zr import ZRSpace


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def poset_dot(p: FinitePoset, name: str = "poset", labels: dict[str, str] | None = None) -> str:
    """Nodes are points; each covering pair is drawn from the generic point to its specialization."""
    labels = labels or {}
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;"]
    for x in p.points:
        extra = f" [label={_q(labels[x])}]" if x in labels else ""
        lines.append(f"  {_q(x)}{extra};")
    for a, b in sorted(p.relations()):
        lines.append(f"  {_q(b)} -> {_q(a)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def lattice_dot(l: Lattice, name: str = "lattice") -> str:
    """Hasse diagram, edges drawn upwards from ``a`` to each cover ``b > a``."""
    elems = list(l)
    names = {e.points: str(e) for e in elems}
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;"]
    for e in elems:
        lines.append(f"  {_q(names[e.points])};")
    for a in elems:
        for b in elems:
            if a < b and not any(a < c < b for c in elems):
                lines.append(f"  {_q(names[a.points])} -> {_q(names[b.points])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_dot(m: DedekindModel, bound: int = 2, name: str | None = None, max_nodes: int = 64) -> str:
    """The model's points over places of height at most ``bound``.

    Closed points of an ``all_except`` model outside the bound are elided;
    the graph then carries a marker node saying so.  The same applies when
    more than ``max_nodes`` points would be drawn.
    """
    k = m.field
    if m.is_constant:
        points: list[tuple[str, Place]] = []
    elif m.is_finite:
        points = list(m.points)
    else:
        points = []
        for v in witness_places(k, bound)[:-1]:
            points.extend((pid, v) for pid in m.points_with_place(v))
        for pid, v in m.extra:
            if (pid, v) not in points:
                points.append((pid, v))
    truncated = not m.is_finite
    if len(points) > max_nodes:
        points, truncated = points[:max_nodes], True
    lines = [f"digraph {_q(name or str(m))} {{", "  rankdir=TB;"]
    lines.append(f"  {_q(m.generic)} [label={_q(m.generic + ' : trivial')}];")
    for pid, v in points:
        lines.append(f"  {_q(pid)} [label={_q(pid + ' : ' + v.label(k.var))}];")
    if truncated:
        lines.append('  "…" [shape=plaintext, label="… further places elided"];')
    for pid, _ in points:
        lines.append(f"  {_q(m.generic)} -> {_q(pid)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def zr_space_dot(z: ZRSpace, bound: int = 2, max_nodes: int = 64) -> str:
    return model_dot(z.model, bound=bound, name=z.model.label or f"ZR({z.base})", max_nodes=max_nodes)


def export_dot(obj: object, bound: int = 2) -> str:
    if isinstance(obj, FinitePoset):
        return poset_dot(obj)
    if isinstance(obj, Lattice):
        return lattice_dot(obj)
    if isinstance(obj, ZRSpace):
        return zr_space_dot(obj, bound)
    if isinstance(obj, DedekindModel):
        return model_dot(obj, bound)
    raise TypeError(f"no DOT rendering for {type(obj).__name__}")
