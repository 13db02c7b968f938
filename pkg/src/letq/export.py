"""Text serialisations of topologies and label files."""
from __future__ import annotations

from typing import Iterable

from letq.errors import InputError
from letq.topology import CubeParams, Topology, _pad, parse_label


def _sorted_edges(topo: Topology) -> list[tuple[str, str]]:
    pairs = []
    for u, v in topo.edges():
        a, b = topo.label(u), topo.label(v)
        pairs.append((a, b) if a < b else (b, a))
    return sorted(pairs)


def to_edge_list(topo: Topology) -> str:
    return "".join(f"{a} {b}\n" for a, b in _sorted_edges(topo))


def to_json(topo: Topology) -> dict:
    p = topo.params
    return {
        "family": topo.family,
        "s": p.s if p else None,
        "t": p.t if p else None,
        "n": topo.width if topo.family == "LTQ" else None,
        "vertices": sorted(topo.label(v) for v in range(topo.order)),
        "edges": [list(e) for e in _sorted_edges(topo)],
    }


def to_dot(topo: Topology, clusters: bool = False) -> str:
    lines = [f'graph "{_name(topo)}" {{']
    if clusters and topo.family == "LeTQ":
        from letq.topology import cluster_partition, render

        part = cluster_partition(topo)
        p = topo.params
        for kind, groups, width in (("L", part.class0, p.t), ("R", part.class1, p.s)):
            for i, members in enumerate(groups):
                lines.append(f'  subgraph "cluster_{kind}{render(i, width)}" {{')
                lines.extend(f'    "{x}";' for x in topo.labels(members))
                lines.append("  }")
    else:
        lines.extend(f'  "{topo.label(v)}";' for v in range(topo.order))
    lines.extend(f'  "{a}" -- "{b}";' for a, b in _sorted_edges(topo))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _name(topo: Topology) -> str:
    if topo.family == "LeTQ" and topo.params:
        return f"LeTQ({topo.params.s},{topo.params.t})"
    if topo.family == "LTQ":
        return f"LTQ_{topo.width}"
    return topo.family


def from_edge_list(text: str, params: CubeParams) -> Topology:
    """Read "label label" lines as a graph claimed to be LeTQ(s, t).

    Vertices are the full label space of the claimed parameters, so missing
    vertices show up as isolated ones.  Structural checks then run on it
    exactly as on a built topology.
    """
    width = params.width
    adj: list[set[int]] = [set() for _ in range(1 << width)]
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected two labels, got {line!r}")
        u, v = (parse_label(x, width) for x in parts)
        if u == v:
            raise InputError(f"line {lineno}: self-loop at {parts[0]}")
        adj[u].add(v)
        adj[v].add(u)
    return Topology("LeTQ", _pad(adj), width, params)


def read_labels(text: str) -> list[str]:
    """Newline- or comma-delimited labels; blank lines and # comments ignored."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        out.extend(x.strip() for x in line.split(",") if x.strip())
    return out


def write_labels(labels: Iterable[str]) -> str:
    return "".join(f"{x}\n" for x in labels)
