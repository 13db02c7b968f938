"""Named structural checks run by ``letq props`` and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass

from letq import structure
from letq.topology import Topology, a_bits, b_bits, cluster_violations, coordinate_bit, is_matching

EXACT_MIN_ORDER_LIMIT = 1 << 7


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def coordinates(s: int, t: int) -> list[str]:
    """Coordinates that may be fixed to split LeTQ(s, t) in two."""
    out = [f"a{i}" for i in range(s)] if s >= 2 else []
    return out + ([f"b{j}" for j in range(t)] if t >= 2 else [])


def describe(topo: Topology) -> str:
    degs = set(int(d) for d in topo.degrees)
    comps = structure.components(topo, ())
    if degs == {2} and len(comps) == 1:
        return f"single {topo.order}-cycle"
    return f"{topo.order} vertices, {topo.size} edges, degrees {sorted(degs)}, {len(comps)} component(s)"


def _degree_law(topo: Topology) -> Check:
    p = topo.params
    bad = [topo.label(v) for v in range(topo.order)
           if topo.degrees[v] != (p.t + 1 if v & 1 else p.s + 1)]
    return Check("degree-law", not bad, f"wrong degree at {bad[:4]}" if bad else "")


def _symmetric(topo: Topology) -> Check:
    adj = topo.adjacency
    bad = [v for v in range(topo.order) if v in adj[v] or any(v not in adj[w] for w in adj[v])]
    return Check("symmetric-irreflexive", not bad,
                 f"violations at {[topo.label(v) for v in bad[:4]]}" if bad else "")


def _cross_matching(topo: Topology) -> Check:
    bad = []
    for v in range(topo.order):
        across = [w for w in topo.neighbors(v) if (w & 1) != (v & 1)]
        if across != [v ^ 1]:
            bad.append(topo.label(v))
    return Check("cross-matching", not bad, f"bad cross neighbours at {bad[:4]}" if bad else "")


def _cross_spread(topo: Topology) -> Check:
    """Distinct vertices of one cluster have cross neighbours in distinct clusters."""
    p = topo.params
    seen: dict[tuple[int, int], set[int]] = {}
    for v in range(topo.order):
        w = v ^ 1
        key = (v & 1, b_bits(v, p) if v & 1 == 0 else a_bits(v, p))
        target = a_bits(w, p) if w & 1 else b_bits(w, p)
        seen.setdefault(key, set())
        if target in seen[key]:
            return Check("cross-spread", False, f"cluster {key} sends two cross edges to one cluster")
        seen[key].add(target)
    return Check("cross-spread", True)


def _decomposition(topo: Topology, coord: str) -> Check:
    p = topo.params
    bit = coordinate_bit(coord, p)
    crossing = [(u, v) for u, v in topo.edges() if (u >> bit) & 1 != (v >> bit) & 1]
    want = 1 << (p.s + p.t - 1)
    ok = len(crossing) == want and is_matching(crossing)
    detail = "" if ok else (f"{len(crossing)} crossing edges (expected {want}), "
                            f"matching={is_matching(crossing)}")
    return Check(f"decomposition[{coord}]", ok, detail)


def _min_order(topo: Topology, g: int) -> Check:
    if topo.order > EXACT_MIN_ORDER_LIMIT:
        return Check(f"min-order[g={g}]", True, "skipped: exhaustive search limited to 128 vertices")
    res = structure.min_order_with_min_degree(topo, g)
    ok = res.order is not None and res.order >= (1 << g)
    return Check(f"min-order[g={g}]", ok, f"smallest order {res.order}, bound {1 << g}")


def run_suite(topo: Topology, min_order: bool = True) -> list[Check]:
    p = topo.params
    checks = [
        Check("vertex-count", topo.order == 1 << p.width, f"{topo.order} vertices"),
        _symmetric(topo),
        _degree_law(topo),
        _cross_matching(topo),
        _cross_spread(topo),
    ]
    problems = cluster_violations(topo)
    checks.append(Check("cluster-partition", not problems, "; ".join(problems[:3])))
    checks.extend(_decomposition(topo, c) for c in coordinates(p.s, p.t))
    checks.append(Check("triangle-free", structure.is_triangle_free(topo)))
    mcn = structure.max_common_neighbors(topo)
    checks.append(Check("no-K23", mcn <= 2, f"max common neighbours {mcn}"))
    if min_order:
        checks.extend(_min_order(topo, g) for g in range(0, min(p.s, p.t) + 1))
    return checks
