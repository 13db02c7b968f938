"""Structural oracles, good-neighbor fault sets and R^g-vertex-connectivity."""
from __future__ import annotations

import os
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from letq import kernels
from letq.errors import ParameterError
from letq.topology import CubeParams, Topology, as_params, letq_neighbors

EXACT_ORDER_LIMIT = 1 << 9


def default_budget() -> int:
    return int(os.environ.get("LETQ_BUDGET", str(10**8)))


def _fault_mask(topo: Topology, faults: Iterable[int]) -> np.ndarray:
    return topo.mask(faults)


# ---------------------------------------------------------------------------
# forbidden subgraphs

def is_triangle_free(topo: Topology) -> bool:
    adj = topo.adjacency
    return all(not (adj[u] & adj[v]) for u, v in topo.edges())


def max_common_neighbors(topo: Topology) -> int:
    """max |N(u) & N(v)| over unordered pairs u != v."""
    counts: Counter = Counter()
    for w in range(topo.order):
        nb = topo.neighbors(w)
        for i, u in enumerate(nb):
            for v in nb[i + 1:]:
                counts[u, v] += 1
    return max(counts.values(), default=0)


# ---------------------------------------------------------------------------
# subgraphs of minimum degree >= g

@dataclass(frozen=True)
class MinOrderResult:
    order: int | None
    certified: bool
    witness: frozenset[int] = frozenset()
    explored: int = 0


def _min_degree_in(adj, members: set[int]) -> int:
    return min(len(adj[v] & members) for v in members)


def _smallest_dense_set(topo: Topology, g: int, limit: int, budget: int, seed: set[int] | None = None):
    """Smallest connected vertex set of size <= limit whose induced min degree is >= g.

    Enumerates connected sets rooted at their smallest vertex (ESU scheme), so
    every connected set is visited once.  A known dense ``seed`` caps the
    search at sizes below it.  Returns ``(best, explored, complete)``.
    """
    adj = topo.adjacency
    eligible = {v for v in range(topo.order) if len(adj[v]) >= g}
    best: set[int] | None = set(seed) if seed else None
    explored = 0
    bound = min(limit, len(seed) - 1) if seed else limit

    def grow(members: list[int], member_set: set[int], closed: set[int], ext: set[int], root: int) -> bool:
        nonlocal best, explored, bound
        explored += 1
        if explored > budget:
            return False
        deficit = max(g - len(adj[v] & member_set) for v in members)
        if deficit <= 0:
            if best is None or len(members) < len(best):
                best = set(members)
                bound = len(members) - 1
            return True
        if len(members) + deficit > bound:
            return True
        ext = set(ext)
        while ext:
            w = min(ext)
            ext.discard(w)
            fresh = {x for x in adj[w] if x > root and x in eligible and x not in closed}
            if not grow(members + [w], member_set | {w}, closed | adj[w] | {w}, ext | fresh, root):
                return False
        return True

    for root in sorted(eligible):
        start_ext = {x for x in adj[root] if x > root and x in eligible}
        if not grow([root], {root}, set(adj[root]) | {root}, start_ext, root):
            return best, explored, False
    return best, explored, True


def min_order_with_min_degree(topo: Topology, g: int, budget: int | None = None) -> MinOrderResult:
    """Fewest vertices of a subgraph with minimum degree >= g.

    Exhaustive for topologies up to 2**9 vertices.  Above that, or if the
    budget runs out, returns the bound 2**g with the core set of
    :func:`good_neighbor_fault_set` as an attaining witness (``certified`` is
    False in that case).
    """
    if g < 0:
        raise ParameterError(f"g must be >= 0, got {g}")
    budget = default_budget() if budget is None else budget
    seed = _dense_seed(topo, g)
    if topo.order <= EXACT_ORDER_LIMIT:
        best, explored, complete = _smallest_dense_set(topo, g, topo.order, budget, seed)
        if complete:
            if best is None:
                return MinOrderResult(None, True, frozenset(), explored)
            return MinOrderResult(len(best), True, frozenset(best), explored)
    else:
        explored = 0
    if seed is not None:
        return MinOrderResult(len(seed), False, frozenset(seed), explored)
    return MinOrderResult(None, False, frozenset(), explored)


def _dense_seed(topo: Topology, g: int) -> set[int] | None:
    """The core A of the fault-set construction, if it really has min degree >= g here."""
    p = topo.params
    if topo.family != "LeTQ" or p is None or g > p.s:
        return None
    core = set(_core(p, g))
    if g and _min_degree_in(topo.adjacency, core) < g:
        return None
    return core


# ---------------------------------------------------------------------------
# good-neighbor fault sets

@dataclass(frozen=True)
class GoodNeighborWitness:
    """Core A, its open neighbourhood F1 = N(A) and closed one F2 = N[A]."""

    params: CubeParams
    g: int
    core: frozenset[int]
    boundary: frozenset[int]
    closed: frozenset[int]


def _core(p: CubeParams, g: int) -> frozenset[int]:
    shift = p.t + 1 + (p.s - g)
    return frozenset(x << shift for x in range(1 << g))


def check_range(p: CubeParams, g: int) -> None:
    if p.s > p.t:
        raise ParameterError(f"need s <= t, got LeTQ({p.s},{p.t}); normalise with swap_isomorphism first")
    if not 0 <= g <= p.s:
        raise ParameterError(f"need 0 <= g <= s={p.s}, got g={g}")


def good_neighbor_fault_set(params, g: int) -> GoodNeighborWitness:
    p = as_params(params)
    check_range(p, g)
    core = _core(p, g)
    closed = set(core)
    for v in core:
        closed |= letq_neighbors(v, p)
    closed_fs = frozenset(closed)
    return GoodNeighborWitness(p, g, core, closed_fs - core, closed_fs)


def is_g_good_neighbor_set(topo: Topology, faults: Iterable[int], g: int) -> bool:
    """True iff every vertex outside ``faults`` keeps at least g neighbours outside it."""
    return bool(kernels.min_degree(topo.nbr, _fault_mask(topo, faults))[0] >= g)


def is_rg_cut(topo: Topology, faults: Iterable[int], g: int) -> bool:
    mask = _fault_mask(topo, faults)
    if kernels.min_degree(topo.nbr, mask)[0] < g:
        return False
    return bool(kernels.disconnected(topo.nbr, mask)[0])


def components(topo: Topology, faults: Iterable[int]) -> list[list[int]]:
    """Components of topo - faults, each sorted, ordered by smallest vertex."""
    removed = set(faults)
    seen = set(removed)
    out = []
    for start in range(topo.order):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in topo.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


# ---------------------------------------------------------------------------
# R^g-vertex-connectivity

def kappa_g_formula(params, g: int) -> int:
    p = as_params(params)
    check_range(p, g)
    return (1 << g) * (p.s - g + 1)


@dataclass(frozen=True)
class CutReport:
    g: int
    formula_value: int | None
    certified_value: int | None
    lower_bound: int
    witness_cut: frozenset[int]
    components_after: tuple[int, ...]
    partial: bool = False
    checked: int = 0
    notes: list[str] = field(default_factory=list, compare=False)

    def to_json(self, topo: Topology) -> dict:
        return {
            "g": self.g,
            "formula": self.formula_value,
            "certified": self.certified_value,
            "lower_bound": self.lower_bound,
            "partial": self.partial,
            "checked": self.checked,
            "witness": topo.labels(self.witness_cut),
            "components": list(self.components_after),
        }


def kappa_g_bruteforce(topo: Topology, g: int, budget: int | None = None) -> CutReport:
    """Smallest R^g-vertex-cut by exhaustive search in increasing size.

    Sizes below the returned value are fully enumerated, so the result is a
    certificate.  When the budget runs out the report is ``partial`` and
    ``lower_bound`` says which sizes were ruled out.
    """
    budget = default_budget() if budget is None else budget
    formula = None
    if topo.family == "LeTQ" and topo.params is not None:
        p = topo.params
        if p.s <= p.t and 0 <= g <= p.s:
            formula = kappa_g_formula(p, g)
    checked = 0
    for k in range(1, topo.order - 1):
        found, subset, used, done = kernels.kappa_scan(topo.nbr, k, g, budget - checked)
        checked += used
        if found:
            cut = frozenset(int(x) for x in subset)
            sizes = tuple(len(c) for c in components(topo, cut))
            return CutReport(g, formula, k, k, cut, sizes, False, checked)
        if not done:
            return CutReport(g, formula, None, k, frozenset(), (), True, checked,
                             [f"budget of {budget} subsets exhausted while scanning size {k}"])
    return CutReport(g, formula, None, topo.order, frozenset(), (), False, checked,
                     ["no R^g-vertex-cut exists"])
