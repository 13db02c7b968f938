"""Locally twisted cubes LTQ_n and locally exchanged twisted cubes LeTQ(s, t).

Vertices are packed into integers.  For LeTQ(s, t) bit 0 holds the class
bit ``c``, bits ``1..t`` hold ``b_0..b_{t-1}`` and bits ``t+1..t+s`` hold
``a_0..a_{s-1}``, so the usual text rendering ``a_{s-1}..a_0 b_{t-1}..b_0 c``
is just the zero-padded binary form of the integer.  For LTQ_n bit ``k``
holds ``u_k``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from letq.errors import CapacityError, InputError, ParameterError, UnsupportedFamilyError

LABEL_LIMIT = 62
MAX_BUILD_WIDTH = int(os.environ.get("LETQ_MAX_WIDTH", "20"))
ISO_SEARCH_LIMIT = 1 << 13

Vertex = int | str


@dataclass(frozen=True)
class CubeParams:
    s: int
    t: int

    def __post_init__(self):
        for name, value in (("s", self.s), ("t", self.t)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        if self.s + self.t + 1 > LABEL_LIMIT:
            raise CapacityError(f"label width {self.s + self.t + 1} exceeds {LABEL_LIMIT}")

    @property
    def width(self) -> int:
        return self.s + self.t + 1

    def swapped(self) -> CubeParams:
        return CubeParams(self.t, self.s)

    def normalized(self) -> tuple[CubeParams, bool]:
        """Return (params with s <= t, whether a swap was needed)."""
        if self.s <= self.t:
            return self, False
        return self.swapped(), True


def as_params(params) -> CubeParams:
    if isinstance(params, CubeParams):
        return params
    s, t = params
    return CubeParams(int(s), int(t))


# ---------------------------------------------------------------------------
# labels

def render(v: int, width: int) -> str:
    return format(int(v), f"0{width}b")


def parse_label(text: str, width: int) -> int:
    text = text.strip()
    if len(text) != width or any(ch not in "01" for ch in text):
        raise InputError(f"{text!r} is not a {width}-bit label")
    return int(text, 2)


def _coerce(u: Vertex, width: int) -> int:
    if isinstance(u, str):
        if len(u) != width:
            raise ParameterError(f"label {u!r} has width {len(u)}, expected {width}")
        return parse_label(u, width)
    u = int(u)
    if u < 0 or u >> width:
        raise ParameterError(f"vertex {u} does not fit in {width} bits")
    return u


def _same_kind(u: Vertex, out: Iterable[int], width: int):
    if isinstance(u, str):
        return frozenset(render(v, width) for v in out)
    return frozenset(out)


# ---------------------------------------------------------------------------
# adjacency rules

def _twisted_flips(x: int, n: int) -> list[int]:
    """Bit masks (within an n-bit block x) of the LTQ_n neighbours of x."""
    flips = [1 << k for k in range(min(n, 2))]
    for k in range(2, n):
        flips.append((3 << (k - 1)) if x & 1 else (1 << k))
    return flips


def ltq_neighbors(u: Vertex, n: int) -> frozenset:
    """Neighbours of ``u`` in LTQ_n."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    x = _coerce(u, n)
    return _same_kind(u, (x ^ f for f in _twisted_flips(x, n)), n)


def letq_neighbors(u: Vertex, params) -> frozenset:
    """Neighbours of ``u`` in LeTQ(s, t)."""
    p = as_params(params)
    x = _coerce(u, p.width)
    out = [x ^ 1]
    if x & 1:
        block = (x >> 1) & ((1 << p.t) - 1)
        out.extend(x ^ (f << 1) for f in _twisted_flips(block, p.t))
    else:
        block = x >> (p.t + 1)
        out.extend(x ^ (f << (p.t + 1)) for f in _twisted_flips(block, p.s))
    return _same_kind(u, out, p.width)


def letq_adjacent(u: int, v: int, params) -> bool:
    """Pairwise predicate straight from the rule list; used for debug builds."""
    p = as_params(params)
    diff = u ^ v
    if diff == 1:
        return True
    if (u & 1) != (v & 1) or diff == 0:
        return False
    if u & 1:
        off, n = 1, p.t
        block = (u >> 1) & ((1 << p.t) - 1)
    else:
        off, n = p.t + 1, p.s
        block = u >> (p.t + 1)
    if diff & ((1 << off) - 1) or diff >> (off + n):
        return False
    d = diff >> off
    if d in (1, 2) and d < (1 << n):
        return True
    for k in range(2, n):
        if block & 1 and d == 3 << (k - 1):
            return True
        if not block & 1 and d == 1 << k:
            return True
    return False


def cross_neighbor(u: Vertex) -> Vertex:
    """The unique neighbour of ``u`` across the L/R boundary (class bit flipped)."""
    if isinstance(u, str):
        return u[:-1] + ("1" if u[-1] == "0" else "0")
    return int(u) ^ 1


# ---------------------------------------------------------------------------
# topology

@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable undirected graph with a padded neighbour table.

    ``nbr[v]`` lists the neighbours of ``v`` in increasing order followed by
    ``-1`` padding.
    """

    family: str
    nbr: np.ndarray
    width: int
    params: CubeParams | None = None
    names: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.nbr.setflags(write=False)

    @property
    def order(self) -> int:
        return self.nbr.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = (self.nbr >= 0).sum(axis=1)
        deg.setflags(write=False)
        return deg

    @property
    def size(self) -> int:
        return int(self.degrees.sum()) // 2

    def neighbors(self, v: int) -> tuple[int, ...]:
        row = self.nbr[v]
        return tuple(int(w) for w in row[row >= 0])

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(self.neighbors(v)) for v in range(self.order))

    def label(self, v: int) -> str:
        if self.names is not None:
            return self.names[v]
        return render(v, self.width)

    def labels(self, vs: Iterable[int]) -> list[str]:
        return sorted(self.label(v) for v in vs)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {self.label(v): v for v in range(self.order)}

    def vertex(self, label: Vertex) -> int:
        if isinstance(label, str):
            try:
                return self._index[label.strip()]
            except KeyError:
                raise InputError(f"unknown vertex label {label!r}") from None
        v = int(label)
        if not 0 <= v < self.order:
            raise InputError(f"vertex {v} out of range")
        return v

    def vertices(self, labels: Iterable[Vertex]) -> frozenset[int]:
        return frozenset(self.vertex(x) for x in labels)

    def mask(self, vs: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.order, dtype=bool)
        for v in vs:
            if not 0 <= v < self.order:
                raise InputError(f"vertex {v} out of range")
            m[v] = True
        return m

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.order) for v in self.neighbors(u) if u < v]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.order))
        g.add_edges_from(self.edges())
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]], family: str = "custom",
                   params: CubeParams | None = None) -> Topology:
        """Arbitrary graph over string labels (negative controls, imported edge lists)."""
        pairs = [(str(a), str(b)) for a, b in edges]
        names = sorted({x for pair in pairs for x in pair})
        index = {name: i for i, name in enumerate(names)}
        adj: list[set[int]] = [set() for _ in names]
        for a, b in pairs:
            if a == b:
                raise InputError(f"self-loop at {a!r}")
            adj[index[a]].add(index[b])
            adj[index[b]].add(index[a])
        width = max((len(x) for x in names), default=0)
        return cls(family, _pad(adj), width, params, tuple(names))


def _pad(adj: Sequence[Iterable[int]]) -> np.ndarray:
    rows = [sorted(r) for r in adj]
    d = max((len(r) for r in rows), default=0)
    nbr = np.full((len(rows), d), -1, dtype=np.int64)
    for v, r in enumerate(rows):
        nbr[v, : len(r)] = r
    return nbr


def _twisted_columns(block: np.ndarray, n: int) -> list[np.ndarray]:
    cols = [np.full(block.shape, 1 << k, dtype=np.int64) for k in range(min(n, 2))]
    odd = (block & 1).astype(bool)
    for k in range(2, n):
        cols.append(np.where(odd, 3 << (k - 1), 1 << k).astype(np.int64))
    return cols


def _sort_rows(nbr: np.ndarray) -> np.ndarray:
    big = np.iinfo(np.int64).max
    keyed = np.where(nbr < 0, big, nbr)
    keyed.sort(axis=1)
    return np.where(keyed == big, -1, keyed)


def _check_width(width: int) -> None:
    if width > MAX_BUILD_WIDTH:
        raise CapacityError(f"{width}-bit topology exceeds the build limit of {MAX_BUILD_WIDTH} bits")


def build_ltq(n: int) -> Topology:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_width(n)
    u = np.arange(1 << n, dtype=np.int64)
    nbr = np.stack([u ^ f for f in _twisted_columns(u, n)], axis=1)
    return Topology("LTQ", _sort_rows(nbr), n)


def build_letq(params, check: bool = False) -> Topology:
    p = as_params(params)
    _check_width(p.width)
    u = np.arange(1 << p.width, dtype=np.int64)
    is_r = (u & 1).astype(bool)
    b = (u >> 1) & ((1 << p.t) - 1)
    a = u >> (p.t + 1)
    d = max(p.s, p.t)
    nbr = np.full((u.size, d + 1), -1, dtype=np.int64)
    nbr[:, 0] = u ^ 1
    for k, col in enumerate(_twisted_columns(b, p.t)):
        nbr[:, k + 1] = np.where(is_r, u ^ (col << 1), nbr[:, k + 1])
    for k, col in enumerate(_twisted_columns(a, p.s)):
        nbr[:, k + 1] = np.where(~is_r, u ^ (col << (p.t + 1)), nbr[:, k + 1])
    topo = Topology("LeTQ", _sort_rows(nbr), p.width, p)
    if check:
        _crosscheck(topo)
    return topo


def _crosscheck(topo: Topology) -> None:
    for u in range(topo.order):
        expected = {v for v in range(topo.order) if v != u and letq_adjacent(u, v, topo.params)}
        if expected != set(topo.neighbors(u)):
            raise AssertionError(f"adjacency mismatch at {topo.label(u)}")


def build(family: str, params, check: bool = False) -> Topology:
    """Build LTQ_n (``params`` = n) or LeTQ(s, t) (``params`` = (s, t))."""
    fam = family.lower()
    if fam == "ltq":
        return build_ltq(int(params))
    if fam == "letq":
        return build_letq(params, check=check)
    raise UnsupportedFamilyError(f"unknown family {family!r}")


def _require_letq(topo: Topology) -> CubeParams:
    if topo.family != "LeTQ" or topo.params is None:
        raise UnsupportedFamilyError(f"operation needs a LeTQ topology, got {topo.family}")
    return topo.params


# ---------------------------------------------------------------------------
# structure of LeTQ

@dataclass(frozen=True)
class ClusterPartition:
    class0: tuple[frozenset[int], ...]
    class1: tuple[frozenset[int], ...]


def a_bits(v: int, params: CubeParams) -> int:
    return v >> (params.t + 1)


def b_bits(v: int, params: CubeParams) -> int:
    return (v >> 1) & ((1 << params.t) - 1)


def cluster_partition(topo: Topology) -> ClusterPartition:
    """Group L by B(u) into Class-0 clusters and R by A(u) into Class-1 clusters."""
    p = _require_letq(topo)
    class0: list[set[int]] = [set() for _ in range(1 << p.t)]
    class1: list[set[int]] = [set() for _ in range(1 << p.s)]
    for v in range(topo.order):
        if v & 1:
            class1[a_bits(v, p)].add(v)
        else:
            class0[b_bits(v, p)].add(v)
    return ClusterPartition(tuple(map(frozenset, class0)), tuple(map(frozenset, class1)))


def cluster_violations(topo: Topology) -> list[str]:
    """Check each cluster against LTQ_s / LTQ_t under its a-bit / b-bit labels.

    Also checks that no edge joins two distinct clusters of the same class.
    Returns human-readable violations; empty means all good.
    """
    p = _require_letq(topo)
    part = cluster_partition(topo)
    problems = []
    ltq_s = {(u, v) for u, v in build_ltq(p.s).edges()}
    ltq_t = {(u, v) for u, v in build_ltq(p.t).edges()}
    for i, members in enumerate(part.class0):
        induced = {tuple(sorted((a_bits(u, p), a_bits(v, p))))
                   for u in members for v in topo.neighbors(u) if v in members}
        if induced != ltq_s:
            problems.append(f"Class-0 cluster B={render(i, p.t)} is not LTQ_{p.s}")
    for j, members in enumerate(part.class1):
        induced = {tuple(sorted((b_bits(u, p), b_bits(v, p))))
                   for u in members for v in topo.neighbors(u) if v in members}
        if induced != ltq_t:
            problems.append(f"Class-1 cluster A={render(j, p.s)} is not LTQ_{p.t}")
    for u, v in topo.edges():
        if (u & 1) == (v & 1):
            same = b_bits(u, p) == b_bits(v, p) if u & 1 == 0 else a_bits(u, p) == a_bits(v, p)
            if not same:
                problems.append(f"edge {topo.label(u)}-{topo.label(v)} joins two clusters of one class")
    return problems


def coordinate_bit(coordinate: str, params: CubeParams) -> int:
    """Bit position of a coordinate name such as ``"a1"`` or ``"b0"``."""
    coordinate = coordinate.strip().lower()
    kind, idx = coordinate[:1], coordinate[1:]
    if kind not in ("a", "b") or not idx.isdigit():
        raise ParameterError(f"coordinate must look like a<i> or b<j>, got {coordinate!r}")
    i = int(idx)
    n = params.s if kind == "a" else params.t
    if i >= n:
        raise ParameterError(f"coordinate {coordinate} out of range for LeTQ({params.s},{params.t})")
    if n < 2:
        raise ParameterError(f"cannot fix the only {kind}-coordinate of LeTQ({params.s},{params.t})")
    return (params.t + 1 + i) if kind == "a" else (1 + i)


def decompose(topo: Topology, coordinate: str, value: int) -> tuple[frozenset[int], frozenset[tuple[int, int]]]:
    """Half of ``topo`` with ``coordinate`` fixed to ``value`` and the edges leaving it."""
    p = _require_letq(topo)
    if value not in (0, 1):
        raise ParameterError(f"value must be 0 or 1, got {value!r}")
    bit = coordinate_bit(coordinate, p)
    half = frozenset(v for v in range(topo.order) if (v >> bit) & 1 == value)
    crossing = frozenset((u, v) for u, v in topo.edges() if (u >> bit) & 1 != (v >> bit) & 1)
    return half, crossing


def is_matching(edges: Iterable[tuple[int, int]]) -> bool:
    seen: set[int] = set()
    for u, v in edges:
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


# ---------------------------------------------------------------------------
# isomorphisms

@dataclass(frozen=True)
class IsoResult:
    """A verified vertex map, or ``mapping=None`` with the reason."""

    mapping: dict[int, int] | None
    method: str
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.mapping is not None


def _induced_edges(topo: Topology, vertices: Iterable[int]) -> set[tuple[int, int]]:
    vs = set(vertices)
    return {(u, v) for u in vs for v in topo.neighbors(u) if v in vs and u < v}


def verify_isomorphism(src_edges: set[tuple[int, int]], src_vertices: set[int],
                       dst: Topology, mapping: dict[int, int]) -> bool:
    """True iff ``mapping`` is a bijection onto V(dst) carrying edges exactly onto E(dst)."""
    if set(mapping) != set(src_vertices) or sorted(mapping.values()) != list(range(dst.order)):
        return False
    image = {tuple(sorted((mapping[u], mapping[v]))) for u, v in src_edges}
    return image == set(dst.edges())


def _search(src_edges: set[tuple[int, int]], src_vertices: set[int], dst: Topology) -> IsoResult:
    if len(src_vertices) > ISO_SEARCH_LIMIT:
        return IsoResult(None, "not-found", f"search skipped: {len(src_vertices)} vertices over limit")
    g1 = nx.Graph()
    g1.add_nodes_from(src_vertices)
    g1.add_edges_from(src_edges)
    gm = nx.algorithms.isomorphism.GraphMatcher(g1, dst.to_networkx())
    if not gm.is_isomorphic():
        degs = sorted(d for _, d in g1.degree())
        return IsoResult(None, "not-found",
                         f"no isomorphism: {g1.number_of_edges()} vs {dst.size} edges, "
                         f"degree range {degs[0]}..{degs[-1]} vs "
                         f"{int(dst.degrees.min())}..{int(dst.degrees.max())}")
    mapping = {int(k): int(v) for k, v in gm.mapping.items()}
    return IsoResult(mapping, "search")


def swap_isomorphism(params) -> IsoResult:
    """Vertex map LeTQ(s, t) -> LeTQ(t, s), verified edge by edge before returning."""
    p = as_params(params)
    src = build_letq(p)
    dst = build_letq(p.swapped())
    mapping = {}
    for v in range(src.order):
        a, b, c = a_bits(v, p), b_bits(v, p), v & 1
        mapping[v] = (b << (p.s + 1)) | (a << 1) | (c ^ 1)
    edges = set(src.edges())
    if verify_isomorphism(edges, set(range(src.order)), dst, mapping):
        return IsoResult(mapping, "block-swap")
    return _search(edges, set(range(src.order)), dst)


def half_isomorphism(topo: Topology, coordinate: str, value: int) -> IsoResult:
    """Map the chosen half onto LeTQ(s-1, t) or LeTQ(s, t-1).

    Tries dropping the fixed bit first; falls back to a generic search.
    """
    p = _require_letq(topo)
    bit = coordinate_bit(coordinate, p)
    half, _ = decompose(topo, coordinate, value)
    smaller = CubeParams(p.s - 1, p.t) if bit > p.t else CubeParams(p.s, p.t - 1)
    dst = build_letq(smaller)
    low = (1 << bit) - 1
    mapping = {v: (v & low) | ((v >> (bit + 1)) << bit) for v in half}
    edges = _induced_edges(topo, half)
    if verify_isomorphism(edges, set(half), dst, mapping):
        return IsoResult(mapping, "drop-bit")
    return _search(edges, set(half), dst)
