import pytest

import oracles
from letq import structure as S
from letq.errors import ParameterError
from letq.topology import CubeParams, build_letq


def labels(topo, vs):
    return set(topo.labels(vs))


@pytest.mark.parametrize("s,t", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)])
def test_triangle_free_and_no_k23(s, t):
    topo = build_letq((s, t))
    assert S.is_triangle_free(topo)
    assert S.max_common_neighbors(topo) <= 2


def test_triangle_detector_negative_control():
    from letq.topology import Topology

    tri = Topology.from_edges([("00", "01"), ("01", "10"), ("00", "10")])
    assert not S.is_triangle_free(tri)
    k23 = Topology.from_edges([(a, b) for a in ("a0", "a1") for b in ("b0", "b1", "b2")])
    assert S.max_common_neighbors(k23) == 3


@pytest.mark.parametrize("s,t,g,want", [(2, 2, 2, 4), (2, 2, 1, 2), (1, 2, 0, 1), (2, 3, 2, 4)])
def test_min_order_with_min_degree(s, t, g, want):
    res = S.min_order_with_min_degree(build_letq((s, t)), g)
    assert res.certified and res.order == want
    assert len(res.witness) == want


def test_min_order_above_exact_limit_falls_back_to_bound():
    res = S.min_order_with_min_degree(build_letq((4, 5)), 3)
    assert not res.certified and res.order == 8


@pytest.mark.parametrize("s,t", [(s, t) for s in range(1, 5) for t in range(s, 6) if s + t <= 7])
def test_fault_sets_match_closed_form(s, t):
    topo = build_letq((s, t))
    for g in range(s + 1):
        w = S.good_neighbor_fault_set((s, t), g)
        assert labels(topo, w.core) == oracles.core_a(s, t, g)
        assert labels(topo, w.boundary) == oracles.closed_form_f1(s, t, g)
        assert len(w.boundary) == 2 ** g * (s - g + 1)
        assert len(w.closed) == 2 ** g * (s - g + 2)
        assert S.is_g_good_neighbor_set(topo, w.boundary, g)
        assert S.is_g_good_neighbor_set(topo, w.closed, g)


# N[A] misses the stronger max(s-1, g) level when a twisted edge (a0 = 1)
# links an outside vertex to two members of N(A).
F2_SHORTFALL = {(3, 3, 1), (3, 4, 1), (3, 5, 1), (4, 4, 2)}


def test_closed_neighbourhood_level_shortfall():
    failing = set()
    for s in range(1, 5):
        for t in range(s, 9 - s):
            topo = build_letq((s, t))
            for g in range(s + 1):
                closed = S.good_neighbor_fault_set((s, t), g).closed
                if not S.is_g_good_neighbor_set(topo, closed, max(s - 1, g)):
                    failing.add((s, t, g))
    assert failing == F2_SHORTFALL


def test_shortfall_vertex_by_hand():
    topo = build_letq((3, 3))
    closed = S.good_neighbor_fault_set((3, 3), 1).closed
    u = topo.vertex("0110000")
    outside = [topo.label(w) for w in topo.neighbors(u) if w not in closed]
    assert u not in closed and outside == ["0110001"]


def test_core_is_g_regular():
    p = CubeParams(3, 3)
    topo = build_letq(p)
    for g in range(4):
        core = S.good_neighbor_fault_set(p, g).core
        assert {len(set(topo.neighbors(v)) & core) for v in core} == {g}


@pytest.mark.parametrize("st,g", [((2, 1), 0), ((1, 2), 2), ((2, 2), -1)])
def test_fault_set_range(st, g):
    with pytest.raises(ParameterError):
        S.good_neighbor_fault_set(st, g)


def test_good_neighbor_predicate():
    topo = build_letq((1, 1))
    assert S.is_g_good_neighbor_set(topo, [], 2)
    assert not S.is_g_good_neighbor_set(topo, [topo.vertex("001")], 2)
    assert S.is_g_good_neighbor_set(topo, [topo.vertex("001")], 1)


def test_rg_cut():
    topo = build_letq((1, 2))
    f1 = S.good_neighbor_fault_set((1, 2), 1).boundary
    assert S.is_rg_cut(topo, f1, 1)
    assert not S.is_rg_cut(topo, [0], 0)


def test_components_order():
    topo = build_letq((1, 1))
    comps = S.components(topo, topo.vertices(["001", "110"]))
    assert [len(c) for c in comps] == [4, 2]
    assert comps[0][0] == 0


KAPPA_CASES = [(1, 1, 0), (1, 1, 1), (1, 2, 0), (1, 2, 1), (1, 3, 0), (1, 3, 1),
               (2, 2, 0), (2, 2, 1), (2, 2, 2), (2, 3, 0), (2, 3, 1), (2, 3, 2)]


@pytest.mark.parametrize("s,t,g", KAPPA_CASES)
def test_kappa_bruteforce_equals_formula(s, t, g):
    topo = build_letq((s, t))
    rep = S.kappa_g_bruteforce(topo, g)
    assert rep.certified_value == rep.formula_value == 2 ** g * (s - g + 1)
    assert not rep.partial
    assert S.is_rg_cut(topo, rep.witness_cut, g)
    assert len(rep.components_after) >= 2


def test_kappa_budget_marks_partial():
    rep = S.kappa_g_bruteforce(build_letq((2, 3)), 2, budget=1000)
    assert rep.partial and rep.certified_value is None
    assert rep.lower_bound >= 1 and rep.checked <= 1000
    assert rep.notes


def test_kappa_report_json_keys():
    topo = build_letq((1, 2))
    out = S.kappa_g_bruteforce(topo, 1).to_json(topo)
    assert out["formula"] == 2 and out["certified"] == 2
    assert set(out) == {"g", "formula", "certified", "lower_bound", "partial", "checked", "witness", "components"}
