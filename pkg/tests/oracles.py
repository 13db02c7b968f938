"""Reference implementations written against the definitions, sharing no code with letq.

Labels are plain strings a_{s-1}..a_0 b_{t-1}..b_0 c, and every predicate
reads the definitions literally over pairs of strings.
"""
from __future__ import annotations

from itertools import combinations, product


def all_labels(width: int) -> list[str]:
    return ["".join(bits) for bits in product("01", repeat=width)]


def _diff(u: str, v: str) -> set[int]:
    return {i for i in range(len(u)) if u[i] != v[i]}


# --- locally twisted cube ----------------------------------------------------

def ltq_adjacent(u: str, v: str) -> bool:
    n = len(u)
    bit = lambda x, k: int(x[n - 1 - k])  # noqa: E731
    d = {n - 1 - i for i in _diff(u, v)}  # positions as bit indices
    if len(d) == 1 and d <= {0, 1}:
        return True
    for k in range(2, n):
        rest = d - {k, k - 1}
        if k in d and not rest and bit(u, k - 1) == bit(v, k - 1) ^ bit(u, 0):
            return True
    return False


# --- locally exchanged twisted cube -----------------------------------------

def split(u: str, s: int, t: int) -> tuple[str, str, str]:
    return u[:s], u[s:s + t], u[s + t]


def _block_rule(x: str, y: str) -> bool:
    """Rules (a)-(c) on one block, written as strings x_{m-1}..x_0 and y."""
    m = len(x)
    d = {m - 1 - i for i in _diff(x, y)}
    xb = lambda k: x[m - 1 - k]  # noqa: E731
    if len(d) == 1 and d <= {0, 1}:
        return True
    for k in range(2, m):
        if xb(0) == "1" and d == {k, k - 1}:
            return True
        if xb(0) == "0" and d == {k}:
            return True
    return False


def letq_adjacent(u: str, v: str, s: int, t: int) -> bool:
    au, bu, cu = split(u, s, t)
    av, bv, cv = split(v, s, t)
    if cu != cv:
        return au == av and bu == bv
    if cu == "1":
        return au == av and _block_rule(bu, bv)
    return bu == bv and _block_rule(au, av)


def letq_edges(s: int, t: int) -> set[frozenset[str]]:
    labels = all_labels(s + t + 1)
    return {frozenset((u, v)) for u, v in combinations(labels, 2) if letq_adjacent(u, v, s, t)}


def ltq_edges(n: int) -> set[frozenset[str]]:
    labels = all_labels(n)
    return {frozenset((u, v)) for u, v in combinations(labels, 2) if ltq_adjacent(u, v)}


def neighbours(edges: set[frozenset[str]], u: str) -> set[str]:
    return {next(iter(e - {u})) for e in edges if u in e}


# --- closed-form fault sets ---------------------------------------------------

def closed_form_f1(s: int, t: int, g: int) -> set[str]:
    """N(A) written out bit pattern by bit pattern rather than by neighbour lookup."""
    out = set()
    for head in all_labels(g) if g else [""]:
        for j in range(s - g):
            out.add(head + "0" * (s - g - j - 1) + "1" + "0" * (j + t + 1))
        out.add(head + "0" * (s - g + t) + "1")
    return out


def core_a(s: int, t: int, g: int) -> set[str]:
    return {head + "0" * (s - g + t + 1) for head in (all_labels(g) if g else [""])}


# --- syndromes by literal enumeration ----------------------------------------

def pmc_tests(edges) -> list[tuple[str, str]]:
    out = []
    for e in edges:
        u, v = sorted(e)
        out += [(u, v), (v, u)]
    return sorted(out)


def mm_tests(edges) -> list[tuple[str, str, str]]:
    verts = sorted({x for e in edges for x in e})
    out = []
    for w in verts:
        nb = sorted(neighbours(edges, w))
        out += [(u, v, w) for u, v in combinations(nb, 2)]
    return out


def syndromes(tests, faults: set[str], model: str) -> set[tuple[int, ...]]:
    """sigma(F): every outcome vector F can produce."""
    choices = []
    for test in tests:
        if model == "PMC":
            tester, targets = test[0], (test[1],)
        else:
            tester, targets = test[2], test[:2]
        if tester in faults:
            choices.append((0, 1))
        else:
            choices.append((int(any(x in faults for x in targets)),))
    return set(product(*choices))


def distinguishable(edges, f1: set[str], f2: set[str], model: str) -> bool:
    tests = pmc_tests(edges) if model == "PMC" else mm_tests(edges)
    return not (syndromes(tests, f1, model) & syndromes(tests, f2, model))
