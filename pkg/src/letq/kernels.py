"""Hot loops over fault-set batches.

Every public function here takes the padded neighbor table of a topology
(``nbr``: int64 array of shape ``(N, D)``, ``-1`` marks an unused slot) and a
batch of vertex masks (bool array of shape ``(P, N)``).  Each has a numba
kernel and a numpy fallback; which one runs is decided by
:mod:`letq._accel`.  Both paths must return identical results, including the
choice of witness, so enumeration order is fixed (colexicographic).
"""
from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from letq import _accel
from letq._accel import njit

PMC = 0
MMSTAR = 1

_CHUNK = 1 << 14


def _use_numba() -> bool:
    return _accel.BACKEND == "numba"


# ---------------------------------------------------------------------------
# numba kernels

@njit(cache=True, nogil=True)
def _min_degree_nb(nbr, faulty):
    P, N = faulty.shape
    D = nbr.shape[1]
    out = np.empty(P, dtype=np.int64)
    for p in range(P):
        m = N + 1
        for v in range(N):
            if faulty[p, v]:
                continue
            c = 0
            for j in range(D):
                w = nbr[v, j]
                if w >= 0 and not faulty[p, w]:
                    c += 1
            if c < m:
                m = c
        out[p] = m
    return out


@njit(cache=True, nogil=True)
def _row_disconnected(nbr, faulty_row, seen, stack):
    N = faulty_row.shape[0]
    D = nbr.shape[1]
    start = -1
    alive = 0
    for v in range(N):
        seen[v] = False
        if not faulty_row[v]:
            alive += 1
            if start < 0:
                start = v
    if alive < 2:
        return False
    top = 0
    stack[top] = start
    top += 1
    seen[start] = True
    reached = 1
    while top > 0:
        top -= 1
        v = stack[top]
        for j in range(D):
            w = nbr[v, j]
            if w >= 0 and not faulty_row[w] and not seen[w]:
                seen[w] = True
                stack[top] = w
                top += 1
                reached += 1
    return reached < alive


@njit(cache=True, nogil=True)
def _disconnected_nb(nbr, faulty):
    P, N = faulty.shape
    out = np.empty(P, dtype=np.bool_)
    seen = np.empty(N, dtype=np.bool_)
    stack = np.empty(N, dtype=np.int64)
    for p in range(P):
        out[p] = _row_disconnected(nbr, faulty[p], seen, stack)
    return out


@njit(cache=True, nogil=True)
def _pmc_pair(nbr, f1, f2):
    N = f1.shape[0]
    D = nbr.shape[1]
    for v in range(N):
        if f1[v] != f2[v]:
            for j in range(D):
                u = nbr[v, j]
                if u >= 0 and not f1[u] and not f2[u]:
                    return True
    return False


@njit(cache=True, nogil=True)
def _mm_pair(nbr, f1, f2):
    N = f1.shape[0]
    D = nbr.shape[1]
    for w in range(N):
        if f1[w] or f2[w]:
            continue
        n_out = 0
        n_sym = 0
        n_12 = 0
        n_21 = 0
        for j in range(D):
            u = nbr[w, j]
            if u < 0:
                continue
            a = f1[u]
            b = f2[u]
            if not a and not b:
                n_out += 1
            elif a and not b:
                n_sym += 1
                n_12 += 1
            elif b and not a:
                n_sym += 1
                n_21 += 1
        if (n_out >= 1 and n_sym >= 1) or n_12 >= 2 or n_21 >= 2:
            return True
    return False


@njit(cache=True, nogil=True)
def _distinguishable_nb(nbr, f1, f2, model):
    P = f1.shape[0]
    out = np.empty(P, dtype=np.bool_)
    for p in range(P):
        if model == 0:
            out[p] = _pmc_pair(nbr, f1[p], f2[p])
        else:
            out[p] = _mm_pair(nbr, f1[p], f2[p])
    return out


@njit(cache=True, nogil=True)
def _first_indistinguishable_nb(nbr, sets, model, i_start, i_stop, budget):
    M = sets.shape[0]
    checked = 0
    for i in range(i_start, i_stop):
        for j in range(i + 1, M):
            if checked >= budget:
                return -2, -2, checked
            checked += 1
            if model == 0:
                ok = _pmc_pair(nbr, sets[i], sets[j])
            else:
                ok = _mm_pair(nbr, sets[i], sets[j])
            if not ok:
                return i, j, checked
    return -1, -1, checked


@njit(cache=True, nogil=True)
def _rg_cut_row(nbr, faulty_row, members, g, base_ok, seen, stack):
    N = faulty_row.shape[0]
    D = nbr.shape[1]
    if base_ok:
        # only neighbours of removed vertices can drop below g
        for a in range(members.shape[0]):
            f = members[a]
            for j in range(D):
                v = nbr[f, j]
                if v < 0 or faulty_row[v]:
                    continue
                c = 0
                for jj in range(D):
                    w = nbr[v, jj]
                    if w >= 0 and not faulty_row[w]:
                        c += 1
                if c < g:
                    return False
    else:
        for v in range(N):
            if faulty_row[v]:
                continue
            c = 0
            for jj in range(D):
                w = nbr[v, jj]
                if w >= 0 and not faulty_row[w]:
                    c += 1
            if c < g:
                return False
    return _row_disconnected(nbr, faulty_row, seen, stack)


@njit(cache=True, nogil=True)
def _kappa_scan_nb(nbr, k, g, budget, base_ok):
    N = nbr.shape[0]
    comb = np.arange(k).astype(np.int64)
    faulty = np.zeros(N, dtype=np.bool_)
    seen = np.empty(N, dtype=np.bool_)
    stack = np.empty(N, dtype=np.int64)
    last = comb.copy()
    checked = 0
    if k > N:
        return False, comb, checked, True
    while True:
        if checked >= budget:
            return False, last, checked, False
        for a in range(k):
            faulty[comb[a]] = True
            last[a] = comb[a]
        checked += 1
        hit = _rg_cut_row(nbr, faulty, comb, g, base_ok, seen, stack)
        for a in range(k):
            faulty[comb[a]] = False
        if hit:
            return True, comb, checked, True
        # colex successor
        i = 0
        while i < k:
            limit = comb[i + 1] if i + 1 < k else N
            if comb[i] + 1 < limit:
                break
            i += 1
        if i == k:
            return False, comb, checked, True
        comb[i] += 1
        for a in range(i):
            comb[a] = a


@njit(cache=True, nogil=True)
def _repair_nb(nbr, faulty, g, u):
    P, N = faulty.shape
    D = nbr.shape[1]
    for p in range(P):
        for v in range(N):
            if faulty[p, v]:
                continue
            good = 0
            bad = 0
            for j in range(D):
                w = nbr[v, j]
                if w >= 0:
                    if faulty[p, w]:
                        bad += 1
                    else:
                        good += 1
            if good >= g or bad == 0:
                continue
            pick = int(u[p, v] * bad)
            for j in range(D):
                w = nbr[v, j]
                if w >= 0 and faulty[p, w]:
                    if pick == 0:
                        faulty[p, w] = False
                        break
                    pick -= 1


# ---------------------------------------------------------------------------
# numpy fallbacks

def _gather(mask: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """mask[:, nbr] with padded slots reading False; shape (P, N, D)."""
    P, N = mask.shape
    ext = np.zeros((P, N + 1), dtype=bool)
    ext[:, :N] = mask
    safe = np.where(nbr < 0, N, nbr)
    return ext[:, safe]


def _min_degree_np(nbr: np.ndarray, faulty: np.ndarray) -> np.ndarray:
    P, N = faulty.shape
    alive = ~faulty
    counts = _gather(alive, nbr).sum(axis=2)
    counts = np.where(alive, counts, N + 1)
    return counts.min(axis=1).astype(np.int64)


def _disconnected_np(nbr: np.ndarray, faulty: np.ndarray) -> np.ndarray:
    P, N = faulty.shape
    alive = ~faulty
    big = N
    lab = np.where(alive, np.arange(N)[None, :], big)
    safe = np.where(nbr < 0, N, nbr)
    while True:
        ext = np.full((P, N + 1), big, dtype=lab.dtype)
        ext[:, :N] = lab
        nb_min = ext[:, safe].min(axis=2)
        new = np.where(alive, np.minimum(lab, nb_min), big)
        if np.array_equal(new, lab):
            break
        lab = new
    root = np.where(alive, lab, big).min(axis=1)
    return np.any(alive & (lab != root[:, None]), axis=1)


def _distinguishable_np(nbr: np.ndarray, f1: np.ndarray, f2: np.ndarray, model: int) -> np.ndarray:
    outside = ~(f1 | f2)
    if model == PMC:
        sym = f1 ^ f2
        return np.any(sym[:, :, None] & _gather(outside, nbr), axis=(1, 2))
    only1 = f1 & ~f2
    only2 = f2 & ~f1
    n_out = _gather(outside, nbr).sum(axis=2)
    n_12 = _gather(only1, nbr).sum(axis=2)
    n_21 = _gather(only2, nbr).sum(axis=2)
    hit = ((n_out >= 1) & (n_12 + n_21 >= 1)) | (n_12 >= 2) | (n_21 >= 2)
    return np.any(outside & hit, axis=1)


def _first_indistinguishable_np(nbr, sets, model, i_start, i_stop, budget):
    M = sets.shape[0]
    checked = 0
    for i in range(i_start, i_stop):
        lo = i + 1
        while lo < M:
            room = budget - checked
            if room <= 0:
                return -2, -2, checked
            hi = min(M, lo + _CHUNK, lo + room)
            block = sets[lo:hi]
            left = np.broadcast_to(sets[i], block.shape)
            ok = _distinguishable_np(nbr, left, block, model)
            bad = np.flatnonzero(~ok)
            if bad.size:
                checked += int(bad[0]) + 1
                return i, lo + int(bad[0]), checked
            checked += hi - lo
            lo = hi
    return -1, -1, checked


def colex_combinations(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """k-subsets of range(n) in colexicographic order."""
    if k > n or k < 0:
        return
    comb = list(range(k))
    while True:
        yield tuple(comb)
        i = 0
        while i < k:
            limit = comb[i + 1] if i + 1 < k else n
            if comb[i] + 1 < limit:
                break
            i += 1
        if i == k:
            return
        comb[i] += 1
        for a in range(i):
            comb[a] = a


def _kappa_scan_np(nbr, k, g, budget, base_ok):
    N = nbr.shape[0]
    gen = colex_combinations(N, k)
    checked = 0
    last = np.arange(k, dtype=np.int64)
    while True:
        room = budget - checked
        if room <= 0:
            return False, last, checked, False
        block = []
        for comb in gen:
            block.append(comb)
            if len(block) >= min(_CHUNK, room):
                break
        if not block:
            return False, last, checked, True
        idx = np.asarray(block, dtype=np.int64).reshape(len(block), k)
        faulty = np.zeros((len(block), N), dtype=bool)
        faulty[np.arange(len(block))[:, None], idx] = True
        good = _min_degree_np(nbr, faulty) >= g
        hit = np.zeros(len(block), dtype=bool)
        if good.any():
            hit[good] = _disconnected_np(nbr, faulty[good])
        pos = np.flatnonzero(hit)
        if pos.size:
            checked += int(pos[0]) + 1
            return True, idx[pos[0]].copy(), checked, True
        checked += len(block)
        last = idx[-1].copy()
        if len(block) < min(_CHUNK, room):
            return False, last, checked, True


def _repair_np(nbr, faulty, g, u):
    # vertices in order, every row at once: same sequence of edits as the kernel
    N = faulty.shape[1]
    valid = nbr >= 0
    rows = np.arange(faulty.shape[0])
    for v in range(N):
        slots = nbr[v][valid[v]]
        if slots.size == 0:
            continue
        fn = faulty[:, slots]
        bad = fn.sum(axis=1)
        need = ~faulty[:, v] & (slots.size - bad < g) & (bad > 0)
        if not need.any():
            continue
        pick = (u[:, v] * bad).astype(np.int64)
        rank = np.cumsum(fn, axis=1) - 1
        chosen = fn & (rank == pick[:, None])
        col = np.argmax(chosen, axis=1)
        faulty[rows[need], slots[col[need]]] = False


# ---------------------------------------------------------------------------
# dispatch

def _as_batch(mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    return mask[None, :] if mask.ndim == 1 else mask


def min_degree(nbr: np.ndarray, faulty: np.ndarray) -> np.ndarray:
    """delta(G - F) for each row F; N+1 when every vertex is removed."""
    faulty = _as_batch(faulty)
    if _use_numba():
        return _min_degree_nb(nbr, np.ascontiguousarray(faulty))
    return _min_degree_np(nbr, faulty)


def disconnected(nbr: np.ndarray, faulty: np.ndarray) -> np.ndarray:
    """True where G - F has at least two components."""
    faulty = _as_batch(faulty)
    if _use_numba():
        return _disconnected_nb(nbr, np.ascontiguousarray(faulty))
    return _disconnected_np(nbr, faulty)


def distinguishable(nbr: np.ndarray, f1: np.ndarray, f2: np.ndarray, model: int) -> np.ndarray:
    """Edge-level distinguishability verdict for each row pair (F1[p], F2[p])."""
    f1, f2 = _as_batch(f1), _as_batch(f2)
    if f1.shape != f2.shape:
        f1, f2 = np.broadcast_arrays(f1, f2)
    if _use_numba():
        return _distinguishable_nb(nbr, np.ascontiguousarray(f1), np.ascontiguousarray(f2), model)
    return _distinguishable_np(nbr, f1, f2, model)


def first_indistinguishable(
    nbr: np.ndarray, sets: np.ndarray, model: int, i_start: int = 0, i_stop: int | None = None,
    budget: int = 1 << 62,
) -> tuple[int, int, int]:
    """Scan pairs (i, j), i in [i_start, i_stop), j > i, in row-major order.

    Returns ``(i, j, checked)`` for the first indistinguishable pair,
    ``(-1, -1, checked)`` when there is none and ``(-2, -2, checked)`` when
    the budget ran out first.
    """
    sets = np.ascontiguousarray(sets, dtype=bool)
    if i_stop is None:
        i_stop = sets.shape[0]
    if _use_numba():
        i, j, c = _first_indistinguishable_nb(nbr, sets, model, i_start, i_stop, budget)
        return int(i), int(j), int(c)
    return _first_indistinguishable_np(nbr, sets, model, i_start, i_stop, budget)


def kappa_scan(nbr: np.ndarray, k: int, g: int, budget: int) -> tuple[bool, np.ndarray, int, bool]:
    """Search k-subsets in colex order for the first R^g-vertex-cut.

    Returns ``(found, subset, checked, exhausted)``; ``exhausted`` is False
    only when the budget stopped the scan early; ``subset`` is then the
    last one examined.
    """
    base_ok = bool(_min_degree_np(nbr, np.zeros((1, nbr.shape[0]), dtype=bool))[0] >= g)
    if _use_numba():
        found, comb, checked, done = _kappa_scan_nb(nbr, k, g, budget, base_ok)
        return bool(found), comb.copy(), int(checked), bool(done)
    return _kappa_scan_np(nbr, k, g, budget, base_ok)


def repair(nbr: np.ndarray, faulty: np.ndarray, g: int, u: np.ndarray) -> None:
    """One in-place pass towards delta(G - F) >= g.

    Visiting vertices in order, every fault-free vertex with fewer than g
    fault-free neighbours un-faults one faulty neighbour, the
    ``floor(u * count)``-th in slot order.  ``u`` holds uniforms in [0, 1).
    """
    if _use_numba():
        _repair_nb(nbr, faulty, g, u)
    else:
        _repair_np(nbr, faulty, g, u)


def _hull_py(nbr, k, start, u, side, f1, f2):
    P, N = f1.shape
    D = nbr.shape[1]
    core = np.zeros(N, dtype=np.bool_)
    reach = np.zeros(N, dtype=np.bool_)
    for p in range(P):
        core[:] = False
        reach[:] = False
        core[start[p]] = True
        size = 1
        for j in range(D):
            w = nbr[start[p], j]
            if w >= 0:
                reach[w] = True
        while size < k[p]:
            avail = 0
            for v in range(N):
                if reach[v] and not core[v]:
                    avail += 1
            if avail == 0:
                break
            pick = int(u[p, size] * avail)
            for v in range(N):
                if reach[v] and not core[v]:
                    if pick == 0:
                        core[v] = True
                        size += 1
                        for j in range(D):
                            w = nbr[v, j]
                            if w >= 0:
                                reach[w] = True
                        break
                    pick -= 1
        for v in range(N):
            if core[v]:
                f1[p, v] = side[p, v] != 1
                f2[p, v] = side[p, v] != 0
            else:
                f1[p, v] = reach[v]
                f2[p, v] = reach[v]


_hull_nb = njit(cache=True, nogil=True)(_hull_py)


def hull_pairs(nbr: np.ndarray, k: np.ndarray, start: np.ndarray, u: np.ndarray,
               side: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (N(S) | S1, N(S) | S2) around random connected cores S.

    Row p grows S from ``start[p]`` to ``k[p]`` vertices, adding the
    ``floor(u[p, i] * count)``-th reachable vertex (by id) at step i;
    ``side[p, v]`` puts core vertex v in F1 only (0), F2 only (1) or both (2).
    """
    P, N = side.shape
    f1 = np.zeros((P, N), dtype=bool)
    f2 = np.zeros((P, N), dtype=bool)
    fn = _hull_nb if _use_numba() else _hull_py
    fn(nbr, k.astype(np.int64), start.astype(np.int64), u, side.astype(np.int64), f1, f2)
    return f1, f2
