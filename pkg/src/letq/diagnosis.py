"""PMC and MM* diagnosis: test assignments, syndromes and distinguishability.

Fault sets are frozensets of vertex ids of a :class:`~letq.topology.Topology`.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from letq import kernels
from letq.errors import ParameterError, UnsupportedRegimeError
from letq.structure import check_range, default_budget, good_neighbor_fault_set
from letq.topology import CubeParams, Topology, as_params, letq_neighbors

PMC = "PMC"
MMSTAR = "MM*"

EXHAUSTIVE_VERTEX_LIMIT = 16
SAMPLE_BLOCK = 4096


def normalize_model(model: str) -> str:
    key = model.strip().lower().replace("*", "star")
    if key == "pmc":
        return PMC
    if key in ("mm", "mmstar", "mm_star"):
        return MMSTAR
    raise ParameterError(f"unknown diagnosis model {model!r}")


def _kernel_model(model: str) -> int:
    return kernels.PMC if model == PMC else kernels.MMSTAR


# ---------------------------------------------------------------------------
# tests and syndromes

@dataclass(frozen=True, eq=False)
class TestAssignment:
    """All tests of a topology under one model.

    PMC tests are ``(tester, tested)``; MM* tests are ``(u, v, w)`` meaning
    ``w`` compares its neighbours ``u < v``.
    """

    __test__ = False  # not a pytest class

    topo: Topology
    model: str
    tests: tuple[tuple[int, ...], ...]
    tester: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.tests)

    def render(self, test: tuple[int, ...]) -> list[str]:
        return [self.topo.label(x) for x in test]


def build_assignment(topo: Topology, model: str) -> TestAssignment:
    model = normalize_model(model)
    tests: list[tuple[int, ...]] = []
    if model == PMC:
        for u in range(topo.order):
            tests.extend((u, v) for v in topo.neighbors(u))
        tester = np.array([t[0] for t in tests], dtype=np.int64)
        targets = np.array([[t[1], t[1]] for t in tests], dtype=np.int64).reshape(-1, 2)
    else:
        for w in range(topo.order):
            tests.extend((u, v, w) for u, v in itertools.combinations(topo.neighbors(w), 2))
        tester = np.array([t[2] for t in tests], dtype=np.int64)
        targets = np.array([t[:2] for t in tests], dtype=np.int64).reshape(-1, 2)
    return TestAssignment(topo, model, tuple(tests), tester, targets)


@dataclass(frozen=True)
class AdversaryPolicy:
    """How faulty testers answer: ``zeros``, ``ones`` or ``random`` (seeded)."""

    kind: str = "random"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("zeros", "ones", "random"):
            raise ParameterError(f"unknown adversary policy {self.kind!r}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> AdversaryPolicy:
        """Accepts ``zeros``, ``ones``, ``random`` or ``random:<seed>``."""
        kind, _, rest = text.strip().lower().partition(":")
        kind = {"all-zeros": "zeros", "all-ones": "ones", "seeded-random": "random"}.get(kind, kind)
        return cls(kind, int(rest) if rest else seed)

    def answers(self, count: int) -> np.ndarray:
        if self.kind == "zeros":
            return np.zeros(count, dtype=np.uint8)
        if self.kind == "ones":
            return np.ones(count, dtype=np.uint8)
        return np.random.default_rng(self.seed).integers(0, 2, size=count, dtype=np.uint8)

    def __str__(self) -> str:
        return f"random:{self.seed}" if self.kind == "random" else self.kind


ALL_ZEROS = AdversaryPolicy("zeros")
ALL_ONES = AdversaryPolicy("ones")


@dataclass(frozen=True, eq=False)
class Syndrome:
    assignment: TestAssignment
    outcomes: np.ndarray

    def __post_init__(self):
        if self.outcomes.shape != (len(self.assignment),):
            raise ParameterError("syndrome must give one outcome per test")
        self.outcomes.setflags(write=False)

    def outcome(self, test: tuple[int, ...]) -> int:
        return int(self.outcomes[self.assignment.tests.index(test)])

    def digest(self) -> str:
        return hashlib.sha256(self.outcomes.astype(np.uint8).tobytes()).hexdigest()

    def to_json(self) -> list[dict]:
        a = self.assignment
        return [{"test": a.render(t), "outcome": int(o)} for t, o in zip(a.tests, self.outcomes)]


def _expected(assignment: TestAssignment, faulty: np.ndarray) -> np.ndarray:
    """Reliable outcome of every test, for a batch of fault masks; shape (P, L)."""
    tgt = assignment.targets
    return (faulty[..., tgt[:, 0]] | faulty[..., tgt[:, 1]]).astype(np.uint8)


def generate_syndrome(assignment: TestAssignment, faults: Iterable[int],
                      policy: AdversaryPolicy = AdversaryPolicy()) -> Syndrome:
    faulty = assignment.topo.mask(faults)
    reliable = _expected(assignment, faulty)
    liar = faulty[assignment.tester]
    outcomes = np.where(liar, policy.answers(len(assignment)), reliable).astype(np.uint8)
    return Syndrome(assignment, outcomes)


def _consistent_rows(syndrome: Syndrome, faulty: np.ndarray) -> np.ndarray:
    a = syndrome.assignment
    ok = faulty[:, a.tester] | (_expected(a, faulty) == syndrome.outcomes[None, :])
    return ok.all(axis=1)


def is_consistent(syndrome: Syndrome, faults: Iterable[int]) -> bool:
    faulty = syndrome.assignment.topo.mask(faults)
    return bool(_consistent_rows(syndrome, faulty[None, :])[0])


# ---------------------------------------------------------------------------
# distinguishability

@dataclass(frozen=True)
class DistinguishReport:
    f1: frozenset[int]
    f2: frozenset[int]
    model: str
    distinguishable: bool
    witness: tuple[int, ...] | None = None
    condition: int | None = None

    @property
    def verdict(self) -> str:
        return "distinguishable" if self.distinguishable else "indistinguishable"

    def to_json(self, topo: Topology) -> dict:
        return {
            "model": self.model,
            "F1": topo.labels(self.f1),
            "F2": topo.labels(self.f2),
            "verdict": self.verdict,
            "condition": self.condition,
            "witness": None if self.witness is None else [topo.label(x) for x in self.witness],
        }


def _pair(f1: Iterable[int], f2: Iterable[int]) -> tuple[frozenset, frozenset]:
    a, b = frozenset(f1), frozenset(f2)
    if a == b:
        raise ParameterError("the two fault sets must differ")
    return a, b


def pmc_distinguishable(topo: Topology, f1: Iterable[int], f2: Iterable[int]) -> DistinguishReport:
    """Distinguishable iff some fault-free u (outside both sets) tests a v in F1 ^ F2.

    The witness is the test ``(u, v)``.
    """
    a, b = _pair(f1, f2)
    union = a | b
    for v in sorted(a ^ b):
        for u in topo.neighbors(v):
            if u not in union:
                return DistinguishReport(a, b, PMC, True, (u, v), 1)
    return DistinguishReport(a, b, PMC, False)


def mm_distinguishable(topo: Topology, f1: Iterable[int], f2: Iterable[int]) -> DistinguishReport:
    """MM* verdict by the three comparator conditions.

    The witness is a comparison ``(u, v, w)`` made by ``w`` outside both sets:
    (1) u outside both sets and v in the symmetric difference;
    (2) u, v both in F1 - F2; (3) u, v both in F2 - F1.
    """
    a, b = _pair(f1, f2)
    union = a | b
    sym = a ^ b
    outside = [w for w in range(topo.order) if w not in union]
    for w in outside:
        nb = topo.neighbors(w)
        good = [u for u in nb if u not in union]
        bad = [v for v in nb if v in sym]
        if good and bad:
            return DistinguishReport(a, b, MMSTAR, True, (good[0], bad[0], w), 1)
    for cond, side in ((2, a - b), (3, b - a)):
        for w in outside:
            hits = [u for u in topo.neighbors(w) if u in side]
            if len(hits) >= 2:
                return DistinguishReport(a, b, MMSTAR, True, (hits[0], hits[1], w), cond)
    return DistinguishReport(a, b, MMSTAR, False)


def distinguish(topo: Topology, f1: Iterable[int], f2: Iterable[int], model: str) -> DistinguishReport:
    if normalize_model(model) == PMC:
        return pmc_distinguishable(topo, f1, f2)
    return mm_distinguishable(topo, f1, f2)


# ---------------------------------------------------------------------------
# diagnosability values and extremal pairs

def tg_formula(params, g: int, model: str) -> int:
    p = as_params(params)
    check_range(p, g)
    model = normalize_model(model)
    generic = (1 << g) * (p.s - g + 2) - 1
    if model == PMC:
        return generic
    s, t = p.s, p.t
    if s == t == 1 and g <= 1:
        return 1
    if g == 0 and s + t >= 3:
        return s + 1
    if g == 1 and s == 2 and t >= 2:
        return 4
    if g == 1 and (3 <= s <= t or (s == 1 and t >= 2)):
        return 2 * s + 1
    if g >= 2 and 2 <= s <= t:
        return generic
    raise UnsupportedRegimeError(f"no MM* value known for s={s}, t={t}, g={g}")


def _vertex(a: int, b: int, c: int, p: CubeParams) -> int:
    return (a << (p.t + 1)) | (b << 1) | c


def indistinguishable_witness(params, g: int, model: str) -> tuple[frozenset[int], frozenset[int]]:
    """An indistinguishable pair of g-good-neighbor sets, larger one of size tg + 1."""
    p = as_params(params)
    check_range(p, g)
    model = normalize_model(model)
    tg_formula(p, g, model)
    if model == MMSTAR:
        if p.s == p.t == 1:
            return (frozenset({0b000, 0b110}), frozenset({0b101, 0b011}))
        if g == 0:
            v = 0
            nb = letq_neighbors(v, p)
            return frozenset(nb), frozenset(nb | {v})
        if g == 1 and p.s == 2:
            shared = {_vertex(a, 0, 1, p) for a in range(4)}
            return (frozenset(shared | {_vertex(0, 0, 0, p)}),
                    frozenset(shared | {_vertex(3, 0, 0, p)}))
    w = good_neighbor_fault_set(p, g)
    return w.boundary, w.closed


# ---------------------------------------------------------------------------
# enumeration of g-good-neighbor sets

def good_neighbor_sets(topo: Topology, g: int, max_size: int,
                       budget: int | None = None) -> tuple[np.ndarray, bool]:
    """All fault sets of size <= max_size with delta(G - F) >= g.

    Rows are ordered by size, then lexicographically.  Returns the mask
    matrix and whether the budget (number of subsets examined) cut it short.
    """
    budget = default_budget() if budget is None else budget
    n = topo.order
    kept = []
    seen = 0
    for k in range(0, min(max_size, n) + 1):
        combos = itertools.combinations(range(n), k)
        while True:
            room = budget - seen
            chunk = list(itertools.islice(combos, min(1 << 15, max(room, 0))))
            if not chunk:
                if room <= 0 and next(combos, None) is not None:
                    return _stack(kept, n), True
                break
            seen += len(chunk)
            masks = np.zeros((len(chunk), n), dtype=bool)
            if k:
                idx = np.asarray(chunk, dtype=np.int64)
                masks[np.arange(len(chunk))[:, None], idx] = True
            ok = kernels.min_degree(topo.nbr, masks) >= g
            kept.append(masks[ok])
    return _stack(kept, n), False


def _stack(parts: list[np.ndarray], n: int) -> np.ndarray:
    if not parts:
        return np.zeros((0, n), dtype=bool)
    return np.ascontiguousarray(np.concatenate(parts, axis=0))


def _members(row: np.ndarray) -> frozenset[int]:
    return frozenset(int(x) for x in np.flatnonzero(row))


# ---------------------------------------------------------------------------
# verification of t_g

@dataclass
class VerificationReport:
    s: int
    t: int
    g: int
    model: str
    claimed_tg: int
    mode: str
    checked_pairs: int = 0
    verdict: str = "fail"
    counterexample: tuple[frozenset[int], frozenset[int]] | None = None
    witness_pair: tuple[frozenset[int], frozenset[int]] | None = None
    witness_indistinguishable: bool = False
    partial: bool = False
    sets_enumerated: int = 0
    rejections: int = 0
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self, topo: Topology) -> dict:
        out = {
            "s": self.s,
            "t": self.t,
            "g": self.g,
            "model": self.model,
            "claimed_tg": self.claimed_tg,
            "mode": self.mode,
            "checked_pairs": self.checked_pairs,
            "verdict": self.verdict,
        }
        if self.counterexample is not None:
            out["counterexample"] = {"F1": topo.labels(self.counterexample[0]),
                                     "F2": topo.labels(self.counterexample[1])}
        if self.witness_pair is not None:
            out["witness_pair"] = {"F1": topo.labels(self.witness_pair[0]),
                                   "F2": topo.labels(self.witness_pair[1])}
        out["witness_indistinguishable"] = self.witness_indistinguishable
        out["partial"] = self.partial
        if self.mode == "exhaustive":
            out["sets_enumerated"] = self.sets_enumerated
        else:
            out["seed"] = self.seed
            out["rejections"] = self.rejections
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def check_witness(topo: Topology, g: int, model: str, claimed: int):
    """Is the extremal pair valid: both g-good, size <= claimed + 1, indistinguishable?"""
    from letq.structure import is_g_good_neighbor_set

    f1, f2 = indistinguishable_witness(topo.params, g, model)
    ok = (is_g_good_neighbor_set(topo, f1, g) and is_g_good_neighbor_set(topo, f2, g)
          and max(len(f1), len(f2)) == claimed + 1
          and not distinguish(topo, f1, f2, model).distinguishable)
    return (f1, f2), ok


def _blocks(m: int, parts: int) -> list[tuple[int, int]]:
    """Split rows [0, m) into contiguous blocks with roughly equal pair counts."""
    total = m * (m - 1) // 2
    if parts <= 1 or m < 2:
        return [(0, m)]
    bounds, acc, start = [], 0, 0
    target = total / parts
    for i in range(m):
        acc += m - 1 - i
        if acc >= target * (len(bounds) + 1) and i + 1 < m:
            bounds.append((start, i + 1))
            start = i + 1
    bounds.append((start, m))
    return bounds


def _scan_pairs(topo: Topology, sets: np.ndarray, model: str, budget: int, jobs: int):
    kmodel = _kernel_model(model)
    m = sets.shape[0]
    total = m * (m - 1) // 2
    if jobs <= 1 or total > budget:
        return kernels.first_indistinguishable(topo.nbr, sets, kmodel, budget=budget)
    blocks = _blocks(m, jobs * 4)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(
            lambda blk: kernels.first_indistinguishable(topo.nbr, sets, kmodel, blk[0], blk[1]), blocks))
    checked = 0
    for i, j, c in results:
        checked += c
        if i >= 0:
            return i, j, checked
    return -1, -1, checked


def _verify_exhaustive(topo, report: VerificationReport, budget: int | None, jobs: int) -> None:
    if budget is None:
        if topo.order > EXHAUSTIVE_VERTEX_LIMIT:
            report.partial = True
            report.notes.append(f"exhaustive mode needs |V| <= {EXHAUSTIVE_VERTEX_LIMIT} "
                                "unless a budget is given")
            return
        budget = default_budget()
    sets, cut = good_neighbor_sets(topo, report.g, report.claimed_tg, budget)
    report.sets_enumerated = sets.shape[0]
    if cut:
        report.partial = True
        report.notes.append("set enumeration stopped by budget")
        return
    i, j, checked = _scan_pairs(topo, sets, report.model, budget, jobs)
    report.checked_pairs = checked
    if i == -2:
        report.partial = True
        report.notes.append("pair scan stopped by budget")
    elif i >= 0:
        report.counterexample = (_members(sets[i]), _members(sets[j]))


def _draw_sets(rng: np.random.Generator, n: int, sizes: np.ndarray) -> np.ndarray:
    perm = np.argsort(rng.random((sizes.size, n)), axis=1)
    mask = np.zeros((sizes.size, n), dtype=bool)
    np.put_along_axis(mask, perm, np.arange(n)[None, :] < sizes[:, None], axis=1)
    return mask


def _repair(topo: Topology, mask: np.ndarray, g: int, rng: np.random.Generator) -> None:
    kernels.repair(topo.nbr, mask, g, rng.random(mask.shape))


def sample_pairs(topo: Topology, g: int, max_size: int, count: int,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, int]:
    """Draw ``count`` pairs of distinct g-good-neighbor sets of size <= max_size.

    Rows cycle through three proposals: independent draws, a perturbation
    of the first set inside its closed neighbourhood, and a core S with its
    boundary N(S) shared and S split between the two sets.  The last two are
    where indistinguishable pairs live.  Returns the two mask batches and
    the number of rejected draws.
    """
    n = topo.order
    out1, out2, rejected, have = [], [], 0, 0
    while have < count:
        want = count - have
        sizes = rng.integers(0, max_size + 1, size=want)
        f1 = _draw_sets(rng, n, sizes)
        f2 = _draw_sets(rng, n, rng.integers(0, max_size + 1, size=want))
        kind = np.arange(want) % 3
        near = kind == 1
        if near.any():
            closed = f1[near] | kernels._gather(f1[near], topo.nbr).any(axis=2)
            scores = np.where(closed, rng.random(closed.shape), -1.0)
            order = np.argsort(-scores, axis=1)
            flips = rng.integers(1, max_size + 1, size=int(near.sum()))
            flips = np.minimum(flips, closed.sum(axis=1))
            delta = np.zeros_like(closed)
            np.put_along_axis(delta, order, np.arange(n)[None, :] < flips[:, None], axis=1)
            f2[near] = f1[near] ^ delta
        hull = np.flatnonzero(kind == 2)
        if hull.size:
            m = hull.size
            f1[hull], f2[hull] = kernels.hull_pairs(
                topo.nbr, rng.integers(1, max_size + 1, size=m), rng.integers(0, n, size=m),
                rng.random((m, max_size)), rng.integers(0, 3, size=(m, n)))
        for mask in (f1, f2):
            _repair(topo, mask, g, rng)
        ok = ((kernels.min_degree(topo.nbr, f1) >= g) & (kernels.min_degree(topo.nbr, f2) >= g)
              & (f1.sum(axis=1) <= max_size) & (f2.sum(axis=1) <= max_size)
              & np.any(f1 != f2, axis=1))
        rejected += int((~ok).sum())
        out1.append(f1[ok])
        out2.append(f2[ok])
        have += int(ok.sum())
    return (np.concatenate(out1)[:count], np.concatenate(out2)[:count], rejected)


def _verify_sampled(topo, report: VerificationReport, n: int, seed: int, jobs: int) -> None:
    blocks = math.ceil(n / SAMPLE_BLOCK)
    seeds = np.random.SeedSequence(seed).spawn(blocks)
    kmodel = _kernel_model(report.model)

    def run(b: int):
        count = min(SAMPLE_BLOCK, n - b * SAMPLE_BLOCK)
        f1, f2, rej = sample_pairs(topo, report.g, report.claimed_tg, count, np.random.default_rng(seeds[b]))
        ok = kernels.distinguishable(topo.nbr, f1, f2, kmodel)
        bad = np.flatnonzero(~ok)
        hit = None if bad.size == 0 else (_members(f1[bad[0]]), _members(f2[bad[0]]))
        return count, rej, hit

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(blocks)))
    else:
        results = [run(b) for b in range(blocks)]
    for count, rej, hit in results:
        report.checked_pairs += count
        report.rejections += rej
        if hit is not None and report.counterexample is None:
            report.counterexample = hit


def verify_tg(topo: Topology, g: int, model: str, mode: str = "exhaustive", n: int = 10_000,
              seed: int = 0, budget: int | None = None, jobs: int = 1) -> VerificationReport:
    """Check the claimed t_g of ``topo`` against the definition.

    ``exhaustive`` checks every pair of distinct g-good-neighbor sets of size
    at most t_g; ``sampled`` draws ``n`` seeded pairs and only tries to
    falsify.  Both confirm that the extremal pair at t_g + 1 is
    indistinguishable.
    """
    if topo.family != "LeTQ" or topo.params is None:
        raise ParameterError("verify_tg needs a LeTQ topology")
    model = normalize_model(model)
    p = topo.params
    claimed = tg_formula(p, g, model)
    report = VerificationReport(p.s, p.t, g, model, claimed, mode)
    report.witness_pair, report.witness_indistinguishable = check_witness(topo, g, model, claimed)
    if mode == "exhaustive":
        _verify_exhaustive(topo, report, budget, jobs)
    elif mode == "sampled":
        report.seed = seed
        _verify_sampled(topo, report, n, seed, jobs)
    else:
        raise ParameterError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    if report.partial:
        report.verdict = "partial"
    elif report.counterexample is None and report.witness_indistinguishable:
        report.verdict = "pass"
    else:
        report.verdict = "fail"
    return report


# ---------------------------------------------------------------------------
# syndrome decoding

@dataclass(frozen=True)
class DiagnosisResult:
    candidates: tuple[frozenset[int], ...]
    partial: bool = False

    @property
    def unique(self) -> frozenset[int] | None:
        return self.candidates[0] if len(self.candidates) == 1 and not self.partial else None


def diagnose(assignment: TestAssignment, syndrome: Syndrome, g: int, max_size: int,
             budget: int | None = None) -> DiagnosisResult:
    """Every g-good-neighbor set of size <= max_size consistent with the syndrome.

    With ``max_size`` at most t_g and a true fault set meeting the same
    hypothesis, the result is exactly that set.
    """
    if syndrome.assignment is not assignment:
        raise ParameterError("syndrome was produced for a different test assignment")
    topo = assignment.topo
    sets, cut = good_neighbor_sets(topo, g, max_size, budget)
    found = []
    for lo in range(0, sets.shape[0], 4096):
        block = sets[lo:lo + 4096]
        for row in block[_consistent_rows(syndrome, block)]:
            found.append(_members(row))
    return DiagnosisResult(tuple(found), cut)
