"""Command line front end.

Exit status: 0 all checks pass / unique diagnosis, 1 property or
verification failure, 2 usage error, 3 result cut short by the budget.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from letq import diagnosis, export, kernels, structure, suite
from letq.errors import LetqError
from letq.topology import CubeParams, Topology, build, swap_isomorphism

DEFAULT_SEED = 20170101

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    s: int | None = None
    t: int | None = None
    n: int | None = None
    g: int = 0
    family: str = "letq"
    model: str = "pmc"
    mode: str = "exhaustive"
    samples: int = 10_000
    seed: int = DEFAULT_SEED
    jobs: int = 1
    budget: int | None = None
    fmt: str = "json"
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.family == "ltq":
            if self.n is None or self.n < 1:
                raise UsageError("LTQ needs -n >= 1")
        else:
            if self.s is None or self.t is None:
                raise UsageError("-s and -t are required")
            if self.s < 1 or self.t < 1:
                raise UsageError("-s and -t must be >= 1")
        if self.g < 0:
            raise UsageError("-g must be >= 0")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if self.budget is not None and self.budget < 1:
            raise UsageError("--budget must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="letq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cube(p, need_g=False):
        p.add_argument("-s", type=int, required=True, help="number of a-bits")
        p.add_argument("-t", type=int, required=True, help="number of b-bits")
        if need_g:
            p.add_argument("-g", type=int, default=0, help="good-neighbor level")

    def out(p, formats, default):
        p.add_argument("--format", dest="fmt", choices=formats, default=default)
        p.add_argument("--output", "-o", help="write here instead of stdout")

    p = sub.add_parser("gen", help="export a topology")
    p.add_argument("--family", choices=["letq", "ltq"], default="letq")
    p.add_argument("-s", type=int)
    p.add_argument("-t", type=int)
    p.add_argument("-n", type=int, help="LTQ dimension")
    p.add_argument("--clusters", action="store_true", help="group DOT output by cluster")
    out(p, ["edge-list", "json", "dot"], "edge-list")

    p = sub.add_parser("props", help="run the structural property suite")
    cube(p)
    p.add_argument("--edge-list", help="check this edge list instead of the built graph")
    out(p, ["text", "json"], "text")

    p = sub.add_parser("kappa", help="R^g-vertex-connectivity: formula vs exhaustive search")
    cube(p, need_g=True)
    p.add_argument("--budget", type=int)
    out(p, ["json"], "json")

    p = sub.add_parser("faultset", help="emit the core A and the sets N(A), N[A]")
    cube(p, need_g=True)
    p.add_argument("--which", choices=["A", "F1", "F2"], default="F1", help="set written in text format")
    out(p, ["json", "text"], "json")

    p = sub.add_parser("distinguish", help="verdict for one pair of fault sets")
    cube(p)
    p.add_argument("--model", choices=["pmc", "mm"], default="pmc")
    p.add_argument("--f1", required=True, help="comma-separated labels or @file")
    p.add_argument("--f2", required=True, help="comma-separated labels or @file")
    out(p, ["json"], "json")

    p = sub.add_parser("verify-tg", help="check the g-good-neighbor diagnosability")
    cube(p, need_g=True)
    p.add_argument("--model", choices=["pmc", "mm"], default="pmc")
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--n", dest="samples", type=int, default=10_000, help="sampled pairs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=int)
    out(p, ["json"], "json")

    p = sub.add_parser("simulate", help="inject faults, build a syndrome and diagnose it")
    cube(p, need_g=True)
    p.add_argument("--model", choices=["pmc", "mm"], default="pmc")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--fault", default="", help="comma-separated labels")
    src.add_argument("--fault-file", help="newline-delimited labels")
    src.add_argument("--random-fault", type=int, metavar="SIZE", help="draw a random g-good-neighbor set")
    p.add_argument("-T", dest="max_size", type=int, help="largest fault set considered (default t_g)")
    p.add_argument("--policy", default="random", help="zeros | ones | random[:seed]")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int)
    out(p, ["json"], "json")
    return ap


def _config(ns: argparse.Namespace) -> RunConfig:
    known = {"command", "s", "t", "n", "g", "family", "model", "mode", "samples", "seed",
             "jobs", "budget", "fmt", "output"}
    values = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    extra = {k: v for k, v in vars(ns).items() if k not in known}
    if "budget" not in values and os.environ.get("LETQ_BUDGET"):
        values["budget"] = int(os.environ["LETQ_BUDGET"])
    cfg = RunConfig(**values, extra=extra)
    cfg.validate()
    return cfg


def _emit(cfg: RunConfig, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


class _Frame:
    """Topology in normalised orientation plus the relabeling from the caller's one."""

    def __init__(self, s: int, t: int):
        self.original = CubeParams(s, t)
        self.params, self.swapped = self.original.normalized()
        self.topo = build("letq", self.params)
        self.forward: dict[int, int] | None = None
        if self.swapped:
            iso = swap_isomorphism(self.original)
            if not iso.found:
                raise LetqError(f"no verified isomorphism LeTQ({s},{t}) -> LeTQ({t},{s}): {iso.detail}")
            self.forward = iso.mapping

    def vertices(self, labels: list[str]) -> frozenset[int]:
        if not self.swapped:
            return self.topo.vertices(labels)
        src = build("letq", self.original)
        return frozenset(self.forward[src.vertex(x)] for x in labels)

    def annotate(self, payload: dict) -> dict:
        if self.swapped:
            src_width = self.original.width
            payload["normalized_from"] = [self.original.s, self.original.t]
            payload["relabeling"] = {format(k, f"0{src_width}b"): self.topo.label(v)
                                     for k, v in sorted(self.forward.items())}
        return payload


def _labels_arg(text: str) -> list[str]:
    if text.startswith("@"):
        return export.read_labels(Path(text[1:]).read_text())
    return export.read_labels(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(cfg: RunConfig) -> int:
    topo = build("ltq", cfg.n) if cfg.family == "ltq" else build("letq", (cfg.s, cfg.t))
    if cfg.fmt == "json":
        _emit(cfg, export.to_json(topo))
    elif cfg.fmt == "dot":
        _emit(cfg, export.to_dot(topo, clusters=cfg.extra.get("clusters", False)))
    else:
        _emit(cfg, export.to_edge_list(topo))
    return EXIT_OK


def cmd_props(cfg: RunConfig) -> int:
    params = CubeParams(cfg.s, cfg.t)
    if cfg.extra.get("edge_list"):
        topo = export.from_edge_list(Path(cfg.extra["edge_list"]).read_text(), params)
    else:
        topo = build("letq", params)
    checks = suite.run_suite(topo)
    ok = all(c.passed for c in checks)
    if cfg.fmt == "json":
        _emit(cfg, {"s": cfg.s, "t": cfg.t, "structure": suite.describe(topo), "passed": ok,
                    "checks": [c.to_json() for c in checks]})
    else:
        lines = [f"LeTQ({cfg.s},{cfg.t}): {suite.describe(topo)}"]
        for c in checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"{mark}  {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        lines.append("all checks passed" if ok else
                     "violated: " + ", ".join(c.name for c in checks if not c.passed))
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kappa(cfg: RunConfig) -> int:
    frame = _Frame(cfg.s, cfg.t)
    report = structure.kappa_g_bruteforce(frame.topo, cfg.g, cfg.budget)
    payload = {"s": frame.params.s, "t": frame.params.t, **report.to_json(frame.topo)}
    if report.notes:
        payload["notes"] = report.notes
    _emit(cfg, frame.annotate(payload))
    if report.partial:
        return EXIT_PARTIAL
    return EXIT_OK if report.certified_value == report.formula_value else EXIT_FAIL


def cmd_faultset(cfg: RunConfig) -> int:
    frame = _Frame(cfg.s, cfg.t)
    w = structure.good_neighbor_fault_set(frame.params, cfg.g)
    topo = frame.topo
    sets = {"A": w.core, "F1": w.boundary, "F2": w.closed}
    if cfg.fmt == "text":
        _emit(cfg, export.write_labels(topo.labels(sets[cfg.extra.get("which", "F1")])))
        return EXIT_OK
    payload = {"s": frame.params.s, "t": frame.params.t, "g": cfg.g,
               **{k: topo.labels(v) for k, v in sets.items()},
               "sizes": {k: len(v) for k, v in sets.items()},
               "claimed_levels": {"F1": cfg.g, "F2": max(frame.params.s - 1, cfg.g)},
               "measured_levels": {k: _good_level(topo, sets[k]) for k in ("F1", "F2")}}
    _emit(cfg, frame.annotate(payload))
    short = any(payload["measured_levels"][k] < payload["claimed_levels"][k] for k in ("F1", "F2"))
    return EXIT_FAIL if short else EXIT_OK


def _good_level(topo: Topology, faults) -> int:
    """delta(G - F): the largest g for which F is a g-good-neighbor set."""
    return int(kernels.min_degree(topo.nbr, topo.mask(faults))[0])


def cmd_distinguish(cfg: RunConfig) -> int:
    frame = _Frame(cfg.s, cfg.t)
    f1 = frame.vertices(_labels_arg(cfg.extra["f1"]))
    f2 = frame.vertices(_labels_arg(cfg.extra["f2"]))
    report = diagnosis.distinguish(frame.topo, f1, f2, cfg.model)
    _emit(cfg, frame.annotate(report.to_json(frame.topo)))
    return EXIT_OK


def cmd_verify_tg(cfg: RunConfig) -> int:
    frame = _Frame(cfg.s, cfg.t)
    report = diagnosis.verify_tg(frame.topo, cfg.g, cfg.model, cfg.mode, n=cfg.samples,
                                 seed=cfg.seed, budget=cfg.budget, jobs=cfg.jobs)
    payload = report.to_json(frame.topo)
    if cfg.mode == "sampled":
        payload["n"] = cfg.samples
    _emit(cfg, frame.annotate(payload))
    if report.partial:
        return EXIT_PARTIAL
    return EXIT_OK if report.passed else EXIT_FAIL


def _random_fault(topo: Topology, g: int, size: int, seed: int) -> frozenset[int]:
    rng = np.random.default_rng(seed)
    for _ in range(10_000):
        mask = np.zeros(topo.order, dtype=bool)
        mask[rng.choice(topo.order, size=size, replace=False)] = True
        if structure.is_g_good_neighbor_set(topo, np.flatnonzero(mask).tolist(), g):
            return frozenset(int(x) for x in np.flatnonzero(mask))
    raise UsageError(f"could not draw a {g}-good-neighbor fault set of size {size}")


def cmd_simulate(cfg: RunConfig) -> int:
    frame = _Frame(cfg.s, cfg.t)
    topo = frame.topo
    extra = cfg.extra
    if extra.get("random_fault") is not None:
        fault = _random_fault(topo, cfg.g, extra["random_fault"], cfg.seed)
    elif extra.get("fault_file"):
        fault = frame.vertices(export.read_labels(Path(extra["fault_file"]).read_text()))
    else:
        fault = frame.vertices(export.read_labels(extra.get("fault", "")))
    max_size = extra.get("max_size")
    if max_size is None:
        max_size = diagnosis.tg_formula(frame.params, cfg.g, cfg.model)
    policy = diagnosis.AdversaryPolicy.parse(extra.get("policy", "random"), seed=cfg.seed)
    assignment = diagnosis.build_assignment(topo, cfg.model)
    syndrome = diagnosis.generate_syndrome(assignment, fault, policy)
    result = diagnosis.diagnose(assignment, syndrome, cfg.g, max_size, cfg.budget)
    unique = result.unique
    payload = {
        "s": frame.params.s, "t": frame.params.t, "g": cfg.g, "model": assignment.model,
        "T": max_size,
        "injected": topo.labels(fault),
        "injected_is_good_neighbor": structure.is_g_good_neighbor_set(topo, fault, cfg.g),
        "policy": str(policy),
        "tests": len(assignment),
        "syndrome_digest": syndrome.digest(),
        "candidates": [topo.labels(c) for c in result.candidates],
        "status": ("partial" if result.partial else "unique" if unique is not None
                   else "ambiguous" if result.candidates else "none"),
        "correct": unique == fault,
    }
    _emit(cfg, frame.annotate(payload))
    if result.partial:
        return EXIT_PARTIAL
    return EXIT_OK if unique == fault else EXIT_FAIL


COMMANDS = {
    "gen": cmd_gen,
    "props": cmd_props,
    "kappa": cmd_kappa,
    "faultset": cmd_faultset,
    "distinguish": cmd_distinguish,
    "verify-tg": cmd_verify_tg,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        cfg = _config(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, LetqError, OSError) as exc:
        print(f"letq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
