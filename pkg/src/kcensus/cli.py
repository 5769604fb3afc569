"""Command-line frontend: ``kcensus bound|count|solve|orbits <file>``.

The JSON report goes to stdout and a one-line summary to stderr. Exit codes:
0 on success, 1 when a computation fails or a precondition does not hold,
2 for unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, census, homotopy
from .algsys import build_system
from .errors import (
    DisconnectedGraph,
    KcensusError,
    MalformedInput,
    NoBalancedSubnetwork,
    NotUnicycle,
    OddCycle,
    SolverFailure,
    ZeroCoupling,
)
from .network import network_to_dict, parse_network, resolve_generic, unique_cycle
from .polytope import MAX_FACET_DIM, adjacency_polytope, facets, triangulate

INPUT_ERRORS = (MalformedInput, DisconnectedGraph, ZeroCoupling)


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _vec(xs) -> list:
    return [_pair(z) for z in xs]


# --- commands ---------------------------------------------------------------------


def cmd_bound(net, args) -> tuple[dict, str]:
    cfg = adjacency_polytope(net)
    tri = triangulate(net, args.seed)
    out = {"nvol": len(tri), "cells": len(tri), "lifting_seed": tri.seed}
    if net.n <= MAX_FACET_DIM:
        out["facets"] = len(facets(cfg, tri))
    return out, f"nvol = {len(tri)}"


def cmd_count(net, args) -> tuple[dict, str]:
    report = census.count(net, args.seed)
    summary = f"{report.family}: generic bound {report.generic_bound}"
    if report.refined_count is not None:
        summary += f", refined count {report.refined_count}"
    if report.strata:
        summary += f", {len(report.strata)} exceptional condition(s) hold"
    return report.to_dict(), summary


def _solution_dict(sol) -> dict:
    out = {
        "x": _vec(sol.x),
        "residual": sol.residual,
        "newton_contraction": sol.newton_contraction,
        "jacobian_condition": sol.jacobian_condition,
        "multiplicity": sol.multiplicity,
        "is_real_torus": sol.is_real_torus,
    }
    if sol.is_real_torus:
        out["theta"] = [float(t) for t in sol.angles]
    return out


def cmd_solve(net, args) -> tuple[dict, str]:
    sampled = {}
    if net.has_generic():
        net, sampled = resolve_generic(net, args.seed)
    system = build_system(net, args.variant)
    tri = triangulate(net, args.seed, homotopy.SOLVER_BOUND)
    sols = homotopy.solve_system(system, tri, args.seed)
    out = {
        "variant": args.variant,
        "sampled": sampled,
        "raw_path_count": sols.raw_path_count,
        "distinct_count": sols.distinct_count,
        "converged": sols.converged,
        "diverged": sols.diverged,
        "failed": sols.failed,
        "real_count": sols.real_count,
        "max_residual": sols.max_residual,
        "attempts": sols.attempts,
        "paths": [{"cell": p.cell, "status": p.status, "steps": p.steps} for p in sols.paths],
        "solutions": [_solution_dict(s) for s in sols.solutions],
    }
    summary = (
        f"{sols.distinct_count} distinct zeros from {sols.raw_path_count} paths "
        f"({sols.diverged} diverged, {sols.failed} failed), {sols.real_count} real"
    )
    if sols.failed:
        raise SolverFailure(f"{sols.failed} path(s) failed after {sols.attempts} ray attempt(s)", report=out)
    return out, summary


def _orbit_dict(orbit, residual) -> dict:
    out = {
        "base": _vec(orbit.base),
        "mu": [int(m) for m in orbit.mu],
        "tree_arcs": [list(a) for a in orbit.tree_arcs],
        "eta": list(orbit.eta),
        "max_residual": residual,
    }
    if orbit.real_scale is not None:
        out["real"] = {"scale": orbit.real_scale, "angle_offsets": [float(a) for a in orbit.angle_offsets]}
    return out


def _orbits_for(net):
    if unique_cycle(net):
        try:
            return homotopy.real_orbits(net)
        except KcensusError as err:
            if isinstance(err, (NoBalancedSubnetwork, OddCycle, NotUnicycle)):
                raise
            return homotopy.unicycle_orbits(net)
    return [homotopy.shared_edge_orbit(net)]


def cmd_orbits(net, args) -> tuple[dict, str]:
    orbits = _orbits_for(net)
    residuals = [homotopy.verify_orbit(net, o, args.samples) for o in orbits]
    out = {"samples": args.samples, "orbits": [_orbit_dict(o, r) for o, r in zip(orbits, residuals)]}
    if args.csv:
        ts = np.linspace(0, 2 * np.pi, args.samples, endpoint=False)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["orbit", "t"] + [f"theta_{v}" for v in range(1, net.nodes)])
            for idx, orbit in enumerate(orbits):
                if orbit.real_scale is None:
                    continue
                for t in ts:
                    writer.writerow([idx, f"{t:.12g}"] + [f"{a:.12g}" for a in orbit.angles(t)])
    return out, f"{len(orbits)} orbit(s), max residual {max(residuals):.1e}"


COMMANDS = {"bound": cmd_bound, "count": cmd_count, "solve": cmd_solve, "orbits": cmd_orbits}

GUIDANCE = {
    "NotUnicycle": "use `kcensus solve` for a numerical count",
    "WrongTopology": "use `kcensus solve` for a numerical count",
    "NoBalancedSubnetwork": "couplings are generic on the cycle; the zero set is finite",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcensus", description="Root counts and orbits of Kuramoto networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="network JSON file ('-' for stdin)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
        if name == "solve":
            p.add_argument("--variant", choices=["kuramoto", "pf", "delay"], default="kuramoto")
        if name == "orbits":
            p.add_argument("--samples", type=int, default=20)
            p.add_argument("--csv", metavar="PATH")
    return parser


def _read(path: str) -> bytes:
    return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()


def run(argv=None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    report = {"command": args.command, "seed": args.seed}
    try:
        raw = _read(args.file)
    except OSError as err:
        report["error"] = {"code": "MalformedInput", "message": str(err)}
        return report, 2
    report["input_sha256"] = hashlib.sha256(raw).hexdigest()
    start = time.perf_counter()
    try:
        net = parse_network(raw.decode("utf-8"), name=Path(args.file).stem)
        report["network"] = network_to_dict(net)
        result, summary = COMMANDS[args.command](net, args)
    except KcensusError as err:
        report["error"] = {k: v for k, v in err.to_dict().items() if k != "report"}
        if err.code in GUIDANCE:
            report["error"]["hint"] = GUIDANCE[err.code]
        if "report" in err.detail:
            report["result"] = err.detail["report"]
        return report, 2 if isinstance(err, INPUT_ERRORS) else 1
    except UnicodeDecodeError as err:
        report["error"] = {"code": "MalformedInput", "message": str(err)}
        return report, 2
    report["result"] = result
    report["summary"] = summary
    if args.timings:
        report["timings"] = {"total_s": time.perf_counter() - start}
    return report, 0


def main(argv=None) -> int:
    report, code = run(argv)
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    if "error" in report:
        err = report["error"]
        hint = f" ({err['hint']})" if "hint" in err else ""
        print(f"kcensus {report['command']}: {err['code']}: {err['message']}{hint}", file=sys.stderr)
    else:
        print(f"kcensus {report['command']}: {report['summary']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
