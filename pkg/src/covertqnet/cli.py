"""Command-line front end.

Subcommands: sweep, distill, teleport, graph, bfk, netrun.  Units are
accepted with suffixes (10us, 100kHz, 30km) and normalized to seconds,
angular 1/s, and light-seconds (c = 1); frequency-suffixed gap values are
read as angular frequencies.  Exit codes: 0 success, 2 invalid usage or
parameters, 3 domain errors (non-convergence, not distillable, no path).

Every stochastic subcommand requires --seed; there is no ambient default.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bfk, entanglement, graphs, netsim, vacuum
from .errors import CovertQNetError
from .protocols import BellResource, teleport_state

SPEED_OF_LIGHT_KM_S = 299792.458
SCHEMA_VERSION = 1

_TIME_SUFFIXES = {"ns": 1e-9, "us": 1e-6, "ms": 1e-3, "s": 1.0}
_FREQ_SUFFIXES = {"ghz": 1e9, "mhz": 1e6, "khz": 1e3, "hz": 1.0}


def parse_time(text):
    """Seconds; accepts ns/us/ms/s suffixes."""
    t = text.strip().lower()
    for suf, scale in _TIME_SUFFIXES.items():
        if t.endswith(suf) and not t[: -len(suf)] == "":
            try:
                return float(t[: -len(suf)]) * scale
            except ValueError:
                break
    return float(t)


def parse_angular_frequency(text):
    """Angular frequency in 1/s; Hz-family suffixes scale the number."""
    t = text.strip().lower()
    for suf, scale in _FREQ_SUFFIXES.items():
        if t.endswith(suf):
            return float(t[: -len(suf)]) * scale
    return float(t)


def parse_distance(text):
    """Light-seconds; km and m suffixes convert via c."""
    t = text.strip().lower()
    if t.endswith("km"):
        return float(t[:-2]) / SPEED_OF_LIGHT_KM_S
    if t.endswith("m") and not t.endswith("km"):
        return float(t[:-1]) / (SPEED_OF_LIGHT_KM_S * 1e3)
    return float(t)


def parse_distance_grid(text, points):
    """`a..b` is a log grid of `points` values; otherwise a comma list."""
    t = text.strip()
    if ".." in t:
        lo_s, hi_s = t.split("..", 1)
        lo, hi = parse_distance(lo_s), parse_distance(hi_s)
        if lo <= 0 or hi <= 0:
            raise ValueError("log grid endpoints must be positive")
        return list(np.geomspace(lo, hi, points))
    return [parse_distance(tok) for tok in t.split(",") if tok]


def _write_json(path, doc):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_sweep(args):
    cfg = vacuum.DetectorConfig(
        coupling_sq=args.lambda2, gap=parse_angular_frequency(args.delta),
        width=parse_time(args.sigma), separation=0.0, iterations=args.N)
    grid = parse_distance_grid(args.L, args.points)
    n_list = ([int(tok) for tok in args.n_list.split(",") if tok]
              if args.n_list else [args.N])
    rows = vacuum.sweep_distance(cfg, grid, n_list, tol=args.tol)
    vacuum.write_sweep_csv(rows, args.out)
    failed = sum(1 for r in rows if r.error)
    if failed == len(rows):
        print(f"sweep: all {failed} rows failed", file=sys.stderr)
        return 3
    if failed:
        print(f"sweep: {failed}/{len(rows)} rows recorded errors",
              file=sys.stderr)
    return 0


def cmd_distill(args):
    trace = entanglement.distill_to_target(args.F, args.target)
    doc = json.loads(trace.to_json())
    doc["schema_version"] = SCHEMA_VERSION
    _write_json(args.out, doc)
    return 0


def cmd_teleport(args):
    rng = np.random.default_rng(args.seed)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    if args.resource == "ideal":
        resource = BellResource.ideal("alice", "bob")
    else:
        resource = BellResource.werner("alice", "bob", args.fidelity)
    out, transcript = teleport_state(v, resource, rng)
    from .qsim import fidelity
    doc = {
        "schema_version": SCHEMA_VERSION,
        "resource": args.resource,
        "resource_fidelity": resource.fidelity,
        "fidelity": fidelity(v, out),
        "covert_bits": transcript.covert_bits,
        "bell_pairs_consumed": transcript.bell_pairs_consumed,
        "seed": args.seed,
    }
    _write_json(args.out, doc)
    return 0


def cmd_graph(args):
    if args.kind == "brickwork":
        g = graphs.brickwork_graph(args.n, args.m)
    elif args.kind == "raussendorf":
        g, _ = graphs.raussendorf_cell()
    elif args.kind == "tile":
        g = graphs.tile_cells(args.nx, args.ny, args.nz)
    else:
        raise ValueError(f"unknown graph kind {args.kind!r}")
    if args.out:
        graphs.save_graph(g, args.out)
    verified = None
    if g.n <= args.verify_cap:
        verified = graphs.verify_graph_state(graphs.build_graph_state(g), g)
    _write_json(None, {
        "schema_version": SCHEMA_VERSION, "kind": args.kind,
        "qubits": g.n, "edges": len(g.edges), "tag": g.tag,
        "stabilizers_verified": verified, "out": args.out,
    })
    return 0


def cmd_bfk(args):
    if args.pattern:
        desc = bfk.load_run_description(args.pattern)
        n, m, phi = desc["n"], desc["m"], desc["phi_table"]
        seed = args.seed if args.seed is not None else desc["seed"]
    else:
        if args.n is None or args.m is None:
            raise ValueError("need --pattern or both --n and --m")
        n, m = args.n, args.m
        phi = np.zeros((n, m), dtype=int)
        seed = args.seed
    if seed is None:
        raise ValueError("a seed is required (from --seed or the pattern "
                         "file)")
    outcomes, transcript = bfk.run_blind_computation(phi, seed)
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(transcript.to_json_lines())
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": n, "m": m, "seed": seed,
        "layout": transcript.layout,
        "covert_bits": transcript.covert_bits,
        "corrected_outcomes": outcomes.tolist(),
    }
    _write_json(args.out, doc)
    return 0


def cmd_netrun(args):
    topology = netsim.Topology.from_json(args.topology)
    rng = np.random.default_rng(args.seed)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    _, report = netsim.route_and_teleport(args.src, args.dst, v, topology,
                                          rng)
    report.seed = args.seed
    text = report.to_json()
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="covertqnet",
        description="covert quantum network simulator")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="detector-separation sweep to CSV")
    sp.add_argument("--lambda2", type=float, required=True,
                    help="squared coupling (dimensionless)")
    sp.add_argument("--N", type=int, required=True,
                    help="extraction iterations")
    sp.add_argument("--sigma", required=True,
                    help="window width (e.g. 10us)")
    sp.add_argument("--delta", required=True,
                    help="detector gap, angular (e.g. 100kHz -> 1e5 1/s)")
    sp.add_argument("--L", required=True,
                    help="separation grid: lo..hi (log) or comma list; "
                         "km suffix converts at c")
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--n-list", default=None,
                    help="comma list of iteration counts per distance")
    sp.add_argument("--tol", type=float, default=vacuum.DEFAULT_TOL)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    dp = sub.add_parser("distill", help="recurrence distillation plan")
    dp.add_argument("--F", type=float, required=True,
                    help="input Werner fidelity in (1/2, 1)")
    dp.add_argument("--target", type=float, required=True)
    dp.add_argument("--out", default=None)
    dp.set_defaults(func=cmd_distill)

    tp = sub.add_parser("teleport", help="teleport a seeded random qubit")
    tp.add_argument("--resource", choices=["ideal", "werner"],
                    default="ideal")
    tp.add_argument("--fidelity", type=float, default=1.0,
                    help="Werner resource fidelity")
    tp.add_argument("--seed", type=int, required=True)
    tp.add_argument("--out", default=None)
    tp.set_defaults(func=cmd_teleport)

    gp = sub.add_parser("graph", help="build and export graph layouts")
    gp.add_argument("--kind", choices=["brickwork", "raussendorf", "tile"],
                    required=True)
    gp.add_argument("--n", type=int, default=5, help="brickwork columns")
    gp.add_argument("--m", type=int, default=4, help="brickwork rows")
    gp.add_argument("--nx", type=int, default=1)
    gp.add_argument("--ny", type=int, default=1)
    gp.add_argument("--nz", type=int, default=1)
    gp.add_argument("--verify-cap", type=int, default=200,
                    help="skip stabilizer verification above this size")
    gp.add_argument("--out", default=None,
                    help="adjacency-list output path")
    gp.set_defaults(func=cmd_graph)

    bp = sub.add_parser("bfk", help="run blind delegated computation")
    bp.add_argument("--pattern", default=None,
                    help="run description JSON (n, m, phi_table, seed)")
    bp.add_argument("--n", type=int, default=None)
    bp.add_argument("--m", type=int, default=None)
    bp.add_argument("--seed", type=int, default=None)
    bp.add_argument("--transcript", default=None,
                    help="write message log as JSON lines")
    bp.add_argument("--out", default=None)
    bp.set_defaults(func=cmd_bfk)

    np_ = sub.add_parser("netrun", help="route and teleport across a "
                                        "topology file")
    np_.add_argument("--topology", required=True)
    np_.add_argument("--src", required=True)
    np_.add_argument("--dst", required=True)
    np_.add_argument("--seed", type=int, required=True)
    np_.add_argument("--out", default=None)
    np_.set_defaults(func=cmd_netrun)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CovertQNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
