"""Command-line entry point: ``risconn <subcommand> [options]``.

Exit status: 0 on success, 2 on configuration errors, 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from risconn.channel import PhaseMode
from risconn.config import ExperimentConfig, load_config
from risconn.errors import ConfigurationError
from risconn.graph import build_graph, laplacian, read_edgelist, write_edgelist
from risconn.harness import SweepSpec, derive_seed, emit_csv, run_instance, run_sweep, write_csv
from risconn.optimizer import (
    Scheme,
    case1_linear_search,
    enumerate_candidates,
    exhaustive_oracle,
    original_scheme,
    random_scheme,
    sdp_relaxation_scheme,
)

log = logging.getLogger("risconn")

EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULT_VALUES = {
    "sweep-uav": list(range(2, 13)),
    "sweep-ue": list(range(2, 15)),
    "sweep-snr": [float(v) for v in range(0, 40, 5)],
}


def _csv_list(text, cast=str):
    return [cast(x.strip()) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser, multi_scheme: bool = True) -> None:
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--phase-mode", choices=[m.value for m in PhaseMode])
    p.add_argument("--out", help="output path (default: stdout)")
    if multi_scheme:
        p.add_argument("--schemes", help="comma-separated scheme list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risconn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evaluate every scheme on one scenario (JSON)")
    _common(p)
    p.add_argument("--ue", type=int, default=1, help="designated UE for the linear scheme (1-based)")

    p = sub.add_parser("solve", help="run one scheme on one scenario (JSON)")
    _common(p, multi_scheme=False)
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.SDP.value)
    p.add_argument("--ue", type=int, help="designated UE for the linear scheme (1-based)")
    p.add_argument("--graph", help="read the base graph from an edge-list file")
    p.add_argument("--export-graph", help="write the resulting graph as an edge list")

    for name, what in (("sweep-uav", "UAVs"), ("sweep-ue", "UEs"), ("sweep-snr", "RIS SNR threshold")):
        p = sub.add_parser(name, help=f"Monte Carlo sweep over the number of {what} (CSV)")
        _common(p)
        p.add_argument("--iterations", type=int, default=500)
        p.add_argument("--values", help="comma-separated swept values")
        if name != "sweep-ue":
            p.add_argument("--num-ue", type=int, help="override the number of UEs")
        if name != "sweep-uav":
            p.add_argument("--num-uav", type=int, help="override the number of UAVs")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.phase_mode:
        changes["phase_mode"] = PhaseMode(args.phase_mode)
    if getattr(args, "num_ue", None) is not None:
        changes["num_ue"] = args.num_ue
    if getattr(args, "num_uav", None) is not None:
        changes["num_uav"] = args.num_uav
    return cfg.with_overrides(**changes) if changes else cfg


def _schemes(args, num_ue: int):
    if getattr(args, "schemes", None):
        try:
            return [Scheme(s) for s in _csv_list(args.schemes)]
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
    base = [Scheme.ORIGINAL, Scheme.RANDOM]
    if num_ue == 1:
        base.append(Scheme.LINEAR)
    return base + [Scheme.SDP, Scheme.EXHAUSTIVE]


def _write(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> None:
    cfg = _load(args)
    sc = cfg.scenario()
    schemes = _schemes(args, sc.num_ue)
    res = run_instance(sc, schemes, cfg.phase_mode, cfg.solver, ue=args.ue - 1)
    payload = {
        "seed": sc.seed,
        "num_ue": sc.num_ue,
        "num_uav": sc.num_uav,
        "phase_mode": cfg.phase_mode.value,
        "num_edges": build_graph(sc).num_edges,
        "num_candidates": res.num_candidates,
        "lambda2": {s.value: v for s, v in res.lambda2.items()},
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)


def cmd_solve(args) -> None:
    cfg = _load(args)
    sc = cfg.scenario()
    g = read_edgelist(args.graph) if args.graph else build_graph(sc)
    if g.num_nodes != sc.num_nodes:
        raise ConfigurationError(f"graph has {g.num_nodes} nodes, scenario has {sc.num_nodes}")
    L = laplacian(g)
    scheme = Scheme(args.scheme)
    ue = args.ue
    if ue is None and sc.num_ue == 1:
        ue = 1
    if ue is not None and not 1 <= ue <= sc.num_ue:
        raise ConfigurationError(f"--ue must lie in 1..{sc.num_ue}")
    if scheme is Scheme.LINEAR:
        if ue is None:
            raise ConfigurationError("--scheme linear needs --ue when there are several UEs")
        cands = enumerate_candidates(sc, g, ue_filter=ue - 1, phase_mode=cfg.phase_mode)
        result = case1_linear_search(sc, g, cands)
    else:
        cands = enumerate_candidates(sc, g, phase_mode=cfg.phase_mode)
        if scheme is Scheme.ORIGINAL:
            result = original_scheme(L)
        elif scheme is Scheme.RANDOM:
            result = random_scheme(L, cands, derive_seed(sc.seed, 1))
        elif scheme is Scheme.SDP:
            result = sdp_relaxation_scheme(L, cands, cfg.solver)
        else:
            result = exhaustive_oracle(L, cands)
    if args.export_graph:
        out_g = g if result.chosen is None else g.with_edge(*result.chosen.nodes)
        write_edgelist(out_g, args.export_graph)
    _write(json.dumps(result.to_json()) + "\n", args.out)


def cmd_sweep(args) -> None:
    cfg = _load(args)
    parameter = {"sweep-uav": "num_uav", "sweep-ue": "num_ue", "sweep-snr": "gamma0_ris"}[args.command]
    cast = float if parameter == "gamma0_ris" else int
    try:
        values = _csv_list(args.values, cast) if args.values else DEFAULT_VALUES[args.command]
    except ValueError as exc:
        raise ConfigurationError(f"--values: {exc}") from exc
    num_ue = cfg.num_ue if parameter != "num_ue" else min(values)
    spec = SweepSpec(
        swept_parameter=parameter,
        values=tuple(values),
        iterations=args.iterations,
        schemes=tuple(_schemes(args, num_ue)),
        base=cfg,
        seed=cfg.seed,
    )
    if Scheme.LINEAR in spec.schemes and (parameter == "num_ue" or cfg.num_ue != 1):
        raise ConfigurationError("the linear scheme is only available in sweeps with one UE")
    records = run_sweep(spec, progress=_progress_logger(spec))
    if args.out:
        emit_csv(records, args.out)
    else:
        write_csv(records, sys.stdout)


def _progress_logger(spec: SweepSpec):
    def progress(value, k):
        if k == spec.iterations - 1:
            log.info("%s=%s done (%d iterations)", spec.swept_parameter, value, spec.iterations)

    return progress


COMMANDS = {
    "simulate": cmd_simulate,
    "solve": cmd_solve,
    "sweep-uav": cmd_sweep,
    "sweep-ue": cmd_sweep,
    "sweep-snr": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"risconn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"risconn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
