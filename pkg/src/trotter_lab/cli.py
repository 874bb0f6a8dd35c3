"""Command-line entry point: ``trotter-lab {generate,color,order,run,summarize}``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import harness
from .commutation import COLORING_METHODS, build_graph, coloring_for, to_dot, validate_grouping
from .hamiltonians import HamiltonianInstance, deserialize, serialize
from .orderings import (deplete_groups, equalise_groups, group_evolve_orderings,
                        lexicographic_ordering, magnitude_ordering, random_orderings)
from .pauli import format_dense

THREADS_ENV = "TROTTER_LAB_THREADS"


class ConfigError(ValueError):
    pass


def parse_ints(text: str) -> tuple[int, ...]:
    """``"3..8"`` (inclusive) or ``"3,5,8"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ConfigError(f"empty integer list {text!r}")
    return tuple(out)


def parse_floats(text: str) -> tuple[float, ...]:
    """``"0.1,0.5"`` or ``"0..3/11"`` (11 evenly spaced values, endpoints included)."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part and "/" in part:
            span, n = part.split("/")
            lo, hi = span.split("..")
            out.extend(round(float(v), 12) for v in np.linspace(float(lo), float(hi), int(n)))
        elif part:
            out.append(float(part))
    if not out:
        raise ConfigError(f"empty value list {text!r}")
    return tuple(out)


def parse_grids(text: str) -> tuple[tuple[int, int], ...]:
    """``"2x2,3x4"``."""
    grids = []
    for part in text.split(","):
        lx, _, ly = part.strip().partition("x")
        if not ly:
            raise ConfigError(f"grid {part!r} must look like LXxLY")
        grids.append((int(lx), int(ly)))
    return tuple(grids)


def _wrap(parser):
    def convert(text):
        try:
            return parser(text)
        except (ValueError, ConfigError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = parser.__name__
    return convert


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instances")
    g.add_argument("--family", default="xxz", choices=sorted(harness.FAMILY_ALIASES),
                   help="Hamiltonian family (default: xxz)")
    g.add_argument("--L", type=_wrap(parse_ints), help="1D chain lengths, e.g. 3..8 or 4,6")
    g.add_argument("--grid", type=_wrap(parse_grids), help="2D grids, e.g. 2x2,3x4")
    g.add_argument("--delta", type=_wrap(parse_floats), help="XXZ anisotropy values")
    g.add_argument("--g", type=_wrap(parse_floats), help="1D transverse-field values")
    g.add_argument("--alpha", type=_wrap(parse_floats), help="triangular J2/J1 values, e.g. 0..0.5/27")
    g.add_argument("--hx", type=_wrap(parse_floats), help="rectangular field values, e.g. 0..3/11")
    g.add_argument("--input", nargs="+", type=Path, help="Hamiltonian files instead of generated ones")
    g.add_argument("--large", action="store_true", help="allow up to 20 qubits (default cap 14)")
    g.add_argument("--max-qubits", type=int)


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sweep")
    g.add_argument("--orders", type=_wrap(parse_ints), default=(1, 2), help="Trotter orders (1,2)")
    g.add_argument("--steps", type=_wrap(parse_ints), default=(3, 5, 10, 20), help="step counts")
    g.add_argument("--T", type=float, help="total time (default 5.0 for 1D, 1.0 for 2D)")
    g.add_argument("--n-random", type=int, default=30, help="random orderings per instance")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--strategies", default=",".join(harness.STRATEGIES),
                   help="comma list from " + ",".join(harness.STRATEGIES))
    g.add_argument("--colorings", help="comma list from " + ",".join(COLORING_METHODS))
    g.add_argument("--threads", type=int,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")


def _sweep_config(args) -> harness.SweepConfig:
    family = harness.FAMILY_ALIASES[args.family]
    if family == "xxz_1d":
        sizes = args.L or ()
    else:
        sizes = args.grid or ()
    strategies = getattr(args, "strategies", ",".join(harness.STRATEGIES))
    colorings = getattr(args, "colorings", None)
    threads = getattr(args, "threads", None) or int(os.environ.get(THREADS_ENV, "1"))
    try:
        return harness.SweepConfig(
            family=family, sizes=sizes, deltas=args.delta or (), gs=args.g or (),
            alphas=args.alpha or (), hxs=args.hx or (),
            orders=getattr(args, "orders", (1, 2)), steps=getattr(args, "steps", (3, 5, 10, 20)),
            total_time=getattr(args, "T", None), n_random=getattr(args, "n_random", 30),
            seed=getattr(args, "seed", 0),
            strategies=tuple(s for s in strategies.split(",") if s),
            colorings=tuple(c for c in (colorings or "").split(",") if c),
            large=args.large, max_qubits=args.max_qubits, threads=threads)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _instances(args, cfg: harness.SweepConfig) -> list[HamiltonianInstance]:
    if args.input:
        out = []
        for path in args.input:
            try:
                out.append(deserialize(path.read_text()))
            except OSError as exc:
                raise ConfigError(f"cannot read {path}: {exc}") from exc
            except ValueError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return out
    instances = harness.build_instances(cfg)
    if not instances:
        raise ConfigError("the selected grid produces no instances")
    return instances


def _file_name(h: HamiltonianInstance) -> str:
    size = (f"L{h.n_qubits}" if h.lattice is None
            else f"{h.lattice.width}x{h.lattice.length}")
    params = "_".join(f"{k}{v:g}" for k, v in h.params.items())
    return f"{h.family}_{size}_{params}.ham"


def cmd_generate(args) -> int:
    cfg = _sweep_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    instances = _instances(args, cfg)
    for h in instances:
        (out / _file_name(h)).write_text(serialize(h))
    print(f"wrote {len(instances)} Hamiltonians to {out}")
    return 0


def cmd_color(args) -> int:
    cfg = _sweep_config(args)
    for h in _instances(args, cfg):
        graph = build_graph(h)
        grp = coloring_for(args.method, h, graph)
        ok = validate_grouping(graph, grp)
        print(f"{h.describe()} method={grp.method} groups={grp.n_groups} proper={ok}")
        for gi, group in enumerate(grp.groups):
            labels = " ".join(format_dense(h.terms[i].pauli) for i in group)
            print(f"  G{gi}: {list(group)}  {labels}")
        if args.dot:
            Path(args.dot).write_text(to_dot(graph, grp))
    return 0


def cmd_order(args) -> int:
    cfg = _sweep_config(args)
    for h in _instances(args, cfg):
        print(h.describe())
        grp = coloring_for(args.method, h)
        if args.strategy == "group_evolve":
            orderings = group_evolve_orderings(grp)
        elif args.strategy == "depleteGroups":
            orderings = [deplete_groups(grp, h)]
        elif args.strategy == "equaliseGroups":
            orderings = [equalise_groups(grp, h)]
        elif args.strategy == "magnitude":
            orderings = [magnitude_ordering(h)]
        elif args.strategy == "lex_dense":
            orderings = [lexicographic_ordering(h)]
        else:
            orderings = random_orderings(h, args.n_random, args.seed)
        for o in orderings:
            if o.kind == "grouped":
                body = " | ".join(",".join(map(str, u)) for u in o.units)
            else:
                body = ",".join(map(str, o.sequence))
            print(f"  {o.label}: {body}")
    return 0


def cmd_run(args) -> int:
    cfg = _sweep_config(args)
    instances = _instances(args, cfg)
    if args.input:
        cfg.family = instances[0].family
    n = harness.write_csv(harness.run_sweep(cfg, instances), args.out,
                          include_wall_time=not args.no_wall_time)
    print(f"wrote {n} rows for {len(instances)} instances to {args.out}")
    return 0


def cmd_summarize(args) -> int:
    try:
        rows = harness.read_csv(args.csv)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv}: {exc}") from exc
    summary = harness.summarize(rows)
    if args.out:
        harness.write_summary(summary, args.out)
        print(f"wrote {len(summary)} summary rows to {args.out}")
    else:
        harness.write_summary(summary, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trotter-lab",
        description="Benchmark Trotter orderings on Heisenberg-family Hamiltonians.",
        epilog=f"Environment: {THREADS_ENV} sets the default worker thread count.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write Hamiltonian files")
    _add_instance_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("color", help="print commuting groups (optionally DOT)")
    _add_instance_flags(p)
    p.add_argument("--method", default="xyz", choices=COLORING_METHODS)
    p.add_argument("--dot", help="write the commutation graph as DOT")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("order", help="list orderings for a strategy")
    _add_instance_flags(p)
    p.add_argument("--strategy", default="group_evolve", choices=harness.STRATEGIES)
    p.add_argument("--method", default="xyz", choices=COLORING_METHODS,
                   help="coloring used by group-based strategies")
    p.add_argument("--n-random", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("run", help="run a sweep and write result CSV")
    _add_instance_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--out", default="results.csv")
    p.add_argument("--no-wall-time", action="store_true", help="omit the wall_time column")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("summarize", help="aggregate a result CSV")
    p.add_argument("csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"trotter-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
