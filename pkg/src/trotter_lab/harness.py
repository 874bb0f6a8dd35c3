"""Sweep engine: instances x orderings x Trotter configs -> fidelity rows, plus summaries."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import os
import threading
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Iterator

import numpy as np

from .commutation import (GraphTooLargeError, Grouping, build_graph, coloring_for,
                          validate_grouping)
from .hamiltonians import HamiltonianInstance, build_rect, build_tri, build_xxz_chain, neel_state
from .orderings import (Ordering, deplete_groups, equalise_groups, group_evolve_orderings,
                        lexicographic_ordering, magnitude_ordering, random_orderings)
from .simulator import TermTable, TrotterConfig, exact_evolve, fidelity, trotter_evolve

log = logging.getLogger(__name__)

__all__ = [
    "SweepConfig",
    "ResultRow",
    "STRATEGIES",
    "FAMILY_ALIASES",
    "default_grid",
    "build_instances",
    "build_orderings",
    "run_sweep",
    "run_instance",
    "expected_row_count",
    "write_csv",
    "read_csv",
    "summarize",
    "write_summary",
    "ExactStateCache",
    "summary_text",
]

STRATEGIES = ("group_evolve", "depleteGroups", "equaliseGroups", "magnitude", "lex_dense", "random")
FAMILY_ALIASES = {"xxz": "xxz_1d", "xxz_1d": "xxz_1d", "rect": "rect_2d", "rect_2d": "rect_2d",
                  "tri": "tri_2d", "tri_2d": "tri_2d"}
DESK_MAX_QUBITS = 14
LARGE_MAX_QUBITS = 20


def _grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(round(float(v), 12) for v in np.linspace(lo, hi, n))


def default_grid(family: str) -> dict:
    """Full-study parameter grids for one family."""
    family = FAMILY_ALIASES[family]
    if family == "xxz_1d":
        return {"sizes": tuple(range(3, 21)), "deltas": (0.12, 0.25),
                "gs": tuple(round(0.1 * i, 10) for i in range(1, 26)), "total_time": 5.0}
    grids = tuple((lx, ly) for lx in (2, 3, 4, 5) for ly in (lx, lx + 1) if lx * ly <= 20)
    if family == "rect_2d":
        return {"sizes": grids, "hxs": _grid(0.0, 3.0, 11), "total_time": 1.0}
    return {"sizes": grids, "alphas": _grid(0.0, 0.5, 27), "total_time": 1.0}


@dataclass
class SweepConfig:
    family: str = "xxz_1d"
    sizes: tuple = ()  # chain lengths for 1D, (Lx, Ly) grids for 2D; empty = full grid
    deltas: tuple[float, ...] = ()
    gs: tuple[float, ...] = ()
    alphas: tuple[float, ...] = ()
    hxs: tuple[float, ...] = ()
    orders: tuple[int, ...] = (1, 2)
    steps: tuple[int, ...] = (3, 5, 10, 20)
    total_time: float | None = None
    n_random: int = 30
    seed: int = 0
    strategies: tuple[str, ...] = STRATEGIES
    colorings: tuple[str, ...] = ()  # empty = xyz/exact/greedy/handcrafted in 1D, xyz in 2D
    large: bool = False
    max_qubits: int | None = None
    exact_cap: int = 100
    threads: int = 1

    def __post_init__(self):
        self.family = FAMILY_ALIASES.get(self.family, self.family)
        if self.family not in ("xxz_1d", "rect_2d", "tri_2d"):
            raise ValueError(f"unknown family {self.family!r}")
        grid = default_grid(self.family)
        self.sizes = tuple(self.sizes) or grid["sizes"]
        if self.family == "xxz_1d":
            self.deltas = tuple(self.deltas) or grid["deltas"]
            self.gs = tuple(self.gs) or grid["gs"]
        elif self.family == "rect_2d":
            self.hxs = tuple(self.hxs) or grid["hxs"]
        else:
            self.alphas = tuple(self.alphas) or grid["alphas"]
        if self.total_time is None:
            self.total_time = grid["total_time"]
        if not self.colorings:
            self.colorings = (("xyz", "exact", "greedy", "handcrafted")
                              if self.family == "xxz_1d" else ("xyz",))
        if self.max_qubits is None:
            self.max_qubits = LARGE_MAX_QUBITS if self.large else DESK_MAX_QUBITS
        bad = set(self.strategies) - set(STRATEGIES)
        if bad:
            raise ValueError(f"unknown strategies {sorted(bad)}")
        for p in self.orders:
            if p not in (1, 2):
                raise ValueError(f"Trotter order must be 1 or 2, got {p}")
        if any(s < 1 for s in self.steps):
            raise ValueError("step counts must be positive")
        if self.n_random < 1 and "random" in self.strategies:
            raise ValueError("random strategy needs n_random >= 1")
        if not math.isfinite(self.total_time):
            raise ValueError("total_time must be finite")


@dataclass
class ResultRow:
    family: str
    n_qubits: int
    params: str
    instance: str
    ordering: str
    method: str
    grouping: str
    perm: str
    order: int
    steps: int
    total_time: float
    fidelity: float
    seed: int
    wall_time: float = 0.0

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def _params_text(h: HamiltonianInstance) -> str:
    text = ";".join(f"{k}={v:.17g}" for k, v in h.params.items())
    if h.lattice is not None:
        text += f";grid={h.lattice.width}x{h.lattice.length}"
    return text


def build_instances(cfg: SweepConfig) -> list[HamiltonianInstance]:
    out = []
    if cfg.family == "xxz_1d":
        for L in cfg.sizes:
            if L > cfg.max_qubits:
                log.info("skipping L=%d above max_qubits=%d", L, cfg.max_qubits)
                continue
            out.extend(build_xxz_chain(L, d, g) for d in cfg.deltas for g in cfg.gs)
    else:
        builder, values = ((build_rect, cfg.hxs) if cfg.family == "rect_2d"
                           else (build_tri, cfg.alphas))
        for lx, ly in cfg.sizes:
            if lx * ly > cfg.max_qubits:
                log.info("skipping %dx%d above max_qubits=%d", lx, ly, cfg.max_qubits)
                continue
            out.extend(builder(lx, ly, v) for v in values)
    return out


def instance_seed(seed: int, h: HamiltonianInstance) -> int:
    """Per-instance RNG seed derived from the sweep seed and the instance content."""
    digest = hashlib.sha256(f"{seed}:{h.content_hash()}".encode()).hexdigest()
    return int(digest[:15], 16)


def build_orderings(h: HamiltonianInstance, cfg: SweepConfig) -> tuple[list[Ordering], dict[str, Grouping]]:
    """Orderings for one instance, and the validated groupings they came from."""
    graph = build_graph(h)
    groupings: dict[str, Grouping] = {}
    for method in cfg.colorings:
        try:
            grp = coloring_for(method, h, graph, exact_cap=cfg.exact_cap)
        except GraphTooLargeError as exc:
            log.warning("%s: %s; skipping %s coloring", h.describe(), exc, method)
            continue
        if not validate_grouping(graph, grp):
            raise RuntimeError(f"{method} coloring of {h.describe()} is not proper")
        groupings[method] = grp

    orderings: list[Ordering] = []
    if "group_evolve" in cfg.strategies:
        for grp in groupings.values():
            orderings.extend(group_evolve_orderings(grp))
    xyz = groupings.get("xyz")
    if xyz is None and ({"depleteGroups", "equaliseGroups"} & set(cfg.strategies)):
        xyz = coloring_for("xyz", h)
        if not validate_grouping(graph, xyz):
            raise RuntimeError(f"xyz coloring of {h.describe()} is not proper")
    if "depleteGroups" in cfg.strategies:
        orderings.append(deplete_groups(xyz, h))
    if "equaliseGroups" in cfg.strategies:
        orderings.append(equalise_groups(xyz, h))
    if "magnitude" in cfg.strategies:
        orderings.append(magnitude_ordering(h))
    if "lex_dense" in cfg.strategies:
        orderings.append(lexicographic_ordering(h))
    if "random" in cfg.strategies:
        orderings.extend(random_orderings(h, cfg.n_random, instance_seed(cfg.seed, h)))
    return orderings, groupings


class ExactStateCache:
    """Exact states keyed by (content hash of the serialized Hamiltonian, T)."""

    def __init__(self):
        self._states: dict[tuple[str, float], np.ndarray] = {}
        self._lock = threading.Lock()

    def get(self, h: HamiltonianInstance, T: float, psi0: np.ndarray,
            table: TermTable | None = None) -> np.ndarray:
        key = (h.content_hash(), float(T))
        with self._lock:
            hit = self._states.get(key)
        if hit is not None:
            return hit
        state = exact_evolve(h, T, psi0, max_qubits=LARGE_MAX_QUBITS, table=table)
        with self._lock:
            self._states.setdefault(key, state)
        return state

    def __len__(self) -> int:
        return len(self._states)


def run_instance(h: HamiltonianInstance, cfg: SweepConfig,
                 cache: ExactStateCache | None = None) -> list[ResultRow]:
    cache = cache if cache is not None else ExactStateCache()
    orderings, groupings = build_orderings(h, cfg)
    T = cfg.total_time
    psi0 = neel_state(h.n_qubits)
    table = TermTable(h)
    exact = cache.get(h, T, psi0, table)
    seed = instance_seed(cfg.seed, h)
    params = _params_text(h)
    base = dict(family=h.family, n_qubits=h.n_qubits, params=params,
                instance=h.content_hash()[:12], total_time=T, seed=seed)
    rows: list[ResultRow] = []
    for p in cfg.orders:
        for s in cfg.steps:
            trotter = TrotterConfig(p, s, T)
            random_f = []
            for o in orderings:
                t0 = time.perf_counter()
                f = fidelity(exact, trotter_evolve(h, o, trotter, psi0, table))
                wall = time.perf_counter() - t0
                grouping = o.method[:-len("_groups")] if o.method.endswith("_groups") else ""
                rows.append(ResultRow(ordering=o.label, method=o.method, grouping=grouping,
                                      perm=o.permutation or "", order=p, steps=s,
                                      fidelity=f, wall_time=wall, **base))
                if o.method == "random":
                    random_f.append(f)
            if random_f:
                for label, value in (("random_mean", float(np.mean(random_f))),
                                     ("random_best", float(np.max(random_f)))):
                    rows.append(ResultRow(ordering=label, method=label, grouping="", perm="",
                                          order=p, steps=s, fidelity=value, **base))
    return rows


def run_sweep(cfg: SweepConfig,
              instances: Iterable[HamiltonianInstance] | None = None) -> Iterator[ResultRow]:
    """Yield result rows instance by instance, in instance order.

    Failing instances are logged and skipped. With ``cfg.threads > 1`` instances
    run concurrently; output order is unchanged.
    """
    instances = list(instances) if instances is not None else build_instances(cfg)
    cache = ExactStateCache()

    def task(h):
        try:
            return run_instance(h, cfg, cache)
        except Exception:  # noqa: BLE001 - one bad instance must not abort the sweep
            log.exception("instance %s failed; skipped", h.describe())
            return []

    threads = max(1, int(cfg.threads))
    if threads == 1:
        for h in instances:
            yield from task(h)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for rows in pool.map(task, instances):
            yield from rows


def expected_row_count(cfg: SweepConfig, instances: list[HamiltonianInstance] | None = None) -> int:
    """Closed-form row count for a sweep (assumes every coloring succeeds)."""
    instances = instances if instances is not None else build_instances(cfg)
    total = 0
    for h in instances:
        per = 0
        if "group_evolve" in cfg.strategies:
            for method in cfg.colorings:
                per += math.factorial(coloring_for(method, h, exact_cap=cfg.exact_cap).n_groups)
        per += sum(s in cfg.strategies for s in ("depleteGroups", "equaliseGroups",
                                                 "magnitude", "lex_dense"))
        if "random" in cfg.strategies:
            per += cfg.n_random + 2
        total += per * len(cfg.orders) * len(cfg.steps)
    return total


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(rows: Iterable[ResultRow], out, include_wall_time: bool = True) -> int:
    """Write rows to a path or text stream; returns the number of rows."""
    cols = ResultRow.columns()
    if not include_wall_time:
        cols.remove("wall_time")
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            return write_csv(rows, fh, include_wall_time)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(cols)
    n = 0
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in cols])
        n += 1
    return n


_INT_COLS = {"n_qubits", "order", "steps", "seed"}
_FLOAT_COLS = {"fidelity", "wall_time", "total_time"}


def read_csv(source) -> list[ResultRow]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return read_csv(fh)
    rows = []
    for rec in csv.DictReader(source):
        kw = {}
        for f in fields(ResultRow):
            if f.name not in rec:
                continue
            v = rec[f.name]
            kw[f.name] = int(v) if f.name in _INT_COLS else float(v) if f.name in _FLOAT_COLS else v
        rows.append(ResultRow(**kw))
    return rows


def summarize(rows: Iterable[ResultRow]) -> list[dict]:
    """Plot-ready aggregates.

    ``by_steps``: mean fidelity per (family, method, p, s).
    ``by_size``: mean fidelity per (family, method, p, s, n).
    ``perm_wins``: share of instances on which each permutation is the best one.

    Group-evolve methods appear once per permutation (their ordering label) and
    once as ``"<method> best perm"``, the per-instance maximum over permutations.
    Ties between permutations go to the smallest label. Individual random orderings
    are represented by their ``random_mean`` / ``random_best`` aggregates.
    """
    rows = list(rows)
    by_steps: dict[tuple, list[float]] = defaultdict(list)
    by_size: dict[tuple, list[float]] = defaultdict(list)
    perms: dict[tuple, list[tuple[str, float]]] = defaultdict(list)

    def add(family, method, p, s, n, f):
        by_steps[(family, method, p, s)].append(f)
        by_size[(family, method, p, s, n)].append(f)

    for r in rows:
        if r.method == "random":
            continue
        add(r.family, r.ordering, r.order, r.steps, r.n_qubits, r.fidelity)
        if r.perm:
            perms[(r.family, r.n_qubits, r.instance, r.method, r.order, r.steps)].append(
                (r.perm, r.fidelity))

    wins: dict[tuple, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for (family, n, _inst, method, p, s), vals in sorted(perms.items()):
        best_f = max(f for _, f in vals)
        winner = min(perm for perm, f in vals if f == best_f)
        add(family, f"{method} best perm", p, s, n, best_f)
        wins[(family, method, p, s)][winner] += 1

    out = []
    for (family, method, p, s), vals in sorted(by_steps.items()):
        out.append(dict(table="by_steps", family=family, method=method, order=p, steps=s,
                        n_qubits="", perm="", value=float(np.mean(vals)), count=len(vals)))
    for (family, method, p, s, n), vals in sorted(by_size.items()):
        out.append(dict(table="by_size", family=family, method=method, order=p, steps=s,
                        n_qubits=n, perm="", value=float(np.mean(vals)), count=len(vals)))
    for (family, method, p, s), counts in sorted(wins.items()):
        total = sum(counts.values())
        for perm in sorted(counts):
            out.append(dict(table="perm_wins", family=family, method=method, order=p, steps=s,
                            n_qubits="", perm=perm, value=counts[perm] / total, count=counts[perm]))
    return out


SUMMARY_COLUMNS = ["table", "family", "method", "order", "steps", "n_qubits", "perm", "value", "count"]


def write_summary(summary: list[dict], out) -> None:
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            return write_summary(summary, fh)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for rec in summary:
        writer.writerow([_fmt(rec[c]) for c in SUMMARY_COLUMNS])


def summary_text(summary: list[dict]) -> str:
    buf = io.StringIO()
    write_summary(summary, buf)
    return buf.getvalue()
