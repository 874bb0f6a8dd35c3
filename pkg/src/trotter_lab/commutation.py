"""Commutation graphs of Pauli Hamiltonians and their proper colorings.

Vertices are term indices; an edge joins two terms that do *not* commute, so
every color class of a proper coloring is a group of mutually commuting terms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import HamiltonianInstance
from .pauli import PauliString, PauliType, format_dense, pauli_type

__all__ = [
    "CommutationGraph",
    "Grouping",
    "UnsupportedHamiltonianError",
    "GraphTooLargeError",
    "build_graph",
    "pack_words",
    "xyz_coloring",
    "handcrafted_coloring",
    "greedy_coloring",
    "exact_coloring",
    "max_clique",
    "validate_grouping",
    "coloring_for",
    "to_dot",
    "COLORING_METHODS",
]

COLORING_METHODS = ("xyz", "handcrafted", "greedy", "exact")
DEFAULT_EXACT_CAP = 100


class UnsupportedHamiltonianError(ValueError):
    """A coloring backend was asked to color a Hamiltonian outside its domain."""


class GraphTooLargeError(ValueError):
    """The exact solver refuses graphs above its vertex cap."""


@dataclass(frozen=True, eq=False)
class CommutationGraph:
    n_vertices: int
    adjacency: np.ndarray  # (k, k) bool, symmetric, zero diagonal
    labels: tuple[str, ...] | None = None

    @property
    def edges(self) -> set[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return set(zip(i.tolist(), j.tolist()))

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def neighbors(self, v: int) -> list[int]:
        return np.flatnonzero(self.adjacency[v]).tolist()

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @classmethod
    def from_edges(cls, n: int, edges) -> "CommutationGraph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            adj[i, j] = adj[j, i] = True
        return cls(n, adj)


@dataclass(frozen=True)
class Grouping:
    """Ordered partition of term indices into commuting groups."""

    groups: tuple[tuple[int, ...], ...]
    method: str

    def __post_init__(self):
        object.__setattr__(self, "groups",
                           tuple(tuple(sorted(g)) for g in self.groups if len(g)))

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def colors(self, n_vertices: int) -> np.ndarray:
        col = np.full(n_vertices, -1, dtype=int)
        for c, grp in enumerate(self.groups):
            col[list(grp)] = c
        return col


def pack_words(paulis: list[PauliString]) -> tuple[np.ndarray, np.ndarray]:
    """Pack x/z masks into ``(k, n_words)`` uint64 arrays."""
    n = paulis[0].n_qubits if paulis else 1
    n_words = (n + 63) // 64
    mask = (1 << 64) - 1
    xs = np.zeros((len(paulis), n_words), dtype=np.uint64)
    zs = np.zeros_like(xs)
    for i, p in enumerate(paulis):
        for w in range(n_words):
            xs[i, w] = (p.x >> (64 * w)) & mask
            zs[i, w] = (p.z >> (64 * w)) & mask
    return xs, zs


def build_graph(h: HamiltonianInstance) -> CommutationGraph:
    paulis = h.paulis
    xs, zs = pack_words(paulis)
    sym = (xs[:, None, :] & zs[None, :, :]) ^ (zs[:, None, :] & xs[None, :, :])
    parity = np.bitwise_count(sym).sum(axis=2) & 1
    adj = parity.astype(bool)
    np.fill_diagonal(adj, False)
    return CommutationGraph(len(paulis), adj, tuple(format_dense(p) for p in paulis))


def _ordered_classes(colors, method: str) -> Grouping:
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        classes.setdefault(int(c), []).append(v)
    groups = sorted(classes.values(), key=min)
    return Grouping(tuple(tuple(g) for g in groups), method)


def xyz_coloring(h: HamiltonianInstance) -> Grouping:
    """One group per Pauli type, ordered X, Y, Z; empty groups dropped."""
    buckets: dict[PauliType, list[int]] = {PauliType.PURE_X: [], PauliType.PURE_Y: [],
                                           PauliType.PURE_Z: []}
    for i, t in enumerate(h.terms):
        kind = pauli_type(t.pauli)
        if kind is PauliType.MIXED:
            raise UnsupportedHamiltonianError(
                f"term {i} ({format_dense(t.pauli)}) is mixed; XYZ coloring needs a non-mixed Hamiltonian")
        # the identity commutes with everything
        buckets[PauliType.PURE_X if kind is PauliType.IDENTITY else kind].append(i)
    return Grouping(tuple(tuple(b) for b in buckets.values()), "xyz")


def handcrafted_coloring(h: HamiltonianInstance) -> Grouping:
    """Bond-parity coloring for 1D chains: even bonds, odd bonds, then single-site terms."""
    if h.family != "xxz_1d":
        raise UnsupportedHamiltonianError(f"handcrafted coloring needs a 1D chain, got {h.family}")
    even, odd, fields = [], [], []
    for i, t in enumerate(h.terms):
        support = t.pauli.support
        if len(support) == 1:
            fields.append(i)
        elif len(support) == 2 and support[1] == support[0] + 1:
            (even if support[0] % 2 == 0 else odd).append(i)
        else:
            raise UnsupportedHamiltonianError(
                f"term {i} ({format_dense(t.pauli)}) is not a nearest-neighbour bond or a field")
    return Grouping((tuple(even), tuple(odd), tuple(fields)), "handcrafted")


def greedy_coloring(g: CommutationGraph) -> Grouping:
    """First-fit coloring in ascending vertex order."""
    colors = np.full(g.n_vertices, -1, dtype=int)
    for v in range(g.n_vertices):
        taken = set(colors[g.adjacency[v]].tolist())
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return _ordered_classes(colors, "greedy")


def max_clique(g: CommutationGraph) -> list[int]:
    """Maximum clique by Bron-Kerbosch with pivoting (smallest-index tie-break)."""
    nbrs = [set(g.neighbors(v)) for v in range(g.n_vertices)]
    best: list[int] = []

    def expand(r: list[int], p: set[int], x: set[int]):
        nonlocal best
        if not p and not x:
            if len(r) > len(best):
                best = sorted(r)
            return
        if len(r) + len(p) <= len(best):
            return
        pivot = max(p | x, key=lambda u: (len(nbrs[u] & p), -u))
        for v in sorted(p - nbrs[pivot]):
            expand(r + [v], p & nbrs[v], x & nbrs[v])
            p = p - {v}
            x = x | {v}

    expand([], set(range(g.n_vertices)), set())
    return best


def exact_coloring(g: CommutationGraph, cap: int = DEFAULT_EXACT_CAP,
                   node_limit: int | None = None) -> Grouping:
    """Minimum coloring by DSATUR branch-and-bound.

    The search starts from the greedy coloring as an upper bound and pins a
    maximum clique to colors ``0..w-1``; it stops as soon as the clique bound is met.
    """
    n = g.n_vertices
    if n > cap:
        raise GraphTooLargeError(f"graph has {n} vertices, exact coloring cap is {cap}")
    if n == 0:
        return Grouping((), "exact")
    nbrs = [g.neighbors(v) for v in range(n)]
    degree = [len(a) for a in nbrs]

    best = greedy_coloring(g).colors(n)
    best_k = int(best.max()) + 1
    clique = max_clique(g)
    lower = max(len(clique), 1)
    if best_k > lower:
        colors = [-1] * n
        for c, v in enumerate(clique):
            colors[v] = c
        nodes = 0

        def pick() -> int:
            choice, key = -1, None
            for v in range(n):
                if colors[v] >= 0:
                    continue
                sat = len({colors[u] for u in nbrs[v] if colors[u] >= 0})
                k = (sat, degree[v], -v)
                if key is None or k > key:
                    choice, key = v, k
            return choice

        def search(n_colored: int, used: int) -> bool:
            nonlocal best, best_k, nodes
            nodes += 1
            if node_limit is not None and nodes > node_limit:
                raise RuntimeError(f"exact coloring exceeded {node_limit} search nodes")
            if n_colored == n:
                best, best_k = np.array(colors), used
                return best_k <= lower
            v = pick()
            forbidden = {colors[u] for u in nbrs[v]}
            for c in range(used):
                if c not in forbidden:
                    colors[v] = c
                    if search(n_colored + 1, used):
                        return True
            if used + 1 < best_k:
                colors[v] = used
                if search(n_colored + 1, used + 1):
                    return True
            colors[v] = -1
            return False

        search(len(clique), len(clique))
    return _ordered_classes(best, "exact")


def validate_grouping(g: CommutationGraph, grp: Grouping) -> bool:
    """True iff ``grp`` partitions the vertices and no group contains an edge."""
    members = [v for group in grp.groups for v in group]
    if sorted(members) != list(range(g.n_vertices)):
        return False
    for group in grp.groups:
        idx = np.array(group)
        if g.adjacency[np.ix_(idx, idx)].any():
            return False
    return True


def coloring_for(method: str, h: HamiltonianInstance, graph: CommutationGraph | None = None,
                 exact_cap: int = DEFAULT_EXACT_CAP) -> Grouping:
    if method == "xyz":
        return xyz_coloring(h)
    if method == "handcrafted":
        return handcrafted_coloring(h)
    graph = graph if graph is not None else build_graph(h)
    if method == "greedy":
        return greedy_coloring(graph)
    if method == "exact":
        return exact_coloring(graph, cap=exact_cap)
    raise ValueError(f"unknown coloring method {method!r}; choose from {COLORING_METHODS}")


def to_dot(g: CommutationGraph, grouping: Grouping | None = None) -> str:
    """Graphviz DOT text; vertex labels are dense Pauli strings."""
    lines = ["graph commutation {"]
    colors = grouping.colors(g.n_vertices) if grouping is not None else None
    for v in range(g.n_vertices):
        label = g.labels[v] if g.labels else str(v)
        attrs = f'label="{label}"'
        if colors is not None:
            attrs += f", group={int(colors[v])}"
        lines.append(f"  {v} [{attrs}];")
    for i, j in sorted(g.edges):
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"

