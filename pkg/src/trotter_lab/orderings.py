"""Trotter ordering strategies.

An :class:`Ordering` is either *flat* (a permutation of term indices) or
*grouped* (a sequence of commuting groups evolved as units). Every strategy
breaks ties by the term's position in the Hamiltonian (its file index).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .commutation import CommutationGraph, Grouping
from .hamiltonians import HamiltonianInstance
from .pauli import format_dense

__all__ = [
    "Ordering",
    "DEFAULT_PERMUTATION_CAP",
    "group_evolve_orderings",
    "magnitude_ordering",
    "lexicographic_ordering",
    "deplete_groups",
    "equalise_groups",
    "random_orderings",
    "validate_ordering",
]

DEFAULT_PERMUTATION_CAP = 5
_LEX_RANK = str.maketrans("IXYZ", "0123")


@dataclass(frozen=True)
class Ordering:
    kind: str  # "flat" | "grouped"
    units: tuple[tuple[int, ...], ...]
    label: str
    method: str
    permutation: str | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "grouped"):
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        object.__setattr__(self, "units", tuple(tuple(u) for u in self.units))
        if self.kind == "flat" and any(len(u) != 1 for u in self.units):
            raise ValueError("flat orderings hold one term per unit")

    @classmethod
    def flat(cls, sequence, label: str, method: str | None = None) -> "Ordering":
        return cls("flat", tuple((int(i),) for i in sequence), label, method or label)

    @property
    def sequence(self) -> tuple[int, ...]:
        """Term indices in application order (groups concatenated)."""
        return tuple(i for u in self.units for i in u)

    @property
    def group_sequence(self) -> tuple[tuple[int, ...], ...]:
        return self.units

    def flattened(self) -> "Ordering":
        return Ordering.flat(self.sequence, self.label + " (flat)", self.method)

    def reversed_units(self) -> tuple[tuple[int, ...], ...]:
        """Units in reverse order; order inside a unit is kept."""
        return self.units[::-1]


def validate_ordering(ordering: Ordering, n_terms: int,
                      graph: CommutationGraph | None = None) -> bool:
    if sorted(ordering.sequence) != list(range(n_terms)):
        return False
    if ordering.kind == "grouped" and graph is not None:
        for unit in ordering.units:
            idx = np.array(unit)
            if graph.adjacency[np.ix_(idx, idx)].any():
                return False
    return True


def group_evolve_orderings(grp: Grouping, cap: int = DEFAULT_PERMUTATION_CAP) -> list[Ordering]:
    """All ``m!`` orders of the groups; label digits name the group order, e.g. ``"120"``."""
    m = grp.n_groups
    if m > cap:
        raise ValueError(f"{m} groups exceed the permutation cap of {cap} ({math.factorial(m)} orderings)")
    method = f"{grp.method}_groups"
    out = []
    for perm in itertools.permutations(range(m)):
        digits = "".join(map(str, perm))
        out.append(Ordering("grouped", tuple(grp.groups[i] for i in perm),
                            f"{method} perm {digits}", method, digits))
    return out


def _by_magnitude(indices, coeffs) -> list[int]:
    return sorted(indices, key=lambda i: (-abs(coeffs[i]), i))


def magnitude_ordering(h: HamiltonianInstance) -> Ordering:
    coeffs = [t.coefficient for t in h.terms]
    return Ordering.flat(_by_magnitude(range(len(coeffs)), coeffs), "magnitude")


def lexicographic_ordering(h: HamiltonianInstance) -> Ordering:
    """Sort dense labels with ``I < X < Y < Z``."""
    keys = [format_dense(t.pauli).translate(_LEX_RANK) for t in h.terms]
    return Ordering.flat(sorted(range(len(keys)), key=lambda i: (keys[i], i)), "lex_dense")


def deplete_groups(grp: Grouping, h: HamiltonianInstance) -> Ordering:
    """Empty one group at a time.

    The next group is the one holding the largest remaining ``|c|`` (lower group
    index on ties); all of its terms are emitted by descending ``|c|``.
    """
    coeffs = [t.coefficient for t in h.terms]
    remaining = [_by_magnitude(g, coeffs) for g in grp.groups]
    seq: list[int] = []
    while any(remaining):
        live = [gi for gi, g in enumerate(remaining) if g]
        gi = max(live, key=lambda gi: (abs(coeffs[remaining[gi][0]]), -gi))
        seq.extend(remaining[gi])
        remaining[gi] = []
    return Ordering.flat(seq, "depleteGroups")


def equalise_groups(grp: Grouping, h: HamiltonianInstance) -> Ordering:
    """Round-robin over groups, popping each group's largest remaining ``|c|``."""
    coeffs = [t.coefficient for t in h.terms]
    queues = [_by_magnitude(g, coeffs) for g in grp.groups]
    seq: list[int] = []
    for depth in range(max(map(len, queues), default=0)):
        for q in queues:
            if depth < len(q):
                seq.append(q[depth])
    return Ordering.flat(seq, "equaliseGroups")


def random_orderings(h: HamiltonianInstance, count: int, seed: int) -> list[Ordering]:
    """``count`` uniform permutations from ``numpy.random.default_rng(seed)``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    k = len(h.terms)
    return [Ordering.flat(rng.permutation(k).tolist(), f"random#{i}", "random")
            for i in range(count)]
