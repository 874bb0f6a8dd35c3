"""Heisenberg-family Hamiltonian generators, lattice geometry and a line-oriented text format.

Term position in ``HamiltonianInstance.terms`` is the canonical file index used
for every tie-break downstream, so generators emit terms in a fixed order:

* ``xxz_1d``: bonds ``(j, j+1)`` ascending with ``X, Y, Z`` sub-order, then fields.
* ``rect_2d``: edges sorted by ``(min qubit, max qubit)``, ``X, Y, Z`` per edge, then fields.
* ``tri_2d``: nearest-neighbour edges sorted, then next-nearest edges sorted.

Zero-coefficient terms are never emitted.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import (PauliString, PauliType, WeightedTerm, format_dense, parse_dense,
                    pauli_type)

__all__ = [
    "FAMILIES",
    "LatticeSpec",
    "HamiltonianInstance",
    "HamiltonianFormatError",
    "build_xxz_chain",
    "build_rect",
    "build_tri",
    "snake_index",
    "lattice_sites",
    "lattice_edges",
    "neel_state",
    "serialize",
    "deserialize",
]

FAMILIES = ("xxz_1d", "rect_2d", "tri_2d")
NEIGHBOUR_TOL = 1e-9
_HEADER = "# trotter_lab hamiltonian v1"


class HamiltonianFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class LatticeSpec:
    width: int
    length: int
    geometry: str  # "rectangular" | "triangular"
    boundary: str = "open"

    def __post_init__(self):
        if self.width < 1 or self.length < 1:
            raise ValueError("lattice dimensions must be positive")
        if self.geometry not in ("rectangular", "triangular"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.boundary != "open":
            raise ValueError("only open boundaries are supported")

    @property
    def n_sites(self) -> int:
        return self.width * self.length


@dataclass(frozen=True)
class HamiltonianInstance:
    """``H = sum_j c_j P_j`` plus the metadata needed to regenerate it."""

    n_qubits: int
    terms: tuple[WeightedTerm, ...]
    family: str
    params: dict[str, float] = field(default_factory=dict)
    lattice: LatticeSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a Hamiltonian needs at least one term")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        seen = set()
        for i, t in enumerate(self.terms):
            if t.pauli.n_qubits != self.n_qubits:
                raise ValueError(f"term {i} acts on {t.pauli.n_qubits} qubits, expected {self.n_qubits}")
            key = (t.pauli.x, t.pauli.z)
            if key in seen:
                raise ValueError(f"duplicate Pauli string at term {i}: {format_dense(t.pauli)}")
            seen.add(key)
        if self.lattice is not None and self.lattice.n_sites != self.n_qubits:
            raise ValueError("lattice size does not match qubit count")

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms])

    @property
    def paulis(self) -> list[PauliString]:
        return [t.pauli for t in self.terms]

    def is_non_mixed(self) -> bool:
        return all(pauli_type(t.pauli) is not PauliType.MIXED for t in self.terms)

    def content_hash(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()

    def describe(self) -> str:
        ps = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family}[n={self.n_qubits}{',' if ps else ''}{ps}]"


def _pair_term(n: int, coeff: float, op: str, i: int, j: int) -> WeightedTerm:
    chars = ["I"] * n
    chars[i] = chars[j] = op
    return WeightedTerm(float(coeff), parse_dense("".join(chars)))


def _site_term(n: int, coeff: float, op: str, i: int) -> WeightedTerm:
    chars = ["I"] * n
    chars[i] = op
    return WeightedTerm(float(coeff), parse_dense("".join(chars)))


def build_xxz_chain(L: int, delta: float, g: float) -> HamiltonianInstance:
    """Open XXZ chain ``sum (XX + YY + delta ZZ) + g sum X`` on ``L`` sites."""
    if L < 2:
        raise ValueError(f"chain length must be at least 2, got {L}")
    terms = []
    for j in range(L - 1):
        for op, c in (("X", 1.0), ("Y", 1.0), ("Z", delta)):
            if c != 0:
                terms.append(_pair_term(L, c, op, j, j + 1))
    if g != 0:
        terms.extend(_site_term(L, g, "X", j) for j in range(L))
    return HamiltonianInstance(L, tuple(terms), "xxz_1d", {"delta": float(delta), "g": float(g)})


def snake_index(w: int, l: int, W: int) -> int:
    """Serpentine row-major index: even rows run left to right, odd rows right to left."""
    if not 0 <= w < W:
        raise ValueError(f"column {w} out of range for width {W}")
    if l < 0:
        raise ValueError(f"row {l} must be non-negative")
    return l * W + (w if l % 2 == 0 else W - 1 - w)


def lattice_sites(spec: LatticeSpec) -> dict[int, tuple[float, float]]:
    """Map qubit index -> Euclidean position."""
    pos = {}
    for l in range(spec.length):
        for w in range(spec.width):
            if spec.geometry == "rectangular":
                xy = (float(w), float(l))
            else:
                xy = (w + 0.5 * l, l * math.sqrt(3) / 2)
            pos[snake_index(w, l, spec.width)] = xy
    return pos


def lattice_edges(spec: LatticeSpec, distance: float) -> list[tuple[int, int]]:
    """All qubit pairs ``(i, j)``, ``i < j``, whose sites lie ``distance`` apart."""
    pos = lattice_sites(spec)
    edges = []
    for i, j in itertools.combinations(sorted(pos), 2):
        if abs(math.dist(pos[i], pos[j]) - distance) <= NEIGHBOUR_TOL:
            edges.append((i, j))
    return sorted(edges)


def _heisenberg_edges(n: int, edges, coeff: float) -> list[WeightedTerm]:
    if coeff == 0:
        return []
    return [_pair_term(n, coeff, op, i, j) for i, j in edges for op in "XYZ"]


def build_rect(Lx: int, Ly: int, hx: float) -> HamiltonianInstance:
    """Heisenberg model on an open ``Lx x Ly`` grid with transverse field ``hx``."""
    if Lx < 2 or Ly < 2:
        raise ValueError(f"degenerate grid {Lx}x{Ly}")
    spec = LatticeSpec(Lx, Ly, "rectangular")
    n = spec.n_sites
    terms = _heisenberg_edges(n, lattice_edges(spec, 1.0), 1.0)
    if hx != 0:
        terms.extend(_site_term(n, hx, "X", i) for i in range(n))
    return HamiltonianInstance(n, tuple(terms), "rect_2d", {"hx": float(hx)}, spec)


def build_tri(W: int, L: int, alpha: float) -> HamiltonianInstance:
    """J1-J2 Heisenberg model on an open ``W x L`` triangular patch, ``alpha = J2/J1``."""
    if W < 2 or L < 2:
        raise ValueError(f"degenerate lattice {W}x{L}")
    spec = LatticeSpec(W, L, "triangular")
    n = spec.n_sites
    terms = _heisenberg_edges(n, lattice_edges(spec, 1.0), 1.0)
    terms += _heisenberg_edges(n, lattice_edges(spec, math.sqrt(3)), alpha)
    return HamiltonianInstance(n, tuple(terms), "tri_2d", {"alpha": float(alpha)}, spec)


def neel_state(n: int) -> np.ndarray:
    """``|0101...>``: qubit ``i`` is ``|1>`` exactly when ``i`` is odd."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    index = sum(1 << i for i in range(1, n, 2))
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def _fmt(x: float) -> str:
    return format(x, ".17g")


def serialize(h: HamiltonianInstance) -> str:
    lines = [
        _HEADER,
        f"# family: {h.family}",
        f"# n_qubits: {h.n_qubits}",
        "# params: " + " ".join(f"{k}={_fmt(v)}" for k, v in h.params.items()),
    ]
    if h.lattice is not None:
        lat = h.lattice
        lines.append(f"# lattice: {lat.geometry} {lat.width} {lat.length} {lat.boundary}")
    lines.extend(f"{_fmt(t.coefficient)}\t{format_dense(t.pauli)}" for t in h.terms)
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> HamiltonianInstance:
    header: dict[str, str] = {}
    terms: list[WeightedTerm] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                header[key.strip()] = value.strip()
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise HamiltonianFormatError(f"expected 'coefficient<TAB>pauli', got {raw!r}", lineno)
        try:
            coeff = float(parts[0])
            pauli = parse_dense(parts[1].strip())
            terms.append(WeightedTerm(coeff, pauli))
        except ValueError as exc:
            raise HamiltonianFormatError(str(exc), lineno) from exc
        if "n_qubits" in header and pauli.n_qubits != int(header["n_qubits"]):
            raise HamiltonianFormatError(
                f"term has {pauli.n_qubits} qubits but header declares {header['n_qubits']}", lineno)

    for key in ("family", "n_qubits"):
        if key not in header:
            raise HamiltonianFormatError(f"missing header field {key!r}")
    if not terms:
        raise HamiltonianFormatError("no terms")
    params = {}
    for item in header.get("params", "").split():
        k, _, v = item.partition("=")
        params[k] = float(v)
    lattice = None
    if "lattice" in header:
        geometry, width, length, boundary = header["lattice"].split()
        lattice = LatticeSpec(int(width), int(length), geometry, boundary)
    try:
        return HamiltonianInstance(int(header["n_qubits"]), tuple(terms), header["family"],
                                   params, lattice)
    except ValueError as exc:
        raise HamiltonianFormatError(str(exc)) from exc
