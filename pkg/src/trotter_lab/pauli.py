"""Phaseless Pauli strings in symplectic bit form and their action on statevectors.

Bit conventions
---------------
Qubit ``i`` is bit ``i`` of both the ``x`` and ``z`` masks, and bit ``i`` of the
computational-basis index (qubit 0 is the least significant bit). A site holds
``I, X, Z, Y`` for ``(x, z) = (0, 0), (1, 0), (0, 1), (1, 1)``, with ``Y = iXZ``.

Masks are Python integers, so a commutation check is an AND/XOR over machine
words followed by a popcount; cost grows with the number of words, not qubits.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "PauliString",
    "PauliType",
    "PauliParseError",
    "WeightedTerm",
    "commutes",
    "pauli_type",
    "parse_dense",
    "format_dense",
    "from_sparse",
    "to_matrix",
    "PauliAction",
    "apply_pauli",
    "apply_exp_term",
]

_CHARS = "IXZY"  # indexed by x + 2*z
_CODES = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
_MATS = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}


class PauliParseError(ValueError):
    """Raised when a dense Pauli label contains an invalid character."""

    def __init__(self, label: str, position: int):
        self.label = label
        self.position = position
        super().__init__(
            f"invalid Pauli character {label[position]!r} at position {position} in {label!r}"
        )


class PauliType(enum.Enum):
    IDENTITY = "I"
    PURE_X = "X"
    PURE_Y = "Y"
    PURE_Z = "Z"
    MIXED = "mixed"


@dataclass(frozen=True)
class PauliString:
    """Immutable n-qubit Pauli operator without phase.

    Parameters
    ----------
    n_qubits : int
        Number of qubits, at least 1.
    x, z : int
        Bit masks; bit ``i`` set means an X (resp. Z) component on qubit ``i``.
    """

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.x < 0 or self.z < 0:
            raise ValueError("bit masks must be non-negative")
        if (self.x | self.z) >> self.n_qubits:
            raise ValueError(f"bit masks exceed {self.n_qubits} qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> i) & 1 for i in range(self.n_qubits)], dtype=bool)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> i) & 1 for i in range(self.n_qubits)], dtype=bool)

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(i for i in range(self.n_qubits) if (mask >> i) & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return format_dense(self)


@dataclass(frozen=True)
class WeightedTerm:
    coefficient: float
    pauli: PauliString

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError(f"coefficient must be finite, got {self.coefficient}")


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic product ``p.x.q.z + p.z.q.x`` is even."""
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1 == 0


def pauli_type(p: PauliString) -> PauliType:
    x_only = p.x & ~p.z
    z_only = p.z & ~p.x
    y = p.x & p.z
    present = [t for t, m in ((PauliType.PURE_X, x_only), (PauliType.PURE_Y, y),
                              (PauliType.PURE_Z, z_only)) if m]
    if not present:
        return PauliType.IDENTITY
    if len(present) > 1:
        return PauliType.MIXED
    return present[0]


def parse_dense(label: str) -> PauliString:
    """Parse an ``n``-character label such as ``"ZXIYI"``; character ``i`` acts on qubit ``i``."""
    if not label:
        raise ValueError("empty Pauli label")
    x = z = 0
    for i, ch in enumerate(label):
        try:
            xb, zb = _CODES[ch]
        except KeyError:
            raise PauliParseError(label, i) from None
        x |= xb << i
        z |= zb << i
    return PauliString(len(label), x, z)


def format_dense(p: PauliString) -> str:
    return "".join(_CHARS[((p.x >> i) & 1) + 2 * ((p.z >> i) & 1)] for i in range(p.n_qubits))


def from_sparse(n_qubits: int, ops: dict[int, str]) -> PauliString:
    """Build a string from ``{qubit: "X"|"Y"|"Z"}``, e.g. ``{0: "X", 1: "X"}``."""
    x = z = 0
    for q, ch in ops.items():
        if not 0 <= q < n_qubits:
            raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
        xb, zb = _CODES[ch.upper()]
        x |= xb << q
        z |= zb << q
    return PauliString(n_qubits, x, z)


def to_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix, built from Kronecker products (qubit 0 rightmost)."""
    label = format_dense(p)
    return reduce(np.kron, [_MATS[ch] for ch in reversed(label)])


class PauliAction:
    """Precomputed action of a Pauli string on a ``(2,)*n`` tensor view of a state.

    ``P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>``: a sign pattern over the Z
    axes, a flip over the X axes, then a global factor. Qubit ``q`` is tensor
    axis ``n - 1 - q``.
    """

    __slots__ = ("n_qubits", "shape", "flip_axes", "sign", "phase")

    def __init__(self, p: PauliString):
        n = p.n_qubits
        self.n_qubits = n
        self.shape = (2,) * n
        self.flip_axes = tuple(n - 1 - q for q in range(n) if (p.x >> q) & 1)
        self.phase = 1j ** ((p.x & p.z).bit_count() % 4)
        if p.z:
            sign_shape = [1] * n
            for q in range(n):
                if (p.z >> q) & 1:
                    sign_shape[n - 1 - q] = 2
            sign = np.ones(sign_shape)
            for q in range(n):
                if (p.z >> q) & 1:
                    axis_shape = [1] * n
                    axis_shape[n - 1 - q] = 2
                    sign = sign * np.array([1.0, -1.0]).reshape(axis_shape)
            self.sign = sign
        else:
            self.sign = None

    def apply_unphased(self, state: np.ndarray) -> np.ndarray:
        """Return ``P|psi> / i^{#Y}`` as a new flat array."""
        t = state.reshape(self.shape)
        if self.sign is not None:
            t = t * self.sign
        if self.flip_axes:
            t = np.flip(t, self.flip_axes)
        return np.ascontiguousarray(t).reshape(-1)

    def apply(self, state: np.ndarray) -> np.ndarray:
        out = self.apply_unphased(state)
        if self.phase != 1:
            out *= self.phase
        return out

    def exp_inplace(self, cos_a: float, sin_a: float, state: np.ndarray) -> None:
        """``state <- cos(a) state - i sin(a) P state`` in place."""
        if not self.flip_axes and self.sign is None:
            state *= complex(cos_a, -sin_a)
            return
        rotated = self.apply_unphased(state)
        rotated *= -1j * sin_a * self.phase
        state *= cos_a
        state += rotated


def _check_state(p: PauliString, state: np.ndarray) -> None:
    if state.ndim != 1 or state.shape[0] != 1 << p.n_qubits:
        raise ValueError(
            f"state of shape {state.shape} does not match {p.n_qubits} qubits"
        )


def apply_pauli(p: PauliString, state: np.ndarray) -> np.ndarray:
    """Return ``P|psi>`` (new array)."""
    _check_state(p, state)
    return PauliAction(p).apply(np.asarray(state, dtype=complex))


def apply_exp_term(coefficient: float, p: PauliString, dt: float, state: np.ndarray,
                   *, inplace: bool = False) -> np.ndarray:
    """Apply ``exp(-i c P dt) = cos(c dt) I - i sin(c dt) P`` to ``state``.

    With ``inplace=True`` the input array (complex128) is overwritten and returned.
    """
    if not (math.isfinite(coefficient) and math.isfinite(dt)):
        raise ValueError("coefficient and dt must be finite")
    _check_state(p, state)
    if inplace:
        if state.dtype != np.complex128:
            raise TypeError("in-place application needs a complex128 state")
        out = state
    else:
        out = np.array(state, dtype=complex)
    angle = coefficient * dt
    PauliAction(p).exp_inplace(math.cos(angle), math.sin(angle), out)
    return out
