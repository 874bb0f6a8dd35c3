"""Statevector time evolution: exact reference, product formulas, fidelity.

States are plain ``complex128`` numpy vectors of length ``2**n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hamiltonians import HamiltonianInstance
from .orderings import Ordering
from .pauli import PauliAction, to_matrix

__all__ = [
    "TrotterConfig",
    "TermTable",
    "KrylovConvergenceError",
    "trotter_evolve",
    "exact_evolve",
    "expm_multiply_krylov",
    "hamiltonian_matvec",
    "dense_hamiltonian",
    "fidelity",
    "basis_state",
    "DEFAULT_KRYLOV_DIM",
    "DEFAULT_EXACT_TOL",
]

DEFAULT_KRYLOV_DIM = 30
DEFAULT_EXACT_TOL = 1e-12
DEFAULT_MAX_QUBITS = 20
DENSE_MAX_QUBITS = 12


class KrylovConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrotterConfig:
    order: int
    steps: int
    total_time: float

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"only 1st and 2nd order formulas are supported, got {self.order}")
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if not math.isfinite(self.total_time):
            raise ValueError("total_time must be finite")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps


class TermTable:
    """Per-term Pauli actions plus cached ``(cos(c dt), sin(c dt))`` tables.

    Build one per Hamiltonian and share it across orderings and configs.
    """

    def __init__(self, h: HamiltonianInstance):
        self.n_qubits = h.n_qubits
        self.coefficients = h.coefficients
        self.actions = [PauliAction(t.pauli) for t in h.terms]
        self._angles: dict[float, tuple[list[float], list[float]]] = {}

    def angles(self, dt: float) -> tuple[list[float], list[float]]:
        if dt not in self._angles:
            a = self.coefficients * dt
            self._angles[dt] = (np.cos(a).tolist(), np.sin(a).tolist())
        return self._angles[dt]


def _check_dim(n_qubits: int, psi: np.ndarray) -> None:
    if psi.ndim != 1 or psi.shape[0] != 1 << n_qubits:
        raise ValueError(f"state of shape {psi.shape} does not match {n_qubits} qubits")


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def trotter_evolve(h: HamiltonianInstance, ordering: Ordering, cfg: TrotterConfig,
                   psi0: np.ndarray, table: TermTable | None = None) -> np.ndarray:
    """Product-formula evolution of ``psi0`` under ``ordering``.

    Order 1 applies the sequence ``steps`` times at ``dt``. Order 2 applies the
    sequence then its reverse, each at ``dt/2``; grouped orderings reverse the
    group order only.
    """
    _check_dim(h.n_qubits, psi0)
    table = table or TermTable(h)
    actions = table.actions
    psi = np.array(psi0, dtype=np.complex128)
    forward = ordering.sequence
    if cfg.order == 1:
        cos, sin = table.angles(cfg.dt)
        passes = [forward]
    else:
        cos, sin = table.angles(cfg.dt / 2)
        passes = [forward, tuple(i for u in ordering.reversed_units() for i in u)]
    for _ in range(cfg.steps):
        for seq in passes:
            for j in seq:
                actions[j].exp_inplace(cos[j], sin[j], psi)
    return psi


def hamiltonian_matvec(h: HamiltonianInstance, table: TermTable | None = None):
    """Matrix-free ``psi -> H psi`` as a sum of Pauli-term actions."""
    table = table or TermTable(h)
    pairs = list(zip(table.coefficients.tolist(), table.actions))

    def matvec(psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi)
        for c, action in pairs:
            out += c * action.apply(psi)
        return out

    return matvec


def dense_hamiltonian(h: HamiltonianInstance) -> np.ndarray:
    """Dense ``H`` from Kronecker products; for cross-checks at small ``n``."""
    dim = 1 << h.n_qubits
    H = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        H += t.coefficient * to_matrix(t.pauli)
    return H


_ROUNDOFF_FLOOR = 8 * np.finfo(float).eps


def _lanczos(matvec, v0: np.ndarray, m: int):
    """Lanczos with full reorthogonalisation; returns ``(V, alpha, beta, happy)``.

    ``beta`` has one more entry than ``alpha`` when no breakdown occurred: the
    trailing element couples the basis to the next (discarded) vector.
    """
    V = np.empty((m, v0.shape[0]), dtype=complex)
    alpha, beta = [], []
    V[0] = v0
    scale = 0.0
    for j in range(m):
        u = matvec(V[j])
        a = float(np.vdot(V[j], u).real)
        alpha.append(a)
        u -= a * V[j]
        if j > 0:
            u -= beta[j - 1] * V[j - 1]
        u -= V[: j + 1].T @ (V[: j + 1].conj() @ u)
        b = float(np.linalg.norm(u))
        scale = max(scale, abs(a), b)
        if b <= 1e-14 * max(scale, 1.0):
            return V[: j + 1], np.array(alpha), np.array(beta), True
        beta.append(b)
        if j + 1 < m:
            V[j + 1] = u / b
    return V, np.array(alpha), np.array(beta), False


def _tridiag_exp(alpha, beta, tau: float) -> np.ndarray:
    """``exp(-i tau T) e_1`` for the real symmetric tridiagonal ``T``."""
    if len(alpha) == 1:
        return np.array([np.exp(-1j * tau * alpha[0])])
    w, S = scipy.linalg.eigh_tridiagonal(alpha, beta[: len(alpha) - 1])
    return S @ (np.exp(-1j * tau * w) * S[0])


def expm_multiply_krylov(matvec, psi: np.ndarray, t: float, krylov_dim: int = DEFAULT_KRYLOV_DIM,
                         tol: float = DEFAULT_EXACT_TOL, max_steps: int = 10_000) -> np.ndarray:
    """``exp(-i t H) psi`` for Hermitian ``H`` given only ``matvec``.

    Each step builds a Lanczos basis at the current vector and takes the longest
    sub-interval (halving from the time left) whose error estimate stays under
    ``tol * tau / t``. The estimate is the larger of the classical residual bound
    ``tau * beta * b_m * |y_m|`` and the change from dropping the last basis vector.
    """
    w = np.array(psi, dtype=complex)
    if t == 0:
        return w
    if t < 0:
        return expm_multiply_krylov(lambda v: -matvec(v), w, -t, krylov_dim, tol, max_steps)
    done, steps = 0.0, 0
    while done < t:
        steps += 1
        if steps > max_steps:
            raise KrylovConvergenceError(f"no convergence after {max_steps} Krylov steps")
        beta0 = float(np.linalg.norm(w))
        if beta0 == 0:
            return w
        V, alpha, beta, happy = _lanczos(matvec, w / beta0, krylov_dim)
        tau = t - done
        # eigensolver backward error is eps * ||T||; no estimate can resolve below it
        scale = max(1.0, float(np.abs(alpha).max()), float(np.abs(beta).max(initial=0)))
        floor = _ROUNDOFF_FLOOR * scale
        for _ in range(80):
            y = _tridiag_exp(alpha, beta, tau)
            if happy:
                break
            if len(alpha) > 1:
                y_short = _tridiag_exp(alpha[:-1], beta[:-1], tau)
                drop = float(np.linalg.norm(y[:-1] - y_short) + abs(y[-1]))
            else:
                drop = abs(y[-1])
            err = beta0 * max(tau * beta[-1] * abs(y[-1]), drop)
            if err <= max(tol * tau / t, floor):
                break
            tau *= 0.5
        else:
            raise KrylovConvergenceError("Krylov step size underflow")
        w = beta0 * (y @ V)
        done += tau
        if t - done <= 1e-15 * t:
            break
    return w


def exact_evolve(h: HamiltonianInstance, T: float, psi0: np.ndarray, method: str = "krylov",
                 krylov_dim: int = DEFAULT_KRYLOV_DIM, tol: float = DEFAULT_EXACT_TOL,
                 max_qubits: int = DEFAULT_MAX_QUBITS,
                 table: TermTable | None = None) -> np.ndarray:
    """``exp(-i H T) psi0`` by matrix-free Krylov (default) or dense ``expm`` (``n <= 12``)."""
    _check_dim(h.n_qubits, psi0)
    if h.n_qubits > max_qubits:
        raise ValueError(f"{h.n_qubits} qubits exceed the exact-evolution cap of {max_qubits}")
    if method == "dense":
        if h.n_qubits > DENSE_MAX_QUBITS:
            raise ValueError(f"dense evolution is limited to {DENSE_MAX_QUBITS} qubits")
        return scipy.linalg.expm(-1j * T * dense_hamiltonian(h)) @ np.asarray(psi0, dtype=complex)
    if method != "krylov":
        raise ValueError(f"unknown method {method!r}")
    return expm_multiply_krylov(hamiltonian_matvec(h, table), psi0, T, krylov_dim, tol)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2`` clamped to ``[0, 1]``."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    f = abs(np.vdot(a, b)) ** 2
    return float(min(max(f, 0.0), 1.0))
