"""Independent dense-matrix oracles shared by the test modules.

Nothing here goes through the bit-mask machinery of ``trotter_lab.pauli``: the
oracles start from the character label and multiply explicit 2x2 matrices.
"""
import numpy as np
import pytest
import scipy.linalg

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_from_label(label: str) -> np.ndarray:
    """Matrix of a dense label; qubit 0 (first character) is the least significant bit."""
    n = len(label)
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        # act site by site on the basis state |col>
        amp, row = 1.0 + 0j, 0
        for q, ch in enumerate(label):
            bit = (col >> q) & 1
            m = SINGLE[ch][:, bit]
            new_bit = int(np.flatnonzero(m)[0])
            amp *= m[new_bit]
            row |= new_bit << q
        out[row, col] = amp
    return out


def dense_hamiltonian_oracle(h) -> np.ndarray:
    from trotter_lab.pauli import format_dense

    return sum(t.coefficient * dense_from_label(format_dense(t.pauli)) for t in h.terms)


def dense_evolve(H: np.ndarray, t: float, psi: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(-1j * t * H) @ psi


def random_label(rng, n: int) -> str:
    return "".join(rng.choice(list("IXYZ"), size=n))


def random_state(rng, n: int) -> np.ndarray:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
