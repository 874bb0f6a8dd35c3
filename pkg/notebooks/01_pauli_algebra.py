# %% [markdown]
# # Pauli strings as bit masks
#
# A Pauli string on n qubits is a pair of integers (x, z). Qubit 0 is the
# rightmost character of the dense label and the lowest bit of each mask.

# %%
import numpy as np

from trotter_lab import PauliString, apply_exp_term, apply_pauli, commutes, format_dense, parse_dense
from trotter_lab.pauli import pauli_type, to_matrix

p = parse_dense("XYZI")
print(p, "x=", bin(p.x), "z=", bin(p.z))
print("support", p.support, "weight", p.weight, "type", pauli_type(p).name)

# %%
# Commutation is the parity of the symplectic product.
for a, b in [("XX", "ZZ"), ("XI", "ZI"), ("XXI", "IZZ")]:
    print(a, b, "commute" if commutes(parse_dense(a), parse_dense(b)) else "anticommute")

# %%
# Cross-check against dense matrices.
A, B = to_matrix(parse_dense("XXI")), to_matrix(parse_dense("IZZ"))
print("dense commutator norm", np.linalg.norm(A @ B - B @ A))

# %%
# Applying a string to a statevector never builds a matrix.
psi = np.zeros(8, complex)
psi[0] = 1
print(apply_pauli(parse_dense("IYX"), psi).round(3))

# %%
# exp(-i c dt P) = cos(c dt) I - i sin(c dt) P
out = apply_exp_term(1.0, parse_dense("X"), np.pi / 4, np.array([1, 0], complex))
print(out.round(4), "norm", np.linalg.norm(out))

print(format_dense(PauliString(4, x=0b0011, z=0b0110)))
