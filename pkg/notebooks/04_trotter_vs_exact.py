# %% [markdown]
# # Trotter error against exact evolution

# %%
import numpy as np

from trotter_lab import TrotterConfig, build_xxz_chain, exact_evolve, fidelity, neel_state, trotter_evolve
from trotter_lab.commutation import xyz_coloring
from trotter_lab.orderings import group_evolve_orderings, magnitude_ordering, random_orderings

h = build_xxz_chain(8, 0.25, 1.0)
psi0 = neel_state(8)
exact = exact_evolve(h, 5.0, psi0)
print("krylov vs dense", np.linalg.norm(exact - exact_evolve(h, 5.0, psi0, method="dense")))

# %%
# Fidelity of each group permutation, first order.
for s in (3, 5, 10, 20):
    fs = [fidelity(exact, trotter_evolve(h, o, TrotterConfig(1, s, 5.0), psi0))
          for o in group_evolve_orderings(xyz_coloring(h))]
    print(f"s={s:2d}", " ".join(f"{f:.3f}" for f in fs))

# %%
# Random orderings for comparison.
rand = [fidelity(exact, trotter_evolve(h, o, TrotterConfig(1, 20, 5.0), psi0))
        for o in random_orderings(h, 30, seed=0)]
print(f"random s=20: mean {np.mean(rand):.3f}  min {min(rand):.3f}  max {max(rand):.3f}")

# %%
# Error slope in s gives the formula order.
h6 = build_xxz_chain(6, 0.25, 1.0)
psi6 = neel_state(6)
ref = exact_evolve(h6, 1.0, psi6)
steps = np.array([8, 16, 32, 64])
for p in (1, 2):
    errs = [np.linalg.norm(ref - trotter_evolve(h6, magnitude_ordering(h6), TrotterConfig(p, int(s), 1.0), psi6))
            for s in steps]
    print(f"p={p} slope {np.polyfit(np.log(steps), np.log(errs), 1)[0]:.2f}")
