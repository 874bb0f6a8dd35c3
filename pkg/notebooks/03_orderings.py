# %% [markdown]
# # Ordering strategies
#
# An ordering is either a flat permutation of term indices or an ordered list
# of commuting groups.

# %%
from trotter_lab import build_xxz_chain
from trotter_lab.commutation import xyz_coloring
from trotter_lab.orderings import (deplete_groups, equalise_groups, group_evolve_orderings,
                                   lexicographic_ordering, magnitude_ordering, random_orderings)
from trotter_lab.pauli import format_dense

h = build_xxz_chain(3, 0.25, 0.5)
names = [format_dense(t.pauli) for t in h.terms]


def show(o):
    print(f"{o.label:22s}", " ".join(names[i] for i in o.sequence))


grp = xyz_coloring(h)
for o in group_evolve_orderings(grp):
    show(o)

# %%
for o in (deplete_groups(grp, h), equalise_groups(grp, h), magnitude_ordering(h),
          lexicographic_ordering(h)):
    show(o)

# %%
# Random orderings are reproducible from a seed.
for o in random_orderings(h, 3, seed=0):
    show(o)
