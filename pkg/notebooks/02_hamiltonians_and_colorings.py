# %% [markdown]
# # Model Hamiltonians and their commutation graphs

# %%
from trotter_lab import build_graph, build_rect, build_tri, build_xxz_chain, serialize
from trotter_lab.commutation import (exact_coloring, greedy_coloring, handcrafted_coloring,
                                     max_clique, to_dot, validate_grouping, xyz_coloring)
from trotter_lab.pauli import format_dense

h = build_xxz_chain(4, 0.25, 1.0)
print(h.describe(), len(h), "terms")
print(serialize(h))

# %%
# Edges join terms that do not commute.
g = build_graph(h)
print(g.n_edges, "edges; largest clique", len(max_clique(g)))

# %%
# Four colorings of the same graph.
for grp in (xyz_coloring(h), handcrafted_coloring(h), greedy_coloring(g), exact_coloring(g)):
    print(f"{grp.method:12s} {grp.n_groups} groups, proper={validate_grouping(g, grp)}")
    for group in grp.groups:
        print("   ", " ".join(format_dense(h.terms[i].pauli) for i in group))

# %%
# Without a field the chain needs only two groups.
h0 = build_xxz_chain(8, 0.25, 0.0)
print("g=0:", handcrafted_coloring(h0).n_groups, "handcrafted,",
      exact_coloring(build_graph(h0)).n_groups, "exact")

# %%
# 2D lattices are numbered along a serpentine path.
for h2 in (build_rect(3, 3, 0.5), build_tri(3, 4, 0.25)):
    print(h2.describe(), len(h2), "terms,", xyz_coloring(h2).n_groups, "xyz groups")

# %%
print(to_dot(build_graph(build_xxz_chain(2, 0.25, 1.0)),
             xyz_coloring(build_xxz_chain(2, 0.25, 1.0))))
