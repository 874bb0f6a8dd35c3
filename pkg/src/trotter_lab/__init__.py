"""Trotter-ordering benchmark lab.

Build Heisenberg-family Hamiltonians, group their Pauli terms by coloring the
commutation graph, Trotterize under many term orderings and score each against
exact evolution by state fidelity.
"""
from .commutation import (CommutationGraph, Grouping, build_graph, exact_coloring,
                          greedy_coloring, handcrafted_coloring, validate_grouping, xyz_coloring)
from .hamiltonians import (HamiltonianInstance, LatticeSpec, build_rect, build_tri,
                           build_xxz_chain, deserialize, neel_state, serialize, snake_index)
from .orderings import (Ordering, deplete_groups, equalise_groups, group_evolve_orderings,
                        lexicographic_ordering, magnitude_ordering, random_orderings)
from .pauli import (PauliString, PauliType, WeightedTerm, apply_exp_term, apply_pauli, commutes,
                    format_dense, parse_dense, pauli_type)
from .simulator import TermTable, TrotterConfig, exact_evolve, fidelity, trotter_evolve

__version__ = "0.1.0"
