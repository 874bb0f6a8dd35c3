import heapq
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trotter_lab.commutation import Grouping, build_graph, xyz_coloring
from trotter_lab.hamiltonians import HamiltonianInstance, build_xxz_chain
from trotter_lab.orderings import (Ordering, deplete_groups, equalise_groups,
                                   group_evolve_orderings, lexicographic_ordering,
                                   magnitude_ordering, random_orderings, validate_ordering)
from trotter_lab.pauli import PauliString, WeightedTerm, format_dense, parse_dense


def toy(coeffs, n=None):
    """Hamiltonian with the given coefficients on distinct single-qubit/X strings."""
    n = n or max(2, len(coeffs).bit_length())
    terms = [WeightedTerm(c, PauliString(n, x=i + 1)) for i, c in enumerate(coeffs)]
    return HamiltonianInstance(n, terms, "xxz_1d")


class TestGroupEvolve:
    def test_three_groups(self):
        grp = Grouping(((0,), (1,), (2,)), "xyz")
        out = group_evolve_orderings(grp)
        assert [o.permutation for o in out] == ["012", "021", "102", "120", "201", "210"]
        assert out[3].units == ((1,), (2,), (0,))
        assert out[3].label == "xyz_groups perm 120"
        assert all(o.kind == "grouped" for o in out)

    def test_one_group(self):
        assert len(group_evolve_orderings(Grouping(((0, 1),), "exact"))) == 1

    def test_two_groups(self):
        out = group_evolve_orderings(Grouping(((0,), (1,)), "greedy"))
        assert [o.permutation for o in out] == ["01", "10"]

    def test_cap(self):
        with pytest.raises(ValueError):
            group_evolve_orderings(Grouping(tuple((i,) for i in range(6)), "greedy"))

    def test_are_permutations_of_groups(self):
        h = build_xxz_chain(5, 0.25, 1.0)
        grp = xyz_coloring(h)
        g = build_graph(h)
        out = group_evolve_orderings(grp)
        assert len(out) == 6
        for o in out:
            assert sorted(o.units) == sorted(grp.groups)
            assert validate_ordering(o, len(h), g)


class TestMagnitude:
    def test_ties(self):
        assert magnitude_ordering(toy([0.25, 1, 1, 0.5])).sequence == (1, 2, 3, 0)

    def test_all_equal(self):
        assert magnitude_ordering(toy([0.7] * 5)).sequence == (0, 1, 2, 3, 4)

    def test_xxz(self):
        h = build_xxz_chain(3, 0.25, 0.5)
        # XX/YY bonds, then fields, then ZZ bonds
        assert magnitude_ordering(h).sequence == (0, 1, 3, 4, 6, 7, 8, 2, 5)

    def test_negative_coefficients_use_abs(self):
        assert magnitude_ordering(toy([0.1, -2.0, 1.0])).sequence == (1, 2, 0)


class TestLexicographic:
    def test_characters(self):
        h = HamiltonianInstance(2, [WeightedTerm(1.0, parse_dense(s)) for s in ("XI", "IX", "ZI")],
                                "xxz_1d")
        o = lexicographic_ordering(h)
        assert [format_dense(h.terms[i].pauli) for i in o.sequence] == ["IX", "XI", "ZI"]
        assert o.label == "lex_dense"

    def test_single_term(self):
        assert lexicographic_ordering(toy([1.0])).sequence == (0,)

    def test_field_before_bond(self):
        h = build_xxz_chain(3, 0.25, 0.5)
        labels = [format_dense(h.terms[i].pauli) for i in lexicographic_ordering(h).sequence]
        assert labels.index("XII") < labels.index("XXI")
        assert labels == sorted(labels, key=lambda s: s.translate(str.maketrans("IXYZ", "0123")))


def deplete_oracle(groups, coeffs):
    heaps = [[(-abs(coeffs[i]), i) for i in g] for g in groups]
    for hp in heaps:
        heapq.heapify(hp)
    out = []
    alive = set(range(len(groups)))
    while alive:
        gi = min(alive, key=lambda k: (heaps[k][0][0], k))
        while heaps[gi]:
            out.append(heapq.heappop(heaps[gi])[1])
        alive.discard(gi)
    return out


def equalise_oracle(groups, coeffs):
    heaps = [[(-abs(coeffs[i]), i) for i in g] for g in groups]
    for hp in heaps:
        heapq.heapify(hp)
    out = []
    while any(heaps):
        for hp in heaps:
            if hp:
                out.append(heapq.heappop(hp)[1])
    return out


class TestDepleteEqualise:
    def test_deplete_example(self):
        h = toy([1.0, 0.2, 0.9, 0.8])
        grp = Grouping(((0, 1), (2, 3)), "xyz")
        assert deplete_groups(grp, h).sequence == (0, 1, 2, 3)

    def test_deplete_picks_largest_first(self):
        h = toy([0.3, 0.2, 0.9, 0.8])
        grp = Grouping(((0, 1), (2, 3)), "xyz")
        assert deplete_groups(grp, h).sequence == (2, 3, 0, 1)

    def test_equalise_example(self):
        h = toy([1.0, 0.2, 0.9, 0.8])
        grp = Grouping(((0, 1), (2, 3)), "xyz")
        assert equalise_groups(grp, h).sequence == (0, 2, 1, 3)

    def test_one_group(self):
        h = toy([0.1, 0.5, 0.3])
        grp = Grouping(((0, 1, 2),), "xyz")
        assert deplete_groups(grp, h).sequence == (1, 2, 0)
        assert equalise_groups(grp, h).sequence == (1, 2, 0)

    def test_all_equal(self):
        h = toy([1.0] * 5)
        grp = Grouping(((1, 3), (0, 2, 4)), "xyz")
        # groups stay in the order given
        assert deplete_groups(grp, h).sequence == (1, 3, 0, 2, 4)

    def test_unequal_sizes_tail(self):
        h = toy([0.5, 0.4, 0.3, 0.2, 0.1, 1.0])
        grp = Grouping(((5,), (0, 1, 2, 3, 4)), "xyz")
        assert equalise_groups(grp, h).sequence == (5, 0, 1, 2, 3, 4)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from([0.1, 0.25, 0.5, 1.0, -1.0, 2.0]), min_size=1, max_size=12),
           st.data())
    def test_match_oracle(self, coeffs, data):
        k = len(coeffs)
        labels = data.draw(st.lists(st.integers(0, 3), min_size=k, max_size=k))
        groups = tuple(tuple(i for i in range(k) if labels[i] == c) for c in sorted(set(labels)))
        grp = Grouping(groups, "xyz")
        h = toy(coeffs)
        dep, eq = deplete_groups(grp, h), equalise_groups(grp, h)
        assert list(dep.sequence) == deplete_oracle(grp.groups, coeffs)
        assert list(eq.sequence) == equalise_oracle(grp.groups, coeffs)
        assert sorted(dep.sequence) == sorted(eq.sequence) == list(range(k))


class TestRandom:
    def test_thirty_permutations(self):
        h = build_xxz_chain(6, 0.25, 1.0)
        out = random_orderings(h, 30, seed=7)
        assert len(out) == 30
        assert [o.label for o in out][:2] == ["random#0", "random#1"]
        for o in out:
            assert sorted(o.sequence) == list(range(len(h)))
        assert len({o.sequence for o in out}) == 30

    def test_single_term(self):
        assert all(o.sequence == (0,) for o in random_orderings(toy([1.0]), 5, seed=0))

    def test_reproducible(self):
        h = build_xxz_chain(5, 0.12, 0.3)
        assert random_orderings(h, 10, 3) == random_orderings(h, 10, 3)
        assert random_orderings(h, 10, 3) != random_orderings(h, 10, 4)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            random_orderings(toy([1.0]), 0, 0)


def test_flatten_and_reverse():
    o = Ordering("grouped", ((2, 3), (0,), (1, 4)), "g", "xyz_groups", "120")
    assert o.sequence == (2, 3, 0, 1, 4)
    assert o.flattened().kind == "flat"
    assert o.flattened().sequence == o.sequence
    assert o.reversed_units() == ((1, 4), (0,), (2, 3))


def test_validate_ordering_rejects_non_permutation():
    assert not validate_ordering(Ordering.flat([0, 0, 1], "bad"), 3)
    assert validate_ordering(Ordering.flat([2, 0, 1], "ok"), 3)


def test_every_strategy_is_permutation():
    for L, d, g in itertools.product((3, 6), (0.12, 0.25), (0.5, 2.0)):
        h = build_xxz_chain(L, d, g)
        grp = xyz_coloring(h)
        for o in [magnitude_ordering(h), lexicographic_ordering(h), deplete_groups(grp, h),
                  equalise_groups(grp, h), *group_evolve_orderings(grp)]:
            assert validate_ordering(o, len(h))
