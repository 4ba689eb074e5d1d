from __future__ import annotations

from fractions import Fraction

import pytest

from artifact import matrices as mx
from artifact.lattice_core import (
    IntLattice,
    SearchBudgetExceeded,
    Sublattice,
    definite_isometry,
    direct_sum,
    disc_group,
    is_primitive,
    lattices_isometric,
    lll_reduce,
    orthogonal_complement,
    positive_roots,
    quotient_data,
    saturate,
    short_vectors,
    simple_roots,
    standard_lattice,
)


class TestNamedLattices:
    @pytest.mark.parametrize(
        "name, rank, sig, det",
        [
            ("E8", 8, (0, 8, 0), 1),
            ("E7", 7, (0, 7, 0), -2),
            ("E6", 6, (0, 6, 0), 3),
            ("A2", 2, (0, 2, 0), 3),
            ("D4", 4, (0, 4, 0), 4),
            ("H", 2, (1, 1, 0), -1),
            ("H(2)", 2, (1, 1, 0), -4),
            ("I(1,9)", 10, (1, 9, 0), -1),
            ("II(1,1)", 2, (1, 1, 0), -1),
            ("<2>", 1, (1, 0, 0), 2),
            ("K3", 22, (3, 19, 0), -1),
            ("H+E8+E8", 18, (1, 17, 0), -1),
        ],
    )
    def test_invariants(self, name, rank, sig, det):
        lat = standard_lattice(name)
        assert lat.rank == rank
        assert lat.signature == sig
        assert lat.det == det

    def test_root_lattices_are_negative_definite_and_even(self):
        for name in ("A5", "D6", "E8"):
            lat = standard_lattice(name)
            assert lat.is_even
            assert lat.signature[0] == 0 and lat.signature[2] == 0

    def test_det_agrees_with_sympy(self):
        from sympy import Matrix

        for name in ("E7", "D9", "A11", "H+E8+A1"):
            lat = standard_lattice(name)
            assert lat.det == Matrix(lat.matrix).det()

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            standard_lattice("Q(7)")

    def test_json_round_trip(self):
        lat = standard_lattice("D5+<4>")
        assert IntLattice.from_json(lat.to_json()) == lat
        assert IntLattice.from_json("E6") == standard_lattice("E6")

    def test_direct_sum(self):
        lat = direct_sum(standard_lattice("A1"), standard_lattice("H"))
        assert lat.matrix == [[-2, 0, 0], [0, 0, 1], [0, 1, 0]]


class TestDiscriminantGroups:
    @pytest.mark.parametrize("name, factors", [("A4", [5]), ("D5", [4]), ("D6", [2, 2]), ("E6", [3]), ("E7", [2]), ("E8", [])])
    def test_invariant_factors(self, name, factors):
        assert list(disc_group(standard_lattice(name)).invariant_factors) == factors

    def test_a1_discriminant_form(self):
        # generator e/2 of A1* has norm -1/2
        g = disc_group(standard_lattice("A1"))
        assert g.qvalues[0] % 2 == Fraction(3, 2)

    def test_odd_lattice_flagged(self):
        assert disc_group(standard_lattice("<3>")).odd


class TestSublattices:
    def test_saturation_and_index(self):
        lat = standard_lattice("H")
        sub = Sublattice.spanned_by(lat, [[2, 2]])
        sat = saturate(sub)
        assert sat.basis == ((1, 1),)
        assert not is_primitive(sub)
        assert sub.index_in(sat) == 2

    def test_orthogonal_complement_in_e8(self):
        e8 = standard_lattice("E8")
        sub = Sublattice(e8, ((1, 0, 0, 0, 0, 0, 0, 0),))
        perp = orthogonal_complement(sub)
        assert perp.rank == 7
        assert lattices_isometric(perp.lattice(), standard_lattice("E7"))

    def test_dependent_generators_rejected(self):
        with pytest.raises(ValueError):
            Sublattice(standard_lattice("H"), ((1, 0), (2, 0)))

    def test_quotient_by_radical(self):
        # Gram of <e> ⊕ A2 with e in the radical
        gram = [[0, 0, 0], [0, -2, 1], [0, 1, -2]]
        q = quotient_data(gram, [[1, 0, 0]])
        assert q.lattice.rank == 2
        assert lattices_isometric(q.lattice, standard_lattice("A2"))
        assert q.project(q.lift([1, -1])) == [1, -1]

    def test_quotient_rejects_non_radical(self):
        with pytest.raises(ValueError):
            quotient_data(standard_lattice("H").gram, [[1, 0]])


class TestRootsAndIsometries:
    @pytest.mark.parametrize("name, count", [("A17", 153), ("D16", 240), ("E6", 36), ("E7", 63), ("E8", 120)])
    def test_positive_root_counts(self, name, count):
        assert len(positive_roots(standard_lattice(name))) == count

    @pytest.mark.parametrize("name", ["A6", "D7", "E7"])
    def test_simple_roots_form_the_diagram(self, name):
        lat = standard_lattice(name)
        simple = simple_roots(lat)
        assert len(simple) == lat.rank
        gram = [[lat.pair(u, v) for v in simple] for u in simple]
        assert lattices_isometric(IntLattice.from_gram(gram), lat)

    def test_short_vectors_e8(self):
        vecs = short_vectors(mx.scale(-1, standard_lattice("E8").gram), 2, exact_norm=2)
        # both signs of every root
        assert len(vecs) == 240

    def test_lll_preserves_gram(self):
        g = [[10, 7, 3], [7, 6, 2], [3, 2, 5]]
        t, red = lll_reduce(g)
        assert abs(mx.det(t)) == 1
        assert mx.matmul(mx.matmul(mx.transpose(t), g), t) == red

    def test_definite_isometry_found(self):
        a = standard_lattice("A2+A1")
        b = IntLattice.from_gram([[-2, 0, 1], [0, -2, 0], [1, 0, -2]])
        p = definite_isometry(a, b)
        assert p is not None
        assert mx.matmul(mx.matmul(mx.transpose(p), b.gram), p) == a.matrix

    def test_definite_isometry_refuted(self):
        # same determinant 7, different lattices: <-7> ⊕ ... ranks differ, so compare rank-2 forms
        a = IntLattice.from_gram([[-2, 1], [1, -4]])
        b = IntLattice.from_gram([[-1, 0], [0, -7]])
        assert definite_isometry(a, b) is None

    def test_budget(self):
        with pytest.raises(SearchBudgetExceeded):
            definite_isometry(standard_lattice("E8"), standard_lattice("E8"), budget=3)

    def test_indefinite_unimodular_by_invariants(self):
        assert lattices_isometric(standard_lattice("H+E8"), standard_lattice("H(1)+E8")) is True
        assert lattices_isometric(standard_lattice("H+E8+E8"), standard_lattice("H+D8+E8")) is False
        assert lattices_isometric(standard_lattice("H+E8"), standard_lattice("I(1,9)")) is False


class TestMatrices:
    def test_kernel_and_solve(self):
        a = [[1, 2, 3], [2, 4, 6]]
        ker = mx.kernel(a, 3)
        assert len(ker) == 2
        assert all(not any(mx.matvec(a, k)) for k in ker)
        assert mx.solve_integer([[2, 0], [0, 3]], [4, 9]) == [2, 3]
        assert mx.solve_integer([[2, 0], [0, 3]], [1, 9]) is None

    def test_extend_to_basis(self):
        w = mx.extend_to_basis([[2, 3, 0]], 3)
        assert abs(mx.det(w)) == 1
        assert [row[0] for row in w] == [2, 3, 0]
