from __future__ import annotations

import json

import pytest

from artifact import matrices as mx
from artifact.lattice_core import IntLattice, lattices_isometric, standard_lattice
from artifact.mirror import (
    DHT_INSTANCES,
    AdmissibilityCertificate,
    MirrorWitness,
    NotAdmissible,
    check_mirror_pair,
    check_wdp_mirror,
    cusp_transport,
    degeneration_side,
    degree_two_vector,
    dht_degeneration,
    dht_fibration,
    dht_suite,
    div,
    fibration_side,
    hh_transport,
    is_doubly_admissible,
    is_m_admissible,
    k3_lattice,
    mirror_lattice,
    named_pair,
    parse_class,
)
from artifact.fibration import make_config, make_split


H2_H = standard_lattice("H(2)+H")


class TestDivisibility:
    def test_div_in_scaled_plane(self):
        assert div([1, 0, 0, 0], H2_H) == 2
        assert div([0, 0, 1, 0], H2_H) == 1

    def test_div_of_zero(self):
        with pytest.raises(ValueError):
            div([0, 0], standard_lattice("H"))

    def test_obstructed_admissibility(self):
        res = is_m_admissible([1, 0, 0, 0], H2_H, 1)
        assert isinstance(res, NotAdmissible)
        assert res.certain and res.status == "refuted"

    def test_two_admissible_with_certificate(self):
        cert = is_m_admissible([1, 0, 0, 0], H2_H, 2)
        assert isinstance(cert, AdmissibilityCertificate)
        assert cert.verify(H2_H)
        assert list(cert.g) == [0, 1, 0, 0]

    def test_unimodular_one_admissible(self):
        k3 = k3_lattice()
        e = [1] + [0] * 21
        cert = is_m_admissible(e, k3, 1)
        assert cert and cert.verify(k3)

    def test_input_checks(self):
        with pytest.raises(ValueError):
            is_m_admissible([2, 0], standard_lattice("H"), 1)
        with pytest.raises(ValueError):
            is_m_admissible([1, 1], standard_lattice("H"), 1)


class TestDoubleAdmissibility:
    def test_hh_plus_e8(self):
        lat = standard_lattice("H+H+E8")
        cert = is_doubly_admissible([[1, 0, 0, 0] + [0] * 8, [0, 0, 1, 0] + [0] * 8], lat)
        assert cert and cert.verify(lat)
        parts = cert.hh_plus_gamma(lat)
        assert lattices_isometric(IntLattice.from_gram(parts["Gamma"]), standard_lattice("E8")) is True

    def test_scaled_plane_refuted(self):
        res = is_doubly_admissible([[1, 0, 0, 0], [0, 0, 1, 0]], H2_H)
        assert not res and res.certain
        assert "[1, 2]" in res.reason

    def test_not_isotropic(self):
        with pytest.raises(ValueError):
            is_doubly_admissible([[1, 1, 0, 0], [0, 0, 1, 0]], standard_lattice("H+H"))

    def test_transport_moves_frames(self):
        lat = standard_lattice("H+H")
        i1 = [[1, 0, 0, 0], [0, 0, 1, 0]]
        i2 = [[0, 1, 0, 0], [0, 0, 0, 1]]
        g = hh_transport(i1, i2, [1, 0, 0, 0], [0, 0, 0, 1], lat)
        assert mx.matvec(g, [1, 0, 0, 0]) == [0, 0, 0, 1]

    def test_cusp_transport(self):
        lat = standard_lattice("H+H+A1")
        i = [[1, 0, 0, 0, 0], [0, 0, 1, 0, 0]]
        g = cusp_transport(i, [1, 0, 0, 0, 0], [1, 0, 1, 0, 0], lat)
        assert mx.matvec(g, [1, 0, 0, 0, 0]) == [1, 0, 1, 0, 0]


class TestMirrorLattice:
    def test_degree_two_mirror(self):
        ml = mirror_lattice(k3_lattice(), [degree_two_vector()])
        lat = ml.lattice()
        assert lat.signature == (1, 18, 0)
        assert lattices_isometric(lat, standard_lattice("H+E8+E8+A1")) is True

    def test_mirror_of_mirror(self):
        ml = mirror_lattice(k3_lattice(), [degree_two_vector()])
        back = mirror_lattice(k3_lattice(), [list(v) for v in ml.sub.basis])
        assert back.lattice().matrix == [[2]]

    def test_mirror_of_big_lattice(self):
        k3 = k3_lattice()
        # the summand H ⊕ E8 ⊕ E8 in the last 18 coordinates
        vecs = [[0] * 4 + [1 if j == i else 0 for j in range(18)] for i in range(18)]
        ml = mirror_lattice(k3, vecs)
        assert lattices_isometric(ml.lattice(), standard_lattice("H")) is True


class TestClasses:
    def test_parse_chain_class(self):
        assert parse_class("h-e1-e2-e3", 4) == [1, -1, -1, -1]
        assert parse_class("e15+e16+e17-h", 18)[0] == -1

    def test_parse_quadric_class(self):
        assert parse_class("f1-f2", 2, "quadric") == [1, -1]

    @pytest.mark.parametrize("text", ["", "x1", "e9"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_class(text, 4)

    def test_degeneration_requires_l_or_roots(self):
        with pytest.raises(ValueError):
            degeneration_side(named_pair("P2"), named_pair("Bl18"))


class TestDhtInstances:
    @pytest.mark.parametrize("name", sorted(DHT_INSTANCES))
    def test_degree_two_lattice(self, name):
        deg = dht_degeneration(name)
        assert len(deg.L) == 1
        assert deg.model.ns_m.norm(deg.L[0]) == 2

    def test_a17_roots_span_a17(self):
        deg = dht_degeneration("A17")
        assert len(deg.roots[2]) == 17

    def test_suite_all_verified(self):
        table = dht_suite()
        assert set(table) == set(DHT_INSTANCES)
        for name, row in table.items():
            assert row["status"] == "verified", name
            assert row["mirror_lattice_matches"], name
            assert row["Gamma_rank"] == 17


class TestNegativeControls:
    def test_component_span_not_primitive(self):
        deg = dht_degeneration("D16A1")
        fib = dht_fibration("D16A1", "component_span")
        rep = check_mirror_pair(deg, fib)
        assert rep.status == "refuted"
        assert rep.verdict.clauses["1_Gamma_primitive"] is False
        assert rep.verdict.witnesses["Gamma_embedding"]["index"] == 2

    def test_lattice_level_d16_in_e8e8(self):
        # D16 ⊂ D16+ written in doubled coordinates of Z^16 with form -x.y/4
        roots = [[2 if j == i else -2 if j == i + 1 else 0 for j in range(16)] for i in range(15)]
        roots.append([0] * 14 + [2, 2])
        glue = [1] * 16
        basis = mx.hermite_reduce(roots + [glue])
        assert len(basis) == 16
        gram = [[-mx.dot(u, v) // 4 for v in basis] for u in basis]
        d16_plus = IntLattice.from_gram(gram)
        ambient = IntLattice.from_gram(mx.block_diag(standard_lattice("H").gram, gram))
        assert lattices_isometric(ambient, standard_lattice("H+E8+E8")) is True
        coords = [[0, 0] + mx.int_coordinates(basis, r) for r in roots]
        sub = [[1, 0] + [0] * 16, [0, 1] + [0] * 16] + coords
        assert lattices_isometric(
            IntLattice.from_gram([[ambient.pair(u, v) for v in sub] for u in sub]), standard_lattice("H+D16")
        ) is True
        divisors = mx.smith_diagonal(mx.columns(sub, 18))
        assert divisors[-1] == 2 and all(d == 1 for d in divisors[:-1])
        assert d16_plus.is_unimodular and d16_plus.is_even

    def test_degree_mismatch(self):
        deg = dht_degeneration("A17")
        fib = fibration_side(make_split(make_config(["I1", "I1"]), make_config(["I22"])))
        rep = check_mirror_pair(deg, fib)
        assert rep.status == "refuted"
        assert rep.verdict.clauses["2_degrees_match"] is False
        assert fib.model is None

    def test_degree_mismatch_with_models(self):
        rep = check_mirror_pair(dht_degeneration("E7D10"), dht_fibration("E8E8A1"))
        assert rep.verdict.clauses["2_degrees_match"] is False


class TestWitnessMode:
    @pytest.fixture(scope="class")
    @classmethod
    def a17(cls):
        deg, fib = dht_degeneration("A17"), dht_fibration("A17")
        return deg, fib, check_mirror_pair(deg, fib)

    def test_round_trip_witness(self, a17):
        deg, fib, rep = a17
        w = MirrorWitness.from_json(json.loads(json.dumps({"result": rep.to_json()})))
        again = check_mirror_pair(deg, fib, w)
        assert again.status == "verified"
        assert again.verdict.clauses["4_splitting"] is True

    def test_other_direction(self, a17):
        deg, fib, rep = a17
        w = rep.witness()
        w.direction = "4b"
        assert check_mirror_pair(deg, fib, w).status == "verified"

    def test_inconsistent_psi(self, a17):
        deg, fib, rep = a17
        w = rep.witness()
        bad = MirrorWitness(w.psi1, w.psi2, mx.scale(-1, w.psi), w.psihat)
        assert check_mirror_pair(deg, fib, bad).verdict.clauses["2_psi_i"] is False

    def test_missing_lift_is_unknown(self, a17):
        deg, fib, rep = a17
        w = rep.witness()
        assert check_mirror_pair(deg, fib, MirrorWitness(w.psi1, w.psi2)).status == "unknown"

    def test_weak_del_pezzo_compatibility(self, a17):
        deg, fib, rep = a17
        v = check_wdp_mirror(deg, fib, rep)
        assert v.status == "verified"
        assert v.witnesses["coupling_degeneration"]["order"] == 3

    def test_weak_del_pezzo_degree_one(self):
        deg, fib = dht_degeneration("E8E8A1"), dht_fibration("E8E8A1")
        v = check_wdp_mirror(deg, fib)
        assert v.status == "verified"
        assert v.witnesses["Ncheck_rank"] == 8
