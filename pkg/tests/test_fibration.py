from __future__ import annotations

import pytest

from artifact import matrices as mx
from artifact.fibration import (
    KODAIRA_TABLE,
    allowable_check,
    build_disc_fibration,
    build_k3_split_model,
    check_gamma_polarisation,
    compatible_polarisation,
    component_lattice,
    disc_fibration,
    fibre_from_vector,
    fibre_model,
    gamma_from_components,
    make_config,
    make_split,
    matrix_order,
    mw_coupling_data,
    parabolic_normal_form,
    parse_fibre_tag,
    ratell_model,
    ratell_transfer,
    search_framings,
    split_config,
    split_from_json,
    SplitError,
)
from artifact.lattice_core import standard_lattice
from artifact.mirror import DHT_INSTANCES, dht_split
from artifact.pseudolattice import twist


class TestFibreTags:
    @pytest.mark.parametrize(
        "tag, parsed",
        [("I18", ("I", 18)), ("I*12", ("I*", 12)), ("I_0^*", ("I*", 0)), ("Istar4", ("I*", 4)), ("IIIstar", ("III*", None)), ("II", ("II", None))],
    )
    def test_parse(self, tag, parsed):
        assert parse_fibre_tag(tag) == parsed

    @pytest.mark.parametrize("tag", ["I0", "V", "I*2*", "2I3", "mI1"])
    def test_rejects(self, tag):
        with pytest.raises(ValueError):
            parse_fibre_tag(tag)

    def test_table_families(self):
        assert sorted(KODAIRA_TABLE) == sorted(["I", "I*", "II", "III", "IV", "IV*", "III*", "II*"])


class TestMonodromies:
    @pytest.mark.parametrize("n", [1, 2, 7, 18])
    def test_multiplicative_fibres(self, n):
        assert [list(r) for r in fibre_model(f"I{n}").monodromy] == [[1, n], [0, 1]]

    def test_i0_star_is_minus_identity(self):
        assert [list(r) for r in fibre_model("I*0").monodromy] == [[-1, 0], [0, -1]]

    def test_iii_star_is_conjugate_to_rotation(self):
        m = [list(r) for r in fibre_model("III*").monodromy]
        rotation = [[0, -1], [1, 0]]
        found = [
            h
            for h in ([[a, b], [c, d]] for a in range(-3, 4) for b in range(-3, 4) for c in range(-3, 4) for d in range(-3, 4))
            if mx.det(h) == 1 and mx.matmul(h, m) == mx.matmul(rotation, h)
        ]
        assert found

    @pytest.mark.parametrize(
        "tag, mono, order",
        [
            ("II", [[-1, 3], [-1, 2]], 6),
            ("III", [[-2, 5], [-1, 2]], 4),
            ("IV", [[-3, 7], [-1, 2]], 3),
            ("IV*", [[1, -3], [1, -2]], 3),
            ("III*", [[2, -5], [1, -2]], 4),
            ("II*", [[3, -7], [1, -2]], 6),
            ("I*2", [[-1, -2], [0, -1]], None),
        ],
    )
    def test_word_monodromies(self, tag, mono, order):
        fib = fibre_model(tag)
        assert [list(r) for r in fib.monodromy] == mono
        assert matrix_order(fib.monodromy) == order

    @pytest.mark.parametrize("tag, euler", [("I9", 9), ("I*3", 9), ("II", 2), ("III", 3), ("IV", 4), ("IV*", 8), ("III*", 9), ("II*", 10)])
    def test_unimodular_of_rank_euler(self, tag, euler):
        g, f = build_disc_fibration([tag])
        assert g.rank == euler == fibre_model(tag).euler
        assert g.is_unimodular
        assert twist(f) == [list(r) for r in fibre_model(tag).monodromy]

    def test_framing_conjugates(self):
        h = [[2, 1], [1, 1]]
        fib = fibre_model("I3", h)
        assert fib.framed_monodromy == mx.matmul(mx.matmul(h, [[1, 3], [0, 1]]), mx.int_inverse(h))

    def test_framing_must_be_sl2(self):
        with pytest.raises(ValueError):
            fibre_model("I1", [[2, 0], [0, 1]])

    def test_fibre_from_vector(self):
        fib = fibre_from_vector([3, 1])
        assert fib.framed_word == [(3, 1)]
        with pytest.raises(ValueError):
            fibre_from_vector([2, 2])

    def test_parabolic_normal_form(self):
        k, g = parabolic_normal_form([[1, 4], [0, 1]])
        assert k == 4
        assert parabolic_normal_form([[0, -1], [1, 0]]) is None


class TestConfigs:
    def test_config_word_and_monodromy(self):
        cfg = make_config([{"type": "I18"}, {"type": "I1", "framing": [[1, 0], [3, 1]]}])
        assert cfg.euler == 19
        assert len(cfg.word) == 19
        assert cfg.monodromy == mx.matmul([[1, 18], [0, 1]], fibre_model("I1", [[1, 0], [3, 1]]).framed_monodromy)

    def test_split_indices(self):
        cfg = make_config(DHT_INSTANCES["A17"]["side2"] + DHT_INSTANCES["A17"]["side1"])
        split = split_config(cfg, [4, 5, 6], [0, 1, 2, 3])
        assert split.side1.euler == 3 and split.side2.euler == 21

    def test_split_must_total_24(self):
        with pytest.raises(ValueError):
            make_split(make_config(["I1"]), make_config(["I18"]))

    def test_split_json(self):
        split = split_from_json({"side1": DHT_INSTANCES["A17"]["side1"], "side2": DHT_INSTANCES["A17"]["side2"]})
        assert split.side1.euler == 3

    def test_framing_search_reproduces_target(self):
        target = [[1, -8], [0, 1]]
        found = search_framings(["I2", "I1", "I1"], target, limit=1)
        assert found
        cfg = make_config([{"type": t, "framing": g} for t, g in zip(["I2", "I1", "I1"], found[0])])
        assert cfg.monodromy == target

    def test_framing_search_infeasible(self):
        # degree nine with an A1 fibre: no framing exists
        assert search_framings(["I2", "I1"], [[1, -9], [0, 1]], max_length=6) == []


class TestAllowable:
    @pytest.mark.parametrize("name, d", [("A17", 9), ("D16A1", 8), ("E8E8A1", 1), ("E7D10", 2)])
    def test_dht_splits(self, name, d):
        split = dht_split(name)
        v = allowable_check(split)
        assert v.allowable
        assert v.to_json()["basis"] == {"a": [-1, 0], "b": [0, -1]}
        assert v.certifying_bases == 2
        assert split.side1.monodromy == [[1, -d], [0, 1]]

    def test_non_inverse_monodromies(self):
        v = allowable_check(make_split(make_config(["I1", "I1"]), make_config(["I22"])))
        assert not v.allowable
        assert "not mutually inverse" in v.reasons[0]

    def test_model_refuses_non_allowable(self):
        with pytest.raises(SplitError):
            build_k3_split_model(make_split(make_config(["I1", "I1"]), make_config(["I22"])))


class TestSplitModels:
    @pytest.mark.parametrize("name, tags", [("A17", (9, -9)), ("D16A1", ("8'", -8)), ("E8E8A1", (1, -1)), ("E7D10", (2, -2))])
    def test_tags_and_components(self, name, tags):
        m = build_k3_split_model(dht_split(name))
        assert m.tags == tags
        assert len(gamma_from_components(m)) == 17

    def test_component_span_index_two_in_d16a1(self):
        m = build_k3_split_model(dht_split("D16A1"))
        span, sat = component_lattice(m), gamma_from_components(m)
        coords = [mx.int_coordinates(sat, v) for v in span]
        assert abs(mx.det(coords)) == 2

    def test_compatible_polarisation_splits_h(self):
        m = build_k3_split_model(dht_split("A17"))
        pol = compatible_polarisation(m)
        f, g = pol.lcheck_basis[0], pol.lcheck_basis[1]
        assert pol.ambient.pair(f, g) == 1 and pol.ambient.pair(f, f) == 0 and pol.ambient.pair(g, g) == 0
        assert pol.ambient.rank == 22

    def test_mordell_weil_consistency_a17(self):
        m = build_k3_split_model(dht_split("A17"))
        rep = mw_coupling_data(m, compatible_polarisation(m)).to_json()
        assert rep["Gamma_mod_R"]["order"] == 3
        assert rep["coupling"]["order"] == 3
        assert rep["consistent"]


class TestDiscPolarisation:
    @pytest.fixture(scope="class")
    @classmethod
    def e8_disc(cls):
        cfg = make_config([{"type": "III*", "framing": [[1, 0], [-1, 1]]}, {"type": "I2", "framing": [[-1, -1], [1, 0]]}])
        return disc_fibration(cfg)

    def test_a1_component_in_degree_eight(self):
        m = build_k3_split_model(dht_split("D16A1"))
        disc = m.disc(1)
        assert disc.euler == 4
        assert disc.component_classes() == [[[-2, -1]], [], []]
        assert check_gamma_polarisation(m, [[-2, -1]]).status == "verified"
        assert check_gamma_polarisation(m, []).status == "verified"

    def test_euler_gate(self):
        m = build_k3_split_model(dht_split("D16A1"))
        with pytest.raises(ValueError):
            check_gamma_polarisation(m, [], side=2)

    def test_components_of_e7_a1_disc(self, e8_disc):
        assert e8_disc.euler == 11
        assert [len(c) for c in e8_disc.component_classes()] == [7, 1]

    def test_full_component_lattice_not_primitive(self, e8_disc):
        comps = [v for c in e8_disc.component_classes() for v in c]
        v = check_gamma_polarisation(e8_disc, comps)
        assert v.status == "refuted"
        assert v.clauses["primitive"] is False

    def test_non_effective_root(self, e8_disc):
        a1 = e8_disc.component_classes()[1]
        v = check_gamma_polarisation(e8_disc, a1, component_classes=[])
        assert v.clauses["roots_effective"] is False

    def test_not_negative_definite(self):
        cfg = make_config(DHT_INSTANCES["D16A1"]["side1"])
        disc = disc_fibration(cfg)
        v = check_gamma_polarisation(disc, [list(disc.data.rb_class)])
        assert v.status == "refuted"


class TestRationalEllipticTransfer:
    def test_round_trip_in_degree_one(self):
        cfg = make_config([{"type": "III*", "framing": [[1, 0], [-1, 1]]}, {"type": "I2", "framing": [[-1, -1], [1, 0]]}])
        disc = disc_fibration(cfg)
        model = ratell_model(disc)
        assert model.degree == 1 and model.chain == ()
        a1 = disc.component_classes()[1]
        image = ratell_transfer(disc, a1, model=model)
        w = list(image.basis[0])
        assert standard_lattice("E8").norm(w) == -2
        assert w == [4, 2, 3, 2, 4, 3, 2, 1]
        back = ratell_transfer(disc, [w], "to_pseudo", model=model)
        assert [list(v) for v in back.basis] == a1

    def test_degree_nine_has_empty_complement(self):
        disc = disc_fibration(make_config(DHT_INSTANCES["A17"]["side1"]))
        model = ratell_model(disc)
        assert model.degree == 9
        assert ratell_transfer(disc, [], model=model).rank == 0

    def test_bad_direction(self):
        disc = disc_fibration(make_config(DHT_INSTANCES["A17"]["side1"]))
        with pytest.raises(ValueError):
            ratell_transfer(disc, [], "sideways")
