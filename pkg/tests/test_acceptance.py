"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``PASS criterion N`` or ``FAIL criterion N`` line to the
terminal (even under output capture) before re-raising any failure.
"""

from __future__ import annotations

import contextlib
import subprocess
import sys
import time

import pytest

from artifact import matrices as mx
from artifact.fibration import (
    KODAIRA_TABLE,
    allowable_check,
    build_disc_fibration,
    build_k3_split_model,
    fibre_model,
    make_config,
    make_split,
)
from artifact.lattice_core import IntLattice, disc_group, lattices_isometric, standard_lattice
from artifact.mirror import (
    check_mirror_pair,
    dht_degeneration,
    dht_fibration,
    dht_split,
    fibration_side,
    is_m_admissible,
    mirror_lattice,
    named_pair,
    NotAdmissible,
)
from artifact.pseudolattice import chain_word, surface_like, twist, z_chain
from artifact.tyurin import coupling_group, full_polarisation, phi_cokernel

from conftest import glued


@pytest.fixture
def report(request, capsys):
    """Print the PASS/FAIL line for the criterion named in the test."""

    @contextlib.contextmanager
    def run(number: int, label: str):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {label}")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {label} ({time.perf_counter() - start:.1f}s)")

    return run


DEFINITE_K_PERP = {4: "<-8>", 5: "[[-2,1],[1,-4]]", 6: "A2+A1", 7: "A4", 8: "D5", 9: "E6", 10: "E7", 11: "E8"}


def test_criterion_1_k_perp_table(report):
    with report(1, "K-perp of chain models, n = 3..21"):
        for n in range(3, 22):
            data = surface_like(z_chain(chain_word(n))[1])
            if n == 3:
                assert data.k_perp() == []
                continue
            lat = data.k_perp_lattice()
            assert lat.rank == n - 3
            if n in DEFINITE_K_PERP:
                assert lattices_isometric(lat, standard_lattice(DEFINITE_K_PERP[n])) is True, n
            if n == 12:
                assert lat.signature == (0, 8, 1)
                continue
            if n > 12:
                assert lat.signature == (1, n - 4, 0), n
            grp = disc_group(lat)
            assert grp.order == abs(12 - n) and grp.is_cyclic, n


ROTATION = [[0, -1], [1, 0]]


def _sl2_conjugate(m, target, bound=3):
    rng = range(-bound, bound + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    h = [[a, b], [c, d]]
                    if mx.det(h) == 1 and mx.matmul(h, m) == mx.matmul(target, h):
                        return h
    return None


def test_criterion_2_fibre_monodromies(report):
    with report(2, "Kodaira fibre pseudolattices and monodromies"):
        tags = [f"I{n}" for n in range(1, 19)] + [f"I*{n}" for n in range(0, 15)]
        tags += ["II", "III", "IV", "IV*", "III*", "II*"]
        seen = set()
        for tag in tags:
            fib = fibre_model(tag)
            seen.add(fib.family)
            g, f = build_disc_fibration([tag])
            assert g.rank == fib.euler and g.is_unimodular, tag
            assert twist(f) == [list(r) for r in fib.monodromy], tag
        assert seen == set(KODAIRA_TABLE)
        for n in range(1, 19):
            assert [list(r) for r in fibre_model(f"I{n}").monodromy] == [[1, n], [0, 1]]
        assert [list(r) for r in fibre_model("I*0").monodromy] == [[-1, 0], [0, -1]]
        assert _sl2_conjugate([list(r) for r in fibre_model("III*").monodromy], ROTATION) is not None


GLUINGS = [("P2", "Bl18"), ("P1xP1", "Bl17")] + [(f"Bl{k}", f"Bl{18 - k}") for k in range(1, 10)]


def test_criterion_3_glued_models(report):
    with report(3, f"glued-model structure on {len(GLUINGS)} gluings"):
        for pair in GLUINGS:
            m = glued(*pair)
            assert all(m.checks.values()), (pair, m.checks)
            assert twist(m.f) == mx.identity(2)
            assert m.M.is_even and m.M.is_unimodular and m.M.rank == 20
            # NS(M) is the (1,17) lattice; M itself has signature (18,2)
            assert m.ns_m.is_even and m.ns_m.is_unimodular
            assert m.ns_m.signature == (1, 17, 0), pair
            image = [m.zeta_multiple * x for x in mx.matvec(m.n_embed, m.zeta)]
            target = [-int(x) for x in m.side1.canonical] + [int(x) for x in m.side2.canonical]
            assert image == target, pair


COUPLING = [(("P2", "Bl18"), 3), (("P1xP1", "Bl17"), 4)] + [((f"Bl{9 - d}", f"Bl{9 + d}"), d) for d in range(1, 9)]


def test_criterion_4_coupling_index(report):
    with report(4, "full-NS coupling index by degree"):
        for pair, order in COUPLING:
            m = glued(*pair)
            assert coupling_group(m, full_polarisation(m)).order == order, pair
        m = glued("Bl9", "Bl9")
        assert m.degree == 0
        q = phi_cokernel(m)
        assert q.free_rank == 1 and q.invariant_factors == ()


def test_criterion_5_degree_two_instance(report):
    with report(5, "degree-two A17 instance end to end"):
        start = time.perf_counter()
        deg, fib = dht_degeneration("A17"), dht_fibration("A17")
        assert deg.model.degree == 9
        assert [deg.model.ns_m.norm(v) for v in deg.L] == [2]

        split = dht_split("A17")
        v = allowable_check(split)
        assert v.allowable
        assert split.side1.monodromy == [[1, -9], [0, 1]]
        assert build_k3_split_model(split).tags[0] == 9

        ml = mirror_lattice(deg.ambient(), deg.l_ambient())
        assert lattices_isometric(ml.lattice(), standard_lattice("H+E8+E8+A1")) is True

        q2 = named_pair("Bl18")[0]
        roots = deg.roots[2]
        gram = [[q2.pair(u, w) for w in roots] for u in roots]
        assert lattices_isometric(IntLattice.from_gram(gram), standard_lattice("A17")) is True

        rep = check_mirror_pair(deg, fib, "auto")
        assert rep.status == "verified", rep.verdict.clauses
        assert time.perf_counter() - start < 60


def test_criterion_6_negative_controls(report):
    with report(6, "negative controls refuted"):
        rep = check_mirror_pair(dht_degeneration("D16A1"), dht_fibration("D16A1", "component_span"))
        assert rep.status == "refuted"
        assert rep.verdict.clauses["1_Gamma_primitive"] is False
        assert rep.verdict.witnesses["Gamma_embedding"]["index"] == 2

        mismatch = fibration_side(make_split(make_config(["I1", "I1"]), make_config(["I22"])))
        rep = check_mirror_pair(dht_degeneration("A17"), mismatch)
        assert rep.status == "refuted" and rep.verdict.clauses["2_degrees_match"] is False

        res = is_m_admissible([1, 0, 0, 0], standard_lattice("H(2)+H"), 1)
        assert isinstance(res, NotAdmissible) and res.certain and res.status == "refuted"


def test_criterion_7_property_suites(report, pytestconfig):
    with report(7, "randomised property suites (200 seeded cases each)"):
        root = pytestconfig.rootpath
        proc = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(root / "tests" / "test_properties.py")],
            cwd=root,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stdout[-2000:]
