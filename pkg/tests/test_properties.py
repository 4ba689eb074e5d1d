"""Randomised identities, 200 seeded examples each."""

from __future__ import annotations

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from artifact import matrices as mx
from artifact.lattice_core import IntLattice, Sublattice, orthogonal_complement, saturate
from artifact.pseudolattice import (
    chain_word,
    dehn_twist,
    word_twist,
    e_pair,
    glue,
    is_quasi_del_pezzo,
    right_adjoint,
    surface_like,
    twist,
    z_chain,
)
from artifact.tyurin import (
    coupling_torsion_equivalence,
    lattice_polarisation,
    lift_polarisation,
    project_polarisation,
)
from artifact.mirror import named_pair
from artifact.tyurin import as_qdp

from conftest import glued

N = 200

primitive_vectors = st.tuples(st.integers(-4, 4), st.integers(-4, 4)).filter(lambda v: mx.content(list(v)) == 1)
words = st.lists(primitive_vectors, min_size=1, max_size=6)
small_ints = st.integers(-3, 3)


def vectors(n):
    return st.lists(small_ints, min_size=n, max_size=n)


def int_matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# Adjunction ------------------------------------------------------------------


@settings(max_examples=N)
@given(words, st.data())
def test_adjunction_on_chains(word, data):
    _, f = z_chain(word)
    r = right_adjoint(f)
    u = data.draw(vectors(f.source.rank))
    v = data.draw(vectors(2))
    assert e_pair(f(u), v) == f.source.pair(u, r(v))


@settings(max_examples=N)
@given(words, words, st.sampled_from([1, -1]), st.data())
def test_adjunction_on_glued(w1, w2, sign, data):
    _, f1 = z_chain(w1)
    _, f2 = z_chain(w2)
    _, f = glue(f1, f2, sign)
    r = right_adjoint(f)
    u = data.draw(vectors(f.source.rank))
    v = data.draw(vectors(2))
    assert e_pair(f(u), v) == f.source.pair(u, r(v))


# Twist multiplicativity ---------------------------------------------------------


@settings(max_examples=N)
@given(words, words)
def test_twist_of_glue_is_product(w1, w2):
    _, f1 = z_chain(w1)
    _, f2 = z_chain(w2)
    _, f = glue(f1, f2, 1)
    assert twist(f) == mx.matmul(twist(f1), twist(f2))


@settings(max_examples=N)
@given(words, words)
def test_twist_of_glue_with_negated_factor(w1, w2):
    _, f1 = z_chain(w1)
    _, f2 = z_chain(w2)
    _, f = glue(f1, f2, -1)
    assert twist(f) == mx.matmul(twist(f1), twist(f2.negate()))
    assert twist(f2.negate()) == twist(f2)


# Canonical-class equation -------------------------------------------------------

SURFACES = ["P2", "P1xP1", "Bl1", "Bl4", "Bl9", "Bl12", "Bl18"]


def _surface_data(name):
    cert = is_quasi_del_pezzo(as_qdp(named_pair(name)))
    return cert.data


_DATA = {}


def surface_data(name):
    if name not in _DATA:
        _DATA[name] = _surface_data(name)
    return _DATA[name]


@settings(max_examples=N)
@given(st.sampled_from(SURFACES), st.data())
def test_canonical_class_equation(name, data):
    d = surface_data(name)
    n = d.source.rank
    u1 = data.draw(vectors(n))
    u2 = data.draw(vectors(n))
    g = d.source
    lhs = g.pair(u1, u2) - g.pair(u2, u1)
    rhs = -d.ns.pair(d.canonical, d.lam(u1, u2))
    assert lhs == rhs


def braided_chain(n, moves):
    """A chain word moved by Hurwitz moves, which keep the twist and surface-like structure."""
    word = [list(v) for v in chain_word(n)]
    for i, flip in moves:
        i %= n - 1
        v, w = word[i], word[i + 1]
        word[i], word[i + 1] = mx.matvec(dehn_twist(v), w), v
        if flip:
            word[i] = [-x for x in word[i]]
    return word


@settings(max_examples=N)
@given(st.integers(3, 14), st.lists(st.tuples(st.integers(0, 20), st.booleans()), max_size=6), st.data())
def test_canonical_class_equation_on_braided_chains(n, moves, data):
    word = braided_chain(n, moves)
    _, f = z_chain(word)
    assert word_twist(word) == word_twist(chain_word(n))
    d = surface_like(f)
    assert not hasattr(d, "reason"), d
    size = d.source.rank
    u1 = data.draw(vectors(size))
    u2 = data.draw(vectors(size))
    lhs = d.source.pair(u1, u2) - d.source.pair(u2, u1)
    assert lhs == -d.ns.pair(d.canonical, d.lam(u1, u2))
    assert d.degree == 12 - n


# Smith normal form --------------------------------------------------------------


@settings(max_examples=N)
@given(int_matrices())
def test_snf_round_trip(a):
    u, d, v = mx.smith_normal_form(a)
    assert abs(mx.det(u)) == 1 and abs(mx.det(v)) == 1
    assert mx.matmul(mx.matmul(u, a), v) == d
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert all(nonzero[i + 1] % nonzero[i] == 0 for i in range(len(nonzero) - 1))
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)


@settings(max_examples=N)
@given(int_matrices())
def test_snf_agrees_with_sympy(a):
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form

    ours = [x for x in mx.smith_diagonal(a) if x]
    s = smith_normal_form(Matrix(a), domain=ZZ)
    theirs = [abs(int(s[i, i])) for i in range(min(s.shape)) if s[i, i] != 0]
    assert ours == theirs


# Complement and saturation ------------------------------------------------------

GRAMS = [
    IntLattice.from_gram([[2, 1, 0, 0], [1, -2, 0, 0], [0, 0, -2, 1], [0, 0, 1, -4]]),
    IntLattice.from_gram([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, 0], [0, 0, 0, 6]]),
    IntLattice.from_gram([[-2, 1, 0, 0], [1, -2, 1, 0], [0, 1, -2, 1], [0, 0, 1, -2]]),
]


@settings(max_examples=N)
@given(st.sampled_from(range(len(GRAMS))), st.lists(vectors(4), min_size=1, max_size=3))
def test_complement_and_saturation_idempotent(idx, vecs):
    lat = GRAMS[idx]
    vecs = [v for v in vecs if any(v)]
    assume(vecs)
    sub = Sublattice.spanned_by(lat, vecs)
    sat = saturate(sub)
    assert saturate(sat).same_as(sat)
    assert sat.contains_sublattice(sub)
    perp = orthogonal_complement(sub)
    assert perp.same_as(orthogonal_complement(sat))
    assert saturate(perp).same_as(perp)
    # for nondegenerate lattices the double complement is the saturation
    assert orthogonal_complement(perp).same_as(sat)


# Lift / project ---------------------------------------------------------------


def _primitive(vecs, n):
    vecs = [v for v in vecs if any(v)]
    return mx.saturation(vecs, n) if vecs else []


@settings(max_examples=N)
@given(st.lists(vectors(18), max_size=3))
def test_lift_project_round_trip_degree_nine(vecs):
    model = glued("P2", "Bl18")
    basis = _primitive(vecs, 18)
    pol = lattice_polarisation(model, basis)
    lifted = lift_polarisation(model, pol)
    assert lifted.sub.contains(list(model.zeta))
    back = project_polarisation(model, lifted)
    assert Sublattice(model.ns_m, tuple(map(tuple, back.basis))).same_as(pol.sub)
    assert lifted.rank == pol.rank + 1


# Torsion equivalence ----------------------------------------------------------


@settings(max_examples=N)
@given(st.sampled_from([("P2", "Bl18"), ("Bl8", "Bl10"), ("Bl6", "Bl12")]), st.lists(vectors(18), max_size=3))
def test_coupling_torsion_equivalence(pair, vecs):
    model = glued(*pair)
    pol = lattice_polarisation(model, _primitive(vecs, 18))
    res = coupling_torsion_equivalence(model, pol)
    assert res["torsion"] == res["complements_agree"]
