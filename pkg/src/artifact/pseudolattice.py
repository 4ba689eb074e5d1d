"""Pseudolattices, spherical homomorphisms and quasi del Pezzo homomorphisms.

A pseudolattice is a free abelian group with a nondegenerate, possibly
asymmetric, integral bilinear form ``<u, v> = u^T G v``. Homomorphisms are
integer matrices acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Sequence

from . import matrices as mx
from .lattice_core import IntLattice, quotient_data, short_vectors, signature, standard_lattice

E_GRAM = ((0, -1), (1, 0))


@dataclass(frozen=True)
class Pseudolattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        if any(len(r) != len(g) for r in g):
            raise ValueError("Gram matrix must be square")
        if g and mx.det(g) == 0:
            raise ValueError("pseudolattice form must be nondegenerate")

    @classmethod
    def from_gram(cls, gram) -> Pseudolattice:
        return cls(tuple(tuple(r) for r in gram))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.gram]

    @property
    def det(self) -> int:
        return mx.det(self.gram)

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def pair(self, u, v):
        return mx.bilinear(self.gram, u, v)

    def to_json(self) -> dict:
        return {"gram": self.matrix}


@dataclass(frozen=True)
class EBasis:
    """Basis ``(a, b)`` of the elliptic pseudolattice with ``<a, b> = -1``."""

    a: tuple[int, int]
    b: tuple[int, int]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if mx.bilinear(E_GRAM, a, b) != -1:
            raise ValueError("EBasis requires <a, b> = -1")

    @property
    def matrix(self) -> list[list[int]]:
        """Change of basis with columns ``a`` and ``b``."""
        return [[self.a[0], self.b[0]], [self.a[1], self.b[1]]]


STANDARD_BASIS = EBasis((1, 0), (0, 1))


@dataclass(frozen=True)
class PseudoHom:
    source: Pseudolattice
    target: Pseudolattice
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.target.rank or any(len(r) != self.source.rank for r in m):
            raise ValueError("matrix shape does not match source/target ranks")

    @property
    def mat(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    def __call__(self, v):
        return mx.matvec(self.matrix, v)

    def negate(self) -> PseudoHom:
        return PseudoHom(self.source, self.target, mx.scale(-1, self.matrix))

    def to_json(self) -> dict:
        return {"matrix": self.mat, "source": self.source.to_json(), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, data) -> PseudoHom:
        target = Pseudolattice.from_gram(data.get("target", {}).get("gram", E_GRAM))
        return cls(Pseudolattice.from_gram(data["source"]["gram"]), target, tuple(map(tuple, data["matrix"])))


def elliptic_E() -> tuple[Pseudolattice, EBasis]:
    return Pseudolattice.from_gram(E_GRAM), STANDARD_BASIS


def e_pair(u, v) -> int:
    return mx.bilinear(E_GRAM, u, v)


def serre_operator(g: Pseudolattice) -> list[list[int]]:
    """The ``S`` with ``<u1, u2> = <u2, S u1>``, that is ``S = G^{-1} G^T``."""
    if not g.is_unimodular:
        raise ValueError("Serre operator needs a unimodular pseudolattice")
    s = mx.as_int(mx.matmul(mx.inverse(g.gram), mx.transpose(g.gram)))
    assert mx.matmul(mx.transpose(s), mx.transpose(g.gram)) == g.matrix
    return s


def right_adjoint(f: PseudoHom) -> PseudoHom:
    """The ``r`` with ``<f u, v>_H = <u, r v>_G``; ``R = G^{-1} F^T H``."""
    if not f.source.is_unimodular:
        raise ValueError("right adjoint needs a unimodular source")
    r = mx.matmul(mx.matmul(mx.inverse(f.source.gram), mx.transpose(f.matrix)), f.target.gram)
    return PseudoHom(f.target, f.source, tuple(map(tuple, mx.as_int(r))))


def twist(f: PseudoHom) -> list[list[int]]:
    """``T_f = id - f r`` on the target."""
    r = right_adjoint(f)
    return mx.sub(mx.identity(f.target.rank), mx.matmul(f.matrix, r.matrix))


def cotwist(f: PseudoHom) -> list[list[int]]:
    """``C_f = id - r f`` on the source."""
    r = right_adjoint(f)
    return mx.sub(mx.identity(f.source.rank), mx.matmul(r.matrix, f.matrix))


def is_spherical(f: PseudoHom) -> bool:
    return abs(mx.det(twist(f))) == 1 and abs(mx.det(cotwist(f))) == 1


def is_relative_cy(f: PseudoHom) -> bool:
    """Relative (-1)^0-Calabi-Yau: the cotwist equals the Serre operator of the source."""
    return cotwist(f) == serre_operator(f.source)


def z_chain(vs: Sequence[Sequence[int]]) -> tuple[Pseudolattice, PseudoHom]:
    """Pseudolattice with exceptional basis ``z_i`` mapped to the vectors ``v_i`` of E."""
    vs = [tuple(int(x) for x in v) for v in vs]
    if not vs:
        raise ValueError("empty word")
    for v in vs:
        if gcd(*v) != 1:
            raise ValueError(f"vector {v} is not primitive")
    n = len(vs)
    g = [[1 if i == j else (e_pair(vs[i], vs[j]) if i < j else 0) for j in range(n)] for i in range(n)]
    src = Pseudolattice.from_gram(g)
    e, _ = elliptic_E()
    return src, PseudoHom(src, e, tuple(map(tuple, mx.columns(vs))))


def dehn_twist(v: Sequence[int]) -> list[list[int]]:
    """Matrix of ``w -> w - <v, w> v`` on E."""
    cols = []
    for w in ((1, 0), (0, 1)):
        c = e_pair(v, w)
        cols.append([w[0] - c * v[0], w[1] - c * v[1]])
    return mx.transpose(cols)


def word_twist(vs: Sequence[Sequence[int]]) -> list[list[int]]:
    out = mx.identity(2)
    for v in vs:
        out = mx.matmul(out, dehn_twist(v))
    return out


def glue(f1: PseudoHom, f2: PseudoHom, sign2: int = 1) -> tuple[Pseudolattice, PseudoHom]:
    """The glued homomorphism ``f1 ⋊ (sign2 f2)`` on ``G1 ⊕ G2``."""
    if f1.target != f2.target:
        raise ValueError("homomorphisms have different targets")
    if sign2 not in (1, -1):
        raise ValueError("sign2 must be +1 or -1")
    h = f1.target.gram
    n1, n2 = f1.source.rank, f2.source.rank
    f2m = mx.scale(sign2, f2.matrix)
    off = mx.matmul(mx.matmul(mx.transpose(f1.matrix), h), f2m)
    g = mx.zeros(n1 + n2, n1 + n2)
    for i in range(n1):
        for j in range(n1):
            g[i][j] = f1.source.gram[i][j]
        for j in range(n2):
            g[i][n1 + j] = off[i][j]
    for i in range(n2):
        for j in range(n2):
            g[n1 + i][n1 + j] = f2.source.gram[i][j]
    src = Pseudolattice.from_gram(g)
    mat = [list(r1) + list(r2) for r1, r2 in zip(f1.matrix, f2m)]
    return src, PseudoHom(src, f1.target, tuple(map(tuple, mat)))


def change_target_basis(f: PseudoHom, basis: EBasis) -> PseudoHom:
    """Express ``f`` in target coordinates relative to ``basis``."""
    binv = mx.int_inverse(basis.matrix)
    return PseudoHom(f.source, f.target, tuple(map(tuple, mx.matmul(binv, f.matrix))))


# ---------------------------------------------------------------------------
# Surface-like structure


class NotSurfaceLike:
    """Falsy result explaining why a homomorphism is not surface-like."""

    def __init__(self, reason: str):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotSurfaceLike({self.reason!r})"


@dataclass(frozen=True)
class SurfaceLikeData:
    """Point-like vector, Néron-Severi lattice and canonical class.

    ``ns`` carries the form ``q = -<,>`` on ``p^⊥/p``. ``canonical`` and
    ``rb_class`` are in the coordinates given by ``ns_lifts``.
    """

    hom: PseudoHom
    basis: EBasis
    pointlike: tuple[int, ...]
    ns: IntLattice
    canonical: tuple
    rb_class: tuple[int, ...]
    ns_lifts: tuple[tuple[int, ...], ...]
    perp_basis: tuple[tuple[int, ...], ...] = field(repr=False)
    _quot: object = field(repr=False, compare=False)

    @property
    def degree(self):
        return self.ns.pair(self.canonical, self.canonical)

    @property
    def source(self) -> Pseudolattice:
        return self.hom.source

    def rank_of(self, u) -> int:
        """``rank(u) = <u, p>``."""
        return self.source.pair(u, self.pointlike)

    def ns_class(self, u) -> list[int]:
        """Class in NS of a vector of ``p^⊥``."""
        if self.rank_of(u) != 0:
            raise ValueError("vector is not orthogonal to the point-like vector")
        c = mx.int_coordinates(self.perp_basis, u)
        return self._quot.project(c)

    def ns_lift(self, c) -> list[int]:
        out = [0] * self.source.rank
        for ci, l in zip(c, self.ns_lifts):
            if ci:
                out = [x + ci * y for x, y in zip(out, l)]
        return out

    def lam(self, u1, u2) -> list[int]:
        r1, r2 = self.rank_of(u1), self.rank_of(u2)
        return self.ns_class(mx.vsub(mx.vscale(r1, u2), mx.vscale(r2, u1)))

    def k_perp(self) -> list[list[int]]:
        """Basis of ``K^⊥`` in NS coordinates."""
        row = mx.matvec(self.ns.gram, [int(x) for x in self.canonical])
        return mx.hermite_reduce(mx.kernel([row], self.ns.rank))

    def k_perp_lattice(self) -> IntLattice:
        b = self.k_perp()
        return IntLattice.from_gram([[self.ns.pair(u, v) for v in b] for u in b])


def surface_like(f: PseudoHom, basis: EBasis = STANDARD_BASIS) -> SurfaceLikeData | NotSurfaceLike:
    """Surface-like data with point-like vector ``r(a)``, or a reason for failure."""
    g = f.source
    if not g.is_unimodular:
        return NotSurfaceLike("source is not unimodular")
    fb = change_target_basis(f, basis)
    r = right_adjoint(fb)
    t = twist(fb)
    p = [row[0] for row in r.matrix]
    if not any(p):
        return NotSurfaceLike("r(a) = 0")
    if mx.content(p) != 1:
        return NotSurfaceLike("r(a) is not primitive")
    if [t[0][0], t[1][0]] != [1, 0]:
        return NotSurfaceLike("twist does not fix a")
    n = g.rank
    gp = mx.matvec(g.gram, p)
    pg = mx.matvec(mx.transpose(g.gram), p)
    if gp != pg or g.pair(p, p) != 0:
        return NotSurfaceLike("r(a) is not point-like")
    perp = mx.hermite_reduce(mx.kernel([gp], n))
    gperp = [[g.pair(u, v) for v in perp] for u in perp]
    cp = mx.int_coordinates(perp, p)
    quot = quotient_data(gperp, [cp])
    ns_gram = mx.scale(-1, quot.lattice.gram)
    if any(ns_gram[i][j] != ns_gram[j][i] for i in range(len(ns_gram)) for j in range(i)):
        return NotSurfaceLike("form on p^⊥/p is not symmetric")
    ns = IntLattice.from_gram(ns_gram)
    lifts = [mx.matvec(mx.columns(perp), l) for l in quot.lifts]
    partial = SurfaceLikeData(fb, basis, tuple(p), ns, (), (), tuple(map(tuple, lifts)), tuple(map(tuple, perp)), quot)
    # canonical class from <u1,u2> - <u2,u1> = -q(K, λ(u1∧u2))
    rows, rhs = [], []
    e = mx.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            lam = partial.lam(e[i], e[j])
            rows.append(mx.matvec(ns.gram, lam))
            rhs.append(-(g.gram[i][j] - g.gram[j][i]))
    m = ns.rank
    if m == 0:
        k = []
    else:
        sol = mx.solve_rational(rows, rhs)
        if sol is None or mx.rank(rows) != m:
            return NotSurfaceLike("canonical class equation has no unique solution")
        k = [int(x) if x.denominator == 1 else x for x in sol]
    rb = [row[1] for row in r.matrix]
    if partial.rank_of(rb) != 0:
        return NotSurfaceLike("r(b) is not orthogonal to p")
    rb_class = partial.ns_class(rb)
    if rb_class != [-x for x in k]:
        return NotSurfaceLike("[r(b)] differs from -K")
    d = ns.pair(k, k) if m else 0
    if t != [[1, -d], [0, 1]]:
        return NotSurfaceLike(f"twist {t} is not [[1,{-d}],[0,1]]")
    return SurfaceLikeData(fb, basis, tuple(p), ns, tuple(k), tuple(rb_class), tuple(map(tuple, lifts)), tuple(map(tuple, perp)), quot)


# ---------------------------------------------------------------------------
# Anticanonical models


def from_anticanonical_pair(q: IntLattice, k: Sequence[int]) -> PseudoHom:
    """Pseudolattice on ``Z ⊕ NS ⊕ Z`` (rank, class, Euler characteristic) with its map to E."""
    m = q.rank
    qk = mx.matvec(q.gram, k)
    n = m + 2
    g = mx.zeros(n, n)
    g[0][0] = -1
    g[0][n - 1] = 1
    g[n - 1][0] = 1
    for i in range(m):
        g[1 + i][0] = qk[i]
        for j in range(m):
            g[1 + i][1 + j] = -q.gram[i][j]
    frow_a = [0] + [-x for x in qk] + [0]
    frow_b = [1] + [0] * m + [0]
    src = Pseudolattice.from_gram(g)
    e, _ = elliptic_E()
    return PseudoHom(src, e, (tuple(frow_a), tuple(frow_b)))


def anticanonical_pair_from_json(data) -> tuple[IntLattice, list[int]]:
    q = IntLattice.from_json(data["ns"])
    return q, [int(x) for x in data["K"]]


NAMED_PAIRS = {
    "P2": ("I(1,0)", [-3]),
    "P1xP1": ("II(1,1)", [-2, -2]),
}


def blowup_pair(k: int) -> tuple[IntLattice, list[int]]:
    """``Bl_k P^2``: ``I(1,k)`` with ``K = -3h + e_1 + ... + e_k``."""
    return standard_lattice(f"I(1,{k})"), [-3] + [1] * k


def chain_word(n: int) -> list[tuple[int, int]]:
    """The word ``b, 3a+b, 6a+b, a, ..., a`` of length ``n >= 3``."""
    if n < 3:
        raise ValueError("chain models need n >= 3")
    return [(0, 1), (3, 1), (6, 1)] + [(1, 0)] * (n - 3)


QUADRIC_WORD = [(0, 1), (2, 1), (2, 1), (4, 1)]


# ---------------------------------------------------------------------------
# Standard bases of Néron-Severi lattices


def _majorant(q: IntLattice, a: Sequence[int]):
    """Integral positive definite majorant ``2 (Qa)(Qa)^T - a^2 Q`` for ``a^2 > 0``."""
    qa = mx.matvec(q.gram, a)
    a2 = q.pair(a, a)
    n = q.rank
    return [[2 * qa[i] * qa[j] - a2 * q.gram[i][j] for j in range(n)] for i in range(n)], a2


def exceptional_classes(q: IntLattice, k: Sequence[int], positive: Sequence[int], max_degree: int) -> list[list[int]]:
    """Classes ``x`` with ``x^2 = -1``, ``K.x = -1`` and ``0 <= x.A <= max_degree``."""
    maj, a2 = _majorant(q, positive)
    bound = 2 * max_degree * max_degree + a2
    out = []
    for x in short_vectors(maj, bound):
        if q.pair(x, x) == -1 and q.pair(x, k) == -1 and 0 <= q.pair(x, positive) <= max_degree:
            out.append(x)
    out.sort(key=lambda x: (q.pair(x, positive), [abs(t) for t in x], x))
    return out


def _restrict(q: IntLattice, basis: list[list[int]]) -> IntLattice:
    return IntLattice.from_gram([[q.pair(u, v) for v in basis] for u in basis])


@dataclass(frozen=True)
class StandardBasis:
    """A basis of NS adapted to the canonical class.

    ``kind`` is ``"chain"`` (vectors ``h, e_1..e_k`` with ``K = -3h + Σ e_i``)
    or ``"quadric"`` (isotropic ``f1, f2`` with ``K = -2 f1 - 2 f2``).
    """

    kind: str
    vectors: tuple[tuple[int, ...], ...]


def _check_standard(q: IntLattice, k, kind, vecs) -> bool:
    m = q.rank
    if len(vecs) != m:
        return False
    if abs(mx.det(mx.columns(vecs))) != 1:
        return False
    if kind == "chain":
        want = [[(1 if i == 0 else -1) if i == j else 0 for j in range(m)] for i in range(m)]
        combo = [-3 * x for x in vecs[0]]
        for e in vecs[1:]:
            combo = mx.vadd(combo, e)
    else:
        want = [[0, 1], [1, 0]]
        combo = mx.vadd(mx.vscale(-2, vecs[0]), mx.vscale(-2, vecs[1]))
    gram = [[q.pair(u, v) for v in vecs] for u in vecs]
    return gram == want and combo == list(k)


def standard_ns_basis(q: IntLattice, k: Sequence[int], seeds: Sequence[Sequence[int]] = (), max_degree: int = 6) -> StandardBasis | None:
    """Find a chain or quadric basis of ``(NS, K)``.

    ``seeds`` are known exceptional classes; pairwise orthogonal ones are blown
    down first. For the remaining lattice with ``K^2 > 0`` the exceptional
    classes are finite and are enumerated. When ``K^2 <= 0`` remains after the
    seeds, exceptional classes of bounded degree against an auxiliary positive
    class are tried. Returns None if nothing is found.
    """
    k = [int(x) for x in k]
    m = q.rank
    if m == 0:
        return None
    kk = q.pair(k, k)
    if m == 1:
        if all(x % 3 == 0 for x in k):
            h = [-x // 3 for x in k]
            if q.pair(h, h) == 1:
                return StandardBasis("chain", (tuple(h),))
        return None
    if m == 2 and q.is_even:
        if kk != 8:
            return None
        a = [-x for x in k]
        maj, a2 = _majorant(q, a)
        cands = [x for x in short_vectors(maj, 2 * 4 * 1 + 0) if q.pair(x, x) == 0 and q.pair(x, k) == -2]
        cands.sort()
        for f1 in cands:
            f2 = [(-x - 2 * y) // 2 for x, y in zip(k, f1)]
            if all((-x - 2 * y) % 2 == 0 for x, y in zip(k, f1)) and _check_standard(q, k, "quadric", [f1, f2]):
                return StandardBasis("quadric", (tuple(f1), tuple(f2)))
        return None
    # blow down pairwise orthogonal seeds
    chosen: list[list[int]] = []
    for s in seeds:
        s = [int(x) for x in s]
        if q.pair(s, s) != -1 or q.pair(s, k) != -1:
            continue
        if any(q.pair(s, c) != 0 for c in chosen):
            continue
        if len(chosen) + 1 > m - 1:
            break
        chosen.append(s)
    if kk + len(chosen) > 9:
        chosen = chosen[: 9 - kk]
    # keep at least one class back when the residue would be a rank-2 lattice
    if chosen and m - len(chosen) == 2:
        chosen = chosen[:-1]
    if chosen:
        rest = _complement_basis(q, chosen)
        if rest is None:
            return None
        qr = _restrict(q, rest)
        kr_full = list(k)
        for c in chosen:
            kr_full = mx.vsub(kr_full, c)
        kr = mx.int_coordinates(rest, kr_full)
        if kr is None:
            return None
        sub = standard_ns_basis(qr, kr, (), max_degree)
        if sub is not None and sub.kind == "chain":
            vecs = [mx.matvec(mx.columns(rest), v) for v in sub.vectors] + chosen
            if _check_standard(q, k, "chain", vecs):
                return StandardBasis("chain", tuple(map(tuple, vecs)))
        if sub is None and kk + len(chosen) > 0:
            return None
        if sub is not None and sub.kind == "quadric":
            # the quadric residue absorbs one more exceptional class
            return standard_ns_basis(q, k, chosen[:-1], max_degree)
    if kk > 0:
        return _enumerate_chain_basis(q, k)
    return _search_indefinite(q, k, max_degree)


def _complement_basis(q: IntLattice, vecs: list[list[int]]) -> list[list[int]] | None:
    rows = [mx.matvec(q.gram, v) for v in vecs]
    ker = mx.hermite_reduce(mx.kernel(rows, q.rank))
    # unimodular summand check: vecs ⊕ complement must be all of NS
    allv = vecs + ker
    if abs(mx.det(mx.columns(allv))) != 1:
        return None
    return ker


def _enumerate_chain_basis(q: IntLattice, k: list[int]) -> StandardBasis | None:
    m = q.rank
    need = m - 1
    a = [-x for x in k]
    excs = exceptional_classes(q, k, a, 1)
    excs = [x for x in excs if q.pair(x, a) == 1]
    chosen: list[list[int]] = []

    def rec(start):
        if len(chosen) == need:
            total = [-x for x in k]
            for e in chosen:
                total = mx.vadd(total, e)
            if any(x % 3 for x in total):
                return None
            h = [x // 3 for x in total]
            vecs = [h] + list(chosen)
            if _check_standard(q, k, "chain", vecs):
                return StandardBasis("chain", tuple(map(tuple, vecs)))
            return None
        for idx in range(start, len(excs)):
            x = excs[idx]
            if all(q.pair(x, c) == 0 for c in chosen):
                chosen.append(x)
                res = rec(idx + 1)
                if res is not None:
                    return res
                chosen.pop()
        return None

    return rec(0)


def _positive_class(q: IntLattice) -> list[int] | None:
    m = q.rank
    best = None
    for coeffs in product(range(-2, 3), repeat=min(m, 4)):
        v = list(coeffs) + [0] * (m - len(coeffs))
        n = q.pair(v, v)
        if n > 0 and (best is None or n < best[0]):
            best = (n, v)
    if best is None:
        for i in range(m):
            for j in range(m):
                v = [0] * m
                v[i] += 1
                v[j] += 1
                if q.pair(v, v) > 0:
                    return v
        return None
    return best[1]


def _search_indefinite(q: IntLattice, k: list[int], max_degree: int) -> StandardBasis | None:
    a = _positive_class(q)
    if a is None:
        return None
    for deg in range(0, max_degree + 1):
        excs = [x for x in exceptional_classes(q, k, a, deg) if q.pair(x, a) == deg]
        for x in excs[:8]:
            res = standard_ns_basis(q, k, [x], max_degree)
            if res is not None:
                return res
    return None


# ---------------------------------------------------------------------------
# Quasi del Pezzo homomorphisms


@dataclass(frozen=True)
class QdpCertificate:
    """Outcome of the quasi del Pezzo test with its certificate.

    ``to_canonical`` maps the source onto the canonical model's exceptional
    basis coordinates; ``euler_coordinates`` maps it onto ``Z ⊕ NS ⊕ Z``.
    """

    ok: bool
    reason: str
    basis: EBasis | None = None
    data: SurfaceLikeData | None = None
    model: str | None = None
    n: int | None = None
    degree: object = None
    standard: StandardBasis | None = None
    structure_sheaf: tuple[int, ...] | None = None
    euler_coordinates: tuple[tuple[int, ...], ...] | None = None
    to_canonical: tuple[tuple[int, ...], ...] | None = None

    def __bool__(self):
        return self.ok

    @property
    def hom(self) -> PseudoHom | None:
        return self.data.hom if self.data else None

    def tag(self) -> dict:
        if not self.ok:
            return {"model": None}
        if self.model == "Quadric":
            return {"model": "Quadric", "n": 4, "degree": "8'"}
        return {"model": "Chain", "n": self.n, "degree": self.degree}


def _basis_candidates(t: list[list[int]], height: int = 12) -> list[EBasis]:
    out = []
    ident = mx.identity(2)
    if t == ident:
        avecs = []
        for h in range(1, height + 1):
            for x in range(-h, h + 1):
                for y in range(-h, h + 1):
                    if max(abs(x), abs(y)) == h and gcd(x, y) == 1:
                        avecs.append((x, y))
        avecs = [(1, 0), (-1, 0), (0, 1), (0, -1)] + [v for v in avecs if abs(v[0]) + abs(v[1]) > 1]
    elif t == mx.scale(-1, ident):
        return []
    else:
        ker = mx.kernel(mx.sub(t, ident), 2)
        if len(ker) != 1:
            return []
        a0 = tuple(ker[0])
        if a0[0] < 0 or (a0[0] == 0 and a0[1] < 0):
            a0 = (-a0[0], -a0[1])
        avecs = [a0, (-a0[0], -a0[1])]
    for a in avecs:
        base = complete_basis(a)
        # b is only determined up to multiples of a; the divisibility of K is at most 3
        for shift in (0, 1, -1):
            out.append(EBasis(base.a, (base.b[0] + shift * base.a[0], base.b[1] + shift * base.a[1])))
    return out


def complete_basis(a: Sequence[int]) -> EBasis:
    """Shortest ``b`` with ``<a, b> = -1`` (max-norm, then l1-norm, then larger entries)."""
    a0, a1 = int(a[0]), int(a[1])
    # need a0*b1 - a1*b0 = 1
    sol = mx.solve_integer([[-a1, a0]], [1])
    if sol is None:
        raise ValueError("vector is not primitive")
    b = sol
    best = None
    for t in range(-50, 51):
        cand = (b[0] + t * a0, b[1] + t * a1)
        key = (max(abs(cand[0]), abs(cand[1])), abs(cand[0]) + abs(cand[1]), (-cand[0], -cand[1]))
        if best is None or key < best[0]:
            best = (key, cand)
    return EBasis((a0, a1), best[1])


def _structure_sheaf(data: SurfaceLikeData) -> list[int] | None:
    """A rank-one element ``o`` with ``<o,o> = 1`` and ``f(o) = b``."""
    g = data.source
    p = list(data.pointlike)
    gp = mx.matvec(mx.transpose(g.gram), p)
    o0 = mx.solve_integer([gp], [1])
    if o0 is None:
        return None
    fo = data.hom(o0)
    if fo[1] != 1:
        return None
    alpha = fo[0]
    k = [int(x) for x in data.canonical]
    qk = mx.matvec(data.ns.gram, k) if k else []
    if alpha != 0:
        c = mx.solve_integer([qk], [alpha]) if qk else None
        if c is None:
            return None
        o1 = mx.vadd(o0, data.ns_lift(c))
    else:
        o1 = list(o0)
    if g.pair(o1, o1) % 2 == 0:
        fixed = None
        kperp = data.k_perp()
        cands = list(kperp) + [mx.vadd(u, v) for i, u in enumerate(kperp) for v in kperp[i + 1 :]]
        for c in cands:
            w = data.ns_lift(c)
            o2 = mx.vadd(o1, w)
            if g.pair(o2, o2) % 2 == 1:
                fixed = o2
                break
        if fixed is None:
            return None
        o1 = fixed
    t = (1 - g.pair(o1, o1)) // 2
    o = mx.vadd(o1, mx.vscale(t, p))
    if g.pair(o, o) != 1 or data.hom(o) != [0, 1] or data.rank_of(o) != 1:
        return None
    return o


def euler_coordinates(data: SurfaceLikeData, o: Sequence[int]) -> list[list[int]]:
    """Matrix of ``u -> (rank u, [u - rank(u) o], <o, u>)``."""
    g = data.source
    cols = []
    for u in mx.identity(g.rank):
        r = data.rank_of(u)
        c = data.ns_class(mx.vsub(u, mx.vscale(r, o)))
        cols.append([r] + c + [g.pair(o, u)])
    return mx.columns(cols)


def canonical_model_matrix(kind: str, m: int) -> list[list[int]]:
    """Columns: the canonical exceptional basis in ``Z ⊕ NS_std ⊕ Z`` coordinates."""
    n = m + 2
    cols = []
    if kind == "chain":
        h = [1] + [0] * (m - 1)
        for j, chi in ((0, 1), (1, 3), (2, 6)):
            cols.append([1] + [j * x for x in h] + [chi])
        for i in range(1, m):
            e = [0] * m
            e[i] = 1
            cols.append([0] + e + [1])
    else:
        cols = [[1, 0, 0, 1], [1, 1, 0, 2], [1, 0, 1, 2], [1, 1, 1, 4]]
    assert all(len(c) == n for c in cols)
    return mx.columns(cols)


def canonical_model(kind: str, n: int) -> tuple[Pseudolattice, PseudoHom]:
    if kind == "chain":
        return z_chain(chain_word(n))
    return z_chain(QUADRIC_WORD)


def is_quasi_del_pezzo(f: PseudoHom) -> QdpCertificate:
    """Decide the quasi del Pezzo conditions and certify them.

    The exceptional basis condition is certified by an explicit isomorphism
    onto the canonical chain or quadric model.
    """
    if f.target.matrix != [list(r) for r in E_GRAM]:
        return QdpCertificate(False, "target is not the elliptic pseudolattice")
    g = f.source
    n = g.rank
    if n < 3:
        return QdpCertificate(False, "rank below 3")
    if not g.is_unimodular:
        return QdpCertificate(False, "source is not unimodular")
    if not is_relative_cy(f):
        return QdpCertificate(False, "cotwist differs from the Serre operator")
    t = twist(f)
    reasons = []
    for basis in _basis_candidates(t):
        data = surface_like(f, basis)
        if not data:
            reasons.append(data.reason)
            continue
        pos, neg, null = signature(data.ns)
        if (pos, neg, null) != (1, n - 3, 0):
            reasons.append(f"NS signature {(pos, neg, null)}")
            continue
        cert = _certify(data, n)
        if cert is not None:
            return cert
        reasons.append("no isomorphism to a canonical model found")
    return QdpCertificate(False, "; ".join(dict.fromkeys(reasons)) or "no admissible basis of E")


def _seed_classes(data: SurfaceLikeData) -> list[list[int]]:
    g = data.source
    seeds = []
    for j, u in enumerate(mx.identity(g.rank)):
        if g.gram[j][j] != 1:
            continue
        fu = data.hom(u)
        if fu[1] != 0 or abs(fu[0]) != 1:
            continue
        v = u if fu[0] == 1 else mx.vscale(-1, u)
        seeds.append(data.ns_class(v))
    return seeds


def _certify(data: SurfaceLikeData, n: int) -> QdpCertificate | None:
    k = [int(x) for x in data.canonical]
    if any(Fraction(x).denominator != 1 for x in data.canonical):
        return None
    std = standard_ns_basis(data.ns, k, _seed_classes(data))
    if std is None:
        return None
    o = _structure_sheaf(data)
    if o is None:
        return None
    phi = euler_coordinates(data, o)
    m = data.ns.rank
    # NS coordinates -> standard coordinates
    pstd = mx.int_inverse(mx.columns(std.vectors))
    big = mx.block_diag([[1]], pstd, [[1]])
    model_cols = canonical_model_matrix(std.kind, m)
    to_can = mx.matmul(mx.int_inverse(model_cols), mx.matmul(big, phi))
    can_g, can_f = canonical_model(std.kind, n)
    # verify: isometry and compatibility with the maps to E
    if mx.matmul(mx.matmul(mx.transpose(to_can), can_g.gram), to_can) != g_matrix(data.source):
        return None
    if mx.matmul(can_f.matrix, to_can) != data.hom.mat:
        return None
    kind = "Chain" if std.kind == "chain" else "Quadric"
    degree = data.degree
    if kind == "Quadric":
        degree = "8'"
    return QdpCertificate(
        True,
        "quasi del Pezzo",
        basis=data.basis,
        data=data,
        model=kind,
        n=n,
        degree=degree,
        standard=std,
        structure_sheaf=tuple(o),
        euler_coordinates=tuple(map(tuple, phi)),
        to_canonical=tuple(map(tuple, to_can)),
    )


def g_matrix(g: Pseudolattice) -> list[list[int]]:
    return g.matrix


def classify_qdp(f: PseudoHom) -> dict:
    """Canonical form tag, e.g. ``{"model": "Chain", "n": 3, "degree": 9}``."""
    cert = is_quasi_del_pezzo(f)
    if not cert:
        raise ValueError(f"not quasi del Pezzo: {cert.reason}")
    return cert.tag()


@dataclass(frozen=True)
class QdpIsomorphism:
    psi: tuple[tuple[int, ...], ...]
    phi: tuple[tuple[int, ...], ...]


def qdp_isomorphism(f1: PseudoHom, f2: PseudoHom) -> QdpIsomorphism | None:
    """Isomorphism ``(ψ, φ)`` with ``φ f1 = f2 ψ``, or None when the models differ."""
    c1, c2 = is_quasi_del_pezzo(f1), is_quasi_del_pezzo(f2)
    if not c1 or not c2:
        raise ValueError("both homomorphisms must be quasi del Pezzo")
    if c1.tag() != c2.tag():
        return None
    psi = mx.matmul(mx.int_inverse(c2.to_canonical), c1.to_canonical)
    phi = mx.matmul(c2.basis.matrix, mx.int_inverse(c1.basis.matrix))
    _verify_iso(f1, f2, psi, phi)
    return QdpIsomorphism(tuple(map(tuple, psi)), tuple(map(tuple, phi)))


def isomorphism_from_ns_isometry(c1: QdpCertificate, c2: QdpCertificate, p: Sequence[Sequence[int]]) -> QdpIsomorphism:
    """Lift an NS isometry fixing the canonical classes to the pseudolattices.

    ``p`` maps NS coordinates of the first certificate to those of the second.
    The lift is the block matrix ``diag(1, p, 1)`` in Euler coordinates.
    """
    q1, q2 = c1.data.ns, c2.data.ns
    p = [list(r) for r in p]
    if mx.matmul(mx.matmul(mx.transpose(p), q2.gram), p) != q1.matrix:
        raise ValueError("matrix is not an isometry of the NS lattices")
    if mx.matvec(p, [int(x) for x in c1.data.canonical]) != [int(x) for x in c2.data.canonical]:
        raise ValueError("isometry does not fix the canonical class")
    big = mx.block_diag([[1]], p, [[1]])
    psi = mx.matmul(mx.int_inverse(c2.euler_coordinates), mx.matmul(big, c1.euler_coordinates))
    phi = mx.matmul(c2.basis.matrix, mx.int_inverse(c1.basis.matrix))
    f1 = PseudoHom(c1.data.source, c1.data.hom.target, tuple(map(tuple, mx.matmul(c1.basis.matrix, c1.data.hom.mat))))
    f2 = PseudoHom(c2.data.source, c2.data.hom.target, tuple(map(tuple, mx.matmul(c2.basis.matrix, c2.data.hom.mat))))
    _verify_iso(f1, f2, psi, phi)
    return QdpIsomorphism(tuple(map(tuple, psi)), tuple(map(tuple, phi)))


def _verify_iso(f1: PseudoHom, f2: PseudoHom, psi, phi) -> None:
    if mx.matmul(mx.matmul(mx.transpose(psi), f2.source.gram), psi) != f1.source.matrix:
        raise AssertionError("ψ is not an isometry")
    if mx.matmul(phi, f1.mat) != mx.matmul(f2.mat, psi):
        raise AssertionError("φ f1 differs from f2 ψ")
    if mx.matmul(mx.matmul(mx.transpose(phi), f2.target.gram), phi) != f1.target.matrix:
        raise AssertionError("φ is not an isometry of E")
