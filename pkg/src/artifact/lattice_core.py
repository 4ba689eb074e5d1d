"""Symmetric integral lattices.

Exact normal forms, discriminant groups, orthogonal complements, saturation,
standard lattices, root systems and an isometry search for definite lattices.
All arithmetic is over Python integers and ``Fraction``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Sequence

from . import matrices as mx
from .matrices import smith_normal_form

__all__ = [
    "IntLattice",
    "Sublattice",
    "DiscGroup",
    "SearchBudgetExceeded",
    "smith_normal_form",
    "standard_lattice",
    "signature",
    "disc_group",
    "orthogonal_complement",
    "saturate",
    "is_primitive",
    "quotient_by_radical_part",
    "definite_isometry",
    "positive_roots",
    "simple_roots",
    "short_vectors",
    "lll_reduce",
]

DEFAULT_TIE_BREAK = 10**6


class SearchBudgetExceeded(RuntimeError):
    """Raised when a bounded search gives up before reaching a certified answer."""


@dataclass(frozen=True)
class IntLattice:
    """Free abelian group with a symmetric integral Gram matrix.

    Degenerate Gram matrices are allowed; :attr:`radical_rank` reports the
    dimension of the radical.
    """

    gram: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("one label per basis vector expected")

    @classmethod
    def from_gram(cls, gram: Sequence[Sequence[int]], labels=None) -> IntLattice:
        return cls(tuple(tuple(r) for r in gram), tuple(labels) if labels else None)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.gram]

    def pair(self, u: Sequence, v: Sequence):
        return mx.bilinear(self.gram, u, v)

    def norm(self, u: Sequence):
        return self.pair(u, u)

    @property
    def det(self) -> int:
        return mx.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @property
    def is_degenerate(self) -> bool:
        return self.rank > 0 and self.det == 0

    @property
    def radical_rank(self) -> int:
        return self.rank - mx.rank(self.gram) if self.rank else 0

    def radical(self) -> list[list[int]]:
        return mx.kernel(self.matrix, self.rank)

    @property
    def signature(self) -> tuple[int, int, int]:
        return signature(self)

    def is_definite(self) -> bool:
        p, n, z = self.signature
        return z == 0 and (p == 0 or n == 0)

    def negate(self) -> IntLattice:
        return IntLattice.from_gram(mx.scale(-1, self.gram), self.labels)

    def __add__(self, other: IntLattice) -> IntLattice:
        return direct_sum(self, other)

    def to_json(self) -> dict:
        out = {"gram": self.matrix}
        if self.labels:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data) -> IntLattice:
        if isinstance(data, str):
            return standard_lattice(data)
        if "name" in data:
            return standard_lattice(data["name"])
        return cls.from_gram(data["gram"], data.get("labels"))


def direct_sum(*lattices: IntLattice) -> IntLattice:
    gram = mx.block_diag(*[l.gram for l in lattices])
    labels = None
    if all(l.labels for l in lattices):
        labels = [x for l in lattices for x in l.labels]
    return IntLattice.from_gram(gram, labels)


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of an :class:`IntLattice` spanned by independent generators.

    ``basis`` holds the generators as ambient coordinate vectors; the matrix
    with these as columns is :attr:`matrix`.
    """

    ambient: IntLattice
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        b = tuple(tuple(int(x) for x in v) for v in self.basis)
        object.__setattr__(self, "basis", b)
        if any(len(v) != self.ambient.rank for v in b):
            raise ValueError("generator length differs from ambient rank")
        if b and mx.rank(b) != len(b):
            raise ValueError("generators must be linearly independent")

    @classmethod
    def spanned_by(cls, ambient: IntLattice, vectors: Iterable[Sequence[int]]) -> Sublattice:
        """Sublattice generated by arbitrary (possibly dependent) vectors."""
        vecs = [list(v) for v in vectors if any(v)]
        return cls(ambient, tuple(tuple(v) for v in mx.hermite_reduce(vecs)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> list[list[int]]:
        return mx.columns(self.basis, self.ambient.rank)

    def lattice(self) -> IntLattice:
        """The sublattice with its induced form."""
        g = [[self.ambient.pair(u, v) for v in self.basis] for u in self.basis]
        return IntLattice.from_gram(g)

    def contains(self, v: Sequence[int]) -> bool:
        return mx.int_coordinates(self.basis, v) is not None

    def contains_sublattice(self, other: Sublattice) -> bool:
        return all(self.contains(v) for v in other.basis)

    def same_as(self, other: Sublattice) -> bool:
        return self.rank == other.rank and self.contains_sublattice(other) and other.contains_sublattice(self)

    def coordinates(self, v: Sequence[int]) -> list[int]:
        c = mx.int_coordinates(self.basis, v)
        if c is None:
            raise ValueError("vector does not lie in the sublattice")
        return c

    def index_in(self, other: Sublattice) -> int | None:
        """Index ``[other : self]`` when self ⊂ other have equal rank, else None."""
        if self.rank != other.rank or not other.contains_sublattice(self):
            return None
        coords = [other.coordinates(v) for v in self.basis]
        return abs(mx.det(coords)) if coords else 1


@dataclass(frozen=True)
class DiscGroup:
    """Discriminant group ``L*/L`` with its quadratic form.

    ``qvalues`` are the values ``q(g)`` of the generators taken modulo 2; when
    ``odd`` is set only their class modulo 1 is meaningful.
    """

    invariant_factors: tuple[int, ...]
    qvalues: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, ...], ...]
    bvalues: tuple[tuple[Fraction, ...], ...]
    odd: bool

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def modulus(self) -> int:
        return 1 if self.odd else 2

    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def cyclic_generator_values(self) -> set[Fraction]:
        """All values of ``q`` on generators of a cyclic group (mod the modulus)."""
        if not self.invariant_factors:
            return set()
        if not self.is_cyclic():
            raise ValueError("group is not cyclic")
        m = self.invariant_factors[0]
        q = self.qvalues[0]
        return {(k * k * q) % self.modulus for k in range(1, m) if gcd(k, m) == 1}

    def has_cyclic_generator_with_value(self, value: Fraction, modulus: int) -> bool:
        """Whether some generator of the cyclic group has ``q = value`` modulo ``modulus``."""
        if not self.invariant_factors:
            return False
        m = self.invariant_factors[0]
        q = self.qvalues[0]
        value = Fraction(value)
        return any(((k * k * q) - value) % modulus == 0 for k in range(1, m) if gcd(k, m) == 1)

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*[range(d) for d in self.invariant_factors]))

    def q_of(self, coeffs: Sequence[int]) -> Fraction:
        """Quadratic value of ``sum coeffs[i] g_i`` modulo the modulus."""
        total = Fraction(0)
        k = len(coeffs)
        for i in range(k):
            total += coeffs[i] * coeffs[i] * self.qvalues[i]
            for j in range(i + 1, k):
                total += 2 * coeffs[i] * coeffs[j] * self.bvalues[i][j]
        return total % self.modulus

    def is_isomorphic(self, other: DiscGroup) -> bool:
        """Brute-force isomorphism test of finite quadratic forms (small groups)."""
        if self.invariant_factors != other.invariant_factors or self.odd != other.odd:
            return False
        if not self.invariant_factors:
            return True
        if self.order > 4096:
            raise SearchBudgetExceeded("discriminant group too large for brute force")
        elems = other.elements()
        mods = self.invariant_factors
        k = len(mods)

        def order_of(c):
            o = 1
            for ci, d in zip(c, mods):
                if ci:
                    o = o * (d // gcd(ci, d)) // gcd(o, d // gcd(ci, d))
            return o

        def bform(grp, c1, c2):
            t = Fraction(0)
            for i in range(k):
                for j in range(k):
                    t += c1[i] * c2[j] * grp.bvalues[i][j]
            return t % 1

        images: list = []

        def rec(i):
            if i == k:
                return True
            for c in elems:
                if order_of(c) != mods[i]:
                    continue
                if other.q_of(c) != self.qvalues[i] % self.modulus:
                    continue
                if any(bform(other, c, images[j]) != self.bvalues[i][j] % 1 for j in range(i)):
                    continue
                images.append(c)
                if rec(i + 1):
                    return True
                images.pop()
            return False

        # generators mapped with matching orders and forms give an isometric embedding;
        # equal orders then force an isomorphism
        return rec(0) and _images_generate(images, mods)

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "qvalues": [str(q) for q in self.qvalues],
            "odd": self.odd,
        }


def _images_generate(images, mods) -> bool:
    order = 1
    for d in mods:
        order *= d
    return _subgroup_order(images, mods) == order


def _subgroup_order(images, mods) -> int:
    seen = {tuple([0] * len(mods))}
    frontier = list(seen)
    while frontier:
        new = []
        for x in frontier:
            for g in images:
                y = tuple((a + b) % d for a, b, d in zip(x, g, mods))
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return len(seen)


# ---------------------------------------------------------------------------
# Standard lattices


def _cartan_negated(edges: list[tuple[int, int]], n: int) -> list[list[int]]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for i, j in edges:
        g[i][j] = g[j][i] = 1
    return g


def root_lattice_A(n: int) -> IntLattice:
    if n < 1:
        raise ValueError("A(n) needs n >= 1")
    return IntLattice.from_gram(_cartan_negated([(i, i + 1) for i in range(n - 1)], n))


def root_lattice_D(n: int) -> IntLattice:
    if n < 2:
        raise ValueError("D(n) needs n >= 2")
    if n == 2:
        return IntLattice.from_gram([[-2, 0], [0, -2]])
    if n == 3:
        return root_lattice_A(3)
    edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    return IntLattice.from_gram(_cartan_negated(edges, n))


def root_lattice_E(n: int) -> IntLattice:
    """Negated Cartan matrix of the T-shaped diagram with arms of 1, 2 and n-4 nodes.

    For n = 6, 7, 8 these are the usual E-lattices; n = 9 is the degenerate
    affine E8 and n >= 10 gives the indefinite lattices of signature (1, n-1).
    """
    if n < 4:
        raise ValueError("E(n) needs n >= 4")
    # node 0 is the branch point; arm of one node, arm of two, long arm
    edges = [(0, 1), (0, 2), (2, 3)]
    prev = 0
    nxt = 4
    for _ in range(n - 4):
        edges.append((prev, nxt))
        prev = nxt
        nxt += 1
    edges = [(i, j) for i, j in edges if i < n and j < n]
    return IntLattice.from_gram(_cartan_negated(edges, n))


def hyperbolic_plane(m: int = 1) -> IntLattice:
    return IntLattice.from_gram([[0, m], [m, 0]])


def odd_unimodular(p: int, q: int) -> IntLattice:
    n = p + q
    return IntLattice.from_gram([[(1 if i < p else -1) if i == j else 0 for j in range(n)] for i in range(n)])


def zero_lattice() -> IntLattice:
    return IntLattice.from_gram([])


K3_LATTICE_NAME = "H+H+H+E8+E8"

_TOKEN_PATTERNS = [
    (re.compile(r"^A\(?(\d+)\)?$"), lambda m: root_lattice_A(int(m[1]))),
    (re.compile(r"^D\(?(\d+)\)?$"), lambda m: root_lattice_D(int(m[1]))),
    (re.compile(r"^E\(?(\d+)\)?$"), lambda m: root_lattice_E(int(m[1]))),
    (re.compile(r"^(?:H|U)$"), lambda m: hyperbolic_plane()),
    (re.compile(r"^(?:H|U)\((\d+)\)$"), lambda m: hyperbolic_plane(int(m[1]))),
    (re.compile(r"^II\(1,1\)$"), lambda m: hyperbolic_plane()),
    (re.compile(r"^I\((\d+),(\d+)\)$"), lambda m: odd_unimodular(int(m[1]), int(m[2]))),
    (re.compile(r"^<(-?\d+)>$"), lambda m: IntLattice.from_gram([[int(m[1])]])),
    (re.compile(r"^(?:0|\{0\})$"), lambda m: zero_lattice()),
    (re.compile(r"^K3$"), lambda m: standard_lattice(K3_LATTICE_NAME)),
]


def standard_lattice(name: str) -> IntLattice:
    """Build a lattice from a name such as ``"H+E8+E8"``, ``"A17"``, ``"I(1,9)"``.

    Accepted tokens: ``A(n)``/``An``, ``D(n)``, ``E(n)`` (any n >= 3, the
    T-shaped diagram), ``H``, ``H(m)``, ``II(1,1)``, ``I(p,q)``, ``<k>``,
    ``0``, ``K3`` and explicit Gram literals such as ``[[-2,1],[1,-4]]``.
    Root lattices are negative definite. Tokens are joined by ``+``.
    """
    text = name.replace(" ", "").replace("⊕", "+")
    if not text:
        raise ValueError("empty lattice name")
    parts = _split_sum(text)
    lattices = [_parse_token(t) for t in parts]
    return direct_sum(*lattices) if len(lattices) > 1 else lattices[0]


def _split_sum(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "[(<":
            depth += 1
        elif ch in "])>":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _parse_token(tok: str) -> IntLattice:
    if tok.startswith("[["):
        import json

        return IntLattice.from_gram(json.loads(tok))
    for pat, build in _TOKEN_PATTERNS:
        m = pat.match(tok)
        if m:
            return build(m)
    raise ValueError(f"unknown lattice tag: {tok!r}")


# ---------------------------------------------------------------------------
# Invariants


def signature(lattice: IntLattice | Sequence[Sequence]) -> tuple[int, int, int]:
    """Inertia ``(positive, negative, null)`` by symmetric elimination."""
    g = lattice.gram if isinstance(lattice, IntLattice) else lattice
    a = [[Fraction(x) for x in row] for row in g]
    pos = neg = null = 0
    while a:
        n = len(a)
        piv = next((i for i in range(n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                null += n
                break
            i, j = pair
            # replace e_i by e_i + e_j: the new diagonal entry is 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != piv]
        a = [[a[r][c] - a[r][piv] * a[piv][c] / p for c in rest] for r in rest]
    return pos, neg, null


def disc_group(lattice: IntLattice) -> DiscGroup:
    """Discriminant group with quadratic values of its SNF generators."""
    g = lattice.matrix
    n = lattice.rank
    if n == 0:
        return DiscGroup((), (), (), (), odd=False)
    if lattice.det == 0:
        raise ValueError("discriminant group of a degenerate lattice")
    u, d, _ = smith_normal_form(g)
    ginv = mx.inverse(g)
    uinv = mx.int_inverse(u)
    factors, gens = [], []
    for i in range(n):
        if d[i][i] > 1:
            col = [uinv[r][i] for r in range(n)]
            gens.append(mx.matvec(ginv, col))
            factors.append(d[i][i])
    odd = not lattice.is_even
    mod = 1 if odd else 2
    qvals = tuple(Fraction(mx.bilinear(g, x, x)) % 2 for x in gens)
    bvals = tuple(tuple(Fraction(mx.bilinear(g, x, y)) % 1 for y in gens) for x in gens)
    del mod
    return DiscGroup(tuple(factors), qvals, tuple(tuple(x) for x in gens), bvals, odd)


# ---------------------------------------------------------------------------
# Sublattice operations


def orthogonal_complement(sub: Sublattice) -> Sublattice:
    """All ambient vectors orthogonal to ``sub``; always saturated."""
    amb = sub.ambient
    if sub.rank == 0:
        return Sublattice(amb, tuple(tuple(e) for e in mx.identity(amb.rank)))
    rows = [mx.matvec(amb.gram, v) for v in sub.basis]
    ker = mx.kernel(rows, amb.rank)
    return Sublattice(amb, tuple(tuple(v) for v in mx.hermite_reduce(ker)))


def saturate(sub: Sublattice) -> Sublattice:
    return Sublattice(sub.ambient, tuple(tuple(v) for v in mx.saturation(sub.basis, sub.ambient.rank)))


def is_primitive(sub: Sublattice) -> bool:
    return mx.is_primitive(sub.basis, sub.ambient.rank)


@dataclass(frozen=True)
class Quotient:
    """A quotient ``L/S`` with chosen lifts and a coordinate projection."""

    lattice: IntLattice
    lifts: tuple[tuple[int, ...], ...]
    change: tuple[tuple[int, ...], ...] = field(repr=False)
    sub_rank: int = 0

    def project(self, v: Sequence[int]) -> list[int]:
        """Coordinates in the quotient of an ambient vector."""
        c = mx.matvec(self.change, v)
        return c[self.sub_rank:]

    def lift(self, c: Sequence[int]) -> list[int]:
        out = [0] * (len(self.lifts[0]) if self.lifts else 0)
        for ci, l in zip(c, self.lifts):
            out = [x + ci * y for x, y in zip(out, l)]
        return out


def quotient_data(gram: Sequence[Sequence[int]], sub_basis: Sequence[Sequence[int]], check: bool = True) -> Quotient:
    """Quotient of ``Z^n`` (with form ``gram``) by a primitive totally degenerate sublattice.

    The form on the quotient is read off from lifts; ``gram`` may be an
    asymmetric matrix as long as it is symmetric and well defined on the quotient.
    """
    n = len(gram)
    sub_basis = [list(v) for v in sub_basis]
    if check:
        if not mx.is_primitive(sub_basis, n):
            raise ValueError("sublattice is not primitive")
        for s in sub_basis:
            if any(mx.matvec(gram, s)) or any(mx.matvec(mx.transpose(gram), s)):
                raise ValueError("sublattice is not totally degenerate")
    w = mx.extend_to_basis(sub_basis, n)
    winv = mx.int_inverse(w)
    k = len(sub_basis)
    lifts = [[w[r][c] for r in range(n)] for c in range(k, n)]
    q = [[mx.bilinear(gram, u, v) for v in lifts] for u in lifts]
    return Quotient(IntLattice.from_gram(q), tuple(tuple(l) for l in lifts), tuple(tuple(r) for r in winv), k)


def quotient_by_radical_part(lattice: IntLattice, sub: Sublattice) -> IntLattice:
    """Induced form on ``L/S`` for ``S`` primitive and totally degenerate."""
    if sub.ambient != lattice:
        raise ValueError("sublattice lives in a different lattice")
    return quotient_data(lattice.gram, sub.basis).lattice


# ---------------------------------------------------------------------------
# Reduction and short vectors (positive definite forms)


def lll_reduce(gram: Sequence[Sequence], delta: Fraction = Fraction(3, 4)) -> tuple[list[list[int]], list[list]]:
    """LLL reduction of a positive definite Gram matrix.

    Returns ``(T, G')`` with ``T`` unimodular (columns = new basis in old
    coordinates) and ``G' = T^T G T``.
    """
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    t = mx.identity(n)
    if n <= 1:
        return t, [list(r) for r in gram]

    def pair(i, j):
        return g[i][j]

    def swap(i, j):
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]
        for row in t:
            row[i], row[j] = row[j], row[i]

    def add_multiple(i, j, c):
        # b_i <- b_i + c b_j
        if not c:
            return
        for k in range(n):
            g[i][k] += c * g[j][k]
        for k in range(n):
            g[k][i] += c * g[k][j]
        for row in t:
            row[i] += c * row[j]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = pair(i, j) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
                mu[i][j] = s / bstar[j]
            bstar[i] = pair(i, i) - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    k = 1
    mu, bstar = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                add_multiple(k, j, -q)
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            mu, bstar = gso()
            k = max(k - 1, 1)
    gi = [[int(x) if x.denominator == 1 else x for x in row] for row in g]
    return t, gi


def _fp_decomposition(gram):
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        if a[i][i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                a[k][l] -= a[k][i] * a[i][l]
    return a


def short_vectors(gram: Sequence[Sequence], bound, reduce: bool = True, exact_norm=None) -> list[list[int]]:
    """All nonzero ``x`` with ``x^T G x <= bound`` for a positive definite ``G``.

    Fincke-Pohst enumeration in exact arithmetic, after an LLL change of basis.
    When ``exact_norm`` is given only vectors of that norm are returned.
    """
    n = len(gram)
    if n == 0:
        return []
    bound = Fraction(bound)
    if reduce:
        t, g = lll_reduce(gram)
    else:
        t, g = mx.identity(n), gram
    q = _fp_decomposition(g)
    out: list[list[int]] = []
    x = [0] * n

    def rec(i, remaining):
        c = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        s = mx.floor_sqrt_fraction(remaining / q[i][i]) + 1
        lo = int(c) - s - 1
        hi = int(c) + s + 1
        for xi in range(lo, hi + 1):
            val = q[i][i] * (xi - c) ** 2
            if val > remaining:
                continue
            x[i] = xi
            if i == 0:
                out.append(list(x))
            else:
                rec(i - 1, remaining - val)
        x[i] = 0

    rec(n - 1, bound)
    res = []
    for y in out:
        if not any(y):
            continue
        v = mx.matvec(t, y)
        if exact_norm is not None and mx.bilinear(gram, v, v) != exact_norm:
            continue
        res.append(v)
    return res


# ---------------------------------------------------------------------------
# Roots


def _definite_sign(lattice: IntLattice) -> int:
    p, n, z = signature(lattice)
    if z or (p and n):
        raise ValueError("lattice is not definite")
    return 1 if p else -1


def _default_h(n: int) -> list[int]:
    return [DEFAULT_TIE_BREAK**i for i in range(n)]


def positive_roots(lattice: IntLattice, h: Sequence | None = None) -> list[list[int]]:
    """Roots with positive pairing against ``h``; one of each pair ``±δ``.

    Roots are vectors of norm -2 in a negative definite lattice (norm 2 in a
    positive definite one). ``h`` defaults to ``(1, N, N^2, ...)`` with
    ``N = 10**6`` and is paired through the Gram matrix.
    """
    if lattice.rank == 0:
        return []
    sign = _definite_sign(lattice)
    g = lattice.matrix if sign > 0 else mx.scale(-1, lattice.gram)
    roots = short_vectors(g, 2, exact_norm=2)
    if h is None:
        h = _default_h(lattice.rank)
    out = []
    for r in roots:
        val = lattice.pair(r, h)
        if val == 0:
            raise ValueError("h is orthogonal to a root; choose a more generic h")
        if val > 0:
            out.append(r)
    out.sort(key=lambda r: (lattice.pair(r, h), r))
    return out


def simple_roots(lattice: IntLattice, h: Sequence | None = None) -> list[list[int]]:
    """Positive roots that are not sums of two positive roots."""
    pos = positive_roots(lattice, h)
    posset = {tuple(r) for r in pos}
    simple = []
    for r in pos:
        decomposable = any(tuple(mx.vsub(r, s)) in posset for s in pos if s != r)
        if not decomposable:
            simple.append(r)
    return simple


# ---------------------------------------------------------------------------
# Isometries of definite lattices


def definite_isometry(
    l1: IntLattice,
    l2: IntLattice,
    fixed: Sequence[tuple[Sequence[int], Sequence[int]]] | None = None,
    budget: int | None = 2_000_000,
) -> list[list[int]] | None:
    """Find ``P`` with ``P^T G2 P = G1`` and ``P v = w`` for each fixed pair.

    Returns None when no such isometry exists (exhaustive search). Raises
    ``ValueError`` on indefinite input and :class:`SearchBudgetExceeded` if the
    node budget runs out.
    """
    fixed = [(list(v), list(w)) for v, w in (fixed or [])]
    if l1.rank != l2.rank:
        return None
    n = l1.rank
    if n == 0:
        return []
    if l1.det != l2.det or l1.is_even != l2.is_even:
        return None
    s1, s2 = _definite_sign(l1), _definite_sign(l2)
    if s1 != s2:
        return None
    g1 = l1.matrix if s1 > 0 else mx.scale(-1, l1.gram)
    g2 = l2.matrix if s2 > 0 else mx.scale(-1, l2.gram)
    for v, w in fixed:
        if mx.bilinear(g1, v, v) != mx.bilinear(g2, w, w):
            return None
    t1, r1 = lll_reduce(g1)
    r1 = mx.as_int(r1)
    t1inv = mx.int_inverse(t1)
    # order basis vectors: largest norm first, ties by connectivity
    order = sorted(range(n), key=lambda i: -r1[i][i])
    norms = sorted({r1[i][i] for i in range(n)})
    cands_all = short_vectors(g2, max(norms))
    by_norm: dict[int, list[list[int]]] = {}
    for v in cands_all:
        by_norm.setdefault(mx.bilinear(g2, v, v), []).append(v)
    fixed_y = [(mx.matvec(t1inv, v), w) for v, w in fixed]
    checks_at: dict[int, list[int]] = {}
    for k, (y, _) in enumerate(fixed_y):
        support = [pos for pos, i in enumerate(order) if y[i] != 0]
        checks_at.setdefault(max(support) if support else -1, []).append(k)
    for k in checks_at.get(-1, []):
        if any(fixed_y[k][1]):
            return None
    images: list[list[int]] = [None] * n  # type: ignore[list-item]
    g2v_cache: dict[tuple, list] = {}
    steps = [0]

    def g2v(x):
        key = tuple(x)
        if key not in g2v_cache:
            g2v_cache[key] = mx.matvec(g2, x)
        return g2v_cache[key]

    def rec(pos):
        if pos == n:
            return True
        i = order[pos]
        for x in by_norm.get(r1[i][i], []):
            steps[0] += 1
            if budget is not None and steps[0] > budget:
                raise SearchBudgetExceeded("isometry search budget exhausted")
            gx = g2v(x)
            ok = True
            for prev in range(pos):
                j = order[prev]
                if mx.dot(images[j], gx) != r1[j][i]:
                    ok = False
                    break
            if not ok:
                continue
            images[i] = x
            good = True
            for k in checks_at.get(pos, []):
                y, w = fixed_y[k]
                img = [0] * n
                for idx in range(n):
                    if y[idx]:
                        img = [a + y[idx] * b for a, b in zip(img, images[idx])]
                if img != w:
                    good = False
                    break
            if good and rec(pos + 1):
                return True
            images[i] = None  # type: ignore[call-overload]
        return False

    if not rec(0):
        return None
    pprime = mx.columns(images)
    p = mx.matmul(pprime, t1inv)
    # mandatory post-verification
    if mx.matmul(mx.matmul(mx.transpose(p), l2.gram), p) != l1.matrix:
        raise AssertionError("isometry verification failed")
    for v, w in fixed:
        if mx.matvec(p, v) != w:
            raise AssertionError("fixed-vector verification failed")
    return p


def lattices_isometric(l1: IntLattice, l2: IntLattice) -> bool | None:
    """Isometry test: exact for definite lattices, genus-based otherwise.

    For indefinite lattices the test compares rank, signature, parity and
    discriminant form, which decides the question when the lattice is even,
    unimodular or of rank at least 3 plus the length of the discriminant
    group; otherwise None is returned when the invariants agree.
    """
    if l1.rank != l2.rank:
        return False
    if l1.rank == 0:
        return True
    if signature(l1) != signature(l2) or l1.is_even != l2.is_even:
        return False
    if l1.det == 0 or l2.det == 0:
        return None
    if l1.is_definite():
        return definite_isometry(l1, l2) is not None
    d1, d2 = disc_group(l1), disc_group(l2)
    if d1.invariant_factors != d2.invariant_factors:
        return False
    if not d1.is_isomorphic(d2):
        return False
    if l1.is_unimodular:
        return True
    if l1.rank >= 3 + len(d1.invariant_factors) and l1.is_even:
        return True
    return None
