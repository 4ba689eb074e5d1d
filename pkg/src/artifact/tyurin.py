"""Glued models of two quasi del Pezzo homomorphisms and their polarisations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import matrices as mx
from .lattice_core import (
    IntLattice,
    Sublattice,
    positive_roots,
    quotient_data,
    signature,
)
from .pseudolattice import (
    PseudoHom,
    Pseudolattice,
    QdpCertificate,
    SurfaceLikeData,
    from_anticanonical_pair,
    glue,
    is_quasi_del_pezzo,
    right_adjoint,
    twist,
)


class GlueError(ValueError):
    pass


def _restricted_gram(gram, basis):
    return [[mx.bilinear(gram, u, v) for v in basis] for u in basis]


def _sublattice_intersection(a: list[list[int]], b: list[list[int]], n: int) -> list[list[int]]:
    """Basis of ``span_Z(a) ∩ span_Z(b)`` inside ``Z^n``."""
    if not a or not b:
        return []
    cols = mx.columns(list(a) + [mx.vscale(-1, v) for v in b], n)
    ker = mx.kernel(cols, len(a) + len(b))
    out = [mx.matvec(mx.columns(a, n), k[: len(a)]) for k in ker]
    return mx.hermite_reduce([v for v in out if any(v)])


@dataclass(frozen=True)
class GluedModel:
    """All lattices attached to the gluing of two quasi del Pezzo homomorphisms.

    Coordinates:

    * ``kernel_basis`` lists vectors of ``G`` spanning ``K = ker f``; the lattice
      ``K`` is written in these coordinates.
    * ``ebar`` and ``psi`` are sublattices of ``K``.
    * ``N`` is ``Psi^⊥_K / Psi`` with the form ``-<,>``; ``n_embed`` maps its
      coordinates into ``NS(G1) ⊕ NS(G2)``.
    * ``proj`` is the matrix of ``N -> NS(M)``.
    """

    G: Pseudolattice
    f: PseudoHom
    r: PseudoHom
    side1: SurfaceLikeData
    side2: SurfaceLikeData
    kernel_basis: tuple[tuple[int, ...], ...]
    K: IntLattice
    ebar: Sublattice
    M: IntLattice
    psi: Sublattice
    N: IntLattice
    n_lifts: tuple[tuple[int, ...], ...]
    n_embed: tuple[tuple[int, ...], ...]
    zeta: tuple[int, ...]
    zeta_multiple: int
    ns_m: IntLattice
    proj: tuple[tuple[int, ...], ...]
    degree: object
    swapped: bool = False
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def n1(self) -> int:
        return self.side1.source.rank

    @property
    def ns_ranks(self) -> tuple[int, int]:
        return self.side1.ns.rank, self.side2.ns.rank

    def side(self, i: int) -> SurfaceLikeData:
        if i not in (1, 2):
            raise ValueError("side must be 1 or 2")
        return self.side1 if i == 1 else self.side2

    def embed_side(self, i: int, v: Sequence[int]) -> list[int]:
        """``NS(G_i)`` coordinates to ``NS(G1) ⊕ NS(G2)`` coordinates."""
        r1, r2 = self.ns_ranks
        v = list(v)
        return v + [0] * r2 if i == 1 else [0] * r1 + v

    def n_coords(self, x: Sequence[int]) -> list[int] | None:
        """``N`` coordinates of a vector of ``NS(G1) ⊕ NS(G2)``, or None if outside ``N``."""
        cols = [list(c) for c in mx.transpose(self.n_embed)]
        return mx.int_coordinates(cols, x)

    def project(self, x: Sequence[int]) -> list[int]:
        return mx.matvec(self.proj, x)

    def k_perp(self, i: int) -> list[list[int]]:
        return self.side(i).k_perp()

    def phi(self, i: int) -> list[list[int]]:
        """Matrix of ``φ_i: K_i^⊥ -> NS(M)`` in the basis ``k_perp(i)``."""
        cols = []
        for v in self.k_perp(i):
            c = self.n_coords(self.embed_side(i, v))
            if c is None:
                raise AssertionError("K^⊥ class does not lie in Psi^⊥_K/Psi")
            cols.append(self.project(c))
        return mx.columns(cols, self.ns_m.rank)

    def phi_image(self) -> list[list[int]]:
        """Spanning vectors of ``φ(K_1^⊥ ⊕ K_2^⊥)`` in ``NS(M)``."""
        vecs = []
        for i in (1, 2):
            m = self.phi(i)
            vecs += [list(c) for c in mx.transpose(m)] if m and m[0] else []
        return vecs

    def section(self, y: Sequence[int]) -> list[int]:
        """Some preimage in ``N`` of a class of ``NS(M)``."""
        x = mx.solve_integer(self.proj, list(y))
        if x is None:
            raise AssertionError("projection onto NS(M) is not surjective")
        return x

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "G": self.G.to_json(),
            "f": [list(r) for r in self.f.matrix],
            "K": self.K.to_json(),
            "kernel_basis": [list(v) for v in self.kernel_basis],
            "Ebar": [list(v) for v in self.ebar.basis],
            "M": self.M.to_json(),
            "Psi": [list(v) for v in self.psi.basis],
            "N": self.N.to_json(),
            "N_embed": [list(r) for r in self.n_embed],
            "zeta": list(self.zeta),
            "zeta_multiple": self.zeta_multiple,
            "NS_M": self.ns_m.to_json(),
            "proj": [list(r) for r in self.proj],
            "NS1": {"gram": self.side1.ns.matrix, "K": [int(x) for x in self.side1.canonical]},
            "NS2": {"gram": self.side2.ns.matrix, "K": [int(x) for x in self.side2.canonical]},
            "swapped": self.swapped,
            "checks": self.checks,
        }


def as_qdp(x) -> PseudoHom:
    """Accept a ``PseudoHom``, a pair ``(Q, K)`` or a JSON dict for either."""
    if isinstance(x, PseudoHom):
        return x
    if isinstance(x, dict):
        if "ns" in x:
            return from_anticanonical_pair(IntLattice.from_json(x["ns"]), [int(k) for k in x["K"]])
        return PseudoHom.from_json(x)
    q, k = x
    return from_anticanonical_pair(q, k)


def build_glued(p1, p2) -> GluedModel:
    """Glue two quasi del Pezzo homomorphisms of opposite degree along ``f1`` and ``-f2``.

    Each input is normalised in its own certified basis of E, so that ``r(a)``
    is the point-like vector on both sides.
    """
    f1, f2 = as_qdp(p1), as_qdp(p2)
    c1, c2 = is_quasi_del_pezzo(f1), is_quasi_del_pezzo(f2)
    for idx, c in ((1, c1), (2, c2)):
        if not c:
            raise GlueError(f"input {idx} is not quasi del Pezzo: {c.reason}")
    return glue_surface_like(c1.data, c2.data, degree_tag(c1), degree_tag(c2))


def degree_tag(c: QdpCertificate):
    return "8'" if c.model == "Quadric" else c.data.degree


def glue_surface_like(d1: SurfaceLikeData, d2: SurfaceLikeData, tag1=None, tag2=None) -> GluedModel:
    """Glued model from two surface-like homomorphisms written in a common basis of E."""
    k1, k2 = d1.degree, d2.degree
    if k1 != -k2:
        raise GlueError(f"canonical degrees {k1} and {k2} are not opposite")
    swapped = False
    if k1 < 0:
        d1, d2, tag1, tag2 = d2, d1, tag2, tag1
        swapped = True
    degree = tag1 if tag1 is not None else d1.degree
    checks: dict[str, bool] = {}
    g, f = glue(d1.hom, d2.hom, -1)
    n = g.rank
    n1 = d1.source.rank
    t = twist(f)
    checks["twist_identity"] = t == mx.identity(2)
    if not checks["twist_identity"]:
        raise GlueError(f"glued twist {t} is not the identity")
    r = right_adjoint(f)
    ra = [row[0] for row in r.matrix]
    rb = [row[1] for row in r.matrix]

    kb = mx.hermite_reduce(mx.kernel(f.mat, n))
    kgram = _restricted_gram(g.gram, kb)
    checks["K_symmetric"] = all(kgram[i][j] == kgram[j][i] for i in range(len(kb)) for j in range(i))
    if not checks["K_symmetric"]:
        raise AssertionError("form on ker f is not symmetric")
    klat = IntLattice.from_gram(kgram)
    kcols = mx.columns(kb, n)

    def kc(v):
        c = mx.int_coordinates(kb, v)
        if c is None:
            raise AssertionError("vector is not in K")
        return c

    ebar_k = mx.saturation([kc(ra), kc(rb)], len(kb))
    checks["Ebar_rank2"] = len(ebar_k) == 2
    checks["Ebar_isotrivial"] = all(not any(mx.matvec(kgram, e)) for e in ebar_k)
    if not (checks["Ebar_rank2"] and checks["Ebar_isotrivial"]):
        raise AssertionError("saturated image of r is not a rank-2 radical sublattice of K")
    mquot = quotient_data(kgram, ebar_k)
    mlat = mquot.lattice

    p1 = list(d1.pointlike) + [0] * (n - n1)
    p2 = [0] * n1 + list(d2.pointlike)
    psi_g = [p1, p2]
    checks["Psi_primitive"] = mx.is_primitive(psi_g, n)
    checks["Psi_symmetric"] = all(mx.matvec(g.gram, p) == mx.matvec(mx.transpose(g.gram), p) for p in psi_g)
    checks["Psi_in_K"] = all(not any(f(p)) for p in psi_g)
    checks["Psi_isotropic"] = all(g.pair(u, v) == 0 for u in psi_g for v in psi_g)
    ebar_g = [mx.matvec(kcols, e) for e in ebar_k]
    inter = _sublattice_intersection(psi_g, ebar_g, n)
    checks["Psi_meets_Ebar_in_ra"] = len(inter) == 1 and (inter[0] == ra or inter[0] == mx.vscale(-1, ra))
    for key in ("Psi_primitive", "Psi_symmetric", "Psi_in_K", "Psi_isotropic", "Psi_meets_Ebar_in_ra"):
        if not checks[key]:
            raise AssertionError(f"Psi property failed: {key}")
    psi_k = [kc(p) for p in psi_g]

    # Psi^⊥_G / Psi is NS(G1) ⊕ NS(G2)
    checks["PsiPerpG_is_NS_sum"] = _check_psi_perp_g(g, psi_g, d1, d2)

    # N = Psi^⊥_K / Psi with form -<,>
    rows = [mx.matvec(kgram, p) for p in psi_k]
    perp_k = mx.hermite_reduce(mx.kernel(rows, len(kb)))
    gperp = _restricted_gram(kgram, perp_k)
    psi_in_perp = [mx.int_coordinates(perp_k, p) for p in psi_k]
    nquot = quotient_data(gperp, psi_in_perp)
    nlat = nquot.lattice.negate()
    n_lifts_g = [mx.matvec(kcols, mx.matvec(mx.columns(perp_k, len(kb)), l)) for l in nquot.lifts]
    embed_cols = []
    for u in n_lifts_g:
        embed_cols.append(d1.ns_class(u[:n1]) + d2.ns_class(u[n1:]))
    n_embed = mx.columns(embed_cols, d1.ns.rank + d2.ns.rank)
    qsum = mx.block_diag(d1.ns.gram, d2.ns.gram)
    checks["N_embedding_isometric"] = mx.matmul(mx.matmul(mx.transpose(n_embed), qsum), n_embed) == nlat.matrix
    checks["N_embedding_primitive"] = mx.is_primitive(embed_cols, len(qsum))

    # zeta: generator of Ebar / r(a)
    ra_e = mx.int_coordinates(ebar_k, kc(ra))
    comp = mx.extend_to_basis([ra_e], 2)
    zeta_k = mx.matvec(mx.columns(ebar_k, len(kb)), [comp[0][1], comp[1][1]])
    zeta_perp = mx.int_coordinates(perp_k, zeta_k)
    zeta_n = nquot.project(zeta_perp)
    zeta_ns = mx.matvec(n_embed, zeta_n)
    target = [-int(x) for x in d1.canonical] + [int(x) for x in d2.canonical]
    mult = _integer_ratio(target, zeta_ns)
    if mult is None:
        raise AssertionError("(-K1, K2) is not an integer multiple of zeta")
    if mult < 0:
        zeta_n = mx.vscale(-1, zeta_n)
        mult = -mult
    checks["zeta_contains_K_line"] = True
    checks["zeta_isotrivial"] = not any(mx.matvec(nlat.gram, zeta_n))

    # NS(M) = p^⊥ / p inside M
    pm = mquot.project(psi_k[0])
    checks["Psi_images_agree"] = pm == mquot.project(psi_k[1]) or pm == mx.vscale(-1, mquot.project(psi_k[1]))
    mg = mlat.gram
    perp_m = mx.hermite_reduce(mx.kernel([mx.matvec(mg, pm)], mlat.rank))
    nsq = quotient_data(_restricted_gram(mg, perp_m), [mx.int_coordinates(perp_m, pm)])
    ns_m = nsq.lattice.negate()
    proj_cols = []
    for l in nquot.lifts:
        kvec = mx.matvec(mx.columns(perp_k, len(kb)), l)
        mvec = mquot.project(kvec)
        c = mx.int_coordinates(perp_m, mvec)
        if c is None:
            raise AssertionError("Psi^⊥_K does not map into p^⊥")
        proj_cols.append(nsq.project(c))
    proj = mx.columns(proj_cols, ns_m.rank)
    checks["proj_isometric"] = mx.matmul(mx.matmul(mx.transpose(proj), ns_m.gram), proj) == nlat.matrix
    checks["proj_surjective"] = mx.smith_diagonal(proj) == [1] * ns_m.rank
    ker = mx.kernel(proj, nlat.rank)
    checks["proj_kernel_zeta"] = len(ker) == 1 and (ker[0] == zeta_n or ker[0] == mx.vscale(-1, zeta_n))
    checks["exactness_ranks"] = len(ebar_k) + mlat.rank == len(kb)
    for key, ok in checks.items():
        if not ok:
            raise AssertionError(f"glued model check failed: {key}")

    model = GluedModel(
        G=g,
        f=f,
        r=r,
        side1=d1,
        side2=d2,
        kernel_basis=tuple(map(tuple, kb)),
        K=klat,
        ebar=Sublattice(klat, tuple(map(tuple, ebar_k))),
        M=mlat,
        psi=Sublattice(klat, tuple(map(tuple, psi_k))),
        N=nlat,
        n_lifts=tuple(map(tuple, n_lifts_g)),
        n_embed=tuple(map(tuple, n_embed)),
        zeta=tuple(zeta_n),
        zeta_multiple=mult,
        ns_m=ns_m,
        proj=tuple(map(tuple, proj)),
        degree=degree,
        swapped=swapped,
        checks=checks,
    )
    checks["N_meets_NS_in_Kperp"] = all(_check_kperp_equality(model, i) for i in (1, 2))
    if not checks["N_meets_NS_in_Kperp"]:
        raise AssertionError("Psi^⊥_K/Psi ∩ NS(G_i) differs from K_i^⊥")
    return model


def _integer_ratio(target: list[int], v: list[int]) -> int | None:
    """The integer ``c`` with ``target = c v`` if it exists."""
    c = None
    for t, x in zip(target, v):
        if x == 0:
            if t != 0:
                return None
            continue
        if t % x:
            return None
        if c is None:
            c = t // x
        elif c != t // x:
            return None
    return c if c is not None else (0 if not any(target) else None)


def _check_psi_perp_g(g: Pseudolattice, psi_g, d1: SurfaceLikeData, d2: SurfaceLikeData) -> bool:
    n = g.rank
    n1 = d1.source.rank
    rows = [mx.matvec(g.gram, p) for p in psi_g]
    perp = mx.hermite_reduce(mx.kernel(rows, n))
    gperp = _restricted_gram(g.gram, perp)
    quot = quotient_data(gperp, [mx.int_coordinates(perp, p) for p in psi_g])
    lifts = [mx.matvec(mx.columns(perp, n), l) for l in quot.lifts]
    cols = [d1.ns_class(u[:n1]) + d2.ns_class(u[n1:]) for u in lifts]
    emb = mx.columns(cols, d1.ns.rank + d2.ns.rank)
    if abs(mx.det(emb)) != 1:
        return False
    qsum = mx.block_diag(d1.ns.gram, d2.ns.gram)
    return mx.matmul(mx.matmul(mx.transpose(emb), qsum), emb) == mx.scale(-1, quot.lattice.gram)


def _side_part(model: GluedModel, i: int, vecs_ns: list[list[int]]) -> list[list[int]]:
    """Vectors of ``NS(G1) ⊕ NS(G2)`` in the span of ``vecs_ns`` that vanish off side ``i``."""
    r1, r2 = model.ns_ranks
    other = slice(r1, r1 + r2) if i == 1 else slice(0, r1)
    mine = slice(0, r1) if i == 1 else slice(r1, r1 + r2)
    if not vecs_ns:
        return []
    rows = mx.transpose([v[other] for v in vecs_ns]) if (r2 if i == 1 else r1) else []
    combos = mx.kernel(rows, len(vecs_ns)) if rows else [list(e) for e in mx.identity(len(vecs_ns))]
    out = []
    for c in combos:
        v = [0] * (r1 + r2)
        for ci, w in zip(c, vecs_ns):
            if ci:
                v = mx.vadd(v, mx.vscale(ci, w))
        out.append(v[mine])
    return mx.hermite_reduce([v for v in out if any(v)])


def _same_span(a: list[list[int]], b: list[list[int]], n: int) -> bool:
    return mx.hermite_reduce(a) == mx.hermite_reduce(b)


def _check_kperp_equality(model: GluedModel, i: int) -> bool:
    n_vecs = [list(c) for c in mx.transpose(model.n_embed)]
    part = _side_part(model, i, n_vecs)
    return _same_span(part, model.k_perp(i), model.side(i).ns.rank)


# ---------------------------------------------------------------------------
# Polarisations


@dataclass(frozen=True)
class Polarisation:
    """A polarising sublattice.

    ``kind`` is ``"lattice"`` (inside ``NS(M)``), ``"lifted"`` (inside
    ``Psi^⊥_K/Psi``) or ``"intersection"`` (inside ``NS(G_side)``).
    """

    kind: str
    sub: Sublattice
    side: int | None = None

    @property
    def basis(self) -> list[list[int]]:
        return [list(v) for v in self.sub.basis]

    @property
    def rank(self) -> int:
        return len(self.sub.basis)

    def lattice(self) -> IntLattice:
        return self.sub.lattice()


def _is_primitive_in(vecs: list[list[int]], n: int) -> bool:
    return not vecs or mx.is_primitive(vecs, n)


def lattice_polarisation(model: GluedModel, vectors: Sequence[Sequence[int]]) -> Polarisation:
    vecs = mx.hermite_reduce([list(v) for v in vectors if any(v)])
    if not _is_primitive_in(vecs, model.ns_m.rank):
        raise ValueError("L is not primitive in NS(M)")
    return Polarisation("lattice", Sublattice(model.ns_m, tuple(map(tuple, vecs))))


def lift_polarisation(model: GluedModel, pol: Polarisation) -> Polarisation:
    """Preimage of ``L ⊂ NS(M)`` in ``Psi^⊥_K/Psi``."""
    if pol.kind != "lattice":
        raise ValueError("expected a lattice polarisation")
    basis = pol.basis
    if not _is_primitive_in(basis, model.ns_m.rank):
        raise ValueError("L is not primitive in NS(M)")
    nr = model.N.rank
    if basis:
        big = [list(row) + [-x for x in brow] for row, brow in zip(model.proj, mx.columns(basis, model.ns_m.rank))]
        ker = mx.kernel(big, nr + len(basis))
        vecs = [k[:nr] for k in ker]
    else:
        vecs = mx.kernel(model.proj, nr)
    vecs = mx.hermite_reduce([v for v in vecs if any(v)])
    sub = Sublattice(model.N, tuple(map(tuple, vecs)))
    if not sub.contains(list(model.zeta)):
        raise AssertionError("lift does not contain zeta")
    if not _is_primitive_in(vecs, nr):
        raise AssertionError("lift is not primitive")
    return Polarisation("lifted", sub)


def lifted_polarisation(model: GluedModel, vectors: Sequence[Sequence[int]]) -> Polarisation:
    vecs = mx.hermite_reduce([list(v) for v in vectors if any(v)])
    sub = Sublattice(model.N, tuple(map(tuple, vecs)))
    if not vecs or not sub.contains(list(model.zeta)):
        raise ValueError("lifted polarisation must contain zeta")
    if not _is_primitive_in(vecs, model.N.rank):
        raise ValueError("lifted polarisation must be primitive")
    return Polarisation("lifted", sub)


def project_polarisation(model: GluedModel, pol: Polarisation) -> Polarisation:
    if pol.kind != "lifted":
        raise ValueError("expected a lifted polarisation")
    imgs = [model.project(v) for v in pol.basis]
    vecs = mx.hermite_reduce([v for v in imgs if any(v)])
    if not _is_primitive_in(vecs, model.ns_m.rank):
        raise AssertionError("image of a lifted polarisation is not primitive")
    return Polarisation("lattice", Sublattice(model.ns_m, tuple(map(tuple, vecs))))


def intersection_polarisation(model: GluedModel, pol: Polarisation, i: int) -> Polarisation:
    """``L_i = L̂ ∩ NS(G_i)`` in ``NS(G_i)`` coordinates."""
    if pol.kind != "lifted":
        raise ValueError("expected a lifted polarisation")
    ns_vecs = [mx.matvec(model.n_embed, v) for v in pol.basis]
    part = _side_part(model, i, ns_vecs)
    ns = model.side(i).ns
    if not _is_primitive_in(part, ns.rank):
        raise AssertionError("intersection polarisation is not primitive")
    row = mx.matvec(ns.gram, [int(x) for x in model.side(i).canonical])
    if any(mx.dot(row, v) for v in part):
        raise AssertionError("intersection polarisation is not orthogonal to K")
    return Polarisation("intersection", Sublattice(ns, tuple(map(tuple, part))), side=i)


@dataclass(frozen=True)
class CouplingGroup:
    invariant_factors: tuple[int, ...]
    free_rank: int

    @property
    def is_torsion(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "free_rank": self.free_rank, "order": self.order}


def _quotient_group(ambient_basis: list[list[int]], sub_vecs: list[list[int]]) -> CouplingGroup:
    """``span(ambient_basis) / span(sub_vecs)`` for ``sub_vecs`` inside the ambient span."""
    r = len(ambient_basis)
    cols = []
    for v in sub_vecs:
        c = mx.int_coordinates(ambient_basis, v)
        if c is None:
            raise AssertionError("subgroup is not contained in the ambient lattice")
        cols.append(c)
    if not cols:
        return CouplingGroup((), r)
    diag = mx.smith_diagonal(mx.columns(cols, r))
    return CouplingGroup(tuple(d for d in diag if d > 1), r - len(diag))


def phi_cokernel(model: GluedModel) -> CouplingGroup:
    """``NS(M) / φ(K_1^⊥ ⊕ K_2^⊥)``."""
    basis = [list(e) for e in mx.identity(model.ns_m.rank)]
    return _quotient_group(basis, model.phi_image())


def coupling_group(model: GluedModel, pol: Polarisation) -> CouplingGroup:
    """``Q(L) = L / φ(L_1 ⊕ L_2)``."""
    if model.degree == 0:
        raise ValueError("coupling group is defined only in nonzero degree")
    if pol.kind == "lifted":
        lifted, lat = pol, project_polarisation(model, pol)
    else:
        lat, lifted = pol, lift_polarisation(model, pol)
    images = []
    for i in (1, 2):
        li = intersection_polarisation(model, lifted, i)
        for v in li.basis:
            images.append(model.project(model.n_coords(model.embed_side(i, v))))
    return _quotient_group(lat.basis, images)


def full_polarisation(model: GluedModel) -> Polarisation:
    return Polarisation("lattice", Sublattice(model.ns_m, tuple(map(tuple, mx.identity(model.ns_m.rank)))))


def _perp_in(gram, basis: list[list[int]], vecs: list[list[int]]) -> list[list[int]]:
    """Saturated part of ``span(basis)`` orthogonal to ``vecs``."""
    if not vecs:
        return [list(b) for b in basis]
    rows = [[mx.bilinear(gram, v, b) for b in basis] for v in vecs]
    ker = mx.kernel(rows, len(basis))
    return mx.hermite_reduce([mx.matvec(mx.columns(basis, len(gram)), k) for k in ker])


def coupling_torsion_equivalence(model: GluedModel, pol: Polarisation) -> dict:
    """Both sides of the torsion criterion for coupling groups."""
    lifted = pol if pol.kind == "lifted" else lift_polarisation(model, pol)
    q = coupling_group(model, lifted)
    lhat_perp = _perp_in(model.N.gram, [list(e) for e in mx.identity(model.N.rank)], lifted.basis)
    ns_perp = [mx.matvec(model.n_embed, v) for v in lhat_perp]
    sides = {}
    for i in (1, 2):
        ns = model.side(i).ns
        li = intersection_polarisation(model, lifted, i)
        left = _perp_in(ns.gram, model.k_perp(i), li.basis)
        right = _side_part(model, i, ns_perp)
        sides[i] = _same_span(left, right, ns.rank)
    return {"torsion": q.is_torsion, "complements_agree": sides[1] and sides[2], "per_side": sides}


# ---------------------------------------------------------------------------
# Effectivity checks


def nonnegative_combination(target: Sequence[int], gens: Sequence[Sequence[int]], cap: int = 30) -> list[int] | None | str:
    """Nonnegative integer coefficients expressing ``target`` in ``gens``.

    Returns the coefficients, None when impossible, or ``"unknown"`` when the
    bounded search gives up.
    """
    target = list(target)
    gens = [list(g) for g in gens]
    if not any(target):
        return [0] * len(gens)
    if not gens:
        return None
    if mx.rank(gens) == len(gens):
        sol = mx.solve_rational(mx.columns(gens, len(target)), target)
        if sol is None:
            return None
        if all(x.denominator == 1 and x >= 0 for x in sol):
            return [int(x) for x in sol]
        return None
    w = [0] * len(target)
    for g in gens:
        w = mx.vadd(w, g)
    weights = [mx.dot(w, g) for g in gens]
    if any(x <= 0 for x in weights):
        return "unknown"
    coeffs = [0] * len(gens)
    seen = set()

    def rec(rem, start):
        if not any(rem):
            return True
        val = mx.dot(w, rem)
        if val <= 0:
            return False
        key = (tuple(rem), start)
        if key in seen:
            return False
        seen.add(key)
        for j in range(start, len(gens)):
            if coeffs[j] >= cap:
                continue
            coeffs[j] += 1
            if rec(mx.vsub(rem, gens[j]), j):
                return True
            coeffs[j] -= 1
        return False

    return list(coeffs) if rec(target, 0) else None


def roots_effective(lat_gram, roots, gens, cap) -> tuple[bool | None, list]:
    failures = []
    unknown = False
    for r in roots:
        ok = False
        for s in (1, -1):
            res = nonnegative_combination(mx.vscale(s, r), gens, cap)
            if isinstance(res, list):
                ok = True
                break
            if res == "unknown":
                unknown = True
        if not ok:
            failures.append(r)
    if failures:
        return (None if unknown else False), failures
    return True, []


@dataclass
class Verdict:
    """Per-clause outcome; ``status`` is ``"verified"``, ``"refuted"`` or ``"unknown"``."""

    status: str
    clauses: dict
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.status == "verified"

    def to_json(self) -> dict:
        return {"status": self.status, "clauses": self.clauses, "witnesses": self.witnesses, "notes": self.notes}


def combine(clauses: dict) -> str:
    vals = list(clauses.values())
    if any(v is False for v in vals):
        return "refuted"
    if any(v is None for v in vals):
        return "unknown"
    return "verified"


def check_stable_polarisation(
    model: GluedModel,
    lifted: Polarisation,
    effective_data: Sequence[Sequence[int]] = (),
    roots: Sequence[Sequence[int]] | None = None,
    nef_class: Sequence[int] | None = None,
    cap: int = 30,
) -> Verdict:
    """Lattice-level test of the stable Type II polarisation conditions.

    ``effective_data`` are effective classes in ``NS(G1) ⊕ NS(G2)``
    coordinates. The nef condition is replaced by the existence of a class of
    positive square (or by the supplied ``nef_class``, checked for membership
    and positive square).
    """
    clauses: dict[str, bool | None] = {}
    witnesses: dict = {}
    notes = ["nefness is checked only through a class of positive square"]
    clauses["contains_zeta"] = lifted.sub.contains(list(model.zeta))
    lat = lifted.lattice()
    if nef_class is not None:
        c = model.n_coords(list(nef_class))
        ok = c is not None and lifted.sub.contains(c) and model.N.pair(c, c) > 0
        clauses["positive_class"] = ok
        witnesses["nef_class"] = list(nef_class)
    else:
        clauses["positive_class"] = signature(lat)[0] > 0
    image = project_polarisation(model, lifted) if clauses["contains_zeta"] else None
    if image is None:
        clauses["roots_effective"] = None
        return Verdict(combine(clauses), clauses, witnesses, notes)
    llat = image.lattice()
    gens = []
    for e in effective_data:
        c = model.n_coords(list(e))
        if c is None:
            raise ValueError(f"effective class {list(e)} is not in Psi^⊥_K/Psi")
        gens.append(model.project(c))
    if roots is None:
        pos, neg, null = signature(llat)
        if llat.rank and pos == 0 and null == 0:
            local = positive_roots(llat)
            root_vecs = [mx.matvec(mx.columns(image.basis, model.ns_m.rank), v) for v in local]
        elif llat.rank == 0 or (neg == 0 and null == 0):
            root_vecs = []
        else:
            raise ValueError("roots are not finite; supply them explicitly")
    else:
        root_vecs = []
        for r in roots:
            c = model.n_coords(list(r))
            if c is None:
                raise ValueError("root is not in Psi^⊥_K/Psi")
            root_vecs.append(model.project(c))
    ok, failures = roots_effective(model.ns_m.gram, root_vecs, gens, cap)
    clauses["roots_effective"] = ok
    witnesses["root_count"] = len(root_vecs)
    if failures:
        witnesses["non_effective_roots"] = failures[:5]
    return Verdict(combine(clauses), clauses, witnesses, notes)


def check_wdp_polarisation(
    q: IntLattice, k: Sequence[int], n_vectors: Sequence[Sequence[int]], effective_data: Sequence[Sequence[int]] = (), cap: int = 30
) -> Verdict:
    """Lattice-level test of a polarisation of a weak del Pezzo pair ``(Q, K)``."""
    k = [int(x) for x in k]
    if q.pair(k, k) <= 0:
        raise ValueError("weak del Pezzo test needs K^2 > 0")
    vecs = mx.hermite_reduce([list(v) for v in n_vectors if any(v)])
    clauses: dict[str, bool | None] = {}
    witnesses: dict = {}
    clauses["orthogonal_to_K"] = all(q.pair(v, k) == 0 for v in vecs)
    clauses["primitive"] = _is_primitive_in(vecs, q.rank)
    sub = _restricted_gram(q.gram, vecs)
    nlat = IntLattice.from_gram(sub) if vecs else IntLattice.from_gram([])
    pos, neg, null = signature(nlat)
    clauses["negative_definite"] = pos == 0 and null == 0
    if clauses["negative_definite"] and vecs:
        roots = [mx.matvec(mx.columns(vecs, q.rank), v) for v in positive_roots(nlat)]
        ok, failures = roots_effective(q.gram, roots, [list(e) for e in effective_data], cap)
        clauses["roots_effective"] = ok
        witnesses["root_count"] = len(roots)
        if failures:
            witnesses["non_effective_roots"] = failures[:5]
    else:
        clauses["roots_effective"] = True if not vecs else None
    return Verdict(combine(clauses), clauses, witnesses)


# ---------------------------------------------------------------------------
# Isometries


def _check_side_isometry(data: SurfaceLikeData, p) -> None:
    p = [list(r) for r in p]
    q = data.ns
    if mx.matmul(mx.matmul(mx.transpose(p), q.gram), p) != q.matrix:
        raise ValueError("matrix is not an isometry of NS")
    k = [int(x) for x in data.canonical]
    if mx.matvec(p, k) != k:
        raise ValueError("isometry does not fix K")


def descend_isometries(model: GluedModel, p1, p2) -> list[list[int]]:
    """Isometry of ``NS(M)`` induced by isometries of ``NS(G_i)`` fixing ``K_i``."""
    _check_side_isometry(model.side1, p1)
    _check_side_isometry(model.side2, p2)
    big = mx.block_diag(p1, p2)
    ncols = [list(c) for c in mx.transpose(model.n_embed)]
    on_n = []
    for v in ncols:
        c = model.n_coords(mx.matvec(big, v))
        if c is None:
            raise AssertionError("isometry does not preserve Psi^⊥_K/Psi")
        on_n.append(c)
    on_n = mx.columns(on_n, model.N.rank)
    cols = []
    for y in mx.identity(model.ns_m.rank):
        x = model.section(y)
        cols.append(model.project(mx.matvec(on_n, x)))
    psi = mx.columns(cols, model.ns_m.rank)
    if mx.matmul(mx.matmul(mx.transpose(psi), model.ns_m.gram), psi) != model.ns_m.matrix:
        raise AssertionError("descended map is not an isometry")
    return psi


def preserves_phi_images(model: GluedModel, psi) -> bool:
    for i in (1, 2):
        img = [list(c) for c in mx.transpose(model.phi(i))] if model.k_perp(i) else []
        moved = [mx.matvec(psi, v) for v in img]
        if mx.hermite_reduce(moved) != mx.hermite_reduce(img):
            return False
    return True


def decompose_isometry(model: GluedModel, psi) -> tuple[int, list[list[int]], list[list[int]]]:
    """Sign ``s`` and ``NS(G_i)`` isometries fixing ``K_i`` inducing ``s ψ``."""
    if model.degree == 0:
        raise ValueError("decomposition needs nonzero degree")
    psi = [list(r) for r in psi]
    if mx.matmul(mx.matmul(mx.transpose(psi), model.ns_m.gram), psi) != model.ns_m.matrix:
        raise ValueError("matrix is not an isometry of NS(M)")
    if not preserves_phi_images(model, psi):
        raise ValueError("isometry does not preserve the images of K_i^⊥")
    for sign in (1, -1):
        sp = mx.scale(sign, psi)
        parts = []
        for i in (1, 2):
            part = _extend_side(model, i, sp)
            if part is None:
                break
            parts.append(part)
        if len(parts) == 2 and descend_isometries(model, parts[0], parts[1]) == sp:
            return sign, parts[0], parts[1]
    raise ValueError("isometry does not decompose")


def _extend_side(model: GluedModel, i: int, psi) -> list[list[int]] | None:
    data = model.side(i)
    kp = model.k_perp(i)
    phi = model.phi(i)
    phi_cols = [list(c) for c in mx.transpose(phi)] if kp else []
    k = [int(x) for x in data.canonical]
    images = []
    for v in phi_cols:
        c = mx.int_coordinates(phi_cols, mx.matvec(psi, v))
        if c is None:
            return None
        images.append(mx.matvec(mx.columns(kp, data.ns.rank), c))
    src = mx.columns(kp + [k], data.ns.rank)
    tgt = mx.columns(images + [k], data.ns.rank)
    p = mx.matmul(tgt, mx.inverse(src))
    if any(Fraction(x).denominator != 1 for row in p for x in row):
        return None
    p = mx.as_int(p)
    try:
        _check_side_isometry(data, p)
    except ValueError:
        return None
    return p
