"""Elliptic fibrations over discs: Kodaira fibre models, splittings and polarisations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Sequence

from . import matrices as mx
from .lattice_core import (
    IntLattice,
    Sublattice,
    definite_isometry,
    short_vectors,
    signature,
    simple_roots,
    standard_lattice,
)
from .pseudolattice import (
    EBasis,
    PseudoHom,
    Pseudolattice,
    SurfaceLikeData,
    change_target_basis,
    complete_basis,
    glue,
    is_quasi_del_pezzo,
    right_adjoint,
    surface_like,
    twist,
    word_twist,
    z_chain,
)
from .tyurin import (
    CouplingGroup,
    GluedModel,
    Verdict,
    combine,
    coupling_group,
    degree_tag,
    glue_surface_like,
    lattice_polarisation,
    roots_effective,
)

IDENTITY = ((1, 0), (0, 1))
_A, _B_MINUS_A, _B_PLUS_A = (1, 0), (-1, 1), (1, 1)

_NAMED_WORDS = {
    "II": [_A, _B_PLUS_A],
    "III": [_A, _A, _B_PLUS_A],
    "IV": [_A, _A, _A, _B_PLUS_A],
    "IV*": [_A] * 5 + [_B_MINUS_A, _B_PLUS_A, _B_PLUS_A],
    "III*": [_A] * 6 + [_B_MINUS_A, _B_PLUS_A, _B_PLUS_A],
    "II*": [_A] * 7 + [_B_MINUS_A, _B_PLUS_A, _B_PLUS_A],
}

# (order of the monodromy or None for infinite order, trace) by family
KODAIRA_TABLE = {
    "I": (None, 2),
    "I*": (None, -2),
    "II": (6, 1),
    "III": (4, 0),
    "IV": (3, -1),
    "IV*": (3, -1),
    "III*": (4, 0),
    "II*": (6, 1),
}


def _tup(m) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


def _check_sl2(g) -> tuple[tuple[int, ...], ...]:
    g = _tup(g)
    if len(g) != 2 or any(len(r) != 2 for r in g) or mx.det(g) != 1:
        raise ValueError(f"framing {g} is not in SL2(Z)")
    return g


def parse_fibre_tag(tag: str) -> tuple[str, int | None]:
    """Split a Kodaira type such as ``"I18"``, ``"I*12"``, ``"Istar0"`` or ``"IIIstar"``."""
    s = str(tag).strip().replace("_", "").replace("^", "").replace(" ", "").replace("{", "").replace("}", "")
    s = re.sub("star", "*", s, flags=re.IGNORECASE)
    if re.match(r"^\d+I", s) or s.startswith("m"):
        raise ValueError(f"multiple fibres are not supported: {tag!r}")
    m = re.fullmatch(r"(II|III|IV)(\*)?", s)
    if m:
        return m.group(1) + (m.group(2) or ""), None
    m = re.fullmatch(r"I(\*)?(\d+)(\*)?", s)
    if m:
        n = int(m.group(2))
        if m.group(1) and m.group(3):
            raise ValueError(f"invalid Kodaira type {tag!r}")
        if m.group(1) or m.group(3):
            return "I*", n
        if n < 1:
            raise ValueError("I_n needs n >= 1 (I_0 is a smooth fibre)")
        return "I", n
    raise ValueError(f"invalid Kodaira type {tag!r}")


def _canonical_tag(family: str, n: int | None) -> str:
    if family == "I":
        return f"I{n}"
    if family == "I*":
        return f"I*{n}"
    return family


def table_word(family: str, n: int | None = None) -> list[tuple[int, int]]:
    """Vanishing-cycle word of a Kodaira fibre in its local basis ``(a, b)``."""
    if family == "I":
        return [_A] * n
    if family == "I*":
        return [_A] * (n + 4) + [_B_MINUS_A, _B_PLUS_A]
    return list(_NAMED_WORDS[family])


def matrix_order(m, limit: int = 12) -> int | None:
    """Order of an integer matrix, or None if it exceeds ``limit``."""
    ident = mx.identity(len(m))
    p = mx.identity(len(m))
    for k in range(1, limit + 1):
        p = mx.matmul(p, m)
        if p == ident:
            return k
    return None


@dataclass(frozen=True)
class KodairaFibre:
    """A singular fibre: its word in E, Euler number and local monodromy.

    ``framing`` is an element of SL2(Z) moving the local basis of the table
    into the global basis; the framed word and monodromy are the conjugates.
    """

    type_tag: str
    word: tuple[tuple[int, int], ...]
    euler: int
    monodromy: tuple[tuple[int, ...], ...]
    framing: tuple[tuple[int, ...], ...] = IDENTITY

    @property
    def family(self) -> str:
        return parse_fibre_tag(self.type_tag)[0]

    @property
    def framed_word(self) -> list[tuple[int, int]]:
        return [tuple(mx.matvec(self.framing, v)) for v in self.word]

    @property
    def framed_monodromy(self) -> list[list[int]]:
        g = [list(r) for r in self.framing]
        return mx.matmul(mx.matmul(g, self.monodromy), mx.int_inverse(g))

    def with_framing(self, g) -> KodairaFibre:
        return KodairaFibre(self.type_tag, self.word, self.euler, self.monodromy, _check_sl2(g))

    def invariants(self) -> dict:
        m = self.monodromy
        return {"order": matrix_order(m), "trace": m[0][0] + m[1][1], "det": mx.det(m)}

    def to_json(self) -> dict:
        out = {"type": self.type_tag}
        if self.framing != IDENTITY:
            out["framing"] = [list(r) for r in self.framing]
        return out


def fibre_model(type_tag: str, framing=None) -> KodairaFibre:
    family, n = parse_fibre_tag(type_tag)
    word = table_word(family, n)
    mono = _tup(word_twist(word))
    fib = KodairaFibre(_canonical_tag(family, n), tuple(word), len(word), mono)
    return fib.with_framing(framing) if framing is not None else fib


def fibre_from_vector(v: Sequence[int]) -> KodairaFibre:
    """An ``I1`` fibre with vanishing cycle ``v``."""
    v = (int(v[0]), int(v[1]))
    if gcd(*v) != 1:
        raise ValueError("vanishing cycle must be primitive")
    b = complete_basis(v)
    return fibre_model("I1", [[v[0], b.b[0]], [v[1], b.b[1]]])


@dataclass(frozen=True)
class FibreConfig:
    """Singular fibres of a fibration over a disc, in order."""

    fibres: tuple[KodairaFibre, ...]

    def __post_init__(self):
        if not self.fibres:
            raise ValueError("a fibre configuration needs at least one fibre")

    @property
    def euler(self) -> int:
        return sum(f.euler for f in self.fibres)

    @property
    def word(self) -> list[tuple[int, int]]:
        out = []
        for f in self.fibres:
            out += f.framed_word
        return out

    @property
    def monodromy(self) -> list[list[int]]:
        out = mx.identity(2)
        for f in self.fibres:
            out = mx.matmul(out, f.framed_monodromy)
        return out

    def blocks(self) -> list[tuple[int, int]]:
        out, start = [], 0
        for f in self.fibres:
            out.append((start, start + f.euler))
            start += f.euler
        return out

    def to_json(self) -> dict:
        return {"fibres": [f.to_json() for f in self.fibres]}


def make_config(fibres) -> FibreConfig:
    """Build a configuration from tags, ``KodairaFibre`` objects or JSON entries."""
    if isinstance(fibres, FibreConfig):
        return fibres
    if isinstance(fibres, dict):
        fibres = fibres["fibres"]
    out = []
    for item in fibres:
        if isinstance(item, KodairaFibre):
            out.append(item)
        elif isinstance(item, str):
            out.append(fibre_model(item))
        elif isinstance(item, dict):
            if "vector" in item:
                out.append(fibre_from_vector(item["vector"]))
            else:
                out.append(fibre_model(item["type"], item.get("framing")))
        else:
            raise ValueError(f"cannot read fibre entry {item!r}")
    return FibreConfig(tuple(out))


def build_disc_fibration(config) -> tuple[Pseudolattice, PseudoHom]:
    """Iterated gluing of the framed fibre pseudolattices over E."""
    config = make_config(config)
    g, f = z_chain(config.fibres[0].framed_word)
    for fib in config.fibres[1:]:
        _, fi = z_chain(fib.framed_word)
        g, f = glue(f, fi, 1)
    if twist(f) != config.monodromy:
        raise AssertionError("twist of the glued fibration differs from the product of monodromies")
    return g, f


# ---------------------------------------------------------------------------
# Framings


_GENERATORS = ([[0, -1], [1, 0]], [[0, 1], [-1, 0]], [[1, 1], [0, 1]], [[1, -1], [0, 1]])


def sl2_words(max_length: int = 8) -> list[tuple[tuple[int, ...], ...]]:
    """Distinct SL2(Z) elements given by words of length at most ``max_length``."""
    seen = {IDENTITY: 0}
    frontier = [IDENTITY]
    for _ in range(max_length):
        nxt = []
        for m in frontier:
            for g in _GENERATORS:
                p = _tup(mx.matmul(m, g))
                if p not in seen:
                    seen[p] = 1
                    nxt.append(p)
        frontier = nxt
    return sorted(seen, key=lambda m: (max(abs(x) for r in m for x in r), m))


def parabolic_normal_form(m) -> tuple[int, list[list[int]]] | None:
    """``(k, B)`` with ``B^{-1} m B = [[1,k],[0,1]]``, ``B`` in SL2(Z), or None."""
    m = [list(r) for r in m]
    if m == mx.identity(2):
        return 0, mx.identity(2)
    if m[0][0] + m[1][1] != 2:
        return None
    ker = mx.kernel(mx.sub(m, mx.identity(2)), 2)
    if len(ker) != 1:
        return None
    v = ker[0]
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = [-v[0], -v[1]]
    basis = complete_basis(v)
    b = basis.matrix
    n = mx.matmul(mx.matmul(mx.int_inverse(b), m), b)
    return n[0][1], b


def conjugator(m, target) -> list[list[int]] | None:
    """``h`` in SL2(Z) with ``h m h^{-1} = target`` for parabolic or central matrices."""
    m, target = [list(r) for r in m], [list(r) for r in target]
    if m == target:
        return mx.identity(2)
    nm, nt = parabolic_normal_form(m), parabolic_normal_form(target)
    if nm is None or nt is None or nm[0] != nt[0]:
        return None
    h = mx.matmul(nt[1], mx.int_inverse(nm[1]))
    assert mx.matmul(mx.matmul(h, m), mx.int_inverse(h)) == target
    return h


def search_framings(types: Sequence[str], target, max_length: int = 8, limit: int = 1) -> list[list[tuple]]:
    """Framings of the given fibres whose framed monodromies multiply to ``target``.

    The first fibre is framed by the identity and the result is conjugated
    onto ``target`` at the end, so ``target`` must be parabolic or the
    identity. Searches all framings given by words of length at most
    ``max_length``; the last fibre is solved by table lookup.
    """
    fibres = [fibre_model(t) for t in types]
    words = sl2_words(max_length)
    options = []
    for fib in fibres:
        seen: dict = {}
        for g in words:
            fm = _tup(fib.with_framing(g).framed_monodromy)
            seen.setdefault(fm, g)
        options.append(seen)
    found: list[list[tuple]] = []
    first = fibres[0].monodromy
    if len(fibres) == 1:
        h = conjugator(first, target)
        return [[_tup(h)]] if h is not None else []
    last = options[-1]
    middle = options[1:-1]
    ttrace = target[0][0] + target[1][1]
    for combo in product(*[list(o.items()) for o in middle]):
        prefix = [list(r) for r in first]
        for fm, _ in combo:
            prefix = mx.matmul(prefix, fm)
        # need prefix * last = Q with Q conjugate to target
        nt = parabolic_normal_form(target)
        if nt is None and [list(r) for r in target] != mx.identity(2):
            raise ValueError("target monodromy must be parabolic or the identity")
        for lm, lg in last.items():
            if prefix[0][0] * lm[0][0] + prefix[0][1] * lm[1][0] + prefix[1][0] * lm[0][1] + prefix[1][1] * lm[1][1] != ttrace:
                continue
            q = mx.matmul(prefix, lm)
            h = conjugator(q, target)
            if h is None:
                continue
            frames = [h] + [mx.matmul(h, g) for _, g in combo] + [mx.matmul(h, lg)]
            frames = [_tup(fr) for fr in frames]
            found.append(frames)
            if len(found) >= limit:
                return found
            break
    return found


# ---------------------------------------------------------------------------
# Loop splittings


@dataclass(frozen=True)
class LoopSplit:
    """Two disc fibrations glued along a loop; ``side1`` has Euler number at most 12."""

    side1: FibreConfig
    side2: FibreConfig
    swapped: bool = False

    def __post_init__(self):
        if self.side1.euler + self.side2.euler != 24:
            raise ValueError(f"Euler numbers {self.side1.euler} + {self.side2.euler} do not sum to 24")
        if self.side1.euler > 12:
            raise ValueError("side1 must have Euler number at most 12; use make_split")

    def side(self, i: int) -> FibreConfig:
        return self.side1 if i == 1 else self.side2

    def to_json(self) -> dict:
        return {"side1": self.side1.to_json(), "side2": self.side2.to_json()}


def make_split(side1, side2) -> LoopSplit:
    c1, c2 = make_config(side1), make_config(side2)
    if c1.euler > 12:
        return LoopSplit(c2, c1, swapped=True)
    return LoopSplit(c1, c2)


def split_config(config, side1_indices: Sequence[int], side2_indices: Sequence[int]) -> LoopSplit:
    config = make_config(config)
    idx = sorted(list(side1_indices) + list(side2_indices))
    if idx != list(range(len(config.fibres))):
        raise ValueError("split indices must partition the fibres")
    c1 = FibreConfig(tuple(config.fibres[i] for i in side1_indices))
    c2 = FibreConfig(tuple(config.fibres[i] for i in side2_indices))
    return make_split(c1, c2)


def split_from_json(data) -> LoopSplit:
    """Split from side lists, from indices into a configuration, or from an emitted model."""
    if "split" in data:
        data = data["split"]
    if "config" in data or "fibres" in data:
        cfg = data.get("config", data)
        return split_config(cfg, data["side1"], data["side2"])
    return make_split(data["side1"], data["side2"])


@dataclass
class AllowableVerdict:
    allowable: bool
    basis: EBasis | None
    twists: tuple | None
    certifying_bases: int
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.allowable

    def to_json(self) -> dict:
        return {
            "allowable": self.allowable,
            "basis": None if self.basis is None else {"a": list(self.basis.a), "b": list(self.basis.b)},
            "twists": None if self.twists is None else [[list(r) for r in t] for t in self.twists],
            "certifying_bases": self.certifying_bases,
            "unique": self.certifying_bases <= 2,
            "reasons": self.reasons,
        }


def _candidate_a(t1, t2, height: int) -> list[tuple[int, int]]:
    ident = mx.identity(2)
    for t in (t1, t2):
        if t != ident:
            ker = mx.kernel(mx.sub(t, ident), 2)
            if len(ker) != 1:
                return []
            v = tuple(ker[0])
            return sorted([v, (-v[0], -v[1])])
    out = []
    for x in range(-height, height + 1):
        for y in range(-height, height + 1):
            if gcd(x, y) == 1:
                out.append((x, y))
    return sorted(out, key=lambda v: (max(abs(v[0]), abs(v[1])), v))


def _ra_primitive(f: PseudoHom, basis: EBasis) -> bool:
    r = right_adjoint(change_target_basis(f, basis))
    ra = [row[0] for row in r.matrix]
    return any(ra) and mx.content(ra) == 1


def allowable_check(split: LoopSplit, height: int = 12) -> AllowableVerdict:
    """Search a basis of E in which both boundary twists are ``[[1, e-12], [0, 1]]``."""
    f1 = build_disc_fibration(split.side1)[1]
    f2 = build_disc_fibration(split.side2)[1]
    t1, t2 = twist(f1), twist(f2)
    e1, e2 = split.side1.euler, split.side2.euler
    reasons = []
    if mx.matmul(t1, t2) != mx.identity(2):
        reasons.append("boundary monodromies are not mutually inverse")
        return AllowableVerdict(False, None, None, 0, reasons)
    good = []
    for a in _candidate_a(t1, t2, height):
        basis = complete_basis(a)
        b = basis.matrix
        binv = mx.int_inverse(b)
        n1 = mx.matmul(mx.matmul(binv, t1), b)
        n2 = mx.matmul(mx.matmul(binv, t2), b)
        if n1 != [[1, e1 - 12], [0, 1]] or n2 != [[1, e2 - 12], [0, 1]]:
            continue
        if not (_ra_primitive(f1, basis) and _ra_primitive(f2, basis)):
            continue
        good.append((basis, (_tup(n1), _tup(n2))))
    if not good:
        reasons.append("no basis of E puts both twists in unipotent form with r(a) primitive")
        return AllowableVerdict(False, None, None, 0, reasons)
    good.sort(key=lambda x: (x[0].a, x[0].b))
    basis, twists = good[0]
    if len(good) > 2:
        reasons.append("certifying basis is not unique up to sign; lexicographically smallest returned")
    return AllowableVerdict(True, basis, twists, len(good), reasons)


# ---------------------------------------------------------------------------
# K3 split models


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SplitModel:
    """Glued model of an allowable splitting, with the fibre data of each side.

    Attribute access falls through to the underlying :class:`GluedModel`.
    """

    glued: GluedModel
    split: LoopSplit
    basis: EBasis
    tags: tuple

    def __getattr__(self, name):
        if name in ("glued", "split", "basis", "tags") or name.startswith("__"):
            raise AttributeError(name)
        return getattr(self.glued, name)

    def side_data(self, i: int) -> SurfaceLikeData:
        return self.glued.side(i)

    def disc(self, i: int) -> DiscFibration:
        return DiscFibration(self.split.side(i), self.glued.side(i))

    def to_json(self) -> dict:
        out = self.glued.to_json()
        out["split"] = self.split.to_json()
        out["basis"] = {"a": list(self.basis.a), "b": list(self.basis.b)}
        out["side_tags"] = list(self.tags)
        return out


def build_k3_split_model(split: LoopSplit, basis: EBasis | None = None) -> SplitModel:
    """Glue the two sides along ``φ1`` and ``-φ2`` in a common certified basis of E."""
    if basis is None:
        verdict = allowable_check(split)
        if not verdict:
            raise SplitError("split is not allowable: " + "; ".join(verdict.reasons))
        basis = verdict.basis
    datas, tags = [], []
    for i in (1, 2):
        f = build_disc_fibration(split.side(i))[1]
        cert = is_quasi_del_pezzo(f)
        if not cert:
            raise SplitError(f"side {i} is not quasi del Pezzo: {cert.reason}")
        data = surface_like(f, basis)
        if not data:
            raise SplitError(f"side {i} is not surface-like in the chosen basis: {data.reason}")
        datas.append(data)
        tags.append(degree_tag(cert))
    e1 = split.side1.euler
    if datas[0].degree != 12 - e1:
        raise AssertionError("degree differs from 12 - e(side1)")
    glued = glue_surface_like(datas[0], datas[1], tags[0], tags[1])
    if glued.swapped:
        raise AssertionError("unexpected swap of sides")
    return SplitModel(glued, split, basis, tuple(tags))


# ---------------------------------------------------------------------------
# Fibre components


@dataclass(frozen=True)
class DiscFibration:
    """A single disc fibration with its surface-like data in a certified basis of E."""

    config: FibreConfig
    data: SurfaceLikeData

    @property
    def euler(self) -> int:
        return self.config.euler

    def component_classes(self) -> list[list[list[int]]]:
        """NS classes of non-identity fibre components, one list per fibre.

        The components of a fibre are the simple roots of the kernel of the
        asymptotic charge map restricted to that fibre's block.
        """
        data = self.data
        n = data.source.rank
        out = []
        for (s, e) in self.config.blocks():
            block = [list(r[s:e]) for r in data.hom.mat]
            ker = mx.kernel(block, e - s)
            if not ker:
                out.append([])
                continue
            vecs = [[0] * s + list(k) + [0] * (n - e) for k in ker]
            classes = [data.ns_class(v) for v in vecs]
            if mx.rank(classes) != len(classes):
                raise AssertionError("fibre kernel does not embed into NS")
            lat = IntLattice.from_gram([[data.ns.pair(u, v) for v in classes] for u in classes])
            roots = simple_roots(lat)
            out.append([mx.matvec(mx.columns(classes, data.ns.rank), r) for r in roots])
        return out


def disc_fibration(config, basis: EBasis | None = None) -> DiscFibration:
    """Surface-like model of one disc, in a basis where the twist is ``[[1, e-12], [0, 1]]``."""
    config = make_config(config)
    f = build_disc_fibration(config)[1]
    if basis is None:
        t = twist(f)
        for a in _candidate_a(t, t, 12):
            b = complete_basis(a)
            n = mx.matmul(mx.matmul(mx.int_inverse(b.matrix), t), b.matrix)
            if n == [[1, config.euler - 12], [0, 1]] and _ra_primitive(f, b):
                basis = b
                break
        if basis is None:
            raise SplitError("no basis of E puts the boundary twist in the required form")
    data = surface_like(f, basis)
    if not data:
        raise SplitError(f"disc fibration is not surface-like: {data.reason}")
    return DiscFibration(config, data)


def fibre_component_classes(model, side: int = 1) -> list[list[list[int]]]:
    """Component classes of the fibres on one side of a split model (or of a disc fibration)."""
    if isinstance(model, DiscFibration):
        return model.component_classes()
    return model.disc(side).component_classes()


def _side_to_ns_m(model: SplitModel, side: int, v: Sequence[int]) -> list[int]:
    g = model.glued
    c = g.n_coords(g.embed_side(side, v))
    if c is None:
        raise AssertionError("class does not lie in Psi^⊥_K/Psi")
    return g.project(c)


def component_lattice(model: SplitModel) -> list[list[int]]:
    """Generators in ``NS(M)`` of the span ``R`` of all fibre component classes."""
    out = []
    for side in (1, 2):
        for comps in fibre_component_classes(model, side):
            out += [_side_to_ns_m(model, side, v) for v in comps]
    return out


def gamma_from_components(model: SplitModel) -> list[list[int]]:
    """Saturation of the component span in ``NS(M)``."""
    r = component_lattice(model)
    if not r:
        return []
    return mx.hermite_reduce(mx.saturation(r, model.glued.ns_m.rank))


# ---------------------------------------------------------------------------
# Quasipolarisations compatible with a splitting


@dataclass(frozen=True)
class CompatiblePolarisation:
    """``Ľ = <F, g> ⊕ Γ`` inside ``H_τ ⊕ H_F ⊕ NS(M)``.

    Ambient coordinates: ``(τ, τ', F, F', NS(M)...)`` with each pair spanning a
    hyperbolic plane.
    """

    ambient: IntLattice
    Lcheck: IntLattice
    lcheck_basis: tuple[tuple[int, ...], ...]
    F: tuple[int, ...]
    tau: tuple[int, ...]
    Gamma: IntLattice
    gamma_basis: tuple[tuple[int, ...], ...]
    gamma_ns: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "Lcheck": self.Lcheck.to_json(),
            "Lcheck_basis": [list(v) for v in self.lcheck_basis],
            "F": list(self.F),
            "tau": list(self.tau),
            "Gamma": self.Gamma.to_json(),
            "Gamma_in_NS_M": [list(v) for v in self.gamma_ns],
        }


def k3_ambient(ns_m: IntLattice) -> IntLattice:
    h = standard_lattice("H")
    return IntLattice.from_gram(mx.block_diag(h.gram, h.gram, ns_m.gram))


def compatible_polarisation(model, gamma: Sequence[Sequence[int]] | None = None) -> CompatiblePolarisation:
    """Quasipolarisation ``H ⊕ Γ`` for ``Γ ⊂ NS(M)`` (default: saturated components)."""
    glued = model.glued if isinstance(model, SplitModel) else model
    if gamma is None:
        gamma = gamma_from_components(model)
    gamma = mx.hermite_reduce([list(v) for v in gamma if any(v)])
    ns = glued.ns_m
    glat = IntLattice.from_gram([[ns.pair(u, v) for v in gamma] for u in gamma]) if gamma else IntLattice.from_gram([])
    if gamma and signature(glat)[0] + signature(glat)[2] != 0:
        raise ValueError("Gamma must be negative definite")
    amb = k3_ambient(ns)
    z4 = [0, 0, 0, 0]
    tau = [1, 0, 0, 0] + [0] * ns.rank
    f = [0, 0, 1, 0] + [0] * ns.rank
    g = [0, 0, 0, 1] + [0] * ns.rank
    basis = [f, g] + [z4 + list(v) for v in gamma]
    lgram = [[amb.pair(u, v) for v in basis] for u in basis]
    lcheck = IntLattice.from_gram(lgram)
    for v in basis:
        if amb.pair(tau, v) != 0:
            raise AssertionError("tau is not orthogonal to Ľ")
    return CompatiblePolarisation(
        amb,
        lcheck,
        tuple(map(tuple, basis)),
        tuple(f),
        tuple(tau),
        glat,
        tuple(tuple(v) for v in mx.identity(len(gamma))) if gamma else (),
        tuple(map(tuple, gamma)),
    )


# ---------------------------------------------------------------------------
# Polarisations of a disc fibration


def check_gamma_polarisation(
    model,
    gamma: Sequence[Sequence[int]],
    side: int = 1,
    component_classes: Sequence[Sequence[int]] | None = None,
    cap: int = 30,
) -> Verdict:
    """Lattice-level test that ``Γ ⊂ NS`` polarises a disc fibration.

    ``model`` is a :class:`DiscFibration` or a :class:`SplitModel` together
    with ``side``.
    """
    disc = model if isinstance(model, DiscFibration) else model.disc(side)
    if disc.euler >= 12:
        raise ValueError(f"disc fibration has Euler number {disc.euler} >= 12")
    data = disc.data
    ns = data.ns
    vecs = mx.hermite_reduce([list(v) for v in gamma if any(v)])
    if component_classes is None:
        component_classes = [v for comps in disc.component_classes() for v in comps]
    clauses: dict = {}
    witnesses: dict = {}
    clauses["primitive"] = not vecs or mx.is_primitive(vecs, ns.rank)
    rb = list(data.rb_class)
    clauses["orthogonal_to_rb"] = all(ns.pair(v, rb) == 0 for v in vecs)
    lat = IntLattice.from_gram([[ns.pair(u, v) for v in vecs] for u in vecs]) if vecs else IntLattice.from_gram([])
    pos, neg, null = signature(lat)
    clauses["negative_definite"] = pos == 0 and null == 0
    if vecs and clauses["negative_definite"]:
        local = short_vectors(mx.scale(-1, lat.gram), 2, exact_norm=2)
        roots = []
        seen = set()
        for r in local:
            key = tuple(r) if tuple(r) > tuple(-x for x in r) else tuple(-x for x in r)
            if key in seen:
                continue
            seen.add(key)
            roots.append(mx.matvec(mx.columns(vecs, ns.rank), r))
        ok, failures = roots_effective(ns.gram, roots, [list(c) for c in component_classes], cap)
        clauses["roots_effective"] = ok
        witnesses["root_count"] = len(roots)
        if failures:
            witnesses["non_effective_roots"] = failures[:5]
    else:
        clauses["roots_effective"] = True if not vecs else None
    return Verdict(combine(clauses), clauses, witnesses)


@dataclass
class MWReport:
    component_span: list
    gamma_mod_r: CouplingGroup
    coupling: CouplingGroup
    r_in_phi_image: bool
    consistent: bool

    def to_json(self) -> dict:
        return {
            "R_rank": mx.rank(self.component_span) if self.component_span else 0,
            "Gamma_mod_R": self.gamma_mod_r.to_json(),
            "coupling": self.coupling.to_json(),
            "R_in_phi_image": self.r_in_phi_image,
            "consistent": self.consistent,
        }


def _group(ambient: list[list[int]], sub: list[list[int]]) -> CouplingGroup:
    r = len(ambient)
    cols = []
    for v in sub:
        c = mx.int_coordinates(ambient, v)
        if c is None:
            raise AssertionError("subgroup is not contained in the ambient lattice")
        cols.append(c)
    if not cols:
        return CouplingGroup((), r)
    diag = mx.smith_diagonal(mx.columns(cols, r))
    return CouplingGroup(tuple(d for d in diag if d > 1), r - len(diag))


def mw_coupling_data(model: SplitModel, polarisation: CompatiblePolarisation | None) -> MWReport:
    """Compare ``Γ/R`` (Mordell-Weil when ``Ľ = NS``) with the coupling group ``Q(Γ)``."""
    if polarisation is None:
        raise ValueError("a section split Ľ = H ⊕ Γ must be supplied")
    amb = polarisation.ambient
    f, g = list(polarisation.lcheck_basis[0]), list(polarisation.lcheck_basis[1])
    if amb.pair(f, g) != 1 or amb.pair(f, f) != 0 or amb.pair(g, g) != 0:
        raise ValueError("Ľ does not split off a hyperbolic plane at F")
    if model.glued.degree == 0 or model.split.side1.euler >= 12:
        raise ValueError("needs e(side1) < 12")
    gamma = [list(v) for v in polarisation.gamma_ns]
    r = component_lattice(model)
    gmod = _group(gamma, r)
    pol = lattice_polarisation(model.glued, gamma)
    q = coupling_group(model.glued, pol)
    phi_img = []
    from .tyurin import intersection_polarisation, lift_polarisation

    lifted = lift_polarisation(model.glued, pol)
    for i in (1, 2):
        li = intersection_polarisation(model.glued, lifted, i)
        phi_img += [_side_to_ns_m(model, i, v) for v in li.basis]
    r_in = all(mx.int_coordinates(phi_img, v) is not None for v in r) if r else True
    consistent = r_in and q.free_rank <= gmod.free_rank
    if consistent and gmod.is_torsion:
        consistent = q.is_torsion and gmod.order % q.order == 0
    return MWReport(r, gmod, q, r_in, consistent)


# ---------------------------------------------------------------------------
# Rational elliptic surfaces


@dataclass(frozen=True)
class RatellModel:
    """Identification of ``K^⊥ ⊂ NS`` with the complement of an ``A_{d-1}`` chain in E8."""

    degree: int
    data: SurfaceLikeData
    e8: IntLattice
    chain: tuple[tuple[int, ...], ...]
    kperp: tuple[tuple[int, ...], ...]
    iso: tuple[tuple[int, ...], ...]

    def to_e8(self, v: Sequence[int]) -> list[int]:
        c = mx.int_coordinates([list(k) for k in self.kperp], list(v))
        if c is None:
            raise ValueError("class is not orthogonal to [r(b)]")
        return mx.matvec(self.iso, c)

    def from_e8(self, w: Sequence[int]) -> list[int]:
        cols = [list(c) for c in mx.transpose(self.iso)] if self.kperp else []
        c = mx.int_coordinates(cols, list(w)) if cols else ([] if not any(w) else None)
        if c is None:
            raise ValueError("class is not orthogonal to the I_d components")
        return mx.matvec(mx.columns([list(k) for k in self.kperp], self.data.ns.rank), c) if c else [0] * self.data.ns.rank


def _e8_chain(length: int, target: IntLattice) -> tuple[list[list[int]], list[list[int]], list[list[int]]] | None:
    e8 = standard_lattice("E8")
    g = e8.gram
    roots = short_vectors(mx.scale(-1, g), 2, exact_norm=2)
    roots.sort(key=lambda r: (sum(abs(x) for x in r), r))

    def comp(ch):
        if not ch:
            return mx.identity(8)
        return mx.hermite_reduce(mx.kernel([mx.matvec(g, r) for r in ch], 8))

    def rec(ch):
        if len(ch) == length:
            b = comp(ch)
            lat = IntLattice.from_gram([[mx.bilinear(g, u, v) for v in b] for u in b])
            p = definite_isometry(target, lat) if target.rank else []
            return (ch, b, p) if p is not None else None
        for r in roots:
            if r in ch:
                continue
            if all(mx.bilinear(g, r, c) == (1 if i == len(ch) - 1 else 0) for i, c in enumerate(ch)):
                res = rec(ch + [r])
                if res:
                    return res
        return None

    if length == 0:
        return [], mx.identity(8), definite_isometry(target, e8)
    return rec([roots[0]])


def ratell_model(qdp) -> RatellModel:
    if isinstance(qdp, DiscFibration):
        qdp = qdp.data
    if isinstance(qdp, SurfaceLikeData):
        data = qdp
    else:
        cert = is_quasi_del_pezzo(qdp)
        if not cert:
            raise ValueError(f"not quasi del Pezzo: {cert.reason}")
        data = cert.data
    d = data.degree
    t = twist(data.hom)
    if not (1 <= d <= 9) or t != [[1, -d], [0, 1]]:
        raise ValueError(f"boundary monodromy {t} is not [[1,-d],[0,1]] with 1 <= d <= 9")
    kp = data.k_perp()
    target = data.k_perp_lattice()
    found = _e8_chain(d - 1, target)
    if found is None:
        raise AssertionError("no A_{d-1} chain in E8 with complement isometric to K^⊥")
    chain, comp, p = found
    # p maps K^⊥ coordinates to coordinates in comp; write images in E8 coordinates
    iso = mx.matmul(mx.columns(comp, 8), p) if kp else []
    return RatellModel(d, data, standard_lattice("E8"), tuple(map(tuple, chain)), tuple(map(tuple, kp)), _tup(iso) if kp else ())


def ratell_transfer(qdp, n_vectors: Sequence[Sequence[int]], direction: str = "to_ratell", model: RatellModel | None = None) -> Sublattice:
    """Move a polarising lattice between ``NS`` of the disc fibration and ``F^⊥/ZF`` (E8)."""
    model = model or ratell_model(qdp)
    vecs = [list(v) for v in n_vectors if any(v)]
    if direction == "to_ratell":
        src_rank = model.data.ns.rank
        out = [model.to_e8(v) for v in vecs]
        amb = model.e8
    elif direction == "to_pseudo":
        src_rank = 8
        g = model.e8.gram
        for v in vecs:
            if any(mx.bilinear(g, v, c) for c in model.chain):
                raise ValueError("class is not orthogonal to the I_d components")
        out = [model.from_e8(v) for v in vecs]
        amb = model.data.ns
    else:
        raise ValueError("direction must be 'to_ratell' or 'to_pseudo'")
    if vecs and not mx.is_primitive(vecs, src_rank):
        raise ValueError("input lattice is not primitive")
    out = mx.hermite_reduce(out)
    if out and not mx.is_primitive(out, amb.rank):
        raise AssertionError("transferred lattice is not primitive")
    return Sublattice(amb, tuple(map(tuple, out)))
