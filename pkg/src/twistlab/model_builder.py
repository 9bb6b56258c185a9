"""Hamiltonians as lists of labelled multi-edge operators.

Every model is described cell by cell: a ``CellRule`` lists the factors
(edge, operator kind, orientation sign) and the subgroup of labels the
cell is summed over.  Instantiating a rule at a label gives a
``LatticeOperator``; the model keeps one term per generator of the label
subgroup.  Edges that carry dual-cocycle Z operators are stored in the
character frame so that every term stays monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .abelian_group import (
    Cocycle,
    FiniteAbelianGroup,
    canonical_z22_cocycle,
    pairing_cocycle,
    trivial_cocycle,
    validate_cocycle,
)
from .lattice import Cell, Edge, Lattice, SIDES_2D
from .monomial_ops import (
    Commutation,
    DualFrame,
    MonomialError,
    NON_SCALAR,
    OpKind,
    SiteOperator,
    commutation_phase,
    compose,
    dagger,
    make,
    to_frame,
)
from .abelian_group import Phase
from fractions import Fraction

K = OpKind
TWISTED_X = (K.X_ALPHA, K.X_ALPHA_BAR, K.X_TILDE_ALPHA_BAR)
TWISTED_Z = (K.Z_BETA, K.Z_BETA_BAR)

VARIANTS = ("tc_untwisted", "h_alpha", "h_alpha_alpha", "h_alpha_beta", "general_abelian",
            "sc3d_alpha", "xcube_beta")


class ModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# multi-edge operators


def _edge_key(e: Edge) -> tuple:
    return (e.axis, e.base)


class LatticeOperator:
    """A tensor product of site operators times a global phase.

    Site phases are folded into ``glob`` (an integer modulo the group's
    phase modulus) and identity factors are dropped, so equal operators
    have equal canonical data.
    """

    __slots__ = ("group", "sites", "glob")

    def __init__(self, group: FiniteAbelianGroup, sites: Optional[dict] = None, glob: int = 0):
        N = group.modulus
        clean = {}
        for e, op in (sites or {}).items():
            glob += op.glob
            if op.glob:
                op = op.with_phase(-op.glob)
            if not op.is_identity:
                clean[e] = op
        self.group = group
        self.sites = dict(sorted(clean.items(), key=lambda kv: _edge_key(kv[0])))
        self.glob = glob % N

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "LatticeOperator":
        return cls(group)

    @property
    def support(self) -> list:
        return list(self.sites)

    @property
    def is_identity(self) -> bool:
        return not self.sites and self.glob == 0

    @property
    def is_scalar(self) -> bool:
        return not self.sites

    @property
    def phase(self) -> Phase:
        return Phase(Fraction(self.glob, self.group.modulus))

    def with_phase(self, k: int) -> "LatticeOperator":
        return LatticeOperator(self.group, self.sites, self.glob + k)

    def in_frames(self, frames: dict) -> "LatticeOperator":
        """Re-express each factor in the given per-edge frames."""
        sites = {}
        for e, op in self.sites.items():
            sites[e] = to_frame(op, frames.get(e))
        return LatticeOperator(self.group, sites, self.glob)

    def _aligned(self, other: "LatticeOperator") -> dict:
        out = {}
        for e, op in other.sites.items():
            mine = self.sites.get(e)
            out[e] = op if mine is None or mine.frame == op.frame else to_frame(op, mine.frame)
        return out

    def __matmul__(self, other: "LatticeOperator") -> "LatticeOperator":
        return self.compose(other)

    def compose(self, other: "LatticeOperator") -> "LatticeOperator":
        """self * other (other acts first)."""
        theirs = self._aligned(other)
        sites = dict(self.sites)
        for e, op in theirs.items():
            sites[e] = compose(sites[e], op) if e in sites else op
        return LatticeOperator(self.group, sites, self.glob + other.glob)

    def dagger(self) -> "LatticeOperator":
        return LatticeOperator(self.group, {e: dagger(op) for e, op in self.sites.items()}, -self.glob)

    def power(self, k: int) -> "LatticeOperator":
        if k < 0:
            return self.dagger().power(-k)
        out = LatticeOperator.identity(self.group)
        for _ in range(k):
            out = out.compose(self)
        return out

    def commutation(self, other: "LatticeOperator") -> Commutation:
        """Phase p with self*other = exp(2 pi i p) other*self."""
        N = self.group.modulus
        theirs = self._aligned(other)
        total = 0
        for e, op in theirs.items():
            mine = self.sites.get(e)
            if mine is None:
                continue
            c = commutation_phase(mine, op)
            if not c.is_scalar:
                return NON_SCALAR
            total += c.phase.as_int(N)
        return Commutation(Phase(Fraction(total % N, N)))

    def restrict(self, edges: Iterable[Edge]) -> "LatticeOperator":
        keep = set(edges)
        return LatticeOperator(self.group, {e: op for e, op in self.sites.items() if e in keep})

    def same_as(self, other: "LatticeOperator") -> bool:
        if set(self.sites) != set(other.sites) or self.glob != other.glob:
            return False
        theirs = self._aligned(other)
        return all(self.sites[e] == theirs[e] for e in self.sites)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeOperator) and self.same_as(other)

    def __hash__(self) -> int:
        return hash((len(self.sites), self.glob))

    def describe(self) -> dict:
        N = self.group.modulus
        return {
            "phase": f"{Fraction(self.glob, N).numerator}/{Fraction(self.glob, N).denominator}",
            "sites": [{"edge": str(e), "perm": list(op.perm), "diag": list(op.diag),
                       "frame": "dual" if op.frame is not None else "direct"}
                      for e, op in self.sites.items()],
        }

    def __repr__(self) -> str:
        return f"LatticeOperator({len(self.sites)} sites, glob={self.glob}/{self.group.modulus})"


# ---------------------------------------------------------------------------
# cell rules


@dataclass(frozen=True)
class Factor:
    edge: Edge
    kind: OpKind
    sign: int = 1           # -1 means the label enters inverted (X^dagger, Z^dagger)
    cocycle: Optional[Cocycle] = None


@dataclass(frozen=True)
class CellRule:
    cell: Cell
    family: str
    sort: str               # "element" or "character"
    labels: frozenset       # subgroup of labels the cell is summed over
    factors: tuple

    @property
    def edges(self) -> list:
        return [f.edge for f in self.factors]


@dataclass(frozen=True)
class Term:
    rule: int
    cell: Cell
    family: str
    label: tuple
    order: int
    op: LatticeOperator


@dataclass(frozen=True)
class BoundarySpec:
    side: str
    style: str
    subgroup: frozenset
    twist: str = "trivial"

    def __post_init__(self):
        if self.side not in SIDES_2D:
            raise ModelError(f"unknown side {self.side!r}")
        if self.style not in ("rough", "smooth"):
            raise ModelError(f"unknown style {self.style!r}")
        if self.twist not in ("trivial", "canonical"):
            raise ModelError(f"unknown twist {self.twist!r}")
        object.__setattr__(self, "subgroup", frozenset(tuple(g) for g in self.subgroup))

    def describe(self, group: FiniteAbelianGroup) -> dict:
        return {"side": self.side, "style": self.style, "twist": self.twist,
                "subgroup": sorted(group.name(g) for g in self.subgroup)}


def subgroup_generators(G: FiniteAbelianGroup, subgroup: Iterable) -> list:
    """A small generating set of a subgroup, largest orders first."""
    sub = sorted({G.reduce(g) for g in subgroup}, key=lambda g: (-G.element_order(g), g))
    gens = []
    span = frozenset([G.identity])
    # prefer generators that split off a direct factor, so label exponents are independent
    for g in sub:
        if g not in span and len(G.generated_subgroup(gens + [g])) == len(span) * G.element_order(g):
            gens.append(g)
            span = G.generated_subgroup(gens)
    for g in sub:
        if g not in span:
            gens.append(g)
            span = G.generated_subgroup(gens)
    return gens


@dataclass
class ModelInstance:
    lattice: Lattice
    group: FiniteAbelianGroup
    variant: str
    cocycles: dict
    rules: list
    frames: dict
    terms: list
    boundaries: tuple = ()
    params: dict = field(default_factory=dict)
    dropped: list = field(default_factory=list)

    @property
    def modulus(self) -> int:
        return self.group.modulus

    def site(self, edge: Edge, kind, label, cocycle: Optional[Cocycle] = None) -> SiteOperator:
        """A single-site operator expressed in this model's frame for ``edge``."""
        kind = OpKind(kind) if not isinstance(kind, OpKind) else kind
        c = cocycle if cocycle is not None else self.cocycles.get("alpha")
        frame = self.frames.get(edge)
        if kind in TWISTED_Z:
            if frame is None:
                raise ModelError(f"edge {edge} has no dual frame for {kind.value}")
            return make(kind, label, c, group=self.group, frame=frame)
        op = make(kind, label, c, group=self.group)
        return op if frame is None else to_frame(op, frame)

    def operator(self, factors: Iterable, glob: int = 0) -> LatticeOperator:
        """Build an operator from (edge, kind, label) triples, composing repeats."""
        sites = {}
        for edge, kind, label in factors:
            op = self.site(edge, kind, label)
            sites[edge] = compose(sites[edge], op) if edge in sites else op
        return LatticeOperator(self.group, sites, glob)

    def localize(self, op: LatticeOperator) -> LatticeOperator:
        return op.in_frames(self.frames)

    def rule_term(self, rule_index: int, label) -> LatticeOperator:
        return _instantiate(self.rules[rule_index], self.group, self.frames, self.group.reduce(label))

    def terms_of_cell(self, cell: Cell) -> list:
        return [t for t in self.terms if t.cell == cell]

    @property
    def edges(self) -> list:
        return list(self.lattice.edges)

    def summary(self) -> dict:
        return {"variant": self.variant, "group": list(self.group.factors),
                "extents": list(self.lattice.extents), "periodic": list(self.lattice.periodic),
                "terms": len(self.terms), "edges": len(self.lattice.edges),
                "boundaries": [b.describe(self.group) for b in self.boundaries],
                "dropped": [str(c) for c in self.dropped]}


def _instantiate(rule: CellRule, G: FiniteAbelianGroup, frames: dict, label) -> LatticeOperator:
    sites = {}
    for f in rule.factors:
        lab = G.reduce(label) if f.sign == 1 else G.neg(label)
        frame = frames.get(f.edge)
        if f.kind in TWISTED_Z:
            op = make(f.kind, lab, f.cocycle, group=G, frame=frame)
        else:
            op = make(f.kind, lab, f.cocycle, group=G)
            if frame is not None:
                op = to_frame(op, frame)
        sites[f.edge] = compose(sites[f.edge], op) if f.edge in sites else op
    return LatticeOperator(G, sites)


def _assign_frames(rules: list, G: FiniteAbelianGroup) -> dict:
    frames = {}
    for r in rules:
        for f in r.factors:
            if f.kind in TWISTED_Z:
                fr = DualFrame.from_cocycle(f.cocycle)
                if frames.setdefault(f.edge, fr) != fr:
                    raise ModelError(f"edge {f.edge} needs two different dual frames")
    for r in rules:
        for f in r.factors:
            if f.edge in frames and f.kind in TWISTED_X and not f.cocycle.is_trivial:
                raise ModelError(f"edge {f.edge} carries both twisted X and twisted Z operators")
    return frames


def assemble(lattice: Lattice, G: FiniteAbelianGroup, variant: str, rules: list, cocycles: dict,
             boundaries: tuple = (), params: Optional[dict] = None) -> ModelInstance:
    frames = _assign_frames(rules, G)
    terms = []
    for i, rule in enumerate(rules):
        for g in subgroup_generators(G, rule.labels):
            op = _instantiate(rule, G, frames, g)
            terms.append(Term(i, rule.cell, rule.family, g, G.element_order(g), op))
    return ModelInstance(lattice, G, variant, dict(cocycles), list(rules), frames, terms,
                         tuple(boundaries), dict(params or {}))


# ---------------------------------------------------------------------------
# 2D models


def _require_exponent_two(G: FiniteAbelianGroup, what: str) -> None:
    if G.exponent != 2:
        raise ModelError(f"{what} is defined for groups of exponent 2; use general_abelian")


def _check_cocycle(c: Cocycle, G: FiniteAbelianGroup) -> None:
    if c.group != G:
        raise ModelError("cocycle lives on a different group")
    if not validate_cocycle(c):
        raise ModelError("invalid 2-cocycle")


_PLAQUETTE_SIDES = {
    # variant -> side -> (kind, sign)
    "h_alpha": {"left": (K.X_ALPHA_BAR, 1), "right": (K.X_ALPHA, 1), "top": (K.X, 1), "bottom": (K.X, 1)},
    "h_alpha_mirror": {"left": (K.X, 1), "right": (K.X, 1), "top": (K.X_ALPHA, 1), "bottom": (K.X_ALPHA_BAR, 1)},
    "h_alpha_alpha": {"left": (K.X_ALPHA_BAR, 1), "right": (K.X_ALPHA, 1),
                      "top": (K.X_ALPHA, 1), "bottom": (K.X_ALPHA_BAR, 1)},
    "general_abelian": {"left": (K.X_TILDE_ALPHA_BAR, 1), "right": (K.X_ALPHA, 1),
                        "top": (K.X, -1), "bottom": (K.X, 1)},
}

_VERTEX_SIDES = {
    "plain": {"left": (K.Z, 1), "right": (K.Z, 1), "top": (K.Z, 1), "bottom": (K.Z, 1)},
    "beta": {"left": (K.Z_BETA_BAR, 1), "right": (K.Z_BETA, 1), "top": (K.Z, 1), "bottom": (K.Z, 1)},
    "oriented": {"left": (K.Z, -1), "right": (K.Z, 1), "top": (K.Z, 1), "bottom": (K.Z, -1)},
}


def _side_factors(pairs: list, table: dict, cocycle: Cocycle) -> tuple:
    return tuple(Factor(e, table[s][0], table[s][1], cocycle) for e, s in pairs)


def _smooth_sides_of(l: Lattice, v: Cell, boundaries: dict) -> list:
    out = []
    for side in SIDES_2D:
        if l.periodic[0 if side in ("left", "right") else 1] or l.is_rough(side):
            continue
        axis = 0 if side in ("left", "right") else 1
        target = 0 if side in ("left", "bottom") else l.extents[axis]
        if v.coords[axis] == target:
            out.append(side)
    return out


def _build_2d(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle, variant: str, plaquette_key: str,
              vertex_key: str, boundaries: tuple = (), beta_cocycle: Optional[Cocycle] = None,
              params: Optional[dict] = None) -> ModelInstance:
    if l.dim != 2:
        raise ModelError(f"{variant} needs a 2D lattice")
    bmap = {b.side: b for b in boundaries}
    for side, b in bmap.items():
        if l.style(side) is None:
            raise ModelError(f"boundary spec on periodic side {side!r}")
        if l.style(side) != b.style:
            raise ModelError(f"side {side!r} of the lattice is {l.style(side)}, spec says {b.style}")
    all_elements = frozenset(G.elements)
    ptable = _PLAQUETTE_SIDES[plaquette_key]
    vtable = _VERTEX_SIDES[vertex_key]
    zc = beta_cocycle if beta_cocycle is not None else alpha
    rules = []
    for p in l.plaquettes:
        pairs = l.plaquette_edges(p)
        if len(pairs) == 4:
            rules.append(CellRule(p, "plaquette", "element", all_elements, _side_factors(pairs, ptable, alpha)))
    for v in l.vertices:
        pairs = l.vertex_edges(v)
        labels = all_elements
        table = dict(vtable)
        for side in _smooth_sides_of(l, v, bmap):
            spec = bmap.get(side)
            if spec is not None:
                labels = labels & spec.subgroup
                if side in ("bottom", "top") and spec.twist == "canonical":
                    table["left"] = (K.Z_BETA_BAR, 1)
                    table["right"] = (K.Z_BETA, 1)
                if side in ("left", "right") and spec.twist == "canonical":
                    # a twisted truncated vertex on a horizontal boundary
                    table["right" if side == "left" else "left"] = (
                        K.Z_BETA if side == "left" else K.Z_BETA_BAR, 1)
        family = "vertex" if len(pairs) == 4 else "boundary-vertex"
        rules.append(CellRule(v, family, "character", labels, _side_factors(pairs, table, zc)))
    for side, spec in bmap.items():
        rules.extend(_boundary_rules(l, G, alpha, side, spec))
    for side in SIDES_2D:
        if side not in bmap and l.is_rough(side):
            rules.extend(_boundary_rules(l, G, alpha, side,
                                         BoundarySpec(side, "rough", frozenset([G.identity]))))
    m = assemble(l, G, variant, rules, {"alpha": alpha, "beta_source": zc}, tuple(boundaries), params)
    return _drop_bad_corners(m)


def _corner_rules(m: ModelInstance) -> list:
    l = m.lattice
    out = []
    for i, r in enumerate(m.rules):
        if r.cell.kind == "vertex" and len(_smooth_sides_of(l, r.cell, {})) >= 2:
            out.append(i)
    return out


def _drop_bad_corners(m: ModelInstance) -> ModelInstance:
    """Remove corner terms that are projective or fail to commute with the rest."""
    corners = _corner_rules(m)
    if not corners:
        return m
    bad = set()
    G = m.group
    for i in corners:
        labels = sorted(m.rules[i].labels)
        ops = {g: m.rule_term(i, g) for g in labels}
        if any(not (ops[g] @ ops[h]).same_as(ops[G.add(g, h)]) for g in labels for h in labels):
            bad.add(i)
            continue
        mine = [t for t in m.terms if t.rule == i]
        others = [t for t in m.terms if t.rule != i]
        if any(not a.op.commutation(b.op).commutes for a in mine for b in others
               if set(a.op.sites) & set(b.op.sites)):
            bad.add(i)
    if not bad:
        return m
    rules = [r for i, r in enumerate(m.rules) if i not in bad]
    out = assemble(m.lattice, G, m.variant, rules, m.cocycles, m.boundaries, m.params)
    out.dropped = [m.rules[i].cell for i in sorted(bad)]
    return out


def _boundary_rules(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle, side: str, spec: BoundarySpec) -> list:
    if not G.is_subgroup(spec.subgroup):
        raise ModelError("boundary subgroup is not a subgroup")
    gamma = alpha if spec.twist == "canonical" else trivial_cocycle(G)
    if spec.twist == "canonical" and not validate_cocycle(gamma):
        raise ModelError("boundary twist is not a cocycle")
    rules = []
    perp = G.annihilator(spec.subgroup)
    if spec.style == "rough":
        gb = {"left": ({"top": K.X_ALPHA, "right": K.X_ALPHA, "bottom": K.X_ALPHA_BAR}),
              "right": ({"top": K.X_ALPHA, "left": K.X_ALPHA_BAR, "bottom": K.X_ALPHA_BAR}),
              "bottom": ({"left": K.X_ALPHA_BAR, "right": K.X_ALPHA, "top": K.X}),
              "top": ({"left": K.X_ALPHA_BAR, "right": K.X_ALPHA, "bottom": K.X})}[side]
        if len(spec.subgroup) > 1:
            for p in l.boundary_plaquettes(side):
                factors = []
                for e, s in l.plaquette_edges(p):
                    kind = gb[s]
                    # the edge shared with the bulk keeps the bulk twist; the rest carry gamma
                    shared = (side in ("left", "right") and s in ("left", "right"))
                    c = alpha if shared else gamma
                    if kind in TWISTED_X and c.is_trivial:
                        kind = K.X
                    factors.append(Factor(e, kind, 1, alpha if shared else gamma))
                rules.append(CellRule(p, f"boundary-{side}", "element", spec.subgroup, tuple(factors)))
        if len(perp) > 1:
            for e in l.dangling_edges(side):
                rules.append(CellRule(Cell("edge", (e.axis,) + tuple(e.base)), f"boundary-{side}",
                                      "character", perp, (Factor(e, K.Z, 1, None),)))
    else:
        kernel = G.annihilator(spec.subgroup)
        if len(kernel) > 1:
            if side in ("left", "right"):
                kind = K.X_ALPHA if side == "left" else K.X_ALPHA_BAR
                edges = l.boundary_edges(side)
            else:
                kind = K.X
                edges = l.boundary_edges(side)
            for e in edges:
                if not l.has_edge(e.axis, *e.base):
                    continue
                rules.append(CellRule(Cell("edge", (e.axis,) + tuple(e.base)), f"boundary-{side}",
                                      "element", kernel, (Factor(e, kind, 1, alpha),)))
    return rules


def build_h_alpha(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle, *, mirror: bool = False,
                  boundaries: tuple = ()) -> ModelInstance:
    """Plaquettes twisted on their vertical edges (or horizontal ones with ``mirror``)."""
    _require_exponent_two(G, "h_alpha")
    _check_cocycle(alpha, G)
    key = "h_alpha_mirror" if mirror else "h_alpha"
    return _build_2d(l, G, alpha, "h_alpha", key, "plain", boundaries,
                     params={"mirror": mirror})


def build_untwisted(l: Lattice, G: FiniteAbelianGroup) -> ModelInstance:
    if l.dim == 3:
        return build_3d_surface(l, G, trivial_cocycle(G), variant="tc_untwisted")
    alpha = trivial_cocycle(G)
    m = _build_2d(l, G, alpha, "tc_untwisted", "general_abelian", "oriented")
    return m


def build_h_alpha_alpha(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle) -> ModelInstance:
    _require_exponent_two(G, "h_alpha_alpha")
    _check_cocycle(alpha, G)
    return _build_2d(l, G, alpha, "h_alpha_alpha", "h_alpha_alpha", "plain")


def build_h_alpha_beta(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle,
                       beta_source: Optional[Cocycle] = None) -> ModelInstance:
    """Plaquettes twisted by alpha and vertices by the dual cocycle.

    ``beta_source`` is the cocycle on G whose pullback along the duality
    defines beta; it defaults to alpha itself, giving beta = alpha o (phi x phi).
    """
    _require_exponent_two(G, "h_alpha_beta")
    _check_cocycle(alpha, G)
    src = beta_source if beta_source is not None else alpha
    _check_cocycle(src, G)
    if src.is_trivial:
        return _build_2d(l, G, alpha, "h_alpha_beta", "h_alpha", "plain")
    return _build_2d(l, G, alpha, "h_alpha_beta", "h_alpha", "beta", beta_cocycle=src)


def build_general_abelian(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle) -> ModelInstance:
    _check_cocycle(alpha, G)
    return _build_2d(l, G, alpha, "general_abelian", "general_abelian", "oriented")


def build_boundary(m: ModelInstance, spec: BoundarySpec) -> ModelInstance:
    """Rebuild ``m`` with the boundary terms of ``spec`` on its side."""
    if m.lattice.dim != 2:
        raise ModelError("boundaries are only built in 2D")
    if m.variant not in ("h_alpha", "tc_untwisted"):
        raise ModelError("boundary Hamiltonians are defined on top of h_alpha")
    if m.lattice.style(spec.side) is None:
        raise ModelError(f"side {spec.side!r} is periodic")
    rest = tuple(b for b in m.boundaries if b.side != spec.side) + (spec,)
    alpha = m.cocycles["alpha"]
    if m.variant == "h_alpha":
        key = "h_alpha_mirror" if m.params.get("mirror") else "h_alpha"
        return _build_2d(m.lattice, m.group, alpha, "h_alpha", key, "plain", rest, params=m.params)
    return _build_2d(m.lattice, m.group, alpha, "tc_untwisted", "general_abelian", "oriented", rest)


def boundary_lattice(side: str, style: str, px: int = 4, py: int = 4) -> Lattice:
    """Open patch with ``style`` on ``side`` and smooth sides elsewhere."""
    return Lattice.open_patch(px, py, **{side: style})


# ---------------------------------------------------------------------------
# 3D models


def build_3d_surface(l: Lattice, G: FiniteAbelianGroup, alpha: Cocycle, variant: str = "sc3d_alpha") -> ModelInstance:
    """Vertex terms twisted along z (X^alpha below, X~^alphabar above), face terms of plain Z."""
    if l.dim != 3:
        raise ModelError("the 3D surface code needs a 3D lattice")
    _check_cocycle(alpha, G)
    if not alpha.is_trivial:
        _require_exponent_two(G, "sc3d_alpha")
    elements = frozenset(G.elements)
    rules = []
    for v in l.vertices:
        factors = []
        for e, s in l.vertex_edges(v):
            if s == "-z":
                factors.append(Factor(e, K.X_ALPHA if not alpha.is_trivial else K.X,
                                      1 if not alpha.is_trivial else -1, alpha))
            elif s == "+z":
                factors.append(Factor(e, K.X_TILDE_ALPHA_BAR if not alpha.is_trivial else K.X, 1, alpha))
            else:
                factors.append(Factor(e, K.X, 1 if s.startswith("+") else -1, alpha))
        rules.append(CellRule(v, "vertex", "element", elements, tuple(factors)))
    for f in l.faces:
        factors = []
        for e, s in l.face_edges(f):
            orient = f.kind.split("-")[1]
            a_axis = "xyz".index(orient[0])
            # edges along the first axis: +chi at the low side, -chi at the high side;
            # edges along the second axis: -chi at the low side, +chi at the high side
            low = s.startswith("-")
            along_first = e.axis == a_axis
            sg = (1 if low else -1) if along_first else (-1 if low else 1)
            factors.append(Factor(e, K.Z, sg, None))
        rules.append(CellRule(f, "face", "character", elements, tuple(factors)))
    return assemble(l, G, variant, rules, {"alpha": alpha})


def build_xcube(l: Lattice, G: FiniteAbelianGroup, beta_source: Cocycle) -> ModelInstance:
    """X-cube with the xy and yz vertex flavors twisted along y."""
    if l.dim != 3:
        raise ModelError("the X-cube model needs a 3D lattice")
    _require_exponent_two(G, "xcube_beta")
    _check_cocycle(beta_source, G)
    elements = frozenset(G.elements)
    twisted = not beta_source.is_trivial
    rules = []
    for c in l.cubes:
        rules.append(CellRule(c, "cube", "element", elements,
                              tuple(Factor(e, K.X, 1, None) for e, _ in l.cube_edges(c))))
    for flavor in ("xy", "yz", "xz"):
        for v in l.vertices:
            factors = []
            for e, s in l.xcube_vertex_edges(v, flavor):
                if twisted and flavor in ("xy", "yz") and s == "+y":
                    factors.append(Factor(e, K.Z_BETA, 1, beta_source))
                elif twisted and flavor in ("xy", "yz") and s == "-y":
                    factors.append(Factor(e, K.Z_BETA_BAR, 1, beta_source))
                else:
                    factors.append(Factor(e, K.Z, 1, None))
            rules.append(CellRule(Cell("vertex-" + flavor, v.coords), "vertex-" + flavor, "character",
                                  elements, tuple(factors)))
    return assemble(l, G, "xcube_beta", rules, {"alpha": beta_source, "beta_source": beta_source})


# ---------------------------------------------------------------------------
# consistency checks


@dataclass
class CommutationReport:
    pairs_checked: int
    failures: list          # (term index, term index, phase string)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"pairs_checked": self.pairs_checked, "ok": self.ok,
                "failures": [{"terms": [i, j], "phase": p} for i, j, p in self.failures[:50]],
                "failure_count": len(self.failures)}


def term_overlaps(m: ModelInstance) -> list:
    """Pairs (i, j), i < j, of terms sharing at least one edge."""
    by_edge = {}
    for i, t in enumerate(m.terms):
        for e in t.op.sites:
            by_edge.setdefault(e, []).append(i)
    pairs = set()
    for idx in by_edge.values():
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                pairs.add((idx[a], idx[b]))
    return sorted(pairs)


def check_commutation(m: ModelInstance, jobs: int = 1) -> CommutationReport:
    pairs = term_overlaps(m)

    def run(chunk):
        bad = []
        for i, j in chunk:
            c = m.terms[i].op.commutation(m.terms[j].op)
            if not c.commutes:
                bad.append((i, j, str(c)))
        return bad

    if jobs > 1 and len(pairs) > 2000:
        from concurrent.futures import ThreadPoolExecutor
        size = (len(pairs) + jobs - 1) // jobs
        chunks = [pairs[k:k + size] for k in range(0, len(pairs), size)]
        with ThreadPoolExecutor(jobs) as ex:
            failures = [x for part in ex.map(run, chunks) for x in part]
    else:
        failures = run(pairs)
    return CommutationReport(len(pairs), sorted(failures))


def check_linearity(m: ModelInstance) -> list:
    """Rules whose labels do not compose linearly: (rule index, g, h)."""
    bad = []
    G = m.group
    for i, rule in enumerate(m.rules):
        labels = sorted(rule.labels)
        cache = {g: m.rule_term(i, g) for g in labels}
        for g in labels:
            for h in labels:
                if not (cache[g] @ cache[h]).same_as(cache[G.add(g, h)]):
                    bad.append((i, g, h))
    return bad


def check_hermiticity(m: ModelInstance) -> list:
    bad = []
    G = m.group
    for i, rule in enumerate(m.rules):
        for g in rule.labels:
            if not m.rule_term(i, g).dagger().same_as(m.rule_term(i, G.neg(g))):
                bad.append((i, g))
    return bad


# ---------------------------------------------------------------------------
# convenience


def z22() -> FiniteAbelianGroup:
    return FiniteAbelianGroup((2, 2))


def build(variant: str, lattice: Lattice, group: Optional[FiniteAbelianGroup] = None,
          alpha: Optional[Cocycle] = None, **kw) -> ModelInstance:
    """Dispatch on a variant name."""
    G = group or z22()
    if alpha is None:
        alpha = canonical_z22_cocycle() if G.factors == (2, 2) else trivial_cocycle(G)
    if variant == "tc_untwisted":
        return build_untwisted(lattice, G)
    if variant == "h_alpha":
        m = build_h_alpha(lattice, G, alpha, mirror=kw.get("mirror", False))
        for b in kw.get("boundaries", ()):
            m = build_boundary(m, b)
        return m
    if variant == "h_alpha_alpha":
        return build_h_alpha_alpha(lattice, G, alpha)
    if variant == "h_alpha_beta":
        return build_h_alpha_beta(lattice, G, alpha, kw.get("beta_source"))
    if variant == "general_abelian":
        return build_general_abelian(lattice, G, alpha)
    if variant == "sc3d_alpha":
        return build_3d_surface(lattice, G, alpha)
    if variant == "xcube_beta":
        return build_xcube(lattice, G, alpha)
    raise ModelError(f"unknown variant {variant!r}")
