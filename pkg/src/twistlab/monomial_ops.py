"""Exact single-site operators on the group algebra C[G].

Every operator used by the models is monomial: a left translation composed
with a diagonal of roots of unity and a global phase,

    |k>  ->  exp(2 pi i (glob + diag[k]) / N) |perm + k>

with all phases stored as integers modulo ``N = group.modulus``.

The dual-cocycle operators Z^beta are not monomial in the group basis.  They
are monomial after conjugation by the character transform V, and so are X_g
and Z_chi.  A SiteOperator therefore carries a frame: ``None`` for the group
basis, or a ``DualFrame`` meaning that the stored monomial is V O V^dagger.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import sympy

from .abelian_group import Cocycle, FiniteAbelianGroup, Phase, default_duality
from .cyclotomic import RootSum


class OpKind(enum.Enum):
    X = "X"
    X_ALPHA = "Xalpha"
    X_ALPHA_BAR = "Xalphabar"
    X_TILDE_ALPHA_BAR = "Xtildealphabar"
    Z = "Z"
    Z_BETA = "Zbeta"
    Z_BETA_BAR = "Zbetabar"

    @property
    def is_z_kind(self) -> bool:
        return self in (OpKind.Z, OpKind.Z_BETA, OpKind.Z_BETA_BAR)


@dataclass(frozen=True)
class DualFrame:
    """Frame obtained by conjugating with V[g'][h] = psi_{g'}(h) / sqrt|G|.

    ``psi`` maps each element index g' to the exponents of a character and
    is the inverse of a duality isomorphism phi.
    """

    group: FiniteAbelianGroup
    psi: tuple

    @classmethod
    def from_cocycle(cls, c: Cocycle) -> "DualFrame":
        G = c.group
        inv = {g: chi for chi, g in default_duality(c).items()}
        return cls(G, tuple(inv[g] for g in G.elements))

    @property
    def phi(self) -> dict:
        G = self.group
        return {chi: G.elements[i] for i, chi in enumerate(self.psi)}


class MonomialError(ValueError):
    pass


@dataclass(frozen=True)
class SiteOperator:
    group: FiniteAbelianGroup
    perm: tuple
    diag: tuple
    glob: int = 0
    frame: Optional[DualFrame] = None

    def __post_init__(self):
        N = self.group.modulus
        d = tuple(int(x) % N for x in self.diag)
        if len(d) != self.group.order:
            raise MonomialError("diagonal has the wrong length")
        shift = d[0]
        object.__setattr__(self, "perm", self.group.reduce(self.perm))
        object.__setattr__(self, "diag", tuple((x - shift) % N for x in d))
        object.__setattr__(self, "glob", (int(self.glob) + shift) % N)

    @classmethod
    def identity(cls, group: FiniteAbelianGroup, frame=None) -> "SiteOperator":
        return cls(group, group.identity, (0,) * group.order, 0, frame)

    @property
    def modulus(self) -> int:
        return self.group.modulus

    @property
    def is_identity(self) -> bool:
        return self.is_diagonal and self.glob == 0 and not any(self.diag)

    @property
    def is_diagonal(self) -> bool:
        return self.perm == self.group.identity

    @property
    def is_scalar(self) -> bool:
        return self.is_diagonal and not any(self.diag)

    @property
    def global_phase(self) -> Phase:
        return Phase(Fraction(self.glob, self.modulus))

    def with_phase(self, k: int) -> "SiteOperator":
        return SiteOperator(self.group, self.perm, self.diag, self.glob + k, self.frame)

    def __matmul__(self, other: "SiteOperator") -> "SiteOperator":
        return compose(self, other)

    def power(self, k: int) -> "SiteOperator":
        if k < 0:
            return dagger(self).power(-k)
        out = SiteOperator.identity(self.group, self.frame)
        base = self
        while k:
            if k & 1:
                out = compose(out, base)
            base = compose(base, base)
            k >>= 1
        return out

    def describe(self) -> str:
        frame = "dual" if self.frame is not None else "direct"
        return f"perm={self.perm} diag={self.diag} glob={self.glob}/{self.modulus} frame={frame}"


@dataclass(frozen=True)
class Commutation:
    """AB = exp(2 pi i phase) BA, or ``phase is None`` when no scalar exists."""

    phase: Optional[Phase]

    @property
    def is_scalar(self) -> bool:
        return self.phase is not None

    @property
    def commutes(self) -> bool:
        return self.phase is not None and not self.phase

    def __str__(self) -> str:
        return "NonScalar" if self.phase is None else f"Scalar({self.phase})"


NON_SCALAR = Commutation(None)


def _check_pair(A: SiteOperator, B: SiteOperator) -> None:
    if A.group != B.group:
        raise MonomialError("operators act on different groups")
    if A.frame != B.frame:
        raise MonomialError("operators are stored in different frames")


def compose(A: SiteOperator, B: SiteOperator) -> SiteOperator:
    """The product A B (B acts first)."""
    _check_pair(A, B)
    G = A.group
    add = G.add_table
    p = G.index(B.perm)
    row = add[p]
    dA, dB = A.diag, B.diag
    diag = tuple(dB[k] + dA[row[k]] for k in range(G.order))
    return SiteOperator(G, G.add(A.perm, B.perm), diag, A.glob + B.glob, A.frame)


def dagger(A: SiteOperator) -> SiteOperator:
    G = A.group
    inv = G.neg(A.perm)
    row = G.add_table[G.index(inv)]
    diag = tuple(-A.diag[row[m]] for m in range(G.order))
    return SiteOperator(G, inv, diag, -A.glob, A.frame)


def commutation_phase(A: SiteOperator, B: SiteOperator) -> Commutation:
    AB = compose(A, B)
    BA = compose(B, A)
    N = A.modulus
    diffs = {(a - b) % N for a, b in zip(AB.diag, BA.diag)}
    if len(diffs) != 1:
        return NON_SCALAR
    return Commutation(Phase(Fraction((AB.glob - BA.glob + diffs.pop()) % N, N)))


def trace(A: SiteOperator) -> RootSum:
    """Exact trace in whichever frame A is stored (traces are frame independent)."""
    N = A.modulus
    if not A.is_diagonal:
        return RootSum.zero(N)
    return RootSum.from_phases(N, (A.glob + d for d in A.diag))


def _character_diag(G: FiniteAbelianGroup, chi: Sequence[int]) -> tuple:
    return tuple(G.character_int(chi, k) for k in G.elements)


def _weyl_to_dual(A: SiteOperator, frame: DualFrame) -> SiteOperator:
    """Conjugate a direct-frame operator exp(i w) X_p Z_chi into the dual frame."""
    G = A.group
    chi = _diag_character(A)
    if chi is None:
        raise MonomialError("operator is not monomial in the dual frame")
    # V X_p V^dagger is diagonal with entries psi_{g'}(p)
    xpart = SiteOperator(G, G.identity,
                         tuple(G.character_int(frame.psi[i], A.perm) for i in range(G.order)),
                         0, frame)
    # V Z_chi V^dagger translates by -phi(chi)
    zpart = SiteOperator(G, G.neg(frame.phi[chi]), (0,) * G.order, 0, frame)
    return compose(xpart, zpart).with_phase(A.glob)


def _dual_to_direct(A: SiteOperator) -> SiteOperator:
    """Inverse of _weyl_to_dual for operators of Weyl type in the dual frame."""
    G = A.group
    frame = A.frame
    theta = _diag_character(A)
    if theta is None:
        raise MonomialError("operator is not monomial in the group basis")
    # A = w X_q D_theta in the dual frame, with D_theta = V X_p V^dagger where
    # psi_{g'}(p) = theta(g'), and X_q = V Z_chi V^dagger where phi(chi) = -q.
    p = next(h for h in G.elements
             if all(G.character_int(frame.psi[i], h) == G.character_int(theta, G.elements[i])
                    for i in range(G.order)))
    chi = {g: c for c, g in frame.phi.items()}[G.neg(A.perm)]
    xp = SiteOperator(G, p, (0,) * G.order, 0, None)
    zc = SiteOperator(G, G.identity, _character_diag(G, chi), 0, None)
    return compose(zc, xp).with_phase(A.glob)


def _diag_character(A: SiteOperator):
    """Exponents chi with diag[k] = chi(k), or None."""
    G = A.group
    for chi in G.elements:
        if all(G.character_int(chi, k) == A.diag[i] for i, k in enumerate(G.elements)):
            return chi
    return None


def to_frame(A: SiteOperator, frame: Optional[DualFrame]) -> SiteOperator:
    if A.frame == frame:
        return A
    if A.frame is None:
        return _weyl_to_dual(A, frame)
    direct = _dual_to_direct(A)
    return direct if frame is None else _weyl_to_dual(direct, frame)


def _direct_x(G, kind: OpKind, g, c: Optional[Cocycle]) -> SiteOperator:
    N = G.modulus
    if kind is OpKind.X:
        return SiteOperator(G, g, (0,) * G.order)
    if c is None:
        raise MonomialError(f"{kind.value} needs a cocycle")
    if c.group != G:
        raise MonomialError("cocycle is defined on a different group")
    if kind is OpKind.X_ALPHA:
        return SiteOperator(G, g, tuple(c.value_int(g, h) for h in G.elements))
    if kind is OpKind.X_ALPHA_BAR:
        return SiteOperator(G, g, tuple(-c.value_int(g, h) % N for h in G.elements))
    # X~^abar_g |h> = abar(h g^-1, g) |h g^-1>
    return SiteOperator(G, G.neg(g), tuple(-c.value_int(G.sub(h, g), g) % N for h in G.elements))


@lru_cache(maxsize=4096)
def _make_cached(G, kind, label, c, frame):
    if kind is OpKind.Z:
        op = SiteOperator(G, G.identity, _character_diag(G, label))
        return op if frame is None else to_frame(op, frame)
    if kind in (OpKind.Z_BETA, OpKind.Z_BETA_BAR):
        if frame is None:
            raise MonomialError("Z^beta operators are only monomial in a dual frame")
        if c is None:
            raise MonomialError(f"{kind.value} needs a cocycle")
        g = frame.phi[label]
        twisted = OpKind.X_ALPHA if kind is OpKind.Z_BETA else OpKind.X_ALPHA_BAR
        op = _direct_x(G, twisted, g, c)
        return SiteOperator(G, op.perm, op.diag, op.glob, frame)
    op = _direct_x(G, kind, label, c)
    if frame is None:
        return op
    if kind is not OpKind.X and not (c is not None and c.is_trivial):
        raise MonomialError(f"{kind.value} is not monomial in a dual frame")
    return to_frame(SiteOperator(G, op.perm, op.diag, op.glob), frame)


def make(kind, label, cocycle: Optional[Cocycle] = None, *, group: Optional[FiniteAbelianGroup] = None,
         frame: Optional[DualFrame] = None) -> SiteOperator:
    """Build a named operator.

    ``label`` is a group element for the X kinds and a character for the Z
    kinds.  Z^beta and Z^betabar take the cocycle alpha (on G) from which the
    dual frame's beta is pulled back, so Z^beta_chi = V^dagger X^alpha_{phi(chi)} V.
    """
    kind = OpKind(kind) if not isinstance(kind, OpKind) else kind
    G = group or (cocycle.group if cocycle is not None else None) or (frame.group if frame else None)
    if G is None:
        raise MonomialError("group is required")
    label = G.reduce(label)
    return _make_cached(G, kind, label, cocycle, frame)


def x_dagger(G: FiniteAbelianGroup, g, frame=None) -> SiteOperator:
    return make(OpKind.X, G.neg(G.reduce(g)), group=G, frame=frame)


def z_dagger(G: FiniteAbelianGroup, chi, frame=None) -> SiteOperator:
    return make(OpKind.Z, G.neg(G.reduce(chi)), group=G, frame=frame)


# ---- exact dense forms -------------------------------------------------

def _root(N: int, k: int):
    return sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(k % N, N))


@lru_cache(maxsize=None)
def v_matrix(frame: DualFrame) -> sympy.Matrix:
    G = frame.group
    N = G.modulus
    scale = 1 / sympy.sqrt(G.order)
    return sympy.Matrix(G.order, G.order,
                        lambda i, j: scale * _root(N, G.character_int(frame.psi[i], G.elements[j])))


def _monomial_dense(A: SiteOperator) -> sympy.Matrix:
    G = A.group
    N = A.modulus
    M = sympy.zeros(G.order, G.order)
    for j, k in enumerate(G.elements):
        i = G.index(G.add(A.perm, k))
        M[i, j] = _root(N, A.glob + A.diag[j])
    return M


def as_dense(A: SiteOperator) -> sympy.Matrix:
    """Exact matrix in the group basis |k>, rows indexed by the output state."""
    M = _monomial_dense(A)
    if A.frame is None:
        return M
    V = v_matrix(A.frame)
    return sympy.simplify(V.H * M * V)


def dense_equal(M1: sympy.Matrix, M2: sympy.Matrix) -> bool:
    return sympy.simplify(M1 - M2).is_zero_matrix


def as_array(A: SiteOperator):
    import numpy as np
    return np.array(as_dense(A).evalf(), dtype=complex)
