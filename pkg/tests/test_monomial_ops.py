import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.abelian_group import FiniteAbelianGroup, canonical_z22_cocycle, pairing_cocycle, slant_product
from twistlab.cyclotomic import RootSum, cyclotomic_poly
from twistlab.monomial_ops import (
    DualFrame,
    MonomialError,
    OpKind,
    SiteOperator,
    as_array,
    as_dense,
    commutation_phase,
    compose,
    dagger,
    make,
    to_frame,
    trace,
    x_dagger,
)

ALPHA = canonical_z22_cocycle()
G = ALPHA.group
FRAME = DualFrame.from_cocycle(ALPHA)
X_KINDS = (OpKind.X, OpKind.X_ALPHA, OpKind.X_ALPHA_BAR)


def test_site_operator_normalizes_phase():
    op = SiteOperator(G, (1, 0), (1, 1, 2, 3), 0)
    assert op.diag == (0, 0, 1, 2) and op.glob == 1
    with pytest.raises(MonomialError):
        SiteOperator(G, (0, 0), (0, 0))


def test_compose_matches_matrix_product():
    for k1, k2 in itertools.product(X_KINDS + (OpKind.Z,), repeat=2):
        for g, h in itertools.product(G.elements, repeat=2):
            A = make(k1, g, ALPHA, group=G)
            B = make(k2, h, ALPHA, group=G)
            assert as_dense(compose(A, B)) == as_dense(A) * as_dense(B)


def test_dagger_is_inverse_and_adjoint():
    for kind in X_KINDS:
        for g in G.elements:
            A = make(kind, g, ALPHA)
            assert compose(A, dagger(A)).is_identity
            assert as_dense(dagger(A)) == as_dense(A).H


def test_conjugate_representation_commutes_with_projective_one():
    for g, h in itertools.product(G.elements, repeat=2):
        assert commutation_phase(make(OpKind.X_ALPHA, g, ALPHA), make(OpKind.X_ALPHA_BAR, h, ALPHA)).commutes
        assert as_dense(make(OpKind.X_ALPHA_BAR, g, ALPHA)) == as_dense(make(OpKind.X_ALPHA, g, ALPHA)).conjugate()


def test_twisted_pair_is_linear():
    # X^alphabar_g X^alpha_g = Z_ghat, and the pair is a linear representation
    for g in G.elements:
        pair = compose(make(OpKind.X_ALPHA_BAR, g, ALPHA), make(OpKind.X_ALPHA, g, ALPHA))
        assert pair == make(OpKind.Z, slant_product(ALPHA, g), group=G)


def test_dual_frame_operators():
    for g in G.elements:
        chi = slant_product(ALPHA, g)
        zb = make(OpKind.Z_BETA, chi, ALPHA, frame=FRAME)
        zbb = make(OpKind.Z_BETA_BAR, chi, ALPHA, frame=FRAME)
        assert compose(zbb, zb) == make(OpKind.X, g, group=G, frame=FRAME)
        # Z^beta is monomial only in the dual frame
        if g != G.identity:
            with pytest.raises(MonomialError):
                to_frame(zb, None)
        for h in G.elements:
            c = commutation_phase(zb, make(OpKind.X, h, group=G, frame=FRAME))
            assert c.phase.value == G.character(chi, h)


def test_mixed_frames_rejected():
    with pytest.raises(MonomialError):
        compose(make(OpKind.X, (1, 0), group=G), make(OpKind.X, (1, 0), group=G, frame=FRAME))


def test_traces_are_exact():
    assert trace(make(OpKind.X, (0, 0), group=G)) == 4
    assert trace(make(OpKind.X, (1, 0), group=G)) == 0
    assert trace(make(OpKind.Z, (1, 0), group=G)) == 0
    assert trace(x_dagger(G, (0, 0))) == 4


def test_as_array_is_unitary():
    for kind in X_KINDS:
        U = as_array(make(kind, (1, 1), ALPHA))
        assert np.allclose(U @ U.conj().T, np.eye(4))


def test_cyclotomic_reduction():
    assert cyclotomic_poly(4) == (1, 0, 1)
    # 1 + i + i^2 + i^3 = 0
    assert RootSum.from_phases(4, range(4)) == 0
    assert RootSum.from_phases(8, [0, 4]) == 0
    assert RootSum.root(4, 1) * RootSum.root(4, 3) == 1
    assert RootSum.from_phases(6, [1, 5]).as_integer() == 1
    assert RootSum.root(8, 1).as_integer() is None


Z2Z4 = FiniteAbelianGroup((2, 4))
C24 = pairing_cocycle(Z2Z4, [[0, 2], [0, 0]])
elements = st.sampled_from(Z2Z4.elements)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_projective_relations_general_group(g, h, k):
    N = Z2Z4.modulus
    xg, xh = make(OpKind.X_ALPHA, g, C24), make(OpKind.X_ALPHA, h, C24)
    prod = compose(xg, xh)
    assert prod == make(OpKind.X_ALPHA, Z2Z4.add(g, h), C24).with_phase(C24.value_int(g, h))
    # associativity and the commutation phase as the slant character
    xk = make(OpKind.X_ALPHA, k, C24)
    assert compose(compose(xg, xh), xk) == compose(xg, compose(xh, xk))
    assert commutation_phase(xg, xh).phase.value == Z2Z4.character(slant_product(C24, g), h)
    # Z_chi X_g = chi(g) X_g Z_chi for every X kind
    for kind in X_KINDS:
        c = commutation_phase(make(OpKind.Z, k, group=Z2Z4), make(kind, g, C24))
        assert c.phase.value == Z2Z4.character(k, g)
    assert prod.power(N) == SiteOperator.identity(Z2Z4)
