import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.abelian_group import FiniteAbelianGroup, canonical_z22_cocycle, pairing_cocycle, trivial_cocycle
from twistlab.lattice import Cell, Lattice
from twistlab.model_builder import (
    VARIANTS,
    BoundarySpec,
    LatticeOperator,
    ModelError,
    OpKind,
    boundary_lattice,
    build,
    build_boundary,
    build_h_alpha,
    check_commutation,
    check_hermiticity,
    check_linearity,
    subgroup_generators,
)

K = OpKind
A, B = (1, 0), (0, 1)


def test_term_counts():
    m = build("h_alpha", Lattice.torus(3, 3))
    # one term per generator label on each of 9 vertices and 9 plaquettes
    assert len(m.terms) == 36 and len(m.rules) == 18
    assert m.summary()["edges"] == 18
    assert len(build("sc3d_alpha", Lattice.torus(2, 2, 2)).terms) == 64
    x = build("xcube_beta", Lattice.torus(2, 2, 2))
    assert {t.family for t in x.terms} == {"cube", "vertex-xy", "vertex-yz", "vertex-xz"}


def test_h_alpha_plaquette_content():
    m = build("h_alpha", Lattice.torus(3, 3))
    idx = next(i for i, r in enumerate(m.rules) if r.cell == Cell("plaquette", (1, 1)))
    term = m.localize(m.rule_term(idx, A))
    e = m.lattice.edge
    expected = m.localize(m.operator([(e(1, 1, 1), K.X_ALPHA_BAR, A), (e(1, 2, 1), K.X_ALPHA, A),
                                      (e(0, 1, 1), K.X, A), (e(0, 1, 2), K.X, A)]))
    assert term.same_as(expected)


@pytest.mark.parametrize("variant", [v for v in VARIANTS if v not in ("sc3d_alpha", "xcube_beta")])
def test_terms_linear_and_hermitian_2d(variant):
    m = build(variant, Lattice.torus(2, 3))
    assert check_linearity(m) == []
    assert check_hermiticity(m) == []


def test_general_abelian_z4_and_z2z4():
    z4 = FiniteAbelianGroup((4,))
    m = build("general_abelian", Lattice.torus(2, 2), z4, trivial_cocycle(z4))
    assert check_commutation(m).ok and check_hermiticity(m) == []
    G = FiniteAbelianGroup((2, 4))
    m = build("general_abelian", Lattice.torus(2, 2), G, pairing_cocycle(G, [[0, 2], [0, 0]]))
    assert check_commutation(m).ok and check_linearity(m) == []


def test_exponent_two_required():
    z4 = FiniteAbelianGroup((4,))
    with pytest.raises(ModelError):
        build("h_alpha", Lattice.torus(2, 2), z4, trivial_cocycle(z4))


def test_unknown_variant_and_bad_boundaries():
    with pytest.raises(ModelError):
        build("h_beta", Lattice.torus(2, 2))
    with pytest.raises(ModelError):
        BoundarySpec("left", "wavy", frozenset([(0, 0)]))
    with pytest.raises(ModelError):
        build_boundary(build("h_alpha", Lattice.torus(2, 2)), BoundarySpec("left", "rough", frozenset([(0, 0)])))
    with pytest.raises(ModelError):
        build_boundary(build("h_alpha_alpha", Lattice.open_patch(3, 3)),
                       BoundarySpec("left", "smooth", frozenset([(0, 0)])))


def test_smooth_left_canonical_negative_control():
    # twisting the truncated vertex terms on a smooth left side cannot commute with the bulk
    G = FiniteAbelianGroup((2, 2))
    m = build_boundary(build_h_alpha(boundary_lattice("left", "smooth"), G, canonical_z22_cocycle()),
                       BoundarySpec("left", "smooth", frozenset(G.elements), "canonical"))
    assert not check_commutation(m).ok


def test_subgroup_generators():
    G = FiniteAbelianGroup((2, 4))
    gens = subgroup_generators(G, G.elements)
    assert len(gens) == 2 and len(G.generated_subgroup(gens)) == 8
    assert subgroup_generators(G, [(0, 0)]) == []


def test_operator_algebra():
    m = build("h_alpha", Lattice.torus(3, 3))
    e = m.lattice.edge
    op = m.operator([(e(1, 0, 0), K.X_ALPHA, A), (e(0, 0, 0), K.Z, B)])
    assert (op @ op.dagger()).is_identity
    assert op.power(4).is_identity
    # composing on a repeated edge happens inside operator()
    twice = m.operator([(e(0, 0, 0), K.X, A), (e(0, 0, 0), K.X, A)])
    assert twice.is_identity
    assert LatticeOperator.identity(m.group).is_scalar


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(["h_alpha", "h_alpha_alpha", "h_alpha_beta", "tc_untwisted", "general_abelian"]),
       st.integers(2, 4), st.integers(2, 4))
def test_torus_models_commute(variant, px, py):
    assert check_commutation(build(variant, Lattice.torus(px, py))).ok
