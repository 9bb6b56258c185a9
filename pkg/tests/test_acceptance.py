"""End-to-end checks, one group of tests per acceptance criterion.

Test names carry the criterion number; conftest prints one PASS/FAIL
line per criterion at the end of the run.
"""

import itertools
import time
from fractions import Fraction

import pytest
import sympy

from twistlab import analysis, peps
from twistlab.abelian_group import (
    FiniteAbelianGroup,
    Phase,
    canonical_z22_cocycle,
    image_subgroup,
    kernel_subgroup,
    pairing_cocycle,
    slant_product,
    trivial_cocycle,
    validate_cocycle,
)
from twistlab.analysis import K, StringSpec
from twistlab.exact_engine import gsd_dense, gsd_trace
from twistlab.lattice import Cell, Lattice
from twistlab.model_builder import (
    boundary_lattice,
    build,
    build_boundary,
    build_general_abelian,
    build_h_alpha,
    check_commutation,
)
from twistlab.monomial_ops import (
    DualFrame,
    as_dense,
    commutation_phase,
    compose,
    dense_equal,
    make,
    v_matrix,
)
from twistlab.stabilizer_engine import (
    InStabilizer,
    Logical,
    NotCentral,
    NotMember,
    Stabilizer,
    analyze,
    is_member,
    logical_relations,
    verify_logical,
)

A, B, AB, E = (1, 0), (0, 1), (1, 1), (0, 0)
I = sympy.I


def cells(syn):
    return sorted(str(c) for c in syn.cells)


# ---------------------------------------------------------------------------
# 1. algebra


def test_criterion_01_algebra(alpha):
    start = time.perf_counter()
    G = alpha.group
    assert validate_cocycle(alpha)

    # alpha table in units of i, rows and columns ordered e, a, b, ab
    table = [[0, 0, 0, 0], [0, 0, 1, 3], [0, 3, 0, 1], [0, 1, 3, 0]]
    assert [[alpha.value_int(g, h) for h in G.elements] for g in G.elements] == table

    xa = sympy.Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -I], [0, 0, I, 0]])
    xb = sympy.Matrix([[0, 0, 1, 0], [0, 0, 0, I], [1, 0, 0, 0], [0, -I, 0, 0]])
    assert as_dense(make(K.X_ALPHA, A, alpha)) == xa
    assert as_dense(make(K.X_ALPHA, B, alpha)) == xb
    assert as_dense(make(K.X_ALPHA, AB, alpha)) == -I * xa * xb

    for g, h in itertools.product(G.elements, repeat=2):
        lhs = as_dense(make(K.X_ALPHA, g, alpha)) * as_dense(make(K.X_ALPHA, h, alpha))
        rhs = I ** alpha.value_int(g, h) * as_dense(make(K.X_ALPHA, G.add(g, h), alpha))
        assert lhs == rhs
        xg, xh = make(K.X_ALPHA, g, alpha), make(K.X_ALPHA, h, alpha)
        anti = E != g != h != E
        assert commutation_phase(xg, xh).phase == Phase(Fraction(1, 2) if anti else 0)
        assert commutation_phase(xg, make(K.X_ALPHA_BAR, h, alpha)).commutes

    # Z_chi X^gamma_g = chi(g) X^gamma_g Z_chi
    for chi, g in itertools.product(G.elements, repeat=2):
        for kind in (K.X, K.X_ALPHA, K.X_ALPHA_BAR):
            z = as_dense(make(K.Z, chi, group=G))
            x = as_dense(make(kind, g, alpha))
            phase = sympy.exp(2 * sympy.pi * I * sympy.Rational(G.character(chi, g)))
            assert z * x == phase * x * z

    frame = DualFrame.from_cocycle(alpha)
    V = v_matrix(frame)
    V_text = sympy.Matrix([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]) / 2
    assert V == V_text
    for g in G.elements:
        ghat = slant_product(alpha, g)
        assert G.character(ghat, g) == 0 and (g == E) == (ghat == E)
        zhat = as_dense(make(K.Z, ghat, group=G))
        assert as_dense(make(K.X_ALPHA_BAR, g, alpha)) * as_dense(make(K.X_ALPHA, g, alpha)) == zhat
        zb = make(K.Z_BETA, ghat, alpha, frame=frame)
        zbb = make(K.Z_BETA_BAR, ghat, alpha, frame=frame)
        assert dense_equal(as_dense(zb), V * as_dense(make(K.X_ALPHA, g, alpha)) * V)
        assert dense_equal(as_dense(zbb) * as_dense(zb), as_dense(make(K.X, g, group=G)))
        assert V * zhat * V == as_dense(make(K.X, g, group=G))
    assert time.perf_counter() - start < 1.0


# ---------------------------------------------------------------------------
# 2. commutation and frustration


def _matrix_models():
    z22 = FiniteAbelianGroup((2, 2))
    z4 = FiniteAbelianGroup((4,))
    z2z4 = FiniteAbelianGroup((2, 4))
    out = {
        "h_alpha 3x3": lambda: build("h_alpha", Lattice.torus(3, 3)),
        "h_alpha 2x4": lambda: build("h_alpha", Lattice.torus(2, 4)),
        "h_alpha_alpha 3x3": lambda: build("h_alpha_alpha", Lattice.torus(3, 3)),
        "h_alpha_beta 2x4": lambda: build("h_alpha_beta", Lattice.torus(2, 4)),
        "general z22": lambda: build("general_abelian", Lattice.torus(3, 3)),
        "general z4": lambda: build("general_abelian", Lattice.torus(3, 3), z4, trivial_cocycle(z4)),
        "general z2xz4": lambda: build("general_abelian", Lattice.torus(2, 2), z2z4,
                                       pairing_cocycle(z2z4, [[0, 2], [0, 0]])),
        "sc3d 2x2x2": lambda: build("sc3d_alpha", Lattice.torus(2, 2, 2)),
        "xcube 2x2x2": lambda: build("xcube_beta", Lattice.torus(2, 2, 2)),
    }
    for side in ("left", "bottom"):
        for style in ("rough", "smooth"):
            for spec in analysis.boundary_classes(z22, side, style):
                name = f"{side} {style} {sorted(z22.name(g) for g in spec.subgroup)} {spec.twist}"
                out[name] = (lambda spec=spec: build_boundary(
                    build_h_alpha(boundary_lattice(spec.side, spec.style), z22, canonical_z22_cocycle()), spec))
    return out


MATRIX = _matrix_models()


@pytest.mark.parametrize("name", list(MATRIX))
def test_criterion_02_commuting_frustration_free(name):
    m = MATRIX[name]()
    rep = check_commutation(m)
    assert rep.ok, f"{len(rep.failures)} non-commuting term pairs"
    assert not analyze(m).frustrated


# ---------------------------------------------------------------------------
# 3. ground-state degeneracy


@pytest.mark.parametrize("px", [2, 3, 4])
@pytest.mark.parametrize("py", [3, 5])
def test_criterion_03_h_alpha_odd_rows(torus_models, px, py):
    assert analyze(torus_models("h_alpha", px, py)).gsd == 4


def test_criterion_03_h_alpha_alpha_3x3(torus_models):
    gsd = analyze(torus_models("h_alpha_alpha", 3, 3)).gsd
    assert gsd == 1


@pytest.mark.parametrize("px,py", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)])
def test_criterion_03_untwisted(torus_models, px, py):
    assert analyze(torus_models("tc_untwisted", px, py)).gsd == 16


@pytest.mark.parametrize("variant", ["tc_untwisted", "h_alpha", "h_alpha_alpha", "h_alpha_beta"])
@pytest.mark.parametrize("px,py", [(2, 2), (2, 3), (3, 2), (2, 4)])
def test_criterion_03_symbolic_matches_trace(torus_models, variant, px, py):
    m = torus_models(variant, px, py)
    assert analyze(m).gsd == gsd_trace(m)


@pytest.mark.parametrize("variant", ["tc_untwisted", "h_alpha", "h_alpha_alpha", "h_alpha_beta"])
def test_criterion_03_trace_matches_dense(torus_models, variant):
    m = torus_models(variant, 2, 2)
    assert gsd_trace(m) == gsd_dense(m)


# ---------------------------------------------------------------------------
# 4. size dependence


@pytest.mark.parametrize("px", [2, 3, 4])
@pytest.mark.parametrize("py", [2, 3, 4, 5])
def test_criterion_04_z2_membership(torus_models, px, py):
    m = torus_models("h_alpha", px, py)
    for chi in (A, B, AB):
        z2 = m.operator([(m.lattice.edge(1, x, 0), K.Z, chi) for x in range(px)])
        assert isinstance(is_member(m, z2), InStabilizer) == bool(py % 2)


@pytest.mark.parametrize("px", [2, 3, 4, 5])
@pytest.mark.parametrize("py", [2, 3, 4, 5])
def test_criterion_04_parity_relation(torus_models, px, py):
    m = torus_models("h_alpha_alpha", px, py)
    e = m.lattice.edge
    for g in (A, B, AB):
        chi = analysis.decoration_label(m, g)
        prod = analysis.plaquette_product(m, m.lattice.plaquettes, g)
        every_edge = m.operator([(x, K.Z, chi) for x in m.lattice.edges])
        assert m.localize(prod).same_as(m.localize(every_edge))
        loops = [(e(1, x, 0), K.Z, chi) for x in range(px)] * (py % 2)
        loops += [(e(0, 0, y), K.Z, chi) for y in range(py)] * (px % 2)
        assert isinstance(is_member(m, prod @ m.operator(loops).dagger()), InStabilizer)


# ---------------------------------------------------------------------------
# 5. logical inventory


@pytest.mark.parametrize("px,py", [(2, 4), (3, 4), (4, 2)])
def test_criterion_05_logical_inventory(torus_models, px, py):
    m = torus_models("h_alpha", px, py)
    e = m.lattice.edge
    for g in (A, B, AB):
        chi = analysis.decoration_label(m, g)
        ops = analysis.torus_logicals(m, g, chi)
        assert set(ops) == {"X1_even", "X1_odd", "Z1", "Z2", "Y2_odd", "Y2_even"}
        for name, op in ops.items():
            assert isinstance(verify_logical(m, op), Logical), name
        rel = logical_relations(m, ops, [("x", ["X1_odd", "X1_even"], "Z2"), ("y", ["Y2_odd", "Y2_even"], "Z1")])
        assert all(isinstance(r.result, InStabilizer) for r in rel["relations"])
        for kind in (K.X, K.X_ALPHA, K.X_ALPHA_BAR):
            bare = m.operator([(e(1, 1, y), kind, g) for y in range(py)])
            assert isinstance(verify_logical(m, bare), NotCentral)
        doubled = m.operator([(e(1, 1, y), K.X_ALPHA_BAR, g) for y in range(py)]
                             + [(e(1, 2, y), K.X_ALPHA, g) for y in range(py)])
        assert isinstance(is_member(m, doubled), InStabilizer)


# ---------------------------------------------------------------------------
# 6. excitation figures (6 x 6 torus, edge at (2, 2), label a, character b)

FIGURES = {
    "h_alpha": {
        "Xalphabar_v": ["plaquette(2, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Xalpha_v": ["plaquette(1, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Z_v": ["plaquette(1, 2)", "plaquette(2, 2)"],
        "Z_h": ["plaquette(2, 1)", "plaquette(2, 2)"],
        "X_h": ["vertex(2, 2)", "vertex(3, 2)"],
        "decorated_pair": ["vertex(2, 2)", "vertex(2, 4)"],
        "dipole": ["vertex(2, 2)", "vertex(2, 3)", "vertex(3, 2)", "vertex(3, 3)"],
    },
    "h_alpha_alpha": {
        "Xalphabar_v": ["plaquette(2, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Xalpha_v": ["plaquette(1, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Z_v": ["plaquette(1, 2)", "plaquette(2, 2)"],
        "Z_h": ["plaquette(2, 1)", "plaquette(2, 2)"],
        "Xalphabar_h": ["plaquette(2, 2)", "vertex(2, 2)", "vertex(3, 2)"],
        "Xalpha_h": ["plaquette(2, 1)", "vertex(2, 2)", "vertex(3, 2)"],
    },
    "h_alpha_beta": {
        "Xalphabar_v": ["plaquette(2, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Xalpha_v": ["plaquette(1, 2)", "vertex(2, 2)", "vertex(2, 3)"],
        "Z_v": ["plaquette(1, 2)", "plaquette(2, 2)"],
        "X_h": ["vertex(2, 2)", "vertex(3, 2)"],
        "Zbeta_h": ["plaquette(2, 1)", "plaquette(2, 2)", "vertex(2, 2)"],
        "Zbetabar_h": ["plaquette(2, 1)", "plaquette(2, 2)", "vertex(3, 2)"],
    },
}


def _figure_operator(m, name):
    e = m.lattice.edge
    single = {
        "Xalphabar_v": (e(1, 2, 2), K.X_ALPHA_BAR, A), "Xalpha_v": (e(1, 2, 2), K.X_ALPHA, A),
        "Z_v": (e(1, 2, 2), K.Z, B), "Z_h": (e(0, 2, 2), K.Z, B), "X_h": (e(0, 2, 2), K.X, A),
        "Xalphabar_h": (e(0, 2, 2), K.X_ALPHA_BAR, A), "Xalpha_h": (e(0, 2, 2), K.X_ALPHA, A),
        "Zbeta_h": (e(0, 2, 2), K.Z_BETA, B), "Zbetabar_h": (e(0, 2, 2), K.Z_BETA_BAR, B),
    }
    if name in single:
        return m.operator([single[name]])
    if name == "decorated_pair":
        return analysis.make_string(m, StringSpec("decorated_dyon", (2, 2), 2, label=A, direction="horizontal"))
    return analysis.make_string(m, StringSpec("dipole_pair", (2, 2), 1, label=A))


@pytest.mark.parametrize("variant,name", [(v, n) for v, figs in FIGURES.items() for n in figs])
def test_criterion_06_excitation_figures(torus_models, variant, name):
    m = torus_models(variant, 6, 6)
    syn = analysis.syndrome(m, _figure_operator(m, name))
    assert cells(syn) == FIGURES[variant][name]


# ---------------------------------------------------------------------------
# 7. confinement


CONFINEMENT_2D = [
    ("twisted_Xα_vertical", (3, 1), [2, 3, 4, 5], 1, 2),
    ("flux_X_horizontal", (1, 3), [2, 3, 4, 5], 0, 2),
    ("dipole_pair", (3, 1), [2, 3, 4, 5], 0, 4),
    ("decorated_dyon", (3, 1), [2, 4, 6], 0, 2),
    ("decorated_dyon", (3, 1), [1, 3, 5], 0, 3),
]


@pytest.mark.parametrize("species,base,lengths,slope,intercept", CONFINEMENT_2D)
def test_criterion_07_string_energies(torus_models, species, base, lengths, slope, intercept):
    m = torus_models("h_alpha", 8, 8)
    v = analysis.confinement_scan(m, StringSpec(species, base, label=A), lengths)
    assert (v.slope, v.intercept) == (slope, intercept)
    assert v.energies == [slope * n + intercept for n in lengths]


@pytest.fixture(scope="module")
def sc3d():
    return build("sc3d_alpha", Lattice.torus(5, 5, 5))


@pytest.fixture(scope="module")
def xcube():
    return build("xcube_beta", Lattice.torus(5, 5, 5))


SIZES = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]


@pytest.mark.parametrize("species,extents,area,perimeter", [
    ("membrane_X", SIZES, 0, 1),
    ("membrane_Xα", SIZES, 1, 1),
    ("membrane_dipole", SIZES, 0, 2),
    ("decorated_membrane", [(2, 1), (2, 2), (4, 2), (4, 3)], 0, 1),
])
def test_criterion_07_membranes(sc3d, species, extents, area, perimeter):
    v = analysis.confinement_scan(sc3d, StringSpec(species, (1, 1, 1), extents=extents[0], label=A), extents)
    assert (v.slope, v.perimeter_coefficient) == (area, perimeter)
    assert v.energies == [area * a * b + perimeter * 2 * (a + b) + v.intercept for a, b in extents]
    assert v.classification == ("confined" if area else "perimeter")


@pytest.mark.parametrize("species,extents,area,const", [
    ("planon_Zβ", SIZES, 2, 4),
    ("planon_dipole", SIZES, 0, 8),
    ("decorated_planon", [(2, 2), (2, 4), (4, 4), (4, 2)], 0, 4),
])
def test_criterion_07_planons(xcube, species, extents, area, const):
    v = analysis.confinement_scan(xcube, StringSpec(species, (1, 2, 1), extents=extents[0], label=A), extents)
    assert (v.slope, v.perimeter_coefficient, v.intercept) == (area, 0, const)
    assert v.classification == ("confined" if area else "deconfined")


# ---------------------------------------------------------------------------
# 8. braiding


def test_criterion_08_braiding(torus_models, z22):
    m = torus_models("h_alpha", 8, 8)
    chi = A
    for g, h in [(A, B), (B, A), (AB, A), (A, A)]:
        conf = analysis.braiding_configurations(m, g, h, chi)
        ph = {k: analysis.braiding_phase(m, *ops) for k, ops in conf.items()}
        assert ph["charge_dyon"] == Phase(z22.character(chi, g))
        assert ph["dyon_separate"] == Phase(0)
        assert ph["dyon_overlap"] == Phase(z22.character(slant_product(m.cocycles["alpha"], g), h))
        assert ph["charge_dipole"] == Phase(0)


# ---------------------------------------------------------------------------
# 9. boundary condensation, written out from the boundary lists with
# ghat the nontrivial character with ghat(g) = 1: a -> "b", b -> "a", ab -> "ab"

HAT = {"a": "b", "b": "a", "ab": "ab"}
ALL = ("a", "b", "ab")


def _expected_condensation():
    exp = {}
    # rough left, classes (H, gamma)
    exp[("left", "rough", ALL, "canonical")] = set()
    exp[("left", "rough", ALL, "trivial")] = {f"flux:{g}" for g in ALL}
    for g in ALL:
        exp[("left", "rough", (g,), "trivial")] = {f"flux:{g}", f"charge:{HAT[g]}"}
    exp[("left", "rough", (), "trivial")] = {f"charge:{c}" for c in ALL}
    # smooth left, classes Hhat
    exp[("left", "smooth", ALL, "trivial")] = {f"charge:{c}" for c in ALL}
    for g in ALL:
        exp[("left", "smooth", (HAT[g],), "trivial")] = {f"charge:{HAT[g]}", f"flux:{g}"}
    exp[("left", "smooth", (), "trivial")] = {f"flux:{g}" for g in ALL}
    # smooth bottom, classes (Hhat, beta): charges iff chi in Hhat and beta = 1,
    # decorated fluxes iff Hhat(g) = 1, dipoles never
    exp[("bottom", "smooth", ALL, "trivial")] = {f"charge:{c}" for c in ALL}
    exp[("bottom", "smooth", ALL, "canonical")] = set()
    for g in ALL:
        exp[("bottom", "smooth", (HAT[g],), "trivial")] = {f"charge:{HAT[g]}", f"decorated_flux:{g}"}
    exp[("bottom", "smooth", (), "trivial")] = {f"decorated_flux:{g}" for g in ALL}
    # rough bottom, classes (H, gamma)
    exp[("bottom", "rough", ALL, "canonical")] = {f"dipole:{g}" for g in ALL}
    exp[("bottom", "rough", ALL, "trivial")] = set()
    for g in ALL:
        exp[("bottom", "rough", (g,), "trivial")] = {f"charge:{HAT[g]}"}
    exp[("bottom", "rough", (), "trivial")] = {f"charge:{c}" for c in ALL}
    return exp


EXPECTED_CONDENSATION = _expected_condensation()


@pytest.fixture(scope="module")
def condensation(z22):
    out = {}
    for row in analysis.condensation_table(size=(6, 6)):
        sub = tuple(n for n in ALL if z22.element(n) in row.spec.subgroup)
        key = (row.spec.side, row.spec.style, sub, row.spec.twist)
        out[key] = {f"{s}:{z22.name(g)}" for (s, g), v in row.condensed.items() if v}
    return out


def test_criterion_09_class_inventory(condensation):
    assert set(condensation) == set(EXPECTED_CONDENSATION)
    counts = {}
    for side, style, _, _ in condensation:
        counts[(side, style)] = counts.get((side, style), 0) + 1
    assert counts == {("left", "rough"): 6, ("left", "smooth"): 5, ("bottom", "smooth"): 6, ("bottom", "rough"): 6}


@pytest.mark.parametrize("key", list(EXPECTED_CONDENSATION), ids=lambda k: "-".join(map(str, k)))
def test_criterion_09_condensation(condensation, key):
    assert condensation[key] == EXPECTED_CONDENSATION[key]


# ---------------------------------------------------------------------------
# 10. fractals


def test_criterion_10_fractal_triangles():
    m = build("h_alpha_beta", Lattice.open_patch(12, 12))
    for kind in ("plaquette", "vertex"):
        for hand in ("right", "left"):
            op = analysis.make_fractal(m, Cell(kind, (6, 6)), hand, 2, A)
            syn = analysis.syndrome(m, op)
            assert len(syn) == 3
            assert {c.kind for c in syn.cells} == {kind}


def test_criterion_10_fractal_sector_on_2x4(torus_models):
    m = torus_models("h_alpha_beta", 2, 4)
    sector = analysis.fractal_sector(m, 2)
    assert len(sector.verdicts) == 6
    assert all(isinstance(v, (Stabilizer, Logical)) for v in sector.verdicts.values())
    assert sector.commuting and sector.classical


# ---------------------------------------------------------------------------
# 11. PEPS


@pytest.mark.parametrize("name", peps.IDENTITIES)
def test_criterion_11_identities(alpha, name):
    r = peps.check_identity(name, alpha.group, alpha)
    assert r.holds, r.witness


@pytest.mark.parametrize("demo", ["dipole", "decorated_string"])
def test_criterion_11_virtual_excitations(alpha, demo):
    assert peps.virtual_excitation_demo(demo, alpha.group, alpha).holds


# ---------------------------------------------------------------------------
# 12. general abelian groups


def test_criterion_12_z22_sectors(alpha, z22, torus_models):
    assert kernel_subgroup(alpha) == frozenset([E])
    assert image_subgroup(alpha) == frozenset(z22.elements)
    for px, py in [(2, 2), (2, 3), (3, 4), (4, 5)]:
        g = build_general_abelian(Lattice.torus(px, py), z22, alpha)
        assert analyze(g).gsd == analyze(torus_models("h_alpha", px, py)).gsd
    m = build_general_abelian(Lattice.torus(3, 4), z22, alpha)
    ops = analysis.torus_logicals(m, A, analysis.decoration_label(m, A))
    assert all(isinstance(verify_logical(m, op), Logical) for op in ops.values())


def test_criterion_12_z2xz4_trace_cross_check(z2z4):
    G, c = z2z4
    m = build_general_abelian(Lattice.torus(2, 2), G, c)
    assert gsd_trace(m) == analyze(m).gsd


@pytest.mark.parametrize("px,py", [(2, 2), (2, 4), (3, 2)])
def test_criterion_12_z2xz4_even_rows(z2z4, px, py):
    G, c = z2z4
    assert len(kernel_subgroup(c)) == 2
    gsd = analyze(build_general_abelian(Lattice.torus(px, py), G, c)).gsd
    assert gsd == G.order * len(kernel_subgroup(c))
