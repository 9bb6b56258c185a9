import pytest

from twistlab import peps
from twistlab.abelian_group import FiniteAbelianGroup, canonical_z22_cocycle, pairing_cocycle, slant_product, trivial_cocycle
from twistlab.monomial_ops import compose, dagger

ALPHA = canonical_z22_cocycle()
G = ALPHA.group
A = (1, 0)


def cocycles():
    z2z4 = FiniteAbelianGroup((2, 4))
    return {
        "z22 canonical": ALPHA,
        "z22 trivial": trivial_cocycle(G),
        "z2xz4 pairing": pairing_cocycle(z2z4, [[0, 2], [0, 0]]),
    }


# slant_phase only reduces to the slant character for exponent two; the
# charge law on Z2xZ4 is correct but takes about a minute
CASES = [(n, i) for n in ("z22 canonical", "z22 trivial") for i in peps.IDENTITIES]
CASES += [("z2xz4 pairing", i) for i in ("invariance", "vertical_pulling_through", "modified_pulling_through")]


@pytest.mark.parametrize("name,identity", CASES)
def test_identities_hold(name, identity):
    c = cocycles()[name]
    r = peps.check_identity(identity, c.group, c)
    assert r.holds, r.witness


def test_unknown_identity():
    with pytest.raises(ValueError):
        peps.check_identity("teleportation", G, ALPHA)
    with pytest.raises(ValueError):
        peps.virtual_excitation_demo("wormhole", G, ALPHA)


def test_tensor_entries():
    T = peps.build_site_tensor(G, ALPHA)
    # one nonzero entry per label and per choice of virtual indices
    assert len(T.as_dict()) == G.order * G.order ** 4
    assert T.compare(T) is None
    assert T.compare(T.scaled(2)) is not None


def test_modified_pulling_through_needs_the_charge():
    L, R, U, D = peps._leg_ops(G, ALPHA, A)
    lhs = peps.insert(G, ALPHA, G.identity, {"left": (L, "physical")})
    daggers = {"right": (dagger(R), "virtual"), "up": (dagger(U), "virtual"), "down": (dagger(D), "virtual")}
    assert lhs.compare(peps.insert(G, ALPHA, slant_product(ALPHA, A), daggers)) is None
    assert lhs.compare(peps.insert(G, ALPHA, G.identity, daggers)) is not None
    # placing the operator on the virtual side instead breaks the identity
    virtual = peps.insert(G, ALPHA, G.identity, {"left": (L, "virtual")})
    assert virtual.compare(peps.insert(G, ALPHA, slant_product(ALPHA, A), daggers)) is not None


def test_modified_pulling_through_twice():
    for g in G.elements:
        L, R, U, D = peps._leg_ops(G, ALPHA, g)
        twice = {leg: (compose(dagger(op), dagger(op)), "virtual") for leg, op in (("right", R), ("up", U), ("down", D))}
        lhs = peps.insert(G, ALPHA, G.identity, {"left": (compose(L, L), "physical")})
        chi = G.add(slant_product(ALPHA, g), slant_product(ALPHA, g))
        assert lhs.compare(peps.insert(G, ALPHA, chi, twice)) is None


@pytest.mark.parametrize("demo", peps.DEMOS)
def test_demos(demo):
    r = peps.virtual_excitation_demo(demo, G, ALPHA)
    assert r.holds and r.support > 0


def test_report_is_serializable():
    rep = peps.peps_report(G, ALPHA)
    assert rep["ok"]
    assert [r["identity"] for r in rep["identities"]] == list(peps.IDENTITIES)
