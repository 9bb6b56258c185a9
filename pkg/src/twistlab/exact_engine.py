"""Brute-force oracles used to cross-check the stabilizer engine.

``gsd_trace`` computes tr of the product of cell projectors.  Only products
of terms whose permutation part is trivial on every edge have a nonzero
trace, and those traces factor edge by edge, so the sum runs over a
subgroup that is computed rather than scanned.

``gsd_dense`` works on the full basis of a tiny lattice.  Every term acts
as a permutation of basis states with a phase; the ground space has one
state per orbit of the term group whose phases are consistent around the
orbit, which is the trace of the projector product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import zn_linalg
from .cyclotomic import _poly_divmod, cyclotomic_poly
from .model_builder import LatticeOperator, ModelInstance

DEFAULT_TRACE_BUDGET = 1 << 20
DEFAULT_DENSE_BUDGET = 1 << 16


class BudgetExceeded(RuntimeError):
    pass


class OracleError(RuntimeError):
    """Inconsistent oracle arithmetic; always a bug, never a model property."""


class MalformedExcitation(ValueError):
    """The operator does not commute with some term up to a scalar."""


@dataclass(frozen=True)
class TraceBudget:
    max_assignments: int = DEFAULT_TRACE_BUDGET
    max_dense_dim: int = DEFAULT_DENSE_BUDGET


def _term_product(m: ModelInstance, y) -> LatticeOperator:
    G = m.group
    out = LatticeOperator.identity(G)
    for j, c in enumerate(y):
        if c:
            t = m.terms[j]
            out = out.compose(m.rule_term(t.rule, G.scale(int(c), t.label)))
    return out


def _reduction_matrix(N: int) -> np.ndarray:
    """Row k holds the coefficients of z^k reduced modulo the N-th cyclotomic polynomial."""
    phi = list(cyclotomic_poly(N))
    deg = len(phi) - 1
    R = np.zeros((N, deg), dtype=np.int64)
    for k in range(N):
        _, rem = _poly_divmod([0] * k + [1], phi)
        R[k, :len(rem)] = rem
    return R


def _permutation_trivial_basis(m: ModelInstance) -> tuple:
    """Howell basis of the term exponent vectors y (y_j mod order_j) with trivial permutation part."""
    G = m.group
    N = G.modulus
    edges = list(m.lattice.edges)
    pos = {e: i for i, e in enumerate(edges)}
    k = G.rank
    scale = [N // n for n in G.factors]
    nt = len(m.terms)
    steps = [N // t.order for t in m.terms]
    rows = np.zeros((nt, len(edges) * k + nt), dtype=np.int64)
    for j, t in enumerate(m.terms):
        for e, site in t.op.sites.items():
            for i, c in enumerate(site.perm):
                rows[j, pos[e] * k + i] = c * scale[i]
        rows[j, len(edges) * k + j] = steps[j]
    H = zn_linalg.howell_form(rows, N)
    width = len(edges) * k
    keep = [r[width:] for r in H if not r[:width].any()]
    basis = zn_linalg.howell_form(keep, N, ncols=nt) if keep else np.zeros((0, nt), dtype=np.int64)
    return basis, steps


def gsd_trace(m: ModelInstance, budget: int = DEFAULT_TRACE_BUDGET) -> int:
    """Ground-space dimension as the exact trace of the projector product."""
    G = m.group
    N = G.modulus
    basis, steps = _permutation_trivial_basis(m)
    piv = zn_linalg.pivots(basis)
    ranges = [N // d for _, d in piv]
    size = int(np.prod(ranges, dtype=object)) if ranges else 1
    if size > budget:
        raise BudgetExceeded(f"{size} permutation-trivial assignments exceed the trace budget {budget}")

    edges = list(m.lattice.edges)
    order = G.order
    # diagonal exponent table per basis row: (edge, element) entries plus a global phase
    D = np.zeros((len(basis), len(edges) * order + 1), dtype=np.int64)
    for i, r in enumerate(basis):
        y = [int(v) // s for v, s in zip(r, steps)]
        op = _term_product(m, y)
        for e_i, e in enumerate(edges):
            site = op.sites.get(e)
            if site is None:
                continue
            if not site.is_diagonal:
                raise OracleError("permutation-trivial product has a non-diagonal site")
            D[i, e_i * order:(e_i + 1) * order] = site.diag
        D[i, -1] = op.glob

    R = _reduction_matrix(N)
    deg = R.shape[1]
    total = np.zeros(deg, dtype=object)
    coeff_grid = np.array(np.meshgrid(*[np.arange(n) for n in ranges], indexing="ij")).reshape(len(ranges), -1).T \
        if ranges else np.zeros((1, 0), dtype=np.int64)
    chunk = 1 << 14
    for start in range(0, len(coeff_grid), chunk):
        C = coeff_grid[start:start + chunk]
        ex = (C @ D) % N if len(D) else np.zeros((len(C), D.shape[1]), dtype=np.int64)
        B = len(C)
        # running product in the reduced cyclotomic basis
        acc = R[ex[:, -1]].astype(object)
        for e_i in range(len(edges)):
            block = ex[:, e_i * order:(e_i + 1) * order]
            hist = np.zeros((B, N), dtype=np.int64)
            for h in range(order):
                hist[np.arange(B), block[:, h]] += 1
            full = np.zeros((B, N), dtype=object)
            for a in range(deg):
                col = acc[:, a]
                for b in range(N):
                    full[:, (a + b) % N] += col * hist[:, b]
            acc = full.dot(R.astype(object))
            alive = np.any(acc != 0, axis=1)
            if not alive.all():
                acc = acc[alive]
                ex = ex[alive]
                B = len(acc)
                if B == 0:
                    break
        if B:
            total = total + acc.sum(axis=0)
    if any(total[1:]):
        raise OracleError("trace is not a rational integer")
    norm = 1
    for t in m.terms:
        norm *= t.order
    # the enumerated subgroup is K1/R; the average runs over all label assignments
    value = Fraction(int(total[0]), norm)
    if value.denominator != 1 or value < 0:
        raise OracleError(f"trace oracle produced {value}, not a nonnegative integer")
    return int(value)


def _site_action(G, site) -> tuple:
    """(target index, phase exponent) arrays for one site operator over the element basis."""
    table = G.add_table
    p = G.index(site.perm)
    target = np.array([table[p][k] for k in range(G.order)], dtype=np.int64)
    phase = np.array(site.diag, dtype=np.int64)
    return target, phase


def gsd_dense(m: ModelInstance, budget: int = DEFAULT_DENSE_BUDGET) -> int:
    """Ground-space dimension from the explicit monomial action on every basis state."""
    G = m.group
    N = G.modulus
    edges = list(m.lattice.edges)
    order = G.order
    dim = order ** len(edges)
    if dim > budget:
        raise BudgetExceeded(f"dense dimension {dim} exceeds the dense budget {budget}")
    states = np.arange(dim, dtype=np.int64)
    digits = [(states // order ** i) % order for i in range(len(edges))]
    pos = {e: i for i, e in enumerate(edges)}

    actions = []
    for t in m.terms:
        dst = np.zeros(dim, dtype=np.int64)
        ph = np.full(dim, t.op.glob, dtype=np.int64)
        touched = set()
        for e, site in t.op.sites.items():
            i = pos[e]
            touched.add(i)
            target, phase = _site_action(G, site)
            dst += target[digits[i]] * order ** i
            ph += phase[digits[i]]
        for i in range(len(edges)):
            if i not in touched:
                dst += digits[i] * order ** i
        actions.append((dst, ph % N))

    # propagate the smallest state index through each orbit with relative phases:
    # a ground state has amplitude c[dst] = w^ph c[src]
    label = states.copy()
    pot = np.zeros(dim, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for dst, ph in actions:
            better = label < label[dst]
            if better.any():
                idx = dst[better]
                label[idx] = label[better]
                pot[idx] = (pot[better] + ph[better]) % N
                changed = True
            back = label[dst] < label
            if back.any():
                label[back] = label[dst][back]
                pot[back] = (pot[dst][back] - ph[back]) % N
                changed = True
    bad = np.zeros(dim, dtype=bool)
    for dst, ph in actions:
        bad |= (pot[dst] - pot - ph) % N != 0
    roots = set(np.unique(label).tolist())
    dead = set(np.unique(label[bad]).tolist())
    return len(roots - dead)


def violated_cells(m: ModelInstance, op: LatticeOperator) -> list:
    """Cells with a term whose commutation phase with ``op`` differs from +1."""
    op = m.localize(op)
    support = set(op.sites)
    cells = []
    seen = set()
    for t in m.terms:
        if t.cell in seen or not support & set(t.op.sites):
            continue
        c = t.op.commutation(op)
        if not c.is_scalar:
            raise MalformedExcitation(f"operator does not phase-commute with the term on {t.cell}")
        if c.phase:
            seen.add(t.cell)
            cells.append(t.cell)
    return cells


def energy(m: ModelInstance, op: LatticeOperator) -> int:
    """Number of cells excited when ``op`` acts on a ground state."""
    return len(violated_cells(m, op))
