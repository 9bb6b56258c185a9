"""Stabilizer-group analysis without building the Hilbert space.

An assignment x gives every generator term an exponent in Z_N and stands
for the product of term powers.  Because the terms commute exactly and
each cell's labels form a linear representation, x -> product is a
homomorphism.  Its kernel is found in two steps: first the assignments
whose permutation parts cancel on every edge, then among those the ones
whose remaining diagonal phases cancel.  Both steps are Howell-form
computations over Z_N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np

from . import zn_linalg
from .abelian_group import Phase
from .model_builder import LatticeOperator, ModelInstance, check_commutation
from .monomial_ops import to_frame


class EngineError(RuntimeError):
    pass


def _factorize(n: int) -> list:
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append([p, e])
        p += 1
    if n > 1:
        out.append([n, 1])
    return out


@dataclass(frozen=True)
class InStabilizer:
    assignment: tuple

    def __str__(self) -> str:
        return "InStabilizer"


@dataclass(frozen=True)
class PhaseOnly:
    phase: Phase

    def __str__(self) -> str:
        return f"PhaseOnly({self.phase})"


@dataclass(frozen=True)
class NotMember:
    def __str__(self) -> str:
        return "No"


NO = NotMember()


@dataclass(frozen=True)
class Logical:
    def __str__(self) -> str:
        return "Logical"


@dataclass(frozen=True)
class Stabilizer:
    phase: Phase = Phase(0)

    def __str__(self) -> str:
        return "Stabilizer" if not self.phase else f"Stabilizer({self.phase})"


@dataclass(frozen=True)
class NotCentral:
    violations: tuple

    def __str__(self) -> str:
        return f"NotCentral({len(self.violations)})"


@dataclass
class StabilizerSummary:
    stabilizer_order: int
    gsd: int
    frustrated: bool
    kernel: list            # [(assignment tuple, Phase)]
    offending: Optional[tuple] = None

    @property
    def order_log(self) -> list:
        return _factorize(self.stabilizer_order)

    def to_json(self, m: Optional[ModelInstance] = None) -> dict:
        def show(a):
            if m is None:
                return list(map(int, a))
            return {f"{m.terms[j].cell}:{m.group.name(m.terms[j].label)}": int(c)
                    for j, c in enumerate(a) if c}
        return {"order_log": self.order_log, "gsd": self.gsd, "frustrated": self.frustrated,
                "kernel": [{"assignment": show(a), "phase": str(p)} for a, p in self.kernel]}


class Engine:
    """Echelon data for one model; reusable for many membership queries."""

    def __init__(self, m: ModelInstance, backend: Optional[str] = None):
        self.m = m
        self.backend = backend
        G = m.group
        self.N = G.modulus
        self.edges = list(m.lattice.edges)
        self.edge_pos = {e: i for i, e in enumerate(self.edges)}
        self.k = G.rank
        self.scale = [self.N // n for n in G.factors]
        self.nterms = len(m.terms)
        self._power_cache = {}

    # ---- evaluation -----------------------------------------------------

    def term_power(self, j: int, x: int) -> LatticeOperator:
        x %= self.N
        key = (j, x)
        if key not in self._power_cache:
            t = self.m.terms[j]
            self._power_cache[key] = self.m.rule_term(t.rule, self.m.group.scale(x, t.label))
        return self._power_cache[key]

    def evaluate(self, x) -> LatticeOperator:
        x = [int(v) % self.N for v in x]
        if len(x) != self.nterms:
            raise EngineError("assignment length does not match the number of terms")
        out = LatticeOperator.identity(self.m.group)
        for j, c in enumerate(x):
            if c:
                out = out.compose(self.term_power(j, c))
        return out

    def perm_vector(self, op: LatticeOperator) -> np.ndarray:
        v = np.zeros(len(self.edges) * self.k, dtype=np.int64)
        for e, site in op.sites.items():
            if e not in self.edge_pos:
                raise EngineError(f"edge {e} is not part of the model")
            base = self.edge_pos[e] * self.k
            for i, c in enumerate(site.perm):
                v[base + i] = c * self.scale[i]
        return v % self.N

    def diag_vector(self, op: LatticeOperator) -> np.ndarray:
        """Diagonal exponents (identity entry dropped) followed by the global phase."""
        n = self.m.group.order - 1
        v = np.zeros(len(self.edges) * n + 1, dtype=np.int64)
        for e, site in op.sites.items():
            if not site.is_diagonal:
                raise EngineError("operator is not diagonal")
            site = to_frame(site, self.m.frames.get(e)) if site.frame != self.m.frames.get(e) else site
            base = self.edge_pos[e] * n
            v[base:base + n] = site.diag[1:]
            v[-1] = (v[-1] + site.glob) % self.N
        v[-1] = (v[-1] + op.glob) % self.N
        return v

    # ---- stage 1 --------------------------------------------------------

    @cached_property
    def perm_matrix(self) -> np.ndarray:
        rows = [self.perm_vector(t.op) for t in self.m.terms]
        return np.array(rows, dtype=np.int64).reshape(self.nterms, len(self.edges) * self.k)

    @cached_property
    def stage1(self) -> np.ndarray:
        P = self.perm_matrix
        aug = np.concatenate([P, np.eye(self.nterms, dtype=np.int64)], axis=1)
        return zn_linalg.howell_form(aug, self.N, backend=self.backend)

    @cached_property
    def perm_trivial_generators(self) -> np.ndarray:
        """Generators of the assignments whose permutation part vanishes."""
        width = self.perm_matrix.shape[1]
        rows = [r[width:] for r in self.stage1 if not r[:width].any()]
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.nterms)

    # ---- stage 2 --------------------------------------------------------

    @cached_property
    def diag_rows(self) -> np.ndarray:
        rows = []
        for x in self.perm_trivial_generators:
            op = self.evaluate(x)
            if any(not s.is_diagonal for s in op.sites.values()):
                raise EngineError("stage-1 kernel element is not diagonal; terms do not commute")
            rows.append(self.diag_vector(op))
        width = len(self.edges) * (self.m.group.order - 1) + 1
        return np.array(rows, dtype=np.int64).reshape(len(rows), width)

    @cached_property
    def stage2(self) -> np.ndarray:
        D = self.diag_rows
        X = self.perm_trivial_generators
        if len(D) == 0:
            return np.zeros((0, D.shape[1] + self.nterms), dtype=np.int64)
        return zn_linalg.howell_form(np.concatenate([D, X], axis=1), self.N, backend=self.backend)

    @cached_property
    def kernel_rows(self) -> np.ndarray:
        """Howell rows [global | assignment] of the assignments giving scalars."""
        width = self.diag_rows.shape[1] - 1
        rows = [r[width:] for r in self.stage2 if not r[:width].any()]
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.nterms + 1)

    def summary(self) -> StabilizerSummary:
        N = self.N
        K = self.kernel_rows
        kernel = [(tuple(int(c) for c in r[1:]), Phase(Fraction(int(r[0]), N))) for r in K]
        frustrated = any(p for _, p in kernel)
        kernel_size = zn_linalg.span_order(K, N) if len(K) else 1
        total = N ** self.nterms
        if total % kernel_size:
            raise EngineError("kernel size does not divide the assignment group")
        order = total // kernel_size
        dim = self.m.group.order ** len(self.edges)
        offending = None
        if frustrated:
            offending = next((a, p) for a, p in kernel if p)
            gsd = 0
        else:
            if dim % order:
                raise EngineError("stabilizer order does not divide the Hilbert space dimension")
            gsd = dim // order
        return StabilizerSummary(order, gsd, frustrated, kernel, offending)

    # ---- membership -----------------------------------------------------

    def membership(self, op: LatticeOperator):
        op = self.m.localize(op)
        width = self.perm_matrix.shape[1]
        target = np.concatenate([self.perm_vector(op), np.zeros(self.nterms, dtype=np.int64)])
        res, _ = zn_linalg.reduce(target, self.stage1, self.N, upto=width)
        if res[:width].any():
            return NO
        x = (-res[width:]) % self.N
        rest = self.evaluate(x).dagger().compose(op)
        if any(not s.is_diagonal for s in rest.sites.values()):
            raise EngineError("residual is not diagonal")
        d = self.diag_vector(rest)
        dw = len(d) - 1
        target = np.concatenate([d, np.zeros(self.nterms, dtype=np.int64)])
        res, _ = zn_linalg.reduce(target, self.stage2, self.N, upto=dw + 1)
        if res[:dw].any():
            return NO
        y = (-res[dw + 1:]) % self.N
        assignment = tuple(int(c) for c in (x + y) % self.N)
        if res[dw] % self.N:
            return PhaseOnly(Phase(Fraction(int(res[dw]), self.N)))
        return InStabilizer(assignment)


def engine(m: ModelInstance) -> Engine:
    """The cached engine of a model (built on first use)."""
    eng = m.__dict__.get("_engine")
    if eng is None:
        eng = Engine(m)
        m.__dict__["_engine"] = eng
    return eng


def evaluate(m: ModelInstance, assignment) -> LatticeOperator:
    return engine(m).evaluate(assignment)


def analyze(m: ModelInstance) -> StabilizerSummary:
    return engine(m).summary()


def is_member(m: ModelInstance, op: LatticeOperator):
    return engine(m).membership(op)


def violations(m: ModelInstance, op: LatticeOperator) -> list:
    """(term index, phase) for generator terms not commuting with ``op``."""
    op = m.localize(op)
    support = set(op.sites)
    out = []
    for j, t in enumerate(m.terms):
        if not support & set(t.op.sites):
            continue
        c = t.op.commutation(op)
        if not c.commutes:
            out.append((j, c))
    return out


def verify_logical(m: ModelInstance, op: LatticeOperator):
    bad = violations(m, op)
    if bad:
        return NotCentral(tuple((m.terms[j].cell, m.terms[j].label, str(c)) for j, c in bad))
    r = is_member(m, op)
    if isinstance(r, InStabilizer):
        return Stabilizer()
    if isinstance(r, PhaseOnly):
        return Stabilizer(r.phase)
    return Logical()


def assignment_from_labels(m: ModelInstance, labels: dict) -> tuple:
    """Assignment realising label ``labels[cell]`` on each listed cell."""
    G = m.group
    x = [0] * len(m.terms)
    by_rule = {}
    for j, t in enumerate(m.terms):
        by_rule.setdefault(t.rule, []).append(j)
    cell_rules = {}
    for i, r in enumerate(m.rules):
        cell_rules.setdefault(r.cell, []).append(i)
    for cell, label in labels.items():
        label = G.reduce(label)
        rules = [i for i in cell_rules.get(cell, []) if label in m.rules[i].labels]
        if not rules:
            raise EngineError(f"label {label} is not available on {cell}")
        idx = by_rule[rules[0]]
        import itertools
        ranges = [range(m.terms[j].order) for j in idx]
        for coeffs in itertools.product(*ranges):
            acc = G.identity
            for j, c in zip(idx, coeffs):
                acc = G.add(acc, G.scale(c, m.terms[j].label))
            if acc == label:
                for j, c in zip(idx, coeffs):
                    x[j] = (x[j] + c) % G.modulus
                break
    return tuple(x)


@dataclass
class RelationResult:
    name: str
    result: object

    def to_json(self) -> dict:
        return {"relation": self.name, "result": str(self.result)}


def logical_relations(m: ModelInstance, ops: dict, relations: Optional[list] = None) -> dict:
    """Pairwise commutation phases and product-membership checks.

    ``relations`` holds (name, [left factor names], right factor name); the
    product of the left factors times the inverse of the right is tested.
    """
    names = list(ops)
    table = {}
    for a in names:
        for b in names:
            table[(a, b)] = str(ops[a].commutation(ops[b]))
    results = []
    for name, left, right in relations or []:
        prod = LatticeOperator.identity(m.group)
        for f in left:
            prod = prod.compose(ops[f])
        prod = prod.compose(ops[right].dagger())
        results.append(RelationResult(name, is_member(m, prod)))
    return {"commutation": table, "relations": results}


def frustration_free(m: ModelInstance) -> bool:
    return not analyze(m).frustrated


def full_check(m: ModelInstance) -> dict:
    rep = check_commutation(m)
    out = {"commutation": rep.to_json()}
    if rep.ok:
        out["stabilizer"] = analyze(m).to_json(m)
    return out
