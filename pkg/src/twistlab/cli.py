"""Command line front end: ``twistlab <command> CONFIG``.

A config is a TOML document::

    [model]
    variant = "h_alpha"            # see model_builder.VARIANTS
    group = [2, 2]
    cocycle = "canonical_z22"      # or "trivial" or "pairing"
    pairing = [[0, 2], [0, 0]]     # only for cocycle = "pairing"

    [lattice]
    extents = [2, 3]
    periodic = [true, true]        # default: all periodic
    sides = { left = "rough" }     # open sides only

    [[boundary]]                   # h_alpha only
    side = "left"
    style = "rough"
    subgroup = [[0, 0], [1, 0]]
    twist = "trivial"

    [analysis]
    checks = ["commutation", "gsd"]   # what ``run`` executes
    expect_gsd = 4
    cross_check = ["trace"]           # oracles compared against the engine

Further optional tables: ``[syndrome]`` (``operators`` with explicit
factors and ``strings`` with string specs), ``[confine]`` (``families``),
``[braid]``, ``[boundaries]``, ``[fractal]``, ``[additivity]`` and
``[output]``.  Every phase in a report is printed as a "p/q" string and
reports are written with sorted keys, so identical configs give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
import warnings
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:     # Python < 3.11
    import tomli as tomllib

from . import analysis, peps
from .abelian_group import (
    CocycleError,
    FiniteAbelianGroup,
    canonical_z22_cocycle,
    pairing_cocycle,
    trivial_cocycle,
)
from .exact_engine import (
    DEFAULT_DENSE_BUDGET,
    DEFAULT_TRACE_BUDGET,
    BudgetExceeded,
    MalformedExcitation,
    OracleError,
    gsd_dense,
    gsd_trace,
)
from .lattice import Lattice, LatticeError
from .model_builder import VARIANTS, BoundarySpec, ModelError, OpKind, build, check_commutation
from .stabilizer_engine import EngineError, Logical, analyze, logical_relations, verify_logical

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_ENGINE = 3
EXIT_BUDGET = 4

CHECKS = ("commutation", "gsd", "logicals", "syndrome", "confine", "braid", "boundaries",
          "fractal", "peps", "additivity")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config


def parse_cocycle(G: FiniteAbelianGroup, name: str, pairing=None):
    try:
        if name == "canonical_z22":
            if G.factors != (2, 2):
                raise ConfigError("canonical_z22 needs group = [2, 2]")
            return canonical_z22_cocycle()
        if name == "trivial":
            return trivial_cocycle(G)
        if name == "pairing":
            if pairing is None:
                raise ConfigError("cocycle = 'pairing' needs a pairing matrix")
            return pairing_cocycle(G, pairing)
    except CocycleError as exc:
        raise ConfigError(f"cocycle: {exc}") from exc
    raise ConfigError(f"unknown cocycle {name!r}")


class RunConfig:
    """Parsed and validated config; nothing is built until ``model()``."""

    def __init__(self, data: dict, source: str = "<config>"):
        self.data = data
        self.source = source
        model = data.get("model")
        if not isinstance(model, dict):
            raise ConfigError("missing [model] table")
        self.variant = model.get("variant")
        if self.variant not in VARIANTS:
            raise ConfigError(f"model.variant must be one of {', '.join(VARIANTS)}")
        try:
            self.group = FiniteAbelianGroup(tuple(int(n) for n in model.get("group", [2, 2])))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model.group: {exc}") from exc
        self.cocycle_name = model.get("cocycle", "canonical_z22" if self.group.factors == (2, 2) else "trivial")
        self.alpha = parse_cocycle(self.group, self.cocycle_name, model.get("pairing"))
        self.beta_source = None
        if "beta_source" in model:
            self.beta_source = parse_cocycle(self.group, model["beta_source"], model.get("beta_pairing"))
        self.mirror = bool(model.get("mirror", False))

        lat = data.get("lattice")
        if not isinstance(lat, dict) or "extents" not in lat:
            raise ConfigError("missing lattice.extents")
        extents = tuple(int(n) for n in lat["extents"])
        want = 3 if self.variant in ("sc3d_alpha", "xcube_beta") else 2
        if len(extents) != want:
            raise ConfigError(f"variant {self.variant} needs {want} lattice extents")
        try:
            self.lattice = Lattice(extents, tuple(lat.get("periodic", [True] * want)),
                                   tuple(dict(lat.get("sides", {})).items()))
        except LatticeError as exc:
            raise ConfigError(f"lattice: {exc}") from exc

        self.boundaries = []
        for b in data.get("boundary", []):
            if self.variant != "h_alpha":
                raise ConfigError("[[boundary]] entries are only supported for h_alpha")
            try:
                self.boundaries.append(BoundarySpec(b["side"], b["style"],
                                                    frozenset(tuple(g) for g in b["subgroup"]),
                                                    b.get("twist", "trivial")))
            except (KeyError, ModelError) as exc:
                raise ConfigError(f"boundary: {exc}") from exc

        an = data.get("analysis", {})
        self.checks = list(an.get("checks", ["commutation", "gsd"]))
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
        self.expect_gsd = an.get("expect_gsd")
        self.cross_check = list(an.get("cross_check", []))
        if any(c not in ("trace", "dense") for c in self.cross_check):
            raise ConfigError("analysis.cross_check accepts 'trace' and 'dense'")
        self.output = dict(data.get("output", {}))

    def section(self, name: str) -> dict:
        return dict(self.data.get(name, {}))

    def model(self):
        kw = {"mirror": self.mirror, "boundaries": self.boundaries}
        if self.beta_source is not None:
            kw["beta_source"] = self.beta_source
        return build(self.variant, self.lattice, self.group, self.alpha, **kw)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return RunConfig(data, path)


# ---------------------------------------------------------------------------
# analyses; each returns (json payload, passed)


def _label(G: FiniteAbelianGroup, v) -> tuple:
    return G.reduce(tuple(int(x) for x in v))


def do_commutation(cfg: RunConfig, m, opts) -> tuple:
    rep = check_commutation(m, jobs=opts.jobs)
    return rep.to_json(), rep.ok


def do_gsd(cfg: RunConfig, m, opts) -> tuple:
    summary = analyze(m)
    out = summary.to_json(m)
    ok = not summary.frustrated
    if cfg.expect_gsd is not None:
        out["expected"] = int(cfg.expect_gsd)
        ok = ok and summary.gsd == int(cfg.expect_gsd)
    oracles = {}
    if "trace" in cfg.cross_check:
        oracles["trace"] = gsd_trace(m, budget=opts.trace_budget)
    if "dense" in cfg.cross_check:
        oracles["dense"] = gsd_dense(m, budget=opts.dense_budget)
    if oracles:
        out["oracles"] = oracles
        ok = ok and all(v == summary.gsd for v in oracles.values())
    return out, ok


def do_logicals(cfg: RunConfig, m, opts) -> tuple:
    if cfg.variant != "h_alpha" or m.lattice.dim != 2 or not all(m.lattice.periodic):
        return {"skipped": "named logicals are catalogued for the h_alpha torus only"}, True
    sec = cfg.section("logicals")
    ops = analysis.torus_logicals(m, _label(m.group, sec.get("g", [1, 0])), _label(m.group, sec.get("chi", [1, 0])))
    verdicts = {k: verify_logical(m, op) for k, op in ops.items()}
    relations = [("X1_odd*X1_even=Z2", ["X1_odd", "X1_even"], "Z2")]
    if "Y2_odd" in ops:
        relations.append(("Y2_odd*Y2_even=Z1", ["Y2_odd", "Y2_even"], "Z1"))
    rel = logical_relations(m, ops, relations)
    out = {"verdicts": {k: str(v) for k, v in verdicts.items()},
           "commutation": {f"{a},{b}": p for (a, b), p in rel["commutation"].items()},
           "relations": [r.to_json() for r in rel["relations"]]}
    ok = all(isinstance(v, Logical) for v in verdicts.values())
    return out, ok


def _spec_from(entry: dict) -> analysis.StringSpec:
    kw = dict(entry)
    kw.pop("lengths", None)
    kw.pop("name", None)
    kw.pop("expect", None)
    for key in ("base", "label", "extents"):
        if key in kw and kw[key] is not None:
            kw[key] = tuple(kw[key])
    try:
        return analysis.StringSpec(**kw)
    except TypeError as exc:
        raise ConfigError(f"string spec: {exc}") from exc


def syndrome_operators(cfg: RunConfig, m) -> dict:
    """Named operators from the [syndrome] table."""
    sec = cfg.section("syndrome")
    ops = {}
    for i, entry in enumerate(sec.get("operators", [])):
        name = entry.get("name", f"operator{i}")
        factors = []
        for f in entry.get("factors", []):
            try:
                edge = m.lattice.edge(int(f["edge"][0]), *map(int, f["edge"][1:]))
                kind = OpKind(f["kind"])
            except (KeyError, ValueError, LatticeError) as exc:
                raise ConfigError(f"syndrome operator {name}: {exc}") from exc
            factors.append((edge, kind, _label(m.group, f.get("label", [1, 0]))))
        ops[name] = m.operator(factors)
    for i, entry in enumerate(sec.get("strings", [])):
        name = entry.get("name", f"string{i}")
        ops[name] = analysis.make_string(m, _spec_from(entry))
    return ops


def do_syndrome(cfg: RunConfig, m, opts) -> tuple:
    out = {}
    expected = cfg.section("syndrome").get("expect_counts", {})
    ok = True
    for name, op in syndrome_operators(cfg, m).items():
        syn = analysis.syndrome(m, op)
        out[name] = syn.to_json() | {"count": len(syn)}
        if name in expected:
            ok = ok and len(syn) == int(expected[name])
    return out, ok


def do_confine(cfg: RunConfig, m, opts) -> tuple:
    out = []
    ok = True
    for entry in cfg.section("confine").get("families", []):
        lengths = entry.get("lengths")
        if not lengths:
            raise ConfigError("each confine family needs lengths")
        v = analysis.confinement_scan(m, _spec_from(entry), [tuple(n) if isinstance(n, list) else n for n in lengths])
        row = v.to_json()
        if "expect" in entry:
            row["expected"] = entry["expect"]
            ok = ok and v.classification == entry["expect"]
        out.append(row)
    return {"families": out}, ok


def do_braid(cfg: RunConfig, m, opts) -> tuple:
    sec = cfg.section("braid")
    G = m.group
    g = _label(G, sec.get("g", [1, 0]))
    h = _label(G, sec.get("h", [1, 0]))
    chi = _label(G, sec.get("chi", [0, 1]))
    confs = analysis.braiding_configurations(m, g, h, chi, tuple(sec.get("offset", [2, 2])))
    phases = {k: str(analysis.braiding_phase(m, a, b)) for k, (a, b) in confs.items()}
    return {"g": list(g), "h": list(h), "chi": list(chi), "phases": phases}, True


def do_boundaries(cfg: RunConfig, m, opts) -> tuple:
    sec = cfg.section("boundaries")
    G = cfg.group
    rows = analysis.condensation_table(G, cfg.alpha, tuple(sec.get("sides", analysis.BOUNDARY_SIDES)),
                                       tuple(sec.get("size", [6, 6])))
    return {"rows": [r.to_json(G) for r in rows]}, True


def do_fractal(cfg: RunConfig, m, opts) -> tuple:
    sec = cfg.section("fractal")
    fs = analysis.fractal_sector(m, int(sec.get("generation", 2)), tuple(sec.get("center", [0, 0])))
    return fs.to_json(), fs.commuting


def do_peps(cfg: Optional[RunConfig], m, opts) -> tuple:
    if cfg is None:
        G, alpha = FiniteAbelianGroup((2, 2)), canonical_z22_cocycle()
    else:
        G, alpha = cfg.group, cfg.alpha
    rep = peps.peps_report(G, alpha)
    return rep, rep["ok"]


def do_additivity(cfg: RunConfig, m, opts) -> tuple:
    """Syndrome of a product equals the combined syndromes, on random pairs of single-site operators.

    The seed only chooses the samples; the reported outcome is a pass flag.
    """
    sec = cfg.section("additivity")
    samples = int(sec.get("samples", 20))
    rng = random.Random(opts.seed)
    kinds = [OpKind.X, OpKind.Z] + ([OpKind.X_ALPHA, OpKind.X_ALPHA_BAR] if m.lattice.dim == 2 else [])
    edges = list(m.lattice.edges)
    G = m.group
    ok = True
    for _ in range(samples):
        picks = []
        for _ in range(2):
            picks.append((rng.choice(edges), rng.choice(kinds), rng.choice(G.elements)))
        a, b = m.operator([picks[0]]), m.operator([picks[1]])
        try:
            lhs = analysis.syndrome(m, a @ b)
        except MalformedExcitation:
            continue
        ok = ok and lhs.phases() == analysis.syndrome(m, a).combine(analysis.syndrome(m, b)).phases()
    return {"samples": samples, "ok": ok}, ok


ANALYSES = {
    "commutation": do_commutation, "gsd": do_gsd, "logicals": do_logicals, "syndrome": do_syndrome,
    "confine": do_confine, "braid": do_braid, "boundaries": do_boundaries, "fractal": do_fractal,
    "peps": do_peps, "additivity": do_additivity,
}


# ---------------------------------------------------------------------------
# output


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, path: Optional[str]) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def run_checks(cfg: RunConfig, checks: list, opts) -> tuple:
    m = cfg.model()
    report = {"model": m.summary(), "cocycle": cfg.cocycle_name, "results": {}}
    passed = True
    for name in checks:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", analysis.ParityWarning)
            payload, ok = ANALYSES[name](cfg, m, opts)
        report["results"][name] = {"passed": ok, "result": payload}
        passed = passed and ok
    report["passed"] = passed
    return report, passed


def render_files(cfg: RunConfig, outdir: str) -> list:
    m = cfg.model()
    written = []
    if m.lattice.dim != 2:
        sys.stderr.write("render: 3D lattices are not drawn; skipped\n")
        return written
    ops = syndrome_operators(cfg, m) or {"lattice": None}
    for name, op in sorted(ops.items()):
        path = os.path.join(outdir, f"{name}.svg")
        write_atomic(path, analysis.render_svg(m, op, pairs=True))
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# entry point


def group_show(args) -> int:
    G = FiniteAbelianGroup(tuple(args.factors))
    alpha = parse_cocycle(G, args.cocycle, json.loads(args.pairing) if args.pairing else None)
    names = [G.name(g) for g in G.elements]
    emit(dumps({"group": list(G.factors), "elements": names, "cocycle": alpha.to_json()}), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--trace-budget", type=int, default=DEFAULT_TRACE_BUDGET)
    common.add_argument("--dense-budget", type=int, default=DEFAULT_DENSE_BUDGET)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0, help="only used to pick randomized samples")

    p = argparse.ArgumentParser(prog="twistlab", description="Twisted quantum double lattice models.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run the checks listed in the config")
    r.add_argument("config")
    single = {"check-commute": "commutation", "gsd": "gsd", "syndrome": "syndrome", "confine": "confine",
              "braid": "braid", "logicals": "logicals", "boundaries": "boundaries", "fractal": "fractal"}
    for cmd, check in single.items():
        s = sub.add_parser(cmd, parents=[common], help=f"run only the {check} analysis")
        s.add_argument("config")
        s.set_defaults(check=check)
    pv = sub.add_parser("peps-verify", parents=[common], help="exact tensor identity checks")
    pv.add_argument("config", nargs="?")
    rd = sub.add_parser("render", parents=[common], help="SVG diagrams of the configured syndromes")
    rd.add_argument("config")
    rd.add_argument("--format", choices=["svg"], default="svg")
    rd.add_argument("--outdir", default=".")
    g = sub.add_parser("group", help="group and cocycle tables")
    g.add_argument("action", choices=["show"])
    g.add_argument("--factors", type=int, nargs="+", default=[2, 2])
    g.add_argument("--cocycle", default="canonical_z22")
    g.add_argument("--pairing", help="JSON pairing matrix")
    g.add_argument("-o", "--output")
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "group":
            return group_show(args)
        if args.command == "peps-verify":
            cfg = load_config(args.config) if args.config else None
            payload, ok = do_peps(cfg, None, args)
            emit(dumps({"results": {"peps": {"passed": ok, "result": payload}}, "passed": ok}), args.output)
            return EXIT_OK if ok else EXIT_CHECK_FAILED
        cfg = load_config(args.config)
        if args.command == "render":
            for path in render_files(cfg, args.outdir):
                print(path)
            return EXIT_OK
        checks = cfg.checks if args.command == "run" else [args.check]
        report, ok = run_checks(cfg, checks, args)
        emit(dumps(report), args.output or (cfg.output.get("report") if args.command == "run" else None))
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    except (ConfigError, ModelError, analysis.AnalysisError) as exc:
        sys.stderr.write(dumps({"error": "config", "message": str(exc)}))
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        sys.stderr.write(dumps({"error": "budget", "message": str(exc)}))
        return EXIT_BUDGET
    except (EngineError, OracleError, MalformedExcitation) as exc:
        sys.stderr.write(dumps({"error": "engine", "message": str(exc)}))
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
