"""Command-line front end: ``weakbs <subcommand> [options]``.

Every subcommand writes a CSV table (to ``--out`` or stdout). With ``--out``
a sidecar ``<out>.meta.json`` records the full run configuration, library
versions and timings; ``--config <sidecar>`` replays such a run.

Exit codes: 0 success, 1 usage or configuration error, 2 hypothesis
violated, 3 partial success, 4 acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .potential import PotentialConfigError, UnsupportedError, check_assumption, load_potential

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_PARTIAL, EXIT_ACCEPTANCE = 0, 1, 2, 3, 4

COLUMNS = {
    "check-assumptions": ("condition", "parameter", "value", "converged", "divergent", "status"),
    "solve": ("epsilon", "U", "t_root", "alpha_root", "lambda", "ln_lambda", "predictor",
              "rel_dev", "bs_nearest", "bs_gap", "n_near_one", "m_norm_at_root", "status"),
    "sweep": ("epsilon", "lambda", "ln_lambda", "predictor", "rel_dev", "eps_times_ln", "status"),
    "hs-norm": ("alpha", "hs_norm", "mu_1", "mu_2", "mu_3"),
    "oracle-compare": ("epsilon", "outcome", "lambda_bs", "lambda_fd", "lambda_fd_fine",
                       "lambda_fd_extrapolated", "ln_rel_diff", "L", "n"),
    "lemma-check": ("which", "s", "c_emp", "argmax_alpha", "argmax_r", "n_samples"),
    "lemma-curve": ("s", "alpha", "m_norm", "norm_ratio", "form_ratio"),
    "verify-paper": ("criterion", "name", "passed", "detail"),
}


class ConfigError(Exception):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class RunConfig:
    command: str
    potential: dict = field(default_factory=lambda: {"name": "disk", "params": {}})
    grid: dict = field(default_factory=dict)
    eps: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    s: list = field(default_factory=list)
    which: list = field(default_factory=list)
    conditions: list = field(default_factory=list)
    curve: bool = False
    root_tol: float = 1e-10
    fd_n: int = 160
    out: str | None = None
    format: str = "csv"
    jobs: int = 1
    seed: int = 0
    quick: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"config.{extra[0]}", "unknown field")
        return cls(**d)


def render_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


# -- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _floats(text, path):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(path, f"expected a comma-separated list of numbers, got {text!r}") from None


def _params(text):
    text = text.strip()
    if text.startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("params", f"invalid JSON: {exc.msg}") from None
        if not isinstance(d, dict):
            raise ConfigError("params", "expected an object")
        return d
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in item:
            raise ConfigError("params", f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ConfigError(f"params.{k.strip()}", f"not a number: {v!r}") from None
    return out


def _potential_spec(text, params):
    """A built-in name, an inline JSON document or a path to a JSON file."""
    if text is None:
        text = "disk"
    if text.lstrip().startswith("{"):
        spec = json.loads(text)
    elif Path(text).suffix == ".json" or Path(text).is_file():
        try:
            spec = json.loads(Path(text).read_text())
        except OSError as exc:
            raise ConfigError("potential", f"cannot read {text}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("potential", f"invalid JSON in {text}: {exc.msg}") from None
    else:
        spec = {"name": text}
    if params:
        if "piecewise_radial" in spec:
            raise ConfigError("params", "piecewise_radial potentials take no params")
        spec = {**spec, "params": {**spec.get("params", {}), **params}}
    return spec


def build_parser():
    p = _Parser(prog="weakbs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"weakbs {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="replay the configuration stored in a .meta.json sidecar")
        sp.add_argument("--potential", help="built-in name, inline JSON or JSON file (default disk)")
        sp.add_argument("--params", help="potential parameters: k=v,k=v or a JSON object")
        sp.add_argument("--grid", choices=("polar", "cartesian"), help="quadrature scheme")
        sp.add_argument("--resolution", type=int, help="rings (polar) or cells per axis (cartesian)")
        sp.add_argument("--grading", type=float, help="geometric ring grading (>= 1)")
        sp.add_argument("--radius", type=float, help="grid radius (needed for unbounded support)")
        sp.add_argument("--eps", help="comma-separated coupling constants")
        sp.add_argument("--alpha", help="comma-separated spectral parameters")
        sp.add_argument("--s", help="comma-separated exponents")
        sp.add_argument("--out", help="CSV output path (a .meta.json sidecar is written next to it)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--quick", action="store_true", help="half resolution, doubled tolerances")
        return sp

    sp = common(sub.add_parser("check-assumptions", help="integrability conditions on V"))
    sp.add_argument("--conditions", default="L1,ln_s,roll,simon_s,simon_eta")
    common(sub.add_parser("solve", help="weak-coupling eigenvalue for each eps"))
    common(sub.add_parser("sweep", help="asymptotic-law table over eps"))
    common(sub.add_parser("hs-norm", help="Hilbert-Schmidt norm and top eigenvalues of Q(alpha)"))
    sp = common(sub.add_parser("oracle-compare", help="finite-difference cross-check"))
    sp.add_argument("--fd-n", type=int, default=160, help="coarse FD points per axis")
    sp = common(sub.add_parser("lemma-check", help="kernel inequality constants or M-part rates"))
    sp.add_argument("--which", default="i,ii,iii")
    sp.add_argument("--curve", action="store_true", help="tabulate the M-part rate ratios instead")
    common(sub.add_parser("verify-paper", help="run the acceptance suite"))
    return p


def config_from_args(ns):
    if ns.config:
        try:
            meta = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot load {ns.config}: {exc}") from None
        cfg = RunConfig.from_dict(meta.get("config", meta))
        if cfg.command != ns.command:
            raise ConfigError("config.command", f"stored command {cfg.command!r} differs from {ns.command!r}")
        if ns.out:
            cfg.out = ns.out
        return cfg
    grid = {k: v for k, v in (("scheme", ns.grid), ("resolution", ns.resolution),
                              ("grading", ns.grading), ("radius", ns.radius)) if v is not None}
    params = _params(ns.params) if ns.params else {}
    cfg = RunConfig(
        command=ns.command, potential=_potential_spec(ns.potential, params), grid=grid,
        eps=_floats(ns.eps, "eps") if ns.eps else [],
        alpha=_floats(ns.alpha, "alpha") if ns.alpha else [],
        s=_floats(ns.s, "s") if ns.s else [],
        which=[w.strip() for w in getattr(ns, "which", "").split(",") if w.strip()],
        conditions=[c.strip() for c in getattr(ns, "conditions", "").split(",") if c.strip()],
        curve=bool(getattr(ns, "curve", False)), fd_n=getattr(ns, "fd_n", 160),
        out=ns.out, format=ns.format, jobs=ns.jobs, seed=ns.seed, quick=ns.quick)
    if cfg.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    return cfg


# -- commands ----------------------------------------------------------------


def _grid(cfg, V):
    from .grid import default_grid

    g = dict(cfg.grid)
    res = g.get("resolution")
    if cfg.quick and res:
        res = max(8, res // 2)
    elif cfg.quick:
        res = 16
    try:
        return default_grid(V, res, g.get("scheme"), g.get("grading"), g.get("radius"))
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None


def _require(values, path):
    if not values:
        raise ConfigError(path, "at least one value is required")
    return values


def cmd_check_assumptions(cfg, V):
    s_vals = cfg.s or [0.5]
    conds = cfg.conditions or ["L1", "ln_s", "roll", "simon_s", "simon_eta"]
    default_param = {"L1": [0.0], "roll": [0.0], "ln_s": s_vals,
                     "simon_s": s_vals, "simon_eta": [0.1, 0.2]}
    rows, failed = [], False
    for c in conds:
        if c not in default_param:
            raise ConfigError("conditions", f"unknown condition {c!r}")
        for par in default_param[c]:
            if c == "ln_s" and not 0 <= par < 1:
                raise ConfigError("s", "ln_s needs s in [0, 1)")
            try:
                r = check_assumption(V, c, par)
            except UnsupportedError as exc:
                rows.append((c, par, math.nan, False, False, f"unsupported: {exc}"))
                continue
            status = "holds" if r.holds else ("divergent" if r.divergent else "unresolved")
            failed |= not r.holds
            rows.append((c, par, r.value, r.converged, r.divergent, status))
    return rows, EXIT_HYPOTHESIS if failed else EXIT_OK


def _u_check(V):
    from .potential import integral_U

    U = integral_U(V).value
    if not U > 0:
        print("theorem hypothesis int V > 0 violated "
              f"(int V = {U:.6g})", file=sys.stderr)
    return U


def cmd_solve(cfg, V):
    from .weakcoupling import FOUND, find_root

    eps = _require(cfg.eps, "eps")
    U = _u_check(V)
    grid = _grid(cfg, V)
    rows, found = [], 0
    for e in eps:
        if not e > 0:
            raise ConfigError("eps", "all values must be positive")
        r = find_root(V, grid, e, U=U, root_tol=cfg.root_tol)
        found += r.status == FOUND
        rows.append((r.epsilon, r.U, r.t_root, r.alpha_root, r.lam, r.ln_lambda, r.predictor,
                     r.rel_dev, r.bs_nearest, r.bs_gap, r.n_near_one, r.m_norm_at_root, r.status))
    if not U > 0:
        return rows, EXIT_HYPOTHESIS
    return rows, EXIT_OK if found == len(eps) else EXIT_PARTIAL


def cmd_sweep(cfg, V):
    from .weakcoupling import FOUND, sweep

    eps = _require(cfg.eps, "eps")
    if any(not e > 0 for e in eps):
        raise ConfigError("eps", "all values must be positive")
    U = _u_check(V)
    recs = sweep(V, _grid(cfg, V), eps, U=U, jobs=cfg.jobs)
    rows = [tuple(vars(r).values()) for r in recs]
    if not U > 0:
        return rows, EXIT_HYPOTHESIS
    return rows, EXIT_OK if all(r.status == FOUND for r in recs) else EXIT_PARTIAL


def cmd_hs_norm(cfg, V):
    from .bsop import assemble, node_data, top_spectrum

    alphas = _require(cfg.alpha, "alpha")
    if any(not a > 0 for a in alphas):
        raise ConfigError("alpha", "all values must be positive")
    grid = _grid(cfg, V)
    node = node_data(V, grid)
    rows = []
    for a in alphas:
        summ = top_spectrum(assemble(V, grid, a, "Q", _node=node), k=3)
        mu = list(summ.top_eigenvalues) + [math.nan] * (3 - len(summ.top_eigenvalues))
        rows.append((a, summ.hs_norm, *mu))
    return rows, EXIT_OK


def cmd_oracle_compare(cfg, V):
    from .oracle import cross_validate
    from .weakcoupling import find_root

    eps = _require(cfg.eps, "eps")
    grid = _grid(cfg, V)
    n = max(8, cfg.fd_n // 2) if cfg.quick else cfg.fd_n
    rows, ok = [], True
    for e in eps:
        res = find_root(V, grid, e, root_tol=cfg.root_tol)
        cv = cross_validate(V, e, res, n=n)
        ok &= cv.outcome in ("compared", "agree_absent")
        rows.append((cv.epsilon, cv.outcome, cv.lambda_bs, cv.lambda_fd, cv.lambda_fd_fine,
                     cv.lambda_fd_extrapolated, cv.ln_rel_diff, cv.L, cv.n))
    return rows, EXIT_OK if ok else EXIT_PARTIAL


def cmd_lemma_check(cfg, V):
    if cfg.curve:
        from .bsop import m_norm_curve

        alphas = cfg.alpha or [1e-2, 1e-4, 1e-6, 1e-8]
        rows = []
        for s in cfg.s or [0.0, 0.5]:
            try:
                curve = m_norm_curve(V, _grid(cfg, V), s, alphas)
            except ValueError as exc:
                raise ConfigError("alpha" if "alpha" in str(exc) else "s", str(exc)) from None
            rows.extend((s, *r) for r in curve)
        return rows, EXIT_OK
    from .specfun import SamplePlan, lemma_ineq_constant

    plan = SamplePlan(21, 41) if cfg.quick else SamplePlan()
    rows = []
    for w in cfg.which or ["i", "ii", "iii"]:
        for s in cfg.s or [1.0]:
            try:
                r = lemma_ineq_constant(w, s, plan)
            except ValueError as exc:
                raise ConfigError("which" if "inequality" in str(exc) else "s", str(exc)) from None
            rows.append((w, s, r.c_emp, r.argmax_alpha, r.argmax_r, r.n_samples))
    return rows, EXIT_OK


def cmd_verify_paper(cfg, V=None):
    from .acceptance import run_all

    results = run_all(quick=cfg.quick, seed=cfg.seed,
                      progress=lambda r: print(r.line(), flush=True))
    rows = [r.row() for r in results]
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""), flush=True)
    cfg._timings = {f"criterion_{r.number}": round(r.seconds, 3) for r in results}
    return rows, EXIT_ACCEPTANCE if failed else EXIT_OK


COMMANDS = {
    "check-assumptions": cmd_check_assumptions, "solve": cmd_solve, "sweep": cmd_sweep,
    "hs-norm": cmd_hs_norm, "oracle-compare": cmd_oracle_compare,
    "lemma-check": cmd_lemma_check, "verify-paper": cmd_verify_paper,
}


def _versions():
    return {"weakbs": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _emit(cfg, columns, rows, meta):
    if cfg.format == "json":
        doc = {"columns": list(columns), "rows": [[_cell(v) for v in r] for r in rows], **meta}
        text = json.dumps(doc, indent=2, default=str) + "\n"
    else:
        text = render_csv(columns, rows)
    if cfg.out:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if cfg.format == "csv":
            Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    elif cfg.command != "verify-paper" or cfg.format == "json":
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = config_from_args(ns)
        V = None if cfg.command == "verify-paper" else load_potential(cfg.potential)
        if V is not None:
            cfg.potential = V.config
        columns = COLUMNS["lemma-curve" if cfg.command == "lemma-check" and cfg.curve else cfg.command]
        rows, code = COMMANDS[cfg.command](cfg, V)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PotentialConfigError as exc:
        print(f"configuration error: potential.{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"configuration error at potential: invalid JSON: {exc.msg}", file=sys.stderr)
        return EXIT_CONFIG
    timings = {"total_seconds": round(time.perf_counter() - t0, 3)}
    timings.update(getattr(cfg, "_timings", {}))
    meta = {"config": cfg.to_dict(), "versions": _versions(), "timings": timings, "exit_code": code}
    _emit(cfg, columns, rows, meta)
    return code


if __name__ == "__main__":
    sys.exit(main())
