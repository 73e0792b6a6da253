"""Command-line front end.

Usage::

    semiflow lambda --space hardy --N 64
    semiflow critsup --space perturbed:hardy
    semiflow flow --generator hyperbolic --t 0.3 --grid 16 --out results/
    semiflow bound-check --space dirichlet --csv bounds.csv
    semiflow norm --space hardy --generator parabolic --t 1
    semiflow verify --generator hyperbolic --space hardy
    semiflow catalog

Settings come from ``--config FILE`` (JSON) overridden by flags.  Exit
codes: 0 success, 1 configuration error, 2 negative mathematical verdict,
3 numerical failure (domain escape, no convergence).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainEscape, NoConvergence, UnknownCatalogEntry
from .flow import (CATALOG_NAMES, catalog, check_flow_axioms, parse_generator, start_grid,
                   trajectory)
from .quasi import (critsup, lambda_report, lambda_truncated, univalent_bound,
                    verify_quasicontractive_bound)
from .space import composition_matrix, composition_norm, operator_norm, weights
from .verify import TheoremTolerances, verify_theorem

EXIT_OK, EXIT_CONFIG, EXIT_NEGATIVE, EXIT_NUMERIC = 0, 1, 2, 3

MODULES = ("series", "flow", "space", "quasi", "verify", "cli")

COMMAND_DEFAULTS = {
    "verify": {"N": 32, "generator": "hyperbolic", "tgrid": [0.1, 0.25, 0.5]},
    "bound-check": {"tgrid": [round(0.1 * k, 10) for k in range(1, 11)]},
    "flow": {"t": 1.0},
}


@dataclass
class ExperimentConfig:
    space: str = "hardy"
    generator: str = "hyperbolic"
    N: int = 128
    t: float = 0.5
    tgrid: list | None = None
    grid: int = 16
    steps: int = 10
    eps: float = 1e-3
    tol: float = 1e-10
    claim1_tol: float = 1e-6
    generator_tol: float = 1e-6
    semigroup_tol: float = 1e-7
    seed: int = 0
    integrate: bool = False
    json: str | None = None
    csv: str | None = None
    out: str | None = None

    OUTPUT_KEYS = ("json", "csv", "out")

    def validate(self):
        if not isinstance(self.N, int) or self.N < 8:
            raise ConfigError("N must be an integer >= 8")
        if self.grid < 1 or self.steps < 1:
            raise ConfigError("grid and steps must be >= 1")
        for name in ("eps", "tol", "claim1_tol", "generator_tol", "semigroup_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.eps < 1:
            raise ConfigError("eps must lie in (0, 1)")
        if self.t < 0:
            raise ConfigError("t must be >= 0")
        if self.tgrid is not None:
            g = list(self.tgrid)
            if not g or any(b <= a for a, b in zip(g, g[1:])):
                raise ConfigError("tgrid must be strictly increasing and non-empty")
            if g[0] <= 0:
                raise ConfigError("tgrid entries must be positive")

    def experiment(self) -> dict:
        d = asdict(self)
        for k in self.OUTPUT_KEYS:
            d.pop(k)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.experiment(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _parse_tgrid(text):
    if isinstance(text, list):
        return [float(x) for x in text]
    text = text.strip()
    if text.startswith("["):
        return [float(x) for x in json.loads(text)]
    return [float(x) for x in text.split(",") if x.strip()]


def load_config(command: str, args: argparse.Namespace) -> ExperimentConfig:
    base = dict(COMMAND_DEFAULTS.get(command, {}))
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        base.update(data)
    for f in fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None and val is not False:
            base[f.name] = val
    if "tgrid" in base and base["tgrid"] is not None:
        try:
            base["tgrid"] = _parse_tgrid(base["tgrid"])
        except (ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad tgrid: {exc}") from None
    try:
        cfg = ExperimentConfig(**base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def envelope(command: str, cfg: ExperimentConfig, payload: dict) -> dict:
    return {
        "command": command,
        "config": cfg.experiment(),
        "config_hash": cfg.digest(),
        "versions": {"semiflow": __version__, "numpy": np.__version__,
                     "modules": {m: __version__ for m in MODULES}},
        **payload,
    }


def dump_json(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r])
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(buf.getvalue())


def _emit(doc: dict, cfg: ExperimentConfig, out) -> None:
    text = dump_json(doc)
    out.write(text)
    if cfg.json:
        Path(cfg.json).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.json).write_text(text)


def _escape_payload(exc: DomainEscape) -> dict:
    return {"error": "DomainEscape", "message": str(exc), "exit_time": exc.exit_time,
            "point": exc.point}


# -- commands ---------------------------------------------------------

def cmd_catalog(cfg, out):
    entries = []
    for name in CATALOG_NAMES:
        gen, flow = catalog(name)
        entries.append({"name": name, "generator": [complex(c) for c in gen.coeffs],
                        "label": gen.label(), "source": flow.source})
    _emit(envelope("catalog", cfg, {"catalog": entries}), cfg, out)
    return EXIT_OK


def cmd_flow(cfg, out):
    gen, flow = parse_generator(cfg.generator, eps=cfg.eps, tol=cfg.tol)
    if cfg.integrate:
        flow = flow.integrated()
    starts = start_grid(cfg.grid, cfg.eps)
    times = [cfg.t * k / cfg.steps for k in range(cfg.steps + 1)]
    rows, escapes, biggest = [], [], 0.0
    for z in starts:
        try:
            if flow.closed_point is not None:
                path = [flow.at(z, t) for t in times]
            else:
                path = trajectory(gen, z, times, eps=cfg.eps, tol=cfg.tol)
        except DomainEscape as exc:
            escapes.append({"z": complex(z), "exit_time": exc.exit_time})
            continue
        for t, w in zip(times, path):
            rows.append((t, z.real, z.imag, w.real, w.imag))
            biggest = max(biggest, abs(w)) if t == times[-1] else biggest
    outdir = Path(cfg.out or ".")
    csv_path = Path(cfg.csv) if cfg.csv else outdir / "flow.csv"
    write_csv(csv_path, ["t", "re_z", "im_z", "re_phi", "im_phi"], rows)
    payload = {"generator": gen.label(), "source": flow.source,
               "trajectories": len(starts) - len(escapes), "csv": str(csv_path)}
    if escapes:
        payload["error"] = "DomainEscape"
        payload["escapes"] = escapes
        code = EXIT_NUMERIC
    else:
        inner = [z for z in starts if abs(z) <= 0.5] or list(starts[:1])
        tg = [0.0, cfg.t / 2, cfg.t]
        payload["report"] = check_flow_axioms(flow, tg, tg, inner).to_json()
        payload["max_abs_phi"] = biggest
        code = EXIT_OK
    doc = envelope("flow", cfg, payload)
    text = dump_json(doc)
    json_path = Path(cfg.json) if cfg.json else outdir / "flow.json"
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(text)
    out.write(text)
    return code


def cmd_lambda(cfg, out):
    w = weights(cfg.space, cfg.N)
    lam = lambda_report(w)
    cs = critsup(w)
    _emit(envelope("lambda", cfg, {"lambda": lam.to_json(), "critsup": cs.to_json()}), cfg, out)
    if cfg.csv:
        from .quasi import coupling_sequence
        write_csv(cfg.csv, ["n", "c_n"], [(n, float(c)) for n, c in enumerate(coupling_sequence(w))])
    return EXIT_OK if cs.bounded else EXIT_NEGATIVE


def cmd_critsup(cfg, out):
    cs = critsup(weights(cfg.space, cfg.N))
    _emit(envelope("critsup", cfg, {"critsup": cs.to_json()}), cfg, out)
    return EXIT_OK if cs.bounded else EXIT_NEGATIVE


def cmd_bound_check(cfg, out):
    w = weights(cfg.space, cfg.N)
    cs = critsup(w)
    if not cs.bounded:
        _emit(envelope("bound-check", cfg, {"critsup": cs.to_json(), "rows": [],
                                            "verdict": "critsup diverging"}), cfg, out)
        return EXIT_NEGATIVE
    rows = verify_quasicontractive_bound(w, cfg.tgrid, cfg.N, seed=cfg.seed)
    ok = all(r.norm_N <= r.bound * (1 + 1e-6) for r in rows)
    payload = {"lambda_N": lambda_truncated(w), "rows": [r.to_json() for r in rows],
               "verdict": "bound holds" if ok else "bound violated"}
    _emit(envelope("bound-check", cfg, payload), cfg, out)
    if cfg.csv:
        write_csv(cfg.csv, ["t", "norm", "bound", "margin"],
                  [(r.t, r.norm_N, r.bound, r.margin) for r in rows])
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_norm(cfg, out):
    gen, flow = parse_generator(cfg.generator, eps=cfg.eps, tol=cfg.tol)
    if cfg.integrate:
        flow = flow.integrated()
    phi_at = lambda n: flow.series(cfg.t, n)
    report, converged = composition_norm(phi_at, cfg.space, cfg.N, seed=cfg.seed)
    w = weights(cfg.space, cfg.N)
    phi0 = complex(phi_at(cfg.N).coeffs[0])
    payload = {"norm": report.to_json(), "converged_in_N": converged, "phi0": phi0}
    cs = critsup(w)
    if cs.bounded:
        lam = lambda_truncated(w)
        payload["univalent_bound"] = univalent_bound(phi0, lam / 2)
        payload["exponent"] = lam / 2
    _emit(envelope("norm", cfg, payload), cfg, out)
    return EXIT_OK


def cmd_verify(cfg, out):
    gen, flow = parse_generator(cfg.generator, eps=cfg.eps, tol=cfg.tol)
    tol = TheoremTolerances(cfg.claim1_tol, cfg.generator_tol, cfg.semigroup_tol)
    try:
        report = verify_theorem(flow, weights(cfg.space, cfg.N), cfg.N, cfg.tgrid, tol)
    except DomainEscape as exc:
        _emit(envelope("verify", cfg, _escape_payload(exc)), cfg, out)
        return EXIT_NUMERIC
    _emit(envelope("verify", cfg, {"report": report.to_json()}), cfg, out)
    return EXIT_OK if report.consistent else EXIT_NEGATIVE


COMMANDS = {
    "flow": cmd_flow, "lambda": cmd_lambda, "critsup": cmd_critsup,
    "bound-check": cmd_bound_check, "norm": cmd_norm, "verify": cmd_verify,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--space", help="hardy | dirichlet | bergman | perturbed:<preset> | JSON array")
    common.add_argument("--generator", help="catalog name[:params] or custom:[c0,c1,...]")
    common.add_argument("--N", type=int, help="truncation degree")
    common.add_argument("--t", type=float, help="time")
    common.add_argument("--tgrid", help="comma separated or JSON list of times")
    common.add_argument("--grid", type=int, help="number of trajectories")
    common.add_argument("--steps", type=int, help="time samples per trajectory")
    common.add_argument("--eps", type=float, help="guard radius")
    common.add_argument("--tol", type=float, help="integrator tolerance per unit time")
    common.add_argument("--claim1-tol", dest="claim1_tol", type=float)
    common.add_argument("--generator-tol", dest="generator_tol", type=float)
    common.add_argument("--semigroup-tol", dest="semigroup_tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--integrate", action="store_true", default=None,
                        help="ignore closed forms and integrate the Cauchy problem")
    common.add_argument("--json", help="also write the JSON report here")
    common.add_argument("--csv", help="write the CSV table here")
    common.add_argument("--out", help="output directory (flow)")

    parser = argparse.ArgumentParser(prog="semiflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.command, args)
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, UnknownCatalogEntry, ValueError) as exc:
        sys.stderr.write(f"semiflow: configuration error: {exc}\n")
        return EXIT_CONFIG
    except DomainEscape as exc:
        sys.stderr.write(f"semiflow: {exc}\n")
        return EXIT_NUMERIC
    except NoConvergence as exc:
        sys.stderr.write(f"semiflow: no convergence: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
