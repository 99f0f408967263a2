"""Command line front end: ``bialg <command> [options]``.

Every command except ``eval`` (CSV) and ``demo`` (text table) prints one JSON
report with sorted keys.  Settings are layered: built-in defaults, then a
``key = value`` config file (``--config``), then ``BIALG_PRECISION`` for the
digits, then explicit flags.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from importlib import resources

import jsonschema
import mpmath
import numpy as np
from mpmath import mp

from . import __version__
from .classify import (
    RealLine,
    bialgebraic_lines,
    classify,
    complex_bialgebraic_line,
    geodesic_json,
    line_from_rho,
    line_with_direction,
    rho_from_lattice_direction,
)
from .fitting import Tolerances, fit_vanishing_poly
from .lattice import (
    GUARD_DIGITS,
    TauSpec,
    UndecidableFromFloats,
    as_mpc,
    geodesic_through,
    is_cm,
    isog_conj_set,
    rational_abs_witness,
)
from .verify import density_probe, verify_complex_line, verify_line
from .weierstrass import POLE, PrecisionCfg, as_lattice, invariants, weierstrass_for

SCHEMA_VERSION = "1"
EXIT_FAIL = 1
EXIT_UNDECIDABLE = 2


@dataclass(frozen=True)
class RunConfig:
    digits: int = 40
    max_deg: int = 8
    samples: int = 512
    height_bound: int = 5
    seed: int = 0
    format: str = "auto"
    tol_low: float = 1e-10
    tol_high: float = 1e-4
    tol_hold: float = 1e-6

    def __post_init__(self):
        for name in ("digits", "max_deg", "samples", "height_bound"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.format not in ("auto", "json", "csv"):
            raise ValueError("format must be auto, json or csv")
        Tolerances(self.tol_low, self.tol_high, self.tol_hold)

    @property
    def precision(self) -> PrecisionCfg:
        return PrecisionCfg(digits=self.digits)

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_low, self.tol_high, self.tol_hold)


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[run]\n" + fh.read())
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for key, raw in parser["run"].items():
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def _coerce(key, raw):
    default = getattr(RunConfig, key)
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    return type(default)(raw)


def build_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    env = os.environ.get("BIALG_PRECISION")
    if env:
        values["digits"] = int(env)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

def _load_json_arg(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def parse_tau(text: str) -> TauSpec:
    return TauSpec.from_json(_load_json_arg(text))


def _pair(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("expected a pair")
        return float(v[0]), float(v[1])
    return _pair([s for s in str(v).split(",")])


def parse_line(text: str, spec: TauSpec, digits: int) -> RealLine:
    """Line JSON: one of ``direction`` [re, im], ``rho`` [re, im], ``lattice_direction`` [m, n]; optional ``offset``."""
    data = _load_json_arg(text)
    offset = _pair(data.get("offset", (0, 0)))
    keys = [k for k in ("direction", "rho", "lattice_direction") if k in data]
    if len(keys) != 1:
        raise ValueError("line needs exactly one of direction, rho, lattice_direction")
    key = keys[0]
    if key == "lattice_direction":
        m, n = (int(v) for v in data[key])
        line = rho_from_lattice_direction(m, n, spec, digits)
        return line.translate(*offset)
    re_, im_ = _pair(data[key])
    if key == "rho":
        return line_from_rho(complex(re_, im_), offset)
    return line_with_direction(complex(re_, im_), offset)


def _cpair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected two comma separated complex numbers, got {text!r}")
    return tuple(complex(p.strip().replace(" ", "")) for p in parts)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _schema():
    text = resources.files("bialg").joinpath("report_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def envelope(command: str, cfg: RunConfig, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": asdict(cfg),
        "result": result,
    }


def emit(report: dict, out=None):
    jsonschema.validate(report, _schema())
    out = out or sys.stdout
    out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _c(z, digits=20):
    z = as_mpc(z)
    return [mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args, cfg):
    spec = parse_tau(args.tau)
    cls = classify(spec, cfg.digits)
    res = cls.to_json()
    if cls.branch.value == "CM_FAMILY":
        res["sample_lines"] = [ln.to_json() for ln in bialgebraic_lines(spec, cfg.height_bound, cfg.digits, cls)]
    return envelope("classify", cfg, res)


def cmd_isog(args, cfg):
    spec = parse_tau(args.tau)
    iso = isog_conj_set(spec, cfg.digits)
    wit = rational_abs_witness(iso) if iso.rank else None
    cm = is_cm(spec, cfg.digits)
    with mp.workdps(cfg.digits + GUARD_DIGITS):
        res = {
            "rank": iso.rank,
            "basis": [list(r) for r in iso.basis.rows],
            "gammas": [_c(g) for g in iso.gammas],
            "matrices": [[list(row) for row in m] for m in iso.matrices],
            "abs_sq": list(iso.abs_sq),
            "residuals": [mpmath.nstr(r, 5) for r in iso.residuals()] if iso.rank else [],
            "cm": cm.cm,
            "minpoly": list(cm.minpoly) if cm.minpoly else None,
            "rational_abs_witness": None if wit is None else {"gamma": _c(wit.gamma), "abs": str(wit.abs)},
        }
    return envelope("isog", cfg, res)


def cmd_geodesic(args, cfg):
    spec = parse_tau(args.tau)
    return envelope("geodesic", cfg, {"geodesic": geodesic_json(geodesic_through(spec, cfg.digits))})


def cmd_invariants(args, cfg):
    spec = parse_tau(args.tau)
    inv = invariants(spec, cfg.precision)
    d = cfg.digits
    res = {"g2": _c(inv.g2, d), "g3": _c(inv.g3, d), "disc": _c(inv.disc, d), "j": _c(inv.j, d),
           "roots": [_c(r, d) for r in inv.roots]}
    return envelope("invariants", cfg, res)


EVAL_HEADER = ["z_re", "z_im", "wp_re", "wp_im", "wpp_re", "wpp_im"]


def cmd_eval(args, cfg, out=None):
    spec = parse_tau(args.tau)
    eng = weierstrass_for(as_lattice(spec, cfg.digits), cfg.precision)
    rows = []
    for text in args.z:
        with mp.workdps(eng.dps):
            z = mpmath.mpc(mpmath.mpmathify(text.replace(" ", "")))
            p = eng.pair(z)
            if p is POLE:
                rows.append([*_c(z, cfg.digits), "POLE", "POLE", "POLE", "POLE"])
            else:
                rows.append([*_c(z, cfg.digits), *_c(p[0], cfg.digits), *_c(p[1], cfg.digits)])
    if cfg.format == "json":
        return envelope("eval", cfg, {"rows": [dict(zip(EVAL_HEADER, r)) for r in rows]})
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(EVAL_HEADER)
    writer.writerows(rows)
    return None


def _write_points(path, samples):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        first = True
        for s in samples:
            for k, row in enumerate(s.to_csv_rows()):
                if k == 0 and not first:
                    continue
                writer.writerow(row)
            first = False


def cmd_verify_line(args, cfg):
    spec = parse_tau(args.tau)
    line = parse_line(args.line, spec, cfg.digits)
    pts = [] if args.emit_points else None
    rep = verify_line(spec, line, cfg.precision, n=cfg.samples, max_deg=cfg.max_deg, tol=cfg.tolerances,
                      seed=cfg.seed, emit_points=pts)
    if pts is not None:
        _write_points(args.emit_points, pts)
    res = rep.to_json()
    res["line"] = line.to_json()
    return envelope("verify-line", cfg, res)


def cmd_verify_complex(args, cfg):
    spec = parse_tau(args.tau)
    lat = as_lattice(spec, cfg.digits)
    cl = complex_bialgebraic_line(_cpair(args.w1), _cpair(args.w2), _cpair(args.sigma), lat)
    fit = verify_complex_line(cl, cfg.precision, n=cfg.samples // 2, max_deg=min(cfg.max_deg, 4),
                              tol=cfg.tolerances, seed=cfg.seed)
    res = fit.to_json()
    res.update({"predicted": True, "seed": cfg.seed,
                "agree": None if fit.verdict.value == "INCONCLUSIVE" else fit.verdict.value == "VANISHING"})
    return envelope("verify-complex", cfg, res)


def cmd_density(args, cfg):
    spec = parse_tau(args.tau)
    line = parse_line(args.line, spec, cfg.digits)
    rep = density_probe(spec, line, k=args.k, n=args.n, cfg=cfg.precision, fit=args.fit,
                        fit_samples=cfg.samples, max_deg=cfg.max_deg, seed=cfg.seed)
    res = rep.to_json()
    res["seed"] = cfg.seed
    try:
        res["predicted"] = classify(spec, cfg.digits).contains_line(line)
    except UndecidableFromFloats:
        res["predicted"] = None
    return envelope("density", cfg, res)


def cmd_fit(args, cfg):
    rows = []
    with open(args.points, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [header.index("X"), header.index("Y")] if "X" in header else [0, 1]
        for row in reader:
            if row:
                rows.append((float(row[cols[0]]), float(row[cols[1]])))
    fit = fit_vanishing_poly(np.array(rows), max_deg=cfg.max_deg, tol=cfg.tolerances, seed=cfg.seed)
    res = fit.to_json()
    res["seed"] = cfg.seed
    res["samples"] = len(rows)
    return envelope("fit", cfg, res)


def cmd_demo(args, cfg):
    from .acceptance import CRITERIA, run_all

    numbers = sorted(CRITERIA) if not args.only else [int(v) for v in args.only.split(",")]
    results = run_all(numbers, PrecisionCfg(digits=cfg.digits), echo=print if args.verbose else None)
    print(f"{'criterion':>9}  {'result':6}  {'seconds':>7}  title")
    for r in results:
        print(f"{r.number:>9}  {'PASS' if r.passed else 'FAIL':6}  {r.seconds:7.1f}  {r.title}")
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else 0


COMMANDS = {
    "classify": (cmd_classify, "classify the bialgebraic curves of a lattice"),
    "isog": (cmd_isog, "generators of Isog(L, conj L)"),
    "geodesic": (cmd_geodesic, "special geodesic through tau"),
    "eval": (cmd_eval, "wp and wp' at points (CSV)"),
    "invariants": (cmd_invariants, "g2, g3, discriminant, j and the roots e_i"),
    "verify-line": (cmd_verify_line, "sample a line and fit a vanishing polynomial"),
    "verify-complex": (cmd_verify_complex, "fit P(u, v) = 0 on a complex line W + sigma"),
    "density": (cmd_density, "torus coverage of a line"),
    "fit": (cmd_fit, "vanishing-polynomial fit of a CSV point cloud"),
    "demo": (cmd_demo, "run the acceptance suite and print a PASS/FAIL table"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--digits", type=int, help="working precision in decimal digits")
    common.add_argument("--max-deg", dest="max_deg", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--height-bound", dest="height_bound", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["auto", "json", "csv"],
                        help="eval defaults to CSV, everything else is JSON only")
    common.add_argument("--tol-low", dest="tol_low", type=float)
    common.add_argument("--tol-high", dest="tol_high", type=float)
    common.add_argument("--tol-hold", dest="tol_hold", type=float)

    parser = argparse.ArgumentParser(prog="bialg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bialg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    tau_help = 'TauSpec JSON, e.g. \'{"mode":"exact_quadratic","p":0,"q":1,"d":-1}\', or @file.json'
    line_help = 'line JSON: {"direction":[1,1]} | {"rho":[1,0]} | {"lattice_direction":[1,1]}, optional "offset":[x,y]'
    for name, (_, text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name not in ("fit", "demo"):
            p.add_argument("--tau", required=True, help=tau_help)
        if name in ("verify-line", "density"):
            p.add_argument("--line", required=True, help=line_help)
        if name == "verify-line":
            p.add_argument("--emit-points", help="write sampled points and images to this CSV file")
        if name == "eval":
            p.add_argument("z", nargs="+", help="points such as 0.5 or 0.25+0.1j")
        if name == "verify-complex":
            p.add_argument("--w1", required=True, help="pair of lattice points, e.g. '1,1'")
            p.add_argument("--w2", required=True, help="pair of lattice points, e.g. '1j,1j'")
            p.add_argument("--sigma", default="0,0", help="translation in C^2")
        if name == "density":
            p.add_argument("--k", type=int, default=16)
            p.add_argument("--n", type=int, default=8192)
            p.add_argument("--fit", action="store_true", help="also fit the sampled image")
        if name == "fit":
            p.add_argument("points", help="CSV with X and Y columns (as written by --emit-points)")
        if name == "demo":
            p.add_argument("--only", help="comma separated criterion numbers")
            p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if cfg.format == "csv" and args.command != "eval":
            raise ValueError("CSV output is only available for eval (use --emit-points for samples)")
        fn = COMMANDS[args.command][0]
        report = fn(args, cfg)
    except UndecidableFromFloats as exc:
        emit({"schema_version": SCHEMA_VERSION, "command": args.command,
              "error": {"code": "UNDECIDABLE_FROM_FLOATS", "reason": exc.reason}})
        return EXIT_UNDECIDABLE
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"bialg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if isinstance(report, int):
        return report
    if report is not None:
        emit(report)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
