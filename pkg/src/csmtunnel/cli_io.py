"""Geometry presets, JSON run configuration, the command-line pipeline and all file output.

Config units: lengths in meters, angles in degrees, E in MPa, unit weight in kN/m^3.
Nothing in the pipeline is random, so identical configs give bit-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .deep_map import DeepMap, solve_deep
from .diagnostics import (deep_error_report, grid_pullback, i_ratio_defect, interior_test_points,
                          shallow_error_report)
from .elasticity import (MaterialParams, eval_fields, ground_split, mises, residual_report, solve_series,
                         total_fields)
from .errors import CSMError, ParseError
from .geometry import (Arc, BoundarySpec, CollocationSet, EllipticArc, Line, build_boundary, discretize,
                       round_corners, turning_number)
from .shallow_map import BACKWARD_OFFSETS, FORWARD_OFFSETS, ShallowCompositeMap, solve_shallow

MODES = ("map-deep", "map-shallow", "solve-shallow", "grid", "check")
SHALLOW_SHIFT = -10j


# ---------------------------------------------------------------- presets

def _underbreak_horseshoe() -> BoundarySpec:
    return build_boundary([Arc(0, 5, 1.5 * math.pi, 0), Line(5, 5 - 4.5j),
                           Arc(4.5 - 4.5j, 0.5, 0, -0.5 * math.pi, True), Line(4.5 - 5j, -5j)])


def _full_horseshoe() -> BoundarySpec:
    # semicircular crown, vertical walls, flat invert split at x = 0, both invert corners rounded
    raw = BoundarySpec((Arc(0, 5, math.pi, 0), Line(5, 5 - 5j), Line(5 - 5j, -5j), Line(-5j, -5 - 5j),
                        Line(-5 - 5j, -5)))
    return build_boundary(list(round_corners(raw, 0.5).segments))


def _overbreak_horseshoe() -> BoundarySpec:
    # quarter-circle crown on the right, an over-broken polygonal crown on the left
    raw = BoundarySpec((Arc(0, 5, 0.5 * math.pi, 0), Line(5, 5 - 5j), Line(5 - 5j, -5j), Line(-5j, -5 - 5j),
                        Line(-5 - 5j, -5 + 2.5j), Line(-5 + 2.5j, -2.5 + 5j), Line(-2.5 + 5j, 5j)))
    return build_boundary(list(round_corners(raw, 0.5).segments))


def _square() -> BoundarySpec:
    c = [5 + 5j, 5 - 5j, -5 - 5j, -5 + 5j]
    lines = []
    for k in range(4):
        a, b = c[k], c[(k + 1) % 4]
        m = 0.5 * (a + b)
        lines += [Line(a, m), Line(m, b)]
    # start mid-side so that every corner is interior to the list
    lines = lines[1:] + lines[:1]
    return build_boundary(list(round_corners(BoundarySpec(tuple(lines)), 0.5).segments))


def _circle() -> BoundarySpec:
    return build_boundary([Arc(0, 5, 1.5 * math.pi, -0.5 * math.pi)])


def _bi_elliptic() -> BoundarySpec:
    # x > 0 half-ellipse with semi-axes (6, 5), x <= 0 half with (4, 5), centre -10i
    return build_boundary([EllipticArc(-10j, 6, 5, 0.5 * math.pi, -0.5 * math.pi),
                           EllipticArc(-10j, 4, 5, 1.5 * math.pi, 0.5 * math.pi)])


def _counts_by_spacing(spec: BoundarySpec, spacing: float) -> list:
    out = []
    for s in spec.segments:
        h = spacing / 2 if getattr(s, "fillet", False) else spacing
        out.append(max(1, int(math.ceil(s.length / h - 1e-9))))
    return out


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str
    spec: BoundarySpec
    counts: tuple
    z_c1: complex = 0.0
    z_c2: Optional[complex] = None
    description: str = ""

    def collocation(self, counts=None) -> CollocationSet:
        return discretize(self.spec, list(counts) if counts is not None else list(self.counts))


def _deep_and_shallow(name, spec, counts, desc):
    shifted = spec.translated(SHALLOW_SHIFT)
    return [Preset(name, "deep", spec, tuple(counts), 0.0, None, desc),
            Preset(name + "-shallow", "shallow", shifted, tuple(counts), 0.0, SHALLOW_SHIFT,
                   desc + ", centre 10 m below the ground")]


def _build_presets() -> dict:
    items = []
    items += _deep_and_shallow("circle", _circle(), [64], "radius-5 circle")
    items += _deep_and_shallow("horseshoe", _underbreak_horseshoe(), [120, 30, 20, 30],
                               "under-break horseshoe, 3/4 circle r=5 with a filleted corner")
    fh = _full_horseshoe()
    items += _deep_and_shallow("horseshoe-full", fh, _counts_by_spacing(fh, 0.16),
                               "horseshoe with semicircular crown and two filleted invert corners")
    ob = _overbreak_horseshoe()
    items += _deep_and_shallow("overbreak-horseshoe", ob, _counts_by_spacing(ob, 0.16),
                               "horseshoe with an over-broken polygonal left crown")
    sq = _square()
    items += _deep_and_shallow("square", sq, _counts_by_spacing(sq, 0.16), "10 m square with filleted corners")
    items.append(Preset("bi-elliptic", "shallow", _bi_elliptic(), (100, 100), 0.0, SHALLOW_SHIFT,
                        "half-ellipses with semi-axes (4,5) and (6,5) joined at x = 0, centre -10i"))
    return {p.name: p for p in items}


PRESETS = _build_presets()


def presets() -> list:
    return sorted(PRESETS)


# ---------------------------------------------------------------- configuration

_TOP_KEYS = {"mode", "preset", "geometry", "counts", "spacing", "offset_factor", "backward_offset",
             "forward_offsets", "backward_offsets", "z_c1", "z_c2", "n_exterior", "T1", "T2", "material",
             "n0", "tol", "grid", "out_dir", "seed"}
_GEOM_KEYS = {"segments", "fillet_radius", "shift"}
_SEG_KEYS = {"line": {"type", "start", "end"},
             "arc": {"type", "center", "radius", "start_deg", "end_deg"},
             "ellipse": {"type", "center", "a", "b", "start_deg", "end_deg"}}
_MAT_KEYS = {"E_MPa", "nu", "gamma_kN_m3", "kx"}
_GRID_KEYS = {"rho_count", "theta_count", "rho_range"}


@dataclass
class RunConfig:
    mode: str
    preset: Optional[str] = None
    geometry: Optional[dict] = None
    counts: Optional[list] = None
    spacing: Optional[float] = None
    offset_factor: float = 1.0
    backward_offset: float = 2.0
    forward_offsets: list = field(default_factory=lambda: list(FORWARD_OFFSETS))
    backward_offsets: list = field(default_factory=lambda: list(BACKWARD_OFFSETS))
    z_c1: list = field(default_factory=lambda: [0.0, 0.0])
    z_c2: Optional[list] = None
    n_exterior: int = 90
    T1: float = -10.0
    T2: float = 10.0
    material: object = "table1"
    n0: int = 60
    tol: float = 1e-10
    grid: dict = field(default_factory=lambda: {"rho_count": 11, "theta_count": 36})
    out_dir: str = "out"
    seed: None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def material_params(self) -> MaterialParams:
        if self.material == "table1":
            return MaterialParams.table1()
        m = self.material
        return MaterialParams(E=m["E_MPa"] * 1e6, nu=m["nu"], gamma=m["gamma_kN_m3"] * 1e3, kx=m["kx"])


def _pt(v, key):
    if not (isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ParseError(f"{key}: expected [x, y]")
    return complex(float(v[0]), float(v[1]))


def _unknown(d: dict, allowed: set, ctx: str):
    extra = sorted(set(d) - allowed)
    if extra:
        raise ParseError(f"{ctx}: unknown key(s) {extra}")


def _number(d, key, ctx, kind=float, positive=False):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (kind is int and not float(v).is_integer()):
        raise ParseError(f"{ctx}{key}: expected a number")
    v = kind(v)
    if positive and not v > 0:
        raise ParseError(f"{ctx}{key}: must be positive")
    return v


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON object; unknown keys and missing mode-required fields are rejected."""
    if not isinstance(data, dict) or not data:
        raise ParseError("config must be a non-empty JSON object")
    _unknown(data, _TOP_KEYS, "config")
    if "mode" not in data:
        raise ParseError("config: missing key 'mode'")
    if data["mode"] not in MODES:
        raise ParseError(f"mode: expected one of {MODES}, got {data['mode']!r}")
    cfg = RunConfig(mode=data["mode"])
    if ("preset" in data) == ("geometry" in data):
        raise ParseError("config: give exactly one of 'preset' or 'geometry'")
    if "preset" in data:
        p = data["preset"]
        if not (p in PRESETS or (p == "all" and cfg.mode == "check")):
            raise ParseError(f"preset: unknown preset {p!r}; available {presets()}")
        cfg.preset = p
    else:
        g = data["geometry"]
        if not isinstance(g, dict) or "segments" not in g:
            raise ParseError("geometry: expected an object with 'segments'")
        _unknown(g, _GEOM_KEYS, "geometry")
        for i, s in enumerate(g["segments"]):
            ctx = f"geometry.segments[{i}]"
            if not isinstance(s, dict) or s.get("type") not in _SEG_KEYS:
                raise ParseError(f"{ctx}: type must be one of {sorted(_SEG_KEYS)}")
            _unknown(s, _SEG_KEYS[s["type"]], ctx)
            missing = sorted(_SEG_KEYS[s["type"]] - set(s))
            if missing:
                raise ParseError(f"{ctx}: missing key(s) {missing}")
        cfg.geometry = g
    for key in ("offset_factor", "backward_offset", "spacing", "tol"):
        if key in data:
            setattr(cfg, key, _number(data, key, "", positive=True))
    for key in ("T1", "T2"):
        if key in data:
            setattr(cfg, key, _number(data, key, ""))
    for key in ("n0", "n_exterior"):
        if key in data:
            setattr(cfg, key, _number(data, key, "", int, positive=True))
    if "counts" in data:
        c = data["counts"]
        if not (isinstance(c, list) and c and all(isinstance(x, int) and x >= 1 for x in c)):
            raise ParseError("counts: expected a list of positive integers")
        cfg.counts = c
    for key in ("forward_offsets", "backward_offsets"):
        if key in data:
            v = data[key]
            if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and x > 0 for x in v)):
                raise ParseError(f"{key}: expected two positive numbers")
            setattr(cfg, key, [float(x) for x in v])
    for key in ("z_c1", "z_c2"):
        if key in data:
            _pt(data[key], key)
            setattr(cfg, key, [float(x) for x in data[key]])
    if "material" in data:
        m = data["material"]
        if m != "table1":
            if not isinstance(m, dict):
                raise ParseError("material: expected 'table1' or an object")
            _unknown(m, _MAT_KEYS, "material")
            missing = sorted(_MAT_KEYS - set(m))
            if missing:
                raise ParseError(f"material: missing key(s) {missing}")
            for k in _MAT_KEYS:
                _number(m, k, "material.")
        cfg.material = m
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict):
            raise ParseError("grid: expected an object")
        _unknown(g, _GRID_KEYS, "grid")
        merged = dict(cfg.grid)
        merged.update(g)
        cfg.grid = merged
    if "out_dir" in data:
        if not isinstance(data["out_dir"], str):
            raise ParseError("out_dir: expected a string")
        cfg.out_dir = data["out_dir"]
    if data.get("seed") is not None:
        raise ParseError("seed: the pipeline has no randomness; only null is accepted")
    if not cfg.T1 < cfg.T2:
        raise ParseError("T1 must be smaller than T2")
    try:
        cfg.material_params()
    except ValueError as e:
        raise ParseError(f"material: {e}") from None
    return cfg


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    if not text.strip():
        raise ParseError(f"{path}: empty config file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_config(data)


def dump_config(cfg: RunConfig) -> str:
    """Canonical JSON form; parse_config(json.loads(dump_config(c))) == c."""
    d = {k: v for k, v in cfg.to_dict().items() if v is not None}
    return json.dumps(d, indent=2, sort_keys=True)


# ---------------------------------------------------------------- geometry resolution

def _segment(s: dict):
    if s["type"] == "line":
        return Line(_pt(s["start"], "start"), _pt(s["end"], "end"))
    if s["type"] == "arc":
        return Arc(_pt(s["center"], "center"), float(s["radius"]), math.radians(s["start_deg"]),
                   math.radians(s["end_deg"]))
    return EllipticArc(_pt(s["center"], "center"), float(s["a"]), float(s["b"]), math.radians(s["start_deg"]),
                       math.radians(s["end_deg"]))


def resolve_geometry(cfg: RunConfig, preset_name: Optional[str] = None):
    """(collocation set, kind or None, z_c1, z_c2) for the configured cavity."""
    name = preset_name or cfg.preset
    if name is not None:
        p = PRESETS[name]
        counts = cfg.counts
        if counts is None and cfg.spacing is not None:
            counts = _counts_by_spacing(p.spec, cfg.spacing)
        cs = p.collocation(counts)
        z_c2 = complex(*cfg.z_c2) if cfg.z_c2 is not None else p.z_c2
        return cs, p.kind, complex(*cfg.z_c1), z_c2
    g = cfg.geometry
    spec = build_boundary([_segment(s) for s in g["segments"]])
    if g.get("fillet_radius"):
        spec = build_boundary(list(round_corners(spec, float(g["fillet_radius"])).segments))
    if g.get("shift"):
        spec = spec.translated(_pt(g["shift"], "geometry.shift"))
    if cfg.counts is not None:
        cs = discretize(spec, cfg.counts)
    else:
        cs = discretize(spec, spacing=cfg.spacing or spec.perimeter / 200)
    z_c2 = complex(*cfg.z_c2) if cfg.z_c2 is not None else None
    return cs, None, complex(*cfg.z_c1), z_c2


# ---------------------------------------------------------------- writers

def _f(x) -> str:
    return repr(float(x))


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True, allow_nan=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([x if isinstance(x, (str, int)) else _f(x) for x in r])


def load_map(path):
    d = json.loads(Path(path).read_text())
    if d.get("kind") == "deep":
        return DeepMap.from_dict(d)
    if d.get("kind") == "shallow":
        return ShallowCompositeMap.from_dict(d)
    raise ParseError(f"{path}: unknown map kind {d.get('kind')!r}")


def save_map(path, m) -> None:
    write_json(Path(path), m.to_dict())


# ---------------------------------------------------------------- pipeline

def _solve_map(cfg: RunConfig, kind: str, cs, z_c1, z_c2):
    if kind == "deep":
        return solve_deep(cs, z_c1, cfg.offset_factor, cfg.backward_offset)
    return solve_shallow(cs, z_c2, cfg.n_exterior, tuple(cfg.forward_offsets), tuple(cfg.backward_offsets))


def _map_report(m, cs) -> dict:
    rep = deep_error_report(m, cs) if isinstance(m, DeepMap) else shallow_error_report(m, cs)
    d = rep.to_dict()
    pts = interior_test_points(m)
    d["i_ratio_max"] = float(i_ratio_defect(m, pts).max())
    if isinstance(m, DeepMap):
        d["charge_sum"] = float(abs(m.forward.charges.sum()))
        img = m.backward.evaluate(np.exp(-2j * np.pi * np.arange(len(cs)) / len(cs)))
    else:
        img = m.backward(m.r_i * np.exp(-2j * np.pi * np.arange(len(cs)) / len(cs)))
    d["turning_number_cavity"] = int(turning_number(cs.points))
    d["turning_number_image"] = int(turning_number(img))
    return d


def _grid_rows(m, cfg: RunConfig):
    g = cfg.grid
    gp = grid_pullback(m, int(g["rho_count"]), int(g["theta_count"]), g.get("rho_range"))
    return gp.rows()


def _cavity_rows(sol, n: int = 720):
    al = sol.alpha
    th = 2 * np.pi * (np.arange(n) + 0.5) / n
    zeta = al * np.exp(1j * th)
    exc = eval_fields(sol, zeta=zeta)
    tot = total_fields(sol, zeta=zeta)
    vm = mises(tot, sol.material.nu)
    for k in range(n):
        yield (th[k], exc.z[k].real, exc.z[k].imag, tot.srho[k], tot.stheta[k], tot.trt[k], exc.ux[k], exc.uy[k],
               vm[k])


def _surface_rows(sol, n: int = 401):
    sp = sol.split
    half = 1.5 * (sp.T2 - sp.T1)
    mid = 0.5 * (sp.T1 + sp.T2)
    x = mid + np.linspace(-half, half, n)
    an_forward = sol.smap.forward(x.astype(complex)) / sol.smap.r_o
    zeta = an_forward / np.abs(an_forward)
    exc = eval_fields(sol, zeta=zeta)
    for k in range(n):
        yield (x[k], exc.sx[k], exc.sy[k], exc.txy[k], exc.ux[k], exc.uy[k])


def run(cfg: RunConfig, log=None) -> int:
    """Execute one configured run; returns the process exit status."""
    log = log or (lambda msg: print(msg, file=sys.stderr))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if cfg.mode == "check":
            return _run_check(cfg, out, log)
        cs, kind, z_c1, z_c2 = resolve_geometry(cfg)
        if cfg.mode == "map-deep":
            kind = "deep"
        elif cfg.mode in ("map-shallow", "solve-shallow"):
            kind = "shallow"
        elif kind is None:
            kind = "shallow" if np.all(cs.points.imag < 0) and z_c2 is not None else "deep"
        t0 = time.perf_counter()
        m = _solve_map(cfg, kind, cs, z_c1, z_c2)
        errors = {"map": _map_report(m, cs), "map_seconds": time.perf_counter() - t0, "seed": None}
        save_map(out / "map.json", m)
        if cfg.mode in ("map-deep", "map-shallow", "grid"):
            write_csv(out / "grid.csv", ["family", "index", "parameter", "x", "y"], _grid_rows(m, cfg))
        if cfg.mode == "solve-shallow":
            sol = solve_series(m, cfg.material_params(), ground_split(m, cfg.T1, cfg.T2), n0=cfg.n0, tol=cfg.tol)
            errors["residuals"] = residual_report(sol).summary()
            write_json(out / "solution.json", sol.to_dict())
            write_csv(out / "cavity_fields.csv",
                      ["theta", "x", "y", "sigma_rho", "sigma_theta", "tau_rho_theta", "ux", "uy", "mises"],
                      _cavity_rows(sol))
            write_csv(out / "surface_fields.csv", ["x", "sigma_x", "sigma_y", "tau_xy", "ux", "uy"],
                      _surface_rows(sol))
        write_json(out / "errors.json", errors)
        log(f"{cfg.mode}: wrote {', '.join(sorted(p.name for p in out.iterdir()))} to {out}")
        return 0
    except ParseError as e:
        log(f"config error: {e}")
        return 1
    except (CSMError, np.linalg.LinAlgError) as e:
        write_json(out / "failure.json", {"error": type(e).__name__, "message": str(e)})
        log(f"solver failure: {type(e).__name__}: {e}")
        return 2


def _check_one(cfg: RunConfig, name: str) -> dict:
    p = PRESETS[name]
    cs, kind, z_c1, z_c2 = resolve_geometry(cfg, name)
    m = _solve_map(cfg, kind, cs, z_c1, z_c2)
    rep = _map_report(m, cs)
    e = rep["errors"]
    checks = {"errors_finite": all(np.isfinite(v) for v in e.values() if isinstance(v, float)),
              "i_ratio": rep["i_ratio_max"] <= 1e-4,
              "turning_number": rep["turning_number_cavity"] == rep["turning_number_image"]}
    if kind == "deep":
        checks["charge_sum"] = rep["charge_sum"] <= 1e-12
        checks["backward_error"] = e["eps_b"] <= 1e-3 * p.spec.diameter
    else:
        checks["charge_sum"] = e["sum_Q1_plus_1"] <= 1e-12 and e["sum_Q2"] <= 1e-12
        sol = solve_series(m, cfg.material_params(), ground_split(m, cfg.T1, cfg.T2), n0=cfg.n0, tol=cfg.tol)
        s = residual_report(sol).summary()
        checks["jump_contract"] = max(sol.X.jump_residual) <= 1e-8
        checks["resultant"] = s["resultant_error"] <= 1e-2
        checks["fixed_displacement"] = s["fixed_displacement_ratio"] <= 1e-2
        checks["free_traction"] = s["free_traction_ratio"] <= 1e-2
        rep["residuals"] = s
    rep["checks"] = {k: bool(v) for k, v in checks.items()}
    return rep


def _run_check(cfg: RunConfig, out: Path, log) -> int:
    names = presets() if cfg.preset == "all" else [cfg.preset]
    if cfg.geometry is not None:
        raise ParseError("check mode runs presets only")
    results, ok = {}, True
    for name in names:
        try:
            r = _check_one(cfg, name)
        except CSMError as e:
            r = {"checks": {"solve": False}, "error": f"{type(e).__name__}: {e}"}
        passed = all(r["checks"].values())
        ok &= passed
        failed = [k for k, v in r["checks"].items() if not v]
        log(f"{'PASS' if passed else 'FAIL'} {name}" + (f" ({', '.join(failed)})" if failed else ""))
        results[name] = r
    write_json(out / "errors.json", {"check": results, "seed": None})
    return 0 if ok else 2


# ---------------------------------------------------------------- command line

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csmtunnel", description=__doc__.splitlines()[0])
    ap.add_argument("mode", nargs="?", choices=MODES)
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--preset", help=f"geometry preset ({', '.join(presets())}, or 'all' for check)")
    ap.add_argument("--out-dir")
    ap.add_argument("--n0", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--offset-factor", type=float, help="deep forward charge offset factor")
    ap.add_argument("--counts", help="comma-separated per-segment collocation counts")
    ap.add_argument("--material", help="'table1' (default)")
    ap.add_argument("--seed-none", action="store_true",
                    help="accepted for reproducibility scripts; the pipeline uses no random numbers")
    ap.add_argument("--list-presets", action="store_true")
    return ap


def config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        text = Path(args.config).read_text()
        if not text.strip():
            raise ParseError(f"{args.config}: empty config file")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{args.config}: line {e.lineno} column {e.colno}: {e.msg}") from None
        if not isinstance(data, dict):
            raise ParseError(f"{args.config}: expected a JSON object")
    if args.mode:
        data["mode"] = args.mode
    if args.preset:
        data.pop("geometry", None)
        data["preset"] = args.preset
    if args.out_dir:
        data["out_dir"] = args.out_dir
    if args.n0 is not None:
        data["n0"] = args.n0
    if args.tol is not None:
        data["tol"] = args.tol
    if args.offset_factor is not None:
        data["offset_factor"] = args.offset_factor
    if args.counts:
        try:
            data["counts"] = [int(x) for x in args.counts.split(",")]
        except ValueError:
            raise ParseError(f"--counts: expected comma-separated integers, got {args.counts!r}") from None
    if args.material:
        if args.material != "table1":
            raise ParseError("--material: only 'table1' is available on the command line; use --config")
        data["material"] = "table1"
    return parse_config(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_presets:
        for n in presets():
            print(f"{n:28s} {PRESETS[n].kind:8s} {PRESETS[n].description}")
        return 0
    try:
        cfg = config_from_args(args)
    except (ParseError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    return run(cfg)
