"""Midpoint error estimates, conformality checks and grid pullbacks for solved maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .deep_map import DeepMap
from .errors import RangeOutsideDomain
from .geometry import CollocationSet
from .shallow_map import ShallowCompositeMap


@dataclass(frozen=True)
class MappingErrorReport:
    kind: str
    values: dict
    per_point: dict = field(default_factory=dict)
    cond: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self, with_arrays: bool = False) -> dict:
        d = {"kind": self.kind, "errors": dict(self.values), "cond": dict(self.cond)}
        if with_arrays:
            d["per_point"] = {k: [float(x) for x in v] for k, v in self.per_point.items()}
        return d


def _midpoints(cs) -> np.ndarray:
    if isinstance(cs, CollocationSet):
        return cs.midpoints()
    z = np.asarray(cs, dtype=complex)
    return 0.5 * (z + np.roll(z, -1))


def deep_error_report(dmap: DeepMap, cs: Optional[Union[CollocationSet, np.ndarray]] = None) -> MappingErrorReport:
    """eps_f is the radial defect ||zeta| - 1| at midpoints; eps_f_literal keeps |zeta - 1|."""
    if cs is None:
        cs = dmap.forward.collocation
    zm = _midpoints(cs)
    zeta = dmap.forward.evaluate(zm)
    ef = np.abs(np.abs(zeta) - 1.0)
    eb = np.abs(dmap.backward.evaluate(zeta) - zm)
    lit = np.abs(zeta - 1.0)
    return MappingErrorReport(
        "deep",
        {"eps_f": float(ef.max()), "eps_b": float(eb.max()), "eps_f_literal": float(lit.max()),
         "midpoints": int(len(zm))},
        {"eps_f": ef, "eps_b": eb, "eps_f_literal": lit},
        {"C_Nf": dmap.forward.cond.cond, "C_Nb": dmap.backward.cond.cond})


def shallow_error_report(smap: ShallowCompositeMap,
                         cavity: Optional[Union[CollocationSet, np.ndarray]] = None) -> MappingErrorReport:
    """Exterior errors live in the w plane (the ground maps to |w| = beta), interior ones in z."""
    if cavity is None:
        cavity = smap.cavity if smap.cavity is not None else smap.mobius.backward(smap.fwd2.interior)
    f2, b2 = smap.fwd2, smap.bwd2
    beta = abs(f2.w_beta)
    ang = np.angle(f2.exterior)
    w1m = beta * np.exp(1j * (ang + 0.5 * np.angle(np.roll(f2.exterior, -1) / f2.exterior)))
    zeta1 = f2.evaluate(w1m)
    efe = np.abs(np.abs(zeta1) - f2.r_o)
    ebe = np.abs(b2.evaluate(zeta1) - w1m)
    z2m = _midpoints(cavity)
    zeta2 = smap.forward(z2m)
    efi = np.abs(np.abs(zeta2) - f2.r_i)
    ebi = np.abs(smap.backward(zeta2) - z2m)
    return MappingErrorReport(
        "shallow",
        {"eps_fe": float(efe.max()), "eps_be": float(ebe.max()), "eps_fi": float(efi.max()),
         "eps_bi": float(ebi.max()), "r_o": f2.r_o, "r_i": f2.r_i,
         "sum_Q1_plus_1": float(abs(f2.q1.sum() + 1.0)), "sum_Q2": float(abs(f2.q2.sum())),
         "exterior_midpoints": int(len(w1m)), "interior_midpoints": int(len(z2m))},
        {"eps_fe": efe, "eps_be": ebe, "eps_fi": efi, "eps_bi": ebi},
        {"C_Nf": f2.cond.cond, "C_Nb": b2.cond.cond})


def _backward(m):
    if isinstance(m, DeepMap):
        return m.backward.evaluate
    if isinstance(m, ShallowCompositeMap):
        return m.backward
    raise TypeError("expected a DeepMap or ShallowCompositeMap")


def _radius_limits(m):
    if isinstance(m, DeepMap):
        return 1.0, np.inf
    return m.r_i, m.r_o


def i_ratio_defect(m, zeta, rel_step: float = 1e-5) -> np.ndarray:
    """|(dz/dtheta) / (rho dz/drho) - i| by central differences; zero for an analytic map."""
    f = _backward(m)
    zeta = np.asarray(zeta, dtype=complex)
    rho, th = np.abs(zeta), np.angle(zeta)
    h = rel_step
    d_th = (f(rho * np.exp(1j * (th + h))) - f(rho * np.exp(1j * (th - h)))) / (2 * h)
    dr = h * rho
    d_rho = (f((rho + dr) * np.exp(1j * th)) - f((rho - dr) * np.exp(1j * th))) / (2 * dr)
    return np.abs(d_th / (rho * d_rho) - 1j)


def interior_test_points(m, n: int = 200) -> np.ndarray:
    """Deterministic points strictly inside the mapped domain (golden-angle spiral)."""
    lo, hi = _radius_limits(m)
    if not np.isfinite(hi):
        hi = 3.0 * lo
    t = (np.arange(n) + 0.5) / n
    rho = lo + (hi - lo) * (0.1 + 0.8 * t)
    th = np.arange(n) * np.pi * (3.0 - np.sqrt(5.0))
    return rho * np.exp(1j * th)


@dataclass(frozen=True)
class GridPullback:
    rho_values: np.ndarray
    theta_values: np.ndarray
    rho_lines: list
    theta_lines: list
    samples: int

    def rows(self):
        """(family, index, parameter, x, y) tuples for CSV output."""
        for fam, vals, lines in (("rho", self.rho_values, self.rho_lines),
                                 ("theta", self.theta_values, self.theta_lines)):
            for i, (v, line) in enumerate(zip(vals, lines)):
                for z in line:
                    yield fam, i, float(v), float(z.real), float(z.imag)


def _refine(f, t, tol, centre, reach, max_points):
    """Bisect parameter intervals whose images are too far apart near the cavity."""
    z = f(t)
    while len(t) < max_points:
        gap = np.abs(np.diff(z))
        near = np.minimum(np.abs(z[:-1] - centre), np.abs(z[1:] - centre)) < reach
        bad = np.nonzero((gap >= tol) & near)[0]
        if bad.size == 0:
            break
        tm = 0.5 * (t[bad] + t[bad + 1])
        t = np.insert(t, bad + 1, tm)
        z = np.insert(z, bad + 1, f(tm))
    return t, z


def grid_pullback(m, rho_count: int, theta_count: int, rho_range: Optional[Sequence[float]] = None,
                  diameter: Optional[float] = None, window: float = 20.0, max_points: int = 1 << 16) -> GridPullback:
    """Images of circles |zeta| = rho and rays arg zeta = theta under the backward map.

    Each line is bisected until adjacent points within `window` cavity diameters of
    the cavity differ by less than 1% of the diameter. Angles are offset by half a
    step so the shallow ground line never hits zeta = 1, the image of infinity.
    """
    lo, hi = _radius_limits(m)
    if rho_range is None:
        rho_range = (lo, 3.0 * lo if not np.isfinite(hi) else hi)
    r0, r1 = float(rho_range[0]), float(rho_range[1])
    tol = 1e-12 * max(1.0, abs(r1))
    if not (r0 < r1 and r0 >= lo - tol and r1 <= hi + tol and np.isfinite(r1)):
        raise RangeOutsideDomain(f"rho range {rho_range} outside [{lo}, {hi}]")
    f = _backward(m)
    rhos = np.linspace(r0, r1, rho_count) if rho_count > 1 else np.array([r0])
    thetas = 2 * np.pi * (np.arange(theta_count) + 0.5) / theta_count
    cav = f(lo * np.exp(1j * 2 * np.pi * (np.arange(256) + 0.5) / 256))
    if diameter is None:
        diameter = float(np.max(np.abs(cav[:, None] - cav[None, :])))
    centre = cav.mean()
    n0 = 257
    rl, tl = [], []
    for r in rhos:
        t = 2 * np.pi * (np.arange(n0) + 0.5) / (n0 - 1)
        _, z = _refine(lambda x, r=r: f(r * np.exp(1j * x)), t, 0.01 * diameter, centre,
                       window * diameter, max_points)
        rl.append(z[:-1])
    for th in thetas:
        _, z = _refine(lambda x, th=th: f(x * np.exp(1j * th)), np.linspace(r0, r1, n0), 0.01 * diameter,
                       centre, window * diameter, max_points)
        tl.append(z)
    return GridPullback(rhos, thetas, rl, tl, n0)
