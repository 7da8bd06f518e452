"""Cavity contours built from arcs and lines, collocation points and charge placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateSegment, FilletTooLarge, GapError

CORNER_THRESHOLD_DEG = 10.0
MAX_RELATIVE_DISTANCE = 1e-2


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex
    fillet: bool = False

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.start + (self.end - self.start) * t

    def tangent(self, t):
        d = self.end - self.start
        return np.full(np.shape(t), d / abs(d), dtype=complex)

    @property
    def start_point(self) -> complex:
        return complex(self.start)

    @property
    def end_point(self) -> complex:
        return complex(self.end)

    def reversed(self) -> "Line":
        return Line(self.end, self.start, self.fillet)

    def translated(self, dz: complex) -> "Line":
        return Line(self.start + dz, self.end + dz, self.fillet)

    def signed_area_term(self) -> float:
        # contribution to 1/2 * integral of (x dy - y dx)
        return 0.5 * (np.conj(self.start) * self.end).imag


@dataclass(frozen=True)
class Arc:
    """Circular arc; traversal is counter-clockwise when end_angle > start_angle."""

    center: complex
    radius: float
    start_angle: float
    end_angle: float
    fillet: bool = False

    @property
    def orientation(self) -> str:
        return "ccw" if self.end_angle > self.start_angle else "cw"

    @property
    def sweep(self) -> float:
        return self.end_angle - self.start_angle

    @property
    def length(self) -> float:
        return abs(self.radius * self.sweep)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + self.radius * np.exp(1j * (self.start_angle + self.sweep * t))

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        s = 1.0 if self.sweep > 0 else -1.0
        return s * 1j * np.exp(1j * (self.start_angle + self.sweep * t))

    @property
    def start_point(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end_point(self) -> complex:
        return complex(self.point(1.0))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.end_angle, self.start_angle, self.fillet)

    def translated(self, dz: complex) -> "Arc":
        return replace(self, center=self.center + dz)

    def signed_area_term(self) -> float:
        r, c = self.radius, self.center
        a0, a1 = self.start_angle, self.end_angle
        chord = (np.exp(1j * a1) - np.exp(1j * a0)) / 1j
        return 0.5 * (r * r * (a1 - a0) + r * (np.conj(c) * chord).real)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class EllipticArc:
    """Arc of the ellipse center + a cos(phi) + i b sin(phi), parametrised by arc length."""

    center: complex
    a: float
    b: float
    start_angle: float
    end_angle: float
    fillet: bool = False

    def _raw(self, phi):
        return self.center + self.a * np.cos(phi) + 1j * self.b * np.sin(phi)

    def _speed(self, phi):
        return np.hypot(self.a * np.sin(phi), self.b * np.cos(phi))

    def _arclength(self, phi):
        """Arc length from start_angle to phi (signed along the sweep), Gauss-Legendre per call."""
        phi = np.asarray(phi, dtype=float)
        p0 = self.start_angle
        half = 0.5 * (phi - p0)
        nodes = p0 + half[..., None] * (_GL_X + 1.0)
        return np.abs(half) * (self._speed(nodes) @ _GL_W)

    @property
    def length(self) -> float:
        # split the sweep so each quadrature panel covers at most a quarter turn
        n = max(1, int(math.ceil(abs(self.end_angle - self.start_angle) / (0.5 * math.pi))))
        edges = np.linspace(self.start_angle, self.end_angle, n + 1)
        tot = 0.0
        for p0, p1 in zip(edges[:-1], edges[1:]):
            tot += float(replace(self, start_angle=p0, end_angle=p1)._arclength(p1))
        return tot

    def _phi(self, t):
        """Invert arc length by Newton iteration from the parametric guess."""
        t = np.asarray(t, dtype=float)
        total = self.length
        sweep = self.end_angle - self.start_angle
        sgn = 1.0 if sweep > 0 else -1.0
        phi = self.start_angle + sweep * t
        for _ in range(30):
            f = self._arclength(phi) - t * total
            step = sgn * f / self._speed(phi)
            phi = phi - step
            if np.all(np.abs(step) < 1e-15 * (1.0 + abs(sweep))):
                break
        return phi

    def point(self, t):
        return self._raw(self._phi(t))

    def tangent(self, t):
        phi = self._phi(t)
        d = -self.a * np.sin(phi) + 1j * self.b * np.cos(phi)
        s = 1.0 if self.end_angle > self.start_angle else -1.0
        return s * d / np.abs(d)

    @property
    def start_point(self) -> complex:
        return complex(self._raw(self.start_angle))

    @property
    def end_point(self) -> complex:
        return complex(self._raw(self.end_angle))

    def reversed(self) -> "EllipticArc":
        return EllipticArc(self.center, self.a, self.b, self.end_angle, self.start_angle, self.fillet)

    def translated(self, dz: complex) -> "EllipticArc":
        return replace(self, center=self.center + dz)

    def signed_area_term(self) -> float:
        # 1/2 integral of (x dy - y dx) with x = cx + a cos, y = cy + b sin
        a, b, c = self.a, self.b, self.center
        p0, p1 = self.start_angle, self.end_angle
        lin = a * b * (p1 - p0)
        cross = c.real * b * (math.sin(p1) - math.sin(p0)) + c.imag * a * (math.cos(p1) - math.cos(p0))
        return 0.5 * (lin + cross)


Segment = Union[Line, Arc, EllipticArc]


@dataclass(frozen=True)
class BoundarySpec:
    """Closed contour made of consecutive segments."""

    segments: tuple

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.segments])

    @property
    def perimeter(self) -> float:
        return float(self.lengths.sum())

    @property
    def signed_area(self) -> float:
        return float(sum(s.signed_area_term() for s in self.segments))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def orientation(self) -> str:
        return "ccw" if self.signed_area > 0 else "cw"

    @property
    def diameter(self) -> float:
        pts = self.sample(64)
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    def sample(self, per_segment: int = 64) -> np.ndarray:
        t = np.arange(per_segment) / per_segment
        return np.concatenate([np.atleast_1d(s.point(t)) for s in self.segments])

    def point_at(self, s):
        """Point at arc-length position s (cyclic) along the contour."""
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        edges = np.concatenate([[0.0], np.cumsum(self.lengths)])
        idx = np.clip(np.searchsorted(edges, s, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty(s.shape, dtype=complex)
        for k, seg in enumerate(self.segments):
            m = idx == k
            if np.any(m):
                out[m] = seg.point((s[m] - edges[k]) / seg.length)
        return out

    def translated(self, dz: complex) -> "BoundarySpec":
        return BoundarySpec(tuple(s.translated(dz) for s in self.segments))

    def reversed(self) -> "BoundarySpec":
        return BoundarySpec(tuple(s.reversed() for s in reversed(self.segments)))


def build_boundary(segments: Sequence[Segment], orientation: str = "cw") -> BoundarySpec:
    """Validate closure and return the contour traversed in the requested orientation."""
    if len(segments) == 0:
        raise ValueError("empty segment list")
    for k, s in enumerate(segments):
        if not s.length > 0:
            raise DegenerateSegment(f"segment {k} has zero length")
    spec = BoundarySpec(tuple(segments))
    tol = 1e-12 * spec.diameter
    n = len(segments)
    for k in range(n):
        gap = abs(segments[k].end_point - segments[(k + 1) % n].start_point)
        if gap > tol:
            raise GapError(f"gap of {gap:.3g} between segment {k} and {(k + 1) % n}")
    if orientation not in ("cw", "ccw"):
        raise ValueError("orientation must be 'cw' or 'ccw'")
    if spec.orientation != orientation:
        spec = spec.reversed()
    return spec


def _turn_angle(spec: BoundarySpec, k: int) -> float:
    """Signed tangent turn (rad) at the joint after segment k."""
    a = spec.segments[k]
    b = spec.segments[(k + 1) % len(spec.segments)]
    t1 = complex(a.tangent(1.0))
    t2 = complex(b.tangent(0.0))
    return float(np.angle(t2 / t1))


def round_corners(spec: BoundarySpec, fillet_radius: float) -> BoundarySpec:
    """Replace every sharp line-line corner with a tangent arc of the given radius."""
    if not fillet_radius > 0:
        raise ValueError("fillet_radius must be positive")
    segs = list(spec.segments)
    n = len(segs)
    thresh = math.radians(CORNER_THRESHOLD_DEG)
    turns = [_turn_angle(spec, k) for k in range(n)]
    corners = [k for k in range(n) if abs(turns[k]) > thresh]
    if not corners:
        return spec
    trim_start = [0.0] * n
    trim_end = [0.0] * n
    for k in corners:
        a, b = segs[k], segs[(k + 1) % n]
        if not (isinstance(a, Line) and isinstance(b, Line)):
            raise ValueError("only corners between two straight lines can be rounded")
        d = fillet_radius * math.tan(abs(turns[k]) / 2)
        trim_end[k] = d
        trim_start[(k + 1) % n] = d
    for k in range(n):
        if trim_start[k] + trim_end[k] > 0 and max(trim_start[k], trim_end[k]) > segs[k].length / 2:
            raise FilletTooLarge(f"fillet does not fit on segment {k}")
    out = []
    for k in range(n):
        s = segs[k]
        if isinstance(s, Line) and (trim_start[k] > 0 or trim_end[k] > 0):
            u = (s.end - s.start) / s.length
            s = Line(s.start + trim_start[k] * u, s.end - trim_end[k] * u, s.fillet)
        out.append(s)
        if k in corners:
            d1 = (s.end - s.start) / abs(s.end - s.start)
            p = s.end
            side = 1j if turns[k] > 0 else -1j
            c = p + fillet_radius * side * d1
            a0 = math.atan2((p - c).imag, (p - c).real)
            out.append(Arc(c, fillet_radius, a0, a0 + turns[k], fillet=True))
    return BoundarySpec(tuple(out))


@dataclass(frozen=True)
class CollocationSet:
    points: np.ndarray
    segment_index: Optional[np.ndarray] = None
    params: Optional[np.ndarray] = None
    spec: Optional[BoundarySpec] = None
    closed: bool = True
    area: Optional[float] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def arclength_positions(self) -> np.ndarray:
        if self.spec is None:
            raise ValueError("no boundary provenance")
        edges = np.concatenate([[0.0], np.cumsum(self.spec.lengths)])
        return edges[self.segment_index] + self.params * self.spec.lengths[self.segment_index]

    def midpoints(self, true_curve: bool = True) -> np.ndarray:
        """Midpoints between cyclic neighbours; on the curve itself when provenance exists."""
        z = self.points
        if not true_curve or self.spec is None:
            return 0.5 * (z + np.roll(z, -1))
        s = self.arclength_positions
        s_next = np.roll(s, -1)
        s_next = np.where(s_next <= s, s_next + self.spec.perimeter, s_next)
        return self.spec.point_at(0.5 * (s + s_next))

    def translated(self, dz: complex) -> "CollocationSet":
        spec = self.spec.translated(dz) if self.spec is not None else None
        return replace(self, points=self.points + dz, spec=spec)


def discretize(spec: BoundarySpec, counts: Union[Sequence[int], None] = None,
               spacing: Optional[float] = None) -> CollocationSet:
    """Uniform arc-length points on every segment, starting at the first segment start.

    Either explicit per-segment counts or a target spacing must be given. With a
    spacing, fillet arcs get half the spacing of their neighbours.
    """
    n = len(spec.segments)
    if counts is None:
        if spacing is None or spacing <= 0:
            raise ValueError("give counts or a positive spacing")
        counts = []
        for s in spec.segments:
            h = spacing / 2 if getattr(s, "fillet", False) else spacing
            counts.append(max(1, int(math.ceil(s.length / h - 1e-9))))
    counts = list(counts)
    if len(counts) != n:
        raise ValueError(f"expected {n} counts, got {len(counts)}")
    if any(int(c) < 1 for c in counts):
        raise ValueError("counts must be >= 1")
    pts, idx, par = [], [], []
    for k, (s, c) in enumerate(zip(spec.segments, counts)):
        t = np.arange(int(c)) / int(c)
        pts.append(np.atleast_1d(s.point(t)))
        idx.append(np.full(int(c), k))
        par.append(t)
    return CollocationSet(np.concatenate(pts).astype(complex), np.concatenate(idx),
                          np.concatenate(par), spec)


def collocation_from_points(points) -> CollocationSet:
    return CollocationSet(np.asarray(points, dtype=complex))


@dataclass
class QualityReport:
    max_angle_variation: float
    max_relative_distance: float
    angle_variations: np.ndarray = field(repr=False)
    relative_distances: np.ndarray = field(repr=False)
    passed: bool = False


def quality_check(cs: Union[CollocationSet, np.ndarray]) -> QualityReport:
    z = cs.points if isinstance(cs, CollocationSet) else np.asarray(cs, dtype=complex)
    if len(z) < 8:
        raise ValueError("quality check needs at least 8 points")
    d = np.roll(z, -1) - z
    direction = np.angle(d)
    turn = np.degrees(np.angle(np.exp(1j * (direction - np.roll(direction, 1)))))
    # wrap to (-180, 180]
    turn = np.where(turn <= -180.0, turn + 360.0, turn)
    rel = np.abs(d) / np.abs(d).sum()
    ma = float(np.max(np.abs(turn)))
    md = float(np.max(rel))
    ok = ma <= CORNER_THRESHOLD_DEG and md <= MAX_RELATIVE_DISTANCE
    return QualityReport(ma, md, turn, rel, ok)


def charge_points(points, offset_factor: float) -> np.ndarray:
    """Offset each point along the right-hand normal of its chord."""
    if not offset_factor > 0:
        raise ValueError("offset_factor must be positive")
    z = points.points if isinstance(points, CollocationSet) else np.asarray(points, dtype=complex)
    zn, zp = np.roll(z, -1), np.roll(z, 1)
    h = 0.5 * (np.abs(zn - z) + np.abs(z - zp))
    theta = np.angle(zn - zp) - np.pi / 2
    return z + offset_factor * h * np.exp(1j * theta)


def polygon_signed_area(z) -> float:
    z = np.asarray(z, dtype=complex)
    return float(0.5 * np.sum((np.conj(z) * np.roll(z, -1)).imag))


def winding_number(polygon, z) -> np.ndarray:
    """Winding number of a closed polygon around each query point."""
    p = np.asarray(polygon, dtype=complex)
    q = np.atleast_1d(np.asarray(z, dtype=complex))
    a = p[None, :] - q[:, None]
    b = np.roll(p, -1)[None, :] - q[:, None]
    w = np.angle(b / a).sum(axis=1) / (2 * np.pi)
    return np.rint(w).astype(int)


def turning_number(z) -> int:
    z = np.asarray(z, dtype=complex)
    d = np.roll(z, -1) - z
    turn = np.angle(np.roll(d, -1) / d)
    return int(np.rint(turn.sum() / (2 * np.pi)))
