"""Two-step map: lower half-plane with a cavity -> interval annulus (Mobius) -> circular annulus (CSM/CDSM)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .deep_map import _c2l, _l2c
from .errors import (EvalAtCharge, EvalAtSingularity, NormalizationPointOutside, OrientationError,
                     PoleHit, UpperHalfPlane)
from .geometry import CollocationSet, charge_points, polygon_signed_area, winding_number
from .numerics import ConditionReport, condition_number, solve_dense

# (exterior, interior) offset factors; the larger exterior standoff keeps the ground line
# accurate far from the cavity, where z amplifies w errors like 1/(w - beta)^2
FORWARD_OFFSETS = (2.0, 1.0)
BACKWARD_OFFSETS = (3.0, 2.0)


@dataclass(frozen=True)
class MobiusMap:
    z_c2: complex
    beta: float = 1.0

    def __post_init__(self):
        if not complex(self.z_c2).imag < 0:
            raise UpperHalfPlane("z_c2 must lie in the lower half-plane")

    def forward(self, z):
        z = np.asarray(z, dtype=complex)
        d = z - np.conj(self.z_c2)
        if np.any(d == 0.0):
            raise PoleHit("z coincides with the mirror point of z_c2")
        return self.beta * (z - self.z_c2) / d

    def backward(self, w):
        w = np.asarray(w, dtype=complex)
        d = w - self.beta
        if np.any(d == 0.0):
            raise PoleHit("w = beta is the image of infinity")
        return (w * np.conj(self.z_c2) - self.beta * self.z_c2) / d

    def backward_derivative(self, w, order: int = 1):
        w = np.asarray(w, dtype=complex)
        c = self.beta * (self.z_c2 - np.conj(self.z_c2))
        if order == 1:
            return c / (w - self.beta) ** 2
        if order == 2:
            return -2.0 * c / (w - self.beta) ** 3
        raise ValueError("order must be 1 or 2")

    def forward_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.beta * (np.conj(self.z_c2) - self.z_c2) / (z - np.conj(self.z_c2)) ** 2


@dataclass(frozen=True)
class AnnulusForwardMap:
    w_c2: complex
    w_beta: complex
    w_ref: complex
    q1: np.ndarray
    q2: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    r_o: float
    r_i: float
    exterior: np.ndarray
    interior: np.ndarray
    offsets: tuple
    cond: ConditionReport

    def __call__(self, w):
        return self.evaluate(w)

    def evaluate(self, w):
        w = np.asarray(w, dtype=complex)
        d1 = w[..., None] - self.c1
        d2 = w[..., None] - self.c2
        if np.any(d1 == 0.0) or np.any(d2 == 0.0):
            raise EvalAtCharge("evaluation at a charge point")
        u = w - self.w_c2
        ub = self.w_beta - self.w_c2
        s1 = np.log(d1 / (self.w_ref - self.c1)) - np.log((self.w_beta - self.c1) / (self.w_ref - self.c1))
        s2 = np.log(d2 / u[..., None]) - np.log((self.w_beta - self.c2) / ub)
        return u / ub * np.exp(np.sum(self.q1 * s1, axis=-1) + np.sum(self.q2 * s2, axis=-1))

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        u = w - self.w_c2
        dlog = (1.0 / u + np.sum(self.q1 / (w[..., None] - self.c1), axis=-1)
                + np.sum(self.q2 * (1.0 / (w[..., None] - self.c2) - 1.0 / u[..., None]), axis=-1))
        return self.evaluate(w) * dlog

    def to_dict(self) -> dict:
        return {"w_c2": _c2l(self.w_c2)[0], "w_beta": _c2l(self.w_beta)[0], "w_ref": _c2l(self.w_ref)[0],
                "Q1": [float(x) for x in self.q1], "Q2": [float(x) for x in self.q2],
                "W1": _c2l(self.c1), "W2": _c2l(self.c2), "r_o": self.r_o, "r_i": self.r_i,
                "exterior": _c2l(self.exterior), "interior": _c2l(self.interior),
                "offsets": list(self.offsets), "cond": self.cond.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "AnnulusForwardMap":
        return cls(_l2c([d["w_c2"]])[0], _l2c([d["w_beta"]])[0], _l2c([d["w_ref"]])[0],
                   np.array(d["Q1"], dtype=float), np.array(d["Q2"], dtype=float), _l2c(d["W1"]), _l2c(d["W2"]),
                   float(d["r_o"]), float(d["r_i"]), _l2c(d["exterior"]), _l2c(d["interior"]),
                   tuple(d["offsets"]), ConditionReport.from_dict(d["cond"]))


@dataclass(frozen=True)
class AnnulusBackwardMap:
    q1: np.ndarray
    q2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    offsets: tuple
    cond: ConditionReport

    @property
    def charges(self):
        return np.concatenate([self.q1, self.q2])

    @property
    def points(self):
        return np.concatenate([self.d1, self.d2])

    def __call__(self, zeta):
        return self.evaluate(zeta)

    def _inv(self, zeta, power):
        d = np.asarray(zeta, dtype=complex)[..., None] - self.points
        if np.any(d == 0.0):
            raise EvalAtSingularity("evaluation at a dipole point")
        return d ** (-float(power))

    def evaluate(self, zeta):
        return np.sum(self.charges * self._inv(zeta, 1), axis=-1)

    def derivative(self, zeta, order: int = 1):
        if order == 1:
            return -np.sum(self.charges * self._inv(zeta, 2), axis=-1)
        if order == 2:
            return 2.0 * np.sum(self.charges * self._inv(zeta, 3), axis=-1)
        raise ValueError("order must be 1 or 2")

    def to_dict(self) -> dict:
        return {"q1": _c2l(self.q1), "q2": _c2l(self.q2), "zeta1": _c2l(self.d1), "zeta2": _c2l(self.d2),
                "offsets": list(self.offsets), "cond": self.cond.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "AnnulusBackwardMap":
        return cls(_l2c(d["q1"]), _l2c(d["q2"]), _l2c(d["zeta1"]), _l2c(d["zeta2"]),
                   tuple(d["offsets"]), ConditionReport.from_dict(d["cond"]))


def exterior_points(n: int, beta: float = 1.0) -> np.ndarray:
    return beta * np.exp(2j * np.pi * np.arange(n) / n)


def solve_annulus_forward(exterior, interior, offsets=FORWARD_OFFSETS, w_beta: complex = 1.0,
                          w_c2: complex = 0.0, w_ref: Optional[complex] = None) -> AnnulusForwardMap:
    """CSM for the interval annulus; unknowns Q1, Q2, ln r_o, ln r_i."""
    w1 = np.asarray(exterior, dtype=complex)
    w2 = np.asarray(interior, dtype=complex)
    if polygon_signed_area(w1) <= 0:
        raise OrientationError("exterior points must run counter-clockwise")
    if polygon_signed_area(w2) >= 0:
        raise OrientationError("interior points must run clockwise")
    if winding_number(w2, w_c2)[0] == 0:
        raise NormalizationPointOutside("w_c2 must lie inside the cavity image")
    beta = abs(w_beta)
    if w_ref is None:
        r_est = np.sqrt(beta * np.max(np.abs(w2 - w_c2)))
        w_ref = w_c2 - r_est * w_beta / beta
    if not (abs(w_ref) < beta and winding_number(w2, w_ref)[0] == 0):
        raise NormalizationPointOutside("branch reference point is not inside the annulus")
    n1, n2 = len(w1), len(w2)
    c1 = charge_points(w1, offsets[0])
    c2 = charge_points(w2, offsets[1])
    pts = np.concatenate([w1, w2])
    n = n1 + n2 + 2
    a = np.zeros((n, n))
    a[:n1 + n2, :n1] = np.log(np.abs((pts[:, None] - c1) / (w_beta - c1)))
    a[:n1 + n2, n1:n1 + n2] = np.log(np.abs((pts[:, None] - c2) / (w_beta - c2)))
    a[:n1, n1 + n2] = -1.0
    a[n1:n1 + n2, n1 + n2 + 1] = -1.0
    a[n1 + n2, :n1] = 1.0
    a[n1 + n2 + 1, n1:n1 + n2] = 1.0
    b = np.zeros(n)
    b[:n1 + n2] = -np.log(np.abs((pts - w_c2) / (w_beta - w_c2)))
    b[n1 + n2] = -1.0
    x = solve_dense(a, b)
    return AnnulusForwardMap(complex(w_c2), complex(w_beta), complex(w_ref), x[:n1], x[n1:n1 + n2], c1, c2,
                             float(np.exp(x[n1 + n2])), float(np.exp(x[n1 + n2 + 1])), w1.copy(), w2.copy(),
                             tuple(float(o) for o in offsets), condition_number(a, "C_Nf^s"))


def solve_annulus_backward(fwd: AnnulusForwardMap, offsets=BACKWARD_OFFSETS) -> AnnulusBackwardMap:
    """Complex dipole simulation of w(zeta) at the forward images of both boundaries."""
    s1 = fwd.evaluate(fwd.exterior)
    s2 = fwd.evaluate(fwd.interior)
    d1 = charge_points(s1, offsets[0])
    d2 = charge_points(s2, offsets[1])
    s = np.concatenate([s1, s2])
    d = np.concatenate([d1, d2])
    a = 1.0 / (s[:, None] - d[None, :])
    x = solve_dense(a, np.concatenate([fwd.exterior, fwd.interior]))
    n1 = len(s1)
    return AnnulusBackwardMap(x[:n1], x[n1:], d1, d2, tuple(float(o) for o in offsets),
                              condition_number(a, "C_Nb^s"))


@dataclass(frozen=True)
class ShallowCompositeMap:
    mobius: MobiusMap
    fwd2: AnnulusForwardMap
    bwd2: AnnulusBackwardMap
    cavity: Optional[CollocationSet] = None

    @property
    def r_o(self) -> float:
        return self.fwd2.r_o

    @property
    def r_i(self) -> float:
        return self.fwd2.r_i

    def forward(self, z):
        return self.fwd2.evaluate(self.mobius.forward(z))

    def backward(self, zeta):
        return self.mobius.backward(self.bwd2.evaluate(zeta))

    def derivative(self, zeta):
        w = self.bwd2.evaluate(zeta)
        return self.mobius.backward_derivative(w) * self.bwd2.derivative(zeta)

    def second_derivative(self, zeta):
        w = self.bwd2.evaluate(zeta)
        w1 = self.bwd2.derivative(zeta)
        return (self.mobius.backward_derivative(w, 2) * w1 ** 2
                + self.mobius.backward_derivative(w) * self.bwd2.derivative(zeta, 2))

    def forward_derivative(self, z):
        return self.fwd2.derivative(self.mobius.forward(z)) * self.mobius.forward_derivative(z)

    def to_dict(self) -> dict:
        d = {"kind": "shallow", "z_c2": _c2l(self.mobius.z_c2)[0], "beta": self.mobius.beta,
             "forward": self.fwd2.to_dict(), "backward": self.bwd2.to_dict()}
        if self.cavity is not None:
            d["cavity"] = _c2l(self.cavity.points)
            c = self.cavity
            area = c.area if c.area is not None else (c.spec.area if c.spec is not None else None)
            if area is not None:
                d["cavity_area"] = float(area)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ShallowCompositeMap":
        cav = CollocationSet(_l2c(d["cavity"]), area=d.get("cavity_area")) if "cavity" in d else None
        return cls(MobiusMap(_l2c([d["z_c2"]])[0], float(d["beta"])), AnnulusForwardMap.from_dict(d["forward"]),
                   AnnulusBackwardMap.from_dict(d["backward"]), cav)


def polygon_centroid(z) -> complex:
    z = np.asarray(z, dtype=complex)
    zn = np.roll(z, -1)
    cr = (np.conj(z) * zn).imag
    a = 0.5 * cr.sum()
    return complex(((z + zn) * cr).sum() / (6 * a))


def solve_shallow(cavity, z_c2: Optional[complex] = None, n_exterior: int = 90,
                  forward_offsets=FORWARD_OFFSETS, backward_offsets=BACKWARD_OFFSETS, beta: float = 1.0) -> ShallowCompositeMap:
    cs = cavity if isinstance(cavity, CollocationSet) else CollocationSet(np.asarray(cavity, dtype=complex))
    if np.any(cs.points.imag >= 0):
        raise UpperHalfPlane("cavity must lie strictly below the ground surface")
    if z_c2 is None:
        z_c2 = polygon_centroid(cs.points)
    mob = MobiusMap(complex(z_c2), float(beta))
    w2 = mob.forward(cs.points)
    fwd = solve_annulus_forward(exterior_points(n_exterior, beta), w2, forward_offsets, w_beta=beta)
    bwd = solve_annulus_backward(fwd, backward_offsets)
    return ShallowCompositeMap(mob, fwd, bwd, cs)
