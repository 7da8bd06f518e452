"""Conformal map between the exterior of a cavity and the exterior of the unit disk."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EvalAtCharge, EvalAtSingularity, NormalizationPointOutside, OrientationError
from .geometry import CollocationSet, charge_points, polygon_signed_area, quality_check, winding_number
from .numerics import ConditionReport, condition_number, solve_dense


def _c2l(a):
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    return [[float(x.real), float(x.imag)] for x in a]


def _l2c(v):
    return np.array([complex(x[0], x[1]) for x in v], dtype=complex)


def pole_subset(n: int, m: int) -> np.ndarray:
    """m of n cyclic indices spread as evenly as possible."""
    return np.unique(np.floor(np.arange(m) * n / m + 0.5).astype(int) % n)


@dataclass(frozen=True)
class DeepForwardMap:
    z_c1: complex
    gamma: float
    charges: np.ndarray
    charge_points: np.ndarray
    collocation: np.ndarray
    offset_factor: float
    cond: ConditionReport

    def _check(self, z):
        d = np.abs(z[..., None] - self.charge_points)
        if np.any(d == 0.0):
            raise EvalAtCharge("evaluation point coincides with a charge point")

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        at_c = z == self.z_c1
        zz = np.where(at_c, self.z_c1 + 1.0, z)
        u = zz - self.z_c1
        s = np.sum(self.charges * np.log((zz[..., None] - self.charge_points) / u[..., None]), axis=-1)
        out = u * np.exp(self.gamma + s)
        return np.where(at_c, 0.0, out)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        u = z - self.z_c1
        dlog = 1.0 / u + np.sum(self.charges * (1.0 / (z[..., None] - self.charge_points)
                                                - 1.0 / u[..., None]), axis=-1)
        return self.evaluate(z) * dlog

    def to_dict(self) -> dict:
        return {"z_c1": _c2l(self.z_c1)[0], "gamma": self.gamma, "Q": [float(q) for q in self.charges],
                "Z": _c2l(self.charge_points), "collocation": _c2l(self.collocation),
                "offset_factor": self.offset_factor, "cond": self.cond.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "DeepForwardMap":
        return cls(_l2c([d["z_c1"]])[0], float(d["gamma"]), np.array(d["Q"], dtype=float), _l2c(d["Z"]),
                   _l2c(d["collocation"]), float(d["offset_factor"]), ConditionReport.from_dict(d["cond"]))


@dataclass(frozen=True)
class DeepBackwardMap:
    p_lin: complex
    p0: complex
    p: np.ndarray
    poles: np.ndarray
    offset_factor: float
    cond: ConditionReport
    basis: str = "rational"

    def _terms(self, zeta, power):
        if self.basis == "rational":
            d = zeta[..., None] - self.poles
            if np.any(d == 0.0):
                raise EvalAtSingularity("evaluation at a backward-map pole")
            return d ** (-(power + 1.0))
        k = np.arange(1, len(self.p) + 1)
        return zeta[..., None] ** (-k - power)

    def __call__(self, zeta):
        return self.evaluate(zeta)

    def evaluate(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return self.p_lin * zeta + self.p0 + np.sum(self.p * self._terms(zeta, 0), axis=-1)

    def derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if self.basis == "rational":
            t = -np.sum(self.p * self._terms(zeta, 1), axis=-1)
        else:
            k = np.arange(1, len(self.p) + 1)
            t = -np.sum(self.p * k * zeta[..., None] ** (-k - 1), axis=-1)
        return self.p_lin + t

    def to_dict(self) -> dict:
        return {"p_lin": _c2l(self.p_lin)[0], "p0": _c2l(self.p0)[0], "p": _c2l(self.p),
                "poles": _c2l(self.poles), "offset_factor": self.offset_factor,
                "cond": self.cond.to_dict(), "basis": self.basis}

    @classmethod
    def from_dict(cls, d: dict) -> "DeepBackwardMap":
        return cls(_l2c([d["p_lin"]])[0], _l2c([d["p0"]])[0], _l2c(d["p"]), _l2c(d["poles"]),
                   float(d["offset_factor"]), ConditionReport.from_dict(d["cond"]), d.get("basis", "rational"))


def _points(cs):
    return cs.points if isinstance(cs, CollocationSet) else np.asarray(cs, dtype=complex)


def solve_deep_forward(cs, z_c1: complex = 0.0, offset_factor: float = 1.0) -> DeepForwardMap:
    """CSM forward map: N collocation rows plus the zero-charge-sum row."""
    z = _points(cs)
    n = len(z)
    if polygon_signed_area(z) > 0:
        raise OrientationError("cavity collocation points must run clockwise")
    if winding_number(z, z_c1)[0] == 0:
        raise NormalizationPointOutside("normalization point is not enclosed by the cavity")
    if n >= 8 and not quality_check(z).passed:
        warnings.warn("collocation set fails the angle/distance quality rules", RuntimeWarning)
    zc = charge_points(z, offset_factor)
    a = np.zeros((n + 1, n + 1))
    a[:n, :n] = np.log(np.abs(z[:, None] - zc[None, :]))
    a[:n, n] = 1.0
    a[n, :n] = 1.0
    b = np.zeros(n + 1)
    b[:n] = -np.log(np.abs(z - z_c1))
    x = solve_dense(a, b)
    return DeepForwardMap(complex(z_c1), float(x[n]), x[:n], zc, z.copy(), float(offset_factor),
                          condition_number(a, "C_Nf^d"))


def solve_deep_backward(fwd: DeepForwardMap, offset_factor: float = 2.0, basis: str = "rational") -> DeepBackwardMap:
    """Point-correspondence backward map on the forward images of the collocation points.

    basis="power" uses the plain Laurent tail in 1/zeta, kept only to show its poor conditioning.
    """
    z = fwd.collocation
    n = len(z)
    if n < 4:
        raise ValueError("need at least 4 collocation points")
    zeta = fwd.evaluate(z)
    m = n - 2
    if basis == "rational":
        poles = charge_points(zeta, offset_factor)[pole_subset(n, m)]
        tail = 1.0 / (zeta[:, None] - poles[None, :])
    elif basis == "power":
        poles = np.zeros(0, dtype=complex)
        tail = zeta[:, None] ** (-np.arange(1, m + 1)[None, :])
    else:
        raise ValueError("basis must be 'rational' or 'power'")
    a = np.column_stack([zeta, np.ones(n, dtype=complex), tail])
    x = solve_dense(a, z.astype(complex))
    return DeepBackwardMap(complex(x[0]), complex(x[1]), x[2:], poles, float(offset_factor),
                           condition_number(a, "C_Nb^d"), basis)


@dataclass(frozen=True)
class DeepMap:
    forward: DeepForwardMap
    backward: DeepBackwardMap

    def to_dict(self) -> dict:
        return {"kind": "deep", "forward": self.forward.to_dict(), "backward": self.backward.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "DeepMap":
        return cls(DeepForwardMap.from_dict(d["forward"]), DeepBackwardMap.from_dict(d["backward"]))


def solve_deep(cs, z_c1: complex = 0.0, offset_factor: float = 1.0, backward_offset: float = 2.0) -> DeepMap:
    fwd = solve_deep_forward(cs, z_c1, offset_factor)
    return DeepMap(fwd, solve_deep_backward(fwd, backward_offset))
