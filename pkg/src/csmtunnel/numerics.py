"""Dense solves, condition numbers, circle quadrature and a plain CSM Dirichlet solver."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import AliasWarning, SingularMatrix
from .geometry import CollocationSet, charge_points


@dataclass(frozen=True)
class ConditionReport:
    cond: float
    s_max: float
    s_min: float
    tag: str = ""

    def to_dict(self) -> dict:
        return {"cond": self.cond, "s_max": self.s_max, "s_min": self.s_min, "tag": self.tag}

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionReport":
        return cls(float(d["cond"]), float(d["s_max"]), float(d["s_min"]), d.get("tag", ""))


def solve_dense(matrix, rhs) -> np.ndarray:
    """LU solve with partial pivoting; raises SingularMatrix on a vanishing pivot."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    lu, piv = sla.lu_factor(a, check_finite=False)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0 or np.min(np.abs(np.diag(lu))) <= a.shape[0] * np.finfo(float).eps * scale:
        raise SingularMatrix("pivot below machine-scaled threshold")
    return sla.lu_solve((lu, piv), np.asarray(rhs), check_finite=False)


def condition_number(matrix, tag: str = "") -> ConditionReport:
    s = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    smax, smin = float(s[0]), float(s[-1])
    cond = np.inf if smin == 0.0 else smax / smin
    return ConditionReport(float(cond), smax, smin, tag)


def circle_grid(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


def fourier_coeffs(samples, k_range) -> np.ndarray:
    """c_k = (1/M) sum_m f(sigma_m) sigma_m^{-k} on the uniform grid sigma_m = exp(2 pi i m / M)."""
    f = np.asarray(samples, dtype=complex)
    m = len(f)
    k = np.asarray(k_range, dtype=int)
    if np.any(np.abs(k) > m // 2 - 1):
        warnings.warn(f"modes beyond {m // 2 - 1} alias on a {m}-point grid", AliasWarning)
    c = np.fft.fft(f) / m
    return c[np.mod(k, m)]


def fourier_synthesis(coeffs, k_range, m: int) -> np.ndarray:
    """Inverse of fourier_coeffs: values of sum c_k sigma^k on the M-point grid."""
    full = np.zeros(m, dtype=complex)
    np.add.at(full, np.mod(np.asarray(k_range, dtype=int), m), np.asarray(coeffs, dtype=complex))
    return np.fft.ifft(full) * m


@dataclass(frozen=True)
class DirichletSolution:
    charges: np.ndarray
    charge_points: np.ndarray
    cond: ConditionReport

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.sum(self.charges * np.log(np.abs(z[..., None] - self.charge_points)), axis=-1)


def solve_dirichlet_csm(boundary, data, offset_factor: float = 1.0) -> DirichletSolution:
    """Fit G(z) = sum Q_k ln|z - Z_k| to Dirichlet data at the collocation points."""
    z = boundary.points if isinstance(boundary, CollocationSet) else np.asarray(boundary, dtype=complex)
    zc = charge_points(z, offset_factor)
    a = np.log(np.abs(z[:, None] - zc[None, :]))
    q = solve_dense(a, np.asarray(data, dtype=float))
    return DirichletSolution(q, zc, condition_number(a, "dirichlet"))
