"""Plane-strain excavation of a shallow cavity with a free near-field and a fixed far-field ground segment.

All work is done on the rescaled annulus alpha < |zeta| < 1, where omega(zeta) is the composite
backward map evaluated at r_o * zeta. The ground is real, so omega(1/conj zeta) = conj omega(zeta)
and the potential phi' is continued across the unit circle into 1 < |zeta| < 1/alpha. The mixed
ground conditions then become the homogeneous jump problem

    X_in = X_out on the free arc,   kappa X_in + X_out = 0 on the fixed arc,

solved by a canonical function X, and phi' = X W F with F a Laurent series on alpha < |zeta| < 1/alpha.
W is (zeta - 1)^2 omega' inside the unit circle and the same with the reflected map outside; it carries the poles of the approximate
map that sit just inside the cavity circle, so F keeps only the singularities of the stress itself.
With map_factor=False, W = 1. The cavity condition is matched mode by mode in integrated form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import (IllConditionedLS, JumpVerificationFailed, K0Mismatch, NonConvergence, NotConverged,
                     OutsideDomain, UpperHalfPlane)
from .geometry import CollocationSet, polygon_signed_area
from .shallow_map import ShallowCompositeMap

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class MaterialParams:
    E: float
    nu: float
    gamma: float
    kx: float

    def __post_init__(self):
        if not (self.E > 0 and 0.0 < self.nu < 0.5):
            raise ValueError("need E > 0 and 0 < nu < 0.5")

    @property
    def G(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def kappa(self) -> float:
        return 3.0 - 4.0 * self.nu

    @classmethod
    def table1(cls) -> "MaterialParams":
        return cls(E=20e6, nu=0.3, gamma=20e3, kx=0.8)

    def scaled(self, gamma: float) -> "MaterialParams":
        return MaterialParams(self.E, self.nu, gamma, self.kx)

    def to_dict(self) -> dict:
        return {"E": self.E, "nu": self.nu, "gamma": self.gamma, "kx": self.kx}


class _Annulus:
    """omega(zeta) = z(r_o zeta) and its derivatives on the unit-outer annulus."""

    def __init__(self, smap: ShallowCompositeMap):
        self.smap = smap
        self.r_o = smap.r_o
        self.alpha = smap.r_i / smap.r_o

    def omega(self, zeta):
        return self.smap.backward(self.r_o * np.asarray(zeta, dtype=complex))

    def d1(self, zeta):
        return self.r_o * self.smap.derivative(self.r_o * np.asarray(zeta, dtype=complex))

    def d2(self, zeta):
        return self.r_o ** 2 * self.smap.second_derivative(self.r_o * np.asarray(zeta, dtype=complex))

    def forward(self, z):
        return self.smap.forward(np.asarray(z, dtype=complex)) / self.r_o

    def weight(self, zeta, side: str):
        """(zeta - 1)^2 times omega' inside the unit circle, or times the derivative of the reflected
        map conj omega(1/conj zeta) outside; the factor cancels the double pole at the image of infinity."""
        zeta = np.asarray(zeta, dtype=complex)
        if side == "in":
            return self.d1(zeta) * (zeta - 1.0) ** 2
        return -np.conj(self.d1(1.0 / np.conj(zeta))) * (1.0 - 1.0 / zeta) ** 2

    def weight_dlog(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return self.d2(zeta) / self.d1(zeta) + 2.0 / (zeta - 1.0)


@dataclass(frozen=True)
class GroundSplit:
    T1: float
    T2: float
    t1: complex
    t2: complex
    p: complex
    deviation: float

    def to_dict(self) -> dict:
        return {"T1": self.T1, "T2": self.T2}


def ground_split(smap: ShallowCompositeMap, T1: float = -10.0, T2: float = 10.0) -> GroundSplit:
    """Images of the joint points on the unit circle; p is the image of the free-segment midpoint."""
    if not T1 < T2:
        raise ValueError("T1 must lie left of T2")
    an = _Annulus(smap)
    raw = an.forward(np.array([T1, T2, 0.5 * (T1 + T2)], dtype=complex))
    dev = float(np.max(np.abs(np.abs(raw) - 1.0)))
    t1, t2, p = raw / np.abs(raw)
    return GroundSplit(float(T1), float(T2), complex(t1), complex(t2), complex(p), dev)


@dataclass(frozen=True)
class CanonicalX:
    t1: complex
    t2: complex
    p: complex
    kappa: float
    a: complex
    s: float
    alpha_k: np.ndarray = field(repr=False)
    beta_k: np.ndarray = field(repr=False)
    r_in: float = 0.0
    r_out: float = 0.0
    jump_residual: tuple = (0.0, 0.0)

    @property
    def t_sel(self) -> complex:
        return self.t1 if self.a.real > 0 else self.t2

    def _u(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return ((zeta - self.t1) / (zeta - self.t2)) / ((self.p - self.t1) / (self.p - self.t2))

    def _log(self, zeta, side):
        # the inside of the unit circle is the half-plane s * Im u > 0; rotate so that
        # the principal cut of each branch lies on the opposite side
        u = self._u(zeta)
        rot = -1j * self.s if side == "in" else 1j * self.s
        return -np.log(rot) + np.log(rot * u)

    def evaluate(self, zeta, side: str = "in"):
        """X continued from inside (side='in') or outside (side='out') the unit circle."""
        zeta = np.asarray(zeta, dtype=complex)
        if side == "auto":
            inside = np.abs(zeta) < 1.0
            return np.where(inside, self.evaluate(zeta, "in"), self.evaluate(zeta, "out"))
        return np.exp(self.a * self._log(zeta, side)) / (zeta - self.t_sel)

    def dlog(self, zeta):
        """X'/X, the same on both branches."""
        zeta = np.asarray(zeta, dtype=complex)
        return self.a * (1.0 / (zeta - self.t1) - 1.0 / (zeta - self.t2)) - 1.0 / (zeta - self.t_sel)

    def series(self, zeta):
        """Resummed Taylor (inside) or 1/zeta (outside) expansions."""
        zeta = np.asarray(zeta, dtype=complex)
        ka = np.arange(len(self.alpha_k))
        kb = np.arange(1, len(self.beta_k) + 1)
        inner = np.sum(self.alpha_k * zeta[..., None] ** ka, axis=-1)
        outer = np.sum(self.beta_k * zeta[..., None] ** (-kb), axis=-1)
        return np.where(np.abs(zeta) < 1.0, inner, outer)


def jump_residuals(X: CanonicalX, samples: int = 512, eps: float = 1e-13) -> tuple:
    """Relative defects of the two jump relations at sampled points of each arc."""
    th = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    sig = np.exp(1j * th)
    xp = X.evaluate(sig * (1 - eps), "in")
    xm = X.evaluate(sig * (1 + eps), "out")
    u = X._u(sig)
    free = u.real > 0
    scale = np.abs(xp) + np.abs(xm)
    r_free = np.abs(xp - xm)[free] / scale[free]
    r_fixed = np.abs(X.kappa * xp + xm)[~free] / scale[~free]
    return (float(r_free.max(initial=0.0)), float(r_fixed.max(initial=0.0)))


def build_canonical_X(split: GroundSplit, kappa: float, alpha: float, samples: int = 512,
                      m: int = 2048, n_coeffs: int = 64, tol: float = 1e-8) -> CanonicalX:
    """Canonical solution of the two-arc jump problem, unbounded like |zeta - t|^(-1/2) at both tips."""
    if abs(split.t1 - split.t2) < 1e-12:
        raise ValueError("joint points coincide")
    u0 = ((0 - split.t1) / (0 - split.t2)) / ((split.p - split.t1) / (split.p - split.t2))
    s = 1.0 if u0.imag > 0 else -1.0
    a = complex(0.5, np.log(kappa) / (2 * np.pi)) * s
    base = CanonicalX(split.t1, split.t2, split.p, float(kappa), a, s, np.zeros(0), np.zeros(0))
    r_in = 0.5 * (alpha + 1.0)
    r_out = 1.05
    sig = np.exp(2j * np.pi * np.arange(m) / m)
    ci = np.fft.fft(base.evaluate(r_in * sig, "in")) / m
    co = np.fft.fft(base.evaluate(r_out * sig, "out")) / m
    k = np.arange(n_coeffs)
    alpha_k = ci[k] / r_in ** k
    kb = np.arange(1, n_coeffs + 1)
    beta_k = co[-kb] * r_out ** kb
    X = CanonicalX(split.t1, split.t2, split.p, float(kappa), a, s, alpha_k, beta_k, r_in, r_out)
    res = jump_residuals(X, samples)
    if max(res) > tol:
        raise JumpVerificationFailed(f"jump residuals {res} exceed {tol}")
    return CanonicalX(split.t1, split.t2, split.p, float(kappa), a, s, alpha_k, beta_k, r_in, r_out, res)


def polygon_or_spec_area(cavity) -> float:
    if isinstance(cavity, CollocationSet):
        if cavity.area is not None:
            return float(cavity.area)
        if cavity.spec is not None:
            return float(cavity.spec.area)
        return abs(polygon_signed_area(cavity.points))
    return abs(polygon_signed_area(np.asarray(cavity, dtype=complex)))


def excavation_resultant(material: MaterialParams, cavity) -> dict:
    area = polygon_or_spec_area(cavity)
    ry = material.gamma * area
    return {"R_y": ry, "K0_res": -1j * ry / (2 * np.pi), "area": area}


def initial_stress(material: MaterialParams, z, tol: float = 0.0) -> "FieldSample":
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag > tol):
        raise UpperHalfPlane("initial stress is defined below the ground surface only")
    y = np.minimum(z.imag, 0.0)
    sx, sy = material.kx * material.gamma * y, material.gamma * y
    zero = np.zeros_like(y)
    return FieldSample(None, z, sx, sy, zero, None, None, None, zero, zero, "initial")


@dataclass(frozen=True)
class RHSHarmonics:
    I: np.ndarray
    J: np.ndarray
    K0: complex
    h: np.ndarray
    modes: np.ndarray

    def coefficient(self, k):
        """Fourier coefficient of the single-valued part of the resultant integral."""
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=complex)
        pos, neg = k > 0, k < 0
        out[pos] = self.J[k[pos] - 1]
        out[neg] = self.I[-k[neg] - 1]
        return out


def rhs_harmonics(material: MaterialParams, smap: ShallowCompositeMap, n_modes: int, m: int = 1024,
                  check: bool = True, rtol: float = 1e-5) -> RHSHarmonics:
    """Fourier content of -gamma * int y (dx + i kx dy) along |zeta| = alpha.

    The integrand h(theta) has mean h_0; the integral is h_0 theta plus the periodic part
    sum h_k e^{ik theta}/(ik). I_k collects sigma^{-k}, J_k collects sigma^{k}.
    """
    an = _Annulus(smap)
    th = 2 * np.pi * np.arange(m) / m
    zeta = an.alpha * np.exp(1j * th)
    z = an.omega(zeta)
    dz = an.d1(zeta) * 1j * zeta
    h = -material.gamma * z.imag * (dz.real + 1j * material.kx * dz.imag)
    hc = np.fft.fft(h) / m
    k = np.arange(1, n_modes + 1)
    J = hc[k] / (1j * k)
    I = hc[-k] / (-1j * k)
    K0 = complex(-1j * hc[0])
    if check and material.gamma != 0 and smap.cavity is not None:
        ref = excavation_resultant(material, smap.cavity)["K0_res"]
        if abs(K0 - ref) > rtol * abs(ref):
            raise K0Mismatch(f"extracted K0 {K0} vs area-based {ref}")
    return RHSHarmonics(I, J, K0, hc, np.arange(-n_modes, n_modes + 1))


def lanczos(n0: int, k):
    k = np.asarray(k, dtype=float)
    return np.sinc(k / n0)


@dataclass(frozen=True)
class FieldSample:
    zeta: Optional[np.ndarray]
    z: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    txy: np.ndarray
    srho: Optional[np.ndarray]
    stheta: Optional[np.ndarray]
    trt: Optional[np.ndarray]
    ux: np.ndarray
    uy: np.ndarray
    kind: str = "excavation"

    def __add__(self, other: "FieldSample") -> "FieldSample":
        pol = None
        if self.zeta is not None and other.zeta is None and self.srho is not None:
            other = other.rotated(self.zeta, self._rot)
        if self.srho is not None and other.srho is not None:
            pol = (self.srho + other.srho, self.stheta + other.stheta, self.trt + other.trt)
        else:
            pol = (None, None, None)
        return FieldSample(self.zeta, self.z, self.sx + other.sx, self.sy + other.sy, self.txy + other.txy,
                           *pol, self.ux + other.ux, self.uy + other.uy, "total")

    _rot: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def rotated(self, zeta, rot) -> "FieldSample":
        """Attach curvilinear components using the frame factor e^{2 i a}."""
        s = self.sx + self.sy
        d = (self.sy - self.sx + 2j * self.txy) * rot
        return FieldSample(zeta, self.z, self.sx, self.sy, self.txy, 0.5 * (s - d.real), 0.5 * (s + d.real),
                           0.5 * d.imag, self.ux, self.uy, self.kind, rot)


def mises(sample: FieldSample, nu: float):
    """Plane-strain von Mises stress with sigma_z = nu (sigma_x + sigma_y)."""
    sx, sy, t = np.asarray(sample.sx), np.asarray(sample.sy), np.asarray(sample.txy)
    sz = nu * (sx + sy)
    return np.sqrt(0.5 * ((sx - sy) ** 2 + (sy - sz) ** 2 + (sz - sx) ** 2) + 3.0 * t ** 2)


@dataclass(frozen=True)
class SeriesSolution:
    smap: ShallowCompositeMap = field(repr=False)
    material: MaterialParams
    split: GroundSplit
    X: CanonicalX = field(repr=False)
    n0: int
    c: np.ndarray = field(repr=False)
    K0_res: complex
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    k_range: np.ndarray = field(repr=False)
    C_a: complex
    c_phi: complex
    log: tuple
    converged: bool
    method: str
    m: int
    ls_cond: float
    phi_in_coeffs: np.ndarray = field(repr=False)
    phi_out_coeffs: np.ndarray = field(repr=False)
    map_factor: bool = True

    @property
    def alpha(self) -> float:
        return self.smap.r_i / self.smap.r_o

    @property
    def n_range(self) -> np.ndarray:
        return np.arange(-self.n0, self.n0 + 1)

    @property
    def f(self) -> np.ndarray:
        """Laurent coefficients f_n of F in the plain basis zeta^n."""
        return self.c * self.alpha ** np.abs(self.n_range)

    def coefficient(self, name: str, k: int) -> complex:
        arr = self.A if name == "A" else self.B
        return complex(arr[k - self.k_range[0]])

    def to_dict(self) -> dict:
        cl = lambda a: [[float(x.real), float(x.imag)] for x in np.atleast_1d(a)]
        return {"n0": self.n0, "m": self.m, "method": self.method, "material": self.material.to_dict(),
                "split": self.split.to_dict(), "c": cl(self.c), "f": cl(self.f), "K0_res": cl(self.K0_res)[0],
                "A": cl(self.A), "B": cl(self.B), "k_range": [int(self.k_range[0]), int(self.k_range[-1])],
                "C_a": cl(self.C_a)[0], "converged": self.converged, "ls_cond": self.ls_cond,
                "log": list(self.log), "kappa": self.X.kappa, "a": cl(self.X.a)[0],
                "jump_residual": list(self.X.jump_residual), "map_factor": self.map_factor}


def _basis(zeta, n_range, alpha):
    zeta = np.asarray(zeta, dtype=complex)[..., None]
    n = n_range
    return np.where(n < 0, (zeta / alpha) ** np.minimum(n, 0), (alpha * zeta) ** np.maximum(n, 0))


def _basis_d(zeta, n_range, alpha):
    zeta = np.asarray(zeta, dtype=complex)[..., None]
    n = n_range
    return np.where(n < 0, n * (zeta / alpha) ** np.minimum(n - 1, 0) / alpha,
                    n * alpha * (alpha * zeta) ** np.maximum(n - 1, 0))


def _prefactor(an: _Annulus, X: CanonicalX, zeta, side: str, map_factor: bool):
    g = X.evaluate(zeta, side)
    return g * an.weight(zeta, side) if map_factor else g


class _Assembly:
    """Per-basis-function boundary data on |zeta| = alpha and |zeta| = 1/alpha."""

    def __init__(self, an: _Annulus, X: CanonicalX, n0: int, m: int, map_factor: bool = True):
        self.an, self.X, self.n0, self.m = an, X, n0, m
        al = an.alpha
        self.n_range = np.arange(-n0, n0 + 1)
        sig = np.exp(2j * np.pi * np.arange(m) / m)
        za, zb = al * sig, sig / al
        ga = _prefactor(an, X, za, "in", map_factor)[:, None] * _basis(za, self.n_range, al)
        gb = _prefactor(an, X, zb, "out", map_factor)[:, None] * _basis(zb, self.n_range, al)
        w = an.omega(za)
        self.d = (w - np.conj(w)) / np.conj(an.d1(za))
        self.ca = np.fft.fft(ga, axis=0) / m
        self.cb = np.fft.fft(gb, axis=0) / m
        self.cq = np.fft.fft(self.d[:, None] * np.conj(ga), axis=0) / m

    def rows(self, modes):
        """Linear (P) and conjugate (Q) mode responses plus the two log-coefficient rows."""
        al, m = self.an.alpha, self.m
        mm = np.asarray(modes)
        P = al * self.ca[np.mod(mm - 1, m)] / mm[:, None] - self.cb[np.mod(mm - 1, m)] / (al * mm[:, None])
        Q = self.cq[np.mod(mm, m)]
        a_m1 = al * self.ca[m - 1]
        b_m1 = self.cb[m - 1] / al
        return P, Q, a_m1, b_m1


def _real_system(P, Q):
    """Real matrix acting on [Re c, Im c] for the map c -> P c + Q conj(c)."""
    lin_re = P + Q
    lin_im = 1j * (P - Q)
    top = np.hstack([lin_re.real, lin_im.real])
    bot = np.hstack([lin_re.imag, lin_im.imag])
    return np.vstack([top, bot])


def solve_series(smap: ShallowCompositeMap, material: MaterialParams, split: Optional[GroundSplit] = None,
                 n0: int = 60, tol: float = 1e-10, max_sweeps: int = 200, method: str = "direct",
                 m: int = 1024, n_modes: Optional[int] = None, weight: str = "traction",
                 damping: float = 1.0, X: Optional[CanonicalX] = None,
                 map_factor: bool = True) -> SeriesSolution:
    """Least-squares Laurent coefficients of F with both log coefficients pinned exactly.

    method='direct' solves the real-linear problem in one step; method='iterative' lags the
    conjugate coupling and repeats complex solves until the coefficient change drops below tol.
    """
    if n0 < 8:
        raise ValueError("n0 must be at least 8")
    if split is None:
        split = ground_split(smap)
    an = _Annulus(smap)
    al = an.alpha
    kappa = material.kappa
    if X is None:
        X = build_canonical_X(split, kappa, al)
    n_modes = 2 * n0 if n_modes is None else int(n_modes)
    m = max(m, 8 * (n_modes + n0))
    rhs = rhs_harmonics(material, smap, n_modes, m)
    K0 = rhs.K0
    asm = _Assembly(an, X, n0, m, map_factor)
    modes = np.concatenate([np.arange(-n_modes, 0), np.arange(1, n_modes + 1)])
    P, Q, a_m1, b_m1 = asm.rows(modes)
    R = rhs.coefficient(modes)
    wts = np.abs(modes).astype(float) if weight == "traction" else np.ones(len(modes))
    P, Q, R = P * wts[:, None], Q * wts[:, None], R * wts
    pin_rows = np.vstack([a_m1, b_m1])
    pin_vals = np.array([K0 / (1 + kappa), -kappa * K0 / (1 + kappa)])
    nb = len(asm.n_range)
    log = []
    if method == "direct":
        Ar = _real_system(P, Q)
        br = np.concatenate([R.real, R.imag])
        Cr = _real_system(pin_rows, np.zeros_like(pin_rows))
        er = np.concatenate([pin_vals.real, pin_vals.imag])
        vp = np.linalg.lstsq(Cr, er, rcond=None)[0]
        N = sla.null_space(Cr)
        Ared = Ar @ N
        sv = np.linalg.svd(Ared, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        if not np.isfinite(cond) or cond > 1e14:
            raise IllConditionedLS(f"reduced least-squares condition {cond:.3e}")
        y = np.linalg.lstsq(Ared, br - Ar @ vp, rcond=None)[0]
        v = vp + N @ y
        c = v[:nb] + 1j * v[nb:]
        log.append(float(np.linalg.norm(Ared @ y - (br - Ar @ vp)) / max(np.linalg.norm(br), 1e-300)))
        converged = True
    elif method == "iterative":
        N = sla.null_space(pin_rows)
        cp = np.linalg.lstsq(pin_rows, pin_vals, rcond=None)[0]
        Ared = P @ N
        sv = np.linalg.svd(Ared, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        if not np.isfinite(cond) or cond > 1e14:
            raise IllConditionedLS(f"reduced least-squares condition {cond:.3e}")
        c = cp.copy()
        converged = False
        scale = max(np.linalg.norm(R), 1e-300)
        for _ in range(max_sweeps):
            b = R - P @ cp - Q @ np.conj(c)
            y = np.linalg.lstsq(Ared, b, rcond=None)[0]
            new = cp + N @ y
            change = float(np.max(np.abs(new - c)) / max(np.max(np.abs(new)), 1e-300))
            c = c + damping * (new - c)
            log.append(change)
            if len(log) > 3 and log[-1] > 2 * log[-2] and damping > 0.5:
                damping = 0.5
            if change <= tol or np.linalg.norm(R) / scale == 0:
                converged = True
                break
        if not converged:
            raise NonConvergence(f"coefficient change {log[-1]:.3e} after {len(log)} sweeps")
    else:
        raise ValueError("method must be 'direct' or 'iterative'")

    # Laurent coefficients of phi' on both sides and of the antiderivatives at the mid radii
    k_range = np.arange(-n0 - 2, n0 + 1)
    ri, ro = np.sqrt(al), 1.0 / np.sqrt(al)
    sig = np.exp(2j * np.pi * np.arange(m) / m)
    pin = _prefactor(an, X, ri * sig, "in", map_factor) * (_basis(ri * sig, asm.n_range, al) @ c)
    pout = _prefactor(an, X, ro * sig, "out", map_factor) * (_basis(ro * sig, asm.n_range, al) @ c)
    cin = np.fft.fft(pin) / m
    cout = np.fft.fft(pout) / m
    A = cin[np.mod(k_range, m)] / ri ** k_range
    B = cout[np.mod(k_range, m)] / ro ** k_range
    C_a = complex(K0 / (1 + kappa))
    sol = SeriesSolution(smap, material, split, X, n0, c, K0, A, B, k_range, C_a, 0.0, tuple(log),
                         converged, method, m, cond, cin, cout, map_factor)
    one = np.array([1.0 + 0j])
    c_phi = -(kappa * _phi(sol, one, "in")[0] + _phi(sol, one, "out")[0])
    return replace(sol, c_phi=complex(c_phi))


def _F(sol: SeriesSolution, zeta, deriv: int = 0):
    b = _basis_d if deriv else _basis
    return b(zeta, sol.n_range, sol.alpha) @ sol.c


def _phi1(sol: SeriesSolution, zeta, side: str):
    zeta = np.asarray(zeta, dtype=complex)
    return _prefactor(_Annulus(sol.smap), sol.X, zeta, side, sol.map_factor) * _F(sol, zeta)


def _phi2(sol: SeriesSolution, zeta):
    """phi'' inside the unit circle."""
    zeta = np.asarray(zeta, dtype=complex)
    an = _Annulus(sol.smap)
    dl = sol.X.dlog(zeta) + (an.weight_dlog(zeta) if sol.map_factor else 0.0)
    return _prefactor(an, sol.X, zeta, "in", sol.map_factor) * (dl * _F(sol, zeta) + _F(sol, zeta, 1))


def _phi(sol: SeriesSolution, zeta, side: str):
    """Antiderivative of phi' (the i*theta part of the logarithm dropped), by radial quadrature
    from the middle circle of its annulus, where the Laurent series is accurate."""
    zeta = np.asarray(zeta, dtype=complex)
    al, m = sol.alpha, sol.m
    r0 = np.sqrt(al) if side == "in" else 1.0 / np.sqrt(al)
    coeffs = sol.phi_in_coeffs if side == "in" else sol.phi_out_coeffs
    log_coef = coeffs[m - 1] * r0   # A_{-1} or B_{-1}
    sig = np.exp(1j * np.angle(zeta))
    k = np.fft.fftfreq(m, 1.0 / m).astype(int)
    keep = k != 0
    # phi(r0 sigma) = sum_{k != 0} c_{k-1} r0 sigma^k / k + log_coef ln r0
    ck = coeffs[np.mod(k[keep] - 1, m)] * r0 / k[keep]
    base = (sig[..., None] ** k[keep]) @ ck + log_coef * np.log(r0)
    rho = np.abs(zeta)
    s = 0.5 * (_GL_NODES + 1.0)
    wq = 0.5 * _GL_WEIGHTS
    # grade toward the far end, where phi' may carry an inverse square-root tip singularity
    g = 1.0 - (1.0 - s) ** 2
    dg = 2.0 * (1.0 - s)
    r = r0 + (rho[..., None] - r0) * g
    vals = _phi1(sol, r * sig[..., None], side) * sig[..., None]
    integral = (vals * dg * wq) @ np.ones(len(s)) * (rho - r0)
    return base + integral


def _check(sol: SeriesSolution, zeta, tol=1e-9):
    if not sol.converged:
        raise NotConverged("solution did not converge")
    rho = np.abs(zeta)
    if np.any(rho < sol.alpha * (1 - tol)) or np.any(rho > 1 + tol):
        raise OutsideDomain("evaluation point outside the closed annulus")


def eval_fields(sol: SeriesSolution, zeta=None, z=None, form: str = "closed") -> FieldSample:
    """Excavation-induced stress (rectangular and curvilinear) and displacement.

    Points are given on the rescaled annulus (`zeta`, alpha <= |zeta| <= 1) or in the physical
    plane (`z`). form='series' substitutes the Lanczos-filtered truncated Laurent sums of phi'.
    """
    an = _Annulus(sol.smap)
    if zeta is None:
        zeta = an.forward(np.asarray(z, dtype=complex))
        rho = np.abs(zeta)
        zeta = np.where(rho > 1.0, zeta / rho, zeta)
    zeta = np.asarray(zeta, dtype=complex)
    _check(sol, zeta)
    kappa, G = sol.material.kappa, sol.material.G
    w, w1, w2 = an.omega(zeta), an.d1(zeta), an.d2(zeta)
    refl = 1.0 / np.conj(zeta)
    if form == "closed":
        p1 = _phi1(sol, zeta, "in")
        p2 = _phi2(sol, zeta)
        q1 = _phi1(sol, refl, "out")
    elif form == "series":
        k = sol.k_range
        sel = np.abs(k) <= sol.n0
        k, Lk = k[sel], lanczos(sol.n0, k[sel])
        A, B = sol.A[sel] * Lk, sol.B[sel] * Lk
        zp = zeta[..., None]
        p1 = (zp ** k) @ A
        p2 = (k * zp ** (k - 1)) @ A
        q1 = (refl[..., None] ** k) @ B
    else:
        raise ValueError("form must be 'closed' or 'series'")
    S = 4.0 * (p1 / w1).real
    D = 2.0 * ((np.conj(w) - w) * (p2 * w1 - p1 * w2) / w1 ** 3 + (zeta ** -2 * np.conj(q1) - p1) / w1)
    rot = (zeta / np.conj(zeta)) * (w1 / np.conj(w1))
    Dp = D * rot
    dterm = (w - np.conj(w)) / np.conj(w1)
    g = (kappa * _phi(sol, zeta, "in") - dterm * np.conj(p1) + _phi(sol, refl, "out") + sol.c_phi)
    u = g / (2.0 * G)
    return FieldSample(zeta, w, 0.5 * (S - D.real), 0.5 * (S + D.real), 0.5 * D.imag,
                       0.5 * (S - Dp.real), 0.5 * (S + Dp.real), 0.5 * Dp.imag, u.real, u.imag,
                       "excavation", rot)


def total_fields(sol: SeriesSolution, zeta=None, z=None, form: str = "closed", tol: float = 1e-3) -> FieldSample:
    exc = eval_fields(sol, zeta, z, form)
    ini = initial_stress(sol.material, exc.z, tol=tol).rotated(exc.zeta, exc._rot)
    return exc + ini


def _d12_path(split: GroundSplit):
    """Parameter range on the unit circle of the fixed arc, traversed clockwise through zeta = 1."""
    a1 = np.mod(np.angle(split.t1), 2 * np.pi)
    a2 = np.mod(np.angle(split.t2), 2 * np.pi)
    start, end = min(a1, a2), max(a1, a2) - 2 * np.pi
    ap = np.mod(np.angle(split.p), 2 * np.pi)
    if not (min(a1, a2) < ap < max(a1, a2)):
        raise ValueError("free-arc midpoint lies on the fixed arc")
    return start, end


def fixed_arc_resultant(sol: SeriesSolution, n: int = 400) -> complex:
    """Force on the fixed ground arc, i * integral (phi'_in - phi'_out) d zeta along x increasing."""
    start, end = _d12_path(sol.split)
    s, w = np.polynomial.legendre.leggauss(n)
    s, w = 0.5 * (s + 1), 0.5 * w
    th = start + (end - start) * 0.5 * (1 - np.cos(np.pi * s))
    dth = (end - start) * 0.5 * np.pi * np.sin(np.pi * s)
    sig = np.exp(1j * th)
    f = _phi1(sol, sig, "in") - _phi1(sol, sig, "out")
    return complex(1j * np.sum(f * 1j * sig * dth * w))


@dataclass(frozen=True)
class ResidualReport:
    cavity_normal: np.ndarray
    cavity_tangential: np.ndarray
    free_traction: np.ndarray
    fixed_displacement: np.ndarray
    cavity_displacement: np.ndarray
    resultant: complex
    R_y: float
    reference_stress: float

    def summary(self) -> dict:
        cav = np.hypot(self.cavity_normal, self.cavity_tangential)
        umax = float(self.cavity_displacement.max())
        return {
            "max_cavity_traction": float(cav.max()),
            "max_free_traction": float(self.free_traction.max(initial=0.0)),
            "max_fixed_displacement": float(self.fixed_displacement.max(initial=0.0)),
            "max_cavity_displacement": umax,
            "cavity_traction_ratio": float(cav.max() / self.reference_stress) if self.reference_stress else 0.0,
            "free_traction_ratio": (float(self.free_traction.max(initial=0.0) / self.reference_stress)
                                    if self.reference_stress else 0.0),
            "fixed_displacement_ratio": float(self.fixed_displacement.max(initial=0.0) / umax) if umax else 0.0,
            "resultant": [self.resultant.real, self.resultant.imag],
            "resultant_error": (float(abs(self.resultant + 1j * self.R_y) / self.R_y) if self.R_y else 0.0),
        }


def residual_report(sol: SeriesSolution, n_cavity: int = 720, n_ground: int = 400,
                    depth: Optional[float] = None) -> ResidualReport:
    an = _Annulus(sol.smap)
    if depth is None:
        depth = abs(sol.smap.mobius.z_c2.imag)
    th = 2 * np.pi * (np.arange(n_cavity) + 0.5) / n_cavity
    cav = total_fields(sol, zeta=an.alpha * np.exp(1j * th))
    sp = sol.split
    x_free = sp.T1 + (sp.T2 - sp.T1) * (np.arange(n_ground) + 0.5) / n_ground
    zf = an.forward(x_free.astype(complex))
    free = eval_fields(sol, zeta=zf / np.abs(zf))
    start, end = _d12_path(sp)
    tf = start + (end - start) * (np.arange(n_ground) + 0.5) / n_ground
    fixed = eval_fields(sol, zeta=np.exp(1j * tf))
    ry = excavation_resultant(sol.material, sol.smap.cavity)["R_y"] if sol.smap.cavity is not None else float(
        (1j * sol.K0_res * 2 * np.pi).real)
    return ResidualReport(cav.srho, cav.trt, np.hypot(free.srho, free.trt), np.hypot(fixed.ux, fixed.uy),
                          np.hypot(cav.ux, cav.uy), fixed_arc_resultant(sol), ry, sol.material.gamma * depth)
