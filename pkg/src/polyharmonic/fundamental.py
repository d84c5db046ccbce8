"""Fundamental solutions of (-Laplace)^k on R^d and their expansions.

For even d and k >= d/2 the fundamental solution is logarithmic; its
essential pieces are the kernels

    l(x, x') = |x - x'|^{2p} (log|x - x'| - beta_{p,d}),   j(x, x') = |x - x'|^{2p},

with p = k - d/2.  Writing |x - x'|^2 = 2RR'(chi - cos(phi - phi')) turns them
into functions of chi and cos(phi - phi') (azimuthal Fourier series), and
writing |x - x'|^2 = 2rr'(zeta - cos gamma) gives Gegenbauer series in
cos gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CoincidentPoints, DimensionError, DomainError, RegimeError, StepTooLarge
from .kernel_expansions import (
    _binomial_chebyshev_coeffs,
    _binomial_gegenbauer_coeffs,
    _log_chebyshev_parts,
    _log_gegenbauer_parts,
    _sum_table,
)
from .special_fn import SeriesCtl, SeriesResult, gamma, harmonic_number

D_MAX = 16


def beta_constant(p: int, d: int) -> Fraction:
    """beta_{p,d} = (H_p + H_{d/2+p-1} - H_{d/2-1}) / 2, exactly."""
    h = d // 2
    return (harmonic_number(p) + harmonic_number(h + p - 1) - harmonic_number(h - 1)) / 2


@dataclass(frozen=True)
class FundParams:
    """Dimension d (even) and power k of the Laplacian."""

    d: int
    k: int
    d_max: int = D_MAX

    def __post_init__(self):
        if self.d < 2 or self.d % 2 or self.d > self.d_max:
            raise DimensionError(f"d must be even with 2 <= d <= {self.d_max}, got {self.d}")
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")

    @property
    def p(self) -> int:
        return self.k - self.d // 2

    @property
    def log_regime(self) -> bool:
        return self.p >= 0

    @property
    def beta(self) -> Fraction | None:
        return beta_constant(self.p, self.d) if self.log_regime else None

    def _require_log(self):
        if not self.log_regime:
            raise RegimeError(f"k = {self.k} < d/2 = {self.d // 2}: not logarithmic")


@dataclass(frozen=True)
class RotGeometry:
    """Cylindrical description of a point pair about the last coordinate plane."""

    R: float
    Rp: float
    phi: float
    phip: float
    perp_sq: float

    def __post_init__(self):
        if not (self.R > 0 and self.Rp > 0):
            raise DomainError("cylindrical radii must be positive")
        if self.perp_sq < 0:
            raise DomainError("perp_sq must be non-negative")

    @property
    def chi(self) -> float:
        return (self.R**2 + self.Rp**2 + self.perp_sq) / (2 * self.R * self.Rp)

    @property
    def dphi(self) -> float:
        return self.phi - self.phip

    @classmethod
    def from_cartesian(cls, x, xp) -> "RotGeometry":
        x, xp = np.asarray(x, float), np.asarray(xp, float)
        R, Rp = math.hypot(x[-2], x[-1]), math.hypot(xp[-2], xp[-1])
        return cls(R, Rp, math.atan2(x[-1], x[-2]), math.atan2(xp[-1], xp[-2]),
                   float(np.sum((x[:-2] - xp[:-2]) ** 2)))

    def dist_sq(self) -> float:
        return 2 * self.R * self.Rp * (self.chi - math.cos(self.dphi))


@dataclass(frozen=True)
class SphGeometry:
    """Spherical radii and the cosine of the separation angle."""

    r: float
    rp: float
    cos_gamma: float

    def __post_init__(self):
        if not (self.r > 0 and self.rp > 0):
            raise DomainError("radii must be positive")
        if not -1 <= self.cos_gamma <= 1:
            raise DomainError("cos_gamma must lie in [-1, 1]")

    @property
    def zeta(self) -> float:
        return (self.r**2 + self.rp**2) / (2 * self.r * self.rp)

    @property
    def sinh_eta(self) -> float:
        """sqrt(zeta^2 - 1) = (r_>^2 - r_<^2)/(2 r r'), without cancellation."""
        big, small = max(self.r, self.rp), min(self.r, self.rp)
        return (big - small) * (big + small) / (2 * self.r * self.rp)

    @classmethod
    def from_cartesian(cls, x, xp) -> "SphGeometry":
        x, xp = np.asarray(x, float), np.asarray(xp, float)
        r, rp = float(np.linalg.norm(x)), float(np.linalg.norm(xp))
        c = float(np.dot(x, xp)) / (r * rp)
        return cls(r, rp, min(1.0, max(-1.0, c)))

    def dist_sq(self) -> float:
        return 2 * self.r * self.rp * (self.zeta - self.cos_gamma)


def _dist(x, xp) -> float:
    dd = float(np.linalg.norm(np.asarray(x, float) - np.asarray(xp, float)))
    if dd == 0:
        raise CoincidentPoints("x and x' coincide")
    return dd


def green_from_distance(d: int, k: int, rho: float) -> float:
    """G_k^d as a function of the separation rho > 0."""
    h = d // 2
    if d % 2 == 0 and k >= h:
        p = k - h
        sign = (-1) ** (k + h + 1)
        c = sign / (math.factorial(k - 1) * math.factorial(p) * 2.0 ** (2 * k - 1) * math.pi**h)
        return c * rho ** (2 * p) * (math.log(rho) - float(beta_constant(p, d)))
    return gamma(d / 2 - k) * rho ** (2 * k - d) / (math.factorial(k - 1) * 2.0 ** (2 * k) * math.pi ** (d / 2))


def _green_scale(d: int, k: int, rho: float) -> float:
    # magnitude scale of G_k^d near rho; the log branch can vanish at isolated rho
    h = d // 2
    if d % 2 == 0 and k >= h:
        p = k - h
        c = 1.0 / (math.factorial(k - 1) * math.factorial(p) * 2.0 ** (2 * k - 1) * math.pi**h)
        return c * rho ** (2 * p) * max(1.0, abs(math.log(rho) - float(beta_constant(p, d))))
    return abs(green_from_distance(d, k, rho))


def green_polyharmonic(fp: FundParams, x, xp) -> float:
    """Fundamental solution G_k^d(x, x') of (-Laplace)^k."""
    if len(x) != fp.d or len(xp) != fp.d:
        raise DimensionError("points must have d coordinates")
    return green_from_distance(fp.d, fp.k, _dist(x, xp))


def kernel_l(fp: FundParams, x, xp) -> float:
    fp._require_log()
    rho = _dist(x, xp)
    return rho ** (2 * fp.p) * (math.log(rho) - float(fp.beta))


def kernel_j(fp: FundParams, x, xp) -> float:
    fp._require_log()
    dd = np.asarray(x, float) - np.asarray(xp, float)
    return float(np.dot(dd, dd)) ** fp.p


def kernel_l_rot(fp: FundParams, g: RotGeometry) -> float:
    """The l kernel written through 2RR' and w = chi - cos(phi - phi')."""
    fp._require_log()
    p, a = fp.p, 2 * g.R * g.Rp
    w = g.chi - math.cos(g.dphi)
    if w <= 0:
        raise CoincidentPoints("x and x' coincide")
    return a**p * w**p * (0.5 * math.log(a) - float(fp.beta)) + 0.5 * a**p * w**p * math.log(w)


def kernel_l_sph(fp: FundParams, g: SphGeometry) -> float:
    fp._require_log()
    p, a = fp.p, 2 * g.r * g.rp
    w = g.zeta - g.cos_gamma
    if w <= 0:
        raise CoincidentPoints("x and x' coincide")
    return a**p * w**p * (0.5 * math.log(a) - float(fp.beta)) + 0.5 * a**p * w**p * math.log(w)


# ---------------------------------------------------------------------------
# azimuthal Fourier series


def _fourier_l_parts(fp: FundParams, R: float, Rp: float, chi: float):
    p = fp.p
    a = 2 * R * Rp
    scale = a**p
    shift = 0.5 * math.log(a) - float(fp.beta)
    logc, tail = _log_chebyshev_parts(p, chi)
    binc = _binomial_chebyshev_coeffs(p, chi)
    finite = [scale * (0.5 * lc + shift * bc) for lc, bc in zip(logc, binc)]
    return finite, (lambda m: 0.5 * scale * tail(m))


def fourier_coefficients_l(fp: FundParams, R: float, Rp: float, chi: float, mmax: int) -> list[float]:
    """Coefficients a_m of l = sum_m a_m cos(m(phi - phi')), m = 0..mmax."""
    fp._require_log()
    finite, tail = _fourier_l_parts(fp, R, Rp, chi)
    return [finite[m] if m < len(finite) else tail(m) for m in range(mmax + 1)]


def fourier_coefficients_j(fp: FundParams, R: float, Rp: float, chi: float, mmax: int) -> list[float]:
    """Coefficients of j = sum_m a_m cos(m(phi - phi')); zero beyond m = p."""
    fp._require_log()
    c = [(2 * R * Rp) ** fp.p * v for v in _binomial_chebyshev_coeffs(fp.p, chi)]
    return [c[m] if m < len(c) else 0.0 for m in range(mmax + 1)]


def fourier_expansion_l(fp: FundParams, g: RotGeometry, ctl: SeriesCtl | None = None) -> SeriesResult:
    """Azimuthal Fourier series of the l kernel, summed to the stopping rule."""
    fp._require_log()
    if not g.chi > 1:
        raise DomainError("chi must exceed 1")
    finite, tail = _fourier_l_parts(fp, g.R, g.Rp, g.chi)
    return _sum_table(finite, "chebyshev", None, math.cos(g.dphi), tail, ctl)[0]


def fourier_expansion_j(fp: FundParams, g: RotGeometry) -> SeriesResult:
    """Finite azimuthal Fourier sum (p + 1 terms) of the j kernel."""
    fp._require_log()
    c = fourier_coefficients_j(fp, g.R, g.Rp, g.chi, fp.p)
    return _sum_table(c, "chebyshev", None, math.cos(g.dphi))[0]


# ---------------------------------------------------------------------------
# Gegenbauer series in cos(gamma)


def gegen_expansion_l(fp: FundParams, g: SphGeometry, ctl: SeriesCtl | None = None) -> SeriesResult:
    """Gegenbauer series of the l kernel with order mu = d/2 - 1 (d >= 4)."""
    fp._require_log()
    if fp.d < 4:
        raise DomainError("the Gegenbauer expansion needs d >= 4; use the Fourier series for d = 2")
    if not g.zeta > 1:
        raise DomainError("zeta must exceed 1 (r != r')")
    p, mu = fp.p, fp.d // 2 - 1
    a = 2 * g.r * g.rp
    scale = a**p
    shift = 0.5 * math.log(a) - float(fp.beta)
    logc, tail = _log_gegenbauer_parts(p, mu, g.zeta)
    binc = _binomial_gegenbauer_coeffs(p, mu, g.zeta)
    finite = [scale * (0.5 * lc + shift * bc) for lc, bc in zip(logc, binc)]
    return _sum_table(finite, "gegenbauer", mu, g.cos_gamma, lambda n: 0.5 * scale * tail(n), ctl)[0]


def gegen_expansion_j(fp: FundParams, g: SphGeometry) -> SeriesResult:
    """Finite Gegenbauer sum (p + 1 terms) of the j kernel; Chebyshev for d = 2."""
    fp._require_log()
    if not g.zeta > 1:
        raise DomainError("zeta must exceed 1 (r != r')")
    p = fp.p
    scale = (2 * g.r * g.rp) ** p
    if fp.d == 2:
        c = [scale * v for v in _binomial_chebyshev_coeffs(p, g.zeta)]
        return _sum_table(c, "chebyshev", None, g.cos_gamma)[0]
    mu = fp.d // 2 - 1
    c = [scale * v for v in _binomial_gegenbauer_coeffs(p, mu, g.zeta)]
    return _sum_table(c, "gegenbauer", mu, g.cos_gamma)[0]


# ---------------------------------------------------------------------------
# iteration property


def laplacian_iteration_check(fp: FundParams, x, xp, h: float = 1e-3) -> float:
    """Relative defect of (-Lap_h) G_k against G_{k-1} at x.

    Uses the (2d+1)-point second-order centered stencil.  The defect is
    divided by the magnitude scale of G_{k-1} (for the logarithmic branch
    c * rho^{2p} * max(1, |log rho - beta|)), since G_{k-1} itself vanishes
    where log rho = beta.
    """
    if fp.k < 2:
        raise DomainError("need k >= 2 so that G_{k-1} exists")
    x = np.asarray(x, float)
    xp = np.asarray(xp, float)
    sep = _dist(x, xp)
    if h > sep / 10:
        raise StepTooLarge(f"h = {h} exceeds separation/10 = {sep / 10}")
    d, k = fp.d, fp.k
    g0 = green_from_distance(d, k, sep)
    lap = 0.0
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        lap += green_from_distance(d, k, _dist(x + e, xp)) + green_from_distance(d, k, _dist(x - e, xp)) - 2 * g0
    lap /= h * h
    target = green_from_distance(d, k - 1, sep)
    return abs(-lap - target) / _green_scale(d, k - 1, sep)
