"""Binomial and logarithmic addition theorems.

Each theorem states that one azimuthal Fourier coefficient of the kernels,
a reduced Legendre function of the hypertoroidal parameter chi (or a short
combination of them), equals a multi-sum over hyperspherical harmonics with
Legendre functions of zeta.  Both sides are evaluated here in the reduced
phase q = exp(-i pi mu) Q, where every constant is real.

Sign bookkeeping: the chi-side carries Q^{p+1/2} = i (-1)^p q and a
zeta-side Q^{p+(d-1)/2} carries i^{2p+d-1} q, so dividing through leaves the
real factor (-1)^{d/2-1} on every zeta-side term of that order; terms of
order k + l + (d-1)/2 pick up (-1)^{k+l-p} (-1)^{d/2-1} and terms of order
k + 1/2 pick up (-1)^{k-p}.

The multi-sums are evaluated degree by degree: all harmonic products with
the same degree l (= l_1) share one zeta coefficient, so the chain (standard)
or tree (Hopf) products are first accumulated per degree by dynamic
programming (:func:`coords.std_chain_sums`, :func:`coords.hopf_tree_sums`).
Infinite sums are truncated at l_1 <= window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import coords
from .errors import DimensionError, DomainError, PolyharmonicError
from .fundamental import beta_constant
from .special_fn import fact_ratio, harmonic, neumann, q_reduced

STANDARD = "standard"
HOPF = "hopf"
BINOMIAL = "binomial"
LOGARITHMIC = "logarithmic"
M_LE_P = "m_le_p"
M_GE_P1 = "m_ge_p1"

DEFAULT_WINDOW_PAD = 12


@dataclass(frozen=True)
class TheoremId:
    """Names one addition theorem; ``d4_closed_form`` selects the d = 4 specializations."""

    family: str
    kind: str
    regime: str
    d: int
    d4_closed_form: bool = False

    def validate(self):
        if self.family not in (STANDARD, HOPF):
            raise ValueError(f"unknown family {self.family!r}")
        if self.kind not in (BINOMIAL, LOGARITHMIC):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.regime not in (M_LE_P, M_GE_P1):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.kind == BINOMIAL and self.regime == M_GE_P1:
            raise ValueError("binomial theorems only exist for m <= p")
        if self.d < 4 or self.d % 2 or self.d > 16:
            raise DimensionError(f"d must be even in 4..16, got {self.d}")
        if self.family == HOPF and self.d not in (4, 8, 16):
            raise DimensionError(f"Hopf coordinates need d = 2^q, got {self.d}")
        if self.d4_closed_form and self.d != 4:
            raise DimensionError("closed-form specialization exists only for d = 4")

    @property
    def name(self) -> str:
        s = f"{self.family}-{self.kind}-{self.regime}-d{self.d}"
        return s + "-closed" if self.d4_closed_form else s


@dataclass(frozen=True)
class Geometry:
    """A Cartesian point pair with all derived parameters."""

    x: tuple
    xp: tuple
    r: float
    rp: float
    R: float
    Rp: float
    chi: float
    zeta: float
    sinh_eta: float

    @classmethod
    def from_cartesian(cls, x, xp) -> "Geometry":
        x, xp = np.asarray(x, float), np.asarray(xp, float)
        r, rp = float(np.linalg.norm(x)), float(np.linalg.norm(xp))
        R, Rp = math.hypot(x[-2], x[-1]), math.hypot(xp[-2], xp[-1])
        if min(r, rp, R, Rp) == 0:
            raise DomainError("points must lie off the axis")
        chi = (R * R + Rp * Rp + float(np.sum((x[:-2] - xp[:-2]) ** 2))) / (2 * R * Rp)
        zeta = (r * r + rp * rp) / (2 * r * rp)
        big, small = max(r, rp), min(r, rp)
        return cls(tuple(x), tuple(xp), r, rp, R, Rp, chi, zeta, (big - small) * (big + small) / (2 * r * rp))

    @property
    def d(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Sample:
    geometry: Geometry
    p: int
    m: int

    def record(self) -> dict:
        g = self.geometry
        return {"p": self.p, "m": self.m, "d": g.d, "chi": g.chi, "zeta": g.zeta,
                "x": list(g.x), "xp": list(g.xp)}


@dataclass(frozen=True)
class VerificationReport:
    theorem: TheoremId
    sample: dict
    lhs: float
    rhs: float
    residual_rel: float
    terms_used: int
    converged: bool
    tail_estimate: float = 0.0
    window: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RhsValue:
    value: float
    terms_used: int
    tail_estimate: float
    window: int | None = None
    by_degree: tuple = field(default=(), repr=False)


# ---------------------------------------------------------------------------
# chi side


def lhs_binomial(p: int, m: int, chi: float) -> float:
    """q_{m-1/2}^{p+1/2}(chi)."""
    return q_reduced(m - 0.5, p + 0.5, chi)


def lhs_logarithmic(p: int, m: int, chi: float, R: float, Rp: float) -> float:
    """Logarithmic chi-side group for m <= p; the bare q for m >= p + 1."""
    if m >= p + 1:
        return lhs_binomial(p, m, chi)
    f = math.factorial
    s = math.sqrt((chi - 1) * (chi + 1))
    q = lambda k2: q_reduced(m - 0.5, k2 / 2, chi)  # noqa: E731
    head = math.log(R * Rp) + math.log(chi + s) + 2 * harmonic(2 * p) - harmonic(p + m) - harmonic(p - m)
    out = head * q(2 * p + 1) / (f(p + m) * f(p - m))
    acc = 0.0
    for k in range(p - m):
        br = 1 + f(k) * f(p + m) / (f(2 * m + k) * f(p - m))
        acc += (-1) ** (m + k - p) * (2 * m + 2 * k + 1) * br / (f(k) * (p - m - k) * (p + m + k + 1)) * q(2 * (m + k) + 1)
    out += acc / f(p + m)
    acc = 0.0
    for k in range(m):
        acc += (-1) ** (k - p) * (2 * k + 1) / (f(m + k) * (p - k) * (p + k + 1)) * q(2 * k + 1)
    return out + acc / f(p - m)


def fourier_coefficient_j(p: int, m: int, R: float, Rp: float, chi: float) -> float:
    """Coefficient of cos(m(phi - phi')) in |x - x'|^{2p}, from the chi side."""
    if m > p:
        return 0.0
    c = math.sqrt(2 / math.pi) * math.factorial(p) * (2 * R * Rp) ** p * ((chi - 1) * (chi + 1)) ** (p / 2 + 0.25)
    return c * (-1) ** m * neumann(m) / (math.factorial(p - m) * math.factorial(p + m)) * lhs_binomial(p, m, chi)


def fourier_coefficient_l(p: int, m: int, d: int, R: float, Rp: float, chi: float) -> float:
    """Coefficient of cos(m(phi - phi')) in |x - x'|^{2p}(log|x - x'| - beta_{p,d})."""
    c = math.factorial(p) / math.sqrt(2 * math.pi) * (2 * R * Rp) ** p * ((chi - 1) * (chi + 1)) ** (p / 2 + 0.25)
    if m >= p + 1:
        return 2 * (-1) ** (p + 1) * c * fact_ratio(m - p - 1, p + m) * lhs_binomial(p, m, chi)
    b = float(beta_constant(p, d))
    inner = lhs_logarithmic(p, m, chi, R, Rp) - 2 * b * lhs_binomial(p, m, chi) / (
        math.factorial(p - m) * math.factorial(p + m))
    return c * (-1) ** m * neumann(m) * inner


# ---------------------------------------------------------------------------
# zeta side: per-degree coefficients


def _binomial_coef(p: int, d: int, l: int, zeta: float) -> float:
    return (-1) ** l / (math.factorial(p - l) * math.factorial(p + l + d - 2)) * q_reduced(l + (d - 3) / 2, p + (d - 1) / 2, zeta)


def _log_finite_coef(p: int, d: int, l: int, zeta: float, r_big: float) -> float:
    # zeta-side bracket for a degree l <= p, reduced phase
    f = math.factorial
    h, g, D = (d - 3) / 2, (d - 1) / 2, d // 2
    sD = (-1) ** (D - 1)
    q = lambda mu: q_reduced(l + h, mu, zeta)  # noqa: E731
    A = 2 * math.log(r_big) + 2 * harmonic(2 * p + d - 2) + harmonic(p) - harmonic(p + D - 1)
    A -= harmonic(p + l + d - 2) + harmonic(p - l)
    out = sD * A * q(p + g) / (f(p - l) * f(p + l + d - 2))
    acc = 0.0
    for k in range(p - l):
        br = 1 + f(k) * f(p + l + d - 2) / (f(k + 2 * l + d - 2) * f(p - l))
        acc += (-1) ** (k + l - p) * sD * (2 * l + 2 * k + d - 1) * br / (f(k) * (p - l - k) * (p + l + k + d - 1)) * q(k + l + g)
    out += acc / f(p + l + d - 2)
    acc = 0.0
    for k in range(l + D - 1):
        acc += (-1) ** (k - p) * (2 * k + 1) / (f(l + k + D - 1) * (p + D - k - 1) * (p + k + D)) * q(k + 0.5)
    out += acc / f(p - l)
    return (-1) ** l * out


def _tail_coef(p: int, d: int, l: int, zeta: float) -> float:
    return fact_ratio(l - p - 1, p + l + d - 2) * q_reduced(l + (d - 3) / 2, p + (d - 1) / 2, zeta)


def _common_prefactor(p: int, d: int, geo: Geometry) -> float:
    # (rr'/RR')^p (zeta^2 - 1)^{p/2 + (d-1)/4} (chi^2 - 1)^{-p/2 - 1/4}
    return (geo.r * geo.rp / (geo.R * geo.Rp)) ** p * geo.sinh_eta ** (p + (d - 1) / 2) * (
        (geo.chi - 1) * (geo.chi + 1)) ** (-p / 2 - 0.25)


def _tail_estimate(contrib: list[float], zeta: float) -> float:
    # geometric continuation of the last computed degrees at rate 1/(zeta + sqrt(zeta^2 - 1))
    if not contrib:
        return 0.0
    rate = 1 / (zeta + math.sqrt((zeta - 1) * (zeta + 1)))
    last = max(abs(c) for c in contrib[-2:])
    return last * rate / (1 - rate)


# ---------------------------------------------------------------------------
# degree sums


def _std_points(geo: Geometry):
    a = coords.cartesian_to_std(geo.x)
    b = coords.cartesian_to_std(geo.xp)
    return a, b


def _std_degree_sums(d: int, m: int, lmax: int, geo: Geometry, closed_form: bool) -> np.ndarray:
    a, b = _std_points(geo)
    if closed_form:
        out = np.zeros(lmax + 1)
        for l in range(m, lmax + 1):
            out[l] = sum(coords.omega_chain_d4(l, l2, m, a.thetas, b.thetas) for l2 in range(m, l + 1))
        return out
    return coords.std_chain_sums(d, m, lmax, a.thetas, b.thetas)


def _hopf_degree_sums(d: int, m: int, lmax: int, geo: Geometry, signed: bool, closed_form: bool) -> np.ndarray:
    a = coords.cartesian_to_hopf(geo.x)
    b = coords.cartesian_to_hopf(geo.xp)
    if closed_form:
        out = np.zeros(lmax + 1)
        t, tp = a.angles[0], b.angles[0]
        dphi2 = a.azimuth(2) - b.azimuth(2)
        for m2 in range(lmax - m + 1):
            w = neumann(m2) * math.cos(m2 * dphi2) * ((-1) ** (m + m2) if signed else 1)
            for n in range((lmax - m - m2) // 2 + 1):
                out[2 * n + m + m2] += w * coords.psi_d4(n, m, m2, t, tp)
        return out
    return coords.hopf_tree_sums(d, m, lmax, a, b, signed=signed)


def _degree_sums(theorem: TheoremId, m: int, lmax: int, geo: Geometry, signed: bool) -> np.ndarray:
    if theorem.family == STANDARD:
        s = _std_degree_sums(theorem.d, m, lmax, geo, theorem.d4_closed_form)
        # the standard sums carry no (-1)^M weight; (-1)^m is applied in the prefactor
        return s
    return _hopf_degree_sums(theorem.d, m, lmax, geo, signed, theorem.d4_closed_form)


# ---------------------------------------------------------------------------
# zeta side: full right-hand sides


def _check(p: int, m: int, geo: Geometry, d: int):
    if p < 0 or m < 0:
        raise DomainError("p and m must be non-negative")
    if geo.d != d:
        raise DimensionError("geometry dimension does not match the theorem")


def _rhs_binomial(theorem: TheoremId, p: int, m: int, geo: Geometry) -> RhsValue:
    d = theorem.d
    _check(p, m, geo, d)
    if m > p:
        raise DomainError("binomial addition theorems need m <= p")
    # (-1)^l in the coefficient already supplies the Hopf (-1)^M
    S = _degree_sums(theorem, m, p, geo, signed=theorem.family == STANDARD)
    pre = _common_prefactor(p, d, geo) * math.factorial(p - m) * math.factorial(p + m)
    if theorem.family == STANDARD:
        pre *= (-1) ** m * (2 * math.pi) ** (d // 2 - 1)
    else:
        pre *= (-1) ** m * 2 ** (d // 2 - 1)
    contrib = [pre * S[l] * _binomial_coef(p, d, l, geo.zeta) for l in range(m, p + 1)]
    return RhsValue(math.fsum(contrib), len(contrib), 0.0, None, tuple(contrib))


def rhs_standard_binomial(p: int, m: int, geo: Geometry, closed_form: bool = False) -> RhsValue:
    return _rhs_binomial(TheoremId(STANDARD, BINOMIAL, M_LE_P, geo.d, closed_form), p, m, geo)


def rhs_hopf_binomial(p: int, m: int, geo: Geometry, closed_form: bool = False) -> RhsValue:
    return _rhs_binomial(TheoremId(HOPF, BINOMIAL, M_LE_P, geo.d, closed_form), p, m, geo)


def _rhs_logarithmic(theorem: TheoremId, p: int, m: int, geo: Geometry, window: int | None) -> RhsValue:
    d = theorem.d
    _check(p, m, geo, d)
    W = p + DEFAULT_WINDOW_PAD if window is None else window
    if W < max(p, m):
        raise DomainError("window must be at least max(p, m)")
    D = d // 2
    geo_pre = _common_prefactor(p, d, geo)
    fam = (2 * math.pi) ** (D - 1) if theorem.family == STANDARD else 2.0 ** (D - 1)
    if m >= p + 1:
        S = _degree_sums(theorem, m, W, geo, signed=False)
        pre = fam * geo_pre * fact_ratio(p + m, m - p - 1)
        contrib = [pre * S[l] * _tail_coef(p, d, l, geo.zeta) for l in range(m, W + 1)]
        return RhsValue(math.fsum(contrib), len(contrib), _tail_estimate(contrib, geo.zeta), W, tuple(contrib))
    r_big = max(geo.r, geo.rp)
    pre = (-1) ** (m + D - 1) * fam * geo_pre
    S_fin = _degree_sums(theorem, m, p, geo, signed=theorem.family == STANDARD)
    S_tail = _degree_sums(theorem, m, W, geo, signed=False)
    contrib = [pre * S_fin[l] * _log_finite_coef(p, d, l, geo.zeta, r_big) for l in range(m, p + 1)]
    tail = [pre * (-1) ** (p + 1) * (-1) ** (D - 1) * S_tail[l] * _tail_coef(p, d, l, geo.zeta)
            for l in range(p + 1, W + 1)]
    return RhsValue(math.fsum(contrib + tail), len(contrib) + len(tail), _tail_estimate(tail, geo.zeta), W,
                    tuple(contrib + tail))


def rhs_standard_logarithmic(p: int, m: int, geo: Geometry, window: int | None = None,
                             closed_form: bool = False) -> RhsValue:
    regime = M_GE_P1 if m >= p + 1 else M_LE_P
    return _rhs_logarithmic(TheoremId(STANDARD, LOGARITHMIC, regime, geo.d, closed_form), p, m, geo, window)


def rhs_hopf_logarithmic(p: int, m: int, geo: Geometry, window: int | None = None,
                         closed_form: bool = False) -> RhsValue:
    regime = M_GE_P1 if m >= p + 1 else M_LE_P
    return _rhs_logarithmic(TheoremId(HOPF, LOGARITHMIC, regime, geo.d, closed_form), p, m, geo, window)


def rhs(theorem: TheoremId, p: int, m: int, geo: Geometry, window: int | None = None) -> RhsValue:
    theorem.validate()
    if theorem.kind == BINOMIAL:
        return _rhs_binomial(theorem, p, m, geo)
    return _rhs_logarithmic(theorem, p, m, geo, window)


def lhs(theorem: TheoremId, p: int, m: int, geo: Geometry) -> float:
    if theorem.kind == BINOMIAL:
        return lhs_binomial(p, m, geo.chi)
    return lhs_logarithmic(p, m, geo.chi, geo.R, geo.Rp)


# ---------------------------------------------------------------------------
# sampling and verification


def sample_geometry(d: int, rng: np.random.Generator, min_zeta: float = 1.2, min_chi: float = 1.2,
                    max_tries: int = 10_000) -> Geometry:
    """Draw a Cartesian pair (uniform directions, radii in [0.25, 1] and [1.5, 4]).

    Pairs with zeta or chi below the thresholds are redrawn.
    """
    for _ in range(max_tries):
        u = rng.normal(size=d)
        v = rng.normal(size=d)
        x = u / np.linalg.norm(u) * rng.uniform(0.25, 1.0)
        xp = v / np.linalg.norm(v) * rng.uniform(1.5, 4.0)
        if rng.random() < 0.5:
            x, xp = xp, x
        geo = Geometry.from_cartesian(x, xp)
        if geo.zeta >= min_zeta and geo.chi >= min_chi:
            return geo
    raise DomainError("could not draw a geometry meeting the thresholds")


def regime_m_values(theorem: TheoremId, p: int, extra: int = 2) -> list[int]:
    """Azimuthal numbers covered by the theorem's regime at order p."""
    if theorem.regime == M_LE_P:
        return list(range(p + 1))
    return list(range(p + 1, p + 1 + extra))


def verify(theorem: TheoremId, sample, p: int | None = None, m: int | None = None,
           window: int | None = None, tail_tol: float = 1e-7) -> VerificationReport:
    """Evaluate both sides of a theorem on a sample (or a seed) and report the residual.

    With an integer seed the geometry is drawn deterministically and, unless
    given, p is drawn from 0..3 and m from the regime.
    """
    record: dict = {}
    try:
        theorem.validate()
        if isinstance(sample, Sample):
            s = sample
        else:
            rng = np.random.default_rng(int(sample))
            geo = sample_geometry(theorem.d, rng)
            pp = int(rng.integers(0, 4)) if p is None else p
            ms = regime_m_values(theorem, pp)
            mm = int(rng.choice(ms)) if m is None else m
            s = Sample(geo, pp, mm)
        record = s.record()
        if theorem.regime == M_LE_P and s.m > s.p or theorem.regime == M_GE_P1 and s.m < s.p + 1:
            raise DomainError(f"m = {s.m} is outside the {theorem.regime} regime for p = {s.p}")
        left = lhs(theorem, s.p, s.m, s.geometry)
        right = rhs(theorem, s.p, s.m, s.geometry, window)
        res = abs(left - right.value) / max(abs(left), 1e-300)
        conv = bool(right.tail_estimate <= tail_tol * max(abs(right.value), 1e-300))
        return VerificationReport(theorem, record, left, right.value, res, right.terms_used, conv,
                                  right.tail_estimate, right.window)
    except (PolyharmonicError, ValueError, ArithmeticError) as exc:
        return VerificationReport(theorem, record, math.nan, math.nan, math.nan, 0, False,
                                  error=f"{type(exc).__name__}: {exc}")


def all_theorems(d_standard=(4, 6, 8), d_hopf=(4, 8)) -> list[TheoremId]:
    """The theorem grid: every family/kind/regime, plus the d = 4 closed forms."""
    out = []
    for fam, ds in ((STANDARD, d_standard), (HOPF, d_hopf)):
        for d in ds:
            for kind, regime in ((BINOMIAL, M_LE_P), (LOGARITHMIC, M_LE_P), (LOGARITHMIC, M_GE_P1)):
                out.append(TheoremId(fam, kind, regime, d))
                if d == 4:
                    out.append(TheoremId(fam, kind, regime, d, True))
    return out
