"""Standard polyspherical and generalized Hopf coordinates on R^d.

Standard polyspherical angles (theta_1, ..., theta_{d-2}, phi):

    x_1 = r cos th_1,  x_2 = r sin th_1 cos th_2,  ...,
    x_{d-1} = r sin th_1 ... sin th_{d-2} cos phi,  x_d = ... sin phi.

Hopf coordinates (d = 2^q) live on a binary tree with nodes 1..d-1.  Nodes
1..d/2-1 are internal and carry meridional angles vartheta_k in [0, pi/2];
nodes d/2..d-1 are leaves and carry azimuths, leaf k holding phi_{d-k}.
Radii propagate as rho_1 = r, rho_{2k} = rho_k cos vartheta_k,
rho_{2k+1} = rho_k sin vartheta_k, and leaf k = d/2 + i fills the coordinate
pair (x_{2i+1}, x_{2i+2}) = rho_k (cos, sin).  The Hopf angle vector is
stored in node order: (vartheta_1, ..., vartheta_{d/2-1}, phi_{d/2}, ..., phi_1).

Azimuthal quantum numbers are kept non-negative; the cosine-folded form with
the Neumann factor eps_m replaces the signed sums.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import DimensionError, QuantumIndexError, ZeroRadius
from .special_fn import ferrers_p, gamma, gegenbauer, jacobi_p, jacobi_p_all, neumann

STANDARD = "standard_polyspherical"
HOPF = "hopf"
CARTESIAN = "cartesian"

GL_NODES = 64
TRAPEZOID_NODES = 128


def hopf_q(d: int) -> int:
    """log2(d) for the supported Hopf dimensions."""
    if d not in (2, 4, 8, 16):
        raise DimensionError(f"Hopf coordinates need d in {{2, 4, 8, 16}}, got {d}")
    return d.bit_length() - 1


@dataclass(frozen=True)
class PolyPoint:
    """A point of R^d in one of the coordinate systems."""

    system: str
    r: float
    angles: tuple
    d: int

    def __post_init__(self):
        if self.system not in (STANDARD, HOPF, CARTESIAN):
            raise ValueError(f"unknown system {self.system!r}")
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if self.system == HOPF:
            hopf_q(self.d)
        if self.system != CARTESIAN and len(self.angles) != self.d - 1:
            raise DimensionError(f"expected {self.d - 1} angles, got {len(self.angles)}")

    @classmethod
    def from_cartesian(cls, x, system: str = STANDARD) -> "PolyPoint":
        if system == STANDARD:
            return cartesian_to_std(x)
        if system == HOPF:
            return cartesian_to_hopf(x)
        x = np.asarray(x, float)
        return cls(CARTESIAN, float(np.linalg.norm(x)), tuple(x), len(x))

    def to_cartesian(self) -> np.ndarray:
        if self.system == STANDARD:
            return std_to_cartesian(self)
        if self.system == HOPF:
            return hopf_to_cartesian(self)
        return np.array(self.angles)

    @property
    def thetas(self) -> tuple:
        """Meridional angles (all but the azimuths)."""
        if self.system == STANDARD:
            return self.angles[:-1]
        return self.angles[: self.d // 2 - 1]

    def azimuth(self, j: int = 1) -> float:
        """Azimuth phi_j (standard coordinates have only phi_1)."""
        if self.system == STANDARD:
            if j != 1:
                raise IndexError("standard coordinates have one azimuth")
            return self.angles[-1]
        return self.angles[self.d - j - 1]


# ---------------------------------------------------------------------------
# conversions


def std_to_cartesian(pt: PolyPoint) -> np.ndarray:
    if pt.system != STANDARD:
        raise ValueError("not a standard polyspherical point")
    d, ang = pt.d, pt.angles
    x = np.empty(d)
    s = pt.r
    for i in range(d - 2):
        x[i] = s * math.cos(ang[i])
        s *= math.sin(ang[i])
    x[d - 2] = s * math.cos(ang[-1])
    x[d - 1] = s * math.sin(ang[-1])
    return x


def cartesian_to_std(x) -> PolyPoint:
    x = np.asarray(x, float)
    d = len(x)
    if d < 2:
        raise DimensionError("need d >= 2")
    r = float(np.linalg.norm(x))
    if r == 0:
        raise ZeroRadius("the origin has no angles")
    ang = []
    for i in range(d - 2):
        rest = float(np.linalg.norm(x[i:]))
        ang.append(math.acos(max(-1.0, min(1.0, x[i] / rest))) if rest > 0 else 0.0)
    ang.append(math.atan2(x[-1], x[-2]))
    return PolyPoint(STANDARD, r, tuple(ang), d)


def hopf_to_cartesian(pt: PolyPoint) -> np.ndarray:
    if pt.system != HOPF:
        raise ValueError("not a Hopf point")
    d = pt.d
    hopf_q(d)
    rho = {1: pt.r}
    for k in range(1, d // 2):
        t = pt.angles[k - 1]
        rho[2 * k] = rho[k] * math.cos(t)
        rho[2 * k + 1] = rho[k] * math.sin(t)
    x = np.empty(d)
    for i in range(d // 2):
        k = d // 2 + i
        t = pt.angles[k - 1]
        x[2 * i] = rho[k] * math.cos(t)
        x[2 * i + 1] = rho[k] * math.sin(t)
    return x


def cartesian_to_hopf(x) -> PolyPoint:
    x = np.asarray(x, float)
    d = len(x)
    hopf_q(d)
    r = float(np.linalg.norm(x))
    if r == 0:
        raise ZeroRadius("the origin has no angles")
    rho = {}
    ang = [0.0] * (d - 1)
    for i in range(d // 2):
        k = d // 2 + i
        rho[k] = math.hypot(x[2 * i], x[2 * i + 1])
        ang[k - 1] = math.atan2(x[2 * i + 1], x[2 * i])
    for k in range(d // 2 - 1, 0, -1):
        rho[k] = math.hypot(rho[2 * k], rho[2 * k + 1])
        ang[k - 1] = math.atan2(rho[2 * k + 1], rho[2 * k])
    return PolyPoint(HOPF, r, tuple(ang), d)


def cos_gamma(x, xp) -> float:
    """Cosine of the angle between two position vectors."""
    x, xp = np.asarray(x, float), np.asarray(xp, float)
    nx, nxp = np.linalg.norm(x), np.linalg.norm(xp)
    if nx == 0 or nxp == 0:
        raise ZeroRadius("cos gamma is undefined at the origin")
    return float(max(-1.0, min(1.0, np.dot(x, xp) / (nx * nxp))))


def cos_gamma_hopf(p: PolyPoint, pp: PolyPoint) -> float:
    """cos gamma from the Hopf tree recursion.

    G(leaf k) = cos(t_k - t_k'), G(k) = cos t cos t' G(2k) + sin t sin t' G(2k+1).
    """
    if p.system != HOPF or pp.system != HOPF or p.d != pp.d:
        raise ValueError("need two Hopf points of the same dimension")
    if p.r == 0 or pp.r == 0:
        raise ZeroRadius("cos gamma is undefined at the origin")
    d = p.d

    def g(k: int) -> float:
        a, b = p.angles[k - 1], pp.angles[k - 1]
        if k >= d // 2:
            return math.cos(a - b)
        return math.cos(a) * math.cos(b) * g(2 * k) + math.sin(a) * math.sin(b) * g(2 * k + 1)

    return g(1)


# ---------------------------------------------------------------------------
# harmonic factors


@lru_cache(maxsize=None)
def _theta_norm(j: int, d: int, lj: int, lj1: int) -> float:
    a = 2 * lj1 + d - j - 1
    return gamma(lj1 + (d - j + 1) / 2) / a * math.sqrt(
        2.0**a * (2 * lj + d - j - 1) * math.factorial(lj - lj1) / (math.pi * math.factorial(lj + lj1 + d - j - 2)))


def theta_factor(j: int, d: int, lj: int, lj1: int, theta):
    """Normalized factor Theta_j^d(l_j, l_{j+1}; theta) of a standard harmonic.

    Orthonormal on [0, pi] with weight sin^{d-j-1}.
    """
    if not 1 <= j <= d - 2:
        raise QuantumIndexError(f"j must lie in 1..{d - 2}")
    if not lj >= lj1 >= 0:
        raise QuantumIndexError(f"need l_j >= l_(j+1) >= 0, got {lj}, {lj1}")
    th = np.asarray(theta, float)
    out = _theta_norm(j, d, lj, lj1) * np.sin(th) ** lj1 * gegenbauer(lj - lj1, lj1 + (d - j - 1) / 2, np.cos(th))
    return out if np.ndim(theta) else float(out)


def omega_product(k: int, d: int, lk: int, lk1: int, theta: float, theta_p: float) -> float:
    """Omega_k^d = Theta(theta) Theta(theta')."""
    return theta_factor(k, d, lk, lk1, theta) * theta_factor(k, d, lk, lk1, theta_p)


def omega_chain_d4(l: int, l2: int, m: int, th, thp) -> float:
    """Product of both Omega factors for d = 4 in Ferrers/Gegenbauer closed form."""
    if not l >= l2 >= m >= 0:
        raise QuantumIndexError("need l >= l2 >= m >= 0")
    f = math.factorial
    c = 2.0 ** (2 * l2) * f(l2) ** 2 * (2 * l2 + 1) * f(l2 - m) / f(l2 + m) / math.pi
    c *= (l + 1) * f(l - l2) / f(l + l2 + 1)
    fp = ferrers_p(l2, m, math.cos(th[1])) * ferrers_p(l2, m, math.cos(thp[1]))
    cc = gegenbauer(l - l2, l2 + 1, math.cos(th[0])) * gegenbauer(l - l2, l2 + 1, math.cos(thp[0]))
    return c * (math.sin(th[0]) * math.sin(thp[0])) ** l2 * fp * cc


def hopf_alpha_offset(k: int, q: int) -> int:
    """2^{q-2-depth(k)} - 1: Jacobi parameter offset at node k."""
    return 2 ** (q - 2 - (k.bit_length() - 1)) - 1


@lru_cache(maxsize=None)
def _upsilon_norm(n: int, al: int, be: int) -> float:
    f = math.factorial
    return math.sqrt((2 * n + al + be + 1) * f(n + al + be) * f(n) / (f(n + al) * f(n + be)))


def upsilon(k: int, q: int, n_k: int, l_2k: int, l_2k1: int, vartheta):
    """Hopf harmonic factor Upsilon_k at meridional angle vartheta.

    Orthogonal on [0, pi/2] with weight cos^{2a+1} sin^{2a+1}, a the offset;
    each factor squares to 1/2 under that weight.
    """
    if n_k < 0 or l_2k < 0 or l_2k1 < 0:
        raise QuantumIndexError("Hopf quantum numbers must be non-negative")
    if not 1 <= k < 2 ** (q - 1):
        raise QuantumIndexError(f"node {k} is not internal for d = {2 ** q}")
    off = hopf_alpha_offset(k, q)
    al, be = l_2k + off, l_2k1 + off
    t = np.asarray(vartheta, float)
    out = _upsilon_norm(n_k, al, be) * np.cos(t) ** l_2k * np.sin(t) ** l_2k1 * jacobi_p(n_k, be, al, np.cos(2 * t))
    return out if np.ndim(vartheta) else float(out)


def psi_product(k: int, q: int, n_k: int, l_2k: int, l_2k1: int, vartheta: float, vartheta_p: float) -> float:
    """Psi_k = Upsilon(vartheta) Upsilon(vartheta')."""
    return upsilon(k, q, n_k, l_2k, l_2k1, vartheta) * upsilon(k, q, n_k, l_2k, l_2k1, vartheta_p)


def psi_d4(n: int, m: int, m2: int, t: float, tp: float) -> float:
    """d = 4 Psi in Jacobi closed form (m on phi_1, m2 on phi_2)."""
    f = math.factorial
    c = (2 * n + m + m2 + 1) * f(n + m + m2) * f(n) / (f(n + m) * f(n + m2))
    return c * (math.sin(t) * math.sin(tp)) ** m * (math.cos(t) * math.cos(tp)) ** m2 * jacobi_p(
        n, m, m2, math.cos(2 * t)) * jacobi_p(n, m, m2, math.cos(2 * tp))


# ---------------------------------------------------------------------------
# quantum numbers and harmonics


@dataclass(frozen=True, order=True)
class StdQuantumIndex:
    """(l_1, ..., l_{d-2}) chain plus azimuthal m, l_1 >= ... >= l_{d-2} >= m >= 0."""

    l_chain: tuple
    m: int

    def __post_init__(self):
        full = tuple(self.l_chain) + (self.m,)
        if any(v < 0 for v in full) or any(a < b for a, b in zip(full, full[1:])):
            raise QuantumIndexError(f"chain constraint violated: {full}")
        object.__setattr__(self, "l_chain", tuple(self.l_chain))

    @property
    def l(self) -> int:
        return self.l_chain[0] if self.l_chain else self.m


@dataclass(frozen=True, order=True)
class HopfQuantumIndex:
    """Hopf quantum numbers.

    ``L`` holds l_1..l_{d/2-1} of the internal nodes, ``M_vec`` the azimuthal
    m_1..m_{d/2} (m_j on phi_j, i.e. on leaf d - j).
    """

    L: tuple
    M_vec: tuple

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(self.L))
        object.__setattr__(self, "M_vec", tuple(self.M_vec))
        d = 2 * len(self.M_vec)
        if len(self.L) != d // 2 - 1:
            raise QuantumIndexError("L must have d/2 - 1 entries")
        if any(v < 0 for v in self.L + self.M_vec):
            raise QuantumIndexError("quantum numbers must be non-negative")
        for k in range(1, d // 2):
            rem = self.L[k - 1] - self.node_l(2 * k) - self.node_l(2 * k + 1)
            if rem < 0 or rem % 2:
                raise QuantumIndexError(f"n_{k} is not a non-negative integer")

    @property
    def d(self) -> int:
        return 2 * len(self.M_vec)

    def node_l(self, k: int) -> int:
        d = self.d
        return self.L[k - 1] if k < d // 2 else self.M_vec[d - k - 1]

    @property
    def N_vec(self) -> tuple:
        return tuple((self.L[k - 1] - self.node_l(2 * k) - self.node_l(2 * k + 1)) // 2 for k in range(1, self.d // 2))

    @property
    def N(self) -> int:
        return sum(self.N_vec)

    @property
    def M(self) -> int:
        return sum(self.M_vec)

    @property
    def l1(self) -> int:
        return self.L[0] if self.L else self.M_vec[0]


def phi_map(idx: HopfQuantumIndex) -> tuple:
    """Linear map from node degrees to (n_1, ..., n_{d/2-1}, m_1, ..., m_{d/2})."""
    return idx.N_vec + idx.M_vec


def phi_inverse(n_vec, m_vec) -> HopfQuantumIndex:
    """Rebuild node degrees l_k = 2 n_k + l_{2k} + l_{2k+1} from (n, m)."""
    d = 2 * len(m_vec)
    l = {}
    for j, mj in enumerate(m_vec, start=1):
        l[d - j] = mj
    for k in range(d // 2 - 1, 0, -1):
        l[k] = 2 * n_vec[k - 1] + l[2 * k] + l[2 * k + 1]
    return HopfQuantumIndex(tuple(l[k] for k in range(1, d // 2)), tuple(m_vec))


def std_harmonic(idx: StdQuantumIndex, pt: PolyPoint) -> complex:
    """Normalized standard hyperspherical harmonic with azimuthal number +m."""
    d = pt.d
    full = idx.l_chain + (idx.m,)
    if len(full) != d - 1:
        raise QuantumIndexError("index length does not match d")
    val = 1.0
    for j in range(1, d - 1):
        val *= theta_factor(j, d, full[j - 1], full[j], pt.angles[j - 1])
    return val * complex(math.cos(idx.m * pt.angles[-1]), math.sin(idx.m * pt.angles[-1])) / math.sqrt(2 * math.pi)


def hopf_harmonic(idx: HopfQuantumIndex, pt: PolyPoint) -> complex:
    """Normalized Hopf harmonic with all azimuthal numbers +m_j."""
    d = pt.d
    q = hopf_q(d)
    val = 1.0
    nv = idx.N_vec
    for k in range(1, d // 2):
        val *= upsilon(k, q, nv[k - 1], idx.node_l(2 * k), idx.node_l(2 * k + 1), pt.angles[k - 1])
    ph = sum(mj * pt.azimuth(j) for j, mj in enumerate(idx.M_vec, start=1))
    return val * complex(math.cos(ph), math.sin(ph)) / math.sqrt(2 * math.pi ** (d / 2))


def harmonic_norm_sq(idx, d: int, n_gl: int = GL_NODES, n_trap: int = TRAPEZOID_NODES) -> float:
    """Quadrature value of the integral of |Y|^2 over S^{d-1}.

    |Y|^2 factorizes over angles, so the tensor-product rule (Gauss-Legendre
    per meridional angle, trapezoid per azimuth) is evaluated as a product
    of one-dimensional rules.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_gl)
    phis = 2 * np.pi * np.arange(n_trap) / n_trap
    total = 1.0
    if isinstance(idx, StdQuantumIndex):
        full = idx.l_chain + (idx.m,)
        th = (xg + 1) * np.pi / 2
        for j in range(1, d - 1):
            f = theta_factor(j, d, full[j - 1], full[j], th) ** 2 * np.sin(th) ** (d - j - 1)
            total *= float(np.sum(wg * f)) * np.pi / 2
        total *= float(np.sum(np.abs(np.exp(1j * idx.m * phis)) ** 2)) * 2 * np.pi / n_trap / (2 * np.pi)
        return total
    q = hopf_q(d)
    th = (xg + 1) * np.pi / 4
    nv = idx.N_vec
    for k in range(1, d // 2):
        dc = 2 ** (q - 1 - (k.bit_length() - 1))
        f = upsilon(k, q, nv[k - 1], idx.node_l(2 * k), idx.node_l(2 * k + 1), th) ** 2
        f = f * np.cos(th) ** (dc - 1) * np.sin(th) ** (dc - 1)
        total *= float(np.sum(wg * f)) * np.pi / 4
    for j, mj in enumerate(idx.M_vec, start=1):
        total *= float(np.sum(np.abs(np.exp(1j * mj * phis)) ** 2)) * 2 * np.pi / n_trap
    return total / (2 * np.pi ** (d / 2))


# ---------------------------------------------------------------------------
# degree-resolved harmonic sums (dynamic programming over chain / tree)


def std_chain_sums(d: int, m: int, lmax: int, th, thp) -> np.ndarray:
    """S[l] = sum over chains l = l_1 >= ... >= l_{d-2} >= m of prod Omega_j.

    Returns an array of length lmax + 1 (zero for l < m).
    """
    if d < 3:
        raise DimensionError("standard chains need d >= 3")
    v = np.zeros(lmax + 1)
    if m <= lmax:
        v[m] = 1.0
    for j in range(d - 2, 0, -1):
        nv = np.zeros(lmax + 1)
        for a in range(m, lmax + 1):
            acc = 0.0
            for b in range(m, a + 1):
                if v[b] != 0.0:
                    acc += omega_product(j, d, a, b, th[j - 1], thp[j - 1]) * v[b]
            nv[a] = acc
        v = nv
    return v


def _upsilon_table(k: int, q: int, lmax: int, t: float) -> dict:
    # one recurrence run per (a, b) covers every n
    off = hopf_alpha_offset(k, q)
    c, s, x = math.cos(t), math.sin(t), math.cos(2 * t)
    tab = {}
    for a in range(lmax + 1):
        for b in range(lmax + 1 - a):
            nmax = (lmax - a - b) // 2
            ps = jacobi_p_all(nmax, b + off, a + off, x)
            pre = c**a * s**b
            for n in range(nmax + 1):
                tab[n, a, b] = _upsilon_norm(n, a + off, b + off) * pre * ps[n]
    return tab


def hopf_tree_sums(d: int, m: int, lmax: int, pt: PolyPoint, ptp: PolyPoint, signed: bool = False) -> np.ndarray:
    """V[L] = sum over Hopf states with l_1 = L, m_1 = m of
    prod_j eps_{m_j} cos(m_j dphi_j) (j >= 2) * prod_k Psi_k, optionally
    weighted by (-1)^M.
    """
    q = hopf_q(d)
    if d < 4:
        raise DimensionError("Hopf trees need d >= 4")
    vec = {}
    for k in range(d // 2, d):
        j = d - k
        v = np.zeros(lmax + 1)
        if j == 1:
            if m <= lmax:
                v[m] = (-1) ** m if signed else 1.0
        else:
            dphi = pt.azimuth(j) - ptp.azimuth(j)
            for l in range(lmax + 1):
                v[l] = neumann(l) * math.cos(l * dphi) * ((-1) ** l if signed else 1.0)
        vec[k] = v
    for k in range(d // 2 - 1, 0, -1):
        ta = _upsilon_table(k, q, lmax, pt.angles[k - 1])
        tb = _upsilon_table(k, q, lmax, ptp.angles[k - 1])
        left, right = vec[2 * k], vec[2 * k + 1]
        v = np.zeros(lmax + 1)
        for a in range(lmax + 1):
            if left[a] == 0.0:
                continue
            for b in range(lmax + 1 - a):
                if right[b] == 0.0:
                    continue
                w = left[a] * right[b]
                for n in range((lmax - a - b) // 2 + 1):
                    v[2 * n + a + b] += ta[n, a, b] * tb[n, a, b] * w
        vec[k] = v
    return vec[1]


def _hopf_states_with_l1(d: int, l1: int) -> Iterator[HopfQuantumIndex]:
    def rec(k: int, lk: int, acc: dict):
        # distribute degree lk at node k over its subtree
        if k >= d // 2:
            acc[k] = lk
            yield dict(acc)
            return
        acc[k] = lk
        for a in range(lk + 1):
            for b in range(lk - a + 1):
                if (lk - a - b) % 2:
                    continue
                for left in rec(2 * k, a, acc):
                    yield from rec(2 * k + 1, b, left)

    for st in rec(1, l1, {}):
        yield HopfQuantumIndex(tuple(st[k] for k in range(1, d // 2)), tuple(st[d - j] for j in range(1, d // 2 + 1)))


def addition_theorem_check(d: int, n: int, p1: PolyPoint, p2: PolyPoint) -> float:
    """|C_n^{d/2-1}(cos gamma) - c_{n,d} sum_K Y_K(p1) conj(Y_K(p2))| by full enumeration."""
    if p1.system != p2.system or p1.d != d or p2.d != d:
        raise ValueError("points must share system and dimension d")
    if d < 3:
        raise DimensionError("need d >= 3")
    cg = cos_gamma(p1.to_cartesian(), p2.to_cartesian())
    total = 0.0
    if p1.system == STANDARD:
        for idx in enum_Y1(d, n):
            if idx.l != n:
                continue
            om = 1.0
            full = idx.l_chain + (idx.m,)
            for j in range(1, d - 1):
                om *= omega_product(j, d, full[j - 1], full[j], p1.angles[j - 1], p2.angles[j - 1])
            total += om * neumann(idx.m) * math.cos(idx.m * (p1.angles[-1] - p2.angles[-1])) / (2 * math.pi)
    elif p1.system == HOPF:
        q = hopf_q(d)
        for idx in _hopf_states_with_l1(d, n):
            nv = idx.N_vec
            val = 1.0
            for k in range(1, d // 2):
                val *= psi_product(k, q, nv[k - 1], idx.node_l(2 * k), idx.node_l(2 * k + 1),
                                   p1.angles[k - 1], p2.angles[k - 1])
            for j, mj in enumerate(idx.M_vec, start=1):
                val *= neumann(mj) * math.cos(mj * (p1.azimuth(j) - p2.azimuth(j)))
            total += val / (2 * math.pi ** (d / 2))
    else:
        raise ValueError("need polyspherical points")
    c = 2 * (d - 2) * math.pi ** (d / 2) / ((2 * n + d - 2) * gamma(d / 2))
    return abs(gegenbauer(n, d / 2 - 1, cg) - c * total)


# ---------------------------------------------------------------------------
# index enumerators for the multi-sum reorderings


def _check_std(d: int, p: int):
    if d < 4 or d % 2:
        raise DimensionError("standard enumerations use even d >= 4")


def enum_Y1(d: int, p: int) -> Iterator[StdQuantumIndex]:
    """Nested forward order: l from 0..p outermost, each next index below the previous."""
    _check_std(d, p)

    def rec(prefix):
        if len(prefix) == d - 1:
            yield StdQuantumIndex(tuple(prefix[:-1]), prefix[-1])
            return
        hi = prefix[-1] if prefix else p
        for v in range(hi + 1):
            yield from rec(prefix + [v])

    yield from rec([])


def enum_Y1_reversed(d: int, p: int) -> Iterator[StdQuantumIndex]:
    """Reversed order: m outermost, each further index from the previous up to p."""
    _check_std(d, p)

    def rec(suffix):
        if len(suffix) == d - 1:
            yield StdQuantumIndex(tuple(suffix[:-1]), suffix[-1])
            return
        lo = suffix[0] if suffix else 0
        for v in range(lo, p + 1):
            yield from rec([v] + suffix)

    yield from rec([])


def enum_Y2_forward(d: int, p: int, window: int) -> Iterator[StdQuantumIndex]:
    """All chains with p + 1 <= l <= window."""
    _check_std(d, p)
    for l in range(p + 1, window + 1):
        def rec(prefix):
            if len(prefix) == d - 1:
                yield StdQuantumIndex(tuple(prefix[:-1]), prefix[-1])
                return
            for v in range(prefix[-1] + 1):
                yield from rec(prefix + [v])
        yield from rec([l])


def enum_Y2(d: int, p: int, window: int) -> tuple[list, list]:
    """Reversed Y2 split into (m <= p with l >= max(l_2, p+1), m >= p+1)."""
    _check_std(d, p)

    def rec(suffix, lo_last):
        if len(suffix) == d - 1:
            yield StdQuantumIndex(tuple(suffix[:-1]), suffix[-1])
            return
        lo = suffix[0]
        if len(suffix) == d - 2:
            lo = max(lo, lo_last)
        for v in range(lo, window + 1):
            yield from rec([v] + suffix, lo_last)

    part_one = [idx for m in range(0, min(p, window) + 1) for idx in rec([m], p + 1)]
    part_two = [idx for m in range(p + 1, window + 1) for idx in rec([m], 0)]
    return part_one, part_two


def _check_hopf(q: int):
    if q < 2:
        raise DimensionError("Hopf enumerations need q >= 2")


def _forward_hopf(q: int, lmax: int) -> Iterator[HopfQuantumIndex]:
    # all node degrees in [0, lmax] with the parity constraint
    d = 2**q
    for l1 in range(lmax + 1):
        yield from _hopf_states_with_l1(d, l1)


def _reversed_hopf(q: int, m_range, budget_fn) -> Iterator[HopfQuantumIndex]:
    for mv in m_range:
        for nv in budget_fn(mv):
            yield phi_inverse(nv, mv)


def enum_Z1_forward(q: int, p: int) -> Iterator[HopfQuantumIndex]:
    _check_hopf(q)
    yield from _forward_hopf(q, p)


def enum_Z1(q: int, p: int) -> Iterator[HopfQuantumIndex]:
    """Reversed Z1: sum of m's <= p, then n's bounded by the remaining budget."""
    _check_hopf(q)
    d = 2**q
    nh = d // 2

    def ms():
        for mv in itertools.product(range(p + 1), repeat=nh):
            if sum(mv) <= p:
                yield mv

    def ns(mv):
        def rec(k, used):
            if k == 0:
                yield ()
                return
            for v in range((p - sum(mv) - 2 * used) // 2 + 1):
                for rest in rec(k - 1, used + v):
                    yield rest + (v,)
        yield from rec(nh - 1, 0)

    yield from _reversed_hopf(q, ms(), ns)


def enum_Z2_forward(q: int, p: int, window: int) -> Iterator[HopfQuantumIndex]:
    _check_hopf(q)
    for idx in _forward_hopf(q, window):
        if idx.M_vec[0] <= p and idx.l1 >= p + 1:
            yield idx


def enum_Z2(q: int, p: int, window: int) -> Iterator[HopfQuantumIndex]:
    """Reversed Z2: m_1 <= p, others free; n_1 starts at the floor bound making l_1 >= p+1."""
    _check_hopf(q)
    d = 2**q
    nh = d // 2

    def ms():
        for mv in itertools.product(range(window + 1), repeat=nh):
            if mv[0] <= p and sum(mv) <= window:
                yield mv

    def ns(mv):
        M = sum(mv)
        for rest in itertools.product(range((window - M) // 2 + 1), repeat=nh - 2):
            s = sum(rest)
            lo = max(0, (p - M - 2 * s) // 2 + 1)
            hi = (window - M) // 2 - s
            for n1 in range(lo, hi + 1):
                yield (n1,) + rest

    yield from _reversed_hopf(q, ms(), ns)


def enum_Z3_forward(q: int, p: int, window: int) -> Iterator[HopfQuantumIndex]:
    _check_hopf(q)
    for idx in _forward_hopf(q, window):
        if idx.M_vec[0] >= p + 1:
            yield idx


def enum_Z3(q: int, p: int, window: int) -> Iterator[HopfQuantumIndex]:
    """Reversed Z3: m_1 >= p + 1, all other indices free (windowed by l_1)."""
    _check_hopf(q)
    d = 2**q
    nh = d // 2

    def ms():
        for mv in itertools.product(range(window + 1), repeat=nh):
            if mv[0] >= p + 1 and sum(mv) <= window:
                yield mv

    def ns(mv):
        budget = (window - sum(mv)) // 2
        for nv in itertools.product(range(budget + 1), repeat=nh - 1):
            if sum(nv) <= budget:
                yield nv

    yield from _reversed_hopf(q, ms(), ns)
