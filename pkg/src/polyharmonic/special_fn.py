"""Scalar special functions and exact combinatorial quantities.

Legendre functions of the second kind are handled in a *reduced phase*:

    q_nu^mu(z) = exp(-i*pi*mu) * Q_nu^mu(z),

which is real for real z > 1.  Every expansion in this package is written in
terms of q, with the complex constants folded into real signs by
:func:`phase_sign`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

import numpy as np

from .errors import DomainError, GammaPoleError, NonConvergent, PolePassedError

# Euler-Mascheroni constant, 30 significant digits.
EULER_GAMMA_STR = "0.577215664901532860606512090082"
EULER_GAMMA = float(EULER_GAMMA_STR)

SQRT_PI = math.sqrt(math.pi)

Rational = Fraction


@dataclass(frozen=True, order=True)
class HalfInt:
    """Exact half-integer stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)):
            raise TypeError("HalfInt.twice must be an integer")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Build from an int, a Fraction or a float that is a multiple of 1/2."""
        if isinstance(value, HalfInt):
            return value
        t = 2 * Fraction(value)
        if t.denominator != 1:
            raise ValueError(f"{value!r} is not a multiple of 1/2")
        return cls(int(t))

    @classmethod
    def half(cls, n: int) -> "HalfInt":
        """The value n + 1/2."""
        return cls(2 * n + 1)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self):
        return self.twice / 2

    def __add__(self, other):
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other):
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __repr__(self):
        if self.is_integer():
            return f"HalfInt({self.twice // 2})"
        return f"HalfInt({self.twice}/2)"


@dataclass(frozen=True)
class SeriesCtl:
    """Stopping rule for infinite series."""

    rel_tol: float = 1e-14
    max_terms: int = 500
    consecutive_small: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1 or self.consecutive_small < 1:
            raise ValueError("max_terms and consecutive_small must be >= 1")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_estimate: float
    converged: bool

    def __float__(self):
        return float(self.value)


# Internal control for the Legendre-Q series: these always converge, but near
# z = 1 with large orders they may need thousands of terms.
_Q_CTL = SeriesCtl(rel_tol=1e-16, max_terms=200_000, consecutive_small=3)


class TailTracker:
    """Applies the SeriesCtl stopping rule to a stream of terms."""

    def __init__(self, ctl: SeriesCtl):
        self.ctl = ctl
        self.total = 0.0
        self.count = 0
        self.small = 0
        self.last = 0.0
        self.prev = 0.0
        self.done = False

    def tail(self) -> float:
        if self.prev == 0.0:
            ratio = 0.0
        else:
            ratio = min(max(abs(self.last / self.prev), 0.0), 0.99)
        return abs(self.last) / (1.0 - ratio)

    def add(self, term: float, bound: float | None = None) -> bool:
        """Add a term; return True once the series is converged.

        ``bound`` optionally replaces |term| in the stopping test, e.g. the
        coefficient magnitude when the term carries an oscillating factor that
        may vanish by accident.
        """
        mag = abs(term) if bound is None else abs(bound)
        self.prev, self.last = self.last, mag
        self.total += term
        self.count += 1
        if mag < self.ctl.rel_tol * abs(self.total) or mag == 0.0:
            self.small += 1
        else:
            self.small = 0
        if self.small >= self.ctl.consecutive_small and self.tail() <= self.ctl.rel_tol * abs(self.total):
            self.done = True
        return self.done

    def result(self) -> SeriesResult:
        return SeriesResult(self.total, self.count, self.tail(), self.done)


# ---------------------------------------------------------------------------
# exact combinatorics

_H_CACHE = [Fraction(0)]


def harmonic_number(n: int) -> Fraction:
    """H_n as an exact rational; zero for n <= 0."""
    n = int(n)
    if n <= 0:
        return Fraction(0)
    while len(_H_CACHE) <= n:
        k = len(_H_CACHE)
        _H_CACHE.append(_H_CACHE[-1] + Fraction(1, k))
    return _H_CACHE[n]


@lru_cache(maxsize=None)
def harmonic(n: int) -> float:
    """H_n as a float (correctly rounded from the exact rational)."""
    return float(harmonic_number(n))


def pochhammer(a, n: int):
    """Rising factorial (a)_n.  Exact for int and Fraction arguments."""
    if n < 0:
        raise ValueError("n must be non-negative")
    exact = isinstance(a, (int, _RationalABC)) and not isinstance(a, bool)
    out = Fraction(1) if exact else 1.0
    for k in range(n):
        out *= a + k
        if out == 0:
            break
    if exact and isinstance(out, Fraction) and out.denominator == 1 and isinstance(a, int):
        return int(out)
    return out


def neumann(n: int) -> int:
    """Neumann factor: 1 for n = 0, otherwise 2."""
    return 1 if n == 0 else 2


@lru_cache(maxsize=None)
def fact_ratio(a: int, b: int) -> float:
    """a!/b! for non-negative integers, without forming huge floats."""
    if a < 0 or b < 0:
        raise GammaPoleError("factorial of a negative integer")
    if a - b > 300 or b - a > 300:
        return math.exp(math.lgamma(a + 1) - math.lgamma(b + 1))
    return math.factorial(a) / math.factorial(b)


@lru_cache(maxsize=None)
def factorial(n: int) -> float:
    """n! as a float; exact (correctly rounded) while it fits."""
    if n < 0:
        raise GammaPoleError(f"factorial of negative integer {n}")
    if n <= 170:
        return float(math.factorial(n))
    return math.inf


@lru_cache(maxsize=None)
def _gamma_half_exact(twice: int) -> Fraction:
    """Gamma(twice/2) / sqrt(pi)**(twice odd) as an exact rational."""
    if twice % 2 == 0:
        n = twice // 2
        if n <= 0:
            raise GammaPoleError(f"Gamma pole at {n}")
        return Fraction(math.factorial(n - 1))
    k = (twice - 1) // 2  # value = k + 1/2
    if k >= 0:
        return Fraction(math.factorial(2 * k), 4**k * math.factorial(k))
    k = -k  # value = 1/2 - k
    return Fraction((-4) ** k * math.factorial(k), math.factorial(2 * k))


def gamma_half(twice: int) -> float:
    """Gamma at a half-integer or integer argument twice/2, evaluated exactly."""
    if abs(twice) > 340:
        lg, s = log_gamma_signed(twice / 2)
        return s * math.exp(lg)
    g = float(_gamma_half_exact(twice))
    return g * SQRT_PI if twice % 2 else g


def log_gamma_signed(x: float) -> tuple[float, int]:
    """(log|Gamma(x)|, sign Gamma(x)); raises on poles."""
    if x <= 0 and float(x).is_integer():
        raise GammaPoleError(f"Gamma pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    # reflection keeps the sign exact
    sign = 1 if math.floor(x) % 2 == 0 else -1
    return math.lgamma(x), sign


def gamma(x: float) -> float:
    """Gamma, using the exact route at half-integers."""
    t = 2 * x
    if float(t).is_integer() and abs(t) <= 340:
        return gamma_half(int(t))
    if x <= 0 and float(x).is_integer():
        raise GammaPoleError(f"Gamma pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        lg, s = log_gamma_signed(x)
        return s * math.exp(lg)


def phase_sign(i_power: int, twice_mu: int) -> int:
    """Real value of i**i_power * exp(i*pi*mu) with mu = twice_mu/2.

    Converts a constant multiplying Q_nu^mu into the constant multiplying the
    reduced function q_nu^mu.  Raises if the product is not real.
    """
    k = (i_power + twice_mu) % 4
    if k % 2:
        raise ValueError("phase does not reduce to a real sign")
    return 1 if k == 0 else -1


# ---------------------------------------------------------------------------
# Gauss hypergeometric series


def _nonpos_int(a: float) -> bool:
    return float(a).is_integer() and a <= 0


def gauss_2f1(a: float, b: float, c: float, w: float, ctl: SeriesCtl | None = None) -> SeriesResult:
    """Partial sums of 2F1(a, b; c; w), exact when the series terminates."""
    ctl = ctl or SeriesCtl()
    terminating = _nonpos_int(a) or _nonpos_int(b)
    if not terminating and abs(w) >= 1:
        raise NonConvergent(f"2F1 series diverges at w={w}")
    term = 1.0
    if terminating:
        nterm = int(-max(a if _nonpos_int(a) else -math.inf, b if _nonpos_int(b) else -math.inf))
        total = 1.0
        for n in range(nterm):
            if c + n == 0:
                raise PolePassedError(f"(c)_n vanishes at n={n} before termination")
            term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * w
            total += term
        return SeriesResult(total, nterm + 1, 0.0, True)
    tr = TailTracker(ctl)
    tr.add(term)
    n = 0
    while tr.count < ctl.max_terms:
        if c + n == 0:
            raise PolePassedError(f"(c)_n vanishes at n={n}")
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * w
        n += 1
        if tr.add(term):
            break
    return tr.result()


# ---------------------------------------------------------------------------
# Legendre functions of the second kind, reduced phase


def _as_float(v) -> float:
    return float(v) if not isinstance(v, HalfInt) else v.twice / 2


@lru_cache(maxsize=200_000)
def _q_series(nu: float, mu: float, z: float) -> SeriesResult:
    if not z > 1:
        raise DomainError(f"q requires z > 1, got {z}")
    if _nonpos_int(nu + 1.5):
        raise GammaPoleError(f"degree {nu} puts Gamma(nu+3/2) on a pole")
    if _nonpos_int(nu + mu + 1):
        raise GammaPoleError(f"Gamma(nu+mu+1) has a pole at nu={nu}, mu={mu}")
    zm1 = (z - 1.0) * (z + 1.0)
    w = 1.0 / (z * z)
    f = gauss_2f1((nu + mu + 1) / 2, (nu + mu + 2) / 2, nu + 1.5, w, _Q_CTL)
    pre = None
    try:
        pre = SQRT_PI * gamma(nu + mu + 1) / gamma(nu + 1.5)
        pre *= zm1 ** (mu / 2) / (2.0 ** (nu + 1) * z ** (nu + mu + 1))
    except (OverflowError, ZeroDivisionError):
        pre = None
    if pre is None or not math.isfinite(pre) or pre == 0.0:
        lg1, s1 = log_gamma_signed(nu + mu + 1)
        lg2, s2 = log_gamma_signed(nu + 1.5)
        lp = 0.5 * math.log(math.pi) + lg1 - lg2 + (mu / 2) * math.log(zm1)
        lp -= (nu + 1) * math.log(2.0) + (nu + mu + 1) * math.log(z)
        pre = s1 * s2 * math.exp(lp)
    return SeriesResult(pre * f.value, f.terms_used, abs(pre) * f.tail_estimate, f.converged)


def legendre_q_reduced(nu, mu, z: float, ctl: SeriesCtl | None = None) -> SeriesResult:
    """Reduced Legendre function q_nu^mu(z) = exp(-i pi mu) Q_nu^mu(z) for z > 1.

    Uses the 2F1 representation in 1/z**2.  ``nu`` and ``mu`` are normally
    :class:`HalfInt`; plain floats are accepted for non-half-integer orders.
    """
    nu_f, mu_f, z = _as_float(nu), _as_float(mu), float(z)
    if ctl is None:
        return _q_series(nu_f, mu_f, z)
    if not z > 1:
        raise DomainError(f"q requires z > 1, got {z}")
    base = _q_series(nu_f, mu_f, z)
    f = gauss_2f1((nu_f + mu_f + 1) / 2, (nu_f + mu_f + 2) / 2, nu_f + 1.5, 1.0 / (z * z), ctl)
    scale = base.value / _q_series_f(nu_f, mu_f, z) if base.value else 0.0
    return SeriesResult(scale * f.value, f.terms_used, abs(scale) * f.tail_estimate, f.converged)


@lru_cache(maxsize=200_000)
def _q_series_f(nu: float, mu: float, z: float) -> float:
    return gauss_2f1((nu + mu + 1) / 2, (nu + mu + 2) / 2, nu + 1.5, 1.0 / (z * z), _Q_CTL).value


def q_reduced(nu, mu, z: float) -> float:
    """Fast cached value of q_nu^mu(z); raises NonConvergent if the series fails."""
    r = _q_series(_as_float(nu), _as_float(mu), float(z))
    if not r.converged:
        raise NonConvergent(f"q series failed for nu={nu}, mu={mu}, z={z}")
    return r.value


def qh(n2: int, m2: int, z: float) -> float:
    """q with degree n2/2 and order m2/2 given as twice-values."""
    return q_reduced(n2 / 2, m2 / 2, z)


def legendre_q_reflect_order(nu, mu, z: float) -> float:
    """q_nu^{-mu}(z) through Gamma(nu-mu+1)/Gamma(nu+mu+1) * q_nu^mu(z)."""
    nu_f, mu_f = _as_float(nu), _as_float(mu)
    if not z > 1:
        raise DomainError(f"q requires z > 1, got {z}")
    if mu_f == 0:
        return q_reduced(nu_f, 0.0, z)
    return gamma(nu_f - mu_f + 1) / gamma(nu_f + mu_f + 1) * q_reduced(nu_f, mu_f, z)


# ---------------------------------------------------------------------------
# Legendre functions of the first kind off the cut


def legendre_p_firstkind(nu: float, m: int, z: float, ctl: SeriesCtl | None = None) -> SeriesResult:
    """P_nu^m(z) for z > 1 and integer order m (negative m allowed).

    Integer-order limit of the 2F1 definition in (1 - z)/2.  The series
    terminates for integer nu, so any z > 1 works there; otherwise |1 - z| < 2
    is required.
    """
    ctl = ctl or SeriesCtl()
    if not z > 1:
        raise DomainError(f"P requires z > 1, got {z}")
    m = int(m)
    nu = float(nu)
    x = (1.0 - z) / 2
    integer_degree = nu.is_integer()
    if not integer_degree and abs(1 - z) >= 2:
        raise DomainError("direct series needs |1 - z| < 2 for non-integer degree")
    if m >= 0:
        coef = pochhammer(-nu, m) * pochhammer(nu + 1, m)
        if coef == 0:
            return SeriesResult(0.0, 1, 0.0, True)
        coef *= (-1) ** m * ((z - 1) * (z + 1)) ** (m / 2) / (2.0**m * factorial(m))
        f = gauss_2f1(m - nu, m + nu + 1, m + 1, x, ctl)
    else:
        k = -m
        coef = ((z - 1) / (z + 1)) ** (k / 2) / factorial(k)
        f = gauss_2f1(-nu, nu + 1, 1 + k, x, ctl)
    return SeriesResult(coef * f.value, f.terms_used, abs(coef) * f.tail_estimate, f.converged)


def legendre_p(nu: float, m: int, z: float) -> float:
    r = legendre_p_firstkind(nu, m, z, _Q_CTL)
    if not r.converged:
        raise NonConvergent(f"P series failed for nu={nu}, m={m}, z={z}")
    return r.value


def whipple_q(nu, mu, z: float) -> float:
    """q_nu^mu(z) from P_{-mu-1/2}^{-nu-1/2}(z/sqrt(z^2-1)).

    Requires nu + 1/2 to be an integer so that the P order is integral.
    """
    nu_h, mu_h = HalfInt.of(nu), HalfInt.of(mu)
    if nu_h.is_integer():
        raise DomainError("whipple_q needs a half-odd degree")
    s = math.sqrt((z - 1) * (z + 1))
    order = -(nu_h.twice + 1) // 2
    degree = -(mu_h.twice + 1) / 2
    p = legendre_p(degree, order, z / s)
    return math.sqrt(math.pi / 2) * gamma((nu_h.twice + mu_h.twice) / 2 + 1) / math.sqrt(s) * p


def whipple_p(nu: float, m: int, z: float) -> float:
    """P_nu^m(z) from q_{m-1/2}^{nu+1/2}(z/sqrt(z^2-1))."""
    if _nonpos_int(nu - m + 1):
        return 0.0
    s = math.sqrt((z - 1) * (z + 1))
    return math.sqrt(2 / math.pi) / math.sqrt(s) * q_reduced(m - 0.5, nu + 0.5, z / s) / gamma(nu - m + 1)


# ---------------------------------------------------------------------------
# orthogonal polynomials (accept scalars or numpy arrays)


def _binom_real(a: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


def ferrers_p(n: int, m: int, x):
    """Ferrers function of the first kind P_n^m(x) on (-1, 1), 0 <= m <= n."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) >= 1):
        raise DomainError("Ferrers function needs |x| < 1")
    if not 0 <= m <= n:
        raise DomainError("need 0 <= m <= n")
    # upward recurrence in degree from P_m^m; the terminating 2F1 cancels badly for large n
    pmm = np.full_like(xa, (-1.0) ** m * math.prod(range(1, 2 * m, 2))) * (1 - xa * xa) ** (m / 2)
    if n == m:
        out = pmm
    else:
        prev, out = pmm, (2 * m + 1) * xa * pmm
        for k in range(m + 1, n):
            prev, out = out, ((2 * k + 1) * xa * out - (k + m) * prev) / (k - m + 1)
    return out if np.ndim(x) else float(out)


def _check_geg_order(mu: float):
    if not mu > -0.5 or mu == 0:
        raise DomainError(f"Gegenbauer order must be > -1/2 and nonzero, got {mu}")


def gegenbauer(n: int, mu: float, x):
    """C_n^mu(x) by the three-term recurrence."""
    _check_geg_order(mu)
    xa = np.asarray(x, dtype=float)
    c0 = np.ones_like(xa)
    if n == 0:
        return c0 if np.ndim(x) else 1.0
    c1 = 2 * mu * xa
    for k in range(2, n + 1):
        c0, c1 = c1, (2 * xa * (k + mu - 1) * c1 - (k + 2 * mu - 2) * c0) / k
    return c1 if np.ndim(x) else float(c1)


def gegenbauer_hyp(n: int, mu: float, x):
    """C_n^mu(x) from the terminating 2F1 in (1 - x)/2.

    The sum alternates with large terms, so it is accumulated exactly in
    rationals (floats convert to Fraction without loss) and rounded once.
    """
    _check_geg_order(mu)
    m = Fraction(mu)

    def one(xv: float) -> float:
        t = (1 - Fraction(xv)) / 2
        term = total = Fraction(1)
        for k in range(n):
            term = term * (k - n) * (n + 2 * m + k) / ((m + Fraction(1, 2) + k) * (k + 1)) * t
            total += term
        return float(pochhammer(2 * m, n) / math.factorial(n) * total)

    if np.ndim(x):
        xa = np.asarray(x, dtype=float)
        return np.vectorize(one, otypes=[float])(xa)
    return one(float(x))


def gegenbauer_table(nmax: int, mu: float, x) -> np.ndarray:
    """Array of C_0^mu(x) .. C_nmax^mu(x) along the first axis."""
    xa = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + xa.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2 * mu * xa
    for k in range(2, nmax + 1):
        out[k] = (2 * xa * (k + mu - 1) * out[k - 1] - (k + 2 * mu - 2) * out[k - 2]) / k
    return out


def chebyshev_t(n: int, x):
    xa = np.asarray(x, dtype=float)
    t0 = np.ones_like(xa)
    if n == 0:
        return t0 if np.ndim(x) else 1.0
    t1 = xa.copy()
    for _ in range(2, n + 1):
        t0, t1 = t1, 2 * xa * t1 - t0
    return t1 if np.ndim(x) else float(t1)


def chebyshev_u(n: int, x):
    return gegenbauer(n, 1.0, x)


def jacobi_p_all(nmax: int, alpha: float, beta: float, x) -> list:
    """[P_0, ..., P_nmax] for alpha, beta > -1 by the three-term recurrence."""
    if not (alpha > -1 and beta > -1):
        raise DomainError("the recurrence needs alpha, beta > -1")
    xa = np.asarray(x, dtype=float)
    out = [np.ones_like(xa)]
    if nmax >= 1:
        out.append((alpha + 1) + (alpha + beta + 2) * (xa - 1) / 2)
    ab, d2 = alpha + beta, alpha * alpha - beta * beta
    for k in range(2, nmax + 1):
        c = 2 * k + ab
        out.append(((c - 1) * (c * (c - 2) * xa + d2) * out[-1]
                    - 2 * (k + alpha - 1) * (k + beta - 1) * c * out[-2]) / (2 * k * (k + ab) * (c - 2)))
    if not np.ndim(x):
        out = [float(v) for v in out]
    return out


def jacobi_p(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial P_n^(alpha,beta)(x).

    Uses the three-term recurrence for alpha, beta > -1.  Other parameters
    (negative integers included) fall back to the finite binomial sum, which
    is fine for low degree but cancels badly for large n.
    """
    if alpha > -1 and beta > -1:
        return jacobi_p_all(n, alpha, beta, x)[n]
    xa = np.asarray(x, dtype=float)
    a = (xa - 1) / 2
    b = (xa + 1) / 2
    total = np.zeros_like(xa)
    for s in range(n + 1):
        total = total + _binom_real(n + alpha, n - s) * _binom_real(n + beta, s) * a**s * b ** (n - s)
    return total if np.ndim(x) else float(total)


# ---------------------------------------------------------------------------
# degree derivatives


def _ratio(num: int, den: int) -> float:
    return float(Fraction(num, den))


def dnu_legendre_p_at_int(p: int, m: int, z: float) -> float:
    """d/dnu P_nu^m(z) at nu = p, for z > 1."""
    if not z > 1:
        raise DomainError("z must exceed 1")
    f = math.factorial
    if m >= p + 1:
        return (-1) ** (p + m + 1) * f(p + m) * f(m - p - 1) * legendre_p(p, -m, z)
    head = math.log((z + 1) / 2) + 2 * harmonic(2 * p) - harmonic(p) - harmonic(p - m)
    out = head * legendre_p(p, m, z)
    s = 0.0
    for k in range(p - m):
        bracket = 1 + _ratio(f(k) * f(p + m), f(k + 2 * m) * f(p - m))
        s += (-1) ** k * (2 * k + 2 * m + 1) * bracket / ((p - m - k) * (p + m + k + 1)) * legendre_p(k + m, m, z)
    out += (-1) ** (p + m) * s
    s = 0.0
    for k in range(m):
        s += (-1) ** k * (2 * k + 1) / ((p - k) * (p + k + 1)) * legendre_p(k, -m, z)
    out += (-1) ** p * _ratio(f(p + m), f(p - m)) * s
    return out


def dnu_legendre_q_halforder_at_int(p: int, m: int, z: float, companion: bool = False) -> float:
    """Degree derivative of a half-order Legendre function at an integer.

    Default: d/dnu q_{m-1/2}^{nu+1/2}(z) at nu = p (reduced phase, 0 <= m <= p).
    With ``companion=True``: d/dnu P_nu^m(z/sqrt(z^2-1)) at nu = p expressed
    through q functions of z; this variant also covers m >= p + 1.
    """
    if not z > 1:
        raise DomainError("z must exceed 1")
    f = math.factorial
    s = math.sqrt((z - 1) * (z + 1))
    lg = math.log((z + s) / (2 * s))
    q = lambda k2: q_reduced(m - 0.5, k2 / 2, z)  # noqa: E731
    if companion:
        pre = math.sqrt(2 / math.pi) * math.sqrt(s)
        if m >= p + 1:
            return pre * (-1) ** (m + p + 1) * f(m - p - 1) * q(2 * p + 1)
        out = (lg + 2 * harmonic(2 * p) - harmonic(p) - harmonic(p - m)) / f(p - m) * q(2 * p + 1)
        for k in range(p - m):
            bracket = 1 + _ratio(f(k) * f(p + m), f(k + 2 * m) * f(p - m))
            out += (-1) ** (p + k + m) * (2 * k + 2 * m + 1) * bracket / (
                f(k) * (p - m - k) * (p + m + k + 1)) * q(2 * (k + m) + 1)
        acc = 0.0
        for k in range(m):
            acc += (-1) ** (p + k) * (2 * k + 1) / (f(k + m) * (p - k) * (p + k + 1)) * q(2 * k + 1)
        out += _ratio(f(p + m), f(p - m)) * acc
        return pre * out
    if m > p:
        raise DomainError("the half-order derivative formula needs m <= p")
    out = (2 * harmonic(2 * p) - harmonic(p) - EULER_GAMMA + lg) * q(2 * p + 1)
    acc = 0.0
    for k in range(p - m):
        bracket = 1 + _ratio(f(k) * f(p + m), f(k + 2 * m) * f(p - m))
        acc += (-1) ** (k + m - p) * (2 * k + 2 * m + 1) * bracket / (
            f(k) * (p - m - k) * (p + m + k + 1)) * q(2 * (k + m) + 1)
    out += f(p - m) * acc
    acc = 0.0
    for k in range(m):
        acc += (-1) ** (k - p) * (2 * k + 1) / (f(k + m) * (p - k) * (p + k + 1)) * q(2 * k + 1)
    out += f(p + m) * acc
    return out
