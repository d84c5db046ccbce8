"""Chebyshev and Gegenbauer expansions of (z - x)^p and (z - x)^p log(z - x).

All coefficients depend on z only and are built from reduced Legendre
functions q of half-integer degree and order.  Each expansion returns the
evaluated series together with a :class:`CoefficientTable`, whose entries
are the coefficients of T_n(x) (or C_n^mu(x)) in the full expansion, so the
table alone reproduces the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import DomainError, NonConvergent
from .special_fn import (
    SeriesCtl,
    SeriesResult,
    TailTracker,
    fact_ratio,
    gamma,
    harmonic,
    neumann,
    q_reduced,
)

SQRT_2_PI = math.sqrt(2 / math.pi)


@dataclass(frozen=True)
class ExpansionPoint:
    """Evaluation point for the kernels: z > 1 and x in (-1, 1)."""

    z: float
    x: float

    def __post_init__(self):
        if not self.z > 1:
            raise DomainError(f"z must exceed 1, got {self.z}")
        if not -1 < self.x < 1:
            raise DomainError(f"x must lie in (-1, 1), got {self.x}")

    @property
    def s(self) -> float:
        return math.sqrt((self.z - 1) * (self.z + 1))


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients a_n of sum_n a_n B_n(x), B = T_n or C_n^mu.

    ``truncated_at`` is None for a complete (finite) expansion, otherwise the
    last index that was summed.
    """

    entries: tuple
    kind: str
    mu: float | None = None
    truncated_at: int | None = None
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = [n for n, _ in self.entries]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        object.__setattr__(self, "_index", dict(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n: int) -> float:
        return self._index.get(n, 0.0)

    @property
    def is_finite(self) -> bool:
        return self.truncated_at is None

    def evaluate(self, x: float) -> float:
        """Resum the table at x."""
        nmax = self.entries[-1][0] if self.entries else 0
        basis = _basis_stream(self.kind, self.mu, x)
        out = 0.0
        for n in range(nmax + 1):
            b = next(basis)
            out += self._index.get(n, 0.0) * b
        return out


def _basis_stream(kind: str, mu: float | None, x: float) -> Iterator[float]:
    """Successive T_n(x) or C_n^mu(x), n = 0, 1, ..."""
    if kind == "chebyshev":
        a, b = 1.0, x
        yield a
        while True:
            yield b
            a, b = b, 2 * x * b - a
    else:
        a, b = 1.0, 2 * mu * x
        yield a
        n = 2
        while True:
            yield b
            a, b = b, (2 * x * (n + mu - 1) * b - (n + 2 * mu - 2) * a) / n
            n += 1


def _basis_sup(kind: str, mu: float | None, n: int) -> float:
    # max over [-1, 1] of |B_n|
    if kind == "chebyshev":
        return 1.0
    # C_n^mu(1) = (2 mu)_n / n!, as a running product so large n cannot overflow
    out = 1.0
    for i in range(n):
        out *= (2 * mu + i) / (i + 1)
    return abs(out)


def _sum_table(
    finite: list[float],
    kind: str,
    mu: float | None,
    x: float,
    tail_coef: Callable[[int], float] | None = None,
    ctl: SeriesCtl | None = None,
) -> tuple[SeriesResult, CoefficientTable]:
    basis = _basis_stream(kind, mu, x)
    total = 0.0
    entries = []
    for n, c in enumerate(finite):
        total += c * next(basis)
        entries.append((n, c))
    if tail_coef is None:
        return SeriesResult(total, len(finite), 0.0, True), CoefficientTable(tuple(entries), kind, mu)
    ctl = ctl or SeriesCtl()
    tr = TailTracker(ctl)
    tr.total = total
    n = len(finite)
    sup_scale = _basis_sup(kind, mu, n)
    while tr.count < ctl.max_terms:
        c = tail_coef(n)
        b = next(basis)
        if kind == "gegenbauer" and n > len(finite):
            # track |c| * sup|C_n| via the ratio of successive sups
            sup_scale *= (2 * mu + n - 1) / n
        entries.append((n, c))
        if tr.add(c * b, bound=abs(c) * sup_scale):
            break
        n += 1
    res = tr.result()
    if not res.converged:
        raise NonConvergent(f"tail did not converge within {ctl.max_terms} terms")
    return res, CoefficientTable(tuple(entries), kind, mu, truncated_at=n)


# ---------------------------------------------------------------------------
# Chebyshev


def _binomial_chebyshev_coeffs(p: int, z: float) -> list[float]:
    pre = SQRT_2_PI * math.factorial(p) * ((z - 1) * (z + 1)) ** (p / 2 + 0.25)
    out = []
    for n in range(p + 1):
        c = (-1) ** n * neumann(n) / (math.factorial(p - n) * math.factorial(p + n))
        out.append(pre * c * q_reduced(n - 0.5, p + 0.5, z))
    return out


def binomial_chebyshev(pt: ExpansionPoint, p: int) -> tuple[SeriesResult, CoefficientTable]:
    """(z - x)^p as a finite Chebyshev sum with p + 1 terms."""
    if p < 0:
        raise DomainError("p must be non-negative")
    return _sum_table(_binomial_chebyshev_coeffs(p, pt.z), "chebyshev", None, pt.x)


def _log_chebyshev_parts(p: int, z: float):
    zz = (z - 1) * (z + 1)
    s = math.sqrt(zz)
    f = math.factorial
    pre = SQRT_2_PI * zz ** (p / 2 + 0.25) * f(p)
    head = math.log((z + s) / 2) + 2 * harmonic(2 * p)
    binom = _binomial_chebyshev_coeffs(p, z)
    out = []
    for n in range(p + 1):
        qn = lambda k2: q_reduced(n - 0.5, k2 / 2, z)  # noqa: E731
        c = head * binom[n]
        eps = neumann(n)
        c -= pre * eps * (-1) ** n / (f(p - n) * f(p + n)) * (harmonic(p + n) + harmonic(p - n)) * qn(2 * p + 1)
        acc = 0.0
        for k in range(p - n):
            br = 1 + f(k) * f(p + n) / (f(2 * n + k) * f(p - n))
            acc += (-1) ** (p + n + k) * (2 * n + 2 * k + 1) * br / (f(k) * (p - n - k) * (p + n + k + 1)) * qn(2 * (n + k) + 1)
        c += pre * eps * (-1) ** n / f(p + n) * acc
        acc = 0.0
        for k in range(n):
            acc += (-1) ** (p + k) * (2 * k + 1) / (f(n + k) * (p - k) * (p + k + 1)) * qn(2 * k + 1)
        c += 2 * pre * (-1) ** n / f(p - n) * acc
        out.append(c)

    def tail(n: int) -> float:
        return 2 * pre * (-1) ** (p + 1) * fact_ratio(n - p - 1, p + n) * q_reduced(n - 0.5, p + 0.5, z)

    return out, tail


def log_chebyshev(pt: ExpansionPoint, p: int, ctl: SeriesCtl | None = None) -> tuple[SeriesResult, CoefficientTable]:
    """(z - x)^p log(z - x) as an infinite Chebyshev series."""
    if p < 0:
        raise DomainError("p must be non-negative")
    finite, tail = _log_chebyshev_parts(p, pt.z)
    return _sum_table(finite, "chebyshev", None, pt.x, tail, ctl)


def log_chebyshev_p0(pt: ExpansionPoint, ctl: SeriesCtl | None = None) -> tuple[SeriesResult, CoefficientTable]:
    """log(z - x) = log(rho/2) - 2 sum_{n>=1} T_n(x)/(n rho^n), rho = z + sqrt(z^2 - 1)."""
    rho = pt.z + pt.s
    return _sum_table([math.log(rho / 2)], "chebyshev", None, pt.x, lambda n: -2 / (n * rho**n), ctl)


# ---------------------------------------------------------------------------
# Gegenbauer


def _check_mu(mu: float):
    if not mu > -0.5 or mu == 0:
        raise DomainError(f"mu must be > -1/2 and nonzero, got {mu}")


def _binomial_gegenbauer_coeffs(p: int, mu: float, z: float) -> list[float]:
    zz = (z - 1) * (z + 1)
    pre = 2 ** (mu + 0.5) / math.sqrt(math.pi) * gamma(mu) * math.factorial(p) * zz ** ((p + mu) / 2 + 0.25)
    out = []
    for n in range(p + 1):
        c = (-1) ** n * (n + mu) / (math.factorial(p - n) * gamma(n + p + 2 * mu + 1))
        out.append(pre * c * q_reduced(n + mu - 0.5, p + mu + 0.5, z))
    return out


def binomial_gegenbauer(pt: ExpansionPoint, p: int, mu: float) -> tuple[SeriesResult, CoefficientTable]:
    """(z - x)^p as a finite sum of C_n^mu(x), n <= p."""
    _check_mu(mu)
    if p < 0:
        raise DomainError("p must be non-negative")
    return _sum_table(_binomial_gegenbauer_coeffs(p, mu, pt.z), "gegenbauer", mu, pt.x)


def _log_gegenbauer_parts(p: int, mu: int, z: float):
    zz = (z - 1) * (z + 1)
    s = math.sqrt(zz)
    f = math.factorial
    pre = 2 ** (mu + 0.5) / math.sqrt(math.pi) * f(p) * f(mu - 1) * zz ** ((p + mu) / 2 + 0.25)
    head = math.log((z + s) / 2) + 2 * harmonic(2 * p + 2 * mu) + harmonic(p) - harmonic(p + mu)
    binom = _binomial_gegenbauer_coeffs(p, mu, z)
    out = []
    for n in range(p + 1):
        qn = lambda k2: q_reduced(n + mu - 0.5, k2 / 2, z)  # noqa: E731
        w = pre * (n + mu) * (-1) ** n
        c = head * binom[n]
        c -= w / (f(p - n) * f(p + n + 2 * mu)) * (harmonic(p + n + 2 * mu) + harmonic(p - n)) * qn(2 * (p + mu) + 1)
        acc = 0.0
        for k in range(p - n):
            br = 1 + f(k) * f(p + n + 2 * mu) / (f(k + 2 * n + 2 * mu) * f(p - n))
            acc += (-1) ** (p + k + n) * (2 * n + 2 * k + 2 * mu + 1) * br / (
                f(k) * (p - n - k) * (p + n + k + 2 * mu + 1)) * qn(2 * (k + n + mu) + 1)
        c += w / f(p + n + 2 * mu) * acc
        acc = 0.0
        for k in range(n + mu):
            acc += (-1) ** (p + mu + k) * (2 * k + 1) / (f(n + k + mu) * (p + mu - k) * (p + k + mu + 1)) * qn(2 * k + 1)
        c += w / f(p - n) * acc
        out.append(c)

    def tail(n: int) -> float:
        return pre * (-1) ** (p + 1) * (n + mu) * fact_ratio(n - p - 1, p + n + 2 * mu) * q_reduced(
            n + mu - 0.5, p + mu + 0.5, z)

    return out, tail


def _check_int_mu(mu) -> int:
    if isinstance(mu, float) and mu.is_integer():
        mu = int(mu)
    if not isinstance(mu, int) or mu < 1:
        raise DomainError(f"the logarithmic Gegenbauer expansion needs integer mu >= 1, got {mu}")
    return mu


def log_gegenbauer(pt: ExpansionPoint, p: int, mu: int, ctl: SeriesCtl | None = None) -> tuple[SeriesResult, CoefficientTable]:
    """(z - x)^p log(z - x) as an infinite series in C_n^mu(x), integer mu >= 1."""
    mu = _check_int_mu(mu)
    if p < 0:
        raise DomainError("p must be non-negative")
    finite, tail = _log_gegenbauer_parts(p, mu, pt.z)
    return _sum_table(finite, "gegenbauer", mu, pt.x, tail, ctl)


def log_gegenbauer_p0(pt: ExpansionPoint, m: int, ctl: SeriesCtl | None = None) -> tuple[SeriesResult, CoefficientTable]:
    """log(z - x) in C_n^m(x): constant term plus a single infinite sum."""
    m = _check_int_mu(m)
    z = pt.z
    zz = (z - 1) * (z + 1)
    f = math.factorial
    pre = 2 ** (m + 0.5) / math.sqrt(math.pi) * zz ** (m / 2 + 0.25)
    c0 = math.log((z + pt.s) / 2) + harmonic(2 * m) - harmonic(m)
    for k in range(m):
        c0 += (-1) ** (m + k) * pre * f(m) * (2 * k + 1) / (f(k + m) * (m - k) * (k + m + 1)) * q_reduced(m - 0.5, k + 0.5, z)

    def tail(n: int) -> float:
        return -pre * f(m - 1) * (n + m) * fact_ratio(n - 1, 2 * m + n) * q_reduced(n + m - 0.5, m + 0.5, z)

    return _sum_table([c0], "gegenbauer", m, pt.x, tail, ctl)


def log_chebyshev_u(pt: ExpansionPoint, ctl: SeriesCtl | None = None) -> tuple[SeriesResult, CoefficientTable]:
    """log(z - x) in U_n(x) = C_n^1(x), fully elementary coefficients."""
    z, s = pt.z, pt.s
    rho = z + s
    c0 = math.log(rho / 2) + 0.5 - s / rho

    def tail(n: int) -> float:
        return -2 / (n * (n + 2)) * (z + (n + 1) * s) / rho ** (n + 1)

    return _sum_table([c0], "gegenbauer", 1, pt.x, tail, ctl)
