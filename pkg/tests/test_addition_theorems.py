import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyharmonic import addition_theorems as at
from polyharmonic import coords as co
from polyharmonic import fundamental as fu
from polyharmonic.special_fn import neumann, q_reduced

T = at.TheoremId
S, H = at.STANDARD, at.HOPF
B, L = at.BINOMIAL, at.LOGARITHMIC
LE, GE = at.M_LE_P, at.M_GE_P1


def geometry(d, seed):
    return at.sample_geometry(d, np.random.default_rng(seed))


def residual(th, p, m, seed, **kw):
    r = at.verify(th, at.Sample(geometry(th.d, seed), p, m), **kw)
    assert r.ok, r.error
    return r.residual_rel


def azimuthal_projection(kernel_of_psi, m, n=256):
    # trapezoid rule is spectrally accurate for smooth periodic integrands
    psi = 2 * np.pi * np.arange(n) / n
    return neumann(m) * float(np.mean(kernel_of_psi(psi) * np.cos(m * psi)))


# ---------------------------------------------------------------------------
# chi side


def test_log_lhs_head_only_at_p0():
    chi, R, Rp = 1.7, 0.8, 1.9
    head = (math.log(R * Rp) + math.log(chi + math.sqrt(chi * chi - 1))) * q_reduced(-0.5, 0.5, chi)
    assert at.lhs_logarithmic(0, 0, chi, R, Rp) == pytest.approx(head, rel=1e-14)


def test_log_lhs_is_bare_q_beyond_p():
    assert at.lhs_logarithmic(1, 3, 2.2, 1.0, 1.0) == at.lhs_binomial(1, 3, 2.2)


@pytest.mark.parametrize("p", range(3))
@pytest.mark.parametrize("d", [4, 6])
def test_fourier_coefficients_by_quadrature(p, d):
    R, Rp, chi = 1.3, 0.7, 1.6
    s2 = lambda psi: 2 * R * Rp * (chi - np.cos(psi))  # noqa: E731
    beta = float(fu.beta_constant(p, d))
    for m in range(p + 4):
        cj = azimuthal_projection(lambda psi: s2(psi) ** p, m)
        cl = azimuthal_projection(lambda psi: s2(psi) ** p * (0.5 * np.log(s2(psi)) - beta), m)
        scale_j = (2 * R * Rp * (chi + 1)) ** p
        scale_l = scale_j * max(1.0, abs(math.log(2 * R * Rp * (chi + 1))) + abs(beta))
        assert abs(at.fourier_coefficient_j(p, m, R, Rp, chi) - cj) <= 1e-12 * scale_j
        assert abs(at.fourier_coefficient_l(p, m, d, R, Rp, chi) - cl) <= 1e-12 * scale_l


def test_lhs_examples_by_quadrature():
    R, Rp, chi = 0.9, 2.1, 1.45
    s2 = lambda psi: 2 * R * Rp * (chi - np.cos(psi))  # noqa: E731
    # binomial (p, m) = (2, 1)
    c = math.sqrt(2 / math.pi) * 2 * (2 * R * Rp) ** 2 * (chi * chi - 1) ** 1.25 * -2 / (1 * 6)
    proj = azimuthal_projection(lambda psi: s2(psi) ** 2, 1)
    assert at.lhs_binomial(2, 1, chi) == pytest.approx(proj / c, rel=1e-12)
    # logarithmic (p, m) = (1, 0), d = 4
    beta = float(fu.beta_constant(1, 4))
    proj = azimuthal_projection(lambda psi: s2(psi) * (0.5 * np.log(s2(psi)) - beta), 0)
    c = 1 / math.sqrt(2 * math.pi) * (2 * R * Rp) * (chi * chi - 1) ** 0.75
    lhs = at.lhs_logarithmic(1, 0, chi, R, Rp) - 2 * beta * at.lhs_binomial(1, 0, chi)
    assert lhs == pytest.approx(proj / c, rel=1e-12)


def test_reduced_phase_constants_from_complex_form():
    mp.mp.dps = 30
    for p, m, chi in [(0, 0, 1.5), (2, 1, 2.3), (1, 3, 1.2)]:
        full = mp.legenq(m - 0.5, p + 0.5, chi, type=3)
        assert abs(full - 1j * (-1) ** p * q_reduced(m - 0.5, p + 0.5, chi)) <= 1e-13 * abs(full)
    for d in (4, 6, 8):
        for p, l, zeta in [(0, 0, 1.3), (1, 2, 2.0), (3, 1, 1.7)]:
            nu, mu = l + (d - 3) / 2, p + (d - 1) / 2
            full = mp.legenq(nu, mu, zeta, type=3)
            assert abs(full - 1j ** (2 * p + d - 1) * q_reduced(nu, mu, zeta)) <= 1e-13 * abs(full)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([4, 6, 8]), st.integers(0, 3))
def test_reduction_identities(seed, d, p):
    geo = geometry(d, seed)
    x, xp = np.array(geo.x), np.array(geo.xp)
    dphi = math.atan2(x[-1], x[-2]) - math.atan2(xp[-1], xp[-2])
    cg = co.cos_gamma(x, xp)
    a = (geo.chi - math.cos(dphi)) ** p
    b = (geo.r * geo.rp / (geo.R * geo.Rp)) ** p * (geo.zeta - cg) ** p
    assert abs(a - b) <= 1e-12 * abs(a)
    la = math.log(2 * geo.R * geo.Rp * (geo.chi - math.cos(dphi)))
    lb = math.log(2 * geo.r * geo.rp * (geo.zeta - cg))
    assert abs(la - lb) <= 1e-12 * max(1.0, abs(la))


# ---------------------------------------------------------------------------
# binomial theorems


def test_standard_binomial_example():
    assert residual(T(S, B, LE, 4), 1, 0, 0) <= 1e-9


def test_hopf_binomial_examples():
    assert residual(T(H, B, LE, 4), 2, 1, 0) <= 1e-9
    assert residual(T(H, B, LE, 8), 1, 0, 0) <= 1e-8


def test_single_term_at_p0():
    r = at.rhs_standard_binomial(0, 0, geometry(4, 3))
    assert r.terms_used == 1
    assert r.value == pytest.approx(at.lhs_binomial(0, 0, geometry(4, 3).chi), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(S, 4), (S, 6), (S, 8), (H, 4), (H, 8)]), st.integers(0, 3),
       st.data())
def test_binomial_theorems_are_exact(seed, fam_d, p, data):
    fam, d = fam_d
    m = data.draw(st.integers(0, p))
    assert residual(T(fam, B, LE, d), p, m, seed) <= 1e-10


@pytest.mark.parametrize("fam", [S, H])
@pytest.mark.parametrize("kind,regime,p,m", [(B, LE, 3, 1), (L, LE, 2, 0), (L, LE, 2, 2), (L, GE, 1, 2)])
def test_d4_closed_forms_match_general(fam, kind, regime, p, m):
    geo = geometry(4, 5)
    a = at.rhs(T(fam, kind, regime, 4), p, m, geo)
    b = at.rhs(T(fam, kind, regime, 4, True), p, m, geo)
    assert np.allclose(a.by_degree, b.by_degree, rtol=1e-11, atol=1e-15 * abs(a.value))


@pytest.mark.parametrize("d", [4, 8])
def test_standard_and_hopf_sides_agree(d):
    geo = geometry(d, 21)
    for kind, regime, p, m in [(B, LE, 2, 1), (L, LE, 1, 0), (L, GE, 0, 2)]:
        a = at.rhs(T(S, kind, regime, d), p, m, geo).value
        b = at.rhs(T(H, kind, regime, d), p, m, geo).value
        assert a == pytest.approx(b, rel=1e-10)


# ---------------------------------------------------------------------------
# logarithmic theorems


@pytest.mark.parametrize("seed", [0, 2])
def test_logarithmic_examples(seed):
    assert residual(T(S, L, LE, 4), 0, 0, seed) <= 1e-7
    assert residual(T(S, L, GE, 4), 1, 2, seed) <= 1e-7
    assert residual(T(H, L, GE, 4), 0, 1, seed) <= 1e-7


def test_logarithmic_window_convergence():
    # a near-grazing sample (chi large, zeta small) converges slowly in the window
    cells = [(T(S, L, LE, 4), 0, 0), (T(S, L, GE, 4), 1, 2), (T(H, L, GE, 4), 0, 1)]
    for th, p, m in cells:
        errs = [residual(th, p, m, 3, window=w) for w in (15, 25, 40)]
        assert errs[0] > errs[1] > errs[2] or errs[2] <= 1e-14
        assert errs[2] <= 1e-13


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(S, 4), (S, 6), (H, 4), (H, 8)]), st.integers(0, 3),
       st.data())
def test_logarithmic_theorems_converge(seed, fam_d, p, data):
    fam, d = fam_d
    m = data.draw(st.integers(0, p + 2))
    th = T(fam, L, LE if m <= p else GE, d)
    assert residual(th, p, m, seed, window=p + 40) <= 1e-9


def test_window_bookkeeping():
    geo = geometry(4, 1)
    r = at.rhs_standard_logarithmic(1, 3, geo, window=20)
    assert r.window == 20 and r.terms_used == 20 - 3 + 1
    r2 = at.rhs_standard_logarithmic(1, 3, geo, window=30)
    assert r2.tail_estimate < r.tail_estimate


# ---------------------------------------------------------------------------
# verification harness


def test_verify_examples():
    r = at.verify(T(S, B, LE, 4), 42)
    assert r.converged and r.residual_rel <= 1e-9
    r = at.verify(T(H, L, LE, 4), 7)
    assert r.residual_rel <= 1e-7
    r = at.verify(T(H, B, LE, 6), 1)
    assert not r.ok and r.error.startswith("DimensionError")


def test_verify_is_deterministic():
    a = at.verify(T(S, L, LE, 6), 11)
    b = at.verify(T(S, L, LE, 6), 11)
    assert a == b


def test_report_residual_definition():
    r = at.verify(T(H, L, GE, 8), 4)
    assert r.residual_rel == abs(r.lhs - r.rhs) / max(abs(r.lhs), 1e-300)
    assert set(r.sample) >= {"p", "m", "d", "chi", "zeta", "x", "xp"}


def test_verify_reports_regime_mismatch():
    r = at.verify(T(S, B, LE, 4), at.Sample(geometry(4, 0), 1, 2))
    assert not r.ok and "DomainError" in r.error


@pytest.mark.parametrize("th", [T("cylindrical", B, LE, 4), T(S, B, GE, 4), T(S, B, LE, 5), T(S, L, LE, 18),
                                T(H, L, LE, 6), T(S, B, LE, 6, True)])
def test_invalid_theorem_ids(th):
    with pytest.raises((ValueError, ArithmeticError)):
        th.validate()
    assert not at.verify(th, 0).ok


def test_theorem_grid():
    ths = at.all_theorems()
    assert len(ths) == len(set(ths)) == 21
    for th in ths:
        th.validate()
    assert {(t.family, t.kind, t.regime) for t in ths} == {
        (f, k, r) for f in (S, H) for k, r in ((B, LE), (L, LE), (L, GE))}
    assert at.regime_m_values(T(S, L, GE, 4), 2) == [3, 4]
    assert at.regime_m_values(T(S, L, LE, 4), 2) == [0, 1, 2]


def test_sampled_geometry_thresholds():
    rng = np.random.default_rng(0)
    for d in (4, 6, 8, 16):
        for _ in range(20):
            g = at.sample_geometry(d, rng)
            assert g.zeta >= 1.2 and g.chi >= 1.2 and g.d == d
