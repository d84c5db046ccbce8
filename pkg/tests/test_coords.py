import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyharmonic import coords as co
from polyharmonic import special_fn as sf
from polyharmonic.errors import DimensionError, QuantumIndexError, ZeroRadius

seeds = st.integers(0, 2**32 - 1)


def rand_vec(d, rng):
    return rng.normal(size=d) * rng.uniform(0.5, 2.0)


# ---------------------------------------------------------------------------
# conversions


def test_standard_zero_angles_on_first_axis():
    pt = co.PolyPoint(co.STANDARD, 2.5, (0.0, 0.0, 0.0, 0.0, 0.0), 6)
    assert np.allclose(pt.to_cartesian(), [2.5, 0, 0, 0, 0, 0])


def test_hopf_d4_layout():
    r, t, f2, f1 = 1.7, 0.4, 0.9, -2.1
    # angles are stored in node order: node 1, then leaves 2 and 3 (phi_2, phi_1)
    pt = co.PolyPoint(co.HOPF, r, (t, f2, f1), 4)
    expect = [r * math.cos(t) * math.cos(f2), r * math.cos(t) * math.sin(f2),
              r * math.sin(t) * math.cos(f1), r * math.sin(t) * math.sin(f1)]
    assert np.allclose(pt.to_cartesian(), expect, rtol=1e-15, atol=1e-15)
    assert pt.azimuth(1) == f1 and pt.azimuth(2) == f2


def test_hopf_dimension_error():
    with pytest.raises(DimensionError):
        co.cartesian_to_hopf(np.ones(6))
    with pytest.raises(DimensionError):
        co.PolyPoint(co.HOPF, 1.0, (0.1,) * 5, 6)


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([4, 6, 8, 16]))
def test_round_trip_and_norm(seed, d):
    rng = np.random.default_rng(seed)
    x = rand_vec(d, rng)
    systems = [co.STANDARD] + ([co.HOPF] if d in (4, 8, 16) else [])
    for system in systems:
        pt = co.PolyPoint.from_cartesian(x, system)
        y = pt.to_cartesian()
        assert np.allclose(y, x, rtol=0, atol=1e-12 * np.linalg.norm(x))
        assert abs(np.linalg.norm(y) - pt.r) <= 1e-13 * pt.r
        back = co.PolyPoint.from_cartesian(y, system)
        assert np.allclose(back.angles, pt.angles, atol=1e-12)


def test_cos_gamma_examples():
    x = np.array([0.3, -0.2, 1.1, 0.5])
    assert co.cos_gamma(x, x) == pytest.approx(1.0)
    assert co.cos_gamma(x, -2 * x) == pytest.approx(-1.0)
    with pytest.raises(ZeroRadius):
        co.cos_gamma(np.zeros(4), x)


@pytest.mark.parametrize("d", [4, 8, 16])
def test_cos_gamma_hopf_recursion(d):
    rng = np.random.default_rng(d)
    for _ in range(200):
        x, xp = rand_vec(d, rng), rand_vec(d, rng)
        a = co.cos_gamma_hopf(co.cartesian_to_hopf(x), co.cartesian_to_hopf(xp))
        assert abs(a - co.cos_gamma(x, xp)) <= 1e-13


# ---------------------------------------------------------------------------
# harmonic factors


def gl(n=64):
    t, w = np.polynomial.legendre.leggauss(n)
    return t, w


def test_theta_factor_constant_normalized():
    t, w = gl()
    th = (t + 1) * math.pi / 2
    v = co.theta_factor(1, 4, 0, 0, th)
    assert np.sum(w * math.pi / 2 * v**2 * np.sin(th) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d,j", [(4, 1), (4, 2), (6, 2), (8, 3)])
def test_theta_factor_orthonormal(d, j):
    t, w = gl()
    th = (t + 1) * math.pi / 2
    wt = w * math.pi / 2 * np.sin(th) ** (d - j - 1)
    lj1 = 1
    for a in range(lj1, 5):
        for b in range(lj1, 5):
            v = np.sum(wt * co.theta_factor(j, d, a, lj1, th) * co.theta_factor(j, d, b, lj1, th))
            assert v == pytest.approx(1.0 if a == b else 0.0, abs=1e-10)


def test_theta_factor_proportional_to_ferrers():
    # last factor (j = d - 2) is a multiple of the Ferrers function P_l^m(cos theta)
    d, l, m = 4, 4, 2
    ths = np.linspace(0.2, 2.9, 7)
    ratio = [co.theta_factor(d - 2, d, l, m, t) / sf.ferrers_p(l, m, math.cos(t)) for t in ths]
    assert np.allclose(ratio, ratio[0], rtol=1e-12)


def test_theta_factor_chain_error():
    with pytest.raises(QuantumIndexError):
        co.theta_factor(1, 4, 1, 2, 0.3)
    with pytest.raises(IndexError):
        co.StdQuantumIndex((1, 2), 0)


def test_omega_symmetry_and_square():
    a = co.omega_product(1, 6, 3, 1, 0.4, 1.3)
    assert a == pytest.approx(co.omega_product(1, 6, 3, 1, 1.3, 0.4), rel=1e-15)
    assert co.omega_product(2, 6, 3, 1, 0.7, 0.7) >= 0


@pytest.mark.parametrize("l,l2,m", [(0, 0, 0), (2, 1, 1), (3, 3, 2), (5, 2, 0), (4, 4, 4)])
def test_omega_chain_d4_closed_form(l, l2, m):
    th, thp = (0.7, 1.9), (2.2, 0.45)
    prod = co.omega_product(1, 4, l, l2, th[0], thp[0]) * co.omega_product(2, 4, l2, m, th[1], thp[1])
    assert co.omega_chain_d4(l, l2, m, th, thp) == pytest.approx(prod, rel=1e-12, abs=1e-15)


def test_upsilon_constant_normalization():
    t, w = gl()
    vt = (t + 1) * math.pi / 4
    wt = w * math.pi / 4
    for q in (2, 3):
        for k in range(1, 2 ** (q - 1)):
            a = co.hopf_alpha_offset(k, q)
            v = co.upsilon(k, q, 0, 0, 0, vt)
            val = np.sum(wt * v**2 * (np.cos(vt) * np.sin(vt)) ** (2 * a + 1))
            assert val == pytest.approx(0.5, abs=1e-10)


def test_psi_d4_closed_form():
    for n, m, m2 in [(0, 0, 0), (1, 2, 0), (2, 1, 3), (3, 0, 2)]:
        t, tp = 0.35, 1.1
        assert co.psi_d4(n, m, m2, t, tp) == pytest.approx(
            co.psi_product(1, 2, n, m2, m, t, tp), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("n,m,m2", [(0, 1, 0), (1, 2, 1), (2, 1, 3), (1, 3, 2)])
def test_psi_d4_invariant_under_sign_reversal(n, m, m2):
    # m -> -m keeps l = 2n + |m| + |m2| by shifting n -> n + m; the negative-parameter
    # Jacobi polynomial must give back the same product
    f = math.factorial
    t, tp = 0.6, 1.2
    nn, mm = n + m, -m
    c = (2 * nn + mm + m2 + 1) * f(nn + mm + m2) * f(nn) / (f(nn + mm) * f(nn + m2))
    flipped = c * (math.sin(t) * math.sin(tp)) ** mm * (math.cos(t) * math.cos(tp)) ** m2
    flipped *= sf.jacobi_p(nn, mm, m2, math.cos(2 * t)) * sf.jacobi_p(nn, mm, m2, math.cos(2 * tp))
    assert flipped == pytest.approx(co.psi_d4(n, m, m2, t, tp), rel=1e-11)


# ---------------------------------------------------------------------------
# harmonics


def test_hopf_index_identity():
    for q in (2, 3):
        for idx in co.enum_Z1(q, 5):
            assert idx.l1 == 2 * idx.N + idx.M


def test_hopf_index_parity_check():
    with pytest.raises(QuantumIndexError):
        co.HopfQuantumIndex((2,), (1, 0))


@pytest.mark.parametrize("d", [4, 8])
def test_harmonic_normalization(d):
    rng = np.random.default_rng(1)
    std = [idx for idx in co.enum_Y1(d, 4) if idx.l == 4 or idx.l == 2]
    hopf = [idx for idx in co.enum_Z1(co.hopf_q(d), 4)]
    for idx in [std[i] for i in rng.choice(len(std), 4, replace=False)]:
        assert co.harmonic_norm_sq(idx, d) == pytest.approx(1.0, abs=1e-6)
    for idx in [hopf[i] for i in rng.choice(len(hopf), 4, replace=False)]:
        assert co.harmonic_norm_sq(idx, d) == pytest.approx(1.0, abs=1e-6)


def fd_laplacian(f, x, h=1e-3):
    out = -2 * len(x) * f(x)
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        out += f(x + e) + f(x - e)
    return out / h**2


@pytest.mark.parametrize("system,d", [(co.STANDARD, 4), (co.STANDARD, 6), (co.HOPF, 4), (co.HOPF, 8)])
def test_solid_harmonics_are_harmonic(system, d):
    # r^l Y is a harmonic polynomial: an oracle independent of the normalization
    rng = np.random.default_rng(d)
    idxs = list(co.enum_Y1(d, 3)) if system == co.STANDARD else list(co.enum_Z1(co.hopf_q(d), 3))
    for idx in [idxs[i] for i in rng.choice(len(idxs), 5, replace=False)]:
        l = idx.l if system == co.STANDARD else idx.l1
        ev = co.std_harmonic if system == co.STANDARD else co.hopf_harmonic

        def solid(x):
            pt = co.PolyPoint.from_cartesian(x, system)
            return pt.r**l * ev(idx, pt).real

        x = rng.normal(size=d)
        x *= 1.2 / np.linalg.norm(x)
        assert abs(fd_laplacian(solid, x)) <= 1e-5


def test_addition_theorem_examples():
    rng = np.random.default_rng(0)
    p1 = co.cartesian_to_std(rand_vec(4, rng))
    p2 = co.cartesian_to_std(rand_vec(4, rng))
    assert co.addition_theorem_check(4, 0, p1, p2) <= 1e-13
    assert co.addition_theorem_check(4, 3, p1, p2) <= 1e-10
    h1 = co.cartesian_to_hopf(rand_vec(8, rng))
    h2 = co.cartesian_to_hopf(rand_vec(8, rng))
    assert co.addition_theorem_check(8, 2, h1, h2) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([4, 6]), st.integers(0, 6))
def test_addition_theorem_standard(seed, d, n):
    rng = np.random.default_rng(seed)
    p1, p2 = co.cartesian_to_std(rand_vec(d, rng)), co.cartesian_to_std(rand_vec(d, rng))
    assert co.addition_theorem_check(d, n, p1, p2) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([4, 8]), st.integers(0, 4))
def test_addition_theorem_hopf(seed, d, n):
    rng = np.random.default_rng(seed)
    p1, p2 = co.cartesian_to_hopf(rand_vec(d, rng)), co.cartesian_to_hopf(rand_vec(d, rng))
    assert co.addition_theorem_check(d, n, p1, p2) <= 1e-9


def test_degree_sums_match_brute_force():
    rng = np.random.default_rng(4)
    for d in (4, 6):
        a, b = co.cartesian_to_std(rand_vec(d, rng)), co.cartesian_to_std(rand_vec(d, rng))
        m, lmax = 1, 5
        sums = co.std_chain_sums(d, m, lmax, a.thetas, b.thetas)
        brute = np.zeros(lmax + 1)
        for idx in co.enum_Y1(d, lmax):
            if idx.m != m:
                continue
            full = idx.l_chain + (idx.m,)
            v = 1.0
            for j in range(1, d - 1):
                v *= co.omega_product(j, d, full[j - 1], full[j], a.thetas[j - 1], b.thetas[j - 1])
            brute[idx.l] += v
        assert np.allclose(sums, brute, rtol=1e-13, atol=1e-15)


# ---------------------------------------------------------------------------
# multi-sum enumerations


def test_y1_examples():
    assert set(co.enum_Y1(4, 0)) == {co.StdQuantumIndex((0, 0), 0)}
    box = {co.StdQuantumIndex((a, b), c) for a, b, c in itertools.product(range(3), repeat=3) if a >= b >= c}
    assert set(co.enum_Y1(4, 2)) == box
    assert sorted(co.enum_Y1(6, 3)) == sorted(co.enum_Y1_reversed(6, 3))


@pytest.mark.parametrize("d", [4, 6, 8])
@pytest.mark.parametrize("p", range(7))
def test_y1_forward_equals_reversed(d, p):
    a, b = list(co.enum_Y1(d, p)), list(co.enum_Y1_reversed(d, p))
    assert len(a) == len(set(a)) and set(a) == set(b) and len(a) == len(b)


def test_y2_examples():
    one, two = co.enum_Y2(4, 0, 3)
    fwd = set(co.enum_Y2_forward(4, 0, 3))
    assert set(one) | set(two) == fwd and not set(one) & set(two)
    assert co.StdQuantumIndex((1, 0), 0) in one
    assert all(i.m == 0 for i in one)
    assert all(i.m >= 1 for i in two)


@pytest.mark.parametrize("d", [4, 6])
@pytest.mark.parametrize("p", range(4))
def test_y2_windowed_partition(d, p):
    for w in range(p + 1, p + 7):
        one, two = co.enum_Y2(d, p, w)
        fwd = list(co.enum_Y2_forward(d, p, w))
        assert set(one).isdisjoint(two)
        assert sorted(one + two) == sorted(fwd)


def test_z1_examples():
    assert set(co.enum_Z1(2, 0)) == {co.HopfQuantumIndex((0,), (0, 0))}
    fwd = set(co.enum_Z1_forward(2, 3))
    rev = list(co.enum_Z1(2, 3))
    assert set(rev) == fwd and len(rev) == len(fwd)
    for idx in rev:
        m, m2 = idx.M_vec
        assert m + m2 <= 3 and idx.N_vec[0] <= (3 - m - m2) // 2


def test_z3_example():
    assert all(idx.M_vec[0] >= 2 for idx in co.enum_Z3(2, 1, 5))


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("p", range(4))
def test_phi_map_bijection(q, p):
    for fwd, rev in [(co.enum_Z1_forward(q, p), co.enum_Z1(q, p)),
                     (co.enum_Z2_forward(q, p, p + 4), co.enum_Z2(q, p, p + 4)),
                     (co.enum_Z3_forward(q, p, p + 4), co.enum_Z3(q, p, p + 4))]:
        fwd, rev = list(fwd), list(rev)
        assert len(fwd) == len(rev) == len(set(rev))
        assert sorted(co.phi_map(i) for i in fwd) == sorted(co.phi_map(i) for i in rev)
        for i in fwd:
            assert co.phi_inverse(i.N_vec, i.M_vec) == i


def test_hopf_tree_sums_match_brute_force():
    rng = np.random.default_rng(9)
    d = 8
    a, b = co.cartesian_to_hopf(rand_vec(d, rng)), co.cartesian_to_hopf(rand_vec(d, rng))
    m, lmax = 1, 4
    v = co.hopf_tree_sums(d, m, lmax, a, b)
    brute = np.zeros(lmax + 1)
    q = co.hopf_q(d)
    for idx in co.enum_Z1_forward(q, lmax):
        if idx.M_vec[0] != m:
            continue
        term = 1.0
        for k in range(1, d // 2):
            term *= co.psi_product(k, q, idx.N_vec[k - 1], idx.node_l(2 * k), idx.node_l(2 * k + 1),
                                   a.angles[k - 1], b.angles[k - 1])
        for j in range(2, d // 2 + 1):
            mj = idx.M_vec[j - 1]
            term *= sf.neumann(mj) * math.cos(mj * (a.azimuth(j) - b.azimuth(j)))
        brute[idx.l1] += term
    assert np.allclose(v, brute, rtol=1e-13, atol=1e-15)
