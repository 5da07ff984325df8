import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import integrate

from thinfilm.mobility import G, MobilityModel, f

E = math.e


def G_eps_oracle(model, u):
    """Nested quadrature of int_A^u int_A^s dt / f_eps(t) ds."""
    pts = sorted({model.r_eps, -model.r_eps, model.r_cap, -model.r_cap})

    def slope(s):
        inside = [p for p in pts if min(s, model.anchor) < p < max(s, model.anchor)]
        val, _ = integrate.quad(lambda t: 1.0 / model.f_eps(t), model.anchor, s,
                                points=inside or None, epsabs=1e-14, epsrel=1e-13, limit=200)
        return val

    inside = [p for p in pts if min(u, model.anchor) < p < max(u, model.anchor)]
    val, _ = integrate.quad(slope, model.anchor, u, points=inside or None,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


# f and f_eps

def test_f_examples():
    assert f(2.0, 3) == 8.0
    assert f(0.0, 3) == 0.0
    assert f(4.0, 1.5) == pytest.approx(8.0, rel=1e-15)
    with pytest.raises(ValueError):
        f(-1.0, 3)


def test_f_eps_examples():
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    assert m.f_eps(-0.05) == 1e-3
    assert m.f_eps(2.0) == 8.0
    assert m.f_eps(10.0) == 100.0


def test_f_eps_unregularized_has_only_the_cap():
    m = MobilityModel(n=3, eps=0.0, cap_M=100)
    assert m.f_eps(0.0) == 0.0
    assert m.f_eps(10.0) == 100.0


@given(st.floats(-50, 50, allow_nan=False))
def test_f_eps_bounds_and_even(u):
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    v = m.f_eps(u)
    assert 1e-3 <= v <= 100
    assert v == m.f_eps(-u)


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_f_eps_converges_to_f(eps):
    m = MobilityModel(n=3, eps=eps, cap_M=100)
    u = np.linspace(0.3, 4.0, 50)  # compact subset of (0, M^(1/n))
    assert np.max(np.abs(m.f_eps(u) - f(u, 3))) == 0.0
    u_small = np.linspace(0.25, 0.3, 5)
    assert np.max(np.abs(m.f_eps(u_small) - f(u_small, 3))) <= eps


def test_model_validation():
    with pytest.raises(ValueError, match="eps < M required"):
        MobilityModel(n=3, eps=0.1, cap_M=0.05)
    with pytest.raises(ValueError):
        MobilityModel(n=1.0, eps=1e-3, cap_M=10)
    with pytest.raises(ValueError):
        MobilityModel(n=3, eps=1e-3, cap_M=0.5)  # r_cap < anchor
    with pytest.raises(ValueError):
        MobilityModel(n=3, eps=-1.0, cap_M=10)


# G

def test_G_closed_form_n3():
    assert G(2.0, 3, 1.0) == pytest.approx(0.25, rel=1e-14)
    assert G(1.0, 3, 1.0) == 0.0
    u = np.linspace(0.1, 5, 40)
    assert np.allclose(G(u, 3, 1.0), 0.5 / u + 0.5 * u - 1.0, rtol=1e-13, atol=1e-14)


def test_G_log_branch():
    assert G(E, 2, 1.0) == pytest.approx(E - 2, rel=1e-14)
    assert G(E, 2, 1.0) == pytest.approx(0.71828, abs=1e-5)


def test_G_rejects_nonpositive():
    with pytest.raises(ValueError):
        G(0.0, 3)


@pytest.mark.parametrize("n", [1.5, 2.0, 2.5, 3.0, 4.0])
def test_G_satisfies_ode(n):
    h = 1e-4
    for u in (0.5, 1.3, 2.0):
        second = (G(u + h, n) - 2 * G(u, n) + G(u - h, n)) / h**2
        assert second * u**n == pytest.approx(1.0, abs=1e-5)
    assert G(1.0, n) == 0.0
    assert (G(1 + h, n) - G(1 - h, n)) / (2 * h) == pytest.approx(0.0, abs=1e-7)


def test_G_divergence_by_exponent():
    # n >= 2: G -> inf as u -> 0+; 1 < n < 2: bounded with limit from the closed form
    assert G(1e-8, 2.0) > 15
    assert G(1e-8, 3.0) > 1e7
    n = 1.5
    # closed form at u -> 0 with A = 1: -P(1) + P'(1), P(w) = w^(2-n)/((1-n)(2-n))
    pa = 1.0 / ((1 - n) * (2 - n))
    dpa = 1.0 / (1 - n)
    limit = -pa + dpa
    assert G(1e-12, n) == pytest.approx(limit, rel=1e-4)
    # exponent 2 - n: G(u) ~ u^(2-n)/((n-1)(n-2)) as u -> 0
    n = 3.0
    u1, u2 = 1e-4, 1e-5
    rate = math.log(G(u2, n) / G(u1, n)) / math.log(u2 / u1)
    assert rate == pytest.approx(2 - n, abs=1e-3)


# G_eps

def test_G_eps_anchor():
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    assert m.G_eps(1.0) == 0.0
    assert m.dG_eps(1.0) == 0.0


@pytest.mark.parametrize("u", [0.0, -0.3, 0.05, 2.0, 6.0, -7.0])
def test_G_eps_matches_nested_quadrature(u):
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    assert m.G_eps(u) == pytest.approx(G_eps_oracle(m, u), abs=1e-8, rel=1e-10)


@pytest.mark.parametrize("n", [1.5, 2.0, 2.5])
def test_G_eps_other_exponents_match_oracle(n):
    m = MobilityModel(n=n, eps=1e-2, cap_M=50)
    for u in (0.0, 0.01, -0.2, 3.0, 20.0, -25.0):
        assert m.G_eps(u) == pytest.approx(G_eps_oracle(m, u), abs=1e-8, rel=1e-9)


@pytest.mark.parametrize("u", [0.5, 2.0])
def test_G_eps_defining_ode(u):
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    h = 1e-4
    second = (m.G_eps(u + h) - 2 * m.G_eps(u) + m.G_eps(u - h)) / h**2
    assert second * m.f_eps(u) == pytest.approx(1.0, abs=1e-4)


def test_G_eps_equals_G_on_power_branch():
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    u = np.linspace(m.r_eps, m.r_cap, 30)
    assert np.allclose(m.G_eps(u), G(u, 3), rtol=1e-12, atol=1e-12)


def test_G_eps_continuity_at_breaks():
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    for b in (m.r_eps, -m.r_eps, m.r_cap, -m.r_cap):
        lo, hi = m.G_eps(b * (1 - 1e-12)), m.G_eps(b * (1 + 1e-12))
        assert lo == pytest.approx(hi, rel=1e-9, abs=1e-9)
        dlo, dhi = m.dG_eps(b * (1 - 1e-12)), m.dG_eps(b * (1 + 1e-12))
        assert dlo == pytest.approx(dhi, rel=1e-8, abs=1e-8)


@given(st.floats(-8, 8, allow_nan=False))
def test_G_eps_nonnegative_convex(u):
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    assert m.G_eps(u) >= 0
    h = 1e-3
    second = m.G_eps(u + h) - 2 * m.G_eps(u) + m.G_eps(u - h)
    assert second >= -1e-9 * (1 + abs(m.G_eps(u)))


@given(st.floats(0.05, 4.0), st.floats(1e-4, 1e-2))
def test_dG_eps_matches_difference(u, h):
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    assume(all(abs(abs(u) - b) > 2 * h for b in (m.r_eps, m.r_cap)))
    fd = (m.G_eps(u + h) - m.G_eps(u - h)) / (2 * h)
    # central difference error h^2 G'''/6 with |G'''| <= 3/u^4 on the power branch
    assert m.dG_eps(u) == pytest.approx(fd, abs=h**2 * 3 / (u - h) ** 4)


def test_G_eps_at_zero_monotone_in_eps():
    vals = [MobilityModel(n=3, eps=e, cap_M=100).G_eps(0.0) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_df_eps_matches_difference():
    m = MobilityModel(n=3, eps=1e-3, cap_M=100)
    for u in (0.5, -2.0, 3.0):
        h = 1e-6
        assert m.df_eps(u) == pytest.approx((m.f_eps(u + h) - m.f_eps(u - h)) / (2 * h), rel=1e-6)
    assert m.df_eps(0.01) == 0.0
    assert m.df_eps(10.0) == 0.0
