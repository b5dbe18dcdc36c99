import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bivlmp.core import (
    CoreParams,
    StrongCore,
    core_copula,
    core_copula_generic,
    gbar_eval,
    marginal_density,
    marginal_quantile,
    marginal_survival,
    mu_core,
    require_valid,
    singular_mass,
    singular_mass_raw,
    strong_distortion,
    strong_eval,
    validate_core,
    weak_lmp_residual,
)
from bivlmp.errors import ValidationError

MU = mu_core(alpha=1.0, gamma=0.1, alpha1=0.3, alpha2=0.2)
NON_MU = CoreParams(lam=0.12, alpha=1.0, gamma1=0.1, gamma2=0.08, alpha1=0.3, alpha2=0.25)


# -- validation -------------------------------------------------------------


def test_mu_core_is_valid_and_flagged():
    rep = validate_core(MU)
    assert rep.ok and not rep.violations
    assert MU.is_mu


def test_lambda_below_lower_bound_rejected():
    p = CoreParams(lam=0.05, alpha=1.0, gamma1=0.1, gamma2=0.1, alpha1=0.3, alpha2=0.2)
    rep = validate_core(p)
    assert not rep.ok
    assert any("lower bound" in v for v in rep.violations)
    with pytest.raises(ValidationError):
        require_valid(p)


def test_lambda_above_upper_bound_rejected():
    p = CoreParams(lam=0.5, alpha=1.0, gamma1=0.1, gamma2=0.1, alpha1=0.3, alpha2=0.2)
    rep = validate_core(p)
    assert not rep.ok
    assert any("upper bound" in v for v in rep.violations)


def test_validation_report_margins_present():
    rep = validate_core(MU)
    assert {"lower_bound", "upper_bound", "singular_mass"} <= set(rep.margins)


# -- survival surface and marginals ----------------------------------------


def test_diagonal_is_exponential():
    ts = np.linspace(0.0, 30.0, 7)
    assert np.allclose(gbar_eval(MU, ts, ts), np.exp(-MU.lam * ts), rtol=1e-13)


def test_marginal_closed_form():
    # Gbar_1(z) = (alpha1 + (1 - alpha1) e^{gamma z})^{-1/alpha}
    z = 8.873
    expect = 1.0 / (0.3 + 0.7 * math.exp(0.1 * z))
    assert marginal_survival(MU, 1, z) == pytest.approx(expect, rel=1e-12)
    assert marginal_survival(MU, 1, z) == pytest.approx(0.5, abs=2e-5)
    assert gbar_eval(MU, z, 0.0) == pytest.approx(expect, rel=1e-12)


def test_marginal_quantile_round_trip():
    us = np.linspace(0.05, 0.95, 19)
    for i in (1, 2):
        zs = marginal_quantile(MU, i, us)
        assert np.allclose(marginal_survival(MU, i, zs), us, atol=1e-10)
    assert marginal_quantile(MU, 1, 0.5) == pytest.approx(10.0 * math.log(1.7 / 0.7), rel=1e-10)


def test_marginal_density_matches_finite_differences():
    z = np.linspace(0.5, 20.0, 9)
    eps = 1e-6
    for i in (1, 2):
        fd = (marginal_survival(NON_MU, i, z - eps) - marginal_survival(NON_MU, i, z + eps)) / (2 * eps)
        assert np.allclose(marginal_density(NON_MU, i, z), fd, rtol=1e-6)


# -- singular component -----------------------------------------------------


def test_singular_mass_mu_closed_form():
    assert singular_mass(MU) == pytest.approx(1.0 - 0.3 - 0.2, abs=1e-14)


def test_singular_mass_formula_non_mu():
    p = NON_MU
    expect = ((1 - p.alpha1) * p.gamma1 + (1 - p.alpha2) * p.gamma2) / (p.alpha * p.lam) - 1.0
    assert singular_mass_raw(p) == pytest.approx(expect, abs=1e-15)


def test_singular_mass_clamps_within_slack():
    p = CoreParams(
        lam=0.100001, alpha=1.0, gamma1=0.1, gamma2=0.1, alpha1=0.3, alpha2=0.7, slack=1e-4
    )
    with pytest.warns(RuntimeWarning):
        assert singular_mass(p) == 0.0


# -- copula -----------------------------------------------------------------


def test_copula_known_value():
    p = mu_core(alpha=1.0, gamma=0.1, alpha1=0.25, alpha2=0.25)
    assert core_copula(p, 0.5, 0.5) == pytest.approx(3.0 / 7.0, abs=1e-6)


def test_copula_closed_matches_generic():
    rng = np.random.default_rng(7)
    u, v = rng.uniform(0.02, 0.98, 50), rng.uniform(0.02, 0.98, 50)
    for p in (MU, NON_MU):
        closed = np.array([core_copula(p, a, b) for a, b in zip(u, v)])
        generic = np.array([core_copula_generic(p, a, b) for a, b in zip(u, v)])
        assert np.allclose(closed, generic, atol=1e-9)


def test_copula_margins():
    u = np.linspace(0.0, 1.0, 11)
    assert np.allclose(core_copula(MU, u, 1.0), u, atol=1e-12)
    assert np.allclose(core_copula(MU, 1.0, u), u, atol=1e-12)
    assert np.allclose(core_copula(MU, u, 0.0), 0.0, atol=1e-12)


# -- functional equation ----------------------------------------------------


def test_weak_lmp_residual_zero_on_grid():
    x = np.linspace(0.0, 30.0, 12)
    X, Y = np.meshgrid(x, x)
    for t in (0.0, 1.0, 7.0, 20.0):
        res = weak_lmp_residual(MU, X, Y, t)
        assert np.max(np.abs(res)) < 1e-12


core_params_strategy = st.tuples(
    st.floats(0.02, 2.0),   # gamma1
    st.floats(0.02, 2.0),   # gamma2
    st.floats(0.05, 0.95),  # alpha1
    st.floats(0.05, 0.95),  # alpha2
    st.floats(0.3, 3.0),    # alpha
    st.floats(0.0, 1.0),    # position of lambda within the admissible window
)


def _make_core(raw):
    g1, g2, a1, a2, alpha, frac = raw
    lo = max(g1, g2) / alpha
    hi = (g1 * (1 - a1) + g2 * (1 - a2)) / alpha
    assume(hi > lo * (1 + 1e-9))
    lam = lo + frac * (hi - lo)
    return CoreParams(lam=lam, alpha=alpha, gamma1=g1, gamma2=g2, alpha1=a1, alpha2=a2, slack=1e-7)


@given(raw=core_params_strategy, t=st.floats(0.0, 10.0))
@settings(max_examples=60, deadline=None)
def test_weak_lmp_residual_property(raw, t):
    p = _make_core(raw)
    x = np.array([0.0, 0.4, 1.7, 6.0]) / p.lam
    X, Y = np.meshgrid(x, x)
    res = weak_lmp_residual(p, X, Y, t / p.lam)
    assert np.max(np.abs(res)) < 1e-10


@given(raw=core_params_strategy)
@settings(max_examples=40, deadline=None)
def test_core_two_increasing_property(raw):
    p = _make_core(raw)
    rng = np.random.default_rng(3)
    scale = 3.0 / p.lam
    a = rng.uniform(0.0, scale, (200, 2))
    b = a + rng.uniform(0.0, scale, (200, 2))
    mass = (
        gbar_eval(p, a[:, 0], a[:, 1])
        - gbar_eval(p, b[:, 0], a[:, 1])
        - gbar_eval(p, a[:, 0], b[:, 1])
        + gbar_eval(p, b[:, 0], b[:, 1])
    )
    assert np.min(mass) > -1e-9


# -- strong solutions -------------------------------------------------------


def test_strong_core_exponential():
    s = StrongCore(hbar=lambda z: math.exp(-z), a=2.0)
    assert strong_eval(s, 1.0, 1.0) == pytest.approx(math.exp(-3.0), rel=1e-12)
    # memoryless base: the distortion is multiplication by the shift factor
    v = np.linspace(0.1, 0.9, 9)
    out = strong_distortion(s, 1.0, 0.5, v)
    assert np.allclose(out, v, atol=1e-9)


def test_strong_core_pareto_tail():
    s = StrongCore(hbar=lambda z: 1.0 / (1.0 + z) ** 2, a=2.0)
    assert strong_eval(s, 1.0, 1.0) == pytest.approx(1.0 / 16.0, rel=1e-12)
    # strong equation: F(x+s, y+t) = d_{s,t}(F(x, y))
    x, y, sh, th = 0.7, 0.4, 1.1, 0.6
    lhs = strong_eval(s, x + sh, y + th)
    rhs = strong_distortion(s, sh, th, strong_eval(s, x, y)) * strong_eval(s, sh, th)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_strong_core_rejects_concave_survival():
    with pytest.raises(ValidationError):
        StrongCore(hbar=lambda z: max(0.0, 1.0 - z * z), a=1.0)
