import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from dirichlet_lab import series as S
from dirichlet_lab.errors import DomainError, ValidationError


def finite_series(lam, a):
    return S.GeneralDirichletSeries(lam, a, finite=True)


# -- construction ------------------------------------------------------------


def test_rejects_non_monotone_exponents_naming_index():
    with pytest.raises(ValidationError, match="index 3"):
        finite_series([0.0, 1.0, 1.0, 2.0], [1, 1, 1, 1])


def test_rejects_negative_first_exponent():
    with pytest.raises(ValidationError, match="negative"):
        finite_series([-1.0, 1.0], [1, 1])


def test_rejects_length_mismatch():
    with pytest.raises(ValidationError):
        finite_series([0.0, 1.0], [1])


def test_arrays_are_read_only():
    s = finite_series([0.0, 1.0], [1, 2])
    with pytest.raises(ValueError):
        s.coefficients[0] = 5


def test_selector_rejects_non_increasing():
    with pytest.raises(ValidationError, match="k=3"):
        S.SubsequenceSelector((1, 4, 4))


def test_selector_beyond_prefix():
    with pytest.raises(IndexError):
        S.SubsequenceSelector((1, 5)).check(S.geometric(4))


# -- partial sums ------------------------------------------------------------


def test_partial_sum_matches_mpmath():
    rng = np.random.default_rng(1)
    lam = np.cumsum(rng.uniform(0.1, 1.0, 50))
    a = rng.normal(size=50) + 1j * rng.normal(size=50)
    s = 0.3 + 2.0j
    ser = finite_series(lam, a)
    for m in (1, 7, 50):
        want = oracles.direct_sum(lam, a, s, m=m)
        assert abs(S.partial_sum(ser, m, s) - want) <= 1e-14 * max(1, abs(want))


def test_compensated_sum_of_million_terms():
    z = S.zeta_shift(1.0, 10 ** 6)
    got = S.partial_sum(z, 10 ** 6, 1.0j)
    # mpmath harmonic-type sum via Hurwitz difference: sum_{n<=N} n^{-1-it}
    import mpmath
    with mpmath.workdps(30):
        s = mpmath.mpc(1, 1)
        want = complex(mpmath.zeta(s) - mpmath.zeta(s, 10 ** 6 + 1))
    assert abs(got - want) <= 1e-13 * abs(want)


def test_partial_sums_vectorized_equals_scalar():
    g = S.geometric(30)
    ms = [1, 5, 30]
    v = S.partial_sums(g, ms, 0.2 + 1j)
    assert [complex(x) for x in v] == [S.partial_sum(g, m, 0.2 + 1j) for m in ms]


def test_partial_sum_index_error():
    with pytest.raises(IndexError):
        S.partial_sum(S.geometric(3), 4, 1.0)


# -- tail bounds and evaluation -----------------------------------------------


def test_tail_bound_geometric_closed_form():
    # finite geometric tail: e^{(m+1)(eps-sigma)} sum_{n=m+1}^{N} e^{-n eps}
    N, m, sigma, eps = 40, 10, 1.0, 0.5
    g = S.GeneralDirichletSeries(np.arange(1, N + 1.0), np.ones(N), finite=True)
    n = np.arange(m + 1, N + 1)
    want = math.exp((m + 1) * (eps - sigma)) * math.fsum(np.exp(-n * eps))
    assert S.tail_bound(g, m, sigma, eps) == pytest.approx(want, rel=1e-12)


def test_tail_bound_at_N():
    assert S.tail_bound(finite_series([0, 1.0], [1, 1]), 2, 1.0, 0.5) == 0.0
    assert math.isinf(S.tail_bound(S.geometric(5), 5, 1.0, 0.5))


def test_tail_bound_domain():
    g = S.geometric(5)
    with pytest.raises(DomainError):
        S.tail_bound(g, 1, 1.0, 1.0)
    with pytest.raises(DomainError):
        S.tail_bound(g, 1, 1.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    N=st.integers(2, 60),
    seed=st.integers(0, 2 ** 32 - 1),
    sigma=st.floats(0.1, 3.0),
)
def test_tail_bound_sound(N, seed, sigma):
    rng = np.random.default_rng(seed)
    lam = np.cumsum(rng.uniform(0.01, 2.0, N))
    a = rng.normal(size=N) + 1j * rng.normal(size=N)
    ser = finite_series(lam, a)
    s = complex(sigma, rng.uniform(-20, 20))
    B = S.tail_bounds(ser, sigma, sigma / 2)
    full = S.partial_sum(ser, N, s)
    err = np.abs(S.partial_sums(ser, np.arange(1, N + 1), s) - full)
    assert np.all(err <= B * (1 + 1e-12) + 1e-14 * np.abs(full))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-5, 5), st.floats(0.5, 4.0))
def test_tail_bound_monotone_in_sigma(sigma, dsig, eps_frac):
    g = S.geometric(80)
    eps = sigma * eps_frac / 5
    s2 = sigma + abs(dsig) + 0.01
    assert np.all(S.tail_bounds(g, s2, eps) <= S.tail_bounds(g, sigma, eps) * (1 + 1e-12))


def test_evaluate_geometric_at_one():
    r = S.evaluate(S.geometric(200), 1.0, 1e-10)
    assert r.tol_met and r.heuristic
    assert abs(r.value - 1 / (math.e - 1)) <= 1e-10


def test_evaluate_zeta3():
    z = S.ordinary(1.0 / np.arange(1, 200001) ** 2, finite=False)
    r = S.evaluate(z, 1.0, 1e-8)
    assert r.tol_met
    assert abs(r.value - oracles.zeta_euler_maclaurin(3)) <= 1e-8


def test_evaluate_finite_is_exact():
    ser = finite_series([0.0, 0.5, 1.0], [1, 2, 3])
    r = S.evaluate(ser, 1.0, 1e-3)
    assert r.tail_bound == 0.0 and r.terms_used == 3 and not r.heuristic
    assert r.value == S.partial_sum(ser, 3, 1.0)


def test_evaluate_reports_exhausted_prefix():
    r = S.evaluate(S.geometric(5), 0.01, 1e-12)
    assert not r.tol_met and r.terms_used == 5 and math.isinf(r.tail_bound)


def test_evaluate_domain():
    with pytest.raises(DomainError):
        S.evaluate(S.geometric(5), 0.0, 1e-3)


# -- transformations ---------------------------------------------------------


def test_derivative_coefficients_and_tag():
    d = S.derivative(S.geometric(4))
    assert np.array_equal(d.coefficients, -np.arange(1, 5.0))
    assert d.closed_form == "geometric'"
    z = S.derivative(finite_series([0.0, 1.0], [3, 1]))
    assert z.coefficients[0] == 0


def test_from_taylor_bridge():
    c = [0, 0, 1.0, 0, 2.0, 0.5]
    w = np.exp(0.7j)
    g = S.from_taylor(c, w)
    assert g.exponents[0] == 2.0  # leading zeros dropped
    s = 0.3 + 0.2j
    z = w * np.exp(-s)
    for j in (2, 4, 5):
        T = sum(c[i] * z ** i for i in range(j + 1))
        m = int(np.searchsorted(g.exponents, j, side="right"))
        assert abs(S.partial_sum(g, m, s) - T) < 1e-14


def test_from_taylor_domain():
    with pytest.raises(DomainError):
        S.from_taylor([1, 2], w=2.0)


def test_gap_ratio_sequence():
    f = S.factorial_lacunary(10)
    r = S.gap_ratio_sequence(f, S.SubsequenceSelector((1, 2, 5)))
    assert r.tolist() == [2.0, 3.0, 6.0]


def test_gap_ratio_zero_exponent():
    with pytest.raises(DomainError, match="k=1"):
        S.gap_ratio_sequence(finite_series([0.0, 1.0, 2.0], [1, 1, 1]), S.SubsequenceSelector((1, 2)))


def test_gap_ratio_needs_next_exponent():
    with pytest.raises(IndexError):
        S.gap_ratio_sequence(S.geometric(5), S.SubsequenceSelector((5,)))


def test_high_indices():
    assert S.high_indices_check(S.power_lacunary(30)) == (2.0, True)
    # a finite prefix cannot refute the condition: inf over the prefix is 30/29
    q, ok = S.high_indices_check(S.geometric(30))
    assert ok and q == pytest.approx(30 / 29)
    q, ok = S.high_indices_check(finite_series([1.0, 2.0, 3.0, 3.0 + 1e-9], [1, 1, 1, 1]))
    assert q == pytest.approx(1.0) and q > 1.0


def test_detect_pure_ostrowski():
    c = np.zeros(50)
    c[[1, 3, 11, 49]] = 1
    rep = S.detect_pure_ostrowski(c, 2.0)
    assert rep.pairs == [(1, 2), (3, 10), (11, 48)]
    assert S.detect_pure_ostrowski(c, 5.0).pairs == []


def test_detect_ignores_unclosed_and_p0():
    c = [1, 0, 0, 0, 1, 0, 0, 0]
    assert S.detect_pure_ostrowski(c).pairs == []


def test_normalized_remainder():
    ser = finite_series([1.0, 2.0, 3.0], [1, 1, 1])
    u = S.normalized_remainder(ser, 1, 1.0)
    want = math.log(abs(math.exp(-2) + math.exp(-3))) / 2.0
    assert u == pytest.approx(want, rel=1e-14)


def test_abscissa_estimate_bounded_for_geometric():
    # max of log(m)/m over the last half of the prefix, attained at m = 51
    assert S.abscissa_estimate(S.geometric(100)) == pytest.approx(math.log(51) / 51, rel=1e-12)


# -- interchange -------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=20, unique=True),
       st.booleans())
def test_json_round_trip(gaps, finite):
    lam = np.cumsum(sorted(gaps))
    a = np.arange(1, lam.size + 1) * (1 - 0.5j)
    ser = S.GeneralDirichletSeries(lam, a, finite, "geometric" if finite else None)
    back = S.loads_series(S.dumps_series(ser))
    assert np.array_equal(back.exponents, ser.exponents)
    assert np.array_equal(back.coefficients, ser.coefficients)
    assert back.finite == ser.finite and back.closed_form == ser.closed_form


def test_json_exponent_digits():
    text = S.dumps_series(finite_series([0.1, math.pi], [1, 1]))
    exps = json.loads(text)["exponents"]
    assert exps[1] == math.pi
    assert "3.1415926535897931" in text


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 800.0), st.floats(1e-3, 1e3), st.floats(-300, 300),
       st.floats(1e-3, 5.0), st.floats(0.01, 0.99))
def test_tail_bound_sound_on_single_term_tails(lam1, gap, log_a, sigma, frac):
    # one-term tails make the exact bound tight; underflowing tails make it tiny
    ser = S.GeneralDirichletSeries([lam1, lam1 + gap], [1.0, math.exp(log_a)])
    bound = S.tail_bound(ser, 1, sigma, frac * sigma)
    with mpmath.workdps(50):
        exact = mpmath.mpf(ser.coefficients[1].real) * mpmath.exp(-mpmath.mpf(float(ser.exponents[1])) * sigma)
    assert mpmath.mpf(bound) >= exact
