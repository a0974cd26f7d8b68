import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from dirichlet_lab import potential as P
from dirichlet_lab import series as S
from dirichlet_lab.errors import DomainError, ReliabilityError, ValidationError


def laplacian(f, s, h=1e-3):
    return (f(s + h) + f(s - h) + f(s + 1j * h) + f(s - 1j * h) - 4 * f(s)) / (h * h)


# -- Poisson kernel and integral ---------------------------------------------


def test_poisson_kernel_values():
    assert P.poisson_kernel(2.0, 1 + 2j) == 1.0
    assert P.poisson_kernel(2.0, 1 + 3j) == 0.5
    assert P.poisson_kernel(0.0, 0.3 + 0.7j) == P.poisson_kernel(0.0, 0.3 - 0.7j)
    with pytest.raises(DomainError):
        P.poisson_kernel(0.0, -0.1 + 1j)


def test_single_atom_is_kernel():
    mu = P.BoundaryMeasure(atoms=((0.5, math.pi),))
    for s in (1 + 1j, 0.2 - 3j):
        assert P.poisson_integral(mu, s) == pytest.approx(P.poisson_kernel(0.5, s), rel=1e-14)


@pytest.mark.parametrize("s", [0.3 + 0.1j, 1.0 - 2.0j, 0.01 + 0.5j])
def test_density_matches_arctan(s):
    mu = P.BoundaryMeasure(breakpoints=(-1.0, 0.25, 2.0), values=(1.0, 3.0))
    want = oracles.poisson_window(-1.0, 0.25, s) + 3.0 * oracles.poisson_window(0.25, 2.0, s)
    assert P.poisson_integral(mu, s) == pytest.approx(want, rel=1e-9)


def test_lebesgue_window():
    sig = 0.5
    mu = P.BoundaryMeasure(breakpoints=(-100 * sig, 100 * sig), values=(1.0,))
    assert P.poisson_integral(mu, complex(sig, 0)) >= 0.99


def test_poisson_integral_harmonic():
    mu = P.BoundaryMeasure(atoms=((0.0, 1.0),), breakpoints=(-1.0, 1.0), values=(2.0,))
    f = lambda s: P.poisson_integral(mu, s)
    spacing = 1e-2
    for s in (0.7 + 0.2j, 1.5 - 1j):
        assert abs(laplacian(f, s, spacing)) <= 1e-6 * f(s) / spacing ** 2


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(0.01, 3), st.floats(0, 5), st.floats(0, 5))
def test_poisson_integral_linear(t, m1, m2, v):
    s = complex(0.4, t)
    a = P.BoundaryMeasure(atoms=((0.0, m1),), breakpoints=(-1.0, 1.0), values=(v,))
    b = P.BoundaryMeasure(atoms=((0.5, m2),))
    both = P.BoundaryMeasure(atoms=((0.0, m1), (0.5, m2)), breakpoints=(-1.0, 1.0), values=(v,))
    want = P.poisson_integral(a, s) + P.poisson_integral(b, s)
    assert P.poisson_integral(both, s) == pytest.approx(want, rel=1e-9, abs=1e-14)


# -- h1 decomposition --------------------------------------------------------


def test_h1_no_mass_in_interval():
    mu = P.BoundaryMeasure(atoms=((5.0, 1.0),), breakpoints=(-3.0, -2.0), values=(1.0,))
    assert P.h1_decompose(mu, (0.0, 1.0)) is mu


def test_h1_atom_inside():
    mu = P.BoundaryMeasure(atoms=((0.5, 1.0),))
    out = P.h1_decompose(mu, (0.0, 1.0))
    assert sorted(out.atoms) == [(0.0, 1.0), (1.0, 1.0)]


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 1.5), st.floats(0.1, 2), st.floats(0, 3), st.floats(0, 3), st.floats(-3, 3))
def test_h1_mass_bookkeeping(lo, width, v1, v2, atom):
    mu = P.BoundaryMeasure(atoms=((atom, 1.5),), breakpoints=(-1.0, 0.5, 2.0), values=(v1, v2))
    hi = lo + width
    out = P.h1_decompose(mu, (lo, hi))
    inside = mu.mass(lo, hi)
    assert out.total_mass() == pytest.approx(mu.total_mass() - inside + 2 * inside if inside else mu.total_mass(), rel=1e-12, abs=1e-12)
    # off I nothing moved
    for x in (lo - 0.3, hi + 0.3):
        assert out.mass(x - 0.05, x + 0.05) == pytest.approx(mu.mass(x - 0.05, x + 0.05), abs=1e-12)


def test_h1_empty_interval():
    with pytest.raises(DomainError):
        P.h1_decompose(P.BoundaryMeasure(), (1.0, 1.0))


# -- Green function ----------------------------------------------------------


K = P.SegmentK(-1.0, 1.0)


def test_green_boundary_decay():
    assert P.green_segment(K, -2.0, 1e-8 + 0j) <= 1e-4
    assert P.green_segment(K, -2.0, -1e-8 + 0.5j) <= 1e-4


def test_green_pole_and_domain():
    assert math.isinf(P.green_segment(K, 2.0, 2.0))
    with pytest.raises(DomainError):
        P.green_segment(K, 2.0, 0.5j)
    with pytest.raises(DomainError):
        P.green_segment(K, 0.0j, 1.0)


def test_green_matches_mpmath_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = complex(*rng.uniform(-3, 3, 2))
        p = complex(*rng.uniform(-3, 3, 2))
        want = oracles.green_exterior_segment(-1.0, 1.0, p, s)
        assert P.green_segment(K, p, s) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_green_symmetry():
    rng = np.random.default_rng(4)
    for _ in range(100):
        x = complex(*rng.uniform(-3, 3, 2))
        y = complex(*rng.uniform(-3, 3, 2))
        assert abs(P.green_segment(K, x, y) - P.green_segment(K, y, x)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(0.2, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 2))
def test_green_invariances(dt, length, sx, sy, scale):
    Kb = P.SegmentK(0.0, length)
    pole = complex(-1.0, 0.3)
    s = complex(sx, sy)
    # G ~ sqrt(dist) at the ends of K: float translation moves s by an ulp, so
    # keep away from K where that ulp is amplified past the tolerance
    dist = math.hypot(sx, max(0.0, Kb.t_lo - sy, sy - Kb.t_hi))
    if dist < 1e-6 or s == pole:
        return
    g = P.green_segment(Kb, pole, s)
    shifted = P.green_segment(P.SegmentK(dt, length + dt), pole + 1j * dt, s + 1j * dt)
    assert shifted == pytest.approx(g, abs=1e-12, rel=1e-9)
    scaled = P.green_segment(P.SegmentK(0.0, length * scale), pole * scale, s * scale)
    assert scaled == pytest.approx(g, abs=1e-10, rel=1e-9)


def test_green_harmonic_off_K():
    f = lambda s: P.green_segment(K, -2.0, s)
    for s in (0.5 + 0.5j, -0.7 + 2j, 1.5 - 1.2j):
        assert abs(laplacian(f, s)) < 1e-5


# -- empirical Lemma constant -------------------------------------------------


def samples_grid():
    xs = np.round(np.linspace(-0.9, 2.0, 15), 12)
    ys = np.round(np.linspace(-3.0, 3.0, 15), 12)
    return [complex(x, y) for x in xs for y in ys if not K.contains(complex(x, y))]


def test_lemma_constant_zero_when_below_b():
    g = S.geometric(5)
    # far right every |S_m| is small, so no positive part
    assert P.lemma_l_constant(g, K, -1.0, [1, 2, 3], [5 + 0j, 4 + 1j]) == 0.0


def test_lemma_constant_monotone():
    g = S.geometric(30)
    smp = samples_grid()
    c_small = P.lemma_l_constant(g, K, -1.0, range(1, 11), smp[::2])
    assert P.lemma_l_constant(g, K, -1.0, range(1, 11), smp) >= c_small
    assert P.lemma_l_constant(g, K, -1.0, range(1, 21), smp[::2]) >= c_small


def test_lemma_constant_domain():
    with pytest.raises(DomainError):
        P.lemma_l_constant(S.geometric(5), K, 0.5, [1], [1 + 0j])
    with pytest.raises(DomainError):
        P.lemma_l_constant(S.geometric(5), K, -1.0, [1], [-2 + 0j])


# -- walk on spheres -------------------------------------------------------------


QUARTERS = [P.Arc(f"q{k}", k * math.pi / 2, (k + 1) * math.pi / 2) for k in range(4)]


def test_wos_disc_center_quarters():
    est = P.harmonic_measure_wos(P.Disc(), 0j, QUARTERS, P.WalkConfig(seed=11, walks=40_000))
    assert sum(est.counts) == est.walks
    for f, se in zip(est.frequencies, est.std_errors):
        assert abs(f - 0.25) <= 3 * se


def test_wos_square_side():
    parts = [P.SidePiece("bottom", "bottom", 0.0, 1.0), P.SidePiece("rest", "rest")]
    est = P.harmonic_measure_wos(P.Rectangle(0, 1, 0, 1), 0.5 + 0.5j, parts, P.WalkConfig(seed=5, walks=40_000))
    assert abs(est.frequencies[0] - 0.25) <= 3 * est.std_errors[0]


def test_wos_rectangle_against_eigenfunction_series():
    W, H = 1.0, 2.0
    parts = [P.SidePiece("K", "left", 0.5, 1.5), P.SidePiece("rest", "rest")]
    z = 0.3 + 0.8j
    est = P.harmonic_measure_wos(P.Rectangle(0, W, 0, H), z, parts, P.WalkConfig(seed=2, walks=40_000))
    want = oracles.rectangle_left_edge_measure(W, H, z.real, z.imag, 0.5, 1.5)
    assert abs(est.frequencies[0] - want) <= 3 * est.std_errors[0]


def test_wos_thread_count_does_not_matter():
    cfg1 = P.WalkConfig(seed=9, walks=5000, threads=1)
    cfg3 = P.WalkConfig(seed=9, walks=5000, threads=3)
    a = P.harmonic_measure_wos(P.Disc(), 0.2 + 0.1j, QUARTERS, cfg1)
    b = P.harmonic_measure_wos(P.Disc(), 0.2 + 0.1j, QUARTERS, cfg3)
    assert a.counts == b.counts


def test_wos_reliability_error():
    with pytest.raises(ReliabilityError):
        P.harmonic_measure_wos(P.Disc(), 0.2 + 0.1j, QUARTERS, P.WalkConfig(walks=200, max_steps=1))


def test_wos_partition_must_cover():
    with pytest.raises(ValidationError):
        P.harmonic_measure_wos(P.Disc(), 0j, QUARTERS[:2], P.WalkConfig(walks=500))


def test_wos_start_must_be_interior():
    with pytest.raises(DomainError):
        P.harmonic_measure_wos(P.Disc(), 2 + 0j, QUARTERS, P.WalkConfig(walks=10))
