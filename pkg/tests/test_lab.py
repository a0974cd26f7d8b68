import cmath
import math

import numpy as np
import pytest

import oracles
from dirichlet_lab import geometry as G
from dirichlet_lab import lab
from dirichlet_lab import series as S
from dirichlet_lab.errors import DomainError, ExperimentAborted
from dirichlet_lab.potential import BoundaryMeasure


# -- nontangential limits ---------------------------------------------------------


def test_nt_limit_geometric_at_i_pi():
    r = lab.nt_limit(S.geometric(100), math.pi, tol=1e-9)
    assert r.converged and r.route == "closed_form:geometric"
    assert abs(r.limit + 0.5) <= 1e-8
    assert r.error_estimate <= 1e-9


def test_nt_limit_pole_diverges():
    r = lab.nt_limit(S.geometric(100), 0.0, tol=1e-9)
    assert r.status == "diverged"


def test_nt_limit_finite_series_is_exact():
    ser = S.GeneralDirichletSeries([0.0, 1.0, 2.5], [1, -2, 0.5j])
    r = lab.nt_limit(ser, 0.7)
    assert r.converged and r.error_estimate == 0.0
    assert r.limit == S.partial_sum(ser, 3, 0.7j)


def test_nt_limit_undecided_when_prefix_runs_out():
    # no closed form, 5 stored terms: evaluation near the axis cannot meet tol
    ser = S.GeneralDirichletSeries(np.arange(1, 6.0), np.ones(5), finite=False)
    r = lab.nt_limit(ser, 1.0, tol=1e-10)
    assert r.status == "undecided" and "evaluation failed" in r.diagnostic


def test_nt_limit_bounded_oscillation_diverges():
    # s^i = exp(i log s) stays bounded and keeps turning as s -> 0
    r = lab.nt_limit(lambda s: cmath.exp(1j * cmath.log(s)), 0.0, tol=1e-6, max_halvings=30)
    assert r.status == "diverged" and "oscillation" in r.diagnostic


def test_nt_limit_overflow_is_divergence():
    r = lab.nt_limit(lambda s: cmath.exp(1j / s), 0.0, tol=1e-6)
    assert r.status == "diverged" and "overflow" in r.diagnostic


def test_nt_limit_via_series_evaluation():
    r = lab.nt_limit(S.power_lacunary(60), 1.0, tol=1e-8)
    want = oracles.direct_sum(2.0 ** np.arange(1, 61), 3.0 ** -np.arange(1, 61), 1j)
    assert r.converged and abs(r.limit - want) <= 1e-8


def test_nt_limit_domain():
    with pytest.raises(DomainError):
        lab.nt_limit(S.geometric(5), 0.0, delta=0.0)


# -- sequence detector --------------------------------------------------------------


def test_sequence_report_statuses():
    k = np.arange(1, 101)
    conv = lab.sequence_report(k, 1.0 + 1.0 / k ** 3, tol=1e-4)
    assert conv.converged and conv.limit == pytest.approx(1.0, abs=1e-4)
    div = lab.sequence_report(k, (-1.0) ** k, tol=1e-4)
    assert div.status == "diverged" and "witness" in div.diagnostic
    mid = lab.sequence_report(k, 1.0 + 3e-4 * (-1.0) ** k / (1 + (k > 90)), tol=1e-4)
    assert mid.status == "undecided"
    short = lab.sequence_report([1, 2], [0.0, 0.0], tol=1e-4)
    assert short.status == "undecided"


def test_sequence_report_thins_samples():
    k = np.arange(1, 100001)
    r = lab.sequence_report(k, 1.0 / k, tol=1e-3)
    assert len(r.samples) <= 400
    assert r.samples[-1][0] == 100000


# -- boundary scans -----------------------------------------------------------------


def test_subsequence_limits_power_lacunary_matches_oracle():
    ser = S.power_lacunary(40)
    scan = lab.subsequence_limits(ser, S.SubsequenceSelector.full(40), [0.3, 1.0], 1e-10)
    for p in scan.per_point:
        want = oracles.direct_sum(ser.exponents, ser.coefficients, complex(0, p.t))
        assert p.subsequence.converged and abs(p.subsequence.limit - want) <= 1e-12


def test_subsequence_limits_threads_identical():
    ser = S.geometric(200)
    sel = S.SubsequenceSelector.arithmetic(2, 2, 100)
    grid = np.linspace(0.5, 5.5, 11)
    a = lab.subsequence_limits(ser, sel, grid, 1e-8, threads=1).to_dict()
    b = lab.subsequence_limits(ser, sel, grid, 1e-8, threads=4).to_dict()
    assert a == b


def test_theorem1_compare_flags_isolated_anomaly():
    ser = S.geometric(401)
    sel = S.SubsequenceSelector.arithmetic(2, 2, 200)
    scan = lab.theorem1_compare(ser, sel, [math.pi - 0.1, math.pi, math.pi + 0.1], tol=1e-8)
    mid = scan.per_point[1]
    assert mid.subsequence.converged and mid.nt.converged
    assert mid.anomaly and mid.isolated
    assert scan.comparison["anomalies"] == [math.pi]
    assert scan.per_point[0].subsequence.status == "diverged"


def test_theorem1_compare_agreement_high_indices():
    ser = S.power_lacunary(60)
    scan = lab.theorem1_compare(ser, S.SubsequenceSelector.full(60), [0.5, 1.0], tol=1e-8)
    assert scan.comparison["points_in_E_and_F"] == 2
    assert scan.comparison["max"] <= 1e-8
    assert scan.comparison["anomalies"] == []


# -- gap theorem experiment ------------------------------------------------------------


def test_theorem3_factorial_series():
    ser = S.factorial_lacunary(101)
    rep = lab.theorem3_run(ser, S.SubsequenceSelector.arithmetic(1, 1, 100), 0.0, (-0.5, 0.5),
                           G.HalfDisc(0.0, 0.25), tol=1e-8)
    assert rep.status == "converged"
    assert rep.final_gap <= 1e-8
    assert rep.gap_ratios_increasing and rep.gap_ratios[-1] > 100
    assert rep.region_is_fat
    f0 = oracles.factorial_lacunary_at_zero()
    assert abs(rep.nt.limit - f0) <= 1e-8


def test_theorem3_aborts_without_nt_limit():
    with pytest.raises(ExperimentAborted):
        lab.theorem3_run(S.geometric(50), S.SubsequenceSelector.arithmetic(2, 2, 20), 0.0, (-1.0, 1.0),
                         G.HalfDisc(0.0, 0.25))


def test_theorem3_preconditions():
    ser = S.factorial_lacunary(20)
    sel = S.SubsequenceSelector((1, 2))
    with pytest.raises(DomainError):
        lab.theorem3_run(ser, sel, 1.0, (-0.5, 0.5), G.HalfDisc(1.0, 0.2))
    with pytest.raises(DomainError):
        lab.theorem3_run(ser, sel, 0.0, (-0.5, 0.5), G.HalfDisc(0.3, 0.2))


def test_theorem3_finite_series_trivially_converges():
    ser = S.GeneralDirichletSeries([1.0, 3.0, 9.0], [1, 1, 1])
    rep = lab.theorem3_run(ser, S.SubsequenceSelector((1, 3)), 0.0, (-1, 1), G.HalfDisc(0.0, 0.3))
    assert rep.status == "converged" and rep.final_gap == 0.0
    assert math.isinf(rep.gap_ratios[-1])


def test_theorem2_probe_geometric_stabilizes():
    ser = S.geometric(400)
    regions = [G.HalfDisc(1.0, 0.25), G.HalfDisc(2.0, 0.25)]
    h = BoundaryMeasure(atoms=((1.5, 0.5),))
    rep = lab.theorem2_probe(ser, S.SubsequenceSelector.arithmetic(2, 2, 200), 1.0, 2.0, regions, h, 0.1, levels=10)
    assert rep.stabilized
    assert np.all(np.diff(rep.rectangle_sups) >= 0)
    # away from the pole |f| <= 1/|e^{it}-1| on the axis
    assert rep.rectangle_sups[-1] <= 1 / abs(cmath.exp(1j * 1.1) - 1) + 1e-6


def test_theorem2_probe_detects_pole_growth():
    ser = S.geometric(400)
    regions = [G.HalfDisc(-0.5, 0.25), G.HalfDisc(0.5, 0.25)]
    rep = lab.theorem2_probe(ser, S.SubsequenceSelector.arithmetic(2, 2, 200), -0.5, 0.5, regions, None, 0.1, levels=10)
    assert not rep.stabilized


def test_theorem2_rejects_degenerate_rectangle():
    with pytest.raises(DomainError):
        lab.theorem2_probe(S.geometric(10), S.SubsequenceSelector((2,)), 1.0, 2.0,
                           [G.HalfDisc(1.0, 0.1), G.HalfDisc(2.0, 0.1)], None, 0.6)


# -- Taylor series with gaps -----------------------------------------------------------


def test_corollary6_identity_function():
    rep = lab.corollary6_run([0, 1], 1.0, None, (-0.5, 0.5), G.HalfDisc(0.0, 0.25))
    assert rep.status == "converged" and rep.limit == 1.0
    assert rep.taylor_values[-1] == 1.0


def test_corollary6_constant_function():
    rep = lab.corollary6_run([2.5], cmath.exp(0.3j), None, (-0.5, 0.5), G.HalfDisc(0.0, 0.25))
    assert rep.status == "converged" and rep.limit == 2.5


def test_corollary6_gapped_polynomial():
    c = np.zeros(50)
    c[[1, 3, 11, 49]] = [0.5, 0.25, 0.125, 0.0625]
    w = cmath.exp(0.4j)
    rep = lab.corollary6_run(c, w, None, (-0.5, 0.5), G.HalfDisc(0.0, 0.25))
    assert rep.p_indices == [1, 3, 11, 49]
    assert rep.status == "converged"
    f_w = sum(c[j] * w ** j for j in range(50))
    assert abs(rep.limit - f_w) < 1e-15
    for p, T in zip(rep.p_indices, rep.taylor_values):
        assert abs(T - sum(c[j] * w ** j for j in range(p + 1))) < 1e-15


def test_corollary6_rejects_non_gap_indices():
    c = np.zeros(20)
    c[[1, 5, 19]] = 1
    with pytest.raises(DomainError):
        lab.corollary6_run(c, 1.0, [2], (-0.5, 0.5), G.HalfDisc(0.0, 0.25))


def test_corollary6_no_gaps():
    with pytest.raises(DomainError):
        lab.corollary6_run(np.ones(10), 1.0, None, (-0.5, 0.5), G.HalfDisc(0.0, 0.25), finite=False)


# -- counterexample -----------------------------------------------------------------------


def test_counterexample_table():
    tab = lab.counterexample_reproduce()
    assert max(abs(z) for z in tab.zeros) <= 1e-12
    assert max(tab.mesh_max) <= math.sqrt(2) + 1e-12
    assert abs(tab.nt.limit + 0.5) <= 1e-8
    assert tab.conclusion_fails and tab.hypotheses_except_gap_hold
    # gap ratios (2k+1)/(2k) tend to 1: the missing hypothesis
    assert tab.gap_ratios[-1] == pytest.approx(41 / 40)
    rows = tab.csv_rows()
    assert len(rows) == 21
