"""Limit detectors and boundary experiments.

Two detectors feed everything here:

* ``nt_limit`` follows f along three rays of a Stolz sector at dyadically
  shrinking radii and declares convergence when the last four radii agree
  within ``tol`` across all rays.
* ``subsequence_limits`` sums S_{m_k}(it) exactly on the boundary and applies
  a windowed Cauchy test to the tail of the sequence.

Neither can prove a limit exists; both say ``undecided`` rather than guess.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import closed_forms
from .errors import DomainError, ExperimentAborted
from .geometry import HalfDisc, LatticeSup, Region, is_fat, region_sup, region_to_dict, stolz_sample
from .potential import BoundaryMeasure, poisson_integral
from .series import (
    GeneralDirichletSeries,
    SubsequenceSelector,
    derivative,
    detect_pure_ostrowski,
    evaluate,
    from_taylor,
    geometric,
    partial_sums,
)

__all__ = [
    "ConvergenceReport",
    "PointResult",
    "BoundaryScan",
    "Theorem3Report",
    "Theorem2Report",
    "Corollary6Report",
    "CounterexampleTable",
    "make_evaluator",
    "nt_limit",
    "sequence_report",
    "subsequence_limits",
    "theorem1_compare",
    "theorem3_run",
    "theorem2_probe",
    "corollary6_run",
    "counterexample_reproduce",
]

CONVERGED, DIVERGED, UNDECIDED = "converged", "diverged", "undecided"
MAX_KEPT_SAMPLES = 256


def _c(z):
    return [float(z.real), float(z.imag)]


@dataclass
class ConvergenceReport:
    status: str
    limit: complex | None
    error_estimate: float
    tol: float
    samples: list[tuple[float, complex]] = field(default_factory=list)
    route: str = ""
    diagnostic: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "limit": None if self.limit is None else _c(self.limit),
            "error_estimate": self.error_estimate,
            "tol": self.tol,
            "route": self.route,
            "diagnostic": self.diagnostic,
            "samples": [[float(p), _c(v)] for p, v in self.samples],
        }


class _EvaluationFailed(RuntimeError):
    pass


def make_evaluator(series: GeneralDirichletSeries, tol: float, prefer_closed_form: bool = True, strict: bool = True):
    """(callable, route) for f on Re s > 0.

    A registered closed form wins when ``prefer_closed_form``; otherwise the
    stored prefix is summed via ``evaluate``.  With ``strict`` an unmet
    tolerance raises, else it yields nan.
    """
    cf = closed_forms.lookup(series.closed_form) if prefer_closed_form else None
    if cf is not None:
        return cf, f"closed_form:{series.closed_form}"

    def f(s):
        res = evaluate(series, s, tol)
        if not res.tol_met:
            if strict:
                raise _EvaluationFailed(
                    f"stored prefix (N={series.N}) cannot reach tol={tol:g} at s={s!r}"
                )
            return complex(math.nan, math.nan)
        return res.value

    return f, "series" + ("" if series.finite else " (heuristic tail)")


def _diameter(vals: np.ndarray) -> float:
    d = vals[:, None] - vals[None, :]
    return float(np.max(np.abs(d)))


def nt_limit(
    f,
    t0: float,
    delta: float = math.pi / 4,
    r0: float = 0.5,
    tol: float = 1e-8,
    max_halvings: int = 60,
    evaluator: Callable[[complex], complex] | None = None,
) -> ConvergenceReport:
    """Nontangential limit of f at it0.

    ``f`` is a series (closed form used when registered, else ``evaluate``
    at tol/10) or any callable.  For a finite series the limit is the exact
    boundary value S_N(it0).  Radii are r0 2^-j; converged once the last
    four radii give values within ``tol`` of each other on all three rays.
    """
    if not 0 < delta < math.pi / 2:
        raise DomainError("delta must lie in (0, pi/2)")
    if not (r0 > 0 and tol > 0):
        raise DomainError("r0 and tol must be positive")
    if isinstance(f, GeneralDirichletSeries) and evaluator is None and f.finite:
        v = complex(partial_sums(f, [f.N], complex(0.0, t0))[0])
        return ConvergenceReport(CONVERGED, v, 0.0, tol, [(0.0, v)], "exact boundary sum")
    if evaluator is not None:
        fn, route = evaluator, "evaluator"
    elif isinstance(f, GeneralDirichletSeries):
        fn, route = make_evaluator(f, tol / 10)
    else:
        fn, route = f, "callable"

    samples: list[tuple[float, complex]] = []
    rows: list[np.ndarray] = []
    diams: list[float] = []
    for j in range(max_halvings + 1):
        r = r0 * 2.0 ** -j
        try:
            vals = np.array([complex(fn(p)) for p in stolz_sample(t0, delta, [r])])
        except OverflowError:
            return ConvergenceReport(DIVERGED, None, math.inf, tol, samples, route, f"overflow at r={r:g}")
        except (_EvaluationFailed, ZeroDivisionError) as exc:
            return ConvergenceReport(UNDECIDED, None, math.inf, tol, samples, route, f"evaluation failed at r={r:g}: {exc}")
        samples.extend((r, complex(v)) for v in vals)
        rows.append(vals)
        if not np.all(np.isfinite(vals)):
            return ConvergenceReport(DIVERGED, None, math.inf, tol, samples, route, f"non-finite value at r={r:g}")
        if len(rows) < 4:
            continue
        diam = _diameter(np.concatenate(rows[-4:]))
        diams.append(diam)
        if diam <= tol:
            return ConvergenceReport(CONVERGED, complex(vals[1]), diam, tol, samples, route)
        if len(diams) >= 8 and diam >= 1e6 * tol and all(b > a for a, b in zip(diams[-8:], diams[-7:])):
            return ConvergenceReport(DIVERGED, None, diam, tol, samples, route, "window diameter grows without bound")
    diam = diams[-1]
    if diam >= 10 * tol:
        return ConvergenceReport(DIVERGED, None, diam, tol, samples, route, f"oscillation {diam:.3g} at r={r:g}")
    return ConvergenceReport(UNDECIDED, None, diam, tol, samples, route, "window never closed below tol")


def _thin(n: int, keep: set[int]) -> list[int]:
    if n <= MAX_KEPT_SAMPLES:
        return list(range(n))
    idx = set(np.unique(np.geomspace(1, n, MAX_KEPT_SAMPLES // 2).astype(int) - 1).tolist())
    idx |= set(range(max(0, n - 64), n)) | keep
    return sorted(idx)


def sequence_report(params: Sequence[float], values: np.ndarray, tol: float, exact: bool = False) -> ConvergenceReport:
    """Windowed Cauchy test on a sequence (one value per subsequence index).

    Converged when the last half of the samples (at least four) lies within
    ``tol``; diverged when the last quarter (at least four) holds a pair at
    distance >= 10 tol; otherwise undecided.  ``exact`` marks a sequence that
    is constant from its last element on (finite series summed to N).
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    params = list(params)
    if exact:
        keep = _thin(n, set())
        return ConvergenceReport(CONVERGED, complex(values[-1]), 0.0, tol,
                                 [(params[i], complex(values[i])) for i in keep], "exact (series ends at N)")
    if n < 4:
        return ConvergenceReport(UNDECIDED, None, math.inf, tol,
                                 [(params[i], complex(values[i])) for i in range(n)], "", "fewer than 4 samples")
    half = values[-max(4, math.ceil(n / 2)):]
    spread = _bbox_spread(half)
    if spread <= tol:
        keep = _thin(n, set())
        return ConvergenceReport(CONVERGED, complex(values[-1]), spread, tol,
                                 [(params[i], complex(values[i])) for i in keep], "")
    start = n - max(4, math.ceil(n / 4))
    quarter = values[start:]
    i, j, gap = _witness(quarter)
    keep = _thin(n, {start + i, start + j})
    samples = [(params[k], complex(values[k])) for k in keep]
    if gap >= 10 * tol:
        return ConvergenceReport(DIVERGED, None, gap, tol, samples, "",
                                 f"witness m={params[start + i]}, m={params[start + j]} differ by {gap:.3g}")
    return ConvergenceReport(UNDECIDED, None, spread, tol, samples, "", "tail spread between tol and 10 tol")


def _bbox_spread(v: np.ndarray) -> float:
    # upper bound for the diameter of the point set (bounding-box diagonal)
    return float(math.hypot(np.ptp(v.real), np.ptp(v.imag)))


def _witness(v: np.ndarray) -> tuple[int, int, float]:
    # a pair whose distance is at least the wider bounding-box side
    pairs = [(int(np.argmin(v.real)), int(np.argmax(v.real))), (int(np.argmin(v.imag)), int(np.argmax(v.imag)))]
    best = max(pairs, key=lambda p: abs(v[p[0]] - v[p[1]]))
    return best[0], best[1], float(abs(v[best[0]] - v[best[1]]))


@dataclass
class PointResult:
    t: float
    subsequence: ConvergenceReport
    nt: ConvergenceReport | None = None
    gap: float | None = None
    anomaly: bool = False
    isolated: bool = False

    def to_dict(self):
        return {
            "t": self.t,
            "subsequence": self.subsequence.to_dict(),
            "nt": None if self.nt is None else self.nt.to_dict(),
            "gap": self.gap,
            "anomaly": self.anomaly,
            "isolated": self.isolated,
        }


@dataclass
class BoundaryScan:
    grid: list[float]
    per_point: list[PointResult]
    comparison: dict = field(default_factory=dict)

    def point(self, t: float) -> PointResult:
        for p in self.per_point:
            if p.t == t:
                return p
        raise KeyError(t)

    def to_dict(self):
        return {"grid": self.grid, "per_point": [p.to_dict() for p in self.per_point], "comparison": self.comparison}

    def csv_rows(self):
        head = ["t", "S_status", "S_re", "S_im", "S_err", "f_status", "f_re", "f_im", "f_err", "gap", "anomaly", "isolated"]
        rows = [head]
        for p in self.per_point:
            s, f = p.subsequence, p.nt
            rows.append([
                p.t, s.status, *(_c(s.limit) if s.limit is not None else ["", ""]), s.error_estimate,
                *( [f.status, *(_c(f.limit) if f.limit is not None else ["", ""]), f.error_estimate] if f else ["", "", "", ""]),
                "" if p.gap is None else p.gap, int(p.anomaly), int(p.isolated),
            ])
        return rows


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _boundary_sequence(series, sel, t, tol):
    m = sel.array()
    vals = partial_sums(series, m, complex(0.0, t))
    exact = series.finite and int(m[-1]) == series.N
    return sequence_report(m.tolist(), vals, tol, exact=exact)


def subsequence_limits(series: GeneralDirichletSeries, sel: SubsequenceSelector, grid: Sequence[float], tol: float, threads: int = 1) -> BoundaryScan:
    """For each t in ``grid``, classify lim_k S_{m_k}(it) (exact boundary sums)."""
    grid = [float(t) for t in grid]
    if not grid:
        raise DomainError("grid is empty")
    sel.check(series)
    reports = _map(lambda t: _boundary_sequence(series, sel, t, tol), grid, threads)
    return BoundaryScan(grid, [PointResult(t, r) for t, r in zip(grid, reports)])


def theorem1_compare(
    series: GeneralDirichletSeries,
    sel: SubsequenceSelector,
    grid: Sequence[float],
    delta: float = math.pi / 4,
    tol: float = 1e-8,
    r0: float = 0.5,
    threads: int = 1,
) -> BoundaryScan:
    """Compare subsequence limits S with nontangential limits f on the grid.

    ``comparison`` holds max and mean of |S - f| over points where both
    detectors converged.  Points with |S - f| > 10 tol are anomalies; an
    anomaly is ``isolated`` when no grid neighbour reproduces it.
    """
    scan = subsequence_limits(series, sel, grid, tol, threads)
    nts = _map(lambda t: nt_limit(series, t, delta, r0, tol), scan.grid, threads)
    for p, nt in zip(scan.per_point, nts):
        p.nt = nt
        if p.subsequence.converged and nt.converged:
            p.gap = float(abs(p.subsequence.limit - nt.limit))
            p.anomaly = p.gap > 10 * tol
    pts = scan.per_point
    for i, p in enumerate(pts):
        if p.anomaly:
            nbrs = [pts[j] for j in (i - 1, i + 1) if 0 <= j < len(pts)]
            p.isolated = all(not q.anomaly for q in nbrs)
    gaps = [p.gap for p in pts if p.gap is not None]
    scan.comparison = {
        "points_in_E_and_F": len(gaps),
        "max": max(gaps) if gaps else None,
        "mean": float(np.mean(gaps)) if gaps else None,
        "anomalies": [p.t for p in pts if p.anomaly],
        "isolated": [p.t for p in pts if p.isolated],
        "statistic": "max and mean of |S - f| over grid points where both detectors converged",
    }
    return scan


# -- gap theorem experiment ----------------------------------------------


@dataclass
class Theorem3Report:
    t0: float
    status: str
    gaps: list[float]
    entry_k: int | None
    nt: ConvergenceReport
    gap_ratios: list[float]
    gap_ratios_increasing: bool
    interval_sup: float
    derivative_sup: LatticeSup
    region_is_fat: bool
    region: dict
    indices: list[int]
    boundary_values: list[complex]
    evaluator_route: str = ""

    @property
    def final_gap(self) -> float:
        return self.gaps[-1]

    def to_dict(self):
        d = {k: v for k, v in asdict(self).items() if k not in ("nt", "derivative_sup", "boundary_values")}
        d["gap_ratios"] = [None if math.isinf(r) else r for r in self.gap_ratios]
        d["nt"] = self.nt.to_dict()
        d["derivative_sup"] = {"value": self.derivative_sup.value, "mesh": self.derivative_sup.mesh,
                               "points": self.derivative_sup.points, "failures": self.derivative_sup.failures}
        d["boundary_values"] = [_c(v) for v in self.boundary_values]
        d["final_gap"] = self.final_gap
        return d

    def csv_rows(self):
        rows = [["k", "m_k", "gap_ratio", "S_re", "S_im", "gap"]]
        for k, (m, r, v, g) in enumerate(zip(self.indices, self.gap_ratios, self.boundary_values, self.gaps), 1):
            rows.append([k, m, "inf" if math.isinf(r) else r, v.real, v.imag, g])
        return rows


def _safe_gap_ratios(series, sel) -> list[float]:
    lam = series.exponents
    out = []
    for m in sel.indices:
        if m >= series.N:
            out.append(math.inf)
        elif lam[m - 1] == 0:
            out.append(math.inf)
        else:
            out.append(float(lam[m] / lam[m - 1]))
    return out


def _conclusion(gaps: np.ndarray, tol: float) -> tuple[str, int | None]:
    above = np.flatnonzero(gaps > tol)
    if above.size == 0:
        return CONVERGED, 1
    last_above = int(above[-1])
    if last_above < gaps.size - 1:
        return CONVERGED, last_above + 2
    tail = gaps[-max(1, math.ceil(gaps.size / 4)):]
    if np.all(tail >= 10 * tol):
        return DIVERGED, None
    return UNDECIDED, None


def theorem3_run(
    series: GeneralDirichletSeries,
    sel: SubsequenceSelector,
    t0: float,
    interval: tuple[float, float],
    region: Region,
    tol: float = 1e-8,
    mesh: float = 0.05,
    interval_points: int = 401,
    delta: float = math.pi / 4,
    r0: float = 0.5,
) -> Theorem3Report:
    """Audit the hypotheses and check S_{m_k}(it0) -> f(it0).

    Hypotheses are reported, not enforced: sup of |S_{m_k}| on the interval,
    lattice sup of |f'| over the region, gap ratios lambda_{m_k+1}/lambda_{m_k}
    and their monotone growth, fatness of the region.  f(it0) comes from
    ``nt_limit``; the conclusion is converged when |S_{m_k}(it0) - f(it0)|
    falls below ``tol`` and stays there.
    """
    lo, hi = interval
    if not lo < t0 < hi:
        raise DomainError(f"t0={t0} is not inside the interval ({lo}, {hi})")
    if region.t0 != t0:
        raise DomainError(f"region is attached to it0={region.t0}, not {t0}")
    sel.check(series)
    m = sel.array()

    ratios = _safe_gap_ratios(series, sel)
    finite_ratios = [r for r in ratios if math.isfinite(r)]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))

    ts = np.linspace(lo, hi, interval_points)
    isup = max(float(np.max(np.abs(partial_sums(series, m, complex(0.0, t))))) for t in ts)

    dseries = derivative(series)
    fprime, route = make_evaluator(dseries, min(tol, 1e-8), strict=False)
    dsup = region_sup(fprime, region, mesh)

    nt = nt_limit(series, t0, delta, r0, tol)
    if not nt.converged:
        raise ExperimentAborted(f"nontangential limit at i*{t0} is {nt.status}: {nt.diagnostic}")
    vals = partial_sums(series, m, complex(0.0, t0))
    gaps = np.abs(vals - nt.limit)
    status, entry = _conclusion(gaps, tol)
    return Theorem3Report(
        t0=t0, status=status, gaps=gaps.tolist(), entry_k=entry, nt=nt,
        gap_ratios=ratios, gap_ratios_increasing=increasing and bool(finite_ratios or ratios),
        interval_sup=isup, derivative_sup=dsup, region_is_fat=is_fat(region),
        region=region_to_dict(region), indices=m.tolist(), boundary_values=[complex(v) for v in vals],
        evaluator_route=route,
    )


# -- rectangle boundedness probe ------------------------------------------


@dataclass
class Theorem2Report:
    t1: float
    t2: float
    rect_eps: float
    region_sups: list[float]
    interval_sup: float
    sigma_levels: list[float]
    rectangle_sups: list[float]
    stabilized: bool
    route: str

    def to_dict(self):
        return asdict(self)

    def csv_rows(self):
        rows = [["sigma_min", "rectangle_sup"]]
        rows += [[s, v] for s, v in zip(self.sigma_levels, self.rectangle_sups)]
        return rows


def theorem2_probe(
    series: GeneralDirichletSeries,
    sel: SubsequenceSelector,
    t1: float,
    t2: float,
    regions: Sequence[Region],
    h: BoundaryMeasure | None,
    rect_eps: float,
    mesh: float = 0.05,
    levels: int = 12,
    interval_pad: float | None = None,
    tol: float = 1e-10,
    stable_rel: float = 1e-2,
) -> Theorem2Report:
    """Boundedness trend of f on {sigma_min <= sigma < 1, t1+eps < t < t2-eps}.

    Reports lattice sups of e^-h |f| on the two regions, the sup of
    |S_{m_k}| on [t1 - pad, t2 + pad], and the rectangle sup of |f| for
    sigma_min = 2^-1 .. 2^-levels; each row at height sigma is sampled in t
    with spacing min(mesh, sigma).  ``stabilized`` means the last step grew
    the sup by less than ``stable_rel`` (relative): a trend, not a proof.
    """
    if not t1 < t2:
        raise DomainError("need t1 < t2")
    if not 0 < rect_eps < (t2 - t1) / 2:
        raise DomainError("rectangle is degenerate: need 0 < eps < (t2 - t1)/2")
    if len(regions) != 2:
        raise DomainError("exactly two regions are required")
    sel.check(series)
    f, route = make_evaluator(series, tol, strict=False)
    h = h or BoundaryMeasure()

    def damped(s):
        return f(s) * math.exp(-poisson_integral(h, s)) if h.atoms or h.breakpoints else f(s)

    region_sups = [region_sup(damped, r, mesh).value for r in regions]

    pad = rect_eps if interval_pad is None else interval_pad
    m = sel.array()
    ts_cover = np.arange(t1 - pad, t2 + pad + mesh / 2, mesh / 4)
    isup = max(float(np.max(np.abs(partial_sums(series, m, complex(0.0, t))))) for t in ts_cover)

    sig_lin = list(np.arange(mesh, 1.0, mesh))
    levels_sig = [2.0 ** -j for j in range(1, levels + 1)]
    row_max = {}
    for sig in sorted(set(sig_lin) | set(levels_sig), reverse=True):
        # features at height sigma have width ~sigma: refine t with sigma
        step = min(mesh, sig)
        n_t = max(2, int(math.ceil((t2 - t1 - 2 * rect_eps) / step)))
        ts = np.linspace(t1 + rect_eps, t2 - rect_eps, n_t + 2)[1:-1]
        row_max[sig] = float(np.nanmax([abs(f(complex(sig, t))) for t in ts]))
    sups = []
    for lvl in levels_sig:
        sups.append(max(v for s, v in row_max.items() if s >= lvl))
    stabilized = sups[-1] <= sups[-2] * (1 + stable_rel) if len(sups) > 1 else False
    return Theorem2Report(t1, t2, rect_eps, region_sups, isup, levels_sig, sups, bool(stabilized), route)


# -- Taylor series with Ostrowski gaps ---------------------------------------


@dataclass
class Corollary6Report:
    w: complex
    gap_pairs: list[tuple[int, float]]
    p_indices: list[int]
    status: str
    limit: complex
    taylor_values: list[complex]
    theorem3: Theorem3Report

    def to_dict(self):
        return {
            "w": _c(self.w),
            "gap_pairs": [[p, None if math.isinf(q) else q] for p, q in self.gap_pairs],
            "p_indices": self.p_indices,
            "status": self.status,
            "limit": _c(self.limit),
            "taylor_values": [_c(v) for v in self.taylor_values],
            "theorem3": self.theorem3.to_dict(),
        }

    def csv_rows(self):
        rows = [["k", "p_k", "T_re", "T_im", "gap"]]
        for k, (p, v, g) in enumerate(zip(self.p_indices, self.taylor_values, self.theorem3.gaps), 1):
            rows.append([k, p, v.real, v.imag, g])
        return rows


def corollary6_run(
    taylor_coeffs: Sequence[complex],
    w: complex,
    sel: Sequence[int] | None,
    arc: tuple[float, float],
    region: Region,
    tol: float = 1e-8,
    ratio_min: float = 2.0,
    finite: bool = True,
    mesh: float = 0.05,
) -> Corollary6Report:
    """Check T_{p_k}(w) -> f(w) for a Taylor series with pure Ostrowski gaps.

    ``arc`` is an angular window (alpha, beta) with alpha < 0 < beta: the
    boundary arc {w e^{i theta}}.  Under z = w e^{-s} it becomes the interval
    (-beta, -alpha) of the imaginary axis, and ``region`` is an approach
    region to s = 0.  For a finite (polynomial) coefficient list the run of
    zeros after the last nonzero coefficient counts as a final gap.
    """
    c = np.asarray(taylor_coeffs, dtype=complex)
    report = detect_pure_ostrowski(c, ratio_min)
    pairs: list[tuple[int, float]] = [(p, float(q)) for p, q in report.pairs]
    nz = np.flatnonzero(c)
    if finite:
        pairs.append((max(int(nz[-1]), 1), math.inf))
    if not pairs:
        raise DomainError(f"no pure Ostrowski gaps with ratio >= {ratio_min}")
    gap_ps = [p for p, _ in pairs]
    ps = gap_ps if sel is None else [int(p) for p in sel]
    unknown = [p for p in ps if p not in gap_ps]
    if unknown:
        raise DomainError(f"indices {unknown} are not left ends of detected gaps {gap_ps}")
    alpha, beta = arc
    if not alpha < 0 < beta:
        raise DomainError("arc must contain w: need alpha < 0 < beta")

    g = from_taylor(c, w, finite).drop_zero_terms()
    # T_p = S_m with m = number of stored nonzero terms of degree <= p
    ms = [max(1, int(np.searchsorted(g.exponents, p, side="right"))) for p in ps]
    t3 = theorem3_run(g, SubsequenceSelector(tuple(ms)), 0.0, (-beta, -alpha), region, tol, mesh=mesh)
    ratios = {p: (q + 1) / p for p, q in pairs}
    t3.gap_ratios = [ratios[p] for p in ps]
    t3.gap_ratios_increasing = all(b > a for a, b in zip(t3.gap_ratios, t3.gap_ratios[1:]))
    return Corollary6Report(complex(w), pairs, ps, t3.status, t3.nt.limit, t3.boundary_values, t3)


# -- the (e^s - 1)^-1 counterexample -------------------------------------


@dataclass
class CounterexampleTable:
    ks: list[int]
    zeros: list[complex]
    mesh_max: list[float]
    bound: float
    nt: ConvergenceReport
    region_derivative_sup: float
    gap_ratios: list[float]
    conclusion_fails: bool
    hypotheses_except_gap_hold: bool

    def to_dict(self):
        return {
            "ks": self.ks,
            "S_2k_at_i_pi": [_c(z) for z in self.zeros],
            "mesh_max_abs_S_2k": self.mesh_max,
            "bound_sqrt2": self.bound,
            "nt_limit": self.nt.to_dict(),
            "region_derivative_sup": self.region_derivative_sup,
            "gap_ratios": self.gap_ratios,
            "conclusion_fails": self.conclusion_fails,
            "hypotheses_except_gap_hold": self.hypotheses_except_gap_hold,
        }

    def csv_rows(self):
        rows = [["k", "m_k", "S_re", "S_im", "abs_S", "mesh_max_abs_S", "bound_sqrt2", "nt_limit_re", "nt_limit_im", "gap_ratio"]]
        for k, z, mm, r in zip(self.ks, self.zeros, self.mesh_max, self.gap_ratios):
            rows.append([k, 2 * k, z.real, z.imag, abs(z), mm, self.bound,
                         self.nt.limit.real, self.nt.limit.imag, r])
        return rows


def counterexample_reproduce(kmax: int = 20, mesh_points: int = 1000, tol: float = 1e-9) -> CounterexampleTable:
    """f(s) = 1/(e^s - 1) = sum e^{-ns}, m_k = 2k, zeta = i pi.

    The partial sums vanish at i pi and stay below sqrt 2 on (pi/2, 3pi/2),
    f' is bounded near i pi, yet f(i pi) = -1/2: only the gap condition fails.
    """
    series = geometric(2 * kmax + 1)
    m = np.arange(2, 2 * kmax + 1, 2)
    zeros = partial_sums(series, m, complex(0.0, math.pi))
    ts = np.linspace(math.pi / 2, 3 * math.pi / 2, mesh_points + 2)[1:-1]
    mesh_max = np.zeros(m.size)
    for t in ts:
        mesh_max = np.maximum(mesh_max, np.abs(partial_sums(series, m, complex(0.0, t))))
    nt = nt_limit(series, math.pi, tol=tol)
    fprime = closed_forms.lookup("geometric'")
    dsup = region_sup(fprime, HalfDisc(math.pi, math.pi / 4), 0.02).value
    lam = series.exponents
    ratios = (lam[m] / lam[m - 1]).tolist()
    bound = math.sqrt(2.0)
    gaps = np.abs(zeros - nt.limit) if nt.converged else np.full(m.size, math.nan)
    fails = bool(nt.converged and np.all(gaps > 10 * tol))
    hyp = bool(np.all(mesh_max <= bound + 1e-12) and math.isfinite(dsup))
    return CounterexampleTable(list(range(1, kmax + 1)), [complex(z) for z in zeros], mesh_max.tolist(),
                               bound, nt, dsup, ratios, fails, hyp)
