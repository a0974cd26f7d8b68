"""General Dirichlet series  f(s) = sum_n a_n exp(-lambda_n s)  on a stored prefix.

A series is an immutable pair of arrays (exponents, coefficients) plus a flag
saying whether the stored prefix *is* the whole series (``finite=True``) or a
truncation of an infinite one.  Certified statements (tail bounds, evaluation
tolerances) are only certified for finite series; for truncated series they
are computed from the stored prefix and marked heuristic.

Points of the plane are plain Python ``complex`` numbers, s = sigma + i t.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .errors import DomainError, ValidationError

__all__ = [
    "GeneralDirichletSeries",
    "SubsequenceSelector",
    "EvaluationResult",
    "OstrowskiGapReport",
    "partial_sum",
    "partial_sums",
    "tail_bound",
    "tail_bounds",
    "evaluate",
    "derivative",
    "from_taylor",
    "gap_ratio_sequence",
    "high_indices_check",
    "detect_pure_ostrowski",
    "normalized_remainder",
    "abscissa_estimate",
    "geometric",
    "ordinary",
    "zeta_shift",
    "factorial_lacunary",
    "power_lacunary",
    "series_to_dict",
    "series_from_dict",
    "dumps_series",
    "loads_series",
]


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeneralDirichletSeries:
    exponents: np.ndarray
    coefficients: np.ndarray
    finite: bool = True
    closed_form: str | None = None

    def __post_init__(self):
        lam = _frozen(self.exponents, np.float64)
        a = _frozen(self.coefficients, np.complex128)
        if lam.size == 0:
            raise ValidationError("series needs at least one term")
        if lam.size != a.size:
            raise ValidationError(
                f"{lam.size} exponents but {a.size} coefficients"
            )
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(a))):
            raise ValidationError("exponents and coefficients must be finite")
        if lam[0] < 0:
            raise ValidationError(f"exponent 1 is negative ({lam[0]!r})")
        bad = np.flatnonzero(np.diff(lam) <= 0)
        if bad.size:
            n = int(bad[0]) + 2
            raise ValidationError(
                f"exponents not strictly increasing at index {n} (1-based): "
                f"lambda_{n - 1}={float(lam[n - 2])!r} >= lambda_{n}={float(lam[n - 1])!r}"
            )
        object.__setattr__(self, "exponents", lam)
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "finite", bool(self.finite))

    @property
    def N(self) -> int:
        return int(self.exponents.size)

    def __len__(self):
        return self.N

    def __repr__(self):
        kind = "finite" if self.finite else "truncated"
        tag = f", closed_form={self.closed_form!r}" if self.closed_form else ""
        return f"GeneralDirichletSeries(N={self.N}, {kind}{tag})"

    def drop_zero_terms(self) -> "GeneralDirichletSeries":
        """Same function with the zero-coefficient terms removed."""
        keep = self.coefficients != 0
        if not keep.any():
            keep[0] = True
        return GeneralDirichletSeries(
            self.exponents[keep], self.coefficients[keep], self.finite, self.closed_form
        )


@dataclass(frozen=True)
class SubsequenceSelector:
    """Strictly increasing partial-sum indices m_1 < m_2 < ... (1-based)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(m) for m in self.indices)
        if not idx:
            raise ValidationError("selector is empty")
        if idx[0] < 1:
            raise ValidationError(f"selector index 1 is {idx[0]} (< 1)")
        for k in range(1, len(idx)):
            if idx[k] <= idx[k - 1]:
                raise ValidationError(
                    f"selector not strictly increasing at k={k + 1}: "
                    f"{idx[k - 1]} >= {idx[k]}"
                )
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, N: int) -> "SubsequenceSelector":
        return cls(tuple(range(1, N + 1)))

    @classmethod
    def arithmetic(cls, start: int, step: int, count: int) -> "SubsequenceSelector":
        return cls(tuple(start + step * k for k in range(count)))

    def __len__(self):
        return len(self.indices)

    def check(self, series: GeneralDirichletSeries, strict_below_N: bool = False):
        top = self.indices[-1]
        limit = series.N - 1 if strict_below_N else series.N
        if top > limit:
            raise IndexError(
                f"selector index {top} exceeds the stored prefix (N={series.N})"
            )

    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


@dataclass(frozen=True)
class EvaluationResult:
    value: complex
    terms_used: int
    tail_bound: float
    tol_met: bool
    heuristic: bool = False


@dataclass(frozen=True)
class OstrowskiGapReport:
    pairs: list[tuple[int, int]] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)


# -- summation ---------------------------------------------------------------


def partial_sums(series: GeneralDirichletSeries, ms: Iterable[int], s: complex) -> np.ndarray:
    """S_m(s) for each m in ``ms`` (nondecreasing), one compensated pass."""
    idx = np.asarray(list(ms) if not isinstance(ms, np.ndarray) else ms, dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > series.N):
        raise IndexError(f"partial-sum index out of range 1..{series.N}")
    if idx.size > 1 and np.any(np.diff(idx) < 0):
        raise ValueError("partial-sum indices must be nondecreasing")
    s = complex(s)
    return _backend.partial_sums(
        series.exponents, series.coefficients, s.real, s.imag, np.ascontiguousarray(idx)
    )


def partial_sum(series: GeneralDirichletSeries, m: int, s: complex) -> complex:
    """S_m(s) = sum_{n<=m} a_n exp(-lambda_n s), summed in increasing n."""
    if not 1 <= m <= series.N:
        raise IndexError(f"m={m} outside 1..{series.N}")
    return complex(partial_sums(series, [m], s)[0])


_TINY = float(np.nextafter(0.0, 1.0))


def _check_sigma_eps(sigma, eps):
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    if eps >= sigma:
        raise DomainError(f"eps={eps!r} >= sigma={sigma!r}: tail bound invalid")


def tail_bounds(series: GeneralDirichletSeries, sigma: float, eps: float) -> np.ndarray:
    """B(m, sigma, eps) for m = 1..N (entry m-1).

    B(m) = exp(lambda_{m+1}(eps - sigma)) * sum_{n>m} |a_n| exp(-lambda_n eps),
    computed in log space and inflated by a rounding allowance so the float
    result never falls below the exact value.  Entry N is 0 for finite series and +inf (no
    information) for truncated ones.
    """
    _check_sigma_eps(sigma, eps)
    lam = series.exponents
    with np.errstate(divide="ignore"):
        logterm = np.log(np.abs(series.coefficients)) - lam * eps
    suffix = np.logaddexp.accumulate(logterm[::-1])[::-1]
    out = np.empty(series.N)
    arg = lam[1:] * (eps - sigma) + suffix[1:]
    # rounding allowance: the exponent carries absolute error ~u * (magnitudes summed),
    # and a one-term tail makes the exact bound tight
    finite_log = logterm[np.isfinite(logterm)]
    scale = np.abs(lam[1:] * (eps - sigma)) + np.abs(suffix[1:]) + (np.max(np.abs(finite_log)) if finite_log.size else 0.0)
    slack = 16 * np.finfo(float).eps * (scale + math.log(series.N) + 1.0)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        # one subnormal ulp on top keeps the bound sound where exp underflows
        out[:-1] = np.where(np.isneginf(suffix[1:]), 0.0, np.exp(arg + slack) + _TINY)
    out[-1] = 0.0 if series.finite else math.inf
    return out


def tail_bound(series: GeneralDirichletSeries, m: int, sigma: float, eps: float) -> float:
    """Bound on |f(s) - S_m(s)| on the line Re s = sigma (see ``tail_bounds``)."""
    if not 1 <= m <= series.N:
        raise IndexError(f"m={m} outside 1..{series.N}")
    return float(tail_bounds(series, sigma, eps)[m - 1])


def evaluate(series: GeneralDirichletSeries, s: complex, tol: float) -> EvaluationResult:
    """f(s) for Re s > 0 to absolute tolerance ``tol``.

    A finite series is summed in full (tail bound 0).  Otherwise uses the
    smallest stored m whose tail bound (eps = sigma/2) is within ``tol``;
    running out of stored terms is reported through ``tol_met``.
    """
    s = complex(s)
    sigma = s.real
    if not sigma > 0:
        raise DomainError(f"evaluate needs Re s > 0, got {sigma!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if series.finite:
        # the whole series is stored: the full sum is exact and never costlier
        return EvaluationResult(partial_sum(series, series.N, s), series.N, 0.0, True, False)
    B = tail_bounds(series, sigma, sigma / 2)
    ok = np.flatnonzero(B <= tol)
    if ok.size:
        m = int(ok[0]) + 1
        bound = float(B[m - 1])
        met = True
    else:
        m = series.N
        bound = math.inf
        met = False
    return EvaluationResult(
        value=partial_sum(series, m, s),
        terms_used=m,
        tail_bound=bound,
        tol_met=met,
        heuristic=not series.finite,
    )


# -- transformations ---------------------------------------------------------


def derivative(series: GeneralDirichletSeries) -> GeneralDirichletSeries:
    """Termwise derivative: a_n -> -lambda_n a_n on the same exponents."""
    tag = series.closed_form + "'" if series.closed_form else None
    return GeneralDirichletSeries(
        series.exponents, -series.exponents * series.coefficients, series.finite, tag
    )


def from_taylor(coeffs: Sequence[complex], w: complex = 1.0, finite: bool = True) -> GeneralDirichletSeries:
    """g(s) = f(w e^{-s}) for f(z) = sum_j c_j z^j.

    Term j of the Taylor series becomes exponent j with coefficient c_j w^j,
    so T_j(w e^{-s}) (Taylor sum up to and including z^j) equals the
    Dirichlet partial sum through exponent j.  Leading zero coefficients
    are dropped; zeros inside gaps are kept.
    """
    c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    if c.size == 0:
        raise DomainError("empty coefficient list")
    w = complex(w)
    if abs(abs(w) - 1.0) > 1e-12:
        raise DomainError(f"|w| must be 1, got {abs(w)!r}")
    j = np.arange(c.size)
    nz = np.flatnonzero(c)
    first = int(nz[0]) if nz.size else 0
    a = c * w ** j
    return GeneralDirichletSeries(j[first:].astype(float), a[first:], finite)


# -- gap structure -----------------------------------------------------------


def gap_ratio_sequence(series: GeneralDirichletSeries, sel: SubsequenceSelector) -> np.ndarray:
    """lambda_{m_k + 1} / lambda_{m_k} for each k."""
    sel.check(series, strict_below_N=True)
    m = sel.array()
    lam = series.exponents
    bottom = lam[m - 1]
    zero = np.flatnonzero(bottom == 0)
    if zero.size:
        k = int(zero[0]) + 1
        raise DomainError(f"lambda_(m_k) = 0 at k={k} (m_k={int(m[k - 1])})")
    return lam[m] / bottom


def high_indices_check(series: GeneralDirichletSeries) -> tuple[float, bool]:
    """(inf_n lambda_{n+1}/lambda_n over the prefix, whether it exceeds 1)."""
    lam = series.exponents
    if lam[0] == 0:
        raise DomainError("high-indices ratio undefined with lambda_1 = 0")
    if series.N < 2:
        raise DomainError("need at least two exponents")
    q = float(np.min(lam[1:] / lam[:-1]))
    return q, q > 1.0


def detect_pure_ostrowski(coeffs: Sequence[complex], ratio_min: float = 2.0) -> OstrowskiGapReport:
    """Maximal zero runs (p, q) of Taylor coefficients with q/p >= ratio_min.

    ``coeffs[j]`` multiplies z^j.  A pair means c_n = 0 for p+1 <= n <= q with
    c_p != 0 != c_{q+1}; runs not closed by a later nonzero coefficient are
    ignored, as are runs starting at p = 0.  Only exact zeros count.
    """
    if not ratio_min > 1:
        raise DomainError(f"ratio_min must exceed 1, got {ratio_min!r}")
    c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise DomainError("all coefficients are zero")
    pairs, ratios = [], []
    for p, nxt in zip(nz[:-1].tolist(), nz[1:].tolist()):
        if nxt > p + 1 and p >= 1:
            q = nxt - 1
            if q / p >= ratio_min:
                pairs.append((p, q))
                ratios.append(q / p)
    return OstrowskiGapReport(pairs, ratios)


# -- diagnostics -------------------------------------------------------------


def normalized_remainder(series: GeneralDirichletSeries, m: int, s: complex, f_value: complex | None = None) -> float:
    """u_m(s) = log|S_m(s) - f(s)| / lambda_{m+1}.

    ``f_value`` defaults to the full stored sum, exact for finite series.
    """
    if not 1 <= m < series.N:
        raise IndexError(f"m={m} must satisfy 1 <= m < N={series.N}")
    if f_value is None:
        f_value = partial_sum(series, series.N, s)
    diff = abs(partial_sum(series, m, s) - f_value)
    lam = series.exponents[m]
    if lam == 0:
        raise DomainError("lambda_{m+1} = 0")
    return -math.inf if diff == 0 else math.log(diff) / lam


def abscissa_estimate(series: GeneralDirichletSeries) -> float:
    """Prefix surrogate for limsup log(sum_{n<=m} |a_n|) / lambda_m.

    Maximum over the last half of the stored prefix (m with lambda_m > 0).
    Only a diagnostic: the true abscissa depends on the infinite tail.
    """
    lam = series.exponents
    cum = np.cumsum(np.abs(series.coefficients))
    ok = (lam > 0) & (cum > 0)
    ok[: series.N // 2] = False
    if not ok.any():
        return math.nan
    return float(np.max(np.log(cum[ok]) / lam[ok]))


# -- standard families -------------------------------------------------------


def geometric(N: int) -> GeneralDirichletSeries:
    """sum_{n>=1} e^{-ns} = 1/(e^s - 1), first N terms."""
    n = np.arange(1, N + 1, dtype=float)
    return GeneralDirichletSeries(n, np.ones(N), finite=False, closed_form="geometric")


def ordinary(coeffs: Sequence[complex], finite: bool = True, closed_form: str | None = None) -> GeneralDirichletSeries:
    """sum a_n n^{-s}, i.e. exponents log n."""
    a = np.asarray(coeffs, dtype=np.complex128)
    lam = np.log(np.arange(1, a.size + 1, dtype=float))
    return GeneralDirichletSeries(lam, a, finite, closed_form)


def zeta_shift(shift: float, N: int) -> GeneralDirichletSeries:
    """sum n^{-shift} n^{-s} = zeta(s + shift), first N terms."""
    n = np.arange(1, N + 1, dtype=float)
    return ordinary(n ** -float(shift), finite=False, closed_form=f"zeta_shift:{shift:g}")


def factorial_lacunary(N: int, base: float = 2.0) -> GeneralDirichletSeries:
    """a_k = base^{-k}/k!, lambda_k = k!  (k = 1..N); sum |a_k| lambda_k < inf."""
    k = np.arange(1, N + 1)
    lam = np.array([float(math.factorial(int(j))) for j in k])
    a = np.array([base ** -float(j) / lam[i] for i, j in enumerate(k)])
    return GeneralDirichletSeries(lam, a, finite=False)


def power_lacunary(N: int, base: float = 2.0, coef_base: float = 3.0) -> GeneralDirichletSeries:
    """lambda_n = base^n, a_n = coef_base^{-n}  (n = 1..N): Hadamard gaps."""
    n = np.arange(1, N + 1, dtype=float)
    return GeneralDirichletSeries(base ** n, coef_base ** -n, finite=False)


# -- interchange format ------------------------------------------------------


def series_to_dict(series: GeneralDirichletSeries) -> dict:
    return {
        "exponents": [float(x) for x in series.exponents],
        "coefficients": [[float(z.real), float(z.imag)] for z in series.coefficients],
        "finite": series.finite,
        "closed_form": series.closed_form,
    }


def series_from_dict(d: dict) -> GeneralDirichletSeries:
    try:
        lam = d["exponents"]
        coef = d["coefficients"]
    except KeyError as exc:
        raise ValidationError(f"series object lacks key {exc.args[0]!r}") from None
    a = []
    for i, c in enumerate(coef):
        if isinstance(c, (int, float)):
            a.append(complex(c))
        elif isinstance(c, (list, tuple)) and len(c) == 2:
            a.append(complex(c[0], c[1]))
        else:
            raise ValidationError(f"coefficient {i + 1} is not [re, im]: {c!r}")
    return GeneralDirichletSeries(lam, a, bool(d.get("finite", True)), d.get("closed_form"))


def dumps_series(series: GeneralDirichletSeries) -> str:
    """Interchange JSON; exponents written with 17 significant digits."""
    exps = ", ".join(format(float(x), ".17g") for x in series.exponents)
    coefs = json.dumps(series_to_dict(series)["coefficients"])
    return (
        '{"exponents": [' + exps + '], "coefficients": ' + coefs
        + ', "finite": ' + json.dumps(series.finite)
        + ', "closed_form": ' + json.dumps(series.closed_form) + "}"
    )


def loads_series(text: str) -> GeneralDirichletSeries:
    return series_from_dict(json.loads(text))
