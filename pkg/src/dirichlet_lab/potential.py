"""Half-plane potential theory: Poisson kernel and integrals, the Green
function of the complement of a vertical segment, empirical constants for
the polynomial growth bound off a segment, and walk-on-spheres harmonic
measure.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from . import _backend
from .errors import DomainError, ReliabilityError, ValidationError
from .series import GeneralDirichletSeries, partial_sums

__all__ = [
    "poisson_kernel",
    "BoundaryMeasure",
    "poisson_integral",
    "h1_decompose",
    "SegmentK",
    "green_segment",
    "lemma_l_constant",
    "Disc",
    "Rectangle",
    "Arc",
    "SidePiece",
    "WalkConfig",
    "HarmonicMeasureEstimate",
    "harmonic_measure_wos",
]


def poisson_kernel(t0: float, s: complex) -> float:
    """sigma / (sigma^2 + (t - t0)^2), the half-plane Poisson kernel with pole it0."""
    s = complex(s)
    if not s.real > 0:
        raise DomainError(f"Poisson kernel needs Re s > 0, got {s.real!r}")
    return s.real / (s.real ** 2 + (s.imag - t0) ** 2)


@dataclass(frozen=True)
class BoundaryMeasure:
    """Atoms plus a piecewise-constant density on the real line.

    ``values[i]`` is the density on [breakpoints[i], breakpoints[i+1]);
    the density vanishes outside [breakpoints[0], breakpoints[-1]].
    """

    atoms: tuple[tuple[float, float], ...] = ()
    breakpoints: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        atoms = tuple((float(t), float(m)) for t, m in self.atoms)
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if any(m < 0 for _, m in atoms):
            raise ValidationError("atom masses must be nonnegative")
        if any(v < 0 for v in vals):
            raise ValidationError("density values must be nonnegative")
        if bp and len(vals) != len(bp) - 1:
            raise ValidationError(f"{len(bp)} breakpoints need {len(bp) - 1} density values")
        if not bp and vals:
            raise ValidationError("density values given without breakpoints")
        if any(b >= a for a, b in zip(bp[1:], bp)) or any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def pieces(self):
        return [(a, b, v) for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values)]

    def mass(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        """mu([lo, hi])."""
        total = math.fsum(m for t, m in self.atoms if lo <= t <= hi)
        for a, b, v in self.pieces():
            a2, b2 = max(a, lo), min(b, hi)
            if b2 > a2:
                total += v * (b2 - a2)
        return total

    def total_mass(self) -> float:
        return self.mass()

    def to_dict(self) -> dict:
        return {"atoms": [list(a) for a in self.atoms], "breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundaryMeasure":
        return cls(tuple(tuple(a) for a in d.get("atoms", [])), tuple(d.get("breakpoints", [])), tuple(d.get("values", [])))


def poisson_integral(mu: BoundaryMeasure, s: complex) -> float:
    """h(s) = (sigma/pi) * integral |s - i zeta|^-2 dmu(zeta).

    Atoms are summed exactly; each density piece is integrated with adaptive
    quadrature to relative tolerance 1e-10.
    """
    s = complex(s)
    sig, t = s.real, s.imag
    if not sig > 0:
        raise DomainError(f"Poisson integral needs Re s > 0, got {sig!r}")
    total = math.fsum(m / (sig * sig + (t - z) ** 2) for z, m in mu.atoms)
    for a, b, v in mu.pieces():
        if v == 0:
            continue
        pts = [t] if a < t < b else None
        val, _ = integrate.quad(
            lambda z: 1.0 / (sig * sig + (t - z) ** 2), a, b,
            points=pts, epsrel=1e-10, epsabs=0.0, limit=200,
        )
        total += v * val
    return sig / math.pi * total


def h1_decompose(mu: BoundaryMeasure, interval: tuple[float, float]) -> BoundaryMeasure:
    """Move the mass of the closed interval I onto both of its endpoints.

    The result is mu restricted to R \\ I plus two atoms, each carrying the
    full mass mu(I), at the endpoints of I.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    m_in = mu.mass(lo, hi)
    if m_in == 0 and not any(lo <= t <= hi for t, _ in mu.atoms):
        return mu
    atoms = [(t, m) for t, m in mu.atoms if not lo <= t <= hi]
    bps = list(mu.breakpoints)
    vals = []
    if bps:
        bps = sorted(set(bps) | {x for x in (lo, hi) if bps[0] < x < bps[-1]})
        for a, b in zip(bps, bps[1:]):
            mid = 0.5 * (a + b)
            inside = lo <= mid <= hi
            vals.append(0.0 if inside else _density_at(mu, mid))
    atoms += [(lo, m_in), (hi, m_in)]
    return BoundaryMeasure(tuple(atoms), tuple(bps), tuple(vals))


def _density_at(mu: BoundaryMeasure, x: float) -> float:
    for a, b, v in mu.pieces():
        if a <= x < b:
            return v
    return 0.0


# -- Green function of C \ [i t_lo, i t_hi] ----------------------------------


@dataclass(frozen=True)
class SegmentK:
    """The vertical segment [i t_lo, i t_hi] on the imaginary axis."""

    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not self.t_hi > self.t_lo:
            raise ValidationError("segment needs t_lo < t_hi")

    def contains(self, s: complex) -> bool:
        s = complex(s)
        return s.real == 0 and self.t_lo <= s.imag <= self.t_hi

    def to_dict(self):
        return {"t_lo": self.t_lo, "t_hi": self.t_hi}


def _exterior_coordinate(K: SegmentK, s: complex) -> complex:
    # rotate/scale K onto [-1, 1], then the inverse Joukowski branch with |w| > 1
    c = 0.5 * (K.t_lo + K.t_hi)
    h = 0.5 * (K.t_hi - K.t_lo)
    z = (complex(s) - 1j * c) / (1j * h)
    w = z + cmath.sqrt(z - 1) * cmath.sqrt(z + 1)
    if abs(w) < 1:
        w = 1 / w
    return w


def green_segment(K: SegmentK, pole: complex, s: complex) -> float:
    """G_{C\\K}(pole, s); +inf when s == pole.

    After mapping C \\ K onto |w| > 1 the exterior-disc Green function is
    log|1 - conj(p) w| - log|w - p| = 0.5 log1p((|w|^2-1)(|p|^2-1)/|w-p|^2).
    """
    if K.contains(s):
        raise DomainError(f"s={s!r} lies on K")
    if K.contains(pole):
        raise DomainError(f"pole={pole!r} lies on K")
    if complex(s) == complex(pole):
        return math.inf
    w = _exterior_coordinate(K, s)
    p = _exterior_coordinate(K, pole)
    num = (abs(w) ** 2 - 1.0) * (abs(p) ** 2 - 1.0)
    return 0.5 * math.log1p(num / abs(w - p) ** 2)


def lemma_l_constant(
    series: GeneralDirichletSeries,
    K: SegmentK,
    sigma0: float,
    m_set: Iterable[int],
    samples: Iterable[complex],
    k_mesh: int = 2001,
) -> float:
    """Smallest c with |S_m| <= b_m exp(c lambda_m G(sigma0 - 1, .)) at the samples.

    b_m = max(sup over a ``k_mesh``-point mesh of K of |S_m|, 1).  Indices m
    with lambda_m = 0 are skipped (S_1 is then constant).
    """
    if not sigma0 < 0:
        raise DomainError("sigma0 must be negative")
    ms = sorted({int(m) for m in m_set})
    if not ms or ms[0] < 1 or ms[-1] > series.N:
        raise IndexError(f"m_set must lie within 1..{series.N}")
    ms = [m for m in ms if series.exponents[m - 1] > 0]
    if not ms:
        return 0.0
    lam = series.exponents[np.asarray(ms) - 1]
    b = np.ones(len(ms))
    for t in np.linspace(K.t_lo, K.t_hi, k_mesh):
        b = np.maximum(b, np.abs(partial_sums(series, ms, complex(0.0, t))))
    logb = np.log(b)
    pole = complex(sigma0 - 1.0, 0.0)
    c = 0.0
    for s in samples:
        s = complex(s)
        if not s.real > sigma0:
            raise DomainError(f"sample {s!r} not in sigma > sigma0")
        G = green_segment(K, pole, s)
        if not G > 0:
            raise RuntimeError(f"Green function vanished at sample {s!r} off K")
        with np.errstate(divide="ignore"):
            excess = np.log(np.abs(partial_sums(series, ms, s))) - logb
        pos = excess > 0
        if pos.any():
            c = max(c, float(np.max(excess[pos] / (lam[pos] * G))))
    return c


# -- walk on spheres ---------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Boundary arc of a disc, angles theta0 <= theta < theta1 (radians, may exceed 2 pi)."""

    label: str
    theta0: float
    theta1: float

    def has(self, theta: float) -> bool:
        span = self.theta1 - self.theta0
        return (theta - self.theta0) % (2 * math.pi) < span


@dataclass(frozen=True)
class SidePiece:
    """Portion [lo, hi] of a rectangle side ('left', 'right', 'bottom', 'top');
    side 'rest' matches anything not claimed earlier."""

    label: str
    side: str
    lo: float = -math.inf
    hi: float = math.inf

    def has(self, side: str, coord: float) -> bool:
        return self.side == "rest" or (self.side == side and self.lo <= coord <= self.hi)


@dataclass(frozen=True)
class Disc:
    cx: float = 0.0
    cy: float = 0.0
    r: float = 1.0
    kind = 0

    def params(self):
        return np.array([self.cx, self.cy, self.r, 0.0])

    def diameter(self):
        return 2 * self.r

    def inside(self, z: complex) -> bool:
        return abs(complex(z) - complex(self.cx, self.cy)) < self.r

    def label_exits(self, x, y, parts: Sequence[Arc]) -> np.ndarray:
        theta = np.mod(np.arctan2(y - self.cy, x - self.cx), 2 * math.pi)
        out = np.full(theta.shape, -1, dtype=np.int64)
        for k, arc in enumerate(parts):
            hit = (out < 0) & (np.mod(theta - arc.theta0, 2 * math.pi) < arc.theta1 - arc.theta0)
            out[hit] = k
        return out


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float
    kind = 1

    def params(self):
        return np.array([self.x0, self.x1, self.y0, self.y1], dtype=float)

    def diameter(self):
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def inside(self, z: complex) -> bool:
        z = complex(z)
        return self.x0 < z.real < self.x1 and self.y0 < z.imag < self.y1

    def label_exits(self, x, y, parts: Sequence[SidePiece]) -> np.ndarray:
        d = np.stack([x - self.x0, self.x1 - x, y - self.y0, self.y1 - y])
        nearest = np.argmin(d, axis=0)
        sides = np.array(["left", "right", "bottom", "top"])[nearest]
        coord = np.where(nearest < 2, y, x)
        out = np.full(x.shape, -1, dtype=np.int64)
        for k, piece in enumerate(parts):
            if piece.side == "rest":
                hit = out < 0
            else:
                hit = (out < 0) & (sides == piece.side) & (coord >= piece.lo) & (coord <= piece.hi)
            out[hit] = k
        return out


@dataclass(frozen=True)
class WalkConfig:
    seed: int = 0
    walks: int = 100_000
    eps_boundary: float | None = None  # default 1e-6 * domain diameter
    max_steps: int = 10_000
    threads: int = 0  # 0: DIRICHLET_LAB_THREADS or 1

    def __post_init__(self):
        if self.walks <= 0 or self.max_steps <= 0:
            raise ValidationError("walks and max_steps must be positive")
        if self.eps_boundary is not None and not self.eps_boundary > 0:
            raise ValidationError("eps_boundary must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class HarmonicMeasureEstimate:
    labels: list[str]
    counts: list[int]
    frequencies: list[float]
    std_errors: list[float]
    walks: int
    unfinished: int = 0
    backend: str = field(default=_backend.BACKEND)

    def rows(self):
        return list(zip(self.labels, self.counts, self.frequencies, self.std_errors))


def _threads(cfg: WalkConfig) -> int:
    if cfg.threads:
        return cfg.threads
    return max(1, int(os.environ.get("DIRICHLET_LAB_THREADS", "1")))


def harmonic_measure_wos(domain, z: complex, parts, cfg: WalkConfig) -> HarmonicMeasureEstimate:
    """Walk-on-spheres estimate of the harmonic measure of each boundary part at z.

    Each walk jumps to a uniform point on the largest disc about the current
    position until it is within ``eps_boundary`` of the boundary, then counts
    for the part containing its nearest boundary point.  Walk w draws its
    angles from a counter-based stream keyed by (seed, w), so the result is
    the same for any thread count.
    """
    z = complex(z)
    if not domain.inside(z):
        raise DomainError(f"start point {z!r} is not interior")
    eps = cfg.eps_boundary if cfg.eps_boundary is not None else 1e-6 * domain.diameter()
    n = cfg.walks
    nthreads = min(_threads(cfg), n)
    bounds = np.linspace(0, n, nthreads + 1).astype(int)

    def run(k):
        return _backend.wos_walks(domain.kind, domain.params(), z.real, z.imag,
                                  cfg.seed, int(bounds[k]), int(bounds[k + 1]), eps, cfg.max_steps)

    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            chunks = list(pool.map(run, range(nthreads)))
    else:
        chunks = [run(0)]
    x = np.concatenate([c[0] for c in chunks])
    y = np.concatenate([c[1] for c in chunks])
    steps = np.concatenate([c[2] for c in chunks])

    unfinished = int(np.sum((steps >= cfg.max_steps) & (_distance(domain, x, y) >= eps)))
    if unfinished > 0.01 * n:
        raise ReliabilityError(f"{unfinished} of {n} walks hit max_steps={cfg.max_steps}")
    lab = domain.label_exits(x, y, parts)
    if np.any(lab < 0):
        w = int(np.flatnonzero(lab < 0)[0])
        raise ValidationError(f"partition does not cover exit point {complex(x[w], y[w])!r}")
    counts = np.bincount(lab, minlength=len(parts))
    freqs = counts / n
    se = np.sqrt(freqs * (1 - freqs) / n)
    return HarmonicMeasureEstimate(
        [p.label for p in parts], counts.tolist(), freqs.tolist(), se.tolist(), n, unfinished
    )


def _distance(domain, x, y):
    p = domain.params()
    if domain.kind == 0:
        return p[2] - np.hypot(x - p[0], y - p[1])
    return np.minimum.reduce([x - p[0], p[1] - x, y - p[2], p[3] - y])
