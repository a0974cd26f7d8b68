"""Approach regions to boundary points it0 of the right half-plane.

Variants: Stolz sectors, tangent half-discs, fat approach regions with a
Lipschitz cusp profile phi, and the triangles Gamma(it0) with vertices
it0, it0 + 1 + i, it0 + 1 - i.  Stolz sectors use the half-plane
convention |arg(s - it0)| < pi/2 - delta: ``delta`` is measured from the
boundary line, so smaller delta means a wider sector.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "PowerProfile",
    "SampledProfile",
    "Stolz",
    "HalfDisc",
    "FatRegion",
    "TriangleGamma",
    "LatticeSup",
    "contains",
    "is_fat",
    "fatness_partials",
    "stolz_sample",
    "stolz_threshold",
    "region_sup",
    "region_to_dict",
    "region_from_dict",
]

FATNESS_LEVELS = 30
FATNESS_WINDOW = 5
FATNESS_GROWTH = 1.05


@dataclass(frozen=True)
class PowerProfile:
    """phi(y) = c |y|^alpha."""

    c: float
    alpha: float

    def __post_init__(self):
        if not (self.c > 0 and self.alpha > 0):
            raise ValidationError(f"power profile needs c > 0, alpha > 0; got {self.c}, {self.alpha}")

    def __call__(self, y):
        return self.c * np.abs(y) ** self.alpha

    def lipschitz_bound(self, a: float) -> float:
        if self.alpha < 1:
            return math.inf
        return self.c * self.alpha * a ** (self.alpha - 1)


@dataclass(frozen=True, eq=False)
class SampledProfile:
    """Piecewise-linear phi through (y_i, phi_i); ``lipschitz`` is the claimed bound."""

    y: np.ndarray
    phi: np.ndarray
    lipschitz: float

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        p = np.array(self.phi, dtype=float)
        y.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "phi", p)
        if y.size < 2 or y.size != p.size:
            raise ValidationError("sampled profile needs >= 2 matching (y, phi) nodes")
        if np.any(np.diff(y) <= 0):
            raise ValidationError("sampled profile grid must be strictly increasing")
        if np.any(p < 0):
            raise ValidationError("sampled profile has negative values")

    def __call__(self, y):
        return np.interp(y, self.y, self.phi)

    def check_lipschitz(self):
        slopes = np.abs(np.diff(self.phi) / np.diff(self.y))
        worst = int(np.argmax(slopes))
        if slopes[worst] > self.lipschitz * (1 + 1e-12):
            raise ValidationError(
                f"profile slope {slopes[worst]:.6g} between nodes {worst} and {worst + 1} "
                f"exceeds the Lipschitz bound {self.lipschitz:.6g}"
            )

    def lipschitz_bound(self, a: float) -> float:
        return self.lipschitz


Profile = Union[PowerProfile, SampledProfile]


@dataclass(frozen=True)
class Stolz:
    t0: float
    delta: float
    radius: float = 1.0

    def __post_init__(self):
        if not 0 < self.delta < math.pi / 2:
            raise ValidationError(f"delta must lie in (0, pi/2), got {self.delta}")
        if not self.radius > 0:
            raise ValidationError("Stolz radius must be positive")

    def contains(self, s: complex) -> bool:
        d = complex(s) - 1j * self.t0
        return d.real > 0 and abs(d) < self.radius and abs(math.atan2(d.imag, d.real)) < math.pi / 2 - self.delta

    def bbox(self):
        return 0.0, self.radius, self.t0 - self.radius, self.t0 + self.radius


@dataclass(frozen=True)
class HalfDisc:
    """{ |s - (a + i t0)| < a, sigma < a }."""

    t0: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("half-disc radius must be positive")

    def contains(self, s: complex) -> bool:
        s = complex(s)
        return abs(s - complex(self.a, self.t0)) < self.a and 0 < s.real < self.a

    def bbox(self):
        return 0.0, self.a, self.t0 - self.a, self.t0 + self.a


@dataclass(frozen=True)
class FatRegion:
    """{ |t - t0| < a, phi(t - t0) < sigma < b }."""

    t0: float
    a: float
    b: float
    profile: Profile

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValidationError("fat region needs a > 0 and b > 0")
        p = self.profile
        if isinstance(p, SampledProfile) and (p.y[0] > -self.a or p.y[-1] < self.a):
            raise ValidationError("sampled profile grid must cover [-a, a]")

    def contains(self, s: complex) -> bool:
        s = complex(s)
        y = s.imag - self.t0
        if not abs(y) < self.a:
            return False
        return float(self.profile(y)) < s.real < self.b

    def bbox(self):
        return 0.0, self.b, self.t0 - self.a, self.t0 + self.a


@dataclass(frozen=True)
class TriangleGamma:
    """Open triangle with vertices it0, it0 + 1 + i, it0 + 1 - i."""

    t0: float

    def contains(self, s: complex) -> bool:
        s = complex(s)
        return 0 < s.real < 1 and abs(s.imag - self.t0) < s.real

    def bbox(self):
        return 0.0, 1.0, self.t0 - 1.0, self.t0 + 1.0


Region = Union[Stolz, HalfDisc, FatRegion, TriangleGamma]


def contains(region: Region, s: complex) -> bool:
    """Strict membership in the open region."""
    return region.contains(s)


# -- fatness -----------------------------------------------------------------


def _linear_over_y2(nodes, vals, lo, hi):
    # exact integral of the piecewise-linear interpolant divided by y^2 on [lo, hi], 0 < lo
    inner = nodes[(nodes > lo) & (nodes < hi)]
    ys = np.concatenate(([lo], inner, [hi]))
    ps = np.interp(ys, nodes, vals)
    u, v = ys[:-1], ys[1:]
    beta = (ps[1:] - ps[:-1]) / (v - u)
    alpha = ps[:-1] - beta * u
    return float(np.sum(alpha * (1 / u - 1 / v) + beta * np.log(v / u)))


def fatness_partials(profile: SampledProfile, a: float, levels: int = FATNESS_LEVELS) -> np.ndarray:
    """Integrals of phi(y)/y^2 over eta_j <= |y| <= a, eta_j = a 2^-j, j = 1..levels."""
    y, p = profile.y, profile.phi
    out = np.empty(levels)
    for j in range(1, levels + 1):
        eta = a * 2.0 ** -j
        right = _linear_over_y2(y, p, eta, a)
        left = _linear_over_y2(-y[::-1], p[::-1], eta, a)
        out[j - 1] = right + left
    return out


def is_fat(region: Region) -> bool:
    """Whether the region satisfies the fat-approach integral condition.

    Half-discs and Stolz sectors are fat.  A power cusp c|y|^alpha is fat iff
    alpha > 1.  A sampled profile gets a heuristic verdict: divergent when the
    truncated integrals grow by more than 5% over the last five dyadic
    refinements of the excluded window around y = 0.
    """
    if isinstance(region, (HalfDisc, Stolz)):
        return True
    if isinstance(region, TriangleGamma):
        raise DomainError("fatness is only defined for stolz, half_disc and fat regions")
    prof = region.profile
    if isinstance(prof, PowerProfile):
        return prof.alpha > 1
    prof.check_lipschitz()
    parts = fatness_partials(prof, region.a)
    early = parts[-1 - FATNESS_WINDOW]
    if early == 0:
        return parts[-1] == 0
    return parts[-1] / early <= FATNESS_GROWTH


# -- sampling and sups -------------------------------------------------------


def stolz_sample(t0: float, delta: float, radii: Sequence[float]) -> list[complex]:
    """Three points per radius, on the rays at angles -(pi/2-delta), 0, +(pi/2-delta)."""
    if not 0 < delta < math.pi / 2:
        raise DomainError(f"delta must lie in (0, pi/2), got {delta}")
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be positive and strictly decreasing")
    th = math.pi / 2 - delta
    rays = (complex(math.cos(th), -math.sin(th)), 1.0 + 0j, complex(math.cos(th), math.sin(th)))
    return [complex(0, t0) + r * e for r in radii for e in rays]


def stolz_threshold(region: FatRegion, delta: float) -> float:
    """Radius below which every Stolz sample point at aperture ``delta`` lies in a power-cusp region."""
    prof = region.profile
    if not isinstance(prof, PowerProfile) or prof.alpha <= 1:
        raise DomainError("threshold is available for fat power profiles only")
    th = math.pi / 2 - delta
    c, s = math.cos(th), math.sin(th)
    cusp = (c / (prof.c * s ** prof.alpha)) ** (1 / (prof.alpha - 1))
    return min(cusp, region.b, region.a / s if s > 0 else math.inf)


@dataclass(frozen=True)
class LatticeSup:
    """Max of |f| over lattice points inside a region: a lower bound for the true sup."""

    value: float
    mesh: float
    points: int
    failures: int = 0
    argmax: complex | None = None

    def __float__(self):
        return self.value


def lattice_points(region: Region, mesh: float) -> list[complex]:
    """Points (i mesh) + i (t0 + j mesh) inside the region; halving the mesh nests lattices."""
    if not mesh > 0:
        raise DomainError("mesh must be positive")
    s0, s1, t_lo, t_hi = region.bbox()
    t0 = region.t0
    i_max = int(math.floor(s1 / mesh)) + 1
    j_lo = int(math.floor((t_lo - t0) / mesh)) - 1
    j_hi = int(math.ceil((t_hi - t0) / mesh)) + 1
    pts = []
    for i in range(1, i_max + 1):
        sig = i * mesh
        for j in range(j_lo, j_hi + 1):
            s = complex(sig, t0 + j * mesh)
            if region.contains(s):
                pts.append(s)
    return pts


def region_sup(f_eval: Callable[[complex], complex], region: Region, mesh: float, threads: int = 1) -> LatticeSup:
    """Empirical sup of |f_eval| over a mesh-spaced lattice intersected with the region.

    Non-finite evaluator outputs are counted in ``failures`` and skipped.
    """
    pts = lattice_points(region, mesh)
    if not pts:
        raise DomainError(f"no lattice point of spacing {mesh} lies in the region")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            vals = list(pool.map(f_eval, pts))
    else:
        vals = [f_eval(s) for s in pts]
    mags = np.abs(np.asarray(vals, dtype=complex))
    good = np.isfinite(mags)
    if not good.any():
        return LatticeSup(math.nan, mesh, len(pts), len(pts), None)
    k = int(np.argmax(np.where(good, mags, -1.0)))
    return LatticeSup(float(mags[k]), mesh, len(pts), int((~good).sum()), pts[k])


# -- interchange -------------------------------------------------------------


def region_to_dict(region: Region) -> dict:
    if isinstance(region, Stolz):
        return {"type": "stolz", "t0": region.t0, "delta": region.delta, "radius": region.radius}
    if isinstance(region, HalfDisc):
        return {"type": "half_disc", "t0": region.t0, "a": region.a}
    if isinstance(region, TriangleGamma):
        return {"type": "triangle", "t0": region.t0}
    p = region.profile
    if isinstance(p, PowerProfile):
        prof = {"type": "power", "c": p.c, "alpha": p.alpha}
    else:
        prof = {"type": "sampled", "y": p.y.tolist(), "phi": p.phi.tolist(), "lipschitz": p.lipschitz}
    return {"type": "fat", "t0": region.t0, "a": region.a, "b": region.b, "profile": prof}


def region_from_dict(d: dict) -> Region:
    try:
        kind = d["type"]
        if kind == "stolz":
            return Stolz(float(d["t0"]), float(d["delta"]), float(d.get("radius", 1.0)))
        if kind == "half_disc":
            return HalfDisc(float(d["t0"]), float(d["a"]))
        if kind == "triangle":
            return TriangleGamma(float(d["t0"]))
        if kind == "fat":
            p = d["profile"]
            if p["type"] == "power":
                prof = PowerProfile(float(p.get("c", 1.0)), float(p["alpha"]))
            elif p["type"] == "sampled":
                prof = SampledProfile(p["y"], p["phi"], float(p["lipschitz"]))
            else:
                raise ValidationError(f"unknown profile type {p['type']!r}")
            return FatRegion(float(d["t0"]), float(d["a"]), float(d["b"]), prof)
    except KeyError as exc:
        raise ValidationError(f"region object lacks key {exc.args[0]!r}") from None
    raise ValidationError(f"unknown region type {kind!r}")
