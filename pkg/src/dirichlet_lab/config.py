"""Experiment configs: JSON parsing, validation and object construction.

A config is a JSON object::

    {"command": "theorem3",
     "series": {"family": "factorial_lacunary", "N": 101},
     "parameters": {...},
     "output": "runs/factorial",
     "seed": 0}

``series`` is a family spec, an interchange object (has ``exponents``) or a
path to an interchange file.  Regions and measures are inline objects or
paths too.  Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import series as ser
from .errors import DomainError, ValidationError
from .geometry import FatRegion, Region, TriangleGamma, is_fat, region_from_dict
from .potential import Arc, BoundaryMeasure, Disc, Rectangle, SegmentK, SidePiece, WalkConfig

COMMANDS = ("eval", "scan", "theorem1", "theorem2", "theorem3", "corollary6", "counterexample", "potential")

REQUIRED = {
    "eval": ("points",),
    "scan": ("selector", "grid"),
    "theorem1": ("selector", "grid"),
    "theorem2": ("selector", "t1", "t2", "regions", "rect_eps"),
    "theorem3": ("selector", "t0", "interval", "region"),
    "corollary6": ("w", "arc", "region"),
    "counterexample": (),
    "potential": ("mode",),
}
POTENTIAL_REQUIRED = {
    "wos": ("domain", "z", "parts"),
    "lemma": ("K", "sigma0", "m_max", "samples"),
    "poisson": ("measure", "points"),
    "green": ("K", "pole", "points"),
}
NEEDS_SERIES = {"eval", "scan", "theorem1", "theorem2", "theorem3", "corollary6"}


class ConfigError(ValidationError):
    """Malformed config; carries the 1-based line it refers to."""

    def __init__(self, message: str, line: int = 1):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.bare = message


@dataclass
class Diagnostic:
    level: str  # "error" or "warning"
    message: str
    line: int = 1

    def __str__(self):
        return f"line {self.line}: {self.level}: {self.message}"


@dataclass
class ExperimentConfig:
    command: str
    raw: dict
    text: str
    base: Path
    series_spec: Any = None
    parameters: dict = field(default_factory=dict)
    output: str | None = None
    seed: int | None = None

    def line_of(self, key: str) -> int:
        return line_of(self.text, key)


def line_of(text: str, key: str) -> int:
    """Line of the first ``"key":`` in the source (1 when absent)."""
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def parse(text: str, base: Path | str = ".") -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cmd = raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}; got {cmd!r}", line_of(text, "command"))
    params = raw.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError("parameters must be an object", line_of(text, "parameters"))
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64):
        raise ConfigError("seed must be an unsigned 64-bit integer", line_of(text, "seed"))
    out = raw.get("output")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output must be a path prefix string", line_of(text, "output"))
    return ExperimentConfig(cmd, raw, text, Path(base), raw.get("series"), params, out, seed)


def load(path: str | Path) -> ExperimentConfig:
    """Read and parse a config file (OSError propagates for I/O failures)."""
    p = Path(path)
    return parse(p.read_text(), p.parent)


# -- builders ----------------------------------------------------------------


def _load_json_ref(cfg: ExperimentConfig, ref, what: str):
    if isinstance(ref, str):
        p = cfg.base / ref
        try:
            text = p.read_text()
        except OSError:
            raise
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{what} file {p}: invalid JSON at its line {exc.lineno}: {exc.msg}", line_of(cfg.text, what)) from None
    return ref


def build_series(cfg: ExperimentConfig, key: str = "series") -> ser.GeneralDirichletSeries:
    spec = _load_json_ref(cfg, cfg.series_spec, key)
    line = cfg.line_of(key)
    if spec is None:
        raise ConfigError(f"command {cfg.command!r} needs a series", 1)
    if not isinstance(spec, dict):
        raise ConfigError("series must be an object or a file path", line)
    try:
        if "exponents" in spec:
            return ser.series_from_dict(spec)
        fam = spec.get("family")
        if fam == "geometric":
            return ser.geometric(int(spec["N"]))
        if fam == "zeta_shift":
            return ser.zeta_shift(float(spec["shift"]), int(spec["N"]))
        if fam == "factorial_lacunary":
            return ser.factorial_lacunary(int(spec["N"]), float(spec.get("base", 2.0)))
        if fam == "power_lacunary":
            return ser.power_lacunary(int(spec["N"]), float(spec.get("base", 2.0)), float(spec.get("coef_base", 3.0)))
        if fam == "ordinary":
            return ser.ordinary(_complex_list(spec["coefficients"]), bool(spec.get("finite", True)), spec.get("closed_form"))
        if fam == "taylor":
            return ser.from_taylor(_complex_list(spec["coefficients"]), _complex(spec.get("w", 1.0)), bool(spec.get("finite", True)))
    except KeyError as exc:
        raise ConfigError(f"series family {spec.get('family')!r} needs key {exc.args[0]!r}", line) from None
    except (ValidationError, DomainError, ValueError, TypeError) as exc:
        raise ConfigError(f"series: {exc}", _line_for_message(cfg, str(exc), line)) from None
    raise ConfigError(f"unknown series family {spec.get('family')!r}", line)


def _line_for_message(cfg, msg, default):
    return cfg.line_of("exponents") if "exponent" in msg else default


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex number must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool):
        raise TypeError("boolean is not a number")
    return complex(float(v))


def _complex_list(vals) -> list[complex]:
    return [_complex(v) for v in vals]


def build_selector(spec, series: ser.GeneralDirichletSeries | None = None) -> ser.SubsequenceSelector:
    if spec == "full":
        if series is None:
            raise ValidationError("selector 'full' needs a series")
        return ser.SubsequenceSelector.full(series.N)
    if isinstance(spec, dict):
        return ser.SubsequenceSelector.arithmetic(int(spec["start"]), int(spec.get("step", 1)), int(spec["count"]))
    if isinstance(spec, list):
        return ser.SubsequenceSelector(tuple(int(m) for m in spec))
    raise ValidationError("selector must be a list, {start, step, count} or 'full'")


def build_grid(spec) -> list[float]:
    if isinstance(spec, dict):
        return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"])).tolist()
    if isinstance(spec, list):
        return [float(t) for t in spec]
    raise ValidationError("grid must be a list or {start, stop, num}")


def build_region(cfg: ExperimentConfig, spec, key: str = "region") -> Region:
    return region_from_dict(_load_json_ref(cfg, spec, key))


def build_measure(cfg: ExperimentConfig, spec, key: str = "measure") -> BoundaryMeasure:
    return BoundaryMeasure.from_dict(_load_json_ref(cfg, spec, key))


def build_domain(spec: dict):
    kind = spec.get("type")
    if kind == "disc":
        return Disc(float(spec.get("cx", 0.0)), float(spec.get("cy", 0.0)), float(spec.get("r", 1.0)))
    if kind == "rectangle":
        return Rectangle(float(spec["x0"]), float(spec["x1"]), float(spec["y0"]), float(spec["y1"]))
    raise ValidationError(f"unknown domain type {kind!r}")


def build_parts(domain, specs: list):
    if isinstance(domain, Disc):
        return [Arc(str(p["label"]), float(p["theta0"]), float(p["theta1"])) for p in specs]
    return [SidePiece(str(p["label"]), str(p["side"]), float(p.get("lo", -math.inf)), float(p.get("hi", math.inf))) for p in specs]


def build_segment(spec) -> SegmentK:
    return SegmentK(float(spec[0]), float(spec[1])) if isinstance(spec, list) else SegmentK(float(spec["t_lo"]), float(spec["t_hi"]))


def build_walk_config(params: dict, seed: int | None, threads: int) -> WalkConfig:
    return WalkConfig(
        seed=int(seed if seed is not None else params.get("seed", 0)),
        walks=int(params.get("walks", 100_000)),
        eps_boundary=params.get("eps_boundary"),
        max_steps=int(params.get("max_steps", 10_000)),
        threads=threads,
    )


def sample_grid(spec) -> list[complex]:
    """{"x": [lo, hi, n], "y": [lo, hi, n]} or an explicit list of points.

    Grid coordinates are rounded to 12 decimals so that a nominal zero
    really is zero (a point a rounding error off the axis is not off K).
    """
    if isinstance(spec, list):
        return _complex_list(spec)
    xs = np.round(np.linspace(*_triple(spec["x"])), 12)
    ys = np.round(np.linspace(*_triple(spec["y"])), 12)
    return [complex(x, y) for x in xs for y in ys]


def _triple(v):
    return float(v[0]), float(v[1]), int(v[2])


# -- validation --------------------------------------------------------------


def validate(cfg: ExperimentConfig) -> list[Diagnostic]:
    """Check series, region and parameter completeness without running."""
    out: list[Diagnostic] = []
    p = cfg.parameters
    pline = cfg.line_of("parameters")
    for key in REQUIRED[cfg.command]:
        if key not in p:
            out.append(Diagnostic("error", f"{cfg.command} needs parameter {key!r}", pline))
    if cfg.command == "potential":
        mode = p.get("mode")
        if mode not in POTENTIAL_REQUIRED:
            out.append(Diagnostic("error", f"potential mode must be one of {', '.join(POTENTIAL_REQUIRED)}", cfg.line_of("mode")))
        else:
            for key in POTENTIAL_REQUIRED[mode]:
                if key not in p:
                    out.append(Diagnostic("error", f"potential mode {mode!r} needs parameter {key!r}", pline))
    if out:
        return out

    series = None
    if cfg.command in NEEDS_SERIES:
        try:
            series = build_series(cfg)
        except ConfigError as exc:
            out.append(Diagnostic("error", exc.bare, exc.line))
        except OSError as exc:
            out.append(Diagnostic("error", f"cannot read series file: {exc}", cfg.line_of("series")))
    if "selector" in p and cfg.command != "corollary6":
        try:
            sel = build_selector(p["selector"], series)
            if series is not None:
                sel.check(series)
        except (ValidationError, IndexError, KeyError, TypeError, ValueError) as exc:
            out.append(Diagnostic("error", f"selector: {exc}", cfg.line_of("selector")))
    if "grid" in p:
        try:
            if not build_grid(p["grid"]):
                out.append(Diagnostic("error", "grid is empty", cfg.line_of("grid")))
        except (ValidationError, KeyError, TypeError, ValueError) as exc:
            out.append(Diagnostic("error", f"grid: {exc}", cfg.line_of("grid")))

    regions = []
    if "region" in p:
        regions.append(("region", p["region"]))
    for i, r in enumerate(p.get("regions", []) if isinstance(p.get("regions"), list) else []):
        regions.append(("regions", r))
    for key, spec in regions:
        try:
            reg = build_region(cfg, spec, key)
        except (ValidationError, DomainError, KeyError, TypeError, ValueError) as exc:
            out.append(Diagnostic("error", f"{key}: {exc}", cfg.line_of(key)))
            continue
        except OSError as exc:
            out.append(Diagnostic("error", f"cannot read region file: {exc}", cfg.line_of(key)))
            continue
        if cfg.command in ("theorem3", "corollary6", "theorem2"):
            out.extend(_fatness_diagnostics(reg, key, cfg.line_of(key)))
    if cfg.command == "theorem2" and isinstance(p.get("regions"), list) and len(p["regions"]) != 2:
        out.append(Diagnostic("error", "theorem2 needs exactly two regions", cfg.line_of("regions")))
    for key in ("tol", "delta", "r0", "mesh", "rect_eps"):
        if key in p:
            v = p[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v):
                out.append(Diagnostic("error", f"{key} must be a positive number", cfg.line_of(key)))
    for key in ("kmax", "mesh_points", "walks", "levels", "interval_points", "max_halvings"):
        if key in p:
            v = p[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                out.append(Diagnostic("error", f"{key} must be a positive integer", cfg.line_of(key)))
    return out


def _fatness_diagnostics(reg: Region, key: str, line: int) -> list[Diagnostic]:
    if isinstance(reg, TriangleGamma):
        return [Diagnostic("warning", f"{key}: triangle region is not a fat approach region (fatness test undefined)", line)]
    try:
        fat = is_fat(reg)
    except DomainError as exc:
        return [Diagnostic("warning", f"{key}: fatness test failed: {exc}", line)]
    if not fat:
        detail = ""
        if isinstance(reg, FatRegion):
            detail = f" (profile {reg.profile!r})"
        return [Diagnostic("warning", f"{key}: region is not fat: is_fat false, the integral of phi(y)/y^2 diverges{detail}", line)]
    return []
