"""dirichlet-lab command line.

    dirichlet-lab <command> --config <path> [--out <prefix>] [--strict] [--seed N] [--threads N]
    dirichlet-lab validate --config <path>

Exit codes: 0 done, 2 malformed config or failed precondition, 3 undecided
outcome under --strict, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
from pathlib import Path

import mpmath
import numpy as np
import scipy

from . import __version__, lab
from . import config as cf
from . import potential as pot
from ._backend import BACKEND
from .errors import DomainError, ExperimentAborted, ReliabilityError, ValidationError
from .series import evaluate

EXIT_OK, EXIT_PRECONDITION, EXIT_UNDECIDED, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "DIRICHLET_LAB_THREADS"


class Outcome:
    def __init__(self, result: dict, rows: list[list], undecided: bool, status: str = "completed"):
        self.result = result
        self.rows = rows
        self.undecided = undecided
        self.status = status


def _sanitize(obj):
    # strict JSON: no NaN or Infinity literals
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, complex):
        return [_sanitize(obj.real), _sanitize(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.generic):
        return _sanitize(obj.item())
    return obj


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def versions() -> dict:
    return {
        "dirichlet_lab": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
    }


# -- commands ----------------------------------------------------------------


def _eval(cfg, p, threads):
    series = cf.build_series(cfg)
    tol = float(p.get("tol", 1e-10))
    pts = cf._complex_list(p["points"])
    rows = [["s_re", "s_im", "value_re", "value_im", "terms_used", "tail_bound", "tol_met", "heuristic"]]
    out = []
    for s in pts:
        r = evaluate(series, s, tol)
        rows.append([s.real, s.imag, r.value.real, r.value.imag, r.terms_used, r.tail_bound, r.tol_met, r.heuristic])
        out.append({"s": s, "value": r.value, "terms_used": r.terms_used, "tail_bound": r.tail_bound,
                    "tol_met": r.tol_met, "heuristic": r.heuristic})
    return Outcome({"tol": tol, "evaluations": out}, rows, not all(o["tol_met"] for o in out))


def _scan(cfg, p, threads):
    series = cf.build_series(cfg)
    sel = cf.build_selector(p["selector"], series)
    scan = lab.subsequence_limits(series, sel, cf.build_grid(p["grid"]), float(p.get("tol", 1e-8)), threads)
    undecided = any(q.subsequence.status == lab.UNDECIDED for q in scan.per_point)
    return Outcome(scan.to_dict(), scan.csv_rows(), undecided)


def _theorem1(cfg, p, threads):
    series = cf.build_series(cfg)
    sel = cf.build_selector(p["selector"], series)
    scan = lab.theorem1_compare(series, sel, cf.build_grid(p["grid"]), float(p.get("delta", math.pi / 4)),
                                float(p.get("tol", 1e-8)), float(p.get("r0", 0.5)), threads)
    undecided = any(q.subsequence.status == lab.UNDECIDED or q.nt.status == lab.UNDECIDED for q in scan.per_point)
    undecided |= any(q.anomaly and not q.isolated for q in scan.per_point)
    return Outcome(scan.to_dict(), scan.csv_rows(), undecided)


def _theorem2(cfg, p, threads):
    series = cf.build_series(cfg)
    sel = cf.build_selector(p["selector"], series)
    regions = [cf.build_region(cfg, r, "regions") for r in p["regions"]]
    h = cf.build_measure(cfg, p["h"], "h") if "h" in p else None
    rep = lab.theorem2_probe(series, sel, float(p["t1"]), float(p["t2"]), regions, h, float(p["rect_eps"]),
                             float(p.get("mesh", 0.05)), int(p.get("levels", 12)), p.get("interval_pad"))
    return Outcome(rep.to_dict(), rep.csv_rows(), not rep.stabilized)


def _theorem3(cfg, p, threads):
    series = cf.build_series(cfg)
    sel = cf.build_selector(p["selector"], series)
    rep = lab.theorem3_run(series, sel, float(p["t0"]), tuple(map(float, p["interval"])),
                           cf.build_region(cfg, p["region"]), float(p.get("tol", 1e-8)), float(p.get("mesh", 0.05)))
    return Outcome(rep.to_dict(), rep.csv_rows(), rep.status == lab.UNDECIDED)


def _corollary6(cfg, p, threads):
    spec = cf._load_json_ref(cfg, cfg.series_spec, "series")
    if not isinstance(spec, dict) or spec.get("family") != "taylor":
        raise cf.ConfigError("corollary6 needs a series with family 'taylor'", cfg.line_of("series"))
    coeffs = cf._complex_list(spec["coefficients"])
    sel = p.get("selector")
    rep = lab.corollary6_run(coeffs, cf._complex(p["w"]), sel, tuple(map(float, p["arc"])),
                             cf.build_region(cfg, p["region"]), float(p.get("tol", 1e-8)),
                             float(p.get("ratio_min", 2.0)), bool(spec.get("finite", True)), float(p.get("mesh", 0.05)))
    return Outcome(rep.to_dict(), rep.csv_rows(), rep.status == lab.UNDECIDED)


def _counterexample(cfg, p, threads):
    tab = lab.counterexample_reproduce(int(p.get("kmax", 20)), int(p.get("mesh_points", 1000)), float(p.get("tol", 1e-9)))
    return Outcome(tab.to_dict(), tab.csv_rows(), not tab.nt.converged)


def _potential(cfg, p, threads):
    mode = p["mode"]
    if mode == "wos":
        dom = cf.build_domain(p["domain"])
        parts = cf.build_parts(dom, p["parts"])
        wcfg = cf.build_walk_config(p, cfg.seed, threads)
        est = pot.harmonic_measure_wos(dom, cf._complex(p["z"]), parts, wcfg)
        rows = [["label", "count", "frequency", "std_error"]] + [list(r) for r in est.rows()]
        res = {"labels": est.labels, "counts": est.counts, "frequencies": est.frequencies,
               "std_errors": est.std_errors, "walks": est.walks, "unfinished": est.unfinished,
               "seed": wcfg.seed, "eps_boundary": wcfg.eps_boundary}
        return Outcome(res, rows, False)
    if mode == "lemma":
        series = cf.build_series(cfg)
        K = cf.build_segment(p["K"])
        samples = [s for s in cf.sample_grid(p["samples"]) if not K.contains(s)]
        rows = [["m_max", "c"]]
        cs = []
        for mm in sorted({int(m) for m in (p["m_max"] if isinstance(p["m_max"], list) else [p["m_max"]])}):
            c = pot.lemma_l_constant(series, K, float(p["sigma0"]), range(1, mm + 1), samples, int(p.get("k_mesh", 2001)))
            rows.append([mm, c])
            cs.append({"m_max": mm, "c": c})
        return Outcome({"K": K.to_dict(), "sigma0": p["sigma0"], "samples": len(samples), "constants": cs}, rows, False)
    if mode == "poisson":
        mu = cf.build_measure(cfg, p["measure"])
        if "h1_interval" in p:
            mu = pot.h1_decompose(mu, tuple(map(float, p["h1_interval"])))
        pts = cf._complex_list(p["points"])
        vals = [pot.poisson_integral(mu, s) for s in pts]
        rows = [["s_re", "s_im", "h"]] + [[s.real, s.imag, v] for s, v in zip(pts, vals)]
        return Outcome({"measure": mu.to_dict(), "values": [[s, v] for s, v in zip(pts, vals)]}, rows, False)
    if mode == "green":
        K = cf.build_segment(p["K"])
        pole = cf._complex(p["pole"])
        pts = cf._complex_list(p["points"])
        vals = [pot.green_segment(K, pole, s) for s in pts]
        rows = [["s_re", "s_im", "G"]] + [[s.real, s.imag, v] for s, v in zip(pts, vals)]
        return Outcome({"K": K.to_dict(), "pole": pole, "values": [[s, v] for s, v in zip(pts, vals)]}, rows, False)
    raise cf.ConfigError(f"unknown potential mode {mode!r}", cfg.line_of("mode"))


DISPATCH = {
    "eval": _eval,
    "scan": _scan,
    "theorem1": _theorem1,
    "theorem2": _theorem2,
    "theorem3": _theorem3,
    "corollary6": _corollary6,
    "counterexample": _counterexample,
    "potential": _potential,
}


# -- driver ------------------------------------------------------------------


def run(cfg: cf.ExperimentConfig, out: str | None = None, strict: bool = False,
        threads: int | None = None, stderr=None) -> int:
    """Run one experiment and write ``<prefix>.report.json`` and ``<prefix>.csv``."""
    stderr = stderr or sys.stderr
    if threads is None:
        threads = max(1, int(os.environ.get(THREADS_ENV, "1") or 1))
    diags = cf.validate(cfg)
    for d in diags:
        print(str(d), file=stderr)
    if any(d.level == "error" for d in diags):
        return EXIT_PRECONDITION
    prefix = out or cfg.output or cfg.command
    try:
        outcome = DISPATCH[cfg.command](cfg, cfg.parameters, threads)
    except cf.ConfigError as exc:
        print(str(exc), file=stderr)
        return EXIT_PRECONDITION
    except ExperimentAborted as exc:
        outcome = Outcome({"diagnostic": str(exc)}, [["status", "diagnostic"], ["aborted", str(exc)]], True, "aborted")
    except (DomainError, ValidationError, IndexError, KeyError, TypeError, ValueError) as exc:
        msg = f"missing key {exc.args[0]!r}" if isinstance(exc, KeyError) else str(exc)
        print(f"line {cfg.line_of('parameters')}: precondition failed: {msg}", file=stderr)
        return EXIT_PRECONDITION
    except ReliabilityError as exc:
        print(f"reliability: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"I/O error: {exc}", file=stderr)
        return EXIT_IO

    report = {
        "command": cfg.command,
        "status": outcome.status,
        "undecided": outcome.undecided,
        "config": cfg.raw,
        "overrides": {"out": out, "strict": strict},
        "versions": versions(),
        "backend": BACKEND,
        "warnings": [str(d) for d in diags],
        "result": outcome.result,
    }
    try:
        p = Path(prefix)
        if p.parent != Path(""):
            p.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.report.json").write_text(json.dumps(_sanitize(report), indent=1, allow_nan=False) + "\n")
        Path(f"{prefix}.csv").write_text(csv_text(outcome.rows))
    except OSError as exc:
        print(f"I/O error: {exc}", file=stderr)
        return EXIT_IO
    if strict and outcome.undecided:
        print(f"{cfg.command}: undecided outcome (strict mode)", file=stderr)
        return EXIT_UNDECIDED
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirichlet-lab", description="Boundary experiments for general Dirichlet series.")
    ap.add_argument("command", choices=(*cf.COMMANDS, "validate"))
    ap.add_argument("--config", required=True, help="experiment config (JSON)")
    ap.add_argument("--out", help="output prefix (overrides the config's 'output')")
    ap.add_argument("--strict", action="store_true", help="exit 3 on undecided outcomes")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = cf.load(args.config)
    except cf.ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "validate":
        diags = cf.validate(cfg)
        for d in diags:
            print(f"{args.config}: {d}")
        return EXIT_PRECONDITION if any(d.level == "error" for d in diags) else EXIT_OK
    if args.command != cfg.command:
        print(f"{args.config}: line {cfg.line_of('command')}: config is for {cfg.command!r}, not {args.command!r}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            print("--seed must be an unsigned 64-bit integer", file=sys.stderr)
            return EXIT_PRECONDITION
        cfg.seed = args.seed
        cfg.raw = {**cfg.raw, "seed": args.seed}
    if args.threads is not None and args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_PRECONDITION
    return run(cfg, args.out, args.strict, args.threads)


if __name__ == "__main__":
    sys.exit(main())
