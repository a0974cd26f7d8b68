"""Known closed forms keyed by ``GeneralDirichletSeries.closed_form`` tags.

Tags: ``geometric`` (1/(e^s-1)), ``geometric0`` (1/(1-e^{-s})) and
``zeta_shift:<k>`` (zeta(s+k)).  Each trailing apostrophe asks for one more
derivative, so ``derivative(series)`` keeps a usable tag.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath

Evaluator = Callable[[complex], complex]


def _expm1(s: complex) -> complex:
    # e^s - 1 without cancellation near s = 0
    s = complex(s)
    x, y = s.real, s.imag
    em = math.expm1(x)
    return complex(em * math.cos(y) - 2.0 * math.sin(y / 2) ** 2, (em + 1.0) * math.sin(y))


def _geometric(order: int) -> Evaluator:
    # d/ds of 1/(e^s - 1): polynomials in q = 1/(e^s - 1)
    if order == 0:
        return lambda s: 1.0 / _expm1(s)
    if order == 1:
        def f1(s):
            q = 1.0 / _expm1(s)
            return -q - q * q
        return f1
    if order == 2:
        def f2(s):
            q = 1.0 / _expm1(s)
            return q + 3 * q * q + 2 * q ** 3
        return f2
    return _mpmath_diff(lambda s: 1 / mpmath.expm1(s), order)


def _geometric0(order: int) -> Evaluator:
    g = _geometric(order)
    if order == 0:
        return lambda s: 1.0 + g(s)
    return g


def _zeta(shift: float, order: int) -> Evaluator:
    def f(s):
        return complex(mpmath.zeta(mpmath.mpc(s) + shift, 1, order))
    return f


def _mpmath_diff(fn, order: int) -> Evaluator:
    return lambda s: complex(mpmath.diff(fn, mpmath.mpc(s), order))


def lookup(tag: str | None) -> Evaluator | None:
    """Evaluator for a closed-form tag, or None when unknown."""
    if not tag:
        return None
    base = tag.rstrip("'")
    order = len(tag) - len(base)
    if base == "geometric":
        return _geometric(order)
    if base == "geometric0":
        return _geometric0(order)
    if base.startswith("zeta_shift:"):
        try:
            shift = float(base.split(":", 1)[1])
        except ValueError:
            return None
        return _zeta(shift, order)
    return None


def registered(tag: str | None) -> bool:
    return lookup(tag) is not None
