"""Windowed coefficient calculus for formal distributions in z, w (and x).

A formal distribution has infinite support, so every array here carries the
exponent window it is known on.  Products shrink that window explicitly and
every comparison reports the window it certified.

Cells are indexed by exponents: ``(p, q)`` is the coefficient of ``z^p w^q``.
Cell values are exact rationals or :class:`~fieldalg.linear.Vector` states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial

from .linear import Vector, fmt_rational
from .report import FAILS, HOLDS, CheckReport

IN_Z = "in_z"  # expand in |z| > |w|
IN_W = "in_w"  # expand in |w| > |z|


class WindowError(ValueError):
    """The requested operation has no reliable window."""


def falling(n: int, j: int) -> int:
    """Falling factorial n (n-1) ... (n-j+1)."""
    out = 1
    for i in range(j):
        out *= n - i
    return out


def binom(n: int, k: int) -> Fraction | int:
    """Generalized binomial coefficient, any integer ``n``, ``k >= 0``."""
    if k < 0:
        return 0
    return Fraction(falling(n, k), factorial(k)) if k else 1


def is_zero(value) -> bool:
    return not value


@dataclass(frozen=True)
class ExponentWindow:
    """Inclusive exponent ranges, one per variable."""

    names: tuple
    bounds: tuple

    @classmethod
    def of(cls, **ranges: tuple[int, int]) -> "ExponentWindow":
        for name, (lo, hi) in ranges.items():
            if lo > hi:
                raise WindowError(f"empty range for {name}: [{lo}, {hi}]")
        return cls(tuple(ranges), tuple(tuple(r) for r in ranges.values()))

    @classmethod
    def square(cls, lo: int, hi: int, names=("z", "w")) -> "ExponentWindow":
        return cls.of(**{n: (lo, hi) for n in names})

    def range_of(self, name: str) -> tuple[int, int]:
        return self.bounds[self.names.index(name)]

    def cells(self):
        return product(*(range(lo, hi + 1) for lo, hi in self.bounds))

    def __contains__(self, cell) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(cell, self.bounds))

    def to_json(self) -> dict:
        return {n: list(b) for n, b in zip(self.names, self.bounds)}


@dataclass
class Bivariate:
    """Coefficient array of a formal distribution on a finite window.

    ``finite_support`` marks arrays whose nonzero cells are known to all lie
    inside the window (polynomials), which is what makes them safe left
    factors in :func:`multiply_scalar`.
    """

    window: ExponentWindow
    cells: dict = field(default_factory=dict)
    finite_support: bool = False

    def __post_init__(self):
        self.cells = {c: v for c, v in self.cells.items() if not is_zero(v)}
        for c in self.cells:
            if c not in self.window:
                raise WindowError(f"cell {c} outside {self.window.to_json()}")

    def __getitem__(self, cell):
        return self.cells.get(tuple(cell), 0)

    def __add__(self, other: "Bivariate") -> "Bivariate":
        return _combine(self, other, 1)

    def __sub__(self, other: "Bivariate") -> "Bivariate":
        return _combine(self, other, -1)

    def scale(self, s) -> "Bivariate":
        return Bivariate(self.window, {c: v * s for c, v in self.cells.items()},
                         self.finite_support)

    def restrict(self, window: ExponentWindow) -> "Bivariate":
        return Bivariate(window, {c: v for c, v in self.cells.items() if c in window},
                         False)

    def to_json(self) -> dict:
        out = []
        for c in sorted(self.cells):
            v = self.cells[c]
            val = v.to_json() if isinstance(v, Vector) else fmt_rational(v)
            entry = dict(zip(("p", "q", "r")[: len(c)], c))
            entry["value"] = val
            out.append(entry)
        return {"window": self.window.to_json(), "cells": out}


# aliases naming the two roles the same array type plays
ScalarBivariate = Bivariate
BivariateCoefficients = Bivariate


def _combine(a: Bivariate, b: Bivariate, sign: int) -> Bivariate:
    if a.window != b.window:
        raise WindowError("windows differ")
    cells = dict(a.cells)
    for c, v in b.cells.items():
        cells[c] = cells[c] + v * sign if c in cells else v * sign
    return Bivariate(a.window, cells, a.finite_support and b.finite_support)


@dataclass
class UnivariateSeries:
    """Laurent series in one variable, zero below ``min_exponent``.

    ``max_exponent`` is how far the coefficients are known (``None``: the
    stored coefficients are the whole series).  A window restriction of a
    longer series sets ``exact_below=False``: reads below ``min_exponent``
    are then refused instead of returning zero.
    """

    coeffs: dict
    min_exponent: int
    max_exponent: int | None = None
    exact_below: bool = True

    def __post_init__(self):
        self.coeffs = {k: v for k, v in self.coeffs.items() if not is_zero(v)}
        if any(k < self.min_exponent for k in self.coeffs):
            raise ValueError("coefficient below min_exponent")

    def __getitem__(self, k: int):
        if self.max_exponent is not None and k > self.max_exponent:
            raise WindowError(f"exponent {k} beyond known range {self.max_exponent}")
        if not self.exact_below and k < self.min_exponent:
            raise WindowError(f"exponent {k} below known range {self.min_exponent}")
        return self.coeffs.get(k, 0)


# -- elementary distributions ------------------------------------------------

def delta_derivative_cell(j: int, p: int, q: int) -> int:
    """Coefficient of z^p w^q in the j-th w-derivative of delta(z - w)."""
    n = -p - 1
    if q != n - j:
        return 0
    return falling(n, j)


def delta_derivative(j: int, window: ExponentWindow) -> Bivariate:
    if j < 0:
        raise ValueError("derivative order must be >= 0")
    cells = {c: delta_derivative_cell(j, *c) for c in window.cells()}
    return Bivariate(window, cells)


def expansion_cell(n: int, direction: str, p: int, q: int):
    """Coefficient of z^p w^q in the expansion of (z - w)^n.

    ``in_z`` expands in |z| > |w| (nonnegative powers of w), ``in_w`` in
    |w| > |z|.  For ``n >= 0`` both agree.
    """
    if p + q != n:
        return 0
    if direction == IN_Z:
        return binom(n, q) * (-1) ** q if q >= 0 else 0
    if direction == IN_W:
        return (-1) ** (n + p) * binom(n, p) if p >= 0 else 0
    raise ValueError(f"unknown direction {direction!r}")


def expand_power(n: int, direction: str, window: ExponentWindow) -> Bivariate:
    cells = {c: expansion_cell(n, direction, *c) for c in window.cells()}
    b = Bivariate(window, cells, finite_support=n >= 0)
    if n >= 0 and any(c not in window for c in _poly_support(n)):
        b.finite_support = False  # polynomial sticks out of the window
    return b


def _poly_support(n: int):
    return [(n - i, i) for i in range(n + 1)]


def residue_z(d: Bivariate) -> UnivariateSeries:
    """The z^-1 row of ``d`` as a series in w."""
    zlo, zhi = d.window.range_of("z")
    if not zlo <= -1 <= zhi:
        raise WindowError(f"z-window [{zlo}, {zhi}] does not contain -1")
    wlo, whi = d.window.range_of("w")
    row = {q: v for (p, q), v in d.cells.items() if p == -1}
    return UnivariateSeries(row, wlo, whi, exact_below=False)


def multiply_scalar(s: Bivariate, d: Bivariate) -> Bivariate:
    """Convolution product of a polynomial ``s`` with an array ``d``.

    The result is reported on the sub-window where every contributing cell of
    ``d`` lies inside ``d``'s window.
    """
    if not s.finite_support:
        if d.finite_support and all(not isinstance(v, Vector) for v in d.cells.values()):
            s, d = d, s
        else:
            raise WindowError("left factor must have finite support")
    (plo, phi), (qlo, qhi) = d.window.bounds
    support = list(s.cells.items())
    if not support:
        return Bivariate(d.window, {})
    di = [c[0] for c, _ in support]
    dj = [c[1] for c, _ in support]
    window = ExponentWindow.of(z=(plo + max(di), phi + min(di)),
                               w=(qlo + max(dj), qhi + min(dj)))
    cells = {}
    for p, q in window.cells():
        acc = None
        for (i, j), sv in support:
            v = d.cells.get((p - i, q - j))
            if v is None:
                continue
            term = v * sv
            acc = term if acc is None else acc + term
        if acc is not None and not is_zero(acc):
            cells[(p, q)] = acc
    return Bivariate(window, cells, d.finite_support)


def first_difference(a: Bivariate, b: Bivariate, window: ExponentWindow | None = None):
    """First cell (in sorted order) where ``a`` and ``b`` differ, or None."""
    window = window or a.window
    for cell in sorted(set(a.cells) | set(b.cells)):
        if cell not in window:
            continue
        if a[cell] != b[cell]:
            return cell
    return None


# -- Taylor / delta identity -------------------------------------------------

def _shifted_power_row(n: int, rmax: int) -> list:
    """Coefficients c_r of x^r w^(n-r), r = 0..rmax, in (w + x)^n for |w| > |x|.

    Built by repeated truncated multiplication of coefficient rows, never
    through a binomial formula, so it is an independent route.
    """
    base = [1, 1] if n >= 0 else [(-1) ** r for r in range(rmax + 1)]
    row = [1] + [0] * rmax
    for _ in range(abs(n)):
        new = [0] * (rmax + 1)
        for i, a in enumerate(row):
            if a:
                for k, b in enumerate(base):
                    if i + k > rmax:
                        break
                    new[i + k] += a * b
        row = new
    return row


def taylor_delta_check(window: ExponentWindow, drop_terms=()) -> CheckReport:
    """Compare the expansion of delta((w + x) - z) for |w| > |x| with the
    divided-power sum of w-derivatives of delta(z - w), cell by cell.

    ``window`` has variables (z, w, x); ``drop_terms`` removes derivative
    orders from the right-hand sum (used as a mutation test).
    """
    (plo, phi), (qlo, qhi), (rlo, rhi) = (window.range_of(v) for v in "zwx")
    rmax = max(rhi, 0)
    rows = {}
    for p in range(plo, phi + 1):
        rows[p] = _shifted_power_row(-p - 1, rmax)
    for p, q, r in window.cells():
        n = -p - 1
        lhs = rows[p][r] if 0 <= r and q == n - r else 0
        rhs = 0
        if r >= 0 and r not in drop_terms:
            rhs = Fraction(delta_derivative_cell(r, p, q), factorial(r))
        if lhs != rhs:
            return CheckReport(
                "taylor-delta", FAILS,
                params={"dropped": sorted(drop_terms)},
                window=window.to_json(),
                witness={"cell": [p, q, r], "lhs": fmt_rational(lhs),
                         "rhs": fmt_rational(rhs)},
            )
    return CheckReport("taylor-delta", HOLDS, params={"dropped": sorted(drop_terms)},
                       window=window.to_json())
