"""Sparse exact vectors over the rationals.

A :class:`Vector` is a finite map from hashable basis keys to nonzero
rational coefficients (``int`` or :class:`fractions.Fraction`).  Keys of a
single state model are tuples of ints, so they sort and serialize uniformly.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Hashable, Iterable, Iterator


def fmt_rational(x: Rational) -> str:
    """Render a rational as ``"num/den"`` (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Vector:
    """Immutable sparse vector with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {k: _norm(c) for k, c in dict(terms).items() if c != 0}

    @classmethod
    def _raw(cls, terms: dict) -> "Vector":
        # caller guarantees no zero coefficients
        v = object.__new__(cls)
        v.terms = terms
        return v

    @classmethod
    def basis(cls, key: Hashable, coeff=1) -> "Vector":
        return cls({key: coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator:
        return iter(sorted(self.terms))

    def items(self):
        return sorted(self.terms.items())

    def coeff(self, key):
        return self.terms.get(key, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Vector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Vector") -> "Vector":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = _norm(s)
            else:
                out.pop(k, None)
        return Vector._raw(out)

    def __neg__(self) -> "Vector":
        return Vector._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Vector") -> "Vector":
        return self + (-other)

    def __mul__(self, s) -> "Vector":
        if s == 0:
            return Vector()
        if s == 1:
            return self
        return Vector._raw({k: _norm(c * s) for k, c in self.terms.items()})

    __rmul__ = __mul__

    def map_basis(self, fn: Callable[[Hashable], "Vector"]) -> "Vector":
        """Extend ``fn`` (defined on basis keys) linearly to this vector."""
        acc: dict = {}
        for k, c in self.terms.items():
            add_into(acc, fn(k), c)
        return from_acc(acc)

    def __repr__(self) -> str:
        if not self.terms:
            return "Vector(0)"
        return "Vector(" + " + ".join(f"{c}*{k}" for k, c in self.items()) + ")"

    def to_json(self) -> list:
        return [[list(k), fmt_rational(c)] for k, c in self.items()]

    @classmethod
    def from_json(cls, data: list) -> "Vector":
        return cls({tuple(k): parse_rational(c) for k, c in data})


def add_into(acc: dict, v: Vector, scale=1) -> None:
    """Accumulate ``scale * v`` into the mutable dict ``acc`` (may leave zeros)."""
    if scale == 0:
        return
    if scale == 1:
        for k, c in v.terms.items():
            acc[k] = acc.get(k, 0) + c
    else:
        for k, c in v.terms.items():
            acc[k] = acc.get(k, 0) + c * scale


def from_acc(acc: dict) -> Vector:
    return Vector._raw({k: _norm(c) for k, c in acc.items() if c != 0})


def vsum(vectors: Iterable[Vector]) -> Vector:
    acc: dict = {}
    for v in vectors:
        add_into(acc, v)
    return from_acc(acc)


ZERO = Vector()


def express_in_span(targets: list[Vector], spanning: list[Vector]):
    """Write each target as a rational combination of ``spanning``.

    Returns ``(solutions, missing)`` where ``solutions[i]`` is a dict
    ``{index into spanning: coefficient}`` or ``None`` when ``targets[i]`` is
    outside the span; ``missing`` lists those target indices.
    Plain Gaussian elimination with exact arithmetic.
    """
    # echelon rows: (pivot key, vector, combination over spanning indices)
    rows: list[tuple] = []

    def reduce(v: Vector, combo: dict):
        v_acc = dict(v.terms)
        for pivot, rv, rc in rows:
            c = v_acc.get(pivot, 0)
            if c:
                f = Fraction(c) / rv.terms[pivot]
                add_into(v_acc, rv, -f)
                for i, ci in rc.items():
                    combo[i] = combo.get(i, 0) - f * ci
                v_acc = {k: x for k, x in v_acc.items() if x != 0}
        return from_acc(v_acc), combo

    for i, s in enumerate(spanning):
        r, combo = reduce(s, {i: 1})
        if r:
            rows.append((min(r.terms), r, combo))

    solutions, missing = [], []
    for t_idx, t in enumerate(targets):
        r, combo = reduce(t, {})
        if r:
            solutions.append(None)
            missing.append(t_idx)
        else:
            solutions.append({i: -c for i, c in combo.items() if c != 0})
    return solutions, missing
