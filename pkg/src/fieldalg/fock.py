"""Free-boson Fock space with exact Heisenberg mode actions.

States are polynomials in x_1, x_2, ... ; a monomial is a partition stored as
a descending tuple of parts, part ``n`` standing for one factor ``x_n``, i.e.
one application of ``alpha_{-n}`` to the vacuum.  ``alpha_n`` for ``n > 0``
acts as ``n * d/dx_n`` and ``alpha_0`` acts as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable

from .linear import Vector, add_into, from_acc

Monomial = tuple  # descending tuple of positive ints; () is the vacuum

VACUUM_KEY: Monomial = ()


def degree(m: Monomial) -> int:
    return sum(m)


def vector_degree(v: Vector) -> int:
    """Largest monomial degree in ``v`` (-1 for the zero vector)."""
    return max((sum(k) for k in v.terms), default=-1)


def monomial(*parts: int) -> Monomial:
    if any(p < 1 for p in parts):
        raise ValueError(f"parts must be positive, got {parts}")
    return tuple(sorted(parts, reverse=True))


def render_monomial(m: Monomial) -> str:
    if not m:
        return "|0>"
    counts: dict[int, int] = {}
    for p in m:
        counts[p] = counts.get(p, 0) + 1
    return " ".join(f"x{p}" if e == 1 else f"x{p}^{e}" for p, e in sorted(counts.items()))


def render_vector(v: Vector) -> str:
    if not v:
        return "0"
    return render_terms(v, render_monomial)


def render_terms(v: Vector, render_key) -> str:
    """``x1 + 2*x2 - 1/2*|0>`` style rendering; a unit coefficient is omitted."""
    if not v:
        return "0"
    out = []
    for k, c in v.items():
        body = render_key(k) if abs(c) == 1 else f"{abs(c)}*{render_key(k)}"
        if not out:
            out.append(body if c > 0 else "-" + body)
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out)


def _insert(m: Monomial, part: int) -> Monomial:
    return tuple(sorted(m + (part,), reverse=True))


def _remove(m: Monomial, part: int) -> Monomial:
    i = m.index(part)
    return m[:i] + m[i + 1:]


@lru_cache(maxsize=None)
def _alpha_on_monomial(n: int, m: Monomial) -> Vector:
    if n < 0:
        return Vector._raw({_insert(m, -n): 1})
    if n == 0:
        return Vector()
    mult = m.count(n)
    if not mult:
        return Vector()
    return Vector._raw({_remove(m, n): n * mult})


def alpha_mode(n: int, v: Vector) -> Vector:
    """Apply the Heisenberg mode ``alpha_n`` to ``v``."""
    if len(v.terms) == 1:
        (k, c), = v.terms.items()
        return _alpha_on_monomial(n, k) * c
    acc: dict = {}
    for k, c in v.terms.items():
        add_into(acc, _alpha_on_monomial(n, k), c)
    return from_acc(acc)


@lru_cache(maxsize=None)
def _translate_monomial(m: Monomial) -> Vector:
    # [T, alpha_{-n}] = n alpha_{-n-1}, T|0> = 0
    acc: dict = {}
    for i, p in enumerate(m):
        if i and m[i - 1] == p:
            continue
        mult = m.count(p)
        bumped = _insert(_remove(m, p), p + 1)
        acc[bumped] = acc.get(bumped, 0) + p * mult
    return from_acc(acc)


def translate(v: Vector) -> Vector:
    """The translation operator T on Fock space."""
    return v.map_basis(_translate_monomial)


@lru_cache(maxsize=None)
def partitions(k: int, largest: int | None = None) -> tuple:
    """All partitions of ``k`` as descending tuples, parts bounded by ``largest``."""
    if largest is None:
        largest = k
    if k == 0:
        return ((),)
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            out.append((first,) + rest)
    return tuple(out)


def basis_up_to(d: int) -> list[Monomial]:
    """Every monomial of degree ``0..d``, degree-major, each exactly once."""
    if d < 0:
        return []
    out: list[Monomial] = []
    for k in range(d + 1):
        out.extend(sorted(partitions(k)))
    return out


@dataclass(frozen=True)
class StateModel:
    """A graded state space with vacuum and translation operator.

    ``translate`` acts on vectors; ``basis_up_to(d)`` lists basis keys; the
    remaining callables describe individual basis keys.
    """

    name: str
    vacuum: Vector
    translate: Callable[[Vector], Vector]
    basis_up_to: Callable[[int], list]
    parity_of: Callable[[Hashable], bool]
    degree_of: Callable[[Hashable], int]
    render_key: Callable[[Hashable], str]

    def basis_vectors(self, d: int) -> list[Vector]:
        return [Vector.basis(k) for k in self.basis_up_to(d)]

    def render(self, v: Vector) -> str:
        return render_terms(v, self.render_key)


def fock_model() -> StateModel:
    return StateModel(
        name="free-boson",
        vacuum=Vector.basis(VACUUM_KEY),
        translate=translate,
        basis_up_to=basis_up_to,
        parity_of=lambda key: False,
        degree_of=degree,
        render_key=render_monomial,
    )
