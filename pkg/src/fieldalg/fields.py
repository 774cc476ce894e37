"""Fields as families of mode operators, and their n-th products.

A field ``a(z) = sum_n a_(n) z^(-n-1)`` is stored behaviourally: a rule that
applies ``a_(n)`` to a basis key, plus an annihilation bound ``N(v)`` with
``a_(n) v = 0`` for every ``n >= N(v)``.  Derived fields (derivatives,
normally ordered products, n-th products) evaluate through their operands and
memoize per ``(n, basis key)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable

from . import fock
from .distributions import Bivariate, ExponentWindow, binom
from .linear import Vector, add_into, from_acc
from .report import FAILS, HOLDS, INAPPLICABLE, CheckReport, grid_window

# annihilation bound of the zero vector: every mode kills it
NEVER = -(10**9)


def parity_sign(a_odd: bool, b_odd: bool) -> int:
    return -1 if (a_odd and b_odd) else 1


class Field:
    """A parity-tagged family of mode operators with an annihilation bound."""

    def __init__(self, label: str, action: Callable[[int, Hashable], Vector],
                 bound: Callable[[Hashable], int], odd: bool = False):
        self.label = label
        self.odd = odd
        self._action = action
        self._bound = bound
        self._modes: dict = {}
        self._bounds: dict = {}

    def __repr__(self):
        return f"Field({self.label})"

    def mode_on_key(self, n: int, key) -> Vector:
        k = (n, key)
        out = self._modes.get(k)
        if out is None:
            out = self._action(n, key)
            self._modes[k] = out
        return out

    def mode(self, n: int, v: Vector) -> Vector:
        """Apply ``a_(n)`` to ``v`` (linear in ``v``)."""
        terms = v.terms
        if not terms:
            return v
        if len(terms) == 1:
            (key, c), = terms.items()
            return self.mode_on_key(n, key) * c
        acc: dict = {}
        for key, c in terms.items():
            add_into(acc, self.mode_on_key(n, key), c)
        return from_acc(acc)

    def bound_on_key(self, key) -> int:
        out = self._bounds.get(key)
        if out is None:
            out = max(self._bound(key), NEVER)
            self._bounds[key] = out
        return out

    def ann_bound(self, v: Vector) -> int:
        return max((self.bound_on_key(k) for k in v.terms), default=NEVER)

    # linear structure on fields
    def __add__(self, other: "Field") -> "Field":
        return combination([(1, self), (1, other)], f"{self.label}+{other.label}")

    def __sub__(self, other: "Field") -> "Field":
        return combination([(1, self), (-1, other)], f"{self.label}-{other.label}")

    def __rmul__(self, s) -> "Field":
        return combination([(s, self)], f"{s}*{self.label}")


def combination(terms: list, label: str) -> Field:
    """The field ``sum c_i f_i`` for ``terms = [(c_i, f_i), ...]``."""
    terms = [(c, f) for c, f in terms if c != 0]
    odd = any(f.odd for _, f in terms)

    def action(n, key):
        acc: dict = {}
        v = Vector.basis(key)
        for c, f in terms:
            add_into(acc, f.mode(n, v), c)
        return from_acc(acc)

    def bound(key):
        v = Vector.basis(key)
        return max((f.ann_bound(v) for _, f in terms), default=NEVER)

    return Field(label, action, bound, odd)


def identity_field() -> Field:
    """The field of the vacuum: only ``mode(-1)`` is nonzero, and it is Id."""
    return Field("Id", lambda n, key: Vector.basis(key) if n == -1 else Vector(),
                 lambda key: 0)


def zero_field() -> Field:
    return Field("0", lambda n, key: Vector(), lambda key: NEVER)


# -- free-boson fields ------------------------------------------------------------

def alpha_field() -> Field:
    """alpha(z) = sum alpha_n z^(-n-1) on Fock space."""
    return Field("alpha", fock._alpha_on_monomial, lambda key: fock.degree(key) + 1)


def _beta_action(m, key):
    if m < 0:
        return Vector()
    return fock._alpha_on_monomial(m + 1, key) * Fraction(1, m + 1)


def beta_field() -> Field:
    """beta(z) = sum_{n>0} alpha_n z^(-n) / n, i.e. beta_(m) = alpha_{m+1}/(m+1)."""
    return Field("beta", _beta_action, fock.degree)


# -- derivatives ---------------------------------------------------------------

def derivative(a: Field) -> Field:
    """(d a)_(n) = -n a_(n-1)."""
    return Field(
        f"d({a.label})",
        lambda n, key: a.mode(n - 1, Vector.basis(key)) * (-n),
        lambda key: a.bound_on_key(key) + 1,
        a.odd,
    )


def divided_derivative(a: Field, j: int) -> Field:
    """j-th derivative divided by j!; mode n is (-1)^j C(n, j) a_(n-j)."""
    if j == 0:
        return a

    def action(n, key):
        c = (-1) ** j * binom(n, j)
        if c == 0:
            return Vector()
        return a.mode(n - j, Vector.basis(key)) * c

    return Field(f"d^({j})({a.label})", action, lambda key: a.bound_on_key(key) + j, a.odd)


# -- products ----------------------------------------------------------------------

def normal_ordered(a: Field, b: Field) -> Field:
    """:a b: with creation modes of ``a`` left and annihilation modes right."""
    sign = parity_sign(a.odd, b.odd)

    def action(m, key):
        v = Vector.basis(key)
        acc: dict = {}
        nb = b.ann_bound(v)
        # b_(m-n-1) v = 0 once m-n-1 >= nb
        for n in range(m - nb, 0):
            u = b.mode(m - n - 1, v)
            if u:
                add_into(acc, a.mode(n, u))
        for n in range(0, a.ann_bound(v)):
            u = a.mode(n, v)
            if u:
                add_into(acc, b.mode(m - n - 1, u), sign)
        return from_acc(acc)

    def bound(key):
        v = Vector.basis(key)
        out = b.ann_bound(v)
        for n in range(0, a.ann_bound(v)):
            u = a.mode(n, v)
            if u:
                out = max(out, b.ann_bound(u) + n + 1)
        return out

    return Field(f":{a.label} {b.label}:", action, bound, a.odd != b.odd)


def _commutator_product(a: Field, b: Field, n: int) -> Field:
    sign = parity_sign(a.odd, b.odd)
    coeffs = [(j, (-1) ** j * binom(n, j)) for j in range(n + 1)]

    def action(m, key):
        v = Vector.basis(key)
        acc: dict = {}
        for j, c in coeffs:
            bv = b.mode(m + j, v)
            if bv:
                add_into(acc, a.mode(n - j, bv), c)
            av = a.mode(n - j, v)
            if av:
                add_into(acc, b.mode(m + j, av), -sign * c)
        return from_acc(acc)

    def bound(key):
        v = Vector.basis(key)
        nb = b.ann_bound(v)
        out = NEVER
        for j, _ in coeffs:
            out = max(out, max(nb, b.ann_bound(a.mode(n - j, v))) - j)
        return out

    return Field(f"{a.label}_({n}){b.label}", action, bound, a.odd != b.odd)


def nth_product(a: Field, b: Field, n: int) -> Field:
    """The n-th product field a(z)_(n) b(z).

    For ``n >= 0`` it is the residue of (z-w)^n against the supercommutator;
    for ``n < 0`` it is the normally ordered product of the divided
    ``(-n-1)``-th derivative of ``a`` with ``b``.
    """
    if n >= 0:
        return _commutator_product(a, b, n)
    f = normal_ordered(divided_derivative(a, -n - 1), b)
    f.label = f"{a.label}_({n}){b.label}"
    return f


# -- grid comparisons -----------------------------------------------------------------

def fock_vectors(degree_cap: int) -> list[Vector]:
    return [Vector.basis(k) for k in fock.basis_up_to(degree_cap)]


def mode_range(mode_window: int) -> range:
    return range(-mode_window, mode_window + 1)


def first_nonzero(f: Field, vectors: Iterable[Vector], modes: Iterable[int]):
    """First ``(m, v, f_(m) v)`` with nonzero value, or None."""
    modes = list(modes)
    for v in vectors:
        for m in modes:
            out = f.mode(m, v)
            if out:
                return m, v, out
    return None


def first_disagreement(f: Field, g: Field, vectors: Iterable[Vector], modes: Iterable[int]):
    modes = list(modes)
    for v in vectors:
        for m in modes:
            x, y = f.mode(m, v), g.mode(m, v)
            if x != y:
                return m, v, x, y
    return None


def witness_dict(check: str, a: Field, b: Field | None, n, m, v: Vector, result: Vector,
                 expected: Vector | None = None) -> dict:
    w = {"check": check, "field_a": a.label, "field_b": b.label if b else None,
         "n": n, "mode": m, "vector": v.to_json(), "result": result.to_json()}
    if expected is not None:
        w["expected"] = expected.to_json()
    return w


# -- weak locality -------------------------------------------------------------------

def weak_locality_bound(a: Field, b: Field, degree_cap: int = 6, n_max: int = 8,
                        mode_window: int = 4, vectors: list[Vector] | None = None) -> CheckReport:
    """Least ``N <= n_max`` with a_(n) b = 0 for ``N <= n <= n_max`` on the grid."""
    if vectors is None:
        vectors = fock_vectors(degree_cap)
    modes = mode_range(mode_window)
    params = {"field_a": a.label, "field_b": b.label, "D": degree_cap,
              "n_max": n_max, "W": mode_window}
    found = None
    for n in range(n_max, -1, -1):
        hit = first_nonzero(nth_product(a, b, n), vectors, modes)
        if hit is not None:
            if n == n_max:
                m, v, out = hit
                return CheckReport(
                    "weak-locality", FAILS, params, grid_window(degree_cap, mode_window),
                    witness=witness_dict("weak-locality", a, b, n, m, v, out),
                    details={"summary": f"no bound found <= {n_max}"})
            found = n + 1
            break
    if found is None:
        found = 0
    return CheckReport("weak-locality", HOLDS, params, grid_window(degree_cap, mode_window),
                       details={"bound": found,
                                "summary": f"weakly local with bound N={found} at (D={degree_cap}, n_max={n_max})"})


# -- skewsymmetry -----------------------------------------------------------------------

def _skew_residual_field(a: Field, b: Field, n: int, ba_bound: int, sign: int) -> Field:
    p = parity_sign(a.odd, b.odd)
    terms = [(1, nth_product(a, b, n))]
    # b_(n+j) a vanishes once n + j >= ba_bound
    for j in range(0, max(ba_bound - n, 0)):
        terms.append((sign * p * (-1) ** (j + n), divided_derivative(nth_product(b, a, n + j), j)))
    return combination(terms, f"skew({a.label},{b.label},{n})")


@lru_cache(maxsize=None)
def calibrate_skew_sign(degree_cap: int = 4, mode_window: int = 3) -> int:
    """The global sign making the residual vanish for the local pair (alpha, alpha)."""
    a = alpha_field()
    vectors = fock_vectors(degree_cap)
    bound = weak_locality_bound(a, a, degree_cap, 6, mode_window, vectors).details["bound"]
    good = []
    for sign in (1, -1):
        if all(first_nonzero(_skew_residual_field(a, a, n, bound, sign), vectors,
                             mode_range(mode_window)) is None for n in range(-2, 4)):
            good.append(sign)
    if len(good) != 1:
        raise RuntimeError(f"skewsymmetry sign calibration is ambiguous: {good}")
    return good[0]


def skewsymmetry_residual(a: Field, b: Field, n: int, degree_cap: int = 6, j_max: int = 8,
                          mode_window: int = 4, n_max: int = 8,
                          vectors: list[Vector] | None = None) -> CheckReport:
    """Evaluate R = a_(n)b + p(a,b) sum_j (-1)^(j+n) d^(j)(b_(n+j)a) on the grid.

    R vanishes identically for local pairs; verdict ``holds`` means R = 0.
    """
    if vectors is None:
        vectors = fock_vectors(degree_cap)
    params = {"field_a": a.label, "field_b": b.label, "n": n, "D": degree_cap,
              "W": mode_window, "j_max": j_max}
    window = grid_window(degree_cap, mode_window)
    ab = weak_locality_bound(a, b, degree_cap, n_max, mode_window, vectors)
    ba = weak_locality_bound(b, a, degree_cap, n_max, mode_window, vectors)
    if not (ab.holds and ba.holds):
        bad = ab if not ab.holds else ba
        return CheckReport("skewsymmetry", INAPPLICABLE, params, window, bad.witness,
                           {"summary": "pair is not weakly local in both orders"})
    ba_bound = ba.details["bound"]
    if ba_bound - n - 1 > j_max:
        return CheckReport("skewsymmetry", INAPPLICABLE, params, window, None,
                           {"summary": f"j-sum needs {ba_bound - n} terms > j_max"})
    sign = calibrate_skew_sign()
    r = _skew_residual_field(a, b, n, ba_bound, sign)
    hit = first_nonzero(r, vectors, mode_range(mode_window))
    details = {"sign": sign, "ba_bound": ba_bound}
    if hit is None:
        details["summary"] = "residual vanishes"
        return CheckReport("skewsymmetry", HOLDS, params, window, None, details)
    m, v, out = hit
    scalar = identity_multiple(r, vectors, mode_window)
    if scalar is not None:
        details["identity_multiple"] = f"{scalar.numerator}/{scalar.denominator}"
        details["summary"] = f"residual = {scalar} * Id"
    witness = witness_dict("skewsymmetry", a, b, n, m, v, out)
    witness.update(ba_bound=ba_bound, sign=sign)
    return CheckReport("skewsymmetry", FAILS, params, window, witness, details)


def identity_multiple(f: Field, vectors: list[Vector], mode_window: int) -> Fraction | None:
    """``c`` if ``f`` agrees with ``c * Id`` on the grid, else None."""
    vac = vectors[0]
    out = f.mode(-1, vac)
    if len(out.terms) != 1 or next(iter(out.terms)) not in vac.terms:
        return None
    c = Fraction(out.terms[next(iter(out.terms))]) / next(iter(vac.terms.values()))
    target = combination([(c, identity_field())], f"{c}*Id")
    if first_disagreement(f, target, vectors, mode_range(mode_window)) is not None:
        return None
    return c


# -- commutators and the residue route ------------------------------------------

def commutator_coefficients(a: Field, b: Field, v: Vector, window: ExponentWindow) -> Bivariate:
    """Cell (p, q) = [a_(-p-1), b_(-q-1)] v (supercommutator)."""
    sign = parity_sign(a.odd, b.odd)
    cells = {}
    for p, q in window.cells():
        x = a.mode(-p - 1, b.mode(-q - 1, v))
        y = b.mode(-q - 1, a.mode(-p - 1, v))
        val = x - y * sign
        if val:
            cells[(p, q)] = val
    return Bivariate(window, cells)


def residue_product_modes(a: Field, b: Field, n: int, v: Vector, mode_window: int) -> dict:
    """Modes of a_(n)b on ``v`` via Res_z (z-w)^n [a(z), b(w)], for n >= 0.

    Goes through the distribution kernel only: commutator array, polynomial
    multiplication, residue row.  Returns ``{m: vector}`` for |m| <= W.
    """
    from .distributions import IN_Z, expand_power, multiply_scalar, residue_z

    if n < 0:
        raise ValueError("residue route covers n >= 0 only")
    window = ExponentWindow.of(z=(-n - 2, 1), w=(-mode_window - 1 - n, mode_window))
    comm = commutator_coefficients(a, b, v, window)
    poly = expand_power(n, IN_Z, ExponentWindow.of(z=(0, n), w=(0, n)))
    row = residue_z(multiply_scalar(poly, comm))
    return {m: row[-m - 1] or Vector() for m in mode_range(mode_window)}


# -- weak Dong lemma ------------------------------------------------------------------

def dong_weak_check(a: Field, b: Field, c: Field, ks: Iterable[int] = (-1, 0, 1),
                    degree_cap: int = 6, n_max: int = 8, mode_window: int = 4,
                    vectors: list[Vector] | None = None, _cache: dict | None = None) -> CheckReport:
    """Are the products a_(k)b weakly local with c, in both orders?"""
    if vectors is None:
        vectors = fock_vectors(degree_cap)
    cache = {} if _cache is None else _cache

    def bound(x, y):
        key = (id(x), id(y))
        if key not in cache:
            cache[key] = weak_locality_bound(x, y, degree_cap, n_max, mode_window, vectors)
        return cache[key]

    ks = list(ks)
    params = {"fields": [a.label, b.label, c.label], "k": ks, "D": degree_cap, "n_max": n_max}
    window = grid_window(degree_cap, mode_window)
    trio = (a, b, c)
    for x in trio:
        for y in trio:
            r = bound(x, y)
            if not r.holds:
                return CheckReport("dong", INAPPLICABLE, params, window, r.witness,
                                   {"summary": f"({x.label}, {y.label}) not weakly local"})
    found = {}
    for k in ks:
        prod = nth_product(a, b, k)
        for first, second in ((prod, c), (c, prod)):
            r = weak_locality_bound(first, second, degree_cap, n_max, mode_window, vectors)
            if not r.holds:
                return CheckReport("dong", FAILS, params, window, r.witness,
                                   {"summary": f"({first.label}, {second.label}) has no bound"})
            found[f"({first.label}, {second.label})"] = r.details["bound"]
    return CheckReport("dong", HOLDS, params, window, None, {"bounds": found})
