"""State-field correspondence: field algebras built from generators, from an
associative algebra with a derivation, and their opposite fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Hashable

from . import fock
from .distributions import (IN_Z, ExponentWindow, UnivariateSeries, expand_power,
                            multiply_scalar)
from .fields import (Field, combination, commutator_coefficients, first_disagreement,
                     identity_field, mode_range, parity_sign, weak_locality_bound,
                     witness_dict)
from .fock import StateModel
from .linear import Vector, add_into, express_in_span, from_acc
from .report import FAILS, HOLDS, INAPPLICABLE, CheckReport, grid_window


class BuildError(ValueError):
    """The generator data does not meet the construction's hypotheses."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness


def twist(m: int) -> int:
    """Sign picked up by mode ``m`` under z -> -z (it sits at z^(-m-1))."""
    return -1 if m % 2 == 0 else 1


@dataclass(frozen=True, order=True)
class StateKey:
    """A state written as iterated generator modes on the vacuum.

    ``ops`` lists ``(generator index, mode)`` pairs, outermost first, so
    ``StateKey(((0, -2), (0, -1)))`` is ``a[-2]a[-1]|0>``.
    """

    ops: tuple = ()

    def apply(self, g: int, n: int) -> "StateKey":
        return StateKey(((g, n),) + self.ops)

    @property
    def depth(self) -> int:
        return len(self.ops)

    def render(self, labels=("a",)) -> str:
        return "".join(f"{labels[g]}[{n}]" for g, n in self.ops) + "|0>"


VACUUM_STATE = StateKey()


class FieldAlgebra:
    """Vacuum, translation and a linear state-field map Y on a state model.

    ``basis_field(key)`` gives Y of a basis state; Y of any vector is the
    corresponding combination.  Fields are memoized per basis key.
    """

    def __init__(self, name: str, model: StateModel, basis_field: Callable[[Hashable], Field],
                 test_keys: Callable[[int], list], generators: list[Field] | None = None,
                 labels: tuple = ("a",)):
        self.name = name
        self.model = model
        self._make_field = basis_field
        self._test_keys = test_keys
        self.generators = generators
        self.labels = labels
        self._fields: dict = {}
        self._opposite: dict = {}
        self._key_fields: dict = {}
        self._span_cache = None
        self.algebra = None  # the associative algebra behind a holomorphic construction

    def __repr__(self):
        return f"FieldAlgebra({self.name})"

    @property
    def vacuum(self) -> Vector:
        return self.model.vacuum

    def T(self, v: Vector) -> Vector:
        return self.model.translate(v)

    def render(self, v: Vector) -> str:
        return self.model.render(v)

    def basis_field(self, key) -> Field:
        f = self._fields.get(key)
        if f is None:
            f = self._make_field(key)
            self._fields[key] = f
        return f

    def Y(self, v: Vector) -> Field:
        if len(v.terms) == 1:
            (k, c), = v.terms.items()
            if c == 1:
                return self.basis_field(k)
        return combination([(c, self.basis_field(k)) for k, c in v.items()],
                           f"Y({self.render(v)})")

    def Y_mode(self, a: Vector, n: int, u: Vector) -> Vector:
        """a_(n) u, i.e. the n-th mode of Y(a) applied to u."""
        acc: dict = {}
        for k, c in a.terms.items():
            add_into(acc, self.basis_field(k).mode(n, u), c)
        return from_acc(acc)

    def parity(self, v: Vector) -> bool:
        odd = {self.model.parity_of(k) for k in v.terms}
        if len(odd) > 1:
            raise ValueError("vector is not parity-homogeneous")
        return odd.pop() if odd else False

    def test_states(self, depth: int) -> list[Vector]:
        return [Vector.basis(k) for k in self._test_keys(depth)]

    def grid(self, degree_cap: int) -> list[Vector]:
        return self.model.basis_vectors(degree_cap)

    # -- generator presentations ---------------------------------------------------
    def evaluate(self, key: StateKey) -> Vector:
        v = self.vacuum
        for g, n in reversed(key.ops):
            v = self.generators[g].mode(n, v)
        return v

    def Y_key(self, key: StateKey) -> Field:
        """Y on a presentation, by the n-th product recursion."""
        from .fields import nth_product

        f = self._key_fields.get(key)
        if f is None:
            if not key.ops:
                f = identity_field()
            else:
                (g, n), inner = key.ops[0], StateKey(key.ops[1:])
                f = nth_product(self.generators[g], self.Y_key(inner), n)
            f.label = f"Y({key.render(self.labels)})"
            self._key_fields[key] = f
        return f

    def presentations(self, degree_cap: int) -> tuple[dict, list]:
        """Canonical presentation of every basis state of degree <= cap.

        Returns ``({basis key: {StateKey: coeff}}, unreached basis keys)``.
        """
        if self._span_cache and self._span_cache[0] >= degree_cap:
            pres, missing = self._span_cache[1], self._span_cache[2]
            keep = set(self.model.basis_up_to(degree_cap))
            return ({k: p for k, p in pres.items() if k in keep},
                    [k for k in missing if k in keep])
        keys, states = _reachable_keys(self, degree_cap)
        basis = self.model.basis_up_to(degree_cap)
        sols, missing_idx = express_in_span([Vector.basis(k) for k in basis], states)
        pres = {}
        for k, sol in zip(basis, sols):
            if sol is not None:
                pres[k] = {keys[i]: c for i, c in sol.items()}
        missing = [basis[i] for i in missing_idx]
        self._span_cache = (degree_cap, pres, missing)
        return pres, missing

    # -- overrides (mutation tests) ------------------------------------------------
    def with_override(self, name: str, overrides: dict) -> "FieldAlgebra":
        base = self

        def make(key):
            if key in overrides:
                return overrides[key]
            return base.basis_field(key)

        return FieldAlgebra(name, self.model, make, self._test_keys, None, self.labels)

    # -- opposite fields ---------------------------------------------------------------
    def X(self, v: Vector) -> Field:
        if len(v.terms) == 1:
            (k, c), = v.terms.items()
            if c == 1:
                return self.opposite_basis_field(k)
        return combination([(c, self.opposite_basis_field(k)) for k, c in v.items()],
                           f"X({self.render(v)})")

    def opposite_algebra(self) -> "FieldAlgebra":
        """The same space with X in place of Y."""
        return FieldAlgebra(f"{self.name}^op", self.model, self.opposite_basis_field,
                            self._test_keys, None, self.labels)

    def opposite_basis_field(self, key) -> Field:
        f = self._opposite.get(key)
        if f is None:
            f = opposite(self, Vector.basis(key))
            self._opposite[key] = f
        return f


def _reachable_keys(fa: FieldAlgebra, degree_cap: int):
    """Breadth-first generator-mode presentations up to ``degree_cap``.

    Keys whose state duplicates an earlier state are dropped; the order is
    shortest first, then lexicographic.
    """
    degree = fa.model.degree_of
    seen = {frozenset(fa.vacuum.terms.items())}
    keys, states = [VACUUM_STATE], [fa.vacuum]
    frontier = [VACUUM_STATE]
    while frontier:
        nxt = []
        for key in frontier:
            v = fa.evaluate(key)
            for g in range(len(fa.generators)):
                for n in range(-1, -degree_cap - 2, -1):
                    new = fa.generators[g].mode(n, v)
                    if not new or max(degree(k) for k in new.terms) > degree_cap:
                        continue
                    sig = frozenset(new.terms.items())
                    if sig in seen:
                        continue
                    seen.add(sig)
                    k2 = key.apply(g, n)
                    keys.append(k2)
                    states.append(new)
                    nxt.append(k2)
        frontier = sorted(nxt)
    return keys, states


def _fock_test_keys(depth: int) -> list:
    return [k for k in fock.basis_up_to(depth) if len(k) <= depth]


def build(generators: list[Field], model: StateModel | None = None, degree_cap: int = 6,
          n_max: int = 8, mode_window: int = 4, labels: tuple = ("a",),
          name: str = "generated") -> FieldAlgebra:
    """Field algebra generated by mutually weakly local fields.

    Raises :class:`BuildError` when a pair of generators has no weak-locality
    bound on the grid or when generator modes on the vacuum do not span the
    basis up to ``degree_cap``.
    """
    model = model or fock.fock_model()
    vectors = model.basis_vectors(degree_cap)
    for a in generators:
        for b in generators:
            r = weak_locality_bound(a, b, degree_cap, n_max, mode_window, vectors)
            if not r.holds:
                raise BuildError(f"generators ({a.label}, {b.label}) are not weakly local",
                                 r.witness)

    fa = FieldAlgebra(name, model, None, _fock_test_keys, list(generators), labels)

    def make(key):
        deg = model.degree_of(key)
        pres, missing = fa.presentations(max(deg, degree_cap))
        if key not in pres:
            raise BuildError(f"basis state {model.render_key(key)} is not reached")
        f = combination([(c, fa.Y_key(k)) for k, c in sorted(pres[key].items())],
                        f"Y({model.render_key(key)})")
        return f

    fa._make_field = make
    _, missing = fa.presentations(degree_cap)
    if missing:
        raise BuildError("generators do not span the state space: unreached "
                         + ", ".join(model.render_key(k) for k in missing))
    return fa


def free_boson_algebra(degree_cap: int = 6) -> FieldAlgebra:
    from .fields import alpha_field
    return build([alpha_field()], fock.fock_model(), degree_cap, name="free-boson")


# -- e^{zT} and opposite fields ---------------------------------------------------------

def exp_zT_coefficient(s: UnivariateSeries, translate: Callable[[Vector], Vector],
                       k: int) -> Vector:
    """Coefficient of z^k in e^{zT} s: sum_{j=0}^{k-min} T^j s_{k-j} / j!."""
    acc: dict = {}
    for i in range(s.min_exponent, k + 1):
        c = s.coeffs.get(i)
        if not c:
            continue
        j = k - i
        t = c
        for _ in range(j):
            t = translate(t)
        add_into(acc, t, Fraction(1, factorial(j)))
    return from_acc(acc)


def apply_exp_zT(s: UnivariateSeries, translate: Callable[[Vector], Vector],
                 upto: int | None = None) -> UnivariateSeries:
    """e^{zT} applied to a series bounded below, through exponent ``upto``.

    Each output coefficient is a finite sum because ``s`` vanishes below
    ``min_exponent``.
    """
    top = upto if upto is not None else s.max_exponent
    if top is None:
        top = max(s.coeffs, default=s.min_exponent)
    if s.max_exponent is not None and top > s.max_exponent:
        raise ValueError("requested exponents beyond the input's known range")
    out = {k: exp_zT_coefficient(s, translate, k) for k in range(s.min_exponent, top + 1)}
    return UnivariateSeries(out, s.min_exponent, top)


def skew_series(fa: FieldAlgebra, b: Vector, a: Vector, upto: int) -> UnivariateSeries:
    """Y(b, -z) a as a series in z through exponent ``upto``."""
    yb = fa.Y(b)
    lo = -yb.ann_bound(a)
    coeffs = {}
    for k in range(lo, upto + 1):
        m = -k - 1
        coeffs[k] = yb.mode(m, a) * twist(m)
    return UnivariateSeries(coeffs, min(lo, upto), upto)


def opposite(fa: FieldAlgebra, a: Vector) -> Field:
    """X(a, z) b = p(a, b) e^{zT} Y(b, -z) a, read off mode by mode."""
    a_odd = fa.parity(a)

    def action(n, bkey):
        b = Vector.basis(bkey)
        k = -n - 1
        s = skew_series(fa, b, a, k)
        if k < s.min_exponent:
            return Vector()
        out = exp_zT_coefficient(s, fa.T, k)
        return out * parity_sign(a_odd, fa.model.parity_of(bkey))

    def bound(bkey):
        return fa.basis_field(bkey).ann_bound(a)

    return Field(f"X({fa.render(a)})", action, bound, a_odd)


# -- holomorphic field algebras -------------------------------------------------------

class AssocAlgebraModel:
    """Finite-dimensional unital associative algebra with a derivation.

    ``mult[(i, j)]`` is the product of basis elements as a :class:`Vector`;
    ``derivation[i]`` is T applied to basis element ``i``.  Associativity,
    the unit laws and the Leibniz rule are verified on construction.
    """

    def __init__(self, name: str, basis: list, mult: dict, unit: Vector, derivation: dict,
                 render_key: Callable = str):
        self.name = name
        self.basis = list(basis)
        self.mult = mult
        self.unit = unit
        self.derivation = derivation
        self.render_key = render_key
        self._validate()

    def mul(self, u: Vector, v: Vector) -> Vector:
        acc: dict = {}
        for i, a in u.terms.items():
            for j, b in v.terms.items():
                add_into(acc, self.mult[(i, j)], a * b)
        return from_acc(acc)

    def T(self, v: Vector) -> Vector:
        return v.map_basis(lambda k: self.derivation.get(k, Vector()))

    def _validate(self):
        e = [Vector.basis(k) for k in self.basis]
        for x in e:
            if self.mul(self.unit, x) != x or self.mul(x, self.unit) != x:
                raise ValueError(f"{self.name}: unit law fails on {x}")
            for y in e:
                lhs = self.T(self.mul(x, y))
                rhs = self.mul(self.T(x), y) + self.mul(x, self.T(y))
                if lhs != rhs:
                    raise ValueError(f"{self.name}: T is not a derivation on ({x}, {y})")
                for z in e:
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                        raise ValueError(f"{self.name}: not associative on ({x}, {y}, {z})")
        if self.T(self.unit):
            raise ValueError(f"{self.name}: T does not kill the unit")

    def state_model(self) -> StateModel:
        basis = self.basis
        return StateModel(
            name=self.name,
            vacuum=self.unit,
            translate=self.T,
            basis_up_to=lambda d: list(basis) if d >= 0 else [],
            parity_of=lambda key: False,
            degree_of=lambda key: 0,
            render_key=self.render_key,
        )


def _render_matrix_unit(key) -> str:
    return f"E{key[0]}{key[1]}"


def matrix_algebra(derivation_by: tuple = (1, 2)) -> AssocAlgebraModel:
    """2x2 rational matrices with T = ad(E_ij), (i, j) = ``derivation_by``."""
    basis = [(i, j) for i in (1, 2) for j in (1, 2)]
    mult = {}
    for (i, j) in basis:
        for (k, l) in basis:
            mult[((i, j), (k, l))] = Vector.basis((i, l)) if j == k else Vector()
    unit = Vector({(1, 1): 1, (2, 2): 1})
    alg = AssocAlgebraModel("matrices", basis, mult, unit, {}, _render_matrix_unit)
    e = Vector.basis(derivation_by)
    deriv = {}
    for k in basis:
        x = Vector.basis(k)
        deriv[k] = alg.mul(e, x) - alg.mul(x, e)
    return AssocAlgebraModel(f"matrices[T=ad(E{derivation_by[0]}{derivation_by[1]})]",
                             basis, mult, unit, deriv, _render_matrix_unit)


def diagonal_algebra() -> AssocAlgebraModel:
    """Diagonal 2x2 matrices (commutative) with the zero derivation."""
    basis = [(1, 1), (2, 2)]
    mult = {(a, b): (Vector.basis(a) if a == b else Vector()) for a in basis for b in basis}
    return AssocAlgebraModel("diagonal", basis, mult, Vector({(1, 1): 1, (2, 2): 1}), {},
                             _render_matrix_unit)


def holomorphic(alg: AssocAlgebraModel) -> FieldAlgebra:
    """Y(a, z) b = (e^{zT} a) b; only modes n <= -1 are nonzero."""
    model = alg.state_model()
    dim = len(alg.basis)

    def make(key):
        a = Vector.basis(key)
        # T is nilpotent on a finite-dimensional space iff T^dim kills everything
        powers = [a]
        for j in range(1, dim + 2):
            powers.append(alg.T(powers[-1]) * Fraction(1, j))

        def action(n, bkey):
            if n >= 0:
                return Vector()
            j = -n - 1
            if j < len(powers):
                t = powers[j]
            else:
                t = a
                for _ in range(j):
                    t = alg.T(t)
                t = t * Fraction(1, factorial(j))
            return alg.mul(t, Vector.basis(bkey))

        return Field(f"Y({model.render_key(key)})", action, lambda bkey: 0)

    fa = FieldAlgebra(alg.name, model, make, lambda depth: list(alg.basis))
    fa.algebra = alg
    return fa


# -- uniqueness ---------------------------------------------------------------------------

def _local_bound(comm, n_max):
    """Least N <= n_max with (z-w)^N comm = 0 on its interior window, else None."""
    for N in range(n_max + 1):
        poly = expand_power(N, IN_Z, ExponentWindow.of(z=(0, N), w=(0, N)))
        prod = multiply_scalar(poly, comm)
        if not prod.cells:
            return N, prod.window
    return None, None


def uniqueness_check(fa: FieldAlgebra, B: Field, b: Vector, degree_cap: int = 4,
                     mode_window: int = 3, n_max: int = 4, depth: int = 2) -> CheckReport:
    """Test the uniqueness statement for B against Y(b) on a window.

    Hypotheses: B(z)|0> is regular with constant term b, and B is local
    with every X(a), a a test state, on every grid vector.  ``inapplicable``
    means a hypothesis failed; ``fails`` would mean the conclusion B = Y(b)
    failed although the hypotheses held.
    """
    params = {"algebra": fa.name, "B": B.label, "b": fa.render(b), "D": degree_cap,
              "W": mode_window, "n_max": n_max, "depth": depth}
    window = grid_window(degree_cap, mode_window)
    vac = fa.vacuum
    created = B.mode(-1, vac)
    if created != b:
        return CheckReport("uniqueness", INAPPLICABLE, params, window,
                           witness_dict("uniqueness", B, None, None, -1, vac, created, b),
                           {"failed_hypothesis": "created-state",
                            "summary": "B(z)|0> at z=0 differs from b"})
    for n in range(0, mode_window + 1):
        out = B.mode(n, vac)
        if out:
            return CheckReport("uniqueness", INAPPLICABLE, params, window,
                               witness_dict("uniqueness", B, None, None, n, vac, out),
                               {"failed_hypothesis": "created-state",
                                "summary": "B(z)|0> is not regular at z=0"})
    cwin = ExponentWindow.of(z=(-mode_window - 1 - n_max, mode_window),
                             w=(-mode_window - 1 - n_max, mode_window))
    vectors = fa.grid(degree_cap)
    for a in fa.test_states(depth):
        xa = fa.X(a)
        for v in vectors:
            comm = commutator_coefficients(B, xa, v, cwin)
            N, _ = _local_bound(comm, n_max)
            if N is None:
                cell = min(comm.cells)
                return CheckReport(
                    "uniqueness", INAPPLICABLE, params, window,
                    {"check": "uniqueness", "field_a": B.label, "field_b": xa.label,
                     "vector": v.to_json(), "cell": list(cell),
                     "result": comm.cells[cell].to_json()},
                    {"failed_hypothesis": "locality",
                     "summary": f"B is not local with {xa.label} (N <= {n_max})"})
    target = fa.Y(b)
    hit = first_disagreement(B, target, vectors, mode_range(mode_window))
    if hit is not None:
        m, v, x, y = hit
        return CheckReport("uniqueness", FAILS, params, window,
                           witness_dict("uniqueness", B, target, None, m, v, x, y),
                           {"summary": "hypotheses hold but B differs from Y(b)"})
    return CheckReport("uniqueness", HOLDS, params, window, None,
                       {"summary": "hypotheses hold and B = Y(b)"})


# -- shipped mutations -----------------------------------------------------------------

def mutate_vacuum(fa: FieldAlgebra) -> FieldAlgebra:
    """Y(|0>) replaced by 2 Id."""
    vac_key, = fa.vacuum.terms if len(fa.vacuum.terms) == 1 else (None,)
    two_id = combination([(2, identity_field())], "2*Id")
    if vac_key is None:
        # vacuum is not a basis element: rescale every field instead
        return fa.with_override(f"{fa.name}/vacuum-broken",
                                {k: 2 * fa.basis_field(k) for k in fa.model.basis_up_to(0)})
    return fa.with_override(f"{fa.name}/vacuum-broken", {vac_key: two_id})


def mutate_translation(fa: FieldAlgebra, key=None, field: Field | None = None) -> FieldAlgebra:
    """Splice a field that is not translation covariant in for one basis state.

    Defaults: beta for the state alpha_{-1}|0> of the free boson; for other
    models the field gains a spurious z^1 term (mode -2 copies mode -1), which
    breaks Y(Ta) = dY(a) whatever T is.
    """
    if key is None:
        key = (1,) if fa.model.name == "free-boson" else fa.model.basis_up_to(0)[-1]
    if field is None:
        if fa.model.name == "free-boson":
            from .fields import beta_field
            field = beta_field()
        else:
            base = fa.basis_field(key)

            def action(n, b):
                out = base.mode(n, Vector.basis(b))
                return out + base.mode(-1, Vector.basis(b)) if n == -2 else out

            field = Field(f"shifted({base.label})", action, base.bound_on_key)
    return fa.with_override(f"{fa.name}/translation-broken", {key: field})


def mutate_associativity(fa: FieldAlgebra, key=None) -> FieldAlgebra:
    """Add Id to the field of one non-vacuum basis state."""
    if key is None:
        key = (1, 1) if fa.model.name == "free-boson" else fa.model.basis_up_to(0)[0]
    f = fa.basis_field(key) + identity_field()
    return fa.with_override(f"{fa.name}/associativity-broken", {key: f})
