"""Axiom and identity checkers for field algebras.

Every grid check is a list of *points*; a point evaluator returns the two
sides ``(lhs, rhs)`` of the identity at that point.  The first point where
they differ becomes the witness, serialized with enough data for
:func:`reevaluate` to recompute it from scratch.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable

from .distributions import (IN_W, IN_Z, Bivariate, ExponentWindow, delta_derivative,
                            delta_derivative_cell, expand_power, expansion_cell,
                            first_difference, multiply_scalar, taylor_delta_check)
from .field_algebra import FieldAlgebra, _local_bound, twist
from .fields import (Field, alpha_field, beta_field, commutator_coefficients, derivative,
                     first_disagreement, first_nonzero, fock_vectors, identity_field,
                     mode_range, nth_product, normal_ordered, parity_sign,
                     residue_product_modes, skewsymmetry_residual, weak_locality_bound)
from .linear import Vector
from .report import FAILS, HOLDS, INAPPLICABLE, CheckReport, grid_window

EVALUATORS: dict[str, Callable] = {}


def evaluator(name: str):
    def register(fn):
        EVALUATORS[name] = fn
        return fn
    return register


def _memo(fa: FieldAlgebra, key, factory):
    cache = fa.__dict__.setdefault("_check_cache", {})
    out = cache.get(key)
    if out is None:
        out = factory()
        cache[key] = out
    return out


def product_field(fa: FieldAlgebra, a: Vector, b: Vector, n: int) -> Field:
    return _memo(fa, ("prod", a, b, n), lambda: nth_product(fa.Y(a), fa.Y(b), n))


# -- point serialization ---------------------------------------------------------------

def serialize_point(point: dict) -> dict:
    return {k: (v.to_json() if isinstance(v, Vector) else v) for k, v in point.items()}


_VECTOR_SLOTS = {"a", "b", "c", "v"}


def deserialize_point(data: dict) -> dict:
    return {k: (Vector.from_json(v) if k in _VECTOR_SLOTS else v) for k, v in data.items()}


def reevaluate(fa: FieldAlgebra | None, witness: dict):
    """Recompute both sides at a serialized witness point."""
    if "point" not in witness:
        return reevaluate_field_witness(witness)
    point = deserialize_point(witness["point"])
    return EVALUATORS[witness["check"]](fa, point)


def run_points(name: str, fa: FieldAlgebra | None, points: Iterable[dict], params: dict,
               window: dict, summary: str = "") -> CheckReport:
    count = 0
    for pt in points:
        count += 1
        lhs, rhs = EVALUATORS[name](fa, pt)
        if lhs != rhs:
            witness = {"check": name, "algebra": fa.name if fa else None,
                       "point": serialize_point(pt), "lhs": _ser(lhs), "rhs": _ser(rhs)}
            return CheckReport(name, FAILS, params, window, witness,
                               {"points_checked": count})
    details = {"points_checked": count}
    if summary:
        details["summary"] = summary
    return CheckReport(name, HOLDS, params, window, None, details)


def _ser(x):
    return x.to_json() if isinstance(x, Vector) else str(Fraction(x))


def _params(fa, D, W, depth, **extra):
    p = {"algebra": fa.name, "D": D, "W": W, "depth": depth}
    p.update(extra)
    return p


# -- vacuum ---------------------------------------------------------------------------

@evaluator("vacuum")
def _vacuum_point(fa, pt):
    vac = fa.vacuum
    if pt["kind"] == "vacuum-field":
        m, v = pt["mode"], pt["v"]
        return fa.Y_mode(vac, m, v), (v if m == -1 else Vector())
    a, n = pt["a"], pt["mode"]
    return fa.Y_mode(a, n, vac), (a if n == -1 else Vector())


def _vacuum_points(fa, D, W, depth, regular: bool):
    for v in fa.grid(D):
        for m in mode_range(W):
            yield {"kind": "vacuum-field", "mode": m, "v": v}
    lo = -1
    hi = W if regular else -1
    for a in fa.test_states(depth):
        for n in range(lo, hi + 1):
            yield {"kind": "creation", "a": a, "mode": n}


def check_vacuum(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3) -> CheckReport:
    """Y(a, z)|0> is regular with value a at z = 0, and Y(|0>, z) = Id."""
    pts = _vacuum_points(fa, degree_cap, mode_window, depth, True)
    return run_points("vacuum", fa, pts, _params(fa, degree_cap, mode_window, depth),
                      grid_window(degree_cap, mode_window))


def check_partial_vacuum(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3) -> CheckReport:
    """Y(|0>, z) = Id and a_(-1)|0> = a."""
    pts = _vacuum_points(fa, degree_cap, mode_window, depth, False)
    r = run_points("vacuum", fa, pts, _params(fa, degree_cap, mode_window, depth),
                   grid_window(degree_cap, mode_window))
    r.name = "partial-vacuum"
    if r.witness:
        r.witness["check"] = "vacuum"
    return r


# -- translation ---------------------------------------------------------------------

@evaluator("translation")
def _translation_point(fa, pt):
    a, m, v = pt["a"], pt["mode"], pt["v"]
    lhs = fa.Y_mode(fa.T(a), m, v)
    if pt["kind"] == "derivative":
        return lhs, fa.Y_mode(a, m - 1, v) * (-m)
    return lhs, fa.T(fa.Y_mode(a, m, v)) - fa.Y_mode(a, m, fa.T(v))


def check_translation(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3) -> CheckReport:
    """Y(Ta, z) = dY(a, z) = [T, Y(a, z)], modewise."""
    def pts():
        for a in fa.test_states(depth):
            for v in fa.grid(degree_cap):
                for m in mode_range(mode_window):
                    yield {"kind": "derivative", "a": a, "mode": m, "v": v}
                    yield {"kind": "commutator", "a": a, "mode": m, "v": v}
    return run_points("translation", fa, pts(), _params(fa, degree_cap, mode_window, depth),
                      grid_window(degree_cap, mode_window))


# -- recursion consistency and opposite fields -------------------------------------------

def state_keys(n_generators: int, depth: int, modes=range(-3, 2)):
    """All generator-mode presentations of depth <= ``depth``."""
    from itertools import product as iproduct

    from .field_algebra import StateKey

    out = [StateKey(())]
    for d in range(1, depth + 1):
        ops = [(g, n) for g in range(n_generators) for n in modes]
        out += [StateKey(t) for t in iproduct(ops, repeat=d)]
    return out


@evaluator("recursion")
def _recursion_point(fa, pt):
    from .field_algebra import StateKey

    key = StateKey(tuple(tuple(op) for op in pt["ops"]))
    m, v = pt["mode"], pt["v"]
    return fa.Y_key(key).mode(m, v), fa.Y(fa.evaluate(key)).mode(m, v)


def check_recursion_consistency(fa: FieldAlgebra, degree_cap=4, mode_window=3, depth=3,
                                modes=range(-3, 2)) -> CheckReport:
    """Y by the n-th product recursion on any presentation equals Y of the state."""
    if fa.generators is None:
        return CheckReport("recursion", INAPPLICABLE, {"algebra": fa.name}, None, None,
                           {"summary": "algebra has no generators"})

    def pts():
        for key in state_keys(len(fa.generators), depth, modes):
            state = fa.evaluate(key)
            if any(fa.model.degree_of(k) > degree_cap for k in state.terms):
                continue
            for v in fa.grid(degree_cap):
                for m in mode_range(mode_window):
                    yield {"ops": [list(op) for op in key.ops], "mode": m, "v": v}
    return run_points("recursion", fa, pts(),
                      _params(fa, degree_cap, mode_window, depth,
                              modes=[min(modes), max(modes)]),
                      grid_window(degree_cap, mode_window))


def check_opposite_field_algebra(fa: FieldAlgebra, degree_cap=4, mode_window=3, depth=2,
                                 n_range=range(-2, 3)) -> list[CheckReport]:
    """The X-fields satisfy partial vacuum and the n-th product axiom."""
    op = fa.opposite_algebra()
    out = axiom_set_product(op, degree_cap, mode_window, depth, n_range)
    for r in out:
        r.name = "opposite/" + r.name
    return out


# -- n-th product axiom ----------------------------------------------------------------

@evaluator("nth-product")
def _nth_product_point(fa, pt):
    a, b, n, m, v = pt["a"], pt["b"], pt["n"], pt["mode"], pt["v"]
    state = fa.Y_mode(a, n, b)
    return fa.Y_mode(state, m, v), product_field(fa, a, b, n).mode(m, v)


def check_nth_product_axiom(fa: FieldAlgebra, n_range=range(-3, 5), degree_cap=6,
                            mode_window=4, depth=3) -> CheckReport:
    """Y(a_(n) b, z) = Y(a, z)_(n) Y(b, z) for every n in ``n_range``."""
    n_range = list(n_range)

    def pts():
        states = fa.test_states(depth)
        for a in states:
            for b in states:
                for n in n_range:
                    for v in fa.grid(degree_cap):
                        for m in mode_range(mode_window):
                            yield {"a": a, "b": b, "n": n, "mode": m, "v": v}
    return run_points("nth-product", fa, pts(),
                      _params(fa, degree_cap, mode_window, depth,
                              n_range=[n_range[0], n_range[-1]]),
                      grid_window(degree_cap, mode_window))


# -- weak locality -------------------------------------------------------------------------

@evaluator("weak-locality")
def _weak_locality_point(fa, pt):
    a, b, n, m, v = pt["a"], pt["b"], pt["n"], pt["mode"], pt["v"]
    return product_field(fa, a, b, n).mode(m, v), Vector()


def check_weak_locality(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3,
                        n_max=8) -> CheckReport:
    """Every ordered pair of test states has a weak-locality bound <= n_max."""
    params = _params(fa, degree_cap, mode_window, depth, n_max=n_max)
    window = grid_window(degree_cap, mode_window)
    bounds = {}
    vectors = fa.grid(degree_cap)
    states = fa.test_states(depth)
    for a in states:
        for b in states:
            found = None
            for n in range(n_max, -1, -1):
                hit = first_nonzero(product_field(fa, a, b, n), vectors, mode_range(mode_window))
                if hit is not None:
                    if n == n_max:
                        m, v, out = hit
                        pt = {"a": a, "b": b, "n": n, "mode": m, "v": v}
                        return CheckReport(
                            "weak-locality", FAILS, params, window,
                            {"check": "weak-locality", "algebra": fa.name,
                             "point": serialize_point(pt), "lhs": out.to_json(), "rhs": []},
                            {"summary": f"({fa.render(a)}, {fa.render(b)}) has no bound"})
                    found = n + 1
                    break
            bounds[f"({fa.render(a)}, {fa.render(b)})"] = found or 0
    return CheckReport("weak-locality", HOLDS, params, window, None,
                       {"bounds": bounds, "max_bound": max(bounds.values(), default=0)})


# -- full locality ----------------------------------------------------------------------

def _poly_cell(cell_fn, N, p, q):
    """Cell (p, q) of (z - w)^N times the array given by ``cell_fn``."""
    acc = None
    for i in range(N + 1):
        c = expansion_cell(N, IN_Z, N - i, i)
        x = cell_fn(p - N + i, q - i)
        if x:
            t = x * c
            acc = t if acc is None else acc + t
    return acc if acc is not None else Vector()


def _comm_cell(fa, a, b, v):
    ya, yb = fa.Y(a), fa.Y(b)
    sign = parity_sign(fa.parity(a), fa.parity(b))

    def cell(p, q):
        return ya.mode(-p - 1, yb.mode(-q - 1, v)) - yb.mode(-q - 1, ya.mode(-p - 1, v)) * sign
    return cell


@evaluator("locality")
def _locality_point(fa, pt):
    cell = _comm_cell(fa, pt["a"], pt["b"], pt["v"])
    return _poly_cell(cell, pt["N"], pt["p"], pt["q"]), Vector()


def check_locality(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3,
                   n_max=6, pairs=None) -> CheckReport:
    """(z - w)^N [Y(a, z), Y(b, w)] v = 0 for some N <= n_max, every pair and v.

    ``pairs`` restricts the check to the given (a, b) states.
    """
    lo, hi = -mode_window - 1 - n_max, mode_window + n_max
    window = ExponentWindow.of(z=(lo, hi), w=(lo, hi))
    params = _params(fa, degree_cap, mode_window, depth, n_max=n_max)
    found = {}
    if pairs is None:
        pairs = [(a, b) for a in fa.test_states(depth) for b in fa.test_states(depth)]
    for a, b in pairs:
        worst = 0
        for v in fa.grid(degree_cap):
            comm = commutator_coefficients(fa.Y(a), fa.Y(b), v, window)
            N, _ = _local_bound(comm, n_max)
            if N is None:
                poly = expand_power(n_max, IN_Z, ExponentWindow.of(z=(0, n_max), w=(0, n_max)))
                p, q = min(multiply_scalar(poly, comm).cells)
                pt = {"a": a, "b": b, "v": v, "N": n_max, "p": p, "q": q}
                lhs, _ = _locality_point(fa, pt)
                return CheckReport(
                    "locality", FAILS, params, window.to_json(),
                    {"check": "locality", "algebra": fa.name, "point": serialize_point(pt),
                     "lhs": lhs.to_json(), "rhs": []},
                    {"summary": f"no N <= {n_max} kills [Y({fa.render(a)}), Y({fa.render(b)})]"})
            worst = max(worst, N)
        found[f"({fa.render(a)}, {fa.render(b)})"] = worst
    return CheckReport("locality", HOLDS, params, window.to_json(), None, {"bounds": found})


# -- associativity with correction term --------------------------------------------------

def _lhs_cell(fa, a, b, c):
    """Cell of Y(Y(a, z) b, -w) c."""
    def cell(p, q):
        k, m = -p - 1, -q - 1
        state = fa.Y_mode(a, k, b)
        if not state:
            return Vector()
        return fa.Y_mode(state, m, c) * twist(m)
    return cell


def _rhs_cell(fa, a, b, c):
    """Cell of Y(a, z - w) Y(b, -w) c, expanded in |z| > |w|."""
    yb = fa.Y(b)
    nb = yb.ann_bound(c)

    def cell(p, q):
        acc = Vector()
        qq = 0  # w-power taken from the expansion of (z - w)^(-k-1)
        while True:
            m = qq - q - 1
            if m >= nb:
                break
            k = -1 - p - qq
            coeff = expansion_cell(-k - 1, IN_Z, p, qq)
            if coeff:
                bc = yb.mode(m, c)
                if bc:
                    acc = acc + fa.Y_mode(a, k, bc) * (coeff * twist(m))
            qq += 1
        return acc
    return cell


def _correction_cell(fa, a, b, c):
    """Cell of p(a,b) Y(b, -w) sum_j d_w^j delta(z - w) Res_x x^(j) Y(a, x) c."""
    ya, yb = fa.Y(a), fa.Y(b)
    sign = parity_sign(fa.parity(a), fa.parity(b))
    residues = []
    for j in range(max(ya.ann_bound(c), 0)):
        u = ya.mode(j, c) * Fraction(1, factorial(j))
        residues.append((j, u))

    def cell(p, q):
        acc = Vector()
        for j, u in residues:
            if not u:
                continue
            qd = -p - 1 - j
            d = delta_derivative_cell(j, p, qd)
            if not d:
                continue
            r = q - qd
            m = -r - 1
            acc = acc + yb.mode(m, u) * (d * twist(m) * sign)
        return acc
    return cell


@evaluator("associativity-correction")
def _assoc_correction_point(fa, pt):
    a, b, c, p, q = pt["a"], pt["b"], pt["c"], pt["p"], pt["q"]
    lhs = _lhs_cell(fa, a, b, c)(p, q)
    rhs = _rhs_cell(fa, a, b, c)(p, q)
    if not pt.get("drop_correction"):
        rhs = rhs - _correction_cell(fa, a, b, c)(p, q)
    return lhs, rhs


def check_associativity_correction(fa: FieldAlgebra, a: Vector, b: Vector, c: Vector,
                                   bound: int = 5, drop_correction: bool = False) -> CheckReport:
    """Y(Y(a,z)b,-w)c = Y(a,z-w)Y(b,-w)c - p(a,b) Y(b,-w) sum_j d^j delta Res x^(j) Y(a,x)c.

    All three terms are evaluated cell by cell on |p|, |q| <= ``bound``; no
    window shrinkage is involved because every cell is a finite sum.
    """
    window = ExponentWindow.square(-bound, bound)
    lhs, rhs = _lhs_cell(fa, a, b, c), _rhs_cell(fa, a, b, c)
    corr = _correction_cell(fa, a, b, c)
    params = {"algebra": fa.name, "a": fa.render(a), "b": fa.render(b), "c": fa.render(c),
              "drop_correction": drop_correction}
    correction_nonzero = False
    for p, q in window.cells():
        x, y, k = lhs(p, q), rhs(p, q), corr(p, q)
        correction_nonzero = correction_nonzero or bool(k)
        if not drop_correction:
            y = y - k
        if x != y:
            pt = {"a": a, "b": b, "c": c, "p": p, "q": q, "drop_correction": drop_correction}
            return CheckReport("associativity-correction", FAILS, params, window.to_json(),
                               {"check": "associativity-correction", "algebra": fa.name,
                                "point": serialize_point(pt), "lhs": x.to_json(),
                                "rhs": y.to_json()})
    return CheckReport("associativity-correction", HOLDS, params, window.to_json(), None,
                       {"correction_nonzero": correction_nonzero})


@evaluator("associativity")
def _assoc_point(fa, pt):
    a, b, c, N, p, q = pt["a"], pt["b"], pt["c"], pt["N"], pt["p"], pt["q"]
    return (_poly_cell(_lhs_cell(fa, a, b, c), N, p, q),
            _poly_cell(_rhs_cell(fa, a, b, c), N, p, q))


def check_associativity(fa: FieldAlgebra, a: Vector, b: Vector, c: Vector, n_max: int = 8,
                        bound: int = 4) -> CheckReport:
    """Least N <= n_max with (z-w)^N Y(Y(a,z)b,-w)c = (z-w)^N Y(a,z-w)Y(b,-w)c.

    Both sides are tabulated once on a window padded by ``n_max`` below, so the
    interior window after multiplying by (z-w)^N always covers |p|, |q| <= bound.
    """
    big = ExponentWindow.of(z=(-bound - n_max, bound), w=(-bound - n_max, bound))
    lhs_c, rhs_c = _lhs_cell(fa, a, b, c), _rhs_cell(fa, a, b, c)
    L = Bivariate(big, {cell: lhs_c(*cell) for cell in big.cells()})
    R = Bivariate(big, {cell: rhs_c(*cell) for cell in big.cells()})
    params = {"algebra": fa.name, "a": fa.render(a), "b": fa.render(b), "c": fa.render(c),
              "n_max": n_max}
    target = ExponentWindow.square(-bound, bound)
    diff = None
    for N in range(n_max + 1):
        poly = expand_power(N, IN_Z, ExponentWindow.of(z=(0, N), w=(0, N)))
        PL, PR = multiply_scalar(poly, L), multiply_scalar(poly, R)
        diff = first_difference(PL, PR, target)
        if diff is None:
            return CheckReport("associativity", HOLDS, params, target.to_json(), None,
                               {"N": N, "summary": f"holds with N={N}"})
    p, q = diff
    pt = {"a": a, "b": b, "c": c, "N": n_max, "p": p, "q": q}
    return CheckReport("associativity", FAILS, params, target.to_json(),
                       {"check": "associativity", "algebra": fa.name,
                        "point": serialize_point(pt), "lhs": PL[diff].to_json() if PL[diff] else [],
                        "rhs": PR[diff].to_json() if PR[diff] else []},
                       {"summary": f"no N <= {n_max}"})


def triples(states: list[Vector]):
    return [(a, b, c) for a in states for b in states for c in states]


def check_associativity_battery(fa: FieldAlgebra, depth=2, n_max=8, bound=4,
                                with_correction=True) -> list[CheckReport]:
    """Associativity (and the corrected identity) over all triples of test states."""
    states = fa.test_states(depth)
    worst = 0
    params = {"algebra": fa.name, "depth": depth, "n_max": n_max, "bound": bound}
    reports = []
    for a, b, c in triples(states):
        r = check_associativity(fa, a, b, c, n_max, bound)
        if not r.holds:
            r.params.update(params)
            reports.append(r)
            break
        worst = max(worst, r.details["N"])
    else:
        reports.append(CheckReport("associativity", HOLDS, params,
                                   ExponentWindow.square(-bound, bound).to_json(), None,
                                   {"max_N": worst, "triples": len(states) ** 3,
                                    "summary": f"holds, largest N found = {worst}"}))
    if with_correction:
        nonzero = 0
        for a, b, c in triples(states):
            r = check_associativity_correction(fa, a, b, c, bound)
            if not r.holds:
                r.params.update(params)
                reports.append(r)
                break
            nonzero += r.details["correction_nonzero"]
        else:
            reports.append(CheckReport("associativity-correction", HOLDS, params,
                                       ExponentWindow.square(-bound, bound).to_json(), None,
                                       {"triples": len(states) ** 3,
                                        "nonzero_corrections": nonzero}))
    return reports


# -- skewsymmetry classification ----------------------------------------------------------

@evaluator("skewsymmetry-class")
def _skew_class_point(fa, pt):
    a, m, v = pt["a"], pt["mode"], pt["v"]
    return fa.X(a).mode(m, v), fa.Y(a).mode(m, v)


def classify_skewsymmetry(fa: FieldAlgebra, degree_cap=6, mode_window=4,
                          depth=3) -> CheckReport:
    """``holds`` (vertex algebra on the window) iff X(a) = Y(a) on the grid."""
    def pts():
        for a in fa.test_states(depth):
            for v in fa.grid(degree_cap):
                for m in mode_range(mode_window):
                    yield {"a": a, "mode": m, "v": v}
    r = run_points("skewsymmetry-class", fa, pts(),
                   _params(fa, degree_cap, mode_window, depth),
                   grid_window(degree_cap, mode_window))
    r.details["classification"] = "vertex algebra" if r.holds else "strict field algebra"
    r.details["summary"] = r.details["classification"]
    return r


# -- conformal algebra surrogates --------------------------------------------------------

@evaluator("conformal")
def _conformal_point(fa, pt):
    a, b, n = pt["a"], pt["b"], pt["n"]
    return fa.Y_mode(fa.T(a), n, b), fa.Y_mode(a, n - 1, b) * (-n)


def check_conformal_surrogates(fa: FieldAlgebra, degree_cap=6, mode_window=4,
                               depth=3) -> CheckReport:
    """(Ta)_(n) b = -n a_(n-1) b for 0 <= n <= W; records the skewsymmetry status."""
    def pts():
        for a in fa.test_states(depth):
            for b in fa.grid(degree_cap):
                for n in range(0, mode_window + 1):
                    yield {"a": a, "b": b, "n": n}
    r = run_points("conformal", fa, pts(), _params(fa, degree_cap, mode_window, depth),
                   grid_window(degree_cap, mode_window))
    skew = classify_skewsymmetry(fa, min(degree_cap, 4), min(mode_window, 3), min(depth, 2))
    r.details["surrogate"] = True
    r.details["C2"] = skew.verdict
    return r


@evaluator("conformal-fields")
def _conformal_fields_point(fa, pt):
    a, b = SHIPPED_FIELDS[pt["field_a"]](), SHIPPED_FIELDS[pt["field_b"]]()
    n, m, v = pt["n"], pt["mode"], pt["v"]
    return (nth_product(derivative(a), b, n).mode(m, v),
            nth_product(a, b, n - 1).mode(m, v) * (-n))


def conformal_surrogates_for_fields(names=("alpha", "beta"), degree_cap=6,
                                    mode_window=4) -> list[CheckReport]:
    """C3 surrogate and the C2 (skewsymmetry) status for raw shipped fields."""
    vectors = fock_vectors(degree_cap)

    def pts():
        for x in names:
            for y in names:
                for n in range(0, mode_window + 1):
                    for v in vectors:
                        for m in mode_range(mode_window):
                            yield {"field_a": x, "field_b": y, "n": n, "mode": m, "v": v}
    params = {"fields": list(names), "D": degree_cap, "W": mode_window}
    c3 = run_points("conformal-fields", None, pts(), params, grid_window(degree_cap, mode_window))
    c3.name = "conformal-C3"
    c2 = None
    for x in names:
        for y in names:
            r = skewsymmetry_residual(SHIPPED_FIELDS[x](), SHIPPED_FIELDS[y](), 0,
                                      degree_cap, mode_window=mode_window)
            if not r.holds:
                c2 = r
                break
        if c2:
            break
    if c2 is None:
        c2 = CheckReport("skewsymmetry", HOLDS, params, grid_window(degree_cap, mode_window))
    c2.name = "conformal-C2"
    return [c3, c2]


# -- field-level evaluators (shipped free-boson fields) -----------------------------

def _normal_square():
    a = alpha_field()
    f = normal_ordered(a, a)
    f.label = ":alpha alpha:"
    return f


SHIPPED_FIELDS: dict[str, Callable[[], Field]] = {
    "alpha": alpha_field,
    "beta": beta_field,
    ":alpha alpha:": _normal_square,
    "Id": identity_field,
}


def resolve_field(label: str) -> Field:
    """Rebuild a field from its label: shipped names and n-th products of them."""
    if label in SHIPPED_FIELDS:
        return SHIPPED_FIELDS[label]()
    start = 0
    while True:
        i = label.find("_(", start)
        if i < 0:
            raise KeyError(f"cannot resolve field {label!r}")
        j = label.index(")", i)
        try:
            a, b, n = resolve_field(label[:i]), resolve_field(label[j + 1:]), int(label[i + 2:j])
        except (KeyError, ValueError):
            start = i + 1
            continue
        return nth_product(a, b, n)


def reevaluate_field_witness(witness: dict):
    """Recompute a field-level witness; returns ``(result, expected)``."""
    from .fields import _skew_residual_field

    a = resolve_field(witness["field_a"])
    v = Vector.from_json(witness["vector"])
    m, n = witness["mode"], witness["n"]
    check = witness["check"]
    if check == "weak-locality":
        return nth_product(a, resolve_field(witness["field_b"]), n).mode(m, v), Vector()
    if check == "skewsymmetry":
        b = resolve_field(witness["field_b"])
        r = _skew_residual_field(a, b, n, witness["ba_bound"], witness["sign"])
        return r.mode(m, v), Vector()
    raise KeyError(f"no field-level evaluator for {check!r}")


# -- counterexample suite -------------------------------------------------------------

def counterexample_suite(degree_cap: int = 8, window: int = 10,
                         commutator_degree: int = 4) -> list[CheckReport]:
    """The weak-locality counterexample alpha, beta, in four checks.

    1. [alpha(z), beta(w)] equals the |w| > |z| expansion of (z-w)^-1 times Id;
    2. alpha_(j) beta = 0 and beta_(j) alpha = delta_{j0} Id for 0 <= j <= 4;
    3. both ordered pairs are weakly local;
    4. the skewsymmetry residual at n = 0 is nonzero.
    """
    a, b = alpha_field(), beta_field()
    vectors = fock_vectors(degree_cap)
    win = ExponentWindow.square(-window, window)
    params = {"D": degree_cap, "window": window}
    out = []

    kernel = expand_power(-1, "in_w", win)
    failed = None
    for v in fock_vectors(commutator_degree):
        comm = commutator_coefficients(a, b, v, win)
        for cell in win.cells():
            if comm[cell] != kernel[cell] * v if kernel[cell] else comm[cell]:
                failed = (v, cell, comm[cell])
                break
        if failed:
            break
    if failed:
        v, cell, val = failed
        out.append(CheckReport("counterexample/commutator", FAILS, params, win.to_json(),
                               {"check": "commutator", "vector": v.to_json(),
                                "cell": list(cell), "result": val.to_json() if val else []}))
    else:
        out.append(CheckReport("counterexample/commutator", HOLDS, params, win.to_json(), None,
                               {"summary": "[alpha(z), beta(w)] = i_{w,z}(z-w)^-1 Id",
                                "vectors_degree_cap": commutator_degree}))

    ident = identity_field()
    modes = mode_range(window)
    bad = None
    for j in range(0, 5):
        h = first_nonzero(nth_product(a, b, j), vectors, modes)
        if h:
            bad = ("alpha_(j)beta", j, h[0], h[1], h[2], Vector())
            break
        target = ident if j == 0 else None
        prod = nth_product(b, a, j)
        if target is None:
            h = first_nonzero(prod, vectors, modes)
            if h:
                bad = ("beta_(j)alpha", j, h[0], h[1], h[2], Vector())
                break
        else:
            h = first_disagreement(prod, target, vectors, modes)
            if h:
                bad = ("beta_(j)alpha", j, h[0], h[1], h[2], h[3])
                break
    if bad:
        label, j, m, v, x, y = bad
        out.append(CheckReport("counterexample/products", FAILS, params,
                               grid_window(degree_cap, window),
                               {"check": label, "n": j, "mode": m, "vector": v.to_json(),
                                "result": x.to_json(), "expected": y.to_json()}))
    else:
        out.append(CheckReport("counterexample/products", HOLDS, params,
                               grid_window(degree_cap, window), None,
                               {"summary": "alpha_(j)beta = 0, beta_(j)alpha = delta_j0 Id, 0<=j<=4"}))

    ab = weak_locality_bound(a, b, degree_cap, 8, window, vectors)
    ba = weak_locality_bound(b, a, degree_cap, 8, window, vectors)
    if ab.holds and ba.holds:
        out.append(CheckReport("counterexample/weak-locality", HOLDS, params,
                               grid_window(degree_cap, window), None,
                               {"bound_alpha_beta": ab.details["bound"],
                                "bound_beta_alpha": ba.details["bound"]}))
    else:
        w = ab.witness if not ab.holds else ba.witness
        out.append(CheckReport("counterexample/weak-locality", FAILS, params,
                               grid_window(degree_cap, window), w))

    skew = skewsymmetry_residual(a, b, 0, degree_cap, mode_window=window)
    skew.name = "counterexample/skewsymmetry"
    out.append(skew)
    return out


# -- cross-path oracle ----------------------------------------------------------------

def cross_path_agreement(names=("alpha", "beta", ":alpha alpha:", "Id"), ns=range(0, 5),
                         degree_cap=6, mode_window=4) -> CheckReport:
    """Mode-formula n-th products agree with residues of (z-w)^n [a(z), b(w)]."""
    fields = {n: SHIPPED_FIELDS[n]() for n in names}
    vectors = fock_vectors(degree_cap)
    params = {"fields": list(names), "n": [min(ns), max(ns)], "D": degree_cap, "W": mode_window}
    cells = 0
    for x in names:
        for y in names:
            for n in ns:
                prod = nth_product(fields[x], fields[y], n)
                for v in vectors:
                    res = residue_product_modes(fields[x], fields[y], n, v, mode_window)
                    for m, val in res.items():
                        cells += 1
                        direct = prod.mode(m, v)
                        if direct != val:
                            return CheckReport(
                                "cross-path", FAILS, params, grid_window(degree_cap, mode_window),
                                {"check": "cross-path", "field_a": x, "field_b": y, "n": n,
                                 "mode": m, "vector": v.to_json(), "result": direct.to_json(),
                                 "expected": val.to_json()})
    return CheckReport("cross-path", HOLDS, params, grid_window(degree_cap, mode_window), None,
                       {"cells": cells})


# -- distribution kernel self-tests -----------------------------------------------------

def kernel_self_tests(j_max: int = 6, bound: int = 6) -> list[CheckReport]:
    out = []
    win = ExponentWindow.square(-bound - j_max - 2, bound + j_max + 2)
    bad = None
    for j in range(j_max + 1):
        poly = expand_power(j + 1, IN_Z, ExponentWindow.of(z=(0, j + 1), w=(0, j + 1)))
        prod = multiply_scalar(poly, delta_derivative(j, win))
        if prod.cells:
            cell = min(prod.cells)
            bad = {"check": "delta-annihilation", "j": j, "cell": list(cell),
                   "value": str(prod.cells[cell])}
            break
    out.append(CheckReport("kernel/delta-annihilation", FAILS if bad else HOLDS,
                           {"j_max": j_max}, win.to_json(), bad))

    out.append(taylor_delta_check(ExponentWindow.square(-bound, bound, names=("z", "w", "x"))))
    out[-1].name = "kernel/taylor-delta"

    win = ExponentWindow.square(-bound, bound)
    diff = expand_power(-1, IN_Z, win) - expand_power(-1, IN_W, win)
    cell = first_difference(diff, delta_derivative(0, win))
    out.append(CheckReport(
        "kernel/expansion-difference", FAILS if cell else HOLDS, {"n": -1}, win.to_json(),
        {"check": "expansion-difference", "cell": list(cell)} if cell else None))
    return out


# -- axiom systems ---------------------------------------------------------------------

def axiom_set_local(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3, n_max=8,
                    assoc_depth=2, assoc_bound=4) -> list[CheckReport]:
    """Vacuum, translation covariance, weak locality and associativity."""
    out = [check_vacuum(fa, degree_cap, mode_window, depth),
           check_translation(fa, degree_cap, mode_window, depth),
           check_weak_locality(fa, degree_cap, mode_window, depth, n_max)]
    out += check_associativity_battery(fa, assoc_depth, n_max, assoc_bound, with_correction=False)
    return out


def axiom_set_product(fa: FieldAlgebra, degree_cap=6, mode_window=4, depth=3,
                      n_range=range(-3, 5)) -> list[CheckReport]:
    """Partial vacuum and the n-th product axiom."""
    return [check_partial_vacuum(fa, degree_cap, mode_window, depth),
            check_nth_product_axiom(fa, n_range, degree_cap, mode_window, depth)]


# -- uniqueness property test ------------------------------------------------------------

def perturbation(seed: int) -> Field:
    """A seeded zero-mode perturbation c * alpha_{-i} alpha_j on Fock space.

    It kills the vacuum, so the created-state hypothesis survives and the
    perturbation has to be caught by the locality hypothesis.
    """
    import random

    from .fock import alpha_mode

    rng = random.Random(seed)
    i, j = rng.randint(1, 3), rng.randint(1, 3)
    c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))

    def action(n, key):
        if n != 0:
            return Vector()
        return alpha_mode(-i, alpha_mode(j, Vector.basis(key))) * c

    return Field(f"{c}*alpha[-{i}]alpha[{j}] z^-1", action, lambda key: 1)


def uniqueness_suite(fa: FieldAlgebra, b: Vector, seeds=range(20), degree_cap=4,
                     mode_window=3, n_max=4, depth=2) -> list[CheckReport]:
    """Tautological instance B = Y(b) plus one perturbed B per seed."""
    from .field_algebra import uniqueness_check

    out = [uniqueness_check(fa, fa.Y(b), b, degree_cap, mode_window, n_max, depth)]
    out[0].name = "uniqueness/tautological"
    for seed in seeds:
        B = fa.Y(b) + perturbation(seed)
        B.label = f"Y({fa.render(b)}) + {perturbation(seed).label}"
        r = uniqueness_check(fa, B, b, degree_cap, mode_window, n_max, depth)
        r.name = f"uniqueness/perturbed-{seed:02d}"
        r.params["seed"] = seed
        out.append(r)
    return out


# -- weak Dong property ------------------------------------------------------------------

def dong_battery(names=("alpha", "beta", ":alpha alpha:"), ks=(-1, 0, 1), degree_cap=6,
                 n_max=8, mode_window=4) -> list[CheckReport]:
    """Weak locality of every pair involving a_(k)b, over all triples of ``names``."""
    from .fields import dong_weak_check

    fields = {n: SHIPPED_FIELDS[n]() for n in names}
    vectors = fock_vectors(degree_cap)
    cache: dict = {}
    out = []
    for x in names:
        for y in names:
            for z in names:
                r = dong_weak_check(fields[x], fields[y], fields[z], ks, degree_cap, n_max,
                                    mode_window, vectors, cache)
                r.name = f"dong/({x}, {y}, {z})"
                out.append(r)
    return out


# -- suites ---------------------------------------------------------------------------------

def _summarize_set(name: str, reports: list[CheckReport], params: dict) -> CheckReport:
    """One verdict for a set of checks: holds iff every member holds."""
    members = {r.name: r.verdict for r in reports}
    bad = next((r for r in reports if not r.holds), None)
    if bad is None:
        return CheckReport(name, HOLDS, params, reports[0].window, None, {"members": members})
    witness = bad.witness or {"check": bad.name, "verdict": bad.verdict}
    return CheckReport(name, FAILS, params, bad.window, witness,
                       {"members": members, "summary": f"{bad.name} {bad.verdict}"})


def mutations(fa: FieldAlgebra) -> list[FieldAlgebra]:
    from .field_algebra import mutate_associativity, mutate_translation, mutate_vacuum

    return [mutate_vacuum(fa), mutate_translation(fa), mutate_associativity(fa)]


def equivalence_suite(fa: FieldAlgebra, degree_cap=4, mode_window=3, depth=2, n_max=8,
                      assoc_bound=3) -> list[CheckReport]:
    """Both axiom sets on ``fa`` and on each shipped mutation, on one grid."""
    params = _params(fa, degree_cap, mode_window, depth, n_max=n_max)
    out = []
    for alg in [fa] + mutations(fa):
        tag = "base" if alg is fa else alg.name.rsplit("/", 1)[-1]
        a = axiom_set_local(alg, degree_cap, mode_window, depth, n_max, depth, assoc_bound)
        b = axiom_set_product(alg, degree_cap, mode_window, depth)
        out.append(_summarize_set(f"equivalence/{tag}/local-axioms", a, dict(params, algebra=alg.name)))
        out.append(_summarize_set(f"equivalence/{tag}/product-axioms", b, dict(params, algebra=alg.name)))
    return out


def free_boson_suite(degree_cap=6, mode_window=4, n_max=8, depth=3) -> list[CheckReport]:
    from .field_algebra import free_boson_algebra
    from .fock import monomial

    fa = free_boson_algebra(degree_cap)
    x1 = Vector.basis(monomial(1))
    small = min(degree_cap, 4), min(mode_window, 3), min(depth, 2)
    out = [check_vacuum(fa, degree_cap, mode_window, depth),
           check_translation(fa, degree_cap, mode_window, depth),
           check_nth_product_axiom(fa, range(-3, 5), degree_cap, mode_window, depth),
           check_weak_locality(fa, degree_cap, mode_window, depth, n_max),
           check_locality(fa, *small, n_max=6),
           check_recursion_consistency(fa, *small[:2], depth=depth),
           classify_skewsymmetry(fa, degree_cap, mode_window, depth),
           check_conformal_surrogates(fa, degree_cap, mode_window, depth)]
    out += check_associativity_battery(fa, depth, n_max, mode_window)
    drop = check_associativity_correction(fa, x1, x1, x1, 5, drop_correction=True)
    drop.name = "associativity-correction/dropped"
    out.append(drop)
    out += check_opposite_field_algebra(fa, *small)
    out += equivalence_suite(fa, *small, n_max=n_max)
    out.append(cross_path_agreement(degree_cap=degree_cap, mode_window=mode_window))
    out += kernel_self_tests()
    return out


def holomorphic_suite(degree_cap=6, mode_window=4, n_max=8, depth=3) -> list[CheckReport]:
    from .field_algebra import diagonal_algebra, holomorphic, matrix_algebra

    out = []
    for alg, tag in ((matrix_algebra(), "matrices"), (diagonal_algebra(), "diagonal")):
        fa = holomorphic(alg)
        part = [check_vacuum(fa, degree_cap, mode_window, depth),
                check_translation(fa, degree_cap, mode_window, depth),
                check_nth_product_axiom(fa, range(-3, 5), degree_cap, mode_window, depth),
                check_weak_locality(fa, degree_cap, mode_window, depth, n_max),
                check_locality(fa, degree_cap, mode_window, depth, n_max=6),
                classify_skewsymmetry(fa, degree_cap, mode_window, depth),
                check_conformal_surrogates(fa, degree_cap, mode_window, depth)]
        part += check_associativity_battery(fa, depth, n_max, mode_window)
        part += check_opposite_field_algebra(fa, degree_cap, mode_window, depth)
        part.append(check_opposite_at_zero(fa, alg))
        part += equivalence_suite(fa, degree_cap, mode_window, depth, n_max)
        for r in part:
            r.name = f"{tag}/{r.name}"
        out += part
    return out


@evaluator("opposite-at-zero")
def _opposite_zero_point(fa, pt):
    a, b = pt["a"], pt["b"]
    return fa.X(a).mode(-1, b), fa.algebra.mul(b, a)


def check_opposite_at_zero(fa: FieldAlgebra, alg=None) -> CheckReport:
    """X(a, 0) b = b a on every pair of basis elements of a holomorphic algebra."""
    alg = alg or fa.algebra
    pts = ({"a": Vector.basis(x), "b": Vector.basis(y)} for x in alg.basis for y in alg.basis)
    return run_points("opposite-at-zero", fa, pts, {"algebra": fa.name},
                      {"basis_pairs": len(alg.basis) ** 2})


def counterexample_scenario(degree_cap=8, mode_window=10) -> list[CheckReport]:
    out = counterexample_suite(degree_cap, mode_window)
    out += conformal_surrogates_for_fields(("alpha", "beta"), min(degree_cap, 6),
                                           min(mode_window, 4))
    return out


def uniqueness_scenario(seed=0, degree_cap=4, mode_window=3) -> list[CheckReport]:
    from .field_algebra import free_boson_algebra, uniqueness_check
    from .fock import monomial

    fa = free_boson_algebra()
    x1 = Vector.basis(monomial(1))
    out = uniqueness_suite(fa, x1, range(seed, seed + 20), degree_cap, mode_window)
    r = uniqueness_check(fa, beta_field(), x1, degree_cap, mode_window)
    r.name = "uniqueness/beta"
    out.append(r)
    return out
