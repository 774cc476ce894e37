"""Independent reference computations on plain polynomials.

A Fock state is treated as a polynomial in x_1, x_2, ... stored as
{exponent tuple: coefficient}, with exponent tuple (e_1, e_2, ...).  None
of this goes through the package's partition encoding.
"""

from fractions import Fraction

from fieldalg.linear import Vector

NVARS = 12


def to_poly(v: Vector) -> dict:
    out = {}
    for key, c in v.items():
        e = [0] * NVARS
        for part in key:
            e[part - 1] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + c
    return {k: c for k, c in out.items() if c}


def from_poly(p: dict) -> Vector:
    terms = {}
    for e, c in p.items():
        key = tuple(sorted((i + 1 for i, k in enumerate(e) for _ in range(k)), reverse=True))
        terms[key] = terms.get(key, 0) + c
    return Vector(terms)


def _add(acc, e, c):
    acc[e] = acc.get(e, 0) + c
    if not acc[e]:
        del acc[e]


def mul_var(p: dict, n: int) -> dict:
    out = {}
    for e, c in p.items():
        e2 = list(e)
        e2[n - 1] += 1
        _add(out, tuple(e2), c)
    return out


def diff_var(p: dict, n: int) -> dict:
    out = {}
    for e, c in p.items():
        if e[n - 1]:
            e2 = list(e)
            e2[n - 1] -= 1
            _add(out, tuple(e2), c * e[n - 1])
    return out


def heisenberg(n: int, v: Vector) -> Vector:
    """alpha_n: x_{-n} times for n < 0, n d/dx_n for n > 0, zero for n = 0."""
    p = to_poly(v)
    if n > NVARS:
        return Vector()  # no state here involves x_n
    if n < 0:
        return from_poly(mul_var(p, -n))
    if n > 0:
        return from_poly({e: c * n for e, c in diff_var(p, n).items()})
    return Vector()


def translation(v: Vector) -> Vector:
    """T = sum_n n x_{n+1} d/dx_n, the derivation with [T, alpha_{-n}] = n alpha_{-n-1}."""
    p = to_poly(v)
    out = {}
    for n in range(1, NVARS - 1):
        for e, c in mul_var(diff_var(p, n), n + 1).items():
            _add(out, e, c * n)
    return from_poly(out)


def partition_numbers(k: int) -> list[int]:
    """p(0..k) from Euler's pentagonal recurrence."""
    p = [1] + [0] * k
    for n in range(1, k + 1):
        total, j = 0, 1
        while True:
            for g in (j * (3 * j - 1) // 2, j * (3 * j + 1) // 2):
                if g > n:
                    break
                total += (-1) ** (j + 1) * p[n - g]
            if j * (3 * j - 1) // 2 > n:
                break
            j += 1
        p[n] = total
    return p


def series_power(n: int, terms: int) -> list:
    """Coefficients c_q of w^q z^(n-q), q = 0..terms-1, of (z - w)^n for |z| > |w|,
    from the geometric series 1/(1 - t) = sum t^q raised to a power by convolution."""
    base = [Fraction(1)] * terms if n < 0 else [Fraction(1), Fraction(-1)] + [Fraction(0)] * terms
    if n < 0:
        # (z - w)^-1 = z^-1 sum (w/z)^q
        row = [Fraction(1)] + [Fraction(0)] * (terms - 1)
        for _ in range(-n):
            row = [sum(row[i] * base[q - i] for i in range(q + 1)) for q in range(terms)]
        return row
    row = [Fraction(1)] + [Fraction(0)] * (terms - 1)
    for _ in range(n):
        row = [row[q] - (row[q - 1] if q else 0) for q in range(terms)]
    return row
