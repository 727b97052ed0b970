"""Deterministic random geometry objects for the identity suite and tests.

All generators draw from a caller-supplied ``random.Random`` so suite runs
are reproducible from a seed string.  Objects stay deliberately small
(few terms, small integer coefficients, degree <= 3) to keep the exact
arithmetic fast at chart dimensions up to 3.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .forms import BaseForm, BaseVectorField, Form, VectorFieldTM, VectorValuedForm
from .scalar import CoordinateId, FunctionSymbol, ScalarExpr, const
from .transitions import ChartTransition, compose_transitions, make_transition

__all__ = [
    "rand_base_scalar",
    "rand_tm_scalar",
    "rand_base_form",
    "rand_closed_base_form",
    "rand_base_field",
    "rand_tm_form",
    "rand_tm_field",
    "rand_endomorphism",
    "rand_semibasic_form",
    "rand_affine_transition",
    "rand_quadratic_transition",
]


def _coeff(rng: random.Random) -> Fraction:
    c = rng.choice([-3, -2, -1, 1, 2, 3])
    return Fraction(c)


def rand_base_scalar(m, rng, terms=2, deg=2, symbols=()):
    """Random polynomial in the base coordinates, optionally multiplied by
    abstract base-only function symbols."""
    e = const(0)
    for _ in range(rng.randint(1, terms)):
        t = const(_coeff(rng))
        for _ in range(rng.randint(0, deg)):
            i = rng.randint(1, m)
            t = t * ScalarExpr.from_coord(CoordinateId("x", i))
        if symbols and rng.random() < 0.4:
            t = t * ScalarExpr.from_symbol(rng.choice(symbols))
        e = e + t
    return e


def rand_tm_scalar(m, rng, terms=2, deg=2, symbols=()):
    """Random polynomial in base and fiber coordinates."""
    e = const(0)
    for _ in range(rng.randint(1, terms)):
        t = const(_coeff(rng))
        for _ in range(rng.randint(0, deg)):
            kind = rng.choice(["x", "v"])
            t = t * ScalarExpr.from_coord(CoordinateId(kind, rng.randint(1, m)))
        if symbols and rng.random() < 0.3:
            t = t * ScalarExpr.from_symbol(rng.choice(symbols))
        e = e + t
    return e


def _pick_indices(rng, pool, length, count):
    all_idx = list(combinations(pool, length))
    rng.shuffle(all_idx)
    return all_idx[: max(1, min(count, len(all_idx)))]


def rand_base_form(m, p, rng, terms=2, symbols=()):
    if p == 0:
        return BaseForm.from_scalar(m, rand_base_scalar(m, rng, symbols=symbols))
    idxs = _pick_indices(rng, range(m), p, terms)
    return BaseForm(
        m, p, {i: rand_base_scalar(m, rng, symbols=symbols) for i in idxs}
    )


def rand_closed_base_form(m, p, rng, symbols=()):
    """d of a random form plus a constant-coefficient form: always closed."""
    closed = BaseForm(
        m, p, {i: const(_coeff(rng)) for i in _pick_indices(rng, range(m), p, 1)}
    )
    if p >= 1:
        closed = closed + rand_base_form(m, p - 1, rng, symbols=symbols).d()
    return closed


def rand_base_field(m, rng, symbols=()):
    return BaseVectorField(
        m, [rand_base_scalar(m, rng, symbols=symbols) for _ in range(m)]
    )


def rand_tm_form(m, p, rng, terms=2, symbols=()):
    if p == 0:
        return Form.from_scalar(m, rand_tm_scalar(m, rng, symbols=symbols))
    idxs = _pick_indices(rng, range(2 * m), p, terms)
    return Form(m, p, {i: rand_tm_scalar(m, rng, symbols=symbols) for i in idxs})


def rand_tm_field(m, rng, symbols=()):
    return VectorFieldTM(
        m, [rand_tm_scalar(m, rng, symbols=symbols) for _ in range(2 * m)]
    )


def rand_endomorphism(m, rng, entries=2, symbols=()):
    """Random degree-1 vector-valued form with a few nonzero slots."""
    values = {}
    for _ in range(entries):
        a = rng.randrange(2 * m)
        values[(a,)] = rand_tm_field(m, rng, symbols=symbols)
    return VectorValuedForm(m, 1, values)


def rand_semibasic_form(m, p, rng, terms=2):
    """Semi-basic form with fiber-polynomial coefficients (no symbols, no
    denominators in v), suitable for the fiberwise homotopy."""
    if p == 0:
        return Form.from_scalar(m, rand_tm_scalar(m, rng))
    idxs = _pick_indices(rng, range(m), p, terms)
    return Form(m, p, {i: rand_tm_scalar(m, rng, deg=3) for i in idxs})


def _rand_unimodularish(m, rng):
    """Invertible integer matrix built from shears and swaps, with its exact
    inverse."""
    A = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    Ainv = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for _ in range(m + rng.randint(0, 2)):
        if m >= 2 and rng.random() < 0.7:
            i, j = rng.sample(range(m), 2)
            c = rng.choice([-2, -1, 1, 2])
            # row_i += c * row_j on A ; inverse gets the opposite shear
            for k in range(m):
                A[i][k] += c * A[j][k]
            for k in range(m):
                Ainv[k][j] -= c * Ainv[k][i]
        else:
            i = rng.randrange(m)
            c = rng.choice([-2, 2, 3])
            for k in range(m):
                A[i][k] *= c
            for k in range(m):
                Ainv[k][i] /= c
    return A, Ainv


def rand_affine_transition(m, rng) -> ChartTransition:
    A, Ainv = _rand_unimodularish(m, rng)
    b = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
    xs = [ScalarExpr.from_coord(CoordinateId("x", i + 1)) for i in range(m)]
    forward = []
    for a in range(m):
        e = const(b[a])
        for i in range(m):
            if A[a][i]:
                e = e + const(A[a][i]) * xs[i]
        forward.append(e)
    inverse = []
    for i in range(m):
        e = const(0)
        for a in range(m):
            if Ainv[i][a]:
                e = e + const(Ainv[i][a]) * (xs[a] - const(b[a]))
        inverse.append(e)
    return make_transition(forward, inverse)


def rand_quadratic_transition(m, rng) -> ChartTransition:
    """Triangular quadratic shear composed with a random affine map; the
    inverse stays polynomial and is supplied exactly."""
    if m < 2:
        raise ValueError("quadratic transitions need m >= 2")
    xs = [ScalarExpr.from_coord(CoordinateId("x", i + 1)) for i in range(m)]
    forward = list(xs)
    inverse = list(xs)
    # one quadratic shear: coordinate i gains a quadratic in later coordinates
    i = rng.randrange(m - 1)
    later = list(range(i + 1, m))
    j = rng.choice(later)
    k = rng.choice(later)
    c = _coeff(rng)
    forward[i] = xs[i] + const(c) * xs[j] * xs[k]
    # invert by back-substitution: later coordinates are untouched
    inverse[i] = xs[i] - const(c) * xs[j] * xs[k]
    shear = make_transition(forward, inverse)
    return compose_transitions(shear, rand_affine_transition(m, rng))
