"""Floating-point redundancy layer for the identity suite.

Each suite identity is re-checked numerically: input objects are evaluated
as black-box rational functions at random points and every derivative an
operator needs is re-derived by central differences instead of the exact
formal derivative.  Symbolic equality remains the ground truth; this layer
exists to catch normalization or sign bugs in the exact path.

Forms at a point are plain ``dict`` index-tuple -> float; form-valued
functions of the evaluation point are composed as closures, so nested
operators (d, d_B, Lie derivatives, lifts) stack finite differences.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import EngineError
from .forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    _insert_index,
    _merge_indices,
    _replace_index,
)
from .scalar import CoordinateId, FormalPartial, ScalarExpr

DEFAULT_STEP = 1e-4
DEFAULT_REL_TOL = 1e-6
POLE_EXCLUSION = 1e-2


class NumericPole(EngineError):
    """A denominator came too close to zero at a sampled point."""


# -- scalar evaluation ---------------------------------------------------


def _gen_value(g, point, m):
    if isinstance(g, CoordinateId):
        a = g.index - 1 if g.kind == "x" else m + g.index - 1
        return point[a]
    raise EngineError(
        f"abstract symbol {g} reached numeric evaluation; instantiate first"
    )


def _eval_poly(p, point, m):
    total = 0.0
    for mono, coef in p.items():
        term = float(coef)
        for g, e in mono:
            term *= _gen_value(g, point, m) ** e
        total += term
    return total


def eval_scalar(e: ScalarExpr, point, m) -> float:
    den = _eval_poly(e.den, point, m)
    if abs(den) < POLE_EXCLUSION:
        raise NumericPole("denominator within exclusion radius of zero")
    return _eval_poly(e.num, point, m) / den


def scalar_fn(e: ScalarExpr, m):
    return lambda P: eval_scalar(e, P, m)


# -- object evaluation ---------------------------------------------------


def form_fn(w: Form):
    m = w.m

    def ff(P):
        return {idx: eval_scalar(c, P, m) for idx, c in w.terms.items()}

    return ff


def base_form_fn(w: BaseForm):
    """Evaluated on base points (length-m tuples)."""
    m = w.m

    def ff(x):
        P = tuple(x) + (0.0,) * m
        return {idx: eval_scalar(c, P, m) for idx, c in w.terms.items()}

    return ff


def field_fn(X: VectorFieldTM):
    m = X.m

    def vf(P):
        return [eval_scalar(c, P, m) for c in X.components]

    return vf


def base_field_fn(X: BaseVectorField):
    m = X.m

    def vf(x):
        P = tuple(x) + (0.0,) * m
        return [eval_scalar(c, P, m) for c in X.components]

    return vf


def endo_fn(K: VectorValuedForm):
    if K.degree != 1:
        raise ValueError("numeric endomorphisms are degree 1")
    m = K.m
    entries = {a: field_fn(v) for (a,), v in K.values.items()}

    def kf(P):
        table = [[0.0] * (2 * m) for _ in range(2 * m)]
        for a, fn in entries.items():
            table[a] = fn(P)
        return table  # table[a][b]: K(d/dz^a) component b

    return kf


# -- combinators on form functions ----------------------------------------


def _shift(P, a, h):
    return P[:a] + (P[a] + h,) + P[a + 1 :]


def central_diff(fn, x, j, h=DEFAULT_STEP):
    """Fourth-order central difference; keeps truncation negligible for the
    polynomial degrees the suite generates."""
    return (
        -fn(_shift(x, j, 2 * h))
        + 8.0 * fn(_shift(x, j, h))
        - 8.0 * fn(_shift(x, j, -h))
        + fn(_shift(x, j, -2 * h))
    ) / (12.0 * h)


def nf_add(fa, fb):
    def out(P):
        res = dict(fa(P))
        for idx, v in fb(P).items():
            res[idx] = res.get(idx, 0.0) + v
        return res

    return out


def nf_scale(fa, c):
    return lambda P: {idx: c * v for idx, v in fa(P).items()}


def nf_sub(fa, fb):
    return nf_add(fa, nf_scale(fb, -1.0))


def nf_wedge(fa, fb):
    def out(P):
        res = {}
        for ia, va in fa(P).items():
            if va == 0.0:
                continue
            for ib, vb in fb(P).items():
                merged = _merge_indices(ia, ib)
                if merged is None:
                    continue
                sign, idx = merged
                res[idx] = res.get(idx, 0.0) + sign * va * vb
        return res

    return out


def nf_d(fa, m, h=DEFAULT_STEP):
    """Exterior derivative with coefficients differentiated by central
    differences in every chart direction."""

    def out(P):
        res = {}
        for a in range(2 * m):
            up = fa(_shift(P, a, h))
            dn = fa(_shift(P, a, -h))
            for idx in set(up) | set(dn):
                der = (up.get(idx, 0.0) - dn.get(idx, 0.0)) / (2 * h)
                if der == 0.0:
                    continue
                ins = _insert_index(idx, a)
                if ins is None:
                    continue
                sign, nidx = ins
                res[nidx] = res.get(nidx, 0.0) + sign * der
        return res

    return out


def nf_ib(fa, m):
    """Algebraic insertion of the mirror map: dv^i slots become dx^i."""

    def out(P):
        res = {}
        for idx, v in fa(P).items():
            for slot, a in enumerate(idx):
                if a < m:
                    continue
                rep = _replace_index(idx, slot, a - m)
                if rep is None:
                    continue
                sign, nidx = rep
                res[nidx] = res.get(nidx, 0.0) + sign * v
        return res

    return out


def nf_db(fa, m, h=DEFAULT_STEP):
    return nf_sub(nf_ib(nf_d(fa, m, h), m), nf_d(nf_ib(fa, m), m, h))


def nf_ik(kf, fa, m):
    """Insertion of a degree-1 endomorphism given by its frame table."""

    def out(P):
        table = kf(P)
        res = {}
        for idx, v in fa(P).items():
            for slot, a in enumerate(idx):
                for b in range(2 * m):
                    coef = table[b][a]
                    if coef == 0.0:
                        continue
                    rep = _replace_index(idx, slot, b)
                    if rep is None:
                        continue
                    sign, nidx = rep
                    res[nidx] = res.get(nidx, 0.0) + sign * coef * v
        return res

    return out


def nf_ix(vf, fa):
    def out(P):
        vec = vf(P)
        res = {}
        for idx, v in fa(P).items():
            for slot, a in enumerate(idx):
                comp = vec[a]
                if comp == 0.0:
                    continue
                sign = -1.0 if slot % 2 else 1.0
                nidx = idx[:slot] + idx[slot + 1 :]
                res[nidx] = res.get(nidx, 0.0) + sign * comp * v
        return res

    return out


def nf_lie(vf, fa, m, h=DEFAULT_STEP):
    """Cartan formula with numeric exterior derivatives."""
    return nf_add(nf_ix(vf, nf_d(fa, m, h)), nf_d(lambda P: nf_ix(vf, fa)(P), m, h))


def nv_bracket(xf, yf, m, h=DEFAULT_STEP):
    def out(P):
        X = xf(P)
        Y = yf(P)
        comps = [0.0] * (2 * m)
        for a in range(2 * m):
            if X[a] == 0.0 and Y[a] == 0.0:
                continue
            y_up, y_dn = yf(_shift(P, a, h)), yf(_shift(P, a, -h))
            x_up, x_dn = xf(_shift(P, a, h)), xf(_shift(P, a, -h))
            for b in range(2 * m):
                comps[b] += (
                    X[a] * (y_up[b] - y_dn[b]) - Y[a] * (x_up[b] - x_dn[b])
                ) / (2 * h)
        return comps

    return out


def nf_pullback(base_ff, m):
    return lambda P: dict(base_ff(P[:m]))


def nf_clift_fun(base_f, m, h=DEFAULT_STEP):
    """Complete lift of a base function: sum v^j df/dx^j by differences."""

    def out(P):
        x = P[:m]
        total = 0.0
        for j in range(m):
            total += P[m + j] * central_diff(base_f, x, j, h)
        return total

    return out


def nf_clift_form(base_ff, m, h=DEFAULT_STEP):
    def out(P):
        x = P[:m]
        res = {}
        vals = base_ff(x)
        for j in range(m):
            stencil = [
                base_ff(_shift(x, j, 2 * h)),
                base_ff(_shift(x, j, h)),
                base_ff(_shift(x, j, -h)),
                base_ff(_shift(x, j, -2 * h)),
            ]
            keys = set().union(*stencil)
            for idx in keys:
                der = (
                    -stencil[0].get(idx, 0.0)
                    + 8.0 * stencil[1].get(idx, 0.0)
                    - 8.0 * stencil[2].get(idx, 0.0)
                    + stencil[3].get(idx, 0.0)
                ) / (12.0 * h)
                res[idx] = res.get(idx, 0.0) + P[m + j] * der
        for idx, v in vals.items():
            for slot in range(len(idx)):
                rep = _replace_index(idx, slot, m + idx[slot])
                if rep is None:
                    continue
                sign, nidx = rep
                res[nidx] = res.get(nidx, 0.0) + sign * v
        return res

    return out


def nv_clift_vec(base_vf, m, h=DEFAULT_STEP):
    def out(P):
        x = P[:m]
        base = base_vf(x)
        comps = list(base) + [0.0] * m
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += P[m + j] * central_diff(lambda y: base_vf(y)[i], x, j, h)
            comps[m + i] = acc
        return comps

    return out


def nv_vlift_vec(base_vf, m):
    def out(P):
        return [0.0] * m + list(base_vf(P[:m]))

    return out


# -- comparison and sampling ----------------------------------------------


def close(a: float, b: float, tol: float = DEFAULT_REL_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def forms_close(da: dict, db: dict, tol: float = DEFAULT_REL_TOL) -> bool:
    """Sup-norm comparison relative to the magnitude of the larger form."""
    scale = 1.0
    for d in (da, db):
        for v in d.values():
            scale = max(scale, abs(v))
    for idx in set(da) | set(db):
        if abs(da.get(idx, 0.0) - db.get(idx, 0.0)) > tol * scale:
            return False
    return True


def vectors_close(va, vb, tol: float = DEFAULT_REL_TOL) -> bool:
    scale = max([1.0] + [abs(v) for v in va] + [abs(v) for v in vb])
    return all(abs(a - b) <= tol * scale for a, b in zip(va, vb))


def sample_points(m, rng: random.Random, count, denominators=(), base_only=False, box=2.0):
    """Random rational points (as floats) in [-box, box] with every supplied
    denominator bounded away from zero."""
    points = []
    attempts = 0
    dim = m if base_only else 2 * m
    span = max(1, int(16 * box))
    while len(points) < count:
        attempts += 1
        if attempts > 400:
            raise NumericPole("could not sample points away from poles")
        P = tuple(float(Fraction(rng.randint(-span, span), 16)) for _ in range(dim))
        full = P if not base_only else P + (0.0,) * m
        ok = True
        for den in denominators:
            try:
                val = _eval_poly(den, full, m)
            except EngineError:
                ok = False
                break
            if abs(val) < POLE_EXCLUSION:
                ok = False
                break
        if ok:
            points.append(P)
    return points


def collect_denominators(*objects):
    """Denominator polynomials of every coefficient in the given objects."""
    dens = []

    def visit_scalar(e: ScalarExpr):
        if len(e.den) != 1 or () not in e.den:
            dens.append(e.den)

    for obj in objects:
        if obj is None:
            continue
        if isinstance(obj, ScalarExpr):
            visit_scalar(obj)
        elif isinstance(obj, (Form, BaseForm)):
            for c in obj.terms.values():
                visit_scalar(c)
        elif isinstance(obj, (VectorFieldTM, BaseVectorField)):
            for c in obj.components:
                visit_scalar(c)
        elif isinstance(obj, VectorValuedForm):
            for v in obj.values.values():
                for c in v.components:
                    visit_scalar(c)
    return dens


# -- abstract-symbol instantiation ----------------------------------------


def _map_coefficients(obj, fn):
    if isinstance(obj, ScalarExpr):
        return fn(obj)
    if isinstance(obj, Form):
        return Form(obj.m, obj.degree, {i: fn(c) for i, c in obj.terms.items()})
    if isinstance(obj, BaseForm):
        return BaseForm(obj.m, obj.degree, {i: fn(c) for i, c in obj.terms.items()})
    if isinstance(obj, VectorFieldTM):
        return VectorFieldTM(obj.m, [fn(c) for c in obj.components])
    if isinstance(obj, BaseVectorField):
        return BaseVectorField(obj.m, [fn(c) for c in obj.components])
    if isinstance(obj, VectorValuedForm):
        return VectorValuedForm(
            obj.m,
            obj.degree,
            {i: _map_coefficients(v, fn) for i, v in obj.values.items()},
        )
    raise TypeError(f"cannot map coefficients of {obj!r}")


def instantiate_symbols(objects, m, rng: random.Random):
    """Replace every abstract function symbol in the given objects by a
    drawn polynomial (base polynomials for base-only symbols), using the
    exact chain-rule substitution of the scalar kernel."""
    from .rand import rand_base_scalar, rand_tm_scalar

    symbols = set()
    for obj in objects:
        if obj is None:
            continue

        def scan(e: ScalarExpr):
            for g in e.generators():
                if isinstance(g, FormalPartial):
                    symbols.add(g.symbol)
            return e

        _map_coefficients(obj, scan)
    if not symbols:
        return list(objects)
    # affine instantiations keep stacked central differences inside their
    # truncation budget; the symbolic layer already covers arbitrary f
    bindings = {}
    for f in sorted(symbols, key=lambda s: s.name):
        if f.base_only:
            bindings[f] = rand_base_scalar(m, rng, terms=2, deg=1)
        else:
            bindings[f] = rand_tm_scalar(m, rng, terms=2, deg=1)
    out = []
    for obj in objects:
        if obj is None:
            out.append(None)
        else:
            out.append(_map_coefficients(obj, lambda e: e.substitute(bindings)))
    return out
