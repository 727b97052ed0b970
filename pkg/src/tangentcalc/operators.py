"""Derivation calculus on the tangent chart.

Covers the circle-wedge composition of a form with endomorphism lists, the
algebraic insertion derivations i_K, the Lie derivations L_K with the
almost-tangent coboundary d_B = L_B, constant-coefficient combinations
D = c1*d + c2*d_B, the Froelicher-Nijenhuis self-bracket of a degree-1
vector-valued form, semi-basic grading, a constructive fiberwise homotopy
inverting d_B on semi-basic closed forms, and the fiber-affine function /
Theta constructions that mirror the first cohomology of the base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence, Tuple

from .errors import (
    ArityMismatch,
    NonPolynomialFiberDependence,
    NotAboveMu,
    NotBaseOnly,
    NotClosed,
    NotSemiBasic,
    UnsupportedDegree,
)
from .forms import (
    BaseForm,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    _insert_index,
    _replace_index,
    coframe_label,
    evaluate_form,
    exterior_derivative,
    interior_product,
    lie_bracket,
)
from .lifts import (
    complete_lift_form,
    mirror_map,
    pullback,
    tautological_field,
)
from .scalar import CoordinateId, ScalarExpr, const, vvar

__all__ = [
    "circ_wedge",
    "insertion_derivation",
    "d_B",
    "lie_derivation",
    "fn_self_bracket",
    "DOperator",
    "apply_D",
    "semi_basic_defect",
    "db_poincare",
    "make_f_mu",
    "is_fiber_affine",
    "extract_mu",
    "AlphaMuForm",
    "theta",
    "lifted_cohomology_witness",
]


def circ_wedge(eta: Form, endos: Sequence[VectorValuedForm]) -> Form:
    """Compose a p-form slotwise with p endomorphisms, summed over all
    assignments: sum_sigma (eta_1 o K_sigma(1)) ^ ... ^ (eta_p o K_sigma(p)),
    extended linearly from decomposable terms.  No normalizing factor."""
    p = eta.degree
    if len(endos) != p:
        raise ArityMismatch(f"degree {p} form needs {p} endomorphisms")
    for K in endos:
        if K.degree != 1:
            raise ArityMismatch("circ-wedge endomorphisms must be degree 1")
    if p == 0:
        return eta
    m = eta.m
    out = Form.zero(m, p)
    composed_cache = {}

    def composed(K_index: int, a: int) -> Form:
        key = (K_index, a)
        if key not in composed_cache:
            composed_cache[key] = endos[K_index].covector_composed(a)
        return composed_cache[key]

    for idx, coef in eta.terms.items():
        for sigma in permutations(range(p)):
            prod = None
            for slot in range(p):
                factor = composed(sigma[slot], idx[slot])
                if factor.is_zero:
                    prod = None
                    break
                prod = factor if prod is None else _wedge_fast(prod, factor)
                if prod.is_zero:
                    prod = None
                    break
            if prod is not None:
                out = out + prod.scale(coef)
    return out


def _wedge_fast(a: Form, b: Form) -> Form:
    from .forms import wedge

    return wedge(a, b)


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def insertion_derivation(K: VectorValuedForm, w: Form) -> Form:
    """Algebraic derivation attached to a vector-valued form of degree 1
    or 2; vanishes on functions, raises the form degree by K.degree - 1."""
    m = w.m
    p = w.degree
    if K.degree == 1:
        if p == 0:
            return Form.zero(m, 0)
        out = {}
        comp_cache = {}

        def composed(a: int) -> Form:
            if a not in comp_cache:
                comp_cache[a] = K.covector_composed(a)
            return comp_cache[a]

        for idx, coef in w.terms.items():
            for slot, a in enumerate(idx):
                for (b,), kc in composed(a).terms.items():
                    rep = _replace_index(idx, slot, b)
                    if rep is None:
                        continue
                    sign, nidx = rep
                    term = coef * kc
                    if sign < 0:
                        term = -term
                    cur = out.get(nidx)
                    out[nidx] = term if cur is None else cur + term
        return Form(m, p, out)
    if K.degree == 2:
        if p == 0:
            return Form.zero(m, min(1, 2 * m))
        target = p + 1
        if target > 2 * m:
            return Form.zero(m, 2 * m)
        out = {}
        frames = [VectorFieldTM.frame(m, a) for a in range(2 * m)]
        denom = Fraction(1, 2 * math.factorial(p - 1))
        from itertools import combinations

        for J in combinations(range(2 * m), target):
            total = const(0)
            for sigma in permutations(range(target)):
                args = [J[s] for s in sigma]
                kv = K.apply([frames[args[0]], frames[args[1]]])
                if kv.is_zero:
                    continue
                val = evaluate_form(w, [kv] + [frames[c] for c in args[2:]])
                if val.is_zero:
                    continue
                total = total + val if _perm_sign(sigma) > 0 else total - val
            total = total * denom
            if not total.is_zero:
                out[J] = total
        return Form(m, target, out)
    raise UnsupportedDegree(
        f"insertion derivation implemented for degree 1 and 2, got {K.degree}"
    )


def d_B(w: Form) -> Form:
    """The almost-tangent coboundary: a derivation killing the whole
    coframe, with d_B f = sum_i (df/dv^i) dx^i on functions."""
    m = w.m
    if w.degree == 2 * m:
        return Form.zero(m, 2 * m)
    out = {}
    for idx, coef in w.terms.items():
        for i in range(m):
            dc = coef.partial(CoordinateId("v", i + 1))
            if dc.is_zero:
                continue
            ins = _insert_index(idx, i)
            if ins is None:
                continue
            sign, nidx = ins
            if sign < 0:
                dc = -dc
            cur = out.get(nidx)
            out[nidx] = dc if cur is None else cur + dc
    return Form(m, w.degree + 1, out)


def lie_derivation(K: VectorValuedForm, w: Form) -> Form:
    """Graded commutator [i_K, d] for vector-valued forms of degree 0 or 1.

    Degree 0 recovers the Cartan formula for the wrapped vector field;
    degree 1 with the mirror map recovers d_B and with the identity
    endomorphism recovers d.
    """
    if K.degree == 0:
        X = K.entry(())
        dw = exterior_derivative(w)
        return interior_product(X, dw) + exterior_derivative(interior_product(X, w))
    if K.degree == 1:
        dw = exterior_derivative(w)
        return insertion_derivation(K, dw) - exterior_derivative(
            insertion_derivation(K, w)
        )
    raise UnsupportedDegree(
        f"Lie derivation implemented for degree <= 1, got {K.degree}"
    )


def fn_self_bracket(K: VectorValuedForm) -> VectorValuedForm:
    """Froelicher-Nijenhuis self-bracket of a degree-1 vector-valued form,
    evaluated on frame pairs through

        (1/2)[K,K](X,Y) = [KX,KY] - K[KX,Y] - K[X,KY] + K(K[X,Y])

    (the symmetric four-term expression; the result is twice the Nijenhuis
    tensor of K and vanishes exactly when L_K squares to zero)."""
    if K.degree != 1:
        raise UnsupportedDegree("self-bracket expects a degree-1 argument")
    m = K.m
    values = {}
    for a in range(2 * m):
        for b in range(a + 1, 2 * m):
            X = VectorFieldTM.frame(m, a)
            Y = VectorFieldTM.frame(m, b)
            KX = K.apply([X])
            KY = K.apply([Y])
            half = lie_bracket(KX, KY)
            half = half - K.apply([lie_bracket(KX, Y)])
            half = half - K.apply([lie_bracket(X, KY)])
            # [X, Y] = 0 on coordinate frames, so the K^2 term drops here
            full = half + half
            if not full.is_zero:
                values[(a, b)] = full
    return VectorValuedForm(m, 2, values)


@dataclass(frozen=True)
class DOperator:
    """The combination c1*d + c2*d_B with rational constants; constancy of
    the coefficients is exactly what makes it square to zero."""

    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c1", Fraction(self.c1))
        object.__setattr__(self, "c2", Fraction(self.c2))


def apply_D(D: DOperator, w: Form) -> Form:
    out = Form.zero(w.m, min(w.degree + 1, 2 * w.m))
    if D.c1:
        out = out + exterior_derivative(w).scale(D.c1)
    if D.c2:
        out = out + d_B(w).scale(D.c2)
    return out


def semi_basic_defect(w: Form, k: int = 0) -> Optional[Tuple[str, ...]]:
    """None when every term carries at most k fiber coframe indices;
    otherwise a witness: the labels of the first offending multi-index."""
    m = w.m
    for idx in sorted(w.terms):
        fiber = sum(1 for a in idx if a >= m)
        if fiber > k:
            return tuple(coframe_label(m, a) for a in idx)
    return None


def db_poincare(w: Form) -> Form:
    """Construct a semi-basic primitive for a semi-basic d_B-closed form.

    Uses the fiberwise linear homotopy to the zero section on the fiber
    form associated to w (dx^I read as dv^I); a coefficient polynomial of
    fiber degree d on a p-form picks up the exact factor 1/(d+p).  Requires
    polynomial fiber dependence so the construction stays rational.
    """
    m = w.m
    p = w.degree
    if p < 1:
        raise ValueError("a d_B-primitive needs input degree >= 1")
    witness = semi_basic_defect(w, 0)
    if witness is not None:
        raise NotSemiBasic(f"offending index {'^'.join(witness)}")
    if not d_B(w).is_zero:
        raise NotClosed("input form is not d_B-closed")
    for coef in w.terms.values():
        if not coef.has_fiber_polynomial_coefficients():
            raise NonPolynomialFiberDependence(
                "coefficients must be polynomial in the fiber coordinates"
            )
    out = {}
    for idx, coef in w.terms.items():
        for d, bucket in coef.fiber_degree_split().items():
            scaled = ScalarExpr(bucket, dict(coef.den)) * Fraction(1, d + p)
            for slot, a in enumerate(idx):
                term = scaled * vvar(a + 1)
                if slot % 2:
                    term = -term
                nidx = idx[:slot] + idx[slot + 1 :]
                cur = out.get(nidx)
                out[nidx] = term if cur is None else cur + term
    return Form(m, p - 1, out)


def make_f_mu(mu: BaseForm, c: ScalarExpr) -> ScalarExpr:
    """The fiber-affine function sum_i mu_i(x) v^i + c(x); its differential
    composed with the mirror map recovers the pullback of mu."""
    if mu.degree != 1:
        raise ValueError("make_f_mu expects a base 1-form")
    if not c.is_base_only:
        raise NotBaseOnly("the constant part must live on the base")
    total = c
    for (i,), coef in mu.terms.items():
        total = total + coef * vvar(i + 1)
    return total


def is_fiber_affine(f: ScalarExpr, m: int):
    """Detect f = sum a_i(x) v^i + c(x); returns (mu, c) or None.

    Vanishing of every second fiber partial is the decision criterion;
    abstract full-dependence symbols keep their partials formal and so are
    never certified affine.
    """
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            second = f.partial(CoordinateId("v", i)).partial(CoordinateId("v", j))
            if not second.is_zero:
                return None
    coeffs = {}
    linear = const(0)
    for i in range(m):
        a_i = f.partial(CoordinateId("v", i + 1))
        if not a_i.is_base_only:
            return None
        if not a_i.is_zero:
            coeffs[(i,)] = a_i
            linear = linear + a_i * vvar(i + 1)
    c = f - linear
    if not c.is_base_only:
        return None
    return BaseForm(m, 1, coeffs), c


def extract_mu(w: Form) -> Optional[BaseForm]:
    """The base form whose pullback is w composed with the mirror map in
    every slot (divided by p!), when that composition is a pullback."""
    m = w.m
    p = w.degree
    if p == 0:
        e = w.as_scalar()
        return BaseForm.from_scalar(m, e) if e.is_base_only else None
    B = mirror_map(m)
    contracted = circ_wedge(w, [B] * p).scale(Fraction(1, math.factorial(p)))
    terms = {}
    for idx, coef in contracted.terms.items():
        if any(a >= m for a in idx):
            return None
        if not coef.is_base_only:
            return None
        terms[idx] = coef
    if p > m:
        return None
    return BaseForm(m, p, terms)


@dataclass
class AlphaMuForm:
    """A p-form on TM lying above a base p-form: its p-fold mirror
    contraction divided by p! equals the pullback of mu."""

    omega: Form
    mu: BaseForm

    def __post_init__(self):
        if self.omega.m != self.mu.m or self.omega.degree != self.mu.degree:
            raise NotAboveMu("shape mismatch between candidate and base form")
        p = self.omega.degree
        if p >= 1:
            B = mirror_map(self.omega.m)
            contracted = circ_wedge(self.omega, [B] * p).scale(
                Fraction(1, math.factorial(p))
            )
            if contracted != pullback(self.mu):
                raise NotAboveMu("mirror contraction does not reproduce mu")


def theta(a: AlphaMuForm) -> BaseForm:
    """Project a closed degree-1 above-form to a closed base 1-form:
    g_i = h_i - (d mu_k / dx^i) v^k, which is fiber-free by closedness."""
    if a.omega.degree != 1:
        raise ValueError("theta is defined on degree-1 forms")
    if not exterior_derivative(a.omega).is_zero:
        raise NotClosed("theta needs a closed input")
    m = a.omega.m
    terms = {}
    for i in range(m):
        g = a.omega.coefficient((i,))
        for k in range(m):
            mu_k = a.mu.coefficient((k,))
            der = mu_k.partial(CoordinateId("x", i + 1))
            if not der.is_zero:
                g = g - der * vvar(k + 1)
        if not g.is_base_only:
            raise NotClosed("closedness system failed to eliminate the fiber")
        if not g.is_zero:
            terms[(i,)] = g
    return BaseForm(m, 1, terms)


def lifted_cohomology_witness(w: BaseForm) -> Form:
    """For closed w, the contraction of the tautological field into the
    complete lift; its exterior derivative gives the lift back exactly."""
    if not w.d().is_zero:
        raise NotClosed("witness construction needs a closed base form")
    return interior_product(tautological_field(w.m), complete_lift_form(w))
