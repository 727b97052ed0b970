"""Geometry core: forms, fields, the Cartan calculus."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentcalc.errors import ArityMismatch, NotBaseOnly
from tangentcalc.forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    evaluate_form,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    lie_derivative_vvform,
    wedge,
)
from tangentcalc.lifts import (
    complete_lift_form,
    mirror_map,
    pullback,
    tautological_field,
)
from tangentcalc.rand import (
    rand_base_form,
    rand_tm_field,
    rand_tm_form,
)
from tangentcalc.scalar import FunctionSymbol, const, vvar, xvar

SYM = (FunctionSymbol("f", "base"),)


def _form(seed, m=2, p=None):
    rng = random.Random(seed)
    degree = rng.randint(0, 2 * m) if p is None else p
    return rand_tm_form(m, degree, rng, symbols=SYM)


def _field(seed, m=2):
    return rand_tm_field(m, random.Random(seed), symbols=SYM)


class TestWedge:
    def test_coframe_product(self):
        m = 2
        w = wedge(Form.coframe(m, 0), Form.coframe(m, 2))
        assert w == Form(m, 2, {(0, 2): const(1)})

    def test_alternation(self):
        assert wedge(Form.coframe(2, 0), Form.coframe(2, 0)).is_zero

    def test_bilinear_expansion(self):
        m = 2
        a = Form(m, 1, {(0,): vvar(1)})
        b = Form(m, 1, {(3,): xvar(1)})
        assert wedge(a, b) == Form(m, 2, {(0, 3): xvar(1) * vvar(1)})

    def test_degree_overflow_is_zero_form(self):
        m = 1
        vol = Form(m, 2, {(0, 1): const(1)})
        assert wedge(vol, Form.coframe(m, 0)).is_zero

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_graded_commutativity(self, s1, s2):
        a, b = _form(s1), _form(s2)
        rhs = wedge(b, a)
        if (a.degree * b.degree) % 2:
            rhs = -rhs
        assert wedge(a, b) == rhs


class TestExteriorDerivative:
    def test_on_fiber_coordinate(self):
        assert exterior_derivative(Form.from_scalar(2, vvar(1))) == Form.coframe(2, 2)

    def test_liouville_style_product(self):
        m = 1
        lam = Form(m, 1, {(0,): vvar(1)})  # v dx, the momentum-style 1-form
        dlam = exterior_derivative(lam)
        assert dlam == wedge(Form.coframe(m, 1), Form.coframe(m, 0))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9))
    def test_d_squared_zero(self, seed):
        w = _form(seed)
        assert exterior_derivative(exterior_derivative(w)).is_zero

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_leibniz(self, s1, s2):
        a, b = _form(s1), _form(s2)
        lhs = exterior_derivative(wedge(a, b))
        rhs = wedge(exterior_derivative(a), b)
        term = wedge(a, exterior_derivative(b))
        rhs = rhs + (term if a.degree % 2 == 0 else -term)
        assert lhs == rhs


class TestInteriorProduct:
    def test_frame_contraction(self):
        m = 2
        w = wedge(Form.coframe(m, 0), Form.coframe(m, 1))
        assert interior_product(VectorFieldTM.frame(m, 0), w) == Form.coframe(m, 1)

    def test_sign_bookkeeping(self):
        m = 2
        w = wedge(Form.coframe(m, 0), Form.coframe(m, 2)).scale(vvar(1))
        got = interior_product(VectorFieldTM.frame(m, 2), w)
        assert got == Form(m, 1, {(0,): -vvar(1)})

    def test_degree_zero_gives_zero(self):
        assert interior_product(_field(3), Form.from_scalar(2, xvar(1))).is_zero

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_nilpotent(self, s1, s2):
        X, w = _field(s1), _form(s2)
        assert interior_product(X, interior_product(X, w)).is_zero

    def test_xi_kills_pullbacks(self):
        m = 2
        a = rand_base_form(m, 2, random.Random(7), symbols=SYM)
        assert interior_product(tautological_field(m), pullback(a)).is_zero


class TestLieBracket:
    def test_coordinate_fields_commute(self):
        assert lie_bracket(VectorFieldTM.frame(2, 0), VectorFieldTM.frame(2, 2)).is_zero

    def test_xi_with_vertical_frame(self):
        m = 2
        xi = tautological_field(m)
        ddv1 = VectorFieldTM.frame(m, 2)
        assert lie_bracket(xi, ddv1) == -ddv1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**9))
    def test_jacobi(self, s1, s2, s3):
        X, Y, Z = _field(s1), _field(s2), _field(s3)
        total = (
            lie_bracket(lie_bracket(X, Y), Z)
            + lie_bracket(lie_bracket(Y, Z), X)
            + lie_bracket(lie_bracket(Z, X), Y)
        )
        assert total.is_zero


class TestLieDerivative:
    def test_simple_transport(self):
        m = 2
        w = Form(m, 1, {(1,): xvar(1)})  # x1 dx2
        got = lie_derivative_form(VectorFieldTM.frame(m, 0), w)
        assert got == Form.coframe(m, 1)

    def test_xi_annihilates_pullbacks(self):
        m = 2
        a = rand_base_form(m, 1, random.Random(3), symbols=SYM)
        assert lie_derivative_form(tautological_field(m), pullback(a)).is_zero

    def test_xi_fixes_complete_lifts(self):
        m = 2
        a = rand_base_form(m, 2, random.Random(5), symbols=SYM)
        at = complete_lift_form(a)
        assert lie_derivative_form(tautological_field(m), at) == at

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_cartan_formula(self, s1, s2):
        X, w = _field(s1), _form(s2)
        cartan = interior_product(X, exterior_derivative(w)) + exterior_derivative(
            interior_product(X, w)
        )
        assert lie_derivative_form(X, w) == cartan

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_commutes_with_d(self, s1, s2):
        X, w = _field(s1), _form(s2)
        assert lie_derivative_form(X, exterior_derivative(w)) == exterior_derivative(
            lie_derivative_form(X, w)
        )


class TestLieDerivativeEndomorphism:
    def test_mirror_table(self):
        m = 2
        B = mirror_map(m)
        assert lie_derivative_vvform(tautological_field(m), B) == B.scale(const(-1))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**9))
    def test_defining_property(self, s1, s2, s3):
        m = 2
        W, Y = _field(s1), _field(s2)
        rng = random.Random(s3)
        K = VectorValuedForm(
            m, 1, {(rng.randrange(2 * m),): rand_tm_field(m, rng)}
        )
        lhs = lie_derivative_vvform(W, K).apply([Y])
        rhs = lie_bracket(W, K.apply([Y])) - K.apply([lie_bracket(W, Y)])
        assert lhs == rhs


class TestEvaluateForm:
    def test_frame_pairing(self):
        m = 2
        w = wedge(Form.coframe(m, 0), Form.coframe(m, 2))
        one = evaluate_form(w, [VectorFieldTM.frame(m, 0), VectorFieldTM.frame(m, 2)])
        assert one == const(1)
        minus = evaluate_form(w, [VectorFieldTM.frame(m, 2), VectorFieldTM.frame(m, 0)])
        assert minus == const(-1)

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            evaluate_form(Form.coframe(2, 0), [])

    def test_pullback_kills_verticals(self):
        m = 2
        a = rand_base_form(m, 2, random.Random(11))
        vert = VectorFieldTM(m, [const(0), const(0), xvar(1), vvar(2)])
        other = _field(4)
        assert evaluate_form(pullback(a), [vert, other]).is_zero


class TestValidation:
    def test_nonincreasing_index_rejected(self):
        with pytest.raises(ValueError):
            Form(2, 2, {(2, 0): const(1)})

    def test_zero_coefficients_dropped(self):
        w = Form(2, 1, {(0,): const(0), (1,): const(2)})
        assert (0,) not in w.terms and (1,) in w.terms

    def test_base_form_rejects_fiber(self):
        with pytest.raises(NotBaseOnly):
            BaseForm(2, 1, {(0,): vvar(1)})
        with pytest.raises(ValueError):
            BaseForm(2, 1, {(2,): xvar(1)})

    def test_base_field_rejects_fiber_coefficients(self):
        with pytest.raises(NotBaseOnly):
            BaseVectorField(2, [vvar(1), const(0)])

    def test_zero_forms_of_mismatched_degree_compare_equal(self):
        assert Form.zero(2, 1) == Form.zero(2, 3)
        assert BaseForm.zero(2, 0) == BaseForm.zero(2, 2)
