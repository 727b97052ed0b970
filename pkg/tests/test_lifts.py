"""Lifts to the tangent chart, the tautological field and the mirror map."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentcalc.errors import NotBaseOnly
from tangentcalc.forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    exterior_derivative,
    interior_product,
    lie_bracket,
)
from tangentcalc.lifts import (
    base_identity_components,
    complete_lift_form,
    complete_lift_function,
    complete_lift_vector,
    identity_endomorphism,
    is_lambda_mirror,
    is_spray,
    lift_tensor,
    mirror_map,
    pullback,
    reconstruct_from_complete_lift,
    tautological_field,
    tensor_product_tm,
    vertical_lift_vector,
)
from tangentcalc.rand import rand_base_field, rand_base_form, rand_base_scalar
from tangentcalc.scalar import FunctionSymbol, const, vvar, xvar

SYM = (FunctionSymbol("f", "base"), FunctionSymbol("g", "base"))


class TestFunctionLift:
    def test_coordinate(self):
        assert complete_lift_function(2, xvar(1)) == vvar(1)

    def test_constant(self):
        assert complete_lift_function(2, const(5)).is_zero

    def test_leibniz_expansion(self):
        got = complete_lift_function(2, xvar(1) * xvar(2))
        assert got == vvar(1) * xvar(2) + xvar(1) * vvar(2)

    def test_rejects_fiber_dependence(self):
        with pytest.raises(NotBaseOnly):
            complete_lift_function(2, vvar(1))

    def test_formal_symbol_stays_formal(self):
        f = rand_base_scalar(2, random.Random(0), symbols=SYM)
        lifted = complete_lift_function(2, f)
        # L_xi fixes it, the eigenvalue-one property for arbitrary f
        xi = tautological_field(2)
        assert xi.apply_to(lifted) == lifted


class TestVectorLifts:
    def test_vertical_of_frame(self):
        assert vertical_lift_vector(BaseVectorField.frame(2, 0)) == VectorFieldTM.frame(2, 2)

    def test_vertical_carries_coefficient(self):
        X = BaseVectorField(2, [const(0), xvar(1)])
        assert vertical_lift_vector(X) == VectorFieldTM(
            2, [const(0)] * 3 + [xvar(1)]
        )

    def test_complete_of_frame(self):
        assert complete_lift_vector(BaseVectorField.frame(2, 0)) == VectorFieldTM.frame(2, 0)

    def test_complete_explicit(self):
        X = BaseVectorField(2, [xvar(1), const(0)])
        assert complete_lift_vector(X) == VectorFieldTM(
            2, [xvar(1), const(0), vvar(1), const(0)]
        )

    def test_module_rule(self):
        rng = random.Random(1)
        f = rand_base_scalar(2, rng, symbols=SYM)
        X = rand_base_field(2, rng, symbols=SYM)
        lhs = complete_lift_vector(X.scale(f))
        rhs = complete_lift_vector(X).scale(f) + vertical_lift_vector(X).scale(
            complete_lift_function(2, f)
        )
        assert lhs == rhs

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(0, 10**9))
    def test_bracket_identities(self, s1, s2):
        m = 2
        X = rand_base_field(m, random.Random(s1), symbols=SYM)
        Y = rand_base_field(m, random.Random(s2), symbols=SYM)
        assert lie_bracket(
            complete_lift_vector(X), complete_lift_vector(Y)
        ) == complete_lift_vector(X.bracket(Y))
        assert lie_bracket(
            complete_lift_vector(X), vertical_lift_vector(Y)
        ) == vertical_lift_vector(X.bracket(Y))
        assert lie_bracket(
            vertical_lift_vector(X), vertical_lift_vector(Y)
        ).is_zero


class TestFormLift:
    def test_one_form_display(self):
        m = 2
        a = BaseForm(m, 1, {(0,): xvar(2)})
        assert complete_lift_form(a) == Form(m, 1, {(0,): vvar(2), (2,): xvar(2)})

    def test_worked_example_is_exact(self):
        m = 2
        x, y, v, w = xvar(1), xvar(2), vvar(1), vvar(2)
        den = x**2 + y**2
        omega = BaseForm(m, 1, {(0,): -y / den, (1,): x / den})
        potential = (x * w - y * v) / den
        lhs = complete_lift_form(omega)
        rhs = exterior_derivative(Form.from_scalar(m, potential))
        assert lhs == rhs

    def test_two_form_constant_coefficients(self):
        m = 2
        a = BaseForm(m, 2, {(0, 1): const(1)})
        got = complete_lift_form(a)
        assert got == Form(m, 2, {(1, 2): const(-1), (0, 3): const(1)})

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_d_commutes(self, seed, m):
        rng = random.Random(seed)
        a = rand_base_form(m, rng.randint(0, m), rng, symbols=SYM)
        assert complete_lift_form(a.d()) == exterior_derivative(complete_lift_form(a))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9))
    def test_injectivity_via_reconstruction(self, seed):
        m = 3
        rng = random.Random(seed)
        a = rand_base_form(m, rng.randint(1, m), rng, symbols=SYM)
        assert reconstruct_from_complete_lift(complete_lift_form(a)) == a

    def test_wedge_rule(self):
        m = 2
        rng = random.Random(9)
        a = rand_base_form(m, 1, rng, symbols=SYM)
        b = rand_base_form(m, 1, rng, symbols=SYM)
        from tangentcalc.forms import wedge

        lhs = complete_lift_form(a.wedge(b))
        rhs = wedge(complete_lift_form(a), pullback(b)) + wedge(
            pullback(a), complete_lift_form(b)
        )
        assert lhs == rhs


class TestTensorLift:
    def test_identity_tensor(self):
        m = 3
        total = None
        for vec, form in base_identity_components(m):
            t = lift_tensor([vec], [form], "complete")
            total = t if total is None else total + t
        assert total.to_endomorphism() == identity_endomorphism(m)

    def test_product_rule(self):
        m = 2
        rng = random.Random(2)
        X = rand_base_field(m, rng)
        Y = rand_base_field(m, rng)
        lhs = lift_tensor([X, Y], [], "complete")
        rhs = tensor_product_tm(
            [complete_lift_vector(X), vertical_lift_vector(Y)]
        ) + tensor_product_tm([vertical_lift_vector(X), complete_lift_vector(Y)])
        assert lhs == rhs

    def test_vertical_mode(self):
        m = 2
        t = lift_tensor(
            [BaseVectorField.frame(m, 0)], [BaseForm.coframe(m, 0)], "vertical"
        )
        expected = tensor_product_tm([VectorFieldTM.frame(m, 2), Form.coframe(m, 0)])
        assert t == expected


class TestCanonicalTensors:
    def test_mirror_kills_tautological(self):
        m = 3
        assert mirror_map(m).apply([tautological_field(m)]).is_zero

    def test_mirror_of_complete_lift(self):
        m = 2
        X = rand_base_field(m, random.Random(4), symbols=SYM)
        assert mirror_map(m).apply([complete_lift_vector(X)]) == vertical_lift_vector(X)

    def test_exactness_witness(self):
        m = 2
        gamma = rand_base_form(m, 1, random.Random(5)).d()  # exact hence closed
        wt = complete_lift_form(gamma)
        assert exterior_derivative(
            interior_product(tautological_field(m), wt)
        ) == wt

    def test_spray_detection(self):
        m = 2
        flat = VectorFieldTM(m, [vvar(1), vvar(2), const(0), const(0)])
        assert is_spray(flat)
        assert not is_spray(tautological_field(m))
        with_vertical = VectorFieldTM(m, [vvar(1), vvar(2), xvar(1) ** 2, vvar(1)])
        assert is_spray(with_vertical)

    def test_lambda_mirror_values(self):
        m = 2
        X = rand_base_field(m, random.Random(6))
        assert is_lambda_mirror(tautological_field(m)) == const(-1)
        assert is_lambda_mirror(complete_lift_vector(X)) == const(0)
        assert is_lambda_mirror(vertical_lift_vector(X)) == const(0)
        W = VectorFieldTM(m, [xvar(1), const(0), const(0), const(0)])
        assert is_lambda_mirror(W) is None
