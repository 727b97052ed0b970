"""Derivation calculus, the fiberwise homotopy and the Theta construction."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentcalc.errors import (
    NonPolynomialFiberDependence,
    NotAboveMu,
    NotClosed,
    NotSemiBasic,
    UnsupportedDegree,
)
from tangentcalc.forms import (
    BaseForm,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    exterior_derivative,
    interior_product,
    wedge,
)
from tangentcalc.lifts import (
    complete_lift_form,
    identity_endomorphism,
    mirror_map,
    pullback,
    tautological_field,
)
from tangentcalc.operators import (
    AlphaMuForm,
    DOperator,
    apply_D,
    circ_wedge,
    d_B,
    db_poincare,
    extract_mu,
    fn_self_bracket,
    insertion_derivation,
    is_fiber_affine,
    lie_derivation,
    lifted_cohomology_witness,
    make_f_mu,
    semi_basic_defect,
    theta,
)
from tangentcalc.rand import (
    rand_base_form,
    rand_base_scalar,
    rand_endomorphism,
    rand_semibasic_form,
    rand_tm_form,
)
from tangentcalc.scalar import FunctionSymbol, const, vvar, xvar

SYM = (FunctionSymbol("f", "base"),)


def _tm_form(seed, m=2, p=None):
    rng = random.Random(seed)
    degree = rng.randint(0, 2 * m - 1) if p is None else p
    return rand_tm_form(m, degree, rng, symbols=SYM)


class TestCircWedge:
    def test_identity_slots_scale(self):
        m = 2
        w = _tm_form(1, p=2)
        one = identity_endomorphism(m)
        assert circ_wedge(w, [one, one]) == w.scale(math.factorial(2))

    def test_collapse_cases(self):
        m = 3
        g = rand_base_form(m, 2, random.Random(2), symbols=SYM)
        gt = complete_lift_form(g)
        B = mirror_map(m)
        one = identity_endomorphism(m)
        half = Fraction(1, math.factorial(2))
        assert circ_wedge(gt, [B, one]).scale(half) == pullback(g)
        assert circ_wedge(gt, [one, one]).scale(half) == gt
        assert circ_wedge(gt, [B, B]).scale(half).is_zero


class TestInsertion:
    def test_mirror_on_fiber_coframe(self):
        m = 2
        assert insertion_derivation(mirror_map(m), Form.coframe(m, 2)) == Form.coframe(m, 0)

    def test_identity_scales_by_degree(self):
        w = _tm_form(3, p=3)
        assert insertion_derivation(identity_endomorphism(2), w) == w.scale(3)

    def test_mirror_kills_pullbacks(self):
        m = 2
        a = rand_base_form(m, 2, random.Random(4), symbols=SYM)
        assert insertion_derivation(mirror_map(m), pullback(a)).is_zero

    def test_degree_two_derivation_property(self):
        m = 2
        rng = random.Random(5)
        K = VectorValuedForm(
            m,
            2,
            {
                (0, 1): VectorFieldTM(m, [vvar(1), const(0), xvar(2), const(1)]),
                (1, 2): VectorFieldTM.frame(m, 3),
            },
        )
        a = rand_tm_form(m, 1, rng)
        b = rand_tm_form(m, 2, rng)
        lhs = insertion_derivation(K, wedge(a, b))
        sign_term = wedge(a, insertion_derivation(K, b))
        rhs = wedge(insertion_derivation(K, a), b) + (
            -sign_term if a.degree % 2 else sign_term
        )
        assert lhs == rhs

    def test_circ_wedge_coincidence(self):
        m = 2
        K = rand_endomorphism(m, random.Random(6))
        w = _tm_form(7, p=2)
        one = identity_endomorphism(m)
        assert insertion_derivation(K, w) == circ_wedge(w, [K, one]).scale(
            Fraction(1, math.factorial(1))
        )

    def test_unsupported_degree(self):
        m = 1
        K3 = VectorValuedForm(m, 3, {})
        with pytest.raises(UnsupportedDegree):
            insertion_derivation(K3, Form.coframe(m, 0))


class TestDb:
    def test_on_coordinates(self):
        m = 2
        assert d_B(Form.from_scalar(m, vvar(1))) == Form.coframe(m, 0)
        assert d_B(Form.from_scalar(m, xvar(1))).is_zero
        assert d_B(Form.coframe(m, 0)).is_zero
        assert d_B(Form.coframe(m, 2)).is_zero

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9))
    def test_squares_to_zero(self, seed):
        w = _tm_form(seed)
        assert d_B(d_B(w)).is_zero

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9))
    def test_anticommutes_with_d(self, seed):
        w = _tm_form(seed)
        assert exterior_derivative(d_B(w)) == -d_B(exterior_derivative(w))

    def test_on_complete_lift(self):
        m = 2
        w = rand_base_form(m, 1, random.Random(8), symbols=SYM)
        assert d_B(complete_lift_form(w)) == exterior_derivative(pullback(w))

    def test_xi_contraction_scales_by_degree(self):
        m = 3
        w = rand_base_form(m, 2, random.Random(9), symbols=SYM)
        lhs = d_B(interior_product(tautological_field(m), complete_lift_form(w)))
        assert lhs == pullback(w).scale(2)


class TestLieDerivation:
    def test_identity_is_d(self):
        m = 2
        w = _tm_form(10)
        assert lie_derivation(identity_endomorphism(m), w) == exterior_derivative(w)

    def test_mirror_is_db(self):
        m = 2
        w = _tm_form(11)
        assert lie_derivation(mirror_map(m), w) == d_B(w)

    def test_degree_zero_is_cartan(self):
        m = 2
        X = VectorFieldTM(m, [vvar(1), xvar(2), const(1), xvar(1) * vvar(2)])
        w = _tm_form(12)
        K0 = VectorValuedForm.from_vector(X)
        lhs = lie_derivation(K0, w)
        rhs = interior_product(X, exterior_derivative(w)) + exterior_derivative(
            interior_product(X, w)
        )
        assert lhs == rhs

    def test_unsupported_degree(self):
        m = 1
        with pytest.raises(UnsupportedDegree):
            lie_derivation(VectorValuedForm(m, 2, {}), Form.coframe(m, 0))


class TestFnBracket:
    def test_mirror_and_identity_vanish(self):
        for m in (1, 2, 3):
            assert fn_self_bracket(mirror_map(m)).is_zero
            assert fn_self_bracket(identity_endomorphism(m)).is_zero

    def test_frozen_nilpotent_example(self):
        # K = dx1 (x) x2 d/dv1 at m=2: every bracket term dies
        m = 2
        K = VectorValuedForm(
            m, 1, {(0,): VectorFieldTM(m, [const(0), const(0), xvar(2), const(0)])}
        )
        assert fn_self_bracket(K).is_zero

    def test_frozen_nonzero_example(self):
        # K = dx1 (x) v1 d/dx1 at m=1: [K,K](ddx1, ddv1) = 2 v1 ddx1
        K = VectorValuedForm(
            1, 1, {(0,): VectorFieldTM(1, [vvar(1), const(0)])}
        )
        got = fn_self_bracket(K)
        assert got.entry((0, 1)) == VectorFieldTM(1, [2 * vvar(1), const(0)])


class TestDOperator:
    def test_pure_d(self):
        w = _tm_form(13)
        assert apply_D(DOperator(1, 0), w) == exterior_derivative(w)

    def test_mixed_on_fiber_coordinate(self):
        m = 2
        got = apply_D(DOperator(Fraction(3, 2), 1), Form.from_scalar(m, vvar(1)))
        assert got == Form(m, 1, {(0,): const(1), (2,): const(Fraction(3, 2))})

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(-3, 3), st.integers(1, 3))
    def test_squares_to_zero(self, seed, num, den):
        D = DOperator(Fraction(num, den), Fraction(den, 2))
        w = _tm_form(seed)
        assert apply_D(D, apply_D(D, w)).is_zero

    def test_nonconstant_coefficient_breaks_coboundary(self):
        m = 2
        Dw = lambda u: exterior_derivative(u) + d_B(u).scale(xvar(1))
        got = Dw(Dw(Form.from_scalar(m, vvar(2))))
        assert got == Form(m, 2, {(0, 1): const(1)})


class TestSemiBasic:
    def test_pullbacks_clean(self):
        m = 2
        a = rand_base_form(m, 2, random.Random(14))
        assert semi_basic_defect(pullback(a), 0) is None

    def test_fiber_coframe_witness(self):
        assert semi_basic_defect(Form.coframe(2, 2), 0) == ("dv1",)

    def test_complete_lift_grading(self):
        m = 2
        w = rand_base_form(m, 1, random.Random(15))
        wt = complete_lift_form(w)
        assert semi_basic_defect(wt, 1) is None
        assert semi_basic_defect(wt, 0) is not None


class TestDbPoincare:
    def test_base_coframe(self):
        got = db_poincare(Form(1, 1, {(0,): const(1)}))
        assert got == Form.from_scalar(1, vvar(1))

    def test_pullback_input(self):
        m = 3
        w = rand_base_form(m, 2, random.Random(16))
        sol = db_poincare(pullback(w))
        assert d_B(sol) == pullback(w)
        assert semi_basic_defect(sol, 0) is None

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_roundtrip(self, seed, m):
        rng = random.Random(seed)
        tau = rand_semibasic_form(m, rng.randint(0, max(0, m - 1)), rng)
        w = d_B(tau)
        if w.is_zero:
            return
        assert d_B(db_poincare(w)) == w

    def test_not_semi_basic(self):
        with pytest.raises(NotSemiBasic):
            db_poincare(Form.coframe(1, 1))

    def test_not_closed(self):
        m = 2
        w = Form(m, 1, {(0,): vvar(2)})
        with pytest.raises(NotClosed):
            db_poincare(w)

    def test_nonpolynomial_fiber(self):
        w = Form(1, 1, {(0,): 1 / vvar(1)})
        with pytest.raises(NonPolynomialFiberDependence):
            db_poincare(w)


class TestFiberAffine:
    def test_make_f_mu_explicit(self):
        m = 2
        mu = BaseForm(m, 1, {(0,): xvar(2)})
        assert make_f_mu(mu, xvar(1)) == xvar(2) * vvar(1) + xvar(1)

    def test_composition_with_mirror(self):
        m = 2
        rng = random.Random(17)
        mu = rand_base_form(m, 1, rng)
        f = make_f_mu(mu, rand_base_scalar(m, rng))
        df = exterior_derivative(Form.from_scalar(m, f))
        assert circ_wedge(df, [mirror_map(m)]) == pullback(mu)

    def test_detector_roundtrip(self):
        m = 2
        rng = random.Random(18)
        mu = rand_base_form(m, 1, rng)
        c = rand_base_scalar(m, rng)
        got = is_fiber_affine(make_f_mu(mu, c), m)
        assert got == (mu, c)

    def test_quadratic_rejected(self):
        assert is_fiber_affine(vvar(1) ** 2, 1) is None

    def test_worked_example_potential_is_affine(self):
        m = 2
        x, y, v, w = xvar(1), xvar(2), vvar(1), vvar(2)
        den = x**2 + y**2
        F = (x * w - y * v) / den
        mu, c = is_fiber_affine(F, m)
        assert mu == BaseForm(m, 1, {(0,): -y / den, (1,): x / den})
        assert c.is_zero


class TestExtractMu:
    def test_complete_lift_recovers(self):
        m = 2
        mu = rand_base_form(m, 1, random.Random(19))
        assert extract_mu(complete_lift_form(mu)) == mu

    def test_pullback_extracts_zero(self):
        m = 2
        g = rand_base_form(m, 2, random.Random(20))
        assert extract_mu(pullback(g)) == BaseForm.zero(m, 2)

    def test_pure_fiber_form_has_no_mu(self):
        m = 2
        w = Form(m, 2, {(2, 3): vvar(1)})
        assert extract_mu(w) is None


class TestTheta:
    def _mu_c(self, m, seed):
        rng = random.Random(seed)
        return rand_base_form(m, 1, rng), rand_base_scalar(m, rng)

    def test_exact_input_maps_to_dc(self):
        m = 2
        mu, c = self._mu_c(m, 21)
        f = make_f_mu(mu, c)
        df = exterior_derivative(Form.from_scalar(m, f))
        assert theta(AlphaMuForm(df, mu)) == BaseForm.from_scalar(m, c).d()

    def test_pullback_section(self):
        m = 3
        gamma = rand_base_form(m, 0, random.Random(22)).d()
        assert theta(AlphaMuForm(pullback(gamma), BaseForm.zero(m, 1))) == gamma

    def test_complete_lift_of_closed_maps_to_zero(self):
        m = 2
        mu = rand_base_form(m, 0, random.Random(23)).d()  # closed 1-form
        assert theta(AlphaMuForm(complete_lift_form(mu), mu)).is_zero

    def test_not_closed(self):
        m = 2
        mu = BaseForm(m, 1, {(0,): xvar(2)})
        with pytest.raises(NotClosed):
            theta(AlphaMuForm(complete_lift_form(mu), mu))

    def test_not_above_mu(self):
        m = 2
        mu = BaseForm(m, 1, {(0,): xvar(2)})
        with pytest.raises(NotAboveMu):
            AlphaMuForm(pullback(mu), mu)


class TestWitness:
    def test_worked_example(self):
        m = 2
        x, y, v, w = xvar(1), xvar(2), vvar(1), vvar(2)
        den = x**2 + y**2
        omega = BaseForm(m, 1, {(0,): -y / den, (1,): x / den})
        wit = lifted_cohomology_witness(omega)
        assert wit == Form.from_scalar(m, (x * w - y * v) / den)

    def test_coordinate_coframe(self):
        assert lifted_cohomology_witness(
            BaseForm.coframe(1, 0)
        ) == Form.from_scalar(1, vvar(1))

    def test_two_form(self):
        m = 2
        w12 = BaseForm(m, 2, {(0, 1): const(1)})
        assert lifted_cohomology_witness(w12) == Form(
            m, 1, {(0,): -vvar(2), (1,): vvar(1)}
        )

    def test_not_closed(self):
        m = 2
        with pytest.raises(NotClosed):
            lifted_cohomology_witness(BaseForm(m, 1, {(0,): xvar(2)}))
