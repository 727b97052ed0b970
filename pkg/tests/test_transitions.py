"""Chart transitions, induced tangent maps, naturality and globality."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentcalc.errors import NotInverse, UnknownLift
from tangentcalc.forms import Form, VectorFieldTM, exterior_derivative
from tangentcalc.lifts import mirror_map, pullback, tautological_field
from tangentcalc.operators import AlphaMuForm, make_f_mu, theta
from tangentcalc.rand import (
    rand_affine_transition,
    rand_base_field,
    rand_base_form,
    rand_base_scalar,
    rand_closed_base_form,
    rand_quadratic_transition,
    rand_tm_form,
)
from tangentcalc.scalar import const, vvar, xvar
from tangentcalc.transitions import (
    check_consistency_identity,
    check_naturality,
    coframe_images,
    compose_transitions,
    jacobian_determinant,
    make_transition,
    transform,
    transform_base,
    volume_transform_coefficient,
)


def _any_transition(seed, m):
    rng = random.Random(seed)
    if m >= 2 and rng.random() < 0.5:
        return rand_quadratic_transition(m, rng)
    return rand_affine_transition(m, rng)


class TestConstruction:
    def test_affine_fiber_rule(self):
        T = make_transition(
            [2 * xvar(1) + xvar(2), xvar(2)], [(xvar(1) - xvar(2)) / 2, xvar(2)]
        )
        assert T.fiber_image() == [2 * vvar(1) + vvar(2), vvar(2)]

    def test_identity_transition(self):
        T = make_transition([xvar(1)], [xvar(1)])
        assert T.fiber_image() == [vvar(1)]
        w = rand_tm_form(1, 1, random.Random(0))
        assert transform(w, T) == w

    def test_not_inverse_rejected(self):
        with pytest.raises(NotInverse):
            make_transition(
                [xvar(1) + xvar(1) ** 2, xvar(2)],
                [xvar(1) - xvar(1) ** 2, xvar(2)],
            )

    def test_quadratic_with_exact_inverse(self):
        T = make_transition(
            [xvar(1) + xvar(2) ** 2, xvar(2)], [xvar(1) - xvar(2) ** 2, xvar(2)]
        )
        assert check_consistency_identity(T)


class TestConsistencyIdentity:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_holds_for_generated_transitions(self, seed, m):
        assert check_consistency_identity(_any_transition(seed, m))

    def test_holds_for_composition(self):
        m = 2
        T = compose_transitions(_any_transition(1, m), _any_transition(2, m))
        assert check_consistency_identity(T)


class TestTransform:
    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_functorial_roundtrip(self, seed, m):
        rng = random.Random(seed)
        T = _any_transition(seed, m)
        w = rand_tm_form(m, rng.randint(0, 2 * m), rng)
        assert transform(transform(w, T), T, "inverse") == w
        X = VectorFieldTM(m, [rand_base_scalar(m, rng) for _ in range(m)] * 2)
        assert transform(transform(X, T), T, "inverse") == X

    def test_vertical_frame_rule(self):
        # d/dv'^a = (dx^i/dx'^a) d/dv^i: vertical frames stay vertical
        m = 2
        T = _any_transition(5, m)
        for a in range(m):
            moved = transform(VectorFieldTM.frame(m, m + a), T, "inverse")
            assert all(c.is_zero for c in moved.components[:m])

    def test_tautological_field_is_natural(self):
        for seed, m in [(0, 1), (1, 2), (2, 3), (3, 2)]:
            T = _any_transition(seed, m)
            xi = tautological_field(m)
            assert transform(xi, T) == xi

    def test_covector_rule_on_affine(self):
        T = make_transition(
            [2 * xvar(1) + xvar(2), xvar(2)], [(xvar(1) - xvar(2)) / 2, xvar(2)]
        )
        moved = transform(Form.coframe(2, 0), T)
        # dx1 = (1/2) dx'1 - (1/2) dx'2
        assert moved == Form(
            2, 1, {(0,): const(1) / 2, (1,): -const(1) / 2}
        )


class TestNaturality:
    @settings(max_examples=12, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_all_five_lifts(self, seed, m):
        rng = random.Random(seed)
        T = _any_transition(seed, m)
        assert check_naturality("pullback", rand_base_form(m, rng.randint(1, m), rng), T)
        assert check_naturality("vertical", rand_base_field(m, rng), T)
        assert check_naturality("complete", rand_base_field(m, rng), T)
        assert check_naturality("complete", rand_base_form(m, rng.randint(0, m), rng), T)
        assert check_naturality("complete", rand_base_scalar(m, rng), T)
        assert check_naturality("xi", None, T)
        assert check_naturality("B", None, T)

    def test_unknown_lift(self):
        T = make_transition([xvar(1)], [xvar(1)])
        with pytest.raises(UnknownLift):
            check_naturality("horizontal", None, T)


class TestVolumeAndFlat:
    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_volume_factor_is_det_squared(self, seed, m):
        T = _any_transition(seed, m)
        det = jacobian_determinant(T, "inverse")
        assert volume_transform_coefficient(T) == det * det

    def test_affine_dv_rule_loses_second_derivatives(self):
        m = 3
        T = rand_affine_transition(m, random.Random(7))
        images = coframe_images(T)
        for i in range(m, 2 * m):
            assert all(a >= m for (a,) in images[i].terms)

    def test_quadratic_dv_rule_keeps_second_derivatives(self):
        T = make_transition(
            [xvar(1) + xvar(2) ** 2, xvar(2)], [xvar(1) - xvar(2) ** 2, xvar(2)]
        )
        images = coframe_images(T)
        assert any(a < 2 for (a,) in images[2].terms)


class TestThetaGlobality:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 3))
    def test_theta_transforms_covariantly(self, seed, m):
        rng = random.Random(seed)
        T = _any_transition(seed, m)
        mu = rand_base_form(m, 1, rng)
        c = rand_base_scalar(m, rng)
        gamma = rand_closed_base_form(m, 1, rng)
        alpha = exterior_derivative(
            Form.from_scalar(m, make_f_mu(mu, c))
        ) + pullback(gamma)
        g1 = theta(AlphaMuForm(alpha, mu))
        g2 = theta(AlphaMuForm(transform(alpha, T), transform_base(mu, T)))
        assert g2 == transform_base(g1, T)


class TestMirrorNaturalityDirect:
    def test_mirror_transform_is_mirror(self):
        for seed, m in [(11, 2), (12, 3)]:
            T = _any_transition(seed, m)
            assert transform(mirror_map(m), T) == mirror_map(m)
