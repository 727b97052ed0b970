"""Acceptance criteria for the engine, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
PASS/FAIL lines.  Criterion 4 is asserted twice: once exactly as specified
(known to be identically zero, kept as a strict expected failure with the
analysis in the docstring) and once with the corrected witness that the
suite registers as the designed-failure check.
"""

import json
import random
import time

import pytest

from tangentcalc.dsl import parse, render
from tangentcalc.forms import Form, exterior_derivative
from tangentcalc.lifts import complete_lift_form
from tangentcalc.operators import d_B, db_poincare, semi_basic_defect
from tangentcalc.rand import (
    rand_affine_transition,
    rand_base_field,
    rand_base_form,
    rand_base_scalar,
    rand_quadratic_transition,
    rand_semibasic_form,
    rand_tm_field,
    rand_tm_form,
)
from tangentcalc.scalar import FunctionSymbol, const, vvar, xvar
from tangentcalc.suite import SuiteConfig, run_suite
from tangentcalc.transitions import (
    check_consistency_identity,
    check_naturality,
    jacobian_determinant,
    volume_transform_coefficient,
)

def _report(criterion, ok, extra=""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {criterion}: {status}{' ' + extra if extra else ''}")
    return ok


def test_criterion_1_worked_example_exact():
    """The lifted angular form on the punctured plane equals the exterior
    derivative of its fiber-affine potential, exactly and in under 1 s."""
    t0 = time.perf_counter()
    m = 2
    x, y, v, w = xvar(1), xvar(2), vvar(1), vvar(2)
    den = x**2 + y**2
    omega = parse("m=2; (-x2*dx1 + x1*dx2)/(x1^2+x2^2)").result
    from tangentcalc.forms import BaseForm

    lifted = complete_lift_form(BaseForm(m, 1, dict(omega.terms)))
    potential = exterior_derivative(Form.from_scalar(m, (x * w - y * v) / den))
    elapsed = time.perf_counter() - t0
    ok = lifted == potential and elapsed < 1.0
    assert _report(1, ok, f"(worked example, {elapsed:.3f}s)")


REQUIRED_IDENTITIES = {
    "bracket-lift-triple",  # the three lifted-bracket equalities
    "clift-pairing-table",
    "clift-d-commute",
    "xi-clift-eigenform",  # L_xi clift(a) = clift(a)
    "closed-lift-exactness",  # d(i_xi clift(w)) = clift(w)
    "mirror-structure",  # B o B = 0
    "mirror-lie-table",  # L_xi B = -B, L_{clift X} B = 0, L_{vlift X} B = 0
    "circ-wedge-collapse",
    "db-squared-zero",
    "d-db-anticommute",
    "identity-endo-derivations",  # i_1 = p id, L_1 = d
    "fn-self-bracket",  # [B,B] = 0
    "db-xi-contraction",
    "db-of-clift",
    "theta-first-cohomology",
    "transition-coherence",
}


def test_criterion_2_identity_suite_seed0():
    """Seed 0, m in {1,2,3}, 25 cases per identity: every registered
    identity passes symbolically within the two-minute budget."""
    t0 = time.perf_counter()
    report = run_suite(SuiteConfig(m_values=(1, 2, 3), cases=25, seed=0))
    elapsed = time.perf_counter() - t0
    ids = {r.id for r in report.records}
    missing = REQUIRED_IDENTITIES - ids
    ok = report.failed == 0 and not missing and elapsed < 120.0
    assert _report(
        2,
        ok,
        f"({report.total - report.failed}/{report.total} identities, {elapsed:.1f}s)",
    ), (report.render_text(), missing)


def test_criterion_3_constructive_db_poincare():
    """50 random semi-basic d_B-exact forms, degrees 1..3, m <= 3,
    fiber-polynomial coefficients: the homotopy primitive is exact."""
    rng = random.Random(3)
    successes = 0
    produced = 0
    while produced < 50:
        m = rng.randint(1, 3)
        p = rng.randint(0, min(2, m - 1)) if m > 1 else 0
        tau = rand_semibasic_form(m, p, rng)
        w = d_B(tau)
        if w.is_zero or w.degree > 3:
            continue
        produced += 1
        alpha = db_poincare(w)
        if d_B(alpha) == w and semi_basic_defect(alpha, 0) is None:
            successes += 1
    ok = successes == 50
    assert _report(3, ok, f"({successes}/50 exact round trips)")


@pytest.mark.xfail(
    strict=True,
    reason="(d + x1*d_B)^2 applied to v1 is identically zero: the second "
    "application meets d_B(v1) = dx1, and dx1^dx1 = d_B(x1) = 0 kill every "
    "term; the nonzero witness needs a coordinate mismatch, see the "
    "companion test",
)
def test_criterion_4_counterexample_as_specified():
    """Literal form of the obligation: (d + x1 d_B)^2 v1 != 0.

    Expanding with the product rule, (d + eps d_B)^2 = d(eps) ^ d_B(.)
    for base-only eps, so the square applied to v1 is dx1 ^ d_B(v1)
    = dx1 ^ dx1 = 0.  The assertion below is therefore unsatisfiable;
    it is kept, strict, so any change in behaviour trips the suite.
    """
    m = 2
    eps = xvar(1)
    D = lambda u: exterior_derivative(u) + d_B(u).scale(eps)
    got = D(D(Form.from_scalar(m, vvar(1))))
    assert not got.is_zero


def test_criterion_4_counterexample_corrected_witness():
    """The constancy requirement, certified: with eps = x1 the square is
    dx1 ^ d_B(.), nonzero on v2; the suite reports the same check as a
    passing negative test."""
    m = 2
    eps = xvar(1)
    D = lambda u: exterior_derivative(u) + d_B(u).scale(eps)
    got = D(D(Form.from_scalar(m, vvar(2))))
    nonzero_ok = got == Form(m, 2, {(0, 1): const(1)})
    report = run_suite(
        SuiteConfig(m_values=(1, 2, 3), cases=1, filter="D-squared-nonconstant")
    )
    suite_ok = report.failed == 0 and report.records[0].passed
    ok = nonzero_ok and suite_ok
    assert _report(4, ok, "(corrected witness nonzero; suite negative test passes)")


def test_criterion_5_naturality_and_volume():
    """20 affine and 10 quadratic exact-inverse transitions: naturality of
    all five lifts and the squared-Jacobian volume factor."""
    rng = random.Random(5)
    transitions = []
    for i in range(20):
        m = (i % 3) + 1
        transitions.append((m, rand_affine_transition(m, rng)))
    for i in range(10):
        m = (i % 2) + 2
        transitions.append((m, rand_quadratic_transition(m, rng)))
    checked = 0
    for m, T in transitions:
        assert check_consistency_identity(T)
        assert check_naturality("pullback", rand_base_form(m, rng.randint(1, m), rng), T)
        assert check_naturality("vertical", rand_base_field(m, rng), T)
        assert check_naturality("complete", rand_base_field(m, rng), T)
        assert check_naturality("complete", rand_base_form(m, rng.randint(0, m), rng), T)
        assert check_naturality("complete", rand_base_scalar(m, rng), T)
        assert check_naturality("xi", None, T)
        assert check_naturality("B", None, T)
        det = jacobian_determinant(T, "inverse")
        assert volume_transform_coefficient(T) == det * det
        checked += 1
    ok = checked == 30
    assert _report(5, ok, "(20 affine + 10 quadratic, five lifts + volume)")


def test_criterion_6_numeric_redundancy():
    """verify --numeric: every identity re-checked by central differences
    (step 1e-4) at sampled points agrees with the symbolic verdict at
    relative tolerance 1e-6, away from denominator zeros."""
    report = run_suite(
        SuiteConfig(
            m_values=(1, 2, 3),
            cases=25,
            seed=0,
            numeric=True,
            fd_step=1e-4,
            rel_tol=1e-6,
        )
    )
    ok = report.failed == 0
    assert _report(
        6, ok, f"({report.total - report.failed}/{report.total} identities numeric)"
    ), report.render_text()


def test_criterion_7_dsl_round_trip():
    """200 random forms and fields survive parse(render(.)) unchanged."""
    symbols = (FunctionSymbol("f", "base"), FunctionSymbol("h", "full"))
    decls = "function f base; function h full"
    rng = random.Random(7)
    count = 0
    for _ in range(200):
        m = rng.randint(1, 3)
        if rng.random() < 0.5:
            obj = rand_tm_form(m, rng.randint(0, 2 * m), rng, symbols=symbols)
        else:
            obj = rand_tm_field(m, rng, symbols=symbols)
        text = render(obj, "text")
        back = parse(f"m={m}; {decls}; {text}").result
        if isinstance(obj, Form) and obj.degree == 0:
            back = back if isinstance(back, Form) else Form.from_scalar(m, back)
            assert back == Form.from_scalar(m, obj.as_scalar())
        else:
            if obj.is_zero if hasattr(obj, "is_zero") else False:
                pass
            assert back == obj or (
                isinstance(obj, Form) and obj.is_zero and back.is_zero
            )
        count += 1
    ok = count == 200
    assert _report(7, ok, "(200 parse/render round trips)")
