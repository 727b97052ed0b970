"""Mechanical verification suite for the calculus identities.

Every identity the engine is supposed to satisfy is registered here once,
with an anchor string stating the equation, a deterministic random case
generator, a symbolic check (the ground truth) and a numeric re-check that
re-derives both sides with central differences at sampled points.  The
runner is seeded, so reports are reproducible; failures carry the exact
case seed and rendered inputs.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Optional

from . import numeric as nm
from .forms import (
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
from .lifts import (
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
from .operators import (
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
from .rand import (
    rand_affine_transition,
    rand_base_field,
    rand_base_form,
    rand_base_scalar,
    rand_closed_base_form,
    rand_endomorphism,
    rand_quadratic_transition,
    rand_semibasic_form,
    rand_tm_field,
    rand_tm_form,
    rand_tm_scalar,
)
from .scalar import FunctionSymbol, ScalarExpr, const, vvar, xvar
from .transitions import (
    check_consistency_identity,
    check_naturality,
    coframe_images,
    jacobian_determinant,
    transform,
    transform_base,
    volume_transform_coefficient,
)

SYMBOLS = (FunctionSymbol("f", "base"), FunctionSymbol("g", "base"))


@dataclass
class SuiteConfig:
    m_values: tuple = (1, 2, 3)
    cases: int = 25
    seed: int = 0
    filter: Optional[str] = None
    numeric: bool = False
    numeric_points: int = 5
    fd_step: float = 1e-4
    rel_tol: float = 1e-6


@dataclass
class IdentityRecord:
    id: str
    anchor: str
    cases: int
    passed: bool
    counterexample: Optional[dict]
    seed: str
    wall_time_s: float


@dataclass
class SuiteReport:
    records: list
    total: int
    failed: int

    def to_json_dict(self) -> dict:
        suite = []
        for r in self.records:
            entry = {
                "id": r.id,
                "anchor": r.anchor,
                "cases": r.cases,
                "passed": r.passed,
                "seed": r.seed,
            }
            if r.counterexample is not None:
                entry["counterexample"] = r.counterexample
            suite.append(entry)
        return {"suite": suite, "summary": {"total": self.total, "failed": self.failed}}

    def render_text(self) -> str:
        lines = []
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            lines.append(
                f"{status}  {r.id:32s} cases={r.cases:3d} "
                f"t={r.wall_time_s:6.2f}s  {r.anchor}"
            )
            if r.counterexample is not None:
                ce = r.counterexample
                lines.append(f"      counterexample seed={ce['seed']}")
                lines.append(f"      {ce['detail']}")
        lines.append(
            f"summary: {self.total - self.failed}/{self.total} identities passed"
        )
        return "\n".join(lines)


@dataclass
class Identity:
    id: str
    anchor: str
    gen: Callable
    check: Callable
    ncheck: Optional[Callable] = None
    min_m: int = 1


def _fail(name, lhs, rhs):
    return f"{name}: {lhs} != {rhs}"


def _nfail(name):
    return f"numeric: {name} outside tolerance"


def _points(m, rng, cfg, *objs, base_only=False):
    dens = nm.collect_denominators(*objs)
    return nm.sample_points(m, rng, cfg.numeric_points, dens, base_only=base_only)


def _inst(case_objs, m, rng):
    return nm.instantiate_symbols(case_objs, m, rng)


def _field_eval(X: VectorFieldTM, P, m):
    return [nm.eval_scalar(c, P, m) for c in X.components]


# ----------------------------------------------------------------------
# geometry-core identities
# ----------------------------------------------------------------------


def _make_geometry():
    ids = []

    def gen_dsq(m, rng):
        p = rng.randint(0, 2 * m - 1)
        return {"w": rand_tm_form(m, p, rng, symbols=SYMBOLS)}

    def chk_dsq(m, case):
        r = exterior_derivative(exterior_derivative(case["w"]))
        return None if r.is_zero else _fail("d(d(w))", r, "0")

    def nchk_dsq(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        ff = nm.nf_d(nm.nf_d(nm.form_fn(w), m, cfg.fd_step), m, cfg.fd_step)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(ff(P), {}, cfg.rel_tol):
                return _nfail("d(d(w)) = 0")
        return None

    ids.append(Identity("d-squared-zero", "d(d(w)) = 0", gen_dsq, chk_dsq, nchk_dsq))

    def gen_cartan(m, rng):
        p = rng.randint(0, 2 * m - 1)
        return {
            "X": rand_tm_field(m, rng),
            "w": rand_tm_form(m, p, rng, symbols=SYMBOLS),
        }

    def chk_cartan(m, case):
        X, w = case["X"], case["w"]
        lhs = lie_derivative_form(X, w)
        rhs = interior_product(X, exterior_derivative(w)) + exterior_derivative(
            interior_product(X, w)
        )
        return None if lhs == rhs else _fail("L_X w vs Cartan", lhs, rhs)

    def nchk_cartan(m, case, rng, cfg):
        X, w = _inst([case["X"], case["w"]], m, rng)
        sym = nm.form_fn(lie_derivative_form(X, w))
        num = nm.nf_lie(nm.field_fn(X), nm.form_fn(w), m, cfg.fd_step)
        for P in _points(m, rng, cfg, X, w):
            if not nm.forms_close(sym(P), num(P), cfg.rel_tol):
                return _nfail("Cartan formula")
        return None

    ids.append(
        Identity(
            "cartan-formula",
            "L_X w = i_X(d w) + d(i_X w)",
            gen_cartan,
            chk_cartan,
            nchk_cartan,
        )
    )

    def chk_lie_d(m, case):
        X, w = case["X"], case["w"]
        lhs = lie_derivative_form(X, exterior_derivative(w))
        rhs = exterior_derivative(lie_derivative_form(X, w))
        return None if lhs == rhs else _fail("[L_X, d] w", lhs, rhs)

    def nchk_lie_d(m, case, rng, cfg):
        X, w = _inst([case["X"], case["w"]], m, rng)
        rhs_sym = nm.form_fn(exterior_derivative(lie_derivative_form(X, w)))
        lhs_num = nm.nf_lie(
            nm.field_fn(X), nm.nf_d(nm.form_fn(w), m, cfg.fd_step), m, cfg.fd_step
        )
        for P in _points(m, rng, cfg, X, w):
            if not nm.forms_close(lhs_num(P), rhs_sym(P), cfg.rel_tol):
                return _nfail("L_X d = d L_X")
        return None

    ids.append(
        Identity(
            "lie-d-commute",
            "L_X(d w) = d(L_X w)",
            gen_cartan,
            chk_lie_d,
            nchk_lie_d,
        )
    )

    def gen_jacobi(m, rng):
        return {
            "X": rand_tm_field(m, rng),
            "Y": rand_tm_field(m, rng),
            "Z": rand_tm_field(m, rng),
        }

    def chk_jacobi(m, case):
        X, Y, Z = case["X"], case["Y"], case["Z"]
        r = (
            lie_bracket(lie_bracket(X, Y), Z)
            + lie_bracket(lie_bracket(Y, Z), X)
            + lie_bracket(lie_bracket(Z, X), Y)
        )
        return None if r.is_zero else _fail("Jacobi sum", r, "0")

    def nchk_jacobi(m, case, rng, cfg):
        X, Y, Z = _inst([case["X"], case["Y"], case["Z"]], m, rng)
        fx, fy, fz = nm.field_fn(X), nm.field_fn(Y), nm.field_fn(Z)
        h = cfg.fd_step
        for P in _points(m, rng, cfg, X, Y, Z):
            t1 = nm.nv_bracket(nm.nv_bracket(fx, fy, m, h), fz, m, h)(P)
            t2 = nm.nv_bracket(nm.nv_bracket(fy, fz, m, h), fx, m, h)(P)
            t3 = nm.nv_bracket(nm.nv_bracket(fz, fx, m, h), fy, m, h)(P)
            # the three terms cancel; measure the residual against them
            scale = max(
                [1.0] + [abs(v) for t in (t1, t2, t3) for v in t]
            )
            for a, b, c in zip(t1, t2, t3):
                if abs(a + b + c) > cfg.rel_tol * scale:
                    return _nfail("Jacobi identity")
        return None

    ids.append(
        Identity(
            "jacobi-bracket",
            "[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y] = 0",
            gen_jacobi,
            chk_jacobi,
            nchk_jacobi,
        )
    )

    def gen_shuffle(m, rng):
        pa = rng.randint(1, min(2, 2 * m - 1))
        pb = rng.randint(1, min(3 - pa, 2 * m - pa))
        fields = [rand_tm_field(m, rng) for _ in range(pa + pb)]
        return {
            "a": rand_tm_form(m, pa, rng),
            "b": rand_tm_form(m, pb, rng),
            "fields": fields,
        }

    def _shuffle_oracle(a, b, fields):
        p, q = a.degree, b.degree
        total = const(0)
        for S in combinations(range(p + q), p):
            rest = [i for i in range(p + q) if i not in S]
            perm = list(S) + rest
            sign = 1
            for i in range(len(perm)):
                for j in range(i + 1, len(perm)):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = evaluate_form(a, [fields[i] for i in S]) * evaluate_form(
                b, [fields[i] for i in rest]
            )
            total = total + (term if sign > 0 else -term)
        return total

    def chk_shuffle(m, case):
        a, b, fields = case["a"], case["b"], case["fields"]
        lhs = evaluate_form(wedge(a, b), fields)
        rhs = _shuffle_oracle(a, b, fields)
        return None if lhs == rhs else _fail("(a^b)(V..)", lhs, rhs)

    def nchk_shuffle(m, case, rng, cfg):
        a, b = case["a"], case["b"]
        fields = case["fields"]
        lhs = evaluate_form(wedge(a, b), fields)
        rhs = _shuffle_oracle(a, b, fields)
        for P in _points(m, rng, cfg, a, b, *fields):
            if not nm.close(
                nm.eval_scalar(lhs, P, m), nm.eval_scalar(rhs, P, m), cfg.rel_tol
            ):
                return _nfail("shuffle evaluation")
        return None

    ids.append(
        Identity(
            "wedge-eval-shuffle",
            "(a^b)(V_1..V_{p+q}) = signed shuffle sum of a,b evaluations",
            gen_shuffle,
            chk_shuffle,
            nchk_shuffle,
        )
    )

    def gen_comm(m, rng):
        pa = rng.randint(0, min(3, 2 * m))
        pb = rng.randint(0, min(3, 2 * m))
        return {
            "a": rand_tm_form(m, pa, rng, symbols=SYMBOLS),
            "b": rand_tm_form(m, pb, rng, symbols=SYMBOLS),
        }

    def chk_comm(m, case):
        a, b = case["a"], case["b"]
        lhs = wedge(a, b)
        rhs = wedge(b, a)
        if (a.degree * b.degree) % 2:
            rhs = -rhs
        return None if lhs == rhs else _fail("a^b vs signed b^a", lhs, rhs)

    def nchk_comm(m, case, rng, cfg):
        a, b = _inst([case["a"], case["b"]], m, rng)
        fa, fb = nm.form_fn(a), nm.form_fn(b)
        sign = -1.0 if (a.degree * b.degree) % 2 else 1.0
        lhs = nm.nf_wedge(fa, fb)
        rhs = nm.nf_scale(nm.nf_wedge(fb, fa), sign)
        for P in _points(m, rng, cfg, a, b):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("graded commutativity")
        return None

    ids.append(
        Identity(
            "wedge-graded-commutativity",
            "a^b = (-1)^{|a||b|} b^a",
            gen_comm,
            chk_comm,
            nchk_comm,
        )
    )

    def gen_lvv(m, rng):
        return {
            "W": rand_tm_field(m, rng),
            "K": rand_endomorphism(m, rng),
            "Y": rand_tm_field(m, rng),
        }

    def chk_lvv(m, case):
        W, K, Y = case["W"], case["K"], case["Y"]
        lhs = lie_derivative_vvform(W, K).apply([Y])
        rhs = lie_bracket(W, K.apply([Y])) - K.apply([lie_bracket(W, Y)])
        return None if lhs == rhs else _fail("(L_W K)(Y)", lhs, rhs)

    def nchk_lvv(m, case, rng, cfg):
        W, K, Y = _inst([case["W"], case["K"], case["Y"]], m, rng)
        lhs_sym = lie_derivative_vvform(W, K).apply([Y])
        wf, yf = nm.field_fn(W), nm.field_fn(Y)
        kf = nm.endo_fn(K)
        h = cfg.fd_step

        def k_of(vfn):
            def out(P):
                table = kf(P)
                v = vfn(P)
                res = [0.0] * (2 * m)
                for a in range(2 * m):
                    if v[a]:
                        for b in range(2 * m):
                            res[b] += v[a] * table[a][b]
                return res

            return out

        rhs = lambda P: [
            u - w
            for u, w in zip(
                nm.nv_bracket(wf, k_of(yf), m, h)(P),
                k_of(nm.nv_bracket(wf, yf, m, h))(P),
            )
        ]
        for P in _points(m, rng, cfg, W, K, Y):
            if not nm.vectors_close(_field_eval(lhs_sym, P, m), rhs(P), cfg.rel_tol):
                return _nfail("defining property of L_W on endomorphisms")
        return None

    ids.append(
        Identity(
            "endo-lie-defining",
            "(L_W K)(Y) = [W, K(Y)] - K([W, Y])",
            gen_lvv,
            chk_lvv,
            nchk_lvv,
        )
    )
    return ids


# ----------------------------------------------------------------------
# lift identities
# ----------------------------------------------------------------------


def _make_lifts():
    ids = []

    def gen_xy(m, rng):
        return {
            "X": rand_base_field(m, rng, symbols=SYMBOLS),
            "Y": rand_base_field(m, rng, symbols=SYMBOLS),
        }

    def chk_brackets(m, case):
        X, Y = case["X"], case["Y"]
        XtYt = lie_bracket(complete_lift_vector(X), complete_lift_vector(Y))
        lifted = complete_lift_vector(X.bracket(Y))
        if XtYt != lifted:
            return _fail("[clift X, clift Y]", XtYt, lifted)
        mixed = lie_bracket(complete_lift_vector(X), vertical_lift_vector(Y))
        vlifted = vertical_lift_vector(X.bracket(Y))
        if mixed != vlifted:
            return _fail("[clift X, vlift Y]", mixed, vlifted)
        vv = lie_bracket(vertical_lift_vector(X), vertical_lift_vector(Y))
        if not vv.is_zero:
            return _fail("[vlift X, vlift Y]", vv, "0")
        return None

    def nchk_brackets(m, case, rng, cfg):
        X, Y = _inst([case["X"], case["Y"]], m, rng)
        h = cfg.fd_step
        bx, by = nm.base_field_fn(X), nm.base_field_fn(Y)
        pairs = [
            (
                nm.nv_bracket(nm.nv_clift_vec(bx, m, h), nm.nv_clift_vec(by, m, h), m, h),
                nm.field_fn(complete_lift_vector(X.bracket(Y))),
            ),
            (
                nm.nv_bracket(nm.nv_clift_vec(bx, m, h), nm.nv_vlift_vec(by, m), m, h),
                nm.field_fn(vertical_lift_vector(X.bracket(Y))),
            ),
            (
                nm.nv_bracket(nm.nv_vlift_vec(bx, m), nm.nv_vlift_vec(by, m), m, h),
                lambda P: [0.0] * (2 * m),
            ),
        ]
        for P in _points(m, rng, cfg, X, Y):
            for lhs, rhs in pairs:
                if not nm.vectors_close(lhs(P), rhs(P), cfg.rel_tol):
                    return _nfail("lifted bracket table")
        return None

    ids.append(
        Identity(
            "bracket-lift-triple",
            "[clift X, clift Y] = clift [X,Y]; [clift X, vlift Y] = vlift [X,Y]; "
            "[vlift X, vlift Y] = 0",
            gen_xy,
            chk_brackets,
            nchk_brackets,
        )
    )

    def gen_baseform(m, rng):
        p = rng.randint(0, m)
        return {"a": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_clift_d(m, case):
        a = case["a"]
        lhs = complete_lift_form(a.d())
        rhs = exterior_derivative(complete_lift_form(a))
        return None if lhs == rhs else _fail("clift(d a) vs d(clift a)", lhs, rhs)

    def nchk_clift_d(m, case, rng, cfg):
        (a,) = _inst([case["a"]], m, rng)
        lhs = nm.nf_d(
            nm.nf_clift_form(nm.base_form_fn(a), m, cfg.fd_step), m, cfg.fd_step
        )
        rhs = nm.form_fn(complete_lift_form(a.d()))
        for P in _points(m, rng, cfg, a):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("clift commutes with d")
        return None

    ids.append(
        Identity(
            "clift-d-commute",
            "clift(d a) = d(clift a)",
            gen_baseform,
            chk_clift_d,
            nchk_clift_d,
        )
    )

    def gen_pair(m, rng):
        return {
            "a": rand_base_form(m, 1, rng, symbols=SYMBOLS),
            "X": rand_base_field(m, rng, symbols=SYMBOLS),
        }

    def chk_pairing(m, case):
        a, X = case["a"], case["X"]
        at = complete_lift_form(a)
        aX = a.apply([X])
        lhs1 = evaluate_form(at, [vertical_lift_vector(X)])
        if lhs1 != aX:
            return _fail("clift(a)(vlift X)", lhs1, aX)
        lhs2 = evaluate_form(pullback(a), [complete_lift_vector(X)])
        if lhs2 != aX:
            return _fail("pull(a)(clift X)", lhs2, aX)
        lhs3 = evaluate_form(at, [complete_lift_vector(X)])
        rhs3 = complete_lift_function(m, aX)
        if lhs3 != rhs3:
            return _fail("clift(a)(clift X)", lhs3, rhs3)
        return None

    def nchk_pairing(m, case, rng, cfg):
        a, X = _inst([case["a"], case["X"]], m, rng)
        aX = a.apply([X])
        lhs = nm.scalar_fn(evaluate_form(complete_lift_form(a), [complete_lift_vector(X)]), m)
        rhs = nm.nf_clift_fun(
            lambda x: nm.eval_scalar(aX, tuple(x) + (0.0,) * m, m), m, cfg.fd_step
        )
        for P in _points(m, rng, cfg, a, X):
            if not nm.close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("pairing table")
        return None

    ids.append(
        Identity(
            "clift-pairing-table",
            "clift(a)(vlift X) = pull(a(X)) = pull(a)(clift X); "
            "clift(a)(clift X) = clift(a(X))",
            gen_pair,
            chk_pairing,
            nchk_pairing,
        )
    )

    def gen_vert(m, rng):
        p = rng.randint(1, m)
        return {
            "a": rand_base_form(m, p, rng, symbols=SYMBOLS),
            "Y": rand_base_field(m, rng),
            "f": rand_base_scalar(m, rng, symbols=SYMBOLS),
        }

    def chk_vert(m, case):
        a, Y, f = case["a"], case["Y"], case["f"]
        r = interior_product(vertical_lift_vector(Y), pullback(a))
        if not r.is_zero:
            return _fail("i_{vlift Y} pull(a)", r, "0")
        df = vertical_lift_vector(Y).apply_to(f)
        if not df.is_zero:
            return _fail("(vlift Y)(pull f)", df, "0")
        return None

    def nchk_vert(m, case, rng, cfg):
        a, Y = _inst([case["a"], case["Y"]], m, rng)
        ff = nm.nf_ix(nm.field_fn(vertical_lift_vector(Y)), nm.form_fn(pullback(a)))
        for P in _points(m, rng, cfg, a, Y):
            if not nm.forms_close(ff(P), {}, cfg.rel_tol):
                return _nfail("pullback kills verticals")
        return None

    ids.append(
        Identity(
            "pullback-kills-vertical",
            "i_{vlift Y} pull(a) = 0 and (vlift Y)(pull f) = 0",
            gen_vert,
            chk_vert,
            nchk_vert,
        )
    )

    def gen_inj(m, rng):
        p = rng.randint(1, m)
        return {"a": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_inj(m, case):
        a = case["a"]
        got = reconstruct_from_complete_lift(complete_lift_form(a))
        return None if got == a else _fail("reconstruct(clift a)", got, a)

    def nchk_inj(m, case, rng, cfg):
        (a,) = _inst([case["a"]], m, rng)
        got = reconstruct_from_complete_lift(complete_lift_form(a))
        fa, fg = nm.base_form_fn(a), nm.base_form_fn(got)
        for P in _points(m, rng, cfg, a, base_only=True):
            if not nm.forms_close(fa(P), fg(P), cfg.rel_tol):
                return _nfail("injectivity reconstruction")
        return None

    ids.append(
        Identity(
            "clift-injective",
            "the dv block of clift(a) reconstructs a (so clift a = 0 => a = 0)",
            gen_inj,
            chk_inj,
            nchk_inj,
        )
    )

    def gen_w(m, rng):
        return {"W": rand_tm_field(m, rng)}

    def chk_mirror_struct(m, case):
        W = case["W"]
        B = mirror_map(m)
        if not B.apply([B.apply([W])]).is_zero:
            return _fail("B(B(W))", B.apply([B.apply([W])]), "0")
        for a in range(m):
            if B.apply([VectorFieldTM.frame(m, a)]) != VectorFieldTM.frame(m, m + a):
                return _fail("B(ddx)", a, "ddv")
            if not B.apply([VectorFieldTM.frame(m, m + a)]).is_zero:
                return _fail("B(ddv)", a, "0")
        vertical = VectorFieldTM(m, [const(0)] * m + list(W.components[m:]))
        if not B.apply([vertical]).is_zero:
            return _fail("B on vertical", B.apply([vertical]), "0")
        bw = B.apply([W])
        if not bw.is_vertical:
            return _fail("image of B vertical", bw, "vertical")
        return None

    def nchk_mirror_struct(m, case, rng, cfg):
        (W,) = _inst([case["W"]], m, rng)
        B = mirror_map(m)
        bbw = B.apply([B.apply([W])])
        for P in _points(m, rng, cfg, W):
            if not nm.vectors_close(_field_eval(bbw, P, m), [0.0] * (2 * m), cfg.rel_tol):
                return _nfail("B o B = 0")
        return None

    ids.append(
        Identity(
            "mirror-structure",
            "B o B = 0; B(ddx_a) = ddv_a; B(ddv_a) = 0; ker B = im B = verticals",
            gen_w,
            chk_mirror_struct,
            nchk_mirror_struct,
        )
    )

    def gen_basep(m, rng):
        p = rng.randint(1, m)
        return {"a": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_xi_pull(m, case):
        a = case["a"]
        xi = tautological_field(m)
        r1 = interior_product(xi, pullback(a))
        if not r1.is_zero:
            return _fail("i_xi pull(a)", r1, "0")
        r2 = lie_derivative_form(xi, pullback(a))
        if not r2.is_zero:
            return _fail("L_xi pull(a)", r2, "0")
        return None

    def nchk_xi_pull(m, case, rng, cfg):
        (a,) = _inst([case["a"]], m, rng)
        xi = nm.field_fn(tautological_field(m))
        num = nm.nf_lie(xi, nm.form_fn(pullback(a)), m, cfg.fd_step)
        for P in _points(m, rng, cfg, a):
            if not nm.forms_close(num(P), {}, cfg.rel_tol):
                return _nfail("L_xi pull(a) = 0")
        return None

    ids.append(
        Identity(
            "xi-kills-pullback",
            "i_xi pull(a) = 0 and L_xi pull(a) = 0",
            gen_basep,
            chk_xi_pull,
            nchk_xi_pull,
        )
    )

    def gen_basep0(m, rng):
        p = rng.randint(0, m)
        return {"a": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_xi_eigen(m, case):
        a = case["a"]
        at = complete_lift_form(a)
        r = lie_derivative_form(tautological_field(m), at)
        return None if r == at else _fail("L_xi clift(a)", r, at)

    def nchk_xi_eigen(m, case, rng, cfg):
        (a,) = _inst([case["a"]], m, rng)
        at = complete_lift_form(a)
        num = nm.nf_lie(
            nm.field_fn(tautological_field(m)), nm.form_fn(at), m, cfg.fd_step
        )
        sym = nm.form_fn(at)
        for P in _points(m, rng, cfg, a):
            if not nm.forms_close(num(P), sym(P), cfg.rel_tol):
                return _nfail("L_xi clift(a) = clift(a)")
        return None

    ids.append(
        Identity(
            "xi-clift-eigenform",
            "L_xi clift(a) = clift(a)",
            gen_basep0,
            chk_xi_eigen,
            nchk_xi_eigen,
        )
    )

    def gen_closed(m, rng):
        p = rng.randint(1, m)
        return {"w": rand_closed_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_witness(m, case):
        w = case["w"]
        wt = complete_lift_form(w)
        r = exterior_derivative(lifted_cohomology_witness(w))
        return None if r == wt else _fail("d(i_xi clift w)", r, wt)

    def nchk_witness(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        wit = lifted_cohomology_witness(w)
        lhs = nm.nf_d(nm.form_fn(wit), m, cfg.fd_step)
        rhs = nm.form_fn(complete_lift_form(w))
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("exactness witness")
        return None

    ids.append(
        Identity(
            "closed-lift-exactness",
            "d(i_xi clift(w)) = clift(w) for closed w",
            gen_closed,
            chk_witness,
            nchk_witness,
        )
    )

    def gen_basefield(m, rng):
        return {"X": rand_base_field(m, rng, symbols=SYMBOLS)}

    def chk_mirror_lie(m, case):
        X = case["X"]
        B = mirror_map(m)
        r1 = lie_derivative_vvform(tautological_field(m), B)
        if r1 != B.scale(const(-1)):
            return _fail("L_xi B", r1, "-B")
        r2 = lie_derivative_vvform(complete_lift_vector(X), B)
        if not r2.is_zero:
            return _fail("L_{clift X} B", r2, "0")
        r3 = lie_derivative_vvform(vertical_lift_vector(X), B)
        if not r3.is_zero:
            return _fail("L_{vlift X} B", r3, "0")
        return None

    def nchk_mirror_lie(m, case, rng, cfg):
        (X,) = _inst([case["X"]], m, rng)
        B = mirror_map(m)
        h = cfg.fd_step
        kf = nm.endo_fn(B)
        checks = [
            (nm.field_fn(tautological_field(m)), -1.0),
            (nm.field_fn(complete_lift_vector(X)), 0.0),
            (nm.field_fn(vertical_lift_vector(X)), 0.0),
        ]
        Y = rand_tm_field(m, rng)
        yf = nm.field_fn(Y)

        def k_of(vfn):
            def out(P):
                table = kf(P)
                v = vfn(P)
                res = [0.0] * (2 * m)
                for a in range(2 * m):
                    if v[a]:
                        for b in range(2 * m):
                            res[b] += v[a] * table[a][b]
                return res

            return out

        for P in _points(m, rng, cfg, X, Y):
            for wf, lam in checks:
                u = nm.nv_bracket(wf, k_of(yf), m, h)(P)
                w = k_of(nm.nv_bracket(wf, yf, m, h))(P)
                expect = [lam * c for c in k_of(yf)(P)]
                scale = max(
                    [1.0]
                    + [abs(v) for v in u]
                    + [abs(v) for v in w]
                    + [abs(v) for v in expect]
                )
                for uu, ww, ee in zip(u, w, expect):
                    if abs(uu - ww - ee) > cfg.rel_tol * scale:
                        return _nfail("Lie derivatives of B")
        return None

    ids.append(
        Identity(
            "mirror-lie-table",
            "L_xi B = -B; L_{clift X} B = 0; L_{vlift X} B = 0",
            gen_basefield,
            chk_mirror_lie,
            nchk_mirror_lie,
        )
    )

    def chk_b_clift(m, case):
        X = case["X"]
        lhs = mirror_map(m).apply([complete_lift_vector(X)])
        rhs = vertical_lift_vector(X)
        return None if lhs == rhs else _fail("B(clift X)", lhs, rhs)

    def nchk_b_clift(m, case, rng, cfg):
        (X,) = _inst([case["X"]], m, rng)
        lhs = mirror_map(m).apply([complete_lift_vector(X)])
        rhs = vertical_lift_vector(X)
        for P in _points(m, rng, cfg, X):
            if not nm.vectors_close(
                _field_eval(lhs, P, m), _field_eval(rhs, P, m), cfg.rel_tol
            ):
                return _nfail("B of complete lift")
        return None

    ids.append(
        Identity(
            "mirror-of-clift",
            "B(clift X) = vlift X",
            gen_basefield,
            chk_b_clift,
            nchk_b_clift,
        )
    )

    def gen_fg(m, rng):
        return {
            "f": rand_base_scalar(m, rng, symbols=SYMBOLS),
            "g": rand_base_scalar(m, rng, symbols=SYMBOLS),
        }

    def chk_fun_leibniz(m, case):
        f, g = case["f"], case["g"]
        lhs = complete_lift_function(m, f * g)
        rhs = complete_lift_function(m, f) * g + f * complete_lift_function(m, g)
        if lhs != rhs:
            return _fail("clift(fg)", lhs, rhs)
        if not complete_lift_function(m, const(Fraction(7, 3))).is_zero:
            return _fail("clift(const)", complete_lift_function(m, const(1)), "0")
        return None

    def nchk_fun_leibniz(m, case, rng, cfg):
        f, g = _inst([case["f"], case["g"]], m, rng)
        lhs_sym = nm.scalar_fn(complete_lift_function(m, f * g), m)
        fg = f * g
        h = cfg.fd_step

        def fg_at(x):
            return nm.eval_scalar(fg, tuple(x) + (0.0,) * m, m)

        for P in _points(m, rng, cfg, f, g):
            x = P[:m]
            total = 0.0
            scale = 1.0
            for j in range(m):
                der = nm.central_diff(fg_at, x, j, h)
                total += P[m + j] * der
                scale = max(scale, abs(P[m + j] * der))
            if abs(lhs_sym(P) - total) > cfg.rel_tol * max(scale, abs(lhs_sym(P))):
                return _nfail("function Leibniz rule")
        return None

    ids.append(
        Identity(
            "clift-function-leibniz",
            "clift(f g) = clift(f) g + f clift(g); clift(const) = 0",
            gen_fg,
            chk_fun_leibniz,
            nchk_fun_leibniz,
        )
    )

    def gen_module(m, rng):
        return {
            "f": rand_base_scalar(m, rng, symbols=SYMBOLS),
            "X": rand_base_field(m, rng),
            "a": rand_base_form(m, rng.randint(1, m), rng),
        }

    def chk_module(m, case):
        f, X, a = case["f"], case["X"], case["a"]
        lhs = complete_lift_vector(X.scale(f))
        rhs = complete_lift_vector(X).scale(f) + vertical_lift_vector(X).scale(
            complete_lift_function(m, f)
        )
        if lhs != rhs:
            return _fail("clift(fX)", lhs, rhs)
        lhs2 = complete_lift_vector(X).apply_to(f)
        rhs2 = X.apply_to(f)
        if lhs2 != rhs2:
            return _fail("clift(X)(pull f)", lhs2, rhs2)
        lhs3 = complete_lift_vector(X).apply_to(complete_lift_function(m, f))
        rhs3 = complete_lift_function(m, X.apply_to(f))
        if lhs3 != rhs3:
            return _fail("clift(X)(clift f)", lhs3, rhs3)
        lhs4 = complete_lift_form(a.scale(f))
        rhs4 = pullback(a).scale(complete_lift_function(m, f)) + complete_lift_form(
            a
        ).scale(f)
        if lhs4 != rhs4:
            return _fail("clift(f a)", lhs4, rhs4)
        return None

    def nchk_module(m, case, rng, cfg):
        f, X = _inst([case["f"], case["X"]], m, rng)
        lhs = nm.scalar_fn(complete_lift_vector(X).apply_to(f), m)
        xf_val = X.apply_to(f)
        rhs = nm.scalar_fn(xf_val, m)
        for P in _points(m, rng, cfg, f, X):
            if not nm.close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("module rules")
        return None

    ids.append(
        Identity(
            "clift-module-rules",
            "clift(fX) = f clift(X) + clift(f) vlift(X); clift(X) pull(f) = "
            "pull(Xf); clift(X) clift(f) = clift(Xf); clift(f a) = clift(f) "
            "pull(a) + f clift(a)",
            gen_module,
            chk_module,
            nchk_module,
        )
    )

    def chk_tensor(m, case):
        X, Y = case["X"], case["Y"]
        lhs = lift_tensor([X, Y], [], "complete")
        rhs = tensor_product_tm(
            [complete_lift_vector(X), vertical_lift_vector(Y)]
        ) + tensor_product_tm([vertical_lift_vector(X), complete_lift_vector(Y)])
        if lhs != rhs:
            return _fail("clift(X (x) Y)", "components", "product rule")
        total = None
        for vec, form in base_identity_components(m):
            t = lift_tensor([vec], [form], "complete")
            total = t if total is None else total + t
        if total.to_endomorphism() != identity_endomorphism(m):
            return _fail("clift(1_M)", total, "1_TM")
        return None

    def nchk_tensor(m, case, rng, cfg):
        X, Y = _inst([case["X"], case["Y"]], m, rng)
        lhs = lift_tensor([X, Y], [], "complete")
        rhs = tensor_product_tm(
            [complete_lift_vector(X), vertical_lift_vector(Y)]
        ) + tensor_product_tm([vertical_lift_vector(X), complete_lift_vector(Y)])
        keys = set(lhs.components) | set(rhs.components)
        for P in _points(m, rng, cfg, X, Y):
            for k in keys:
                a = lhs.components.get(k)
                b = rhs.components.get(k)
                av = nm.eval_scalar(a, P, m) if a is not None else 0.0
                bv = nm.eval_scalar(b, P, m) if b is not None else 0.0
                if not nm.close(av, bv, cfg.rel_tol):
                    return _nfail("tensor product rule")
        return None

    ids.append(
        Identity(
            "tensor-lift-rules",
            "clift(X (x) Y) = clift X (x) vlift Y + vlift X (x) clift Y; "
            "clift(1_M) = 1_TM",
            gen_xy,
            chk_tensor,
            nchk_tensor,
        )
    )

    def gen_spray(m, rng):
        vert = [rand_tm_scalar(m, rng) for _ in range(m)]
        S = VectorFieldTM(m, [vvar(i + 1) for i in range(m)] + vert)
        return {"S": S, "X": rand_base_field(m, rng)}

    def chk_spray(m, case):
        S, X = case["S"], case["X"]
        if not is_spray(S):
            return _fail("is_spray(flat spray + vertical)", False, True)
        if is_spray(tautological_field(m)):
            return _fail("is_spray(xi)", True, False)
        lam = is_lambda_mirror(tautological_field(m))
        if lam != const(-1):
            return _fail("lambda(xi)", lam, "-1")
        lam2 = is_lambda_mirror(complete_lift_vector(X))
        if lam2 != const(0):
            return _fail("lambda(clift X)", lam2, "0")
        lam3 = is_lambda_mirror(vertical_lift_vector(X))
        if lam3 != const(0):
            return _fail("lambda(vlift X)", lam3, "0")
        if m >= 2:
            W = VectorFieldTM(
                m, [xvar(1)] + [const(0)] * (2 * m - 1)
            )
            if is_lambda_mirror(W) is not None:
                return _fail("lambda(x1 ddx1), m>=2", is_lambda_mirror(W), "absent")
        else:
            W = VectorFieldTM(1, [vvar(1), const(0)])
            if is_lambda_mirror(W) is not None:
                return _fail("lambda(v1 ddx1), m=1", is_lambda_mirror(W), "absent")
        return None

    def nchk_spray(m, case, rng, cfg):
        S = case["S"]
        B = mirror_map(m)
        bs = B.apply([S])
        xi = tautological_field(m)
        for P in _points(m, rng, cfg, S):
            if not nm.vectors_close(
                _field_eval(bs, P, m), _field_eval(xi, P, m), cfg.rel_tol
            ):
                return _nfail("spray condition B(S) = xi")
        return None

    ids.append(
        Identity(
            "spray-and-mirror-fields",
            "B(S) = xi detects sprays; lambda(xi) = -1, lambda(clift X) = "
            "lambda(vlift X) = 0, generic fields are not lambda-mirror",
            gen_spray,
            chk_spray,
            nchk_spray,
        )
    )
    return ids


# ----------------------------------------------------------------------
# operator identities
# ----------------------------------------------------------------------


def _make_operators():
    ids = []

    def gen_tmform(m, rng):
        p = rng.randint(0, 2 * m - 1)
        return {"w": rand_tm_form(m, p, rng, symbols=SYMBOLS)}

    def chk_dbsq(m, case):
        r = d_B(d_B(case["w"]))
        return None if r.is_zero else _fail("d_B d_B w", r, "0")

    def nchk_dbsq(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        ff = nm.nf_db(nm.nf_db(nm.form_fn(w), m, cfg.fd_step), m, cfg.fd_step)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(ff(P), {}, cfg.rel_tol):
                return _nfail("d_B squared")
        return None

    ids.append(
        Identity("db-squared-zero", "d_B(d_B w) = 0", gen_tmform, chk_dbsq, nchk_dbsq)
    )

    def chk_anti(m, case):
        w = case["w"]
        lhs = exterior_derivative(d_B(w))
        rhs = -d_B(exterior_derivative(w))
        return None if lhs == rhs else _fail("d d_B w vs -d_B d w", lhs, rhs)

    def nchk_anti(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        h = cfg.fd_step
        ff = nm.form_fn(w)
        lhs = nm.nf_d(nm.nf_db(ff, m, h), m, h)
        rhs = nm.nf_scale(nm.nf_db(nm.nf_d(ff, m, h), m, h), -1.0)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("anticommutation of d and d_B")
        return None

    ids.append(
        Identity(
            "d-db-anticommute",
            "d(d_B w) = -d_B(d w)",
            gen_tmform,
            chk_anti,
            nchk_anti,
        )
    )

    def gen_ik(m, rng):
        pa = rng.randint(1, min(2, 2 * m))
        pb = rng.randint(0, min(2, 2 * m - pa))
        return {
            "K": rand_endomorphism(m, rng),
            "a": rand_tm_form(m, pa, rng),
            "b": rand_tm_form(m, pb, rng),
        }

    def chk_ik(m, case):
        K, a, b = case["K"], case["a"], case["b"]
        lhs = insertion_derivation(K, wedge(a, b))
        rhs = wedge(insertion_derivation(K, a), b) + wedge(
            a, insertion_derivation(K, b)
        )
        if lhs != rhs:
            return _fail("i_K Leibniz", lhs, rhs)
        w = wedge(a, b) if not wedge(a, b).is_zero else a
        p = w.degree
        if p >= 1:
            one = identity_endomorphism(m)
            rhs2 = circ_wedge(w, [K] + [one] * (p - 1)).scale(
                Fraction(1, math.factorial(p - 1))
            )
            if insertion_derivation(K, w) != rhs2:
                return _fail("i_K vs circ-wedge", insertion_derivation(K, w), rhs2)
        return None

    def nchk_ik(m, case, rng, cfg):
        K, a, b = _inst([case["K"], case["a"], case["b"]], m, rng)
        kf = nm.endo_fn(K)
        lhs = nm.nf_ik(kf, nm.nf_wedge(nm.form_fn(a), nm.form_fn(b)), m)
        rhs = nm.nf_add(
            nm.nf_wedge(nm.nf_ik(kf, nm.form_fn(a), m), nm.form_fn(b)),
            nm.nf_wedge(nm.form_fn(a), nm.nf_ik(kf, nm.form_fn(b), m)),
        )
        for P in _points(m, rng, cfg, K, a, b):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("insertion derivation")
        return None

    ids.append(
        Identity(
            "insertion-derivation",
            "i_K(a^b) = i_K(a)^b + a^i_K(b); i_K w = (w o (K^1^..^1))/(p-1)!",
            gen_ik,
            chk_ik,
            nchk_ik,
        )
    )

    def gen_pform(m, rng):
        p = rng.randint(1, 2 * m)
        return {"w": rand_tm_form(m, p, rng, symbols=SYMBOLS)}

    def chk_one(m, case):
        w = case["w"]
        one = identity_endomorphism(m)
        r = insertion_derivation(one, w)
        if r != w.scale(w.degree):
            return _fail("i_1 w", r, f"{w.degree} w")
        if lie_derivation(one, w) != exterior_derivative(w):
            return _fail("L_1 w", lie_derivation(one, w), "d w")
        return None

    def nchk_one(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        one = identity_endomorphism(m)
        sym = nm.form_fn(lie_derivation(one, w))
        num = nm.nf_d(nm.form_fn(w), m, cfg.fd_step)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(sym(P), num(P), cfg.rel_tol):
                return _nfail("identity endomorphism derivations")
        return None

    ids.append(
        Identity(
            "identity-endo-derivations",
            "i_1 w = p w and L_1 w = d w",
            gen_pform,
            chk_one,
            nchk_one,
        )
    )

    def gen_collapse(m, rng):
        p = rng.randint(1, min(3, m))
        return {"g": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_collapse(m, case):
        g = case["g"]
        p = g.degree
        gt = complete_lift_form(g)
        B = mirror_map(m)
        one = identity_endomorphism(m)
        for i in range(p + 1):
            got = circ_wedge(gt, [B] * i + [one] * (p - i)).scale(
                Fraction(1, math.factorial(p))
            )
            if i == 0:
                want = gt
            elif i == 1:
                want = pullback(g)
            else:
                want = Form.zero(m, p)
            if got != want:
                return _fail(f"collapse i={i}", got, want)
        return None

    def nchk_collapse(m, case, rng, cfg):
        (g,) = _inst([case["g"]], m, rng)
        p = g.degree
        gt = complete_lift_form(g)
        B = mirror_map(m)
        one = identity_endomorphism(m)
        got = circ_wedge(gt, [B] + [one] * (p - 1)).scale(
            Fraction(1, math.factorial(p))
        )
        fa, fb = nm.form_fn(got), nm.form_fn(pullback(g))
        for P in _points(m, rng, cfg, g):
            if not nm.forms_close(fa(P), fb(P), cfg.rel_tol):
                return _nfail("collapse table")
        return None

    ids.append(
        Identity(
            "circ-wedge-collapse",
            "clift(g) o (B^i ^ 1^{p-i}) / p! = clift(g), pull(g), 0 for i = 0, 1, >=2",
            gen_collapse,
            chk_collapse,
            nchk_collapse,
        )
    )

    def gen_fn(m, rng):
        return {
            "K": rand_endomorphism(m, rng),
            "X": rand_tm_field(m, rng),
            "Y": rand_tm_field(m, rng),
        }

    def _fn_formula(K, X, Y):
        KX = K.apply([X])
        KY = K.apply([Y])
        half = lie_bracket(KX, KY)
        half = half - K.apply([lie_bracket(KX, Y)])
        half = half - K.apply([lie_bracket(X, KY)])
        half = half + K.apply([K.apply([lie_bracket(X, Y)])])
        return half + half

    def chk_fn(m, case):
        K, X, Y = case["K"], case["X"], case["Y"]
        B = mirror_map(m)
        if not fn_self_bracket(B).is_zero:
            return _fail("[B,B]", fn_self_bracket(B), "0")
        if not fn_self_bracket(identity_endomorphism(m)).is_zero:
            return _fail("[1,1]", fn_self_bracket(identity_endomorphism(m)), "0")
        stored = fn_self_bracket(K).apply([X, Y])
        direct = _fn_formula(K, X, Y)
        return None if stored == direct else _fail("[K,K](X,Y)", stored, direct)

    def nchk_fn(m, case, rng, cfg):
        K, X, Y = _inst([case["K"], case["X"], case["Y"]], m, rng)
        stored = fn_self_bracket(K).apply([X, Y])
        direct = _fn_formula(K, X, Y)
        for P in _points(m, rng, cfg, K, X, Y):
            if not nm.vectors_close(
                _field_eval(stored, P, m), _field_eval(direct, P, m), cfg.rel_tol
            ):
                return _nfail("self-bracket tensoriality")
        return None

    ids.append(
        Identity(
            "fn-self-bracket",
            "[B,B] = 0; [1,1] = 0; [K,K](X,Y) matches "
            "2([KX,KY] - K[KX,Y] - K[X,KY] + K^2[X,Y])",
            gen_fn,
            chk_fn,
            nchk_fn,
        )
    )

    def gen_lk(m, rng):
        p = rng.randint(0, 2 * m - 1)
        return {
            "K": rand_endomorphism(m, rng),
            "w": rand_tm_form(m, p, rng),
        }

    def chk_lk(m, case):
        # degree-1 K makes L_K an odd derivation: the graded commutator
        # [L_K, d] = L_K d + d L_K is the vanishing one
        K, w = case["K"], case["w"]
        lhs = lie_derivation(K, exterior_derivative(w))
        rhs = -exterior_derivative(lie_derivation(K, w))
        return None if lhs == rhs else _fail("graded [L_K, d] w", lhs, rhs)

    def nchk_lk(m, case, rng, cfg):
        K, w = _inst([case["K"], case["w"]], m, rng)
        h = cfg.fd_step
        kf = nm.endo_fn(K)
        ff = nm.form_fn(w)

        def nlk(g):
            return nm.nf_sub(nm.nf_ik(kf, nm.nf_d(g, m, h), m), nm.nf_d(nm.nf_ik(kf, g, m), m, h))

        lhs = nlk(nm.nf_d(ff, m, h))
        rhs = nm.nf_scale(nm.nf_d(nlk(ff), m, h), -1.0)
        for P in _points(m, rng, cfg, K, w):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("graded [L_K, d] = 0")
        return None

    ids.append(
        Identity(
            "lie-derivation-d-commute",
            "L_K(d w) = -d(L_K w) for degree-1 K: the graded commutator "
            "[L_K, d] vanishes, so [1,K] acts trivially",
            gen_lk,
            chk_lk,
            nchk_lk,
        )
    )

    def gen_basew(m, rng):
        p = rng.randint(1, m)
        return {"w": rand_base_form(m, p, rng, symbols=SYMBOLS)}

    def chk_db_pull(m, case):
        r = d_B(pullback(case["w"]))
        return None if r.is_zero else _fail("d_B pull(w)", r, "0")

    def nchk_db_pull(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        ff = nm.nf_db(nm.form_fn(pullback(w)), m, cfg.fd_step)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(ff(P), {}, cfg.rel_tol):
                return _nfail("pullbacks are d_B-closed")
        return None

    ids.append(
        Identity(
            "db-pullback-closed",
            "d_B(pull w) = 0",
            gen_basew,
            chk_db_pull,
            nchk_db_pull,
        )
    )

    def chk_db_clift(m, case):
        w = case["w"]
        lhs = d_B(complete_lift_form(w))
        rhs = exterior_derivative(pullback(w))
        return None if lhs == rhs else _fail("d_B clift(w)", lhs, rhs)

    def nchk_db_clift(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        h = cfg.fd_step
        lhs = nm.nf_db(nm.form_fn(complete_lift_form(w)), m, h)
        rhs = nm.nf_d(nm.form_fn(pullback(w)), m, h)
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("d_B of complete lift")
        return None

    ids.append(
        Identity(
            "db-of-clift",
            "d_B(clift w) = d(pull w)",
            gen_basew,
            chk_db_clift,
            nchk_db_clift,
        )
    )

    def chk_db_xi(m, case):
        w = case["w"]
        p = w.degree
        lhs = d_B(interior_product(tautological_field(m), complete_lift_form(w)))
        rhs = pullback(w).scale(p)
        return None if lhs == rhs else _fail("d_B(i_xi clift w)", lhs, rhs)

    def nchk_db_xi(m, case, rng, cfg):
        (w,) = _inst([case["w"]], m, rng)
        contr = interior_product(tautological_field(m), complete_lift_form(w))
        lhs = nm.nf_db(nm.form_fn(contr), m, cfg.fd_step)
        rhs = nm.nf_scale(nm.form_fn(pullback(w)), float(w.degree))
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("d_B of xi contraction")
        return None

    ids.append(
        Identity(
            "db-xi-contraction",
            "d_B(i_xi clift(w)) = p pull(w) for a base p-form "
            "(pullbacks die in d_B-cohomology)",
            gen_basew,
            chk_db_xi,
            nchk_db_xi,
        )
    )

    def gen_poincare(m, rng):
        p = rng.randint(0, min(2, m - 1) if m > 1 else 0)
        tau = rand_semibasic_form(m, p, rng)
        w = d_B(tau)
        if w.is_zero:
            w = d_B(Form.from_scalar(m, vvar(1) * vvar(1)))
        return {"w": w}

    def chk_poincare(m, case):
        w = case["w"]
        alpha = db_poincare(w)
        if semi_basic_defect(alpha, 0) is not None:
            return _fail("primitive semi-basic", alpha, "semi-basic")
        r = d_B(alpha)
        return None if r == w else _fail("d_B(primitive)", r, w)

    def nchk_poincare(m, case, rng, cfg):
        w = case["w"]
        alpha = db_poincare(w)
        lhs = nm.nf_db(nm.form_fn(alpha), m, cfg.fd_step)
        rhs = nm.form_fn(w)
        for P in _points(m, rng, cfg, w, alpha):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("Poincare round trip")
        return None

    ids.append(
        Identity(
            "db-poincare-roundtrip",
            "d_B(db_poincare(w)) = w for semi-basic d_B-exact w",
            gen_poincare,
            chk_poincare,
            nchk_poincare,
        )
    )

    def gen_theta(m, rng):
        mu = rand_base_form(m, 1, rng)
        c = rand_base_scalar(m, rng)
        gamma = rand_closed_base_form(m, 1, rng)
        return {"mu": mu, "c": c, "gamma": gamma}

    def chk_theta(m, case):
        mu, c, gamma = case["mu"], case["c"], case["gamma"]
        f = make_f_mu(mu, c)
        df = exterior_derivative(Form.from_scalar(m, f))
        got = theta(AlphaMuForm(df, mu))
        dc = BaseForm.from_scalar(m, c).d()
        if got != dc:
            return _fail("theta(d f_mu)", got, dc)
        got2 = theta(AlphaMuForm(pullback(gamma), BaseForm.zero(m, 1)))
        if got2 != gamma:
            return _fail("theta(pull gamma)", got2, gamma)
        alpha = df + pullback(gamma)
        got3 = theta(AlphaMuForm(alpha, mu))
        want3 = dc + gamma
        if got3 != want3:
            return _fail("theta(d f_mu + pull gamma)", got3, want3)
        if not got3.d().is_zero:
            return _fail("d theta(..)", got3.d(), "0")
        return None

    def nchk_theta(m, case, rng, cfg):
        mu, c, gamma = case["mu"], case["c"], case["gamma"]
        f = make_f_mu(mu, c)
        df = exterior_derivative(Form.from_scalar(m, f))
        alpha = df + pullback(gamma)
        got = theta(AlphaMuForm(alpha, mu))
        want = BaseForm.from_scalar(m, c).d() + gamma
        fa, fb = nm.base_form_fn(got), nm.base_form_fn(want)
        for P in _points(m, rng, cfg, got, want, base_only=True):
            if not nm.forms_close(fa(P), fb(P), cfg.rel_tol):
                return _nfail("theta on cohomology")
        return None

    ids.append(
        Identity(
            "theta-first-cohomology",
            "theta(d f_mu) = d c; theta(pull gamma) = gamma; theta is additive "
            "and lands in closed base forms",
            gen_theta,
            chk_theta,
            nchk_theta,
        )
    )

    def gen_dmap(m, rng):
        p = rng.randint(1, m)
        c = Fraction(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 2]))
        return {"a": rand_base_form(m, p - 1, rng, symbols=SYMBOLS), "c": c}

    def chk_dmap(m, case):
        a, c = case["a"], case["c"]
        at = complete_lift_form(a)
        prim = at.scale(const(1) / const(c)) - pullback(a).scale(
            const(1) / const(c * c)
        )
        D = DOperator(c, Fraction(1))
        lhs = apply_D(D, prim)
        rhs = complete_lift_form(a.d())
        return None if lhs == rhs else _fail("D(primitive)", lhs, rhs)

    def nchk_dmap(m, case, rng, cfg):
        (a,) = _inst([case["a"]], m, rng)
        c = case["c"]
        at = complete_lift_form(a)
        prim = at.scale(const(1) / const(c)) - pullback(a).scale(
            const(1) / const(c * c)
        )
        h = cfg.fd_step
        pf = nm.form_fn(prim)
        lhs = nm.nf_add(
            nm.nf_scale(nm.nf_d(pf, m, h), float(c)), nm.nf_db(pf, m, h)
        )
        rhs = nm.form_fn(complete_lift_form(a.d()))
        for P in _points(m, rng, cfg, a, prim):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("D-map primitive")
        return None

    ids.append(
        Identity(
            "dmap-lift-wellposed",
            "(c d + d_B)((1/c) clift(a) - (1/c^2) pull(a)) = clift(d a), c != 0",
            gen_dmap,
            chk_dmap,
            nchk_dmap,
        )
    )

    def gen_bott(m, rng):
        q = rng.randint(1, m)
        return {"b": rand_base_form(m, q, rng, symbols=SYMBOLS)}

    def chk_bott(m, case):
        b = case["b"]
        q = b.degree
        lhs = exterior_derivative(
            d_B(interior_product(tautological_field(m), complete_lift_form(b)))
        )
        rhs = pullback(b.d()).scale(q)
        return None if lhs == rhs else _fail("d d_B(i_xi clift b)", lhs, rhs)

    def nchk_bott(m, case, rng, cfg):
        (b,) = _inst([case["b"]], m, rng)
        q = b.degree
        h = cfg.fd_step
        contr = interior_product(tautological_field(m), complete_lift_form(b))
        lhs = nm.nf_d(nm.nf_db(nm.form_fn(contr), m, h), m, h)
        rhs = nm.nf_scale(nm.form_fn(pullback(b.d())), float(q))
        for P in _points(m, rng, cfg, b):
            if not nm.forms_close(lhs(P), rhs(P), cfg.rel_tol):
                return _nfail("pullbacks of exact forms are d d_B exact")
        return None

    ids.append(
        Identity(
            "bott-chern-exactness",
            "d(d_B(i_xi clift(b))) = q pull(d b) for a base q-form b",
            gen_bott,
            chk_bott,
            nchk_bott,
        )
    )

    def gen_dsq_nonconst(m, rng):
        return {}

    def _nonconst_square(m):
        # designed witness per dimension: multiplying d_B by a coordinate
        # function breaks the coboundary property
        if m == 1:
            eps = vvar(1)
            target = Form.from_scalar(m, vvar(1))
            predicted = Form(1, 2, {(0, 1): const(-1)})
        else:
            eps = xvar(1)
            target = Form.from_scalar(m, vvar(2))
            predicted = Form(m, 2, {(0, 1): const(1)})
        Dw = lambda u: exterior_derivative(u) + d_B(u).scale(eps)
        return Dw(Dw(target)), predicted

    def chk_dsq_nonconst(m, case):
        got, predicted = _nonconst_square(m)
        if got.is_zero:
            return _fail("(d + eps d_B)^2 target", got, "nonzero")
        if got != predicted:
            return _fail("(d + eps d_B)^2 target", got, predicted)
        return None

    def nchk_dsq_nonconst(m, case, rng, cfg):
        got, predicted = _nonconst_square(m)
        fg, fp = nm.form_fn(got), nm.form_fn(predicted)
        for P in _points(m, rng, cfg, got):
            vals = fg(P)
            if not nm.forms_close(vals, fp(P), cfg.rel_tol):
                return _nfail("designed failure value")
            if all(abs(v) <= cfg.rel_tol for v in vals.values()):
                return _nfail("designed failure should be nonzero")
        return None

    ids.append(
        Identity(
            "D-squared-nonconstant",
            "with a non-constant coefficient, (d + eps d_B)^2 != 0 "
            "(m=1: eps=v1 on v1; m>=2: eps=x1 on v2)",
            gen_dsq_nonconst,
            chk_dsq_nonconst,
            nchk_dsq_nonconst,
        )
    )

    def gen_dd(m, rng):
        p = rng.randint(0, 2 * m - 1)
        c1 = Fraction(rng.randint(-3, 3), rng.choice([1, 2, 3]))
        c2 = Fraction(rng.randint(-3, 3), rng.choice([1, 2, 3]))
        return {"w": rand_tm_form(m, p, rng), "c1": c1, "c2": c2}

    def chk_dd(m, case):
        D = DOperator(case["c1"], case["c2"])
        r = apply_D(D, apply_D(D, case["w"]))
        return None if r.is_zero else _fail("D(D(w))", r, "0")

    def nchk_dd(m, case, rng, cfg):
        w = case["w"]
        c1, c2 = float(case["c1"]), float(case["c2"])
        h = cfg.fd_step

        def nD(g):
            return nm.nf_add(
                nm.nf_scale(nm.nf_d(g, m, h), c1), nm.nf_scale(nm.nf_db(g, m, h), c2)
            )

        ff = nD(nD(nm.form_fn(w)))
        for P in _points(m, rng, cfg, w):
            if not nm.forms_close(ff(P), {}, cfg.rel_tol):
                return _nfail("constant-coefficient D squares to zero")
        return None

    ids.append(
        Identity(
            "D-squared-constant",
            "(c1 d + c2 d_B)^2 = 0 for rational constants",
            gen_dd,
            chk_dd,
            nchk_dd,
        )
    )

    def gen_fmu(m, rng):
        mu = rand_base_form(m, 1, rng)
        c = rand_base_scalar(m, rng)
        gamma = rand_base_form(m, rng.randint(1, m), rng)
        return {"mu": mu, "c": c, "gamma": gamma}

    def chk_fmu(m, case):
        mu, c, gamma = case["mu"], case["c"], case["gamma"]
        f = make_f_mu(mu, c)
        df = exterior_derivative(Form.from_scalar(m, f))
        composed = circ_wedge(df, [mirror_map(m)])
        if composed != pullback(mu):
            return _fail("d(f_mu) o B", composed, pullback(mu))
        detected = is_fiber_affine(f, m)
        if detected is None or detected[0] != mu or detected[1] != c:
            return _fail("is_fiber_affine(f_mu)", detected, (mu, c))
        if is_fiber_affine(f + vvar(1) * vvar(1), m) is not None:
            return _fail("is_fiber_affine(quadratic)", "found", "absent")
        lifted = complete_lift_form(mu)
        if extract_mu(lifted) != mu:
            return _fail("extract_mu(clift mu)", extract_mu(lifted), mu)
        if extract_mu(pullback(gamma)) != BaseForm.zero(m, gamma.degree):
            return _fail("extract_mu(pull gamma)", extract_mu(pullback(gamma)), "0")
        if m >= 2:
            bad = Form(m, 2, {(m, m + 1): vvar(1)})
            if extract_mu(bad) is not None:
                return _fail("extract_mu(v1 dv1^dv2)", extract_mu(bad), "absent")
        return None

    def nchk_fmu(m, case, rng, cfg):
        mu, c = case["mu"], case["c"]
        f = make_f_mu(mu, c)
        df = exterior_derivative(Form.from_scalar(m, f))
        composed = circ_wedge(df, [mirror_map(m)])
        fa, fb = nm.form_fn(composed), nm.form_fn(pullback(mu))
        for P in _points(m, rng, cfg, mu, c):
            if not nm.forms_close(fa(P), fb(P), cfg.rel_tol):
                return _nfail("fiber-affine function family")
        return None

    ids.append(
        Identity(
            "fiber-affine-family",
            "d(f_mu) o B = pull(mu); is_fiber_affine inverts make_f_mu; "
            "extract_mu(clift mu) = mu and extract_mu(pull gamma) = 0",
            gen_fmu,
            chk_fmu,
            nchk_fmu,
        )
    )

    def gen_sb(m, rng):
        p = rng.randint(1, m)
        return {
            "w": rand_base_form(m, p, rng),
            "tau": rand_semibasic_form(m, rng.randint(0, m - 1) if m > 1 else 0, rng),
        }

    def chk_sb(m, case):
        w, tau = case["w"], case["tau"]
        if semi_basic_defect(pullback(w), 0) is not None:
            return _fail("pull(w) semi-basic", semi_basic_defect(pullback(w), 0), "none")
        wt = complete_lift_form(w)
        if semi_basic_defect(wt, 1) is not None:
            return _fail("clift(w) 1-semi-basic", semi_basic_defect(wt, 1), "none")
        if not wt.is_zero and semi_basic_defect(wt, 0) is None:
            return _fail("clift(w) has a fiber index", "none", "witness")
        dv1 = Form.coframe(m, m)
        if semi_basic_defect(dv1, 0) != (f"dv1",):
            return _fail("defect(dv1)", semi_basic_defect(dv1, 0), "('dv1',)")
        if semi_basic_defect(d_B(tau), 0) is not None:
            return _fail("d_B preserves semi-basic", semi_basic_defect(d_B(tau), 0), "none")
        return None

    def nchk_sb(m, case, rng, cfg):
        w = case["w"]
        wt = complete_lift_form(w)
        if wt.is_zero:
            return None
        witness = semi_basic_defect(wt, 0)
        if witness is None:
            return None
        labels = {f"dx{i+1}": i for i in range(m)}
        labels.update({f"dv{i+1}": m + i for i in range(m)})
        idx = tuple(sorted(labels[t] for t in witness))
        coef = wt.terms.get(idx)
        if coef is None:
            return _nfail("witness names a present index")
        for P in _points(m, rng, cfg, wt):
            if abs(nm.eval_scalar(coef, P, m)) > cfg.rel_tol:
                return None
        return _nfail("witness coefficient is actually nonzero")

    ids.append(
        Identity(
            "semi-basic-grading",
            "pullbacks are semi-basic; complete lifts are exactly 1-semi-basic; "
            "d_B preserves semi-basic forms",
            gen_sb,
            chk_sb,
            nchk_sb,
        )
    )
    return ids


# ----------------------------------------------------------------------
# transition identities
# ----------------------------------------------------------------------


def _rand_transition(m, rng):
    if m >= 2 and rng.random() < 0.5:
        return rand_quadratic_transition(m, rng)
    return rand_affine_transition(m, rng)


def _make_transitions():
    ids = []

    def gen_trans(m, rng):
        return {"T": _rand_transition(m, rng)}

    def chk_consistency(m, case):
        ok = check_consistency_identity(case["T"])
        return None if ok else _fail("coherence identity", case["T"], "0")

    def nchk_consistency(m, case, rng, cfg):
        T = case["T"]
        h = cfg.fd_step
        fmaps = [nm.scalar_fn(e, m) for e in T.forward]
        gmaps = [nm.scalar_fn(e, m) for e in T.inverse]

        def pad(x):
            return tuple(x) + (0.0,) * m

        def d1(fn, x, i):
            return (fn(pad(nm._shift(x, i, h))) - fn(pad(nm._shift(x, i, -h)))) / (2 * h)

        def d2(fn, x, i, j):
            pp = fn(pad(nm._shift(nm._shift(x, i, h), j, h)))
            pm = fn(pad(nm._shift(nm._shift(x, i, h), j, -h)))
            mp = fn(pad(nm._shift(nm._shift(x, i, -h), j, h)))
            mm = fn(pad(nm._shift(nm._shift(x, i, -h), j, -h)))
            return (pp - pm - mp + mm) / (4 * h * h)

        for P in nm.sample_points(m, rng, cfg.numeric_points, box=0.5):
            x = P[:m]
            v = P[m : 2 * m] if len(P) >= 2 * m else tuple(1.0 for _ in range(m))
            y = tuple(fn(pad(x)) for fn in fmaps)
            jac_f = [[d1(fmaps[a], x, k) for k in range(m)] for a in range(m)]
            vprime = [
                sum(v[l] * jac_f[b][l] for l in range(m)) for b in range(m)
            ]
            for j in range(m):
                for k in range(m):
                    acc = 0.0
                    scale = 0.0
                    for a in range(m):
                        for b in range(m):
                            t = vprime[b] * jac_f[a][k] * d2(gmaps[j], y, a, b)
                            acc += t
                            scale += abs(t)
                    for a in range(m):
                        for l in range(m):
                            t = v[l] * d1(gmaps[j], y, a) * d2(fmaps[a], x, k, l)
                            acc += t
                            scale += abs(t)
                    # cancellation is exact; allow stencil roundoff relative
                    # to the magnitude of the cancelling terms
                    if abs(acc) > cfg.rel_tol * max(1.0, scale):
                        return _nfail("tangent frame coherence")
        return None

    ids.append(
        Identity(
            "transition-coherence",
            "v'^b (dx'^a/dx^k)(d2 x^j/dy^a dy^b) + v^l (dx^j/dy^a)"
            "(d2 x'^a/dx^k dx^l) = 0",
            gen_trans,
            chk_consistency,
            nchk_consistency,
        )
    )

    LIFT_KINDS = ["pullback", "vertical", "complete", "xi", "B"]

    def gen_nat(m, rng):
        kind = rng.choice(LIFT_KINDS)
        T = _rand_transition(m, rng)
        if kind == "pullback":
            obj = rand_base_form(m, rng.randint(1, m), rng)
        elif kind == "vertical":
            obj = rand_base_field(m, rng)
        elif kind == "complete":
            obj = rng.choice(
                [
                    lambda: rand_base_field(m, rng),
                    lambda: rand_base_form(m, rng.randint(0, m), rng),
                    lambda: rand_base_scalar(m, rng),
                ]
            )()
        else:
            obj = None
        return {"T": T, "kind": kind, "obj": obj}

    def chk_nat(m, case):
        ok = check_naturality(case["kind"], case["obj"], case["T"])
        return None if ok else _fail(f"naturality of {case['kind']}", case["obj"], case["T"])

    def nchk_nat(m, case, rng, cfg):
        # evaluation redundancy: both sides of the naturality square are
        # evaluated at sampled points rather than re-derived numerically
        T, kind, obj = case["T"], case["kind"], case["obj"]
        if kind == "xi":
            lhs = transform(tautological_field(m), T)
            pairs = [(lhs, tautological_field(m))]
        elif kind == "B":
            Bm = mirror_map(m)
            moved = transform(Bm, T)
            pairs = [(moved.entry((a,)), Bm.entry((a,))) for a in range(2 * m)]
        elif kind == "vertical":
            pairs = [
                (
                    transform(vertical_lift_vector(obj), T),
                    vertical_lift_vector(transform_base(obj, T)),
                )
            ]
        elif kind == "complete" and isinstance(obj, BaseVectorField):
            pairs = [
                (
                    transform(complete_lift_vector(obj), T),
                    complete_lift_vector(transform_base(obj, T)),
                )
            ]
        else:
            if kind == "pullback":
                lhs = transform(pullback(obj), T)
                rhs = pullback(transform_base(obj, T))
            elif isinstance(obj, BaseForm):
                lhs = transform(complete_lift_form(obj), T)
                rhs = complete_lift_form(transform_base(obj, T))
            else:
                lhs = Form.from_scalar(m, transform(complete_lift_function(m, obj), T))
                rhs = Form.from_scalar(
                    m, complete_lift_function(m, transform_base(obj, T))
                )
            fa, fb = nm.form_fn(lhs), nm.form_fn(rhs)
            for P in _points(m, rng, cfg, lhs, rhs):
                if not nm.forms_close(fa(P), fb(P), cfg.rel_tol):
                    return _nfail("naturality square (form)")
            return None
        for P in _points(m, rng, cfg, *(x for pr in pairs for x in pr)):
            for lhs, rhs in pairs:
                if not nm.vectors_close(
                    _field_eval(lhs, P, m), _field_eval(rhs, P, m), cfg.rel_tol
                ):
                    return _nfail("naturality square (field)")
        return None

    ids.append(
        Identity(
            "lift-naturality",
            "lift then transform = transform then lift, for pullback, "
            "vertical, complete, xi and B",
            gen_nat,
            chk_nat,
            nchk_nat,
        )
    )

    def gen_affine(m, rng):
        return {"T": rand_affine_transition(m, rng)}

    def chk_flat(m, case):
        T = case["T"]
        imgs = coframe_images(T)
        for i in range(m, 2 * m):
            for (a,), _ in imgs[i].terms.items():
                if a < m:
                    return _fail("affine dv' rule", imgs[i], "no dx component")
        return None

    def nchk_flat(m, case, rng, cfg):
        T = case["T"]
        imgs = coframe_images(T)
        for i in range(m, 2 * m):
            ff = nm.form_fn(imgs[i])
            for P in _points(m, rng, cfg, imgs[i]):
                for (a,), val in ff(P).items():
                    if a < m and abs(val) > cfg.rel_tol:
                        return _nfail("flat transitions lose the second-derivative term")
        return None

    ids.append(
        Identity(
            "flat-affine-shortcut",
            "affine transitions: the dv' rewrite has no second-derivative term",
            gen_affine,
            chk_flat,
            nchk_flat,
        )
    )

    def gen_theta_glob(m, rng):
        mu = rand_base_form(m, 1, rng)
        c = rand_base_scalar(m, rng)
        gamma = rand_closed_base_form(m, 1, rng)
        return {"T": _rand_transition(m, rng), "mu": mu, "c": c, "gamma": gamma}

    def chk_theta_glob(m, case):
        T, mu, c, gamma = case["T"], case["mu"], case["c"], case["gamma"]
        f = make_f_mu(mu, c)
        alpha = exterior_derivative(Form.from_scalar(m, f)) + pullback(gamma)
        g1 = theta(AlphaMuForm(alpha, mu))
        alpha_p = transform(alpha, T)
        mu_p = transform_base(mu, T)
        g2 = theta(AlphaMuForm(alpha_p, mu_p))
        moved = transform_base(g1, T)
        return None if g2 == moved else _fail("theta globality", g2, moved)

    def nchk_theta_glob(m, case, rng, cfg):
        T, mu, c, gamma = case["T"], case["mu"], case["c"], case["gamma"]
        f = make_f_mu(mu, c)
        alpha = exterior_derivative(Form.from_scalar(m, f)) + pullback(gamma)
        g2 = theta(AlphaMuForm(transform(alpha, T), transform_base(mu, T)))
        moved = transform_base(theta(AlphaMuForm(alpha, mu)), T)
        fa, fb = nm.base_form_fn(g2), nm.base_form_fn(moved)
        for P in _points(m, rng, cfg, g2, moved, base_only=True):
            if not nm.forms_close(fa(P), fb(P), cfg.rel_tol):
                return _nfail("theta transforms covariantly")
        return None

    ids.append(
        Identity(
            "theta-globality",
            "theta computed after a transition matches the covector transform "
            "of theta computed before it",
            gen_theta_glob,
            chk_theta_glob,
            nchk_theta_glob,
        )
    )

    def chk_volume(m, case):
        T = case["T"]
        coef = volume_transform_coefficient(T)
        det = jacobian_determinant(T, "inverse")
        return None if coef == det * det else _fail("volume factor", coef, det * det)

    def nchk_volume(m, case, rng, cfg):
        T = case["T"]
        coef = volume_transform_coefficient(T)
        h = cfg.fd_step
        gmaps = [nm.scalar_fn(e, m) for e in T.inverse]

        def pad(x):
            return tuple(x) + (0.0,) * m

        def det_at(y):
            rows = [
                [
                    (g(pad(nm._shift(y, a, h))) - g(pad(nm._shift(y, a, -h)))) / (2 * h)
                    for a in range(m)
                ]
                for g in gmaps
            ]
            import math as _math

            total = 0.0
            for perm in permutations(range(m)):
                sign = 1
                for i in range(m):
                    for j in range(i + 1, m):
                        if perm[i] > perm[j]:
                            sign = -sign
                prod = 1.0
                for i in range(m):
                    prod *= rows[i][perm[i]]
                total += sign * prod
            return total

        for P in _points(m, rng, cfg, coef):
            y = P[:m]
            d = det_at(y)
            if not nm.close(nm.eval_scalar(coef, P, m), d * d, 1e-5):
                return _nfail("volume factor is the squared Jacobian determinant")
        return None

    ids.append(
        Identity(
            "volume-det-squared",
            "the volume form transforms by the square of the Jacobian "
            "determinant (hence a positive factor)",
            gen_trans,
            chk_volume,
            nchk_volume,
        )
    )
    return ids


def build_registry():
    return _make_geometry() + _make_lifts() + _make_operators() + _make_transitions()


def run_suite(config: SuiteConfig = None) -> SuiteReport:
    config = config or SuiteConfig()
    registry = build_registry()
    if config.filter:
        registry = [i for i in registry if config.filter in i.id]
    records = []
    failed = 0
    for ident in registry:
        t0 = time.perf_counter()
        cases_run = 0
        passed = True
        counterexample = None
        for m in config.m_values:
            if m < ident.min_m:
                continue
            for case_index in range(config.cases):
                case_seed = f"{config.seed}:{ident.id}:{m}:{case_index}"
                rng = random.Random(case_seed)
                case = ident.gen(m, rng)
                detail = ident.check(m, case)
                ok = detail is None
                if config.numeric and ident.ncheck is not None:
                    nrng = random.Random(case_seed + ":numeric")
                    try:
                        ndetail = ident.ncheck(m, case, nrng, config)
                    except nm.NumericPole:
                        ndetail = None  # sampled too close to a pole: skip point set
                    nok = ndetail is None
                    if nok != ok:
                        ok = False
                        detail = (detail or "symbolic passed") + "; " + (
                            ndetail or "numeric passed"
                        )
                cases_run += 1
                if not ok and counterexample is None:
                    passed = False
                    counterexample = {
                        "m": m,
                        "case": case_index,
                        "seed": case_seed,
                        "detail": detail,
                        "inputs": {k: str(v) for k, v in case.items()},
                    }
        if not passed:
            failed += 1
        records.append(
            IdentityRecord(
                id=ident.id,
                anchor=ident.anchor,
                cases=cases_run,
                passed=passed,
                counterexample=counterexample,
                seed=f"{config.seed}:{ident.id}",
                wall_time_s=time.perf_counter() - t0,
            )
        )
    return SuiteReport(records=records, total=len(records), failed=failed)
