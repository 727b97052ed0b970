"""Chart changes on the base and their induced tangent-chart transitions.

A transition stores an exact forward/inverse pair of base coordinate maps
(the round trip is verified symbolically at construction).  The induced
map on the tangent chart sends v to its image under the Jacobian, and the
transform of forms, fields and endomorphisms rewrites objects in the primed
chart, reusing the same generator symbols for the primed coordinates.
"""

from __future__ import annotations

from typing import Sequence, Union

from .errors import NotBaseOnly, NotInverse, UnknownLift
from .forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    wedge,
)
from .lifts import (
    complete_lift_form,
    complete_lift_function,
    complete_lift_vector,
    mirror_map,
    pullback,
    tautological_field,
    vertical_lift_vector,
)
from .scalar import CoordinateId, ScalarExpr, const, vvar, xvar

__all__ = [
    "ChartTransition",
    "make_transition",
    "compose_transitions",
    "transform",
    "transform_base",
    "check_consistency_identity",
    "check_naturality",
    "coframe_images",
    "volume_transform_coefficient",
    "jacobian_determinant",
]


def _xc(i: int) -> CoordinateId:
    return CoordinateId("x", i + 1)


class ChartTransition:
    """An invertible base coordinate change with an exact inverse.

    ``forward[a]`` expresses the new coordinate x'^(a+1) in the old ones;
    ``inverse[i]`` expresses the old x^(i+1) in the new ones, written with
    the same generators.  Jacobians of both maps are precomputed.
    """

    __slots__ = ("m", "forward", "inverse", "jac_forward", "jac_inverse")

    def __init__(self, forward: Sequence[ScalarExpr], inverse: Sequence[ScalarExpr]):
        forward = tuple(forward)
        inverse = tuple(inverse)
        if len(forward) != len(inverse):
            raise NotInverse("forward and inverse have different lengths")
        m = len(forward)
        for e in forward + inverse:
            if not e.is_base_only:
                raise NotBaseOnly("transition components must be base-only")
        fwd_bind = {_xc(i): forward[i] for i in range(m)}
        inv_bind = {_xc(i): inverse[i] for i in range(m)}
        for i in range(m):
            if inverse[i].substitute(fwd_bind) != xvar(i + 1):
                raise NotInverse(f"inverse o forward fails on coordinate {i + 1}")
            if forward[i].substitute(inv_bind) != xvar(i + 1):
                raise NotInverse(f"forward o inverse fails on coordinate {i + 1}")
        self.m = m
        self.forward = forward
        self.inverse = inverse
        # jac_forward[a][i] = d forward_a / d x^i   (functions of old coords)
        # jac_inverse[i][a] = d inverse_i / d y^a   (functions of new coords)
        self.jac_forward = [
            [forward[a].partial(_xc(i)) for i in range(m)] for a in range(m)
        ]
        self.jac_inverse = [
            [inverse[i].partial(_xc(a)) for a in range(m)] for i in range(m)
        ]

    def swapped(self) -> "ChartTransition":
        return ChartTransition(self.inverse, self.forward)

    @property
    def is_affine(self) -> bool:
        return all(
            e.is_constant for row in self.jac_forward for e in row
        )

    def fiber_image(self) -> list:
        """v'^a = sum_j v^j (d forward_a / d x^j), in old coordinates."""
        out = []
        for a in range(self.m):
            acc = const(0)
            for j in range(self.m):
                der = self.jac_forward[a][j]
                if not der.is_zero:
                    acc = acc + vvar(j + 1) * der
            out.append(acc)
        return out

    def __repr__(self):
        fw = ", ".join(str(e) for e in self.forward)
        return f"ChartTransition({fw})"


def make_transition(
    forward: Sequence[ScalarExpr], inverse: Sequence[ScalarExpr]
) -> ChartTransition:
    return ChartTransition(forward, inverse)


def compose_transitions(
    first: ChartTransition, second: ChartTransition
) -> ChartTransition:
    """The transition obtained by applying ``first`` then ``second``."""
    if first.m != second.m:
        raise ValueError("transitions of different dimension")
    m = first.m
    fwd_bind = {_xc(i): first.forward[i] for i in range(m)}
    inv_bind = {_xc(i): second.inverse[i] for i in range(m)}
    forward = [second.forward[a].substitute(fwd_bind) for a in range(m)]
    inverse = [first.inverse[i].substitute(inv_bind) for i in range(m)]
    return ChartTransition(forward, inverse)


def _directed(T: ChartTransition, direction: str) -> ChartTransition:
    if direction == "forward":
        return T
    if direction == "inverse":
        return T.swapped()
    raise ValueError("direction must be 'forward' or 'inverse'")


def _tm_coordinate_bindings(T: ChartTransition) -> dict:
    """Old tangent coordinates in terms of the new ones:
    x^i = inverse_i, v^i = sum_a v^a (d inverse_i / d y^a)."""
    m = T.m
    bind = {}
    for i in range(m):
        bind[_xc(i)] = T.inverse[i]
        acc = const(0)
        for a in range(m):
            der = T.jac_inverse[i][a]
            if not der.is_zero:
                acc = acc + vvar(a + 1) * der
        bind[CoordinateId("v", i + 1)] = acc
    return bind


def coframe_images(T: ChartTransition, direction: str = "forward") -> list:
    """Images of the old coframe (dx^1..dx^m, dv^1..dv^m) in the new chart.

    dx^i picks up the inverse Jacobian; dv^i additionally picks up the
    fiber-weighted second derivatives of the inverse map (that term dies
    on affine transitions).
    """
    T = _directed(T, direction)
    m = T.m
    images = []
    for i in range(m):
        terms = {}
        for a in range(m):
            der = T.jac_inverse[i][a]
            if not der.is_zero:
                terms[(a,)] = der
        images.append(Form(m, 1, terms))
    for i in range(m):
        terms = {}
        for a in range(m):
            acc = const(0)
            for b in range(m):
                second = T.jac_inverse[i][b].partial(_xc(a))
                if not second.is_zero:
                    acc = acc + vvar(b + 1) * second
            if not acc.is_zero:
                terms[(a,)] = acc
            der = T.jac_inverse[i][a]
            if not der.is_zero:
                terms[(m + a,)] = terms.get((m + a,), const(0)) + der
        images.append(Form(m, 1, terms))
    return images


def _transform_scalar_tm(e: ScalarExpr, T: ChartTransition) -> ScalarExpr:
    return e.substitute(_tm_coordinate_bindings(T))


def _transform_form(w: Form, T: ChartTransition) -> Form:
    m = T.m
    images = coframe_images(T)
    bind = _tm_coordinate_bindings(T)
    out = Form.zero(m, w.degree)
    for idx, coef in w.terms.items():
        piece = Form.from_scalar(m, coef.substitute(bind))
        for a in idx:
            piece = wedge(piece, images[a])
        out = out + piece
    return out


def _transform_vector(W: VectorFieldTM, T: ChartTransition) -> VectorFieldTM:
    m = T.m
    fiber = T.fiber_image()
    comps = []
    # W applied to each new coordinate function, then rewritten
    for a in range(m):
        acc = const(0)
        for i in range(m):
            der = T.jac_forward[a][i]
            if not der.is_zero:
                acc = acc + W.components[i] * der
        comps.append(_transform_scalar_tm(acc, T))
    for a in range(m):
        acc = const(0)
        for i in range(m):
            wi = W.components[i]
            if not wi.is_zero:
                acc = acc + wi * fiber[a].partial(_xc(i))
        for j in range(m):
            uj = W.components[m + j]
            der = T.jac_forward[a][j]
            if not uj.is_zero and not der.is_zero:
                acc = acc + uj * der
        comps.append(_transform_scalar_tm(acc, T))
    return VectorFieldTM(m, comps)


def _primed_frame_in_old(T: ChartTransition) -> list:
    """The primed coordinate frame written in the old chart."""
    m = T.m
    fwd_bind = {_xc(i): T.forward[i] for i in range(m)}
    jac_inv_old = [
        [T.jac_inverse[i][a].substitute(fwd_bind) for a in range(m)] for i in range(m)
    ]
    fiber = T.fiber_image()
    frames = []
    for a in range(m):
        comps = [jac_inv_old[i][a] for i in range(m)]
        vert = []
        for j in range(m):
            acc = const(0)
            for b in range(m):
                second = T.jac_inverse[j][b].partial(_xc(a)).substitute(fwd_bind)
                if not second.is_zero:
                    acc = acc + fiber[b] * second
            vert.append(acc)
        frames.append(VectorFieldTM(m, comps + vert))
    for a in range(m):
        comps = [const(0)] * m + [jac_inv_old[i][a] for i in range(m)]
        frames.append(VectorFieldTM(m, comps))
    return frames


def _transform_vvform(K: VectorValuedForm, T: ChartTransition) -> VectorValuedForm:
    if K.degree != 1:
        raise ValueError("transform implemented for degree-1 endomorphisms")
    m = T.m
    frames = _primed_frame_in_old(T)
    values = {}
    for A in range(2 * m):
        vec = _transform_vector(K.apply([frames[A]]), T)
        if not vec.is_zero:
            values[(A,)] = vec
    return VectorValuedForm(m, 1, values)


def transform(obj, T: ChartTransition, direction: str = "forward"):
    """Rewrite a tangent-chart object in the primed chart of a transition."""
    T = _directed(T, direction)
    if isinstance(obj, Form):
        return _transform_form(obj, T)
    if isinstance(obj, VectorFieldTM):
        return _transform_vector(obj, T)
    if isinstance(obj, VectorValuedForm):
        return _transform_vvform(obj, T)
    if isinstance(obj, ScalarExpr):
        return _transform_scalar_tm(obj, T)
    raise TypeError(f"cannot transform {obj!r}")


def transform_base(obj, T: ChartTransition, direction: str = "forward"):
    """Rewrite a base-chart object (scalar, form or field) in the primed chart."""
    T = _directed(T, direction)
    m = T.m
    bind = {_xc(i): T.inverse[i] for i in range(m)}
    if isinstance(obj, ScalarExpr):
        if not obj.is_base_only:
            raise NotBaseOnly("transform_base expects a base-only scalar")
        return obj.substitute(bind)
    if isinstance(obj, BaseForm):
        out = BaseForm.zero(m, obj.degree)
        for idx, coef in obj.terms.items():
            piece = BaseForm.from_scalar(m, coef.substitute(bind))
            for i in idx:
                terms = {}
                for a in range(m):
                    der = T.jac_inverse[i][a]
                    if not der.is_zero:
                        terms[(a,)] = der
                piece = piece.wedge(BaseForm(m, 1, terms))
            out = out + piece
        return out
    if isinstance(obj, BaseVectorField):
        comps = []
        for a in range(m):
            acc = const(0)
            for i in range(m):
                der = T.jac_forward[a][i]
                if not der.is_zero:
                    acc = acc + obj.components[i] * der
            comps.append(acc.substitute(bind))
        return BaseVectorField(m, comps)
    raise TypeError(f"cannot transform base object {obj!r}")


def check_consistency_identity(T: ChartTransition) -> bool:
    """The mixed second-derivative cancellation that makes the tangent
    frame rewrite coherent: for all j, k the combination

      v'^b (dx'^a/dx^k)(d^2 x^j/dy^a dy^b) + v^l (dx^j/dy^a)(d^2 x'^a/dx^k dx^l)

    vanishes identically (everything expressed in the old chart)."""
    m = T.m
    fwd_bind = {_xc(i): T.forward[i] for i in range(m)}
    fiber = T.fiber_image()
    jac_inv_old = [
        [T.jac_inverse[i][a].substitute(fwd_bind) for a in range(m)] for i in range(m)
    ]
    for j in range(m):
        second_inv_old = [
            [
                T.jac_inverse[j][a].partial(_xc(b)).substitute(fwd_bind)
                for b in range(m)
            ]
            for a in range(m)
        ]
        for k in range(m):
            acc = const(0)
            for a in range(m):
                for b in range(m):
                    s = second_inv_old[a][b]
                    if s.is_zero:
                        continue
                    der = T.jac_forward[a][k]
                    if der.is_zero:
                        continue
                    acc = acc + fiber[b] * der * s
            for a in range(m):
                for l in range(m):
                    s2 = T.jac_forward[a][k].partial(_xc(l))
                    if s2.is_zero:
                        continue
                    acc = acc + vvar(l + 1) * jac_inv_old[j][a] * s2
            if not acc.is_zero:
                return False
    return True


def check_naturality(lift_name: str, base_object, T: ChartTransition) -> bool:
    """Lift-then-transform equals transform-then-lift, symbolically."""
    if lift_name == "pullback":
        lhs = transform(pullback(base_object), T)
        rhs = pullback(transform_base(base_object, T))
        return lhs == rhs
    if lift_name == "vertical":
        lhs = transform(vertical_lift_vector(base_object), T)
        rhs = vertical_lift_vector(transform_base(base_object, T))
        return lhs == rhs
    if lift_name == "complete":
        if isinstance(base_object, BaseVectorField):
            lhs = transform(complete_lift_vector(base_object), T)
            rhs = complete_lift_vector(transform_base(base_object, T))
        elif isinstance(base_object, BaseForm):
            lhs = transform(complete_lift_form(base_object), T)
            rhs = complete_lift_form(transform_base(base_object, T))
        elif isinstance(base_object, ScalarExpr):
            lhs = transform(complete_lift_function(T.m, base_object), T)
            rhs = complete_lift_function(T.m, transform_base(base_object, T))
        else:
            raise UnknownLift(f"complete lift of {type(base_object).__name__}")
        return lhs == rhs
    if lift_name == "xi":
        return transform(tautological_field(T.m), T) == tautological_field(T.m)
    if lift_name == "B":
        return transform(mirror_map(T.m), T) == mirror_map(T.m)
    raise UnknownLift(f"unknown lift kind {lift_name!r}")


def jacobian_determinant(T: ChartTransition, which: str = "inverse") -> ScalarExpr:
    """Determinant of the inverse (default) or forward Jacobian."""
    from .forms import _det

    rows = T.jac_inverse if which == "inverse" else T.jac_forward
    return _det([list(r) for r in rows])


def volume_transform_coefficient(T: ChartTransition) -> ScalarExpr:
    """Coefficient of the transformed volume form dx^1^..^dx^m^dv^1^..^dv^m;
    equals the square of the inverse Jacobian determinant."""
    m = T.m
    vol = Form(m, 2 * m, {tuple(range(2 * m)): const(1)})
    moved = _transform_form(vol, T)
    return moved.coefficient(tuple(range(2 * m)))
