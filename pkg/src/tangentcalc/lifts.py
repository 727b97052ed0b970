"""Natural lifts from the base chart to the tangent chart.

Implements the pullback of forms, the vertical and complete lifts of
functions, vector fields, forms and tensor products, together with the two
canonical tensors of the tangent chart: the tautological (Liouville) field
xi = sum v^i d/dv^i and the mirror map B = sum dx^j (x) d/dv^j.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import NotBaseOnly
from .forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    _replace_index,
    coord_of_index,
)
from .scalar import CoordinateId, ScalarExpr, const

__all__ = [
    "pullback",
    "vertical_lift_vector",
    "complete_lift_function",
    "complete_lift_vector",
    "complete_lift_form",
    "reconstruct_from_complete_lift",
    "TensorTM",
    "tensor_product_tm",
    "lift_tensor",
    "identity_endomorphism",
    "base_identity_components",
    "tautological_field",
    "mirror_map",
    "is_spray",
    "is_lambda_mirror",
]


def pullback(a: BaseForm) -> Form:
    """Pull a base p-form up to the tangent chart; indices stay on dx."""
    return Form(a.m, a.degree, dict(a.terms))


def vertical_lift_vector(X: BaseVectorField) -> VectorFieldTM:
    """Carry a base field into the fiber directions: components (0, X)."""
    zeros = [const(0)] * X.m
    return VectorFieldTM(X.m, zeros + list(X.components))


def complete_lift_function(m: int, f: ScalarExpr) -> ScalarExpr:
    """The fiber-linear derivative function: sum_j v^j df/dx^j."""
    if not f.is_base_only:
        raise NotBaseOnly("complete lift needs a base-only function")
    total = const(0)
    for j in range(1, m + 1):
        df = f.partial(CoordinateId("x", j))
        if not df.is_zero:
            total = total + ScalarExpr.from_coord(CoordinateId("v", j)) * df
    return total


def complete_lift_vector(X: BaseVectorField) -> VectorFieldTM:
    """Complete lift: X^i d/dx^i + v^j (dX^i/dx^j) d/dv^i."""
    m = X.m
    fiber = []
    for i in range(m):
        acc = const(0)
        for j in range(m):
            der = X.components[i].partial(CoordinateId("x", j + 1))
            if not der.is_zero:
                acc = acc + ScalarExpr.from_coord(CoordinateId("v", j + 1)) * der
        fiber.append(acc)
    return VectorFieldTM(m, list(X.components) + fiber)


def complete_lift_form(a: BaseForm) -> Form:
    """Complete lift of a base p-form, by its closed local expression:
    the fiber-weighted derivative of each coefficient on dx^I, plus one
    dx -> dv substitution per slot."""
    m = a.m
    if a.degree == 0:
        return Form.from_scalar(m, complete_lift_function(m, a.as_scalar()))
    out = {}

    def add(idx, coef):
        if coef.is_zero:
            return
        cur = out.get(idx)
        out[idx] = coef if cur is None else cur + coef

    for idx, coef in a.terms.items():
        lifted = complete_lift_function(m, coef)
        add(idx, lifted)
        for slot in range(len(idx)):
            rep = _replace_index(idx, slot, m + idx[slot])
            if rep is None:
                continue
            sign, nidx = rep
            add(nidx, coef if sign > 0 else -coef)
    return Form(m, a.degree, out)


def reconstruct_from_complete_lift(w: Form) -> BaseForm:
    """Read the base p-form back off its complete lift (p >= 1).

    The coefficient on dx^{i_1}..dx^{i_{p-1}}^dv^{i_p} of the lift is the
    base coefficient on dx^I, which makes the lift injective.
    """
    if w.degree < 1:
        raise ValueError("reconstruction needs degree >= 1")
    m = w.m
    terms = {}
    for idx, coef in w.terms.items():
        if all(a < m for a in idx[:-1]) and idx[-1] >= m:
            base_idx = idx[:-1] + (idx[-1] - m,)
            if base_idx == tuple(sorted(base_idx)) and len(set(base_idx)) == len(base_idx):
                if base_idx[-1] == idx[-1] - m and (
                    len(base_idx) == 1 or base_idx[-2] < base_idx[-1]
                ):
                    terms[base_idx] = coef
    return BaseForm(m, w.degree, terms)


class TensorTM:
    """A sum of simple tensor products of 1-forms and vector fields on the
    tangent chart, canonicalized to a component table.

    ``pattern`` records the factor kinds in order ('form' or 'vec');
    components map full index tuples to scalars.
    """

    __slots__ = ("m", "pattern", "components")

    def __init__(self, m: int, pattern: tuple, components: dict):
        self.m = m
        self.pattern = tuple(pattern)
        self.components = {
            idx: c for idx, c in components.items() if not c.is_zero
        }

    @staticmethod
    def zero(m: int, pattern: tuple) -> "TensorTM":
        return TensorTM(m, pattern, {})

    def __add__(self, other: "TensorTM") -> "TensorTM":
        if self.m != other.m or self.pattern != other.pattern:
            raise ValueError("tensor shapes differ")
        out = dict(self.components)
        for idx, c in other.components.items():
            out[idx] = out.get(idx, const(0)) + c
        return TensorTM(self.m, self.pattern, out)

    def __eq__(self, other):
        if not isinstance(other, TensorTM):
            return NotImplemented
        return (
            self.m == other.m
            and self.pattern == other.pattern
            and self.components == other.components
        )

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.components

    def to_endomorphism(self) -> VectorValuedForm:
        """Convert a (1,1) tensor (one form factor, one vector factor in
        either order) into a degree-1 vector-valued form."""
        if sorted(self.pattern) != ["form", "vec"]:
            raise ValueError("not a (1,1) tensor")
        form_pos = self.pattern.index("form")
        m = self.m
        values = {}
        for idx, coef in self.components.items():
            a = idx[form_pos]  # covector slot: eats d/dz^a
            b = idx[1 - form_pos]
            vec = values.get((a,), VectorFieldTM.zero(m))
            comps = list(vec.components)
            comps[b] = comps[b] + coef
            values[(a,)] = VectorFieldTM(m, comps)
        return VectorValuedForm(m, 1, values)


def tensor_product_tm(factors: Sequence) -> TensorTM:
    """Simple tensor product of degree-1 forms and vector fields on TM."""
    if not factors:
        raise ValueError("empty tensor product")
    m = factors[0].m
    pattern = []
    tables = []
    for f in factors:
        if isinstance(f, Form):
            if f.degree != 1:
                raise ValueError("tensor factors must be 1-forms or fields")
            pattern.append("form")
            tables.append({a: c for (a,), c in f.terms.items()})
        elif isinstance(f, VectorFieldTM):
            pattern.append("vec")
            tables.append(
                {a: c for a, c in enumerate(f.components) if not c.is_zero}
            )
        else:
            raise TypeError(f"unsupported tensor factor {f!r}")
    components = {(): const(1)}
    for table in tables:
        nxt = {}
        for idx, c in components.items():
            for a, fc in table.items():
                nxt[idx + (a,)] = c * fc
        components = nxt
    return TensorTM(m, tuple(pattern), components)


def _lift_factor(f, mode: str):
    if isinstance(f, BaseForm):
        return complete_lift_form(f) if mode == "complete" else pullback(f)
    if isinstance(f, BaseVectorField):
        return (
            complete_lift_vector(f) if mode == "complete" else vertical_lift_vector(f)
        )
    raise TypeError(f"unsupported base tensor factor {f!r}")


def lift_tensor(
    contravariant: Sequence[BaseVectorField],
    covariant: Sequence[BaseForm],
    mode: str,
) -> TensorTM:
    """Lift a simple base tensor (contravariant factors first) to TM.

    Vertical mode lifts every factor verticaly (pullback on forms); complete
    mode applies the product rule: one factor completely lifted, the rest
    vertically, summed over factors.
    """
    if mode not in ("vertical", "complete"):
        raise ValueError("mode must be 'vertical' or 'complete'")
    factors = list(contravariant) + list(covariant)
    if not factors:
        raise ValueError("empty tensor")
    for q in covariant:
        if q.degree != 1:
            raise ValueError("covariant factors must be 1-forms")
    if mode == "vertical":
        return tensor_product_tm([_lift_factor(f, "vertical") for f in factors])
    total = None
    for j in range(len(factors)):
        lifted = [
            _lift_factor(f, "complete" if i == j else "vertical")
            for i, f in enumerate(factors)
        ]
        term = tensor_product_tm(lifted)
        total = term if total is None else total + term
    return total


def identity_endomorphism(m: int) -> VectorValuedForm:
    """1_TM as a degree-1 vector-valued form."""
    return VectorValuedForm(
        m, 1, {(a,): VectorFieldTM.frame(m, a) for a in range(2 * m)}
    )


def base_identity_components(m: int):
    """The factor list of 1_M = sum_i dx^i (x) d/dx^i, ready for lifting."""
    return [
        (BaseVectorField.frame(m, i), BaseForm.coframe(m, i)) for i in range(m)
    ]


def tautological_field(m: int) -> VectorFieldTM:
    """xi = sum v^i d/dv^i."""
    if m < 1:
        raise ValueError("m must be >= 1")
    comps = [const(0)] * m + [
        ScalarExpr.from_coord(CoordinateId("v", i + 1)) for i in range(m)
    ]
    return VectorFieldTM(m, comps)


def mirror_map(m: int) -> VectorValuedForm:
    """B = sum dx^j (x) d/dv^j; squares to zero, image and kernel vertical."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return VectorValuedForm(
        m, 1, {(a,): VectorFieldTM.frame(m, m + a) for a in range(m)}
    )


def is_spray(S: VectorFieldTM) -> bool:
    """True when B(S) = xi, i.e. the first m components are v^1..v^m."""
    B = mirror_map(S.m)
    return B.apply([S]) == tautological_field(S.m)


def is_lambda_mirror(W: VectorFieldTM) -> Optional[ScalarExpr]:
    """Return the factor lambda with L_W B = lambda * B, or None when the
    Lie derivative of the mirror map is not proportional to it."""
    from .forms import lie_derivative_vvform

    m = W.m
    L = lie_derivative_vvform(W, mirror_map(m))
    lam = None
    for a in range(2 * m):
        entry = L.entry((a,))
        if a >= m:
            if not entry.is_zero:
                return None
            continue
        for b, comp in enumerate(entry.components):
            if b == m + a:
                continue
            if not comp.is_zero:
                return None
        cand = entry.components[m + a]
        if lam is None:
            lam = cand
        elif lam != cand:
            return None
    return lam if lam is not None else const(0)
