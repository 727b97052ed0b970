"""Expression DSL: parser, evaluator and renderers.

A document is a ';'-separated list of statements ending in an expression:

    m=2; function f base; let w = f*dx1^dv2; d(w)

Statements: ``m=<int>`` fixes the chart dimension, ``function <name>
<base|full>`` declares an abstract symbol, ``let <name> = <expr>`` names a
value.  Expressions combine rational literals, coordinates ``x1..xm`` /
``v1..vm``, coframe atoms ``dx1../dv1..``, frame fields ``ddx1../ddv1..``,
the named objects ``xi``, ``B``, ``id``, formal partials ``D(f,x1,...)``
and the operator calls ``d( ) db( ) pull( ) clift( ) vlift( ) ins( , )
lie( , )``.  ``^`` is the only infix on forms (left-associative, wedge);
on scalars with a literal integer exponent it is a power, which agrees
with the iterated wedge on degree 0.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import DslSyntaxError, EngineError, IndexOutOfRange, UndeclaredName
from .forms import (
    BaseForm,
    BaseVectorField,
    Form,
    VectorFieldTM,
    VectorValuedForm,
    coframe_label,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    wedge,
)
from .lifts import (
    complete_lift_form,
    complete_lift_function,
    complete_lift_vector,
    identity_endomorphism,
    mirror_map,
    pullback,
    tautological_field,
    vertical_lift_vector,
)
from .operators import d_B, insertion_derivation, lie_derivation
from .scalar import CoordinateId, FormalPartial, FunctionSymbol, ScalarExpr, const

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;=]))"
)

_ATOM_RE = re.compile(r"^(dd|d)?(x|v)([1-9][0-9]*)$")

_KEYWORDS = {"m", "function", "let", "base", "full"}
_BUILTIN_CALLS = {"d", "db", "pull", "clift", "vlift", "ins", "lie", "D"}
_NAMED_OBJECTS = {"xi", "B", "id"}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text}"


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        mobj = _TOKEN_RE.match(text, pos)
        if mobj is None or mobj.end() == pos:
            stretch = text[pos:].lstrip()
            if not stretch:
                break
            bad_pos = len(text) - len(stretch)
            line = text.count("\n", 0, bad_pos) + 1
            col = bad_pos - (text.rfind("\n", 0, bad_pos) + 1) + 1
            raise DslSyntaxError(f"unexpected character {stretch[0]!r}", line, col)
        start = mobj.start() + len(mobj.group(0)) - len(mobj.group(0).lstrip())
        line = text.count("\n", 0, start) + 1
        col = start - (text.rfind("\n", 0, start) + 1) + 1
        if mobj.group("num"):
            tokens.append(_Token("num", mobj.group("num"), line, col))
        elif mobj.group("name"):
            tokens.append(_Token("name", mobj.group("name"), line, col))
        else:
            tokens.append(_Token(mobj.group("op"), mobj.group("op"), line, col))
        pos = mobj.end()
    tokens.append(_Token("eof", "", line, 0))
    return tokens


class DslDocument:
    """Result of parsing: dimension, declarations and the final value."""

    def __init__(self, m, symbols, lets, result):
        self.m = m
        self.symbols = symbols
        self.lets = lets
        self.result = result


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.m = None
        self.symbols = {}
        self.lets = {}

    # -- token plumbing ------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what=None) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise DslSyntaxError(
                f"expected {what or kind}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.next()

    def error(self, message) -> DslSyntaxError:
        tok = self.peek()
        return DslSyntaxError(message, tok.line, tok.col)

    # -- grammar ---------------------------------------------------------

    def parse_document(self) -> DslDocument:
        result = None
        have_expr = False
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            result, have_expr = self.parse_statement()
            tok = self.peek()
            if tok.kind == ";":
                self.next()
                continue
            if tok.kind == "eof":
                break
            raise self.error(f"expected ';' or end of input, found {tok.text!r}")
        if not have_expr or result is None:
            raise self.error("document must end with an expression")
        return DslDocument(self.m, dict(self.symbols), dict(self.lets), result)

    def parse_statement(self):
        tok = self.peek()
        if tok.kind == "name" and tok.text == "m" and self.tokens[self.i + 1].kind == "=":
            self.next()
            self.next()
            num = self.expect("num", "a dimension")
            self.m = int(num.text)
            if self.m < 1:
                raise DslSyntaxError("dimension must be >= 1", num.line, num.col)
            return None, False
        if tok.kind == "name" and tok.text == "function":
            self.next()
            name = self.expect("name", "a symbol name")
            self._check_fresh(name)
            dep = self.expect("name", "'base' or 'full'")
            if dep.text not in ("base", "full"):
                raise DslSyntaxError(
                    f"dependence must be 'base' or 'full', got {dep.text!r}",
                    dep.line,
                    dep.col,
                )
            self.symbols[name.text] = FunctionSymbol(name.text, dep.text)
            return None, False
        if tok.kind == "name" and tok.text == "let":
            self.next()
            name = self.expect("name", "a value name")
            self._check_fresh(name)
            self.expect("=", "'='")
            value = self.parse_expr()
            self.lets[name.text] = value
            return None, False
        value = self.parse_expr()
        return value, True

    def _check_fresh(self, name_tok):
        name = name_tok.text
        if (
            name in _KEYWORDS
            or name in _BUILTIN_CALLS
            or name in _NAMED_OBJECTS
            or _ATOM_RE.match(name)
        ):
            raise DslSyntaxError(
                f"{name!r} is reserved", name_tok.line, name_tok.col
            )
        if name in self.symbols or name in self.lets:
            raise DslSyntaxError(
                f"{name!r} is already declared", name_tok.line, name_tok.col
            )

    def parse_expr(self):
        value = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.next()
            rhs = self.parse_term()
            value = self._add(value, rhs, op) if op.kind == "+" else self._add(
                value, self._neg(rhs), op
            )
        return value

    def parse_term(self):
        value = self.parse_unary()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            rhs = self.parse_unary()
            value = self._mul(value, rhs, op) if op.kind == "*" else self._div(
                value, rhs, op
            )
        return value

    def parse_unary(self):
        if self.peek().kind == "-":
            self.next()
            return self._neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        value = self.parse_atom()
        while self.peek().kind == "^":
            op = self.next()
            if self.peek().kind == "num":
                n = int(self.next().text)
                value = self._int_power(value, n, op)
            elif self.peek().kind == "-" and self.tokens[self.i + 1].kind == "num":
                self.next()
                n = -int(self.next().text)
                value = self._int_power(value, n, op)
            else:
                rhs = self.parse_atom()
                value = self._wedge(value, rhs, op)
        return value

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return const(Fraction(int(tok.text)))
        if tok.kind == "(":
            self.next()
            value = self.parse_expr()
            self.expect(")", "')'")
            return value
        if tok.kind == "name":
            return self.parse_name()
        raise self.error(f"expected an expression, found {tok.text or 'end of input'!r}")

    def parse_name(self):
        tok = self.next()
        name = tok.text
        if name in _BUILTIN_CALLS:
            return self.parse_call(tok)
        atom = _ATOM_RE.match(name)
        if atom:
            prefix, kind, idx = atom.groups()
            return self._coordinate_atom(tok, prefix or "", kind, int(idx))
        if name in _NAMED_OBJECTS:
            m = self._need_m(tok)
            if name == "xi":
                return tautological_field(m)
            if name == "B":
                return mirror_map(m)
            return identity_endomorphism(m)
        if name in self.lets:
            return self.lets[name]
        if name in self.symbols:
            return ScalarExpr.from_symbol(self.symbols[name])
        raise UndeclaredName(f"undeclared name {name!r}", tok.line, tok.col)

    def parse_call(self, tok):
        name = tok.text
        self.expect("(", "'('")
        if name == "D":
            inner = self.parse_expr()
            scalar = self._as_scalar(inner, tok, "D differentiates scalars")
            coords = []
            while self.peek().kind == ",":
                self.next()
                ctok = self.expect("name", "a coordinate")
                atom = _ATOM_RE.match(ctok.text)
                if not atom or atom.group(1):
                    raise DslSyntaxError(
                        f"D expects coordinates, got {ctok.text!r}", ctok.line, ctok.col
                    )
                _, kind, idx = atom.groups()
                self._check_index(int(idx), ctok)
                coords.append(CoordinateId(kind, int(idx)))
            if not coords:
                raise self.error("D needs at least one coordinate")
            self.expect(")", "')'")
            for c in coords:
                scalar = scalar.partial(c)
            return scalar
        first = self.parse_expr()
        second = None
        if name in ("ins", "lie"):
            self.expect(",", "','")
            second = self.parse_expr()
        self.expect(")", "')'")
        return self._apply_builtin(name, first, second, tok)

    # -- value helpers ----------------------------------------------------

    def _need_m(self, tok) -> int:
        if self.m is None:
            raise DslSyntaxError(
                "declare the dimension first (m=<int>)", tok.line, tok.col
            )
        return self.m

    def _check_index(self, idx, tok):
        m = self._need_m(tok)
        if not 1 <= idx <= m:
            raise IndexOutOfRange(
                f"index {idx} outside 1..{m}", tok.line, tok.col
            )

    def _coordinate_atom(self, tok, prefix, kind, idx):
        self._check_index(idx, tok)
        m = self.m
        a = idx - 1 if kind == "x" else m + idx - 1
        if prefix == "":
            return ScalarExpr.from_coord(CoordinateId(kind, idx))
        if prefix == "d":
            return Form.coframe(m, a)
        return VectorFieldTM.frame(m, a)

    def _as_scalar(self, value, tok, what):
        if isinstance(value, ScalarExpr):
            return value
        if isinstance(value, Form) and value.degree == 0:
            return value.as_scalar()
        raise DslSyntaxError(f"{what}, got {_kind_name(value)}", tok.line, tok.col)

    def _as_form(self, value):
        if isinstance(value, Form):
            return value
        if isinstance(value, ScalarExpr):
            return Form.from_scalar(self.m if self.m else 1, value)
        return None

    def _add(self, a, b, tok):
        if isinstance(a, ScalarExpr) and isinstance(b, ScalarExpr):
            return a + b
        fa, fb = self._as_form(a), self._as_form(b)
        if fa is not None and fb is not None:
            try:
                return fa + fb
            except ValueError as exc:
                raise DslSyntaxError(str(exc), tok.line, tok.col) from None
        if isinstance(a, VectorFieldTM) and isinstance(b, VectorFieldTM):
            return a + b
        if isinstance(a, VectorValuedForm) and isinstance(b, VectorValuedForm):
            return a + b
        raise DslSyntaxError(
            f"cannot add {_kind_name(a)} and {_kind_name(b)}", tok.line, tok.col
        )

    def _neg(self, a):
        return -a if not isinstance(a, VectorValuedForm) else -a

    def _mul(self, a, b, tok):
        if isinstance(a, ScalarExpr) and isinstance(b, ScalarExpr):
            return a * b
        for x, y in ((a, b), (b, a)):
            xs = x if isinstance(x, ScalarExpr) else (
                x.as_scalar() if isinstance(x, Form) and x.degree == 0 else None
            )
            if xs is not None:
                if isinstance(y, Form):
                    return y.scale(xs)
                if isinstance(y, (VectorFieldTM, BaseVectorField)):
                    return y.scale(xs)
                if isinstance(y, VectorValuedForm):
                    return y.scale(xs)
                if isinstance(y, ScalarExpr):
                    return xs * y
        raise DslSyntaxError(
            f"cannot multiply {_kind_name(a)} and {_kind_name(b)}; "
            "use ^ for exterior products",
            tok.line,
            tok.col,
        )

    def _div(self, a, b, tok):
        bs = b if isinstance(b, ScalarExpr) else (
            b.as_scalar() if isinstance(b, Form) and b.degree == 0 else None
        )
        if bs is None:
            raise DslSyntaxError(
                f"can only divide by scalars, got {_kind_name(b)}", tok.line, tok.col
            )
        if bs.is_zero:
            raise DslSyntaxError("division by zero", tok.line, tok.col)
        inv = const(1) / bs
        return self._mul(a, inv, tok)

    def _int_power(self, a, n, tok):
        if isinstance(a, ScalarExpr):
            try:
                return a**n
            except EngineError as exc:
                raise DslSyntaxError(str(exc), tok.line, tok.col) from None
        if isinstance(a, Form):
            if a.degree == 0:
                return Form.from_scalar(a.m, self._int_power(a.as_scalar(), n, tok))
            if n < 0:
                raise DslSyntaxError(
                    "negative powers need a degree-0 operand", tok.line, tok.col
                )
            out = Form.from_scalar(a.m, const(1))
            for _ in range(n):
                out = wedge(out, a)
            return out
        raise DslSyntaxError(
            f"cannot raise {_kind_name(a)} to a power", tok.line, tok.col
        )

    def _wedge(self, a, b, tok):
        fa, fb = self._as_form(a), self._as_form(b)
        if fa is None or fb is None:
            raise DslSyntaxError(
                f"^ expects forms, got {_kind_name(a)} and {_kind_name(b)}",
                tok.line,
                tok.col,
            )
        return wedge(fa, fb)

    def _to_base_form(self, value, tok) -> BaseForm:
        fa = self._as_form(value)
        if fa is None:
            raise DslSyntaxError(
                f"expected a base form, got {_kind_name(value)}", tok.line, tok.col
            )
        m = self._need_m(tok)
        try:
            return BaseForm(m, fa.degree, dict(fa.terms))
        except EngineError as exc:
            raise DslSyntaxError(f"not a base form: {exc}", tok.line, tok.col) from None
        except ValueError as exc:
            raise DslSyntaxError(f"not a base form: {exc}", tok.line, tok.col) from None

    def _to_base_field(self, value, tok) -> BaseVectorField:
        if not isinstance(value, VectorFieldTM):
            raise DslSyntaxError(
                f"expected a base vector field, got {_kind_name(value)}",
                tok.line,
                tok.col,
            )
        m = value.m
        if any(not c.is_zero for c in value.components[m:]):
            raise DslSyntaxError(
                "base vector fields cannot have ddv components", tok.line, tok.col
            )
        try:
            return BaseVectorField(m, value.components[:m])
        except EngineError as exc:
            raise DslSyntaxError(str(exc), tok.line, tok.col) from None

    def _apply_builtin(self, name, first, second, tok):
        m = self._need_m(tok)
        if name == "d":
            fa = self._as_form(first)
            if fa is None:
                raise DslSyntaxError(
                    f"d expects a form, got {_kind_name(first)}", tok.line, tok.col
                )
            return exterior_derivative(fa)
        if name == "db":
            fa = self._as_form(first)
            if fa is None:
                raise DslSyntaxError(
                    f"db expects a form, got {_kind_name(first)}", tok.line, tok.col
                )
            return d_B(fa)
        if name == "pull":
            if isinstance(first, ScalarExpr):
                if not first.is_base_only:
                    raise DslSyntaxError(
                        "pull expects a base object", tok.line, tok.col
                    )
                return Form.from_scalar(m, first)
            return pullback(self._to_base_form(first, tok))
        if name == "clift":
            if isinstance(first, ScalarExpr):
                try:
                    return complete_lift_function(m, first)
                except EngineError as exc:
                    raise DslSyntaxError(str(exc), tok.line, tok.col) from None
            if isinstance(first, VectorFieldTM):
                return complete_lift_vector(self._to_base_field(first, tok))
            return complete_lift_form(self._to_base_form(first, tok))
        if name == "vlift":
            return vertical_lift_vector(self._to_base_field(first, tok))
        if name == "ins":
            fb = self._as_form(second)
            if fb is None:
                raise DslSyntaxError("ins expects a form argument", tok.line, tok.col)
            if isinstance(first, VectorValuedForm):
                return insertion_derivation(first, fb)
            if isinstance(first, VectorFieldTM):
                return interior_product(first, fb)
            raise DslSyntaxError(
                f"ins expects a field or endomorphism, got {_kind_name(first)}",
                tok.line,
                tok.col,
            )
        if name == "lie":
            fb = self._as_form(second)
            if fb is None:
                raise DslSyntaxError("lie expects a form argument", tok.line, tok.col)
            if isinstance(first, VectorValuedForm):
                try:
                    return lie_derivation(first, fb)
                except EngineError as exc:
                    raise DslSyntaxError(str(exc), tok.line, tok.col) from None
            if isinstance(first, VectorFieldTM):
                return lie_derivative_form(first, fb)
            raise DslSyntaxError(
                f"lie expects a field or endomorphism, got {_kind_name(first)}",
                tok.line,
                tok.col,
            )
        raise DslSyntaxError(f"unknown operator {name!r}", tok.line, tok.col)


def _kind_name(value) -> str:
    if isinstance(value, ScalarExpr):
        return "scalar"
    if isinstance(value, Form):
        return f"{value.degree}-form"
    if isinstance(value, BaseForm):
        return f"base {value.degree}-form"
    if isinstance(value, VectorFieldTM):
        return "vector field"
    if isinstance(value, BaseVectorField):
        return "base vector field"
    if isinstance(value, VectorValuedForm):
        return "vector-valued form"
    return type(value).__name__


def parse(text: str) -> DslDocument:
    """Parse and evaluate a DSL document; returns the document with its
    final value in ``result``."""
    return _Parser(text).parse_document()


# -- renderers -------------------------------------------------------------


def _scalar_latex(e: ScalarExpr) -> str:
    def gen_latex(g):
        if isinstance(g, CoordinateId):
            return f"{g.kind}^{{{g.index}}}"
        if isinstance(g, FormalPartial):
            if not g.orders:
                return g.symbol.name
            degree = len(g.orders)
            sup = "" if degree == 1 else f"^{{{degree}}}"
            dens = "\\,".join(
                f"\\partial {c.kind}^{{{c.index}}}" for c in g.orders
            )
            return f"\\frac{{\\partial{sup} {g.symbol.name}}}{{{dens}}}"
        return str(g)

    def poly_latex(p):
        from .scalar import _mono_key

        if not p:
            return "0"
        chunks = []
        for mono, coef in sorted(p.items(), key=lambda t: _mono_key(t[0]), reverse=True):
            factors = []
            if coef == -1 and mono:
                head = "-"
            elif coef == 1 and mono:
                head = ""
            else:
                head = (
                    str(coef)
                    if coef.denominator == 1
                    else f"\\tfrac{{{coef.numerator}}}{{{coef.denominator}}}"
                )
            for g, epow in mono:
                factors.append(gen_latex(g) if epow == 1 else f"{gen_latex(g)}^{{{epow}}}")
            body = head + ("\\," if head and factors else "") + "\\,".join(factors)
            chunks.append(body if body else head)
        out = chunks[0]
        for c in chunks[1:]:
            out += c if c.startswith("-") else "+" + c
        return out

    num = poly_latex(e.num)
    if len(e.den) == 1 and () in e.den:
        return num
    return f"\\frac{{{num}}}{{{poly_latex(e.den)}}}"


def _coframe_latex(m, a):
    if a < m:
        return f"{{\\mathrm{{d}}}}x^{{{a + 1}}}"
    return f"{{\\mathrm{{d}}}}v^{{{a - m + 1}}}"


def _frame_latex(m, a):
    if a < m:
        return f"\\partial_{{x^{{{a + 1}}}}}"
    return f"\\partial_{{v^{{{a - m + 1}}}}}"


def _form_latex(w: Form) -> str:
    if not w.terms:
        return "0"
    parts = []
    for idx in sorted(w.terms):
        coef = _scalar_latex(w.terms[idx])
        label = "\\wedge ".join(_coframe_latex(w.m, a) for a in idx)
        if not idx:
            parts.append(coef)
        elif coef == "1":
            parts.append(label)
        elif coef == "-1":
            parts.append("-" + label)
        else:
            wrap = coef if "+" not in coef and "-" not in coef[1:] else f"({coef})"
            parts.append(f"{wrap}\\,{label}")
    return " + ".join(parts)


def _field_latex(X: VectorFieldTM) -> str:
    parts = []
    for a, comp in enumerate(X.components):
        if comp.is_zero:
            continue
        cs = _scalar_latex(comp)
        frame = _frame_latex(X.m, a)
        parts.append(frame if cs == "1" else f"{cs}{frame}")
    return "+".join(parts) if parts else "0"


def _scalar_json(e: ScalarExpr) -> dict:
    from .scalar import ScalarExpr as SE

    return {"num": SE._poly_str(e.num), "den": SE._poly_str(e.den)}


def to_json_dict(value) -> dict:
    if isinstance(value, ScalarExpr):
        return {"kind": "scalar", **_scalar_json(value)}
    if isinstance(value, Form):
        return {
            "kind": "form",
            "m": value.m,
            "degree": value.degree,
            "terms": [
                {
                    "index": [coframe_label(value.m, a) for a in idx],
                    "coefficient": _scalar_json(value.terms[idx]),
                }
                for idx in sorted(value.terms)
            ],
        }
    if isinstance(value, VectorFieldTM):
        return {
            "kind": "vector_field",
            "m": value.m,
            "components": [_scalar_json(c) for c in value.components],
        }
    if isinstance(value, VectorValuedForm):
        return {
            "kind": "vector_valued_form",
            "m": value.m,
            "degree": value.degree,
            "values": [
                {
                    "index": [coframe_label(value.m, a) for a in idx],
                    "components": [
                        _scalar_json(c) for c in value.values[idx].components
                    ],
                }
                for idx in sorted(value.values)
            ],
        }
    raise TypeError(f"cannot render {value!r} as JSON")


def render(value, fmt: str = "text") -> str:
    """Render a value as text (parseable for forms and fields), LaTeX, or
    a JSON document."""
    if fmt == "text":
        return str(value)
    if fmt == "latex":
        if isinstance(value, ScalarExpr):
            return _scalar_latex(value)
        if isinstance(value, Form):
            return _form_latex(value)
        if isinstance(value, (VectorFieldTM,)):
            return _field_latex(value)
        raise TypeError(f"no latex rendering for {value!r}")
    if fmt == "json":
        return json.dumps(to_json_dict(value), indent=2)
    raise ValueError(f"unknown format {fmt!r}")
