"""HTTP service exposing the engine: evaluation, the identity suite and
transition checks.

The computation is stateless and pure, so handlers run synchronously in
the FastAPI threadpool.  The CLI talks to this app in-process through an
ASGI transport by default, or to a remote instance with --server.
"""

from __future__ import annotations

import random
from typing import Literal, Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .dsl import parse, render, to_json_dict
from .errors import DslError, EngineError
from .forms import BaseForm, BaseVectorField, Form, VectorFieldTM, VectorValuedForm
from .rand import rand_base_field, rand_base_form, rand_base_scalar
from .scalar import ScalarExpr
from .suite import SuiteConfig, run_suite
from .transitions import (
    check_consistency_identity,
    check_naturality,
    jacobian_determinant,
    make_transition,
    volume_transform_coefficient,
)


class EvalRequest(BaseModel):
    source: str
    format: Literal["text", "latex", "json"] = "text"


class EvalResponse(BaseModel):
    kind: str
    m: Optional[int] = None
    degree: Optional[int] = None
    result: Union[str, dict]


class VerifyRequest(BaseModel):
    m_values: list[int] = Field(default=[1, 2, 3])
    cases: int = 25
    seed: int = 0
    filter: Optional[str] = None
    numeric: bool = False


class VerifyResponse(BaseModel):
    ok: bool
    text: str
    report: dict


class TransitionCheckRequest(BaseModel):
    m: int
    forward: list[str]
    inverse: list[str]
    seed: int = 0
    cases: int = 5


class TransitionCheckResponse(BaseModel):
    ok: bool
    consistent: bool
    naturality: dict
    volume_factor_is_squared_jacobian: bool


def _error_detail(exc: Exception) -> dict:
    if isinstance(exc, DslError):
        return {
            "type": type(exc).__name__,
            "message": exc.message,
            "line": exc.line,
            "column": exc.column,
        }
    return {"type": type(exc).__name__, "message": str(exc)}


def _value_kind(value) -> tuple:
    if isinstance(value, ScalarExpr):
        return "scalar", None, None
    if isinstance(value, Form):
        return "form", value.m, value.degree
    if isinstance(value, BaseForm):
        return "base_form", value.m, value.degree
    if isinstance(value, VectorFieldTM):
        return "vector_field", value.m, None
    if isinstance(value, BaseVectorField):
        return "base_vector_field", value.m, None
    if isinstance(value, VectorValuedForm):
        return "vector_valued_form", value.m, value.degree
    return type(value).__name__, None, None


def create_app() -> FastAPI:
    app = FastAPI(
        title="tangentcalc",
        version=__version__,
        description="Exact exterior calculus on tangent charts: lifts, the "
        "mirror map, the d_B complex and a mechanical identity suite.",
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/eval", response_model=EvalResponse)
    def eval_source(req: EvalRequest):
        try:
            doc = parse(req.source)
            value = doc.result
            if req.format == "json":
                result = to_json_dict(value)
            else:
                result = render(value, req.format)
        except (DslError, EngineError) as exc:
            raise HTTPException(status_code=400, detail=_error_detail(exc))
        except TypeError as exc:
            raise HTTPException(status_code=400, detail=_error_detail(exc))
        kind, m, degree = _value_kind(value)
        return EvalResponse(kind=kind, m=m, degree=degree, result=result)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        cfg = SuiteConfig(
            m_values=tuple(req.m_values),
            cases=req.cases,
            seed=req.seed,
            filter=req.filter,
            numeric=req.numeric,
        )
        report = run_suite(cfg)
        return VerifyResponse(
            ok=report.failed == 0,
            text=report.render_text(),
            report=report.to_json_dict(),
        )

    @app.post("/transition-check", response_model=TransitionCheckResponse)
    def transition_check(req: TransitionCheckRequest):
        try:
            forward = [_parse_base_scalar(req.m, s) for s in req.forward]
            inverse = [_parse_base_scalar(req.m, s) for s in req.inverse]
            T = make_transition(forward, inverse)
        except (DslError, EngineError) as exc:
            raise HTTPException(status_code=400, detail=_error_detail(exc))
        consistent = check_consistency_identity(T)
        naturality = {}
        rng = random.Random(f"transition-check:{req.seed}")
        for kind in ("pullback", "vertical", "complete", "xi", "B"):
            ok = True
            for _ in range(req.cases):
                if kind == "pullback":
                    obj = rand_base_form(req.m, rng.randint(1, req.m), rng)
                elif kind == "vertical":
                    obj = rand_base_field(req.m, rng)
                elif kind == "complete":
                    obj = rng.choice(
                        [
                            lambda: rand_base_field(req.m, rng),
                            lambda: rand_base_form(req.m, rng.randint(0, req.m), rng),
                            lambda: rand_base_scalar(req.m, rng),
                        ]
                    )()
                else:
                    obj = None
                if not check_naturality(kind, obj, T):
                    ok = False
                    break
                if kind in ("xi", "B"):
                    break  # no random data involved
            naturality[kind] = ok
        det = jacobian_determinant(T, "inverse")
        volume_ok = volume_transform_coefficient(T) == det * det
        return TransitionCheckResponse(
            ok=consistent and volume_ok and all(naturality.values()),
            consistent=consistent,
            naturality=naturality,
            volume_factor_is_squared_jacobian=volume_ok,
        )

    return app


def _parse_base_scalar(m: int, source: str) -> ScalarExpr:
    doc = parse(f"m={m}; {source}")
    value = doc.result
    if isinstance(value, Form) and value.degree == 0:
        value = value.as_scalar()
    if not isinstance(value, ScalarExpr):
        raise DslError(f"transition components must be scalars, got {source!r}")
    return value


app = create_app()
