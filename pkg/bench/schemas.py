"""Marshmallow schemas for run specifications and the CSV artifacts."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict

from marshmallow import ValidationError, fields, post_load, validate, validates_schema

from bench.fields import LowerCaseEnum, OptionalFloat, OptionalInteger, ScientificFloat
from bench.models import (
    ComparisonRow,
    EigenvalueRow,
    HistoryRow,
    RunSpec,
    SpectrumKind,
    SummaryRow,
)
from core.exceptions import UsageError
from core.preconditioners import FamilyKind
from core.serialization.base import BaseSchema
from core.serialization.csv_format import CSVSchema, HeaderMap
from core.solvers import SolverKind


class RunSpecSchema(BaseSchema):
    """Validates command-line input and loads a :class:`RunSpec`."""

    example = fields.Integer(required=True, validate=validate.OneOf([1, 2]))
    p = fields.Integer(required=True, validate=validate.Range(min=2))
    v = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    kind = LowerCaseEnum(FamilyKind, allow_none=True, load_default=FamilyKind.MGSSP)
    solver = LowerCaseEnum(SolverKind, load_default=SolverKind.GMRES)
    alpha = fields.Float(load_default=1.0, validate=validate.Range(min=0))
    beta = OptionalFloat(load_default=None, validate=validate.Range(min=0, min_inclusive=False))
    tolerance = fields.Float(load_default=1e-6, validate=validate.Range(min=0, min_inclusive=False))
    max_iterations = fields.Integer(load_default=500, validate=validate.Range(min=1))
    summary_path = fields.String(allow_none=True, load_default=None)
    history_path = fields.String(allow_none=True, load_default=None)
    eigs_path = fields.String(allow_none=True, load_default=None)
    spectrum = LowerCaseEnum(SpectrumKind, load_default=SpectrumKind.PRECONDITIONED)

    @validates_schema
    def validate_schema(self, data: Dict[str, Any], **_: Any) -> None:
        """Cross-field rules.

        Raises:
            ValidationError: If the combination of fields is inconsistent
        """
        if data.get("example") == 2 and data.get("p", 0) % 2:
            raise ValidationError("example 2 needs an even p", "p")
        kind = data.get("kind")
        if kind is None and data.get("solver") is SolverKind.STATIONARY:
            raise ValidationError("the stationary solver needs a preconditioner", "kind")
        if kind is not None and not kind.descriptor.tied and data.get("beta") is None:
            raise ValidationError(f"{kind.label} needs beta", "beta")
        if kind is not None and kind.descriptor.tied and not data.get("alpha", 0) > 0:
            raise ValidationError(f"{kind.label} ties beta to alpha, so alpha must be > 0", "alpha")

    @post_load
    def make_spec(self, data: Dict[str, Any], **_: Any) -> RunSpec:
        for key in ("summary_path", "history_path", "eigs_path"):
            if data.get(key):
                data[key] = Path(data[key])
        try:
            return RunSpec(**data)
        except UsageError as e:
            raise ValidationError(str(e)) from e


class SummaryCSVSchema(CSVSchema):
    """``method,example,p,v,alpha,beta,iterations,res,converged,time_ms``."""

    header_mappings = {
        "method": HeaderMap("method", ["method"]),
        "example": HeaderMap("example", ["example"]),
        "p": HeaderMap("p", ["p"]),
        "v": HeaderMap("v", ["v", "viscosity"]),
        "alpha": HeaderMap("alpha", ["alpha"]),
        "beta": HeaderMap("beta", ["beta"]),
        "iterations": HeaderMap("iterations", ["iterations", "it"]),
        "res": HeaderMap("res", ["res", "final_res"]),
        "converged": HeaderMap("converged", ["converged"]),
        "time_ms": HeaderMap("time_ms", ["time_ms", "cpu"]),
    }

    method = fields.String(required=True)
    example = fields.Integer(required=True)
    p = fields.Integer(required=True)
    v = fields.Float(required=True)
    alpha = OptionalFloat()
    beta = OptionalFloat()
    iterations = fields.Integer(required=True)
    res = ScientificFloat(required=True)
    converged = fields.Boolean(required=True)
    time_ms = fields.Float(required=True)

    @post_load
    def make_row(self, data: Dict[str, Any], **_: Any) -> SummaryRow:
        data.setdefault("alpha", None)
        data.setdefault("beta", None)
        return SummaryRow(**data)


class HistoryCSVSchema(CSVSchema):
    """``step,res``."""

    header_mappings = {
        "step": HeaderMap("step", ["step", "k"]),
        "res": HeaderMap("res", ["res"]),
    }

    step = fields.Integer(required=True, validate=validate.Range(min=0))
    res = ScientificFloat(required=True)

    @post_load
    def make_row(self, data: Dict[str, Any], **_: Any) -> HistoryRow:
        return HistoryRow(**data)


class EigenvalueCSVSchema(CSVSchema):
    """``re,im``."""

    header_mappings = {
        "re": HeaderMap("re", ["re", "real"]),
        "im": HeaderMap("im", ["im", "imag"]),
    }

    re = fields.Float(required=True)
    im = fields.Float(required=True)

    @post_load
    def make_row(self, data: Dict[str, Any], **_: Any) -> EigenvalueRow:
        return EigenvalueRow(**data)


class ComparisonCSVSchema(CSVSchema):
    """Expected-versus-observed table reproduction rows."""

    header_mappings = {
        "table": HeaderMap("table", ["table"]),
        "method": HeaderMap("method", ["method"]),
        "p": HeaderMap("p", ["p"]),
        "v": HeaderMap("v", ["v"]),
        "alpha": HeaderMap("alpha", ["alpha"]),
        "beta": HeaderMap("beta", ["beta"]),
        "expected": HeaderMap("expected", ["expected"]),
        "observed": HeaderMap("observed", ["observed"]),
        "margin": HeaderMap("margin", ["margin"]),
        "res": HeaderMap("res", ["res"]),
        "passed": HeaderMap("passed", ["passed"]),
    }

    table = fields.Integer(required=True)
    method = fields.String(required=True)
    p = fields.Integer(required=True)
    v = fields.Float(required=True)
    alpha = OptionalFloat()
    beta = OptionalFloat()
    expected = OptionalInteger()
    observed = fields.Integer(required=True)
    margin = fields.Integer(required=True)
    res = ScientificFloat(required=True)
    passed = fields.Boolean(required=True)

    @post_load
    def make_row(self, data: Dict[str, Any], **_: Any) -> ComparisonRow:
        for key in ("alpha", "beta", "expected"):
            data.setdefault(key, None)
        return ComparisonRow(**data)
