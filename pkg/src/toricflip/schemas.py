"""Pydantic request/response models shared by the service and the CLI.

The germ descriptor model mirrors the JSON schema used in job files:
``family``, ``r``, ``weights``, ``equation`` (list of
[exponent-vector, coefficient-numerator, coefficient-denominator]) and
``base_var``.  Rationals elsewhere in responses are rendered exactly as
"p/q" strings, never as decimals.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from .germs import HypersurfaceGerm, germ_from_dict, germ_to_dict


class GermModel(BaseModel):
    family: str
    r: int
    weights: list[int]
    equation: list[tuple[list[int], int, int]]
    base_var: int = 3

    def to_germ(self) -> HypersurfaceGerm:
        return germ_from_dict(self.model_dump())

    @staticmethod
    def from_germ(germ: HypersurfaceGerm) -> "GermModel":
        return GermModel(**germ_to_dict(germ))


class ClassifyResponse(BaseModel):
    case: str
    index: int
    moderate_case: str | None = None
    params: dict[str, int] = Field(default_factory=dict)
    germ: GermModel


class ChartModel(BaseModel):
    slot: int
    rays: list[list[str]]
    group_order: int
    group_weights: list[int]
    equation: list[tuple[list[int], int, int]]
    base_exponents: list[int]
    status: str
    child: GermModel | None = None


class BlowupRequest(BaseModel):
    germ: GermModel
    weights: list[str] | None = None


class BlowupResponse(BaseModel):
    center: GermModel
    weights: list[str]
    discrepancy: str
    fiber_mult: int
    charts: list[ChartModel]
    children: list[GermModel]


class TreeNodeModel(BaseModel):
    id: int
    germ: GermModel | None = None
    case: str
    moderate_case: str | None = None
    index: int
    params: dict[str, int] = Field(default_factory=dict)
    label: str


class TreeStepModel(BaseModel):
    node: int
    children: list[int]
    smooth_markers: list[int]
    weights: list[str]
    discrepancy: str
    fiber_mult: int


class TreeResponse(BaseModel):
    root: int
    nodes: list[TreeNodeModel]
    steps: list[TreeStepModel]
    blowups: int


class PlanResponse(BaseModel):
    d: int
    e: int
    orders: list[int]
    newton: dict[str, Any]
    moderate_germs: list[GermModel]
    component: dict[str, Any]
    certification_degree: int
    certified_component: dict[str, Any]
    triangulation: list[list[list[int]]]
    certificates: dict[str, Any]


class HJResponse(BaseModel):
    r: int
    a: int
    expansion: list[int]
    self_intersections: list[int]
    chain_determinant: int


class ScanRow(BaseModel):
    r: int
    a: int
    blowups: int
    discrepancies: list[str]
    disc_positive: bool
    fiber_mult_one: bool
    leaves_smooth: bool


class ScanResponse(BaseModel):
    max_r: int
    rows: list[ScanRow]


class ErrorResponse(BaseModel):
    error: str
    message: str
