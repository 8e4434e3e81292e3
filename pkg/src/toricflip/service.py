"""FastAPI service wrapping the computational core.

Every operation is a pure function on immutable values, so the app is safe
under arbitrary concurrency.  Run with:

    uvicorn toricflip.service:app
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import api
from .germs import GermError
from .intlinalg import ExactLatticeError
from .schemas import (
    BlowupRequest,
    BlowupResponse,
    ClassifyResponse,
    GermModel,
    HJResponse,
    PlanResponse,
    ScanResponse,
    TreeResponse,
)
from .toric import ConeError, ReducedFiberError

app = FastAPI(
    title="toricflip",
    description=(
        "Exact computations with semistable 3-fold degeneration germs: "
        "classification, weighted-blow-up resolution, Hirzebruch-Jung "
        "chains, and local semistable reduction."
    ),
)


@app.exception_handler(GermError)
@app.exception_handler(ConeError)
@app.exception_handler(ReducedFiberError)
@app.exception_handler(ExactLatticeError)
async def domain_error_handler(request: Request, exc: Exception):
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/classify", response_model=ClassifyResponse)
def classify_endpoint(germ: GermModel) -> ClassifyResponse:
    return api.classify_germ(germ)


@app.post("/blowup", response_model=BlowupResponse)
def blowup_endpoint(request: BlowupRequest) -> BlowupResponse:
    return api.run_blowup(request.germ, request.weights)


@app.post("/resolve", response_model=TreeResponse)
def resolve_endpoint(germ: GermModel) -> TreeResponse:
    return api.run_resolve(germ)


@app.post("/resolve.dot", response_class=PlainTextResponse)
def resolve_dot_endpoint(germ: GermModel) -> str:
    return api.resolve_tree_for_dot(germ)


@app.post("/reduce", response_model=PlanResponse)
def reduce_endpoint(germ: GermModel) -> PlanResponse:
    return api.run_reduce(germ)


@app.get("/hj", response_model=HJResponse)
def hj_endpoint(r: int, a: int) -> HJResponse:
    return api.run_hj(r, a)


@app.get("/scan", response_model=ScanResponse)
def scan_endpoint(max_r: int) -> ScanResponse:
    return api.run_scan(max_r)
