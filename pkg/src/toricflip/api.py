"""Handler layer: every operation the service and the CLI expose.

These functions take and return pydantic models only; the CLI calls them
in-process (no network involved) and the FastAPI app wraps them one-to-one.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from . import blowup as bl
from . import reduction as red
from .germs import GermError, HypersurfaceGerm, classify, germ_from_dict
from .germs import binomial_germ, smooth_germ, xy_t_germ, xyz_t_germ
from .intlinalg import det_int, hj_continued_fraction
from .schemas import (
    BlowupResponse,
    ChartModel,
    ClassifyResponse,
    GermModel,
    HJResponse,
    PlanResponse,
    ScanResponse,
    ScanRow,
    TreeResponse,
)


def germ_from_flags(
    family: str, r: int | None, a: int | None, n: int | None
) -> HypersurfaceGerm:
    """Build a germ from CLI-style parameters (file descriptors cover the
    families with free polynomial data)."""
    if family == "xyz_t":
        return xyz_t_germ()
    if family == "smooth":
        return smooth_germ()
    if family == "xy_t":
        if r is None:
            raise GermError("--r is required for the xy_t family")
        return xy_t_germ(r, a)
    if family == "moderate_binomial":
        if r is None or n is None:
            raise GermError("--r and --n are required for the binomial family")
        return binomial_germ(r, a, n)
    raise GermError(
        f"family {family!r} cannot be built from flags; supply --file with a "
        "germ descriptor (supported flag families: xyz_t, xy_t, "
        "moderate_binomial, smooth)"
    )


def classify_germ(model: GermModel) -> ClassifyResponse:
    germ = model.to_germ()
    cls = classify(germ)
    return ClassifyResponse(
        case=cls.case_label,
        index=cls.index,
        moderate_case=cls.moderate_label,
        params=cls.params(),
        germ=GermModel.from_germ(germ),
    )


def run_blowup(model: GermModel, weights=None) -> BlowupResponse:
    germ = model.to_germ()
    parsed = None
    if weights:
        parsed = tuple(Fraction(w) for w in weights)
    step = bl.weighted_blowup(germ, parsed)
    payload = bl.step_to_dict(step)
    return BlowupResponse(
        center=GermModel(**payload["center"]),
        weights=payload["weights"],
        discrepancy=payload["discrepancy"],
        fiber_mult=payload["fiber_mult"],
        charts=[ChartModel(**chart) for chart in payload["charts"]],
        children=[GermModel(**c) for c in payload["children"]],
    )


def run_resolve(model: GermModel) -> TreeResponse:
    tree = bl.resolve(model.to_germ())
    return TreeResponse(**bl.tree_to_dict(tree))


def run_reduce(model: GermModel) -> PlanResponse:
    plan = red.moderate_model(model.to_germ())
    return PlanResponse(**red.plan_to_dict(plan))


def run_hj(r: int, a: int) -> HJResponse:
    expansion = hj_continued_fraction(r, a)
    chain = bl.hj_resolve_surface(r, a)
    det = det_int(bl.chain_intersection_matrix(chain))
    return HJResponse(
        r=r, a=a, expansion=expansion, self_intersections=chain,
        chain_determinant=det,
    )


def run_scan(max_r: int) -> ScanResponse:
    """Resolve (xy = t) germs for every coprime pair up to the bound and
    tabulate tree sizes, discrepancies, and certificate results, in
    deterministic input order."""
    if max_r < 2:
        raise GermError("--max-r must be at least 2")
    rows = []
    for r in range(2, max_r + 1):
        for a in range(1, r):
            if gcd(a, r) != 1:
                continue
            tree = bl.resolve(xy_t_germ(r, a))
            discs = sorted(set(tree.discrepancies()))
            rows.append(
                ScanRow(
                    r=r,
                    a=a,
                    blowups=tree.blowup_count(),
                    discrepancies=[
                        f"{x.numerator}/{x.denominator}" for x in discs
                    ],
                    disc_positive=all(x > 0 for x in tree.discrepancies()),
                    fiber_mult_one=all(m == 1 for m in tree.fiber_mults()),
                    leaves_smooth=all(
                        leaf.is_smooth_marker
                        or leaf.germ_class.case_label == "SMOOTH"
                        for leaf in tree.leaves()
                    ),
                )
            )
    return ScanResponse(max_r=max_r, rows=rows)


def resolve_tree_for_dot(model: GermModel) -> str:
    return bl.tree_to_dot(bl.resolve(model.to_germ()))
