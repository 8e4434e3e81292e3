"""Plain-text renderers for CLI output.

Tables are fixed-width with deterministic column order; exact rationals are
always rendered as "p/q", never as decimals.
"""

from __future__ import annotations

from .schemas import (
    BlowupResponse,
    ClassifyResponse,
    HJResponse,
    PlanResponse,
    ScanResponse,
    TreeResponse,
)


def render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    def fmt(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [fmt(headers), "-+-".join("-" * w for w in widths)]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines) + "\n"


def ok(flag: bool) -> str:
    return "ok" if flag else "FAIL"


def classify_table(resp: ClassifyResponse) -> str:
    rows = [[
        resp.case,
        resp.moderate_case or "-",
        str(resp.index),
        " ".join(f"{k}={v}" for k, v in sorted(resp.params.items())) or "-",
    ]]
    return render_table(["case", "moderate", "index", "params"], rows)


def blowup_table(resp: BlowupResponse) -> str:
    rows = []
    for chart in resp.charts:
        child = "-"
        if chart.child is not None:
            child = f"{chart.child.family} r={chart.child.r}"
        rows.append(
            [
                str(chart.slot),
                str(chart.group_order),
                chart.status,
                child,
            ]
        )
    table = render_table(["chart", "group", "status", "child"], rows)
    summary = (
        f"discrepancy {resp.discrepancy}  fiber_mult {resp.fiber_mult}  "
        f"children {len(resp.children)}\n"
    )
    return table + summary


def tree_table(resp: TreeResponse) -> str:
    labels = {n.id: n.label for n in resp.nodes}
    rows = []
    for step in resp.steps:
        rows.append(
            [
                labels[step.node],
                "(" + " ".join(step.weights) + ")",
                step.discrepancy,
                str(step.fiber_mult),
                ", ".join(labels[c] for c in step.children) or "-",
            ]
        )
    table = render_table(
        ["germ", "weights", "discrepancy", "fiber_mult", "children"], rows
    )
    return table + f"blowups {resp.blowups}\n"


def plan_table(resp: PlanResponse) -> str:
    certs = " ".join(f"{k}={ok(bool(v))}" for k, v in sorted(resp.certificates.items()))
    rows = [[
        str(resp.d),
        str(resp.e),
        ",".join(map(str, resp.orders)),
        str(len(resp.moderate_germs)),
        str(resp.certification_degree),
        str(len(resp.triangulation)),
    ]]
    table = render_table(
        ["d", "e", "orders", "germs", "cert_degree", "cones"], rows
    )
    return table + certs + "\n"


def scan_table(resp: ScanResponse) -> str:
    rows = []
    for row in resp.rows:
        rows.append(
            [
                str(row.r),
                str(row.a),
                str(row.blowups),
                ",".join(row.discrepancies),
                ok(row.disc_positive),
                ok(row.fiber_mult_one),
                ok(row.leaves_smooth),
            ]
        )
    return render_table(
        ["r", "a", "blowups", "discrepancies", "disc>0", "fiber=1", "smooth"],
        rows,
    )


def hj_table(resp: HJResponse) -> str:
    rows = [[
        str(resp.r),
        str(resp.a),
        " ".join(map(str, resp.expansion)),
        " ".join(map(str, resp.self_intersections)),
        str(resp.chain_determinant),
    ]]
    return render_table(
        ["r", "a", "expansion", "self-intersections", "det"], rows
    )
