"""Weighted blow-ups of moderate germs, chart bookkeeping, and the
terminating resolution recursion.

The blow-up is computed torically: the weight vector is a primitive lattice
point of the ambient orthant, the charts are the maximal cones of the star
subdivision, and the proper transform is obtained by transporting every
monomial to chart coordinates (pairing its exponent vector against the
chart rays) and dividing out the exceptional coordinate to the full
vanishing order.  Chart groups are extracted with Smith normal form and
each resulting germ is matched back into the supported normal forms, so
the claimed behaviour of the recursion is recomputed, never assumed.

For a germ (xy = t) or (xy = z^r + c*t^n) in 1/r(a, r-a, 1, 0) the
canonical weights are (1/r)(a, r-a, 1, r); the blow-up has discrepancy 1/r,
central-fiber multiplicity 1, and its singular points are quotient-family
germs of orders a and r-a (omitted when the order is 1) plus, for the
binomial family with n >= 2, the same germ with n replaced by n-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .germs import (
    FAMILY_BINOMIAL,
    FAMILY_XY_T,
    GermClass,
    GermError,
    HypersurfaceGerm,
    QuotientGerm,
    SparsePoly,
    classify,
    germ_to_dict,
    is_moderate,
)
from .intlinalg import hj_continued_fraction
from .toric import LatticeCone, chart_groups, star_subdivide

CHART_SINGULAR = "singular"
CHART_SMOOTH = "smooth"
CHART_EMPTY = "empty"


class BlowupError(GermError):
    """Weighted blow-up cannot be performed on this input."""


class InadmissibleWeightsError(BlowupError):
    """The equation is not graded integrally by the requested weights."""


class UnrecognizedChartError(BlowupError):
    """A chart germ left the supported normal-form families.

    This is reported rather than reconciled: it would mean the recursion
    produced a singular point outside the claimed list.
    """


@dataclass(frozen=True)
class Chart:
    """One affine chart of a weighted blow-up."""

    slot: int                      # coordinate replaced by the exceptional ray
    cone: LatticeCone
    group_order: int
    group_weights: tuple[int, ...]
    equation: SparsePoly           # proper transform in chart cover coordinates
    base_exponents: tuple[int, ...]  # pullback of the base parameter
    status: str
    child: HypersurfaceGerm | None


@dataclass(frozen=True)
class BlowupStep:
    center_germ: HypersurfaceGerm
    weights: tuple[Fraction, ...]
    charts: tuple[Chart, ...]
    discrepancy: Fraction
    fiber_mult: int

    def singular_children(self) -> tuple[HypersurfaceGerm, ...]:
        """Singular chart germs: quotient children by increasing group
        order, then the binomial continuation child."""
        quotient, continuation = [], []
        for chart in self.charts:
            if chart.status != CHART_SINGULAR:
                continue
            if chart.child.family == FAMILY_BINOMIAL:
                continuation.append(chart.child)
            else:
                quotient.append(chart.child)
        quotient.sort(key=lambda g: g.ambient.r)
        return tuple(quotient + continuation)


def canonical_weights(g: HypersurfaceGerm) -> tuple[Fraction, ...]:
    """The weight vector (1/r)(a, r-a, 1, r) for a quotient-family germ."""
    cls = classify(g)
    if cls.moderate_label not in ("3.4.2", "3.4.3") or cls.index == 1:
        raise BlowupError(
            f"no canonical blow-up weights for class {cls.case_label}"
        )
    r = cls.index
    a = cls.params()["a"]
    return (Fraction(a, r), Fraction(r - a, r), Fraction(1, r), Fraction(1))


def _pairing(exps, ray) -> Fraction:
    return sum(Fraction(e) * c for e, c in zip(exps, ray))


def _match_chart_germ(
    equation: SparsePoly,
    base_exps: tuple[int, ...],
    slot: int,
    groups: list[tuple[int, tuple[int, ...]]],
) -> tuple[str, HypersurfaceGerm | None]:
    """Match a chart germ into the supported families.

    Returns (status, child germ or None).  The detector tries, in order:
    a unit proper transform (the chart misses the origin), the binomial
    normal form, and a solvable coordinate presenting the chart as a
    quotient-family germ (xy = t).
    """
    if equation.constant_term() != 0:
        return CHART_EMPTY, None
    if len(groups) > 1:
        raise UnrecognizedChartError("chart group is not cyclic")
    order = groups[0][0] if groups else 1
    weights = groups[0][1] if groups else (0, 0, 0, 0)
    monos = equation.monomials()

    binom = _match_binomial(equation, base_exps, order, weights)
    if binom is not None:
        return CHART_SINGULAR, binom

    unit_slots = [
        m.index(1)
        for m in monos
        if sum(m) == 1
    ]
    base_support = {i for i, e in enumerate(base_exps) if e}
    if order == 1:
        if unit_slots:
            return CHART_SMOOTH, None
        raise UnrecognizedChartError(
            f"chart equation {equation} matches no supported family"
        )
    solvable = sorted(set(unit_slots) - base_support)
    if not solvable:
        raise UnrecognizedChartError(
            f"chart equation {equation} has no solvable coordinate away "
            "from the base parameter"
        )
    solved = solvable[0]
    if sorted(base_exps)[-1] != 1 or len(base_support) != 2 or solved in base_support:
        raise UnrecognizedChartError(
            f"base pullback {base_exps} is not a product of two chart "
            "coordinates"
        )
    first, second = sorted(base_support)
    # Present the germ as (xy = t): x is the non-exceptional factor of the
    # base pullback, y the exceptional one, z the leftover coordinate.
    if slot not in base_support:
        raise UnrecognizedChartError(
            "exceptional coordinate does not divide the base pullback"
        )
    y_slot = slot
    x_slot = first if first != slot else second
    z_slot = next(
        i for i in range(4) if i not in (x_slot, y_slot, solved)
    )
    raw = (weights[x_slot], weights[y_slot], weights[z_slot])
    if gcd(raw[2], order) != 1:
        raise UnrecognizedChartError(
            "third chart weight is not invertible; cannot normalize"
        )
    k = pow(raw[2], -1, order)
    scaled = tuple((k * w) % order for w in raw)
    if (scaled[0] + scaled[1]) % order != 0 or gcd(scaled[0], order) != 1:
        raise UnrecognizedChartError(
            f"chart weights {scaled} are not of the quotient-family form"
        )
    child = HypersurfaceGerm(
        QuotientGerm(order, (scaled[0], scaled[1], 1, 0)),
        SparsePoly.from_dict({(1, 1, 0, 0): 1, (0, 0, 0, 1): -1}),
        3,
        FAMILY_XY_T,
    )
    return CHART_SINGULAR, child


def _match_binomial(equation, base_exps, order, weights):
    """Recognize x'y' = c1*z'^R + c2*t'^m with R = chart group order >= 2.

    The base parameter must pull back to a single chart coordinate with
    exponent one, and the tail monomial is a power of that coordinate.
    """
    if order < 2 or len(equation.terms) != 3:
        return None
    base_support = [i for i, e in enumerate(base_exps) if e]
    if len(base_support) != 1 or base_exps[base_support[0]] != 1:
        return None
    ib = base_support[0]
    pair_mono = None
    single = []
    for exps, coeff in equation.terms:
        support = [i for i, e in enumerate(exps) if e]
        if len(support) == 2 and sorted(exps)[-1] == 1:
            pair_mono = (exps, coeff)
        elif len(support) == 1:
            single.append((exps, coeff, support[0]))
        else:
            return None
    if pair_mono is None or len(single) != 2:
        return None
    tail = next((s for s in single if s[2] == ib), None)
    if tail is None:
        return None
    z_term = next((s for s in single if s[2] != ib), None)
    if z_term is None:
        return None
    n_child = tail[0][ib]
    iz = z_term[2]
    if z_term[0][iz] != order:
        return None
    i1, i2 = [i for i, e in enumerate(pair_mono[0]) if e]
    if {i1, i2, iz, ib} != {0, 1, 2, 3}:
        return None
    if gcd(weights[iz], order) != 1:
        return None
    k = pow(weights[iz], -1, order)
    scaled = tuple((k * weights[i]) % order for i in (i1, i2, iz, ib))
    if scaled[3] != 0 or (scaled[0] + scaled[1]) % order != 0:
        return None
    if gcd(scaled[0], order) != 1:
        return None
    c_pair = pair_mono[1]
    eq = SparsePoly.from_dict(
        {
            (1, 1, 0, 0): 1,
            (0, 0, order, 0): z_term[1] / c_pair,
            (0, 0, 0, n_child): tail[1] / c_pair,
        }
    )
    child = HypersurfaceGerm(
        QuotientGerm(order, (scaled[0], scaled[1], 1, 0)), eq, 3, FAMILY_BINOMIAL
    )
    return child


def weighted_blowup(
    g: HypersurfaceGerm, weights=None
) -> BlowupStep:
    """Blow up the germ at the origin with the given (or canonical) weights.

    The weight vector must be a primitive lattice point of the ambient
    orthant grading the equation integrally; each chart of the star
    subdivision receives the proper transform and is classified back into
    the supported families.  All values are immutable, so the canonical
    blow-up of each germ is computed once and shared between trees.
    """
    if weights is None:
        return _canonical_blowup(g)
    return _weighted_blowup_impl(g, tuple(Fraction(x) for x in weights))


@lru_cache(maxsize=None)
def _canonical_blowup(g: HypersurfaceGerm) -> BlowupStep:
    return _weighted_blowup_impl(g, None)


def _weighted_blowup_impl(
    g: HypersurfaceGerm, weights: tuple[Fraction, ...] | None
) -> BlowupStep:
    cls = classify(g)
    if cls.moderate_label not in ("3.4.2", "3.4.3") or cls.index == 1:
        raise BlowupError(
            f"weighted blow-up supports the singular quotient families only, "
            f"got class {cls.case_label} of index {cls.index}"
        )
    w = canonical_weights(g) if weights is None else weights
    if len(w) != 4:
        raise InadmissibleWeightsError("weight vector must have 4 entries")
    if any(x <= 0 for x in w):
        raise InadmissibleWeightsError("weights must be strictly positive")
    base_weight = w[g.base_var]
    if base_weight.denominator != 1:
        raise InadmissibleWeightsError(
            f"base parameter gets non-integral weight {base_weight}"
        )
    orders = []
    for exps, _ in g.equation.terms:
        val = _pairing(exps, w)
        if val.denominator != 1:
            raise InadmissibleWeightsError(
                f"monomial {exps} has non-integral weight {val}"
            )
        orders.append(int(val))
    ord_w = min(orders)
    if ord_w < 1:
        raise InadmissibleWeightsError("equation has weight zero: no blow-up")

    ambient_cone = g.ambient.orthant()
    cones = star_subdivide(ambient_cone, w)
    if len(cones) == 1 and cones[0] == ambient_cone:
        raise InadmissibleWeightsError("weight vector is an existing ray")

    denom = g.ambient.r
    charts = []
    for cone in cones:
        slot = next(i for i, ray in enumerate(cone.rays) if ray == w)
        scaled_rays = [
            tuple(int(x * denom) for x in ray) for ray in cone.rays
        ]
        new_terms = {}
        for exps, coeff in g.equation.terms:
            chart_exps = []
            for ray in scaled_rays:
                num = sum(e * x for e, x in zip(exps, ray))
                if num % denom or num < 0:
                    raise InadmissibleWeightsError(
                        f"monomial {exps} is not integral on chart {slot}"
                    )
                chart_exps.append(num // denom)
            chart_exps[slot] -= ord_w
            new_terms[tuple(chart_exps)] = (
                new_terms.get(tuple(chart_exps), 0) + coeff
            )
        equation = SparsePoly.from_dict(new_terms)
        base_exps = [ray[g.base_var] // denom for ray in scaled_rays]
        groups = chart_groups(cone)
        status, child = _match_chart_germ(
            equation, tuple(base_exps), slot, groups
        )
        order = groups[0][0] if groups else 1
        gweights = groups[0][1] if groups else (0, 0, 0, 0)
        charts.append(
            Chart(
                slot=slot,
                cone=cone,
                group_order=order,
                group_weights=gweights,
                equation=equation,
                base_exponents=tuple(base_exps),
                status=status,
                child=child,
            )
        )

    discrepancy = sum(w) - ord_w - 1
    return BlowupStep(
        center_germ=g,
        weights=w,
        charts=tuple(charts),
        discrepancy=Fraction(discrepancy),
        fiber_mult=int(base_weight),
    )


def termination_measure(g: HypersurfaceGerm) -> tuple[int, int]:
    """Ordinal-like pair (r, n) that strictly decreases along the recursion.

    Smooth germs and the index-one families measure (1, 0); the quotient
    family measures (r, 0); the binomial family (r, n).  Children of a
    blow-up step are strictly smaller in lexicographic order.
    """
    cls = classify(g)
    if cls.moderate_label == "3.4.3":
        return (cls.index, cls.params()["n"])
    return (cls.index, 0)


@dataclass(frozen=True)
class TreeNode:
    """A germ node, or a smooth-marker leaf recording a resolved chart."""

    node_id: int
    germ: HypersurfaceGerm | None
    germ_class: GermClass

    @property
    def is_smooth_marker(self) -> bool:
        return self.germ is None


@dataclass(frozen=True)
class TreeStep:
    node_id: int
    step: BlowupStep
    child_ids: tuple[int, ...]      # singular children, canonical order
    marker_ids: tuple[int, ...]     # smooth-marker leaves, by chart slot


@dataclass(frozen=True)
class ResolutionTree:
    """Rooted tree of germs; each internal node carries its blow-up step
    and every branch terminates in smooth markers."""

    nodes: tuple[TreeNode, ...]
    steps: tuple[TreeStep, ...]

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def blowup_count(self) -> int:
        return len(self.steps)

    def leaves(self) -> tuple[TreeNode, ...]:
        internal = {s.node_id for s in self.steps}
        return tuple(n for n in self.nodes if n.node_id not in internal)

    def discrepancies(self) -> tuple[Fraction, ...]:
        return tuple(s.step.discrepancy for s in self.steps)

    def fiber_mults(self) -> tuple[int, ...]:
        return tuple(s.step.fiber_mult for s in self.steps)


def resolve(g: HypersurfaceGerm) -> ResolutionTree:
    """Repeated canonical weighted blow-up until every leaf is smooth.

    Requires a moderate germ; the index-one models are already semistable
    local models and yield a single-node tree with zero blow-ups.
    """
    if not is_moderate(g):
        raise BlowupError(
            "resolve needs a moderate germ; run the base-change construction "
            "first for the general families"
        )
    nodes: list[TreeNode] = []
    steps: list[TreeStep] = []
    smooth_class = GermClass("SMOOTH", 1)

    def visit(germ: HypersurfaceGerm, measure_bound=None) -> int:
        node_id = len(nodes)
        cls = classify(germ)
        nodes.append(TreeNode(node_id, germ, cls))
        measure = termination_measure(germ)
        if measure_bound is not None and not measure < measure_bound:
            raise BlowupError(
                f"termination measure failed to decrease: {measure} !< "
                f"{measure_bound}"
            )
        if cls.case_label == "SMOOTH" or cls.index == 1:
            return node_id
        step = weighted_blowup(germ)
        child_ids = tuple(
            visit(child, measure) for child in step.singular_children()
        )
        marker_ids = []
        for chart in step.charts:
            if chart.status == CHART_SMOOTH:
                marker_ids.append(len(nodes))
                nodes.append(TreeNode(len(nodes), None, smooth_class))
        steps.append(TreeStep(node_id, step, child_ids, tuple(marker_ids)))
        return node_id

    visit(g)
    steps.sort(key=lambda s: s.node_id)
    return ResolutionTree(tuple(nodes), tuple(steps))


def hj_resolve_surface(r: int, a: int) -> list[int]:
    """Self-intersections [-b_1, ..., -b_k] of the exceptional chain
    resolving the surface quotient singularity of type (r, a)."""
    return [-b for b in hj_continued_fraction(r, a)]


def chain_intersection_matrix(self_intersections) -> list[list[int]]:
    """Tridiagonal intersection matrix of an exceptional chain."""
    k = len(self_intersections)
    m = [[0] * k for _ in range(k)]
    for i, d in enumerate(self_intersections):
        m[i][i] = int(d)
        if i + 1 < k:
            m[i][i + 1] = m[i + 1][i] = 1
    return m


# ---------------------------------------------------------------------------
# Serialization.

def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _class_label(cls: GermClass) -> str:
    parts = [cls.case_label]
    for key, val in cls.parameters:
        parts.append(f"{key}={val}")
    if cls.index != 1:
        parts.insert(1, f"r={cls.index}")
    return " ".join(parts)


def step_to_dict(step: BlowupStep) -> dict:
    return {
        "center": germ_to_dict(step.center_germ),
        "weights": [_frac_str(x) for x in step.weights],
        "discrepancy": _frac_str(step.discrepancy),
        "fiber_mult": step.fiber_mult,
        "charts": [
            {
                "slot": chart.slot,
                "rays": [[_frac_str(x) for x in ray] for ray in chart.cone.rays],
                "group_order": chart.group_order,
                "group_weights": list(chart.group_weights),
                "equation": [
                    [list(e), c.numerator, c.denominator]
                    for e, c in chart.equation.terms
                ],
                "base_exponents": list(chart.base_exponents),
                "status": chart.status,
                "child": germ_to_dict(chart.child) if chart.child else None,
            }
            for chart in step.charts
        ],
        "children": [germ_to_dict(c) for c in step.singular_children()],
    }


def tree_to_dict(tree: ResolutionTree) -> dict:
    return {
        "root": tree.root.node_id,
        "nodes": [
            {
                "id": node.node_id,
                "germ": germ_to_dict(node.germ) if node.germ else None,
                "case": node.germ_class.case_label,
                "moderate_case": node.germ_class.moderate_label,
                "index": node.germ_class.index,
                "params": node.germ_class.params(),
                "label": _class_label(node.germ_class),
            }
            for node in tree.nodes
        ],
        "steps": [
            {
                "node": s.node_id,
                "children": list(s.child_ids),
                "smooth_markers": list(s.marker_ids),
                "weights": [_frac_str(x) for x in s.step.weights],
                "discrepancy": _frac_str(s.step.discrepancy),
                "fiber_mult": s.step.fiber_mult,
            }
            for s in tree.steps
        ],
        "blowups": tree.blowup_count(),
    }


def tree_to_dot(tree: ResolutionTree) -> str:
    """DOT graph of a resolution tree.

    Every blow-up step is one labeled edge from its germ node to an
    exceptional-divisor node E_k (the label is the discrepancy); singular
    children and smooth-marker leaves hang off E_k with plain edges.
    """
    lines = ["digraph resolution {", "  node [shape=box];"]
    for node in tree.nodes:
        label = "smooth" if node.is_smooth_marker else _class_label(node.germ_class)
        shape = ', shape=plaintext' if node.is_smooth_marker else ""
        lines.append(f'  n{node.node_id} [label="{label}"{shape}];')
    for k, s in enumerate(tree.steps):
        disc = _frac_str(s.step.discrepancy)
        lines.append(
            f'  e{k} [label="E{k} mult={s.step.fiber_mult}", shape=ellipse];'
        )
        lines.append(f'  n{s.node_id} -> e{k} [label="{disc}"];')
        for child in s.child_ids:
            lines.append(f"  e{k} -> n{child};")
        for marker in s.marker_ids:
            lines.append(f"  e{k} -> n{marker};")
    lines.append("}")
    return "\n".join(lines) + "\n"
