"""Base change to moderate models and the local toric semistable reduction.

Two constructions live here.  The first turns a general germ
(xy = f(z^r, t)) into a base change t = u^d and a list of moderate germs
(xy = z^r - u^{n_i}), one per root of f after the base change; the degrees
and orders come from the Newton polygon of f, with d minimal (the lcm of
the slope denominators).  The second is the normalization of the local
model (u^d = z_1^{n_1} * ... * z_k^{n_k}): the number of components is
gcd(d, n_1, ..., n_k), each component is a simplicial toric variety, and a
toric resolution with reduced central fiber is certified by a unimodular
triangulation all of whose rays sit at u-height 1.

The component is computed two ways and both are reported: the quoted
presentation (orthant in Z^k + Z*(1/d)(n_1, ..., n_k)) and the kernel
presentation derived by Smith/Hermite reduction of the character-lattice
relation, which is the actual normalization.  The two need not be
isomorphic (already for u^3 = z1*z2^2 the normalization has type 1/3(1,1),
not 1/3(1,2)); mismatches are flagged, never suppressed.  A reduced-fiber
triangulation exists iff every n_i divides the base-change degree, so
certification runs at the minimal sufficiently divisible degree
lcm(d, n_1, ..., n_k), recorded in the plan next to d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .germs import (
    GermError,
    HypersurfaceGerm,
    SideConditionError,
    SparsePoly,
    binomial_germ,
    classify,
    germ_to_dict,
    two_variable_profile,
)
from .intlinalg import gcd_all, hermite_normal_form, lcm_all, smith_normal_form
from .toric import (
    Lattice,
    LatticeCone,
    Triangulation,
    cones_isomorphic,
    unimodular_triangulate_reduced_fiber,
)


class ReductionError(GermError):
    """Invalid input to the semistable-reduction constructions."""


@dataclass(frozen=True)
class HullSegment:
    """One lower-hull segment of a Newton polygon.

    slope_num/slope_den is the reduced root order in t, lattice_length the
    number of lattice points minus one; the segment carries
    lattice_length * slope_den roots.  face_factor_degrees lists
    (degree, multiplicity) for the rational factorization of the face
    polynomial; when it has factors of degree > 1 the coincident-order
    branches are reported unsplit.
    """

    slope_num: int
    slope_den: int
    lattice_length: int
    face_coeffs: tuple[tuple[int, Fraction], ...]
    face_factor_degrees: tuple[tuple[int, int], ...]

    @property
    def root_count(self) -> int:
        return self.lattice_length * self.slope_den

    @property
    def fully_split(self) -> bool:
        return all(deg == 1 for deg, _ in self.face_factor_degrees)


@dataclass(frozen=True)
class NewtonData:
    f: SparsePoly
    lower_hull: tuple[HullSegment, ...]
    d: int

    def orders(self) -> tuple[int, ...]:
        out = []
        for seg in self.lower_hull:
            order = self.d * seg.slope_num // seg.slope_den
            out.extend([order] * seg.root_count)
        return tuple(sorted(out))


def _validate_side_conditions(f: SparsePoly) -> None:
    if f.is_zero() or f.nvars() != 2:
        raise ReductionError("f must be a nonzero polynomial in (Z, t)")
    if f.constant_term() != 0:
        raise SideConditionError("f(0, 0) != 0: no branch through the origin")
    if f.set_var_zero(0).is_zero():
        raise SideConditionError("f(0, t) = 0: the curve singularity is not isolated")
    if f.set_var_zero(1).is_zero():
        raise SideConditionError("f(Z, 0) = 0: excluded (the xy = t case)")
    from .germs import _squarefree_through_origin

    if not _squarefree_through_origin(f):
        raise SideConditionError(
            "f has a repeated factor through the origin: not an isolated "
            "curve singularity"
        )


def _face_factor_degrees(coeffs: list[Fraction]) -> tuple[tuple[int, int], ...]:
    import sympy

    s = sympy.Symbol("s")
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * s**k
        for k, c in enumerate(coeffs)
    )
    _, factors = sympy.factor_list(sympy.Poly(expr, s))
    return tuple(
        sorted((int(sympy.degree(fact, s)), int(mult)) for fact, mult in factors)
    )


def newton_data(f: SparsePoly) -> NewtonData:
    """Newton polygon of f(Z, t) with side-condition validation."""
    _validate_side_conditions(f)
    lowest: dict[int, int] = {}
    for (i, j), _ in f.terms:
        lowest[i] = min(lowest.get(i, j), j)
    pts = sorted(lowest.items())
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    segments = []
    denominators = [1]
    for (i1, j1), (i2, j2) in zip(hull, hull[1:]):
        if j1 == 0:
            break
        if j2 >= j1:
            break
        di, dj = i2 - i1, j1 - j2
        g = gcd(di, dj)
        p_red, q_red = dj // g, di // g
        face = []
        for step in range(g + 1):
            ii = i1 + step * q_red
            jj = j1 - step * p_red
            face.append((step, f.coefficient((ii, jj))))
        segments.append(
            HullSegment(
                slope_num=p_red,
                slope_den=q_red,
                lattice_length=g,
                face_coeffs=tuple(face),
                face_factor_degrees=_face_factor_degrees([c for _, c in face]),
            )
        )
        denominators.append(q_red)
    if not segments:
        raise SideConditionError("Newton polygon has no positive-slope part")
    d = lcm_all(denominators)
    return NewtonData(f=f, lower_hull=tuple(segments), d=d)


def branch_orders(f: SparsePoly) -> tuple[int, tuple[int, ...]]:
    """Base-change degree d (lcm of slope denominators, minimal) and the
    u-adic orders of the roots of f(Z, u^d), with multiplicity.

    Conservation law: the orders sum to d times the t-adic order of f(0, t).
    """
    data = newton_data(f)
    return data.d, data.orders()


# ---------------------------------------------------------------------------
# Normalization of u^d = prod z_i^{n_i}.

def _kernel_basis(vec: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Basis of the saturated lattice {x : vec . x = 0} in Z^len(vec)."""
    n = len(vec)
    rows = [(vec[i],) + tuple(int(i == j) for j in range(n)) for i in range(n)]
    h = hermite_normal_form([list(r) for r in rows])
    return [row[1:] for row in h if row[0] == 0]


def _coords_in_rows(rows, vec) -> tuple[int, ...]:
    """Integer coordinates of vec in the row lattice (must be a member)."""
    from .intlinalg import solve_fraction

    k = len(rows)
    n = len(rows[0])
    # Solve over the span: pick the square system on k independent columns.
    cols = []
    rank_rows: list[list[Fraction]] = []
    for j in range(n):
        trial = [row[j] for row in rows]
        candidate = rank_rows + [[Fraction(x) for x in trial]]
        if _fraction_rank(candidate) == len(candidate):
            rank_rows = candidate
            cols.append(j)
        if len(cols) == k:
            break
    sub = [[Fraction(rows[i][j]) for j in cols] for i in range(k)]
    rhs = [Fraction(vec[j]) for j in cols]
    sol = solve_fraction(sub, rhs)
    # Consistency on the remaining columns.
    for j in range(n):
        val = sum(sol[i] * rows[i][j] for i in range(k))
        if val != vec[j]:
            raise ReductionError(f"{vec} is not in the row lattice")
    if any(c.denominator != 1 for c in sol):
        raise ReductionError(f"{vec} is not an integral member of the lattice")
    return tuple(int(c) for c in sol)


def _fraction_rank(rows) -> int:
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class ComponentData:
    """One normalization component of (u^d = prod z_i^{n_i}), presented two
    ways, with the component count certified by Smith normal form."""

    d: int
    orders: tuple[int, ...]
    e: int                      # gcd(d, n_1, ..., n_k)
    e_snf: int                  # torsion order from the SNF route
    quoted_group_order: int     # the quoted type 1/d(n_1, ..., n_k)
    formula_cone: LatticeCone   # orthant in Z^k + Z*(1/d)(n)
    formula_lattice_index: int  # actual order of that overlattice: d / e
    formula_multiplicity: int
    snf_cone: LatticeCone       # kernel-lattice presentation (standard Z^k)
    snf_multiplicity: int
    snf_height: tuple[int, ...]  # u-grading on the kernel presentation
    presentations_match: bool | None

    def height_one_points(self) -> list[tuple[int, ...]]:
        """Lattice points of the kernel cone at u-height 1."""
        e = self.e
        dd = self.d // e
        m = tuple(x // e for x in self.orders)
        sols: list[tuple[int, ...]] = []

        def rec(idx, remaining, acc):
            if idx == len(m) - 1:
                if remaining % m[idx] == 0:
                    sols.append(tuple(acc + [remaining // m[idx]]))
                return
            step = m[idx]
            for val in range(remaining // step + 1):
                rec(idx + 1, remaining - val * step, acc + [val])

        rec(0, dd, [])
        basis = _kernel_basis(tuple(m) + (-dd,))
        return [_coords_in_rows(basis, tuple(y) + (1,)) for y in sorted(sols)]


def normalization_components(d: int, orders) -> ComponentData:
    """Component count and toric model of the normalization of
    (u^d = prod z_i^{n_i}).

    The count e is gcd(d, n_i), cross-checked against the Smith normal form
    of the character-lattice relation (n_1, ..., n_k, -d).  The component
    cone is returned in the quoted presentation (orthant in
    Z^k + Z*(1/d)(n)) and in the kernel presentation actually cut out by
    the relation; disagreement between the two is reported in
    ``presentations_match``, never silently resolved.
    """
    d = int(d)
    orders = tuple(int(x) for x in orders)
    if d < 1 or not orders or any(x < 1 for x in orders):
        raise ReductionError("need d >= 1 and branch orders >= 1")
    k = len(orders)
    e = gcd_all((d,) + orders)
    relation = orders + (-d,)
    invariants, _, _ = smith_normal_form([list(relation)])
    e_snf = invariants[0]

    formula_lattice = Lattice(rank=k, denom=d, weight_rows=(orders,))
    rays = tuple(
        tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k)
    )
    formula_cone = LatticeCone(formula_lattice, rays)

    dd, m = d // e, tuple(x // e for x in orders)
    basis = _kernel_basis(m + (-dd,))
    if len(basis) != k:
        raise ReductionError("kernel lattice has unexpected rank")
    snf_rays = []
    for i in range(k):
        g = gcd(dd, m[i])
        vec = tuple(
            (dd // g if j == i else 0) for j in range(k)
        ) + (m[i] // g,)
        snf_rays.append(_coords_in_rows(basis, vec))
    snf_cone = LatticeCone(Lattice(rank=k), tuple(snf_rays))
    snf_height = tuple(row[k] for row in basis)

    match: bool | None = None
    if k <= 4:
        match = cones_isomorphic(formula_cone, snf_cone)

    return ComponentData(
        d=d,
        orders=orders,
        e=e,
        e_snf=e_snf,
        quoted_group_order=d,
        formula_cone=formula_cone,
        formula_lattice_index=formula_lattice.index_over_standard(),
        formula_multiplicity=formula_cone.multiplicity(),
        snf_cone=snf_cone,
        snf_multiplicity=snf_cone.multiplicity(),
        snf_height=snf_height,
        presentations_match=match,
    )


def semistable_resolve_component(
    c: LatticeCone, u_height, points=None
) -> Triangulation:
    """Toric resolution of a normalization component with reduced fiber:
    delegates to the certified unimodular triangulation."""
    return unimodular_triangulate_reduced_fiber(c, u_height, points=points)


@lru_cache(maxsize=None)
def certified_component_triangulation(
    d: int, orders: tuple[int, ...]
) -> tuple[ComponentData, Triangulation]:
    """Component data and certified triangulation at a degree where the
    reduced-fiber certificate is attainable (requires n_i | d for all i)."""
    comp = normalization_components(d, orders)
    tri = semistable_resolve_component(
        comp.snf_cone, comp.snf_height, points=comp.height_one_points()
    )
    return comp, tri


def certification_degree(d: int, orders) -> int:
    """Minimal multiple of d divisible by every branch order: the smallest
    base-change degree at which the reduced-fiber certificate can exist."""
    return lcm_all((int(d),) + tuple(int(x) for x in orders))


# ---------------------------------------------------------------------------
# The full plan for a general germ.

@dataclass(frozen=True)
class ReductionPlan:
    germ: HypersurfaceGerm
    newton: NewtonData
    d: int
    branch_orders: tuple[int, ...]
    moderate_germs: tuple[HypersurfaceGerm, ...]
    e: int
    component: ComponentData
    certification_degree: int
    certified_component: ComponentData
    triangulation: Triangulation

    def certificates(self) -> dict:
        cert = self.triangulation.certificate()
        return {
            "component_count_matches_snf": self.component.e
            == self.component.e_snf,
            "presentations_match": self.component.presentations_match,
            "triangulation_unimodular": cert["unimodular"],
            "rays_at_height_one": cert["rays_at_height_one"],
            "conservation": sum(self.branch_orders)
            == self.d * _t_order_at_zero(self.newton.f),
        }


def _t_order_at_zero(f: SparsePoly) -> int:
    tail = f.set_var_zero(0)
    return min(j for (_, j), _ in tail.terms)


def moderate_model(g: HypersurfaceGerm) -> ReductionPlan:
    """Base change and small partial resolution data for a general germ
    (xy = f(z^r, t)): one moderate germ (xy = z^r - u^{n_i}) per root.
    """
    cls = classify(g)
    if cls.case_label != "2.7.3.1":
        raise ReductionError(
            f"moderate_model needs a germ of class 2.7.3.1, got {cls.case_label}"
        )
    r = g.ambient.r
    a = cls.params()["a"]
    f = two_variable_profile(g)
    data = newton_data(f)
    orders = data.orders()
    germs = tuple(binomial_germ(r, a, n, tail_coeff=-1) for n in orders)
    component = normalization_components(data.d, orders)
    cert_degree = certification_degree(data.d, orders)
    certified, tri = certified_component_triangulation(cert_degree, orders)
    return ReductionPlan(
        germ=g,
        newton=data,
        d=data.d,
        branch_orders=orders,
        moderate_germs=germs,
        e=component.e,
        component=component,
        certification_degree=cert_degree,
        certified_component=certified,
        triangulation=tri,
    )


# ---------------------------------------------------------------------------
# Serialization.

def _cone_matrix(cone: LatticeCone) -> list[list[str]]:
    return [[str(x) for x in ray] for ray in cone.rays]


def _cone_int_matrix(cone: LatticeCone) -> list[list[int]]:
    return [list(map(int, cone.lattice.coords(ray))) for ray in cone.rays]


def component_to_dict(comp: ComponentData) -> dict:
    return {
        "d": comp.d,
        "orders": list(comp.orders),
        "e": comp.e,
        "e_snf": comp.e_snf,
        "quoted_group_order": comp.quoted_group_order,
        "formula_lattice_index": comp.formula_lattice_index,
        "formula_multiplicity": comp.formula_multiplicity,
        "formula_cone": _cone_matrix(comp.formula_cone),
        "snf_multiplicity": comp.snf_multiplicity,
        "snf_cone": _cone_int_matrix(comp.snf_cone),
        "presentations_match": comp.presentations_match,
    }


def plan_to_dict(plan: ReductionPlan) -> dict:
    return {
        "d": plan.d,
        "e": plan.e,
        "orders": list(plan.branch_orders),
        "newton": {
            "segments": [
                {
                    "slope": f"{seg.slope_num}/{seg.slope_den}",
                    "lattice_length": seg.lattice_length,
                    "root_count": seg.root_count,
                    "face_factor_degrees": [
                        list(x) for x in seg.face_factor_degrees
                    ],
                    "fully_split": seg.fully_split,
                }
                for seg in plan.newton.lower_hull
            ],
        },
        "moderate_germs": [germ_to_dict(g) for g in plan.moderate_germs],
        "component": component_to_dict(plan.component),
        "certification_degree": plan.certification_degree,
        "certified_component": component_to_dict(plan.certified_component),
        "triangulation": [
            _cone_int_matrix(c) for c in plan.triangulation.cones
        ],
        "certificates": plan.certificates(),
    }
