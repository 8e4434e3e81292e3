"""Independent oracles used by the test and acceptance suites.

Nothing here calls into the blow-up engine's chart matcher: tree sizes come
from the Euclidean-descent recurrence, expected children from the closed
chart formula, and singular loci from a sympy Groebner scan of the chart
cover equations combined with fixed-point analysis of the group action.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import sympy


def expected_quotient_children(r: int, a: int) -> list[tuple[int, int]]:
    """Chart formula for blowing up (xy = t) in 1/r(a, r-a, 1, 0): the two
    quotient points (order m, new weight r mod m) for m in {a, r-a}, smooth
    ones omitted, sorted by order."""
    out = []
    for m in (a, r - a):
        if m >= 2:
            out.append((m, r % m))
    out.sort()
    return out


def xy_t_tree_size(r: int, a: int) -> int:
    """Blow-up count of the resolution of (xy = t) in 1/r(a, r-a, 1, 0) by
    Euclidean descent."""
    if r == 1:
        return 0
    count = 1
    for m, anew in expected_quotient_children(r, a):
        count += xy_t_tree_size(m, anew)
    return count


def binomial_tree_size(r: int, a: int, n: int) -> int:
    """Blow-up count for (xy = z^r + t^n): the quotient descent plus the
    n-descent along the third chart point."""
    if r == 1:
        return 0
    count = 1
    for m, anew in expected_quotient_children(r, a):
        count += xy_t_tree_size(m, anew)
    if n >= 2:
        count += binomial_tree_size(r, a, n - 1)
    return count


# ---------------------------------------------------------------------------
# Jacobian + group fixed-point scan over chart data.

_VARS = sympy.symbols("c0 c1 c2 c3")


def _to_sympy(poly):
    expr = sympy.Integer(0)
    for exps, coeff in poly.terms:
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for v, e in zip(_VARS, exps):
            if e:
                term *= v**e
        expr += term
    return sympy.expand(expr)


def _ideal_vanishes_only_at_origin(gens, variables):
    """V(gens) subset of {0}, checked by Rabinowitsch radical membership of
    every coordinate."""
    y = sympy.Symbol("rab")
    for v in variables:
        gb = sympy.groebner(
            list(gens) + [1 - y * v], *variables, y, order="grevlex"
        )
        if list(gb.exprs) != [sympy.Integer(1)]:
            return False
    return True


def _ideal_is_empty(gens, variables):
    gb = sympy.groebner(list(gens), *variables, order="grevlex")
    return list(gb.exprs) == [sympy.Integer(1)]


def chart_singular_scan(equation, group_order, group_weights):
    """Analyze one blow-up chart by brute force.

    Returns a dict with:
      origin_on_transform: the proper transform passes through the origin
      origin_singular:     the chart germ is singular at the origin
      isolated:            no other singular points anywhere on the chart
    The cover singular locus is computed from the Jacobian ideal; quotient
    points come from the fixed loci of the nontrivial group elements, each
    of which must meet the cover in the origin at most.
    """
    f = _to_sympy(equation)
    origin_on = f.subs({v: 0 for v in _VARS}) == 0
    gens = [g for g in [f] + [sympy.diff(f, v) for v in _VARS] if g != 0]
    cover_empty = _ideal_is_empty(gens, _VARS)
    cover_only_origin = cover_empty or _ideal_vanishes_only_at_origin(gens, _VARS)
    cover_singular_at_origin = (not cover_empty) and all(
        g.subs({v: 0 for v in _VARS}) == 0 for g in gens
    )

    fixed_ok = True
    for j in range(1, group_order):
        moved = [i for i, w in enumerate(group_weights) if (j * w) % group_order]
        sub = {_VARS[i]: 0 for i in moved}
        restricted = sympy.expand(f.subs(sub))
        free = [v for i, v in enumerate(_VARS) if i not in moved]
        if restricted == 0:
            # The whole fixed subspace lies on the cover: a positive-
            # dimensional quotient locus unless the subspace is the origin.
            if free:
                fixed_ok = False
            continue
        if not free:
            continue
        if restricted.is_number:
            continue  # fixed subspace misses the cover
        if len(free) == 1:
            # One free coordinate: the zero set of the restriction lies in
            # the origin iff it is a single monomial c*u^k.
            poly = sympy.Poly(restricted, free[0])
            if len(poly.monoms()) != 1:
                fixed_ok = False
        else:
            # Nonconstant on a plane or larger: the zero set is a
            # hypersurface and can never be contained in the origin.
            fixed_ok = False

    origin_singular = origin_on and (
        cover_singular_at_origin or (group_order >= 2)
    )
    isolated = cover_only_origin and fixed_ok
    return {
        "origin_on_transform": bool(origin_on),
        "origin_singular": bool(origin_singular),
        "isolated": bool(isolated),
    }
