"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import functools
import itertools
import json
import subprocess
import sys
import time
from fractions import Fraction
from math import gcd, lcm

from oracles import (
    binomial_tree_size,
    chart_singular_scan,
    expected_quotient_children,
    xy_t_tree_size,
)
from toricflip.blowup import (
    CHART_SINGULAR,
    chain_intersection_matrix,
    hj_resolve_surface,
    resolve,
    weighted_blowup,
)
from toricflip.germs import (
    FAMILY_BINOMIAL,
    FAMILY_XY_T,
    QuotientGerm,
    SparsePoly,
    binomial_germ,
    classify,
    f_germ,
    germ_from_dict,
    germ_to_dict,
    is_moderate,
    reid_tai_is_terminal,
    xy_t_germ,
)
from toricflip.intlinalg import hj_continued_fraction, hj_expand
from toricflip.reduction import (
    branch_orders,
    certification_degree,
    certified_component_triangulation,
    moderate_model,
    normalization_components,
)


def coprime_pairs(rmax):
    for r in range(2, rmax + 1):
        for a in range(1, r):
            if gcd(a, r) == 1:
                yield r, a


def criterion(number, description, budget=None):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number}: FAIL - {description}")
                raise
            elapsed = time.perf_counter() - start
            print(
                f"ACCEPTANCE {number}: PASS - {description} "
                f"[{elapsed:.2f}s]"
            )
            if budget is not None:
                assert elapsed < budget, (
                    f"criterion {number} exceeded its {budget}s budget "
                    f"({elapsed:.2f}s)"
                )
        return wrapper
    return deco


@criterion(1, "chart-claim suite: two/three singular points, exact match", 5.0)
def test_criterion_1_chart_claims():
    for r, a in coprime_pairs(30):
        step = weighted_blowup(xy_t_germ(r, a))
        expected = [
            xy_t_germ(m, anew) for m, anew in expected_quotient_children(r, a)
        ]
        assert list(step.singular_children()) == expected, (r, a)
        for n in range(2, 11):
            step = weighted_blowup(binomial_germ(r, a, n))
            children = list(step.singular_children())
            assert children[:-1] == expected, (r, a, n)
            assert children[-1] == binomial_germ(r, a, n - 1), (r, a, n)
            assert len(children) == len(expected) + 1


@criterion(2, "terminality/semistability: discrepancy 1/r, fiber mult 1, Reid-Tai", 5.0)
def test_criterion_2_certificates():
    for r, a in coprime_pairs(30):
        trees = [resolve(xy_t_germ(r, a)), resolve(binomial_germ(r, a, 5))]
        for tree in trees:
            for tree_step in tree.steps:
                step = tree_step.step
                r_step = step.center_germ.ambient.r
                assert step.discrepancy == Fraction(1, r_step)
                assert step.fiber_mult == 1
    for r, a in coprime_pairs(50):
        assert reid_tai_is_terminal(QuotientGerm(r, (a, r - a, 1)))


@criterion(3, "termination and tree sizes match the Euclidean-descent oracle", 10.0)
def test_criterion_3_tree_sizes():
    for r, a in coprime_pairs(30):
        assert resolve(xy_t_germ(r, a)).blowup_count() == xy_t_tree_size(r, a)
        for n in range(1, 11):
            tree = resolve(binomial_germ(r, a, n))
            assert tree.blowup_count() == binomial_tree_size(r, a, n), (r, a, n)
            for leaf in tree.leaves():
                assert leaf.is_smooth_marker or (
                    leaf.germ_class.case_label == "SMOOTH"
                )


@criterion(4, "Jacobian + fixed-point oracle agrees with pattern matching, r <= 7")
def test_criterion_4_jacobian_oracle():
    germs = []
    for r, a in coprime_pairs(7):
        germs.append(xy_t_germ(r, a))
        germs.extend(binomial_germ(r, a, n) for n in (1, 2, 3))
    for germ in germs:
        step = weighted_blowup(germ)
        for chart in step.charts:
            scan = chart_singular_scan(
                chart.equation, chart.group_order, chart.group_weights
            )
            assert scan["isolated"], (germ.label(), chart.slot)
            claimed = chart.status == CHART_SINGULAR
            assert claimed == scan["origin_singular"], (germ.label(), chart.slot)


@criterion(5, "semistable-reduction certificates for d <= 12, k <= 3, n_i <= 6", 30.0)
def test_criterion_5_reduction_certificates():
    mismatch = 0
    for d in range(1, 13):
        for k in (1, 2, 3):
            for orders in itertools.product(range(1, 7), repeat=k):
                comp = normalization_components(d, orders)
                expected_e = gcd(d, *orders)
                assert comp.e == expected_e
                assert comp.e_snf == expected_e, (d, orders)
                if comp.presentations_match is False:
                    mismatch += 1
                cert_deg = certification_degree(d, orders)
                assert cert_deg % d == 0
                assert all(cert_deg % n == 0 for n in orders)
                key = tuple(sorted(orders))
                _, tri = certified_component_triangulation(cert_deg, key)
                cert = tri.certificate()
                assert cert["unimodular"], (d, orders)
                assert cert["rays_at_height_one"], (d, orders)
    # The quoted component type and the normalization genuinely differ on
    # part of the range; that they are reported rather than suppressed is
    # itself checked here.
    assert mismatch > 0


@criterion(6, "branch-order conservation and end-to-end pipeline on >= 100 inputs")
def test_criterion_6_branch_orders_pipeline():
    pool = [
        (p, q, c)
        for p in (1, 2, 3)
        for q in (1, 2, 3, 4)
        if gcd(p, q) == 1
        for c in (1, -1, 2)
    ]

    def product_poly(factors):
        terms = {(0, 0): Fraction(1)}
        for p, q, c in factors:
            new = {}
            for (i, j), coeff in terms.items():
                new[(i + p, j)] = new.get((i + p, j), 0) + coeff
                new[(i, j + q)] = new.get((i, j + q), 0) - coeff * c
            terms = new
        return SparsePoly.from_dict(terms)

    corpus = [[f] for f in pool]
    corpus.extend(
        [list(pair) for pair in itertools.combinations(pool[:16], 2)][:90]
    )
    corpus.extend(
        [list(trip) for trip in itertools.combinations(pool[:8], 3)][:30]
    )
    assert len(corpus) >= 100
    for factors in corpus:
        f = product_poly(factors)
        d, orders = branch_orders(f)
        t_order = sum(q for _, q, _ in factors)
        assert sum(orders) == d * t_order, factors
        expected = sorted(d * q // p for p, q, _ in factors for _ in range(p))
        assert list(orders) == expected, factors

    ambients = [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2)]
    pipeline_inputs = corpus[0:3] + corpus[27:33] + corpus[117:120]
    for idx, factors in enumerate(pipeline_inputs):
        r, a = ambients[idx % len(ambients)]
        germ = f_germ(r, a, product_poly(factors))
        plan = moderate_model(germ)
        assert all(plan.certificates().values()), factors
        for moderate in plan.moderate_germs:
            assert is_moderate(moderate)
            tree = resolve(moderate)
            assert all(x > 0 for x in tree.discrepancies())
            assert all(m == 1 for m in tree.fiber_mults())
            for leaf in tree.leaves():
                assert leaf.is_smooth_marker or (
                    leaf.germ_class.case_label == "SMOOTH"
                )


@criterion(7, "Hirzebruch-Jung suite to r = 200: reconstruction, |det| = r, negative definite")
def test_criterion_7_hj_suite():
    for r, a in coprime_pairs(200):
        expansion = hj_continued_fraction(r, a)
        assert all(b >= 2 for b in expansion)
        assert hj_expand(expansion) == Fraction(r, a)
        chain = hj_resolve_surface(r, a)
        assert chain == [-b for b in expansion]
        # Leading principal minors of the tridiagonal chain matrix via the
        # three-term recurrence D_k = d_k D_{k-1} - D_{k-2}: negative
        # definite iff their signs alternate, and |D_last| = r.
        dm2, dm1 = 0, 1
        minors = []
        for d in chain:
            dm2, dm1 = dm1, d * dm1 - dm2
            minors.append(dm1)
        for k, minor in enumerate(minors, start=1):
            assert minor * (-1) ** k > 0, (r, a, k)
        assert abs(minors[-1]) == r, (r, a)


@criterion(8, "CLI determinism: scan --max-r 20 byte-identical, JSON round-trips")
def test_criterion_8_cli_determinism():
    cmd = [sys.executable, "-m", "toricflip.cli", "scan", "--max-r", "20"]
    first = subprocess.run(cmd, capture_output=True, check=True)
    second = subprocess.run(cmd, capture_output=True, check=True)
    assert first.stdout == second.stdout
    assert first.stdout

    resolve_cmd = [
        sys.executable, "-m", "toricflip.cli",
        "resolve", "--family", "xy_t", "--r", "17", "--a", "5",
    ]
    out = subprocess.run(resolve_cmd, capture_output=True, check=True)
    assert out.stdout == subprocess.run(
        resolve_cmd, capture_output=True, check=True
    ).stdout
    payload = json.loads(out.stdout)
    for node in payload["nodes"]:
        if node["germ"] is not None:
            assert germ_to_dict(germ_from_dict(node["germ"])) == node["germ"]
