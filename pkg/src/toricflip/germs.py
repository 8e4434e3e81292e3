"""Normal-form descriptors for 3-fold degeneration germs and their
classification.

A germ is a hypersurface inside a four-dimensional cyclic quotient
1/r(w_1, w_2, w_3, w_4) together with a distinguished base variable t; the
supported families are the structured normal forms

    xyz_t              (xyz = t) in affine 4-space
    xy_t               (xy = t) in 1/r(a, r-a, 1, 0)
    moderate_binomial  (xy = z^r + c*t^n) in 1/r(a, r-a, 1, 0)
    xy_f_zr_t          (xy = f(z^r, t)) in 1/r(a, r-a, 1, 0)
    gorenstein_gt      (g(x,y,z) = t*f(x,y,z,t)) in affine 4-space
    smooth             explicitly smooth marker germs

Classification is pattern matching over these normal forms plus validation
of every side condition; it is not analytic recognition of arbitrary
series.  Case codes: "2.7.1", "2.7.2", "2.7.3.1", "2.7.3.2" and "SMOOTH"
name the degeneration-germ classes, and the stably-factorial ("moderate")
subfamilies carry the codes "3.4.1", "3.4.2", "3.4.3".  (The source
taxonomy prints one subcase label twice; this package uses the corrected
numbering with 2.7.3.2 for the index-one Du Val case.)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .toric import Lattice, LatticeCone

FAMILY_XYZ_T = "xyz_t"
FAMILY_XY_T = "xy_t"
FAMILY_BINOMIAL = "moderate_binomial"
FAMILY_F = "xy_f_zr_t"
FAMILY_GORENSTEIN = "gorenstein_gt"
FAMILY_SMOOTH = "smooth"

FAMILIES = (
    FAMILY_XYZ_T,
    FAMILY_XY_T,
    FAMILY_BINOMIAL,
    FAMILY_F,
    FAMILY_GORENSTEIN,
    FAMILY_SMOOTH,
)

CASE_SMOOTH = "SMOOTH"


class GermError(ValueError):
    """Base class for germ-descriptor failures."""


class FamilyValidationError(GermError):
    """Equation or ambient data inconsistent with the declared family."""


class SideConditionError(GermError):
    """A normal-form side condition is violated."""


@dataclass(frozen=True)
class SparsePoly:
    """Polynomial as a sorted tuple of (exponent vector, coefficient)."""

    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    @staticmethod
    def from_dict(d: dict) -> "SparsePoly":
        clean = {}
        for exps, coeff in d.items():
            c = Fraction(coeff)
            if c == 0:
                continue
            e = tuple(int(x) for x in exps)
            if any(x < 0 for x in e):
                raise GermError("negative exponent in polynomial")
            clean[e] = clean.get(e, 0) + c
        return SparsePoly(tuple(sorted((e, c) for e, c in clean.items() if c)))

    def __post_init__(self):
        terms = tuple(sorted((tuple(e), Fraction(c)) for e, c in self.terms))
        if any(c == 0 for _, c in terms):
            raise GermError("zero coefficient stored")
        widths = {len(e) for e, _ in terms}
        if len(widths) > 1:
            raise GermError("inconsistent arities in polynomial")
        object.__setattr__(self, "terms", terms)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.terms)
            object.__setattr__(self, "_hash", h)
        return h

    def is_zero(self) -> bool:
        return not self.terms

    def nvars(self) -> int:
        return len(self.terms[0][0]) if self.terms else 0

    def monomials(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e for e, _ in self.terms)

    def coefficient(self, exps) -> Fraction:
        target = tuple(exps)
        for e, c in self.terms:
            if e == target:
                return c
        return Fraction(0)

    def set_var_zero(self, var: int) -> "SparsePoly":
        return SparsePoly.from_dict(
            {e: c for e, c in self.terms if e[var] == 0}
        )

    def swap_vars(self, i: int, j: int) -> "SparsePoly":
        out = {}
        for e, c in self.terms:
            le = list(e)
            le[i], le[j] = le[j], le[i]
            out[tuple(le)] = c
        return SparsePoly.from_dict(out)

    def constant_term(self) -> Fraction:
        zero = (0,) * self.nvars() if self.terms else ()
        return self.coefficient(zero)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ("x", "y", "z", "t")[: self.nvars()]
        if self.nvars() == 2:
            names = ("Z", "t")
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class QuotientGerm:
    """Cyclic quotient 1/r(w_1, ..., w_n); weights stored reduced mod r."""

    r: int
    weights: tuple[int, ...]

    def __post_init__(self):
        if self.r < 1:
            raise GermError("group order must be positive")
        object.__setattr__(
            self, "weights", tuple(int(w) % self.r for w in self.weights)
        )

    @property
    def dim(self) -> int:
        return len(self.weights)

    def lattice(self) -> Lattice:
        return Lattice(rank=self.dim, denom=self.r, weight_rows=(self.weights,))

    def orthant(self) -> LatticeCone:
        return _orthant_cone(self.dim, self.r, self.weights)

    def label(self) -> str:
        return f"1/{self.r}({', '.join(map(str, self.weights))})"


@lru_cache(maxsize=None)
def _orthant_cone(dim: int, r: int, weights: tuple[int, ...]) -> LatticeCone:
    lattice = Lattice(rank=dim, denom=r, weight_rows=(weights,))
    rays = tuple(
        tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)
    )
    return LatticeCone(lattice, rays)


@dataclass(frozen=True)
class HypersurfaceGerm:
    """Hypersurface germ in a 4-dimensional quotient with a base parameter."""

    ambient: QuotientGerm
    equation: SparsePoly
    base_var: int
    family: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GermError(f"unknown family tag {self.family!r}")
        if self.ambient.dim != 4:
            raise GermError("ambient quotient must be 4-dimensional")
        if not 0 <= self.base_var < 4:
            raise GermError("base variable index out of range")
        if self.equation.is_zero() or self.equation.nvars() != 4:
            raise GermError("equation must be a nonzero polynomial in 4 variables")

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient, self.equation, self.base_var, self.family))
            object.__setattr__(self, "_hash", h)
        return h

    def label(self) -> str:
        return f"({self.equation}) in {self.ambient.label()}"


@dataclass(frozen=True)
class GermClass:
    """Classification result: degeneration case plus moderate subcase."""

    case_label: str
    index: int
    parameters: tuple[tuple[str, int], ...] = ()
    moderate_label: str | None = None

    def params(self) -> dict:
        return dict(self.parameters)


# ---------------------------------------------------------------------------
# Constructors for the supported normal forms.

def _quotient_ambient(r: int, a: int | None) -> tuple[QuotientGerm, int]:
    r = int(r)
    if r < 1:
        raise GermError("index r must be positive")
    if r == 1:
        return QuotientGerm(1, (0, 0, 0, 0)), 0
    if a is None:
        raise GermError("weight a is required when r > 1")
    a = int(a) % r
    if gcd(a, r) != 1:
        raise FamilyValidationError(f"need gcd(a, r) = 1, got a={a}, r={r}")
    return QuotientGerm(r, (a, r - a, 1, 0)), a


def xyz_t_germ() -> HypersurfaceGerm:
    eq = SparsePoly.from_dict({(1, 1, 1, 0): 1, (0, 0, 0, 1): -1})
    return HypersurfaceGerm(QuotientGerm(1, (0, 0, 0, 0)), eq, 3, FAMILY_XYZ_T)


def xy_t_germ(r: int, a: int | None = None) -> HypersurfaceGerm:
    ambient, _ = _quotient_ambient(r, a)
    eq = SparsePoly.from_dict({(1, 1, 0, 0): 1, (0, 0, 0, 1): -1})
    return HypersurfaceGerm(ambient, eq, 3, FAMILY_XY_T)


def binomial_germ(
    r: int, a: int | None, n: int, tail_coeff=1
) -> HypersurfaceGerm:
    """(xy = z^r + tail_coeff * t^n) in 1/r(a, r-a, 1, 0)."""
    ambient, _ = _quotient_ambient(r, a)
    n = int(n)
    if n < 1:
        raise GermError("exponent n must be >= 1")
    c = Fraction(tail_coeff)
    if c == 0:
        raise GermError("tail coefficient must be nonzero")
    eq = SparsePoly.from_dict(
        {(1, 1, 0, 0): 1, (0, 0, r, 0): -1, (0, 0, 0, n): -c}
    )
    return HypersurfaceGerm(ambient, eq, 3, FAMILY_BINOMIAL)


def f_germ(r: int, a: int | None, f: SparsePoly) -> HypersurfaceGerm:
    """(xy = f(z^r, t)) in 1/r(a, r-a, 1, 0) for a two-variable f(Z, t)."""
    ambient, _ = _quotient_ambient(r, a)
    if f.nvars() != 2:
        raise GermError("f must be a polynomial in (Z, t)")
    terms = {(1, 1, 0, 0): Fraction(1)}
    for (i, j), c in f.terms:
        exps = (0, 0, r * i, j)
        terms[exps] = terms.get(exps, 0) - c
    eq = SparsePoly.from_dict(terms)
    return HypersurfaceGerm(ambient, eq, 3, FAMILY_F)


def gorenstein_germ(g: SparsePoly, f: SparsePoly) -> HypersurfaceGerm:
    """(g(x,y,z) = t*f(x,y,z,t)) in affine 4-space; g a surface Du Val form."""
    if g.nvars() != 3:
        raise GermError("g must be a polynomial in (x, y, z)")
    if f.nvars() != 4:
        raise GermError("f must be a polynomial in (x, y, z, t)")
    terms = {}
    for (i, j, k), c in g.terms:
        terms[(i, j, k, 0)] = terms.get((i, j, k, 0), 0) + c
    for (i, j, k, l), c in f.terms:
        exps = (i, j, k, l + 1)
        terms[exps] = terms.get(exps, 0) - c
    eq = SparsePoly.from_dict(terms)
    return HypersurfaceGerm(QuotientGerm(1, (0, 0, 0, 0)), eq, 3, FAMILY_GORENSTEIN)


def duval_a_germ(n: int) -> HypersurfaceGerm:
    """(xy = z^{n+1}) degenerating with t: the A_n member of the g = tf family."""
    g = SparsePoly.from_dict({(1, 1, 0): 1, (0, 0, n + 1): -1})
    f = SparsePoly.from_dict({(0, 0, 0, 0): 1})
    return gorenstein_germ(g, f)


def smooth_germ() -> HypersurfaceGerm:
    eq = SparsePoly.from_dict({(1, 0, 0, 0): 1, (0, 0, 0, 1): -1})
    return HypersurfaceGerm(QuotientGerm(1, (0, 0, 0, 0)), eq, 3, FAMILY_SMOOTH)


# ---------------------------------------------------------------------------
# Classification.

def _check_semiinvariant(g: HypersurfaceGerm) -> None:
    r = g.ambient.r
    if r == 1:
        return
    w = g.ambient.weights
    classes = {
        sum(wi * ei for wi, ei in zip(w, exps)) % r for exps in g.equation.monomials()
    }
    if len(classes) > 1:
        raise FamilyValidationError(
            "equation is not semi-invariant for the group action"
        )


def _check_family_weights(g: HypersurfaceGerm) -> int:
    """Validate the 1/r(a, r-a, 1, 0) shape; return a."""
    r = g.ambient.r
    w = g.ambient.weights
    if r == 1:
        if w != (0, 0, 0, 0):
            raise FamilyValidationError("index-one ambient must have zero weights")
        return 0
    a = w[0]
    if w != (a, (r - a) % r, 1, 0) or gcd(a, r) != 1:
        raise FamilyValidationError(
            f"ambient weights {w} are not of the form (a, r-a, 1, 0) with "
            f"gcd(a, r) = 1"
        )
    return a


def _scaled_match(eq: SparsePoly, monomials: set[tuple[int, ...]]) -> bool:
    return set(eq.monomials()) == monomials


def two_variable_profile(g: HypersurfaceGerm) -> SparsePoly:
    """Extract f(Z, t) from an (xy = f(z^r, t)) equation."""
    r = g.ambient.r
    terms = {}
    for exps, c in g.equation.terms:
        if exps == (1, 1, 0, 0):
            continue
        if exps[0] or exps[1]:
            raise FamilyValidationError(
                "equation has x or y terms beyond the xy monomial"
            )
        if exps[2] % r:
            raise FamilyValidationError(
                f"z-exponent {exps[2]} is not a multiple of r={r}"
            )
        terms[(exps[2] // r, exps[3])] = -c
    return SparsePoly.from_dict(terms)


def _squarefree_through_origin(f: SparsePoly) -> bool:
    import sympy

    z, t = sympy.symbols("Z t")
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * z**i * t**j
        for (i, j), c in f.terms
    )
    poly = sympy.Poly(expr, z, t)
    g = sympy.gcd(poly, sympy.gcd(poly.diff(z), poly.diff(t)))
    return sympy.Poly(g, z, t).eval((0, 0)) != 0


@lru_cache(maxsize=None)
def classify(g: HypersurfaceGerm) -> GermClass:
    """Classify a normal-form germ, validating every side condition.

    Raises ``FamilyValidationError`` when the equation does not match the
    declared family and ``SideConditionError`` when a stated side condition
    fails (for instance f(Z, 0) = 0, which is excluded from the general
    (xy = f(z^r, t)) family).  Values are immutable, so results are cached.
    """
    _check_semiinvariant(g)
    r = g.ambient.r
    eq = g.equation

    if g.family == FAMILY_SMOOTH:
        return GermClass(CASE_SMOOTH, 1)

    if g.family == FAMILY_XYZ_T:
        if r != 1:
            raise FamilyValidationError("(xyz = t) lives in affine 4-space")
        mono = {
            tuple(1 if i != g.base_var else 0 for i in range(4)),
            tuple(int(i == g.base_var) for i in range(4)),
        }
        if not _scaled_match(eq, mono):
            raise FamilyValidationError("equation is not of the form xyz = t")
        return GermClass("2.7.1", 1, moderate_label="3.4.1")

    if g.family == FAMILY_XY_T:
        a = _check_family_weights(g)
        base = tuple(int(i == g.base_var) for i in range(4))
        if g.base_var != 3 or not _scaled_match(eq, {(1, 1, 0, 0), base}):
            raise FamilyValidationError("equation is not of the form xy = t")
        if r == 1:
            return GermClass(CASE_SMOOTH, 1)  # t solves out
        return GermClass(
            "2.7.2", r, parameters=(("a", a),), moderate_label="3.4.2"
        )

    if g.family == FAMILY_BINOMIAL:
        a = _check_family_weights(g)
        if g.base_var != 3:
            raise FamilyValidationError("binomial family uses t as base variable")
        monos = set(eq.monomials())
        if (1, 1, 0, 0) not in monos or len(monos) != 3:
            raise FamilyValidationError(
                "equation is not of the form xy = z^r + c*t^n"
            )
        rest = sorted(monos - {(1, 1, 0, 0)})
        z_mono = next((m for m in rest if m[2] and not m[3]), None)
        t_mono = next((m for m in rest if m[3] and not m[2]), None)
        if z_mono is None or t_mono is None or z_mono[:2] != (0, 0) or t_mono[:2] != (0, 0):
            raise FamilyValidationError(
                "equation is not of the form xy = z^r + c*t^n"
            )
        if z_mono[2] != r:
            raise FamilyValidationError(
                f"z-exponent {z_mono[2]} must equal the ambient order r={r}"
            )
        n = t_mono[3]
        if r == 1:
            return GermClass(CASE_SMOOTH, 1)  # z solves out
        return GermClass(
            "2.7.3.1",
            r,
            parameters=(("a", a), ("n", n)),
            moderate_label="3.4.3",
        )

    if g.family == FAMILY_F:
        a = _check_family_weights(g)
        if r == 1:
            raise FamilyValidationError(
                "the general (xy = f(z^r, t)) family requires r > 1"
            )
        if g.base_var != 3:
            raise FamilyValidationError("f-family uses t as base variable")
        if eq.coefficient((1, 1, 0, 0)) == 0:
            raise FamilyValidationError("equation lacks the xy monomial")
        f = two_variable_profile(g)
        if f.is_zero() or f.constant_term() != 0:
            raise SideConditionError("f must vanish at the origin")
        if f.set_var_zero(0).is_zero():
            raise SideConditionError("f(0, t) = 0: the germ is not isolated")
        if f.set_var_zero(1).is_zero():
            raise SideConditionError(
                "f(Z, 0) = 0: excluded from this family (the xy = t case)"
            )
        if not _squarefree_through_origin(f):
            raise SideConditionError(
                "f has a repeated factor through the origin: the curve "
                "singularity is not isolated"
            )
        monos = f.monomials()
        if len(monos) == 2 and (1, 0) in monos:
            other = next(m for m in monos if m != (1, 0))
            if other[0] == 0:
                return GermClass(
                    "2.7.3.1",
                    r,
                    parameters=(("a", a), ("n", other[1])),
                    moderate_label="3.4.3",
                )
        return GermClass("2.7.3.1", r, parameters=(("a", a),))

    if g.family == FAMILY_GORENSTEIN:
        if r != 1:
            raise FamilyValidationError("the g = t*f family has index one")
        g_part = {}
        for exps, c in eq.terms:
            if exps[3] == 0:
                g_part[exps[:3]] = c
        if not g_part:
            raise FamilyValidationError("no t-free part g(x, y, z) present")
        if (0, 0, 0) in g_part:
            raise FamilyValidationError("germ does not pass through the origin")
        # Du Val recognition is limited to A-type xy = z^{k+1}; anything else
        # is kept as an opaque descriptor with duval_verified = 0.
        params = [("duval_verified", 0)]
        monos = set(g_part)
        if len(monos) == 2 and (1, 1, 0) in monos:
            z_mono = next(m for m in monos if m != (1, 1, 0))
            if z_mono[:2] == (0, 0) and z_mono[2] >= 2:
                params = [("duval_type_a", z_mono[2] - 1), ("duval_verified", 1)]
        return GermClass("2.7.3.2", 1, parameters=tuple(params))

    raise FamilyValidationError(f"unsupported family {g.family!r}")


def is_moderate(g: HypersurfaceGerm) -> bool:
    """Whether the germ is one of the stably-factorial local models."""
    cls = classify(g)
    return cls.moderate_label is not None or cls.case_label == CASE_SMOOTH


def index_of(g: HypersurfaceGerm) -> int:
    """Index r of the canonical class at the germ (1 for the smooth and
    index-one cases)."""
    return classify(g).index


def reid_tai_is_terminal(
    q: QuotientGerm, fixed_locus_excluded: bool = True
) -> bool:
    """Reid-Tai criterion: terminal iff every nontrivial group element has
    age sum frac(eps * w_i / r) strictly greater than 1.

    With ``fixed_locus_excluded`` the quotient must be isolated (every
    weight coprime to r); otherwise the raw inequality is evaluated over all
    nontrivial elements and its geometric meaning is the caller's business.
    """
    r = q.r
    if r == 1:
        return True
    if fixed_locus_excluded:
        bad = [w for w in q.weights if gcd(w, r) != 1]
        if bad:
            raise GermError(
                f"non-isolated fixed locus: weights {bad} share a factor with r={r}"
            )
    for eps in range(1, r):
        age = sum(Fraction((eps * w) % r, r) for w in q.weights)
        if age <= 1:
            return False
    return True


def discrepancy_toric_valuation(
    q: QuotientGerm, v, boundary: frozenset[int] | set[int] = frozenset()
) -> Fraction:
    """Discrepancy of the toric valuation at the primitive lattice point v
    over the quotient germ, relative to the reduced toric boundary divisors
    indexed by ``boundary``: sum of the coordinates of v away from the
    boundary, minus 1.
    """
    lattice = q.lattice()
    v = tuple(Fraction(x) for x in v)
    if len(v) != q.dim:
        raise GermError("valuation vector has wrong length")
    if not lattice.contains(v):
        raise GermError(f"{v} is not a lattice point of {q.label()}")
    if not lattice.is_primitive(v):
        raise GermError(f"{v} is not primitive")
    if any(x < 0 for x in v):
        raise GermError(f"{v} lies outside the orthant cone")
    bad = [i for i in boundary if not 0 <= i < q.dim]
    if bad:
        raise GermError(f"boundary indices out of range: {bad}")
    return sum(
        (x for i, x in enumerate(v) if i not in set(boundary)), Fraction(0)
    ) - 1


# ---------------------------------------------------------------------------
# Germ descriptor serialization (shared with the CLI and service schemas).

def germ_to_dict(g: HypersurfaceGerm) -> dict:
    return {
        "family": g.family,
        "r": g.ambient.r,
        "weights": list(g.ambient.weights),
        "equation": [
            [list(exps), c.numerator, c.denominator] for exps, c in g.equation.terms
        ],
        "base_var": g.base_var,
    }


def germ_from_dict(data: dict) -> HypersurfaceGerm:
    try:
        family = data["family"]
        r = int(data["r"])
        weights = tuple(int(w) for w in data["weights"])
        base_var = int(data["base_var"])
        terms = {}
        for exps, num, den in data["equation"]:
            key = tuple(int(e) for e in exps)
            terms[key] = terms.get(key, 0) + Fraction(int(num), int(den))
    except (KeyError, TypeError, ValueError) as exc:
        raise GermError(f"malformed germ descriptor: {exc}") from exc
    return HypersurfaceGerm(
        QuotientGerm(r, weights), SparsePoly.from_dict(terms), base_var, family
    )
