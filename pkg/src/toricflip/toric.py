"""Simplicial cones over explicit lattices, star subdivisions, and
unimodular triangulations certifying a reduced central fiber.

A lattice here is an overlattice of Z^n described by a denominator r and
weight rows, N = Z^n + sum_j Z * (w_j / r); this covers every cyclic
quotient model handled by the package (the r = 1 case is the standard
lattice).  Cones carry primitive ray generators, normalized on
construction, and all arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

from .intlinalg import (
    det_int,
    gcd_all,
    hermite_normal_form,
    invert_fraction,
    smith_normal_form,
)

Vec = tuple[Fraction, ...]


class ConeError(ValueError):
    """Degenerate or unsupported cone input."""


class ReducedFiberError(RuntimeError):
    """No reduced-fiber certificate can exist for this cone and height.

    Raised when a primitive ray sits at height != 1, or when a
    non-unimodular cone contains no further height-1 lattice point; the
    semistable-reduction pipeline never produces such inputs.
    """


def _vec(entries) -> Vec:
    return tuple(Fraction(x) for x in entries)


@dataclass(frozen=True)
class Lattice:
    """N = Z^rank + sum_j Z * (weight_rows[j] / denom)."""

    rank: int
    denom: int = 1
    weight_rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.rank <= 0 or self.denom <= 0:
            raise ConeError("lattice needs positive rank and denominator")
        rows = tuple(
            tuple(int(w) % self.denom for w in row) for row in self.weight_rows
        )
        if any(len(row) != self.rank for row in rows):
            raise ConeError("weight rows must have length rank")
        object.__setattr__(self, "weight_rows", rows)

    @property
    def _data(self):
        return _lattice_data(self.rank, self.denom, self.weight_rows)

    def basis(self) -> tuple[Vec, ...]:
        """Rows form a basis of the lattice."""
        return self._data.basis

    def index_over_standard(self) -> int:
        """Index [N : Z^rank]."""
        return self._data.index

    def _scale(self, v) -> tuple[int, ...] | None:
        """v * denom as an integer vector, or None if not in (1/denom)Z^n."""
        denom = self.denom
        out = []
        for x in v:
            if isinstance(x, int):
                out.append(x * denom)
                continue
            f = Fraction(x)
            if denom % f.denominator:
                return None
            out.append(f.numerator * (denom // f.denominator))
        return tuple(out)

    def coords(self, v) -> tuple[int, ...] | None:
        """Integer coordinates of v in the lattice basis, or None."""
        data = self._data
        sv = self._scale(v)
        if sv is None:
            return None
        adj, det = data.adjugate, data.det
        out = []
        for j in range(self.rank):
            t = sum(sv[i] * adj[i][j] for i in range(self.rank))
            if t % det:
                return None
            out.append(t // det)
        return tuple(out)

    def from_coords(self, x) -> Vec:
        h = self._data.scaled_basis
        denom = self.denom
        return tuple(
            Fraction(sum(x[i] * h[i][j] for i in range(self.rank)), denom)
            for j in range(self.rank)
        )

    def contains(self, v) -> bool:
        return self.coords(v) is not None

    def primitivize(self, v) -> Vec:
        """Scale a nonzero lattice vector to a primitive one."""
        x = self.coords(v)
        if x is None:
            raise ConeError(f"{v} is not a lattice point")
        g = gcd_all(x)
        if g == 0:
            raise ConeError("zero vector has no primitive form")
        return self.from_coords(tuple(c // g for c in x))

    def is_primitive(self, v) -> bool:
        x = self.coords(v)
        return x is not None and gcd_all(x) == 1


@dataclass(frozen=True)
class _LatticeData:
    basis: tuple[Vec, ...]
    scaled_basis: tuple[tuple[int, ...], ...]  # rows of denom * basis
    adjugate: tuple[tuple[int, ...], ...]      # det * (scaled basis)^-1
    det: int
    index: int


@lru_cache(maxsize=None)
def _lattice_data(rank, denom, weight_rows) -> _LatticeData:
    rows = [[denom if i == j else 0 for j in range(rank)] for i in range(rank)]
    rows.extend(list(row) for row in weight_rows)
    h = hermite_normal_form(rows)
    if len(h) != rank:
        raise ConeError("lattice basis is not full rank")
    basis = tuple(tuple(Fraction(x, denom) for x in row) for row in h)
    det_h = det_int([list(r) for r in h])
    hinv = invert_fraction([[Fraction(x) for x in row] for row in h])
    adj = tuple(
        tuple(int(det_h * hinv[i][j]) for j in range(rank)) for i in range(rank)
    )
    # h is a basis of denom*N, so [N : Z^rank] = denom^rank / |det h|.
    index = denom**rank // abs(det_h)
    return _LatticeData(
        basis=basis,
        scaled_basis=tuple(tuple(row) for row in h),
        adjugate=adj,
        det=det_h,
        index=index,
    )


@dataclass(frozen=True)
class LatticeCone:
    """Simplicial cone spanned by primitive, independent rays in a lattice."""

    lattice: Lattice
    rays: tuple[Vec, ...]

    def __post_init__(self):
        lat = self.lattice
        coords = []
        for r in self.rays:
            c = lat.coords(_vec(r))
            if c is None:
                raise ConeError(f"{r} is not a lattice point")
            g = gcd_all(c)
            if g == 0:
                raise ConeError("zero vector has no primitive form")
            coords.append(tuple(x // g for x in c))
        object.__setattr__(
            self, "rays", tuple(lat.from_coords(c) for c in coords)
        )
        object.__setattr__(self, "_coords", tuple(coords))
        m = [list(c) for c in coords]
        if len(m) > lat.rank or _rank_of(m) != len(m):
            raise ConeError("rays must be linearly independent")

    @staticmethod
    def from_ray_coords(lattice: Lattice, coords_rows) -> "LatticeCone":
        """Fast constructor for rays already known to be primitive and
        independent, given by their lattice coordinates."""
        cone = object.__new__(LatticeCone)
        coords = tuple(tuple(c) for c in coords_rows)
        object.__setattr__(cone, "lattice", lattice)
        object.__setattr__(
            cone, "rays", tuple(lattice.from_coords(c) for c in coords)
        )
        object.__setattr__(cone, "_coords", coords)
        return cone

    @property
    def ambient_rank(self) -> int:
        return self.lattice.rank

    def dim(self) -> int:
        return len(self.rays)

    def ray_coords(self) -> tuple[tuple[int, ...], ...]:
        return self._coords

    def multiplicity(self) -> int:
        """Index of the sublattice spanned by the rays; 1 iff smooth chart."""
        if self.dim() != self.ambient_rank:
            raise ConeError("multiplicity needs a full-dimensional cone")
        return abs(det_int([list(r) for r in self._coords]))

    def barycentric(self, v) -> tuple[Fraction, ...] | None:
        """Coefficients c >= 0 with v = sum c_i * ray_i, or None if outside."""
        if self.dim() != self.ambient_rank:
            raise ConeError("membership test needs a full-dimensional cone")
        x = self.lattice.coords(v)
        if x is None:
            raise ConeError(f"{v} is not a lattice point")
        sol = _solve_int_rows(self._coords, x)
        if any(c < 0 for c in sol):
            return None
        return sol

    def contains(self, v) -> bool:
        return self.barycentric(v) is not None


def _rank_of(m) -> int:
    a = [list(map(Fraction, row)) for row in m]
    rank = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _solve_int_rows(rows, rhs) -> tuple[Fraction, ...]:
    """Solve x @ rows = rhs exactly (rows integer, square, invertible)."""
    n = len(rows)
    det = det_int([list(r) for r in rows])
    if det == 0:
        raise ConeError("degenerate ray matrix")
    out = []
    for i in range(n):
        replaced = [list(rows[k]) if k != i else list(rhs) for k in range(n)]
        out.append(Fraction(det_int(replaced), det))
    return tuple(out)


def cone_multiplicity(c: LatticeCone) -> int:
    return c.multiplicity()


def star_subdivide(c: LatticeCone, v) -> list[LatticeCone]:
    """Maximal cones of the star subdivision of ``c`` at the lattice point v.

    v must be primitive and lie in ``c`` (possibly on a proper face); the
    result replaces, for each ray of the minimal face containing v, that ray
    by v.  Subdividing at an existing ray returns ``[c]`` unchanged.
    """
    v = _vec(v)
    cv = c.lattice.coords(v)
    if cv is None or gcd_all(cv) != 1:
        raise ConeError(f"{v} is not primitive in the lattice")
    bary = _solve_int_rows(c.ray_coords(), cv)
    if any(coeff < 0 for coeff in bary):
        raise ConeError(f"{v} lies outside the cone")
    support = [i for i, coeff in enumerate(bary) if coeff > 0]
    if len(support) == 1:
        return [c]  # v is (a multiple of) an existing ray
    out = []
    for i in support:
        rows = tuple(cv if j == i else r for j, r in enumerate(c.ray_coords()))
        out.append(LatticeCone.from_ray_coords(c.lattice, rows))
    return out


@dataclass(frozen=True)
class Triangulation:
    """Face-to-face simplicial subdivision of a parent cone."""

    parent: LatticeCone
    cones: tuple[LatticeCone, ...]
    height: tuple[int, ...] = ()
    new_rays: tuple[Vec, ...] = ()

    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c.multiplicity() for c in self.cones)

    def is_unimodular(self) -> bool:
        return all(m == 1 for m in self.multiplicities())

    def all_rays(self) -> tuple[Vec, ...]:
        seen: dict[Vec, None] = {}
        for cone in self.cones:
            for r in cone.rays:
                seen.setdefault(r, None)
        return tuple(seen)

    def ray_heights(self) -> tuple[Fraction, ...]:
        if not self.height:
            raise ConeError("triangulation carries no height functional")
        return tuple(
            sum(Fraction(h) * x for h, x in zip(self.height, ray))
            for ray in self.all_rays()
        )

    def certificate(self) -> dict:
        """Reduced-SNC-fiber certificate: unimodular cones, height-1 rays."""
        mults = self.multiplicities()
        heights = self.ray_heights()
        return {
            "unimodular": all(m == 1 for m in mults),
            "rays_at_height_one": all(h == 1 for h in heights),
            "max_multiplicity": max(mults),
            "cones": len(self.cones),
            "rays": len(self.all_rays()),
        }


def truncated_volume(c: LatticeCone, phi) -> Fraction:
    """Volume (up to a fixed factorial) of ``c`` cut at {phi <= 1}.

    phi must be strictly positive on every ray; used to verify that
    subdivisions tile their parent exactly.
    """
    values = [sum(Fraction(h) * x for h, x in zip(phi, ray)) for ray in c.rays]
    if any(val <= 0 for val in values):
        raise ConeError("functional must be positive on all rays")
    vol = Fraction(abs(det_int([list(r) for r in c.ray_coords()])))
    for val in values:
        vol /= val
    return vol


def _height_on_coords(lattice: Lattice, height) -> tuple[int, ...]:
    basis = lattice.basis()
    out = []
    for row in basis:
        val = sum(Fraction(h) * x for h, x in zip(height, row))
        if val.denominator != 1:
            raise ConeError("height functional is not integral on the lattice")
        out.append(int(val))
    return tuple(out)


def _box_height_points(cone: LatticeCone, hc: tuple[int, ...]):
    """All lattice points of the cone at height 1 (small cones only).

    With every ray at height 1 these are exactly the lattice points of the
    simplex spanned by the rays, so the ray bounding box suffices.
    """
    rays = cone.ray_coords()
    lo = [min(r[j] for r in rays) for j in range(len(hc))]
    hi = [max(r[j] for r in rays) for j in range(len(hc))]
    points = []
    for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if sum(h * c for h, c in zip(hc, x)) != 1:
            continue
        sol = _solve_int_rows(rays, x)
        if all(c >= 0 for c in sol):
            points.append(tuple(x))
    return points


def unimodular_triangulate_reduced_fiber(
    c: LatticeCone, height, points=None
) -> Triangulation:
    """Triangulate ``c`` into unimodular cones whose rays all sit at height 1.

    ``height`` is a linear functional (integer vector on the ambient
    coordinates, integral on the lattice) grading by the base-change
    parameter; the output is the combinatorial certificate that the central
    fiber over that parameter is reduced simple normal crossing.  The
    subdivision point is always the height-1 lattice point minimizing the
    resulting (max, total) multiplicity, ties broken lexicographically, so
    the result is deterministic.  ``points`` may supply the height-1 lattice
    points of ``c`` (as lattice members) when the caller can enumerate them
    more directly than a bounding-box scan.
    """
    if c.dim() != c.ambient_rank:
        raise ConeError("triangulation needs a full-dimensional cone")
    lattice = c.lattice
    hc = _height_on_coords(lattice, height)
    ray_coord_list = c.ray_coords()
    heights = [sum(h * x for h, x in zip(hc, r)) for r in ray_coord_list]
    if any(h <= 0 for h in heights):
        raise ConeError("height functional must be positive on the cone")
    if any(h != 1 for h in heights):
        raise ReducedFiberError(
            f"primitive ray at height {max(heights)} > 1: no reduced-fiber "
            "triangulation exists for this cone"
        )
    if points is None:
        candidates = _box_height_points(c, hc)
    else:
        pts = []
        for p in points:
            x = lattice.coords(p)
            if x is None:
                raise ConeError("supplied point is not a lattice member")
            pts.append(x)
        candidates = [
            x for x in pts if sum(h * v for h, v in zip(hc, x)) == 1
        ]

    # Combinatorial state in lattice coordinates (everything integer).  A
    # unimodular cone whose rays sit at height 1 contains no height-1 point
    # besides its rays (its barycentric coordinates are nonnegative integers
    # summing to 1), so scoring and splitting only ever touch cones of
    # multiplicity > 1.
    cones: list[tuple[tuple[int, ...], ...]] = [tuple(ray_coord_list)]
    mults: list[int] = [abs(det_int([list(r) for r in ray_coord_list]))]
    members: list[list[tuple[int, ...]]] = [list(candidates)]

    while True:
        bad = [i for i, m in enumerate(mults) if m > 1]
        if not bad:
            break
        hosts: dict[tuple[int, ...], list[tuple[int, tuple[Fraction, ...]]]] = {}
        for i in bad:
            ray_set = set(cones[i])
            for p in members[i]:
                if p in ray_set:
                    continue
                sol = _solve_int_rows(cones[i], p)
                hosts.setdefault(p, []).append((i, sol))
        best = None
        for v in sorted(hosts):
            pieces = [
                coeff * mults[i]
                for i, sol in hosts[v]
                for coeff in sol
                if coeff > 0
            ]
            score = (max(pieces), sum(pieces), v)
            if best is None or score < best[0]:
                best = (score, v)
        if best is None:
            raise ReducedFiberError(
                "non-unimodular cone with no usable height-1 point"
            )
        v = best[1]
        # Stellar subdivision at v: every cone containing v off a ray gets
        # replaced, which keeps the complex face-to-face.
        affected = {i: sol for i, sol in hosts[v]}
        new_cones, new_mults, new_members = [], [], []
        for idx, (rays, mult, pts) in enumerate(zip(cones, mults, members)):
            if idx not in affected:
                new_cones.append(rays)
                new_mults.append(mult)
                new_members.append(pts)
                continue
            sol = affected[idx]
            for slot, coeff in enumerate(sol):
                if coeff == 0:
                    continue
                child = tuple(v if t == slot else r for t, r in enumerate(rays))
                child_mult = int(coeff * mult)
                child_pts = [
                    p
                    for p in pts
                    if all(cc >= 0 for cc in _solve_int_rows(child, p))
                ]
                new_cones.append(child)
                new_mults.append(child_mult)
                new_members.append(child_pts)
        cones, mults, members = new_cones, new_mults, new_members

    out_cones = tuple(
        LatticeCone.from_ray_coords(lattice, rays) for rays in cones
    )
    parent_rays = set(c.rays)
    new_rays = tuple(
        r
        for cone in out_cones
        for r in cone.rays
        if r not in parent_rays
    )
    dedup: dict[Vec, None] = {}
    for r in new_rays:
        dedup.setdefault(r, None)
    return Triangulation(
        parent=c, cones=out_cones, height=tuple(int(h) for h in height),
        new_rays=tuple(dedup),
    )


def cones_isomorphic(c1: LatticeCone, c2: LatticeCone) -> bool:
    """Whether a lattice isomorphism maps one simplicial cone onto the other."""
    if c1.dim() != c2.dim() or c1.ambient_rank != c2.ambient_rank:
        return False
    if c1.dim() != c1.ambient_rank:
        raise ConeError("isomorphism test needs full-dimensional cones")
    if c1.multiplicity() != c2.multiplicity():
        return False
    rank = c1.ambient_rank
    r1 = c1.ray_coords()
    r1_t = [[r1[i][j] for i in range(rank)] for j in range(rank)]
    for perm in permutations(range(c2.dim())):
        r2 = [list(c2.ray_coords()[p]) for p in perm]
        # Column j of T solves r1 @ col = r2[:, j]; T must be in GL(rank, Z).
        t_cols = []
        ok = True
        for j in range(rank):
            col = _solve_int_vec(r1_t, [row[j] for row in r2])
            if col is None:
                ok = False
                break
            t_cols.append(col)
        if not ok:
            continue
        t = [[t_cols[j][i] for j in range(rank)] for i in range(rank)]
        if abs(det_int(t)) == 1:
            return True
    return False


def _solve_int_vec(rows_transposed, rhs):
    sol = _solve_int_rows(rows_transposed, rhs)
    if any(x.denominator != 1 for x in sol):
        return None
    return [int(x) for x in sol]


def chart_groups(c: LatticeCone) -> list[tuple[int, tuple[Fraction, ...]]]:
    """Cyclic factors of N / (ray span) acting on the chart coordinates.

    Returns, for each invariant factor > 1, its order m and the barycentric
    coordinates (mod 1, scaled by m to integers in [0, m)) of a generator in
    the ray basis; a smooth chart yields an empty list.
    """
    if c.dim() != c.ambient_rank:
        raise ConeError("chart group needs a full-dimensional cone")
    rays = c.ray_coords()
    # rays = L @ D @ R with L, R unimodular, so the ray span equals the span
    # of {d_i * R_i} and Z^rank / (ray span) is generated by the rows of R
    # with orders d_i.
    invariants, _, right = smith_normal_form([list(r) for r in rays])
    out = []
    for i, d in enumerate(invariants):
        if d in (0, 1):
            continue
        sol = _solve_int_rows(rays, list(right[i]))
        weights = []
        for coeff in sol:
            scaled = coeff * d
            if scaled.denominator != 1:
                raise ConeError("generator order does not match invariant")
            weights.append(int(scaled) % d)
        out.append((int(d), tuple(weights)))
    return out
