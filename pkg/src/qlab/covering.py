"""Exact lattice-covering geometry in dimension <= 3.

Bodies are convex polytopes given by exact rational vertices with 0 strictly
interior; facets are recovered by brute-force hyperplane enumeration, which is
plenty for the handful of vertices these experiments use.  Coverage checks
scan an exact rational grid: a positive verdict is qualified by the grid
resolution, a negative verdict is an exactly certified uncovered point.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import CoverageError, Net, Scalar, as_scalar

Point = tuple[Scalar, ...]


def _dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _as_point(values) -> Point:
    return tuple(as_scalar(v) for v in values)


@dataclass(frozen=True)
class Body:
    """Convex polytope with exact vertex and facet data, 0 strictly interior.

    Facets are stored pre-normalized as vectors f with K = {x : f.x <= 1 for
    all f}, so the gauge is simply max_f f.x clamped at zero.  Convexity plus
    interior zero makes the body star-shaped about zero automatically.
    """

    dim: int
    vertices: tuple[Point, ...]
    facets: tuple[Point, ...]
    symmetric: bool

    @classmethod
    def from_vertices(cls, vertices) -> "Body":
        verts = tuple(_as_point(v) for v in vertices)
        if not verts:
            raise ValueError("a body needs vertices")
        dim = len(verts[0])
        if not 1 <= dim <= 3:
            raise ValueError("only dimensions 1..3 are supported")
        if any(len(v) != dim for v in verts):
            raise ValueError("vertices have mixed dimensions")
        if len(set(verts)) < dim + 1:
            raise ValueError("too few distinct vertices for a full-dimensional body")
        facets = _hull_facets(dim, tuple(set(verts)))
        body = cls(
            dim=dim,
            vertices=verts,
            facets=facets,
            symmetric=set(verts) == {tuple(-c for c in v) for v in verts},
        )
        body._validate()
        return body

    def _validate(self):
        for v in self.vertices:
            if any(_dot(f, v) > 1 for f in self.facets):
                raise ValueError("vertex/facet representations disagree")
        for sign in (1, -1):
            for axis in range(self.dim):
                direction = tuple(Fraction(sign) if i == axis else Fraction(0) for i in range(self.dim))
                if self.gauge(direction) <= 0:
                    raise ValueError("body is unbounded or degenerate; 0 must be interior")

    def gauge(self, point) -> Scalar:
        """min {t >= 0 : point in t*K} = max over facets of f.point, clamped at 0."""
        point = _as_point(point)
        best = Fraction(0)
        for f in self.facets:
            value = _dot(f, point)
            if value > best:
                best = value
        return best

    def contains(self, point) -> bool:
        return self.gauge(point) <= 1

    def extent(self, axis: int) -> Scalar:
        """max |v_axis| over vertices: the body's reach along one coordinate."""
        return max(abs(v[axis]) for v in self.vertices)

    def extent_inf(self) -> Scalar:
        return max(self.extent(axis) for axis in range(self.dim))

    def scale(self, factor) -> "Body":
        factor = as_scalar(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return Body.from_vertices([tuple(c * factor for c in v) for v in self.vertices])


def _hull_facets(dim: int, verts: tuple[Point, ...]) -> tuple[Point, ...]:
    """Brute-force facet enumeration; returns normals f for {x: f.x <= 1}."""
    candidates = set()
    if dim == 1:
        planes = [((Fraction(1),), verts_max) for verts_max in [max(v[0] for v in verts)]]
        planes.append(((Fraction(-1),), -min(v[0] for v in verts)))
    else:
        planes = []
        for combo in itertools.combinations(verts, dim):
            normal = _plane_normal(dim, combo)
            if normal is None:
                continue
            offset = _dot(normal, combo[0])
            sides = [_dot(normal, v) - offset for v in verts]
            if all(s <= 0 for s in sides):
                planes.append((normal, offset))
            elif all(s >= 0 for s in sides):
                planes.append((tuple(-c for c in normal), -offset))
    for normal, offset in planes:
        if offset <= 0:
            raise ValueError("0 is not strictly interior to the body")
        candidates.add(tuple(c / offset for c in normal))
    if not candidates:
        raise ValueError("vertex set spans no full-dimensional body")
    return tuple(sorted(candidates))


def _plane_normal(dim: int, combo: tuple[Point, ...]) -> Optional[Point]:
    if dim == 2:
        (ux, uy), (vx, vy) = combo
        dx, dy = vx - ux, vy - uy
        if dx == 0 and dy == 0:
            return None
        return (dy, -dx)
    u, v, w = combo
    a = tuple(v[i] - u[i] for i in range(3))
    b = tuple(w[i] - u[i] for i in range(3))
    normal = (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
    if all(c == 0 for c in normal):
        return None
    return normal


def gauge(body: Body, point) -> Scalar:
    return body.gauge(point)


@dataclass(frozen=True)
class LatticeSpec:
    """Full-rank lattice: integer combinations of the generator matrix rows."""

    rows: tuple[Point, ...]

    @classmethod
    def from_rows(cls, rows) -> "LatticeSpec":
        rows = tuple(_as_point(r) for r in rows)
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise ValueError("generator matrix must be square")
        spec = cls(rows=rows)
        if spec.det() == 0:
            raise ValueError("generator matrix must have nonzero determinant")
        return spec

    @classmethod
    def integers(cls, dim: int) -> "LatticeSpec":
        return cls.from_rows(
            [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
        )

    @property
    def dim(self) -> int:
        return len(self.rows)

    def det(self) -> Scalar:
        r = self.rows
        if self.dim == 1:
            return r[0][0]
        if self.dim == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        return (
            r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
        )

    def vector(self, k: Sequence[int]) -> Point:
        return tuple(
            sum((Fraction(k[i]) * self.rows[i][axis] for i in range(self.dim)), Fraction(0))
            for axis in range(self.dim)
        )

    def _inverse_rows(self) -> tuple[Point, ...]:
        d = self.det()
        r = self.rows
        if self.dim == 1:
            return ((Fraction(1) / r[0][0],),)
        if self.dim == 2:
            return (
                (r[1][1] / d, -r[0][1] / d),
                (-r[1][0] / d, r[0][0] / d),
            )
        cof = [
            [
                (r[(i + 1) % 3][(j + 1) % 3] * r[(i + 2) % 3][(j + 2) % 3]
                 - r[(i + 1) % 3][(j + 2) % 3] * r[(i + 2) % 3][(j + 1) % 3])
                for j in range(3)
            ]
            for i in range(3)
        ]
        return tuple(tuple(cof[i][j] / d for i in range(3)) for j in range(3))

    def points_in_box(self, radius: Scalar) -> list[Point]:
        """All lattice points z with |z|_inf <= radius, in lexicographic order."""
        radius = as_scalar(radius)
        inv = self._inverse_rows()
        # z = k.G and |z|_inf <= radius  =>  |k|_inf <= ||G^-1||_inf * radius
        # (row-sum norm of the inverse, acting on the right).
        norm_inv = max(
            sum(abs(inv[i][j]) for i in range(self.dim)) for j in range(self.dim)
        )
        bound_frac = norm_inv * radius
        bound = bound_frac.numerator // bound_frac.denominator + 1
        points = []
        for k in itertools.product(range(-bound, bound + 1), repeat=self.dim):
            z = self.vector(k)
            if all(abs(c) <= radius for c in z):
                points.append(z)
        return sorted(points)

    def fundamental_box_extent(self) -> Scalar:
        """Sup-norm radius of the generator image of [0,1]^n."""
        corners = itertools.product((Fraction(0), Fraction(1)), repeat=self.dim)
        return max(
            max(abs(c) for c in self.vector([int(t) for t in corner])) for corner in corners
        )


@dataclass(frozen=True)
class CoverVerdict:
    covered: bool
    witness: Optional[Point]
    resolution: Scalar
    translate_bound: Scalar
    points_checked: int
    uncovered_count: int = 0


def _axis_grid(lo: Scalar, hi: Scalar, mesh: Scalar) -> list[Scalar]:
    lo, hi, mesh = as_scalar(lo), as_scalar(hi), as_scalar(mesh)
    if mesh <= 0:
        raise ValueError("grid mesh must be positive")
    steps_frac = (hi - lo) / mesh
    steps = steps_frac.numerator // steps_frac.denominator
    points = [lo + k * mesh for k in range(steps + 1)]
    if points[-1] != hi:
        points.append(hi)
    return points


def grid_points(box: Sequence[tuple[Scalar, Scalar]], mesh: Scalar) -> list[Point]:
    """Exact rational grid over a closed box, lexicographic order."""
    axes = [_axis_grid(lo, hi, mesh) for lo, hi in box]
    return [tuple(p) for p in itertools.product(*axes)]


class _TranslateIndex:
    """Per-point candidate filtering for coverage scans.

    A translate z with p - z in scale*K must satisfy |z_i - p_i| <=
    scale*extent_i on every axis, so only translates inside that window are
    ever evaluated; the filter is exact, not a heuristic.  Translates are
    bucketed by first coordinate to keep the window lookup cheap.
    """

    def __init__(self, translates: Sequence[Point], body: Body, scale: Scalar = Fraction(1)):
        self.windows = tuple(scale * body.extent(axis) for axis in range(body.dim))
        self.body = body
        buckets: dict[Scalar, list[Point]] = {}
        for t in sorted(translates):
            buckets.setdefault(t[0], []).append(t)
        self.first_coords = sorted(buckets)
        self.buckets = buckets

    def candidates(self, point: Point):
        lo = bisect.bisect_left(self.first_coords, point[0] - self.windows[0])
        hi = bisect.bisect_right(self.first_coords, point[0] + self.windows[0])
        for first in self.first_coords[lo:hi]:
            for t in self.buckets[first]:
                if all(
                    abs(t[axis] - point[axis]) <= self.windows[axis]
                    for axis in range(1, len(point))
                ):
                    yield t

    def min_gauge(self, point: Point) -> Optional[Scalar]:
        """Exact min of gauge(p - z) over all translates, provided it is at
        most `scale` (larger distances may lie outside the window); None when
        no candidate is in reach."""
        best = None
        for t in self.candidates(point):
            value = self.body.gauge(tuple(p - z for p, z in zip(point, t)))
            if best is None or value < best:
                best = value
        return best


def _covered_by(point: Point, translates: Sequence[Point], body: Body) -> bool:
    return any(
        body.gauge(tuple(p - z for p, z in zip(point, t))) <= 1 for t in translates
    )


def check_p1(body: Body, lattice: LatticeSpec, mesh) -> CoverVerdict:
    """Grid test of  union_z (z + K) = R^n  over one closed fundamental domain.

    An uncovered grid point is an exact counterexample: any lattice translate
    covering p satisfies |z|_inf <= |p|_inf + extent(K), which the reach bound
    strictly dominates.
    """
    mesh = as_scalar(mesh)
    if lattice.dim != body.dim:
        raise ValueError("lattice and body dimensions differ")
    reach = lattice.fundamental_box_extent() + body.extent_inf() + 1
    translates = lattice.points_in_box(reach)
    index = _TranslateIndex(translates, body)
    unit_grid = grid_points([(Fraction(0), Fraction(1))] * body.dim, mesh)
    witness = None
    uncovered = 0
    for t in unit_grid:
        point = tuple(
            sum((t[i] * lattice.rows[i][axis] for i in range(body.dim)), Fraction(0))
            for axis in range(body.dim)
        )
        nearest = index.min_gauge(point)
        if nearest is None or nearest > 1:
            uncovered += 1
            if witness is None:
                witness = point
    if witness is not None:
        wider = lattice.points_in_box(reach + 2)
        if _covered_by(witness, wider, body):
            raise AssertionError("reach bound too small; uncovered witness was covered farther out")
        return CoverVerdict(False, witness, mesh, reach, len(unit_grid), uncovered)
    return CoverVerdict(True, None, mesh, reach, len(unit_grid))


def check_p2(
    body: Body,
    nets: Sequence[Net],
    mesh,
    domain: Optional[Sequence[tuple[Scalar, Scalar]]] = None,
) -> CoverVerdict:
    """Grid test of  union_{z in prod D_i} (z + K) over a closed box (default [0,1]^n).

    Positive verdicts certify the scanned box at the recorded resolution only;
    negative verdicts are exact against every translate that could reach.
    """
    mesh = as_scalar(mesh)
    if len(nets) != body.dim:
        raise ValueError("need one net per coordinate")
    if domain is None:
        domain = [(Fraction(0), Fraction(1))] * body.dim
    domain = [(as_scalar(lo), as_scalar(hi)) for lo, hi in domain]
    axis_candidates = []
    for axis, net in enumerate(nets):
        lo, hi = domain[axis]
        if hasattr(net, "reach") and (lo < -net.reach or hi > net.reach):
            raise CoverageError(f"axis-{axis} alphabet does not cover the scanned domain")
        center = (lo + hi) / 2
        radius = (hi - lo) / 2 + body.extent(axis) + 1
        # a translate with |z_axis - p_axis| > extent cannot cover p, so the
        # alphabet's actual members in this window are a complete candidate set
        axis_candidates.append(net.members_within(center, radius))
    translates = [tuple(z) for z in itertools.product(*axis_candidates)]
    index = _TranslateIndex(translates, body)
    grid = grid_points(domain, mesh)
    witness = None
    uncovered = 0
    for point in grid:
        nearest = index.min_gauge(point)
        if nearest is None or nearest > 1:
            uncovered += 1
            if witness is None:
                witness = point
    reach = max(max(abs(c) for c in z) for z in translates) if translates else Fraction(0)
    if witness is not None:
        return CoverVerdict(False, witness, mesh, reach, len(grid), uncovered)
    return CoverVerdict(True, None, mesh, reach, len(grid))


def check_p3(body: Body, mesh) -> CoverVerdict:
    """Grid test of  [0,1]^n subset union over corner translates {0,1}^n of K."""
    mesh = as_scalar(mesh)
    translates = [
        tuple(Fraction(b) for b in bits)
        for bits in itertools.product((0, 1), repeat=body.dim)
    ]
    grid = grid_points([(Fraction(0), Fraction(1))] * body.dim, mesh)
    witness = None
    uncovered = 0
    for point in grid:
        if not _covered_by(point, translates, body):
            uncovered += 1
            if witness is None:
                witness = point
    if witness is not None:
        return CoverVerdict(False, witness, mesh, Fraction(1), len(grid), uncovered)
    return CoverVerdict(True, None, mesh, Fraction(1), len(grid))


def _min_gauge(point: Point, translates: Sequence[Point], body: Body) -> Scalar:
    return min(body.gauge(tuple(p - z for p, z in zip(point, t))) for t in translates)


def default_eps1(eps0) -> Scalar:
    """(floor(eps0/(1-eps0)) + 1) * eps0, the ball-to-space amplification target."""
    eps0 = as_scalar(eps0)
    if not 0 < eps0 < 1:
        raise ValueError("eps0 must lie in (0, 1)")
    ratio = eps0 / (1 - eps0)
    return (ratio.numerator // ratio.denominator + 1) * eps0


@dataclass(frozen=True)
class PhaseReport:
    holds: bool
    witness: Optional[Point]
    worst_slack: Scalar
    points_checked: int


@dataclass(frozen=True)
class AmplificationReport:
    eps0: Scalar
    eps1: Scalar
    phase1: PhaseReport
    phase2: PhaseReport
    resolution: Scalar
    box_radius: Scalar


def amplification_check(
    body: Body,
    lattice: LatticeSpec,
    eps0,
    eps1=None,
    mesh=Fraction(1, 64),
    box_radius=Fraction(2),
) -> AmplificationReport:
    """Two-phase grid check: K inside L + eps0*K, then a box inside L + eps1*K.

    The worst slack of a phase is the largest (over grid points) distance, in
    gauge units, to the best lattice translate; the phase holds when that
    slack stays at or below its epsilon.
    """
    eps0 = as_scalar(eps0)
    eps1 = default_eps1(eps0) if eps1 is None else as_scalar(eps1)
    mesh = as_scalar(mesh)
    box_radius = as_scalar(box_radius)
    extent = body.extent_inf()

    reach1 = extent * (1 + eps0) + 1
    body_box = [(-body.extent(axis), body.extent(axis)) for axis in range(body.dim)]
    phase1_points = [p for p in grid_points(body_box, mesh) if body.gauge(p) <= 1]
    phase1 = _phase_scan(phase1_points, lattice.points_in_box(reach1), body, eps0)

    reach2 = box_radius + eps1 * extent + 1
    box = [(-box_radius, box_radius)] * body.dim
    phase2 = _phase_scan(grid_points(box, mesh), lattice.points_in_box(reach2), body, eps1)

    return AmplificationReport(eps0, eps1, phase1, phase2, mesh, box_radius)


def _phase_scan(points, translates, body: Body, eps: Scalar) -> PhaseReport:
    """Exact per-point check of min-gauge distance <= eps over the translates.

    The windowed index returns the exact minimum whenever it is <= eps; an
    uncovered point falls back to a full scan so its reported slack is exact
    within the translate reach.
    """
    index = _TranslateIndex(translates, body, scale=eps)
    witness = None
    worst = Fraction(0)
    checked = 0
    for point in points:
        checked += 1
        nearest = index.min_gauge(point)
        if nearest is None or nearest > eps:
            nearest = _min_gauge(point, translates, body)
            if witness is None:
                witness = point
        if nearest > worst:
            worst = nearest
    return PhaseReport(witness is None, witness, worst, checked)


PARALLELOGRAM_VERTICES = (
    (Fraction(1, 4), Fraction(1)),
    (Fraction(3, 4), Fraction(1)),
    (Fraction(-1, 4), Fraction(-1)),
    (Fraction(-3, 4), Fraction(-1)),
)


@dataclass(frozen=True)
class ParallelogramReport:
    eta: Scalar
    tiling: CoverVerdict
    interior_disjoint: bool
    interior_points_checked: int
    q_point: Point
    q_in_base: bool
    q_in_shifted: bool
    stretched_net_verdict: CoverVerdict


def parallelogram_example(eta, mesh=Fraction(1, 64)) -> ParallelogramReport:
    """The tilted-parallelogram example: tiles under Z^2 yet fails the net covering.

    Part (c) perturbs the vertical alphabet to (1-eta)Z and searches the unit
    box for an exactly-certified uncovered point.
    """
    from .core import LatticeNet

    eta = as_scalar(eta)
    if not 0 < eta < Fraction(1, 2):
        raise ValueError("eta must lie in (0, 1/2)")
    mesh = as_scalar(mesh)
    body = Body.from_vertices(PARALLELOGRAM_VERTICES)
    z2 = LatticeSpec.integers(2)

    tiling = check_p1(body, z2, mesh)

    # Interior disjointness of the integer translates, spot-checked on the
    # grid points strictly inside K: no other translate may cover them strictly.
    translates = z2.points_in_box(body.extent_inf() * 2 + 1)
    inner_checked = 0
    disjoint = True
    body_box = [(-body.extent(0), body.extent(0)), (-body.extent(1), body.extent(1))]
    for point in grid_points(body_box, mesh * 4):
        if body.gauge(point) >= 1:
            continue
        inner_checked += 1
        for z in translates:
            if all(c == 0 for c in z):
                continue
            if body.gauge((point[0] - z[0], point[1] - z[1])) < 1:
                disjoint = False
                break
        if not disjoint:
            break

    p2, p3 = body.vertices[1], body.vertices[2]
    q = tuple(Fraction(3, 4) * a + Fraction(1, 4) * b for a, b in zip(p2, p3))
    q_in_base = body.contains(q)
    q_in_shifted = body.contains((q[0] - 1, q[1] - 1))

    nets = [LatticeNet(Fraction(1)), LatticeNet(1 - eta)]
    stretched = check_p2(body, nets, mesh)

    return ParallelogramReport(
        eta=eta,
        tiling=tiling,
        interior_disjoint=disjoint,
        interior_points_checked=inner_checked,
        q_point=q,
        q_in_base=q_in_base,
        q_in_shifted=q_in_shifted,
        stretched_net_verdict=stretched,
    )
