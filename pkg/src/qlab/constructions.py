"""Finite-stage builds of the two existence constructions.

The direct-sum build pastes an inner space onto growing sup-norm blocks and
is quantized blockwise (see `quantize.quantize_y`).  The staged build grows a
norming set of dual-lattice functionals so that the resulting monotone basis
quantizes against arbitrary alphabets while containing a prescribed marker
subsequence equivalent to the base basis.  Both builds are exact and small
enough to verify exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    Coeffs,
    MeshTooCoarse,
    NetFamily,
    Scalar,
    SearchBudgetExceeded,
    as_scalar,
)
from .norms import BasisSpace, C0Space, DirectSumYSpace, basis_vector_norms
from .quantize import QuantizerReport, _report, pick_letter
from . import sampling


def build_y_space(inner: BasisSpace, blocks: int) -> DirectSumYSpace:
    """Assemble the truncated direct-sum space and verify its normalization."""
    space = DirectSumYSpace(inner=inner, blocks=blocks)
    norms = basis_vector_norms(space)
    if any(n != 1 for n in norms):
        raise AssertionError("direct-sum basis vectors must all have norm one")
    return space


def _solve_square(matrix: list[list[Scalar]], rhs: list[Scalar]) -> Optional[list[Scalar]]:
    """Exact Gaussian elimination; None when the system is singular."""
    k = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][k] for r in range(k)]


def lemma_basis_constant(n: int, max_n: int = 6) -> Scalar:
    """Exact basis constant of the perturbed sup-norm basis on n+1 coordinates.

    The basis is f_j = e_j + e_{n+1}/n for j <= n and f_{n+1} = e_1 + ... + e_n.
    The constant is the largest prefix-to-whole norm ratio, maximized exactly
    over the vertices of the polytopes {a : ||sum_{j<=k} a_j f_j||_inf <= 1}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise SearchBudgetExceeded(f"vertex enumeration capped at n = {max_n}")
    dim = n + 1
    columns = []
    for j in range(1, n + 1):
        col = [Fraction(0)] * dim
        col[j - 1] = Fraction(1)
        col[n] = Fraction(1, n)
        columns.append(col)
    columns.append([Fraction(1)] * n + [Fraction(0)])

    def image(coeffs: Sequence[Scalar], upto: int) -> list[Scalar]:
        return [
            sum((coeffs[j] * columns[j][i] for j in range(upto)), Fraction(0))
            for i in range(dim)
        ]

    constant = Fraction(1)
    for k in range(1, dim + 1):
        rows = [[columns[j][i] for j in range(k)] for i in range(dim)]
        vertices = []
        for active in itertools.combinations(range(dim), k):
            for signs in itertools.product((1, -1), repeat=k):
                system = [rows[i] for i in active]
                rhs = [Fraction(s) for s in signs]
                solution = _solve_square(system, rhs)
                if solution is None:
                    continue
                values = image(solution, k)
                if all(abs(v) <= 1 for v in values):
                    vertices.append(solution)
        for vertex in vertices:
            for m in range(1, k + 1):
                prefix_norm = max(abs(v) for v in image(vertex, m))
                if prefix_norm > constant:
                    constant = prefix_norm
    return constant


Functional = tuple[Scalar, ...]  # dense on a prefix of coordinates, trailing zeros stripped


def _strip(values: Sequence[Scalar]) -> Functional:
    values = list(values)
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


def _prefix(f: Functional, n: int) -> Functional:
    return _strip(f[:n])


def _apply(f: Functional, x: Coeffs) -> Scalar:
    total = Fraction(0)
    for i, a in x:
        if i < len(f):
            total += f[i] * a
    return total


@dataclass(frozen=True)
class StageExtension:
    """One link coordinate: its parent functional and the new marker weight."""

    parent: Functional
    marker_weight: Scalar
    link: int


@dataclass(frozen=True)
class USpaceBuild:
    """Finite-stage norming-set build with a marker subsequence.

    `functionals` is the full final family G; coordinates are 0-based, the
    j-th marker sits at `markers[j-1]`, and stage j's link coordinates with
    their parents are recorded in `extensions[j-1]` for the quantizer.
    """

    base: C0Space
    eta: Scalar
    meshes: tuple[Scalar, ...]
    stages: int
    markers: tuple[int, ...]
    functionals: tuple[Functional, ...]
    extensions: tuple[tuple[StageExtension, ...], ...]

    @property
    def dim(self) -> int:
        return self.markers[-1] + 1

    def norm(self, x: Coeffs) -> Scalar:
        for i, _ in x:
            if not 0 <= i < self.dim:
                raise IndexError(f"index {i} outside the build's range")
        return max(
            (abs(_apply(f, x)) for f in self.functionals), default=Fraction(0)
        )

    def dual_coeff_norm(self, i: int) -> Scalar:
        # |a_i| = |(P_i - P_{i-1}) x| in a monotone basis of unit vectors.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return Fraction(2)

    def marker_vector(self, coeffs: Coeffs) -> Coeffs:
        """Transport base coefficients onto the marker coordinates."""
        return Coeffs({self.markers[i]: v for i, v in coeffs})


def u_norm(build: USpaceBuild, x: Coeffs) -> Scalar:
    return build.norm(x)


def _l1(values: Sequence[Scalar]) -> Scalar:
    return sum((abs(v) for v in values), Fraction(0))


def build_u_space(
    base: C0Space,
    eta,
    stages: int,
    mesh_plan: Optional[Sequence[Scalar]] = None,
    norming_samples: int = 64,
    seed: int = 0,
    functional_cap: int = 10**5,
    mesh_retries: int = 8,
) -> USpaceBuild:
    """Run the staged construction for a sup-norm base.

    The dual lattice at stage j uses mesh eta_j (an integer reciprocal); its
    intersection with the dual ball must remain (1 - eta)-norming on sampled
    unit vectors, else the mesh halves and the stage rebuilds.  The sup-norm
    base is the one family whose dual ball membership (an l1 inequality) we
    can test exactly, which is all the construction needs.
    """
    if not isinstance(base, C0Space):
        raise TypeError("the staged build needs exact dual-ball tests; use a sup-norm base")
    eta = as_scalar(eta)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if stages < 1:
        raise ValueError("need at least one stage")
    if base.dim < stages:
        raise ValueError("base dimension must cover the requested stages")

    inv_eta = -((-eta.denominator) // eta.numerator)  # ceil(1/eta)
    meshes: list[Scalar] = []
    markers = [0]
    rng = sampling.seeded(seed)

    def stage_mesh(j: int) -> Scalar:
        if mesh_plan is not None:
            mesh = as_scalar(mesh_plan[j - 1])
            if mesh.numerator != 1:
                raise ValueError("meshes must be integer reciprocals")
            return mesh
        if j == 1:
            return Fraction(1, 2 * inv_eta)
        return meshes[-1] / 2

    def best_lattice_action(x: Coeffs, mesh: Scalar) -> Scalar:
        # Exact max of |g(x)| over mesh-lattice functionals in the l1 ball of
        # the sup-norm dual: the linear-programming optimum max|x_i| is
        # attained by concentrating the largest admissible weight on the
        # largest coefficient, and that point lies on the lattice.
        inv = Fraction(1) / mesh
        weight = mesh * (inv.numerator // inv.denominator)  # 1 for reciprocal meshes
        biggest = max((abs(v) for _, v in x), default=Fraction(0))
        return weight * biggest

    def norming_failure(j: int, mesh: Scalar) -> Optional[Coeffs]:
        """First sampled unit vector the stage-j lattice fails to norm, if any."""
        indices = list(range(j))
        stage_seed = rng.randrange(2**32)
        for x in sampling.unit_sphere_points(base, indices, norming_samples, stage_seed):
            if best_lattice_action(x, mesh) < 1 - eta:
                return x
        return None

    def settle_mesh(j: int) -> Scalar:
        mesh = stage_mesh(j)
        bad = None
        for _ in range(mesh_retries + 1):
            bad = norming_failure(j, mesh)
            if bad is None:
                return mesh
            mesh /= 2
        raise MeshTooCoarse(f"stage {j} lattice fails to norm", sample=bad)

    # Stage 1.
    mesh = settle_mesh(1)
    meshes.append(mesh)
    kmax = int(1 / mesh)
    family = {_strip((k * mesh,)) for k in range(-kmax, kmax + 1)}
    all_extensions: list[tuple[StageExtension, ...]] = []

    for j in range(2, stages + 1):
        mesh = settle_mesh(j)
        meshes.append(mesh)

        previous_dim = markers[-1] + 1
        pairs = []
        for f in sorted(family):
            profile = tuple(
                f[m] if m < len(f) else Fraction(0) for m in markers
            )
            slack = 1 - _l1(profile)
            weight_cap = slack / mesh
            kmax = weight_cap.numerator // weight_cap.denominator
            for k in range(-kmax, kmax + 1):
                pairs.append((f, k * mesh))
        if len(pairs) > functional_cap:
            raise SearchBudgetExceeded(
                f"stage {j} needs {len(pairs)} extensions", stage=j
            )
        new_marker = previous_dim + len(pairs)
        extensions = []
        new_family = set(family)
        for offset, (f, marker_weight) in enumerate(pairs):
            link = previous_dim + offset
            full = list(f) + [Fraction(0)] * (new_marker + 1 - len(f))
            full[link] = Fraction(1)
            full[new_marker] = marker_weight
            extensions.append(StageExtension(parent=f, marker_weight=marker_weight, link=link))
            for n in range(new_marker + 1, 0, -1):
                prefix = _strip(full[:n])
                if prefix in new_family:
                    break  # shorter prefixes were added with their parent
                new_family.add(prefix)
        new_family.add(())
        family = new_family
        if len(family) > functional_cap:
            raise SearchBudgetExceeded(f"family grew past the cap at stage {j}", stage=j)
        markers.append(new_marker)
        all_extensions.append(tuple(extensions))

    build = USpaceBuild(
        base=base,
        eta=eta,
        meshes=tuple(meshes),
        stages=stages,
        markers=tuple(markers),
        functionals=tuple(sorted(family)),
        extensions=tuple(all_extensions),
    )
    _validate_build(build)
    return build


def _validate_build(build: USpaceBuild):
    family = set(build.functionals)
    for f in build.functionals:
        if any(abs(v) > 1 for v in f):
            raise AssertionError("functional escapes the sup-norm ball")
        for n in range(len(f)):
            if _prefix(f, n) not in family:
                raise AssertionError("family is not closed under prefix truncation")
    for i in range(build.dim):
        if build.norm(Coeffs({i: 1})) != 1:
            raise AssertionError(f"basis vector {i} is not normalized")


def quantize_u(build: USpaceBuild, x: Coeffs, nets: NetFamily) -> QuantizerReport:
    """Stage-wise quantizer of the staged build; letters extend the support.

    With mesh-delta alphabets the achieved error is at most 2*delta (the
    construction's epsilon is 3*delta): marker letters are nearest rounding,
    each link letter absorbs its parent functional's accumulated error.
    """
    for i, _ in x:
        if not 0 <= i < build.dim:
            raise IndexError(f"index {i} outside the build's range")
    choices: dict[int, Scalar] = {0: pick_letter(nets.net(0), x[0])}
    for stage_index, stage in enumerate(build.extensions):
        marker = build.markers[stage_index + 1]
        running = x.sub(Coeffs(choices))  # error over the coordinates settled so far
        for ext in stage:
            target = _apply(ext.parent, running) + x[ext.link]
            choices[ext.link] = pick_letter(nets.net(ext.link), target)
        choices[marker] = pick_letter(nets.net(marker), x[marker])
    diff = x.sub(Coeffs(choices))
    error = build.norm(diff)
    guarantee = 2 * nets.max_mesh(range(build.dim))
    return _report(x, choices, error, guarantee, nets)


@dataclass(frozen=True)
class EquivalenceReport:
    min_ratio: Scalar
    max_ratio: Scalar
    sample_count: int
    eta: Scalar


def subsequence_equivalence_check(build: USpaceBuild, count: int, seed: int) -> EquivalenceReport:
    """Norm ratios of marker vectors against the base: the staged family is a
    subset of the dual ball (ratio <= 1) and stays (1 - eta)-norming below."""
    rng = sampling.seeded(seed)
    min_ratio = None
    max_ratio = None
    used = 0
    for _ in range(count):
        coeffs = sampling.random_coeffs(rng, range(build.stages))
        if not coeffs:
            continue
        base_norm = build.base.norm(coeffs)
        ratio = build.norm(build.marker_vector(coeffs)) / base_norm
        min_ratio = ratio if min_ratio is None else min(min_ratio, ratio)
        max_ratio = ratio if max_ratio is None else max(max_ratio, ratio)
        used += 1
    if used == 0:
        raise ValueError("no nonzero samples drawn")
    return EquivalenceReport(min_ratio, max_ratio, used, build.eta)
