"""Exact brute-force optima and finite-section property estimators.

`best_quantization` finds the true minimum of ||x - sum d_i e_i|| over the
admissible letter choices by depth-first search.  Pruning rests on the
coefficient functionals: any letter with |a_i - d_i| beyond the incumbent
error times ||e_i*|| cannot appear in a better choice, so candidate letters
per coordinate live in a shrinking window around a_i.  A greedy warm start
makes that window tight from the first node.

Density estimates over continuous sets are reported honestly as sampled lower
bounds with witnesses; nothing here certifies an upper bound over a ball.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import Coeffs, NetFamily, Scalar, SearchBudgetExceeded, as_scalar, lattice_family
from .norms import (
    BasisSpace,
    C0Space,
    DirectSumYSpace,
    HaarCantorSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    SummingSpace,
    TreeSpace,
)
from .quantize import (
    QuantizationChoice,
    quantize_c0,
    quantize_multisign,
    quantize_schauder,
    quantize_summing,
    quantize_tree,
    quantize_y,
    round_nearest,
)
from . import sampling

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class SectionProblem:
    """A finite section with its alphabets and the admissible-support mode.

    support_restricted=True is the coefficient-quantization reading (letters
    only at supported indices); False allows letters anywhere in the section.
    """

    space: BasisSpace
    section: tuple[int, ...]
    nets: NetFamily
    support_restricted: bool = True
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "section", tuple(sorted(self.section)))


@dataclass
class OracleResult:
    choice: QuantizationChoice
    optimum: Scalar
    nodes: int
    initial_error: Scalar


def greedy_initial(space: BasisSpace, x: Coeffs, nets: NetFamily) -> QuantizationChoice:
    """Warm start: the matching greedy quantizer, else plain rounding."""
    if isinstance(space, C0Space):
        return quantize_c0(x, nets).choice
    if isinstance(space, SummingSpace):
        return quantize_summing(x, nets).choice
    if isinstance(space, MultiSignSummingSpace):
        return quantize_multisign(x, nets, space).choice
    if isinstance(space, SchauderSpace):
        return quantize_schauder(x, nets, space).choice
    if isinstance(space, TreeSpace):
        return quantize_tree(x, nets, space).choice
    if isinstance(space, DirectSumYSpace):
        return quantize_y(x, nets, space).choice
    return round_nearest(x, nets)


def best_quantization(
    problem: SectionProblem,
    x: Coeffs,
    prune: bool = True,
    initial: Optional[QuantizationChoice] = None,
) -> OracleResult:
    """Exact minimum of ||x - sum d_i e_i|| over admissible letter choices.

    With prune=False the search enumerates the full candidate boxes fixed by
    the initial incumbent; the optimum returned is identical either way, which
    the tests use as a soundness check on the pruning.
    """
    space, nets = problem.space, problem.nets
    section = set(problem.section)
    if not set(x.support()) <= section:
        raise IndexError("vector is not supported in the section")
    indices = sorted(x.support()) if problem.support_restricted else sorted(section)
    if initial is None:
        initial = greedy_initial(space, x, nets)
    best_choice = {i: Fraction(0) for i in indices}
    best_choice.update(initial.as_dict())
    incumbent = space.norm(x.sub(Coeffs(best_choice)))
    initial_error = incumbent
    if not indices:
        return OracleResult(QuantizationChoice.from_dict({}), incumbent, 0, incumbent)

    duals = {i: space.dual_coeff_norm(i) for i in indices}
    fixed_boxes = None
    if not prune:
        fixed_boxes = {
            i: nets.net(i).points_within(x[i], incumbent * duals[i]) for i in indices
        }

    nodes = 0
    assignment: dict[int, Scalar] = {}

    def candidates(i: int, radius: Scalar) -> list[Scalar]:
        if fixed_boxes is not None:
            return fixed_boxes[i]
        points = nets.net(i).points_within(x[i], radius)
        points.sort(key=lambda d: (abs(d - x[i]), d))
        return points

    def descend(depth: int):
        nonlocal nodes, incumbent, best_choice
        i = indices[depth]
        for d in candidates(i, incumbent * duals[i]):
            if prune and abs(d - x[i]) > incumbent * duals[i]:
                break  # candidates are distance-sorted; the rest are no closer
            nodes += 1
            if nodes > problem.budget:
                raise SearchBudgetExceeded(
                    f"oracle budget of {problem.budget} nodes exhausted", nodes=nodes
                )
            assignment[i] = d
            if depth + 1 == len(indices):
                error = space.norm(x.sub(Coeffs(assignment)))
                if error < incumbent:
                    incumbent = error
                    best_choice = dict(assignment)
            else:
                descend(depth + 1)
        assignment.pop(i, None)

    descend(0)
    choice = QuantizationChoice.from_dict(best_choice)
    return OracleResult(choice, incumbent, nodes, initial_error)


@dataclass(frozen=True)
class EpsEstimate:
    """Sampled lower bound for the best achievable tolerance at a fixed mesh.

    `certified` stays False: a sampled supremum over a continuous ball never
    certifies an upper bound, only the witnessed lower bound is exact.
    """

    lower_bound: Scalar
    witness: Optional[Coeffs]
    witness_error: Optional[Scalar]
    sample_count: int
    kind: str
    seed: int
    radius: Scalar
    certified: bool = False


def _estimate_over(problem: SectionProblem, points, kind, seed, radius) -> EpsEstimate:
    best = Fraction(0)
    witness = None
    count = 0
    for x in points:
        count += 1
        result = best_quantization(problem, x)
        if result.optimum > best or witness is None:
            best = result.optimum
            witness = x
    return EpsEstimate(
        lower_bound=best,
        witness=witness,
        witness_error=best if witness is not None else None,
        sample_count=count,
        kind=kind,
        seed=seed,
        radius=radius,
    )


def eps_ball_estimate(
    problem: SectionProblem,
    count: int,
    seed: int,
    scale: Scalar = Fraction(1),
    extra_points: Sequence[Coeffs] = (),
) -> EpsEstimate:
    """Lower bound for the unit-ball tolerance at the problem's mesh.

    `scale` multiplies every sample (and is meant to ride along with a mesh
    rescaling, where exactness of the scaling law is checked elsewhere).
    """
    scale = as_scalar(scale)
    base = sampling.section_ball_points(problem.space, problem.section, count, seed)
    points = [x.scale(scale) for x in base]
    points.extend(extra_points)
    return _estimate_over(problem, points, "ball", seed, scale)


def eps_space_estimate(
    problem: SectionProblem,
    box_radius,
    count: int,
    seed: int,
    extra_points: Sequence[Coeffs] = (),
) -> EpsEstimate:
    """Lower bound over the radius-R ball of the section norm."""
    box_radius = as_scalar(box_radius)
    if box_radius == 0:
        return EpsEstimate(Fraction(0), None, None, 0, "box", seed, box_radius)
    base = sampling.section_ball_points(problem.space, problem.section, count, seed)
    points = [x.scale(box_radius) for x in base]
    points.extend(extra_points)
    return _estimate_over(problem, points, "box", seed, box_radius)


@dataclass(frozen=True)
class PropertyPResult:
    found: bool
    witness: Optional[QuantizationChoice]
    witness_norm: Optional[Scalar]
    certified: bool
    nodes: int


def check_property_p(
    space: BasisSpace,
    nets: NetFamily,
    section: Sequence[int],
    budget: int = DEFAULT_BUDGET,
) -> PropertyPResult:
    """Search for all-nonzero letters with ||sum d_i e_i|| <= 1.

    Any witness satisfies |d_i| <= ||e_i*||, so each coordinate's candidates
    are the nonzero letters within that radius; exhausting the product is a
    certified failure.
    """
    section = sorted(section)
    boxes = []
    for i in section:
        points = [d for d in nets.net(i).members_within(Fraction(0), space.dual_coeff_norm(i)) if d != 0]
        if not points:
            return PropertyPResult(False, None, None, True, 0)
        boxes.append(sorted(points, key=lambda d: (abs(d), d)))
    nodes = 0
    for combo in itertools.product(*boxes):
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(
                f"property-P budget of {budget} nodes exhausted", nodes=nodes
            )
        y = Coeffs(zip(section, combo))
        nrm = space.norm(y)
        if nrm <= 1:
            return PropertyPResult(True, QuantizationChoice.from_dict(dict(zip(section, combo))), nrm, True, nodes)
    return PropertyPResult(False, None, None, True, nodes)


def haar_witness_distance(level: int, delta, budget: int = DEFAULT_BUDGET):
    """Exact distance of the flat Haar witness from the mesh-delta lattice set.

    Distances are measured with letters allowed anywhere in the level's
    section: prefix monotonicity of the Haar family justifies truncating the
    ambient index set to 0 .. 2^level - 1.
    """
    delta = as_scalar(delta)
    space = HaarCantorSpace(level)
    x = space.witness_vector()
    problem = SectionProblem(
        space=space,
        section=tuple(range(space.dim)),
        nets=lattice_family(delta),
        support_restricted=False,
        budget=budget,
    )
    result = best_quantization(problem, x)
    return result.optimum, result


@dataclass(frozen=True)
class QuasiGreedyReport:
    delta: Scalar
    threshold_lower: Scalar  # K: truncation to all large coefficients
    subset_lower: Scalar  # L: worst truncation to a subset of them
    threshold_witness: Optional[Coeffs]
    subset_witness: Optional[tuple[Coeffs, tuple[int, ...]]]
    sample_count: int


def quasi_greedy_constants(
    space: BasisSpace,
    section: Sequence[int],
    delta,
    count: int,
    seed: int,
    extra_points: Sequence[Coeffs] = (),
    subset_cap: int = 14,
) -> QuasiGreedyReport:
    """Sampled lower bounds for the truncation constants at threshold delta.

    For each unit-norm sample, F collects the coefficients of size >= delta;
    the K-estimate uses the truncation to F itself, the L-estimate the worst
    truncation over subsets of F (full enumeration, so F must stay small).
    """
    delta = as_scalar(delta)
    section = sorted(section)
    points = list(sampling.unit_sphere_points(space, section, count, seed))
    points.extend(extra_points)
    k_lower = Fraction(1)
    l_lower = Fraction(1)
    k_witness = None
    l_witness = None
    for x in points:
        nrm = space.norm(x)
        if nrm == 0:
            continue
        unit = x if nrm == 1 else x.scale(Fraction(1) / nrm)
        big = [i for i, v in unit if abs(v) >= delta]
        if not big:
            continue
        if len(big) > subset_cap:
            raise SearchBudgetExceeded(
                f"{len(big)} large coefficients exceed the subset cap {subset_cap}"
            )
        k_value = space.norm(unit.restrict(big))
        if k_value > k_lower:
            k_lower, k_witness = k_value, unit
        for size in range(1, len(big) + 1):
            for subset in itertools.combinations(big, size):
                value = space.norm(unit.restrict(subset))
                if value > l_lower:
                    l_lower, l_witness = value, (unit, subset)
    return QuasiGreedyReport(
        delta=delta,
        threshold_lower=k_lower,
        subset_lower=l_lower,
        threshold_witness=k_witness,
        subset_witness=l_witness,
        sample_count=len(points),
    )
