"""Seeded, exact-rational sample generators shared by estimators and tests.

Everything here is driven by an explicit `random.Random` (or a seed), so any
report quoting its seed can be replayed bit for bit.  Samples are Fractions
throughout; nothing is ever drawn as a float.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Coeffs, ExplicitNet, LatticeNet, NetFamily, Scalar, as_scalar


def seeded(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_fraction(rng: random.Random, denom: int = 64, magnitude: int = 2) -> Scalar:
    return Fraction(rng.randint(-magnitude * denom, magnitude * denom), denom)


def random_coeffs(
    rng: random.Random,
    indices: Sequence[int],
    denom: int = 64,
    magnitude: int = 2,
    density: float = 1.0,
) -> Coeffs:
    """Random vector on the given indices; density < 1 thins the support."""
    entries = {}
    for i in indices:
        if density < 1.0 and rng.random() > density:
            continue
        entries[i] = random_fraction(rng, denom, magnitude)
    return Coeffs(entries)


def unit_sphere_points(space, indices: Sequence[int], count: int, seed) -> list[Coeffs]:
    """Exactly norm-one vectors: random rational points scaled by 1/norm."""
    rng = seeded(seed)
    points = []
    while len(points) < count:
        x = random_coeffs(rng, indices)
        nrm = space.norm(x)
        if nrm == 0:
            continue
        points.append(x.scale(Fraction(1) / nrm))
    return points


def _grid_values(fineness: int) -> list[Scalar]:
    return [Fraction(k, fineness) for k in range(-fineness, fineness + 1)]


def section_ball_points(
    space,
    indices: Sequence[int],
    count: int,
    seed,
    grid_cap: int = 700,
) -> list[Coeffs]:
    """Deterministic coarse grid plus seeded random directions, all of norm <= 1.

    Grid points outside the ball are pulled back onto the sphere exactly; the
    grid is what makes small structured witnesses (half-integer corners and
    the like) show up without luck.
    """
    dim = len(indices)
    grid_points: list[Coeffs] = []
    for fineness in (2, 1):
        if (2 * fineness + 1) ** dim <= grid_cap:
            values = _grid_values(fineness)
            for combo in itertools.product(values, repeat=dim):
                x = Coeffs(zip(indices, combo))
                if not x:
                    continue
                nrm = space.norm(x)
                grid_points.append(x if nrm <= 1 else x.scale(Fraction(1) / nrm))
            break
    rng = seeded(seed)
    random_points = []
    for _ in range(count):
        x = random_coeffs(rng, indices)
        nrm = space.norm(x)
        if nrm == 0:
            continue
        random_points.append(x if nrm <= 1 else x.scale(Fraction(1) / nrm))
    seen = set()
    points = []
    for x in grid_points + random_points:
        if x not in seen:
            seen.add(x)
            points.append(x)
    return points


def random_explicit_net(rng: random.Random, delta, reach) -> ExplicitNet:
    """An irregular alphabet covering [-reach, reach] at mesh delta, with 0."""
    delta, reach = as_scalar(delta), as_scalar(reach)
    points = [Fraction(0)]
    for sign in (1, -1):
        position = Fraction(0)
        while sign * position < reach:
            step = delta * Fraction(rng.randint(2, 8), 4)  # gaps in [delta/2, 2*delta]
            position += sign * step
            points.append(position)
    return ExplicitNet(points=tuple(points), delta=delta, reach=reach)


def random_explicit_family(rng: random.Random, delta, reach, indices: Iterable[int]) -> NetFamily:
    """Independent random explicit alphabets on the given indices."""
    delta = as_scalar(delta)
    overrides = {i: random_explicit_net(rng, delta, reach) for i in indices}
    return NetFamily(default=LatticeNet(delta), overrides=overrides)
