"""Exact scalars, finitely supported coefficient vectors, and quantization alphabets.

All arithmetic is done with `fractions.Fraction`; floats never enter a norm or
a comparison.  Floats are produced only when a report wants a human-readable
approximation next to the exact "p/q" string.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]


class CoverageError(Exception):
    """An explicit alphabet was asked for points outside its covered window."""


class SearchBudgetExceeded(Exception):
    """An exact search hit its node cap before finishing."""

    def __init__(self, message, nodes=None, stage=None):
        super().__init__(message)
        self.nodes = nodes
        self.stage = stage


class MeshTooCoarse(Exception):
    """A dual-lattice mesh failed its norming check; carries the bad sample."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


def as_scalar(value: ScalarLike) -> Scalar:
    """Coerce ints, Fractions, and "p/q" strings to an exact scalar."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def scalar_str(value: Scalar) -> str:
    """Canonical textual form "p/q", with "/q" omitted when q == 1."""
    value = as_scalar(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Coeffs:
    """A finitely supported map index -> nonzero Scalar, i.e. the vector sum(a_i e_i).

    Zero values are dropped on construction, so equality is support-and-value
    equality and the zero vector has empty support.  Instances are immutable.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, ScalarLike] | Iterable[tuple[int, ScalarLike]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        data = {}
        for index, value in entries:
            index = int(index)
            if index < 0:
                raise ValueError("coefficient indices are non-negative")
            value = as_scalar(value)
            if value != 0:
                data[index] = value
        self._entries = dict(sorted(data.items()))

    @classmethod
    def from_values(cls, values: Iterable[ScalarLike], start: int = 0) -> "Coeffs":
        """Build from a dense run of values placed at start, start+1, ..."""
        return cls(enumerate_values(values, start))

    def support(self) -> tuple[int, ...]:
        return tuple(self._entries)

    def __getitem__(self, index: int) -> Scalar:
        return self._entries.get(index, Fraction(0))

    def __iter__(self) -> Iterator[tuple[int, Scalar]]:
        return iter(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Coeffs) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {scalar_str(v)}" for i, v in self)
        return f"Coeffs({{{inner}}})"

    def max_index(self) -> int:
        """Largest supported index; -1 for the zero vector."""
        return max(self._entries, default=-1)

    def sub(self, other: "Coeffs") -> "Coeffs":
        data = dict(self._entries)
        for index, value in other:
            data[index] = data.get(index, Fraction(0)) - value
        return Coeffs(data)

    def add(self, other: "Coeffs") -> "Coeffs":
        data = dict(self._entries)
        for index, value in other:
            data[index] = data.get(index, Fraction(0)) + value
        return Coeffs(data)

    def scale(self, factor: ScalarLike) -> "Coeffs":
        factor = as_scalar(factor)
        return Coeffs({i: v * factor for i, v in self})

    def restrict(self, indices: Iterable[int]) -> "Coeffs":
        keep = set(indices)
        return Coeffs({i: v for i, v in self if i in keep})


def enumerate_values(values, start):
    for offset, value in enumerate(values):
        yield start + offset, value


def coeffs_sub(a: Coeffs, b: Coeffs) -> Coeffs:
    return a.sub(b)


def coeffs_scale(a: Coeffs, factor: ScalarLike) -> Coeffs:
    return a.scale(factor)


@dataclass(frozen=True)
class LatticeNet:
    """The alphabet delta*Z; a delta-net for all of R (nearest distance delta/2)."""

    delta: Scalar

    def __post_init__(self):
        object.__setattr__(self, "delta", as_scalar(self.delta))
        if self.delta <= 0:
            raise ValueError("lattice mesh must be positive")

    def nearest(self, x: ScalarLike) -> list[Scalar]:
        """The one or two closest lattice points, ascending on a tie."""
        x = as_scalar(x)
        k = x / self.delta
        lo = (k.numerator // k.denominator) * self.delta
        hi = lo + self.delta
        dlo, dhi = x - lo, hi - x
        if dlo < dhi:
            return [lo]
        if dhi < dlo:
            return [hi]
        if dlo == 0:
            return [lo]
        return [lo, hi]

    def points_within(self, center: ScalarLike, radius: ScalarLike) -> list[Scalar]:
        center, radius = as_scalar(center), as_scalar(radius)
        if radius < 0:
            raise ValueError("radius must be non-negative")
        lo = (center - radius) / self.delta
        hi = (center + radius) / self.delta
        k_lo = -((-lo.numerator) // lo.denominator)  # ceil
        k_hi = hi.numerator // hi.denominator  # floor
        return [k * self.delta for k in range(k_lo, k_hi + 1)]

    def members_within(self, center: ScalarLike, radius: ScalarLike) -> list[Scalar]:
        return self.points_within(center, radius)


@dataclass(frozen=True)
class ExplicitNet:
    """A finite alphabet covering [-reach, reach] at mesh delta, always containing 0.

    Operations outside the covered window fail loudly with CoverageError:
    truncation of the paper-style nets (which cover all of R) must stay visible.
    """

    points: tuple[Scalar, ...]
    delta: Scalar
    reach: Scalar

    def __post_init__(self):
        points = tuple(sorted(as_scalar(p) for p in self.points))
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "delta", as_scalar(self.delta))
        object.__setattr__(self, "reach", as_scalar(self.reach))
        if self.delta <= 0 or self.reach <= 0:
            raise ValueError("mesh and reach must be positive")
        if len(set(points)) != len(points):
            raise ValueError("alphabet points must be distinct")
        if Fraction(0) not in points:
            raise ValueError("every alphabet must contain 0")
        if points[0] > -self.reach + self.delta or points[-1] < self.reach - self.delta:
            raise CoverageError("alphabet does not cover its declared window")
        for a, b in zip(points, points[1:]):
            if b - a > 2 * self.delta:
                raise CoverageError(f"gap ({scalar_str(a)}, {scalar_str(b)}) exceeds twice the mesh")

    def nearest(self, x: ScalarLike) -> list[Scalar]:
        x = as_scalar(x)
        if abs(x) > self.reach + self.delta:
            raise CoverageError(f"{scalar_str(x)} is beyond the covered window")
        pos = bisect.bisect_left(self.points, x)
        candidates = {self.points[i] for i in (pos - 1, pos) if 0 <= i < len(self.points)}
        best = min(abs(p - x) for p in candidates)
        return sorted(p for p in candidates if abs(p - x) == best)

    def points_within(self, center: ScalarLike, radius: ScalarLike) -> list[Scalar]:
        center, radius = as_scalar(center), as_scalar(radius)
        if radius < 0:
            raise ValueError("radius must be non-negative")
        if center - radius < -self.reach or center + radius > self.reach:
            raise CoverageError("query window exceeds the covered interval")
        return self.members_within(center, radius)

    def members_within(self, center: ScalarLike, radius: ScalarLike) -> list[Scalar]:
        """Stored letters in the window, with no coverage complaint: unlike
        points_within this reads the truncated alphabet as-is."""
        center, radius = as_scalar(center), as_scalar(radius)
        lo = bisect.bisect_left(self.points, center - radius)
        hi = bisect.bisect_right(self.points, center + radius)
        return list(self.points[lo:hi])


Net = Union[LatticeNet, ExplicitNet]


def net_nearest(net: Net, x: ScalarLike) -> list[Scalar]:
    """Net members minimizing |x - d|; both on an exact midpoint, ascending."""
    return net.nearest(x)


def net_points_within(net: Net, center: ScalarLike, radius: ScalarLike) -> list[Scalar]:
    """Exactly the net members d with |d - center| <= radius, ascending."""
    return net.points_within(center, radius)


@dataclass(frozen=True)
class NetFamily:
    """Per-coordinate alphabets: an override map plus a default for unmapped indices."""

    default: Net
    overrides: Mapping[int, Net] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "overrides", dict(self.overrides))

    def net(self, index: int) -> Net:
        return self.overrides.get(index, self.default)

    def mesh(self, index: int) -> Scalar:
        return self.net(index).delta

    def max_mesh(self, indices: Iterable[int]) -> Scalar:
        """Largest mesh over the given indices; the default's mesh when empty."""
        meshes = [self.mesh(i) for i in indices]
        return max(meshes) if meshes else self.default.delta


def lattice_family(delta: ScalarLike) -> NetFamily:
    return NetFamily(default=LatticeNet(as_scalar(delta)))
