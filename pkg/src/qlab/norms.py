"""Exact evaluation of the norm families behind every quantization experiment.

Every family here is polyhedral on any finite section: the norm is a maximum
of finitely many linear functionals of the coefficients, so all values are
exact rationals.  Coefficient-functional norms (`dual_coeff_norm`) are exact
closed forms for the sup/prefix/tree/hat/Haar families and certified upper
bounds for the sign-twisted and direct-sum families; both kinds are sound for
branch-and-bound pruning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import Coeffs, Scalar, as_scalar
from .covering import Body


def _check_support(space, x: Coeffs):
    for i, _ in x:
        if not 0 <= i < space.dim:
            raise IndexError(f"index {i} outside the space's range 0..{space.dim - 1}")


@dataclass(frozen=True)
class C0Space:
    """Unit vector basis under the sup norm."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def dim(self) -> int:
        return self.n

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        return max((abs(v) for _, v in x), default=Fraction(0))

    def dual_coeff_norm(self, i: int) -> Scalar:
        self._check_index(i)
        return Fraction(1)

    def dual_norm(self, functional: Coeffs) -> Scalar:
        """Norm of sum c_i e_i* on this space: the l1 sum of the c_i."""
        _check_support(self, functional)
        return sum((abs(v) for _, v in functional), Fraction(0))

    def _check_index(self, i: int):
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")


@dataclass(frozen=True)
class SummingSpace:
    """Unit vectors under the prefix-sum sup norm  max_k |a_0 + ... + a_k|."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def dim(self) -> int:
        return self.n

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        best = Fraction(0)
        running = Fraction(0)
        for _, value in x:  # entries are index-sorted; prefixes change only at support
            running += value
            if abs(running) > best:
                best = abs(running)
        return best

    def dual_coeff_norm(self, i: int) -> Scalar:
        # a_i is the difference of two adjacent prefix sums; the first index
        # sees a single prefix.  Both values are attained.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return Fraction(1) if i == 0 else Fraction(2)


@dataclass(frozen=True)
class MultiSignSummingSpace:
    """Max of finitely many sign-twisted prefix-sum norms."""

    signs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.signs:
            raise ValueError("need at least one sign row")
        signs = tuple(tuple(int(s) for s in row) for row in self.signs)
        object.__setattr__(self, "signs", signs)
        width = len(signs[0])
        if width < 1 or any(len(row) != width for row in signs):
            raise ValueError("sign rows must share a positive width")
        if any(s not in (-1, 1) for row in signs for s in row):
            raise ValueError("sign entries must be +-1")

    @property
    def rows(self) -> int:
        return len(self.signs)

    @property
    def dim(self) -> int:
        return len(self.signs[0])

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        best = Fraction(0)
        for row in self.signs:
            running = Fraction(0)
            for i, value in x:
                running += row[i] * value
                if abs(running) > best:
                    best = abs(running)
        return best

    def dual_coeff_norm(self, i: int) -> Scalar:
        # Upper bound: adjacent twisted prefixes differ by a_i in every row.
        # Exactness depends on the sign matrix, so only the bound is claimed.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return Fraction(1) if i == 0 else Fraction(2)

    def sign_classes(self) -> dict[tuple[int, ...], list[int]]:
        """Partition of indices by their sign-column pattern."""
        classes: dict[tuple[int, ...], list[int]] = {}
        for i in range(self.dim):
            pattern = tuple(row[i] for row in self.signs)
            classes.setdefault(pattern, []).append(i)
        return classes


def _hat_params(i: int) -> tuple[Scalar, Scalar, Scalar]:
    """Support endpoints and peak of the i-th hat, i >= 2 with i = 2^k + l."""
    k = i.bit_length() - 1
    l = i - (1 << k)
    width = Fraction(1, 1 << k)
    a = l * width
    return a, a + width, a + width / 2


@dataclass(frozen=True)
class SchauderSpace:
    """Span of the first hat functions on [0,1]: f_0 = 1, f_1(t) = t, then the
    dyadic tents f_{2^k+l} supported on [l/2^k, (l+1)/2^k] with unit peak."""

    max_index: int

    def __post_init__(self):
        if self.max_index < 0:
            raise ValueError("max_index must be >= 0")

    @property
    def dim(self) -> int:
        return self.max_index + 1

    def grid(self) -> list[Scalar]:
        """Dyadic nodes containing every breakpoint of every basis function."""
        level = max(self.max_index.bit_length() - 1, 0)
        denom = 1 << (level + 1)
        return [Fraction(j, denom) for j in range(denom + 1)]

    def basis_value(self, i: int, p: Scalar) -> Scalar:
        if not 0 <= i <= self.max_index:
            raise IndexError(f"index {i} out of range")
        if i == 0:
            return Fraction(1)
        if i == 1:
            return p
        a, b, mid = _hat_params(i)
        if p <= a or p >= b:
            return Fraction(0)
        return 1 - abs(p - mid) / (mid - a)

    def value_at(self, x: Coeffs, p) -> Scalar:
        """Exact value of the represented function at a point of [0,1]."""
        p = as_scalar(p)
        if not 0 <= p <= 1:
            raise IndexError("evaluation point must lie in [0,1]")
        _check_support(self, x)
        return sum((v * self.basis_value(i, p) for i, v in x), Fraction(0))

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        if not x:
            return Fraction(0)
        return max(abs(self.value_at(x, p)) for p in self.grid())

    def dual_coeff_norm(self, i: int) -> Scalar:
        # a_0 = x(0); for i >= 1 the coefficient is a second difference of
        # values, attained by 2 f_i - f_0.
        if not 0 <= i <= self.max_index:
            raise IndexError(f"index {i} out of range")
        return Fraction(1) if i == 0 else Fraction(2)


@dataclass(frozen=True)
class TreeSpace:
    """Finitely supported functions on a tree, normed by the largest absolute
    root-to-node path sum.  Nodes are numbered so parents precede children."""

    parents: tuple[Optional[int], ...]

    def __post_init__(self):
        parents = tuple(None if p is None else int(p) for p in self.parents)
        object.__setattr__(self, "parents", parents)
        if not parents:
            raise ValueError("tree must have at least one node")
        for child, parent in enumerate(parents):
            if parent is not None and not 0 <= parent < child:
                raise ValueError("parent indices must precede their children")

    @property
    def dim(self) -> int:
        return len(self.parents)

    def path_sums(self, x: Coeffs) -> list[Scalar]:
        _check_support(self, x)
        sums: list[Scalar] = []
        for node, parent in enumerate(self.parents):
            base = sums[parent] if parent is not None else Fraction(0)
            sums.append(base + x[node])
        return sums

    def norm(self, x: Coeffs) -> Scalar:
        return max((abs(s) for s in self.path_sums(x)), default=Fraction(0))

    def dual_coeff_norm(self, i: int) -> Scalar:
        # a_root is a single path sum; elsewhere a_i is the difference of the
        # sums at i and at its parent.  Both are attained.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return Fraction(1) if self.parents[i] is None else Fraction(2)

    @classmethod
    def chain(cls, length: int) -> "TreeSpace":
        return cls(tuple([None] + list(range(length - 1))))

    @classmethod
    def star(cls, leaves: int) -> "TreeSpace":
        return cls(tuple([None] + [0] * leaves))

    @classmethod
    def complete_binary(cls, nodes: int) -> "TreeSpace":
        return cls(tuple(None if i == 0 else (i - 1) // 2 for i in range(nodes)))


@dataclass(frozen=True)
class HaarCantorSpace:
    """The first 2^N Haar functions on the Cantor set, sup norm.

    Atom k of the halving tree splits into atoms 2k+1 (left) and 2k+2 (right);
    the function with index m+1 is +1 on the left child of atom m and -1 on
    the right child, and index 0 is the constant 1.
    """

    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")

    @property
    def dim(self) -> int:
        return 1 << self.level

    def leaf_values(self, x: Coeffs) -> list[Scalar]:
        """Values of the represented function on the 2^N depth-N atoms."""
        _check_support(self, x)
        values = [x[0]]
        for _ in range(self.level):
            next_values = []
            for node_value, node in zip(values, _level_nodes(len(values))):
                split = x[node + 1]
                next_values.append(node_value + split)
                next_values.append(node_value - split)
            values = next_values
        return values

    def value_at(self, x: Coeffs, atom: int) -> Scalar:
        """Value on one depth-N atom, counted left to right."""
        if not 0 <= atom < self.dim:
            raise IndexError(f"atom {atom} out of range")
        _check_support(self, x)
        value = x[0]
        node = 0
        for shift in range(self.level - 1, -1, -1):
            bit = (atom >> shift) & 1
            value += x[node + 1] if bit == 0 else -x[node + 1]
            node = 2 * node + 1 + bit
        return value

    def norm(self, x: Coeffs) -> Scalar:
        return max((abs(v) for v in self.leaf_values(x)), default=Fraction(0))

    def dual_coeff_norm(self, i: int) -> Scalar:
        # Coefficients are half-differences of averages over sibling atoms.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return Fraction(1)

    def witness_vector(self, n: Optional[int] = None) -> Coeffs:
        """The unit vector (1/N) * sum of h_1 .. h_{2^N - 1} used in the
        non-quantizability argument."""
        n = self.level if n is None else n
        return Coeffs({i: Fraction(1, n) for i in range(1, 1 << n)})


def _level_nodes(count: int):
    # Atom indices of the row with `count` atoms: count-1 .. 2*count-2.
    return range(count - 1, 2 * count - 1)


@dataclass(frozen=True)
class DirectSumYSpace:
    """Finite section of the direct-sum norm pasting an inner space onto
    growing sup-norm blocks: block n holds n^2 + 1 coordinates and feeds its
    scaled coefficient sum to the n-th inner basis vector."""

    inner: "BasisSpace"
    blocks: int

    def __post_init__(self):
        if self.blocks < 1:
            raise ValueError("need at least one block")
        if self.inner.dim < self.blocks:
            raise ValueError("inner space too small for the requested blocks")

    @property
    def dim(self) -> int:
        return self._base(self.blocks + 1)

    @staticmethod
    def _base(n: int) -> int:
        # flat index where block n starts (blocks are 1-based)
        return sum(m * m + 1 for m in range(1, n))

    def flat_index(self, n: int, j: int) -> int:
        if not 1 <= n <= self.blocks or not 1 <= j <= n * n + 1:
            raise IndexError(f"no coordinate ({n}, {j})")
        return self._base(n) + j - 1

    def block_coord(self, flat: int) -> tuple[int, int]:
        if not 0 <= flat < self.dim:
            raise IndexError(f"index {flat} out of range")
        for n in range(1, self.blocks + 1):
            size = n * n + 1
            if flat < size:
                return n, flat + 1
            flat -= size
        raise IndexError("unreachable")

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        per_block: dict[int, dict[int, Scalar]] = {}
        for flat, value in x:
            n, j = self.block_coord(flat)
            per_block.setdefault(n, {})[j] = value
        sup_part = Fraction(0)
        inner_arg = {}
        for n, entries in per_block.items():
            tail = entries.get(n * n + 1, Fraction(0))
            head_count = sum(1 for j in entries if j <= n * n)
            # sup over j <= n^2 of |a_j + tail|; absent coordinates carry |tail|
            block_sup = abs(tail) if head_count < n * n else Fraction(0)
            block_sum = Fraction(0)
            for j, value in entries.items():
                if j == n * n + 1:
                    continue
                block_sum += value
                if abs(value + tail) > block_sup:
                    block_sup = abs(value + tail)
            if block_sup > sup_part:
                sup_part = block_sup
            if block_sum != 0:
                inner_arg[n - 1] = block_sum / (n * n)
        inner_part = self.inner.norm(Coeffs(inner_arg))
        return max(sup_part, inner_part)

    def dual_coeff_norm(self, i: int) -> Scalar:
        # Certified upper bounds via the sup part and the inner functionals.
        n, j = self.block_coord(i)
        inner_dual = self.inner.dual_coeff_norm(n - 1)
        if j == n * n + 1:
            return 1 + inner_dual
        return 2 + inner_dual


@dataclass(frozen=True)
class GaugeSpace:
    """Coordinates of R^n normed by the gauge of a polytope with 0 interior."""

    body: Body

    @property
    def dim(self) -> int:
        return self.body.dim

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        return self.body.gauge(tuple(x[i] for i in range(self.dim)))

    def dual_coeff_norm(self, i: int) -> Scalar:
        # sup |x_i| over the body, attained at a vertex.
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range")
        return max(abs(v[i]) for v in self.body.vertices)


@dataclass(frozen=True)
class ScaledSpace:
    """A space re-expressed in the rescaled dictionary e_i / scale_i."""

    base: "BasisSpace"
    scales: tuple[Scalar, ...]

    @property
    def dim(self) -> int:
        return self.base.dim

    def norm(self, x: Coeffs) -> Scalar:
        _check_support(self, x)
        return self.base.norm(Coeffs({i: v / self.scales[i] for i, v in x}))

    def dual_coeff_norm(self, i: int) -> Scalar:
        return self.scales[i] * self.base.dual_coeff_norm(i)


BasisSpace = Union[
    C0Space,
    SummingSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    TreeSpace,
    HaarCantorSpace,
    DirectSumYSpace,
    GaugeSpace,
    ScaledSpace,
]


@dataclass(frozen=True)
class NormalizedSpace:
    space: BasisSpace
    scales: tuple[Scalar, ...]
    delta_scale: Scalar


def basis_vector_norms(space: BasisSpace) -> tuple[Scalar, ...]:
    return tuple(space.norm(Coeffs({i: 1})) for i in range(space.dim))


def normalize_space(space: BasisSpace) -> NormalizedSpace:
    """Rescale the dictionary to norm one; mesh parameters shrink by the
    smallest basis-vector norm."""
    scales = basis_vector_norms(space)
    if any(s <= 0 for s in scales):
        raise ValueError("dictionary contains a zero vector")
    if all(s == 1 for s in scales):
        return NormalizedSpace(space, scales, Fraction(1))
    return NormalizedSpace(ScaledSpace(space, scales), scales, min(scales))


def eval_function(space: BasisSpace, x: Coeffs, point) -> Scalar:
    """Pointwise evaluation for the function-space families."""
    if isinstance(space, SchauderSpace):
        return space.value_at(x, point)
    if isinstance(space, HaarCantorSpace):
        return space.value_at(x, int(point))
    raise TypeError("pointwise evaluation applies to hat and Haar families only")


_EXACT_DUAL_FAMILIES = (C0Space, SummingSpace, SchauderSpace, TreeSpace, HaarCantorSpace, GaugeSpace)


def _dual_witness(space: BasisSpace, i: int) -> Optional[Coeffs]:
    """A vector attaining |a_i| = dual_coeff_norm(i) * norm(x), when exact."""
    if isinstance(space, (C0Space, HaarCantorSpace)):
        return Coeffs({i: 1})
    if isinstance(space, SummingSpace):
        return Coeffs({i: 1}) if i == 0 else Coeffs({i - 1: 1, i: -2})
    if isinstance(space, TreeSpace):
        parent = space.parents[i]
        return Coeffs({i: 1}) if parent is None else Coeffs({parent: 1, i: -2})
    if isinstance(space, SchauderSpace):
        return Coeffs({i: 1}) if i == 0 else Coeffs({0: -1, i: 2})
    if isinstance(space, GaugeSpace):
        target = space.dual_coeff_norm(i)
        for v in space.body.vertices:
            if abs(v[i]) == target:
                return Coeffs({axis: c for axis, c in enumerate(v)})
    return None


def validate_dual_coeff_norms(space: BasisSpace, samples=(), indices=None):
    """Hard check of the closed-form coefficient-functional norms.

    Exact families must attain their claimed value on a constructed witness;
    every family must satisfy |a_i| <= claimed * ||x|| on all given samples.
    Failure raises AssertionError: a wrong dual norm would silently break the
    oracle's pruning.
    """
    indices = range(space.dim) if indices is None else indices
    for i in indices:
        claimed = space.dual_coeff_norm(i)
        witness = _dual_witness(space, i)
        if isinstance(space, _EXACT_DUAL_FAMILIES):
            if witness is None:
                raise AssertionError(f"no attainment witness for index {i}")
            ratio = abs(witness[i]) / space.norm(witness)
            if ratio != claimed:
                raise AssertionError(
                    f"dual norm {claimed} not attained at index {i}: witness ratio {ratio}"
                )
    for x in samples:
        nrm = space.norm(x)
        if nrm == 0:
            continue
        for i, value in x:
            if abs(value) > space.dual_coeff_norm(i) * nrm:
                raise AssertionError(
                    f"|a_{i}| exceeds dual bound on sample {x!r}"
                )
