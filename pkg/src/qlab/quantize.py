"""Greedy coefficient quantizers, one per norm family, plus naive rounding.

Each quantizer realizes its family's constructive density argument: choose the
alphabet letters left to right (in basis order, tree order, or block order) so
that every partial error the norm can see stays within one mesh.  All of them
are support-respecting (letters are chosen only at supported indices, zero
coefficients always get letter zero) and ship their achieved error together
with the bound the construction promises.

Tie-breaking is fixed everywhere: among equally near letters the one of
smallest absolute value wins, and a symmetric tie goes to the non-negative
letter.  This makes every run reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Coeffs, Net, NetFamily, Scalar
from .norms import (
    DirectSumYSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    TreeSpace,
)


@dataclass(frozen=True)
class QuantizationChoice:
    """Chosen letters d_i, each an exact member of its alphabet."""

    values: tuple[tuple[int, Scalar], ...]

    @classmethod
    def from_dict(cls, values: dict[int, Scalar]) -> "QuantizationChoice":
        return cls(tuple(sorted(values.items())))

    def as_dict(self) -> dict[int, Scalar]:
        return dict(self.values)

    def approximant(self) -> Coeffs:
        return Coeffs(self.values)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.values)


@dataclass(frozen=True)
class QuantizerReport:
    choice: QuantizationChoice
    error: Scalar
    guarantee: Scalar
    neighborly_excess: Scalar

    def within_guarantee(self) -> bool:
        return self.error <= self.guarantee


def pick_letter(net: Net, target: Scalar) -> Scalar:
    """Nearest alphabet letter; ties go to smaller |d|, then to d >= 0."""
    candidates = net.nearest(target)
    if len(candidates) == 1:
        return candidates[0]
    lo, hi = candidates
    if abs(lo) < abs(hi):
        return lo
    if abs(hi) < abs(lo):
        return hi
    return hi  # symmetric pair: hi is the non-negative one


def _neighborly_excess(x: Coeffs, choices: dict[int, Scalar], nets: NetFamily) -> Scalar:
    worst = Fraction(0)
    for i, a in x:
        excess = abs(a - choices.get(i, Fraction(0))) / nets.mesh(i)
        if excess > worst:
            worst = excess
    return worst


def _report(x, choices, error, guarantee, nets) -> QuantizerReport:
    return QuantizerReport(
        choice=QuantizationChoice.from_dict(choices),
        error=error,
        guarantee=guarantee,
        neighborly_excess=_neighborly_excess(x, choices, nets),
    )


def round_nearest(x: Coeffs, nets: NetFamily) -> QuantizationChoice:
    """Per-coordinate nearest-letter choice; carries no error bound.

    Off the sup-norm family this rule fails: it is kept as the falsifiable
    baseline the greedy quantizers are measured against.
    """
    return QuantizationChoice.from_dict({i: pick_letter(nets.net(i), a) for i, a in x})


def quantize_c0(x: Coeffs, nets: NetFamily) -> QuantizerReport:
    """Sup-norm quantizer: independent per-coordinate rounding, error <= delta."""
    choices = {i: pick_letter(nets.net(i), a) for i, a in x}
    error = max((abs(a - choices[i]) for i, a in x), default=Fraction(0))
    return _report(x, choices, error, nets.max_mesh(x.support()), nets)


def quantize_summing(x: Coeffs, nets: NetFamily) -> QuantizerReport:
    """Prefix-sum quantizer: keep every running error within one mesh.

    At each supported index the letter is chosen nearest to the current
    running error plus the incoming coefficient, which caps every prefix of
    the difference at delta and hence its prefix-sup norm.
    """
    choices: dict[int, Scalar] = {}
    running = Fraction(0)
    worst = Fraction(0)
    for i, a in x:
        target = running + a
        d = pick_letter(nets.net(i), target)
        choices[i] = d
        running = target - d
        if abs(running) > worst:
            worst = abs(running)
    return _report(x, choices, worst, nets.max_mesh(x.support()), nets)


def quantize_multisign(x: Coeffs, nets: NetFamily, space: MultiSignSummingSpace) -> QuantizerReport:
    """Sign-twisted quantizer: run the prefix greedy inside each sign class.

    Indices sharing a sign-column pattern see coherent prefixes in every row,
    so a per-class prefix error of delta costs at most 2^rows * delta in the
    twisted norm by the triangle inequality.  The achieved error is usually
    far below that bound and is reported exactly.
    """
    classes = space.sign_classes()
    support = set(x.support())
    choices: dict[int, Scalar] = {}
    for pattern in sorted(classes):
        running = Fraction(0)
        for i in classes[pattern]:
            if i not in support:
                continue
            target = running + x[i]
            d = pick_letter(nets.net(i), target)
            choices[i] = d
            running = target - d
    diff = x.sub(Coeffs(choices))
    error = space.norm(diff)
    guarantee = (1 << space.rows) * nets.max_mesh(x.support())
    return _report(x, choices, error, guarantee, nets)


def quantize_schauder(x: Coeffs, nets: NetFamily, space: SchauderSpace | None = None) -> QuantizerReport:
    """Hat-function quantizer: control the running error function node by node.

    Processing indices in order keeps the running error piecewise linear and
    *linear* across the support of the next hat, so its maximum there sits at
    an endpoint or the midpoint.  A max at an endpoint is already settled by
    earlier steps and the letter is zero; otherwise the letter is chosen
    nearest the midpoint value, pinning the new maximum within one mesh.
    """
    if space is None:
        space = SchauderSpace(max(x.max_index(), 1))
    for i, _ in x:
        if i > space.max_index:
            raise IndexError(f"index {i} outside the hat family")
    grid = space.grid()
    denom = len(grid) - 1  # grid j/denom for j = 0..denom
    err = [Fraction(0)] * (denom + 1)
    choices: dict[int, Scalar] = {}

    def node(p: Scalar) -> int:
        j = p * denom
        return j.numerator // j.denominator

    for i, a in x:
        if i == 0:
            d = pick_letter(nets.net(0), a)
            choices[0] = d
            step = a - d
            if step:
                for j in range(denom + 1):
                    err[j] += step
            continue
        if i == 1:
            target = err[denom] + a  # value at t = 1, where f_1 peaks
            d = pick_letter(nets.net(1), target)
            choices[1] = d
            step = a - d
            if step:
                for j in range(denom + 1):
                    err[j] += step * grid[j]
            continue
        lo, hi, mid = _hat_nodes(i)
        j_lo, j_hi, j_mid = node(lo), node(hi), node(mid)
        end_max = max(abs(err[j_lo]), abs(err[j_hi]))
        mid_value = err[j_mid] + a
        if end_max >= abs(mid_value):
            d = Fraction(0)
        else:
            d = pick_letter(nets.net(i), mid_value)
        choices[i] = d
        step = a - d
        if step:
            half = mid - lo
            for j in range(j_lo + 1, j_hi):
                err[j] += step * (1 - abs(grid[j] - mid) / half)
    error = max((abs(v) for v in err), default=Fraction(0))
    return _report(x, choices, error, nets.max_mesh(x.support()), nets)


def _hat_nodes(i: int) -> tuple[Scalar, Scalar, Scalar]:
    k = i.bit_length() - 1
    width = Fraction(1, 1 << k)
    lo = (i - (1 << k)) * width
    return lo, lo + width, lo + width / 2


def quantize_tree(x: Coeffs, nets: NetFamily, space: TreeSpace) -> QuantizerReport:
    """Path-sum quantizer: control the error path sum at each processed node."""
    support = set(x.support())
    choices: dict[int, Scalar] = {}
    err_path: list[Scalar] = []
    worst = Fraction(0)
    for i, parent in enumerate(space.parents):
        above = err_path[parent] if parent is not None else Fraction(0)
        if i in support:
            target = above + x[i]
            d = pick_letter(nets.net(i), target)
            choices[i] = d
            here = target - d
        else:
            here = above
        err_path.append(here)
        if abs(here) > worst:
            worst = abs(here)
    return _report(x, choices, worst, nets.max_mesh(x.support()), nets)


def y_series_bound(blocks: int) -> Scalar:
    """The truncated sum of 1/n^2 entering the direct-sum guarantee."""
    return sum((Fraction(1, n * n) for n in range(1, blocks + 1)), Fraction(0))


def quantize_y(x: Coeffs, nets: NetFamily, space: DirectSumYSpace) -> QuantizerReport:
    """Direct-sum quantizer: prefix greedy inside each block, plus one rounding.

    Within block n the first n^2 coordinates are quantized by the prefix rule
    and the closing coordinate by plain rounding; the block coupling then
    costs at most 3*delta on the sup part and delta/n^2 per block on the
    inner part, giving the truncated (3 + sum 1/n^2) * delta bound.
    """
    per_block: dict[int, list[tuple[int, int, Scalar]]] = {}
    for flat, a in x:
        n, j = space.block_coord(flat)
        per_block.setdefault(n, []).append((j, flat, a))
    choices: dict[int, Scalar] = {}
    for n in sorted(per_block):
        running = Fraction(0)
        for j, flat, a in sorted(per_block[n]):
            if j == n * n + 1:
                choices[flat] = pick_letter(nets.net(flat), a)
            else:
                target = running + a
                d = pick_letter(nets.net(flat), target)
                choices[flat] = d
                running = target - d
    diff = x.sub(Coeffs(choices))
    error = space.norm(diff)
    delta = nets.max_mesh(x.support())
    guarantee = delta * (3 + y_series_bound(space.blocks))
    return _report(x, choices, error, guarantee, nets)
