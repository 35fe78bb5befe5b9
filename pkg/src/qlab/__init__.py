"""qlab: a desk-scale laboratory for coefficient quantization experiments.

Exact polyhedral norms, greedy quantizers with proved error bounds, a
brute-force optimality oracle, covering-geometry checks in low dimension, and
two finite-stage space constructions, all reachable from a batch CLI.
"""

__version__ = "0.1.0"

from .core import (
    Coeffs,
    CoverageError,
    ExplicitNet,
    LatticeNet,
    MeshTooCoarse,
    NetFamily,
    SearchBudgetExceeded,
    as_scalar,
    lattice_family,
    scalar_str,
)
from .norms import (
    C0Space,
    DirectSumYSpace,
    GaugeSpace,
    HaarCantorSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    SummingSpace,
    TreeSpace,
    eval_function,
    normalize_space,
)
from .quantize import (
    QuantizationChoice,
    QuantizerReport,
    quantize_c0,
    quantize_multisign,
    quantize_schauder,
    quantize_summing,
    quantize_tree,
    quantize_y,
    round_nearest,
)

__all__ = [name for name in dir() if not name.startswith("_")]
