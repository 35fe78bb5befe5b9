"""JSON codecs for the wire formats: scalars as "p/q" strings throughout."""

from __future__ import annotations

from fractions import Fraction

from .core import Coeffs, ExplicitNet, LatticeNet, Net, NetFamily, Scalar, as_scalar, scalar_str
from .covering import (
    AmplificationReport,
    Body,
    CoverVerdict,
    LatticeSpec,
    ParallelogramReport,
)
from .norms import (
    BasisSpace,
    C0Space,
    DirectSumYSpace,
    GaugeSpace,
    HaarCantorSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    SummingSpace,
    TreeSpace,
)
from .oracle import EpsEstimate, OracleResult, PropertyPResult, QuasiGreedyReport
from .quantize import QuantizationChoice, QuantizerReport
from .constructions import EquivalenceReport, StageExtension, USpaceBuild


def coeffs_to_json(x: Coeffs) -> dict:
    return {str(i): scalar_str(v) for i, v in x}


def coeffs_from_json(data: dict) -> Coeffs:
    return Coeffs({int(i): as_scalar(v) for i, v in data.items()})


def point_to_json(point) -> list:
    return [scalar_str(c) for c in point]


def net_to_json(net: Net) -> dict:
    if isinstance(net, LatticeNet):
        return {"kind": "lattice", "delta": scalar_str(net.delta)}
    return {
        "kind": "explicit",
        "points": [scalar_str(p) for p in net.points],
        "delta": scalar_str(net.delta),
        "reach": scalar_str(net.reach),
    }


def net_from_json(data: dict) -> Net:
    kind = data["kind"]
    if kind == "lattice":
        return LatticeNet(as_scalar(data["delta"]))
    if kind == "explicit":
        return ExplicitNet(
            points=tuple(as_scalar(p) for p in data["points"]),
            delta=as_scalar(data["delta"]),
            reach=as_scalar(data["reach"]),
        )
    raise ValueError(f"unknown net kind {kind!r}")


def net_family_to_json(nets: NetFamily) -> dict:
    data = {"default": net_to_json(nets.default)}
    if nets.overrides:
        data["overrides"] = {str(i): net_to_json(n) for i, n in sorted(nets.overrides.items())}
    return data


def net_family_from_json(data: dict) -> NetFamily:
    return NetFamily(
        default=net_from_json(data["default"]),
        overrides={int(i): net_from_json(n) for i, n in data.get("overrides", {}).items()},
    )


def space_to_json(space: BasisSpace) -> dict:
    if isinstance(space, C0Space):
        return {"family": "c0", "n": space.n}
    if isinstance(space, SummingSpace):
        return {"family": "summing", "n": space.n}
    if isinstance(space, MultiSignSummingSpace):
        return {"family": "multisign", "signs": [list(row) for row in space.signs]}
    if isinstance(space, SchauderSpace):
        return {"family": "schauder", "max_index": space.max_index}
    if isinstance(space, TreeSpace):
        return {"family": "tree", "parents": list(space.parents)}
    if isinstance(space, HaarCantorSpace):
        return {"family": "haar", "level": space.level}
    if isinstance(space, DirectSumYSpace):
        return {"family": "y", "inner": space_to_json(space.inner), "blocks": space.blocks}
    if isinstance(space, GaugeSpace):
        return {"family": "gauge", "vertices": [point_to_json(v) for v in space.body.vertices]}
    raise TypeError(f"cannot serialize {type(space).__name__}")


def space_from_json(data: dict) -> BasisSpace:
    family = data["family"]
    if family == "c0":
        return C0Space(int(data["n"]))
    if family == "summing":
        return SummingSpace(int(data["n"]))
    if family == "multisign":
        return MultiSignSummingSpace(tuple(tuple(int(s) for s in row) for row in data["signs"]))
    if family == "schauder":
        return SchauderSpace(int(data["max_index"]))
    if family == "tree":
        return TreeSpace(tuple(None if p is None else int(p) for p in data["parents"]))
    if family == "haar":
        return HaarCantorSpace(int(data["level"]))
    if family == "y":
        return DirectSumYSpace(space_from_json(data["inner"]), int(data["blocks"]))
    if family == "gauge":
        return GaugeSpace(Body.from_vertices(data["vertices"]))
    raise ValueError(f"unknown space family {family!r}")


def choice_to_json(choice: QuantizationChoice) -> dict:
    return {str(i): scalar_str(v) for i, v in choice.values}


def quantizer_report_to_json(report: QuantizerReport) -> dict:
    return {
        "choice": choice_to_json(report.choice),
        "error": scalar_str(report.error),
        "guarantee": scalar_str(report.guarantee),
        "neighborly_excess": scalar_str(report.neighborly_excess),
        "error_float": float(report.error),
        "within_guarantee": report.within_guarantee(),
    }


def oracle_result_to_json(result: OracleResult) -> dict:
    return {
        "choice": choice_to_json(result.choice),
        "optimum": scalar_str(result.optimum),
        "optimum_float": float(result.optimum),
        "nodes": result.nodes,
        "initial_error": scalar_str(result.initial_error),
    }


def eps_estimate_to_json(est: EpsEstimate) -> dict:
    return {
        "lower_bound": scalar_str(est.lower_bound),
        "lower_bound_float": float(est.lower_bound),
        "witness": coeffs_to_json(est.witness) if est.witness is not None else None,
        "sample_count": est.sample_count,
        "kind": est.kind,
        "seed": est.seed,
        "radius": scalar_str(est.radius),
        "certified_upper": est.certified,
    }


def property_p_to_json(result: PropertyPResult) -> dict:
    return {
        "found": result.found,
        "witness": choice_to_json(result.witness) if result.witness else None,
        "witness_norm": scalar_str(result.witness_norm) if result.witness_norm is not None else None,
        "certified": result.certified,
        "nodes": result.nodes,
    }


def quasi_greedy_to_json(report: QuasiGreedyReport) -> dict:
    subset = None
    if report.subset_witness is not None:
        vector, indices = report.subset_witness
        subset = {"vector": coeffs_to_json(vector), "subset": list(indices)}
    return {
        "delta": scalar_str(report.delta),
        "threshold_constant_lower": scalar_str(report.threshold_lower),
        "subset_constant_lower": scalar_str(report.subset_lower),
        "threshold_witness": coeffs_to_json(report.threshold_witness)
        if report.threshold_witness is not None
        else None,
        "subset_witness": subset,
        "sample_count": report.sample_count,
    }


def cover_verdict_to_json(verdict: CoverVerdict) -> dict:
    return {
        "covered": verdict.covered,
        "witness": point_to_json(verdict.witness) if verdict.witness else None,
        "resolution": scalar_str(verdict.resolution),
        "translate_bound": scalar_str(verdict.translate_bound),
        "points_checked": verdict.points_checked,
        "uncovered_count": verdict.uncovered_count,
    }


def amplification_to_json(report: AmplificationReport) -> dict:
    def phase(p):
        return {
            "holds": p.holds,
            "witness": point_to_json(p.witness) if p.witness else None,
            "worst_slack": scalar_str(p.worst_slack),
            "points_checked": p.points_checked,
        }

    return {
        "eps0": scalar_str(report.eps0),
        "eps1": scalar_str(report.eps1),
        "phase1": phase(report.phase1),
        "phase2": phase(report.phase2),
        "resolution": scalar_str(report.resolution),
        "box_radius": scalar_str(report.box_radius),
    }


def parallelogram_to_json(report: ParallelogramReport) -> dict:
    return {
        "eta": scalar_str(report.eta),
        "tiling": cover_verdict_to_json(report.tiling),
        "interior_disjoint": report.interior_disjoint,
        "interior_points_checked": report.interior_points_checked,
        "q_point": point_to_json(report.q_point),
        "q_in_base": report.q_in_base,
        "q_in_shifted": report.q_in_shifted,
        "stretched_net_verdict": cover_verdict_to_json(report.stretched_net_verdict),
    }


def body_to_json(body: Body) -> dict:
    return {
        "vertices": [point_to_json(v) for v in body.vertices],
        "symmetric": body.symmetric,
    }


def body_from_json(data: dict) -> Body:
    return Body.from_vertices(data["vertices"])


def lattice_to_json(lattice: LatticeSpec) -> dict:
    return {"rows": [point_to_json(r) for r in lattice.rows]}


def lattice_from_json(data: dict) -> LatticeSpec:
    return LatticeSpec.from_rows(data["rows"])


def u_build_to_json(build: USpaceBuild) -> dict:
    return {
        "base": space_to_json(build.base),
        "eta": scalar_str(build.eta),
        "meshes": [scalar_str(m) for m in build.meshes],
        "stages": build.stages,
        "markers": list(build.markers),
        "functionals": [[scalar_str(v) for v in f] for f in build.functionals],
        "extensions": [
            [
                {
                    "parent": [scalar_str(v) for v in ext.parent],
                    "marker_weight": scalar_str(ext.marker_weight),
                    "link": ext.link,
                }
                for ext in stage
            ]
            for stage in build.extensions
        ],
    }


def u_build_from_json(data: dict) -> USpaceBuild:
    base = space_from_json(data["base"])
    return USpaceBuild(
        base=base,
        eta=as_scalar(data["eta"]),
        meshes=tuple(as_scalar(m) for m in data["meshes"]),
        stages=int(data["stages"]),
        markers=tuple(int(m) for m in data["markers"]),
        functionals=tuple(
            tuple(as_scalar(v) for v in f) for f in data["functionals"]
        ),
        extensions=tuple(
            tuple(
                StageExtension(
                    parent=tuple(as_scalar(v) for v in ext["parent"]),
                    marker_weight=as_scalar(ext["marker_weight"]),
                    link=int(ext["link"]),
                )
                for ext in stage
            )
            for stage in data["extensions"]
        ),
    )


def equivalence_to_json(report: EquivalenceReport) -> dict:
    return {
        "min_ratio": scalar_str(report.min_ratio),
        "max_ratio": scalar_str(report.max_ratio),
        "sample_count": report.sample_count,
        "eta": scalar_str(report.eta),
    }
