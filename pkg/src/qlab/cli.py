"""Batch CLI: every experiment as a subcommand with a reproducible JSON report.

Config resolution is layered: built-in defaults, then the --config JSON
document, then explicit flags (flag names mirror config keys in kebab-case).
The fully resolved config is echoed into every report, so a report plus the
tool version is enough to replay a run.  Exit codes: 0 success, 1 bad config,
2 a checked property was violated, 3 a search budget ran out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, constructions, covering, oracle, quantize, serialize
from .core import (
    Coeffs,
    CoverageError,
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
    MultiSignSummingSpace,
    SchauderSpace,
    SummingSpace,
    TreeSpace,
)
from .sampling import random_coeffs, seeded

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2
EXIT_BUDGET = 3


class ConfigError(Exception):
    pass


def _load_json_arg(value):
    """Accept inline JSON or @path to a JSON file."""
    if value is None:
        return None
    if isinstance(value, (dict, list)):
        return value
    text = value
    if isinstance(text, str) and text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as handle:
            text = handle.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {value!r} ({exc})") from None


def default_budget() -> int:
    env = os.environ.get("QLAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"QLAB_BUDGET must be an integer, got {env!r}") from None
    return oracle.DEFAULT_BUDGET


def _resolve(defaults: dict, config_path, flag_values: dict) -> dict:
    resolved = dict(defaults)
    if config_path:
        document = _load_json_arg("@" + config_path)
        if not isinstance(document, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(document) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(document)
    for key, value in flag_values.items():
        if value is not None:
            resolved[key] = value
    return resolved


def _nets_from_config(cfg) -> NetFamily:
    if cfg.get("nets") is not None:
        return serialize.net_family_from_json(_load_json_arg(cfg["nets"]))
    return lattice_family(as_scalar(cfg.get("delta", "1")))


def _space_from_config(cfg):
    if cfg.get("space") is None:
        raise ConfigError("a --space specification is required")
    return serialize.space_from_json(_load_json_arg(cfg["space"]))


def _vector_from_config(cfg) -> Coeffs:
    if cfg.get("vector") is None:
        raise ConfigError("a --vector specification is required")
    data = _load_json_arg(cfg["vector"])
    if isinstance(data, list):
        return Coeffs.from_values([as_scalar(v) for v in data])
    return serialize.coeffs_from_json(data)


def _greedy_for(space, x, nets):
    if isinstance(space, C0Space):
        return quantize.quantize_c0(x, nets)
    if isinstance(space, SummingSpace):
        return quantize.quantize_summing(x, nets)
    if isinstance(space, MultiSignSummingSpace):
        return quantize.quantize_multisign(x, nets, space)
    if isinstance(space, SchauderSpace):
        return quantize.quantize_schauder(x, nets, space)
    if isinstance(space, TreeSpace):
        return quantize.quantize_tree(x, nets, space)
    if isinstance(space, DirectSumYSpace):
        return quantize.quantize_y(x, nets, space)
    return None


# ---------------------------------------------------------------- commands


def cmd_norm(cfg):
    space = _space_from_config(cfg)
    data = _load_json_arg(cfg["vectors"]) if cfg.get("vectors") else [_load_json_arg(cfg["vector"])]
    results = []
    for entry in data:
        x = serialize.coeffs_from_json(entry) if isinstance(entry, dict) else Coeffs.from_values(
            [as_scalar(v) for v in entry]
        )
        value = space.norm(x)
        results.append(
            {"vector": serialize.coeffs_to_json(x), "norm": scalar_str(value), "norm_float": float(value)}
        )
    return {"norms": results}, EXIT_OK


def cmd_quantize(cfg):
    space = _space_from_config(cfg)
    x = _vector_from_config(cfg)
    nets = _nets_from_config(cfg)
    if cfg.get("quantizer") == "round-nearest":
        choice = quantize.round_nearest(x, nets)
        error = space.norm(x.sub(choice.approximant()))
        return {
            "quantizer": "round-nearest",
            "choice": serialize.choice_to_json(choice),
            "error": scalar_str(error),
            "guarantee": None,
        }, EXIT_OK
    report = _greedy_for(space, x, nets)
    if report is None:
        raise ConfigError("no greedy quantizer for this family; use --quantizer round-nearest")
    payload = {"quantizer": "greedy", **serialize.quantizer_report_to_json(report)}
    return payload, EXIT_OK if report.within_guarantee() else EXIT_VIOLATION


def cmd_oracle(cfg):
    space = _space_from_config(cfg)
    nets = _nets_from_config(cfg)
    budget = int(cfg["budget"])
    check = cfg.get("check", "best")
    if check == "best":
        x = _vector_from_config(cfg)
        section = _section(cfg, x)
        problem = oracle.SectionProblem(
            space, section, nets, support_restricted=cfg.get("mode", "cqp") == "cqp", budget=budget
        )
        result = oracle.best_quantization(problem, x)
        payload = {"check": "best", **serialize.oracle_result_to_json(result)}
        greedy = _greedy_for(space, x, nets)
        code = EXIT_OK
        if greedy is not None:
            payload["greedy_error"] = scalar_str(greedy.error)
            if result.optimum > greedy.error:
                code = EXIT_VIOLATION
        return payload, code
    if check == "property-p":
        section = _section(cfg, None)
        result = oracle.check_property_p(space, nets, section, budget)
        return {"check": "property-p", **serialize.property_p_to_json(result)}, EXIT_OK
    if check == "quasi-greedy":
        section = _section(cfg, None)
        report = oracle.quasi_greedy_constants(
            space, section, as_scalar(cfg["delta"]), int(cfg["samples"]), int(cfg["seed"])
        )
        return {"check": "quasi-greedy", **serialize.quasi_greedy_to_json(report)}, EXIT_OK
    raise ConfigError(f"unknown oracle check {check!r}")


def _section(cfg, x) -> tuple[int, ...]:
    if cfg.get("section"):
        return tuple(int(i) for i in str(cfg["section"]).split(","))
    if x is not None:
        space = _space_from_config(cfg)
        return tuple(range(space.dim))
    raise ConfigError("a --section is required")


def cmd_sweep_eps(cfg):
    space = _space_from_config(cfg)
    section = tuple(range(space.dim)) if not cfg.get("section") else _section(cfg, None)
    deltas = [as_scalar(d) for d in str(cfg["deltas"]).split(",")]
    if not deltas:
        raise ConfigError("need at least one delta")
    seed = int(cfg["seed"])
    samples = int(cfg["samples"])
    budget = int(cfg["budget"])
    mode = cfg.get("mode", "cqp")
    reference = deltas[0]
    rows = []
    for delta in deltas:
        problem = oracle.SectionProblem(
            space, section, lattice_family(delta), support_restricted=mode == "cqp", budget=budget
        )
        scale = delta / reference
        if cfg.get("box-radius") is not None:
            estimate = oracle.eps_space_estimate(
                problem, as_scalar(cfg["box-radius"]) * scale, samples, seed
            )
        else:
            estimate = oracle.eps_ball_estimate(problem, samples, seed, scale=scale)
        rows.append({"delta": scalar_str(delta), **serialize.eps_estimate_to_json(estimate)})
    ratios = {
        row["delta"]: Fraction(row["lower_bound"]) / as_scalar(row["delta"]) for row in rows
    }
    scaling_exact = len(set(ratios.values())) <= 1
    payload = {"estimates": rows, "scaling_exact": scaling_exact}
    return payload, EXIT_OK if scaling_exact else EXIT_VIOLATION


def cmd_haar(cfg):
    levels = [int(v) for v in str(cfg["levels"]).split(",")]
    deltas = [as_scalar(v) for v in str(cfg["deltas"]).split(",")]
    budget = int(cfg["budget"])
    rows = []
    code = EXIT_OK
    for level in levels:
        for delta in deltas:
            distance, result = oracle.haar_witness_distance(level, delta, budget)
            guaranteed = level >= 2 / delta  # flat witness is 1-separated from the mesh set
            row = {
                "level": level,
                "delta": scalar_str(delta),
                "distance": scalar_str(distance),
                "distance_float": float(distance),
                "nodes": result.nodes,
                "bound_applies": guaranteed,
            }
            if guaranteed and distance < 1:
                code = EXIT_VIOLATION
            rows.append(row)
    return {"distances": rows}, code


def cmd_covering(cfg):
    check = cfg.get("check", "parallelogram")
    mesh = as_scalar(cfg["mesh"])
    if check == "parallelogram":
        report = covering.parallelogram_example(as_scalar(cfg["eta"]), mesh)
        return {"check": check, **serialize.parallelogram_to_json(report)}, EXIT_OK
    body = covering.Body.from_vertices(_load_json_arg(cfg["body"])["vertices"])
    if check == "p3":
        verdict = covering.check_p3(body, mesh)
        return {"check": check, **serialize.cover_verdict_to_json(verdict)}, EXIT_OK
    if check == "p2":
        nets = serialize.net_family_from_json(_load_json_arg(cfg["nets"]))
        per_axis = [nets.net(i) for i in range(body.dim)]
        verdict = covering.check_p2(body, per_axis, mesh)
        return {"check": check, **serialize.cover_verdict_to_json(verdict)}, EXIT_OK
    lattice = (
        covering.LatticeSpec.from_rows(_load_json_arg(cfg["lattice"])["rows"])
        if cfg.get("lattice")
        else covering.LatticeSpec.integers(body.dim)
    )
    if check == "p1":
        verdict = covering.check_p1(body, lattice, mesh)
        return {"check": check, **serialize.cover_verdict_to_json(verdict)}, EXIT_OK
    if check == "amplification":
        eps1 = as_scalar(cfg["eps1"]) if cfg.get("eps1") is not None else None
        report = covering.amplification_check(
            body,
            lattice,
            as_scalar(cfg["eps0"]),
            eps1,
            mesh,
            as_scalar(cfg["box-radius"]),
        )
        payload = {"check": check, **serialize.amplification_to_json(report)}
        # The theorem promises phase 2 whenever phase 1 holds.
        code = EXIT_VIOLATION if report.phase1.holds and not report.phase2.holds else EXIT_OK
        return payload, code
    raise ConfigError(f"unknown covering check {check!r}")


def cmd_construct(cfg):
    target = cfg.get("target")
    seed = int(cfg["seed"])
    samples = int(cfg["samples"])
    if target == "y":
        inner = serialize.space_from_json(_load_json_arg(cfg["inner"]))
        space = constructions.build_y_space(inner, int(cfg["blocks"]))
        nets = _nets_from_config(cfg)
        rng = seeded(seed)
        worst = Fraction(0)
        violations = 0
        for _ in range(samples):
            x = random_coeffs(rng, range(space.dim), density=0.5)
            report = quantize.quantize_y(x, nets, space)
            worst = max(worst, report.error)
            if not report.within_guarantee():
                violations += 1
        payload = {
            "target": "y",
            "space": serialize.space_to_json(space),
            "dimension": space.dim,
            "basis_normalized": True,
            "samples": samples,
            "worst_error": scalar_str(worst),
            "guarantee_violations": violations,
        }
        return payload, EXIT_OK if violations == 0 else EXIT_VIOLATION
    if target == "u":
        base = C0Space(int(cfg["base-dim"]))
        build = constructions.build_u_space(
            base, as_scalar(cfg["eta"]), int(cfg["stages"]), seed=seed
        )
        nets = _nets_from_config(cfg)
        rng = seeded(seed)
        worst = Fraction(0)
        violations = 0
        for _ in range(samples):
            x = random_coeffs(rng, range(build.dim), density=0.2)
            report = constructions.quantize_u(build, x, nets)
            worst = max(worst, report.error)
            if not report.within_guarantee():
                violations += 1
        equivalence = constructions.subsequence_equivalence_check(build, samples, seed)
        ratios_ok = (
            equivalence.min_ratio >= 1 - build.eta and equivalence.max_ratio <= 1
        )
        payload = {
            "target": "u",
            "build": serialize.u_build_to_json(build),
            "dimension": build.dim,
            "functional_count": len(build.functionals),
            "samples": samples,
            "worst_error": scalar_str(worst),
            "guarantee_violations": violations,
            "equivalence": serialize.equivalence_to_json(equivalence),
        }
        if cfg.get("build-out"):
            with open(cfg["build-out"], "w", encoding="utf-8") as handle:
                json.dump(serialize.u_build_to_json(build), handle, sort_keys=True, indent=2)
        ok = violations == 0 and ratios_ok
        return payload, EXIT_OK if ok else EXIT_VIOLATION
    raise ConfigError("--target must be y or u")


# ---------------------------------------------------------------- plumbing

COMMANDS = {
    "norm": cmd_norm,
    "quantize": cmd_quantize,
    "oracle": cmd_oracle,
    "sweep-eps": cmd_sweep_eps,
    "haar": cmd_haar,
    "covering": cmd_covering,
    "construct": cmd_construct,
}

COMMON_DEFAULTS = {
    "seed": 0,
    "out": None,
    "format": "json",
    "budget": None,  # filled from QLAB_BUDGET or the library default
    "mesh": "1/64",
}

COMMAND_DEFAULTS = {
    "norm": {"space": None, "vector": None, "vectors": None},
    "quantize": {"space": None, "vector": None, "nets": None, "delta": "1", "quantizer": None},
    "oracle": {
        "space": None,
        "vector": None,
        "nets": None,
        "delta": "1",
        "check": "best",
        "mode": "cqp",
        "section": None,
        "samples": 64,
    },
    "sweep-eps": {
        "space": None,
        "section": None,
        "deltas": "1,2",
        "samples": 32,
        "mode": "cqp",
        "box-radius": None,
    },
    "haar": {"levels": "2,3", "deltas": "1"},
    "covering": {
        "check": "parallelogram",
        "body": None,
        "lattice": None,
        "nets": None,
        "eta": "1/8",
        "eps0": "1/2",
        "eps1": None,
        "box-radius": "2",
    },
    "construct": {
        "target": None,
        "inner": None,
        "blocks": 4,
        "base-dim": 2,
        "eta": "1/2",
        "stages": 2,
        "nets": None,
        "delta": "1/3",
        "samples": 50,
        "build-out": None,
    },
}


def _flag_name(key: str) -> str:
    return "--" + key


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qlab {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", default=None, help="JSON config file; flags override")
        for key in {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[name]}:
            sub.add_argument(_flag_name(key), dest=key, default=None)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.command
    defaults = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[name]}
    flag_values = {key: getattr(args, key) for key in defaults}
    try:
        cfg = _resolve(defaults, args.config, flag_values)
        if cfg["budget"] is None:
            cfg["budget"] = default_budget()
        results, code = COMMANDS[name](cfg)
    except ConfigError as exc:
        print(f"qlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CoverageError, MeshTooCoarse) as exc:
        print(f"qlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SearchBudgetExceeded as exc:
        print(f"qlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = {
        "tool": "qlab",
        "version": __version__,
        "command": name,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "results": results,
    }
    text = _render(report, cfg["format"])
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text)
    return code


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    if fmt == "csv":
        return _render_csv(report)
    raise ConfigError(f"unknown format {fmt!r}")


def _flatten(prefix: str, value, rows: list):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], rows)
    elif isinstance(value, list):
        for idx, item in enumerate(value):
            _flatten(f"{prefix}[{idx}]", item, rows)
    else:
        rows.append((prefix, value))


def _render_csv(report: dict) -> str:
    rows: list[tuple[str, object]] = []
    _flatten("", report["results"], rows)
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["key", "value"])
    for key, value in rows:
        writer.writerow([key, value])
    return buffer.getvalue()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
