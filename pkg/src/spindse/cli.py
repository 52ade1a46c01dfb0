"""Command-line interface.

Subcommands: enumerate, compile, evaluate, brute-force, optimize, compare,
report.  Common flags select the rule/domain/noise files, restrict variable
domains, seed the search and set termination conditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit_ir import ParseError
from .compiler import CompileError, compile_circuit, format_compiled, verify
from .design_space import (
    DesignSpace,
    DomainError,
    arch_from_id,
    default_design_space,
    load_domains,
    load_rules,
    parse_value,
)
from .esp import esp_breakdown, format_esp
from .harness import (
    ExperimentManifest,
    brute_force,
    build_space,
    load_circuit,
    run_experiment,
    universal_recommendation,
    write_report,
)
from .noise import NoiseConfig, load_noise_config
from .optimizers import (
    Evaluator,
    OptimizerConfig,
    PRESET_NAMES,
    TerminationCondition,
    run,
)


class CliError(RuntimeError):
    pass


def _add_space_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rules", help="rule set file (default: bundled rules)")
    p.add_argument("--domains", help="domains file (default: bundled domains)")
    p.add_argument(
        "--restrict",
        action="append",
        default=[],
        metavar="VAR=V1,V2",
        help="restrict a variable to a sub-domain (repeatable)",
    )


def _add_common_options(p: argparse.ArgumentParser) -> None:
    _add_space_options(p)
    p.add_argument("--noise", help="noise profile file (default: bundled profile)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--tc-minutes", type=float, help="wall-clock budget in minutes")
    p.add_argument(
        "--tc-call-fraction",
        type=float,
        help="stop after this fraction of the valid space has been compiled",
    )
    p.add_argument("--tc-target-logesp", type=float, help="stop at this log-ESP")
    p.add_argument(
        "--tc-max-iterations", type=int, default=10_000, help="iteration safety cap"
    )


def _parse_restrictions(items) -> dict:
    restrict = {}
    for item in items:
        if "=" not in item:
            raise CliError(f"--restrict expects VAR=V1,V2 (got {item!r})")
        name, values = item.split("=", 1)
        name = name.strip()
        parsed = [parse_value(name, v) for v in values.split(",") if v.strip()]
        if not parsed:
            raise CliError(f"--restrict {name}: no values given")
        restrict[name] = tuple(parsed)
    return restrict


def _space_from_args(args) -> DesignSpace:
    rules = load_rules(_existing(args.rules)) if args.rules else None
    domains = load_domains(_existing(args.domains)) if args.domains else None
    space = default_design_space(rules=rules, domains=domains)
    restrict = _parse_restrictions(args.restrict)
    if restrict:
        space = space.restrict(restrict)
    return space


def _noise_from_args(args) -> NoiseConfig:
    if getattr(args, "noise", None):
        return load_noise_config(_existing(args.noise))
    return NoiseConfig()


def _existing(path_str: str) -> Path:
    path = Path(path_str)
    if not path.exists():
        raise CliError(f"file not found: {path}")
    return path


def _tc_from_args(args, default_target=None) -> TerminationCondition:
    target = args.tc_target_logesp if args.tc_target_logesp is not None else default_target
    return TerminationCondition(
        target_log_esp=target,
        wall_clock_s=args.tc_minutes * 60 if args.tc_minutes else None,
        call_fraction=args.tc_call_fraction,
        max_iterations=args.tc_max_iterations,
    )


def _select_architecture(args, space: DesignSpace):
    if args.arch_id is not None:
        arch = arch_from_id(args.arch_id)
    elif args.arch:
        assignments = {}
        for part in args.arch.split(","):
            if "=" not in part:
                raise CliError(f"--arch expects var=value pairs (got {part!r})")
            name, value = part.split("=", 1)
            assignments[name.strip()] = value.strip()
        missing = [v for v in space.domains if v not in assignments]
        if missing:
            raise CliError(f"--arch is missing: {', '.join(missing)}")
        from .design_space import Architecture

        arch = Architecture.from_dict(assignments)
    else:
        raise CliError("select an architecture with --arch-id or --arch")
    result = space.validate(arch)
    if not result.valid:
        raise CliError(
            "architecture violates rules: " + ", ".join(result.violations)
        )
    return arch


def _write_or_print(args, text: str) -> None:
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_enumerate(args) -> int:
    space = _space_from_args(args)
    print(f"valid architectures: {space.valid_count}")
    print(f"unconstrained combinations: {space.total_combinations}")
    if args.list:
        from .design_space import arch_id

        for arch in space.enumerate_architectures():
            print(f"{arch_id(arch)}\t{json.dumps(arch.to_dict(), sort_keys=True)}")
    return 0


def _cmd_compile(args) -> int:
    space = _space_from_args(args)
    noise = _noise_from_args(args)
    circuit = load_circuit(_existing(args.circuit))
    arch = _select_architecture(args, space)
    compiled = compile_circuit(circuit, arch, noise)
    report = verify(circuit, compiled)
    text = format_compiled(compiled)
    stats = compiled.stats()
    stats["verified"] = report.ok
    text += "# " + json.dumps(stats, sort_keys=True) + "\n"
    _write_or_print(args, text)
    return 0 if report.ok else 1


def _cmd_evaluate(args) -> int:
    space = _space_from_args(args)
    noise = _noise_from_args(args)
    circuit = load_circuit(_existing(args.circuit))
    arch = _select_architecture(args, space)
    compiled = compile_circuit(circuit, arch, noise)
    breakdown = esp_breakdown(compiled, noise)
    payload = {
        "circuit": circuit.name,
        "architecture": arch.to_dict(),
        "breakdown": breakdown.to_dict(),
        "esp_display": format_esp(breakdown),
    }
    _write_or_print(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_brute_force(args) -> int:
    space = _space_from_args(args)
    noise = _noise_from_args(args)
    circuit = load_circuit(_existing(args.circuit))
    result = brute_force(space, circuit, noise)
    payload = json.dumps(result.to_dict(), sort_keys=True, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{circuit.name}_brute_force.json").write_text(payload, encoding="utf-8")
    best = arch_from_id(result.best_id)
    print(
        f"evaluated {len(result.table)} architectures "
        f"({len(result.failures)} failures) in {result.wall_time_s:.2f}s"
    )
    print(f"best id {result.best_id} log_esp {result.best_log_esp:.9g}")
    print(json.dumps(best.to_dict(), sort_keys=True))
    return 0


def _cmd_optimize(args) -> int:
    if args.preset not in PRESET_NAMES:
        raise CliError(
            f"unknown preset {args.preset!r}; choose from: {', '.join(PRESET_NAMES)}"
        )
    space = _space_from_args(args)
    noise = _noise_from_args(args)
    circuit = load_circuit(_existing(args.circuit))
    tc = _tc_from_args(args)
    evaluator = Evaluator(space, circuit, noise)
    record = run(OptimizerConfig.preset(args.preset), evaluator, tc, args.seed)
    text = record.to_json() + "\n"
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    print(
        f"{record.preset} seed {record.seed}: best id {record.best_id} "
        f"log_esp {record.best_log_esp:.9g} after {record.unique_calls} unique calls "
        f"({record.tc_fired})"
    )
    return 0


def _cmd_compare(args) -> int:
    if not args.out:
        raise CliError("compare needs --out DIR for its artifacts")
    presets = args.presets.split(",") if args.presets else list(PRESET_NAMES)
    for preset in presets:
        if preset not in PRESET_NAMES:
            raise CliError(f"unknown preset {preset!r}")
    manifest = ExperimentManifest(
        circuits=tuple(str(_existing(c)) for c in args.circuits),
        presets=tuple(presets),
        seeds=tuple(range(args.repetitions)),
        rules_path=args.rules,
        domains_path=args.domains,
        noise_path=args.noise,
        restrict=_parse_restrictions(args.restrict),
        tc_minutes=args.tc_minutes,
        tc_call_fraction=args.tc_call_fraction,
        tc_target_log_esp=args.tc_target_logesp,
        tc_max_iterations=args.tc_max_iterations,
    )
    outcome = run_experiment(manifest, args.out)
    print(f"wrote comparison artifacts to {outcome['out_dir']}")
    for s in outcome["summaries"]:
        flag = " (target not always reached)" if s.target_not_reached else ""
        print(
            f"{s.circuit} {s.preset}: rel time mean {s.mean_rel_time:.2f} "
            f"worst {s.worst_rel_time:.2f}; rel calls mean {s.mean_rel_calls:.2f} "
            f"worst {s.worst_rel_calls:.2f}{flag}"
        )
    return 0


def _cmd_report(args) -> int:
    if not args.out:
        raise CliError("report needs --out DIR")
    space = _space_from_args(args)
    noise = _noise_from_args(args)
    rows = []
    for circuit_path in args.circuits:
        circuit = load_circuit(_existing(circuit_path))
        result = brute_force(space, circuit, noise)
        rows.append((circuit.name, arch_from_id(result.best_id), result.best_log_esp))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(out, rows, space)
    universal = universal_recommendation([a for _, a, _ in rows], space)
    print(f"wrote report to {out}")
    print("universal: " + json.dumps(universal.to_dict(), sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spindse",
        description="Design-space exploration for spin-qubit architectures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="count (or list) valid architectures")
    _add_space_options(p)
    p.add_argument("--list", action="store_true", help="print every architecture")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("compile", help="compile one circuit for one architecture")
    _add_common_options(p)
    p.add_argument("--circuit", required=True)
    p.add_argument("--arch-id", type=int)
    p.add_argument("--arch", help="comma-separated var=value assignments")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("evaluate", help="success-probability breakdown for one pair")
    _add_common_options(p)
    p.add_argument("--circuit", required=True)
    p.add_argument("--arch-id", type=int)
    p.add_argument("--arch")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("brute-force", help="score every valid architecture")
    _add_common_options(p)
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=_cmd_brute_force)

    p = sub.add_parser("optimize", help="run one optimization preset")
    _add_common_options(p)
    p.add_argument("--circuit", required=True)
    p.add_argument("--preset", required=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("compare", help="presets vs brute force on a circuit set")
    _add_common_options(p)
    p.add_argument("circuits", nargs="+")
    p.add_argument("--presets", help="comma-separated preset names (default: all 17)")
    p.add_argument("--repetitions", type=int, default=10)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("report", help="best architecture per circuit + universal row")
    _add_common_options(p)
    p.add_argument("circuits", nargs="+")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, CompileError, ParseError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
