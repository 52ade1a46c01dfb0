"""Experiment orchestration: brute-force oracle, search-efficiency metrics,
per-circuit and universal architecture reports, persistence.

Artifacts are plain JSON/CSV keyed by dense architecture ids.  Wall-clock
numbers live in separate `timing` blocks so replaying a manifest reproduces
every other byte.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .circuit_ir import Circuit, parse_circuit
from .design_space import (
    Architecture,
    DesignSpace,
    FULL_DOMAINS,
    VARIABLE_ORDER,
    arch_id,
    default_design_space,
    format_value,
    load_domains,
    load_rules,
    parse_value,
)
from .esp import EspBreakdown
from .noise import NoiseConfig, load_noise_config
from .optimizers import (
    Evaluator,
    OptimizerConfig,
    RunRecord,
    TerminationCondition,
    run,
)

_NUMERIC_VARS = ("xyD", "zD", "tqgD", "sD", "degree")


@dataclass(frozen=True)
class BruteForceResult:
    table: dict[int, EspBreakdown]
    failures: dict[int, str]
    best_id: int
    best_log_esp: float
    wall_time_s: float

    def to_dict(self, include_timing: bool = True) -> dict:
        record = {
            "entries": {
                str(aid): self.table[aid].to_dict() for aid in sorted(self.table)
            },
            "failures": {str(aid): msg for aid, msg in sorted(self.failures.items())},
            "best": {"id": self.best_id, "log_esp": self.best_log_esp},
        }
        if include_timing:
            record["timing"] = {"wall_time_s": self.wall_time_s}
        return record


def brute_force(
    space: DesignSpace, circuit: Circuit, config: NoiseConfig
) -> BruteForceResult:
    """Compile and score every valid architecture exactly once, in id order."""
    evaluator = Evaluator(space, circuit, config)
    table: dict[int, EspBreakdown] = {}
    failures: dict[int, str] = {}
    best_id, best_log = None, float("-inf")
    started = time.perf_counter()
    for arch in space.enumerate_architectures():
        outcome = evaluator.evaluate(arch)
        if outcome.breakdown is None:
            failures[outcome.arch_id] = outcome.error or "compile failed"
            continue
        table[outcome.arch_id] = outcome.breakdown
        if outcome.log_esp > best_log:
            best_log, best_id = outcome.log_esp, outcome.arch_id
    if best_id is None:
        raise RuntimeError("no architecture compiled successfully")
    return BruteForceResult(
        table=table,
        failures=failures,
        best_id=best_id,
        best_log_esp=best_log,
        wall_time_s=time.perf_counter() - started,
    )


def relative_time_to_solution(run_wall_s: float, brute_wall_s: float) -> float:
    """Run time as a percentage of the full brute-force time (lower is better)."""
    if brute_wall_s <= 0:
        raise ValueError("brute-force time must be positive")
    return 100.0 * run_wall_s / brute_wall_s


def relative_calls_to_solution(unique_calls: int, valid_count: int) -> float:
    """Unique compiler calls as a percentage of the design-space size."""
    if valid_count <= 0:
        raise ValueError("valid_count must be positive")
    return 100.0 * unique_calls / valid_count


def universal_recommendation(
    rows: Sequence[Architecture], space: DesignSpace
) -> Architecture:
    """Average the per-circuit best architectures into one recommendation.

    Numeric variables are averaged without their not-applicable (-1) entries
    and snapped to the nearest legal value (ties upward); booleans and
    categorical variables go by majority vote (ties to the lowest code).
    The result is re-validated and repaired with the rule consequences when
    the averages land on an invalid combination.
    """
    if not rows:
        raise ValueError("need at least one architecture row")
    values: dict[str, object] = {}
    for name in VARIABLE_ORDER:
        column = [int(getattr(a, name)) for a in rows]
        if name in _NUMERIC_VARS:
            usable = [v for v in column if v != -1]
            if not usable:
                values[name] = -1
                continue
            mean = sum(usable) / len(usable)
            candidates = [int(v) for v in FULL_DOMAINS[name] if int(v) != -1]
            values[name] = min(candidates, key=lambda v: (abs(v - mean), -v))
        else:
            tally: dict[int, int] = {}
            for v in column:
                tally[v] = tally.get(v, 0) + 1
            values[name] = min(tally, key=lambda v: (-tally[v], v))
    arch = Architecture.from_dict(
        {name: format_value(name, parse_value(name, str(v))) for name, v in values.items()}
    )
    return repair_architecture(arch, space)


def repair_architecture(arch: Architecture, space: DesignSpace) -> Architecture:
    """Apply rule consequences until the architecture validates (or give up)."""
    for _ in range(20):
        result = space.validate(arch)
        if result.valid:
            return arch
        changes: dict[str, object] = {}
        for rule in space.rule_set.rules:
            if rule.rule_id not in result.violations:
                continue
            for fname, v in rule.forces:
                dom = FULL_DOMAINS[fname]
                changes[fname] = next(d for d in dom if int(d) == v)
            for fname, v in rule.forbids:
                current = int(getattr(arch, fname))
                if current == v:
                    dom = FULL_DOMAINS[fname]
                    changes[fname] = next(d for d in dom if int(d) != v)
        if not changes:
            break
        arch = arch.replace(**changes)
    raise RuntimeError("could not repair the averaged architecture")


# ---------------------------------------------------------------------------
# Manifests and experiment driving


@dataclass(frozen=True)
class ExperimentManifest:
    """Everything needed to replay an experiment byte-for-byte (timings aside)."""

    circuits: tuple[str, ...]
    presets: tuple[str, ...] = ("RS",)
    seeds: tuple[int, ...] = tuple(range(10))
    rules_path: str | None = None
    domains_path: str | None = None
    noise_path: str | None = None
    restrict: Mapping[str, tuple] = field(default_factory=dict)
    tc_minutes: float | None = None
    tc_call_fraction: float | None = None
    tc_target_log_esp: float | None = None
    tc_max_iterations: int | None = 10_000
    use_brute_target: bool = True

    def to_dict(self) -> dict:
        return {
            "circuits": list(self.circuits),
            "presets": list(self.presets),
            "seeds": list(self.seeds),
            "rules_path": self.rules_path,
            "domains_path": self.domains_path,
            "noise_path": self.noise_path,
            "restrict": {k: list(v) for k, v in self.restrict.items()},
            "tc_minutes": self.tc_minutes,
            "tc_call_fraction": self.tc_call_fraction,
            "tc_target_log_esp": self.tc_target_log_esp,
            "tc_max_iterations": self.tc_max_iterations,
            "use_brute_target": self.use_brute_target,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentManifest":
        return cls(
            circuits=tuple(data["circuits"]),
            presets=tuple(data.get("presets", ("RS",))),
            seeds=tuple(data.get("seeds", range(10))),
            rules_path=data.get("rules_path"),
            domains_path=data.get("domains_path"),
            noise_path=data.get("noise_path"),
            restrict={k: tuple(v) for k, v in data.get("restrict", {}).items()},
            tc_minutes=data.get("tc_minutes"),
            tc_call_fraction=data.get("tc_call_fraction"),
            tc_target_log_esp=data.get("tc_target_log_esp"),
            tc_max_iterations=data.get("tc_max_iterations", 10_000),
            use_brute_target=data.get("use_brute_target", True),
        )

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2), encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "ExperimentManifest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_space(manifest_or_args) -> DesignSpace:
    m = manifest_or_args
    rules = load_rules(m.rules_path) if m.rules_path else None
    domains = load_domains(m.domains_path) if m.domains_path else None
    space = default_design_space(rules=rules, domains=domains)
    if m.restrict:
        parsed = {
            name: tuple(parse_value(name, str(v)) for v in vals)
            for name, vals in m.restrict.items()
        }
        space = space.restrict(parsed)
    return space


def load_circuit(path) -> Circuit:
    p = Path(path)
    return parse_circuit(p.read_text(encoding="utf-8"), name=p.stem)


def _json_dump(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8")


@dataclass(frozen=True)
class PresetSummary:
    circuit: str
    preset: str
    mean_rel_time: float
    worst_rel_time: float
    mean_rel_calls: float
    worst_rel_calls: float
    target_not_reached: bool
    n_runs: int


def summarize_runs(
    circuit: str,
    preset: str,
    records: Sequence[RunRecord],
    brute_wall_s: float,
    valid_count: int,
) -> PresetSummary:
    rel_times = [relative_time_to_solution(r.wall_time_s, brute_wall_s) for r in records]
    rel_calls = [relative_calls_to_solution(r.unique_calls, valid_count) for r in records]
    return PresetSummary(
        circuit=circuit,
        preset=preset,
        mean_rel_time=sum(rel_times) / len(rel_times),
        worst_rel_time=max(rel_times),
        mean_rel_calls=sum(rel_calls) / len(rel_calls),
        worst_rel_calls=max(rel_calls),
        target_not_reached=any(r.tc_fired != "target" for r in records),
        n_runs=len(records),
    )


def run_experiment(manifest: ExperimentManifest, out_dir) -> dict:
    """Execute a manifest: brute-force each circuit, then every preset x seed.

    Layout under `out_dir`: manifest.json, <circuit>/brute_force.json,
    <circuit>/runs/<preset>/<seed>.json, comparison.{csv,json}, curves.tsv,
    report.{csv,json}.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest.save(out / "manifest.json")
    space = build_space(manifest)
    noise = load_noise_config(manifest.noise_path) if manifest.noise_path else NoiseConfig()

    summaries: list[PresetSummary] = []
    curves: list[tuple] = []
    best_rows: list[tuple[str, Architecture, float]] = []

    for circuit_path in manifest.circuits:
        circuit = load_circuit(circuit_path)
        brute = brute_force(space, circuit, noise)
        _json_dump(out / circuit.name / "brute_force.json", brute.to_dict())
        from .design_space import arch_from_id

        best_rows.append((circuit.name, arch_from_id(brute.best_id), brute.best_log_esp))

        target = brute.best_log_esp if manifest.use_brute_target else None
        tc = TerminationCondition(
            target_log_esp=manifest.tc_target_log_esp
            if manifest.tc_target_log_esp is not None
            else target,
            wall_clock_s=manifest.tc_minutes * 60 if manifest.tc_minutes else None,
            call_fraction=manifest.tc_call_fraction,
            max_iterations=manifest.tc_max_iterations,
        )
        for preset in manifest.presets:
            records = []
            for seed in manifest.seeds:
                evaluator = Evaluator(space, circuit, noise)
                record = run(OptimizerConfig.preset(preset), evaluator, tc, seed)
                records.append(record)
                _json_dump(
                    out / circuit.name / "runs" / preset / f"seed{seed}.json",
                    record.to_dict(),
                )
                for point in record.trajectory:
                    curves.append(
                        (circuit.name, preset, seed, point.iteration, point.best_log_esp)
                    )
            summaries.append(
                summarize_runs(
                    circuit.name, preset, records, brute.wall_time_s, space.valid_count
                )
            )

    write_comparison(out, summaries)
    with open(out / "curves.tsv", "w", encoding="utf-8") as fh:
        fh.write("circuit\tpreset\tseed\titeration\tbest_log_esp\n")
        for row in curves:
            fh.write("\t".join(str(v) for v in row) + "\n")
    write_report(out, best_rows, space)
    return {
        "summaries": summaries,
        "valid_count": space.valid_count,
        "out_dir": str(out),
    }


def write_comparison(out: Path, summaries: Sequence[PresetSummary]) -> None:
    with open(out / "comparison.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "circuit",
                "preset",
                "mean_rel_time",
                "worst_rel_time",
                "mean_rel_calls",
                "worst_rel_calls",
                "target_not_reached",
                "n_runs",
            ]
        )
        for s in summaries:
            writer.writerow(
                [
                    s.circuit,
                    s.preset,
                    f"{s.mean_rel_time:.6f}",
                    f"{s.worst_rel_time:.6f}",
                    f"{s.mean_rel_calls:.6f}",
                    f"{s.worst_rel_calls:.6f}",
                    int(s.target_not_reached),
                    s.n_runs,
                ]
            )
    _json_dump(
        out / "comparison.json",
        {
            "rows": [
                {
                    "circuit": s.circuit,
                    "preset": s.preset,
                    "mean_rel_time": s.mean_rel_time,
                    "worst_rel_time": s.worst_rel_time,
                    "mean_rel_calls": s.mean_rel_calls,
                    "worst_rel_calls": s.worst_rel_calls,
                    "target_not_reached": s.target_not_reached,
                    "n_runs": s.n_runs,
                }
                for s in summaries
            ]
        },
    )


def write_report(
    out: Path, best_rows: Sequence[tuple[str, Architecture, float]], space: DesignSpace
) -> None:
    """Best architecture per circuit plus the averaged universal row."""
    rows = [(name, arch, log_esp) for name, arch, log_esp in best_rows]
    universal = (
        universal_recommendation([arch for _, arch, _ in rows], space) if rows else None
    )
    header = ["circuit", "log_esp"] + list(VARIABLE_ORDER)
    with open(out / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for name, arch, log_esp in rows:
            writer.writerow(
                [name, f"{log_esp:.9g}"]
                + [format_value(v, getattr(arch, v)) for v in VARIABLE_ORDER]
            )
        if universal is not None:
            writer.writerow(
                ["universal", ""]
                + [format_value(v, getattr(universal, v)) for v in VARIABLE_ORDER]
            )
    _json_dump(
        out / "report.json",
        {
            "rows": [
                {"circuit": name, "log_esp": log_esp, "architecture": arch.to_dict()}
                for name, arch, log_esp in rows
            ],
            "universal": universal.to_dict() if universal is not None else None,
        },
    )
