"""Estimated Success Probability of a compiled circuit, in log domain.

Three multiplicative terms: per-gate fidelities, nearest-neighbor crosstalk
between gates sharing a cycle, and a dephasing survival factor for the total
circuit duration.  Everything accumulates as log-probabilities so very deep
circuits still rank correctly after the probability itself underflows.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .compiler import CompiledCircuit, PlacedGate
from .noise import NoiseConfig, gate_duration, gate_fidelity
from .topology import Topology


@dataclass(frozen=True)
class EspBreakdown:
    log_gate_term: float
    log_crosstalk_term: float
    log_decoherence_term: float
    t_total: float
    crosstalk_edge_count: int

    @property
    def total_log_esp(self) -> float:
        return self.log_gate_term + self.log_crosstalk_term + self.log_decoherence_term

    @property
    def esp(self) -> float:
        """exp of the total; may underflow to 0.0 — display only, never compare."""
        return math.exp(self.total_log_esp)

    @property
    def underflowed(self) -> bool:
        return self.total_log_esp < 0 and self.esp < sys.float_info.min

    def to_dict(self) -> dict:
        return {
            "log_gate_term": self.log_gate_term,
            "log_crosstalk_term": self.log_crosstalk_term,
            "log_decoherence_term": self.log_decoherence_term,
            "total_log_esp": self.total_log_esp,
            "esp": self.esp if not self.underflowed else 0.0,
            "underflowed": self.underflowed,
            "t_total": self.t_total,
            "crosstalk_edge_count": self.crosstalk_edge_count,
        }


def format_esp(breakdown: EspBreakdown) -> str:
    if breakdown.underflowed:
        return f"underflow (log ESP = {breakdown.total_log_esp:.6g})"
    return f"{breakdown.esp:.10g}"


def gate_term(compiled: CompiledCircuit, config: NoiseConfig) -> float:
    """Sum of log fidelities over every operation in every cycle."""
    total = 0.0
    for cycle in compiled.cycles:
        for g in cycle.gates:
            total += math.log(gate_fidelity(g.kind, config))
    return total


def crosstalk_pairs(
    gates: Sequence[PlacedGate], topology: Topology
) -> list[tuple[int, int, int]]:
    """Pairs of same-cycle operations joined by coupling edges.

    Returns (i, j, n_links) per unordered gate pair with at least one edge
    between their site sets; shuttles contribute both of their dots.
    """
    out = []
    for i in range(len(gates)):
        for j in range(i + 1, len(gates)):
            n_links = sum(
                1
                for a in gates[i].sites
                for b in gates[j].sites
                if topology.has_edge(a, b)
            )
            if n_links:
                out.append((i, j, n_links))
    return out


def crosstalk_term(compiled: CompiledCircuit, config: NoiseConfig) -> tuple[float, int]:
    """Log crosstalk factor and the total number of contributing edges.

    Each linking edge contributes the harmonic mean of the two gate
    fidelities: 2 / (1/F_i + 1/F_j).
    """
    total = 0.0
    edges = 0
    for cycle in compiled.cycles:
        pairs = crosstalk_pairs(cycle.gates, compiled.topology)
        for i, j, n_links in pairs:
            f_i = gate_fidelity(cycle.gates[i].kind, config)
            f_j = gate_fidelity(cycle.gates[j].kind, config)
            harmonic = 2.0 / (1.0 / f_i + 1.0 / f_j)
            total += n_links * math.log(harmonic)
            edges += n_links
    return total, edges


def duration(compiled: CompiledCircuit, config: NoiseConfig) -> float:
    """Total circuit time: the sum over cycles of the slowest member gate."""
    total = 0.0
    for cycle in compiled.cycles:
        if cycle.gates:
            total += max(gate_duration(g.kind, config) for g in cycle.gates)
    return total


def esp_breakdown(compiled: CompiledCircuit, config: NoiseConfig) -> EspBreakdown:
    """Full success-probability breakdown for a compiled circuit.

    The dephasing term is the probability that all N circuit qubits stay
    coherent for the whole duration: N * (-t / T2*), with N the number of
    occupied dots.
    """
    t = duration(compiled, config)
    log_ct, edges = crosstalk_term(compiled, config)
    return EspBreakdown(
        log_gate_term=gate_term(compiled, config),
        log_crosstalk_term=log_ct,
        log_decoherence_term=compiled.n_qubits * (-t / config.t2_star),
        t_total=t,
        crosstalk_edge_count=edges,
    )
