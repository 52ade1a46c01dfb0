"""Gate-list circuit IR: a small quantum-assembly parser and a dependency DAG.

Supported input subset: one `qreg` declaration, `rx/ry/rz(theta) q[i]`,
`cz/cx/swap q[i],q[j]`, `//` comments, and the usual OPENQASM/include
preamble (ignored).  Measurement and classical control are rejected: the
success-probability model downstream prices unitary gates only.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np


class GateKind(str, Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    TQG = "tqg"
    SHUTTLE = "shuttle"
    SWAP = "swap"


ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)
TWO_QUBIT = (GateKind.TQG, GateKind.SWAP)


class ParseError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind in ROTATIONS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind.value} takes exactly one operand")
            if self.angle is None:
                raise ValueError(f"{self.kind.value} requires an angle")
        elif self.kind in TWO_QUBIT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind.value} takes two distinct operands")
        elif self.kind is GateKind.SHUTTLE:
            raise ValueError("shuttles are compiler-internal, not circuit gates")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    name: str = field(default="circuit", compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for i, g in enumerate(self.gates):
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {i}: operand {q} out of range")


_REJECTED = {
    "measure": "measurement is not supported (unitary gates only)",
    "creg": "classical registers are not supported",
    "if": "classical control is not supported",
    "reset": "reset is not supported",
    "barrier": "barriers are not supported",
}

_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_][\w]*)\s*\[\s*(\d+)\s*\]$")
_ROT_RE = re.compile(r"^(rx|ry|rz)\s*\(([^)]*)\)\s+([A-Za-z_][\w]*)\s*\[\s*(\d+)\s*\]$")
_TWOQ_RE = re.compile(
    r"^(cx|cz|swap)\s+([A-Za-z_][\w]*)\s*\[\s*(\d+)\s*\]\s*,"
    r"\s*([A-Za-z_][\w]*)\s*\[\s*(\d+)\s*\]$"
)


def _eval_angle(expr: str, line: int) -> float:
    """Evaluate a constant angle expression (numbers, pi, + - * / and parens)."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError:
        raise ParseError(f"bad angle expression {expr!r}", line) from None

    def walk(node) -> float:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(
            node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)
        ):
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            return a / b
        raise ParseError(f"bad angle expression {expr!r}", line)

    return walk(tree)


def parse_circuit(text: str, name: str = "circuit") -> Circuit:
    n_qubits: int | None = None
    reg_name: str | None = None
    gates: list[Gate] = []

    def check_reg(reg: str, idx: int, line: int) -> int:
        if n_qubits is None:
            raise ParseError("gate before qreg declaration", line)
        if reg != reg_name:
            raise ParseError(f"unknown register {reg!r}", line)
        if idx >= n_qubits:
            raise ParseError(f"operand q[{idx}] out of range (qreg size {n_qubits})", line)
        return idx

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if stmt.startswith("OPENQASM") or stmt.startswith("include"):
                continue
            head = stmt.split()[0].split("(")[0]
            if head in _REJECTED:
                raise ParseError(_REJECTED[head], lineno)
            m = _QREG_RE.match(stmt)
            if m:
                if n_qubits is not None:
                    raise ParseError("multiple qreg declarations", lineno)
                reg_name, n_qubits = m.group(1), int(m.group(2))
                if n_qubits < 1:
                    raise ParseError("qreg must declare at least one qubit", lineno)
                continue
            m = _ROT_RE.match(stmt)
            if m:
                kind, expr, reg, idx = m.groups()
                q = check_reg(reg, int(idx), lineno)
                gates.append(Gate(GateKind(kind), (q,), _eval_angle(expr, lineno)))
                continue
            m = _TWOQ_RE.match(stmt)
            if m:
                kind, reg_a, ia, reg_b, ib = m.groups()
                qa = check_reg(reg_a, int(ia), lineno)
                qb = check_reg(reg_b, int(ib), lineno)
                if qa == qb:
                    raise ParseError("two-qubit gate needs distinct operands", lineno)
                # cx and cz both lower to the abstract two-qubit gate; the cost
                # model owns any native-decomposition multiplier.
                mapped = GateKind.SWAP if kind == "swap" else GateKind.TQG
                gates.append(Gate(mapped, (qa, qb)))
                continue
            raise ParseError(f"unsupported statement {stmt!r}", lineno)

    if n_qubits is None:
        raise ParseError("missing qreg declaration", 1)
    return Circuit(n_qubits=n_qubits, gates=tuple(gates), name=name)


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qreg q[{circuit.n_qubits}];"]
    for g in circuit.gates:
        if g.kind in ROTATIONS:
            lines.append(f"{g.kind.value}({g.angle!r}) q[{g.qubits[0]}];")
        elif g.kind is GateKind.TQG:
            lines.append(f"cz q[{g.qubits[0]}],q[{g.qubits[1]}];")
        else:
            lines.append(f"swap q[{g.qubits[0]}],q[{g.qubits[1]}];")
    return "\n".join(lines) + "\n"


def build_dag(circuit: Circuit) -> list[tuple[int, int]]:
    """Dependency edges (i, j): the gates share an operand with no gate on that
    operand in between.  Sorted, deduplicated."""
    last_use: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    for j, gate in enumerate(circuit.gates):
        for q in gate.qubits:
            if q in last_use:
                edges.add((last_use[q], j))
            last_use[q] = j
    return sorted(edges)


def dag_depth(circuit: Circuit) -> int:
    """Longest dependency chain, in gates — the depth lower bound for scheduling."""
    depth: dict[int, int] = {}
    last_use: dict[int, int] = {}
    longest = 0
    for j, gate in enumerate(circuit.gates):
        d = 1 + max((depth[last_use[q]] for q in gate.qubits if q in last_use), default=0)
        depth[j] = d
        for q in gate.qubits:
            last_use[q] = j
        longest = max(longest, d)
    return longest


def random_circuit(
    n_qubits: int,
    n_gates: int,
    rng: np.random.Generator,
    two_qubit_fraction: float = 0.3,
    name: str = "random",
) -> Circuit:
    """Seeded random workload mixing rotations with two-qubit gates."""
    angles = [math.pi * k / 4 for k in (-3, -2, -1, 1, 2, 3, 4)]
    gates: list[Gate] = []
    for _ in range(n_gates):
        if n_qubits >= 2 and rng.random() < two_qubit_fraction:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate(GateKind.TQG, (int(a), int(b))))
        else:
            kind = (GateKind.RX, GateKind.RY, GateKind.RZ)[int(rng.integers(3))]
            q = int(rng.integers(n_qubits))
            gates.append(Gate(kind, (q,), angles[int(rng.integers(len(angles)))]))
    return Circuit(n_qubits=n_qubits, gates=tuple(gates), name=name)
