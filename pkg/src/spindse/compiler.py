"""Constraint-aware compilation of circuits onto architecture candidates.

Pipeline: checkerboard initial placement, routing until two-qubit operands
are coupled (two interchangeable routers), and ASAP cycle scheduling under
the architecture's parallelization constraints.  `verify` re-checks the
result along two independent paths: logical-identity tracking through every
shuttle/SWAP, plus a from-scratch constraint validator.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

from .circuit_ir import Circuit, Gate, GateKind, dag_depth
from .design_space import Architecture, RouterKind, SingleQubitImpl, ZRotImpl
from .noise import NoiseConfig, gate_duration
from .topology import Placement, Topology, build_topology, initial_placement


class CompileError(RuntimeError):
    def __init__(self, message: str, gate_index: int | None = None) -> None:
        self.gate_index = gate_index
        if gate_index is not None:
            message = f"gate {gate_index}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class PlacedGate:
    """A gate bound to physical sites.  Shuttles carry (source, target) sites.

    `routing` marks operations inserted purely to move qubits around;
    `source_index` ties an operation to the circuit gate it realizes.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    sites: tuple[int, ...]
    angle: float | None = None
    routing: bool = False
    source_index: int | None = None

    @property
    def axis(self) -> str | None:
        if self.kind is GateKind.RX:
            return "x"
        if self.kind is GateKind.RY:
            return "y"
        if self.kind is GateKind.RZ:
            return "z"
        return None


@dataclass
class Cycle:
    gates: list[PlacedGate] = field(default_factory=list)
    duration: float = 0.0


@dataclass
class CompiledCircuit:
    name: str
    n_qubits: int
    arch: Architecture
    topology: Topology
    initial_sites: tuple[int, ...]
    final_sites: tuple[int, ...]
    cycles: list[Cycle]
    source_gate_count: int
    source_dag_depth: int

    @property
    def depth(self) -> int:
        return len(self.cycles)

    @property
    def gate_count(self) -> int:
        return sum(len(c.gates) for c in self.cycles)

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for cycle in self.cycles:
            for g in cycle.gates:
                counts[g.kind.value] += 1
        return dict(counts)

    def stats(self) -> dict:
        return {
            "depth": self.depth,
            "gate_count": self.gate_count,
            "source_gate_count": self.source_gate_count,
            "gate_overhead": self.gate_count - self.source_gate_count,
            "source_dag_depth": self.source_dag_depth,
            "depth_overhead": self.depth - self.source_dag_depth,
            "class_counts": self.class_counts(),
        }


# Scheduling classes: pairwise/triple co-residency is governed by the
# architecture booleans for XY, Z and two-qubit gates; shuttles only answer
# to their cap and to site disjointness.
_CLASS_XY = "xy"
_CLASS_Z = "z"
_CLASS_TQG = "tqg"
_CLASS_SHUTTLE = "s"


def gate_sched_class(kind: GateKind) -> str:
    if kind in (GateKind.RX, GateKind.RY):
        return _CLASS_XY
    if kind is GateKind.RZ:
        return _CLASS_Z
    if kind in (GateKind.TQG, GateKind.SWAP):
        return _CLASS_TQG
    return _CLASS_SHUTTLE


def parallel_cap(value: int, base: int) -> int | None:
    """Gates of a class admitted per cycle for a percentage cap over `base`.

    -1 means the implementation dictates the limit (no numeric cap); any
    other value is a percentage, floored, with a minimum of one so small
    systems never deadlock.
    """
    if value == -1:
        return None
    return max(1, (value * base) // 100)


class _CycleState:
    __slots__ = ("gates", "sites", "counts", "pulse_key", "pulse_parity")

    def __init__(self) -> None:
        self.gates: list[PlacedGate] = []
        self.sites: set[int] = set()
        self.counts: dict[str, int] = {
            _CLASS_XY: 0,
            _CLASS_Z: 0,
            _CLASS_TQG: 0,
            _CLASS_SHUTTLE: 0,
        }
        self.pulse_key: tuple[str, float] | None = None
        self.pulse_parity: int | None = None


class _Scheduler:
    """ASAP list scheduler; emission order breaks ties (earlier gate first)."""

    def __init__(
        self, arch: Architecture, n_qubits: int, topology: Topology, config: NoiseConfig
    ) -> None:
        self.arch = arch
        self.topology = topology
        self.config = config
        self.cycles: list[_CycleState] = []
        self.durations: list[float] = []
        self.site_free: dict[int, int] = defaultdict(int)
        self.qubit_free: dict[int, int] = defaultdict(int)
        self.caps = {
            _CLASS_XY: parallel_cap(arch.xyD, n_qubits),
            _CLASS_Z: parallel_cap(arch.zD, n_qubits),
            _CLASS_SHUTTLE: parallel_cap(arch.sD, n_qubits),
            _CLASS_TQG: parallel_cap(arch.tqgD, n_qubits // 2),
        }

    def _fits(self, state: _CycleState, g: PlacedGate) -> bool:
        arch = self.arch
        if arch.single_qubit_impl is SingleQubitImpl.SEQUENTIAL and state.gates:
            return False
        if state.sites.intersection(g.sites):
            return False
        cls = gate_sched_class(g.kind)
        cap = self.caps[cls]
        if cap is not None and state.counts[cls] + 1 > cap:
            return False
        if cls in (_CLASS_XY, _CLASS_Z, _CLASS_TQG):
            present = {c for c in (_CLASS_XY, _CLASS_Z, _CLASS_TQG) if state.counts[c]}
            present.add(cls)
            if len(present) > 1:
                allowed = {
                    frozenset((_CLASS_XY, _CLASS_Z)): arch.xy_z,
                    frozenset((_CLASS_XY, _CLASS_TQG)): arch.xy_tqg,
                    frozenset((_CLASS_Z, _CLASS_TQG)): arch.z_tqg,
                    frozenset((_CLASS_XY, _CLASS_Z, _CLASS_TQG)): arch.xy_z_tqg,
                }[frozenset(present)]
                if not allowed:
                    return False
        if cls in (_CLASS_XY, _CLASS_Z) and arch.single_qubit_impl in (
            SingleQubitImpl.GLOBAL,
            SingleQubitImpl.SEMI_GLOBAL,
        ):
            key = (g.axis, g.angle)
            if state.pulse_key is not None and state.pulse_key != key:
                return False
            if arch.single_qubit_impl is SingleQubitImpl.SEMI_GLOBAL:
                parity = self.topology.col(g.sites[0]) % 2
                if state.pulse_parity is not None and state.pulse_parity != parity:
                    return False
        return True

    def place(self, g: PlacedGate) -> int:
        earliest = max(
            [self.site_free[s] for s in g.sites]
            + [self.qubit_free[q] for q in g.qubits]
            + [0]
        )
        c = earliest
        while True:
            while c >= len(self.cycles):
                self.cycles.append(_CycleState())
                self.durations.append(0.0)
            state = self.cycles[c]
            if self._fits(state, g):
                break
            c += 1
        cls = gate_sched_class(g.kind)
        state.gates.append(g)
        state.sites.update(g.sites)
        state.counts[cls] += 1
        if cls in (_CLASS_XY, _CLASS_Z) and self.arch.single_qubit_impl in (
            SingleQubitImpl.GLOBAL,
            SingleQubitImpl.SEMI_GLOBAL,
        ):
            state.pulse_key = (g.axis, g.angle)
            if self.arch.single_qubit_impl is SingleQubitImpl.SEMI_GLOBAL:
                state.pulse_parity = self.topology.col(g.sites[0]) % 2
        self.durations[c] = max(self.durations[c], gate_duration(g.kind, self.config))
        for s in g.sites:
            self.site_free[s] = c + 1
        for q in g.qubits:
            self.qubit_free[q] = c + 1
        return c

    def freeze(self) -> list[Cycle]:
        return [
            Cycle(gates=list(state.gates), duration=dur)
            for state, dur in zip(self.cycles, self.durations)
        ]


# ---------------------------------------------------------------------------
# Routers


def swap_beats_shuttles(n_shuttles: int, config: NoiseConfig) -> bool:
    """True when one SWAP is higher-fidelity than `n_shuttles` shuttles."""
    return config.f_shuttle**n_shuttles < config.f_swap


class RoutingDeadlock(RuntimeError):
    pass


def _bfs_path(
    start: int,
    targets: set[int],
    neighbors,
    blocked: set[int],
) -> list[int] | None:
    """Shortest path from start to any target; neighbor order breaks ties."""
    if start in targets:
        return [start]
    prev: dict[int, int] = {start: start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in neighbors(cur):
            if nxt in prev or nxt in blocked:
                continue
            prev[nxt] = cur
            if nxt in targets:
                path = [nxt]
                while path[-1] != start:
                    path.append(prev[path[-1]])
                return path[::-1]
            queue.append(nxt)
    return None


def _exchange_moves(
    topo: Topology, pl: Placement, q: int, target: int
) -> list[PlacedGate]:
    """One checkerboard-preserving exchange step onto a diagonal neighbor site.

    The step threads through the (always empty) shared rectilinear neighbors:
    two shuttles when the target is free, the fixed four-shuttle exchange when
    another qubit sits there.
    """
    s = pl.site_of(q)
    shared = sorted(
        set(topo.rectilinear_neighbors(s)) & set(topo.rectilinear_neighbors(target))
    )
    mids = [m for m in shared if pl.is_empty(m)]
    if not mids:
        raise RoutingDeadlock("no free intermediate dot for a checkerboard exchange")
    moves: list[PlacedGate] = []
    other = pl.qubit_at(target)
    if other is None:
        mid = mids[0]
        moves.append(PlacedGate(GateKind.SHUTTLE, (q,), (s, mid), routing=True))
        pl.move(q, mid)
        moves.append(PlacedGate(GateKind.SHUTTLE, (q,), (mid, target), routing=True))
        pl.move(q, target)
    else:
        if len(mids) < 2:
            raise RoutingDeadlock("exchange needs both intermediate dots free")
        m1, m2 = mids[0], mids[1]
        moves.append(PlacedGate(GateKind.SHUTTLE, (q,), (s, m1), routing=True))
        pl.move(q, m1)
        moves.append(PlacedGate(GateKind.SHUTTLE, (other,), (target, m2), routing=True))
        pl.move(other, m2)
        moves.append(PlacedGate(GateKind.SHUTTLE, (q,), (m1, target), routing=True))
        pl.move(q, target)
        moves.append(PlacedGate(GateKind.SHUTTLE, (other,), (m2, s), routing=True))
        pl.move(other, s)
    return moves


def route_swap_router(
    topo: Topology, pl: Placement, q_a: int, q_b: int
) -> list[PlacedGate]:
    """Checkerboard-preserving routing: exchange moves along the diagonal
    (same-color) graph until the operands are diagonal neighbors."""
    moves: list[PlacedGate] = []
    while True:
        sa, sb = pl.site_of(q_a), pl.site_of(q_b)
        if sa in topo.diagonal_neighbors(sb):
            return moves
        targets = set(topo.diagonal_neighbors(sb))
        path = _bfs_path(sa, targets, topo.diagonal_neighbors, blocked={sb})
        if path is None or len(path) < 2:
            raise RoutingDeadlock(
                f"no diagonal route between qubits {q_a} and {q_b}"
            )
        moves.extend(_exchange_moves(topo, pl, q_a, path[1]))


def route_snake_router(
    topo: Topology,
    pl: Placement,
    q_a: int,
    q_b: int,
    swap_opt: bool,
    config: NoiseConfig,
    budget: int,
) -> list[PlacedGate]:
    """Free-form routing: shuttle one operand along a shortest path, displacing
    blockers one site (or SWAPping through them when that wins on fidelity)."""
    moves: list[PlacedGate] = []
    steps = 0
    while True:
        sa, sb = pl.site_of(q_a), pl.site_of(q_b)
        if topo.has_edge(sa, sb):
            return moves
        targets = {s for s in topo.neighbors[sb] if s != sa}
        path = _bfs_path(sa, targets, lambda s: topo.neighbors[s], blocked={sb})
        if path is None or len(path) < 2:
            raise RoutingDeadlock(f"no route between qubits {q_a} and {q_b}")
        nxt = path[1]
        blocker = pl.qubit_at(nxt)
        if blocker is None:
            moves.append(PlacedGate(GateKind.SHUTTLE, (q_a,), (sa, nxt), routing=True))
            pl.move(q_a, nxt)
            steps += 1
        elif swap_opt and swap_beats_shuttles(2, config):
            moves.append(
                PlacedGate(GateKind.SWAP, (q_a, blocker), (sa, nxt), routing=True)
            )
            pl.swap_qubits(q_a, blocker)
            steps += 1
        else:
            avoid = {sa, pl.site_of(q_b)}
            preferred = set(path[2:3])
            options = [
                s
                for s in topo.neighbors[nxt]
                if pl.is_empty(s) and s not in avoid
            ]
            side = min(
                (s for s in options if s not in preferred),
                default=min(options, default=None),
            )
            if side is None:
                raise RoutingDeadlock(f"qubit {blocker} cannot be displaced")
            moves.append(
                PlacedGate(GateKind.SHUTTLE, (blocker,), (nxt, side), routing=True)
            )
            pl.move(blocker, side)
            moves.append(PlacedGate(GateKind.SHUTTLE, (q_a,), (sa, nxt), routing=True))
            pl.move(q_a, nxt)
            steps += 2
        if steps > budget:
            raise RoutingDeadlock(
                f"move budget {budget} exhausted between qubits {q_a} and {q_b}"
            )


def _z_shuttle_target(topo: Topology, pl: Placement, s: int) -> int | None:
    """Lowest-index adjacent empty dot in a neighboring column."""
    for t in topo.neighbors[s]:
        if pl.is_empty(t) and topo.col(t) != topo.col(s):
            return t
    return None


def _interaction_mid(topo: Topology, pl: Placement, sa: int, sb: int) -> int | None:
    """Empty shared rectilinear neighbor of a diagonal pair (both are empty in
    a checkerboard, but re-check)."""
    shared = sorted(
        set(topo.rectilinear_neighbors(sa)) & set(topo.rectilinear_neighbors(sb))
    )
    for m in shared:
        if pl.is_empty(m) and topo.has_edge(m, sb) and topo.has_edge(sa, m):
            return m
    return None


# ---------------------------------------------------------------------------
# Compilation


def compile_circuit(
    circuit: Circuit, arch: Architecture, config: NoiseConfig
) -> CompiledCircuit:
    """Map, route and schedule `circuit` for `arch`.

    Assumes `arch` already passed rule validation.  Raises CompileError (with
    the offending gate index) on routing deadlock.
    """
    topo = build_topology(circuit.n_qubits, int(arch.degree))
    pl = initial_placement(topo, circuit.n_qubits)
    initial_sites = tuple(pl.qubit_site)
    sched = _Scheduler(arch, circuit.n_qubits, topo, config)
    budget = 8 * max(1, circuit.n_qubits)

    for gi, gate in enumerate(circuit.gates):
        try:
            _compile_gate(gate, gi, arch, topo, pl, sched, config, budget)
        except RoutingDeadlock as exc:
            raise CompileError(str(exc), gi) from None

    return CompiledCircuit(
        name=circuit.name,
        n_qubits=circuit.n_qubits,
        arch=arch,
        topology=topo,
        initial_sites=initial_sites,
        final_sites=tuple(pl.qubit_site),
        cycles=sched.freeze(),
        source_gate_count=len(circuit.gates),
        source_dag_depth=dag_depth(circuit),
    )


def _compile_gate(gate, gi, arch, topo, pl, sched, config, budget) -> None:
    kind = gate.kind
    if kind in (GateKind.RX, GateKind.RY):
        q = gate.qubits[0]
        sched.place(
            PlacedGate(kind, (q,), (pl.site_of(q),), gate.angle, source_index=gi)
        )
        return
    if kind is GateKind.RZ:
        if arch.z_rot_impl is ZRotImpl.PULSE_BASED:
            q = gate.qubits[0]
            sched.place(
                PlacedGate(kind, (q,), (pl.site_of(q),), gate.angle, source_index=gi)
            )
            return
        q = gate.qubits[0]
        s = pl.site_of(q)
        t = _z_shuttle_target(topo, pl, s)
        if t is None:
            raise RoutingDeadlock(
                f"no adjacent empty dot in a neighboring column for qubit {q}"
            )
        sched.place(PlacedGate(GateKind.SHUTTLE, (q,), (s, t), source_index=gi))
        pl.move(q, t)
        sched.place(PlacedGate(GateKind.SHUTTLE, (q,), (t, s), source_index=gi))
        pl.move(q, s)
        return

    # Two-qubit gate or SWAP: route until coupled, then execute.
    q_a, q_b = gate.qubits
    if arch.router is RouterKind.SNAKE:
        if not topo.has_edge(pl.site_of(q_a), pl.site_of(q_b)):
            for m in route_snake_router(
                topo, pl, q_a, q_b, arch.swap_opt == 1, config, budget
            ):
                sched.place(m)
        sa, sb = pl.site_of(q_a), pl.site_of(q_b)
        sched.place(PlacedGate(kind, (q_a, q_b), (sa, sb), source_index=gi))
        if kind is GateKind.SWAP:
            pl.swap_qubits(q_a, q_b)
        return

    # Shuttle-based SWAP router: reach diagonal adjacency, then either use a
    # diagonal coupling edge or hop through a shared empty dot and back.
    for m in route_swap_router(topo, pl, q_a, q_b):
        sched.place(m)
    sa, sb = pl.site_of(q_a), pl.site_of(q_b)
    if topo.has_edge(sa, sb):
        sched.place(PlacedGate(kind, (q_a, q_b), (sa, sb), source_index=gi))
        if kind is GateKind.SWAP:
            pl.swap_qubits(q_a, q_b)
        return
    mid = _interaction_mid(topo, pl, sa, sb)
    if mid is None:
        raise RoutingDeadlock(
            f"no interaction dot available between qubits {q_a} and {q_b}"
        )
    sched.place(PlacedGate(GateKind.SHUTTLE, (q_a,), (sa, mid), routing=True))
    pl.move(q_a, mid)
    sched.place(PlacedGate(kind, (q_a, q_b), (mid, sb), source_index=gi))
    if kind is GateKind.SWAP:
        pl.swap_qubits(q_a, q_b)
    mover = pl.qubit_at(mid)
    sched.place(PlacedGate(GateKind.SHUTTLE, (mover,), (mid, sa), routing=True))
    pl.move(mover, sa)


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class VerificationIssue:
    category: str
    message: str
    cycle: int | None = None
    gate_index: int | None = None


@dataclass(frozen=True)
class VerificationReport:
    issues: tuple[VerificationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues


def verify(circuit: Circuit, compiled: CompiledCircuit) -> VerificationReport:
    """Two-step semantic check of a compiled circuit.

    Step one tracks logical identities through every shuttle and SWAP and
    demands that each source gate acts on the right logical operands in
    per-qubit dependency order.  Step two re-validates every cycle against
    the architecture constraints with `check_constraints`.
    """
    issues: list[VerificationIssue] = list(_check_identity(circuit, compiled))
    issues.extend(
        VerificationIssue(category="constraint", message=v) for v in check_constraints(compiled)
    )
    return VerificationReport(issues=tuple(issues))


def _check_identity(circuit, compiled):
    occupant = {s: q for q, s in enumerate(compiled.initial_sites)}
    realizations: dict[int, list] = defaultdict(list)

    for ci, cycle in enumerate(compiled.cycles):
        for g in cycle.gates:
            if g.kind is GateKind.SHUTTLE:
                src, dst = g.sites
                if occupant.get(src) != g.qubits[0]:
                    yield VerificationIssue(
                        "identity",
                        f"shuttle claims qubit {g.qubits[0]} at dot {src}, "
                        f"found {occupant.get(src)}",
                        ci,
                        g.source_index,
                    )
                    continue
                if dst in occupant:
                    yield VerificationIssue(
                        "identity", f"shuttle into occupied dot {dst}", ci, g.source_index
                    )
                    continue
                occupant[dst] = occupant.pop(src)
                if g.source_index is not None:
                    realizations[g.source_index].append((ci, g))
                continue
            derived = tuple(occupant.get(s) for s in g.sites)
            if None in derived or derived != g.qubits:
                yield VerificationIssue(
                    "identity",
                    f"{g.kind.value} at dots {g.sites} claims qubits {g.qubits}, "
                    f"found {derived}",
                    ci,
                    g.source_index,
                )
            if g.kind is GateKind.SWAP and None not in derived:
                s1, s2 = g.sites
                occupant[s1], occupant[s2] = occupant[s2], occupant[s1]
            if g.source_index is not None:
                realizations[g.source_index].append((ci, g))

    per_qubit_compiled: dict[int, list[tuple[int, int]]] = defaultdict(list)
    shuttle_z = compiled.arch.z_rot_impl is ZRotImpl.SHUTTLE_BASED
    for gi, gate in enumerate(circuit.gates):
        done = realizations.get(gi, [])
        issue = _check_realization(gi, gate, done, shuttle_z)
        if issue is not None:
            yield issue
            continue
        first_cycle = done[0][0]
        for q in gate.qubits:
            per_qubit_compiled[q].append((first_cycle, gi))

    for q in range(circuit.n_qubits):
        expected = [gi for gi, g in enumerate(circuit.gates) if q in g.qubits]
        got = [gi for _, gi in sorted(per_qubit_compiled.get(q, []))]
        if got != expected:
            yield VerificationIssue(
                "order", f"qubit {q}: gate order {got} does not match source {expected}"
            )


def _check_realization(gi, gate, done, shuttle_z) -> VerificationIssue | None:
    if gate.kind is GateKind.RZ and shuttle_z:
        if (
            len(done) != 2
            or any(g.kind is not GateKind.SHUTTLE for _, g in done)
            or done[0][1].qubits != gate.qubits
            or done[1][1].qubits != gate.qubits
            or done[0][1].sites[1] != done[1][1].sites[0]
            or done[0][1].sites[0] != done[1][1].sites[1]
            or done[0][0] >= done[1][0]
        ):
            return VerificationIssue(
                "realization",
                f"gate {gi}: shuttle-based Z must be two back-and-forth shuttles",
                gate_index=gi,
            )
        return None
    if len(done) != 1:
        return VerificationIssue(
            "realization", f"gate {gi}: expected one realization, got {len(done)}",
            gate_index=gi,
        )
    placed = done[0][1]
    if placed.kind is not gate.kind or placed.qubits != gate.qubits:
        return VerificationIssue(
            "realization",
            f"gate {gi}: source {gate.kind.value}{gate.qubits} realized as "
            f"{placed.kind.value}{placed.qubits}",
            gate_index=gi,
        )
    if gate.angle is not None and placed.angle != gate.angle:
        return VerificationIssue(
            "realization", f"gate {gi}: angle changed", gate_index=gi
        )
    return None


def check_constraints(compiled: CompiledCircuit) -> list[str]:
    """From-scratch validation of every cycle against the architecture.

    Kept deliberately separate from the scheduler so it can catch scheduler
    bugs; only the gate data of the compiled circuit is trusted.
    """
    arch = compiled.arch
    topo = compiled.topology
    n = compiled.n_qubits
    violations: list[str] = []
    occupied = set(compiled.initial_sites)

    def cap_of(value: int, base: int) -> float:
        return float("inf") if value == -1 else max(1, (value * base) // 100)

    limits = {
        _CLASS_XY: cap_of(arch.xyD, n),
        _CLASS_Z: cap_of(arch.zD, n),
        _CLASS_SHUTTLE: cap_of(arch.sD, n),
        _CLASS_TQG: cap_of(arch.tqgD, n // 2),
    }
    pair_rules = {
        frozenset((_CLASS_XY, _CLASS_Z)): ("xy_z", arch.xy_z),
        frozenset((_CLASS_XY, _CLASS_TQG)): ("xy_tqg", arch.xy_tqg),
        frozenset((_CLASS_Z, _CLASS_TQG)): ("z_tqg", arch.z_tqg),
        frozenset((_CLASS_XY, _CLASS_Z, _CLASS_TQG)): ("xy_z_tqg", arch.xy_z_tqg),
    }

    for ci, cycle in enumerate(compiled.cycles):
        seen: set[int] = set()
        counts = {c: 0 for c in limits}
        pulse_keys = set()
        pulse_parities = set()
        for g in cycle.gates:
            for s in g.sites:
                if s in seen:
                    violations.append(f"cycle {ci}: dot {s} used by two operations")
                seen.add(s)
            counts[gate_sched_class(g.kind)] += 1
            if g.kind is GateKind.SHUTTLE:
                src, dst = g.sites
                if not topo.has_edge(src, dst):
                    violations.append(f"cycle {ci}: shuttle over non-adjacent dots {g.sites}")
                if src not in occupied:
                    violations.append(f"cycle {ci}: shuttle from empty dot {src}")
                if dst in occupied:
                    violations.append(f"cycle {ci}: shuttle into occupied dot {dst}")
            elif g.kind in (GateKind.TQG, GateKind.SWAP):
                if not topo.has_edge(*g.sites):
                    violations.append(
                        f"cycle {ci}: {g.kind.value} on non-adjacent dots {g.sites}"
                    )
            if gate_sched_class(g.kind) in (_CLASS_XY, _CLASS_Z):
                pulse_keys.add((g.axis, g.angle))
                pulse_parities.add(topo.col(g.sites[0]) % 2)

        if arch.single_qubit_impl is SingleQubitImpl.SEQUENTIAL and len(cycle.gates) > 1:
            violations.append(f"cycle {ci}: sequential mode allows one operation per cycle")
        for cls, used in counts.items():
            if used > limits[cls]:
                violations.append(
                    f"cycle {ci}: {used} {cls} operations exceed the cap {limits[cls]:g}"
                )
        present = frozenset(
            c for c in (_CLASS_XY, _CLASS_Z, _CLASS_TQG) if counts[c] > 0
        )
        if len(present) > 1:
            name, allowed = pair_rules[present]
            if not allowed:
                violations.append(f"cycle {ci}: gate-type mix forbidden by {name}=0")
        if arch.single_qubit_impl in (SingleQubitImpl.GLOBAL, SingleQubitImpl.SEMI_GLOBAL):
            if len(pulse_keys) > 1:
                violations.append(
                    f"cycle {ci}: rotations must share one axis and angle"
                )
            if (
                arch.single_qubit_impl is SingleQubitImpl.SEMI_GLOBAL
                and len(pulse_parities) > 1
            ):
                violations.append(f"cycle {ci}: rotations must share one column parity")

        # Commit this cycle's moves before looking at the next one.
        for g in cycle.gates:
            if g.kind is GateKind.SHUTTLE:
                src, dst = g.sites
                occupied.discard(src)
                occupied.add(dst)

    if len(occupied) != n:
        violations.append(
            f"occupancy changed: {len(occupied)} occupied dots for {n} qubits"
        )
    return violations


def format_compiled(compiled: CompiledCircuit) -> str:
    """Cycle-annotated text dump for debugging."""
    lines = [
        f"# {compiled.name}: {compiled.n_qubits} qubits on "
        f"{compiled.topology.rows}x{compiled.topology.cols} grid "
        f"(degree {compiled.topology.degree}), {compiled.depth} cycles"
    ]
    for ci, cycle in enumerate(compiled.cycles):
        parts = []
        for g in cycle.gates:
            angle = f"({g.angle:.6g})" if g.angle is not None else ""
            tag = " [route]" if g.routing else ""
            parts.append(
                f"{g.kind.value}{angle} q{list(g.qubits)} @ dots {list(g.sites)}{tag}"
            )
        lines.append(f"cycle {ci:4d} [{cycle.duration * 1e9:.0f} ns]: " + "; ".join(parts))
    return "\n".join(lines) + "\n"
