"""Dot-grid topologies and qubit placement.

Qubits live on a near-square grid of quantum dots sized to twice the qubit
count, so half the sites stay empty for shuttling.  The coupling graph is
rectilinear for degree 4; degree 6 adds one diagonal per unit square and
degree 8 both.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Topology:
    rows: int
    cols: int
    degree: int
    edges: frozenset[tuple[int, int]] = field(repr=False)
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    def site(self, r: int, c: int) -> int:
        return r * self.cols + c

    def site_rc(self, s: int) -> tuple[int, int]:
        return divmod(s, self.cols)

    def col(self, s: int) -> int:
        return s % self.cols

    def color(self, s: int) -> int:
        r, c = self.site_rc(s)
        return (r + c) % 2

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def diagonal_neighbors(self, s: int) -> tuple[int, ...]:
        """Same-color diagonal neighbors, independent of the coupling degree."""
        r, c = self.site_rc(s)
        out = []
        for dr, dc in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append(self.site(rr, cc))
        return tuple(sorted(out))

    def rectilinear_neighbors(self, s: int) -> tuple[int, ...]:
        r, c = self.site_rc(s)
        out = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append(self.site(rr, cc))
        return tuple(sorted(out))


def _grid_shape(n_dots: int) -> tuple[int, int]:
    """Smallest grid with at least n_dots sites; squarest shape on area ties."""
    best = None
    for rows in range(1, n_dots + 1):
        cols = -(-n_dots // rows)
        if rows > cols:
            break
        key = (rows * cols, cols - rows)
        if best is None or key < best[0]:
            best = (key, (rows, cols))
    return best[1]


def build_topology(n_qubits: int, degree: int) -> Topology:
    """Coupling graph for `n_qubits` with checkerboard headroom (2 dots per qubit)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    if degree not in (4, 6, 8):
        raise ValueError("degree must be 4, 6 or 8")
    rows, cols = _grid_shape(2 * n_qubits)

    def site(r, c):
        return r * cols + c

    edges: set[tuple[int, int]] = set()
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.add((site(r, c), site(r, c + 1)))
            if r + 1 < rows:
                edges.add((site(r, c), site(r + 1, c)))
            if r + 1 < rows and c + 1 < cols:
                if degree >= 6:
                    edges.add((site(r, c), site(r + 1, c + 1)))
                if degree == 8:
                    edges.add((site(r, c + 1), site(r + 1, c)))

    adj: list[list[int]] = [[] for _ in range(rows * cols)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    neighbors = tuple(tuple(sorted(n)) for n in adj)
    return Topology(
        rows=rows,
        cols=cols,
        degree=degree,
        edges=frozenset(edges),
        neighbors=neighbors,
    )


class Placement:
    """Mutable bijection between logical qubits and occupied dot sites."""

    __slots__ = ("qubit_site", "site_qubit")

    def __init__(self, qubit_site: list[int], n_sites: int) -> None:
        self.qubit_site = list(qubit_site)
        self.site_qubit: dict[int, int] = {}
        for q, s in enumerate(self.qubit_site):
            if s in self.site_qubit:
                raise ValueError(f"site {s} assigned twice")
            self.site_qubit[s] = q

    def copy(self) -> "Placement":
        return Placement(self.qubit_site, 0)

    def site_of(self, q: int) -> int:
        return self.qubit_site[q]

    def qubit_at(self, s: int) -> int | None:
        return self.site_qubit.get(s)

    def is_empty(self, s: int) -> bool:
        return s not in self.site_qubit

    def move(self, q: int, target: int) -> None:
        if target in self.site_qubit:
            raise ValueError(f"site {target} is occupied")
        del self.site_qubit[self.qubit_site[q]]
        self.site_qubit[target] = q
        self.qubit_site[q] = target

    def swap_qubits(self, qa: int, qb: int) -> None:
        sa, sb = self.qubit_site[qa], self.qubit_site[qb]
        self.qubit_site[qa], self.qubit_site[qb] = sb, sa
        self.site_qubit[sa], self.site_qubit[sb] = qb, qa


def checkerboard_sites(topology: Topology) -> tuple[int, ...]:
    """Color-0 sites in row-major order (the initial qubit pattern)."""
    return tuple(
        s for s in range(topology.n_sites) if topology.color(s) == 0
    )


def initial_placement(topology: Topology, n_qubits: int) -> Placement:
    sites = checkerboard_sites(topology)
    if n_qubits > len(sites):
        raise ValueError("not enough checkerboard sites for the qubit count")
    return Placement(list(sites[:n_qubits]), topology.n_sites)
