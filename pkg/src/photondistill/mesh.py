"""Abstract model of the recirculating "bricks" mesh and circuit placement.

Geometry. The mesh is a brick wall of ``rows`` bands by ``cols`` bricks; band
r (1-based) is offset horizontally by half a brick when r is even. Tunable
MZI units sit on the horizontal brick edges (split into segments wherever a
brick end from the neighbouring band touches the edge), and the vertical
brick ends connect adjacent bands. Every interior junction therefore joins
exactly three endpoints: the horizontal segment to its left, the one to its
right, and one vertical connector. Perimeter junctions expose bidirectional
ports on all four sides.

``mzis_per_cell`` resolves how many tunable units a unit cell carries: with
the default 2 the vertical connectors are passive waveguide links, with 4
they are tunable units as well (then pass-through verticals count toward
active units and traversal depth).

Placement maps each two-mode circuit element onto a unit and realizes every
logical-mode connection as a routed path; pass-through units on routes are
set to the bar state. Phase-shifter elements ride along with their
neighbouring unit settings and do not occupy units of their own. Waveguide
lane bookkeeping inside a unit is abstracted away; a pass-through unit can
carry at most two routes.

Depth is reported two ways, because the figure-level "layers" language counts
mesh columns while loss arguments count traversed units:

* ``optical_depth`` — number of distinct brick columns holding assigned
  (mixing) units; this is the "MZI layers" figure of merit.
* ``traversal_depth`` — maximum number of tunable units a photon crosses on
  its way from input port to output port, pass-throughs included.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import circuits, numerics
from .circuits import Circuit, ComponentReport, component_report
from .errors import DimensionError, MeshCapacityError

FEED_FORWARD = "feed-forward"
RECIRCULATING = "recirculating"

IN = "in"
OUT = "out"


@dataclass(frozen=True)
class MeshUnit:
    uid: str
    kind: str  # "h" (horizontal segment) or "v" (vertical connector)
    ends: tuple[tuple[int, int], tuple[int, int]]  # junction coordinates (x, y)
    cell: tuple[int, int]  # owning brick (band, col), 1-based
    tunable: bool

    @property
    def column(self) -> int:
        return self.cell[1]


@dataclass(frozen=True)
class Port:
    pid: str
    side: str  # T, B, L, R
    junction: tuple[int, int]


@dataclass(frozen=True)
class BricksMesh:
    rows: int
    cols: int
    mzis_per_cell: int
    units: tuple[MeshUnit, ...]
    ports: tuple[Port, ...]
    passive_links: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def unit_by_id(self, uid: str) -> MeshUnit:
        for u in self.units:
            if u.uid == uid:
                return u
        raise KeyError(uid)

    def tunable_units(self) -> list[MeshUnit]:
        return [u for u in self.units if u.tunable]

    def junction_degree(self) -> dict[tuple[int, int], int]:
        """Endpoint count per junction over units and passive links (ports excluded)."""
        deg: dict[tuple[int, int], int] = {}
        for u in self.units:
            for j in u.ends:
                deg[j] = deg.get(j, 0) + 1
        for a, b in self.passive_links:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        return deg

    def interior_junctions(self) -> list[tuple[int, int]]:
        port_junctions = {p.junction for p in self.ports}
        return sorted(j for j in self.junction_degree() if j not in port_junctions)

    def cell_unit_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for u in self.tunable_units():
            counts[u.cell] = counts.get(u.cell, 0) + 1
        return counts


def _band_offset(band: int) -> int:
    return (band - 1) % 2


def _band_ends(band: int, cols: int) -> list[int]:
    o = _band_offset(band)
    return [o + 2 * k for k in range(cols + 1)]


def _owning_cell(rows: int, cols: int, mid_x: float, line: int, prefer_below: bool) -> tuple[int, int]:
    band = line + 1 if (prefer_below and line + 1 <= rows) else line
    band = max(1, min(rows, band))
    o = _band_offset(band)
    col = int(math.floor((mid_x - o) / 2.0)) + 1
    return band, max(1, min(cols, col))


def build_bricks_mesh(rows: int, cols: int, mzis_per_cell: int = 2) -> BricksMesh:
    """Construct the brick-wall lattice with deterministic unit ids."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"mesh dimensions must be >= 1, got {rows}x{cols}")
    if mzis_per_cell not in (2, 4):
        raise DimensionError(f"mzis_per_cell must be 2 or 4, got {mzis_per_cell}")
    verticals_tunable = mzis_per_cell == 4

    junctions_per_line: dict[int, list[int]] = {}
    for line in range(rows + 1):
        xs: set[int] = set()
        if line >= 1:
            xs.update(_band_ends(line, cols))
        if line + 1 <= rows:
            xs.update(_band_ends(line + 1, cols))
        junctions_per_line[line] = sorted(xs)

    units: list[MeshUnit] = []
    for line in range(rows + 1):
        xs = junctions_per_line[line]
        for k in range(len(xs) - 1):
            x0, x1 = xs[k], xs[k + 1]
            cell = _owning_cell(rows, cols, (x0 + x1) / 2.0, line, prefer_below=True)
            units.append(
                MeshUnit(
                    uid=f"h:{line}:{k}",
                    kind="h",
                    ends=((x0, line), (x1, line)),
                    cell=cell,
                    tunable=True,
                )
            )
    passive: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for band in range(1, rows + 1):
        for x in _band_ends(band, cols):
            ends = ((x, band - 1), (x, band))
            if verticals_tunable:
                cell = _owning_cell(rows, cols, x + 1.0, band - 1, prefer_below=True)
                cell = (band, cell[1])
                units.append(
                    MeshUnit(uid=f"v:{band}:{x}", kind="v", ends=ends, cell=cell, tunable=True)
                )
            else:
                passive.append(ends)

    ports: list[Port] = []
    for x in junctions_per_line[0]:
        ports.append(Port(f"T:{x}", "T", (x, 0)))
    for x in junctions_per_line[rows]:
        ports.append(Port(f"B:{x}", "B", (x, rows)))
    for line in range(rows + 1):
        xs = junctions_per_line[line]
        ports.append(Port(f"L:{line}", "L", (xs[0], line)))
        ports.append(Port(f"R:{line}", "R", (xs[-1], line)))

    return BricksMesh(
        rows=rows,
        cols=cols,
        mzis_per_cell=mzis_per_cell,
        units=tuple(units),
        ports=tuple(ports),
        passive_links=tuple(passive),
    )


# ---------------------------------------------------------------------------
# Placement
# ---------------------------------------------------------------------------

ElementKey = tuple[int, int]  # (mixing layer index, element index within it)


@dataclass(frozen=True)
class Route:
    """One logical connection realized in the mesh.

    ``src``/``dst`` are element keys or ("in"/"out", logical mode); ``via``
    lists the pass-through unit ids along the path.
    """

    src: tuple
    dst: tuple
    mode: int
    via: tuple[str, ...]


@dataclass(frozen=True)
class Placement:
    circuit: Circuit
    mesh: BricksMesh
    strategy: str
    assignment: tuple[tuple[ElementKey, str], ...]
    routes: tuple[Route, ...]
    io_map: tuple[tuple[tuple[str, int], str], ...]  # ((in|out, mode), port id)

    def assignment_dict(self) -> dict[ElementKey, str]:
        return dict(self.assignment)

    def pass_through_units(self) -> set[str]:
        used: set[str] = set()
        for r in self.routes:
            used.update(r.via)
        return used


@dataclass(frozen=True)
class MeshMetrics:
    active_mzis: int
    optical_depth: int
    traversal_depth: int


class _RoutingGraph:
    """Junction graph with unit edges (cost 1) and passive links (cost 0)."""

    def __init__(self, mesh: BricksMesh, blocked: set[str], usage: dict[str, int]):
        self.mesh = mesh
        self.blocked = blocked
        self.usage = usage
        self.edges: dict[tuple[int, int], list[tuple[tuple[int, int], str | None]]] = {}
        for u in mesh.units:
            a, b = u.ends
            self.edges.setdefault(a, []).append((b, u.uid))
            self.edges.setdefault(b, []).append((a, u.uid))
        for a, b in mesh.passive_links:
            self.edges.setdefault(a, []).append((b, None))
            self.edges.setdefault(b, []).append((a, None))
        for key in self.edges:
            self.edges[key].sort(key=lambda e: (e[0], e[1] or ""))

    def shortest(self, sources, goals, monotone: bool):
        """Deterministic Dijkstra from any source junction to any goal junction.

        Returns the list of traversed unit ids or None. ``monotone``
        restricts horizontal unit edges to left-to-right traversal.
        """
        goals = set(goals)
        dist: dict[tuple[int, int], int] = {}
        prev: dict[tuple[int, int], tuple[tuple[int, int], str | None]] = {}
        heap = []
        for s in sorted(set(sources)):
            dist[s] = 0
            heapq.heappush(heap, (0, s))
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist.get(node, 1 << 30):
                continue
            if node in goals:
                path = []
                cur = node
                while cur in prev:
                    cur, uid = prev[cur]
                    if uid is not None:
                        path.append(uid)
                return list(reversed(path))
            for nxt, uid in self.edges.get(node, []):
                if uid is not None:
                    if uid in self.blocked:
                        continue
                    if self.usage.get(uid, 0) >= 2:
                        continue
                    if monotone and nxt[0] < node[0]:
                        continue
                    cost = 1
                else:
                    cost = 0
                nd = d + cost
                if nd < dist.get(nxt, 1 << 30):
                    dist[nxt] = nd
                    prev[nxt] = (node, uid)
                    heapq.heappush(heap, (nd, nxt))
        return None


def _dataflow(circuit: Circuit):
    """Per logical mode, the chain of endpoints: ("in", mode), element keys, ("out", mode)."""
    chains: dict[int, list] = {mode: [(IN, mode)] for mode in range(circuit.mode_count)}
    for li, layer in enumerate(circuit.mixing_layers()):
        for ei, el in enumerate(layer):
            for mode in el.modes:
                chains[mode].append((li, ei))
    for mode in range(circuit.mode_count):
        chains[mode].append((OUT, mode))
    return chains


def required_mesh_size(circuit: Circuit) -> tuple[int, int]:
    k = len(circuit.mixing_layers())
    return max(1, circuit.mode_count - 1), max(1, 2 * k - 1)


def recommended_mesh(circuit: Circuit, mzis_per_cell: int = 2) -> BricksMesh:
    rows, cols = required_mesh_size(circuit)
    return build_bricks_mesh(rows, cols, mzis_per_cell)


def _units_by_column(mesh: BricksMesh) -> dict[int, list[MeshUnit]]:
    by_col: dict[int, list[MeshUnit]] = {}
    for u in mesh.units:
        if u.kind == "h":
            by_col.setdefault(u.column, []).append(u)
    for col in by_col:
        by_col[col].sort(key=lambda u: u.ends[0][::-1])  # top-down, then left-right
    return by_col

def _feed_forward_plans(layers, mesh: BricksMesh) -> list[list[int]]:
    # Element layers go to every other (or third, or fourth) brick column,
    # leaving the columns in between as routing fabric; wider spacings are
    # fallbacks for circuits with long-range mode crossings.
    k = len(layers)
    if k == 0:
        return [[]]
    plans = []
    for spacing in (2, 3, 4):
        if (k - 1) * spacing + 1 <= mesh.cols:
            plans.append([1 + spacing * i for i in range(k)])
    if not plans:
        raise MeshCapacityError(
            "feed-forward placement needs routing fabric between layer columns",
            required_rows=mesh.rows,
            required_cols=2 * k - 1,
        )
    return plans


def _column_plan_stacked(layers, mesh: BricksMesh, per_line_cap: bool) -> list[int]:
    by_col = _units_by_column(mesh)
    plan: list[int] = []
    col = 1
    if per_line_cap:
        free = {c: len({u.ends[0][1] for u in us}) for c, us in by_col.items()}
    else:
        free = {c: len(us) for c, us in by_col.items()}
    for layer in layers:
        need = len(layer)
        while col <= mesh.cols and free.get(col, 0) < need:
            col += 1
        if col > mesh.cols:
            raise MeshCapacityError(
                "recirculating placement ran out of columns",
                required_rows=mesh.rows + 1,
                required_cols=mesh.cols + 1,
            )
        plan.append(col)
        free[col] -= need
    return plan


def _recirculating_plans(layers, mesh: BricksMesh):
    """Candidate plans from most to least compact; the first routable one wins."""
    k = len(layers)
    plans: list[list[int]] = []
    for per_line_cap in (False, True):
        try:
            plan = _column_plan_stacked(layers, mesh, per_line_cap)
        except MeshCapacityError:
            continue
        if plan not in plans:
            plans.append(plan)
    if k <= mesh.cols:
        consecutive = list(range(1, k + 1))
        if consecutive not in plans:
            plans.append(consecutive)
    if k and 2 * k - 1 <= mesh.cols:
        spaced = [2 * i + 1 for i in range(k)]
        if spaced not in plans:
            plans.append(spaced)
    if not plans:
        raise MeshCapacityError(
            "recirculating placement ran out of columns",
            required_rows=mesh.rows + 1,
            required_cols=mesh.cols + 1,
        )
    return plans


def place_circuit(
    circuit: Circuit,
    mesh: BricksMesh,
    strategy: str = RECIRCULATING,
    column_plan: list[int] | None = None,
) -> Placement:
    """Greedy layered placement with deterministic tie-breaking.

    Feed-forward restricts photon routes to left-to-right monotone paths and
    assigns circuit layer k to brick column 2k-1, leaving the even columns as
    routing fabric; recirculating stacks layers into as few columns as the
    routing allows, falling back to progressively wider plans, and routes in
    any direction. An explicit ``column_plan`` (one brick column per mixing
    layer) overrides the greedy column choice, which is how the hand-encoded
    figure placements are expressed.
    """
    if strategy not in (FEED_FORWARD, RECIRCULATING):
        raise ValueError(f"unknown strategy {strategy!r}")
    layers = circuit.mixing_layers()
    if column_plan is not None:
        if len(column_plan) != len(layers):
            raise ValueError("column plan must give one column per mixing layer")
        return _attempt_placement(circuit, mesh, strategy, list(column_plan))
    if strategy == FEED_FORWARD:
        plans = _feed_forward_plans(layers, mesh)
    else:
        plans = _recirculating_plans(layers, mesh)
    last_error: MeshCapacityError | None = None
    for plan in plans:
        try:
            return _attempt_placement(circuit, mesh, strategy, plan)
        except MeshCapacityError as exc:
            last_error = exc
    raise last_error


def _attempt_placement(
    circuit: Circuit,
    mesh: BricksMesh,
    strategy: str,
    column_plan: list[int],
) -> Placement:
    layers = circuit.mixing_layers()
    by_col = _units_by_column(mesh)

    taken: set[str] = set()
    assignment: list[tuple[ElementKey, str]] = []
    unit_of: dict[ElementKey, MeshUnit] = {}
    for li, layer in enumerate(layers):
        col = column_plan[li]
        free = [u for u in by_col.get(col, []) if u.uid not in taken]
        ordered = sorted(enumerate(layer), key=lambda t: min(t[1].modes))
        if len(free) < len(ordered):
            rows, cols = required_mesh_size(circuit)
            raise MeshCapacityError(
                f"column {col} has {len(free)} free units, layer needs {len(ordered)}",
                required_rows=max(rows, mesh.rows + 1),
                required_cols=max(cols, mesh.cols),
            )
        # Pick for each element the free unit nearest the line of its lowest
        # logical mode, one unit per line, so routes stay local and vertical
        # fabric stays open between assignments.
        used_lines: set[int] = set()
        for ei, el in ordered:
            target = min(el.modes)
            candidates = [
                u for u in free if u.uid not in taken and u.ends[0][1] not in used_lines
            ]
            if not candidates:
                candidates = [u for u in free if u.uid not in taken]
            unit = min(
                candidates,
                key=lambda u: (abs(u.ends[0][1] - target), u.ends[0][1], u.ends[0][0]),
            )
            taken.add(unit.uid)
            used_lines.add(unit.ends[0][1])
            assignment.append(((li, ei), unit.uid))
            unit_of[(li, ei)] = unit

    monotone = strategy == FEED_FORWARD
    usage: dict[str, int] = {}
    graph = _RoutingGraph(mesh, blocked=taken, usage=usage)

    def endpoint_junctions(endpoint, entering: bool):
        if endpoint[0] in (IN, OUT):
            return None
        unit = unit_of[endpoint]
        a, b = unit.ends
        if monotone:
            return [b] if entering is False else [a]  # leave right end, enter left end
        return [a, b]

    routes: list[Route] = []
    io_map: dict[tuple[str, int], str] = {}
    port_load: dict[str, int] = {}

    def pick_port(junctions, for_input: bool):
        """Nearest usable port (fewest pass-through units), ties broken by port id.

        Ports sit on all four sides, are bidirectional and expose a waveguide
        pair, so each carries at most two logical connections. Under
        feed-forward the monotone path constraint alone keeps light flowing
        left to right.
        """
        best = None
        for port in sorted(mesh.ports, key=lambda p: p.pid):
            if port_load.get(port.pid, 0) >= 2:
                continue
            path = graph.shortest(
                [port.junction] if for_input else sorted(junctions),
                sorted(junctions) if for_input else [port.junction],
                monotone,
            )
            if path is None:
                continue
            key = (len(path), port.pid)
            if best is None or key < best[0]:
                best = (key, port, path)
        if best is None:
            return None, None
        port_load[best[1].pid] = port_load.get(best[1].pid, 0) + 1
        return best[1], best[2]

    def commit(route: Route):
        routes.append(route)
        for uid in route.via:
            usage[uid] = usage.get(uid, 0) + 1

    chains = _dataflow(circuit)
    touched = [mode for mode in range(circuit.mode_count) if len(chains[mode]) > 2]
    for mode in range(circuit.mode_count):
        if mode in touched:
            continue
        # Untouched mode: enters and leaves at the same bidirectional port.
        ordered_ports = sorted(mesh.ports, key=lambda p: p.pid)
        free = [p for p in ordered_ports if port_load.get(p.pid, 0) == 0]
        port = free[0] if free else ordered_ports[0]
        port_load[port.pid] = port_load.get(port.pid, 0) + 2
        io_map[(IN, mode)] = port.pid
        io_map[(OUT, mode)] = port.pid

    # Route in three phases (all inputs, element-to-element, all outputs) so
    # output routes cannot starve the entry region before every photon is in.
    for mode in touched:
        inner = chains[mode][1:-1]
        port, path = pick_port(endpoint_junctions(inner[0], entering=True), for_input=True)
        if port is None:
            raise MeshCapacityError(
                f"no input route for mode {mode}", mesh.rows + 1, mesh.cols + 1
            )
        io_map[(IN, mode)] = port.pid
        commit(Route((IN, mode), inner[0], mode, tuple(path)))
    for mode in touched:
        inner = chains[mode][1:-1]
        for a, b in zip(inner, inner[1:]):
            path = graph.shortest(
                endpoint_junctions(a, entering=False),
                endpoint_junctions(b, entering=True),
                monotone,
            )
            if path is None:
                raise MeshCapacityError(
                    f"no route between elements {a} and {b} for mode {mode}",
                    mesh.rows + 1,
                    mesh.cols + 1,
                )
            commit(Route(a, b, mode, tuple(path)))
    for mode in touched:
        inner = chains[mode][1:-1]
        port, path = pick_port(endpoint_junctions(inner[-1], entering=False), for_input=False)
        if port is None:
            raise MeshCapacityError(
                f"no output route for mode {mode}", mesh.rows + 1, mesh.cols + 1
            )
        io_map[(OUT, mode)] = port.pid
        commit(Route(inner[-1], (OUT, mode), mode, tuple(path)))

    return Placement(
        circuit=circuit,
        mesh=mesh,
        strategy=strategy,
        assignment=tuple(assignment),
        routes=tuple(routes),
        io_map=tuple(sorted(io_map.items())),
    )


def placement_metrics(placement: Placement) -> MeshMetrics:
    mesh = placement.mesh
    assigned = placement.assignment_dict()
    units = {u.uid: u for u in mesh.units}
    pass_units = placement.pass_through_units()
    active = len(assigned) + len(pass_units - set(assigned.values()))
    depth_cols = {units[uid].column for uid in assigned.values()}

    chains = _dataflow(placement.circuit)
    route_lookup = {(r.src, r.dst, r.mode): r.via for r in placement.routes}
    traversal = 0
    for mode, chain in chains.items():
        count = 0
        for a, b in zip(chain, chain[1:]):
            via = route_lookup.get((a, b, mode), ())
            count += len(via)
            if b[0] not in (IN, OUT):
                count += 1  # the assigned unit itself
        traversal = max(traversal, count)
    return MeshMetrics(
        active_mzis=active,
        optical_depth=len(depth_cols),
        traversal_depth=traversal,
    )


def induced_dataflow_edges(placement: Placement) -> set[tuple]:
    """(src, dst, mode) edges realized by the routes; for isomorphism checks."""
    return {(r.src, r.dst, r.mode) for r in placement.routes}


def circuit_dataflow_edges(circuit: Circuit) -> set[tuple]:
    edges: set[tuple] = set()
    for mode, chain in _dataflow(circuit).items():
        if len(chain) == 2:
            continue  # untouched mode: no routed connection required
        edges.update((a, b, mode) for a, b in zip(chain, chain[1:]))
    return edges


# Hand-encoded placements for the figure circuits: one brick column per
# mixing layer. The greedy recirculating placer is required to match or beat
# the feed-forward baseline, not these plans.
FIGURE_COLUMN_PLANS: dict[str, tuple[int, ...]] = {
    "fig3c-hom-stacked": (1, 1),
    "fig4b-tree-two-columns": (1, 1, 2),
    "fig4c-tree-one-column": (1, 1, 1),
    "fig5c-qfft4-stacked": (1, 1),
    "fig6c-qfft8-compact": (1, 2, 4),
}


def figure_placement(name: str, circuit: Circuit, mesh: BricksMesh) -> Placement:
    plan = FIGURE_COLUMN_PLANS[name]
    return place_circuit(circuit, mesh, RECIRCULATING, column_plan=list(plan))


# ---------------------------------------------------------------------------
# Architecture comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArchRow:
    architecture: str
    strategy: str
    pairs: int
    depth_layers: int
    mesh_active_mzis: int
    mesh_depth: int
    mesh_traversal_depth: int


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def compare_architectures(target, mzis_per_cell: int = 2) -> list[ArchRow]:
    """Pairs/depth/mesh metrics for Reck, Clements and (when applicable) qFFT.

    ``target`` is either a unitary matrix or an explicit Circuit; each
    decomposition is placed with both strategies, starting from its
    recommended mesh and growing the lattice when routing capacity runs out.
    """
    entries: list[tuple[str, Circuit]] = []
    if isinstance(target, Circuit):
        entries.append((target.name or "circuit", target))
    else:
        u = numerics.require_unitary(target)
        m = u.shape[0]
        entries.append(("reck", circuits.reck_decompose(u)))
        entries.append(("clements", circuits.clements_decompose(u)))
        if _is_power_of_two(m) and m > 1:
            n = int(round(math.log2(m)))
            if n <= 3 and np.max(np.abs(u - circuits.qft_matrix(m))) < 1e-9:
                entries.append(("qfft", circuits.cooley_tukey_qfft(n)))
    rows: list[ArchRow] = []
    for name, circ in entries:
        report: ComponentReport = component_report(circ)
        base_rows, base_cols = required_mesh_size(circ)
        for strategy in (FEED_FORWARD, RECIRCULATING):
            placement = None
            for grow in range(4):
                lattice = build_bricks_mesh(
                    base_rows + 2 * grow, base_cols + 2 * grow, mzis_per_cell
                )
                try:
                    placement = place_circuit(circ, lattice, strategy)
                    break
                except MeshCapacityError:
                    continue
            if placement is None:
                raise MeshCapacityError(
                    f"could not place {name} circuit with {strategy} strategy",
                    base_rows + 8,
                    base_cols + 8,
                )
            metrics = placement_metrics(placement)
            rows.append(
                ArchRow(
                    architecture=name,
                    strategy=strategy,
                    pairs=report.pairs,
                    depth_layers=report.depth_layers,
                    mesh_active_mzis=metrics.active_mzis,
                    mesh_depth=metrics.optical_depth,
                    mesh_traversal_depth=metrics.traversal_depth,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Serialization and rendering
# ---------------------------------------------------------------------------


def serialize_mesh(mesh: BricksMesh) -> str:
    return (
        f"mesh v{circuits.FORMAT_VERSION}\n"
        f"rows {mesh.rows}\ncols {mesh.cols}\nmzis_per_cell {mesh.mzis_per_cell}\n"
    )


def parse_mesh(text: str) -> BricksMesh:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("mesh v"):
        raise ValueError("not a mesh file: missing 'mesh v<N>' header")
    if lines[0].removeprefix("mesh v") != circuits.FORMAT_VERSION:
        raise ValueError("unsupported mesh format version")
    fields = {}
    for ln in lines[1:]:
        key, _, val = ln.partition(" ")
        fields[key] = int(val)
    return build_bricks_mesh(fields["rows"], fields["cols"], fields.get("mzis_per_cell", 2))


def serialize_placement(placement: Placement) -> str:
    lines = [f"placement v{circuits.FORMAT_VERSION}", f"strategy {placement.strategy}"]
    lines.append(
        f"mesh {placement.mesh.rows} {placement.mesh.cols} {placement.mesh.mzis_per_cell}"
    )
    for key, uid in placement.assignment:
        lines.append(f"assign {key[0]} {key[1]} {uid}")
    for r in placement.routes:
        src = f"{r.src[0]}:{r.src[1]}"
        dst = f"{r.dst[0]}:{r.dst[1]}"
        via = ",".join(r.via) if r.via else "-"
        lines.append(f"route {src} {dst} {r.mode} {via}")
    for (kind, mode), pid in placement.io_map:
        lines.append(f"io {kind} {mode} {pid}")
    lines.append("endplacement")
    return "\n".join(lines) + "\n" + circuits.serialize_circuit(placement.circuit)


def parse_placement(text: str) -> Placement:
    head, _, circ_text = text.partition("endplacement")
    lines = [ln.strip() for ln in head.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("placement v"):
        raise ValueError("not a placement file")
    strategy = ""
    mesh = None
    assignment = []
    routes = []
    io_map = []

    def parse_endpoint(token: str):
        kind, _, val = token.partition(":")
        if kind in (IN, OUT):
            return (kind, int(val))
        return (int(kind), int(val))

    for ln in lines[1:]:
        head_tok, _, rest = ln.partition(" ")
        if head_tok == "strategy":
            strategy = rest
        elif head_tok == "mesh":
            r, c, k = (int(x) for x in rest.split())
            mesh = build_bricks_mesh(r, c, k)
        elif head_tok == "assign":
            li, ei, uid = rest.split()
            assignment.append(((int(li), int(ei)), uid))
        elif head_tok == "route":
            src, dst, mode, via = rest.split()
            via_t = tuple(via.split(",")) if via != "-" else ()
            routes.append(Route(parse_endpoint(src), parse_endpoint(dst), int(mode), via_t))
        elif head_tok == "io":
            kind, mode, pid = rest.split()
            io_map.append(((kind, int(mode)), pid))
    circuit = circuits.parse_circuit(circ_text.strip())
    return Placement(
        circuit=circuit,
        mesh=mesh,
        strategy=strategy,
        assignment=tuple(assignment),
        routes=tuple(routes),
        io_map=tuple(sorted(io_map)),
    )


def render_mesh(mesh: BricksMesh, placement: Placement | None = None) -> str:
    """Text diagram: assigned units '[XX]', bar-state pass-throughs '[--]', idle '[..]'."""
    assigned = set()
    passing = set()
    if placement is not None:
        assigned = set(placement.assignment_dict().values())
        passing = placement.pass_through_units()

    def state(uid: str) -> str:
        if uid in assigned:
            return "XX"
        if uid in passing:
            return "--"
        return ".."

    scale = 6
    canvas_w = (2 * mesh.cols + 2) * scale + 1
    rows_txt: list[str] = []
    for line in range(mesh.rows + 1):
        row = [" "] * canvas_w
        for u in mesh.units:
            if u.kind != "h" or u.ends[0][1] != line:
                continue
            (x0, _), (x1, _) = u.ends
            left, right = x0 * scale, x1 * scale
            for i in range(left + 1, right):
                row[i] = "-"
            label = f"[{state(u.uid)}]"
            mid = (left + right) // 2 - 2
            for i, ch in enumerate(label):
                row[mid + i] = ch
            row[left] = "o"
            row[right] = "o"
        rows_txt.append("".join(row).rstrip())
        if line < mesh.rows:
            vrow = [" "] * canvas_w
            for u in mesh.units:
                if u.kind == "v" and u.ends[0][1] == line:
                    x = u.ends[0][0] * scale
                    lab = f"({state(u.uid)})"
                    for i, ch in enumerate(lab):
                        vrow[x - 1 + i] = ch
            for a, b in mesh.passive_links:
                if a[1] == line:
                    vrow[a[0] * scale] = "|"
            rows_txt.append("".join(vrow).rstrip())
    return "\n".join(rows_txt) + "\n"
