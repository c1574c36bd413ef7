"""Two-mode optical elements, circuits, and unitary decomposition engines.

Beam-splitter convention, used consistently everywhere:

    BS(theta) = [[cos t, i sin t], [i sin t, cos t]]

theta = pi/4 is the balanced 50:50 splitter, theta = 0 the identity
(100:0 pass-through) and theta = pi/2 the full crossover. A "bs" element is
the pair BS(theta) * diag(e^{i phi}, 1), i.e. one beam splitter plus one
phase shifter on its first input mode; an "mzi" element is the tunable
coupler BS(pi/4) * diag(e^{i theta}, 1) * BS(pi/4) * diag(e^{i phi}, 1) with
one internal and one external phase. Pure "ps" elements carry diagonal phase
corrections and never count toward the pair totals.

Component counting: ``pairs`` is the number of two-mode elements (each bs
carries its phase shifter, an MZI counts as one pair) and ``depth_layers``
the number of layers containing at least one two-mode element. Pure phase
layers such as the terminal output phases of Reck/Clements are excluded from
both, which is what keeps the counts comparable across engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionError, LayoutError

BS = "bs"
PS = "ps"
MZI = "mzi"

_KINDS = (BS, PS, MZI)
_PHASE_EPS = 1e-14


@dataclass(frozen=True)
class Element:
    kind: str
    modes: tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise LayoutError(f"unknown element kind {self.kind!r}")
        modes = tuple(int(x) for x in self.modes)
        object.__setattr__(self, "modes", modes)
        if self.kind == PS:
            if len(modes) != 1:
                raise LayoutError(f"phase shifter needs one mode, got {modes}")
        else:
            if len(modes) != 2 or modes[0] == modes[1]:
                raise LayoutError(f"two-mode element needs two distinct modes, got {modes}")
        if any(x < 0 for x in modes):
            raise LayoutError(f"negative mode index in {modes}")

    @property
    def is_mixing(self) -> bool:
        return self.kind != PS


def beam_splitter(a: int, b: int, theta: float = math.pi / 4, phi: float = 0.0) -> Element:
    return Element(BS, (a, b), theta, phi)


def phase_shifter(mode: int, phi: float) -> Element:
    return Element(PS, (mode,), 0.0, phi)


def element_unitary(el: Element) -> np.ndarray:
    """The element's local unitary (1x1 for ps, 2x2 otherwise, modes in listed order)."""
    if el.kind == PS:
        return np.array([[np.exp(1j * el.phi)]], dtype=complex)
    c, s = math.cos(el.theta), math.sin(el.theta)
    bs = np.array([[c, 1j * s], [1j * s, c]], dtype=complex)
    if el.kind == BS:
        return bs @ np.diag([np.exp(1j * el.phi), 1.0])
    half = math.sqrt(0.5)
    bal = np.array([[half, 1j * half], [1j * half, half]], dtype=complex)
    return bal @ np.diag([np.exp(1j * el.theta), 1.0]) @ bal @ np.diag([np.exp(1j * el.phi), 1.0])


@dataclass(frozen=True)
class Circuit:
    """Layered sequence of elements on ``mode_count`` modes; layers apply left to right.

    ``input_permutation`` (when present) declares a relabeling of the inputs
    that is part of the algorithm but not materialized as elements: the qFFT
    engine records its bit-reversal here. ``aux_modes`` marks modes that are
    auxiliary by construction (noise/loss emulation arms).
    """

    mode_count: int
    layers: tuple[tuple[Element, ...], ...]
    name: str = ""
    input_permutation: tuple[int, ...] | None = None
    aux_modes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.mode_count < 1:
            raise DimensionError(f"mode count must be >= 1, got {self.mode_count}")
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for layer in layers:
            seen: set[int] = set()
            for el in layer:
                if max(el.modes) >= self.mode_count:
                    raise LayoutError(
                        f"element on modes {el.modes} outside 0..{self.mode_count - 1}"
                    )
                for x in el.modes:
                    if x in seen:
                        raise LayoutError(f"mode {x} used twice within one layer")
                    seen.add(x)
        if self.input_permutation is not None:
            perm = tuple(int(x) for x in self.input_permutation)
            if sorted(perm) != list(range(self.mode_count)):
                raise LayoutError(f"input permutation {perm} is not a permutation")
            object.__setattr__(self, "input_permutation", perm)

    def elements(self):
        for layer in self.layers:
            yield from layer

    def mixing_elements(self) -> list[Element]:
        return [el for el in self.elements() if el.is_mixing]

    def mixing_layers(self) -> list[tuple[Element, ...]]:
        return [layer for layer in self.layers if any(el.is_mixing for el in layer)]


@dataclass(frozen=True)
class ComponentReport:
    pairs: int
    depth_layers: int


def component_report(circuit: Circuit) -> ComponentReport:
    return ComponentReport(
        pairs=len(circuit.mixing_elements()),
        depth_layers=len(circuit.mixing_layers()),
    )


def circuit_to_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the embedded element unitaries in layer order.

    The declared ``input_permutation`` is metadata and intentionally not
    applied here.
    """
    m = circuit.mode_count
    u = np.eye(m, dtype=complex)
    for layer in circuit.layers:
        v = np.eye(m, dtype=complex)
        for el in layer:
            local = element_unitary(el)
            idx = list(el.modes)
            v[np.ix_(idx, idx)] = local
        u = v @ u
    return u


def _layered(elements) -> tuple[tuple[Element, ...], ...]:
    """Greedy ASAP layering: each element lands in the earliest layer free on its modes."""
    layers: list[list[Element]] = []
    last_layer_of_mode: dict[int, int] = {}
    for el in elements:
        start = max((last_layer_of_mode.get(x, -1) for x in el.modes), default=-1) + 1
        if start == len(layers):
            layers.append([])
        layers[start].append(el)
        for x in el.modes:
            last_layer_of_mode[x] = start
    return tuple(tuple(layer) for layer in layers)


def _output_phase_layer(diag: np.ndarray) -> tuple[Element, ...]:
    out = []
    for k, z in enumerate(diag):
        ang = float(np.angle(z))
        if abs(ang) > _PHASE_EPS:
            out.append(phase_shifter(k, ang))
    return tuple(out)


def qft_matrix(m: int) -> np.ndarray:
    """m x m discrete-Fourier unitary, entry (j,k) = exp(2 pi i j k / m) / sqrt(m)."""
    if m < 1:
        raise DimensionError(f"mode count must be >= 1, got {m}")
    idx = np.arange(m)
    return np.exp(2j * np.pi * np.outer(idx, idx) / m) / math.sqrt(m)


def _null_with_right_op(u_mat, r, a, b):
    """(theta, phi) making (U * embed(E(theta,phi))†)[r, a] = 0."""
    u = u_mat[r, a]
    v = u_mat[r, b]
    theta = math.atan2(abs(u), abs(v))
    if abs(u) < 1e-300 or abs(v) < 1e-300:
        phi = 0.0
    else:
        phi = float(np.angle(u) - np.angle(v) - math.pi / 2)
    return theta, phi


def _apply_right_dagger(u_mat, a, b, theta, phi):
    c, s = math.cos(theta), math.sin(theta)
    ephi = np.exp(-1j * phi)
    col_a = u_mat[:, a].copy()
    col_b = u_mat[:, b].copy()
    u_mat[:, a] = c * ephi * col_a - 1j * s * col_b
    u_mat[:, b] = -1j * s * ephi * col_a + c * col_b


def _null_with_left_op(u_mat, c_col, a, b):
    """(theta, phi) making (embed(E(theta,phi)) * U)[b, c_col] = 0."""
    x = u_mat[a, c_col]
    y = u_mat[b, c_col]
    theta = math.atan2(abs(y), abs(x))
    if abs(x) < 1e-300 or abs(y) < 1e-300:
        phi = 0.0
    else:
        phi = float(np.angle(y) - np.angle(x) + math.pi / 2)
    return theta, phi


def _apply_left(u_mat, a, b, theta, phi):
    c, s = math.cos(theta), math.sin(theta)
    ephi = np.exp(1j * phi)
    row_a = u_mat[a, :].copy()
    row_b = u_mat[b, :].copy()
    u_mat[a, :] = c * ephi * row_a + 1j * s * row_b
    u_mat[b, :] = 1j * s * ephi * row_a + c * row_b


def reck_decompose(U) -> Circuit:
    """Triangular decomposition into m(m-1)/2 bs elements plus output phases.

    Rows are cleared bottom-up by right-multiplied nearest-neighbour ops, so
    the reconstruction reads U = D * E_K ... E_1 with D the diagonal output
    phase layer. Optical depth is 2m-3 mixing layers for m >= 2.
    """
    a = numerics.require_unitary(U).copy()
    m = a.shape[0]
    ops: list[Element] = []
    for r in range(m - 1, 0, -1):
        for j in range(r):
            theta, phi = _null_with_right_op(a, r, j, j + 1)
            _apply_right_dagger(a, j, j + 1, theta, phi)
            ops.append(Element(BS, (j, j + 1), theta, phi))
    layers = list(_layered(ops))
    tail = _output_phase_layer(np.diagonal(a))
    if tail:
        layers.append(tail)
    return Circuit(mode_count=m, layers=tuple(layers), name="reck")


def clements_decompose(U) -> Circuit:
    """Rectangular decomposition: m(m-1)/2 bs elements in m mixing layers.

    Anti-diagonals are cleared alternately by right ops (columns) and left
    ops (rows); left factors are then commuted through the residual diagonal
    using E(theta,phi)† D = D' E(-theta, arg d_a - arg d_b), which leaves a
    single output phase layer.
    """
    a = numerics.require_unitary(U).copy()
    m = a.shape[0]
    right_ops: list[Element] = []
    left_ops: list[tuple[float, float, int, int]] = []
    for i in range(1, m):
        if i % 2 == 1:
            for j in range(i):
                col = i - 1 - j
                theta, phi = _null_with_right_op(a, m - 1 - j, col, col + 1)
                _apply_right_dagger(a, col, col + 1, theta, phi)
                right_ops.append(Element(BS, (col, col + 1), theta, phi))
        else:
            for j in range(1, i + 1):
                row = m + j - i - 1
                theta, phi = _null_with_left_op(a, j - 1, row - 1, row)
                _apply_left(a, row - 1, row, theta, phi)
                left_ops.append((theta, phi, row - 1, row))
    diag = np.diagonal(a).copy()
    pulled: list[Element] = []
    for theta, phi, p, q in reversed(left_ops):
        phi_new = float(np.angle(diag[p]) - np.angle(diag[q]))
        pulled.append(Element(BS, (p, q), -theta, phi_new))
        diag[p] = diag[q] * np.exp(-1j * phi)
    layers = list(_layered(right_ops + pulled))
    tail = _output_phase_layer(diag)
    if tail:
        layers.append(tail)
    return Circuit(mode_count=m, layers=tuple(layers), name="clements")


def bit_reversal(n_qubits: int) -> tuple[int, ...]:
    m = 1 << n_qubits
    out = []
    for j in range(m):
        rev = 0
        x = j
        for _ in range(n_qubits):
            rev = (rev << 1) | (x & 1)
            x >>= 1
        out.append(rev)
    return tuple(out)


def cooley_tukey_qfft(n_qubits: int) -> Circuit:
    """Radix-2 decomposition of QFT_{2^n} into n stages of 2^{n-1} butterfly pairs.

    Stage s applies, within each block of size 2^s, the unitary butterfly
    (x_p, x_q) -> ((x_p + w x_q)/sqrt2, (x_p - w x_q)/sqrt2) with twiddle
    w = exp(2 pi i t / 2^s). Each butterfly is realized exactly as one bs
    element (theta = pi/4 plus an absorbed first-mode phase) fed by one
    twiddle phase shifter, with the running diagonal residue emitted as a
    final pure-phase layer. The declared input permutation P (bit reversal)
    makes the relation exact:

        circuit_to_unitary(c) @ P_matrix == qft_matrix(2^n)

    with P_matrix[j, k] = 1 iff k = perm[j].
    """
    if n_qubits < 1:
        raise DimensionError(f"qubit count must be >= 1, got {n_qubits}")
    if n_qubits > 4:
        raise DimensionError(f"qFFT builder supports n_qubits <= 4, got {n_qubits}")
    m = 1 << n_qubits
    pending = np.ones(m, dtype=complex)
    layers: list[tuple[Element, ...]] = []
    for stage in range(1, n_qubits + 1):
        block = 1 << stage
        half = block >> 1
        ps_layer: list[Element] = []
        bs_layer: list[Element] = []
        new_pending = np.ones(m, dtype=complex)
        for base in range(0, m, block):
            for t in range(half):
                p = base + t
                q = base + t + half
                w = np.exp(2j * np.pi * t / block)
                # B(w) * diag(D_p, D_q) = diag(1, -i) * BS(pi/4)
                #                         * diag(D_p, w D_q / i)
                in_phase = float(np.angle(w * pending[q] / 1j))
                if abs(in_phase) > _PHASE_EPS:
                    ps_layer.append(phase_shifter(q, in_phase))
                bs_layer.append(Element(BS, (p, q), math.pi / 4, float(np.angle(pending[p]))))
                new_pending[p] = 1.0
                new_pending[q] = -1j
        pending = new_pending
        if ps_layer:
            layers.append(tuple(ps_layer))
        layers.append(tuple(bs_layer))
    tail = _output_phase_layer(pending)
    if tail:
        layers.append(tail)
    return Circuit(
        mode_count=m,
        layers=tuple(layers),
        name=f"qfft{n_qubits}",
        input_permutation=bit_reversal(n_qubits),
    )


def permutation_matrix(perm) -> np.ndarray:
    perm = tuple(int(x) for x in perm)
    m = len(perm)
    p = np.zeros((m, m), dtype=complex)
    for j, k in enumerate(perm):
        p[j, k] = 1.0
    return p


def embed_circuit(circuit: Circuit, mode_count: int, mode_map) -> Circuit:
    """Re-index a circuit's modes into a larger circuit via mode_map[old] = new."""
    mapping = {i: int(mode_map[i]) for i in range(circuit.mode_count)}
    layers = tuple(
        tuple(
            Element(el.kind, tuple(mapping[x] for x in el.modes), el.theta, el.phi)
            for el in layer
        )
        for layer in circuit.layers
    )
    return Circuit(
        mode_count=mode_count,
        layers=layers,
        name=circuit.name,
        aux_modes=tuple(mapping[x] for x in circuit.aux_modes),
    )


def concat_circuits(first: Circuit, second: Circuit, name: str = "") -> Circuit:
    """Apply ``first`` then ``second`` (both on the same mode count)."""
    if first.mode_count != second.mode_count:
        raise DimensionError(
            f"mode counts differ: {first.mode_count} vs {second.mode_count}"
        )
    return Circuit(
        mode_count=first.mode_count,
        layers=first.layers + second.layers,
        name=name or f"{first.name}+{second.name}",
        aux_modes=tuple(sorted(set(first.aux_modes) | set(second.aux_modes))),
    )


# ---------------------------------------------------------------------------
# Serialization: versioned line-oriented text, bit-exact float round-trip
# ---------------------------------------------------------------------------

FORMAT_VERSION = "1"


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"circuit v{FORMAT_VERSION}", f"modes {circuit.mode_count}"]
    if circuit.name:
        lines.append(f"name {circuit.name}")
    if circuit.input_permutation is not None:
        lines.append("perm " + " ".join(str(x) for x in circuit.input_permutation))
    if circuit.aux_modes:
        lines.append("aux " + " ".join(str(x) for x in circuit.aux_modes))
    for layer in circuit.layers:
        lines.append("layer")
        for el in layer:
            modes = " ".join(str(x) for x in el.modes)
            lines.append(f"  {el.kind} {modes} {el.theta!r} {el.phi!r}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("circuit v"):
        raise ValueError("not a circuit file: missing 'circuit v<N>' header")
    version = lines[0].removeprefix("circuit v")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported circuit format version {version!r}")
    mode_count = None
    name = ""
    perm = None
    aux: tuple[int, ...] = ()
    layers: list[list[Element]] = []
    for ln in lines[1:]:
        head, _, rest = ln.partition(" ")
        if head == "modes":
            mode_count = int(rest)
        elif head == "name":
            name = rest
        elif head == "perm":
            perm = tuple(int(x) for x in rest.split())
        elif head == "aux":
            aux = tuple(int(x) for x in rest.split())
        elif head == "layer":
            layers.append([])
        elif head in _KINDS:
            if not layers:
                raise ValueError("element line before any 'layer' marker")
            parts = rest.split()
            if head == PS:
                modes = (int(parts[0]),)
                theta, phi = float(parts[1]), float(parts[2])
            else:
                modes = (int(parts[0]), int(parts[1]))
                theta, phi = float(parts[2]), float(parts[3])
            layers[-1].append(Element(head, modes, theta, phi))
        else:
            raise ValueError(f"unrecognized line in circuit file: {ln!r}")
    if mode_count is None:
        raise ValueError("circuit file missing 'modes' line")
    return Circuit(
        mode_count=mode_count,
        layers=tuple(tuple(layer) for layer in layers),
        name=name,
        input_permutation=perm,
        aux_modes=aux,
    )
