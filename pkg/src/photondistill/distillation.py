"""Heralded photon-distillation protocols and suppression-law verification.

A protocol bundles a linear-optical circuit, the input occupation of its
noisy photons and one or more herald specifications. Heralding conditions on
a photon-number pattern over the measured modes and leaves a single photon in
the output mode; its conditional internal state gives the distilled error

    epsilon_out = 1 - <good| rho' |good>

and the cross visibility against a fresh noisy reference photon,
V' = (1 - eps_ref)(1 - epsilon_out) under the canonical noise model.

Conditioning runs through the exact full-state oracle
(:func:`photondistill.interference.brute_force_oracle`); the independent
mixture-route conditioner is used by tests to cross-validate every headline
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import circuits, fock, interference, numerics
from .circuits import Circuit, Element
from .errors import DegenerateHeraldError, DimensionError
from .interference import InternalState, PhotonEnsemble

DEGENERATE_PROBABILITY = 1e-15

# Default grid for slope fits: small enough for first-order behaviour to
# dominate, large enough to stay clear of float noise.
DEFAULT_EPSILON_GRID = (0.001, 0.005, 0.01, 0.05, 0.1)


@dataclass(frozen=True)
class HeraldSpec:
    """Detector pattern on the measured modes plus the surviving output mode."""

    measured_modes: tuple[int, ...]
    pattern: tuple[int, ...]
    output_mode: int

    def __post_init__(self):
        measured = tuple(int(x) for x in self.measured_modes)
        pattern = tuple(int(x) for x in self.pattern)
        object.__setattr__(self, "measured_modes", measured)
        object.__setattr__(self, "pattern", pattern)
        if len(measured) != len(pattern):
            raise DimensionError("measured_modes and pattern lengths differ")
        if len(set(measured)) != len(measured):
            raise DimensionError("measured modes must be distinct")
        if self.output_mode in measured:
            raise DimensionError("output mode cannot be measured")
        if any(c < 0 for c in pattern):
            raise DimensionError("herald pattern counts must be non-negative")

    @property
    def detected_photons(self) -> int:
        return sum(self.pattern)

    def covers_all_modes(self, mode_count: int) -> bool:
        return sorted(self.measured_modes + (self.output_mode,)) == list(range(mode_count))

    def full_outcome(self, mode_count: int) -> tuple[int, ...]:
        """The complete output occupation implied by a fully covering herald."""
        if not self.covers_all_modes(mode_count):
            raise DimensionError("herald does not cover all modes")
        s = [0] * mode_count
        for mm, c in zip(self.measured_modes, self.pattern):
            s[mm] = c
        s[self.output_mode] = 1
        return tuple(s)


@dataclass(frozen=True)
class DistillationOutcome:
    herald: HeraldSpec
    success_probability: float
    conditional_state: InternalState
    epsilon_out: float
    visibility_out: float
    epsilon_in: float


@dataclass(frozen=True)
class Protocol:
    """A runnable distillation scheme: circuit, photon placement, heralds."""

    name: str
    circuit: Circuit
    input_occupation: tuple[int, ...]
    heralds: tuple[HeraldSpec, ...]
    final_pair: tuple[int, int] | None = None  # tree protocols: the two distilled modes

    @property
    def herald(self) -> HeraldSpec:
        return self.heralds[0]

    @property
    def photon_count(self) -> int:
        return sum(self.input_occupation)

    def ensemble(self, epsilon: float) -> PhotonEnsemble:
        return interference.make_noisy_source(
            self.photon_count, epsilon, input_modes=self.input_occupation
        )


def ztl_allowed(s) -> bool:
    """Zero-transmission-law predicate for one-photon-per-mode Fourier input.

    An output configuration is allowed iff the 1-based output mode labels of
    all photons sum to 0 mod m; everything else is suppressed for fully
    indistinguishable input.
    """
    s = fock.check_occupation(s)
    m = len(s)
    total = sum((k + 1) * c for k, c in enumerate(s))
    return total % m == 0


@dataclass(frozen=True)
class SuppressionReport:
    m: int
    forbidden: tuple[tuple[int, ...], ...]
    max_forbidden_probability: float
    suppressed: bool
    distinguishable_max_forbidden: float
    distinguishable_witness: tuple[int, ...] | None
    distinguishable_violates: bool


def verify_suppression(m: int) -> SuppressionReport:
    """Check the zero-transmission law for QFT_m with one photon per mode.

    Indistinguishable input must put < 1e-10 on every forbidden outcome;
    fully distinguishable photons must violate the law with at least one
    forbidden outcome above 1%.
    """
    if not 2 <= m <= 6:
        raise DimensionError(f"suppression verification supports 2 <= m <= 6, got {m}")
    u = circuits.qft_matrix(m)
    r = (1,) * m
    ideal = fock.output_distribution(u, r)
    classical = fock.distinguishable_distribution(u, r)
    forbidden = tuple(s for s in ideal if not ztl_allowed(s))
    max_forbidden = max((ideal[s] for s in forbidden), default=0.0)
    witness = None
    dist_max = 0.0
    for s in forbidden:
        if classical[s] > dist_max:
            dist_max = classical[s]
            witness = s
    return SuppressionReport(
        m=m,
        forbidden=forbidden,
        max_forbidden_probability=max_forbidden,
        suppressed=max_forbidden < 1e-10,
        distinguishable_max_forbidden=dist_max,
        distinguishable_witness=witness,
        distinguishable_violates=dist_max >= 0.01,
    )


def _as_unitary(circuit_or_u) -> np.ndarray:
    if isinstance(circuit_or_u, Circuit):
        return circuits.circuit_to_unitary(circuit_or_u)
    return numerics.require_unitary(circuit_or_u)


def fresh_reference(epsilon: float, dim: int) -> InternalState:
    """A new rho(eps) photon whose noise level is orthogonal to everything used so far."""
    rho = np.zeros((dim + 1, dim + 1), dtype=complex)
    rho[0, 0] = 1.0 - epsilon
    rho[dim, dim] = epsilon
    return InternalState(rho)


def run_heralded(
    circuit_or_u,
    ensemble: PhotonEnsemble,
    herald: HeraldSpec,
    reference_epsilon: float | None = None,
) -> DistillationOutcome:
    """Condition on a herald and report the distilled photon's figures of merit.

    Uses the exact oracle path. ``visibility_out`` is the HOM visibility of
    the survivor against a fresh noisy reference photon (same epsilon as the
    input unless overridden).
    """
    u = _as_unitary(circuit_or_u)
    if u.shape[0] != ensemble.mode_count:
        raise DimensionError(
            f"circuit acts on {u.shape[0]} modes, ensemble has {ensemble.mode_count}"
        )
    result = interference.brute_force_oracle(u, ensemble)
    prob, state = result.conditional_survivor(
        herald.measured_modes, herald.pattern, herald.output_mode
    )
    if prob < DEGENERATE_PROBABILITY or state is None:
        raise DegenerateHeraldError(
            f"herald {herald.pattern} on modes {herald.measured_modes} has probability "
            f"{prob:.3e}; conditional state undefined"
        )
    target = np.zeros(state.dim, dtype=complex)
    target[0] = 1.0
    eps_out = 1.0 - state.fidelity(target)
    eps_in = ensemble.epsilon if ensemble.epsilon is not None else 0.0
    eps_ref = eps_in if reference_epsilon is None else reference_epsilon
    reference = fresh_reference(eps_ref, state.dim)
    visibility = interference.hom_visibility(state.embed(state.dim + 1), reference)
    return DistillationOutcome(
        herald=herald,
        success_probability=prob,
        conditional_state=state,
        epsilon_out=float(eps_out),
        visibility_out=float(visibility),
        epsilon_in=float(eps_in),
    )


def protocol_cascaded_hom() -> Protocol:
    """Two-photon purification: bunch on one balanced splitter, split on a second.

    Photons enter modes 0 and 1. Zero photons detected in mode 1 heralds
    bunching into mode 0; a second balanced splitter against the empty
    monitor mode 2 then probabilistically separates the pair, heralded by one
    photon in the monitor arm. The survivor exits mode 0.
    """
    circuit = Circuit(
        mode_count=3,
        layers=(
            (circuits.beam_splitter(0, 1),),
            (circuits.beam_splitter(0, 2),),
        ),
        name="cascaded-hom",
        aux_modes=(2,),
    )
    herald = HeraldSpec(measured_modes=(1, 2), pattern=(0, 1), output_mode=0)
    return Protocol(
        name="hom",
        circuit=circuit,
        input_occupation=(1, 1, 0),
        heralds=(herald,),
    )


def protocol_tree(n_copies: int = 2) -> Protocol:
    """Two cascaded-HOM purifiers whose outputs interfere on a final splitter.

    Four photons enter modes 0-3; modes 4 and 5 are the two monitor arms.
    Both sub-heralds (empty anti-bunched ports 1 and 3, one photon in each
    monitor) must fire; the purified photons then meet on the final splitter
    across modes 0 and 2, whose coincidence statistics measure the distilled
    indistinguishability.
    """
    if n_copies != 2:
        raise DimensionError("only the two-copy tree is defined")
    circuit = Circuit(
        mode_count=6,
        layers=(
            (circuits.beam_splitter(0, 1), circuits.beam_splitter(2, 3)),
            (circuits.beam_splitter(0, 4), circuits.beam_splitter(2, 5)),
            (circuits.beam_splitter(0, 2),),
        ),
        name="tree-purification",
        aux_modes=(4, 5),
    )
    herald = HeraldSpec(measured_modes=(1, 3, 4, 5), pattern=(0, 0, 1, 1), output_mode=0)
    return Protocol(
        name="tree",
        circuit=circuit,
        input_occupation=(1, 1, 1, 1, 0, 0),
        heralds=(herald,),
        final_pair=(0, 2),
    )


def fourier_heralds(m: int) -> tuple[HeraldSpec, ...]:
    """Every pattern of m-1 photons on the first m-1 modes, survivor in mode m-1."""
    measured = tuple(range(m - 1))
    return tuple(
        HeraldSpec(measured_modes=measured, pattern=p, output_mode=m - 1)
        for p in fock.enumerate_outcomes(m - 1, m - 1)
    )


def herald_ztl_allowed(herald: HeraldSpec, mode_count: int) -> bool:
    """ZTL status of the full outcome (herald pattern plus the surviving photon)."""
    return ztl_allowed(herald.full_outcome(mode_count))


def protocol_fourier(m: int) -> Protocol:
    """One noisy photon per mode through QFT_m, heralding m-1 detections.

    Power-of-two mode counts compile through the Cooley-Tukey engine (the
    declared input bit reversal is irrelevant for the permutation-symmetric
    one-photon-per-mode input); other m <= 6 go through a dense Clements
    decomposition of the Fourier matrix.
    """
    if m in (2, 4, 8):
        circuit = circuits.cooley_tukey_qfft(int(round(math.log2(m))))
    elif 2 <= m <= 6:
        circuit = circuits.clements_decompose(circuits.qft_matrix(m))
    else:
        raise DimensionError(f"fourier protocol supports m in {{2,4,8}} or m <= 6, got {m}")
    return Protocol(
        name=f"fourier{m}",
        circuit=circuit,
        input_occupation=(1,) * m,
        heralds=fourier_heralds(m),
    )


def protocol_identity() -> Protocol:
    """One photon through one empty mode; heralds nothing and distills nothing."""
    circuit = Circuit(mode_count=1, layers=(), name="identity")
    herald = HeraldSpec(measured_modes=(), pattern=(), output_mode=0)
    return Protocol(name="identity", circuit=circuit, input_occupation=(1,), heralds=(herald,))


BUILTIN_PROTOCOLS = {
    "hom": protocol_cascaded_hom,
    "tree": protocol_tree,
    "fourier": protocol_fourier,
}


@dataclass(frozen=True)
class SlopeFit:
    """First-order error-reduction fit: epsilon_out = slope * eps + curvature * eps^2.

    A through-origin least-squares fit with 1/eps^2 weights (equivalently a
    straight-line fit of the per-point ratios against eps). The quadratic
    nuisance term absorbs the second-order correction so that ``slope`` is
    the limiting ratio epsilon_out / eps as eps -> 0, which is what the
    protocols' first-order claims are about.
    """

    slope: float
    curvature: float
    epsilons: tuple[float, ...]
    epsilon_outs: tuple[float, ...]
    ratios: tuple[float, ...]


def _fit_origin_quadratic(grid, values) -> tuple[float, float]:
    ratios = np.asarray(values) / np.asarray(grid)
    design = np.vstack([np.ones(len(grid)), np.asarray(grid)]).T
    coef, *_ = np.linalg.lstsq(design, ratios, rcond=None)
    return float(coef[0]), float(coef[1])


def error_slope(
    protocol: Protocol,
    epsilon_grid=DEFAULT_EPSILON_GRID,
    herald: HeraldSpec | None = None,
) -> SlopeFit:
    grid = tuple(float(e) for e in epsilon_grid)
    if len(grid) < 3:
        raise ValueError("slope fit needs at least 3 grid points")
    if any(not 0.0 < e <= 0.2 for e in grid):
        raise ValueError(f"grid values must lie in (0, 0.2], got {grid}")
    h = herald if herald is not None else protocol.herald
    eps_outs = []
    for eps in grid:
        outcome = run_heralded(protocol.circuit, protocol.ensemble(eps), h)
        eps_outs.append(outcome.epsilon_out)
    ratios = tuple(out / eps for out, eps in zip(eps_outs, grid))
    slope, curvature = _fit_origin_quadratic(grid, eps_outs)
    return SlopeFit(
        slope=slope,
        curvature=curvature,
        epsilons=grid,
        epsilon_outs=tuple(eps_outs),
        ratios=ratios,
    )


def best_fourier_herald(m: int, probe_epsilon: float = 0.05) -> HeraldSpec:
    """The ZTL-allowed herald with the smallest distilled error at a probe epsilon."""
    protocol = protocol_fourier(m)
    best = None
    best_eps = math.inf
    for h in protocol.heralds:
        if not herald_ztl_allowed(h, m):
            continue
        try:
            outcome = run_heralded(protocol.circuit, protocol.ensemble(probe_epsilon), h)
        except DegenerateHeraldError:
            continue
        if outcome.epsilon_out < best_eps - 1e-15:
            best_eps = outcome.epsilon_out
            best = h
    if best is None:
        raise DegenerateHeraldError(f"no viable ZTL-allowed herald for m={m}")
    return best


@dataclass(frozen=True)
class HeraldTableRow:
    herald: HeraldSpec
    ztl_allowed: bool
    success_probability: float
    epsilon_out: float | None
    visibility_out: float | None
    degenerate: bool


def herald_table(protocol: Protocol, epsilon: float) -> list[HeraldTableRow]:
    """Per-herald success probability and distilled figures at one epsilon."""
    rows = []
    for h in protocol.heralds:
        allowed = (
            herald_ztl_allowed(h, protocol.circuit.mode_count)
            if h.covers_all_modes(protocol.circuit.mode_count)
            else False
        )
        try:
            outcome = run_heralded(protocol.circuit, protocol.ensemble(epsilon), h)
            rows.append(
                HeraldTableRow(
                    herald=h,
                    ztl_allowed=allowed,
                    success_probability=outcome.success_probability,
                    epsilon_out=outcome.epsilon_out,
                    visibility_out=outcome.visibility_out,
                    degenerate=False,
                )
            )
        except DegenerateHeraldError:
            rows.append(
                HeraldTableRow(
                    herald=h,
                    ztl_allowed=allowed,
                    success_probability=0.0,
                    epsilon_out=None,
                    visibility_out=None,
                    degenerate=True,
                )
            )
    return rows


def herald_probability_accounting(protocol: Protocol, epsilon: float) -> tuple[float, float]:
    """(sum of herald probabilities, complement) over the full outcome distribution.

    Heralds of a fully covering protocol are disjoint outcomes, so the two
    numbers must add to 1 within numerical error.
    """
    u = _as_unitary(protocol.circuit)
    dist = interference.output_distribution_partial(u, protocol.ensemble(epsilon))
    herald_outcomes = {
        h.full_outcome(protocol.circuit.mode_count)
        for h in protocol.heralds
        if h.covers_all_modes(protocol.circuit.mode_count)
    }
    herald_p = sum(dist[s] for s in herald_outcomes if s in dist)
    rest = sum(p for s, p in dist.items() if s not in herald_outcomes)
    return float(herald_p), float(rest)


@dataclass(frozen=True)
class TreeOutcome:
    herald_probability: float
    coincidence_probability: float  # P(one photon in each final mode | sub-heralds)
    final_visibility: float  # 1 - 2 * coincidence, the HOM visibility of the pair
    raw_visibility: float  # (1 - eps)^2 of two undistilled photons


def evaluate_tree(protocol: Protocol, epsilon: float) -> TreeOutcome:
    """Interference statistics of the two distilled photons on the final splitter."""
    if protocol.final_pair is None:
        raise ValueError("protocol has no final interference pair")
    u = _as_unitary(protocol.circuit)
    dist = interference.output_distribution_partial(u, protocol.ensemble(epsilon))
    h = protocol.herald
    pattern = dict(zip(h.measured_modes, h.pattern))
    a, b = protocol.final_pair
    herald_p = 0.0
    coincidence_p = 0.0
    for s, p in dist.items():
        if any(s[mm] != c for mm, c in pattern.items()):
            continue
        herald_p += p
        if s[a] == 1 and s[b] == 1:
            coincidence_p += p
    if herald_p < DEGENERATE_PROBABILITY:
        raise DegenerateHeraldError("tree sub-heralds have vanishing probability")
    cond = coincidence_p / herald_p
    return TreeOutcome(
        herald_probability=float(herald_p),
        coincidence_probability=float(cond),
        final_visibility=float(1.0 - 2.0 * cond),
        raw_visibility=float((1.0 - epsilon) ** 2),
    )


def noise_emulation_circuit(eps_multiphoton: float, eps_loss: float) -> Circuit:
    """Two-splitter error-emulation stage with declared auxiliary modes.

    Mode 0 is the monitored signal; the first splitter couples it to the
    noise-photon mode 1 with reflectivity eps_multiphoton, the second couples
    the monitored mode to the loss mode 2 with reflectivity eps_loss. Both
    angles follow theta = arcsin(sqrt(eps)), so eps = 0 is the identity and
    eps = 1 the full crossover.
    """
    for nameval, val in (("eps_multiphoton", eps_multiphoton), ("eps_loss", eps_loss)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{nameval} must lie in [0, 1], got {val}")
    theta_mp = math.asin(math.sqrt(eps_multiphoton))
    theta_loss = math.asin(math.sqrt(eps_loss))
    return Circuit(
        mode_count=3,
        layers=(
            (Element(circuits.BS, (0, 1), theta_mp, 0.0),),
            (Element(circuits.BS, (0, 2), theta_loss, 0.0),),
        ),
        name="noise-emulation",
        aux_modes=(1, 2),
    )
