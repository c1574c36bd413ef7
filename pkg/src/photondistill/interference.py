"""Partial distinguishability of photons.

The canonical noisy source is the orthogonal-bad-bit model: photon j carries

    rho(eps) = (1 - eps) |0><0| + eps |j><j|

in an internal space of dimension n+1, with level 0 the shared "good" state
and level j a noise level unique to photon j. Any two photons' noise
components are therefore mutually distinguishable, which makes the model
exactly solvable: expanding each photon classically into good/bad branches
(2^n of them) splits every branch into mutually distinguishable classes whose
joint statistics are the convolution of independent indistinguishable-subset
distributions.

Two independent computational routes are provided on purpose:

* :func:`output_distribution_partial` — the mixture/convolution path for the
  canonical model, and a permutation-pair Gram sum for explicit pure states;
  probabilities come from matrix permanents via :mod:`photondistill.fock`.
* :func:`brute_force_oracle` — full evolution of the multimode Fock space
  tensored with the internal space, summing explicit photon paths. It never
  touches a permanent and is the ground truth for everything else, including
  heralded conditional states.

All functions are pure; branch evaluations may run concurrently without
changing results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import fock, numerics
from .errors import CapacityError, DimensionError

CANONICAL = "canonical-orthogonal-noise"
EXPLICIT = "explicit"

# brute_force_oracle caps: the path enumeration is exponential in the photon
# number, and (modes * internal dim)^n amplitudes must stay desk-sized.
ORACLE_MAX_PHOTONS = 4
ORACLE_MAX_MODES = 6
ORACLE_MAX_DIM = 5

_EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True)
class InternalState:
    """Internal (spectral/polarization/temporal) state of one photon as a density matrix."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
            raise ValueError(f"density matrix trace is {np.trace(rho)}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < _EIGENVALUE_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue beyond -1e-10")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "density", rho)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    @classmethod
    def pure(cls, vector) -> "InternalState":
        v = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValueError("cannot build a pure state from the zero vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def basis(cls, level: int, dim: int) -> "InternalState":
        v = np.zeros(dim, dtype=complex)
        v[level] = 1.0
        return cls.pure(v)

    def fidelity(self, vector) -> float:
        """<psi|rho|psi> against a (normalized) pure target."""
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return float(np.real(v.conj() @ self.density @ v))

    def embed(self, dim: int) -> "InternalState":
        """Pad with zero rows/columns up to a larger internal dimension."""
        if dim < self.dim:
            raise DimensionError(f"cannot shrink internal dim {self.dim} to {dim}")
        rho = np.zeros((dim, dim), dtype=complex)
        rho[: self.dim, : self.dim] = self.density
        return InternalState(rho)

    def eigenbranches(self) -> list[tuple[float, np.ndarray]]:
        """(weight, pure vector) pairs of the spectral decomposition, weight > 1e-12."""
        vals, vecs = np.linalg.eigh(self.density)
        return [(float(w), vecs[:, i]) for i, w in enumerate(vals) if w > 1e-12]


@dataclass(frozen=True)
class PhotonEnsemble:
    """A multi-photon input: per-photon internal states plus their spatial placement.

    ``input_modes`` is an occupation vector; photons are listed in mode order
    (all photons of mode 0 first, and so on).
    """

    photons: tuple[InternalState, ...]
    input_modes: tuple[int, ...]
    model_tag: str = EXPLICIT
    epsilon: float | None = None
    noise_levels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        occ = fock.check_occupation(self.input_modes)
        object.__setattr__(self, "input_modes", occ)
        if len(self.photons) != sum(occ):
            raise DimensionError(
                f"{len(self.photons)} photons but input occupation sums to {sum(occ)}"
            )
        dims = {p.dim for p in self.photons}
        if len(dims) > 1:
            raise DimensionError(f"photons disagree on internal dimension: {sorted(dims)}")

    @property
    def photon_count(self) -> int:
        return len(self.photons)

    @property
    def mode_count(self) -> int:
        return len(self.input_modes)

    @property
    def internal_dim(self) -> int:
        return self.photons[0].dim if self.photons else 1

    def photon_mode_list(self) -> list[int]:
        return fock.mode_list(self.input_modes)

    def gram(self) -> np.ndarray:
        """Pairwise internal overlaps.

        For the canonical model this is the Gram matrix of the purified
        photons: unit diagonal, (1-eps) off-diagonal. For explicit ensembles
        it is the Hilbert-Schmidt overlap Tr[rho_i rho_j] (unit diagonal only
        when the states are pure). Positive semidefinite in both cases.
        """
        n = self.photon_count
        if self.model_tag == CANONICAL:
            g = np.full((n, n), 1.0 - float(self.epsilon), dtype=complex)
            np.fill_diagonal(g, 1.0)
            return g
        g = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                g[i, j] = np.trace(self.photons[i].density @ self.photons[j].density)
        return g

    def validate_gram(self) -> None:
        g = self.gram()
        if np.min(np.linalg.eigvalsh((g + g.conj().T) / 2)) < _EIGENVALUE_FLOOR:
            raise ValueError("ensemble overlap matrix is not positive semidefinite")


def make_noisy_source(
    n: int, epsilon: float, input_modes: tuple[int, ...] | None = None
) -> PhotonEnsemble:
    """n copies of the canonical noisy photon rho(eps), one per occupied mode slot.

    Defaults to one photon in each of n modes. ``input_modes`` may widen the
    circuit (e.g. empty ancilla modes) as long as its counts sum to n.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if n < 1:
        raise DimensionError(f"photon count must be >= 1, got {n}")
    occ = (1,) * n if input_modes is None else fock.check_occupation(input_modes)
    if sum(occ) != n:
        raise DimensionError(f"input occupation sums to {sum(occ)}, expected {n}")
    dim = n + 1
    photons = []
    for j in range(1, n + 1):
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0 - epsilon
        rho[j, j] = epsilon
        photons.append(InternalState(rho))
    return PhotonEnsemble(
        photons=tuple(photons),
        input_modes=occ,
        model_tag=CANONICAL,
        epsilon=float(epsilon),
        noise_levels=tuple(range(1, n + 1)),
    )


def explicit_ensemble(states, input_modes) -> PhotonEnsemble:
    """Build an explicit ensemble from pure vectors or InternalState/density matrices."""
    photons = []
    for s in states:
        if isinstance(s, InternalState):
            photons.append(s)
        else:
            arr = np.asarray(s, dtype=complex)
            photons.append(InternalState.pure(arr) if arr.ndim == 1 else InternalState(arr))
    return PhotonEnsemble(tuple(photons), fock.check_occupation(input_modes), EXPLICIT)


def hom_visibility(a: InternalState, b: InternalState) -> float:
    """Two-photon interference visibility V = Tr[a b]."""
    if a.dim != b.dim:
        raise DimensionError(f"internal dims differ: {a.dim} vs {b.dim}")
    return float(np.real(np.trace(a.density @ b.density)))


def _single_photon_distribution(U: np.ndarray, mode: int) -> dict[tuple[int, ...], float]:
    m = U.shape[0]
    dist = {}
    for k in range(m):
        s = tuple(1 if i == k else 0 for i in range(m))
        dist[s] = float(abs(U[k, mode]) ** 2)
    return dist


def _convolve(d1: dict, d2: dict) -> dict:
    out: dict[tuple[int, ...], float] = {}
    for s1, p1 in d1.items():
        if p1 == 0.0:
            continue
        for s2, p2 in d2.items():
            if p2 == 0.0:
                continue
            key = tuple(x + y for x, y in zip(s1, s2))
            out[key] = out.get(key, 0.0) + p1 * p2
    return out


def canonical_branches(ensemble: PhotonEnsemble):
    """Good/bad classical branches of a canonical ensemble.

    Yields (weight, good_photon_indices, bad_photon_indices); zero-weight
    branches are skipped.
    """
    if ensemble.model_tag != CANONICAL:
        raise ValueError("branch expansion only applies to the canonical noise model")
    eps = float(ensemble.epsilon)
    n = ensemble.photon_count
    for bits in itertools.product((0, 1), repeat=n):
        w = 1.0
        for b in bits:
            w *= eps if b else (1.0 - eps)
        if w == 0.0:
            continue
        good = tuple(j for j, b in enumerate(bits) if not b)
        bad = tuple(j for j, b in enumerate(bits) if b)
        yield w, good, bad


def _occupation_of(photon_indices, photon_modes, m) -> tuple[int, ...]:
    occ = [0] * m
    for j in photon_indices:
        occ[photon_modes[j]] += 1
    return tuple(occ)


def _canonical_distribution(U: np.ndarray, ensemble: PhotonEnsemble) -> dict:
    m = U.shape[0]
    photon_modes = ensemble.photon_mode_list()
    total: dict[tuple[int, ...], float] = {
        s: 0.0 for s in fock.enumerate_outcomes(m, ensemble.photon_count)
    }
    for w, good, bad in canonical_branches(ensemble):
        parts = []
        if good:
            occ = _occupation_of(good, photon_modes, m)
            parts.append(fock.output_distribution(U, occ, validate=False))
        for j in bad:
            parts.append(_single_photon_distribution(U, photon_modes[j]))
        branch = parts[0]
        for p in parts[1:]:
            branch = _convolve(branch, p)
        for s, p in branch.items():
            total[s] += w * p
    return total


def _pure_branch_distribution(
    U: np.ndarray, modes: list[int], vectors: list[np.ndarray]
) -> dict:
    """Permutation-pair sum for pure internal states with Gram matrix S.

    P(s) = (1 / (prod s_k! * N)) * sum_{sigma,tau} prod_j
           U[d_j, a_sigma(j)] conj(U[d_j, a_tau(j)]) S[tau(j), sigma(j)]
    with N the input normalization permanent (1 for distinct input modes).
    """
    m = U.shape[0]
    n = len(modes)
    gram = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            gram[i, j] = vectors[i].conj() @ vectors[j]
    norm_mat = np.array(
        [[gram[i, j] if modes[i] == modes[j] else 0.0 for j in range(n)] for i in range(n)],
        dtype=complex,
    )
    norm = numerics.permanent(norm_mat).real
    perms = list(itertools.permutations(range(n)))
    dist = {}
    for s in fock.enumerate_outcomes(m, n):
        d = fock.mode_list(s)
        denom = norm
        for c in s:
            denom *= math.factorial(c)
        acc = 0 + 0j
        for sigma in perms:
            fwd = np.empty(n, dtype=complex)
            for j in range(n):
                fwd[j] = U[d[j], modes[sigma[j]]]
            for tau in perms:
                term = 1 + 0j
                for j in range(n):
                    term *= fwd[j] * np.conj(U[d[j], modes[tau[j]]]) * gram[tau[j], sigma[j]]
                acc += term
        dist[s] = float(acc.real) / denom
    return dist


def output_distribution_partial(
    U, ensemble: PhotonEnsemble, validate: bool = True
) -> dict[tuple[int, ...], float]:
    """Exact outcome probabilities for partially distinguishable photons.

    Canonical ensembles expand into 2^n good/bad branches whose classes
    evolve independently; explicit ensembles go through eigen-branches and
    the permutation-pair Gram sum.
    """
    a = numerics.as_complex_matrix(U)
    if validate:
        numerics.require_unitary(a, what="mode transformation")
    if a.shape[0] != ensemble.mode_count:
        raise DimensionError(
            f"unitary acts on {a.shape[0]} modes, ensemble has {ensemble.mode_count}"
        )
    ensemble.validate_gram()
    if ensemble.model_tag == CANONICAL:
        return _canonical_distribution(a, ensemble)

    modes = ensemble.photon_mode_list()
    branches = [p.eigenbranches() for p in ensemble.photons]
    total: dict[tuple[int, ...], float] = {
        s: 0.0 for s in fock.enumerate_outcomes(a.shape[0], ensemble.photon_count)
    }
    for combo in itertools.product(*branches):
        w = 1.0
        for weight, _ in combo:
            w *= weight
        vectors = [vec for _, vec in combo]
        dist = _pure_branch_distribution(a, modes, vectors)
        for s, p in dist.items():
            total[s] += w * p
    return total


# ---------------------------------------------------------------------------
# Brute-force oracle: explicit path sums over the joint (mode, internal) space
# ---------------------------------------------------------------------------


def _spatial_of(config: tuple, m: int) -> tuple[int, ...]:
    occ = [0] * m
    for k, _ in config:
        occ[k] += 1
    return tuple(occ)


@dataclass(frozen=True)
class _Branch:
    weight: float
    amplitudes: dict  # multiset of (mode, level) -> normalized amplitude


@dataclass(frozen=True)
class OracleResult:
    """Full joint output state of the oracle, queryable for marginals and conditioning."""

    mode_count: int
    internal_dim: int
    input_occupation: tuple[int, ...]
    branches: tuple[_Branch, ...]

    def spatial_distribution(self) -> dict[tuple[int, ...], float]:
        total: dict[tuple[int, ...], float] = {
            s: 0.0
            for s in fock.enumerate_outcomes(self.mode_count, sum(self.input_occupation))
        }
        for br in self.branches:
            for config, amp in br.amplitudes.items():
                s = _spatial_of(config, self.mode_count)
                total[s] += br.weight * float(abs(amp) ** 2)
        return total

    def conditional_survivor(
        self, measured_modes, pattern, output_mode: int
    ) -> tuple[float, InternalState | None]:
        """Joint herald probability and the surviving photon's internal state.

        Conditions on the photon-number pattern over ``measured_modes`` and on
        exactly one photon in ``output_mode``; anything else (unmeasured
        modes, detected photons' internal content) is traced out.
        """
        measured = {int(mm): int(p) for mm, p in zip(measured_modes, pattern)}
        if output_mode in measured:
            raise ValueError("output mode cannot also be measured")
        d = self.internal_dim
        rho = np.zeros((d, d), dtype=complex)
        for br in self.branches:
            groups: dict[tuple, np.ndarray] = {}
            for config, amp in br.amplitudes.items():
                s = _spatial_of(config, self.mode_count)
                if s[output_mode] != 1:
                    continue
                if any(s[mm] != cnt for mm, cnt in measured.items()):
                    continue
                level = next(mu for k, mu in config if k == output_mode)
                rest = tuple(c for c in config if c[0] != output_mode)
                vec = groups.get(rest)
                if vec is None:
                    vec = np.zeros(d, dtype=complex)
                    groups[rest] = vec
                vec[level] += amp
            for vec in groups.values():
                rho += br.weight * np.outer(vec, vec.conj())
        prob = float(np.trace(rho).real)
        if prob <= 0.0:
            return 0.0, None
        return prob, InternalState(rho / prob)


def brute_force_oracle(U, ensemble: PhotonEnsemble) -> OracleResult:
    """Evolve the full multimode Fock space tensored with internal states.

    Mixed internal states expand into eigen-branches (exact, since all
    reported quantities are linear in the input density matrix). Within a
    branch the output state is built by explicit path enumeration: photon j
    entering mode a_j in internal state v goes to (k, mu) with amplitude
    U[k, a_j] * v[mu], and the bosonic multiset normalization
    sqrt(prod counts!) is applied per output configuration.
    """
    a = numerics.require_unitary(U, what="mode transformation")
    m = a.shape[0]
    n = ensemble.photon_count
    d = ensemble.internal_dim
    if n > ORACLE_MAX_PHOTONS or m > ORACLE_MAX_MODES or d > ORACLE_MAX_DIM:
        raise CapacityError(
            f"oracle caps exceeded: n={n} (max {ORACLE_MAX_PHOTONS}), "
            f"m={m} (max {ORACLE_MAX_MODES}), dim={d} (max {ORACLE_MAX_DIM})"
        )
    if m != ensemble.mode_count:
        raise DimensionError(f"unitary acts on {m} modes, ensemble has {ensemble.mode_count}")

    photon_modes = ensemble.photon_mode_list()
    eigen = [p.eigenbranches() for p in ensemble.photons]
    branches = []
    for combo in itertools.product(*eigen):
        weight = 1.0
        for w, _ in combo:
            weight *= w
        vectors = [vec for _, vec in combo]

        # Input normalization: permanent of the input-configuration Gram.
        norm_mat = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                if photon_modes[i] == photon_modes[j]:
                    norm_mat[i, j] = vectors[i].conj() @ vectors[j]
        norm_sq = numerics.permanent(norm_mat).real if n else 1.0

        options = []
        for j in range(n):
            opts = []
            for mu in np.flatnonzero(np.abs(vectors[j]) > 1e-14):
                for k in range(m):
                    amp = a[k, photon_modes[j]] * vectors[j][mu]
                    if abs(amp) > 1e-16:
                        opts.append(((k, int(mu)), amp))
            options.append(opts)

        raw: dict[tuple, complex] = {}
        for choice in itertools.product(*options):
            amp = 1 + 0j
            for _, x in choice:
                amp *= x
            key = tuple(sorted(c for c, _ in choice))
            raw[key] = raw.get(key, 0 + 0j) + amp

        amplitudes = {}
        for key, w_amp in raw.items():
            counts: dict[tuple, int] = {}
            for c in key:
                counts[c] = counts.get(c, 0) + 1
            fact = 1.0
            for cnt in counts.values():
                fact *= math.factorial(cnt)
            amp = w_amp * math.sqrt(fact) / math.sqrt(norm_sq)
            if abs(amp) > 1e-16:
                amplitudes[key] = amp
        branches.append(_Branch(weight=weight, amplitudes=amplitudes))
    return OracleResult(
        mode_count=m,
        internal_dim=d,
        input_occupation=ensemble.input_modes,
        branches=tuple(branches),
    )


def conditional_state_mixture(
    U, ensemble: PhotonEnsemble, measured_modes, pattern, output_mode: int
) -> tuple[float, InternalState | None]:
    """Heralded conditional state via the canonical mixture route.

    Independent of the oracle: herald probabilities come from permanent-based
    subset distributions, split combinatorially among the distinguishable
    classes of each good/bad branch. The conditional state is diagonal in the
    noise-level basis because measured photons with orthogonal internal
    content kill all cross-class coherence. Requires full herald coverage
    (measured modes plus the output mode exhaust all modes).
    """
    a = numerics.require_unitary(U, what="mode transformation")
    m = a.shape[0]
    if ensemble.model_tag != CANONICAL:
        raise ValueError("mixture conditioning is defined for the canonical model")
    if sorted(tuple(measured_modes) + (output_mode,)) != list(range(m)):
        raise ValueError("mixture conditioning needs full herald coverage")
    s_full = [0] * m
    for mm, cnt in zip(measured_modes, pattern):
        s_full[mm] = int(cnt)
    s_full[output_mode] = 1
    s_full = tuple(s_full)
    if sum(s_full) != ensemble.photon_count:
        raise ValueError("herald pattern plus survivor must account for every photon")

    photon_modes = ensemble.photon_mode_list()
    d = ensemble.internal_dim
    diag = np.zeros(d, dtype=float)

    for w, good, bad in canonical_branches(ensemble):
        # class list: (level carried by the class, size, per-outcome distribution)
        classes = []
        if good:
            occ = _occupation_of(good, photon_modes, m)
            classes.append((0, len(good), fock.output_distribution(a, occ, validate=False)))
        for j in bad:
            level = ensemble.noise_levels[j]
            classes.append((level, 1, _single_photon_distribution(a, photon_modes[j])))

        def splits(remaining, idx):
            if idx == len(classes):
                if all(c == 0 for c in remaining):
                    yield 1.0, None
                return
            level, size, dist = classes[idx]
            for t, p in dist.items():
                if p == 0.0 or sum(t) != size:
                    continue
                if any(tc > rc for tc, rc in zip(t, remaining)):
                    continue
                rest = tuple(rc - tc for rc, tc in zip(remaining, t))
                for sub_p, sub_level in splits(rest, idx + 1):
                    here = level if t[output_mode] == 1 else sub_level
                    yield p * sub_p, here

        for prob, level in splits(s_full, 0):
            diag[level] += w * prob

    total = float(diag.sum())
    if total <= 0.0:
        return 0.0, None
    return total, InternalState(np.diag(diag / total).astype(complex))
