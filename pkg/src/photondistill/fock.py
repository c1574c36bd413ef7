"""Fock-space bookkeeping for fully indistinguishable photons.

Occupation vectors are plain tuples of non-negative ints, one entry per
spatial mode. Transition amplitudes follow the permanent rule: the amplitude
from input occupation r to output occupation s under mode unitary U is

    perm(U[s, r]) / sqrt(prod r_i! * prod s_j!)

where U[s, r] repeats row j of U s_j times and column i r_i times.
"""

from __future__ import annotations

import math

import numpy as np

from . import numerics
from .errors import DimensionError, PhotonConservationError

# Direct factorial products are exact below this; larger photon numbers go
# through log-space to dodge overflow.
_LOG_FACTORIAL_CUTOFF = 12


def check_occupation(occ, mode_count: int | None = None) -> tuple[int, ...]:
    t = tuple(int(x) for x in occ)
    if len(t) < 1:
        raise DimensionError("occupation vector needs at least one mode")
    if any(x < 0 for x in t):
        raise DimensionError(f"occupation vector has a negative count: {t}")
    if mode_count is not None and len(t) != mode_count:
        raise DimensionError(f"occupation vector has {len(t)} modes, expected {mode_count}")
    return t


def enumerate_outcomes(m: int, n: int) -> list[tuple[int, ...]]:
    """All occupation vectors of n photons over m modes.

    Ordered with the first mode's count decreasing, i.e. (n,0,...) first and
    (...,0,n) last; C(n+m-1, n) entries total.
    """
    if m < 1:
        raise DimensionError(f"mode count must be >= 1, got {m}")
    if n < 0:
        raise DimensionError(f"photon number must be >= 0, got {n}")
    if m == 1:
        return [(n,)]
    out = []
    for first in range(n, -1, -1):
        for rest in enumerate_outcomes(m - 1, n - first):
            out.append((first,) + rest)
    return out


def mode_list(occ) -> list[int]:
    """Expand an occupation vector into a per-photon list of mode indices."""
    modes = []
    for i, c in enumerate(occ):
        modes.extend([i] * c)
    return modes


def _factorial_prefactor(r, s) -> float:
    n = sum(r)
    if n <= _LOG_FACTORIAL_CUTOFF:
        prod = 1
        for c in r:
            prod *= math.factorial(c)
        for c in s:
            prod *= math.factorial(c)
        return math.sqrt(prod)
    log_sum = sum(math.lgamma(c + 1) for c in r) + sum(math.lgamma(c + 1) for c in s)
    return math.exp(0.5 * log_sum)


def transition_amplitude(U, r, s) -> complex:
    """Fock-space matrix element <s|U|r> for indistinguishable photons."""
    a = numerics.as_complex_matrix(U)
    m = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionError("mode unitary must be square")
    r = check_occupation(r, m)
    s = check_occupation(s, m)
    if sum(r) != sum(s):
        raise PhotonConservationError(f"photon number mismatch: sum(r)={sum(r)}, sum(s)={sum(s)}")
    if sum(r) == 0:
        return 1 + 0j
    rows = mode_list(s)
    cols = mode_list(r)
    sub = a[np.ix_(rows, cols)]
    return numerics.permanent(sub) / _factorial_prefactor(r, s)


def output_distribution(U, r, validate: bool = True) -> dict[tuple[int, ...], float]:
    """Outcome probabilities for indistinguishable photons entering at occupation r.

    Keys run over enumerate_outcomes(m, n) in that order; values sum to 1
    within numerical error.
    """
    a = numerics.as_complex_matrix(U)
    if validate:
        numerics.require_unitary(a, what="mode transformation")
    m = a.shape[0]
    r = check_occupation(r, m)
    n = sum(r)
    dist = {}
    for s in enumerate_outcomes(m, n):
        amp = transition_amplitude(a, r, s)
        dist[s] = float(abs(amp) ** 2)
    return dist


def distinguishable_distribution(U, r) -> dict[tuple[int, ...], float]:
    """Outcome probabilities for fully distinguishable (classical) photons.

    Same permanent rule applied to the transmission matrix |U|^2:
    P(s) = perm(T[s, r]) / prod s_j!.
    """
    a = numerics.as_complex_matrix(U)
    m = a.shape[0]
    r = check_occupation(r, m)
    n = sum(r)
    t = np.abs(a) ** 2
    cols = mode_list(r)
    dist = {}
    for s in enumerate_outcomes(m, n):
        rows = mode_list(s)
        denom = 1
        for c in s:
            denom *= math.factorial(c)
        if n == 0:
            dist[s] = 1.0
            continue
        dist[s] = float(numerics.permanent(t[np.ix_(rows, cols)]).real) / denom
    return dist
