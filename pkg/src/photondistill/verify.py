"""The acceptance checks behind ``photondistill verify-all`` and the test suite.

Each check returns a CheckResult; every claimed number is tied to an explicit
tolerance here, nothing is calibrated at runtime.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import circuits, distillation, fock, interference, mesh, numerics


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    elapsed_s: float


def _result(criterion, name, passed, detail, t0) -> CheckResult:
    return CheckResult(criterion, name, bool(passed), detail, round(time.time() - t0, 3))


def check_hom_limits() -> CheckResult:
    t0 = time.time()
    u = circuits.qft_matrix(2)
    p0 = interference.output_distribution_partial(u, interference.make_noisy_source(2, 0.0))[(1, 1)]
    p1 = interference.output_distribution_partial(u, interference.make_noisy_source(2, 1.0))[(1, 1)]
    ok = abs(p0) <= 1e-12 and abs(p1 - 0.5) <= 1e-12
    return _result(1, "hom-limits", ok, f"P(1,1|eps=0)={p0:.3e}, P(1,1|eps=1)={p1:.12f}", t0)


def check_zero_transmission_law() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    ok = True
    for m in (2, 3, 4, 5):
        rep = distillation.verify_suppression(m)
        worst = max(worst, rep.max_forbidden_probability)
        ok = ok and rep.suppressed
    rep4 = distillation.verify_suppression(4)
    uniform = fock.distinguishable_distribution(circuits.qft_matrix(4), (1, 1, 1, 1))
    p_dist = uniform[(1, 1, 1, 1)]
    ok = ok and rep4.distinguishable_violates and abs(p_dist - 3 / 32) <= 1e-12
    return _result(
        2,
        "zero-transmission-law",
        ok,
        f"max forbidden P={worst:.2e} (m<=5); distinguishable P(1,1,1,1|m=4)={p_dist:.6f}",
        t0,
    )


def check_fourier_slope() -> CheckResult:
    t0 = time.time()
    proto = distillation.protocol_fourier(4)
    herald = distillation.best_fourier_herald(4)
    fit = distillation.error_slope(proto, herald=herald)
    u = circuits.circuit_to_unitary(proto.circuit)
    cross = 0.0
    for eps, eps_out in zip(fit.epsilons, fit.epsilon_outs):
        _, state = interference.conditional_state_mixture(
            u, proto.ensemble(eps), herald.measured_modes, herald.pattern, herald.output_mode
        )
        target = np.zeros(state.dim)
        target[0] = 1.0
        cross = max(cross, abs(eps_out - (1.0 - state.fidelity(target))))
    ok = abs(fit.slope - 0.25) <= 0.02 and cross <= 1e-9
    return _result(
        3,
        "fourier-distillation-slope",
        ok,
        f"herald={herald.pattern}, slope={fit.slope:.4f} (want 0.25 +- 0.02), "
        f"oracle-vs-mixture |d(eps')|={cross:.2e}",
        t0,
    )


def check_visibility_identity() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    runs = []
    hom = distillation.protocol_cascaded_hom()
    for eps in (0.02, 0.1, 0.25):
        runs.append(distillation.run_heralded(hom.circuit, hom.ensemble(eps), hom.herald))
    fourier = distillation.protocol_fourier(4)
    for row in distillation.herald_table(fourier, 0.1):
        if not row.degenerate:
            worst = max(worst, abs(row.visibility_out - (1 - 0.1) * (1 - row.epsilon_out)))
    for out in runs:
        worst = max(
            worst, abs(out.visibility_out - (1 - out.epsilon_in) * (1 - out.epsilon_out))
        )
    ok = worst <= 1e-9
    return _result(4, "visibility-identity", ok, f"max |V' - (1-eps)(1-eps')| = {worst:.2e}", t0)


def check_cascaded_hom() -> CheckResult:
    t0 = time.time()
    proto = distillation.protocol_cascaded_hom()
    improved = True
    for eps in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3):
        out = distillation.run_heralded(proto.circuit, proto.ensemble(eps), proto.herald)
        improved = improved and out.epsilon_out < eps
    fit = distillation.error_slope(proto)
    ok = improved and abs(fit.slope - 0.5) <= 0.02
    return _result(
        5,
        "cascaded-hom-distillation",
        ok,
        f"strict improvement on (0, 0.3]: {improved}; slope={fit.slope:.4f} (want 0.5 +- 0.02)",
        t0,
    )


def check_component_counts() -> CheckResult:
    t0 = time.time()
    facts = []
    ok = True
    for n in (1, 2, 3, 4):
        m = 1 << n
        qfft_pairs = circuits.component_report(circuits.cooley_tukey_qfft(n)).pairs
        clem_pairs = circuits.component_report(
            circuits.clements_decompose(circuits.qft_matrix(m))
        ).pairs
        ok = ok and qfft_pairs == n * 2 ** (n - 1) and clem_pairs == 2 ** (n - 1) * (2**n - 1)
        if n >= 2:
            ok = ok and qfft_pairs < clem_pairs
        facts.append(f"n={n}: qfft={qfft_pairs} generic={clem_pairs}")
    reck4 = circuits.component_report(circuits.reck_decompose(circuits.qft_matrix(4))).pairs
    reck8 = circuits.component_report(circuits.reck_decompose(circuits.qft_matrix(8))).pairs
    ok = ok and reck4 == 6 and reck8 == 28
    return _result(6, "component-counts", ok, "; ".join(facts), t0)


def check_decomposition_roundtrips() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    for m in range(2, 9):
        for trial in range(50):
            u = numerics.random_unitary(m, 1000 * m + trial)
            for engine in (circuits.reck_decompose, circuits.clements_decompose):
                v = circuits.circuit_to_unitary(engine(u))
                worst = max(worst, float(np.max(np.abs(u - v))))
    qfft_worst = 0.0
    for n in (1, 2, 3, 4):
        c = circuits.cooley_tukey_qfft(n)
        u = circuits.circuit_to_unitary(c) @ circuits.permutation_matrix(c.input_permutation)
        qfft_worst = max(
            qfft_worst,
            float(
                np.max(
                    np.abs(
                        numerics.normalize_global_phase(u)
                        - numerics.normalize_global_phase(circuits.qft_matrix(1 << n))
                    )
                )
            ),
        )
    ok = worst <= 1e-8 and qfft_worst <= 1e-10
    return _result(
        7,
        "decomposition-roundtrips",
        ok,
        f"max reconstruction error={worst:.2e} (50 Haar x m=2..8); qfft error={qfft_worst:.2e}",
        t0,
    )


def check_mesh_depths() -> CheckResult:
    t0 = time.time()
    hom = distillation.protocol_cascaded_hom()
    tree = distillation.protocol_tree()
    depths = {}
    for label, circ in (("hom", hom.circuit), ("tree", tree.circuit)):
        lattice = mesh.recommended_mesh(circ)
        for strategy in (mesh.FEED_FORWARD, mesh.RECIRCULATING):
            placement = mesh.place_circuit(circ, lattice, strategy)
            depths[(label, strategy)] = mesh.placement_metrics(placement).optical_depth
    ok = (
        depths[("hom", mesh.FEED_FORWARD)] == 2
        and depths[("hom", mesh.RECIRCULATING)] == 1
        and depths[("tree", mesh.FEED_FORWARD)] == 3
        and depths[("tree", mesh.RECIRCULATING)] <= 2
    )
    return _result(
        8,
        "mesh-depth-claims",
        ok,
        f"hom ff/rc={depths[('hom', mesh.FEED_FORWARD)]}/{depths[('hom', mesh.RECIRCULATING)]}; "
        f"tree ff/rc={depths[('tree', mesh.FEED_FORWARD)]}/{depths[('tree', mesh.RECIRCULATING)]}",
        t0,
    )


def oracle_fixture_suite():
    """(label, unitary, ensemble) cases spanning n <= 4, m <= 6, both models."""
    cases = []
    for m, n, eps, seed in (
        (2, 2, 0.0, 1), (2, 2, 0.3, 2), (2, 2, 1.0, 3),
        (3, 2, 0.15, 4), (3, 3, 0.5, 5), (3, 3, 0.05, 6),
        (4, 3, 0.25, 7), (4, 4, 0.1, 8), (4, 4, 0.9, 9),
        (5, 3, 0.4, 10), (5, 4, 0.2, 11),
        (6, 3, 0.35, 12), (6, 4, 0.6, 13),
    ):
        occ = [0] * m
        for j in range(n):
            occ[j % m] += 1
        u = numerics.random_unitary(m, seed)
        cases.append(
            (f"haar-m{m}-n{n}", u, interference.make_noisy_source(n, eps, tuple(occ)))
        )
    for m in (2, 3, 4):
        cases.append(
            (f"qft{m}", circuits.qft_matrix(m), interference.make_noisy_source(m, 0.2))
        )
    # bunched input: two photons sharing a mode
    cases.append(
        ("bunched", numerics.random_unitary(3, 20), interference.make_noisy_source(3, 0.3, (2, 1, 0)))
    )
    # explicit pure-state ensembles with nontrivial Gram structure
    v0 = np.array([1.0, 0.0, 0.0])
    v1 = np.array([np.sqrt(0.6), np.sqrt(0.4), 0.0])
    v2 = np.array([np.sqrt(0.5), 0.0, np.sqrt(0.5)])
    cases.append(("explicit-pure-3", numerics.random_unitary(3, 21),
                  interference.explicit_ensemble([v0, v1, v2], (1, 1, 1))))
    cases.append(("explicit-pure-2", numerics.random_unitary(4, 22),
                  interference.explicit_ensemble([v0, v1], (1, 0, 1, 0))))
    # explicit mixed states
    rho = 0.7 * np.outer(v0, v0) + 0.3 * np.outer(v2, v2.conj())
    cases.append(("explicit-mixed", numerics.random_unitary(3, 23),
                  interference.explicit_ensemble([rho, np.outer(v1, v1.conj())], (1, 1, 0))))
    cases.append(("qft4-high-eps", circuits.qft_matrix(4), interference.make_noisy_source(4, 0.75)))
    cases.append(("qft2-bunched", circuits.qft_matrix(2), interference.make_noisy_source(2, 0.5, (2, 0))))
    return cases


def check_oracle_equivalence() -> CheckResult:
    t0 = time.time()
    cases = oracle_fixture_suite()
    worst = 0.0
    for _label, u, ens in cases:
        direct = interference.output_distribution_partial(u, ens)
        oracle = interference.brute_force_oracle(u, ens).spatial_distribution()
        worst = max(worst, max(abs(direct[s] - oracle[s]) for s in direct))
    ok = worst <= 1e-9 and len(cases) >= 20
    return _result(
        9, "oracle-equivalence", ok, f"{len(cases)} fixtures, max |dP| = {worst:.2e}", t0
    )


def check_probability_hygiene() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    for _label, u, ens in oracle_fixture_suite():
        total = sum(interference.output_distribution_partial(u, ens).values())
        worst = max(worst, abs(total - 1.0))
    for m in (2, 3, 4):
        total = sum(fock.output_distribution(circuits.qft_matrix(m), (1,) * m).values())
        worst = max(worst, abs(total - 1.0))
    for eps in (0.05, 0.2):
        herald_p, rest = distillation.herald_probability_accounting(
            distillation.protocol_fourier(4), eps
        )
        worst = max(worst, abs(herald_p + rest - 1.0))
    ok = worst <= 1e-9
    return _result(10, "probability-hygiene", ok, f"max |sum - 1| = {worst:.2e}", t0)


ALL_CHECKS = (
    check_hom_limits,
    check_zero_transmission_law,
    check_fourier_slope,
    check_visibility_identity,
    check_cascaded_hom,
    check_component_counts,
    check_decomposition_roundtrips,
    check_mesh_depths,
    check_oracle_equivalence,
    check_probability_hygiene,
)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
