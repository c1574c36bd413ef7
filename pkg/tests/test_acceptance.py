"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runtime budgets are asserted where the criterion states one. Run with
``pytest tests/test_acceptance.py -v -s`` for the line-per-criterion output,
or use ``photondistill verify-all``.
"""

import pytest

from photondistill import verify


def _run(check, budget_s=None):
    result = check()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] criterion {result.criterion}: {result.name} "
          f"({result.elapsed_s}s) {result.detail}")
    assert result.passed, result.detail
    if budget_s is not None:
        assert result.elapsed_s < budget_s, (
            f"criterion {result.criterion} took {result.elapsed_s}s, budget {budget_s}s"
        )


def test_criterion_01_hom_limits():
    _run(verify.check_hom_limits, budget_s=1.0)


def test_criterion_02_zero_transmission_law():
    _run(verify.check_zero_transmission_law, budget_s=10.0)


def test_criterion_03_fourier_distillation_slope():
    _run(verify.check_fourier_slope, budget_s=60.0)


def test_criterion_04_visibility_identity():
    _run(verify.check_visibility_identity)


def test_criterion_05_cascaded_hom_distillation():
    _run(verify.check_cascaded_hom)


def test_criterion_06_component_counts():
    _run(verify.check_component_counts, budget_s=5.0)


def test_criterion_07_decomposition_roundtrips():
    _run(verify.check_decomposition_roundtrips, budget_s=60.0)


def test_criterion_08_mesh_depth_claims():
    _run(verify.check_mesh_depths, budget_s=5.0)


def test_criterion_09_oracle_equivalence():
    _run(verify.check_oracle_equivalence, budget_s=120.0)


def test_criterion_10_probability_hygiene():
    _run(verify.check_probability_hygiene)


def test_all_criteria_summary(capsys):
    results = verify.run_all()
    with capsys.disabled():
        print()
        for r in results:
            print(f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.criterion}: "
                  f"{r.name} ({r.elapsed_s}s)")
    assert all(r.passed for r in results)
