"""Tests for fanreg.selftest."""

from __future__ import annotations

import pytest

from fanreg.algebra import AlgebraSpec
from fanreg.scalars import Backend
from fanreg.selftest import (
    CAUCHY_TOLERANCE,
    CHECKS,
    FLOAT_TOLERANCE,
    CheckResult,
    SelftestOptions,
    check_akbk,
    check_algebra_laws,
    check_cauchy,
    check_hat_extension,
    check_representation,
    run_selftest,
)

_NAMES = [
    "algebra_laws",
    "inner_products",
    "hat_extension",
    "tk_regularity",
    "lemma_bridge",
    "expansion",
    "negative_controls",
    "representation",
    "stems",
    "akbk",
    "cauchy",
    "identity_principle",
]


class TestOptions:
    def test_size(self) -> None:
        assert SelftestOptions(quick=True).size(200, 40) == 40
        assert SelftestOptions().size(200, 40) == 200

    def test_tolerance(self) -> None:
        assert SelftestOptions().tolerance is None
        assert SelftestOptions(Backend.FLOAT64).tolerance == FLOAT_TOLERANCE


class TestChecks:
    def test_registration_order(self) -> None:
        assert [c.__name__.removeprefix("check_") for c in CHECKS] == _NAMES

    def test_corrupted_algebra(self, H: AlgebraSpec) -> None:
        broken = AlgebraSpec(
            name="H*", dim=4, labels=H.labels, table=H.table, conj_signs=(1, 1, -1, -1)
        )
        (result,) = run_selftest(algebras=[broken], quick=True, checks=[check_algebra_laws])
        assert result.name == "algebra_laws"
        assert not result.passed
        assert result.detail.startswith("H*: antiautomorphism")

    def test_float_laws(self) -> None:
        (result,) = run_selftest(Backend.FLOAT64, quick=True, checks=[check_algebra_laws])
        assert result.passed
        assert result.tolerance == FLOAT_TOLERANCE

    def test_cauchy_tolerance(self) -> None:
        result = check_cauchy(SelftestOptions(quick=True))
        assert result.passed, result.detail
        assert result.tolerance == CAUCHY_TOLERANCE

    @pytest.mark.parametrize("check", [check_hat_extension, check_representation, check_akbk])
    def test_quick_checks(self, check: object) -> None:
        result = check(SelftestOptions(quick=True))  # type: ignore[operator]
        assert isinstance(result, CheckResult)
        assert result.passed, result.detail


class TestRunSelftest:
    def test_results_keep_order_on_a_pool(self) -> None:
        checks = [check_akbk, check_representation, check_algebra_laws]
        results = run_selftest(quick=True, workers=3, checks=checks)
        assert [r.name for r in results] == ["akbk", "representation", "algebra_laws"]
        assert all(r.seconds >= 0 for r in results)

    @pytest.mark.slow
    def test_quick_suite_passes(self) -> None:
        results = run_selftest(quick=True)
        assert [r.name for r in results] == _NAMES
        failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
        assert not failed
