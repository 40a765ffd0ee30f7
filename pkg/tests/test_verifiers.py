"""Tests for the self-check registry."""

import time

import pytest

from shadowlab.verifiers import FAST_CHECKS, FULL_CHECKS, CheckResult, run_checks


class TestRegistry:
    """Check tables and result formatting."""

    def test_full_extends_fast(self):
        """The full table contains every fast check plus the slow ones."""
        fast_names = [name for name, _, _ in FAST_CHECKS]
        full_names = [name for name, _, _ in FULL_CHECKS]
        assert full_names[: len(fast_names)] == fast_names
        assert len(full_names) > len(fast_names)
        assert len(set(full_names)) == len(full_names)

    def test_line_format(self):
        """Result lines carry name, status, and residual."""
        r = CheckResult("demo", True, 1.25e-13)
        assert r.line() == "CHECK demo PASS max_residual=1.25e-13"
        r = CheckResult("demo", False, 0.5)
        assert r.line() == "CHECK demo FAIL max_residual=0.5"

    def test_unknown_level(self):
        """Only fast and full are valid levels."""
        with pytest.raises(ValueError, match="unknown level"):
            run_checks("paranoid")


class TestRuns:
    """Executing the suites."""

    def test_fast_all_pass_quickly(self):
        """Every fast check passes within its tolerance in a few seconds."""
        start = time.monotonic()
        results = run_checks("fast")
        elapsed = time.monotonic() - start
        assert elapsed < 10.0
        for r in results:
            assert r.passed, r.line()

    def test_full_all_pass(self):
        """The full suite, including Monte Carlo checks, passes at seed 0."""
        for r in run_checks("full"):
            assert r.passed, r.line()

    def test_deterministic(self):
        """Same seed, same residuals."""
        a = run_checks("fast", seed=3)
        b = run_checks("fast", seed=3)
        assert [(r.name, r.max_residual) for r in a] == [(r.name, r.max_residual) for r in b]
