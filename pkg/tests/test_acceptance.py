"""Acceptance criteria 1-9, one test each; every test prints its pass/fail line."""

from __future__ import annotations

import pytest

from bgls.verify import CHECKS, run_check


@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(number, capsys):
    res = run_check(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
