"""Acceptance criteria at their stated tolerances, one test per criterion.

Each criterion prints a single PASS/FAIL line; the lines are repeated in
the terminal summary so they show up without ``-s``.
"""

import pytest

from finslercut.verification import CRITERIA, run_criterion

LINES = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = run_criterion(number)
    LINES[number] = res.line()
    print(LINES[number])
    failed = [f"{c.name}: {c.measured:.6g} {c.relation} {c.tolerance:.6g}" for c in res.checks if not c.passed]
    assert res.passed, "\n".join(failed)
