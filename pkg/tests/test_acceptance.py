"""Acceptance gate: every shipped criterion must pass end to end.

Each criterion runs as its own case so a regression points at the exact
check that broke.  The details string carries the measured margins.
"""

import pytest

from harmonic_schwarz.acceptance import CRITERIA, run_suite


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion_passes(name):
    result = run_suite([name])[0]
    assert result.passed, f"{result.name}: {result.detail}"
