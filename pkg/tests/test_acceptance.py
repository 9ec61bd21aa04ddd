"""The thirteen acceptance criteria, one test and one pass/fail line each.

Runs the full tier: every stated grid, trial count, and sweep ceiling.
The detail strings are printed so a failing run shows exactly which
quantity missed its tolerance.
"""

import pytest

from kinderlab import acceptance

_IDS = ["%02d-%s" % (idx, name) for idx, name, _ in acceptance.CRITERIA]


@pytest.mark.parametrize(
    "index,name", [(idx, name) for idx, name, _ in acceptance.CRITERIA], ids=_IDS
)
def test_criterion(index, name):
    result = acceptance.run_criterion(index, tier="full")
    line = "[criterion %02d] %s %s: %s" % (
        result.index,
        "PASS" if result.passed else "FAIL",
        result.name,
        result.detail,
    )
    print(line)
    assert result.passed, line
