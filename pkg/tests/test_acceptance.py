"""One test per acceptance criterion; each prints a single pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summaries and
the per-check measurements.
"""

import pytest

from sadic.verify import TARGETS, run_target


@pytest.mark.parametrize("target", list(TARGETS), ids=lambda t: f"{TARGETS[t].criterion:02d}-{t}")
def test_criterion(target):
    result = run_target(target)
    print()
    print(result.summary())
    for check in result.checks:
        row = check.row()
        print(f"    {'ok ' if check.passed else 'BAD'} {row['check']}: {row['claim']} | measured {row['measured']}")
    assert result.checks, "suite recorded no checks"
    assert result.passed, result.summary()
