"""The thirteen acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary. The measured claims and notes behind a line are printed
underneath it.
"""
import pytest

from capax import acceptance

from .conftest import record_line

NUMBERS = sorted(c.number for c in acceptance.CRITERIA)


def test_all_thirteen_registered():
    assert NUMBERS == list(range(1, 14))


@pytest.mark.parametrize("number", NUMBERS, ids=[f"criterion_{n:02d}" for n in NUMBERS])
def test_criterion(number):
    res = acceptance.run_criterion(acceptance.get(number))
    line = res.line()
    print(line)
    print(acceptance.table([res]).split("\n", 1)[-1] if res.measurements or res.notes else "")
    record_line(number, line)
    assert res.passed, line
