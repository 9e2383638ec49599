"""One line per acceptance criterion, printed as each suite finishes.

The lines bypass output capture, so a plain ``pytest -v`` run shows them
next to the test ids.
"""

import pytest

from stonezr.suites import SUITES, run_suite

ORDER = ["duality", "episurj", "polyt", "ultrafilters", "zr-q", "zr-f2", "valuative", "nagata", "zr-laws", "pq"]


def test_every_suite_is_listed():
    assert sorted(ORDER) == sorted(SUITES)


@pytest.mark.parametrize("name", ORDER)
def test_criterion(name, capsys):
    result = run_suite(name, seed=0)
    counts = ", ".join(f"{k}={v}" for k, v in sorted(result.counts.items()))
    status = "PASS" if result.passed else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {result.criterion:>2} {status}: {result.name} [{result.method}] ({counts}) in {result.runtime:.2f}s")
    assert result.passed, result.failures[:5]
