"""Acceptance criteria, one test each, at the stated tolerances and runtime limits.

Every test records a one-line PASS/FAIL verdict; the lines are printed in the
terminal summary (see conftest.py) and when the module is run as a script.
"""
import sys

import pytest

from linkrate import validation as v

VERDICTS = []

CRITERIA = [
    (1, "exact special case", v.check_exact_special_case, 1.0),
    (2, "closed-form coefficients", v.check_closed_forms, 5.0),
    (3, "bracketing", v.check_bracketing, 10.0),
    (4, "convergence rate", v.check_convergence_rate, 1.0),
    (5, "oracle equivalence", v.check_oracle_agreement, 120.0),
    (6, "stationary pmf", v.check_stationary_pmf, 30.0),
    (7, "Monte Carlo consistency", v.check_monte_carlo, 120.0),
    (8, "dual-path equality", v.check_dual_paths, None),
]


def evaluate(number, label, fn, limit):
    c = fn()
    in_time = limit is None or c.seconds < limit
    ok = c.passed and in_time
    budget = "no limit" if limit is None else f"limit {limit:g}s"
    line = (
        f"criterion {number} [{'PASS' if ok else 'FAIL'}] {label}: measured={c.measured:.3e} "
        f"tol={c.tolerance:.1e} time={c.seconds:.2f}s ({budget}) {c.detail}"
    ).rstrip()
    VERDICTS.append(line)
    print(line)
    return ok, c, in_time


@pytest.mark.parametrize("number,label,fn,limit", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, label, fn, limit):
    ok, c, in_time = evaluate(number, label, fn, limit)
    assert c.passed, c.line()
    assert in_time, f"{label} took {c.seconds:.2f}s, limit {limit}s"


if __name__ == "__main__":
    results = [evaluate(*row)[0] for row in CRITERIA]
    sys.exit(0 if all(results) else 1)
