"""Cross-checks between the analytic recursion, the exact oracle and the simulator.

Each ``check_*`` function returns a :class:`Check`; :func:`run_checks`
collects them for a level (``fast`` or ``full``).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .link import LinkParams, link_entropy
from .overhead import DEFAULT_TOL, bounds, convergence_fit, entropy_rate, rj_closed_form, rj_table
from .simulate import SimConfig, empirical_pj, plugin_conditional_entropy, simulate_m_trace, simulate_spacetime

GRID = np.linspace(0.05, 0.95, 20)
RATE_POINTS = ((0.3, 0.1), (0.9, 0.9), (0.05, 0.05))
# grid points whose ten-link diagonal already captures the stationary law to < 1e-6
ORACLE_POINTS = tuple((GRID[i], GRID[k]) for i, k in ((0, 9), (2, 19), (4, 17), (6, 19), (5, 15)))
STATIONARY_POINTS = ((0.3, 0.1), (0.5, 0.5), (0.9, 0.2), (0.05, 0.95), (0.7, 0.7))


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.measured = float(self.measured)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: measured={self.measured:.3e} "
            f"tolerance={self.tolerance:.1e} ({self.seconds:.2f}s) {self.detail}".rstrip()
        )


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        c = fn(*args, **kwargs)
        c.seconds = time.perf_counter() - t0
        return c

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def grid_params():
    return [LinkParams(float(u), float(d)) for u in GRID for d in GRID]


@_timed
def check_exact_special_case(seed: int = 7, n: int = 10, tol: float = DEFAULT_TOL) -> Check:
    """u + d = 1: rate equals H(X_1)/D and every gap up to j = 40 vanishes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for u in rng.uniform(0.01, 0.99, n):
        p = LinkParams(float(u), float(1.0 - u))
        est = entropy_rate(p, tol=tol)
        b = bounds(p, 40, tol)
        worst = max(worst, abs(est.value - link_entropy(p) / p.D), float(np.max(np.abs(b.Ub - b.L))))
    return Check("exact special case u+d=1", worst <= 1e-12, worst, 1e-12)


@_timed
def check_closed_forms(tol: float = DEFAULT_TOL) -> Check:
    """r_1, r_2, r_3 from the recursion against their closed forms on the grid."""
    worst = 0.0
    where = ""
    for p in grid_params():
        r = rj_table(p, 3, tol).r
        for j in (1, 2, 3):
            e = abs(r[j - 1] - rj_closed_form(p, j))
            if e > worst:
                worst, where = e, f"worst at u={p.u:.4f} d={p.d:.4f} j={j}"
    return Check("closed-form r_1..r_3", worst <= 1e-10, worst, 1e-10, where)


@_timed
def check_bracketing(j_max: int = 40, tol: float = DEFAULT_TOL) -> Check:
    """L nondecreasing, U non-increasing and L <= U for j <= j_max over the grid."""
    worst = 0.0
    for p in grid_params():
        b = bounds(p, j_max + 1, tol)
        L, U = b.L, b.Ub
        viol = max(
            float(np.max(L[:-1] - L[1:])),
            float(np.max(U[1:] - U[:-1])),
            float(np.max(L[:j_max] - U[:j_max])),
        )
        worst = max(worst, viol)
    return Check("bound bracketing and monotonicity", worst <= 1e-12, worst, 1e-12)


@_timed
def check_convergence_rate(tol: float = DEFAULT_TOL) -> Check:
    """Fitted log-gap slope over j in [4, 40] is at most log|1-u-d| + 0.05."""
    worst = -math.inf
    parts = []
    for u, d in RATE_POINTS:
        p = LinkParams(u, d)
        fit = convergence_fit(bounds(p, 40, tol))
        excess = fit.slope - math.log(abs(p.lam))
        worst = max(worst, excess)
        parts.append(f"({u},{d}): slope={fit.slope:.4f} log|lam|={math.log(abs(p.lam)):.4f}")
    return Check("gap decay rate", worst <= 0.05, worst, 0.05, "; ".join(parts))


@_timed
def check_oracle_agreement(points=ORACLE_POINTS, t_entropy: int = 10, tol: float = DEFAULT_TOL) -> Check:
    """Finite-t oracle record probabilities and conditional entropies against the recursion."""
    pj_err = 0.0
    bracket = -math.inf
    for u, d in points:
        p = LinkParams(float(u), float(d))
        b = bounds(p, 4, tol)
        for j in (1, 2, 3):
            pj_err = max(pj_err, abs(oracle.oracle_pj(p, j + 7, j) - b.table.p[j]))
            lo, hi = b.L[j - 1], b.Ub[j - 1]
            for v in (
                oracle.oracle_conditional_entropy(p, t_entropy, j),
                oracle.oracle_conditional_entropy_given_Z(p, t_entropy, j),
            ):
                bracket = max(bracket, lo - v, v - hi)
    ok = pj_err <= 1e-6 and bracket <= 1e-4
    return Check(
        "oracle vs recursion",
        ok,
        pj_err,
        1e-6,
        f"max bracket excursion {bracket:.3e} (tolerance 1e-4)",
    )


@_timed
def check_stationary_pmf(points=STATIONARY_POINTS, t_max: int = 10) -> Check:
    """Exact P[M_t = m] = D U^m whenever t > m."""
    worst = 0.0
    for u, d in points:
        p = LinkParams(u, d)
        for t in range(1, t_max + 1):
            pmf = oracle.oracle_joint(p, t, 1).pmf
            for m in range(t):
                worst = max(worst, abs(pmf.get((m,), 0.0) - p.D * p.U**m))
    return Check("stationary law of M", worst <= 1e-12, worst, 1e-12)


@_timed
def check_dual_paths(seed: int = 11) -> Check:
    """Diagonal vs space-time simulation, and DP oracle vs triangle enumeration."""
    mismatches = 0
    for u, d in ((0.3, 0.1), (0.5, 0.5), (0.8, 0.6)):
        c = SimConfig(LinkParams(u, d), horizon=100, depth=100, burn_in=0, seed=seed, replicas=2)
        a, b = simulate_m_trace(c), simulate_spacetime(c)
        mismatches += sum(int(np.sum(x != y)) for x, y in zip(a.traces, b.traces))
    worst = 0.0
    for u, d in ((0.3, 0.1), (0.5, 0.5), (0.8, 0.6)):
        p = LinkParams(u, d)
        for t in range(1, 7):
            for j in range(1, min(t, 3) + 1):
                dp = oracle.oracle_joint(p, t, j).pmf
                en = oracle.enumerate_triangle(p, t, j)
                for k in set(dp) | set(en):
                    worst = max(worst, abs(dp.get(k, 0.0) - en.get(k, 0.0)))
            for j in range(1, min(t - 1, 3) + 1):
                dp = oracle.oracle_joint_given_Z(p, t, j)
                en = oracle.enumerate_triangle(p, t, j, condition_on_diagonal=True)
                for k in set(dp) | set(en):
                    worst = max(worst, abs(dp.get(k, 0.0) - en.get(k, 0.0)))
    ok = mismatches == 0 and worst <= 1e-12
    return Check("dual-path equality", ok, worst, 1e-12, f"trace mismatches={mismatches}")


@_timed
def check_monte_carlo(steps: int = 10**7, seed: int = 2026, u: float = 0.3, d: float = 0.1) -> Check:
    """Simulated p_1..p_5 and plug-in H(M_t | M_{t-1}) against the analytic values."""
    p = LinkParams(u, d)
    b = bounds(p, 6)
    tr = simulate_m_trace(SimConfig(p, horizon=steps + 100, burn_in=100, seed=seed))
    zs = []
    for j in range(1, 6):
        e = empirical_pj(tr, j)
        zs.append(abs(e.value - b.table.p[j]) / e.stderr)
    h = plugin_conditional_entropy(tr, 2)
    delta = 3 * h.stderr + h.bias_bound
    inside = b.L[1] - delta <= h.value <= b.Ub[1] + delta
    worst = max(zs)
    return Check(
        "Monte Carlo consistency",
        worst <= 3.0 and inside,
        worst,
        3.0,
        f"plug-in H2={h.value:.5f} in [{b.L[1] - delta:.5f}, {b.Ub[1] + delta:.5f}]: {inside}",
    )


def run_checks(level: str = "fast", tol: float = DEFAULT_TOL, seed: int = 2026, steps: int = 10**7):
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    out = [
        check_exact_special_case(tol=tol),
        check_closed_forms(tol=tol),
        check_bracketing(tol=tol),
        check_convergence_rate(tol=tol),
        check_oracle_agreement(tol=tol),
        check_stationary_pmf(),
    ]
    if level == "full":
        out.append(check_dual_paths())
        out.append(check_monte_carlo(steps=steps, seed=seed))
    return out
