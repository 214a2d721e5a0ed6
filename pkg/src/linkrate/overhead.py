"""Record probabilities, bound sequences and the entropy rate of the message process.

The message ``M_t`` counts the open links a node believes extend to its
right.  Its entropy rate is bracketed by a lower sequence ``L_j`` and an
upper sequence ``U_j`` which meet exponentially fast in ``j``.  Both are
driven by the record probabilities

    p_j = P[M_t > max(M_{t-1}, ..., M_{t-j})],   p_0 = 1,

through their differences ``r_j = p_{j-1} - p_j``, which are computed
from a renewal-type recursion over levels ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import ConsistencyError, NumericalInstabilityError, ParameterError
from .link import LinkParams, jstep, step_information_nats

#: Intermediate r_j^(m) below this value trips the cancellation guard.
GUARD = -1e-10
DEFAULT_TOL = 1e-12
DEFAULT_M_CAP = 200_000


def _check_pos_int(name, v, minimum=1):
    if isinstance(v, bool) or int(v) != v or v < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {v!r}")
    return int(v)


def _dbar(params: LinkParams, jmax: int) -> np.ndarray:
    """``[1, 1 - d_1, ..., 1 - d_jmax]``; index 0 is the zero-step kernel."""
    out = np.ones(jmax + 1)
    for k in range(1, jmax + 1):
        out[k] = 1.0 - jstep(params, k).d_j
    return out


def _compensated_colsum(a: np.ndarray) -> np.ndarray:
    """Sum over axis 0 with pairwise error-free transforms (TwoSum)."""
    err = np.zeros(a.shape[1:])
    while a.shape[0] > 1:
        if a.shape[0] % 2:
            a = np.concatenate([a, np.zeros((1,) + a.shape[1:])])
        x, y = a[0::2], a[1::2]
        s = x + y
        bp = s - x
        err += ((x - (s - bp)) + (y - bp)).sum(axis=0)
        a = s
    return a[0] + err


def _rjm_columns_double(dbar: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Unclamped r_j^(m) for j = 1..len(dbar)-1 and the levels `ms`, shape (J+1, len(ms))."""
    jmax = len(dbar) - 1
    q = np.power(dbar[:, None], ms[None, :].astype(float))
    r = np.zeros((jmax + 1, len(ms)))
    for j in range(1, jmax + 1):
        if j == 1:
            r[1] = q[1]
            continue
        terms = q[j - 1 : 0 : -1] * r[1:j]
        r[j] = q[j] - _compensated_colsum(terms)
    return r


def _rjm_column_mp(dbar: np.ndarray, m: int, dps: int = 50) -> np.ndarray:
    """Single level `m` in extended precision; used when the double pass trips the guard."""
    jmax = len(dbar) - 1
    with mpmath.workdps(dps):
        q = [mpmath.mpf(float(b)) ** m for b in dbar]
        r = [mpmath.mpf(0)] * (jmax + 1)
        for j in range(1, jmax + 1):
            r[j] = q[j] - mpmath.fsum(q[j - i] * r[i] for i in range(1, j))
        return np.array([float(x) for x in r])


def _fill_levels(params: LinkParams, jmax: int, ms: np.ndarray) -> np.ndarray:
    dbar = _dbar(params, jmax)
    r = _rjm_columns_double(dbar, ms)
    bad = np.nonzero((r[1:] < GUARD).any(axis=0))[0]
    for col in bad:
        r[:, col] = _rjm_column_mp(dbar, int(ms[col]))
    if (r[1:] < GUARD).any():
        j, col = np.argwhere(r[1:] < GUARD)[0]
        raise NumericalInstabilityError(
            f"r_j^(m) cancellation at u={params.u!r}, d={params.d!r}, "
            f"j={j + 1}, m={int(ms[col])}: value {r[j + 1, col]:.3e}"
        )
    # level 0 is fixed by convention, not by the recursion
    zero = ms == 0
    if zero.any():
        r[:, zero] = 0.0
        r[1, zero] = 1.0
    return np.clip(r, 0.0, 1.0)


def rj_m(params: LinkParams, j: int, m: int) -> float:
    """Level coefficient ``r_j^(m)``; ``r_1^(m) = (1-d)^m`` and ``r_j^(0) = [j == 1]``."""
    j = _check_pos_int("j", j)
    m = _check_pos_int("m", m, minimum=0)
    return float(_fill_levels(params, j, np.array([m]))[j, 0])


def truncation_level(U: float, tol: float, m_cap: int = DEFAULT_M_CAP) -> int:
    """Smallest ``m_max`` whose dropped tail ``U**(m_max+1)`` is below `tol`."""
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol!r}")
    if tol >= 1.0:
        return 0
    m = max(int(math.ceil(math.log(tol) / math.log(U))) - 1, 0)
    while U ** (m + 1) >= tol:
        m += 1
    if m > m_cap:
        raise ParameterError(
            f"U={U:.12g} needs {m} levels to reach tol={tol:g}; cap is {m_cap}"
        )
    return m


class RjEntry(NamedTuple):
    r: float
    m_used: int
    residual: float


@dataclass(frozen=True)
class RjTable:
    """``r[j-1] = r_j`` for j = 1..max_j and ``p[j] = p_j`` for j = 0..max_j."""

    params: LinkParams
    max_j: int
    tol: float
    r: np.ndarray
    p: np.ndarray
    m_truncation: np.ndarray
    residual: np.ndarray
    levels: np.ndarray = field(repr=False)

    def entry(self, j: int) -> RjEntry:
        return RjEntry(float(self.r[j - 1]), int(self.m_truncation[j - 1]), float(self.residual[j - 1]))


def _readonly(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=256)
def _table(u: float, d: float, max_j: int, tol: float) -> RjTable:
    params = LinkParams(u, d)
    U, D = params.U, params.D
    m_max = truncation_level(U, tol)
    ms = np.arange(m_max + 1)
    levels = _fill_levels(params, max_j, ms)
    w = D * np.power(U, ms.astype(float))
    r = np.array([math.fsum(levels[j] * w) for j in range(1, max_j + 1)])
    p = np.empty(max_j + 1)
    p[0] = 1.0
    for j in range(1, max_j + 1):
        p[j] = min(max(math.fsum([1.0] + [-x for x in r[:j]]), 0.0), 1.0)
    residual = np.full(max_j, U ** (m_max + 1))
    return RjTable(
        params=params,
        max_j=max_j,
        tol=tol,
        r=_readonly(r),
        p=_readonly(p),
        m_truncation=_readonly(np.full(max_j, m_max)),
        residual=_readonly(residual),
        levels=_readonly(levels),
    )


def rj_table(params: LinkParams, max_j: int, tol: float = DEFAULT_TOL) -> RjTable:
    """Coefficients r_1..r_max_j and record probabilities p_0..p_max_j (memoized)."""
    max_j = _check_pos_int("max_j", max_j)
    t = _table(params.u, params.d, max_j, float(tol))
    if t.params != params:
        t = RjTable(params, t.max_j, t.tol, t.r, t.p, t.m_truncation, t.residual, t.levels)
    return t


def rj(params: LinkParams, j: int, tol: float = DEFAULT_TOL) -> RjEntry:
    """``r_j = D * sum_m r_j^(m) U^m`` truncated where the geometric tail drops below `tol`."""
    j = _check_pos_int("j", j)
    return rj_table(params, j, tol).entry(j)


def rj_closed_form(params: LinkParams, j: int) -> float:
    """Geometric-series closed forms for r_1, r_2, r_3."""
    if j not in (1, 2, 3):
        raise ParameterError(f"closed form available only for j in {{1, 2, 3}}, got {j!r}")
    U, D = params.U, params.D
    b1 = 1.0 - params.d
    if j == 1:
        return D / (1.0 - b1 * U)
    b2 = 1.0 - jstep(params, 2).d_j
    if j == 2:
        return D * (1.0 / (1.0 - b2 * U) - 1.0 / (1.0 - b1 * b1 * U))
    b3 = 1.0 - jstep(params, 3).d_j
    return D * (
        1.0 / (1.0 - b3 * U) - 2.0 / (1.0 - b1 * b2 * U) + 1.0 / (1.0 - b1**3 * U)
    )


@dataclass(frozen=True)
class BoundsSequence:
    """Lower and upper bounds on the message entropy rate, indexed by ``j = 1..max_j``.

    ``L[j-1]``, ``Ub[j-1]`` and ``gap[j-1]`` belong to history length ``j``.
    ``gap`` is evaluated from its own closed expression, not as ``Ub - L``.
    """

    params: LinkParams
    L: np.ndarray
    Ub: np.ndarray
    gap: np.ndarray
    table: RjTable = field(repr=False)
    rate_terms: np.ndarray = field(repr=False)

    @property
    def max_j(self) -> int:
        return len(self.L)

    @property
    def j(self) -> np.ndarray:
        return np.arange(1, self.max_j + 1)


def bounds(params: LinkParams, j_max: int, tol: float = DEFAULT_TOL) -> BoundsSequence:
    """Run the bound recursion up to history length `j_max`."""
    j_max = _check_pos_int("j_max", j_max)
    table = rj_table(params, j_max, tol)
    D = params.D
    js = np.arange(1, j_max + 1)
    info = step_information_nats(params, js)           # I_j = h(U) - H(X^(j))
    h_u = float(np.sum(_entr2(params.U)))
    rates = h_u - info                                  # H(X^(j)) in nats
    p = table.p

    L = np.empty(j_max)
    Ub = np.empty(j_max)
    L[0] = rates[0] / D
    Ub[0] = h_u / D
    for k in range(1, j_max):
        # k is the 0-based index of j+1, i.e. j = k
        L[k] = L[k - 1] + (p[k] / D) * (info[k - 1] - info[k])
        Ub[k] = L[k - 1] + (p[k] / D) * info[k - 1]
    gap = (p[:-1] / D) * info

    f = params.factor
    L, Ub, gap = L * f, Ub * f, gap * f
    scale = max(1.0, float(Ub[0]))
    if np.max(np.abs((Ub - L) - gap)) > 1e-12 * scale:
        raise ConsistencyError("bound gap disagrees with U_j - L_j")
    return BoundsSequence(
        params=params,
        L=_readonly(L),
        Ub=_readonly(Ub),
        gap=_readonly(gap),
        table=table,
        rate_terms=_readonly(rates * f),
    )


def _entr2(p):
    from scipy.special import entr

    return entr(p) + entr(1.0 - p)


class RateEstimate(NamedTuple):
    value: float
    half_width: float
    j_used: int
    converged: bool


def unrolled_lower_bound(b: BoundsSequence, j: int) -> float:
    """``L_j`` from the closed sum ``(1/D)[sum_{i<=j} r_i H(X^(i)) + p_j H(X^(j))]``."""
    r = b.table.r[:j]
    h = b.rate_terms[:j]
    return (math.fsum(r * h) + b.table.p[j] * h[-1]) / b.params.D


def entropy_rate(
    params: LinkParams,
    target_halfwidth: float = 1e-10,
    j_cap: int = 1000,
    tol: float = DEFAULT_TOL,
) -> RateEstimate:
    """Bracket the message entropy rate to within ``target_halfwidth``.

    Bounds are grown by doubling until ``U_j - L_j < 2 * target_halfwidth`` or
    ``j_cap`` is reached; the returned value is the bracket midpoint.
    """
    if not target_halfwidth > 0:
        raise ParameterError(f"target_halfwidth must be positive, got {target_halfwidth!r}")
    j_cap = _check_pos_int("j_cap", j_cap)
    j_max = min(32, j_cap)
    while True:
        b = bounds(params, j_max, tol)
        hit = np.nonzero(b.gap < 2.0 * target_halfwidth)[0]
        if hit.size or j_max == j_cap:
            break
        j_max = min(2 * j_max, j_cap)
    converged = bool(hit.size)
    j = int(hit[0]) + 1 if converged else j_max
    lo, hi = float(b.L[j - 1]), float(b.Ub[j - 1])
    check = unrolled_lower_bound(b, j)
    if abs(check - lo) > 1e-10 * max(1.0, abs(lo)):
        raise ConsistencyError(
            f"unrolled series {check!r} disagrees with recursion {lo!r} at j={j}"
        )
    return RateEstimate(0.5 * (lo + hi), 0.5 * float(b.gap[j - 1]), j, converged)


class ConvergenceFit(NamedTuple):
    slope: float
    c_fit: float
    exact: bool


def convergence_fit(b: BoundsSequence, j_lo: int = 4, j_hi: int = 40) -> ConvergenceFit:
    """Least-squares slope of ``log gap_j`` against ``j`` over ``[j_lo, j_hi]``.

    ``c_fit`` is the smallest ``C`` with ``gap_j <= C |lam|**j`` on the range.
    When every gap vanishes (``u + d = 1``) the fit is replaced by
    ``ConvergenceFit(-inf, 0.0, exact=True)``.
    """
    scale = max(1.0, float(b.Ub[0]))
    if np.all(b.gap <= 1e-14 * scale):
        return ConvergenceFit(-math.inf, 0.0, True)
    j = b.j
    sel = (j >= j_lo) & (j <= j_hi)
    g = b.gap[sel]
    js = j[sel]
    ok = g > 0
    if ok.sum() < 8:
        raise ParameterError(
            f"need at least 8 positive gaps in j in [{j_lo}, {j_hi}], have {int(ok.sum())}"
        )
    slope, _ = np.polyfit(js[ok], np.log(g[ok]), 1)
    lam = abs(b.params.lam)
    c_fit = float(np.max(g[ok] / lam ** js[ok].astype(float)))
    return ConvergenceFit(float(slope), c_fit, False)
