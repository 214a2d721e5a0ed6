"""Exact small-scale ground truth for the message process.

The links read by ``M_t`` sit on the space-time anti-diagonal; re-indexed
as ``Z_t(x) = X_{t+1-x}(x)`` they form a vector of ``t`` independent
two-state chains, and ``M_t`` is the number of leading ones of that vector.
A state of the diagonal at time ``t`` is stored as a ``t``-bit integer with
coordinate ``x`` in bit ``x - 1``.

Three independent routes are provided:

* a forward dynamic program over (diagonal state, recent messages),
* a brute-force enumeration of every link in the space-time triangle
  (``t <= 6``), evaluating ``M`` through its explicit product-sum form,
* limit (``t -> inf``) quantities that factorize over coordinates.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .errors import CapacityError, ParameterError
from .link import LinkParams

DEFAULT_BUDGET = 10**8
MAX_T = 12
MAX_WINDOW = 5


@dataclass(frozen=True)
class DiagonalState:
    """Truncated diagonal ``(Z_t(1), ..., Z_t(t))`` packed into an integer."""

    t: int
    bits: int

    def coordinate(self, x: int) -> int:
        if not 1 <= x <= self.t:
            raise IndexError(x)
        return (self.bits >> (x - 1)) & 1

    @property
    def leading_ones(self) -> int:
        n = 0
        while n < self.t and (self.bits >> n) & 1:
            n += 1
        return n


@dataclass(frozen=True)
class HistoryLaw:
    """Joint law of ``(M_t, M_{t-1}, ..., M_{t-window+1})``."""

    t: int
    window: int
    pmf: dict

    def total(self) -> float:
        return math.fsum(self.pmf.values())

    def marginal(self, keep: slice) -> dict:
        out = defaultdict(float)
        for k, v in self.pmf.items():
            out[k[keep]] += v
        return dict(out)

    def entropy(self, base: str = "bits") -> float:
        from .link import base_factor

        return _entropy_nats(self.pmf.values()) * base_factor(base)


def _entropy_nats(values) -> float:
    return math.fsum(entr(np.fromiter(values, float)))


def leading_ones(n: int) -> np.ndarray:
    """Leading-ones count of every ``n``-bit diagonal state."""
    z = np.arange(2**n)
    out = np.zeros(2**n, dtype=np.int64)
    alive = np.ones(2**n, dtype=bool)
    for k in range(n):
        alive &= ((z >> k) & 1).astype(bool)
        out += alive
    return out


def product_law(params: LinkParams, n: int) -> np.ndarray:
    """Stationary product probability of every ``n``-bit diagonal state."""
    z = np.arange(2**n)
    ones = np.zeros(2**n, dtype=np.int64)
    for k in range(n):
        ones += (z >> k) & 1
    return params.U**ones * params.D ** (n - ones)


def _advance(block: np.ndarray, params: LinkParams) -> np.ndarray:
    """Step every coordinate once and append a fresh stationary coordinate.

    `block` has shape ``(B, 2**n)``; the result has shape ``(B, 2**(n+1))``.
    """
    u, d = params.u, params.d
    B, N = block.shape
    n = N.bit_length() - 1
    out = block
    for k in range(n):
        v = out.reshape(B, N >> (k + 1), 2, 1 << k)
        x0, x1 = v[:, :, 0, :], v[:, :, 1, :]
        out = np.stack([(1.0 - u) * x0 + d * x1, u * x0 + (1.0 - d) * x1], axis=2)
        out = out.reshape(B, N)
    return np.concatenate([params.D * out, params.U * out], axis=1)


def _check_args(t, j, need_label=False):
    if isinstance(t, bool) or int(t) != t or t < 1:
        raise ParameterError(f"t must be a positive integer, got {t!r}")
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise ParameterError(f"window must be a positive integer, got {j!r}")
    if t > MAX_T:
        raise ParameterError(f"t={t} exceeds the exact-oracle limit {MAX_T}")
    if j > MAX_WINDOW:
        raise ParameterError(f"window={j} exceeds the exact-oracle limit {MAX_WINDOW}")
    if need_label and j >= t:
        raise ParameterError(f"conditioning on the diagonal needs j < t (j={j}, t={t})")


def _budget_check(required: int, budget: int):
    if required > budget:
        raise CapacityError(
            f"exact computation needs about {required:.3g} weighted transitions, "
            f"budget is {budget:.3g}",
            required=required,
        )


def _run(params, start, t, keep, block):
    """Forward pass from time `start` to `t`.

    Returns a dict mapping the last `keep` messages before ``t`` (most recent
    first) to an array ``P[label, M_t]``.
    """
    states = {(): block}
    for tau in range(start, t):
        lo = leading_ones(tau)
        nxt = {}
        for hist, blk in states.items():
            if keep == 0:
                parts = [((), blk)]
            else:
                parts = []
                for m in np.unique(lo[blk.any(axis=0)]):
                    parts.append((((int(m),) + hist)[:keep], np.where(lo == m, blk, 0.0)))
            for key, sub in parts:
                adv = _advance(sub, params)
                if key in nxt:
                    nxt[key] += adv
                else:
                    nxt[key] = adv
        states = nxt
    lo = leading_ones(t)
    onehot = np.zeros((2**t, t + 1))
    onehot[np.arange(2**t), lo] = 1.0
    return {hist: blk @ onehot for hist, blk in states.items()}


def oracle_joint(params: LinkParams, t: int, j: int, budget: int = DEFAULT_BUDGET) -> HistoryLaw:
    """Exact law of the last `j` messages at time `t`, started from the stationary product law."""
    _check_args(t, j)
    _budget_check(2**t * (t + 1) ** (j - 1), budget)
    res = _run(params, 1, t, j - 1, np.array([[params.D, params.U]]))
    pmf = {}
    for hist, P in res.items():
        for m in np.nonzero(P[0])[0]:
            pmf[(int(m),) + hist] = float(P[0, m])
    return HistoryLaw(t, min(j, t), pmf)


def _cond_entropy_nats(res) -> float:
    joint = math.fsum(float(entr(P).sum()) for P in res.values())
    ctx = math.fsum(float(entr(P.sum(axis=1)).sum()) for P in res.values())
    return joint - ctx


def oracle_conditional_entropy(
    params: LinkParams, t: int, j: int, budget: int = DEFAULT_BUDGET
) -> float:
    """Exact ``H(M_t | M_{t-1}, ..., M_{t-j+1})``; tends to ``U_j`` as ``t`` grows."""
    _check_args(t, j)
    _budget_check(2**t * (t + 1) ** (j - 1), budget)
    res = _run(params, 1, t, j - 1, np.array([[params.D, params.U]]))
    return _cond_entropy_nats(res) * params.factor


def _diagonal_start(params, t, j, budget):
    _check_args(t, j, need_label=True)
    s0 = t - j
    _budget_check(2**s0 * 2**t * (t + 1) ** (j - 1), budget)
    return _run(params, s0, t, j - 1, np.diag(product_law(params, s0)))


def oracle_joint_given_Z(params: LinkParams, t: int, j: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Exact law keyed ``(label, (M_t, ..., M_{t-j+1}))`` with ``label`` the packed ``Z_{t-j}``."""
    res = _diagonal_start(params, t, j, budget)
    out = {}
    for hist, P in res.items():
        for label, m in zip(*np.nonzero(P)):
            out[(int(label), (int(m),) + hist)] = float(P[label, m])
    return out


def oracle_conditional_entropy_given_Z(
    params: LinkParams, t: int, j: int, budget: int = DEFAULT_BUDGET
) -> float:
    """Exact ``H(M_t | M_{t-1}, ..., M_{t-j+1}, Z_{t-j})``; tends to ``L_j`` as ``t`` grows."""
    res = _diagonal_start(params, t, j, budget)
    return _cond_entropy_nats(res) * params.factor


def oracle_pj(params: LinkParams, t: int, j: int, budget: int = DEFAULT_BUDGET) -> float:
    """Exact ``P[M_t > max(M_{t-1}, ..., M_{t-j})]`` at finite `t`."""
    if not j < t:
        raise ParameterError(f"record probability needs j < t (j={j}, t={t})")
    law = oracle_joint(params, t, j + 1, budget)
    return math.fsum(v for k, v in law.pmf.items() if k[0] > max(k[1:]))


def stabilization(fn, params: LinkParams, t: int, j: int) -> float:
    """``|fn(t + 1) - fn(t)|`` for an oracle quantity ``fn(params, t, j)``."""
    return abs(fn(params, t + 1, j) - fn(params, t, j))


# -- brute-force route -------------------------------------------------------

def triangle_links(t: int) -> list:
    """Links ``(s, x)`` with ``s, x >= 1`` and ``s + x <= t + 1``, lexicographic."""
    return [(s, x) for s in range(1, t + 1) for x in range(1, t + 2 - s)]


def enumerate_triangle(params: LinkParams, t: int, j: int, condition_on_diagonal: bool = False) -> dict:
    """Joint law of the last `j` messages by summing over every triangle configuration.

    Keys are message tuples ``(M_t, ..., M_{t-j+1})``, or
    ``(label, messages)`` with ``label`` the packed diagonal ``Z_{t-j}`` when
    `condition_on_diagonal` is set.
    """
    if t > 6:
        raise ParameterError(f"triangle enumeration is limited to t <= 6, got {t}")
    _check_args(t, j, need_label=condition_on_diagonal)
    links = triangle_links(t)
    col = {link: i for i, link in enumerate(links)}
    n = len(links)
    cfg = np.arange(2**n, dtype=np.int64)
    X = {link: ((cfg >> col[link]) & 1).astype(bool) for link in links}

    u, d, U, D = params.u, params.d, params.U, params.D
    prob = np.ones(2**n)
    for x in range(1, t + 1):
        prev = X[(1, x)]
        prob *= np.where(prev, U, D)
        for s in range(2, t + 2 - x):
            cur = X[(s, x)]
            stay = np.where(prev, 1.0 - d, 1.0 - u)
            prob *= np.where(cur == prev, stay, 1.0 - stay)
            prev = cur

    def message(tau):
        total = np.zeros(2**n, dtype=np.int64)
        run = np.ones(2**n, dtype=bool)
        for m in range(1, tau + 1):
            run = run & X[(tau + 1 - m, m)]
            total += run
        return total

    window = min(j, t)
    msgs = [message(t - k) for k in range(window)]
    key = np.zeros(2**n, dtype=np.int64)
    for mk in msgs:
        key = key * (t + 1) + mk
    if condition_on_diagonal:
        label = np.zeros(2**n, dtype=np.int64)
        for x in range(1, t - j + 1):
            label |= X[(t - j + 1 - x, x)].astype(np.int64) << (x - 1)
        key = label * (t + 1) ** window + key
    order = np.argsort(key, kind="stable")
    key, prob = key[order], prob[order]
    uniq, starts = np.unique(key, return_index=True)
    bounds_ = np.append(starts, len(key))
    # exact summation: ~2M configurations feed a few thousand cells
    sums = [math.fsum(prob[a:b]) for a, b in zip(bounds_[:-1], bounds_[1:])]

    out = {}
    for k, v in zip(uniq.tolist(), sums):
        digits = []
        for _ in range(window):
            k, r = divmod(k, t + 1)
            digits.append(r)
        msg = tuple(reversed(digits))
        out[(k, msg) if condition_on_diagonal else msg] = v
    return out


def enumerated_conditional_entropy(params: LinkParams, t: int, j: int, condition_on_diagonal=False) -> float:
    """Conditional entropy of ``M_t`` from :func:`enumerate_triangle`."""
    law = enumerate_triangle(params, t, j, condition_on_diagonal)
    ctx = defaultdict(float)
    for k, v in law.items():
        if condition_on_diagonal:
            ctx[(k[0], k[1][1:])] += v
        else:
            ctx[k[1:]] += v
    return (_entropy_nats(law.values()) - _entropy_nats(ctx.values())) * params.factor


# -- t -> infinity -----------------------------------------------------------

def limit_record_probability(params: LinkParams, j: int) -> float:
    """Stationary ``p_j`` by inclusion-exclusion over which past messages reach level m.

    ``{M >= m}`` is "first m coordinates open", a product event, so
    ``P[M_t = m, M_{t-k} < m for k <= j]`` expands into ``2**j`` geometric
    series in ``m``.
    """
    if j < 0 or j > 20:
        raise ParameterError(f"inclusion-exclusion is limited to 0 <= j <= 20, got {j}")
    U, D = params.U, params.D
    lam = params.lam

    def stay_open(gap):  # P[open after `gap` steps | open]
        return U + D * lam**gap

    terms = []
    for size in range(j + 1):
        for S in itertools.combinations(range(1, j + 1), size):
            times = (0,) + S
            g = 1.0
            for a, b in zip(times, times[1:]):
                g *= stay_open(b - a)
            terms.append((-1) ** size * D / (1.0 - U * g))
    return math.fsum(terms)


def limit_history_law(
    params: LinkParams, window: int, cap: int | None = None, tail: float = 1e-12, budget: int = 5 * 10**8
) -> dict:
    """Stationary joint law of ``window`` consecutive messages, each capped at `cap`.

    ``P[M_{t-k} = m_k, k < window]`` is a product over coordinates ``x`` of
    single-chain probabilities with the chain pinned open where
    ``x <= m_k`` and closed where ``x = m_k + 1``.  Mass of tuples with any
    entry above `cap` (at most ``window * U**(cap+1)``) is dropped.
    """
    if window < 1 or window > 3:
        raise ParameterError(f"limit history law supports window 1..3, got {window}")
    U, D = params.U, params.D
    if cap is None:
        cap = max(1, math.ceil(math.log(tail / window) / math.log(U)))
    _budget_check((cap + 1) ** window * (cap + 2), budget)
    grids = np.meshgrid(*[np.arange(cap + 1)] * window, indexing="ij")
    ms = np.stack([g.ravel() for g in grids], axis=1)          # column k is M_{t-k}
    u, d = params.u, params.d
    prob = np.ones(len(ms))
    for x in range(1, cap + 2):
        # chain x visited oldest first: times t-window+1, ..., t
        a1 = np.full(len(ms), U)
        a0 = np.full(len(ms), D)
        for step, k in enumerate(range(window - 1, -1, -1)):
            if step:
                a1, a0 = (1.0 - d) * a1 + u * a0, d * a1 + (1.0 - u) * a0
            a1 = np.where(ms[:, k] + 1 == x, 0.0, a1)
            a0 = np.where(x <= ms[:, k], 0.0, a0)
        prob *= a1 + a0
    return {tuple(int(v) for v in row): float(p) for row, p in zip(ms, prob) if p > 0}


def limit_conditional_entropy(params: LinkParams, j: int, cap: int | None = None) -> float:
    """``U_j`` from :func:`limit_history_law` (``j <= 3``)."""
    law = limit_history_law(params, j, cap)
    ctx = defaultdict(float)
    for k, v in law.items():
        ctx[k[1:]] += v
    return (_entropy_nats(law.values()) - _entropy_nats(ctx.values())) * params.factor
