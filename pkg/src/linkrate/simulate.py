"""Monte Carlo simulation of the link field and the overhead messages.

Every link ``x`` owns a counter-based random stream (Philox keyed by
``(seed, replica, x)``); the uniform consumed by link ``x`` at link-time
``s`` sits at a fixed position of that stream.  Both simulation paths read
the same variates, so they can be compared sample by sample.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import entr

from .errors import InsufficientDataError, ParameterError
from .link import LinkParams

DEPTH_CAP = 4096
DEPTH_TOL = 1e-9
DEFAULT_BATCHES = 100
# stream position of link-time s is s + _ORIGIN, so link-times down to 1 - DEPTH_CAP are addressable
_ORIGIN = DEPTH_CAP


def default_depth(params: LinkParams, tol: float = DEPTH_TOL) -> int:
    """Smallest ``L`` with ``U**L < tol``, capped at :data:`DEPTH_CAP`."""
    L = max(1, math.ceil(math.log(tol) / math.log(params.U)))
    while params.U**L >= tol:
        L += 1
    return min(L, DEPTH_CAP)


def worker_count() -> int:
    env = os.environ.get("LINKRATE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ParameterError(f"LINKRATE_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SimConfig:
    params: LinkParams
    horizon: int
    depth: int | None = None
    replicas: int = 1
    seed: int = 0
    burn_in: int = 100

    def __post_init__(self):
        for name in ("horizon", "replicas"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v!r}")
        if self.burn_in < 0 or self.horizon <= self.burn_in:
            raise ParameterError(
                f"need horizon > burn_in >= 0, got horizon={self.horizon}, burn_in={self.burn_in}"
            )
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.depth is None:
            object.__setattr__(self, "depth", default_depth(self.params))
        elif not 1 <= self.depth <= DEPTH_CAP:
            raise ParameterError(f"depth must lie in [1, {DEPTH_CAP}], got {self.depth!r}")


@dataclass(frozen=True)
class MTrace:
    """Message sequences ``M_t`` after burn-in, one array per replica."""

    config: SimConfig
    traces: tuple = field(repr=False)

    def pooled(self) -> np.ndarray:
        return np.concatenate(self.traces)

    def pmf(self) -> np.ndarray:
        """Empirical law of ``M`` over ``0..depth``."""
        counts = np.bincount(self.pooled(), minlength=self.config.depth + 1)
        return counts / counts.sum()


def link_uniforms(seed: int, replica: int, x: int, s_start: int, n: int) -> np.ndarray:
    """Uniforms in [0, 1) used by link `x` at link-times ``s_start .. s_start+n-1``."""
    pos = s_start + _ORIGIN
    if pos < 0:
        raise ParameterError(f"link-time {s_start} precedes the addressable range")
    key = np.random.SeedSequence([seed, replica, x]).generate_state(2, np.uint64)
    bg = np.random.Philox(key=key)
    # one Philox counter step yields four 64-bit outputs
    bg.advance(pos // 4)
    raw = bg.random_raw(pos % 4 + n)[pos % 4 :]
    return (raw >> np.uint64(11)) * (1.0 / 2**53)


def chain_from_uniforms(v: np.ndarray, params: LinkParams) -> np.ndarray:
    """Stationary two-state chain driven by uniforms `v`.

    ``X_0 = [v_0 < U]``; afterwards an open link stays open iff ``v >= d`` and a
    closed one opens iff ``v < u``.  Each step is one of four maps on {0, 1}
    (constant 0, constant 1, identity, flip), so the path is the value at the
    last constant step XOR the parity of flips since then.
    """
    u, d = params.u, params.d
    opens = v < u
    holds = v >= d
    reset = opens == holds          # f(0) == f(1): constant map
    flip = opens & ~holds
    reset[0] = True
    base = opens.copy()
    base[0] = v[0] < params.U
    idx = np.arange(len(v))
    last = np.maximum.accumulate(np.where(reset, idx, 0))
    flip[0] = False
    nflip = np.cumsum(flip)
    parity = (nflip - nflip[last]) & 1
    return base[last] ^ parity.astype(bool)


def chain_sequential(v: np.ndarray, params: LinkParams) -> np.ndarray:
    """Step-by-step reference for :func:`chain_from_uniforms`."""
    out = np.empty(len(v), dtype=bool)
    out[0] = v[0] < params.U
    for k in range(1, len(v)):
        out[k] = v[k] >= params.d if out[k - 1] else v[k] < params.u
    return out


def _link_chain(config: SimConfig, replica: int, x: int) -> np.ndarray:
    # link-times 2-L .. horizon, shared by both paths
    L = config.depth
    v = link_uniforms(config.seed, replica, x, 2 - L, config.horizon + L - 1)
    return chain_from_uniforms(v, config.params)


def _diagonal_replica(config: SimConfig, replica: int) -> np.ndarray:
    H, L = config.horizon, config.depth
    m = np.zeros(H, dtype=np.uint32)
    alive = np.ones(H, dtype=bool)
    for x in range(1, L + 1):
        # Z_t(x) = X_{t+1-x}(x) for t = 1..H
        z = _link_chain(config, replica, x)[L - x : L - x + H]
        alive &= z
        if not alive.any():
            break
        m += alive
    return m[config.burn_in :]


def _map_replicas(fn, config: SimConfig):
    workers = min(worker_count(), config.replicas)
    if workers == 1:
        return tuple(fn(config, r) for r in range(config.replicas))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(lambda r: fn(config, r), range(config.replicas)))


def simulate_m_trace(config: SimConfig) -> MTrace:
    """Messages ``M_t`` as the leading-ones count of a depth-``L`` diagonal of links."""
    return MTrace(config, _map_replicas(_diagonal_replica, config))


def _spacetime_replica(config: SimConfig, replica: int) -> np.ndarray:
    H, L = config.horizon, config.depth
    field_ = np.stack([_link_chain(config, replica, x) for x in range(1, L + 1)], axis=1)
    # field_[k, x-1] is X_s(x) with s = k + 2 - L
    prev = np.zeros(L + 1, dtype=np.int64)   # M_{s-1}(x) for x = 1..L+1; M(L+1) = 0
    out = np.empty(H, dtype=np.uint32)
    for k in range(field_.shape[0]):
        cur = np.zeros(L + 1, dtype=np.int64)
        cur[:L] = field_[k] * (prev[1:] + 1)
        prev = cur
        s = k + 2 - L
        if s >= 1:
            out[s - 1] = cur[0]
    return out[config.burn_in :]


def simulate_spacetime(config: SimConfig) -> MTrace:
    """Same messages via ``M_t(x) = X_t(x) [M_{t-1}(x+1) + 1]`` on a rectangular link field.

    Quadratic in ``depth * horizon``; meant for cross-checking at small horizon.
    """
    return MTrace(config, _map_replicas(_spacetime_replica, config))


class Estimate(NamedTuple):
    value: float
    stderr: float


def _batch_stderr(values: np.ndarray, batches: int) -> float:
    means = np.array([c.mean() for c in np.array_split(values, batches)])
    return float(means.std(ddof=1) / math.sqrt(batches))


def _record_indicators(m: np.ndarray, j: int) -> np.ndarray:
    prev = sliding_window_view(m[:-1], j).max(axis=1)
    return m[j:] > prev


def empirical_pj(trace: MTrace, j: int, batches: int = DEFAULT_BATCHES) -> Estimate:
    """Frequency of strict records over the previous `j` messages, batch-means stderr."""
    if j < 1:
        raise ParameterError(f"j must be >= 1, got {j}")
    parts = [_record_indicators(m, j) for m in trace.traces if len(m) > j]
    n = sum(len(p) for p in parts)
    if n < 2 * batches:
        raise InsufficientDataError(f"{n} record windows for j={j}; need at least {2 * batches}")
    ind = np.concatenate(parts).astype(float)
    return Estimate(float(ind.mean()), _batch_stderr(ind, batches))


class EntropyEstimate(NamedTuple):
    value: float
    stderr: float
    bias_bound: float
    undersampled: bool
    n_samples: int


def _codes(m: np.ndarray, j: int, radix: int):
    w = sliding_window_view(m.astype(np.int64), j)   # w[:, -1] is M_t
    joint = np.zeros(len(w), dtype=np.int64)
    for k in range(j):
        joint = joint * radix + w[:, j - 1 - k]
    ctx = joint % radix ** (j - 1) if j > 1 else np.zeros(len(w), dtype=np.int64)
    return joint, ctx


def _plugin_nats(joint, ctx):
    n = len(joint)
    _, cj = np.unique(joint, return_counts=True)
    _, cc = np.unique(ctx, return_counts=True)
    h = float(entr(cj / n).sum() - entr(cc / n).sum())
    return h, len(cj), len(cc)


def plugin_conditional_entropy(
    trace: MTrace,
    j: int,
    miller_madow: bool = False,
    batches: int = DEFAULT_BATCHES,
    min_context_count: float = 50.0,
) -> EntropyEstimate:
    """Plug-in estimate of ``H(M_t | M_{t-1}, ..., M_{t-j+1})`` from empirical counts.

    The plug-in value is biased low; ``bias_bound`` is ``K / (2N)`` (in the
    configured base) with ``K`` the number of occupied joint cells.  With
    `miller_madow` the first-order correction ``(K_joint - K_context) / (2N)``
    is added.
    """
    if not 1 <= j <= 5:
        raise ParameterError(f"plug-in estimate supports 1 <= j <= 5, got {j}")
    parts = [m for m in trace.traces if len(m) >= j]
    if not parts:
        raise InsufficientDataError(f"no replica has {j} messages")
    radix = int(max(m.max() for m in parts)) + 1
    codes = [_codes(m, j, radix) for m in parts]
    joint = np.concatenate([c[0] for c in codes])
    ctx = np.concatenate([c[1] for c in codes])
    n = len(joint)
    if n < 2 * batches:
        raise InsufficientDataError(f"{n} windows for j={j}; need at least {2 * batches}")
    f = trace.config.params.factor

    h, kj, kc = _plugin_nats(joint, ctx)
    if miller_madow:
        h += (kj - kc) / (2.0 * n)
    per_batch = []
    for bj, bc in zip(np.array_split(joint, batches), np.array_split(ctx, batches)):
        hb, kjb, kcb = _plugin_nats(bj, bc)
        if miller_madow:
            hb += (kjb - kcb) / (2.0 * len(bj))
        per_batch.append(hb)
    stderr = float(np.std(per_batch, ddof=1) / math.sqrt(batches))
    undersampled = n / kc < min_context_count
    return EntropyEstimate(h * f, stderr * f, kj / (2.0 * n) * f, bool(undersampled), n)


def write_trace(m: np.ndarray, path, fmt: str = "binary") -> None:
    """Write messages as little-endian uint32 (``binary``) or one value per line (``csv``)."""
    path = Path(path)
    m = np.asarray(m)
    if fmt == "binary":
        m.astype("<u4").tofile(path)
    elif fmt == "csv":
        with open(path, "w") as fh:
            fh.write("M\n")
            np.savetxt(fh, m, fmt="%d")
    else:
        raise ParameterError(f"unknown trace format {fmt!r}")


def read_trace(path, fmt: str = "binary") -> np.ndarray:
    path = Path(path)
    if fmt == "binary":
        return np.fromfile(path, dtype="<u4")
    if fmt == "csv":
        return np.loadtxt(path, dtype=np.uint32, skiprows=1, ndmin=1)
    raise ParameterError(f"unknown trace format {fmt!r}")
