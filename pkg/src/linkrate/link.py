"""Single link: a two-state Markov chain with up-rate ``u`` and down-rate ``d``.

State 1 is an open link, state 0 a closed one.  Everything here is a closed
form in ``u``, ``d`` and the second eigenvalue ``lam = 1 - u - d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
from scipy.special import entr, xlog1py

from .errors import ParameterError

#: Admissible parameter range is [EPS_DOMAIN, 1 - EPS_DOMAIN].
EPS_DOMAIN = 1e-9

Base = Literal["bits", "nats"]
_LN2 = math.log(2.0)


def base_factor(base: str) -> float:
    """Multiplier converting nats into `base`."""
    if base == "bits":
        return 1.0 / _LN2
    if base == "nats":
        return 1.0
    raise ParameterError(f"unknown entropy base {base!r}; expected 'bits' or 'nats'")


@dataclass(frozen=True)
class LinkParams:
    """Parameters of one link.

    Parameters
    ----------
    u : float
        Probability that a closed link opens in one step.
    d : float
        Probability that an open link closes in one step.
    entropy_base : {'bits', 'nats'}
        Unit of every entropy computed from these parameters.
    """

    u: float
    d: float
    entropy_base: Base = "bits"

    def __post_init__(self):
        for name in ("u", "d"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a number, got {v!r}") from None
            if not (EPS_DOMAIN <= v <= 1.0 - EPS_DOMAIN) or math.isnan(v):
                raise ParameterError(
                    f"{name}={v!r} outside [{EPS_DOMAIN:g}, 1 - {EPS_DOMAIN:g}]"
                )
            object.__setattr__(self, name, v)
        base_factor(self.entropy_base)

    @property
    def lam(self) -> float:
        """Second eigenvalue ``1 - u - d`` of the transition matrix."""
        return (1.0 - self.u) - self.d

    @property
    def U(self) -> float:
        return self.u / (self.u + self.d)

    @property
    def D(self) -> float:
        return 1.0 - self.U

    @property
    def factor(self) -> float:
        return base_factor(self.entropy_base)

    def with_base(self, base: Base) -> "LinkParams":
        return LinkParams(self.u, self.d, base)


class StationaryLaw(NamedTuple):
    U: float
    D: float


class JStepKernel(NamedTuple):
    j: int
    u_j: float
    d_j: float


def _check_j(j) -> int:
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise ParameterError(f"step count must be a positive integer, got {j!r}")
    return int(j)


def stationary(params: LinkParams) -> StationaryLaw:
    return StationaryLaw(params.U, params.D)


def transition_matrix(params: LinkParams) -> np.ndarray:
    """Column-stochastic matrix ``T[new, old]`` with state order (1, 0)."""
    u, d = params.u, params.d
    return np.array([[1.0 - d, u], [d, 1.0 - u]])


def jstep(params: LinkParams, j: int) -> JStepKernel:
    """Off-diagonal entries of ``T**j``: ``u_j = U(1 - lam**j)``, ``d_j = D(1 - lam**j)``."""
    j = _check_j(j)
    if j == 1:
        return JStepKernel(1, params.u, params.d)
    decay = 1.0 - params.lam**j
    return JStepKernel(j, params.U * decay, params.D * decay)


def jstep_by_matrix_power(params: LinkParams, j: int) -> JStepKernel:
    """Same as :func:`jstep` but by repeated 2x2 products; kept as a check."""
    j = _check_j(j)
    T = transition_matrix(params)
    P = np.eye(2)
    for _ in range(j):
        P = T @ P
    return JStepKernel(j, float(P[0, 1]), float(P[1, 0]))


def binary_entropy(lam, base: str = "bits"):
    """``h(lam) = -lam log lam - (1 - lam) log(1 - lam)`` with ``0 log 0 = 0``."""
    x = np.asarray(lam, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise ParameterError(f"binary entropy argument outside [0, 1]: {lam!r}")
    out = (entr(x) + entr(1.0 - x)) * base_factor(base)
    return float(out) if out.ndim == 0 else out


def link_entropy(params: LinkParams) -> float:
    """Entropy of a single link state under the stationary law."""
    return binary_entropy(params.U, params.entropy_base)


def jstep_entropy_rate(params: LinkParams, j: int) -> float:
    """Entropy rate ``U h(d_j) + D h(u_j)`` of the link sampled every `j` steps."""
    k = jstep(params, j)
    b = params.entropy_base
    return params.U * binary_entropy(k.d_j, b) + params.D * binary_entropy(k.u_j, b)


def _phi(x: np.ndarray) -> np.ndarray:
    # (1+x) log(1+x) - x, accurate for small |x|
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.1
    xs = x[small]
    acc = np.zeros_like(xs)
    term = xs * xs
    for n in range(2, 24):
        acc += term / (n * (n - 1))
        term = -term * xs
    out[small] = acc
    xl = x[~small]
    out[~small] = xlog1py(1.0 + xl, xl) - xl
    return out


def step_information_nats(params: LinkParams, js) -> np.ndarray:
    """Mutual information between link states `j` steps apart, in nats.

    Equals ``link_entropy - jstep_entropy_rate`` but is evaluated without
    cancellation, so it stays accurate while ``lam**j`` is tiny.
    """
    js = np.asarray(js)
    U, D = params.U, params.D
    eps = np.power(params.lam, js.astype(float))
    # joint weight P(a)P(b) times phi(c_ab * eps); sum_ab P(a)P(b) c_ab = 0
    return (
        U * U * _phi((D / U) * eps)
        + 2.0 * U * D * _phi(-eps)
        + D * D * _phi((U / D) * eps)
    )


def step_information(params: LinkParams, j: int) -> float:
    """``H(X_1) - H(X^(j))`` in the configured base."""
    j = _check_j(j)
    return float(step_information_nats(params, np.array(j))) * params.factor
