"""Prediction-error norms of finite-past causal filters.

All quantities are exact quadratic forms in the autocovariances; nothing is
simulated.  ``sigma_tilde`` compares the finite-past filter with the
infinite-past filter cut to the same window; ``sigma`` compares it with the
full infinite-past filter.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from .errors import LengthMismatch, TruncationInsufficient
from .filters import FilterSpec, target_covariances
from .process import AutocovSeq, ProcessSpec, ma_inf_coeffs
from .toeplitz import toeplitz_quadform


def sigma_tilde(hinf: np.ndarray, hfin: np.ndarray, gamma: AutocovSeq, n: int) -> float:
    if len(hinf) < n or len(hfin) < n:
        raise LengthMismatch("coefficient vectors shorter than n")
    gamma.require(n - 1)
    a = np.asarray(hinf[:n], dtype=float) - np.asarray(hfin[:n], dtype=float)
    return math.sqrt(toeplitz_quadform(gamma.gamma, a))


def sigma(hinf: np.ndarray, hfin: np.ndarray, gamma: AutocovSeq, n: int, tail_len: int,
          extra_tail: float = 0.0, rel_tol: float = 1e-6) -> tuple[float, float]:
    """Truncated evaluation of ``sigma_n`` and a bound on the neglected tail.

    ``d_k = hfin_k - hinf_k`` for ``k <= n`` and ``-hinf_k`` for
    ``n < k <= n + tail_len``.  The bound is ``sqrt(gamma(0))`` times the
    absolute sum of the coefficients beyond the window, of which
    ``extra_tail`` is the caller-supplied part lying past ``len(hinf)``.
    """
    total = n + tail_len
    if len(hfin) < n or len(hinf) < total:
        raise LengthMismatch("coefficient vectors shorter than n + tail_len")
    gamma.require(total - 1)
    d = np.concatenate([np.asarray(hfin[:n]) - np.asarray(hinf[:n]), -np.asarray(hinf[n:total])])
    value = math.sqrt(toeplitz_quadform(gamma.gamma, d))
    bound = math.sqrt(gamma.gamma[0]) * (float(np.abs(hinf[total:]).sum()) + extra_tail)
    if bound > rel_tol * max(value, np.finfo(float).tiny) and bound > 0.0:
        raise TruncationInsufficient(
            f"sigma tail bound {bound:.3g} exceeds {rel_tol:g} relative to {value:.3g}")
    return value, bound


def target_variance(filt: FilterSpec, gamma: AutocovSeq) -> float:
    """``var(Y_n) = h^T Gamma h`` over the filter window."""
    gamma.require(len(filt.taps) - 1)
    return toeplitz_quadform(gamma.gamma, filt.taps)


def optimal_variance(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq) -> float:
    """``||P_inf Y_n||^2``: variance of the infinite-past optimal causal prediction.

    ``Y_n`` minus its projection is ``sum_{t<0} c_t e_{n-t}`` with
    ``c_t = sum_{k<=t} h_k psi_{t-k}``, the future-innovation part of the target.
    """
    var_y = target_variance(filt, gamma)
    fut = filt.future
    if len(fut) == 0:
        return var_y
    psi = ma_inf_coeffs(spec, len(fut)).values
    # c_t for t = -M..-1 from taps ordered h_{-M}, ..., h_{-1}
    c = np.convolve(fut[::-1], psi)[: len(fut)]
    return var_y - spec.sigma2 * float(np.dot(c, c))


def sigma_projection(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq, n: int,
                     hfin: np.ndarray, optimal: float | None = None) -> float:
    """``sigma_n`` from ``||P_inf Y||^2 - ||P_n Y||^2`` (both projections nest)."""
    optimal = optimal_variance(filt, spec, gamma) if optimal is None else optimal
    c = target_covariances(filt, gamma, n)
    finite = float(np.dot(c, hfin[:n]))
    return math.sqrt(max(optimal - finite, 0.0))


def tail_norm(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq, n: int,
              hinf: np.ndarray, optimal: float | None = None) -> float:
    """``||sum_{k>n} hhat_k X_{n+1-k}||`` via ``||P_inf Y||^2`` minus the head terms."""
    if len(hinf) < n:
        raise LengthMismatch("hinf shorter than n")
    optimal = optimal_variance(filt, spec, gamma) if optimal is None else optimal
    c = target_covariances(filt, gamma, n)
    head = np.asarray(hinf[:n], dtype=float)
    value = optimal - 2.0 * float(np.dot(head, c)) + toeplitz_quadform(gamma.gamma, head)
    return math.sqrt(max(value, 0.0))


def mspe_bounds(l1: float, gamma0: float, tail: float) -> tuple[float, float]:
    """Upper bounds ``(sqrt(gamma0) * l1, sqrt(gamma0) * l1 + tail)`` for ``sigma_tilde`` and ``sigma``."""
    if l1 < 0 or gamma0 <= 0 or tail < 0:
        raise ValueError("need l1 >= 0, gamma0 > 0, tail >= 0")
    first = math.sqrt(gamma0) * l1
    return first, first + tail


def dense_quadform(gamma: AutocovSeq, a: np.ndarray) -> float:
    """Reference ``a^T T a`` with an explicit matrix; small ``n`` only."""
    mat = linalg.toeplitz(gamma.gamma[: len(a)])
    return float(a @ mat @ a)
