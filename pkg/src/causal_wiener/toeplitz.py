"""Symmetric positive-definite Toeplitz systems.

The Levinson recursion here carries an arbitrary block of right-hand sides
alongside the Durbin predictor.  Because the order-``n`` right-hand side of
every normal-equation system in this package is a prefix of a longer vector,
one pass yields the solutions for all orders ``1..n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import linalg

from .errors import NotPositiveDefinite

# np.correlate is exact-ish but quadratic; past this many flops switch to FFT
_DIRECT_LIMIT = 4_000_000


@dataclass
class LevinsonStep:
    """State after solving the order-``order`` system.

    ``solution`` has shape ``(order, r)``.  ``predictor`` and ``variance`` are
    the one-step forward predictor and its error variance of the same order
    when the autocovariances reach lag ``order``; otherwise ``None``.
    """

    order: int
    solution: np.ndarray
    predictor: np.ndarray | None
    variance: float | None


def levinson_path(gamma: np.ndarray, rhs: np.ndarray | None = None,
                  order: int | None = None) -> Iterator[LevinsonStep]:
    """Yield the Toeplitz solutions for orders ``1, 2, ..., order``.

    ``rhs`` is ``(order,)`` or ``(order, r)``; its first ``k`` rows form the
    order-``k`` right-hand side.  Arrays in the yielded steps are views into
    working buffers, so copy them if they must outlive the next iteration.
    """
    gamma = np.asarray(gamma, dtype=float)
    if order is None:
        order = len(gamma) if rhs is None else len(rhs)
    if rhs is None:
        rhs = np.zeros((order, 0))
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim == 1:
        rhs = rhs[:, None]
    if len(rhs) < order or len(gamma) < order:
        raise ValueError("gamma and rhs must cover the requested order")
    if not gamma[0] > 0:
        raise NotPositiveDefinite("gamma(0) must be positive")

    x = np.zeros((order, rhs.shape[1]))
    a = np.zeros(order)
    v = float(gamma[0])
    for k in range(order):
        back = gamma[k:0:-1]  # gamma(k), ..., gamma(1)
        mu = (rhs[k] - back @ x[:k]) / v
        x[:k] -= np.outer(a[:k][::-1], mu)
        x[k] = mu
        if k + 1 < len(gamma):
            kappa = (gamma[k + 1] - a[:k] @ back) / v
            a[:k] -= kappa * a[:k][::-1].copy()
            a[k] = kappa
            v *= (1.0 - kappa) * (1.0 + kappa)
            if not v > 0.0:
                raise NotPositiveDefinite(f"prediction variance {v:.3g} at order {k + 1}")
            yield LevinsonStep(k + 1, x[: k + 1], a[: k + 1], v)
        else:
            yield LevinsonStep(k + 1, x[: k + 1], None, None)


def levinson_solve(gamma: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``T x = rhs`` with ``T = toeplitz(gamma[:n])``."""
    rhs = np.asarray(rhs, dtype=float)
    n = len(rhs)
    step = None
    for step in levinson_path(np.asarray(gamma)[:n], rhs, n):
        pass
    assert step is not None
    sol = step.solution.copy()
    return sol[:, 0] if rhs.ndim == 1 else sol


def levinson_durbin(gamma: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """One-step predictor of the given order and variances ``v_0..v_order``."""
    gamma = np.asarray(gamma, dtype=float)
    if len(gamma) < order + 1:
        raise ValueError("gamma must cover lags 0..order")
    variances = np.empty(order + 1)
    variances[0] = gamma[0]
    pred = np.zeros(0)
    for step in levinson_path(gamma[: order + 1], None, order):
        variances[step.order] = step.variance
        pred = step.predictor
    return pred.copy(), variances


def dense_solve(gamma: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Cholesky solve of the dense Toeplitz system; slow reference path."""
    rhs = np.asarray(rhs, dtype=float)
    mat = linalg.toeplitz(np.asarray(gamma, dtype=float)[: len(rhs)])
    try:
        factor = linalg.cho_factor(mat)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return linalg.cho_solve(factor, rhs)


def correlate_valid(long: np.ndarray, short: np.ndarray) -> np.ndarray:
    """``out[k] = sum_s long[k + s] * short[s]`` for ``k = 0..len(long) - len(short)``."""
    long = np.asarray(long, dtype=float)
    short = np.asarray(short, dtype=float)
    if len(short) == 0:
        return np.zeros(max(len(long) + 1, 0))
    if len(long) * len(short) <= _DIRECT_LIMIT:
        return np.correlate(long, short, mode="valid")
    from scipy.signal import fftconvolve

    return fftconvolve(long, short[::-1], mode="valid")


def toeplitz_matvec(gamma: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``T x`` for the symmetric Toeplitz matrix of ``gamma[:len(x)]``."""
    n = len(x)
    return linalg.matmul_toeplitz(np.asarray(gamma, dtype=float)[:n], np.asarray(x, dtype=float))


def toeplitz_quadform(gamma: np.ndarray, a: np.ndarray, *, tol: float = 1e-12) -> float:
    """``a^T T a`` via lag-weighted autocorrelations of ``a``.

    Small negative values within ``tol * gamma(0) * |a|^2`` of zero are
    treated as roundoff and clipped.
    """
    a = np.asarray(a, dtype=float)
    n = len(a)
    if n == 0:
        return 0.0
    g = np.asarray(gamma, dtype=float)[:n]
    if n * n <= _DIRECT_LIMIT:
        lagged = np.correlate(a, a, mode="full")[n - 1:]
    else:
        from scipy.signal import fftconvolve

        lagged = fftconvolve(a, a[::-1], mode="full")[n - 1:]
    value = float(g[0] * lagged[0] + 2.0 * np.dot(g[1:], lagged[1:]))
    scale = float(g[0] * np.dot(a, a))
    if value < 0.0:
        if value < -tol * max(scale, np.finfo(float).tiny) - 1e-300:
            raise NotPositiveDefinite(f"negative quadratic form {value:.3g}")
        return 0.0
    return value
