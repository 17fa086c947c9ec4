"""Infinite- and finite-past m-step predictor coefficients.

``phi^m_k`` weights ``X_{n+1-k}`` in the best linear predictor of ``X_{n+m}``
from the infinite past; ``phi^m_{k,n}`` does the same with only ``n``
observations available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DivergentNorm, LengthMismatch, TruncationInsufficient
from .process import AutocovSeq, CoeffSeq, ProcessSpec, ar_inf_coeffs, ma_inf_coeffs, weighted_norm
from .toeplitz import dense_solve, levinson_path, toeplitz_matvec, toeplitz_quadform

METHODS = ("analytic_convolution", "levinson_toeplitz", "series_expansion", "dense_cholesky")


@dataclass(eq=False)
class PredictorCoeffs:
    """m-step predictor coefficients; ``n is None`` marks the infinite-past predictor."""

    m: int
    n: int | None
    coeffs: np.ndarray
    method: str
    residual_variance: float | None = None
    tail_bound: float = 0.0


def infinite_predictor_coeffs(psi: CoeffSeq, phi: CoeffSeq, m: int, length: int) -> PredictorCoeffs:
    """``phi^m_k = sum_{l<m} psi_l phi_{k+m-1-l}`` for ``k = 1..length``."""
    if m < 1 or length < 1:
        raise ValueError("m and length must be >= 1")
    if len(psi) < m or len(phi) < length + m:
        raise TruncationInsufficient(
            f"need psi of length {m} and phi of length {length + m}")
    out = np.zeros(length)
    for ell in range(m):
        if psi.values[ell] != 0.0:
            start = m - ell
            out += psi.values[ell] * phi.values[start: start + length]
    head = float(np.abs(psi.values[:m]).sum())
    return PredictorCoeffs(m, None, out, "analytic_convolution",
                           tail_bound=head * phi.abs_tail(length + 1))


def infinite_predictor_matrix(psi: CoeffSeq, phi: CoeffSeq, ms: Sequence[int],
                              length: int) -> np.ndarray:
    """Columns ``phi^m_{1..length}`` for each horizon in ``ms``."""
    return np.column_stack([infinite_predictor_coeffs(psi, phi, m, length).coeffs for m in ms])


def _rhs(gamma: AutocovSeq, ms: Sequence[int], n: int) -> np.ndarray:
    need = n + max(ms) - 1
    gamma.require(need)
    g = gamma.gamma
    return np.column_stack([g[m: m + n] for m in ms])


def finite_predictor_coeffs(gamma: AutocovSeq, m: int, n: int,
                            method: str = "levinson_toeplitz") -> PredictorCoeffs:
    """Solve ``sum_k phi^m_{k,n} gamma(j-k) = gamma(m-1+j)``, ``j = 1..n``.

    For ``m == 1`` the residual variance ``v_n`` is attached.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    rhs = _rhs(gamma, [m], n)[:, 0]
    if method == "dense_cholesky":
        coeffs = dense_solve(gamma.gamma, rhs)
    elif method == "levinson_toeplitz":
        coeffs = finite_predictor_matrix(gamma, [m], n)[:, 0]
    else:
        raise ValueError(f"unknown method {method!r}")
    var = None
    if m == 1:
        var = float(gamma.gamma[0] - np.dot(coeffs, gamma.gamma[1: n + 1]))
    return PredictorCoeffs(m, n, coeffs, method, residual_variance=var)


def finite_predictor_matrix(gamma: AutocovSeq, ms: Sequence[int], n: int) -> np.ndarray:
    """Columns ``phi^m_{1..n, n}`` for every ``m`` in ``ms`` from a single Levinson pass."""
    rhs = _rhs(gamma, ms, n)
    step = None
    for step in levinson_path(gamma.gamma[:n + 1], rhs, n):
        pass
    assert step is not None
    return step.solution.copy()


def finite_predictor_path(gamma: AutocovSeq, ms: Sequence[int], n_max: int
                          ) -> Iterator[tuple[int, np.ndarray, float | None]]:
    """Yield ``(n, coeffs, v_n)`` for ``n = 1..n_max``; ``coeffs`` has one column per ``m``.

    The yielded array is reused by later iterations.
    """
    rhs = _rhs(gamma, ms, n_max)
    for step in levinson_path(gamma.gamma[: n_max + 1], rhs, n_max):
        yield step.order, step.solution, step.variance


def normal_equation_residual(gamma: AutocovSeq, coeffs: np.ndarray, m: int) -> float:
    """``max_j |sum_k c_k gamma(j-k) - gamma(m-1+j)|`` over ``j = 1..n``."""
    n = len(coeffs)
    gamma.require(n + m - 1)
    lhs = toeplitz_matvec(gamma.gamma, coeffs)
    return float(np.max(np.abs(lhs - gamma.gamma[m: m + n])))


def one_step_variances(gamma: AutocovSeq, n_max: int) -> np.ndarray:
    """One-step prediction variances ``v_0..v_{n_max}`` from the Durbin recursion."""
    gamma.require(n_max)
    out = np.empty(n_max + 1)
    out[0] = gamma.gamma[0]
    for step in levinson_path(gamma.gamma[: n_max + 1], None, n_max):
        out[step.order] = step.variance
    return out


def one_step_rho(gamma: AutocovSeq, sigma2: float, n: int) -> float:
    """``|sqrt(v_n) - sigma|``: excess one-step prediction error of the finite past."""
    v = one_step_variances(gamma, n)[n]
    return rho_from_variance(v, sigma2)


def rho_from_variance(v: float | np.ndarray, sigma2: float) -> float | np.ndarray:
    # sqrt(v) - sqrt(s2) written to avoid cancellation when v is close to s2
    diff = np.asarray(v, dtype=float) - sigma2
    out = np.abs(diff) / (np.sqrt(v) + np.sqrt(sigma2))
    return float(out) if np.ndim(out) == 0 else out


def tail_sum_bound_sm(psi: CoeffSeq, phi: CoeffSeq, n: int) -> float:
    """``||psi||_0 * sum_{j>n} |phi_j|``, a bound on ``sup_m sum_{k>n} |phi^m_k|``."""
    if phi.tail_model.kind == "polynomial" or psi.tail_model.kind == "polynomial":
        raise DivergentNorm("short-memory tail bound requested for a long-memory sequence")
    return weighted_norm(psi, 0.0) * phi.abs_tail(n + 1)


def tail_sum_bound_lm(constants, m: int, n: int) -> float:
    """``C3 * (m / (n + m))^d``, a bound on ``sum_{k>=n} |phi^m_k|``."""
    return constants.C3 * (m / (n + m)) ** constants.d


def predictor_difference(spec: ProcessSpec, gamma: AutocovSeq, ms: Sequence[int], n: int,
                         extra: int | None = None) -> np.ndarray:
    """``phi^m_{k,n} - phi^m_k`` for ``k = 1..n`` without subtracting near-equal numbers.

    Subtracting the normal equations of the two predictors gives
    ``T_n (phi^m_{.,n} - phi^m) = r`` with ``r_j = sum_{k>n} phi^m_k gamma(k-j)``.
    Solving for the difference directly keeps full relative accuracy when
    it is many orders of magnitude below the coefficients themselves, which
    is the normal situation for short-memory processes.  ``extra`` infinite
    coefficients beyond ``n`` enter ``r``; they must make the neglected part
    negligible, so this is intended for geometrically decaying ``phi``.
    """
    if spec.memory.is_long and extra is None:
        raise TruncationInsufficient("long-memory tails need an explicit 'extra' length")
    m_max = max(ms)
    if extra is None:
        if spec.phi_rate > 0.0:
            rate = max(spec.phi_rate, 1e-3)
            extra = int(np.ceil(np.log(1e-22) / np.log(rate))) + 2 * m_max + 8
        else:
            extra = len(spec.ar) + 1
    psi = ma_inf_coeffs(spec, m_max)
    phi = ar_inf_coeffs(spec, n + extra + m_max + 1)
    inf = infinite_predictor_matrix(psi, phi, ms, n + extra)
    gamma.require(n + extra - 1)
    tail = inf[n:]  # k = n+1 .. n+extra
    j = np.arange(1, n + 1)
    k = np.arange(n + 1, n + extra + 1)
    lags = k[None, :] - j[:, None]
    r = gamma.gamma[lags] @ tail
    step = None
    for step in levinson_path(gamma.gamma[: n + 1], r, n):
        pass
    assert step is not None
    return step.solution.copy()


def l1_columns(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Column-wise ``sum_{k<=n} |a_k - b_k|``."""
    if len(a) < n or len(b) < n:
        raise LengthMismatch(f"vectors of length {len(a)}, {len(b)} do not cover n={n}")
    return np.abs(np.asarray(a)[:n] - np.asarray(b)[:n]).sum(axis=0)


def one_step_excess(spec: ProcessSpec, gamma: AutocovSeq, n: int) -> float:
    """``v_n - sigma^2`` as the quadratic form of ``(phi_{.,n} - phi, -phi_{>n})``.

    Equivalent to differencing the Durbin variances but accurate far below
    machine epsilon of ``gamma(0)``; intended for geometrically decaying ``phi``.
    """
    diff = predictor_difference(spec, gamma, [1], n)[:, 0]
    phi = ar_inf_coeffs(spec, len(gamma))
    tail = phi.values[n + 1:]
    keep = np.nonzero(tail)[0]
    tail = tail[: keep[-1] + 1] if keep.size else tail[:0]
    vec = np.concatenate([diff, -tail])
    gamma.require(len(vec) - 1)
    return toeplitz_quadform(gamma.gamma, vec)
