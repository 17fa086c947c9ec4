"""Two-sided linear filters and their optimal causal approximations.

A filter ``{h_k}`` defines the target ``Y_n = sum_k h_k X_{n-k}``; negative
``k`` reach into the future.  The infinite-past optimal causal filter
predicts ``Y_n`` from ``X_n, X_{n-1}, ...`` with weights ``hhat_k`` on
``X_{n+1-k}``, and its finite-past counterpart uses ``X_n, ..., X_1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from .errors import IncompatibleFilter, InvalidBand, LengthMismatch, TruncationInsufficient
from .process import AutocovSeq, CoeffSeq, ProcessSpec, ar_inf_coeffs, ma_inf_coeffs
from .toeplitz import correlate_valid, levinson_path

Summability = Literal["fir", "l1", "l2", "cd"]


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """Filter taps ``h_k`` for ``k = lo .. lo + len(taps) - 1``, zero elsewhere.

    ``tail_l1`` bounds ``sum |h_k|`` outside the stored window (``inf`` for
    filters that are only square summable).  ``order`` is the weight exponent
    ``d`` of the ``C_d`` class and is only meaningful when ``summability == "cd"``.
    """

    taps: np.ndarray
    lo: int
    summability: Summability
    label: str = ""
    order: float = 0.0
    tail_l1: float = 0.0
    params: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "taps", np.asarray(self.taps, dtype=float))
        if self.summability not in ("fir", "l1", "l2", "cd"):
            raise ValueError(f"unknown summability {self.summability!r}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.taps) - 1

    def h(self, k: int | np.ndarray) -> np.ndarray | float:
        k = np.asarray(k)
        idx = k - self.lo
        ok = (idx >= 0) & (idx < len(self.taps))
        out = np.where(ok, self.taps[np.clip(idx, 0, max(len(self.taps) - 1, 0))], 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def future(self) -> np.ndarray:
        """``future[i] = h_{-(i+1)}``, i.e. the weights on ``X_{n+1}, X_{n+2}, ...``."""
        count = max(-self.lo, 0)
        return self.h(-np.arange(1, count + 1))

    def past_from(self, start: int) -> np.ndarray:
        """``h_start, h_{start+1}, ..., h_hi`` (empty if ``start > hi``)."""
        if start > self.hi:
            return np.zeros(0)
        return self.h(np.arange(start, self.hi + 1))

    def as_dict(self) -> dict[int, float]:
        return {self.lo + i: float(v) for i, v in enumerate(self.taps) if v != 0.0}

    # serialisation --------------------------------------------------
    def to_dict(self) -> dict:
        family, *rest = self.params or ("explicit",)
        if family == "explicit":
            return {"family": "explicit",
                    "taps": {str(k): v for k, v in sorted(self.as_dict().items())}}
        names = {"shift": ("m",), "identity": (), "bandpass": ("mu1", "mu2", "window"),
                 "polydecay": ("d", "eps", "window")}[family]
        return {"family": family, **dict(zip(names, rest))}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> FilterSpec:
        data = dict(data)
        family = str(data.pop("family")).lower()
        if family == "explicit":
            return explicit_filter({int(k): float(v) for k, v in data["taps"].items()})
        if family == "shift":
            return shift_filter(int(data["m"]))
        if family == "identity":
            return identity_filter()
        if family == "bandpass":
            return bandpass_filter(float(data["mu1"]), float(data["mu2"]), int(data["window"]))
        if family == "polydecay":
            return polydecay_filter(float(data["d"]), float(data["eps"]), int(data["window"]))
        raise ValueError(f"unknown filter family {family!r}")

    @classmethod
    def from_json(cls, text: str) -> FilterSpec:
        return cls.from_dict(json.loads(text))


def explicit_filter(taps: Mapping[int, float], label: str = "explicit") -> FilterSpec:
    """Finite impulse response filter from ``{k: h_k}``."""
    if not taps:
        return FilterSpec(np.zeros(1), 0, "fir", label, params=("explicit",))
    lo, hi = min(taps), max(taps)
    arr = np.zeros(hi - lo + 1)
    for k, v in taps.items():
        arr[k - lo] = v
    return FilterSpec(arr, lo, "fir", label, params=("explicit",))


def shift_filter(m: int) -> FilterSpec:
    """``Y_n = X_{n+m}``: pure m-step prediction."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return FilterSpec(np.eye(1, m).ravel(), -m, "fir", f"shift-{m}", params=("shift", m))


def identity_filter() -> FilterSpec:
    return FilterSpec(np.ones(1), 0, "fir", "identity", params=("identity",))


def bandpass_filter(mu1: float, mu2: float, window: int) -> FilterSpec:
    """Ideal band-pass on ``mu1 <= |w| < mu2`` truncated to ``|k| <= window``."""
    if not (0.0 <= mu1 < mu2 <= math.pi):
        raise InvalidBand(f"need 0 <= mu1 < mu2 <= pi, got {mu1}, {mu2}")
    if window < 1:
        raise ValueError("window must be >= 1")
    k = np.arange(1, window + 1, dtype=float)
    side = (np.sin(k * mu2) - np.sin(k * mu1)) / (math.pi * k)
    taps = np.concatenate([side[::-1], [(mu2 - mu1) / math.pi], side])
    return FilterSpec(taps, -window, "l2", f"bandpass({mu1:g},{mu2:g})", tail_l1=math.inf,
                      params=("bandpass", mu1, mu2, window))


def polydecay_filter(d: float, eps: float, window: int) -> FilterSpec:
    """``h_k = (1 + |k|)^-(1 + d + eps)`` on ``|k| <= window``; member of ``C_d``."""
    if not 0.0 < d < 0.5 or not eps > 0.0:
        raise ValueError("need 0 < d < 0.5 and eps > 0")
    if window < 1:
        raise ValueError("window must be >= 1")
    p = 1.0 + d + eps
    k = np.arange(-window, window + 1)
    taps = (1.0 + np.abs(k)) ** (-p)
    # sum_{|k|>W} (1+|k|)^-p <= 2 int_{W+1/2}^inf (1+x)^-p dx
    tail = 2.0 * (window + 1.5) ** (1.0 - p) / (p - 1.0)
    return FilterSpec(taps, -window, "cd", f"polydecay({d:g},{eps:g})", order=d, tail_l1=tail,
                      params=("polydecay", d, eps, window))


def weighted_filter_norm(filt: FilterSpec, exponent: float) -> float:
    """``sum_k (1 + |k|)^exponent |h_k|`` over the stored window."""
    k = np.arange(filt.lo, filt.hi + 1)
    return float(np.sum((1.0 + np.abs(k)) ** exponent * np.abs(filt.taps)))


def check_compatible(filt: FilterSpec, spec: ProcessSpec) -> None:
    """Raise :class:`IncompatibleFilter` unless the filter class suits the process memory."""
    mem = spec.memory
    if mem.is_long:
        if filt.summability == "fir":
            return
        if filt.summability == "cd" and filt.order >= mem.d:
            return
        raise IncompatibleFilter(
            f"{filt.label or filt.summability} filter needs C_d with d >= {mem.d:g} "
            "for a long-memory process")
    if filt.summability == "l2" and mem.alpha is not None and mem.alpha < 1.0:
        raise IncompatibleFilter("square-summable filters need alpha >= 1")


# ---------------------------------------------------------------------------

def hhat_infinite(filt: FilterSpec, spec: ProcessSpec, length: int, *,
                  psi: CoeffSeq | None = None, phi: CoeffSeq | None = None) -> np.ndarray:
    """``hhat_k = sum_m h_{-m} phi^m_k + h_{k-1}`` for ``k = 1..length``.

    Evaluated as ``sum_s phi_{k+s} w_s + h_{k-1}`` with
    ``w_s = sum_l psi_l h_{-(s+1+l)}``, which regroups the double sum over
    horizons and moving-average lags into one correlation.
    """
    check_compatible(filt, spec)
    fut = filt.future
    count = len(fut)
    out = np.asarray(filt.h(np.arange(0, length)), dtype=float).copy()
    if count == 0:
        return out
    psi = psi if psi is not None else ma_inf_coeffs(spec, count)
    phi = phi if phi is not None else ar_inf_coeffs(spec, length + count)
    if len(psi) < count or len(phi) < length + count:
        raise TruncationInsufficient("psi/phi too short for the filter window")
    w = correlate_valid(np.concatenate([fut, np.zeros(count - 1)]), psi.values[:count])
    return out + correlate_valid(phi.values[1: length + count], w)


def _two_rhs(filt: FilterSpec, gamma: AutocovSeq, n: int) -> np.ndarray:
    fut = filt.future
    past = filt.past_from(n)
    need = n + max(len(fut), len(past)) - 1
    gamma.require(max(need, n))
    g = gamma.gamma
    first = correlate_valid(g[1: n + len(fut)], fut) if len(fut) else np.zeros(n)
    third = correlate_valid(g[1: n + len(past)], past) if len(past) else np.zeros(n)
    return np.column_stack([first, third])


def hhat_finite(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq, n: int) -> np.ndarray:
    """``hhat_{k,n}`` for ``k = 1..n``.

    The horizon sums ``sum_m h_{-m} phi^m_{k,n}`` and
    ``sum_m h_{n-1+m} phi^m_{n+1-k,n}`` are linear in the right-hand side of
    the Toeplitz system, so both are obtained by solving with the combined
    right-hand sides; the second uses the reversal symmetry of the backward
    predictor.
    """
    check_compatible(filt, spec)
    if n < 1:
        raise ValueError("n must be >= 1")
    rhs = _two_rhs(filt, gamma, n)
    step = None
    for step in levinson_path(gamma.gamma[: n + 1], rhs, n):
        pass
    assert step is not None
    sol = step.solution
    return sol[:, 0] + filt.h(np.arange(0, n)) + sol[::-1, 1]


def hhat_finite_path(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq,
                     n_values: list[int]) -> dict[int, np.ndarray]:
    """``hhat_{.,n}`` for several ``n`` (one solve each)."""
    return {n: hhat_finite(filt, spec, gamma, n) for n in n_values}


def target_covariances(filt: FilterSpec, gamma: AutocovSeq, n: int) -> np.ndarray:
    """``c_j = cov(Y_n, X_{n+1-j}) = sum_k h_k gamma(j - 1 - k)`` for ``j = 1..n``."""
    lo, hi = filt.lo, filt.hi
    need = max(abs(n - 1 - lo), abs(hi))
    gamma.require(need)
    g = gamma.gamma
    # lags j-1-k for k = lo..hi, j = 1..n; span -hi .. n-1-lo
    lags = np.arange(-hi, n - lo)
    two = g[np.abs(lags)]
    return correlate_valid(two, filt.taps[::-1])


def hhat_finite_projection(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq,
                           n: int) -> np.ndarray:
    """``hhat_{.,n}`` as the direct projection ``T_n^{-1} c`` (reference route)."""
    check_compatible(filt, spec)
    c = target_covariances(filt, gamma, n)
    step = None
    for step in levinson_path(gamma.gamma[: n + 1], c, n):
        pass
    assert step is not None
    return step.solution[:, 0].copy()


def l1_diff(hinf: np.ndarray, hfin: np.ndarray, n: int) -> float:
    """``sum_{k<=n} |hinf_k - hfin_k|``."""
    if len(hinf) < n or len(hfin) < n:
        raise LengthMismatch(f"vectors of length {len(hinf)} and {len(hfin)} do not cover n={n}")
    return float(np.abs(np.asarray(hinf)[:n] - np.asarray(hfin)[:n]).sum())


def future_part_difference(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq, n: int,
                           extra: int | None = None) -> np.ndarray:
    """``sum_m h_{-m} (phi^m_{k,n} - phi^m_k)`` for ``k = 1..n``, free of cancellation.

    With ``F_k = sum_m h_{-m} phi^m_k`` the difference solves
    ``T_n x = r``, ``r_j = sum_{k>n} F_k gamma(k-j)``.  The ``F_k`` for
    ``k > n`` are formed by direct dot products so that tiny values keep
    their relative accuracy.  Meant for geometrically decaying ``phi``;
    ``extra`` is the number of tail terms kept in ``r``.
    """
    check_compatible(filt, spec)
    fut = filt.future
    count = len(fut)
    if count == 0:
        return np.zeros(n)
    if extra is None:
        if spec.memory.is_long:
            raise TruncationInsufficient("long-memory tails need an explicit 'extra' length")
        rate = spec.phi_rate
        extra = (int(math.ceil(math.log(1e-22) / math.log(max(rate, 1e-3)))) + 8
                 if rate > 0.0 else len(spec.ar) + 1)
    psi = ma_inf_coeffs(spec, count)
    phi = ar_inf_coeffs(spec, n + extra + count + 1)
    w = correlate_valid(np.concatenate([fut, np.zeros(count - 1)]), psi.values[:count])
    windows = np.lib.stride_tricks.sliding_window_view(phi.values[n + 1: n + extra + count], count)
    tail = windows @ w  # F_k for k = n+1 .. n+extra
    gamma.require(n + extra - 1)
    j = np.arange(1, n + 1)
    k = np.arange(n + 1, n + extra + 1)
    r = gamma.gamma[k[None, :] - j[:, None]] @ tail
    step = None
    for step in levinson_path(gamma.gamma[: n + 1], r, n):
        pass
    assert step is not None
    return step.solution[:, 0].copy()


def hhat_difference(filt: FilterSpec, spec: ProcessSpec, gamma: AutocovSeq, n: int,
                    hinf: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``hhat_{k,n} - hhat_k`` for ``k = 1..n`` and its future-horizon component.

    The difference splits into ``sum_m h_{-m} (phi^m_{k,n} - phi^m_k)`` plus
    the reversed past-tail term.  For short memory the first part comes from
    :func:`future_part_difference`, so values far below machine epsilon
    relative to the coefficients survive.  Long memory subtracts the two
    coefficient vectors directly (the differences are never tiny there).
    """
    check_compatible(filt, spec)
    rhs = _two_rhs(filt, gamma, n)
    step = None
    for step in levinson_path(gamma.gamma[: n + 1], rhs[:, 1:], n):
        pass
    assert step is not None
    third = step.solution[::-1, 0].copy()
    if spec.memory.is_long:
        hinf = hhat_infinite(filt, spec, n) if hinf is None else hinf[:n]
        total = hhat_finite(filt, spec, gamma, n) - hinf
        return total, total - third
    future = future_part_difference(filt, spec, gamma, n)
    return future + third, future
