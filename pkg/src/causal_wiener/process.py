"""Stationary process descriptions and their Wold machinery.

A process is described declaratively by :class:`ProcessSpec`.  From it we
derive the moving-average weights ``psi`` (with ``psi[0] == 1``), the
autoregressive weights ``phi`` (with ``phi[0] == -1`` so that
``Phi(z) = 1 - sum_{j>=1} phi_j z^j = 1 / Psi(z)``) and autocovariances.

Sign conventions for ARMA polynomials follow the usual textbook form::

    X_t - a_1 X_{t-1} - ... - a_p X_{t-p} = e_t + t_1 e_{t-1} + ... + t_q e_{t-q}

so ``ar=[0.5]`` is the AR(1) process ``X_t = 0.5 X_{t-1} + e_t``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy import signal, special

from .errors import DivergentNorm, InvalidRoots, TruncationInsufficient

ROOT_TOL = 1e-8
KINDS = ("white_noise", "arma", "arfima", "raw_ma")

# Relative size below which geometrically decaying coefficients are dropped.
_GEOM_CUTOFF = 1e-19


@dataclass(frozen=True)
class Memory:
    """Memory class of a process: short with weight exponent ``alpha`` or long with ``d``."""

    kind: Literal["short", "long"]
    alpha: float | None = None
    d: float = 0.0

    @property
    def is_long(self) -> bool:
        return self.kind == "long"


@dataclass(frozen=True)
class ProcessSpec:
    """Declarative description of a purely nondeterministic stationary process.

    ``alpha`` is caller-declared metadata for short-memory processes; ``None``
    means the coefficients decay geometrically and every exponent applies.
    """

    kind: str
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    d: float = 0.0
    psi: tuple[float, ...] = ()
    sigma2: float = 1.0
    alpha: float | None = None

    def __post_init__(self) -> None:
        for name in ("ar", "ma", "psi"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if self.alpha is not None and self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.kind == "arfima":
            if not 0.0 < self.d < 0.5:
                raise ValueError("ARFIMA requires 0 < d < 0.5")
        elif self.d != 0.0:
            raise ValueError("d is only meaningful for ARFIMA processes")
        if self.kind == "white_noise" and (self.ar or self.ma or self.psi):
            raise ValueError("white noise takes no coefficients")
        if self.kind in ("arma", "arfima") and self.psi:
            raise ValueError("psi is only used by raw_ma processes")
        if self.kind == "raw_ma" and (self.ar or self.ma):
            raise ValueError("raw_ma takes psi weights only")
        _check_roots(_ar_poly(self.ar), "AR")
        _check_roots(self.ma_poly, "MA")

    # constructors -----------------------------------------------------
    @classmethod
    def white_noise(cls, sigma2: float = 1.0) -> ProcessSpec:
        return cls("white_noise", sigma2=sigma2)

    @classmethod
    def arma(cls, ar: Sequence[float] = (), ma: Sequence[float] = (), sigma2: float = 1.0,
             alpha: float | None = None) -> ProcessSpec:
        return cls("arma", ar=tuple(ar), ma=tuple(ma), sigma2=sigma2, alpha=alpha)

    @classmethod
    def arfima(cls, d: float, ar: Sequence[float] = (), ma: Sequence[float] = (),
               sigma2: float = 1.0) -> ProcessSpec:
        return cls("arfima", ar=tuple(ar), ma=tuple(ma), d=d, sigma2=sigma2)

    @classmethod
    def raw_ma(cls, psi: Sequence[float], sigma2: float = 1.0,
               alpha: float | None = None) -> ProcessSpec:
        """Finite moving average with weights ``1, psi[0], psi[1], ...``."""
        return cls("raw_ma", psi=tuple(psi), sigma2=sigma2, alpha=alpha)

    # derived properties ----------------------------------------------
    @property
    def memory(self) -> Memory:
        if self.kind == "arfima":
            return Memory("long", d=self.d)
        return Memory("short", alpha=self.alpha)

    @property
    def ar_poly(self) -> np.ndarray:
        return _ar_poly(self.ar)

    @property
    def ma_poly(self) -> np.ndarray:
        if self.kind == "raw_ma":
            return np.concatenate([[1.0], self.psi])
        return np.concatenate([[1.0], self.ma])

    @property
    def psi_rate(self) -> float:
        """Geometric decay rate of the ARMA part of psi (0 for finite support)."""
        return _decay_rate(self.ar_poly)

    @property
    def phi_rate(self) -> float:
        return _decay_rate(self.ma_poly)

    # serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "sigma2": self.sigma2}
        if self.kind in ("arma", "arfima"):
            out["ar"] = list(self.ar)
            out["ma"] = list(self.ma)
        if self.kind == "arfima":
            out["d"] = self.d
        if self.kind == "raw_ma":
            out["psi"] = list(self.psi)
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ProcessSpec:
        data = dict(data)
        kind = str(data.pop("kind")).lower().replace("-", "_")
        kind = {"whitenoise": "white_noise", "rawma": "raw_ma"}.get(kind, kind)
        allowed = {"ar", "ma", "d", "psi", "sigma2", "alpha"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown process fields: {sorted(unknown)}")
        return cls(kind, **data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ProcessSpec:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TailModel:
    """Decay law of a coefficient tail: ``|a_j| <= C rho^j`` or ``|a_j| ~ c j^(-exponent)``."""

    kind: Literal["geometric", "polynomial", "zero"]
    rate: float = 0.0


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """Truncated one-sided coefficient sequence with a bound on the dropped tail."""

    values: np.ndarray
    tail_model: TailModel
    tail_bound: float = 0.0

    @property
    def truncation_len(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def abs_tail(self, start: int) -> float:
        """Upper estimate of ``sum_{j >= start} |a_j|``."""
        start = max(int(start), 0)
        return float(np.abs(self.values[start:]).sum()) + self.tail_bound

    def tail_constant(self) -> float:
        """Constant ``C`` of the tail law fitted to the trailing half of ``values``."""
        return _tail_constant(self.values, self.tail_model)


@dataclass(frozen=True, eq=False)
class AutocovSeq:
    """Autocovariances ``gamma[k]`` for lags ``0..max_lag``."""

    gamma: np.ndarray
    method: str
    error_bound: float = 0.0

    @property
    def max_lag(self) -> int:
        return len(self.gamma) - 1

    def __len__(self) -> int:
        return len(self.gamma)

    def require(self, max_lag: int) -> None:
        if max_lag > self.max_lag:
            raise TruncationInsufficient(
                f"autocovariances cover lag {self.max_lag}, lag {max_lag} needed")


# ---------------------------------------------------------------------------
# polynomial helpers

def _ar_poly(ar: Sequence[float]) -> np.ndarray:
    return np.concatenate([[1.0], -np.asarray(ar, dtype=float)])


def _inverse_roots(poly: np.ndarray) -> np.ndarray:
    """Reciprocals of the nonzero roots of ``sum_i poly[i] z^i`` (``poly[0] = 1``).

    These are the roots of the reversed, monic polynomial, which stays well
    conditioned even when the top coefficient is tiny.
    """
    poly = np.asarray(poly, dtype=float)
    if len(np.trim_zeros(poly, "b")) <= 1:
        return np.empty(0)
    return np.roots(poly)


def _check_roots(poly: np.ndarray, label: str) -> None:
    inv = _inverse_roots(poly)
    if inv.size and np.max(np.abs(inv)) >= 1.0 / (1.0 + ROOT_TOL):
        raise InvalidRoots(
            f"{label} polynomial has a root of modulus {1.0 / np.max(np.abs(inv)):.6g} <= 1")


def _decay_rate(poly: np.ndarray) -> float:
    inv = _inverse_roots(poly)
    return float(np.max(np.abs(inv))) if inv.size else 0.0


def _rational_series(num: np.ndarray, den: np.ndarray, length: int) -> np.ndarray:
    """First ``length`` power-series coefficients of ``num(z) / den(z)``."""
    impulse = np.zeros(length)
    impulse[0] = 1.0
    return signal.lfilter(num, den, impulse)


def _geometric_len(rate: float, extra: int) -> int:
    """Length after which a rate-``rate`` geometric sequence is negligible."""
    if rate <= 0.0:
        return extra + 1
    return int(math.ceil(math.log(_GEOM_CUTOFF) / math.log(rate))) + 4 * extra + 16


def frac_ma_coeffs(d: float, length: int) -> np.ndarray:
    """Coefficients of ``(1 - z)^(-d)``."""
    j = np.arange(1, length, dtype=float)
    return np.concatenate([[1.0], np.cumprod((j - 1.0 + d) / j)])


def frac_diff_coeffs(d: float, length: int) -> np.ndarray:
    """Coefficients of ``(1 - z)^d``."""
    j = np.arange(1, length, dtype=float)
    return np.concatenate([[1.0], np.cumprod((j - 1.0 - d) / j)])


def _short_part(spec: ProcessSpec, which: Literal["psi", "inv"], length: int) -> np.ndarray:
    """Power series of MA/AR (``psi``) or AR/MA (``inv``) for the rational part."""
    if which == "psi":
        return _rational_series(spec.ma_poly, spec.ar_poly, length)
    return _rational_series(spec.ar_poly, spec.ma_poly, length)


def _arfima_series(spec: ProcessSpec, which: Literal["psi", "inv"], length: int) -> np.ndarray:
    frac = (frac_ma_coeffs if which == "psi" else frac_diff_coeffs)(spec.d, length)
    rate = spec.psi_rate if which == "psi" else spec.phi_rate
    order = max(len(spec.ar), len(spec.ma))
    short = _short_part(spec, which, min(length, _geometric_len(rate, order)))
    if len(short) == 1:
        return frac
    return np.convolve(frac, short)[:length]


# ---------------------------------------------------------------------------
# tail bookkeeping

def _tail_points(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(values)
    idx = np.arange(n // 2, n)
    mag = np.abs(values[idx])
    nz = mag > 0
    return idx[nz], mag[nz]


def _log_geometric_constant(values: np.ndarray, rate: float) -> float:
    idx, mag = _tail_points(values)
    if len(values) < 2 or rate <= 0.0 or not idx.size:
        return -math.inf
    return float(np.max(np.log(mag) - idx * math.log(rate)))


def _tail_constant(values: np.ndarray, model: TailModel) -> float:
    if model.kind == "zero" or len(values) < 2:
        return 0.0
    if model.kind == "geometric":
        log_c = _log_geometric_constant(values, model.rate)
        # tiny rates can push the constant past the float range
        return math.exp(log_c) if log_c < 709.0 else math.inf
    idx, mag = _tail_points(values)
    if not idx.size:
        return 0.0
    return float(np.max(mag * idx.astype(float) ** model.rate))


def _tail_bound(values: np.ndarray, model: TailModel, exact_tail: float | None = None) -> float:
    """Bound on ``sum_{j >= len(values)} |a_j|``."""
    if exact_tail is not None:
        return exact_tail
    n = len(values)
    if model.kind == "geometric":
        log_c = _log_geometric_constant(values, model.rate)
        if log_c == -math.inf:
            return 0.0
        return math.exp(log_c + n * math.log(model.rate)) / (1.0 - model.rate)
    const = _tail_constant(values, model)
    if model.kind == "zero" or const == 0.0:
        return 0.0
    p = model.rate
    if p <= 1.0:
        return math.inf
    return const * (n - 0.5) ** (1.0 - p) / (p - 1.0)


def _finite_support(values: np.ndarray, full: np.ndarray) -> CoeffSeq:
    return CoeffSeq(values, TailModel("zero"), float(np.abs(full[len(values):]).sum()))


def ma_inf_coeffs(spec: ProcessSpec, length: int) -> CoeffSeq:
    """Moving-average weights ``psi_0 .. psi_{length-1}`` with ``psi_0 = 1``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if spec.kind == "white_noise":
        return CoeffSeq(np.eye(1, length).ravel(), TailModel("zero"))
    if spec.kind == "raw_ma":
        full = spec.ma_poly
        values = np.zeros(length)
        values[: min(length, len(full))] = full[:length]
        return _finite_support(values, full)
    if spec.kind == "arma":
        values = _short_part(spec, "psi", length)
        if not spec.ar:
            return _finite_support(values, spec.ma_poly)
        model = TailModel("geometric", spec.psi_rate)
        return CoeffSeq(values, model, _tail_bound(values, model))
    values = _arfima_series(spec, "psi", length)
    model = TailModel("polynomial", 1.0 - spec.d)
    return CoeffSeq(values, model, math.inf)


def ar_inf_coeffs(spec: ProcessSpec, length: int) -> CoeffSeq:
    """Autoregressive weights ``phi_0 .. phi_{length-1}`` with ``phi_0 = -1``.

    Computed as the power series of ``AR(z) / MA(z)`` (negated), i.e. the
    inverse of ``Psi`` without forming ``Psi`` first.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if spec.kind == "white_noise":
        return CoeffSeq(-np.eye(1, length).ravel(), TailModel("zero"))
    if spec.kind == "arfima":
        values = -_arfima_series(spec, "inv", length)
        model = TailModel("polynomial", 1.0 + spec.d)
        return CoeffSeq(values, model, _tail_bound(values, model))
    values = -_short_part(spec, "inv", length)
    if spec.phi_rate == 0.0:
        return _finite_support(values, -spec.ar_poly)
    model = TailModel("geometric", spec.phi_rate)
    return CoeffSeq(values, model, _tail_bound(values, model))


def weighted_norm(seq: CoeffSeq, alpha_prime: float) -> float:
    """``sum_j (1 + j)^alpha' |a_j|`` including the extrapolated tail."""
    if alpha_prime < 0:
        raise ValueError("alpha_prime must be nonnegative")
    vals = np.abs(seq.values)
    n = len(vals)
    body = float(np.sum((1.0 + np.arange(n)) ** alpha_prime * vals))
    model = seq.tail_model
    if model.kind == "polynomial":
        p = model.rate
        if p <= alpha_prime + 1.0:
            raise DivergentNorm(
                f"tail ~ j^-{p:.6g} is not summable against weight (1+j)^{alpha_prime:.6g}")
        const = seq.tail_constant()
        return body + const * (n - 0.5) ** (1.0 + alpha_prime - p) / (p - 1.0 - alpha_prime)
    if model.kind == "geometric" and seq.tail_bound > 0.0:
        const = seq.tail_constant()
        j = np.arange(n, n + 64 * _geometric_len(model.rate, 0), dtype=float)
        terms = const * (1.0 + j) ** alpha_prime * np.exp(j * math.log(model.rate))
        return body + float(terms.sum())
    return body


# ---------------------------------------------------------------------------
# continuous extensions used by quadrature over long-memory tails

def _frac_ma_at(d: float, x: np.ndarray) -> np.ndarray:
    """Gamma-function extension of ``(1-z)^(-d)`` coefficients to real ``x >= 0``."""
    return 1.0 / (special.gamma(d) * special.poch(x + d, 1.0 - d))


def _frac_diff_at(d: float, x: np.ndarray) -> np.ndarray:
    return 1.0 / (special.gamma(-d) * special.poch(x - d, 1.0 + d))


def psi_at(spec: ProcessSpec, x: np.ndarray, lead: int | None = None) -> np.ndarray:
    """Smooth extension of ``psi_j`` to real arguments ``x`` (ARFIMA only).

    Agrees with :func:`ma_inf_coeffs` at integers ``x >= lead``, where ``lead``
    is the number of retained short-memory terms.
    """
    return _extension(spec, np.asarray(x, dtype=float), "psi", lead)


def phi_at(spec: ProcessSpec, x: np.ndarray, lead: int | None = None) -> np.ndarray:
    """Smooth extension of ``phi_j`` to real arguments ``x`` (ARFIMA only)."""
    return -_extension(spec, np.asarray(x, dtype=float), "inv", lead)


def extension_lead(spec: ProcessSpec) -> int:
    """Number of short-memory terms mixed into the continuous extensions."""
    order = max(len(spec.ar), len(spec.ma))
    rate = max(spec.psi_rate, spec.phi_rate)
    return _geometric_len(rate, order) if order else 1


def _extension(spec: ProcessSpec, x: np.ndarray, which: Literal["psi", "inv"],
               lead: int | None) -> np.ndarray:
    if spec.kind != "arfima":
        raise ValueError("continuous extensions are only defined for ARFIMA processes")
    lead = extension_lead(spec) if lead is None else lead
    if np.any(x < lead - 1):
        raise ValueError(f"extension requires x >= {lead - 1}")
    base = _frac_ma_at if which == "psi" else _frac_diff_at
    short = _short_part(spec, which, lead)
    out = np.zeros_like(x)
    for i, c in enumerate(short):
        if c != 0.0:
            out += c * base(spec.d, x - i)
    return out


# ---------------------------------------------------------------------------
# autocovariances

def _fi_autocov(d: float, sigma2: float, max_lag: int) -> np.ndarray:
    k = np.arange(1, max_lag + 1, dtype=float)
    g0 = sigma2 * math.exp(special.gammaln(1.0 - 2.0 * d) - 2.0 * special.gammaln(1.0 - d))
    return g0 * np.concatenate([[1.0], np.cumprod((k - 1.0 + d) / (k - d))])


def _arma_autocov(spec: ProcessSpec, max_lag: int, sigma2: float) -> tuple[np.ndarray, float]:
    """ARMA autocovariances: direct psi products for the first lags, AR recursion after."""
    p, q = len(spec.ar), len(spec.ma_poly) - 1
    head = max(p, q)
    psi_len = _geometric_len(spec.psi_rate, head) if p else q + 1
    psi = ma_inf_coeffs(spec, psi_len)
    lags = min(head, max_lag)
    v = psi.values
    g = np.array([sigma2 * float(np.dot(v[: len(v) - k], v[k:])) for k in range(lags + 1)])
    err = sigma2 * psi.tail_bound * float(np.abs(v).sum()) * 2.0
    if max_lag <= head:
        return g, err
    if p == 0:
        return np.concatenate([g, np.zeros(max_lag - head)]), err
    # gamma(k) = sum a_i gamma(k-i) holds for k > q; continue from the last p values
    past = g[head - p + 1: head + 1][::-1]
    zi = signal.lfiltic([1.0], spec.ar_poly, past)
    rest, _ = signal.lfilter([1.0], spec.ar_poly, np.zeros(max_lag - head), zi=zi)
    return np.concatenate([g, rest]), err


def _acf_two_sided(spec: ProcessSpec) -> np.ndarray:
    """Autocovariances (unit variance) of the short part for lags ``-H..H``."""
    order = max(len(spec.ar), len(spec.ma))
    horizon = _geometric_len(spec.psi_rate, order) if spec.ar else len(spec.ma)
    short = ProcessSpec.arma(spec.ar, spec.ma)
    g, _ = _arma_autocov(short, horizon, 1.0)
    return np.concatenate([g[:0:-1], g])


def autocovariance(spec: ProcessSpec, max_lag: int, trunc: int | None = None,
                   method: str | None = None, tol: float | None = None) -> AutocovSeq:
    """Autocovariances ``gamma(0..max_lag)``.

    By default closed forms are used where they exist (white noise, pure
    fractional noise), ARMA processes use psi products plus the AR recursion,
    and general ARFIMA convolves the ARMA autocovariances with the fractional
    ones.  ``method="psi_convolution"`` forces the truncated Wold sum
    ``sigma2 * sum_{j<trunc} psi_j psi_{j+k}`` and reports its tail bound;
    ``tol`` (relative to ``gamma(0)``) turns an excessive bound into an error.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    s2 = spec.sigma2
    if method == "psi_convolution":
        return _psi_convolution(spec, max_lag, trunc, tol)
    if method not in (None, "closed_form"):
        raise ValueError(f"unknown autocovariance method {method!r}")
    if spec.kind == "white_noise":
        return AutocovSeq(np.eye(1, max_lag + 1).ravel() * s2, "closed_form")
    if spec.kind in ("arma", "raw_ma"):
        g, err = _arma_autocov(spec, max_lag, s2)
        return _finish(AutocovSeq(g, "psi_convolution", err), tol)
    fi = _fi_autocov(spec.d, s2, max_lag)
    if not spec.ar and not spec.ma:
        return AutocovSeq(fi, "closed_form")
    acf = _acf_two_sided(spec)
    h = len(acf) // 2
    fi_ext = _fi_autocov(spec.d, s2, max_lag + h)
    two_sided = np.concatenate([fi_ext[:0:-1], fi_ext])  # lags -(L+h)..(L+h)
    centre = max_lag + h
    window = two_sided[centre - h: centre + max_lag + h + 1]
    g = np.convolve(window, acf[::-1], mode="valid")
    return AutocovSeq(g, "split")


def _finish(seq: AutocovSeq, tol: float | None) -> AutocovSeq:
    if tol is not None and seq.error_bound > tol * seq.gamma[0]:
        raise TruncationInsufficient(
            f"autocovariance error bound {seq.error_bound:.3g} exceeds tolerance")
    return seq


def _psi_convolution(spec: ProcessSpec, max_lag: int, trunc: int | None,
                     tol: float | None) -> AutocovSeq:
    if trunc is None:
        raise ValueError("psi_convolution requires trunc")
    psi = ma_inf_coeffs(spec, trunc + max_lag + 1)
    v = psi.values
    head = v[:trunc]
    g = np.array([float(np.dot(head, v[k: k + trunc])) for k in range(max_lag + 1)])
    g *= spec.sigma2
    if psi.tail_model.kind == "polynomial":
        # sum_{j>=T} psi_j psi_{j+k} <= c^2 sum_{j>=T} j^{2(d-1)} ~ c^2 (T-1/2)^{2d-1}/(1-2d)
        c = psi.tail_constant()
        p = psi.tail_model.rate
        err = spec.sigma2 * c * c * (trunc - 0.5) ** (1.0 - 2.0 * p) / (2.0 * p - 1.0)
    else:
        err = spec.sigma2 * float(np.abs(v[trunc:]).sum() + psi.tail_bound) * float(np.abs(v).max())
    return _finish(AutocovSeq(g, "psi_convolution", err), tol)
