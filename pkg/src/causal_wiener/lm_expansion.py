"""Series representation of finite predictor coefficients and Baxter constants.

The finite predictor admits an expansion in iterated Hankel-type kernels
built from ``beta_N = sum_v psi_v phi_{N+v}``::

    delta_0(n, u, v)     = [u == v]
    delta_{k+1}(n, u, v) = sum_w beta_{n+v+w} delta_k(n, u, w)
    b_k^m(n, j)          = sum_{v<=m} psi_{m-v} sum_u phi_{j+u} delta_{k-1}(n+1, u, v)

and ``phi^m_{j,n} = sum_k g_k^{m-1}(n, j)`` where ``g_k`` evaluates ``b_k`` at
``j`` for odd ``k`` and at ``n + 1 - j`` for even ``k``.

Infinite sums over lattice indices are handled by a Nystrom rule: the first
``exact`` integers are summed term by term and the remainder
``sum_{u >= P} F(u)`` is replaced by ``int_{P-1/2}^inf F(x) dx``, evaluated by
Gauss-Legendre panels in ``log x``.  This needs smooth extensions of
``psi``, ``phi`` and ``beta`` to real arguments, which exist in closed form
for fractional noise.  Short-memory processes decay geometrically, so their
lattice is just a long enough run of integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConstraintViolated, SeriesNotConverging, TruncationInsufficient
from .process import (CoeffSeq, ProcessSpec, ar_inf_coeffs, ma_inf_coeffs, phi_at, psi_at,
                      weighted_norm)


# ---------------------------------------------------------------------------
# f_k(0) coefficients

@dataclass(frozen=True, eq=False)
class FCoeffs:
    """``values[k-1] = f_k(0)``.

    Odd coefficients are those of ``arcsin(x)/pi``, even ones those of its square.
    """

    values: np.ndarray

    def odd_sum(self, x: float) -> float:
        k = np.arange(1, len(self.values) + 1)
        odd = k % 2 == 1
        return float(np.sum(self.values[odd] * x ** k[odd]))

    def even_sum(self, x: float) -> float:
        k = np.arange(1, len(self.values) + 1)
        even = k % 2 == 0
        return float(np.sum(self.values[even] * x ** k[even]))

    def weighted_sum(self, x: float) -> float:
        k = np.arange(1, len(self.values) + 1)
        return float(np.sum(self.values * x ** k))


def f_coeffs(length: int) -> FCoeffs:
    if length < 1:
        raise ValueError("length must be >= 1")
    n_odd = (length + 1) // 2
    j = np.arange(1, n_odd)
    central = np.concatenate([[1.0], np.cumprod((2.0 * j - 1.0) / (2.0 * j))])  # C(2j,j)/4^j
    odd = central / (math.pi * (2.0 * np.arange(n_odd) + 1.0))
    # (sum_i o_i x^{2i+1})^2 = sum_k x^{2k+2} sum_{i+l=k} o_i o_l
    even = np.convolve(odd, odd)[: length // 2]
    values = np.empty(length)
    values[0::2] = odd
    values[1::2] = even
    return FCoeffs(values)


def f_series_closed_form(x: float) -> float:
    """``sum_k f_k(0) x^k`` for ``|x| <= 1``."""
    s = math.asin(x) / math.pi
    return s + s * s


# ---------------------------------------------------------------------------
# beta sequence

def beta_seq(psi: CoeffSeq, phi: CoeffSeq, max_n: int, trunc: int) -> tuple[np.ndarray, float]:
    """``beta_n = sum_{v<trunc} psi_v phi_{n+v}`` for ``n = 0..max_n`` and a tail bound.

    The bound covers ``sum_{v>=trunc} |psi_v phi_{n+v}|`` uniformly in ``n``.
    """
    if len(psi) < trunc or len(phi) < max_n + trunc:
        raise TruncationInsufficient(
            f"beta needs psi of length {trunc} and phi of length {max_n + trunc}")
    p = psi.values[:trunc]
    out = np.array([float(np.dot(p, phi.values[n: n + trunc])) for n in range(max_n + 1)])
    return out, _beta_tail(psi, phi, trunc)


def _beta_tail(psi: CoeffSeq, phi: CoeffSeq, trunc: int) -> float:
    if psi.tail_model.kind == "polynomial" and phi.tail_model.kind == "polynomial":
        # |psi_v| <= a v^-p, |phi_w| <= b w^-q, v,w >= trunc: integral test
        a, b = psi.tail_constant(), phi.tail_constant()
        ex = psi.tail_model.rate + phi.tail_model.rate
        return a * b * (trunc - 0.5) ** (1.0 - ex) / (ex - 1.0)
    return psi.abs_tail(trunc) * float(np.abs(phi.values[1:]).max(initial=0.0))


def fractional_beta(d: float, x: np.ndarray | float) -> np.ndarray:
    """Closed form of ``beta`` for fractional noise: ``sin(pi d) / (pi (x - d))``."""
    return math.sin(math.pi * d) / (math.pi * (np.asarray(x, dtype=float) - d))


# ---------------------------------------------------------------------------
# lattice and kernel

@dataclass(frozen=True, eq=False)
class Lattice:
    """Quadrature nodes for sums over ``u = 0, 1, 2, ...``; the first ``exact`` are integers."""

    nodes: np.ndarray
    weights: np.ndarray
    exact: int

    @classmethod
    def integers(cls, count: int) -> Lattice:
        return cls(np.arange(count, dtype=float), np.ones(count), count)

    @classmethod
    def with_tail(cls, exact: int = 2048, panels: int = 40, width: float = 1.0,
                  order: int = 8) -> Lattice:
        xi, wi = np.polynomial.legendre.leggauss(order)
        s = np.concatenate([p * width + (xi + 1.0) * width / 2.0 for p in range(panels)])
        ws = np.tile(wi * width / 2.0, panels)
        x = (exact - 0.5) * np.exp(s)
        return cls(np.concatenate([np.arange(exact, dtype=float), x]),
                   np.concatenate([np.ones(exact), ws * x]), exact)


class Kernel:
    """``psi``, ``phi`` and ``beta`` on a lattice for one process."""

    def __init__(self, spec: ProcessSpec, lattice: Lattice | None = None, max_j: int = 0):
        self.spec = spec
        if spec.memory.is_long:
            if spec.ar or spec.ma:
                raise ValueError("the series expansion supports fractional noise ARFIMA(0,d,0) "
                                 "and short-memory processes only")
            self.lattice = lattice or Lattice.with_tail()
        else:
            self.lattice = lattice or Lattice.integers(_short_lattice_size(spec))
        lat = self.lattice
        self.max_j = max_j
        need = lat.exact + max_j + 2
        self._psi = ma_inf_coeffs(spec, lat.exact + 1)
        self._phi = ar_inf_coeffs(spec, need + lat.exact)
        tail = lat.nodes[lat.exact:]
        self.psi_nodes = np.concatenate([self._psi.values[: lat.exact],
                                         psi_at(spec, tail) if tail.size else []])
        if not spec.memory.is_long:
            self._beta_int, _ = beta_seq(self._psi, self._phi, need, lat.exact)

    @property
    def psi(self) -> CoeffSeq:
        return self._psi

    def phi_shifted(self, j: np.ndarray) -> np.ndarray:
        """Matrix ``phi(j_i + node_u) * weight_u``."""
        lat = self.lattice
        j = np.asarray(j, dtype=int)
        if j.size and j.max() > self.max_j:
            raise ValueError("kernel built for smaller j")
        ints = self._phi.values[j[:, None] + np.arange(lat.exact)[None, :]]
        tail = lat.nodes[lat.exact:]
        if tail.size:
            ints = np.concatenate([ints, phi_at(self.spec, j[:, None] + tail[None, :])], axis=1)
        return ints * lat.weights[None, :]

    def beta(self, x: np.ndarray) -> np.ndarray:
        if self.spec.memory.is_long:
            return fractional_beta(self.spec.d, x)
        idx = np.rint(x).astype(int)
        out = np.zeros(idx.shape)
        ok = idx < len(self._beta_int)
        out[ok] = self._beta_int[idx[ok]]
        return out

    def hankel(self, n: int) -> np.ndarray:
        """Weighted operator ``H[u, w] = beta(n + z_u + z_w) * omega_w``."""
        z = self.lattice.nodes
        return self.beta(n + z[:, None] + z[None, :]) * self.lattice.weights[None, :]


def _short_lattice_size(spec: ProcessSpec) -> int:
    rate = max(spec.phi_rate, spec.psi_rate)
    order = max(len(spec.ar), len(spec.ma_poly) - 1)
    if rate <= 0.0:
        return order + 2
    return min(int(math.ceil(math.log(1e-20) / math.log(rate))) + 2 * order + 8, 8192)


# ---------------------------------------------------------------------------
# delta and b

@dataclass(eq=False)
class DeltaCache:
    """Rows ``delta_k(n, u, .)`` for ``u <= u_max`` on the kernel lattice, filled lazily.

    Keyed per fixed ``n``; use one cache per thread.
    """

    kernel: Kernel
    n: int
    max_k: int
    u_max: int = 16
    _rows: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _hankel: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.u_max >= self.kernel.lattice.exact:
            raise ValueError("u_max must lie inside the integer part of the lattice")

    def rows(self, k: int) -> np.ndarray:
        if k < 0 or k > self.max_k:
            raise ValueError(f"k must lie in 0..{self.max_k}")
        if k not in self._rows:
            if k == 0:
                size = len(self.kernel.lattice.nodes)
                self._rows[0] = np.eye(self.u_max + 1, size)
            else:
                if self._hankel is None:
                    self._hankel = self.kernel.hankel(self.n)
                # delta_k(u, v) = sum_w delta_{k-1}(u, w) omega_w beta(n + w + v)
                self._rows[k] = self.rows(k - 1) @ self._hankel.T
        return self._rows[k]

    def delta(self, k: int, u: int, v: int) -> float:
        if u > v:
            u, v = v, u
        if u > self.u_max or v >= self.kernel.lattice.exact:
            raise ValueError("indices outside the cached range")
        return float(self.rows(k)[u, v])


def delta_k(cache: DeltaCache, k: int, u: int, v: int) -> float:
    return cache.delta(k, u, v)


def b_km(cache: DeltaCache, k: int, m: int, j: int) -> float:
    """``b_k^m(n, j)`` for the cache built at ``n + 1``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if m > cache.u_max:
        raise ValueError("m exceeds the cached u range")
    kern = cache.kernel
    rows = cache.rows(k - 1)[: m + 1]  # rows v = 0..m
    psi_rev = kern.psi.values[m::-1]  # psi_{m-v}
    weighted_phi = kern.phi_shifted(np.array([j]))[0]
    return float(psi_rev @ (rows @ weighted_phi))


# ---------------------------------------------------------------------------
# the series

@dataclass(eq=False)
class SeriesResult:
    """Partial sums of the expansion for ``j = 1..n``."""

    values: np.ndarray
    terms: int
    remainder: float
    ratio: float


def finite_predictor_series(spec: ProcessSpec, n: int, m: int, *, tol: float = 1e-17,
                            max_terms: int = 5000, lattice: Lattice | None = None,
                            kernel: Kernel | None = None) -> SeriesResult:
    """``phi^m_{j,n}`` for ``j = 1..n`` from the iterated-kernel expansion.

    Terms are summed until their largest entry drops below ``tol``; the
    remainder estimate extrapolates the observed geometric ratio.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if kernel is None and lattice is None and not spec.memory.is_long:
        # finite-support processes get a tiny lattice; it must still hold psi_0..psi_{m-1}
        lattice = Lattice.integers(max(_short_lattice_size(spec), m + 1))
    kern = kernel or Kernel(spec, lattice, max_j=n)
    if kern.max_j < n:
        raise ValueError("kernel built for smaller n")
    if m > kern.lattice.exact:
        raise ValueError("m exceeds the integer part of the lattice")
    hankel = kern.hankel(n + 1)
    phi_mat = kern.phi_shifted(np.arange(1, n + 1))
    y = np.zeros(len(kern.lattice.nodes))
    y[:m] = kern.psi.values[m - 1::-1]
    total = np.zeros(n)
    norms: list[float] = []
    row_l1 = float(np.abs(phi_mat).sum(axis=1).max())
    for k in range(1, max_terms + 1):
        term = phi_mat @ y
        total += term if k % 2 else term[::-1]
        size = float(np.max(np.abs(term)))
        norms.append(size)
        y = hankel @ y
        # a zero term alone proves nothing; the next one is bounded through y
        if size <= tol and row_l1 * float(np.max(np.abs(y))) <= tol:
            return SeriesResult(total, k, _remainder(norms), _ratio(norms))
        if k >= 12 and _ratio(norms) >= 1.0:
            raise SeriesNotConverging(f"term ratio {_ratio(norms):.4f} after {k} terms")
    raise SeriesNotConverging(f"no convergence to {tol:g} after {max_terms} terms")


def _ratio(norms: list[float]) -> float:
    tail = [x for x in norms[-6:] if x > 0.0]
    if len(tail) < 2:
        return 0.0
    return max(b / a for a, b in zip(tail, tail[1:]))


def _remainder(norms: list[float]) -> float:
    q = _ratio(norms)
    if q >= 1.0:
        return math.inf
    return norms[-1] * q / (1.0 - q)


# ---------------------------------------------------------------------------
# constants

@dataclass(eq=False)
class LmConstants:
    """Constants of the uniform Baxter inequalities.

    Short-memory fields (``C1``, ``N1``) and long-memory fields (``K1``..``K4``,
    ``C2``, ``C3``) are ``None`` when they do not apply.
    """

    d: float
    r: float
    epsilon: float
    K1: float | None = None
    K2: float | None = None
    K3: float | None = None
    K4: float | None = None
    C1: float | None = None
    C2: float | None = None
    C3: float | None = None
    N1: int | None = None
    psi_norm: float | None = None
    phi_norm: float | None = None
    probe: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        keys = ("d", "r", "epsilon", "K1", "K2", "K3", "K4", "C1", "C2", "C3", "N1",
                "psi_norm", "phi_norm")
        out = {k: getattr(self, k) for k in keys}
        out["probe"] = dict(self.probe)
        return out


def assemble_c2(d: float, r: float, k1: float, k3: float, fsum: float) -> float:
    return 2.0 / (1.0 - d) * k1 * k3 * fsum


def assemble_c3(d: float, k1: float, k2: float, k4: float) -> float:
    return float(k1 * k2 * k4 * special.beta(d, 1.0 - d))


def estimate_constants(spec: ProcessSpec, epsilon: float = 0.5, r: float = 1.05,
                       probe_len: int = 10_000) -> LmConstants:
    """Numerical values of the Baxter constants for ``spec``.

    Short memory: ``C1`` and ``N1``.  Long memory: empirical suprema of the
    power-law envelopes over ``1..probe_len`` combined with their limits
    implied by the tail constants, then ``C2`` and ``C3``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if spec.memory.is_long:
        return _lm_constants(spec, epsilon, r, probe_len)
    length = max(probe_len, _short_lattice_size(spec) + 2)
    psi = ma_inf_coeffs(spec, length)
    phi = ar_inf_coeffs(spec, length)
    pn, fn = weighted_norm(psi, 0.0), weighted_norm(phi, 0.0)
    c1 = (3.0 - epsilon) / (1.0 - epsilon) * pn ** 2 * fn ** 2
    psi_sum = pn - 1.0
    tails = np.abs(phi.values)[::-1].cumsum()[::-1] + phi.tail_bound  # tails[s] = sum_{j>=s}
    n1 = None
    for n in range(1, length - 1):
        if tails[n + 1] * psi_sum <= epsilon:
            n1 = n
            break
    if n1 is None:
        raise TruncationInsufficient("N1 not reached within the probe length")
    return LmConstants(d=0.0, r=r, epsilon=epsilon, C1=c1, N1=n1, psi_norm=pn, phi_norm=fn,
                       probe={"length": length})


def _lm_constants(spec: ProcessSpec, epsilon: float, r: float, probe_len: int) -> LmConstants:
    d = spec.d
    x = r * math.sin(math.pi * d)
    if not r > 1.0 or x >= 1.0:
        raise ConstraintViolated(f"need r > 1 and r*sin(pi d) < 1, got {x:.6g}")
    length = probe_len + 2
    psi = ma_inf_coeffs(spec, length)
    phi = ar_inf_coeffs(spec, length)
    apsi, aphi = np.abs(psi.values), np.abs(phi.values)
    c_psi, c_phi = psi.tail_constant(), phi.tail_constant()

    # K1: n^d sum_{j>=n-1} |phi_j|; limit c_phi / d
    tails = aphi[::-1].cumsum()[::-1] + phi.tail_bound
    n = np.arange(1, probe_len + 1)
    k1_probe = float(np.max(n ** d * tails[np.maximum(n - 1, 0)]))
    k1_limit = c_phi / d
    # K2: |psi_j| (j+1)^{1-d}; limit c_psi
    j = np.arange(length)
    k2_probe = float(np.max(apsi * (j + 1.0) ** (1.0 - d)))
    k2_limit = c_psi
    # K3: m^-d sum_{1<=j<=m} |psi_j|; limit c_psi / d
    partial = np.cumsum(apsi[1: probe_len + 1])
    k3_probe = float(np.max(partial / n ** d))
    k3_limit = c_psi / d
    # K4: Riemann-sum to beta-integral ratio, tends to 1
    k4_probe = _k4_sup(d, probe_len)
    k4 = max(k4_probe, 1.0)

    k1, k2, k3 = max(k1_probe, k1_limit), max(k2_probe, k2_limit), max(k3_probe, k3_limit)
    fsum = f_series_closed_form(x)
    c2 = assemble_c2(d, r, k1, k3, fsum)
    c3 = assemble_c3(d, k1, k2, k4)
    probe = {"length": probe_len,
             "K1": {"probe": k1_probe, "limit": k1_limit},
             "K2": {"probe": k2_probe, "limit": k2_limit},
             "K3": {"probe": k3_probe, "limit": k3_limit},
             "K4": {"probe": k4_probe, "limit": 1.0},
             "f_sum": fsum}
    return LmConstants(d=d, r=r, epsilon=epsilon, K1=k1, K2=k2, K3=k3, K4=k4, C2=c2, C3=c3,
                       probe=probe)


def k4_ratio(d: float, m: int) -> float:
    """Right-endpoint Riemann sum of ``x^{d-1} (1 + 1/m - x)^{-d}`` over ``B(d, 1-d)``."""
    t = np.arange(1, m + 1) / m
    total = np.sum(t ** (d - 1.0) * (1.0 + 1.0 / m - t) ** (-d)) / m
    return float(total / special.beta(d, 1.0 - d))


def _k4_sup(d: float, probe_len: int) -> float:
    dense = np.arange(1, min(probe_len, 2048) + 1)
    sparse = np.unique(np.geomspace(2048, max(probe_len, 2048), 64).astype(int))
    ms = np.unique(np.concatenate([dense, sparse[sparse <= probe_len]]))
    return max(k4_ratio(d, int(m)) for m in ms)
