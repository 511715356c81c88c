"""Window functions and real-axis Gaussian-decay checks.

Windows are described by a :class:`WindowSpec` so they can be evaluated at
arbitrary (not grid-aligned) shifts.  Hermite functions are normalised to
unit L2 norm on the line and built on ``h0(t) = 2^(1/4) exp(-pi t^2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .lct import FOURIER, PAPER, lct_fast
from .signal import Grid, Signal

HERMITE_MAX_ORDER = 32
_ENVELOPE_FLOOR = 1e-14
# FFT rounding leaves a floor near 1e-15 of the peak; stay clear of it
_ENVELOPE_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class EnvelopeParams:
    """Gaussian decay ``m`` and imaginary-direction growth ``n``."""

    m: float
    n: float

    def __post_init__(self):
        if not (self.m > 0 and self.n > 0):
            raise ParameterError(f"envelope parameters must be positive, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class WindowSpec:
    """A window ``gaussian(gamma)``, ``hermite(order)`` or ``polygaussian(coeffs, gamma)``.

    ``coeffs`` are polynomial coefficients in increasing degree.
    """

    kind: str = "gaussian"
    gamma: float = 1.0
    order: int = 0
    coeffs: tuple = field(default=())

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in ("gaussian", "hermite", "polygaussian"):
            raise ParameterError(f"unknown window kind {self.kind!r}")
        if kind == "hermite":
            if int(self.order) != self.order or not 0 <= self.order <= HERMITE_MAX_ORDER:
                raise ParameterError(
                    f"Hermite order must be an integer in [0, {HERMITE_MAX_ORDER}], got {self.order}"
                )
            object.__setattr__(self, "order", int(self.order))
            object.__setattr__(self, "gamma", math.pi)
        elif not self.gamma > 0:
            raise ParameterError(f"window gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if kind == "polygaussian" and not any(self.coeffs):
            raise ParameterError("polygaussian window needs a nonzero polynomial")

    @classmethod
    def gaussian(cls, gamma: float = 1.0) -> "WindowSpec":
        return cls("gaussian", gamma=gamma)

    @classmethod
    def hermite(cls, order: int) -> "WindowSpec":
        return cls("hermite", order=order)

    @classmethod
    def polygaussian(cls, coeffs, gamma: float) -> "WindowSpec":
        return cls("polygaussian", gamma=gamma, coeffs=tuple(coeffs))

    @property
    def envelope(self) -> EnvelopeParams:
        return EnvelopeParams(self.gamma, self.gamma)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-self.gamma * t * t).astype(complex)
        if self.kind == "hermite":
            return hermite_functions(self.order, t)[-1].astype(complex)
        poly = np.polynomial.polynomial.polyval(t, np.asarray(self.coeffs))
        return poly * np.exp(-self.gamma * t * t)

    def on(self, grid: Grid) -> Signal:
        return Signal(grid, self(grid.points))

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "gamma": self.gamma}
        if self.kind == "hermite":
            return {"kind": "hermite", "order": self.order}
        coeffs = [c.real if c.imag == 0 else [c.real, c.imag] for c in self.coeffs]
        return {"kind": "polygaussian", "gamma": self.gamma, "coeffs": coeffs}

    @classmethod
    def from_dict(cls, d: dict) -> "WindowSpec":
        kind = str(d.get("kind", "gaussian")).lower()
        if kind == "gaussian":
            return cls.gaussian(float(d.get("gamma", 1.0)))
        if kind == "hermite":
            return cls.hermite(int(d.get("order", d.get("k", 0))))
        if kind == "polygaussian":
            coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in d["coeffs"]]
            return cls.polygaussian(coeffs, float(d["gamma"]))
        raise ParameterError(f"unknown window kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "WindowSpec":
        return cls.from_dict(json.loads(text))


def hermite_functions(kmax: int, t) -> np.ndarray:
    """Rows ``h_0 .. h_kmax`` evaluated at ``t``.

    Uses the orthonormal three-term recurrence in ``x = sqrt(2 pi) t``::

        h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}
    """
    if int(kmax) != kmax or not 0 <= kmax <= HERMITE_MAX_ORDER:
        raise ParameterError(f"Hermite order must be in [0, {HERMITE_MAX_ORDER}], got {kmax}")
    t = np.asarray(t, dtype=float)
    x = math.sqrt(2.0 * math.pi) * t
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 2.0 ** 0.25 * np.exp(-math.pi * t * t)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def make_gaussian(gamma: float, grid: Grid) -> Signal:
    """Samples of ``exp(-gamma t^2)``."""
    return WindowSpec.gaussian(gamma).on(grid)


def make_hermite(k: int, grid: Grid) -> Signal:
    """Samples of the ``k``-th Hermite function."""
    return WindowSpec.hermite(k).on(grid)


def make_window(spec: WindowSpec, grid: Grid) -> Signal:
    return spec.on(grid)


def _upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull of points sorted by ``x``."""
    hull: list[int] = []
    for i in range(x.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (x[i1] - x[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (x[i] - x[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull)


def envelope_fit(f: Signal) -> tuple[float, float]:
    """Estimate a Gaussian envelope ``|f(t)| <= C exp(-m t^2)``.

    The decay rate comes from a least-squares fit of ``log|f|`` against
    ``(1, -t^2, log t^2)`` on the upper convex hull of the points
    ``(t^2, log|f|)``, restricted to ``t != 0`` and samples with
    ``|f| > max(1e-14, 1e-12 * max|f|)``.  The hull discards the dips at
    zeros of a polynomial factor and the logarithmic column absorbs its
    growth, so polynomial-times-Gaussian signals report the Gaussian rate.
    Only hull points with ``t^2`` beyond a quarter of the largest retained
    ``t^2`` enter the fit.  ``C`` is then the smallest constant for which the
    bound holds on every retained sample.

    Returns
    -------
    (m_hat, C)
    """
    mag = np.abs(f.samples)
    if not np.any(mag > 0):
        raise ParameterError("envelope_fit needs a nonzero signal")
    keep = (mag > max(_ENVELOPE_FLOOR, _ENVELOPE_REL_FLOOR * mag.max())) & (f.t != 0)
    s = f.t[keep] ** 2
    y = np.log(mag[keep])
    order = np.argsort(s, kind="stable")
    s, y = s[order], y[order]
    # the hull only needs the largest log|f| per distinct t^2
    uniq, start = np.unique(s, return_index=True)
    ymax = np.maximum.reduceat(y, start)
    hull = _upper_hull(uniq, ymax)
    hs, hy = uniq[hull], ymax[hull]
    # lower-order polynomial terms bend the curve near the origin
    tail = hs >= 0.25 * hs.max()
    if np.count_nonzero(tail) >= 4:
        hs, hy = hs[tail], hy[tail]
    if hs.size >= 4:
        design = np.column_stack([np.ones_like(hs), -hs, np.log(hs)])
    elif hs.size >= 2:
        design = np.column_stack([np.ones_like(hs), -hs])
    else:
        raise ParameterError("envelope_fit needs decaying tails on at least two distinct |t|")
    coef, *_ = np.linalg.lstsq(design, hy, rcond=None)
    m_hat = float(coef[1])
    sig = mag > max(_ENVELOPE_FLOOR, _ENVELOPE_REL_FLOOR * mag.max())
    logC = np.max(np.log(mag[sig]) + m_hat * f.t[sig] ** 2)
    return m_hat, float(np.exp(logC))


def check_fourier_decay(f: Signal, n: float, *, rel_floor: float = 1e-8) -> float:
    """Largest log-excess of ``|F f|`` over ``C exp(-w^2 / (4n))``.

    ``C = C_f * sqrt(pi / m)`` with ``(m, C_f)`` the real-line envelope of
    ``f`` from :func:`envelope_fit`; this is the constant a Gaussian bound on
    ``f`` passes to its Fourier transform.  Frequencies where ``|F f|`` is
    below ``rel_floor`` times its peak are ignored.  A value ``<= 0`` means
    the decay bound holds on the grid.
    """
    if not n > 0:
        raise ParameterError(f"decay parameter n must be positive, got {n}")
    if not np.any(f.samples):
        return -math.inf
    m, C_f = envelope_fit(f)
    F = lct_fast(FOURIER, PAPER, f)
    w = F.t
    mag = np.abs(F.samples)
    keep = mag > rel_floor * mag.max()
    C = C_f * math.sqrt(math.pi / m)
    excess = np.log(mag[keep]) - math.log(C) + w[keep] ** 2 / (4.0 * n)
    return float(excess.max())


def fourier_decay_rate(f: Signal) -> float:
    """Gaussian decay rate of ``|F f|`` measured with :func:`envelope_fit`."""
    return envelope_fit(lct_fast(FOURIER, PAPER, f))[0]
