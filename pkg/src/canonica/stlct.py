"""Short-time linear canonical transform and its structural identities.

``V_g^A f(x, mu) = L_A(f * conj(T_x g))(mu)``.  The window ``g`` is either a
sampled :class:`~canonica.signal.Signal` (shifts must then be grid-aligned)
or a :class:`~canonica.windows.WindowSpec`, which is evaluated analytically
at ``t - x`` and so accepts any shift.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import AlignmentError, GridMismatchError
from .lct import (
    ALIGN_RTOL,
    PAPER,
    UNITARY,
    LctParams,
    NormalizationMode,
    _require_b,
    generalized_modulation,
    induced_grid,
    kernel_phase,
    lct_at,
    lct_fast,
    prefactor,
    translate,
)
from .signal import Signal, _require_same_grid
from .windows import WindowSpec
from ._parallel import thread_count

REL_FLOOR = 1e-9


class TfPoint(NamedTuple):
    x: float
    mu: float


def as_points(points) -> np.ndarray:
    """Coerce a sequence of ``(x, mu)`` pairs into a float array of shape (N, 2)."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("time-frequency points must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class SpectrogramSamples:
    """STLCT values (complex) or magnitudes (real) at a list of points."""

    params: LctParams
    points: np.ndarray
    values: np.ndarray
    window: WindowSpec | None = None
    mode: NormalizationMode = PAPER
    _is_magnitude: bool = field(default=False, repr=False)

    def __post_init__(self):
        pts = as_points(self.points)
        vals = np.array(self.values)
        if vals.shape != (pts.shape[0],):
            raise ValueError(f"{pts.shape[0]} points but {vals.shape} values")
        if self._is_magnitude and np.any(vals < 0):
            raise ValueError("magnitudes must be nonnegative")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def is_magnitude(self) -> bool:
        return self._is_magnitude

    def __len__(self):
        return self.points.shape[0]

    def to_csv(self, path) -> None:
        """Write ``x,mu,re,im,mag`` rows with 17 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "mu", "re", "im", "mag"])
            vals = np.asarray(self.values, dtype=complex)
            for (x, mu), v in zip(self.points, vals):
                w.writerow([_g17(x), _g17(mu), _g17(v.real), _g17(v.imag), _g17(abs(v))])


def _g17(v) -> str:
    return format(float(v), ".17g")


def magnitudes(s: SpectrogramSamples) -> SpectrogramSamples:
    """Pointwise modulus; idempotent."""
    if s.is_magnitude:
        return s
    return replace(s, values=np.abs(s.values), _is_magnitude=True)


def _shifted_window(g, f: Signal, x: float) -> np.ndarray:
    if isinstance(g, WindowSpec):
        return g(f.t - x)
    return translate(x, g).samples


def _column_values(A, mode, f, g, x, mus) -> np.ndarray:
    h = f.with_samples(f.samples * np.conj(_shifted_window(g, f, x)))
    out = np.empty(mus.size, dtype=complex)
    grid = induced_grid(A, f.grid)
    k = (mus - grid.t0) / grid.dt
    kr = np.rint(k)
    on_grid = (np.abs(k - kr) <= ALIGN_RTOL * np.maximum(1.0, np.abs(k))) & (kr >= 0) & (kr < grid.n)
    if np.any(on_grid):
        F = lct_fast(A, mode, h).samples
        out[on_grid] = F[kr[on_grid].astype(int)]
    if not np.all(on_grid):
        out[~on_grid] = lct_at(A, mode, h, mus[~on_grid])
    return out


def stlct(A: LctParams, g, f: Signal, points, mode=PAPER) -> SpectrogramSamples:
    """Evaluate ``V_g^A f`` at ``points``.

    Points are grouped by distinct ``x``; each column costs one chirp-FFT
    for the ``mu`` values on the induced grid plus direct quadrature for any
    off-grid ``mu``.  Output order follows ``points``.
    """
    _require_b(A)
    mode = NormalizationMode.parse(mode)
    if isinstance(g, Signal):
        _require_same_grid(f, g)
    pts = as_points(points)
    values = np.empty(pts.shape[0], dtype=complex)
    xs, inverse = np.unique(pts[:, 0], return_inverse=True)
    columns = [np.flatnonzero(inverse == i) for i in range(xs.size)]

    def run(i):
        idx = columns[i]
        return idx, _column_values(A, mode, f, g, xs[i], pts[idx, 1])

    workers = min(thread_count(), max(1, xs.size))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, range(xs.size)))
    else:
        results = [run(i) for i in range(xs.size)]
    for idx, vals in results:
        values[idx] = vals
    window = g if isinstance(g, WindowSpec) else None
    return SpectrogramSamples(A, pts, values, window=window, mode=mode)


def stlct_matrix(A: LctParams, g, grid, points, mode=PAPER) -> np.ndarray:
    """Matrix ``W`` with ``W @ f.samples == stlct(A, g, f, points).values``."""
    _require_b(A)
    pts = as_points(points)
    t = grid.points
    x = pts[:, 0][:, None]
    mu = pts[:, 1][:, None]
    if isinstance(g, WindowSpec):
        win = g(t[None, :] - x)
    else:
        win = np.stack([translate(xx, g).samples for xx in pts[:, 0]])
    K = np.exp(1j * kernel_phase(A, t[None, :], mu))
    return prefactor(A, mode) * grid.dt * K * np.conj(win)


def stft(g, f: Signal, points) -> np.ndarray:
    """Classical short-time Fourier transform by explicit summation.

    ``V_g f(x, w) = sum_k dt f(t_k) conj(g(t_k - x)) exp(-i w t_k)``.  Written
    independently of the LCT code so it can serve as an oracle for it.
    """
    pts = as_points(points)
    t = f.t
    dt = f.grid.dt
    out = np.empty(pts.shape[0], dtype=complex)
    for j, (x, w) in enumerate(pts):
        if isinstance(g, WindowSpec):
            win = g(t - x)
        else:
            shift = int(round(x / dt))
            if abs(x / dt - shift) > ALIGN_RTOL * max(1.0, abs(x / dt)):
                raise AlignmentError(f"window shift {x!r} is not grid-aligned")
            win = np.zeros(t.size, dtype=complex)
            src = np.arange(t.size) - shift
            ok = (src >= 0) & (src < t.size)
            win[ok] = g.samples[src[ok]]
        out[j] = dt * np.sum(f.samples * np.conj(win) * (np.cos(w * t) - 1j * np.sin(w * t)))
    return out


def gaussian_gabor_closed_form(x, omega):
    """STFT of ``exp(-t^2)`` with window ``exp(-t^2)``, 2pi-free convention.

    ``sqrt(pi/2) exp(-i x w / 2) exp(-x^2 / 2) exp(-w^2 / 8)``.
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return (
        math.sqrt(math.pi / 2.0)
        * np.exp(-0.5j * x * omega)
        * np.exp(-0.5 * x * x)
        * np.exp(-omega * omega / 8.0)
    )


def max_relative_residual(reference, other, rel_floor: float = REL_FLOOR) -> float:
    """Largest ``|ref - other| / |ref|`` over points where ``|ref| > rel_floor * peak``."""
    ref = np.asarray(reference)
    oth = np.asarray(other)
    mag = np.abs(ref)
    peak = mag.max() if mag.size else 0.0
    if peak == 0.0:
        return float(np.max(np.abs(oth), initial=0.0))
    keep = mag > rel_floor * peak
    return float(np.max(np.abs(ref[keep] - oth[keep]) / mag[keep]))


def fundamental_matrices(A: LctParams) -> tuple[LctParams, LctParams]:
    """``(B, C)`` for the rotated-plane identity.

    ``C = (0, b, -1/b, d)`` and ``B = (0, b, -1/b, 0)``.
    """
    b, d = A.b, A.d
    return LctParams(0.0, b, -1.0 / b, 0.0), LctParams(0.0, b, -1.0 / b, d)


def check_fundamental_identity(A: LctParams, g: Signal, f: Signal, points, *, outer: LctParams | None = None) -> float:
    """Residual of ``V_g^A f(x, mu) = e^{i mu (d mu - x)/b} V^B_{L_C g}(L_A f)(mu, d mu - x)``.

    Both sides use ``UNITARY`` normalisation (the identity rests on
    unitarity).  ``outer`` overrides ``B``.  Each ``x`` must lie on the time
    grid and each ``mu`` on the induced grid of ``A``.
    """
    _require_b(A)
    _require_same_grid(f, g)
    pts = as_points(points)
    B, C = fundamental_matrices(A)
    if outer is not None:
        B = outer
    mugrid = induced_grid(A, f.grid)
    bad = []
    for x, mu in pts:
        for val, grid in ((x, f.grid), (mu, mugrid)):
            k = (val - grid.t0) / grid.dt
            if abs(k - round(k)) > ALIGN_RTOL * max(1.0, abs(k)):
                bad.append((float(x), float(mu)))
                break
    if bad:
        raise AlignmentError(f"points not evaluable on the grids: {bad}")
    lhs = stlct(A, g, f, pts, mode=UNITARY).values
    if not np.any(lhs) and not np.any(f.samples):
        return 0.0
    F = lct_fast(A, UNITARY, f)
    G = lct_fast(C, UNITARY, g)
    b, d = A.b, A.d
    x, mu = pts[:, 0], pts[:, 1]
    rot = np.column_stack([mu, d * mu - x])
    rhs = np.exp(1j * mu * (d * mu - x) / b) * stlct(B, G, F, rot, mode=UNITARY).values
    return max_relative_residual(lhs, rhs)


def check_covariance(A: LctParams, g, f: Signal, u: float, tau: float, points, mode=UNITARY) -> float:
    """Residual of the covariance rule for ``M_u^A T_tau``.

    ``V_g^A(M_u^A T_tau f)(x, mu) = p e^{-i d (u^2 - mu^2)/(2b) + i tau (u - mu)/b} V_g f(x - tau, (mu - u)/b)``
    with ``p`` the mode prefactor and ``V_g`` the classical 2pi-free STFT.
    """
    _require_b(A)
    pts = as_points(points)
    shifted = generalized_modulation(A, u, translate(tau, f))
    lhs = stlct(A, g, shifted, pts, mode=mode).values
    b, d = A.b, A.d
    x, mu = pts[:, 0], pts[:, 1]
    phase = np.exp(-1j * d * (u * u - mu * mu) / (2 * b) + 1j * tau * (u - mu) / b)
    ref = stft(g, f, np.column_stack([x - tau, (mu - u) / b]))
    rhs = prefactor(A, mode) * phase * ref
    return max_relative_residual(lhs, rhs)
