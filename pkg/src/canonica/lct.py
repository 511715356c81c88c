"""Linear canonical transform and the operators that act around it.

Conventions
-----------
For ``A = (a, b, c, d)`` with ``ad - bc = 1`` and ``b != 0``::

    L_A f(mu) = p * exp(i d mu^2 / (2b)) * sum_k dt f(t_k) exp(i a t_k^2/(2b) - i t_k mu / b)

with prefactor ``p = 1/sqrt(b)`` (``PAPER``) or ``p = 1/sqrt(2 pi b)``
(``UNITARY``).  Square roots of negative ``b`` take the principal branch,
``sqrt(b) = i sqrt(|b|)``, in every code path.  The Fourier transform is
the 2pi-free ``F f(w) = int f(t) exp(-i w t) dt``, which is ``L_A`` for
``A = (0, 1, -1, 0)`` in ``PAPER`` mode.

The chirp convolution uses ``kappa = p``: with that choice the
convolution theorem holds in both modes, and it reduces to ``1/sqrt(b)``
in ``PAPER`` mode and ``1/sqrt(2 pi b)`` in ``UNITARY`` mode.

The fast transform lives on the *induced* output grid: ``n`` points,
centred so that index ``n // 2`` is ``mu = 0``, with spacing
``2 pi |b| / (n dt)``.  On that grid the fast and direct paths evaluate
the same Riemann sum.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, GridMismatchError, ParameterError
from .signal import Grid, Signal, _require_same_grid

DET_TOL = 1e-12
EDGE_DECAY = 1e-10
ALIGN_RTOL = 1e-9
_B_ZERO = 1e-15


class NormalizationMode(enum.Enum):
    """Kernel prefactor: ``PAPER`` is the bare ``1/sqrt(b)``, ``UNITARY`` is ``1/sqrt(2 pi b)``."""

    PAPER = "paper"
    UNITARY = "unitary"

    @classmethod
    def parse(cls, value) -> "NormalizationMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown normalization mode {value!r}") from None


PAPER = NormalizationMode.PAPER
UNITARY = NormalizationMode.UNITARY


@dataclass(frozen=True)
class LctParams:
    """Parameter matrix ``[[a, b], [c, d]]`` with unit determinant."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"LCT parameter {name} must be finite")
            object.__setattr__(self, name, v)
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > DET_TOL:
            raise ParameterError(
                f"LCT parameters must satisfy ad - bc = 1, got determinant {det!r}"
            )

    @property
    def is_b_zero(self) -> bool:
        return abs(self.b) <= _B_ZERO

    def inverse(self) -> "LctParams":
        return LctParams(self.d, -self.b, -self.c, self.a)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, d: dict) -> "LctParams":
        return cls(d["a"], d["b"], d["c"], d["d"])

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))


FOURIER = LctParams(0.0, 1.0, -1.0, 0.0)


def _require_b(A: LctParams) -> None:
    if A.is_b_zero:
        raise ParameterError("this operation needs b != 0; use lct_b_zero for b = 0")


def sqrt_b(b: float) -> complex:
    """Principal square root of ``b`` (``i*sqrt|b|`` for negative ``b``)."""
    return np.sqrt(complex(b))


def prefactor(A: LctParams, mode=UNITARY) -> complex:
    _require_b(A)
    mode = NormalizationMode.parse(mode)
    root = sqrt_b(A.b)
    if mode is UNITARY:
        root *= math.sqrt(2.0 * math.pi)
    return 1.0 / root


def kernel_phase(A: LctParams, t, mu):
    """Phase ``a t^2/(2b) - t mu/b + d mu^2/(2b)`` of the LCT kernel."""
    return (A.a * t * t - 2.0 * t * mu + A.d * mu * mu) / (2.0 * A.b)


def induced_grid(A: LctParams, grid: Grid) -> Grid:
    """Output grid of :func:`lct_fast` for inputs on ``grid``."""
    _require_b(A)
    dmu = 2.0 * math.pi * abs(A.b) / (grid.n * grid.dt)
    return Grid.centered(dmu, grid.n)


def grid_index(grid: Grid, value: float, *, what: str = "value") -> int:
    """Index of ``value`` on ``grid``; raises if it is not a grid point."""
    k = (value - grid.t0) / grid.dt
    kr = round(k)
    if abs(k - kr) > ALIGN_RTOL * max(1.0, abs(k)) or not 0 <= kr < grid.n:
        nearest = grid.point(min(max(kr, 0), grid.n - 1))
        raise AlignmentError(
            f"{what} {value!r} is not on the grid; nearest grid point is {nearest!r}"
        )
    return int(kr)


def _steps(tau: float, dt: float, *, what: str = "shift") -> int:
    k = tau / dt
    kr = round(k)
    if abs(k - kr) > ALIGN_RTOL * max(1.0, abs(k)):
        raise AlignmentError(
            f"{what} {tau!r} is not a multiple of the grid step {dt!r}; "
            f"nearest aligned value is {kr * dt!r}"
        )
    return int(kr)


def _shift_samples(s: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(s)
    n = s.size
    if k >= 0:
        if k < n:
            out[k:] = s[: n - k]
    elif -k < n:
        out[: n + k] = s[-k:]
    return out


def _check_edge_decay(f: Signal) -> None:
    s = np.abs(f.samples)
    peak = s.max()
    if peak > 0 and max(s[0], s[-1]) > EDGE_DECAY * peak:
        warnings.warn(
            "signal does not decay to 1e-10 of its peak at the grid edges; "
            "quadrature truncation error may dominate",
            RuntimeWarning,
            stacklevel=3,
        )


# ----------------------------------------------------------------------
# elementary operators


def generalized_modulation(A: LctParams, mu: float, f: Signal) -> Signal:
    """Multiply by ``exp(-i (a t^2/(2b) - t mu/b + d mu^2/(2b)))``."""
    _require_b(A)
    t = f.t
    return f.with_samples(f.samples * np.exp(-1j * kernel_phase(A, t, mu)))


def modulate(nu: float, f: Signal) -> Signal:
    """Classical modulation ``exp(i nu t) f(t)``."""
    return f.with_samples(f.samples * np.exp(1j * nu * f.t))


def translate(tau: float, f: Signal) -> Signal:
    """``f(t - tau)`` for a grid-aligned ``tau``; exposed samples are zero."""
    k = _steps(tau, f.grid.dt, what="translation")
    return f.with_samples(_shift_samples(f.samples, k))


def reflect(f: Signal) -> Signal:
    """``f(-t)``; the grid must be symmetric up to whole steps about zero."""
    g = f.grid
    # -t_k = t_j  with  j = -2 t0 / dt - k
    j = _steps(-2.0 * g.t0, g.dt, what="reflection offset") - np.arange(g.n)
    out = np.zeros(g.n, dtype=complex)
    ok = (j >= 0) & (j < g.n)
    out[ok] = f.samples[j[ok]]
    return f.with_samples(out)


def sinc_resample(f: Signal, query) -> np.ndarray:
    """Band-limited (Whittaker) interpolation of ``f`` at ``query`` points."""
    q = np.asarray(query, dtype=float)
    x = (q[:, None] - f.t[None, :]) / f.grid.dt
    return np.sinc(x) @ f.samples


def dilation(s: float, f: Signal) -> Signal:
    """``s^(-1/2) f(t/s)`` resampled onto the input grid."""
    if not s > 0:
        raise ParameterError(f"dilation factor must be positive, got {s}")
    if s == 1.0:
        return f
    return f.with_samples(sinc_resample(f, f.t / s) / math.sqrt(s))


# ----------------------------------------------------------------------
# transforms


def _fourier_sum(v: np.ndarray, grid: Grid, w0: float, dw: float) -> np.ndarray:
    """``sum_k dt v_k exp(-i w_j t_k)`` for ``w_j = w0 + j dw`` via one FFT.

    Requires ``|dw * dt| = 2 pi / n``.
    """
    n, dt, t0 = grid.n, grid.dt, grid.t0
    ratio = dw * dt * n / (2.0 * math.pi)
    if abs(abs(ratio) - 1.0) > 1e-9:
        raise GridMismatchError("output grid is not reciprocal to the input grid")
    k = np.arange(n)
    u = v * np.exp(-1j * w0 * dt * k)
    S = np.fft.fft(u) if ratio > 0 else n * np.fft.ifft(u)
    return dt * np.exp(-1j * t0 * (w0 + k * dw)) * S


def _lct_sum(A: LctParams, f: Signal, out: Grid) -> np.ndarray:
    """Unnormalised kernel sum of ``A`` evaluated on a reciprocal grid."""
    t = f.t
    chirped = f.samples * np.exp(1j * A.a * t * t / (2.0 * A.b))
    mu = out.points
    F = _fourier_sum(chirped, f.grid, out.t0 / A.b, out.dt / A.b)
    return np.exp(1j * A.d * mu * mu / (2.0 * A.b)) * F


def lct_fast(A: LctParams, mode, f: Signal) -> Signal:
    """Chirp-FFT-chirp evaluation of ``L_A f`` on the induced grid.

    Multiplies by ``exp(i a t^2/(2b))``, takes one FFT (the Fourier
    transform at ``mu/b``) and multiplies by ``exp(i d mu^2/(2b))`` and the
    mode prefactor.  Cost is O(n log n).
    """
    _require_b(A)
    out = induced_grid(A, f.grid)
    return Signal(out, prefactor(A, mode) * _lct_sum(A, f, out))


def lct_direct(A: LctParams, mode, f: Signal, out: Grid | None = None) -> Signal:
    """O(n*m) quadrature of ``L_A f`` on an arbitrary output grid.

    This is the reference against which :func:`lct_fast` is checked; it
    shares no code with the FFT path beyond the kernel phase.
    """
    _require_b(A)
    _check_edge_decay(f)
    if out is None:
        out = induced_grid(A, f.grid)
    vals = lct_at(A, mode, f, out.points)
    return Signal(out, vals)


def lct_at(A: LctParams, mode, f: Signal, mu) -> np.ndarray:
    """Direct quadrature of ``L_A f`` at arbitrary points ``mu``."""
    _require_b(A)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    t = f.t
    out = np.empty(mu.size, dtype=complex)
    chunk = max(1, 2_000_000 // max(t.size, 1))
    for s in range(0, mu.size, chunk):
        m = mu[s : s + chunk]
        K = np.exp(1j * kernel_phase(A, t[None, :], m[:, None]))
        out[s : s + chunk] = K @ f.samples
    return prefactor(A, mode) * f.grid.dt * out


def lct_b_zero(A: LctParams, f: Signal) -> Signal:
    """``sqrt(d) exp(i c d mu^2 / 2) f(d mu)`` for ``b = 0``, same grid."""
    if not A.is_b_zero:
        raise ParameterError("lct_b_zero needs b = 0; use lct_fast for b != 0")
    if A.d == 0:
        raise ParameterError("b = 0 forces a*d = 1, so d cannot be zero")
    mu = f.t
    if A.d == 1.0:
        resampled = f.samples
    else:
        resampled = sinc_resample(f, A.d * mu)
    vals = sqrt_b(A.d) * np.exp(0.5j * A.c * A.d * mu * mu) * resampled
    return f.with_samples(vals)


def transform(A: LctParams, mode, f: Signal) -> Signal:
    """Dispatch to :func:`lct_b_zero` or :func:`lct_fast`."""
    if A.is_b_zero:
        return lct_b_zero(A, f)
    return lct_fast(A, mode, f)


def lct_inverse(A: LctParams, mode, F: Signal, grid: Grid | None = None) -> Signal:
    """Invert :func:`lct_fast` using the kernel of ``A^-1 = (d, -b, -c, a)``.

    The prefactor is ``1 / (p_A * 2 pi |b|)``, which is ``conj(p_A)`` in
    ``UNITARY`` mode.  ``grid`` is the time grid to reconstruct on; the
    default is the centred grid reciprocal to ``F.grid``.  Round trips are
    exact (to rounding) when the forward input used that same grid.
    """
    _require_b(A)
    if grid is None:
        dt = 2.0 * math.pi * abs(A.b) / (F.grid.n * F.grid.dt)
        grid = Grid.centered(dt, F.grid.n)
    q = 1.0 / (prefactor(A, mode) * 2.0 * math.pi * abs(A.b))
    return Signal(grid, q * _lct_sum(A.inverse(), F, grid))


def chirp_convolve(A: LctParams, f: Signal, g: Signal, mode=UNITARY) -> Signal:
    """Chirp convolution ``conj(lam_A) * kappa * ((lam_A f) * (lam_A g))``.

    ``lam_A(t) = exp(i a t^2 / (2b))`` and ``kappa`` is the mode prefactor.
    The linear convolution is a Riemann sum on the shared grid, which must
    contain ``t = 0`` up to whole steps.
    """
    _require_b(A)
    _require_same_grid(f, g)
    grid = f.grid
    o = _steps(grid.t0, grid.dt, what="grid origin")
    lam = np.exp(1j * A.a * f.t ** 2 / (2.0 * A.b))
    full = np.convolve(lam * f.samples, lam * g.samples)
    # t_j - t_k = t0 + (j - k - o) dt  =>  out_j = full[j - o]
    idx = np.arange(grid.n) - o
    conv = np.zeros(grid.n, dtype=complex)
    ok = (idx >= 0) & (idx < full.size)
    conv[ok] = full[idx[ok]]
    kappa = prefactor(A, mode)
    return f.with_samples(np.conj(lam) * kappa * grid.dt * conv)


# ----------------------------------------------------------------------
# identity checks


def relative_l2_residual(lhs, rhs) -> float:
    """``||lhs - rhs|| / max(||lhs||, ||rhs||)``; 0 when both vanish."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(lhs - rhs) / scale)


def _relation_fourier(f: Signal, tau: float, nu: float) -> float:
    # F T_tau = M_{-tau} F ; F M_nu = T_nu F ; F R = R F
    F = lambda h: lct_fast(FOURIER, PAPER, h)
    Ff = F(f)
    r1 = relative_l2_residual(F(translate(tau, f)).samples, modulate(-tau, Ff).samples)
    dw = Ff.grid.dt
    nu = round(nu / dw) * dw
    r2 = relative_l2_residual(F(modulate(nu, f)).samples, translate(nu, Ff).samples)
    r3 = relative_l2_residual(F(reflect(f)).samples, reflect(Ff).samples)
    return max(r1, r2, r3)


def _relation_translate_modulate(f: Signal, tau: float, x: float) -> float:
    # T_tau M_x = e^{-i x tau} M_x T_tau
    lhs = translate(tau, modulate(x, f)).samples
    rhs = np.exp(-1j * x * tau) * modulate(x, translate(tau, f)).samples
    return relative_l2_residual(lhs, rhs)


def _relation_stft_covariance(f: Signal, g: Signal, tau: float, nu: float, points) -> float:
    # V_g(T_tau M_nu f)(x, w) = e^{-i tau w} V_g f(x - tau, w - nu)
    from .stlct import as_points, stft

    pts = as_points(points)
    x, w = pts[:, 0], pts[:, 1]
    lhs = stft(g, translate(tau, modulate(nu, f)), pts)
    rhs = np.exp(-1j * tau * w) * stft(g, f, np.column_stack([x - tau, w - nu]))
    return relative_l2_residual(lhs, rhs)


def _relation_reflection(A: LctParams, mode, f: Signal, tau: float) -> float:
    # R L_A = L_A R ; T_tau R = R T_{-tau}
    r1 = relative_l2_residual(reflect(lct_fast(A, mode, f)).samples, lct_fast(A, mode, reflect(f)).samples)
    r2 = relative_l2_residual(translate(tau, reflect(f)).samples, reflect(translate(-tau, f)).samples)
    return max(r1, r2)


def _relation_translate_chirp_modulate(A: LctParams, f: Signal, tau: float, mu: float) -> float:
    # T_tau M^A_mu f(t) = e^{-i mu tau/b + i a t tau/b - i a tau^2/(2b)} M^A_mu T_tau f(t)
    t = f.t
    a, b = A.a, A.b
    lhs = translate(tau, generalized_modulation(A, mu, f)).samples
    phase = np.exp(-1j * mu * tau / b + 1j * a * t * tau / b - 0.5j * a * tau * tau / b)
    rhs = phase * generalized_modulation(A, mu, translate(tau, f)).samples
    return relative_l2_residual(lhs, rhs)


def _relation_shifted_lct(A: LctParams, mode, f: Signal, tau: float) -> float:
    # L_A M_{-a tau/b} T_tau f(mu) = e^{-i (mu tau/b + a tau^2/(2b))} L_A f(mu)
    a, b = A.a, A.b
    lhs = lct_fast(A, mode, modulate(-a * tau / b, translate(tau, f)))
    mu = lhs.t
    rhs = np.exp(-1j * (mu * tau / b + a * tau * tau / (2.0 * b))) * lct_fast(A, mode, f).samples
    return relative_l2_residual(lhs.samples, rhs)


def check_operator_relation(
    relation: int,
    f: Signal,
    *,
    A: LctParams | None = None,
    tau: float = 0.5,
    mu: float = 1.0,
    g: Signal | None = None,
    points=None,
    mode=UNITARY,
) -> float:
    """Relative L2 residual of one of six elementary operator relations.

    1. ``F T_tau = M_{-tau} F``, ``F M_mu = T_mu F`` and ``F R = R F``
       (``mu`` is snapped to the nearest frequency-grid step).
    2. ``T_tau M_mu = e^{-i mu tau} M_mu T_tau``.
    3. ``V_g(T_tau M_mu f)(x, w) = e^{-i tau w} V_g f(x - tau, w - mu)`` at
       ``points`` (default: an 8x8 block of grid-aligned ``x`` and ``w`` in
       ``[-2, 2]``).
    4. ``R L_A = L_A R`` and ``T_tau R = R T_{-tau}``.
    5. ``T_tau M^A_mu = e^{-i mu tau/b + i a t tau/b - i a tau^2/(2b)} M^A_mu T_tau``.
    6. ``L_A M_{-a tau/b} T_tau f(mu) = e^{-i(mu tau/b + a tau^2/(2b))} L_A f(mu)``.

    Relations with several parts report the largest residual.  ``tau``
    must be grid-aligned.  ``A`` defaults to ``(1, 1, 0, 1)``.
    """
    if relation not in (1, 2, 3, 4, 5, 6):
        raise ParameterError(f"unknown relation id {relation!r}; expected 1..6")
    if A is None:
        A = LctParams(1.0, 1.0, 0.0, 1.0)
    if relation == 1:
        return _relation_fourier(f, tau, mu)
    if relation == 2:
        return _relation_translate_modulate(f, tau, mu)
    if relation == 3:
        if g is None:
            g = Signal(f.grid, np.exp(-f.t ** 2))
        if points is None:
            dt = f.grid.dt
            xs = np.round(np.linspace(-2.0, 2.0, 8) / dt) * dt
            ws = np.linspace(-2.0, 2.0, 8)
            points = [(x, w) for x in xs for w in ws]
        return _relation_stft_covariance(f, g, tau, mu, points)
    if relation == 4:
        return _relation_reflection(A, mode, f, tau)
    if relation == 5:
        _require_b(A)
        return _relation_translate_chirp_modulate(A, f, tau, mu)
    _require_b(A)
    return _relation_shifted_lct(A, mode, f, tau)


def modulation_matrices(A: LctParams) -> tuple[LctParams, LctParams | None]:
    """``(C, D)`` with ``C = (0, b, -1/b, d)`` and ``D = (0, b/d, -d/b, 2)``.

    ``D`` is ``None`` when ``d = 0``; its modulation is then the identity.
    """
    _require_b(A)
    b, d = A.b, A.d
    C = LctParams(0.0, b, -1.0 / b, d)
    D = None if d == 0 else LctParams(0.0, b / d, -d / b, 2.0)
    return C, D


def check_modulation_commutation(A: LctParams, mu: float, f: Signal, mode=UNITARY) -> float:
    """Relative L2 residual of ``L_A(M^A_mu f) = M^D_mu T_mu L_C f``.

    ``mu`` must be a whole number of steps of the induced output grid.
    """
    C, D = modulation_matrices(A)
    lhs = lct_fast(A, mode, generalized_modulation(A, mu, f))
    _steps(mu, lhs.grid.dt, what="modulation parameter")
    rhs = translate(mu, lct_fast(C, mode, f))
    if D is not None:
        rhs = generalized_modulation(D, mu, rhs)
    return relative_l2_residual(lhs.samples, rhs.samples)


def zero_pad(f: Signal, left: int, right: int) -> Signal:
    """Extend the grid by whole steps on each side, filling with zeros."""
    g = f.grid
    grid = Grid(g.t0 - left * g.dt, g.dt, g.n + left + right)
    return Signal(grid, np.concatenate([np.zeros(left), f.samples, np.zeros(right)]))


def check_convolution_theorem(A: LctParams, f: Signal, g: Signal, mode=UNITARY, *, pad: bool = True) -> float:
    """Relative L2 residual of ``L_A(f *_A g) = e^{-i d mu^2/(2b)} L_A f L_A g``.

    The convolution is wider than either factor, so by default both inputs
    are zero-padded to twice their length before it is formed.
    """
    _require_same_grid(f, g)
    if pad:
        n = f.grid.n
        f, g = zero_pad(f, n // 2, n - n // 2), zero_pad(g, n // 2, n - n // 2)
    lhs = lct_fast(A, mode, chirp_convolve(A, f, g, mode))
    mu = lhs.t
    rhs = np.exp(-1j * A.d * mu * mu / (2.0 * A.b)) * lct_fast(A, mode, f).samples * lct_fast(A, mode, g).samples
    return relative_l2_residual(lhs.samples, rhs)
