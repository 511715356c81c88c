"""Phaseless STLCT measurements, ambiguous pairs and a reconstruction solver.

The solver minimises the normalised intensity misfit

    L(h) = sum_l (|V h(l)|^2 - m_l^2)^2 / sum_l m_l^4

over signals ``h`` on a fixed grid.  Sampled Gaussian-window transforms are
numerically low rank, so the search runs in the whitened coordinates
``y = S V^H h`` of the thin SVD ``W = U S V^H`` of the forward matrix,
keeping singular values above ``rank_rtol`` times the largest.  There the
forward map is the orthonormal ``U`` and every observable direction moves
at the same rate.  Directions the measurements cannot see are left at zero,
so the estimate is the minimum-norm signal consistent with the data.
"""
from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from ._parallel import thread_count
from .errors import AdmissibilityError, ParameterError, SolverError
from .lattices import (
    SamplingSet,
    SqrtLatticeSpec,
    bandlimited_lattice,
    check_bandlimited_step,
    counterexample_lines,
    explicit,
    sqrt_admissible,
    sqrt_lattice,
)
from .lct import (
    PAPER,
    LctParams,
    NormalizationMode,
    _require_b,
    generalized_modulation,
    lct_fast,
)
from .signal import Grid, Signal, l2_norm, relative_phase_distance
from .stlct import as_points, stlct, stlct_matrix
from .windows import WindowSpec

log = logging.getLogger(__name__)

GABOR_WINDOW = WindowSpec.gaussian(1.0)
EDGE_WARN = 1e-12
EDGE_ERROR = 1e-8


# ----------------------------------------------------------------------
# measurements


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    params: LctParams
    window: WindowSpec
    sampling: SamplingSet
    magnitudes: np.ndarray
    mode: NormalizationMode = PAPER

    def __post_init__(self):
        mags = np.array(self.magnitudes, dtype=float).reshape(-1)
        if mags.size != len(self.sampling):
            raise ParameterError(f"{len(self.sampling)} sampling points but {mags.size} magnitudes")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise ParameterError("magnitudes must be finite and nonnegative")
        mags.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "mode", NormalizationMode.parse(self.mode))

    def to_dict(self) -> dict:
        sampling = self.sampling.to_dict()
        # explicit points keep the file self-describing whatever the kind
        sampling.setdefault("points", self.sampling.points.tolist())
        return {
            "params": self.params.to_dict(),
            "window": self.window.to_dict(),
            "sampling": sampling,
            "magnitudes": [float(v) for v in self.magnitudes],
            "mode": self.mode.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementSet":
        s = dict(d["sampling"])
        if "points" in s:
            s.setdefault("kind", "explicit")
            if s["kind"] == "sqrt":
                s["kind"] = "explicit"
        return cls(
            LctParams.from_dict(d["params"]),
            WindowSpec.from_dict(d["window"]),
            SamplingSet.from_dict(s),
            np.asarray(d["magnitudes"], dtype=float),
            d.get("mode", "paper"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "MeasurementSet":
        return cls.from_dict(json.loads(Path(path).read_text()))


def measure(f: Signal, A: LctParams, g: WindowSpec, sampling: SamplingSet, mode=PAPER) -> MeasurementSet:
    """``|V_g^A f|`` at every sampling point, in the sampling set's order."""
    vals = stlct(A, g, f, sampling.points, mode=mode).values
    return MeasurementSet(A, g, sampling, np.abs(vals), mode)


def normalized_gap(m1, m2) -> float:
    """``max |m1 - m2|`` divided by the largest entry of either; 0 if both vanish."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    peak = max(m1.max(initial=0.0), m2.max(initial=0.0))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(m1 - m2)) / peak)


# ----------------------------------------------------------------------
# ambiguous pair


@dataclass(frozen=True, eq=False)
class AmbiguousPair:
    f_plus: Signal
    f_minus: Signal
    u: float
    params: LctParams


def counterexample_pair(u: float, A: LctParams, grid: Grid) -> AmbiguousPair:
    """``f_pm = (1 +- i) M^A_u phi + (1 -+ i) M^A_{-u} phi`` with ``phi = exp(-t^2)``.

    Warns when ``phi`` is above 1e-12 at a grid edge and raises above 1e-8.
    """
    _require_b(A)
    edge = math.exp(-min(grid.t0 ** 2, grid.t_end ** 2))
    if edge > EDGE_ERROR:
        raise ParameterError(
            f"grid [{grid.t0}, {grid.t_end}] is too narrow: the Gaussian is {edge:.3g} at the edge"
        )
    if edge > EDGE_WARN:
        warnings.warn(f"Gaussian is {edge:.3g} at the grid edge", RuntimeWarning, stacklevel=2)
    phi = Signal(grid, np.exp(-grid.points ** 2))
    up = generalized_modulation(A, u, phi)
    um = generalized_modulation(A, -u, phi)
    f_plus = (1 + 1j) * up + (1 - 1j) * um
    f_minus = (1 - 1j) * up + (1 + 1j) * um
    return AmbiguousPair(f_plus, f_minus, float(u), A)


def verify_ambiguity(pair: AmbiguousPair, sampling, *, window: WindowSpec = GABOR_WINDOW, mode=PAPER):
    """``(max_gap, phase_distance)`` of a pair on a sampling set.

    ``max_gap`` is the largest magnitude difference over the points,
    normalised by the peak magnitude; ``phase_distance`` is the relative
    global-phase distance of the two signals.
    """
    pts = sampling.points if isinstance(sampling, SamplingSet) else as_points(sampling)
    vp = np.abs(stlct(pair.params, window, pair.f_plus, pts, mode=mode).values)
    vm = np.abs(stlct(pair.params, window, pair.f_minus, pts, mode=mode).values)
    return normalized_gap(vp, vm), relative_phase_distance(pair.f_plus, pair.f_minus)


def default_pair_grid() -> Grid:
    """Grid on ``[-10, 10)`` with step 0.05; the Gaussian is far below 1e-12 at the edges."""
    return Grid.centered(0.05, 400)


def counterexample_mu_grid(u: float, b: float, count: int = 257) -> Grid:
    """Centred frequency grid covering ``|mu| <= u + 6|b|``."""
    half = u + 6.0 * abs(b)
    return Grid.centered(2.0 * half / (count - 1), count)


def counterexample_study(u: float, A: LctParams, *, grid: Grid | None = None, x_count: int = 4, mu_count: int = 257) -> dict:
    """Magnitude gaps of the ambiguous pair on and off the line family.

    Lines are ``x = k pi b / u`` for ``|k| <= x_count``; the off-line column
    sits at ``x = pi b / (2u)``.  Both use the same ``mu`` grid.
    """
    grid = grid or default_pair_grid()
    pair = counterexample_pair(u, A, grid)
    mus = counterexample_mu_grid(u, A.b, mu_count)
    lines = counterexample_lines(A.b, u, x_count, mus)
    line_gap, dist = verify_ambiguity(pair, lines)
    x_off = math.pi * A.b / (2.0 * u)
    off = explicit(np.column_stack([np.full(mus.n, x_off), mus.points]))
    off_gap, _ = verify_ambiguity(pair, off)
    return {
        "u": float(u),
        "b": A.b,
        "a": A.a,
        "line_gap": line_gap,
        "phase_distance": dist,
        "x_off": x_off,
        "off_line_gap": off_gap,
    }


# ----------------------------------------------------------------------
# random test signals


def gaussian_mixture(grid: Grid, rng, components: int = 3, centers=(-1.0, 1.0), widths=(0.6, 1.0)) -> Signal:
    """Sum of ``components`` Gaussians with complex normal amplitudes."""
    t = grid.points
    s = np.zeros(t.size, dtype=complex)
    for _ in range(components):
        c = rng.uniform(*centers)
        w = rng.uniform(*widths)
        amp = rng.normal() + 1j * rng.normal()
        s += amp * np.exp(-((t - c) ** 2) / (2.0 * w * w))
    return Signal(grid, s)


BANDLIMITED_MODES = 33


def bandlimited_frequencies(B: float) -> np.ndarray:
    """``-B + k dB`` for ``k = 0..32`` with ``dB = B/16``."""
    return -B + (B / 16.0) * np.arange(BANDLIMITED_MODES)


def random_bandlimited(B: float, grid: Grid, rng) -> Signal:
    """Trigonometric polynomial on the support ``[-B, B]``, zero outside.

    Coefficients are independent standard complex normals on the 33
    frequencies of :func:`bandlimited_frequencies`.
    """
    t = grid.points
    w = bandlimited_frequencies(B)
    c = rng.normal(size=w.size) + 1j * rng.normal(size=w.size)
    s = np.exp(1j * np.outer(t, w)) @ c
    s[np.abs(t) > B] = 0.0
    return Signal(grid, s)


# ----------------------------------------------------------------------
# solver


@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`solve`.

    ``step`` is the first trial step of each restart; later trial steps come
    from the quasi-Newton scaling.  Iterations stop when the whitened
    gradient norm falls below ``grad_tol``, when backtracking cannot find a
    decrease, or after ``stall_iters`` iterations that each improve the loss
    by less than a relative 1e-8.
    """

    restarts: int = 8
    max_iters: int = 500
    step: float = 1.0
    grad_tol: float = 1e-14
    seed: int = 0
    rank_rtol: float = 1e-8
    memory: int = 10
    stall_iters: int = 10

    def __post_init__(self):
        for name in ("restarts", "max_iters", "memory", "stall_iters"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v}")
        for name in ("step", "grad_tol", "rank_rtol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class SolverResult:
    estimate: Signal
    residual: float
    iterations_used: int
    restart_index: int
    restart_losses: tuple = field(default=())


def _normalizer(m: np.ndarray) -> float:
    S = float(np.sum(m ** 4))
    return S if S > 0 else 1.0


def loss_and_gradient(W: np.ndarray, h: np.ndarray, m: np.ndarray) -> tuple[float, np.ndarray]:
    """Loss and its gradient in ``h``.

    The gradient is returned as the complex vector ``dL/dRe h + i dL/dIm h``
    which equals ``4 W^H ((|Wh|^2 - m^2) Wh) / sum m^4``.
    """
    z = W @ h
    r = np.abs(z) ** 2 - m ** 2
    S = _normalizer(m)
    return float(np.sum(r * r) / S), 4.0 * (W.conj().T @ (r * z)) / S


def measurement_loss(meas: MeasurementSet, h: Signal) -> float:
    """Loss of ``h`` against ``meas``, evaluated through :func:`stlct`."""
    v = stlct(meas.params, meas.window, h, meas.sampling.points, mode=meas.mode).values
    r = np.abs(v) ** 2 - meas.magnitudes ** 2
    return float(np.sum(r * r) / _normalizer(meas.magnitudes))


class _Whitened:
    """Loss on whitened coordinates ``y``; forward map ``U`` is orthonormal."""

    def __init__(self, W, m, rank_rtol):
        U, s, Vh = np.linalg.svd(W, full_matrices=False)
        k = int(np.count_nonzero(s > rank_rtol * s[0])) if s.size and s[0] > 0 else 0
        if k == 0:
            raise ParameterError("measurement operator is identically zero")
        self.U, self.s, self.Vh = U[:, :k], s[:k], Vh[:k]
        self.m2 = m ** 2
        self.S = _normalizer(m)

    def __call__(self, y):
        z = self.U @ y
        r = np.abs(z) ** 2 - self.m2
        return float(np.sum(r * r) / self.S), 4.0 * (self.U.conj().T @ (r * z)) / self.S

    def to_signal(self, y):
        return self.Vh.conj().T @ (y / self.s)

    def from_signal(self, h):
        return self.s * (self.Vh @ h)


def _rdot(a, b) -> float:
    return float(np.vdot(a, b).real)


def _descend(obj: _Whitened, y: np.ndarray, cfg: SolverConfig):
    """Backtracking line search along limited-memory quasi-Newton directions.

    Only gradients are used; the direction falls back to steepest descent
    whenever the two-loop recursion does not give a descent direction.
    Returns ``(y, loss, iterations, aborted)``; on abort ``y`` is the last
    iterate with a finite loss.
    """
    L, g = obj(y)
    if not (math.isfinite(L) and np.all(np.isfinite(g))):
        return y, L, 0, True
    mem_s: list[np.ndarray] = []
    mem_y: list[np.ndarray] = []
    stall = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if L == 0.0 or np.linalg.norm(g) < cfg.grad_tol or stall >= cfg.stall_iters:
            return y, L, it - 1, False
        q = g.copy()
        alphas = []
        for sv, yv in zip(reversed(mem_s), reversed(mem_y)):
            rho = 1.0 / _rdot(yv, sv)
            a = rho * _rdot(sv, q)
            q = q - a * yv
            alphas.append((a, rho, sv, yv))
        if mem_s:
            q = q * (_rdot(mem_s[-1], mem_y[-1]) / _rdot(mem_y[-1], mem_y[-1]))
            step = 1.0
        else:
            step = cfg.step
        for a, rho, sv, yv in reversed(alphas):
            q = q + (a - rho * _rdot(yv, q)) * sv
        d = -q
        slope = _rdot(g, d)
        if not slope < 0:
            d = -g
            slope = -_rdot(g, g)
            mem_s.clear()
            mem_y.clear()
            step = cfg.step
        while True:
            y_new = y + step * d
            L_new, g_new = obj(y_new)
            if not (math.isfinite(L_new) and np.all(np.isfinite(g_new))):
                return y, L, it, True
            if L_new <= L + 1e-4 * step * slope:
                break
            step *= 0.5
            if step < 1e-20:
                return y, L, it, False
        stall = stall + 1 if L - L_new <= 1e-8 * L else 0
        sv, yv = y_new - y, g_new - g
        if _rdot(sv, yv) > 1e-12 * np.linalg.norm(sv) * np.linalg.norm(yv):
            mem_s.append(sv)
            mem_y.append(yv)
            if len(mem_s) > cfg.memory:
                mem_s.pop(0)
                mem_y.pop(0)
        y, L, g = y_new, L_new, g_new
    return y, L, it, False


def solve(meas: MeasurementSet, grid: Grid, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Reconstruct a signal on ``grid`` from phaseless measurements.

    Each restart starts from a seeded random Gaussian mixture scaled so that
    its predicted intensities carry the measured energy.  The result with
    the smallest ``(residual, restart_index)`` wins, so the outcome does not
    depend on how restarts are scheduled.

    Raises
    ------
    SolverError
        If every restart hits a non-finite loss.  The best partial result
        (if any) is attached as ``.best``.
    """
    if len(meas.sampling) < 2 * grid.n:
        warnings.warn(
            f"{len(meas.sampling)} measurements for {grid.n} unknowns; at least {2 * grid.n} are recommended",
            RuntimeWarning,
            stacklevel=2,
        )
    W = stlct_matrix(meas.params, meas.window, grid, meas.sampling.points, mode=meas.mode)
    m = meas.magnitudes
    obj = _Whitened(W, m, cfg.rank_rtol)
    energy = float(np.sum(m ** 2))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    def run(r):
        rng = np.random.default_rng(seeds[r])
        y0 = obj.from_signal(gaussian_mixture(grid, rng).samples)
        pred = float(np.sum(np.abs(obj.U @ y0) ** 2))
        y0 = y0 * (math.sqrt(energy / pred) if pred > 0 else 0.0)
        y, L, its, aborted = _descend(obj, y0, cfg)
        return r, y, L, its, aborted

    workers = min(thread_count(), cfg.restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            runs = list(ex.map(run, range(cfg.restarts)))
    else:
        runs = [run(r) for r in range(cfg.restarts)]

    candidates = []
    partial = []
    losses = []
    for r, y, L, its, aborted in runs:
        losses.append(L if not aborted else math.nan)
        if aborted:
            log.warning("restart %d aborted: non-finite loss after %d iterations", r, its)
            if math.isfinite(L) and np.all(np.isfinite(y)):
                partial.append((L, r, y, its))
            continue
        h = Signal(grid, obj.to_signal(y))
        candidates.append((measurement_loss(meas, h), r, h, its))
    if not candidates:
        best = None
        if partial:
            L, r, y, its = min(partial, key=lambda c: (c[0], c[1]))
            best = SolverResult(Signal(grid, obj.to_signal(y)), L, its, r, tuple(losses))
        raise SolverError(f"all {cfg.restarts} restarts hit a non-finite loss", best=best)
    res, r, h, its = min(candidates, key=lambda c: (c[0], c[1]))
    return SolverResult(h, res, its, r, tuple(losses))


# ----------------------------------------------------------------------
# LCT magnitude triplets and variants


def _mag(A, mode, samples, f: Signal) -> Signal:
    F = lct_fast(A, mode, f.with_samples(samples))
    return F.with_samples(np.abs(F.samples))


def lct_pr_triplet(f: Signal, A: LctParams, gamma: float, mode=PAPER) -> tuple[Signal, Signal, Signal]:
    """``|L_A Pf|``, ``|L_A QPf|``, ``|L_A (I+Q)Pf|`` on the induced grid.

    ``P`` multiplies by ``exp(-gamma t^2)`` and ``Q`` by ``t``.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    t = f.t
    Pf = f.samples * np.exp(-gamma * t * t)
    return _mag(A, mode, Pf, f), _mag(A, mode, t * Pf, f), _mag(A, mode, (1.0 + t) * Pf, f)


def _near_rational(r: float, qmax: int = 100, tol: float = 1e-9) -> Fraction | None:
    for q in range(1, qmax + 1):
        p = round(r * q)
        if abs(r - p / q) <= tol * max(1.0, abs(r)):
            return Fraction(p, q)
    return None


def lct_pr_sin_pair(f: Signal, A: LctParams, gamma: float, alpha1: float, alpha2: float, mode=PAPER):
    """``|L_A Pf|``, ``|L_A P_1 f|``, ``|L_A P_2 f|`` with ``P_j = sin(alpha_j pi t) exp(-gamma t^2)``.

    Warns when ``alpha1 / alpha2`` is within 1e-9 of a fraction with
    denominator at most 100.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if alpha2 == 0:
        raise ParameterError("alpha2 must be nonzero")
    frac = _near_rational(alpha1 / alpha2)
    if frac is not None:
        warnings.warn(f"alpha1/alpha2 is close to the rational {frac}", RuntimeWarning, stacklevel=2)
    t = f.t
    P = np.exp(-gamma * t * t)
    return (
        _mag(A, mode, P * f.samples, f),
        _mag(A, mode, np.sin(alpha1 * math.pi * t) * P * f.samples, f),
        _mag(A, mode, np.sin(alpha2 * math.pi * t) * P * f.samples, f),
    )


def dilation_window(gamma: float, a1: float, t) -> np.ndarray:
    """``a1^{-1/2} phi(t / a1) - a1^{1/2} phi(t)`` with ``phi = exp(-gamma t^2)``."""
    t = np.asarray(t, dtype=float)
    return np.exp(-gamma * (t / a1) ** 2) / math.sqrt(a1) - math.sqrt(a1) * np.exp(-gamma * t * t)


def lct_pr_dilation(f: Signal, A: LctParams, gamma: float, a1: float, mode=PAPER):
    """``|L_A Pf|`` and ``|L_A D f|`` with ``D`` the dilation-difference window."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if not a1 > 0:
        raise ParameterError(f"dilation factor must be positive, got {a1}")
    if abs(a1 - 1.0) <= 1e-12:
        raise ParameterError("dilation factor 1 makes the difference window vanish")
    t = f.t
    return (
        _mag(A, mode, np.exp(-gamma * t * t) * f.samples, f),
        _mag(A, mode, dilation_window(gamma, a1, t) * f.samples, f),
    )


def magnitude_gap(ms1: Sequence[Signal], ms2: Sequence[Signal]) -> float:
    """Largest pointwise gap across matching magnitude signals over the joint peak."""
    a = np.concatenate([np.abs(s.samples) for s in ms1])
    b = np.concatenate([np.abs(s.samples) for s in ms2])
    return normalized_gap(a, b)


PROP_VARIANTS = ("triplet", "sin_pair", "dilation")


def forward_variant(kind: str, f: Signal, A: LctParams, gamma: float = 1.0, mode=PAPER):
    """Magnitudes of one forward-measurement variant with fixed parameters.

    ``sin_pair`` uses ``alpha = (1, sqrt 2)`` and ``dilation`` uses ``a1 = 2``.
    """
    if kind == "triplet":
        return lct_pr_triplet(f, A, gamma, mode)
    if kind == "sin_pair":
        return lct_pr_sin_pair(f, A, gamma, 1.0, math.sqrt(2.0), mode)
    if kind == "dilation":
        return lct_pr_dilation(f, A, gamma, 2.0, mode)
    raise ParameterError(f"unknown measurement variant {kind!r}")


def distinguishability_experiment(
    kind: str,
    A: LctParams,
    *,
    trials: int = 100,
    seed: int = 0,
    threshold: float = 1e-4,
    gamma: float = 1.0,
    grid: Grid | None = None,
) -> dict:
    """Monte-Carlo rate at which independent random signals are told apart.

    Each trial draws two Gaussian mixtures ``f`` and ``h`` and records the
    normalised magnitude gap of the chosen variant.  A trial counts as
    distinguished when the gap is at least ``threshold``.
    """
    grid = grid or Grid.centered(0.05, 256)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    rows = []
    for i, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        f = gaussian_mixture(grid, rng)
        h = gaussian_mixture(grid, rng)
        gap = magnitude_gap(forward_variant(kind, f, A, gamma), forward_variant(kind, h, A, gamma))
        rows.append({"trial": i, "gap": gap, "phase_distance": relative_phase_distance(f, h)})
    hits = sum(r["gap"] >= threshold for r in rows)
    return {"kind": kind, "trials": trials, "distinguish_rate": hits / trials, "rows": rows}


# ----------------------------------------------------------------------
# experiments


def bandlimited_grid(B: float) -> Grid:
    """Grid on ``[-2B, 2B)`` with 64 steps per ``B``."""
    return Grid.centered(B / 64.0, 256)


def bandlimited_experiment(
    B: float,
    m: float,
    A: LctParams,
    trials: int = 100,
    seed: int = 0,
    *,
    x_max: int = 15,
    mu_count: int = 16,
    perturbation: float = 0.1,
    phase: float = 0.7,
) -> dict:
    """Equivalent and non-equivalent band-limited pairs on ``N x m b Z``.

    Each trial draws ``f`` and ``p`` from :func:`random_bandlimited`, then
    compares ``f`` with ``exp(i phase) f`` (equivalent) and with
    ``f + perturbation * p`` (not equivalent) using the Gabor window
    ``exp(-t^2)``.  Passes when every equivalent gap is at most 1e-10 and
    at least 99% of non-equivalent gaps are at least 1e-6.
    """
    check_bandlimited_step(B, m)
    _require_b(A)
    grid = bandlimited_grid(B)
    lattice = bandlimited_lattice(B, m, A.b, x_max, mu_count)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    rows = []
    for i, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        f = random_bandlimited(B, grid, rng)
        p = random_bandlimited(B, grid, rng)
        mf = measure(f, A, GABOR_WINDOW, lattice).magnitudes
        eq = measure(np.exp(1j * phase) * f, A, GABOR_WINDOW, lattice).magnitudes
        h = f + perturbation * p
        mh = measure(h, A, GABOR_WINDOW, lattice).magnitudes
        rows.append(
            {
                "trial": i,
                "equivalent_gap": normalized_gap(mf, eq),
                "gap": normalized_gap(mf, mh),
                "phase_distance": relative_phase_distance(h, f),
            }
        )
    eq_ok = all(r["equivalent_gap"] <= 1e-10 for r in rows)
    rate = sum(r["gap"] >= 1e-6 for r in rows) / max(trials, 1)
    return {
        "B": B,
        "m": m,
        "trials": trials,
        "equivalent_pass": eq_ok,
        "distinguish_rate": rate,
        "passed": bool(eq_ok and rate >= 0.99),
        "rows": rows,
    }


def sqrt_uniqueness_experiment(
    gamma: float,
    tau: float,
    v: float,
    K: int,
    trials: int = 10,
    seed: int = 0,
    *,
    A: LctParams = LctParams(1.0, 1.0, 0.0, 1.0),
    restarts: int = 8,
    max_iters: int = 500,
    success_tol: float = 1e-2,
    strict: bool = False,
) -> dict:
    """Reconstruct random Gaussian mixtures from square-root-lattice magnitudes.

    The window is ``exp(-gamma t^2)`` and the lattice must be admissible for
    ``m = n = gamma``; otherwise :class:`AdmissibilityError` is raised before
    any computation.
    """
    _require_b(A)
    if not sqrt_admissible(gamma, gamma, A.b, tau, v, strict=strict):
        raise AdmissibilityError(
            f"tau={tau}, v={v} are not admissible for gamma={gamma}, b={A.b}"
        )
    grid = Grid.centered(0.05, 256)
    window = WindowSpec.gaussian(gamma)
    lattice = sqrt_lattice(SqrtLatticeSpec(tau, v, K))
    seeds = np.random.SeedSequence(seed).spawn(trials)
    rows = []
    for i, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        f = gaussian_mixture(grid, rng)
        meas = measure(f, A, window, lattice)
        cfg = SolverConfig(restarts=restarts, max_iters=max_iters, seed=int(rng.integers(2**31)))
        res = solve(meas, grid, cfg)
        d = relative_phase_distance(res.estimate, f)
        rows.append(
            {
                "trial": i,
                "phase_distance": d,
                "residual": res.residual,
                "restart_index": res.restart_index,
                "iterations": res.iterations_used,
                "success": bool(d <= success_tol),
            }
        )
    dists = [r["phase_distance"] for r in rows]
    return {
        "gamma": gamma,
        "tau": tau,
        "v": v,
        "K": K,
        "trials": trials,
        "success_rate": sum(r["success"] for r in rows) / max(trials, 1),
        "median_phase_distance": float(np.median(dists)) if dists else float("nan"),
        "rows": rows,
    }
