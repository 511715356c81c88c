"""Sampled signals on uniform time grids.

Every integral in the package is a left-endpoint Riemann sum with weight
``dt``, so norms and inner products here are the discrete counterparts of
the L2 quantities they stand in for.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatchError, ParameterError

EPS_FLOOR = 1e-300
_GRID_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``t0 + k*dt`` for ``0 <= k < n``."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.dt)):
            raise ParameterError("grid t0 and dt must be finite")
        if self.dt <= 0:
            raise ParameterError(f"grid step must be positive, got dt={self.dt}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"grid size must be a positive integer, got n={self.n}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def centered(cls, dt: float, n: int) -> "Grid":
        """Grid whose index ``n // 2`` sits exactly at zero."""
        return cls(-(n // 2) * dt, dt, n)

    def point(self, k: int) -> float:
        return self.t0 + k * self.dt

    @property
    def points(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.point(self.n - 1)

    def matches(self, other: "Grid") -> bool:
        scale = max(abs(self.t0), abs(other.t0), self.dt)
        return (
            self.n == other.n
            and abs(self.dt - other.dt) <= _GRID_RTOL * self.dt
            and abs(self.t0 - other.t0) <= _GRID_RTOL * scale
        )

    def to_dict(self) -> dict:
        return {"t0": self.t0, "dt": self.dt, "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        return cls(float(d["t0"]), float(d["dt"]), int(d["n"]))


@dataclass(frozen=True, eq=False)
class Signal:
    """Complex samples attached to a :class:`Grid`.

    The sample array is copied on construction and made read-only.
    """

    grid: Grid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex).reshape(-1)
        if s.size != self.grid.n:
            raise ParameterError(
                f"sample count {s.size} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(s)):
            raise ParameterError("signal samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def t(self) -> np.ndarray:
        return self.grid.points

    def with_samples(self, samples) -> "Signal":
        return Signal(self.grid, samples)

    def __add__(self, other: "Signal") -> "Signal":
        _require_same_grid(self, other)
        return Signal(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Signal") -> "Signal":
        _require_same_grid(self, other)
        return Signal(self.grid, self.samples - other.samples)

    def __mul__(self, c) -> "Signal":
        return Signal(self.grid, self.samples * complex(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Signal":
        return Signal(self.grid, -self.samples)

    def conj(self) -> "Signal":
        return Signal(self.grid, np.conj(self.samples))

    @classmethod
    def zeros(cls, grid: Grid) -> "Signal":
        return cls(grid, np.zeros(grid.n, dtype=complex))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Signal":
        return cls(grid, func(grid.points))

    # JSON: {"grid": {...}, "re": [...], "im": [...]}
    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "re": [float(v) for v in self.samples.real],
            "im": [float(v) for v in self.samples.imag],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Signal":
        grid = Grid.from_dict(d["grid"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape or re.size != grid.n:
            raise ParameterError(
                f"signal JSON length mismatch: n={grid.n}, re={re.size}, im={im.size}"
            )
        return cls(grid, re + 1j * im)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()))

    @classmethod
    def load(cls, path) -> "Signal":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _require_same_grid(f: Signal, g: Signal) -> None:
    if not f.grid.matches(g.grid):
        raise GridMismatchError(f"incompatible grids: {f.grid} vs {g.grid}")


def l2_norm(f: Signal) -> float:
    """Discrete L2 norm ``sqrt(dt * sum |f_k|^2)``."""
    s = f.samples
    # scale first so the squares cannot overflow
    peak = np.max(np.abs(s)) if s.size else 0.0
    if peak == 0.0:
        return 0.0
    return float(peak * np.sqrt(f.grid.dt * np.sum(np.abs(s / peak) ** 2)))


def inner_product(f: Signal, g: Signal) -> complex:
    """``dt * sum f_k * conj(g_k)``; linear in the first argument."""
    _require_same_grid(f, g)
    return complex(f.grid.dt * np.vdot(g.samples, f.samples))


def global_phase_distance(f: Signal, g: Signal) -> float:
    """``min_alpha ||f - exp(i alpha) g||`` in closed form.

    The minimum is attained at ``alpha = arg <f, g>`` and equals
    ``sqrt(||f||^2 + ||g||^2 - 2 |<f, g>|)``.  The norm is evaluated at the
    optimal phase directly; expanding the square loses half the digits when
    ``f`` and ``g`` are nearly equivalent.
    """
    _require_same_grid(f, g)
    ip = inner_product(f, g)
    phase = ip / abs(ip) if ip != 0 else 1.0
    return l2_norm(Signal(f.grid, f.samples - phase * g.samples))


def relative_phase_distance(f: Signal, reference: Signal) -> float:
    """Global-phase distance divided by ``max(||f||, ||reference||)``."""
    scale = max(l2_norm(f), l2_norm(reference), EPS_FLOOR)
    return global_phase_distance(f, reference) / scale


def is_equivalent(f: Signal, g: Signal, tol: float = 1e-9) -> bool:
    """True when ``f`` and ``g`` agree up to a global phase within ``tol``."""
    scale = max(l2_norm(f), l2_norm(g), EPS_FLOOR)
    return global_phase_distance(f, g) <= tol * scale
