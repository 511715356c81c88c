"""Seeded residual suites shared by the ``verify`` command and the tests.

Each suite returns a list of :class:`Check` rows.  The signal family is
fixed by the seed: 3-component Gaussian mixtures on a centred grid with
``n = 256`` and ``dt = 0.05``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lct import (
    FOURIER,
    LctParams,
    check_convolution_theorem,
    check_modulation_commutation,
    check_operator_relation,
    induced_grid,
)
from .phase_retrieval import counterexample_study, gaussian_mixture
from .signal import Grid, Signal
from .stlct import check_covariance, check_fundamental_identity

IDENTITY_TOL = 1e-5
GAP_TOL = 1e-8
MIN_PHASE_DISTANCE = 0.5
MIN_OFF_LINE_GAP = 1e-3

FAMILY = (
    LctParams(1.0, 1.0, 0.0, 1.0),
    FOURIER,
    LctParams(2.0, 0.5, -2.0, 0.0),
    LctParams(1.0, -2.0, 0.0, 1.0),
)


@dataclass(frozen=True)
class Check:
    case: str
    value: float
    tol: float
    upper: bool = True  # value must be <= tol; otherwise >= tol

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.tol if self.upper else self.value >= self.tol


def suite_grid() -> Grid:
    return Grid.centered(0.05, 256)


def _signals(seed: int, count: int):
    grid = suite_grid()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return [gaussian_mixture(grid, rng) for _ in range(count)]


def _tf_points(A: LctParams, grid: Grid):
    # x on the time grid, mu on the induced grid: the fast path serves both sides
    mug = induced_grid(A, grid)
    xs = np.arange(-4, 4) * 8 * grid.dt
    mus = np.arange(-4, 4) * max(1, round(0.4 / mug.dt)) * mug.dt
    return [(x, m) for x in xs for m in mus]


def _label(A: LctParams) -> str:
    return "A=(%g,%g,%g,%g)" % tuple(A)


def relations(seed: int = 0, tol: float = IDENTITY_TOL, ids=(1, 2, 3, 4, 5, 6)) -> list[Check]:
    """Elementary operator relations with ``tau = 0.5`` and ``mu = 1``."""
    rows = []
    for f in _signals(seed, 2):
        for A in FAMILY:
            for r in ids:
                if r in (1, 2, 3) and A is not FAMILY[0]:
                    continue  # these do not involve A
                res = check_operator_relation(r, f, A=A, tau=0.5, mu=1.0)
                rows.append(Check(f"relation{r} {_label(A)}", res, tol))
    return rows


def modulation(seed: int = 0, tol: float = IDENTITY_TOL) -> list[Check]:
    """``L_A M^A_mu = M^D_mu T_mu L_C`` at ``mu`` of 0, 1 and 5 output steps."""
    rows = []
    for f in _signals(seed, 2):
        for A in FAMILY:
            step = induced_grid(A, f.grid).dt
            for k in (0, 1, 5):
                rows.append(Check(f"modulation {_label(A)} mu={k}dmu", check_modulation_commutation(A, k * step, f), tol))
    return rows


def convolution(seed: int = 0, tol: float = IDENTITY_TOL) -> list[Check]:
    rows = []
    f, g = _signals(seed, 2)
    gauss = Signal(f.grid, np.exp(-f.t ** 2))
    for A in FAMILY:
        rows.append(Check(f"convolution {_label(A)} mixtures", check_convolution_theorem(A, f, g), tol))
        rows.append(Check(f"convolution {_label(A)} gaussian", check_convolution_theorem(A, f, gauss), tol))
    return rows


def fundamental(seed: int = 0, tol: float = IDENTITY_TOL) -> list[Check]:
    rows = []
    for f in _signals(seed, 2):
        g = Signal(f.grid, np.exp(-f.t ** 2))
        for A in FAMILY:
            rows.append(Check(f"fundamental {_label(A)}", check_fundamental_identity(A, g, f, _tf_points(A, f.grid)), tol))
    return rows


def covariance(seed: int = 0, tol: float = IDENTITY_TOL) -> list[Check]:
    rows = []
    for f in _signals(seed, 2):
        g = Signal(f.grid, np.exp(-f.t ** 2))
        for A in FAMILY:
            pts = _tf_points(A, f.grid)
            for u, tau in ((0.0, 0.0), (1.0, 0.0), (1.0, 0.5)):
                res = check_covariance(A, g, f, u, tau, pts)
                rows.append(Check(f"covariance {_label(A)} u={u} tau={tau}", res, tol))
    return rows


def counterexample(us=(1.0, 2.0, 4.0), bs=(0.5, 1.0, 2.0), a_values=(0.0, 1.0), tol_scale: float = 1.0) -> list[Check]:
    """Line gap, phase distance and off-line gap of the ambiguous pair.

    For ``a = 0`` the matrix is ``(0, b, -1/b, 0)``; for ``a = 1`` it is
    ``(1, b, 0, 1)``.
    """
    rows = []
    for a in a_values:
        for u in us:
            for b in bs:
                A = LctParams(0.0, b, -1.0 / b, 0.0) if a == 0 else LctParams(a, b, 0.0, 1.0 / a)
                s = counterexample_study(u, A)
                tag = f"a={a:g} u={u:g} b={b:g}"
                rows.append(Check(f"line_gap {tag}", s["line_gap"], GAP_TOL * tol_scale))
                rows.append(Check(f"phase_distance {tag}", s["phase_distance"], MIN_PHASE_DISTANCE, upper=False))
                rows.append(Check(f"off_line_gap {tag}", s["off_line_gap"], MIN_OFF_LINE_GAP, upper=False))
    return rows


SUITES = {
    "relations": relations,
    "modulation": modulation,
    "convolution": convolution,
    "fundamental": fundamental,
    "covariance": covariance,
}


def run_suite(name: str, seed: int = 0, tol_scale: float = 1.0, **kw) -> list[Check]:
    if name == "counterexample":
        return counterexample(tol_scale=tol_scale, **kw)
    if name not in SUITES:
        raise ParameterError(f"unknown suite {name!r}")
    return SUITES[name](seed, IDENTITY_TOL * tol_scale)
