"""Sampling sets in the time-frequency plane.

Four families are supported: rectangular square-root lattices
``{+-tau sqrt(k)} x {+-v sqrt(k')}``, families of vertical lines
``(pi b / u) Z x mu-grid``, band-limited lattices ``N x m b Z`` and explicit
point lists.  Every set is stored deduplicated and sorted by ``(x, mu)``.
"""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AdmissibilityError, ParameterError
from .signal import Grid


class SamplingKind(enum.Enum):
    SQRT = "sqrt"
    LINES = "lines"
    BANDLIMITED = "bandlimited"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class SqrtLatticeSpec:
    """Truncated square-root lattice with indices ``k, k' = 0..K``."""

    tau: float
    v: float
    K: int

    def __post_init__(self):
        if not (self.tau > 0 and self.v > 0):
            raise ParameterError(f"lattice steps must be positive, got tau={self.tau}, v={self.v}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"truncation K must be a positive integer, got {self.K}")
        object.__setattr__(self, "K", int(self.K))


@dataclass(frozen=True, eq=False)
class SamplingSet:
    kind: SamplingKind
    points: np.ndarray
    meta: dict | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise ParameterError("sampling points must be finite")
        # -0.0 and 0.0 are the same point
        pts = pts + 0.0
        pts = np.unique(pts, axis=0)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "kind", SamplingKind(self.kind))

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, SamplingSet)
            and self.kind == other.kind
            and np.array_equal(self.points, other.points)
        )

    @property
    def xs(self) -> np.ndarray:
        return np.unique(self.points[:, 0])

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.meta:
            d.update(self.meta)
        if self.kind is not SamplingKind.SQRT:
            d["points"] = self.points.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SamplingSet":
        kind = d.get("kind")
        if kind == "sqrt":
            return sqrt_lattice(SqrtLatticeSpec(float(d["tau"]), float(d["v"]), int(d["K"])))
        if kind in ("explicit", "lines", "bandlimited"):
            meta = {k: v for k, v in d.items() if k not in ("kind", "points")}
            return cls(SamplingKind(kind), np.asarray(d["points"], dtype=float), meta or None)
        raise ParameterError(f"unknown sampling kind {kind!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SamplingSet":
        return cls.from_dict(json.loads(text))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "mu"])
            for x, mu in self.points:
                w.writerow([format(x, ".17g"), format(mu, ".17g")])


def explicit(points) -> SamplingSet:
    return SamplingSet(SamplingKind.EXPLICIT, points)


def _signed_roots(step: float, K: int) -> np.ndarray:
    r = step * np.sqrt(np.arange(K + 1))
    return np.concatenate([-r[:0:-1], r])


def sqrt_lattice(spec: SqrtLatticeSpec) -> SamplingSet:
    """All ``(s tau sqrt(k), s' v sqrt(k'))`` with ``k, k' <= K`` and signs ``s, s'``.

    >>> len(sqrt_lattice(SqrtLatticeSpec(1.0, 1.0, 20)))
    1681
    """
    xs = _signed_roots(spec.tau, spec.K)
    mus = _signed_roots(spec.v, spec.K)
    X, M = np.meshgrid(xs, mus, indexing="ij")
    meta = {"tau": spec.tau, "v": spec.v, "K": spec.K}
    return SamplingSet(SamplingKind.SQRT, np.column_stack([X.ravel(), M.ravel()]), meta)


def sqrt_bounds(m: float, n: float, b: float, *, strict: bool = False) -> tuple[float, float]:
    """Upper bounds ``(tau_max, v_max)`` for an admissible square-root lattice.

    The default reading is ``tau < 1/sqrt(2 n e)`` and
    ``v < |b| sqrt(2 m / e)``.  With ``strict=True`` each bound is the
    smaller of that and the alternative reading ``1/(sqrt(2n) e)`` and
    ``|b| sqrt(2m) / e``.
    """
    if not (m > 0 and n > 0):
        raise ParameterError(f"envelope parameters must be positive, got m={m}, n={n}")
    if b == 0:
        raise ParameterError("admissibility needs b != 0")
    tau_max = 1.0 / math.sqrt(2.0 * n * math.e)
    v_max = abs(b) * math.sqrt(2.0 * m / math.e)
    if strict:
        tau_max = min(tau_max, 1.0 / (math.sqrt(2.0 * n) * math.e))
        v_max = min(v_max, abs(b) * math.sqrt(2.0 * m) / math.e)
    return tau_max, v_max


def sqrt_admissible(m: float, n: float, b: float, tau: float, v: float, *, strict: bool = False) -> bool:
    """True when ``tau`` and ``v`` are strictly below :func:`sqrt_bounds`."""
    tau_max, v_max = sqrt_bounds(m, n, b, strict=strict)
    return bool(tau < tau_max and v < v_max)


def density_margin(tau: float, n: float, K: int) -> float:
    """``1/sqrt(n e) - min_{1<=k<=K} tau sqrt(k) / sqrt(k)``, i.e. ``1/sqrt(n e) - tau``.

    Positive means the density condition for the time axis holds.
    """
    if not (tau > 0 and n > 0):
        raise ParameterError(f"tau and n must be positive, got tau={tau}, n={n}")
    if int(K) != K or K < 1:
        raise ParameterError(f"K must be a positive integer, got {K}")
    k = np.arange(1, int(K) + 1)
    ratios = tau * np.sqrt(k) / np.sqrt(k)
    return float(1.0 / math.sqrt(n * math.e) - ratios.min())


def counterexample_lines(b: float, u: float, x_count: int, mu_grid: Grid) -> SamplingSet:
    """``{k pi b / u : |k| <= x_count} x mu_grid``."""
    if b == 0:
        raise ParameterError("line family needs b != 0")
    if not u > 0:
        raise ParameterError(f"u must be positive, got {u}")
    if int(x_count) != x_count or x_count < 0:
        raise ParameterError(f"x_count must be a nonnegative integer, got {x_count}")
    step = math.pi * b / u
    xs = step * np.arange(-int(x_count), int(x_count) + 1)
    X, M = np.meshgrid(xs, mu_grid.points, indexing="ij")
    meta = {"b": b, "u": u, "x_count": int(x_count), "mu_grid": mu_grid.to_dict()}
    return SamplingSet(SamplingKind.LINES, np.column_stack([X.ravel(), M.ravel()]), meta)


def check_bandlimited_step(B: float, m: float) -> None:
    """Raise unless ``0 < m < 1/(4B)``."""
    if not B > 0:
        raise ParameterError(f"bandwidth B must be positive, got {B}")
    if not (0 < m < 1.0 / (4.0 * B)):
        raise AdmissibilityError(f"lattice step m={m} must lie in (0, 1/(4B)) = (0, {1.0 / (4.0 * B)!r})")


def bandlimited_lattice(B: float, m: float, b: float, x_max: int, mu_count: int) -> SamplingSet:
    """``{0, 1, ..., x_max} x {k m b : |k| <= mu_count}``."""
    check_bandlimited_step(B, m)
    if b == 0:
        raise ParameterError("band-limited lattice needs b != 0")
    xs = np.arange(int(x_max) + 1, dtype=float)
    mus = m * b * np.arange(-int(mu_count), int(mu_count) + 1)
    X, M = np.meshgrid(xs, mus, indexing="ij")
    meta = {"B": B, "m": m, "b": b, "x_max": int(x_max), "mu_count": int(mu_count)}
    return SamplingSet(SamplingKind.BANDLIMITED, np.column_stack([X.ravel(), M.ravel()]), meta)


def load_sampling(path) -> SamplingSet:
    return SamplingSet.from_json(Path(path).read_text())
