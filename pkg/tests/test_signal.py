import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from canonica.errors import GridMismatchError, ParameterError
from canonica.signal import (
    Grid,
    Signal,
    global_phase_distance,
    inner_product,
    is_equivalent,
    l2_norm,
    relative_phase_distance,
)

from conftest import random_signal

seeds = st.integers(0, 2**32 - 1)


def test_grid_points_increase():
    g = Grid(-1.0, 0.25, 9)
    assert g.point(0) == -1.0
    assert g.point(8) == 1.0
    assert np.all(np.diff(g.points) > 0)


@pytest.mark.parametrize("dt, n", [(0.0, 4), (-0.1, 4), (0.1, 0), (0.1, 2.5)])
def test_grid_rejects_bad_fields(dt, n):
    with pytest.raises(ParameterError):
        Grid(0.0, dt, n)


def test_centered_grid_contains_zero():
    for n in (7, 8):
        g = Grid.centered(0.3, n)
        assert g.point(n // 2) == 0.0


def test_signal_validation():
    g = Grid(0.0, 1.0, 3)
    with pytest.raises(ParameterError):
        Signal(g, [1, 2])
    with pytest.raises(ParameterError):
        Signal(g, [1, np.nan, 2])
    s = Signal(g, [1, 2, 3])
    with pytest.raises(ValueError):
        s.samples[0] = 5


def test_json_round_trip(tmp_path):
    f = random_signal(3)
    p = tmp_path / "f.json"
    f.save(p)
    g = Signal.load(p)
    assert g.grid == f.grid
    np.testing.assert_array_equal(g.samples, f.samples)


def test_json_rejects_length_mismatch():
    d = {"grid": {"t0": 0, "dt": 1, "n": 3}, "re": [1, 2, 3], "im": [0, 0]}
    with pytest.raises(ParameterError):
        Signal.from_json_dict(d)
    d = {"grid": {"t0": 0, "dt": 1, "n": 4}, "re": [1, 2, 3], "im": [0, 0, 0]}
    with pytest.raises(ParameterError):
        Signal.from_json_dict(json.loads(json.dumps(d)))


def test_l2_norm_trivial():
    assert l2_norm(Signal.zeros(Grid(0, 1, 5))) == 0.0
    assert l2_norm(Signal(Grid(0, 0.5, 8), np.ones(8))) == pytest.approx(2.0, rel=1e-15)


def test_l2_norm_matches_exact_summation():
    f = random_signal(11, n=1000, dt=0.013)
    s = math.fsum(float(v.real) ** 2 + float(v.imag) ** 2 for v in f.samples)
    expected = math.sqrt(f.grid.dt * s)
    assert abs(l2_norm(f) - expected) <= 1e-12 * expected


def test_l2_norm_no_overflow():
    f = Signal(Grid(0, 1, 4), [1e200, 1e200, 0, 0])
    assert l2_norm(f) == pytest.approx(math.sqrt(2) * 1e200)


def test_inner_product_basics():
    f = random_signal(1)
    assert inner_product(f, f) == pytest.approx(l2_norm(f) ** 2, rel=1e-14)
    g = Grid(0, 1, 6)
    a = Signal(g, [1, 1, 1, 0, 0, 0])
    b = Signal(g, [0, 0, 0, 2, 2, 2])
    assert inner_product(a, b) == 0


def test_inner_product_grid_mismatch():
    with pytest.raises(GridMismatchError):
        inner_product(random_signal(1, n=8), random_signal(1, n=9))


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_inner_product_conjugate_symmetry(seed):
    f, g = random_signal(seed), random_signal(seed + 1)
    assert abs(inner_product(f, g) - inner_product(g, f).conjugate()) <= 1e-15


def test_phase_distance_trivial():
    f = random_signal(5)
    assert global_phase_distance(f, f) == 0.0
    assert global_phase_distance(f, cmath.exp(1j * math.pi / 3) * f) <= 1e-12
    z = Signal.zeros(f.grid)
    assert global_phase_distance(z, z) == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_phase_distance_matches_alpha_scan(seed):
    f, g = random_signal(seed), random_signal(seed + 100)
    alphas = np.linspace(0, 2 * np.pi, 100_000, endpoint=False)
    dt = f.grid.dt
    ff = dt * np.vdot(f.samples, f.samples).real
    gg = dt * np.vdot(g.samples, g.samples).real
    fg = dt * np.vdot(g.samples, f.samples)
    # ||f - e^{ia} g||^2 = ||f||^2 + ||g||^2 - 2 Re(e^{-ia} <f, g>)
    scan = np.sqrt(np.min(ff + gg - 2 * (np.exp(-1j * alphas) * fg).real))
    assert abs(global_phase_distance(f, g) - scan) <= 1e-8


def test_phase_distance_closed_form():
    f, g = random_signal(8), random_signal(9)
    closed = math.sqrt(l2_norm(f) ** 2 + l2_norm(g) ** 2 - 2 * abs(inner_product(f, g)))
    assert global_phase_distance(f, g) == pytest.approx(closed, rel=1e-12)


def test_is_equivalent_examples():
    f = random_signal(4)
    assert is_equivalent(f, -f, tol=1e-9)
    assert not is_equivalent(f, f.conj(), tol=1e-9)
    z = Signal.zeros(f.grid)
    assert is_equivalent(z, z, tol=1e-9)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_phase_distance_is_pseudometric(seed):
    f, g, h = random_signal(seed), random_signal(seed + 1), random_signal(seed + 2)
    d = global_phase_distance
    assert abs(d(f, g) - d(g, f)) <= 1e-10
    assert d(f, h) <= d(f, g) + d(g, h) + 1e-10


@given(seeds, st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
@settings(max_examples=30, deadline=None)
def test_phase_distance_scales(seed, c):
    f, g = random_signal(seed), random_signal(seed + 1)
    lhs = global_phase_distance(c * f, c * g)
    rhs = abs(c) * global_phase_distance(f, g)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


@given(seeds, st.floats(1e-6, 1.0))
@settings(max_examples=30, deadline=None)
def test_is_equivalent_reflexive_symmetric(seed, tol):
    f, g = random_signal(seed), random_signal(seed + 1)
    assert is_equivalent(f, f, tol)
    assert is_equivalent(f, g, tol) == is_equivalent(g, f, tol)


def test_relative_phase_distance_bounded():
    f, g = random_signal(1), random_signal(2)
    assert 0 <= relative_phase_distance(f, g) <= 2
