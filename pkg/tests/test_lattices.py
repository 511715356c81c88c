import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from canonica.errors import AdmissibilityError, ParameterError
from canonica.lattices import (
    SamplingKind,
    SamplingSet,
    SqrtLatticeSpec,
    bandlimited_lattice,
    check_bandlimited_step,
    counterexample_lines,
    density_margin,
    explicit,
    load_sampling,
    sqrt_admissible,
    sqrt_bounds,
    sqrt_lattice,
)
from canonica.signal import Grid


def test_sqrt_lattice_small():
    s = sqrt_lattice(SqrtLatticeSpec(1.0, 1.0, 1))
    expected = [(x, m) for x in (-1.0, 0.0, 1.0) for m in (-1.0, 0.0, 1.0)]
    np.testing.assert_array_equal(s.points, expected)


def test_sqrt_lattice_abscissae():
    s = sqrt_lattice(SqrtLatticeSpec(0.3, 1.0, 4))
    r = 0.3 * np.sqrt([1, 2, 3, 4])
    np.testing.assert_allclose(s.xs, np.concatenate([-r[::-1], [0.0], r]), rtol=1e-15)


def test_sqrt_lattice_count():
    assert len(sqrt_lattice(SqrtLatticeSpec(0.4, 0.4, 20))) == 41 ** 2


def test_sqrt_lattice_spec_validation():
    for args in ((0.0, 1.0, 3), (1.0, -1.0, 3), (1.0, 1.0, 0), (1.0, 1.0, 2.5)):
        with pytest.raises(ParameterError):
            SqrtLatticeSpec(*args)


@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0), st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_sqrt_lattice_symmetric_and_sorted(tau, v, K):
    pts = sqrt_lattice(SqrtLatticeSpec(tau, v, K)).points
    as_set = {tuple(p) for p in pts}
    for flip in (np.array([-1.0, 1.0]), np.array([1.0, -1.0])):
        assert {tuple(p + 0.0) for p in pts * flip} == as_set
    keys = [tuple(p) for p in pts]
    assert keys == sorted(keys)
    assert len(as_set) == len(pts)


def test_sampling_set_dedup_and_validation():
    s = explicit([(1, 2), (0, 0), (1, 2), (-0.0, 0)])
    np.testing.assert_array_equal(s.points, [(0, 0), (1, 2)])
    with pytest.raises(ParameterError):
        explicit([(np.nan, 0)])


def test_sampling_json_round_trip(tmp_path):
    for s in (sqrt_lattice(SqrtLatticeSpec(0.4, 0.5, 5)), explicit([(0.1, 0.2), (0.3, -0.4)]),
              counterexample_lines(1.0, 2.0, 2, Grid(-1, 0.5, 5)), bandlimited_lattice(1.0, 0.2, 1.0, 3, 2)):
        again = SamplingSet.from_json(s.to_json())
        assert again == s
        p = tmp_path / "s.json"
        p.write_text(s.to_json())
        assert load_sampling(p) == s
    assert SamplingSet.from_json('{"kind":"sqrt","tau":0.5,"v":0.5,"K":20}').kind is SamplingKind.SQRT
    with pytest.raises(ParameterError):
        SamplingSet.from_dict({"kind": "hexagonal"})


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    sqrt_lattice(SqrtLatticeSpec(0.4, 0.4, 20)).to_csv(a)
    sqrt_lattice(SqrtLatticeSpec(0.4, 0.4, 20)).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "x,mu"


@pytest.mark.parametrize("gamma, b", [(0.5, 1.0), (1.0, 2.0), (0.25, -1.5)])
def test_gaussian_bounds(gamma, b):
    tau_max, v_max = sqrt_bounds(gamma, gamma, b)
    assert tau_max == pytest.approx(math.sqrt(1 / (2 * gamma * math.e)), rel=1e-15)
    assert v_max == pytest.approx(abs(b) * math.sqrt(2 * gamma / math.e), rel=1e-15)


def test_hermite_simplified_time_bound():
    for b in (0.5, 1.0, 3.0):
        gamma = 1 / (2 * b)
        assert sqrt_bounds(gamma, gamma, b)[0] == pytest.approx(math.sqrt(b / math.e), rel=1e-15)


def test_admissible_half():
    tau_max, v_max = sqrt_bounds(0.5, 0.5, 1.0)
    assert tau_max == pytest.approx(1 / math.sqrt(math.e))
    assert v_max == pytest.approx(1 / math.sqrt(math.e))
    assert sqrt_admissible(0.5, 0.5, 1.0, 0.5, 0.5)
    assert not sqrt_admissible(0.5, 0.5, 1.0, 0.7, 0.5)


def test_strict_reading_is_tighter():
    assert sqrt_admissible(0.5, 0.5, 1.0, 0.4, 0.4)
    assert not sqrt_admissible(0.5, 0.5, 1.0, 0.4, 0.4, strict=True)
    loose, strict = sqrt_bounds(0.5, 0.5, 1.0), sqrt_bounds(0.5, 0.5, 1.0, strict=True)
    assert strict[0] <= loose[0] and strict[1] <= loose[1]


def test_bounds_validation():
    with pytest.raises(ParameterError):
        sqrt_bounds(0.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        sqrt_bounds(1.0, 1.0, 0.0)


@given(st.floats(0.1, 2), st.floats(0.1, 2), st.floats(0.2, 3), st.floats(0.01, 1), st.floats(0.01, 1),
       st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=50, deadline=None)
def test_admissible_monotone(m, n, b, tau, v, shrink_t, shrink_v):
    if sqrt_admissible(m, n, b, tau, v):
        assert sqrt_admissible(m, n, b, tau * shrink_t + 1e-12, v * shrink_v + 1e-12)


def test_density_margin():
    assert density_margin(0.5, 1.0, 20) == pytest.approx(1 / math.sqrt(math.e) - 0.5, abs=1e-15)
    assert density_margin(0.5, 1.0, 20) > 0
    assert density_margin(1 / math.sqrt(math.e), 1.0, 20) == pytest.approx(0.0, abs=1e-15)
    assert density_margin(0.7, 1.0, 20) < 0


def test_counterexample_lines():
    mu = Grid(-2.0, 0.5, 9)
    s = counterexample_lines(1.0, math.pi, 3, mu)
    np.testing.assert_allclose(s.xs, np.arange(-3, 4), rtol=1e-15, atol=1e-15)
    s = counterexample_lines(1.0, 2.0, 3, mu)
    np.testing.assert_allclose(np.diff(s.xs), math.pi / 2, rtol=1e-14)
    assert len(s) == 7 * 9
    with pytest.raises(ParameterError):
        counterexample_lines(0.0, 1.0, 3, mu)


def test_bandlimited_lattice():
    s = bandlimited_lattice(1.0, 0.2, 1.0, 15, 3)
    mus = np.unique(s.points[:, 1])
    np.testing.assert_allclose(mus, 0.2 * np.arange(-3, 4), atol=1e-15)
    assert len(s) == 16 * 7
    for m in (0.01, 0.1, 0.2499):
        check_bandlimited_step(1.0, m)
    for m in (0.25, 0.3, 0.0, -0.1):
        with pytest.raises(AdmissibilityError):
            bandlimited_lattice(1.0, m, 1.0, 15, 3)
