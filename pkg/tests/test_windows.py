import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from canonica.errors import ParameterError
from canonica.signal import Grid, Signal, inner_product, l2_norm
from canonica.windows import (
    EnvelopeParams,
    WindowSpec,
    check_fourier_decay,
    envelope_fit,
    fourier_decay_rate,
    hermite_functions,
    make_gaussian,
    make_hermite,
    make_window,
)

WIDE = Grid.centered(0.025, 2048)  # |t| <= 25.6
FINE = Grid.centered(0.02, 512)


def test_envelope_params_positive():
    with pytest.raises(ParameterError):
        EnvelopeParams(0.0, 1.0)


def test_gaussian_values():
    g = make_gaussian(1.0, WIDE)
    assert g.samples[WIDE.n // 2] == 1.0
    np.testing.assert_allclose(l2_norm(g) ** 2, math.sqrt(math.pi / 2), rtol=1e-8)
    sym = make_gaussian(1.0, Grid(-2.0, 0.25, 17))
    np.testing.assert_array_equal(sym.samples, sym.samples[::-1])
    with pytest.raises(ParameterError):
        make_gaussian(0.0, WIDE)


def test_gaussian_envelope_is_gamma():
    assert WindowSpec.gaussian(0.5).envelope == EnvelopeParams(0.5, 0.5)


def test_hermite_zero():
    h = make_hermite(0, FINE)
    np.testing.assert_allclose(h.samples[FINE.n // 2], 2 ** 0.25, rtol=1e-15)


def test_hermite_orthonormal():
    hs = [make_hermite(k, FINE) for k in range(6)]
    gram = np.array([[inner_product(a, b) for b in hs] for a in hs])
    np.testing.assert_allclose(gram, np.eye(6), atol=1e-8)


def test_hermite_matches_numpy_hermite():
    # h_k(t) = 2^{1/4} (2^k k!)^{-1/2} H_k(sqrt(2 pi) t) e^{-pi t^2}
    t = np.linspace(-2, 2, 41)
    rows = hermite_functions(6, t)
    x = math.sqrt(2 * math.pi) * t
    for k in range(7):
        Hk = np.polynomial.hermite.hermval(x, np.eye(7)[k])
        ref = 2 ** 0.25 / math.sqrt(2 ** k * math.factorial(k)) * Hk * np.exp(-math.pi * t * t)
        np.testing.assert_allclose(rows[k], ref, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("k", range(8))
def test_hermite_parity(k):
    h = make_hermite(k, FINE).samples
    np.testing.assert_allclose(h[1:][::-1], (-1) ** k * h[1:], atol=1e-12)


@pytest.mark.parametrize("k", [-1, 33, 1.5])
def test_hermite_order_range(k):
    with pytest.raises(ParameterError):
        WindowSpec.hermite(k)


def test_window_spec_json_round_trip():
    for spec in (WindowSpec.gaussian(0.5), WindowSpec.hermite(3), WindowSpec.polygaussian([0, 0, 1], 2.0)):
        again = WindowSpec.from_json(__import__("json").dumps(spec.to_dict()))
        assert again == spec
        np.testing.assert_array_equal(make_window(again, FINE).samples, spec.on(FINE).samples)


def test_window_spec_rejects_unknown_kind():
    with pytest.raises(ParameterError):
        WindowSpec.from_dict({"kind": "boxcar"})


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 2.0])
def test_envelope_fit_gaussian(gamma):
    m_hat, C = envelope_fit(make_gaussian(gamma, WIDE))
    assert abs(m_hat - gamma) <= 1e-6
    assert C == pytest.approx(1.0, rel=1e-6)


def test_envelope_fit_polynomial_factor():
    assert envelope_fit(make_hermite(3, FINE))[0] >= math.pi - 0.1
    assert envelope_fit(WindowSpec.polygaussian([0, 0, 1], 2.0).on(WIDE))[0] >= 2 - 0.1


def test_envelope_fit_bound_holds():
    f = make_hermite(4, FINE)
    m_hat, C = envelope_fit(f)
    mag = np.abs(f.samples)
    sig = mag > 1e-12 * mag.max()
    assert np.all(mag[sig] <= C * np.exp(-m_hat * FINE.points[sig] ** 2) * (1 + 1e-12))


def test_envelope_fit_zero():
    with pytest.raises(ParameterError):
        envelope_fit(Signal.zeros(WIDE))


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 2.0])
def test_fourier_decay_gaussian(gamma):
    assert check_fourier_decay(make_gaussian(gamma, WIDE), gamma) <= 1e-6


def test_fourier_decay_hermite():
    h = make_hermite(2, FINE)
    assert check_fourier_decay(h, math.pi) <= 0.05


def test_fourier_decay_zero_passes():
    assert check_fourier_decay(Signal.zeros(WIDE), 1.0) <= 0


@given(st.sampled_from([0.25, 0.5, 1.0, 2.0]))
@settings(max_examples=4, deadline=None)
def test_fourier_decay_rate_reciprocal(gamma):
    rate = fourier_decay_rate(make_gaussian(gamma, WIDE))
    assert abs(rate - 1 / (4 * gamma)) <= 0.02 / (4 * gamma)
