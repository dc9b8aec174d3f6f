import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from pla_forge import response as r
from pla_forge.envelope import raised_cosine
from pla_forge.sequences import PulseSequence, get

RABI = 1.5e6
BASE = RABI / (2 * np.pi)


def quad_h(seq, f):
    """Filter function by direct numerical integration of each pulse."""
    w = 2 * np.pi * f / seq.rabi
    env = seq.envelope
    width = env.width
    acc = np.zeros(2, dtype=complex)
    for l, t in enumerate(seq.toggling):
        rho = 0.5 * np.array([np.cos(t), np.sin(t)])
        a, b = l * width, (l + 1) * width
        shifted = lambda t: env.shape(t - a)  # noqa: E731
        re = integrate.quad(shifted, a, b, weight="cos", wvar=w, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        im = integrate.quad(shifted, a, b, weight="sin", wvar=w, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        acc += rho * (re + 1j * im)
    return float(np.sum(np.abs(-1j * w * acc) ** 2))


def test_zero_frequency():
    for name in ("primitive", "PLA2_1"):
        assert r.filter_function(get(name), 0.0) == 0.0


@given(st.floats(1e-3, 10))
def test_primitive_closed_form(x):
    s = get("primitive")
    f = x * BASE
    assert np.isclose(r.filter_function(s, f), np.sin(np.pi * f * s.tau) ** 2, rtol=1e-10, atol=1e-15)


@given(st.floats(-10, 10))
def test_even_in_frequency(x):
    s = get("knill")
    assert r.filter_function(s, x * BASE) == r.filter_function(s, -x * BASE)


@pytest.mark.parametrize("name", ["knill", "F1"])
@pytest.mark.parametrize("x", [1e-3, 0.3, 2.7])
def test_square_matches_quadrature(name, x):
    s = get(name)
    assert np.isclose(r.filter_function(s, x * BASE), quad_h(s, x * BASE), rtol=1e-8)


@pytest.mark.parametrize("x", [0.05, 0.7, 3.0])
def test_raised_cosine_matches_quadrature(x):
    s = get("PLA1_2").with_envelope(raised_cosine())
    assert np.isclose(r.filter_function(s, x * BASE), quad_h(s, x * BASE), rtol=1e-8)


def test_f1_low_frequency_asymptote():
    from pla_forge.design import continuous_moment

    s = get("F1")
    c2 = np.linalg.norm(continuous_moment(s, 2))
    w = np.array([1e-4, 1e-3])
    h = r.filter_function(s, w * BASE)
    # h ≈ |Ω³ c_{a,2}|² (ω/Ω)⁶ with c_{a,p} carrying the 1/2 of ρ_a
    assert np.allclose(h / w ** 6, c2 ** 2, rtol=1e-3)


@pytest.mark.parametrize("name,slope", [("primitive", 2), ("knill", 4), ("F1", 6), ("PLA2_1", 8)])
def test_filter_slopes(name, slope):
    assert abs(r.filter_order(get(name)).slope - slope) < 0.1


def test_filter_order_degenerate_window():
    with pytest.raises(ValueError):
        r.filter_order(get("F1"), (10.0, 10.0))


def test_first_order_primitive():
    s = get("primitive")
    f, sig = 1e4, 0.01 * RABI
    expect = np.sin(np.pi * f * s.tau) ** 2 * sig ** 2 / (2 * np.pi * f) ** 2
    assert np.isclose(r.first_order_infidelity(s, f, sig), expect)
    with pytest.raises(ValueError):
        r.first_order_infidelity(s, 0.0, sig)


def test_dc_second_order_values():
    sig = 0.0121 * RABI
    assert r.dc_second_order(get("F1"), sig) <= 1e-12
    assert r.dc_second_order(get("PLA1_2"), sig) > 1e-7
    assert r.dc_second_order(get("primitive"), sig) == 0.0


@pytest.mark.parametrize("s", [1e-3, 1e-2, 0.05])
def test_dc_quadrature_primitive(s):
    sig = s * RABI
    expect = 0.5 * (1 - np.exp(-0.5 * (sig * np.pi / RABI) ** 2))
    assert np.isclose(r.dc_limit_quadrature(get("primitive"), sig), expect, rtol=1e-6)


def test_dc_quadrature_monotone():
    sig = np.linspace(0, 0.05, 26) * RABI
    for name in ("knill", "F1", "PLA2_1"):
        v = np.array([r.dc_limit_quadrature(get(name), x) for x in sig])
        assert np.all(v >= 0) and np.all(np.diff(v) >= -1e-18)


def test_dc_quadrature_tracks_second_order():
    sig = 0.0121 * RABI
    for name in ("knill", "PLA1_2", "PLA2_1"):
        s = get(name)
        assert np.isclose(r.dc_limit_quadrature(s, sig), r.dc_second_order(s, sig), rtol=0.01)


def test_second_order_dc_limit():
    sig = 0.0121 * RABI
    for name in ("knill", "PLA1_2"):
        s = get(name)
        assert np.isclose(r.second_order_infidelity(s, 1e-3, sig), r.dc_second_order(s, sig), rtol=1e-6)


def test_theory_curve_shapes():
    s, sig = get("knill"), 0.0121 * RABI
    one = r.theory_curve(s, 1e3, sig)
    many = r.theory_curve(s, [1e3, 1e4], sig)
    assert isinstance(one, r.TheoryPrediction) and len(many) == 2
    assert one.total == pytest.approx(one.first_order + one.dc_second_order)
    assert all(v >= 0 for v in (one.first_order, one.dc_second_order, one.dc_quadrature, one.corrected))


def test_regime_boundaries_requires_pla():
    with pytest.raises(ValueError, match="PLA\\(2\\)"):
        r.regime_boundaries(get("F1"), get("PLA1_2"), 1e-3)
    with pytest.raises(ValueError, match="PLA\\(1\\)"):
        r.regime_boundaries(get("knill"), get("PLA2_1"), 1e-3)


def test_regime_boundaries_scaling():
    lo1, up1 = r.regime_boundaries(get("F1"), get("PLA2_1"), 1e-4)
    lo2, up2 = r.regime_boundaries(get("F1"), get("PLA2_1"), 1e-2)
    assert up1 == up2
    assert np.isclose(lo2 / lo1, 10.0)


def test_regime_map_orientation():
    w = np.geomspace(1e-4, 0.5, 30)
    s = np.array([1e-4, 1e-2])
    m = r.regime_map(get("F1"), get("PLA2_1"), w, s)
    assert m.shape == (2, 30)
    assert np.all(m > 0)


def test_random_sequence_against_quadrature():
    rng = np.random.default_rng(7)
    s = PulseSequence("rand", rng.uniform(0, 2 * np.pi, 7))
    f = 0.37 * BASE
    assert np.isclose(r.filter_function(s, f), quad_h(s, f), rtol=1e-8)


def _boundary_offsets(s_hi):
    ref, alt = get("F1"), get("PLA2_1")
    w = np.geomspace(1e-4, 0.5, 75)
    s = np.geomspace(1e-4, s_hi, 21)
    cell = w[1] / w[0]
    blue = r.regime_map(ref, alt, w, s) < 1
    lower, upper = r.regime_boundaries(ref, alt, s)
    off = []
    for i in range(s.size):
        b = w[blue[i]]
        if b.size == 0:
            off.append(np.inf)
            continue
        off.append(max(np.log(b.min() / lower[i]), np.log(upper[i] / b.max())) / np.log(cell))
    return np.array(off)


def test_boundaries_on_contour_in_asymptotic_range():
    # within one grid cell plus one cell of quantization
    assert np.all(np.abs(_boundary_offsets(5e-3)) <= 2)


@pytest.mark.xfail(strict=True, reason="closed-form boundaries are separate asymptotes; "
                                       "the exact contour closes before their apex")
def test_boundaries_on_contour_near_apex():
    assert np.all(np.abs(_boundary_offsets(6e-2)) <= 2)
