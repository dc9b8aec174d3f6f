import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pla_forge import sequences as sq
from pla_forge.sequences import PulseSequence

odd_phases = st.integers(0, 7).flatmap(
    lambda k: st.lists(st.floats(0, 2 * np.pi, allow_nan=False), min_size=2 * k + 1, max_size=2 * k + 1))


@given(odd_phases)
def test_toggling_round_trip(phases):
    tog = sq.toggling_phases(phases)
    back = sq.lab_phases(tog)
    assert np.allclose(sq.wrap(back - np.asarray(phases)), 0, atol=1e-9)


@given(odd_phases, st.floats(-np.pi, np.pi))
def test_lab_offset_is_uniform_toggling_offset(phases, delta):
    a = sq.toggling_phases(phases)
    b = sq.toggling_phases(np.asarray(phases) + delta)
    assert np.allclose(sq.wrap(b - a - delta), 0, atol=1e-9)


def test_single_pulse_toggling():
    assert np.isclose(sq.toggling_phases([0.3])[0], 0.3)


def test_even_length_rejected():
    with pytest.raises(ValueError):
        PulseSequence("even", [0.0, 1.0])


def test_phases_read_only():
    s = PulseSequence("x", [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        s.phases[0] = 1.0


def test_json_round_trip(tmp_path):
    s = sq.get("PLA2_1")
    path = tmp_path / "s.json"
    s.save(path)
    t = PulseSequence.load(path)
    assert t.name == s.name and np.array_equal(t.phases, s.phases) and t.rabi == s.rabi


def test_degrees_input():
    d = {"name": "knill_deg", "phases_rad": [30, 0, 90, 0, 30], "rabi_rad_per_s": 1.5e6}
    s = PulseSequence.from_dict(d, degrees=True)
    assert np.allclose(s.phases, sq.get("knill").phases)


@given(st.floats(0, 4 * np.pi), st.floats(0, 2 * np.pi))
def test_rotation_is_unitary(angle, phase):
    assert sq.is_unitary(sq.rotation(angle, phase))


@pytest.mark.parametrize("name", ["primitive", "knill", "F1", "PLA1_2", "PLA2_1", "PLA3_1"])
def test_catalog_is_pi_gate(name):
    s = sq.get(name)
    u = sq.sequence_unitary(s)
    assert sq.is_unitary(u)
    gamma, _ = sq.gate_angle(s)
    # up to global phase a π rotation about an equatorial axis
    assert abs(np.trace(u)) < 1e-9
    assert np.isclose(sq.fidelity(u, sq.ideal_unitary(s)), 1.0)


def test_knill_gate_angle():
    gamma, k = sq.gate_angle(sq.get("knill"))
    assert np.isclose(gamma, np.pi / 6)


def test_fidelity_rejects_non_unitary():
    with pytest.raises(ValueError):
        sq.fidelity(np.eye(2), 2 * np.eye(2))


def test_unknown_name():
    with pytest.raises(KeyError):
        sq.get("nope")


def test_catalog_serializes():
    json.dumps([s.to_dict() for s in sq.catalog()])


def test_infidelity_accurate_for_tiny_errors():
    u0 = sq.rotation(np.pi, 0.3)
    eps = 1e-10
    u = u0 @ sq.rotation(2 * eps, 1.1)
    assert np.isclose(sq.infidelity(u0, u), np.sin(eps) ** 2, rtol=1e-6)
    assert np.isclose(sq.infidelity(u0, u0 @ sq.rotation(0.4, 0.2)), 1 - sq.fidelity(u0, u0 @ sq.rotation(0.4, 0.2)))
