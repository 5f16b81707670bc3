import numpy as np
import pytest

from entvol.entanglement import entanglement_volume
from entvol.errors import DomainError
from entvol.open_dynamics import (
    OpenSystemParams,
    ccrr_state,
    damping_amplitudes,
    evolve_open,
    open_amplitude_trace,
)


def test_damping_amplitudes():
    assert damping_amplitudes(1.0, 0.0) == (1.0, 0.0)
    xi, chi = damping_amplitudes(1.0, 40.0)
    assert xi < 1e-8 and chi == pytest.approx(1.0, abs=1e-15)
    xi, chi = damping_amplitudes(2.0, np.log(2) / 2)
    assert xi**2 == pytest.approx(0.5, abs=1e-15) and chi**2 == pytest.approx(0.5, abs=1e-15)
    xi, chi = damping_amplitudes(0.7, np.linspace(0, 20, 500))
    assert np.max(np.abs(xi**2 + chi**2 - 1)) < 1e-15
    assert np.all(np.diff(xi) < 0) and np.all(np.diff(chi) > 0)
    with pytest.raises(DomainError):
        damping_amplitudes(1.0, -0.1)


def test_ccrr_examples():
    np.testing.assert_allclose(np.abs(ccrr_state(np.pi / 2, 0.3, np.sqrt(0.91)).amps), np.eye(16)[0], atol=1e-15)
    np.testing.assert_array_equal(np.abs(ccrr_state(0.0, 1.0, 0.0).amps), np.eye(16)[0b1100])
    v = ccrr_state(0.0, np.sqrt(0.5), np.sqrt(0.5)).amps
    support = [0b0011, 0b1100, 0b1001, 0b0110]
    np.testing.assert_allclose(v[support], 0.5, atol=1e-15)
    assert np.sum(np.abs(np.delete(v, support))) == 0
    with pytest.raises(DomainError):
        ccrr_state(0.1, 0.5, 0.5)


def test_params_validation():
    for bad in (dict(kappa=0.0), dict(horizon=-1.0), dict(samples=1)):
        with pytest.raises(DomainError):
            OpenSystemParams(0.3, **bad)


def test_trace_structure():
    p = OpenSystemParams(0.4, samples=501)
    states = evolve_open(p)
    assert len(states) == 501
    amps = open_amplitude_trace(p)
    assert np.max(np.abs(np.linalg.norm(amps, axis=1) - 1)) < 1e-12
    weight = np.array([bin(i).count("1") for i in range(16)])
    allowed = (weight == 2) | (weight == 0)
    assert np.all(amps[:, ~allowed] == 0)


def test_volume_landmarks():
    assert all(entanglement_volume(s).y_s == 0 for s in evolve_open(OpenSystemParams(np.pi / 2, samples=50)))
    xi, chi = damping_amplitudes(1.0, np.log(2))
    assert entanglement_volume(ccrr_state(0.0, xi, chi)).y_s == pytest.approx(4, abs=1e-12)
    ys = [entanglement_volume(s).y_s for s in evolve_open(OpenSystemParams(0.3 * np.pi))]
    assert np.ptp(ys) < 1e-9


def test_kappa_only_rescales_time():
    a = open_amplitude_trace(OpenSystemParams(0.2, kappa=1.0, samples=101))
    b = open_amplitude_trace(OpenSystemParams(0.2, kappa=3.0, samples=101))
    np.testing.assert_array_equal(a, b)
