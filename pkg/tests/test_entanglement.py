import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entvol.entanglement import (
    Case,
    classify_margins,
    concurrence,
    entanglement_volume,
    excitation_margins,
    fast_volume,
    one_to_other_weight,
    single_qubit_purity,
)
from entvol.errors import DomainError
from entvol.sector_state import FullState, embed_full, make_two_branch


def reduced_density_matrix(psi, n, k):
    """Reference partial trace through the explicit density matrix."""
    t = np.asarray(psi).reshape([2] * n)
    t = np.moveaxis(t, k - 1, 0).reshape(2, -1)
    return t @ t.conj().T


def reference_weight(psi, n, k):
    rho = reduced_density_matrix(psi, n, k)
    purity = np.trace(rho @ rho).real
    return 1.0 - np.sqrt(max(2 * purity - 1, 0.0))


def basis_state(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return FullState(len(bits), v)


GHZ = FullState(3, np.array([1, 0, 0, 0, 0, 0, 0, 1], dtype=complex) / np.sqrt(2))
W = FullState(3, np.array([0, 1, 1, 0, 1, 0, 0, 0], dtype=complex) / np.sqrt(3))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reference_states(k):
    assert single_qubit_purity(basis_state("000"), k) == pytest.approx(1, abs=1e-15)
    assert single_qubit_purity(GHZ, k) == pytest.approx(0.5, abs=1e-15)
    assert single_qubit_purity(W, k) == pytest.approx(5 / 9, abs=1e-15)
    assert one_to_other_weight(basis_state("000"), k) == 0
    assert one_to_other_weight(GHZ, k) == pytest.approx(1, abs=1e-15)
    assert one_to_other_weight(W, k) == pytest.approx(2 / 3, abs=1e-15)
    assert concurrence(GHZ, k) == pytest.approx(1, abs=1e-15)


def test_volumes():
    assert entanglement_volume(GHZ).y_s == pytest.approx(3, abs=1e-14)
    assert entanglement_volume(W).y_s == pytest.approx(2, abs=1e-14)
    assert entanglement_volume(basis_state("001")).y_s == 0


def test_weight_agrees_with_schmidt_number_form():
    rng = np.random.default_rng(5)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = FullState(4, psi / np.linalg.norm(psi))
    for k in range(1, 5):
        K = 1 / single_qubit_purity(s, k)
        C = concurrence(s, k)
        y = one_to_other_weight(s, k)
        assert y == pytest.approx(1 - np.sqrt(2 / K - 1), abs=1e-12)
        assert y == pytest.approx(1 - np.sqrt(1 - C**2), abs=1e-12)


def test_bad_inputs():
    with pytest.raises(DomainError):
        single_qubit_purity(W, 4)
    with pytest.raises(DomainError):
        single_qubit_purity(np.ones(8), 1)
    with pytest.raises(DomainError):
        entanglement_volume(np.ones(6) / np.sqrt(6))


def test_fast_volume_examples():
    w = make_two_branch(3, 1, [1, 1, 1], 0.0)
    assert fast_volume(w).y_s == pytest.approx(2, abs=1e-15)
    assert fast_volume(make_two_branch(5, 2, np.arange(1, 11), np.pi / 2)).y_s == pytest.approx(0, abs=1e-15)
    s = make_two_branch(3, 1, [0.2, 1j, -0.5], np.pi / 4)
    assert fast_volume(s).y_s == pytest.approx(2 * (3 - 1) * np.cos(np.pi / 4) ** 2, abs=1e-15)


def test_classification_examples():
    w = make_two_branch(3, 1, [1, 1, 1], 0.0)
    np.testing.assert_allclose(excitation_margins(w.excitation_weights(), 0.0), -1 / 3, atol=1e-15)
    assert fast_volume(w).case_label is Case.CASE2
    assert fast_volume(make_two_branch(3, 1, [1, 0, 0], 0.0)).case_label is Case.NONE
    assert fast_volume(make_two_branch(3, 1, [0.1, 0.7, 0.3], np.pi / 3)).case_label is Case.CASE1
    assert classify_margins(np.zeros(4)) is Case.CASE1
    np.testing.assert_array_equal(classify_margins(np.array([[1.0, 0.5], [-1.0, -0.1], [1.0, -1.0]])), [1, 2, 0])


def _random_branch(n, e, seed, theta, phi):
    rng = np.random.default_rng(seed)
    dim = math.comb(n, e)
    return make_two_branch(n, e, rng.normal(size=dim) + 1j * rng.normal(size=dim), theta, phi)


@settings(max_examples=80)
@given(st.integers(3, 8), st.data(), st.integers(0, 2**32 - 1),
       st.floats(0, np.pi / 2), st.floats(-np.pi, np.pi))
def test_fast_matches_partial_trace(n, data, seed, theta, phi):
    e = data.draw(st.integers(1, n - 2))
    s = _random_branch(n, e, seed, theta, phi)
    psi = embed_full(s).amps
    ref = np.array([reference_weight(psi, n, k) for k in range(1, n + 1)])
    fast = fast_volume(s)
    np.testing.assert_allclose(fast.y_per_qubit, ref, atol=1e-7)
    np.testing.assert_allclose(entanglement_volume(embed_full(s)).y_per_qubit, fast.y_per_qubit, atol=1e-10)
    assert 0 <= fast.y_s <= n


@settings(max_examples=40)
@given(st.integers(3, 7), st.integers(0, 2**32 - 1), st.floats(0, np.pi / 2), st.floats(-np.pi, np.pi))
def test_phase_and_bit_flip_invariance(n, seed, theta, phi):
    e = n - 1  # the generic path carries the phi-dependent coherence here
    a = embed_full(_random_branch(n, e, seed, theta, 0.0))
    b = embed_full(_random_branch(n, e, seed, theta, phi))
    assert abs(entanglement_volume(a).y_s - entanglement_volume(b).y_s) < 1e-12
    assert abs(entanglement_volume(a).y_s - entanglement_volume(a.bit_flipped()).y_s) < 1e-12


def test_coherent_marginal_at_e_n_minus_1():
    # fast form ignores the <0|rho_k|1> coherence that appears when e = n - 1
    s = make_two_branch(3, 2, [1, 1, 1], np.pi / 6)
    psi = embed_full(s).amps
    ref = [reference_weight(psi, 3, k) for k in (1, 2, 3)]
    np.testing.assert_allclose(entanglement_volume(embed_full(s)).y_per_qubit, ref, atol=1e-7)
    assert np.max(np.abs(fast_volume(s).y_per_qubit - ref)) > 1e-3
