import math

import numpy as np
import pytest

from entvol.errors import ResourceError
from entvol.oracle import cross_check, full_evolve, full_hamiltonian, total_z
from entvol.sector_state import FullState, embed_full, enumerate_sector, make_two_branch
from entvol.xx_dynamics import XXModel, evolve, evolve_trace, time_grid


def test_two_site_matrix():
    H = full_hamiltonian(XXModel(2, 0.7))
    expected = np.zeros((4, 4))
    expected[0b01, 0b10] = expected[0b10, 0b01] = 1.4
    np.testing.assert_array_equal(H, expected)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_block_structure(n):
    H = full_hamiltonian(XXModel(n))
    assert np.array_equal(H, H.T)
    Z = np.diag(total_z(n))
    assert np.max(np.abs(H @ Z - Z @ H)) < 1e-12
    pop = np.array([bin(i).count("1") for i in range(2**n)])
    rows, cols = np.nonzero(H)
    assert np.all(pop[rows] == pop[cols])
    assert np.all(H[:, -1] == 0)


def test_cap():
    with pytest.raises(ResourceError):
        full_hamiltonian(XXModel(15))


@pytest.mark.parametrize("n", range(2, 11))
def test_single_excitation_block_spectrum(n):
    H = full_hamiltonian(XXModel(n))
    idx = enumerate_sector(n, 1).codes
    w = np.sort(np.linalg.eigvalsh(H[np.ix_(idx, idx)]))[::-1]
    np.testing.assert_allclose(w, 4 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)), atol=1e-10)


def test_full_evolve_basics():
    m = XXModel(4)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = FullState(4, psi / np.linalg.norm(psi))
    np.testing.assert_allclose(full_evolve(s, m, 0.0).amps, s.amps, atol=1e-14)
    out = full_evolve(s, m, 3.3)
    assert abs(np.linalg.norm(out.amps) - 1) < 1e-10
    w, V = np.linalg.eigh(full_hamiltonian(m))
    eig = FullState(4, V[:, 5].astype(complex))
    np.testing.assert_allclose(np.abs(full_evolve(eig, m, 2.0).amps), np.abs(eig.amps), atol=1e-12)


def test_fig1_branch_matches_sector_path():
    s = make_two_branch(3, 1, [1, 0, 0], 0.0)
    m = XXModel(3)
    for t in np.linspace(0, 10, 101):
        np.testing.assert_allclose(embed_full(evolve(s, m, t)).amps, full_evolve(embed_full(s), m, t).amps,
                                   atol=1e-8)


def test_cross_check_examples():
    times = time_grid(10, 201)
    m3 = XXModel(3)
    rep = cross_check(evolve_trace(make_two_branch(3, 1, [1, 0, 0], 0.0), m3, 10, 201), times, m3)
    assert rep.worst < 1e-8 and rep.max_leakage < 1e-12 and rep.samples == 201

    rng = np.random.default_rng(42)
    c = rng.normal(size=math.comb(6, 2)) + 1j * rng.normal(size=math.comb(6, 2))
    m6 = XXModel(6)
    s = make_two_branch(6, 2, c, float(rng.uniform(0, np.pi / 2)), 1.1)
    rep = cross_check(evolve_trace(s, m6, 10, 201), times, m6)
    assert rep.max_dy_s < 1e-8 and rep.max_leakage < 1e-12

    frozen = make_two_branch(4, 2, np.ones(6), np.pi / 2)
    rep = cross_check(evolve_trace(frozen, XXModel(4), 10, 201), times, XXModel(4))
    assert rep.max_dy_s == 0 and rep.max_dy_k == 0
