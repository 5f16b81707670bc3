"""Evolution of two-branch states under the open XX chain.

    H = J sum_{k=1}^{n-1} (X_k X_{k+1} + Y_k Y_{k+1})

conserves the number of excitations, so only the sector branch moves; the
all-ones string is a zero-energy eigenstate and the ``sin(theta)`` branch is
left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .sector_state import SectorBasis, TwoBranchState, enumerate_sector


@dataclass(frozen=True)
class XXModel:
    n: int
    J: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"XX chain needs n >= 2, got {self.n}")
        if not np.isfinite(self.J) or self.J == 0:
            raise DomainError(f"coupling J must be finite and nonzero, got {self.J}")


def _hopping_matrix(basis: SectorBasis, J: float) -> np.ndarray:
    n = basis.n
    dim = len(basis)
    H = np.zeros((dim, dim))
    for i, s in enumerate(basis.strings):
        for k in range(n - 1):
            if s[k] != s[k + 1]:
                swapped = s[:k] + s[k + 1] + s[k] + s[k + 2:]
                H[basis.index(swapped), i] = 2.0 * J
    return H


def sector_hamiltonian(model: XXModel, e: int) -> np.ndarray:
    """XX Hamiltonian restricted to the ``e``-excitation sector.

    Each bond term ``XX + YY = 2 (s+ s- + s- s+)`` moves an excitation to a
    neighbouring empty site with amplitude ``2J``; there is no diagonal part.
    """
    return _hopping_matrix(enumerate_sector(model.n, e), model.J)


@dataclass(frozen=True)
class SectorPropagatorCache:
    """Eigendecomposition of one sector block, reused for every time step."""

    n: int
    e: int
    J: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def propagator(self, t: float) -> np.ndarray:
        V = self.eigenvectors
        return (V * np.exp(-1j * self.eigenvalues * t)) @ V.conj().T

    def evolve_amps(self, amps: np.ndarray, times) -> np.ndarray:
        """Amplitudes at each of ``times``; shape ``(len(times), dim)``."""
        V = self.eigenvectors
        coeffs = V.conj().T @ amps
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.eigenvalues))
        return (phases * coeffs) @ V.T


@lru_cache(maxsize=128)
def sector_propagator(n: int, e: int, J: float) -> SectorPropagatorCache:
    H = sector_hamiltonian(XXModel(n, J), e)
    w, V = np.linalg.eigh(H)
    w.setflags(write=False)
    V.setflags(write=False)
    return SectorPropagatorCache(n, e, J, w, V)


def single_excitation_energies(model: XXModel) -> np.ndarray:
    """``E_k = 4J cos(k pi / (n+1))`` for k = 1..n (descending for J > 0)."""
    k = np.arange(1, model.n + 1)
    return 4.0 * model.J * np.cos(k * np.pi / (model.n + 1))


def single_excitation_modes(model: XXModel) -> np.ndarray:
    """Standing-wave eigenvectors; column k-1 is the mode with energy ``E_k``.

    Row m-1 is the site m amplitude ``sqrt(2/(n+1)) sin(m k pi / (n+1))``.
    Rows follow site order, which is the reverse of the sector order
    (site 1 excited is the string 10...0, the last one lexicographically).
    """
    n = model.n
    idx = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(idx, idx) * np.pi / (n + 1))


def single_excitation_propagator(model: XXModel, t: float) -> np.ndarray:
    """Closed-form ``G_{mn}(t)`` in site order (row/column m-1 is site m)."""
    S = single_excitation_modes(model)
    E = single_excitation_energies(model)
    return (S * np.exp(-1j * E * t)) @ S.T


def _site_order(n: int) -> np.ndarray:
    # sector index of the string with site m excited, for m = 1..n
    return np.arange(n - 1, -1, -1)


def sector_amplitude_trace(state: TwoBranchState, model: XXModel, times) -> np.ndarray:
    """Sector amplitudes at every time in ``times``, shape ``(len(times), dim)``.

    Uses the closed-form standing-wave solution for one excitation and a
    cached eigendecomposition of the sector block otherwise.
    """
    if state.n != model.n:
        raise DomainError(f"state has {state.n} qubits but the model has {model.n}")
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise DomainError("times must be finite")
    e = state.e
    if e == 1:
        order = _site_order(model.n)
        S = single_excitation_modes(model)
        E = single_excitation_energies(model)
        coeffs = S.T @ state.amps[order]
        site_amps = (np.exp(-1j * np.outer(times, E)) * coeffs) @ S.T
        out = np.empty_like(site_amps)
        out[:, order] = site_amps
        return out
    cache = sector_propagator(model.n, e, float(model.J))
    return cache.evolve_amps(state.amps, times)


def evolve(state: TwoBranchState, model: XXModel, t: float) -> TwoBranchState:
    """State after time ``t`` (hbar = 1)."""
    if not np.isfinite(t):
        raise DomainError(f"time must be finite, got {t}")
    if t == 0:
        return state
    amps = sector_amplitude_trace(state, model, [t])[0]
    return state.with_amps(amps)


def time_grid(horizon: float, samples: int) -> np.ndarray:
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    if not horizon > 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    return np.linspace(0.0, horizon, samples)


def evolve_trace(state: TwoBranchState, model: XXModel, horizon: float = 10.0,
                 samples: int = 2001) -> list[TwoBranchState]:
    """States at ``t_j = j * horizon / (samples - 1)``, ``j = 0..samples-1``."""
    times = time_grid(horizon, samples)
    amps = sector_amplitude_trace(state, model, times)
    return [state] + [state.with_amps(a) for a in amps[1:]]


def energy(state: TwoBranchState, model: XXModel) -> float:
    """``<H>``; the all-ones branch contributes nothing."""
    H = sector_hamiltonian(model, state.e)
    a = state.amps
    return float(np.cos(state.theta) ** 2 * np.vdot(a, H @ a).real)
