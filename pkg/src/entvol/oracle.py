"""Brute-force reference path in the full 2**n Hilbert space.

Nothing here reuses the sector machinery of :mod:`entvol.xx_dynamics`: the
Hamiltonian is assembled from Kronecker products of Pauli matrices and the
whole matrix is diagonalized, so agreement between the two paths is a real
check of the sector restriction and of the closed-form propagator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .entanglement import bloch_lengths, weights_from_bloch
from .errors import DomainError, ResourceError
from .sector_state import MAX_QUBITS, FullState, TwoBranchState, embed_full
from .xx_dynamics import XXModel

#: Dense diagonalization of 2**n x 2**n beyond this size is not desk-scale.
MAX_DENSE_QUBITS = 12

_I2 = np.eye(2)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Y = np.array([[0.0, -1j], [1j, 0.0]])


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    return reduce(np.kron, [ops.get(q, _I2) for q in range(n)])


def full_hamiltonian(model: XXModel, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Dense ``J sum_k (X_k X_{k+1} + Y_k Y_{k+1})`` over the open chain."""
    n = model.n
    if n > max_qubits:
        raise ResourceError(f"n={n} exceeds the oracle cap {max_qubits}")
    H = np.zeros((2**n, 2**n), dtype=complex)
    for k in range(n - 1):
        H += _embed({k: _X, k + 1: _X}, n)
        H += _embed({k: _Y, k + 1: _Y}, n)
    if np.max(np.abs(H.imag), initial=0.0) > 0:
        raise AssertionError("XX + YY should be real in the computational basis")
    return model.J * H.real


def total_z(n: int) -> np.ndarray:
    """Diagonal of ``sum_k Z_k`` (qubit 1 is the most significant bit)."""
    codes = np.arange(2**n)
    ones = np.array([bin(c).count("1") for c in codes])
    return (n - 2 * ones).astype(float)


@lru_cache(maxsize=16)
def _full_eigh(n: int, J: float):
    if n > MAX_DENSE_QUBITS:
        raise ResourceError(f"dense oracle evolution is limited to n <= {MAX_DENSE_QUBITS}")
    w, V = np.linalg.eigh(full_hamiltonian(XXModel(n, J)))
    w.setflags(write=False)
    V.setflags(write=False)
    return w, V


def full_evolve_amps(amps: np.ndarray, model: XXModel, times) -> np.ndarray:
    """``exp(-i H t) psi`` for every t; shape ``(len(times), 2**n)``."""
    w, V = _full_eigh(model.n, float(model.J))
    coeffs = V.T @ np.asarray(amps, dtype=complex)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * coeffs) @ V.T


def full_evolve(state: FullState, model: XXModel, t: float) -> FullState:
    if state.n != model.n:
        raise DomainError(f"state has {state.n} qubits but the model has {model.n}")
    return FullState(state.n, full_evolve_amps(state.amps, model, [t])[0])


@dataclass(frozen=True)
class CrossCheckReport:
    max_dy_s: float
    max_dy_k: float
    max_amp_dev: float
    max_leakage: float
    samples: int

    @property
    def worst(self) -> float:
        return max(self.max_dy_s, self.max_dy_k, self.max_amp_dev)


def cross_check(states: list[TwoBranchState], times, model: XXModel) -> CrossCheckReport:
    """Compare a sector-path trace against full-space evolution of its first state.

    ``Y`` values on the library side come from :func:`entvol.freezing.two_branch_weights`,
    i.e. the closed form when it applies and the generic partial trace otherwise.
    """
    from .freezing import two_branch_weights

    times = np.asarray(times, dtype=float)
    if len(states) != len(times):
        raise DomainError("states and times have different lengths")
    first = states[0]
    n = first.n
    psi = full_evolve_amps(embed_full(first).amps, model, times)

    support = np.zeros(2**n, dtype=bool)
    support[first.basis.codes] = True
    support[-1] = True
    leakage = float(np.max(np.abs(psi[:, ~support]), initial=0.0))

    amps = np.stack([s.amps for s in states])
    lib = np.zeros_like(psi)
    lib[:, first.basis.codes] = np.cos(first.theta) * amps
    lib[:, -1] += np.exp(1j * first.phi) * np.sin(first.theta)
    amp_dev = float(np.max(np.abs(lib - psi)))

    y_oracle = weights_from_bloch(bloch_lengths(psi, n))
    y_lib = two_branch_weights(amps, first.basis, first.theta, first.phi)
    dy_k = float(np.max(np.abs(y_lib - y_oracle)))
    dy_s = float(np.max(np.abs(y_lib.sum(axis=1) - y_oracle.sum(axis=1))))
    return CrossCheckReport(dy_s, dy_k, amp_dev, leakage, len(times))
