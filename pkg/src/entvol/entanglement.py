"""One-to-other entanglement of pure qubit states and the entanglement volume.

For a single-qubit marginal ``rho_k`` the normalized Schmidt weight is

    Y_k = 1 - sqrt(1 - C_k^2) = 1 - sqrt(2 Tr rho_k^2 - 1),
    C_k = sqrt(2 (1 - Tr rho_k^2)).

``2 Tr rho^2 - 1`` is the squared Bloch-vector length of the marginal, so
``Y_k`` is evaluated as ``1 - |bloch|`` with the length taken by ``hypot``.
Taking the square root of a purity difference instead loses about eight
digits whenever the marginal is close to maximally mixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DomainError
from .sector_state import FullState, SectorBasis, TwoBranchState, excitation_weights


class Case(IntEnum):
    """Which uniform sign condition on the excitation margins holds."""

    NONE = 0
    CASE1 = 1
    CASE2 = 2


@dataclass(frozen=True)
class VolumeSample:
    t: float
    y_per_qubit: np.ndarray
    y_s: float
    r_squared: np.ndarray | None = None
    case_label: Case = Case.NONE


def _as_full(state) -> FullState:
    if isinstance(state, FullState):
        return state
    amps = np.asarray(state, dtype=complex)
    n = int(round(np.log2(amps.size)))
    if 2**n != amps.size:
        raise DomainError(f"{amps.size} amplitudes is not a power of two")
    return FullState(n, amps)


def _check_qubit(n, k):
    if not 1 <= k <= n:
        raise DomainError(f"qubit index k={k} outside [1, {n}]")


def marginal_components(amps: np.ndarray, n: int, k: int):
    """Population difference ``p0 - p1`` and coherence ``<0|rho_k|1>`` of qubit k.

    ``amps`` may carry leading batch axes; the last axis has length 2**n.
    """
    psi = np.asarray(amps)
    psi = psi.reshape(psi.shape[:-1] + (2 ** (k - 1), 2, 2 ** (n - k)))
    zero = psi[..., 0, :]
    one = psi[..., 1, :]
    p0 = np.sum(np.abs(zero) ** 2, axis=(-2, -1))
    p1 = np.sum(np.abs(one) ** 2, axis=(-2, -1))
    coh = np.sum(zero * one.conj(), axis=(-2, -1))
    return p0 - p1, coh


def bloch_lengths(amps: np.ndarray, n: int) -> np.ndarray:
    """Bloch-vector length of every single-qubit marginal, shape ``(..., n)``."""
    amps = np.asarray(amps, dtype=complex)
    out = np.empty(amps.shape[:-1] + (n,))
    for k in range(1, n + 1):
        z, coh = marginal_components(amps, n, k)
        out[..., k - 1] = np.hypot(z, 2.0 * np.abs(coh))
    return out


def single_qubit_purity(state: FullState, k: int) -> float:
    """``Tr rho_k^2`` of the k-th qubit (1-based) by explicit partial trace."""
    state = _as_full(state)
    _check_qubit(state.n, k)
    z, coh = marginal_components(state.amps, state.n, k)
    # p0^2 + p1^2 + 2|coh|^2 with p0 + p1 = 1
    return float(0.5 * (1.0 + z**2) + 2.0 * abs(coh) ** 2)


def one_to_other_weight(state: FullState, k: int) -> float:
    """Normalized Schmidt weight ``Y_k`` between qubit k and the rest."""
    state = _as_full(state)
    _check_qubit(state.n, k)
    z, coh = marginal_components(state.amps, state.n, k)
    return float(1.0 - min(np.hypot(z, 2.0 * abs(coh)), 1.0))


def concurrence(state: FullState, k: int) -> float:
    """One-to-other concurrence ``sqrt(2 (1 - Tr rho_k^2))``."""
    purity = single_qubit_purity(state, k)
    return float(np.sqrt(max(2.0 * (1.0 - purity), 0.0)))


def weights_from_bloch(lengths: np.ndarray) -> np.ndarray:
    return 1.0 - np.clip(lengths, 0.0, 1.0)


def entanglement_volume(state: FullState, t: float = 0.0) -> VolumeSample:
    """``Y_s``, the sum of all one-to-other weights, from the full state vector."""
    state = _as_full(state)
    y = weights_from_bloch(bloch_lengths(state.amps, state.n))
    return VolumeSample(t, y, float(y.sum()))


def excitation_margins(r_squared, theta: float) -> np.ndarray:
    """``2 cos^2(theta) r_k^2 - cos(2 theta)`` for each qubit."""
    return 2.0 * np.cos(theta) ** 2 * np.asarray(r_squared) - np.cos(2.0 * theta)


def classify_margins(margins, margin_tol: float = 1e-12):
    """Case label(s) from margins whose last axis runs over qubits.

    Case 1 wins a tie, i.e. when every margin is within ``margin_tol`` of 0.
    """
    margins = np.asarray(margins)
    case1 = margins.min(axis=-1) >= -margin_tol
    case2 = margins.max(axis=-1) <= margin_tol
    labels = np.where(case1, int(Case.CASE1), np.where(case2, int(Case.CASE2), int(Case.NONE)))
    if labels.ndim == 0:
        return Case(int(labels))
    return labels


def fast_weights(r_squared, theta: float) -> np.ndarray:
    """``Y_k = 1 - |2 cos^2(theta) r_k^2 - cos(2 theta)|``.

    Exact for two-branch states with ``e <= n - 2``; for ``e = n - 1`` the
    marginals acquire a coherence this form ignores.
    """
    return 1.0 - np.abs(excitation_margins(r_squared, theta))


def fast_volume(state: TwoBranchState, t: float = 0.0, margin_tol: float = 1e-12) -> VolumeSample:
    """Entanglement volume from the excitation weights alone (no 2**n vector)."""
    r2 = state.excitation_weights()
    margins = excitation_margins(r2, state.theta)
    y = 1.0 - np.abs(margins)
    return VolumeSample(t, y, float(y.sum()), r2, classify_margins(margins, margin_tol))


def fast_volume_trace(amps: np.ndarray, basis: SectorBasis, theta: float):
    """Vectorized fast path over a stack of sector amplitudes.

    Returns ``(y_per_qubit, r_squared, margins)``, each of shape ``(T, n)``.
    """
    r2 = excitation_weights(amps, basis)
    margins = excitation_margins(r2, theta)
    return 1.0 - np.abs(margins), r2, margins
