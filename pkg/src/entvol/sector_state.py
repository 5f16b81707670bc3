"""Fixed-excitation sectors and the two-branch state family.

A two-branch state on ``n`` qubits is

    cos(theta) * sum_p a_p |p>  +  exp(i phi) sin(theta) |11...1>

where ``p`` runs over the n-bit strings carrying exactly ``e`` ones.
Qubit 1 is the leftmost character of a string and the most significant
bit of its integer code, so lexicographic order equals integer order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np

from .errors import DegenerateInputError, DomainError, ResourceError

#: Default cap on the qubit count; the full-space path stores 2**n amplitudes.
MAX_QUBITS = 14

NORM_TOL = 1e-12


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SectorBasis:
    """Lexicographically ordered n-bit strings with exactly ``e`` ones."""

    n: int
    e: int
    strings: tuple[str, ...]

    def __len__(self):
        return len(self.strings)

    @cached_property
    def codes(self) -> np.ndarray:
        """Integer codes of the strings (index into the 2**n full space)."""
        return _frozen([int(s, 2) for s in self.strings])

    @cached_property
    def occupation(self) -> np.ndarray:
        """Boolean matrix ``occ[p, k-1]``: qubit k is excited in string p."""
        occ = np.array([[c == "1" for c in s] for s in self.strings], dtype=bool)
        return _frozen(occ.reshape(len(self.strings), self.n))

    @cached_property
    def _lookup(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.strings)}

    def index(self, string: str) -> int:
        try:
            return self._lookup[string]
        except KeyError:
            raise DomainError(f"{string!r} is not in the ({self.n}, {self.e}) sector") from None

    def string(self, index: int) -> str:
        return self.strings[index]


def enumerate_sector(n: int, e: int, max_qubits: int = MAX_QUBITS) -> SectorBasis:
    """All ``n``-bit strings with ``e`` ones, in ascending lexicographic order.

    >>> enumerate_sector(3, 1).strings
    ('001', '010', '100')
    """
    if not isinstance(n, (int, np.integer)) or not isinstance(e, (int, np.integer)):
        raise DomainError("n and e must be integers")
    if n < 2:
        raise DomainError(f"need at least 2 qubits, got n={n}")
    if not 0 <= e <= n:
        raise DomainError(f"excitation count e={e} outside [0, {n}]")
    if n > max_qubits:
        raise ResourceError(f"n={n} exceeds the qubit cap {max_qubits}")
    strings = []
    for ones in combinations(range(n), e):
        bits = ["0"] * n
        for q in ones:
            bits[q] = "1"
        strings.append("".join(bits))
    strings.sort()
    assert len(strings) == comb(n, e)
    return SectorBasis(int(n), int(e), tuple(strings))


@dataclass(frozen=True)
class FullState:
    """Pure state given by 2**n amplitudes indexed by integer occupation code."""

    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amps, dtype=complex))
        if amps.shape != (2**self.n,):
            raise DomainError(f"expected {2**self.n} amplitudes, got shape {amps.shape}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (|psi|^2 = {norm!r})")
        object.__setattr__(self, "amps", amps)

    def bit_flipped(self) -> "FullState":
        """Apply X to every qubit, i.e. reverse the amplitude vector."""
        return FullState(self.n, self.amps[::-1])


@dataclass(frozen=True)
class TwoBranchState:
    basis: SectorBasis
    theta: float
    phi: float
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amps, dtype=complex))
        if amps.shape != (len(self.basis),):
            raise DomainError(f"expected {len(self.basis)} amplitudes, got shape {amps.shape}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"sector amplitudes are not normalized (sum |a|^2 = {norm!r})")
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def e(self) -> int:
        return self.basis.e

    def with_amps(self, amps) -> "TwoBranchState":
        return TwoBranchState(self.basis, self.theta, self.phi, amps)

    def excitation_weights(self) -> np.ndarray:
        """``r_k^2`` for every qubit k = 1..n."""
        return excitation_weights(self.amps, self.basis)


def excitation_weights(amps, basis: SectorBasis) -> np.ndarray:
    """Probability of each qubit being excited within the sector branch.

    ``amps`` may be a single amplitude vector or a stack of them (time along
    the first axis); the result has a trailing axis of length ``n``.
    """
    probs = np.abs(np.asarray(amps)) ** 2
    return probs @ basis.occupation.astype(float)


def make_two_branch(n: int, e: int, coeffs, theta: float, phi: float = 0.0) -> TwoBranchState:
    """Build a two-branch state, normalizing ``coeffs`` over the sector.

    Parameters
    ----------
    n, e : int
        Qubit count and excitation count of the sector branch. ``e == n`` is
        rejected because the sector string would coincide with ``|1...1>``.
    coeffs : sequence of complex
        One coefficient per sector string, in :func:`enumerate_sector` order.
        Any nonzero scale is accepted.
    theta, phi : float
        Mixing angle in [0, pi/2] and relative phase, in radians.
    """
    basis = enumerate_sector(n, e)
    if e == n:
        raise DomainError("e == n leaves no second branch; use e <= n - 1")
    if not 0.0 <= theta <= np.pi / 2 + 1e-12:
        raise DomainError(f"theta={theta} outside [0, pi/2]")
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    if coeffs.shape != (len(basis),):
        raise DomainError(f"need {len(basis)} coefficients for the ({n}, {e}) sector, got {coeffs.size}")
    if not np.all(np.isfinite(coeffs)):
        raise DomainError("coefficients must be finite")
    norm = np.linalg.norm(coeffs)
    if norm == 0.0:
        raise DegenerateInputError("coefficient vector is identically zero")
    return TwoBranchState(basis, float(theta), float(phi), coeffs / norm)


def qubit_excitation_weight(state: TwoBranchState, k: int) -> float:
    """``r_k^2``: weight of sector strings whose k-th qubit (1-based) is excited."""
    if not 1 <= k <= state.n:
        raise DomainError(f"qubit index k={k} outside [1, {state.n}]")
    occ = state.basis.occupation[:, k - 1]
    return float(np.sum(np.abs(state.amps[occ]) ** 2))


def embed_full(state: TwoBranchState) -> FullState:
    """The two-branch state as a 2**n amplitude vector."""
    n = state.n
    if n > MAX_QUBITS:
        raise ResourceError(f"n={n} exceeds the qubit cap {MAX_QUBITS}")
    vec = np.zeros(2**n, dtype=complex)
    vec[state.basis.codes] = np.cos(state.theta) * state.amps
    vec[-1] += np.exp(1j * state.phi) * np.sin(state.theta)
    return FullState(n, vec)


def project_two_branch(full: FullState, e: int, atol: float = 1e-10) -> TwoBranchState:
    """Recover ``(theta, phi, amps)`` from a full vector with two-branch support.

    The global phase is fixed by the full vector itself, so
    ``project_two_branch(embed_full(s), s.e)`` returns ``s``.
    """
    basis = enumerate_sector(full.n, e)
    if e == full.n:
        raise DomainError("e == n has no separate sector branch")
    support = np.zeros(2**full.n, dtype=bool)
    support[basis.codes] = True
    support[-1] = True
    leak = np.max(np.abs(full.amps[~support]), initial=0.0)
    if leak > atol:
        raise DomainError(f"state has amplitude {leak:.3g} outside the two-branch support")
    sector = full.amps[basis.codes]
    top = full.amps[-1]
    cos_t = np.linalg.norm(sector)
    if cos_t == 0.0:
        raise DegenerateInputError("sector branch is empty; amplitudes are undefined")
    theta = float(np.arctan2(abs(top), cos_t))
    phi = float(np.angle(top)) if abs(top) > 0 else 0.0
    return TwoBranchState(basis, theta, phi, sector / cos_t)
