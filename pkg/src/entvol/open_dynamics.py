"""Two cavities leaking into two vacuum reservoirs, in the infinite-reservoir limit.

Each cavity/reservoir pair carries at most one excitation, so the
collective reservoir mode is an effective qubit and the four-party state
(ordering c1 c2 r1 r2) is

    sin(theta)|0000> + cos(theta)[chi^2|0011> + xi^2|1100>
                                  + chi xi (|1001> + |0110>)]

with ``xi = exp(-kappa t / 2)`` and ``chi = sqrt(1 - exp(-kappa t))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sector_state import FullState

_C1C2 = 0b1100
_R1R2 = 0b0011
_C1R2 = 0b1001
_C2R1 = 0b0110


@dataclass(frozen=True)
class OpenSystemParams:
    theta: float
    kappa: float = 1.0
    horizon: float = 10.0
    samples: int = 2001

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.samples < 2:
            raise DomainError(f"need at least 2 samples, got {self.samples}")

    def kappa_t(self) -> np.ndarray:
        """Grid of dimensionless times ``kappa * t`` on ``[0, horizon]``."""
        return np.linspace(0.0, self.horizon, self.samples)


def damping_amplitudes(kappa: float, t):
    """``(xi, chi)``: surviving cavity amplitude and leaked reservoir amplitude."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("damping amplitudes are defined for t >= 0")
    xi = np.exp(-0.5 * kappa * t)
    chi = np.sqrt(-np.expm1(-kappa * t))
    if xi.ndim == 0:
        return float(xi), float(chi)
    return xi, chi


def ccrr_amplitudes(theta: float, xi, chi) -> np.ndarray:
    """Amplitude vectors of the four-party state; broadcasts over ``xi``/``chi``."""
    xi = np.asarray(xi, dtype=float)
    chi = np.asarray(chi, dtype=float)
    if np.any(np.abs(xi**2 + chi**2 - 1.0) > 1e-9):
        raise DomainError("damping amplitudes must satisfy xi^2 + chi^2 = 1")
    c, s = np.cos(theta), np.sin(theta)
    out = np.zeros(xi.shape + (16,))
    out[..., 0] = s
    out[..., _R1R2] = c * chi**2
    out[..., _C1C2] = c * xi**2
    out[..., _C1R2] = c * chi * xi
    out[..., _C2R1] = c * chi * xi
    return out.astype(complex)


def ccrr_state(theta: float, xi: float, chi: float) -> FullState:
    """Joint state of both cavities and both reservoirs, qubit order c1 c2 r1 r2."""
    if not -1e-12 <= theta <= np.pi / 2 + 1e-12:
        raise DomainError(f"theta={theta} outside [0, pi/2]")
    return FullState(4, ccrr_amplitudes(theta, xi, chi))


def evolve_open(params: OpenSystemParams) -> list[FullState]:
    """One four-qubit state per point of the ``kappa t`` grid."""
    amps = open_amplitude_trace(params)
    return [FullState(4, a) for a in amps]


def open_amplitude_trace(params: OpenSystemParams) -> np.ndarray:
    """Stack of amplitude vectors along the grid, shape ``(samples, 16)``."""
    kt = params.kappa_t()
    # the grid is in units of kappa t, so evaluate the amplitudes at kappa = 1
    xi, chi = damping_amplitudes(1.0, kt)
    return ccrr_amplitudes(params.theta, xi, chi)
