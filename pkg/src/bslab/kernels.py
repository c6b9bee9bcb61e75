"""Outgoing Helmholtz kernels and their Fourier symbols.

``free_green`` is the standard outgoing point source; ``reduced_kernel``
is the same kernel demodulated by the incident plane-wave phase along a
direction ``beta``, which removes the fast oscillation along that ray.
Its Fourier symbol has the rational closed form implemented by
``reduced_symbol``.  All wavenumbers live in the closed upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearResonance, SingularPoint
from .frequencies import ComplexFrequency

SINGULAR_DISTANCE = 1e-14
RESONANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelParams:
    """Frequency plus demodulation direction for the reduced kernel."""

    freq: ComplexFrequency
    beta: tuple = (0.0, 0.0, 1.0)

    def beta_vec(self) -> np.ndarray:
        b = np.asarray(self.beta, dtype=float)
        return b / np.linalg.norm(b)


def free_green(x, y, k: complex) -> complex:
    """Outgoing kernel e^{ik|x-y|} / (4 pi |x-y|), Im k >= 0."""
    if k.imag < 0:
        raise ValueError("wavenumber must satisfy Im k >= 0")
    r = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    if r < SINGULAR_DISTANCE:
        raise SingularPoint(f"|x - y| = {r:.3e} below {SINGULAR_DISTANCE}")
    return np.exp(1j * k * r) / (4.0 * math.pi * r)


def reduced_kernel(x_minus_y, params: KernelParams) -> complex:
    """Demodulated kernel e^{ik(|r| - beta.r)} / (4 pi |r|).

    The phase |r| - beta.r vanishes for r parallel to beta and grows to
    2|r| for r antiparallel, so for Im k > 0 the kernel decays in every
    direction except along the +beta ray.
    """
    r = np.asarray(x_minus_y, dtype=float)
    dist = float(np.linalg.norm(r))
    if dist < SINGULAR_DISTANCE:
        raise SingularPoint(f"|x - y| = {dist:.3e} below {SINGULAR_DISTANCE}")
    k = params.freq.k()
    beta = params.beta_vec()
    return np.exp(1j * k * (dist - beta @ r)) / (4.0 * math.pi * dist)


def reduced_symbol(xi, params: KernelParams) -> complex:
    """Fourier symbol 1 / (xi.xi - (kappa + i*eta) beta.xi).

    Raises NearResonance when the denominator is within the floor of
    zero, which for eta = 0 happens exactly on the sphere
    xi.xi = kappa * beta.xi.
    """
    xi = np.asarray(xi, dtype=float)
    beta = params.beta_vec()
    denom = xi @ xi - params.freq.two_k() * (beta @ xi)
    if abs(denom) <= RESONANCE_FLOOR * max(1.0, xi @ xi):
        raise NearResonance(f"symbol denominator {denom:.3e} too close to zero")
    return 1.0 / denom
