"""Complex spectral parameter used throughout the package.

The solver and estimate routines are parameterized by a complex number
``kappa + i*eta`` living in the closed upper half-plane.  The physical
wavenumber of the incident wave is half of it, so both accessors are
exposed to keep the two conventions from being confused at call sites.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ComplexFrequency:
    """Spectral point ``kappa + i*eta`` with ``kappa, eta >= 0``."""

    kappa: float
    eta: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    def gamma(self) -> float:
        """Squared modulus kappa**2 + eta**2."""
        return self.kappa * self.kappa + self.eta * self.eta

    def two_k(self) -> complex:
        """The full complex parameter kappa + i*eta."""
        return complex(self.kappa, self.eta)

    def k(self) -> complex:
        """Physical wavenumber (kappa + i*eta) / 2."""
        return complex(self.kappa / 2.0, self.eta / 2.0)

    @staticmethod
    def from_wavenumber(k: float) -> "ComplexFrequency":
        """Frequency for a real physical wavenumber ``k`` (eta = 0)."""
        return ComplexFrequency(kappa=2.0 * k, eta=0.0)
