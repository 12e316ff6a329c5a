"""Experiment inputs and the constants derived from them.

Everything is SI. The closed forms elsewhere in the package hold only in the
linearized regime where the atomic packet is much narrower than the mode
wavelength, so :class:`PhysicalParams` refuses packets wider than
``LINEARIZATION_THRESHOLD * wavelength``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HBAR = 1.054571817e-34  # J s, CODATA 2018
C_LIGHT = 2.99792458e8  # m / s

LINEARIZATION_THRESHOLD = 1.0 / 20.0


@dataclass(frozen=True)
class PhysicalParams:
    """Inputs shared by both atoms and both cavities.

    Parameters
    ----------
    mass : float
        Atomic mass (kg).
    coupling_eps : float
        Atom-field coupling constant epsilon (1/s).
    wavelength : float
        Cavity mode wavelength (m).
    x0 : float
        Initial packet center, measured from a node of the mode (m).
    dx0 : float
        Initial position spread of the minimum-uncertainty packet (m).
    gamma : float
        Superposition angle of the initial two-qubit state, in [0, pi/2].
    """

    mass: float
    coupling_eps: float
    wavelength: float
    x0: float
    dx0: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("mass", "coupling_eps", "wavelength", "x0", "dx0", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(name, f"must be finite, got {value!r}")
        if self.mass <= 0:
            raise ValidationError("mass", f"must be > 0, got {self.mass!r}")
        # zero coupling is the trivial no-splitting limit and stays allowed
        if self.coupling_eps < 0:
            raise ValidationError("coupling_eps", f"must be >= 0, got {self.coupling_eps!r}")
        if self.wavelength <= 0:
            raise ValidationError("wavelength", f"must be > 0, got {self.wavelength!r}")
        if self.dx0 <= 0:
            raise ValidationError("dx0", f"must be > 0, got {self.dx0!r}")
        if not 0.0 <= self.gamma <= math.pi / 2:
            raise ValidationError("gamma", f"must lie in [0, pi/2], got {self.gamma!r}")
        if self.dx0 / self.wavelength > LINEARIZATION_THRESHOLD:
            raise ValidationError(
                "dx0",
                f"dx0/wavelength = {self.dx0 / self.wavelength:.3g} exceeds the "
                f"linearization threshold {LINEARIZATION_THRESHOLD:.3g}",
            )


@dataclass(frozen=True)
class DerivedConstants:
    """Secondary constants computed by :func:`derive_constants`.

    ``mass`` is carried along because several phases need ``m * a0**2``.
    """

    k: float
    omega: float
    a0: float
    dp0: float
    omega0: float
    mass: float
    hbar: float = HBAR
    c: float = C_LIGHT


def paper_params(gamma: float = math.pi / 4) -> PhysicalParams:
    """Reference parameter set: lambda = 1 cm, eps = 1e4 1/s, m = 1e-26 kg, x0 = lambda/10, dx0 = lambda/50."""
    wavelength = 1e-2
    return PhysicalParams(
        mass=1e-26,
        coupling_eps=1e4,
        wavelength=wavelength,
        x0=wavelength / 10,
        dx0=wavelength / 50,
        gamma=gamma,
    )


def derive_constants(p: PhysicalParams) -> DerivedConstants:
    k = 2.0 * math.pi / p.wavelength
    a0 = p.coupling_eps * HBAR * k / p.mass
    return DerivedConstants(
        k=k,
        omega=C_LIGHT * k,
        a0=a0,
        dp0=HBAR / (2.0 * p.dx0),
        omega0=2.0 * p.coupling_eps * k * p.x0,
        mass=p.mass,
    )


def rabi_frequency_from_acceleration(p: PhysicalParams, c: DerivedConstants) -> float:
    """Rabi frequency evaluated as 2 m a0 x0 / hbar (equal to ``c.omega0``)."""
    return 2.0 * p.mass * c.a0 * p.x0 / c.hbar


def theta0(t, c: DerivedConstants):
    """Phase accumulated per excitation: omega t + m a0^2 t^3 / (6 hbar).

    Accepts a scalar or an array of times.
    """
    t = np.asarray(t, dtype=float)
    out = c.omega * t + c.mass * c.a0**2 * t**3 / (6.0 * c.hbar)
    return out if out.ndim else float(out)
