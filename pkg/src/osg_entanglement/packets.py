"""Closed-form Gaussian packets for the split and free translational branches.

An atom whose dressed state is ``chi+`` (``chi-``) feels a constant force
``-m a0`` (``+m a0``); its packet is displaced and kicked while the packet tied
to the ground state ``|-, 0>`` only spreads. All coherences of the reduced
qubit states are built from the overlaps defined here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DerivedConstants, PhysicalParams

_BRANCH_SIGNS = {"plus": 1, "+": 1, 1: 1, "minus": -1, "-": -1, -1: -1}


def branch_sign(branch) -> int:
    """Map ``'plus'``/``'minus'`` (or +1/-1) to +1/-1."""
    try:
        return _BRANCH_SIGNS[branch]
    except (KeyError, TypeError):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}") from None


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet with zero mean momentum."""

    center: float
    spread: float

    def __post_init__(self) -> None:
        if not self.spread > 0:
            raise ValueError(f"spread must be > 0, got {self.spread!r}")

    @classmethod
    def from_params(cls, p: PhysicalParams) -> GaussianPacket:
        return cls(center=p.x0, spread=p.dx0)

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        norm = (2.0 * np.pi * self.spread**2) ** -0.25
        return norm * np.exp(-((x - self.center) ** 2) / (4.0 * self.spread**2)) + 0j


@dataclass(frozen=True)
class KinematicSplit:
    """Separation of the two OSG branches at one time (fields may be arrays)."""

    dx: float
    dp: float
    gamma_exp: float
    xplus: float
    xminus: float
    beta_re: float
    beta_im: float

    @property
    def beta(self):
        return self.beta_re + 1j * self.beta_im


def decay_exponent(t, pkt: GaussianPacket, c: DerivedConstants):
    """Gamma(t): squared phase-space distance between the split branches."""
    return kinematics(t, pkt, c).gamma_exp


def kinematics(t, pkt: GaussianPacket, c: DerivedConstants) -> KinematicSplit:
    t = np.asarray(t, dtype=float)
    dp0 = c.hbar / (2.0 * pkt.spread)
    dx = -c.a0 * t**2
    dp = -2.0 * c.mass * c.a0 * t
    gamma_exp = dx**2 / (8.0 * pkt.spread**2) + dp**2 / (8.0 * dp0**2)
    shift = c.a0 * t**2 / 2.0
    out = dict(
        dx=dx,
        dp=dp,
        gamma_exp=gamma_exp,
        xplus=pkt.center - shift,
        xminus=pkt.center + shift,
        beta_re=np.full_like(t, pkt.spread**2),
        beta_im=c.hbar * t / (2.0 * c.mass),
    )
    if t.ndim == 0:
        out = {key: float(val) for key, val in out.items()}
    return KinematicSplit(**out)


def split_amplitude(x, t: float, branch, pkt: GaussianPacket, c: DerivedConstants):
    """x-representation of the branch packet phi^+ or phi^- at time ``t``.

    The returned packet excludes the common excitation phase exp(-i theta0),
    which is bookkept separately.
    """
    sign = branch_sign(branch)
    x = np.asarray(x, dtype=float)
    kin = kinematics(t, pkt, c)
    beta = kin.beta
    center = kin.xplus if sign > 0 else kin.xminus
    prefactor = np.sqrt(pkt.spread / (np.sqrt(2.0 * np.pi) * beta))
    kick = np.exp(-1j * sign * t * c.mass * c.a0 * x / c.hbar)
    return prefactor * kick * np.exp(-((x - center) ** 2) / (4.0 * beta))


def free_amplitude(x, t: float, pkt: GaussianPacket, c: DerivedConstants):
    """Freely spreading packet tied to the ground channel."""
    x = np.asarray(x, dtype=float)
    beta = pkt.spread**2 + 1j * c.hbar * t / (2.0 * c.mass)
    prefactor = np.sqrt(pkt.spread / (np.sqrt(2.0 * np.pi) * beta))
    return prefactor * np.exp(-((x - pkt.center) ** 2) / (4.0 * beta))


def _rabi(pkt: GaussianPacket, c: DerivedConstants) -> float:
    # per-atom Rabi frequency, set by this packet's own center
    return 2.0 * c.mass * c.a0 * pkt.center / c.hbar


def overlap_pm(t, pkt: GaussianPacket, c: DerivedConstants):
    """<phi^-(t)|phi^+(t)> = exp(-i Omega t) exp(-Gamma)."""
    t = np.asarray(t, dtype=float)
    g = kinematics(t, pkt, c).gamma_exp
    out = np.exp(-1j * _rabi(pkt, c) * t) * np.exp(-g)
    return out if out.ndim else complex(out)


def overlap_free_pm(t, branch, pkt: GaussianPacket, c: DerivedConstants):
    """<phi(t)|phi^{+/-}(t)> = exp(i m a0^2 t^3/(4 hbar) -/+ i Omega t/2) exp(-Gamma/4)."""
    sign = branch_sign(branch)
    t = np.asarray(t, dtype=float)
    g = kinematics(t, pkt, c).gamma_exp
    phase = c.mass * c.a0**2 * t**3 / (4.0 * c.hbar) - sign * _rabi(pkt, c) * t / 2.0
    out = np.exp(1j * phase) * np.exp(-g / 4.0)
    return out if out.ndim else complex(out)
