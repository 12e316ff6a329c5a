"""Time-dependent reduced density matrices of the qubits.

Three initial configurations are covered:

* ``psi``: cos(g)|+-> + sin(g)|-+>, one excitation, coefficients a1..a4;
* ``phi``: cos(g)|++> + sin(g)|-->, up to two excitations, coefficients b1..b5;
* ``one_atom``: cos(g)|+> + sin(g)|->, coefficients q1..q3.

Two-qubit states are returned as :class:`XState` in the canonical basis
``[|++>, |+->, |-+>, |-->]``.

All coefficient functions accept ``undamped=True``, which forces Gamma(t) = 0
and recovers the lossless Jaynes-Cummings dynamics (no translational motion).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .packets import GaussianPacket, kinematics
from .params import DerivedConstants, PhysicalParams, theta0

BASIS = ("++", "+-", "-+", "--")

TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12


def _rabi_and_decay(t, p: PhysicalParams, c: DerivedConstants, undamped: bool):
    t = np.asarray(t, dtype=float)
    if undamped:
        g = np.zeros_like(t)
    else:
        g = kinematics(t, GaussianPacket.from_params(p), c).gamma_exp
    return c.omega0 * t, g


def _scalar(x):
    x = np.asarray(x)
    if x.ndim:
        return x
    return complex(x) if np.iscomplexobj(x) else float(x)


@dataclass(frozen=True)
class CoeffsPsi:
    a1: float
    a2: float
    a3: complex
    a4: float


@dataclass(frozen=True)
class CoeffsPhi:
    """``b1_abs`` is |b1| taken from the real envelope, free of phase round-off."""

    b1: complex
    b2: float
    b3: float
    b4: float
    b5: float
    b1_abs: float


@dataclass(frozen=True)
class CoeffsOneAtom:
    q1: float
    q2: complex
    q3: float


def coeffs_psi(t, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False) -> CoeffsPsi:
    rabi, g = _rabi_and_decay(t, p, c, undamped)
    cg, sg = np.cos(p.gamma), np.sin(p.gamma)
    osc = np.cos(rabi) * np.exp(-g)
    a3 = sg * cg * np.cos(rabi / 2) ** 2 * np.exp(-g / 2) + 0j
    return CoeffsPsi(
        a1=_scalar(0.5 * cg**2 * (1 + osc)),
        a2=_scalar(0.5 * sg**2 * (1 + osc)),
        a3=_scalar(a3),
        a4=_scalar(0.5 * (1 - osc)),
    )


def coeffs_phi(t, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False) -> CoeffsPhi:
    """Coefficients of the phi-family state.

    ``b1`` is the |++><--| coherence. The two-excitation branch carries the
    excitation phase twice, exp(-2 i theta0), and each ground-packet overlap
    contributes exp(i m a0^2 t^3 / (4 hbar)).
    """
    t_arr = np.asarray(t, dtype=float)
    rabi, g = _rabi_and_decay(t_arr, p, c, undamped)
    cg, sg = np.cos(p.gamma), np.sin(p.gamma)
    osc = np.cos(rabi) * np.exp(-g)
    overlap_phase = c.mass * c.a0**2 * t_arr**3 / (4.0 * c.hbar)
    phase = np.exp(-2j * (np.asarray(theta0(t_arr, c)) - overlap_phase))
    envelope = sg * cg * np.cos(rabi / 2) ** 2 * np.exp(-g / 2)
    b1 = envelope * phase
    b3 = 0.25 * cg**2 * (1 - osc**2)
    return CoeffsPhi(
        b1=_scalar(b1),
        b2=_scalar(0.25 * cg**2 * (1 + osc) ** 2),
        b3=_scalar(b3),
        b4=_scalar(b3),
        b5=_scalar(sg**2 + 0.25 * cg**2 * (1 - osc) ** 2),
        b1_abs=_scalar(envelope),
    )


def coeffs_one_atom(
    t, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False
) -> CoeffsOneAtom:
    t_arr = np.asarray(t, dtype=float)
    rabi, g = _rabi_and_decay(t_arr, p, c, undamped)
    cg, sg = np.cos(p.gamma), np.sin(p.gamma)
    q1 = 0.5 * cg**2 * (1 + np.cos(rabi) * np.exp(-g))
    overlap_phase = c.mass * c.a0**2 * t_arr**3 / (4.0 * c.hbar)
    q2 = (
        np.exp(-1j * (np.asarray(theta0(t_arr, c)) - overlap_phase))
        * cg
        * sg
        * np.cos(rabi / 2)
        * np.exp(-g / 4)
    )
    return CoeffsOneAtom(q1=_scalar(q1), q2=_scalar(q2), q3=_scalar(1 - q1))


@dataclass(frozen=True)
class XState:
    """Two-qubit density matrix with only anti-diagonal coherences.

    ``inner_coherence`` is the <+-|rho|-+> entry and ``outer_coherence`` the
    <++|rho|--> entry; their conjugates fill the mirrored positions.
    """

    diag: tuple[float, float, float, float]
    inner_coherence: complex = 0j
    outer_coherence: complex = 0j

    def __post_init__(self) -> None:
        diag = tuple(float(d) for d in self.diag)
        if len(diag) != 4:
            raise ValueError("diag needs exactly four entries")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "inner_coherence", complex(self.inner_coherence))
        object.__setattr__(self, "outer_coherence", complex(self.outer_coherence))
        if abs(self.trace - 1.0) > TRACE_TOL:
            raise NumericalError(f"trace {self.trace!r} differs from 1")
        if self.eigenvalues()[0] < -POSITIVITY_TOL:
            raise NumericalError(f"negative eigenvalue {self.eigenvalues()[0]!r}")

    @property
    def trace(self) -> float:
        return sum(self.diag)

    def matrix(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diag, dtype=complex))
        m[1, 2] = self.inner_coherence
        m[2, 1] = np.conj(self.inner_coherence)
        m[0, 3] = self.outer_coherence
        m[3, 0] = np.conj(self.outer_coherence)
        return m

    def eigenvalues(self) -> np.ndarray:
        """Spectrum from the two decoupled 2x2 blocks, ascending."""
        d1, d2, d3, d4 = self.diag
        vals = [
            *block_eigenvalues(d1, d4, abs(self.outer_coherence)),
            *block_eigenvalues(d2, d3, abs(self.inner_coherence)),
        ]
        return np.sort(np.asarray(vals))

    def purity(self) -> float:
        m = self.matrix()
        return float(np.real(np.trace(m @ m)))

    @classmethod
    def from_matrix(cls, m, *, tol: float = 1e-9) -> XState:
        """Read an X-shaped 4x4 matrix; entries off the X must be below ``tol``."""
        m = np.asarray(m, dtype=complex)
        mask = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1), (0, 3), (3, 0)]:
            mask[i, j] = False
        stray = np.max(np.abs(m[mask]))
        if stray > tol:
            raise NumericalError(f"matrix is not X-shaped (stray entry {stray:.3g})")
        return cls(
            diag=tuple(np.real(np.diag(m))),
            inner_coherence=0.5 * (m[1, 2] + np.conj(m[2, 1])),
            outer_coherence=0.5 * (m[0, 3] + np.conj(m[3, 0])),
        )


def block_eigenvalues(x: float, y: float, z: float) -> tuple[float, float]:
    """Eigenvalues of [[x, w], [conj(w), y]] with |w| = z."""
    mean = 0.5 * (x + y)
    radius = np.hypot(0.5 * (x - y), z)
    return mean - radius, mean + radius


def rho_psi(t: float, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False) -> XState:
    a = coeffs_psi(t, p, c, undamped=undamped)
    return XState(diag=(0.0, a.a1, a.a2, a.a4), inner_coherence=a.a3)


def rho_phi(t: float, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False) -> XState:
    # b2..b5 are the |++>, |+->, |-+>, |--> populations
    b = coeffs_phi(t, p, c, undamped=undamped)
    return XState(diag=(b.b2, b.b3, b.b4, b.b5), outer_coherence=b.b1)


def rho_one_atom(
    t: float, p: PhysicalParams, c: DerivedConstants, *, undamped: bool = False
) -> np.ndarray:
    q = coeffs_one_atom(t, p, c, undamped=undamped)
    return np.array([[q.q1, q.q2], [np.conj(q.q2), q.q3]], dtype=complex)
