"""Concurrence, partial transposition and the sudden-death time.

Closed forms for the two X-state families are paired with general routes
(Wootters concurrence of an arbitrary two-qubit state, a dense Hermitian
eigensolve of the partial transpose) so each result can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import CoeffsPhi, CoeffsPsi, XState, block_eigenvalues, coeffs_phi, rho_phi
from .errors import DegenerateInput, NumericalError, ScanTooShort
from .packets import GaussianPacket, kinematics
from .params import DerivedConstants, PhysicalParams

PPT_TOL = 1e-12
PPT_AGREEMENT = 1e-10
PPT_DISAGREEMENT_ERROR = 1e-8
NEGATIVE_EIGENVALUE_ERROR = 1e-8
B1_FLOOR = 1e-12  # below this the bound's ratio is round-off

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


@dataclass(frozen=True)
class ConcurrenceSample:
    t: float
    c_closed: float
    c_general: float
    d_value: float


@dataclass(frozen=True)
class PptReport:
    eigenvalues: tuple[float, float, float, float]
    min_eig: float
    separable: bool


def concurrence_closed_psi(cp: CoeffsPsi):
    return 2.0 * np.abs(cp.a3)


def d_value(cb: CoeffsPhi):
    """Signed quantity whose positive part is the phi-family concurrence."""
    return 2.0 * (cb.b1_abs - cb.b3)


def concurrence_closed_phi(cb: CoeffsPhi):
    d = d_value(cb)
    return d, np.maximum(0.0, d)


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of any two-qubit density matrix.

    The square roots of the eigenvalues of rho * rho_tilde are obtained as the
    singular values of Psi^T (sigma_y x sigma_y) Psi with rho = Psi Psi^dagger.
    This avoids taking square roots of round-off sized eigenvalues.
    """
    m = rho.matrix() if isinstance(rho, XState) else np.asarray(rho, dtype=complex)
    m = 0.5 * (m + m.conj().T)
    weights, vecs = np.linalg.eigh(m)
    if weights[0] < -NEGATIVE_EIGENVALUE_ERROR:
        raise NumericalError(f"state has eigenvalue {weights[0]:.3g}; not a density matrix")
    psi = vecs * np.sqrt(np.clip(weights, 0.0, None))
    lam = np.linalg.svd(psi.T @ _SPIN_FLIP @ psi, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_x_state(rho: XState) -> float:
    """Concurrence of an X state from its entries."""
    d1, d2, d3, d4 = rho.diag
    return 2.0 * max(
        0.0,
        abs(rho.outer_coherence) - math.sqrt(max(d2 * d3, 0.0)),
        abs(rho.inner_coherence) - math.sqrt(max(d1 * d4, 0.0)),
    )


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit, canonical basis."""
    m = rho.matrix() if isinstance(rho, XState) else np.asarray(rho, dtype=complex)
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_eigenvalues_closed(rho: XState) -> np.ndarray:
    """Partial-transpose spectrum of an X state: its coherences swap blocks."""
    d1, d2, d3, d4 = rho.diag
    vals = [
        *block_eigenvalues(d1, d4, abs(rho.inner_coherence)),
        *block_eigenvalues(d2, d3, abs(rho.outer_coherence)),
    ]
    return np.sort(np.asarray(vals))


def ppt_report(rho: XState) -> PptReport:
    closed = ppt_eigenvalues_closed(rho)
    general = np.linalg.eigvalsh(partial_transpose(rho))
    gap = float(np.max(np.abs(closed - general)))
    if gap > PPT_DISAGREEMENT_ERROR:
        raise NumericalError(f"closed and dense partial-transpose spectra differ by {gap:.3g}")
    min_eig = float(closed[0])
    return PptReport(
        eigenvalues=tuple(float(v) for v in closed),
        min_eig=min_eig,
        separable=min_eig >= -PPT_TOL,
    )


def psi_ppt_eigenvalues(cp: CoeffsPsi):
    """lambda_1..lambda_4 of the partially transposed psi-family state."""
    root = np.sqrt(cp.a4**2 + 4.0 * np.abs(cp.a3) ** 2)
    return cp.a1, cp.a2, 0.5 * cp.a4 + 0.5 * root, 0.5 * cp.a4 - 0.5 * root


def phi_ppt_eigenvalues(cb: CoeffsPhi):
    """nu_1..nu_4 of the partially transposed phi-family state."""
    return cb.b2, cb.b5, cb.b3 + cb.b1_abs, cb.b3 - cb.b1_abs


def concurrence_sample(t: float, p: PhysicalParams, c: DerivedConstants) -> ConcurrenceSample:
    cb = coeffs_phi(t, p, c)
    d, closed = concurrence_closed_phi(cb)
    return ConcurrenceSample(
        t=float(t),
        c_closed=float(closed),
        c_general=concurrence_wootters(rho_phi(t, p, c)),
        d_value=float(d),
    )


def _envelope_residual(g, cot: float):
    return 0.25 * cot * (np.exp(g / 2) - np.exp(-1.5 * g)) - 1.0


def envelope_death_time(p: PhysicalParams, c: DerivedConstants) -> float | None:
    """Time at which the peak concurrence envelope of the phi family reaches zero.

    Solves (cot g / 4)(exp(Gamma/2) - exp(-3 Gamma/2)) = 1 for Gamma, then
    inverts the monotone Gamma(t). Returns ``None`` when the initial state
    carries no entanglement (g = 0 or pi/2) or Gamma never grows (a0 = 0).
    """
    if p.gamma <= 0.0 or p.gamma >= math.pi / 2 or c.a0 == 0.0:
        return None
    cot = 1.0 / math.tan(p.gamma)
    g_hi = 2.0 * math.log(4.0 * math.tan(p.gamma) + 1.0)
    g_star = brentq(_envelope_residual, 0.0, g_hi, args=(cot,), xtol=1e-15, rtol=1e-15)
    pkt = GaussianPacket.from_params(p)

    def excess(t):
        return kinematics(t, pkt, c).gamma_exp - g_star

    t_hi = 1e-6
    while excess(t_hi) < 0:
        t_hi *= 2.0
    return brentq(excess, 0.0, t_hi, xtol=1e-18, rtol=1e-15)


def sudden_death_time(p: PhysicalParams, c: DerivedConstants, scan) -> float | None:
    """Final extinction time of the phi-family concurrence.

    ``scan`` is an increasing array of sample times starting near 0. The result
    is the supremum of sampled times with d(t) > 0, refined by root bracketing
    between the last positive sample and its successor. ``None`` means d never
    becomes positive on the scan (no entanglement to lose).

    Raises :class:`ScanTooShort` when d(t_max) > 0 or when the concurrence
    envelope has not yet crossed zero at t_max, because a revival could still
    follow.
    """
    times = np.asarray(scan, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("scan must be a strictly increasing 1-d array of times")
    if c.omega0 > 0:
        period = 2.0 * math.pi / c.omega0
        if np.max(np.diff(times)) > period / 50:
            raise ValueError("scan step must resolve the Rabi period with at least 50 samples")

    def d_of(t):
        return d_value(coeffs_phi(t, p, c))

    d = d_of(times)
    if d[-1] > 0:
        raise ScanTooShort(f"d(t_max) = {d[-1]:.3g} is still positive")
    t_env = envelope_death_time(p, c)
    if t_env is not None and t_env > times[-1]:
        raise ScanTooShort(f"envelope crosses zero at {t_env:.4g} s, after t_max")
    positive = np.nonzero(d > 0)[0]
    if positive.size == 0:
        return None
    i = positive[-1]
    lo, hi = times[i], times[i + 1]
    if d[i + 1] == 0.0:
        return float(hi)
    return float(brentq(d_of, lo, hi, xtol=1e-15, rtol=1e-14))


def death_bound_check(t: float, p: PhysicalParams, c: DerivedConstants):
    """Evaluate both sides of b3/|b1| >= (cot g / 2) sinh(Gamma / 2).

    Returns ``(lhs, rhs, holds)``.
    """
    if p.gamma <= 0.0 or p.gamma >= math.pi / 2:
        raise DegenerateInput("the bound needs 0 < gamma < pi/2")
    cb = coeffs_phi(t, p, c)
    mod_b1 = cb.b1_abs
    if mod_b1 <= B1_FLOOR:
        raise DegenerateInput(f"|b1| = {mod_b1:.3g} vanishes at t = {t!r}")
    g = kinematics(t, GaussianPacket.from_params(p), c).gamma_exp
    lhs = cb.b3 / mod_b1
    rhs = 0.5 / math.tan(p.gamma) * math.sinh(g / 2)
    holds = lhs >= rhs - 1e-12 * max(abs(rhs), 1e-3)
    return lhs, rhs, bool(holds)
