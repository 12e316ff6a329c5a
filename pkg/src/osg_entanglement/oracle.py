"""Brute-force reference for the closed forms.

Each dressed channel of an atom is propagated on a periodic grid with a
second-order split-operator stepper under

    H = p^2 / 2m + sign * m * a0 * x,       sign in {+1, -1, 0},

and the reduced qubit states are rebuilt from overlaps computed by
quadrature. The dressed basis itself comes from diagonalizing the coupling
and excitation-number operators numerically; nothing here reuses the
closed-form overlaps from :mod:`osg_entanglement.packets`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .entanglement import concurrence_wootters
from .errors import GridMismatch, GridViolation
from .packets import GaussianPacket
from .params import DerivedConstants, PhysicalParams

DEFAULT_POINTS = 8192
DEFAULT_HALF_WIDTH = 40.0  # in units of dx0
DEFAULT_MAX_DT = 1e-7
MIN_STEPS = 100
NORM_TOL = 1e-8
BOUNDARY_TOL = 1e-8
_EDGE = 8

# per-atom internal+field basis
LABELS = (("+", 0), ("-", 1), ("-", 0))
_PLUS0, _MINUS1, _MINUS0 = range(3)


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        n = self.n_points
        if n < 1024 or n & (n - 1):
            raise GridViolation(f"n_points must be a power of two >= 1024, got {n}")
        if not self.x_max > self.x_min:
            raise GridViolation("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @classmethod
    def around(
        cls,
        p: PhysicalParams,
        n_points: int = DEFAULT_POINTS,
        half_width: float = DEFAULT_HALF_WIDTH,
    ) -> Grid:
        return cls(p.x0 - half_width * p.dx0, p.x0 + half_width * p.dx0, n_points)

    def check_covers(self, t_max: float, p: PhysicalParams, c: DerivedConstants) -> None:
        """Raise :class:`GridViolation` if the grid cannot hold the channels up to ``t_max``."""
        shift = c.a0 * t_max**2 / 2.0
        width = math.hypot(p.dx0, c.hbar * t_max / (2.0 * c.mass * p.dx0))
        lo, hi = p.x0 - shift - 6 * width, p.x0 + shift + 6 * width
        if lo < self.x_min or hi > self.x_max:
            raise GridViolation(
                f"branches span [{lo:.4g}, {hi:.4g}] m at t = {t_max:.3g} s, "
                f"outside the grid [{self.x_min:.4g}, {self.x_max:.4g}] m"
            )
        kick = 2.0 * c.mass * c.a0 * t_max
        if kick > 0 and self.dx > math.pi * c.hbar / (4.0 * kick):
            raise GridViolation(
                f"dx = {self.dx:.3g} m cannot resolve the momentum split at t = {t_max:.3g} s "
                f"(needs <= {math.pi * c.hbar / (4.0 * kick):.3g} m)"
            )


@dataclass(frozen=True)
class GridWavefunction:
    grid: Grid
    samples: np.ndarray = field(repr=False)

    def norm(self) -> float:
        return float(np.sqrt(np.real(numeric_overlap(self, self))))

    def boundary_ratio(self) -> float:
        amp = np.abs(self.samples)
        peak = amp.max()
        if peak == 0:
            return 0.0
        edge = max(amp[:_EDGE].max(), amp[-_EDGE:].max())
        return float(edge / peak)

    def mean_position(self) -> float:
        dens = np.abs(self.samples) ** 2
        return float(np.trapezoid(self.grid.x * dens, dx=self.grid.dx) / np.trapezoid(dens, dx=self.grid.dx))

    def mean_momentum(self, hbar: float) -> float:
        spec = np.abs(np.fft.fft(self.samples)) ** 2
        return float(hbar * np.sum(self.grid.wavenumbers * spec) / np.sum(spec))


def initial_wavefunction(grid: Grid, p: PhysicalParams) -> GridWavefunction:
    return GridWavefunction(grid, GaussianPacket.from_params(p).amplitude(grid.x))


def numeric_overlap(f: GridWavefunction, g: GridWavefunction) -> complex:
    """Trapezoid quadrature of conj(f) * g."""
    if f.grid != g.grid:
        raise GridMismatch("wavefunctions live on different grids")
    return complex(np.trapezoid(np.conj(f.samples) * g.samples, dx=f.grid.dx))


class _Stepper:
    """Strang splitting: half kinetic step, full potential step, half kinetic step."""

    def __init__(self, grid: Grid, sign: int, dt: float, c: DerivedConstants):
        self.sign = sign
        self.dt = dt
        self.kinetic = c.hbar * grid.wavenumbers**2 / (2.0 * c.mass)
        self.half_kinetic = np.exp(-0.5j * self.kinetic * dt)
        self.full_kinetic = self.half_kinetic**2
        self.potential = np.exp(-1j * sign * c.mass * c.a0 * grid.x * dt / c.hbar)

    def run(self, samples: np.ndarray, steps: int) -> np.ndarray:
        if self.sign == 0:
            # free motion: the kinetic propagator is exact in one application
            return np.fft.ifft(np.fft.fft(samples) * np.exp(-1j * self.kinetic * self.dt * steps))
        spec = np.fft.fft(samples) * self.half_kinetic
        for i in range(steps):
            spec = np.fft.fft(np.fft.ifft(spec) * self.potential)
            spec *= self.full_kinetic if i < steps - 1 else self.half_kinetic
        return np.fft.ifft(spec)


def _check_health(psi: GridWavefunction, reference_norm: float) -> None:
    ratio = psi.boundary_ratio()
    if ratio >= BOUNDARY_TOL:
        raise GridViolation(f"amplitude at the grid edge is {ratio:.3g} of the peak")
    drift = abs(psi.norm() - reference_norm)
    if drift > NORM_TOL:
        raise GridViolation(f"norm drifted by {drift:.3g}")


def _check_sign(sign: int) -> int:
    if sign not in (-1, 0, 1):
        raise ValueError(f"sign must be +1, -1 or 0, got {sign!r}")
    return int(sign)


def propagate_channel(
    psi0: GridWavefunction, sign: int, t: float, steps: int, c: DerivedConstants
) -> GridWavefunction:
    """Evolve ``psi0`` for time ``t`` under the channel Hamiltonian with force -sign*m*a0."""
    sign = _check_sign(sign)
    if steps < MIN_STEPS:
        raise ValueError(f"steps must be >= {MIN_STEPS}, got {steps}")
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return psi0
    stepper = _Stepper(psi0.grid, sign, t / steps, c)
    out = GridWavefunction(psi0.grid, stepper.run(psi0.samples, steps))
    _check_health(out, psi0.norm())
    return out


def _iter_propagate(psi0, sign, times, c, max_dt):
    times = np.asarray(times, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise ValueError("times must be non-negative and non-decreasing")
    norm0 = psi0.norm()
    current, t_now = psi0.samples, 0.0
    for t in times:
        span = t - t_now
        if span > 0:
            steps = max(1, math.ceil(span / max_dt))
            current = _Stepper(psi0.grid, sign, span / steps, c).run(current, steps)
            t_now = t
        snap = GridWavefunction(psi0.grid, current)
        _check_health(snap, norm0)
        yield snap


def propagate_series(
    psi0: GridWavefunction,
    sign: int,
    times: Sequence[float],
    c: DerivedConstants,
    max_dt: float = DEFAULT_MAX_DT,
) -> list[GridWavefunction]:
    """Snapshots of one channel at increasing ``times``, stepping from one to the next."""
    return list(_iter_propagate(psi0, _check_sign(sign), times, c, max_dt))


@dataclass(frozen=True)
class ChannelSet:
    """Translational states of one atom at time ``t``.

    ``plus``/``minus`` are the packets of the dressed states with coupling
    eigenvalue +1/2 and -1/2, ``free`` the packet tied to |-, 0>.
    ``omega`` sets the per-excitation optical phase exp(-i omega t).
    """

    t: float
    plus: GridWavefunction
    minus: GridWavefunction
    free: GridWavefunction
    omega: float

    def packet(self, sign: int) -> GridWavefunction:
        return {1: self.plus, -1: self.minus, 0: self.free}[sign]


def iter_channels(
    times: Sequence[float],
    p: PhysicalParams,
    c: DerivedConstants,
    grid: Grid | None = None,
    max_dt: float = DEFAULT_MAX_DT,
) -> Iterator[ChannelSet]:
    """Yield one :class:`ChannelSet` per time, keeping only the current snapshots in memory."""
    grid = grid or Grid.around(p)
    times = np.asarray(times, dtype=float)
    if times.size:
        grid.check_covers(float(times.max()), p, c)
    psi0 = initial_wavefunction(grid, p)
    streams = [_iter_propagate(psi0, sign, times, c, max_dt) for sign in (1, -1, 0)]
    for t, plus, minus, free in zip(times, *streams):
        yield ChannelSet(float(t), plus, minus, free, c.omega)


def channel_series(
    times: Sequence[float],
    p: PhysicalParams,
    c: DerivedConstants,
    grid: Grid | None = None,
    max_dt: float = DEFAULT_MAX_DT,
) -> list[ChannelSet]:
    return list(iter_channels(times, p, c, grid, max_dt))


def channel_set(
    t: float,
    p: PhysicalParams,
    c: DerivedConstants,
    grid: Grid | None = None,
    max_dt: float = DEFAULT_MAX_DT,
) -> ChannelSet:
    grid = grid or Grid.around(p)
    grid.check_covers(t, p, c)
    psi0 = initial_wavefunction(grid, p)
    steps = max(MIN_STEPS, math.ceil(t / max_dt))
    return ChannelSet(
        float(t),
        propagate_channel(psi0, +1, t, steps, c),
        propagate_channel(psi0, -1, t, steps, c),
        propagate_channel(psi0, 0, t, steps, c),
        c.omega,
    )


def dressed_basis():
    """Joint eigenbasis of the coupling operator mu and excitation number N.

    Returns ``(vectors, n_values, mu_values)`` in the basis ``LABELS``;
    column k of ``vectors`` is an eigenvector.
    """
    coupling = np.zeros((3, 3))  # a^dag S_- + S_+ a
    coupling[_MINUS1, _PLUS0] = coupling[_PLUS0, _MINUS1] = 1.0
    number = np.diag([1.0, 1.0, 0.0])
    inv_sqrt_n = np.diag([1.0 / math.sqrt(n) if n > 0 else 0.0 for n in np.diag(number)])
    mu = 0.5 * coupling @ inv_sqrt_n
    # N has integer spectrum and |mu| <= 1/2, so mu + 3N has distinct eigenvalues
    _, vecs = np.linalg.eigh(mu + 3.0 * number)
    n_vals = np.real(np.einsum("ik,ij,jk->k", vecs.conj(), number, vecs))
    mu_vals = np.real(np.einsum("ik,ij,jk->k", vecs.conj(), mu, vecs))
    return vecs, np.rint(n_vals).astype(int), mu_vals


def evolve_atom(state: np.ndarray, channels: ChannelSet) -> np.ndarray:
    """Evolve one atom prepared in ``state`` (a 3-vector over ``LABELS``) times the initial packet.

    Returns an array of shape (3, n_points): the translational amplitude
    attached to each bare label at time ``channels.t``.
    """
    vecs, n_vals, mu_vals = dressed_basis()
    out = np.zeros((3, channels.free.grid.n_points), dtype=complex)
    for k in range(3):
        weight = np.vdot(vecs[:, k], state)
        if weight == 0:
            continue
        sign = int(np.rint(2.0 * mu_vals[k] * math.sqrt(n_vals[k])))
        phase = np.exp(-1j * channels.omega * channels.t * n_vals[k])
        out += np.outer(vecs[:, k], weight * phase * channels.packet(sign).samples)
    return out


def _gram(evolved: list[np.ndarray], grid: Grid) -> np.ndarray:
    """G[s', l', s, l] = <evolved[s'][l'] | evolved[s][l]>, trapezoid weights.

    Batched form of :func:`numeric_overlap` over all label pairs.
    """
    n = len(evolved)
    waves = np.concatenate(evolved, axis=0)  # (n*3, n_points)
    weights = np.full(grid.n_points, grid.dx)
    weights[0] = weights[-1] = 0.5 * grid.dx
    gram = np.conj(waves) @ (waves * weights).T
    return gram.reshape(n, 3, n, 3)


def _basis_vector(index: int) -> np.ndarray:
    v = np.zeros(3, dtype=complex)
    v[index] = 1.0
    return v


def _label_index(qubit: str, photons: int) -> int | None:
    try:
        return LABELS.index((qubit, photons))
    except ValueError:
        return None


def initial_terms(case: str, gamma: float):
    """Initial qubit state as (coefficient, per-atom label indices) terms, field in vacuum."""
    cg, sg = math.cos(gamma), math.sin(gamma)
    if case == "psi":
        return [(cg, (_PLUS0, _MINUS0)), (sg, (_MINUS0, _PLUS0))]
    if case == "phi":
        return [(cg, (_PLUS0, _PLUS0)), (sg, (_MINUS0, _MINUS0))]
    if case == "one_atom":
        return [(cg, (_PLUS0,)), (sg, (_MINUS0,))]
    raise ValueError(f"unknown case {case!r}")


def reduced_from_channels(case: str, gamma: float, channels: ChannelSet) -> np.ndarray:
    """Reduced qubit density matrix, traced over fields and translation by quadrature."""
    terms = initial_terms(case, gamma)
    grid = channels.free.grid
    starts = sorted({i for _, idx in terms for i in idx})
    evolved = [evolve_atom(_basis_vector(s), channels) for s in starts]
    gram = _gram(evolved, grid)
    slot = {s: k for k, s in enumerate(starts)}
    n_atoms = len(terms[0][1])
    qubits = ("+", "-")
    if n_atoms == 1:
        rho = np.zeros((2, 2), dtype=complex)
        for r, qa in enumerate(qubits):
            for col, qa2 in enumerate(qubits):
                for n in (0, 1):
                    la, la2 = _label_index(qa, n), _label_index(qa2, n)
                    if la is None or la2 is None:
                        continue
                    for ci, (si,) in terms:
                        for cj, (sj,) in terms:
                            rho[r, col] += cj * ci * gram[slot[sj], la2, slot[si], la]
        return rho
    pairs = [(qa, qb) for qa in qubits for qb in qubits]
    rho = np.zeros((4, 4), dtype=complex)
    for r, (qa, qb) in enumerate(pairs):
        for col, (qa2, qb2) in enumerate(pairs):
            for na in (0, 1):
                for nb in (0, 1):
                    la, lb = _label_index(qa, na), _label_index(qb, nb)
                    la2, lb2 = _label_index(qa2, na), _label_index(qb2, nb)
                    if None in (la, lb, la2, lb2):
                        continue
                    for ci, (sai, sbi) in terms:
                        for cj, (saj, sbj) in terms:
                            rho[r, col] += (
                                cj
                                * ci
                                * gram[slot[saj], la2, slot[sai], la]
                                * gram[slot[sbj], lb2, slot[sbi], lb]
                            )
    return rho


def numeric_rho(
    t: float,
    case: str,
    p: PhysicalParams,
    c: DerivedConstants,
    grid: Grid | None = None,
    *,
    channels: ChannelSet | None = None,
) -> np.ndarray:
    """Reduced density matrix from propagated channels (4x4, or 2x2 for ``one_atom``).

    Both atoms share the same parameters, so a single channel set serves both.
    """
    if channels is None:
        channels = channel_set(t, p, c, grid)
    elif not math.isclose(channels.t, t, rel_tol=0, abs_tol=1e-15):
        raise ValueError(f"channel set is for t = {channels.t}, not {t}")
    return reduced_from_channels(case, p.gamma, channels)


def numeric_concurrence(
    t: float,
    case: str,
    p: PhysicalParams,
    c: DerivedConstants,
    grid: Grid | None = None,
    *,
    channels: ChannelSet | None = None,
) -> float:
    if case not in ("psi", "phi"):
        raise ValueError("concurrence needs a two-qubit case")
    return concurrence_wootters(numeric_rho(t, case, p, c, grid, channels=channels))
