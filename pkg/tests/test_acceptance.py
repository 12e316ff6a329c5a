"""End-to-end acceptance checks, one marker per criterion.

The terminal summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from osg_entanglement.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_TOLERANCE, format_config, load_preset, main, parse_config
from osg_entanglement.dynamics import coeffs_phi, coeffs_psi, rho_one_atom, rho_phi, rho_psi
from osg_entanglement.entanglement import (
    concurrence_closed_phi,
    concurrence_closed_psi,
    concurrence_wootters,
    d_value,
    death_bound_check,
    envelope_death_time,
    psi_ppt_eigenvalues,
    sudden_death_time,
)
from osg_entanglement.oracle import iter_channels, reduced_from_channels
from osg_entanglement.packets import GaussianPacket, kinematics, overlap_free_pm, overlap_pm
from osg_entanglement.params import derive_constants, paper_params

C = derive_constants(paper_params())
PERIOD = 2 * math.pi / C.omega0
REFERENCE_GAMMAS = (math.pi / 12, math.pi / 6, math.pi / 4)
ALL_GAMMAS = (math.pi / 12, math.pi / 6, math.pi / 4, 0.1, 1.0, 1.5)
T_END = 3e-3


def _fine_scan(t_max=T_END, per_period=100):
    return np.linspace(0.0, t_max, math.ceil(t_max / (PERIOD / per_period)) + 1)


@pytest.mark.criterion(1, "closed forms match the grid oracle within 1e-6")
def test_oracle_equivalence():
    times = np.geomspace(1e-5, 3e-3, 20)
    p0 = paper_params(REFERENCE_GAMMAS[0])
    closed = {
        "psi": lambda t, p: rho_psi(t, p, C).matrix(),
        "phi": lambda t, p: rho_phi(t, p, C).matrix(),
        "one_atom": lambda t, p: rho_one_atom(t, p, C),
    }
    worst = 0.0
    # channels depend on the packet only, so one propagation serves every gamma
    for channels in iter_channels(times, p0, C):
        for g in REFERENCE_GAMMAS:
            p = paper_params(g)
            for case, fn in closed.items():
                numeric = reduced_from_channels(case, g, channels)
                worst = max(worst, float(np.max(np.abs(numeric - fn(channels.t, p)))))
    print(f"max |closed - oracle| = {worst:.3e}")
    assert worst <= 1e-6


@pytest.mark.criterion(2, "closed-form concurrence equals Wootters concurrence within 1e-9")
@pytest.mark.parametrize("gamma", ALL_GAMMAS)
def test_concurrence_consistency(gamma):
    p = paper_params(gamma)
    for t in np.linspace(0.0, T_END, 200):
        c_psi = float(concurrence_closed_psi(coeffs_psi(t, p, C)))
        assert abs(c_psi - concurrence_wootters(rho_psi(t, p, C))) <= 1e-9
        _, c_phi = concurrence_closed_phi(coeffs_phi(t, p, C))
        assert abs(float(c_phi) - concurrence_wootters(rho_phi(t, p, C))) <= 1e-9


@pytest.mark.criterion(3, "sudden death for every gamma, ordered, envelope and scan agree")
def test_sudden_death_for_all_gammas():
    scan = _fine_scan()
    dense = np.linspace(0.0, T_END, 300_001)
    deaths = {}
    for g in ALL_GAMMAS:
        p = paper_params(g)
        t_star = sudden_death_time(p, C, scan)
        assert t_star is not None and math.isfinite(t_star)
        after = dense[dense > t_star]
        assert np.all(d_value(coeffs_phi(after, p, C)) <= 0)
        t_env = envelope_death_time(p, C)
        assert abs(t_env - t_star) < PERIOD
        deaths[g] = t_star
    ordered = [deaths[g] for g in sorted(deaths)]
    assert ordered == sorted(ordered)


@pytest.mark.criterion(3, "sudden death for every gamma, ordered, envelope and scan agree")
def test_envelope_reference_times():
    assert envelope_death_time(paper_params(math.pi / 4), C) == pytest.approx(0.94e-3, rel=0.01)
    assert envelope_death_time(paper_params(math.pi / 12), C) == pytest.approx(0.47e-3, rel=0.01)


def _psi_roots(t_max):
    k = np.arange(0, math.ceil(t_max * C.omega0 / (2 * math.pi)) + 1)
    roots = (2 * k + 1) * math.pi / C.omega0
    return roots[roots <= t_max]


@pytest.mark.criterion(4, "psi-family concurrence vanishes only at isolated points")
@pytest.mark.parametrize("gamma", ALL_GAMMAS)
def test_psi_never_dies(gamma):
    p = paper_params(gamma)
    roots = _psi_roots(T_END)
    ts = np.union1d(_fine_scan(per_period=2000), roots)
    cp = coeffs_psi(ts, p, C)
    conc = concurrence_closed_psi(cp)
    assert np.all(conc >= 0)
    # divide out the smooth envelope so zeros are judged on the oscillating factor
    envelope = math.sin(2 * gamma) * np.exp(-0.5 * _gamma_exp(ts))
    zero = conc <= envelope * (0.5 * C.omega0 * 1e-9) ** 2
    distance = np.abs(ts[zero][:, None] - roots[None, :])
    assert np.all(distance.min(axis=1) <= 1e-9)
    assert np.all(distance.min(axis=0) <= 1e-9)
    # between neighbouring zeros the concurrence comes back
    edges = np.concatenate([[0.0], roots, [T_END]])
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = (ts > lo) & (ts < hi)
        assert conc[inside].max() > 0


def _gamma_exp(ts):
    return kinematics(ts, GaussianPacket.from_params(paper_params()), C).gamma_exp


@pytest.mark.criterion(4, "psi-family concurrence vanishes only at isolated points")
@pytest.mark.parametrize("gamma", ALL_GAMMAS)
def test_psi_ppt_eigenvalue(gamma):
    p = paper_params(gamma)
    ts = _fine_scan(per_period=1000)
    lam4 = psi_ppt_eigenvalues(coeffs_psi(ts, p, C))[3]
    assert np.all(lam4 <= 1e-12)
    lam4_end = psi_ppt_eigenvalues(coeffs_psi(T_END, p, C))[3]
    assert abs(lam4_end) < 1e-3 * np.max(np.abs(lam4))


@pytest.mark.criterion(5, "sign of nu4 is opposite to the sign of d")
@pytest.mark.parametrize("gamma", ALL_GAMMAS)
def test_ppt_concurrence_correspondence(gamma):
    p = paper_params(gamma)
    cb = coeffs_phi(_fine_scan(per_period=1000), p, C)
    d = d_value(cb)
    nu4 = cb.b3 - np.abs(cb.b1)
    mask = np.abs(d) > 1e-10
    assert mask.sum() > 0.9 * mask.size
    np.testing.assert_array_equal(np.sign(nu4[mask]), -np.sign(d[mask]))


@pytest.mark.criterion(6, "b3/|b1| >= (cot g / 2) sinh(Gamma / 2) on 1000 random samples")
def test_death_bound_random():
    rng = np.random.default_rng(20240601)
    checked = 0
    while checked < 1000:
        t = rng.uniform(0.0, T_END)
        g = rng.uniform(0.0, math.pi / 2)
        if g == 0.0:
            continue
        p = paper_params(g)
        if abs(coeffs_phi(t, p, C).b1) <= 1e-12:
            continue
        lhs, rhs, holds = death_bound_check(t, p, C)
        assert holds, (t, g, lhs, rhs)
        checked += 1


@pytest.mark.criterion(7, "local-decay exponent laws")
def test_overlap_exponents():
    pkt = GaussianPacket.from_params(paper_params())
    ts = np.geomspace(1e-6, T_END, 500)
    lhs = np.log(np.abs(overlap_pm(ts, pkt, C)))
    for branch in ("plus", "minus"):
        rhs = 4 * np.log(np.abs(overlap_free_pm(ts, branch, pkt, C)))
        # a logarithm carries absolute round-off of order machine epsilon
        np.testing.assert_allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


@pytest.mark.criterion(7, "local-decay exponent laws")
@pytest.mark.parametrize("gamma", [math.pi / 12, math.pi / 4, 1.3])
def test_psi_envelope_exponents(gamma):
    p = paper_params(gamma)
    k = np.arange(1, math.floor(T_END * C.omega0 / math.pi) + 1)
    ts = k * math.pi / C.omega0
    # 1 - 2 a4 loses digits to cancellation once exp(-Gamma) nears machine epsilon
    ts = ts[_gamma_exp(ts) <= -math.log(1e-6)]
    k = k[: ts.size]
    cp = coeffs_psi(ts, p, C)
    population = np.abs(2 * cp.a4 - 1)  # |cos(Omega0 t)| exp(-Gamma)
    even = k % 2 == 0
    conc = concurrence_closed_psi(cp)[even] / math.sin(2 * gamma)
    ratio = np.log(population[even]) / np.log(conc)
    np.testing.assert_allclose(ratio, 2.0, rtol=1e-9)
    np.testing.assert_allclose(-np.log(population), _gamma_exp(ts), rtol=1e-9)


@pytest.mark.criterion(8, "deterministic output, lossless config, reachable exit codes")
@pytest.mark.parametrize("preset", ["fig1", "fig2", "fig3", "fig4"])
def test_preset_output_is_byte_identical(preset, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--preset", preset, "--out", str(first)]) == EXIT_OK
    assert main(["--preset", preset, "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text().splitlines()) == 1 + 3 * 3000


@pytest.mark.criterion(8, "deterministic output, lossless config, reachable exit codes")
@pytest.mark.parametrize("preset", ["fig1", "fig2", "fig3", "fig4"])
def test_config_round_trip(preset):
    cfg = load_preset(preset)
    text = format_config(cfg)
    assert parse_config(text) == cfg
    assert format_config(parse_config(text)) == text


@pytest.mark.criterion(8, "deterministic output, lossless config, reachable exit codes")
def test_exit_codes_reachable(tmp_path, capsys):
    assert main(["--scenario", "psi", "--samples", "2", "--out", str(tmp_path / "ok.csv")]) == EXIT_OK
    assert main(["--scenario", "phi", "--gamma", "2.0"]) == EXIT_CONFIG
    assert main(["--scenario", "phi", "--out", str(tmp_path / "missing" / "o.csv")]) == EXIT_IO
    assert main(["--scenario", "phi", "--samples", "3", "--t-max", "0.1", "--oracle"]) == EXIT_TOLERANCE
    capsys.readouterr()
