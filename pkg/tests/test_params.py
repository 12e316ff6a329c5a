from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osg_entanglement.errors import ValidationError
from osg_entanglement.params import (
    C_LIGHT,
    HBAR,
    PhysicalParams,
    derive_constants,
    paper_params,
    rabi_frequency_from_acceleration,
    theta0,
)


def test_paper_constants(params, consts):
    assert consts.k == pytest.approx(2 * math.pi / 1e-2, rel=1e-15)
    assert consts.k == pytest.approx(628.3185307, rel=1e-9)
    assert consts.a0 == pytest.approx(6.6262e-2, rel=1e-4)
    assert consts.omega0 == pytest.approx(1.2566370614e4, rel=1e-9)
    assert 2 * math.pi / consts.omega0 == pytest.approx(5e-4, rel=1e-12)
    assert consts.omega == pytest.approx(C_LIGHT * consts.k, rel=1e-15)
    assert consts.omega == pytest.approx(1.8837e11, rel=1e-4)
    assert consts.dp0 == pytest.approx(HBAR / (2 * params.dx0), rel=1e-15)
    assert consts.mass == params.mass


def test_rabi_frequency_two_routes_agree(params, consts):
    assert rabi_frequency_from_acceleration(params, consts) == pytest.approx(consts.omega0, rel=1e-12)


@given(
    eps=st.floats(1.0, 1e6),
    mass=st.floats(1e-27, 1e-24),
    frac=st.floats(0.01, 0.24),
)
def test_rabi_frequency_identity(eps, mass, frac):
    p = PhysicalParams(mass=mass, coupling_eps=eps, wavelength=1e-2, x0=frac * 1e-2, dx0=1e-4, gamma=0.3)
    c = derive_constants(p)
    assert rabi_frequency_from_acceleration(p, c) == pytest.approx(c.omega0, rel=1e-12)


def test_theta0_scalar_and_array(consts):
    assert theta0(0.0, consts) == 0.0
    assert isinstance(theta0(1e-3, consts), float)
    ts = np.array([0.0, 1e-4, 1e-3])
    out = theta0(ts, consts)
    assert out.shape == (3,)
    cubic = consts.mass * consts.a0**2 * 1e-3**3 / (6 * HBAR)
    assert out[2] == pytest.approx(consts.omega * 1e-3 + cubic, rel=1e-15)


@pytest.mark.parametrize(
    "field, value",
    [
        ("mass", 0.0),
        ("mass", -1.0),
        ("coupling_eps", -1.0),
        ("wavelength", 0.0),
        ("dx0", 0.0),
        ("gamma", -0.1),
        ("gamma", 2.0),
        ("x0", math.nan),
        ("mass", math.inf),
    ],
)
def test_invalid_fields_rejected(params, field, value):
    with pytest.raises(ValidationError) as info:
        dataclasses.replace(params, **{field: value})
    assert info.value.field == field


def test_broad_packet_violates_linearization(params):
    with pytest.raises(ValidationError, match="linearization"):
        dataclasses.replace(params, dx0=params.wavelength / 10)


def test_threshold_itself_is_accepted(params):
    dataclasses.replace(params, dx0=params.wavelength / 20)


def test_zero_coupling_gives_static_limit(params):
    c = derive_constants(dataclasses.replace(params, coupling_eps=0.0))
    assert c.a0 == 0.0
    assert c.omega0 == 0.0


def test_gamma_bounds_inclusive():
    paper_params(0.0)
    paper_params(math.pi / 2)


def test_params_are_frozen(params):
    with pytest.raises(dataclasses.FrozenInstanceError):
        params.mass = 1.0
