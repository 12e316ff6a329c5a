"""Entanglement decay of two atoms coupled to cavity modes with the optical Stern-Gerlach effect."""

from __future__ import annotations

from .dynamics import (
    CoeffsOneAtom,
    CoeffsPhi,
    CoeffsPsi,
    XState,
    coeffs_one_atom,
    coeffs_phi,
    coeffs_psi,
    rho_one_atom,
    rho_phi,
    rho_psi,
)
from .entanglement import (
    concurrence_closed_phi,
    concurrence_closed_psi,
    concurrence_wootters,
    d_value,
    death_bound_check,
    envelope_death_time,
    partial_transpose,
    ppt_report,
    sudden_death_time,
)
from .errors import (
    ConfigError,
    DegenerateInput,
    GridMismatch,
    GridViolation,
    NumericalError,
    OSGError,
    ScanTooShort,
    ToleranceError,
    ValidationError,
)
from .packets import GaussianPacket, kinematics, overlap_free_pm, overlap_pm
from .params import DerivedConstants, PhysicalParams, derive_constants, paper_params

__all__ = [
    "CoeffsOneAtom", "CoeffsPhi", "CoeffsPsi", "ConfigError", "DegenerateInput",
    "DerivedConstants", "GaussianPacket", "GridMismatch", "GridViolation",
    "NumericalError", "OSGError", "PhysicalParams", "ScanTooShort", "ToleranceError",
    "ValidationError", "XState", "coeffs_one_atom", "coeffs_phi", "coeffs_psi",
    "concurrence_closed_phi", "concurrence_closed_psi", "concurrence_wootters",
    "d_value", "death_bound_check", "derive_constants", "envelope_death_time",
    "kinematics", "overlap_free_pm", "overlap_pm", "paper_params", "partial_transpose",
    "ppt_report", "rho_one_atom", "rho_phi", "rho_psi", "sudden_death_time",
]  # fmt: skip
