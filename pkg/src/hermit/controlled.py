"""Controlled pi-rotations: axis transformation, one-CNOT realization and {CNOT, Ry, Rz} forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import bloch
from . import circuit as C
from .bloch import Axis, AxisLike, X_AXIS, Y_AXIS, Z_AXIS, as_axis
from .circuit import Circuit, GateOp
from .errors import InputError, SynthesisError
from .single import euler_decompose, midpoint_axes, to_axis_angle

ANGLE_EPS = 1e-12


def _as_controls(controls) -> tuple[int, ...]:
    if isinstance(controls, (int, np.integer)):
        return (int(controls),)
    out = tuple(int(c) for c in controls)
    if not out:
        raise InputError("at least one control is required")
    return out


@dataclass(frozen=True)
class ControlledPiSpec:
    """Target gate ``C-(e^{i psi} Pi(axis))`` from ``controls`` onto ``target``."""

    axis: Axis
    target: int
    controls: tuple[int, ...] = (0,)
    psi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "axis", as_axis(self.axis))
        object.__setattr__(self, "controls", _as_controls(self.controls))
        if self.target in self.controls or len(set(self.controls)) != len(self.controls):
            raise InputError("controls and target must be distinct")

    @property
    def control(self) -> int:
        return self.controls[0]

    @property
    def width(self) -> int:
        return max(self.controls + (self.target,)) + 1

    def op(self) -> GateOp:
        return C.cpi(self.controls, self.target, self.axis, self.psi)


@dataclass(frozen=True)
class McRotationSpec:
    """Multi-controlled ``e^{i psi} R_lam(axis)``."""

    controls: tuple[int, ...]
    target: int
    lam: float
    axis: Axis
    psi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "axis", as_axis(self.axis))
        object.__setattr__(self, "controls", _as_controls(self.controls))
        if self.target in self.controls or len(set(self.controls)) != len(self.controls):
            raise InputError("controls and target must be distinct")

    @property
    def width(self) -> int:
        return max(self.controls + (self.target,)) + 1

    def op(self, axis: Optional[AxisLike] = None) -> GateOp:
        return C.mcrot(self.controls, self.target, self.lam, self.axis if axis is None else axis, self.psi)


def conjugate_pi(v_target: AxisLike, v_source: AxisLike) -> Axis:
    """Axis m with ``Pi(v_target) = Pi(m) Pi(v_source) Pi(m)``."""
    m = midpoint_axes(v_target, v_source)
    pm = bloch.pi_rotation_matrix(m)
    err = np.max(np.abs(pm @ bloch.pi_rotation_matrix(v_source) @ pm - bloch.pi_rotation_matrix(v_target)))
    if err > bloch.IDENTITY_TOL + conjugation_slack(v_target, v_source):
        raise SynthesisError(f"pi-conjugation identity failed ({err:.3g})")
    return m


def conjugation_slack(v_target: AxisLike, v_source: AxisLike) -> float:
    """Extra error allowed in the pi-conjugation identity for nearly antipodal axes.

    With s = v_target + v_source the residual is (|v_source|^2 - |v_target|^2) / |s|
    (round-off in the norms amplified by 1/|s|), or at most 2|s| when the
    antipodal tie-break is used.
    """
    a, b = as_axis(v_target).vec, as_axis(v_source).vec
    s = float(np.linalg.norm(a + b))
    if s <= 1e-10:
        return 2 * s
    return (abs(float(a @ a - b @ b)) + 4e-16) / s


def mc_axis_transform(spec: McRotationSpec, new_axis: AxisLike) -> Circuit:
    """Pi(m) . MC-R(spec.axis) . Pi(m) on the target, realizing MC-R about ``new_axis``."""
    m = midpoint_axes(new_axis, spec.axis)
    t = spec.target
    return Circuit(spec.width, (C.pi(t, m), spec.op(), C.pi(t, m)))


def control_phase_ops(controls: Sequence[int], psi: float) -> list[GateOp]:
    """Gates applying ``e^{i psi}`` when every control is 1 (empty for psi = 0)."""
    if abs(math.remainder(psi, 2 * math.pi)) < ANGLE_EPS:
        return []
    if len(controls) == 1:
        return [C.phase(controls[0], psi)]
    # multi-controlled P(psi) = e^{i psi/2} Rz(psi) on the last control
    return [C.mcrot(controls[:-1], controls[-1], psi, Z_AXIS, psi / 2)]


def _mc_not(controls: Sequence[int], target: int) -> GateOp:
    return C.cnot(controls[0], target) if len(controls) == 1 else C.mcx(controls, target)


def controlled_pi_one_cnot(spec: ControlledPiSpec) -> Circuit:
    """``P(psi)_c, Pi(m)_t, CNOT, Pi(m)_t`` with m in M(axis, x)."""
    if len(spec.controls) != 1:
        raise InputError("the one-CNOT construction needs exactly one control")
    ops = crpi_ops(spec.controls, spec.target, spec.axis, spec.psi)
    return Circuit(spec.width, ops)


def crpi_ops(controls: Sequence[int], target: int, axis: AxisLike, psi: float = 0.0) -> list[GateOp]:
    m = midpoint_axes(axis, X_AXIS)
    return [*control_phase_ops(controls, psi), C.pi(target, m), _mc_not(controls, target), C.pi(target, m)]


def single_cnot_witness(u, tol: float = 1e-8) -> Optional[tuple[float, Axis]]:
    """``(psi, v)`` with ``u = e^{i psi} Pi(v)`` if C-u needs only one CNOT, else None.

    A 2x2 unitary has that form exactly when it is traceless.  The sign of v is
    fixed so that v_z >= 0 (ties broken toward the canonical half sphere).
    """
    u = bloch.check_unitary(u, dim=2)
    if abs(np.trace(u)) > tol:
        return None
    form = to_axis_angle(u)
    psi = form.gamma - math.pi / 2
    v = form.axis
    if v.z < -1e-12:
        v, psi = -v, psi + math.pi
    elif abs(v.z) <= 1e-12:
        v, sign = v.canonical()
        if sign < 0:
            psi += math.pi
    return psi % (2 * math.pi), v


def zyx_conjugators(axis: AxisLike) -> tuple[float, float]:
    """Angles (phi, psi) with ``MC-Pi(axis) = Rz(phi) Ry(psi) MC-X Ry(-psi) Rz(-phi)``."""
    m = midpoint_axes(axis, X_AXIS)
    phi, psi, _ = euler_decompose(bloch.pi_rotation_matrix(m), "ZYX").angles
    return phi, psi


def _rotation_ops(target: int, pairs) -> list[GateOp]:
    return [C.rot(target, lam, ax) for lam, ax in pairs if abs(math.remainder(lam, 4 * math.pi)) > ANGLE_EPS]


def cpi_to_zy(spec: ControlledPiSpec) -> Circuit:
    return Circuit(spec.width, zy_ops(spec.controls, spec.target, spec.axis, spec.psi))


def zy_ops(controls: Sequence[int], target: int, axis: AxisLike, psi: float = 0.0) -> list[GateOp]:
    phi, theta = zyx_conjugators(axis)
    return [
        *control_phase_ops(controls, psi),
        *_rotation_ops(target, [(-phi, Z_AXIS), (-theta, Y_AXIS)]),
        _mc_not(controls, target),
        *_rotation_ops(target, [(theta, Y_AXIS), (phi, Z_AXIS)]),
    ]


def planar_angle(axis: AxisLike, sigma: AxisLike, tol: float = 1e-12) -> Optional[float]:
    """phi with ``axis = R_sigma(phi) x`` if axis is perpendicular to sigma (sigma in {y, z})."""
    v, s = as_axis(axis), as_axis(sigma)
    if abs(v.dot(s)) > tol:
        return None
    if s == Z_AXIS:
        return math.atan2(v.y, v.x)
    if s == Y_AXIS:
        return math.atan2(-v.z, v.x)
    raise InputError("planar_angle supports sigma in {y, z}")


def cpi_planar(spec: ControlledPiSpec, tau: AxisLike, sigma: AxisLike, phi: float) -> Circuit:
    """``R_sigma(phi) . MC-Pi(tau) . R_sigma(-phi)`` for ``axis = R_sigma(phi) tau``, tau perpendicular to sigma."""
    tau, sigma = as_axis(tau), as_axis(sigma)
    if abs(tau.dot(sigma)) > 1e-8:
        raise InputError("tau must be perpendicular to sigma")
    if np.max(np.abs(bloch.rotate_axis(tau, sigma, phi).vec - spec.axis.vec)) > 1e-8:
        raise InputError("axis is not R_sigma(phi) tau")
    t = spec.target
    if tau == X_AXIS:
        core = _mc_not(spec.controls, t)
    else:
        core = C.cpi(spec.controls, t, tau)
    ops = [
        *control_phase_ops(spec.controls, spec.psi),
        *_rotation_ops(t, [(-phi, sigma)]),
        core,
        *_rotation_ops(t, [(phi, sigma)]),
    ]
    return Circuit(spec.width, ops)


def planar_decomposition(axis: AxisLike) -> Optional[tuple[Axis, float]]:
    """``(sigma, phi)`` with ``axis = R_sigma(phi) x`` for sigma = z (xy plane) or y (xz plane)."""
    for sigma in (Z_AXIS, Y_AXIS):
        phi = planar_angle(axis, sigma)
        if phi is not None:
            return sigma, phi
    return None


def planar_parts(target: int, sigma: AxisLike, phi: float) -> tuple[list[GateOp], list[GateOp]]:
    """Single-qubit gates placed before and after the CNOT of a planar controlled-Pi."""
    return _rotation_ops(target, [(-phi, sigma)]), _rotation_ops(target, [(phi, sigma)])
