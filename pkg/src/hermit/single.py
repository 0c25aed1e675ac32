"""Single-qubit factorizations: axis-angle form, products of two pi-rotations, Euler angles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bloch
from .bloch import Axis, AxisLike, X_AXIS, Z_AXIS, as_axis
from .errors import InputError

_TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class AxisAngleForm:
    """``u = e^{i gamma} R_lam(axis)`` with lam in [0, 2pi]."""

    lam: float
    axis: Axis
    gamma: float

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.gamma) * bloch.rotation_matrix(self.lam, self.axis)


@dataclass(frozen=True)
class TwoPiFactorization:
    """``u = e^{i gamma} Pi(v2) Pi(v1)``; ``Pi(v1)`` is applied first."""

    v1: Axis
    v2: Axis
    gamma: float

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.gamma) * bloch.pi_rotation_matrix(self.v2) @ bloch.pi_rotation_matrix(self.v1)


@dataclass(frozen=True)
class EulerAngles:
    """Three rotation angles in matrix-product order plus a global phase.

    ZYZ: ``u = e^{i gamma} Rz(a0) Ry(a1) Rz(a2)``;
    ZYX: ``u = e^{i gamma} Rz(a0) Ry(a1) Rx(a2)``.
    """

    convention: str
    angles: tuple[float, float, float]
    gamma: float

    def matrix(self) -> np.ndarray:
        a0, a1, a2 = self.angles
        last = bloch.rz(a2) if self.convention == "ZYZ" else bloch.rx(a2)
        return np.exp(1j * self.gamma) * bloch.rz(a0) @ bloch.ry(a1) @ last


def _unitary2(u) -> np.ndarray:
    return bloch.check_unitary(u, dim=2)


def to_axis_angle(u) -> AxisAngleForm:
    u = _unitary2(u)
    gamma = float(np.angle(np.linalg.det(u))) / 2
    su = u * np.exp(-1j * gamma)
    c = 0.5 * (su[0, 0] + su[1, 1]).real
    vs = np.array(
        [
            -0.5 * (su[0, 1] + su[1, 0]).imag,
            0.5 * (su[1, 0] - su[0, 1]).real,
            0.5 * (su[1, 1] - su[0, 0]).imag,
        ]
    )
    s = float(np.linalg.norm(vs))
    if s < 1e-14:
        # u is proportional to the identity; pick the branch where su = +I
        if c < 0:
            gamma += math.pi
        return AxisAngleForm(0.0, Z_AXIS, gamma % _TWO_PI)
    lam = 2 * math.atan2(s, c)
    return AxisAngleForm(lam, Axis.of(vs), gamma % _TWO_PI)


def default_perpendicular(axis: AxisLike) -> Axis:
    """z x axis when that is well defined (keeps the result in the xy plane), else x."""
    cross = np.cross(Z_AXIS.vec, as_axis(axis).vec)
    if np.linalg.norm(cross) > 1e-8:
        return Axis.of(cross)
    return X_AXIS


def two_pi_factorize(u, v1_hint: Optional[AxisLike] = None) -> TwoPiFactorization:
    """Write ``u`` as ``e^{i gamma} Pi(v2) Pi(v1)``.

    ``v1`` is any axis perpendicular to the rotation axis of ``u`` (the hint if
    given); ``v2`` is ``v1`` rotated about that axis by half the rotation angle.
    """
    form = to_axis_angle(u)
    if form.lam == 0.0:
        v1 = X_AXIS if v1_hint is None else as_axis(v1_hint)
        return TwoPiFactorization(v1, v1, float(np.angle(np.asarray(u)[0, 0])) % _TWO_PI)
    if v1_hint is None:
        v1 = default_perpendicular(form.axis)
    else:
        v1 = as_axis(v1_hint)
        if abs(v1.dot(form.axis)) > 1e-8:
            raise InputError("v1 hint is not perpendicular to the rotation axis")
    v2 = bloch.rotate_axis(v1, form.axis, form.lam / 2)
    return TwoPiFactorization(v1, v2, form.gamma)


def midpoint_axes(v1: AxisLike, v2: AxisLike) -> Axis:
    """An axis m with ``v2 = R_m(pi) v1``."""
    a, b = as_axis(v1).vec, as_axis(v2).vec
    total = a + b
    if np.linalg.norm(total) > 1e-10:
        return Axis.of(total)
    w = Z_AXIS.vec if abs(a[2]) < 0.9 else X_AXIS.vec
    return Axis.of(np.cross(a, w))


def _fix_phase(u: np.ndarray, rebuilt_su: np.ndarray) -> float:
    alpha, _ = bloch.phase_distance(rebuilt_su, u)
    return alpha


def euler_decompose(u, convention: str = "ZYZ") -> EulerAngles:
    u = _unitary2(u)
    convention = convention.upper()
    if convention == "ZYZ":
        su = u * np.exp(-1j * float(np.angle(np.linalg.det(u))) / 2)
        a, b = su[0, 0], su[1, 0]
        theta = 2 * math.atan2(abs(b), abs(a))
        if abs(b) < 1e-12:
            phi, lam = -2 * float(np.angle(a)), 0.0
        elif abs(a) < 1e-12:
            phi, lam = 2 * float(np.angle(b)), 0.0
        else:
            plus, minus = -2 * float(np.angle(a)), 2 * float(np.angle(b))
            phi, lam = (plus + minus) / 2, (plus - minus) / 2
        angles = (phi, theta, lam)
    elif convention == "ZYX":
        r = bloch.so3_matrix(u)
        psi = math.atan2(-r[2, 0], math.hypot(r[0, 0], r[1, 0]))
        if math.hypot(r[0, 0], r[1, 0]) < 1e-12:
            phi, zeta = math.atan2(-r[0, 1], r[1, 1]), 0.0
        else:
            phi, zeta = math.atan2(r[1, 0], r[0, 0]), math.atan2(r[2, 1], r[2, 2])
        angles = (phi, psi, zeta)
    else:
        raise InputError(f"unknown Euler convention {convention!r}")
    partial = EulerAngles(convention, angles, 0.0)
    return EulerAngles(convention, angles, _fix_phase(u, partial.matrix()))


def pi_sequence(u, tol: float = 1e-11) -> list[Axis]:
    """Fewest pi-rotation axes (time order) whose product equals u up to phase.

    Empty for u proportional to I, one axis for traceless u, otherwise two
    axes with the first one in the xy plane.
    """
    u = _unitary2(u)
    form = to_axis_angle(u)
    if form.lam <= 2 * tol or form.lam >= 2 * math.pi - 2 * tol:
        return []
    if abs(np.trace(u)) <= tol:
        return [form.axis]
    fac = two_pi_factorize(u)
    return [fac.v1, fac.v2]
