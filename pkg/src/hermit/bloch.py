"""Closed-form single-qubit matrices, Bloch-sphere axes and phase-insensitive comparison.

Conventions used everywhere in the package:

* ``rotation_matrix(lam, v) = exp(-i lam v.sigma / 2)``
* ``pi_rotation_matrix(v) = i * rotation_matrix(pi, v)`` (Hermitian, traceless, squares to I)
* ``phase_gate(lam) = diag(1, e^{i lam})``
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import InputError

UNITARY_TOL = 1e-10
IDENTITY_TOL = 1e-12
CIRCUIT_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULIS = (X, Y, Z)


@dataclass(frozen=True)
class Axis:
    """Real unit 3-vector on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > 1e-12:
            raise InputError(f"axis ({self.x}, {self.y}, {self.z}) is not a unit vector")

    @classmethod
    def of(cls, vec: Iterable[float]) -> "Axis":
        """Normalize an arbitrary non-zero 3-vector into an Axis."""
        v = np.asarray(list(vec), dtype=float)
        if v.shape != (3,):
            raise InputError(f"axis must have 3 components, got shape {v.shape}")
        n = float(np.linalg.norm(v))
        if not math.isfinite(n) or n < 1e-15:
            raise InputError("cannot normalize a zero or non-finite vector")
        v = v / n
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Axis":
        """v(theta, phi) = (sin t cos p, sin t sin p, cos t)."""
        return cls.of((math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def theta(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.z)))

    @property
    def phi(self) -> float:
        if abs(self.x) < 1e-15 and abs(self.y) < 1e-15:
            return 0.0
        return math.atan2(self.y, self.x) % (2 * math.pi)

    def __neg__(self) -> "Axis":
        return Axis(-self.x, -self.y, -self.z)

    def dot(self, other: "AxisLike") -> float:
        return float(np.dot(self.vec, as_axis(other).vec))

    def canonical(self, tol: float = 1e-12) -> tuple["Axis", int]:
        """Return ``(axis, sign)`` with the axis in the half sphere theta, phi in [0, pi).

        ``sign`` is -1 when the axis was flipped; since ``Pi(-v) = -Pi(v)``
        callers must multiply the matrix by ``sign`` to keep it unchanged.
        """
        if abs(self.y) > tol:
            keep = self.y > 0
        elif abs(self.x) > tol:
            keep = self.x > 0
        else:
            keep = self.z > 0
        return (self, 1) if keep else (-self, -1)

    def __repr__(self) -> str:
        return f"Axis({self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


AxisLike = Union[Axis, Iterable[float]]

X_AXIS = Axis(1.0, 0.0, 0.0)
Y_AXIS = Axis(0.0, 1.0, 0.0)
Z_AXIS = Axis(0.0, 0.0, 1.0)
H_AXIS = Axis.from_angles(math.pi / 4, 0.0)
S_AXIS = Axis.from_angles(math.pi / 2, math.pi / 4)
T_AXIS = Axis.from_angles(math.pi / 2, math.pi / 8)


def as_axis(v: AxisLike) -> Axis:
    if isinstance(v, Axis):
        return v
    arr = np.asarray(list(v), dtype=float)
    if arr.shape != (3,):
        raise InputError(f"axis must have 3 components, got shape {arr.shape}")
    if abs(float(arr @ arr) - 1.0) > 1e-12:
        raise InputError(f"axis {arr} is not normalized")
    # already unit length: keep the components bit-for-bit
    return Axis(float(arr[0]), float(arr[1]), float(arr[2]))


def normalize_angle(lam: float) -> float:
    """Map a rotation angle so that lam/2 lies in (-pi, pi]."""
    half = math.remainder(lam / 2, 2 * math.pi)
    if half <= -math.pi:
        half += 2 * math.pi
    return 2 * half


def rotation_matrix(lam: float, axis: AxisLike) -> np.ndarray:
    v = as_axis(axis)
    c, s = math.cos(lam / 2), math.sin(lam / 2)
    return np.array(
        [
            [c - 1j * v.z * s, (-v.y - 1j * v.x) * s],
            [(v.y - 1j * v.x) * s, c + 1j * v.z * s],
        ]
    )


def pi_rotation_matrix(axis: AxisLike) -> np.ndarray:
    v = as_axis(axis)
    return np.array([[v.z, v.x - 1j * v.y], [v.x + 1j * v.y, -v.z]], dtype=complex)


def rz(lam: float) -> np.ndarray:
    return rotation_matrix(lam, Z_AXIS)


def ry(lam: float) -> np.ndarray:
    return rotation_matrix(lam, Y_AXIS)


def rx(lam: float) -> np.ndarray:
    return rotation_matrix(lam, X_AXIS)


def phase_gate(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]])


S = phase_gate(math.pi / 2)
T = phase_gate(math.pi / 4)


def rotation3d(about: AxisLike, angle: float) -> np.ndarray:
    """3x3 rotation matrix by ``angle`` about ``about`` (right-hand rule)."""
    k = as_axis(about).vec
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)


def rotate_axis(axis: AxisLike, about: AxisLike, angle: float) -> Axis:
    """Rodrigues rotation of ``axis`` about ``about``."""
    return Axis.of(rotation3d(about, angle) @ as_axis(axis).vec)


def check_unitary(m, tol: float = UNITARY_TOL, dim: int | None = None) -> np.ndarray:
    """Coerce to a complex square power-of-two matrix and check unitarity."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n < 1 or n & (n - 1) or n > 2**12:
        raise InputError(f"matrix dimension {n} is not a power of two <= 4096")
    if dim is not None and n != dim:
        raise InputError(f"expected dimension {dim}, got {n}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    err = np.max(np.abs(a @ a.conj().T - np.eye(n)))
    if err > tol:
        raise InputError(f"matrix is not unitary (|UU^dag - I| = {err:.3g})")
    return a


def equiv_up_to_phase(a, b, tol: float = CIRCUIT_TOL) -> tuple[bool, float]:
    """Is ``b == e^{i alpha} a``?  Returns ``(ok, alpha)``.

    alpha is the argument of the largest-magnitude entry of ``a^dag b``, so
    ``equiv_up_to_phase(X, 1j * X)`` gives ``(True, pi/2)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    alpha, err = _phase_and_error(a, b)
    return err <= tol, alpha


def _phase_and_error(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    if not a.size:
        return 0.0, 0.0
    prod = a.conj().T @ b
    idx = np.unravel_index(np.argmax(np.abs(prod)), prod.shape)
    alpha = float(np.angle(prod[idx])) % (2 * math.pi)
    err = float(np.max(np.abs(b - np.exp(1j * alpha) * a)))
    return alpha, err


def phase_distance(a, b) -> tuple[float, float]:
    """``(alpha, max|b - e^{i alpha} a|)`` without a verdict."""
    return _phase_and_error(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def so3_matrix(u: np.ndarray) -> np.ndarray:
    """SO(3) image of a 2x2 unitary: R_ij = tr(s_i U s_j U^dag) / 2."""
    return np.array(
        [[0.5 * np.trace(si @ u @ sj @ u.conj().T).real for sj in PAULIS] for si in PAULIS]
    )
