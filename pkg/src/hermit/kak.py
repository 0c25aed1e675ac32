"""Two-qubit canonical (KAK) factorization and the pi-rotation form of SU(4) elements."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import bloch
from . import circuit as C
from .bloch import Axis, H_AXIS, S_AXIS, Y_AXIS
from .circuit import Circuit
from .errors import SynthesisError
from .single import default_perpendicular, to_axis_angle, two_pi_factorize

KAK_TOL = 1e-9

# magic basis: XX, YY, ZZ are diagonal in it and local gates become real orthogonal
MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]) / math.sqrt(2)
_PAULI_DIAG = np.array(
    [np.real(np.diag(MAGIC.conj().T @ np.kron(p, p) @ MAGIC)) for p in bloch.PAULIS]
)
_PHASE_SYSTEM = np.column_stack([np.ones(4), _PAULI_DIAG.T])
# mixing constants for diagonalizing Re(M) + c Im(M); tried in order until one separates
_MIX = (0.5772156649015329, 1.618033988749895, -0.7071067811865476, 2.718281828459045, -3.141592653589793, 0.1)
_W = bloch.rz(math.pi / 2)


@dataclass(frozen=True)
class KakFactors:
    """``v = e^{i gamma} (A on t2, B on t1) . middle(theta) . (C on t2, D on t1)``.

    The middle block, in time order, is CNOT(t1->t2), Ry(theta1) on t1 with
    Rz(theta3) on t2, CNOT(t2->t1), Ry(theta2) on t1, CNOT(t1->t2).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    theta1: float
    theta2: float
    theta3: float
    gamma: float

    def circuit(self, t1: int = 0, t2: int = 1, width: int = 2) -> Circuit:
        ops = [
            C.u2(t1, self.d),
            C.u2(t2, self.c),
            C.cnot(t1, t2),
            C.rot(t1, self.theta1, Y_AXIS),
            C.rot(t2, self.theta3, bloch.Z_AXIS),
            C.cnot(t2, t1),
            C.rot(t1, self.theta2, Y_AXIS),
            C.cnot(t1, t2),
            C.u2(t1, self.b),
            C.u2(t2, self.a),
        ]
        return Circuit(width, ops)

    def matrix(self) -> np.ndarray:
        """Circuit matrix including the phase, i.e. the reconstructed ``v``."""
        return np.exp(1j * self.gamma) * C.circuit_unitary(self.circuit())


def _to_su2(m: np.ndarray) -> np.ndarray:
    return m / np.sqrt(np.linalg.det(m))


def split_local(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Nearest Kronecker factorization ``m ~ e^{i phase} (a kron b)`` with a, b in SU(2)."""
    r = np.asarray(m).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = _to_su2(math.sqrt(s[0]) * u[:, 0].reshape(2, 2))
    b = _to_su2(math.sqrt(s[0]) * vh[0].reshape(2, 2))
    phase, _ = bloch.phase_distance(np.kron(a, b), m)
    return a, b, phase


def _diagonalizer(m2: np.ndarray, mix: float) -> tuple[np.ndarray, np.ndarray]:
    _, p = np.linalg.eigh(m2.real + mix * m2.imag)
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
    return p, np.diag(p.T @ m2 @ p)


def _attempt(v: np.ndarray, mix: float):
    g0 = float(np.angle(np.linalg.det(v))) / 4
    u = v * np.exp(-1j * g0)
    ub = MAGIC.conj().T @ u @ MAGIC
    m2 = ub.T @ ub
    p, dvals = _diagonalizer(m2, mix)
    roots = np.exp(0.5j * np.angle(dvals))
    if np.real(np.prod(roots)) < 0:
        roots[0] = -roots[0]
    left = u @ MAGIC @ p @ np.diag(roots.conj()) @ MAGIC.conj().T
    right = MAGIC @ p.T @ MAGIC.conj().T
    k1, k2, _ = split_local(left)
    k3, k4, _ = split_local(right)
    _, ca, cb, cc = np.linalg.solve(_PHASE_SYSTEM, np.angle(roots))
    # exp(i(a XX + b YY + c ZZ)) = e^{-i pi/4} (I kron W) middle (W^dag kron I)
    theta1, theta2, theta3 = 2 * ca + math.pi / 2, -2 * cb - math.pi / 2, -2 * cc - math.pi / 2
    partial = KakFactors(k2 @ _W, k1, k4, _W.conj().T @ k3, theta1, theta2, theta3, 0.0)
    gamma, err = bloch.phase_distance(partial.matrix(), v)
    return KakFactors(partial.a, partial.b, partial.c, partial.d, theta1, theta2, theta3, gamma), err


def kak_factorize(v) -> KakFactors:
    """Factor any two-qubit unitary into three CNOTs, three rotations and SU(2) locals."""
    v = bloch.check_unitary(v, dim=4)
    best, best_err = None, math.inf
    for mix in _MIX:
        factors, err = _attempt(v, mix)
        if err < best_err:
            best, best_err = factors, err
        if err <= KAK_TOL / 10:
            break
    if best_err > KAK_TOL:
        raise SynthesisError(f"KAK reconstruction error {best_err:.3g} exceeds {KAK_TOL}")
    return best


@dataclass(frozen=True)
class Su4PiParams:
    """Parameters of the pi-rotation form of an SU(4) element.

    Time order on (t1, t2): Pi(v1) x Pi(v2), U1 x U2, C-iY(t1->t2),
    Pi(v3) x Pi(v4), CZ, Pi(v5) on t1, CNOT(t1->t2), U1^dag x U2^dag,
    Pi(v6) x Pi(v7).
    """

    u1: np.ndarray
    u2: np.ndarray
    v1: Axis
    v2: Axis
    v3: Axis
    v4: Axis
    v5: Axis
    v6: Axis
    v7: Axis

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.v1, self.v2, self.v3, self.v4, self.v5, self.v6, self.v7)

    def circuit(self, t1: int = 0, t2: int = 1, width: int = 2) -> Circuit:
        ops = [
            C.pi(t1, self.v1),
            C.pi(t2, self.v2),
            C.u2(t1, self.u1),
            C.u2(t2, self.u2),
            C.ciy(t1, t2),
            C.pi(t1, self.v3),
            C.pi(t2, self.v4),
            C.cz(t1, t2),
            C.pi(t1, self.v5),
            C.cnot(t1, t2),
            C.u2(t1, self.u1.conj().T),
            C.u2(t2, self.u2.conj().T),
            C.pi(t1, self.v6),
            C.pi(t2, self.v7),
        ]
        return Circuit(width, ops)

    def matrix(self) -> np.ndarray:
        return C.circuit_unitary(self.circuit())

    def plane_violation(self) -> float:
        """Largest out-of-plane component (v3, v5 in xz; v1, v2, v4 in xy)."""
        return max(abs(self.v3.y), abs(self.v5.y), abs(self.v1.z), abs(self.v2.z), abs(self.v4.z))


def _pi_pair(outer: np.ndarray, inner: np.ndarray) -> tuple[Axis, Axis, np.ndarray]:
    """``outer . inner = phase * Pi(v_last) Pi(v_first)`` with v_first in the xy plane.

    Returns (v_first, v_last, U) where U is ``inner . Pi(v_first)`` made special.
    """
    form = to_axis_angle(outer @ inner)
    fac = two_pi_factorize(outer @ inner, default_perpendicular(form.axis) if form.lam else None)
    local = inner @ bloch.pi_rotation_matrix(fac.v1)
    return fac.v1, fac.v2, _to_su2(local)


def kak_variants(f: KakFactors, u: np.ndarray):
    """Equivalent factorizations of ``u`` whose global phases differ by multiples of pi/2.

    Shifting theta1 by pi multiplies the entangling core by a local i X kron X,
    and negating a local adds pi, so the phase can be moved through all four
    values while the circuit matrix stays ``u``.
    """
    for j in range(4):
        core = replace(f, a=bloch.I2, b=bloch.I2, theta1=f.theta1 + j * math.pi, gamma=0.0).matrix()
        b, a, phase = split_local(u @ core.conj().T)
        for sign in (1, -1):
            yield replace(f, a=a, b=sign * b, theta1=f.theta1 + j * math.pi, gamma=phase + (sign < 0) * math.pi)


def su4_to_pi_params(u, factors: KakFactors | None = None) -> Su4PiParams:
    """Pi-rotation parameters reproducing ``u`` exactly (no free phase).

    Every SU(4) element admits such parameters; SynthesisError signals a
    numerical failure.
    """
    u = bloch.check_unitary(u, dim=4)
    if abs(np.linalg.det(u) - 1) > KAK_TOL:
        raise SynthesisError("input is not in SU(4)")
    f = kak_factorize(u) if factors is None else factors
    params, err = _pi_params_from(f)
    if err > KAK_TOL:
        for g in kak_variants(f, u):
            params, err = _pi_params_from(g)
            if err <= KAK_TOL:
                break
    if err > KAK_TOL:
        raise SynthesisError(f"pi-form reconstruction differs from the input ({err:.3g})")
    return params


def _pi_params_from(f: KakFactors) -> tuple[Su4PiParams, float]:
    d_prime = bloch.S.conj().T @ f.d
    c_prime = bloch.pi_rotation_matrix(S_AXIS) @ f.c
    v4 = Axis.from_angles(math.pi / 2, math.pi / 4 + f.theta3 / 2)
    v3 = bloch.rotate_axis(H_AXIS, Y_AXIS, -f.theta1 / 2)
    v5 = bloch.rotate_axis(H_AXIS, Y_AXIS, f.theta2 / 2)
    v1, v6, u1 = _pi_pair(f.b, d_prime)
    v2, v7, u2 = _pi_pair(f.a, c_prime)
    params = Su4PiParams(u1, u2, v1, v2, v3, v4, v5, v6, v7)
    return params, float(np.max(np.abs(params.matrix() - f.matrix())))


@dataclass(frozen=True)
class PhaseSelection:
    phi: float
    u: np.ndarray
    params: Su4PiParams
    branches: tuple[dict, ...] = field(default=())


def phase_select(v) -> PhaseSelection:
    """Find phi with ``v = e^{i phi} u`` where u has an exact pi-rotation form.

    The four candidates are ``(arg det v + 2 pi k) / 4``; every branch outcome is
    recorded in ``branches``.
    """
    v = bloch.check_unitary(v, dim=4)
    base = float(np.angle(np.linalg.det(v)))
    factors = kak_factorize(v * np.exp(-1j * base / 4))
    branches = []
    for k in range(4):
        phi = (base + 2 * math.pi * k) / 4
        u = v * np.exp(-1j * phi)
        # the KAK factors of u only differ from those of the k=0 branch by a phase
        shifted = replace(factors, gamma=factors.gamma - (phi - base / 4))
        try:
            params = su4_to_pi_params(u, shifted)
        except SynthesisError as exc:
            branches.append({"k": k, "phi": phi, "accepted": False, "reason": str(exc)})
            continue
        branches.append({"k": k, "phi": phi, "accepted": True})
        return PhaseSelection(phi % (2 * math.pi), u, params, tuple(branches))
    raise SynthesisError(f"no phase branch admits an exact pi-rotation form: {branches}")
