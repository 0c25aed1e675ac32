"""Circuit IR, dense simulation, equivalence checks, connectivity and gate counting.

Qubit ordering: qubit 0 is the most significant bit of a basis-state index, so
``CNOT(0 -> 1)`` on two wires is the familiar ``[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]``.
Ops are listed in application order: ``ops[0]`` acts first.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import bloch
from .bloch import Axis, AxisLike, as_axis
from .errors import InputError

MAX_WIDTH = 12

CNOT, CZ, CIY, SWAP = "CNOT", "CZ", "CiY", "SWAP"
H, X, P, ROT, PI, U2 = "H", "X", "P", "Rot", "Pi", "U2"
MCROT, MCX = "McRot", "McX"

KINDS = (CNOT, CZ, CIY, SWAP, H, X, P, ROT, PI, U2, MCROT, MCX)
_ARITY = {CNOT: 2, CZ: 2, CIY: 2, SWAP: 2, H: 1, X: 1, P: 1, ROT: 1, PI: 1, U2: 1}


@dataclass(frozen=True)
class GateOp:
    """One circuit element.

    For controlled kinds the controls come first in ``qubits`` and the target last.
    ``McRot`` applies ``e^{i psi} R_lam(axis)`` to the target when every control is 1.
    """

    kind: str
    qubits: tuple[int, ...]
    lam: Optional[float] = None
    axis: Optional[Axis] = None
    psi: Optional[float] = None
    matrix: Optional[tuple[tuple[complex, ...], ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if len(set(qs)) != len(qs) or any(q < 0 for q in qs):
            raise InputError(f"invalid qubit indices {qs} for {self.kind}")
        arity = _ARITY.get(self.kind)
        if arity is not None and len(qs) != arity:
            raise InputError(f"{self.kind} acts on {arity} qubit(s), got {len(qs)}")
        if self.kind in (MCROT, MCX) and len(qs) < 2:
            raise InputError(f"{self.kind} needs at least one control")
        if self.kind in (P, ROT, MCROT) and self.lam is None:
            raise InputError(f"{self.kind} needs an angle")
        if self.kind in (ROT, PI, MCROT):
            if self.axis is None:
                raise InputError(f"{self.kind} needs an axis")
            object.__setattr__(self, "axis", as_axis(self.axis))
        if self.kind == U2:
            if self.matrix is None:
                raise InputError("U2 needs a matrix")
            m = bloch.check_unitary(np.array(self.matrix, dtype=complex), dim=2)
            object.__setattr__(self, "matrix", tuple(tuple(complex(z) for z in row) for row in m))

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def local_matrix(self) -> np.ndarray:
        """Matrix on ``self.qubits`` (first listed qubit most significant)."""
        k = self.kind
        if k == CNOT:
            return controlled(bloch.X, 1)
        if k == CZ:
            return controlled(bloch.Z, 1)
        if k == CIY:
            return controlled(1j * bloch.Y, 1)
        if k == SWAP:
            return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
        if k == H:
            return bloch.H.copy()
        if k == X:
            return bloch.X.copy()
        if k == P:
            return bloch.phase_gate(self.lam)
        if k == ROT:
            return bloch.rotation_matrix(self.lam, self.axis)
        if k == PI:
            return bloch.pi_rotation_matrix(self.axis)
        if k == U2:
            return np.array(self.matrix, dtype=complex)
        if k == MCROT:
            u = np.exp(1j * (self.psi or 0.0)) * bloch.rotation_matrix(self.lam, self.axis)
            return controlled(u, len(self.qubits) - 1)
        return controlled(bloch.X, len(self.qubits) - 1)

    def relabel(self, mapping) -> "GateOp":
        return GateOp(self.kind, tuple(mapping.get(q, q) for q in self.qubits), self.lam, self.axis, self.psi, self.matrix)

    def __repr__(self) -> str:
        extra = []
        if self.lam is not None:
            extra.append(f"lam={self.lam:.4g}")
        if self.axis is not None:
            extra.append(repr(self.axis))
        if self.psi:
            extra.append(f"psi={self.psi:.4g}")
        tail = (", " + ", ".join(extra)) if extra else ""
        return f"{self.kind}{list(self.qubits)}{tail}"


# constructors -------------------------------------------------------------

def cnot(c: int, t: int) -> GateOp:
    return GateOp(CNOT, (c, t))


def cz(a: int, b: int) -> GateOp:
    return GateOp(CZ, (a, b))


def ciy(c: int, t: int) -> GateOp:
    return GateOp(CIY, (c, t))


def swap(a: int, b: int) -> GateOp:
    return GateOp(SWAP, (a, b))


def h(q: int) -> GateOp:
    return GateOp(H, (q,))


def x(q: int) -> GateOp:
    return GateOp(X, (q,))


def phase(q: int, lam: float) -> GateOp:
    return GateOp(P, (q,), lam=float(lam))


def rot(q: int, lam: float, axis: AxisLike) -> GateOp:
    return GateOp(ROT, (q,), lam=float(lam), axis=as_axis(axis))


def pi(q: int, axis: AxisLike) -> GateOp:
    return GateOp(PI, (q,), axis=as_axis(axis))


def u2(q: int, m) -> GateOp:
    return GateOp(U2, (q,), matrix=tuple(map(tuple, np.asarray(m, dtype=complex))))


def mcrot(controls: Sequence[int], target: int, lam: float, axis: AxisLike, psi: float = 0.0) -> GateOp:
    return GateOp(MCROT, (*controls, target), lam=float(lam), axis=as_axis(axis), psi=float(psi))


def mcx(controls: Sequence[int], target: int) -> GateOp:
    return GateOp(MCX, (*controls, target))


def cpi(controls, target: int, axis: AxisLike, psi: float = 0.0) -> GateOp:
    """Multi-controlled ``e^{i psi} Pi(axis)`` as an ``McRot`` (``Pi = i R_pi``)."""
    if isinstance(controls, int):
        controls = (controls,)
    return mcrot(controls, target, math.pi, axis, psi + math.pi / 2)


def is_controlled_pi(op: GateOp, tol: float = 1e-12) -> bool:
    return op.kind == MCROT and abs(math.remainder(op.lam - math.pi, 4 * math.pi)) < tol


def controlled(u: np.ndarray, n_controls: int) -> np.ndarray:
    d = u.shape[0]
    full = np.eye(d * 2**n_controls, dtype=complex)
    full[-d:, -d:] = u
    return full


# circuit -------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``width`` wires.

    ``connectivity`` is ``"all"`` or ``"lnn"`` (path 0-1-...-(width-1)).
    ``ancillas`` lists wires that may be used as scratch in any state.
    """

    width: int
    ops: tuple[GateOp, ...] = ()
    connectivity: str = "all"
    ancillas: tuple[int, ...] = ()

    def __post_init__(self):
        if self.width < 1:
            raise InputError("circuit width must be positive")
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "ancillas", tuple(self.ancillas))
        if self.connectivity not in ("all", "lnn"):
            raise InputError(f"unknown connectivity {self.connectivity!r}")
        for op in self.ops:
            if max(op.qubits) >= self.width:
                raise InputError(f"{op!r} does not fit in width {self.width}")

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise InputError("cannot concatenate circuits of different width")
        return Circuit(self.width, self.ops + other.ops, self.connectivity, self.ancillas)

    def __len__(self) -> int:
        return len(self.ops)

    def with_ops(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(self.width, tuple(ops), self.connectivity, self.ancillas)


def _apply(state: np.ndarray, gate: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    k = len(qubits)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, state, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def circuit_unitary(c: Circuit) -> np.ndarray:
    n = c.width
    if n > MAX_WIDTH:
        raise InputError(f"width {n} exceeds the simulator limit of {MAX_WIDTH}")
    dim = 2**n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for op in c.ops:
        state = _apply(state, op.local_matrix(), op.qubits)
    return state.reshape(dim, dim)


def embed(gate: np.ndarray, qubits: Sequence[int], width: int) -> np.ndarray:
    """Full-register matrix of ``gate`` acting on ``qubits``."""
    dim = 2**width
    state = np.eye(dim, dtype=complex).reshape((2,) * width + (dim,))
    return _apply(state, np.asarray(gate, dtype=complex), qubits).reshape(dim, dim)


def assert_equiv(c: Circuit, target, tol: float = bloch.CIRCUIT_TOL) -> tuple[bool, float, float]:
    """``(ok, alpha, err)`` with ``target ~ e^{i alpha} U(c)``; err is the max-norm residual."""
    target = np.asarray(target, dtype=complex)
    if target.shape != (2**c.width, 2**c.width):
        raise InputError(f"target shape {target.shape} does not match width {c.width}")
    alpha, err = bloch.phase_distance(circuit_unitary(c), target)
    return err <= tol, alpha, err


def validate_connectivity(c: Circuit) -> list[str]:
    if c.connectivity == "all":
        return []
    bad = []
    for i, op in enumerate(c.ops):
        if len(op.qubits) < 2:
            continue
        qs = sorted(op.qubits)
        if qs[-1] - qs[0] != len(qs) - 1:
            bad.append(f"op {i}: {op!r} spans non-adjacent wires")
    return bad


def _pi_class(axis: Axis, tol: float = 1e-10) -> str:
    if abs(axis.y) <= tol and abs(axis.z) <= tol:
        return "Pi_x"
    if abs(axis.z) <= tol:
        return "Pi_xy"
    if abs(axis.y) <= tol:
        return "Pi_xz"
    return "Pi_general"


def _rot_class(axis: Axis, tol: float = 1e-12) -> str:
    for name, ref in (("Rz", bloch.Z_AXIS), ("Ry", bloch.Y_AXIS), ("Rx", bloch.X_AXIS)):
        if abs(abs(axis.dot(ref)) - 1) <= tol:
            return name
    return "Rv"


def count_gates(c: Circuit) -> dict[str, int]:
    """Tally per kind, with Rot split by axis and Pi split by plane.

    ``two_qubit`` counts every op acting on more than one wire.
    """
    counts: Counter = Counter({k: 0 for k in KINDS})
    for op in c.ops:
        counts[op.kind] += 1
        if op.kind == ROT:
            counts[_rot_class(op.axis)] += 1
        elif op.kind == PI:
            counts[_pi_class(op.axis)] += 1
    for key in ("Rz", "Ry", "Rx", "Rv", "Pi_x", "Pi_xy", "Pi_xz", "Pi_general"):
        counts.setdefault(key, 0)
    counts["two_qubit"] = sum(1 for op in c.ops if len(op.qubits) > 1)
    counts["single_qubit"] = sum(1 for op in c.ops if len(op.qubits) == 1)
    return dict(counts)


@dataclass
class SynthesisReport:
    counts: dict[str, int]
    error: float
    phase: float
    branches: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @classmethod
    def for_circuit(cls, c: Circuit, target, **extra) -> "SynthesisReport":
        _, alpha, err = assert_equiv(c, target, tol=math.inf)
        return cls(count_gates(c), err, alpha, **extra)

    def to_dict(self) -> dict:
        return {
            "counts": {k: v for k, v in self.counts.items() if v},
            "error": self.error,
            "phase": self.phase,
            "branches": self.branches,
            "notes": self.notes,
        }
