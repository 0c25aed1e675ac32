"""Controlled two-qubit unitaries over three qubits in all-to-all and linear layouts."""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from . import bloch
from . import circuit as C
from .bloch import Y_AXIS, Z_AXIS
from .circuit import Circuit, GateOp, SynthesisReport
from .controlled import crpi_ops, planar_decomposition, planar_parts, zy_ops
from .errors import InputError, SynthesisError
from .kak import PhaseSelection, phase_select
from .single import euler_decompose, pi_sequence, to_axis_angle

SEGMENT_TOL = 1e-12


class Layout(enum.Enum):
    A2A = "a2a"
    LNN_FIRST = "lnn-first"
    LNN_LAST = "lnn-last"
    LNN_MID = "lnn-mid"

    @property
    def positions(self) -> tuple[int, int, int]:
        """Wire indices of (c, t1, t2) at the circuit boundaries."""
        return {
            Layout.A2A: (0, 1, 2),
            Layout.LNN_FIRST: (0, 1, 2),
            Layout.LNN_LAST: (2, 1, 0),
            Layout.LNN_MID: (1, 0, 2),
        }[self]

    @property
    def connectivity(self) -> str:
        return "all" if self is Layout.A2A else "lnn"

    @property
    def cnot_count(self) -> int:
        return 10 if self is Layout.A2A else 13


class BasisChoice(enum.Enum):
    CPI = "cpi"
    ZY = "zy"
    RV = "rv"
    PI = "pi"


def _coerce(value, enum_cls):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        names = ", ".join(m.value for m in enum_cls)
        raise InputError(f"unknown {enum_cls.__name__} {value!r}; expected one of {names}") from None


def controlled_target(v, layout: Layout | str = Layout.A2A) -> np.ndarray:
    """8x8 matrix of C-v with (c, t1, t2) placed as in ``layout``; t1 is v's first qubit."""
    layout = _coerce(layout, Layout)
    v = bloch.check_unitary(v, dim=4)
    return C.embed(C.controlled(v, 1), layout.positions, 3)


# --------------------------------------------------------------------------- skeleton


def _skeleton_ops(sel: PhaseSelection, layout: Layout) -> list[GateOp]:
    p = sel.params
    u1d, u2d = p.u1.conj().T, p.u2.conj().T

    def middle(c, t1, t2):
        return [
            C.phase(c, sel.phi),
            C.u2(t1, p.u1),
            C.u2(t2, p.u2),
            C.ciy(t1, t2),
            C.cpi(c, t1, p.v3),
            C.cpi(c, t2, p.v4),
            C.cz(t2, t1),
            C.cpi(c, t1, p.v5),
            C.cnot(t1, t2),
            C.u2(t1, u1d),
            C.u2(t2, u2d),
        ]

    if layout is Layout.LNN_MID:
        # control starts in the middle; one SWAP brings it to the edge and one returns it
        return [
            C.cpi(1, 2, p.v2),
            C.swap(0, 1),
            C.cpi(0, 1, p.v1),
            *middle(0, 1, 2),
            C.cpi(0, 1, p.v6),
            C.swap(0, 1),
            C.cpi(1, 2, p.v7),
        ]
    c, t1, t2 = layout.positions
    return [
        C.cpi(c, t1, p.v1),
        C.cpi(c, t2, p.v2),
        *middle(c, t1, t2),
        C.cpi(c, t1, p.v6),
        C.cpi(c, t2, p.v7),
    ]


def build_cu4_cpi_skeleton(v, layout: Layout | str = Layout.A2A, selection: PhaseSelection | None = None) -> Circuit:
    """Controlled-pi skeleton of C-v: seven controlled pi-rotations, C-iY, CZ, one CNOT."""
    layout = _coerce(layout, Layout)
    sel = phase_select(v) if selection is None else selection
    return Circuit(3, tuple(_skeleton_ops(sel, layout)))


# --------------------------------------------------------------------------- expansion


def _expand_op(op: GateOp, basis: BasisChoice) -> list[GateOp]:
    if op.kind == C.CIY:
        c, t = op.qubits
        return _expand_cpi(c, t, Y_AXIS, math.pi / 2, basis, False)
    if op.kind == C.CZ:
        c, t = op.qubits
        return _expand_cpi(c, t, Z_AXIS, 0.0, basis, False)
    if C.is_controlled_pi(op):
        # every controlled-pi of the skeleton is controlled by c; only those get X insertion
        (c,) = op.controls
        return _expand_cpi(c, op.target, op.axis, op.psi - math.pi / 2, basis, basis is BasisChoice.PI)
    if op.kind == C.MCROT or op.kind == C.MCX:
        raise InputError(f"cannot expand {op!r}")
    return [op]


def _expand_cpi(c: int, t: int, axis, psi: float, basis: BasisChoice, insert_x: bool) -> list[GateOp]:
    if basis is BasisChoice.CPI:
        return crpi_ops([c], t, axis, psi)
    plane = planar_decomposition(axis)
    if plane is None:
        if basis is BasisChoice.PI:
            return crpi_ops([c], t, axis, psi)
        return zy_ops([c], t, axis, psi)
    sigma, phi = plane
    pre, post = planar_parts(t, sigma, phi)
    if insert_x:
        # X on both sides of the target leaves the CNOT unchanged but turns the
        # neighbouring plane rotations into pi-rotations
        pre, post = pre + [C.x(t)], [C.x(t)] + post
    phase_ops = [] if abs(math.remainder(psi, 2 * math.pi)) < 1e-12 else [C.phase(c, psi)]
    return [*phase_ops, *pre, C.cnot(c, t), *post]


def expand(skeleton: Circuit, basis: BasisChoice | str) -> Circuit:
    """Replace every controlled-pi gate of the skeleton by one CNOT and single-qubit gates.

    Consecutive controlled-pi gates sharing a control (fan-outs) keep their two
    CNOTs adjacent so that the linear-layout rewrite can find them.
    """
    basis = _coerce(basis, BasisChoice)
    ops = list(skeleton.ops)
    out: list[GateOp] = []
    i = 0
    while i < len(ops):
        op = ops[i]
        nxt = ops[i + 1] if i + 1 < len(ops) else None
        if (
            nxt is not None
            and C.is_controlled_pi(op)
            and C.is_controlled_pi(nxt)
            and op.controls == nxt.controls
            and op.target != nxt.target
        ):
            a, b = _expand_op(op, basis), _expand_op(nxt, basis)
            ia, ib = _cnot_index(a), _cnot_index(b)
            out += a[:ia] + b[:ib] + [a[ia], b[ib]] + a[ia + 1 :] + b[ib + 1 :]
            i += 2
            continue
        out += _expand_op(op, basis)
        i += 1
    return Circuit(skeleton.width, tuple(out), skeleton.connectivity)


def _cnot_index(ops: Sequence[GateOp]) -> int:
    idx = [k for k, op in enumerate(ops) if op.kind == C.CNOT]
    if len(idx) != 1:
        raise SynthesisError("expected exactly one CNOT in a controlled-pi expansion")
    return idx[0]


# --------------------------------------------------------------------------- LNN lowering


def _adjacent(op: GateOp) -> bool:
    return len(op.qubits) < 2 or abs(op.qubits[0] - op.qubits[1]) == 1


def _rewrite_fanouts(ops: list[GateOp]) -> list[GateOp]:
    out: list[GateOp] = []
    i = 0
    while i < len(ops):
        op = ops[i]
        if op.kind == C.CNOT and not _adjacent(op):
            pair = None
            if i + 1 < len(ops) and ops[i + 1].kind == C.CNOT and ops[i + 1].controls == op.controls:
                pair, skip = ops[i + 1], 2
            elif out and out[-1].kind == C.CNOT and out[-1].controls == op.controls:
                pair, skip = out.pop(), 1
            if pair is None or not _adjacent(pair):
                raise SynthesisError(f"non-adjacent {op!r} is not part of a fan-out")
            mid, far = pair.target, op.target
            (c,) = op.controls
            # CX(c->mid) CX(c->far) == CX(mid->far) CX(c->mid) CX(mid->far)
            out += [C.cnot(mid, far), C.cnot(c, mid), C.cnot(mid, far)]
            i += skip
            continue
        out.append(op)
        i += 1
    return out


def _fuse_swap(ops: list[GateOp], i: int) -> list[GateOp] | None:
    """Absorb ops[i] (a SWAP) into the nearest CNOT on the same pair, or return None."""
    a, b = ops[i].qubits
    relabel = {a: b, b: a}
    pair = {a, b}
    # forward: SWAP . ops  ->  relabelled ops . SWAP
    moved: list[GateOp] = []
    for j in range(i + 1, len(ops)):
        op = ops[j]
        if op.kind == C.CNOT and set(op.qubits) == pair:
            p, q = op.qubits
            return ops[:i] + moved + [C.cnot(p, q), C.cnot(q, p)] + ops[j + 1 :]
        if len(op.qubits) == 1 or not (set(op.qubits) & pair):
            moved.append(op.relabel(relabel))
            continue
        break
    moved = []
    for j in range(i - 1, -1, -1):
        op = ops[j]
        if op.kind == C.CNOT and set(op.qubits) == pair:
            p, q = op.qubits
            return ops[:j] + [C.cnot(q, p), C.cnot(p, q)] + moved[::-1] + ops[i + 1 :]
        if len(op.qubits) == 1 or not (set(op.qubits) & pair):
            moved.append(op.relabel(relabel))
            continue
        break
    return None


def lnn_lower(circuit: Circuit, layout: Layout | str) -> Circuit:
    """Make every two-qubit gate act on neighbouring wires without adding single-qubit gates.

    Fan-out CNOT pairs become three CNOTs through the middle wire and each SWAP
    is merged with an adjacent CNOT on the same pair (SWAP.CX = CX.CX').
    """
    layout = _coerce(layout, Layout)
    if layout is Layout.A2A:
        return circuit
    if any(op.kind in (C.MCROT, C.MCX, C.CZ, C.CIY) for op in circuit.ops):
        raise InputError("lnn_lower expects an expanded CNOT-level circuit")
    ops = _rewrite_fanouts(list(circuit.ops))
    while any(op.kind == C.SWAP for op in ops):
        i = next(k for k, op in enumerate(ops) if op.kind == C.SWAP)
        fused = _fuse_swap(ops, i)
        if fused is None:
            raise SynthesisError("SWAP has no neighbouring CNOT on the same wires")
        ops = fused
    out = Circuit(circuit.width, tuple(ops), "lnn")
    bad = C.validate_connectivity(out)
    if bad:
        raise SynthesisError("; ".join(bad))
    return out


# --------------------------------------------------------------------------- basis rewrite


def _is_identity(u: np.ndarray) -> bool:
    lam = to_axis_angle(u).lam
    return lam <= 2 * SEGMENT_TOL or lam >= 2 * math.pi - 2 * SEGMENT_TOL


def _nonzero(angle: float) -> bool:
    return abs(math.remainder(angle, 2 * math.pi)) > SEGMENT_TOL


def emit_zy(q: int, u: np.ndarray) -> list[GateOp]:
    """Fewest Rz/Ry gates (at most three) equal to u up to phase."""
    a, b, c = euler_decompose(u, "ZYZ").angles
    best = None
    for za, yb, zc in ((a, b, c), (a + math.pi, -b, c - math.pi)):
        if not _nonzero(yb):
            ops = [C.rot(q, bloch.normalize_angle(za + zc), Z_AXIS)] if _nonzero(za + zc) else []
        else:
            ops = []
            if _nonzero(zc):
                ops.append(C.rot(q, bloch.normalize_angle(zc), Z_AXIS))
            ops.append(C.rot(q, bloch.normalize_angle(yb), Y_AXIS))
            if _nonzero(za):
                ops.append(C.rot(q, bloch.normalize_angle(za), Z_AXIS))
        if best is None or len(ops) < len(best):
            best = ops
    return best


def emit_rv(q: int, u: np.ndarray) -> list[GateOp]:
    if _is_identity(u):
        return []
    form = to_axis_angle(u)
    return [C.rot(q, form.lam, form.axis)]


def emit_pi(q: int, u: np.ndarray) -> list[GateOp]:
    return [C.pi(q, v) for v in pi_sequence(u, SEGMENT_TOL)]


_EMITTERS = {BasisChoice.ZY: emit_zy, BasisChoice.RV: emit_rv, BasisChoice.PI: emit_pi}


def merge_segments(circuit: Circuit, emit) -> Circuit:
    """Multiply the single-qubit gates between two-qubit gates on each wire and re-emit them."""
    pending = {q: np.eye(2, dtype=complex) for q in range(circuit.width)}
    out: list[GateOp] = []

    def flush(q):
        out.extend(emit(q, pending[q]))
        pending[q] = np.eye(2, dtype=complex)

    for op in circuit.ops:
        if len(op.qubits) == 1:
            (q,) = op.qubits
            pending[q] = op.local_matrix() @ pending[q]
            continue
        for q in op.qubits:
            flush(q)
        out.append(op)
    for q in range(circuit.width):
        flush(q)
    return Circuit(circuit.width, tuple(out), circuit.connectivity)


def rewrite_basis(circuit: Circuit, basis: BasisChoice | str) -> Circuit:
    """Merge single-qubit runs and express them in the chosen basis (no-op for cpi)."""
    basis = _coerce(basis, BasisChoice)
    if basis is BasisChoice.CPI:
        return circuit
    return merge_segments(circuit, _EMITTERS[basis])


# --------------------------------------------------------------------------- driver


def build_cu4(v, layout: Layout | str = Layout.A2A, basis: BasisChoice | str = BasisChoice.ZY):
    """Circuit for C-v on three qubits plus a report of counts, error and phase branches."""
    layout = _coerce(layout, Layout)
    basis = _coerce(basis, BasisChoice)
    v = bloch.check_unitary(v, dim=4)
    sel = phase_select(v)
    skeleton = build_cu4_cpi_skeleton(v, layout, sel)
    expanded = expand(skeleton, basis)
    lowered = lnn_lower(expanded, layout)
    final = rewrite_basis(lowered, basis)
    final = Circuit(final.width, final.ops, layout.connectivity)
    target = controlled_target(v, layout)
    report = SynthesisReport.for_circuit(
        final,
        target,
        branches=list(sel.branches),
        notes={"layout": layout.value, "basis": basis.value, "phi": sel.phi},
    )
    if report.error > bloch.CIRCUIT_TOL:
        raise SynthesisError(f"controlled-U(4) circuit error {report.error:.3g}")
    if report.counts.get(C.CNOT, 0) != layout.cnot_count:
        raise SynthesisError(f"expected {layout.cnot_count} CNOTs, got {report.counts.get(C.CNOT, 0)}")
    return final, report
