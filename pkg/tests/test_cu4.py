import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import haar_unitary, max_diff, seeds
from hermit import bloch
from hermit import circuit as C
from hermit.circuit import Circuit
from hermit.cu4 import (
    BasisChoice,
    Layout,
    build_cu4,
    build_cu4_cpi_skeleton,
    controlled_target,
    emit_pi,
    emit_rv,
    emit_zy,
    expand,
    lnn_lower,
)
from hermit.errors import InputError
from hermit.kak import phase_select

LAYOUTS = [m.value for m in Layout]
BASES = [m.value for m in BasisChoice]
CNOT4 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def block_diag_controlled(v):
    """Oracle C-v with the control as the most significant wire."""
    out = np.zeros((8, 8), dtype=complex)
    out[:4, :4] = np.eye(4)
    out[4:, 4:] = v
    return out


def test_controlled_target_a2a(rng):
    v = haar_unitary(4, rng)
    assert max_diff(controlled_target(v), block_diag_controlled(v)) == 0


@pytest.mark.parametrize("layout", LAYOUTS)
@pytest.mark.parametrize("basis", BASES)
def test_equivalence_and_counts(layout, basis, rng):
    v = haar_unitary(4, rng)
    circ, report = build_cu4(v, layout, basis)
    counts = C.count_gates(circ)
    assert report.counts == counts
    assert C.assert_equiv(circ, controlled_target(v, layout), 1e-9)[0]
    assert counts["CNOT"] == (10 if layout == "a2a" else 13)
    assert counts["two_qubit"] == counts["CNOT"]
    assert C.validate_connectivity(circ) == []
    if basis == "zy":
        assert counts["Ry"] <= 10 and counts["Rz"] <= 15 and counts["Rot"] == counts["Ry"] + counts["Rz"]
    elif basis == "rv":
        assert counts["Rot"] <= 15 and counts["single_qubit"] == counts["Rot"]
    elif basis == "pi":
        assert counts["Pi"] <= 20 and counts["single_qubit"] == counts["Pi"]
        assert counts["Pi_x"] + counts["Pi_xy"] + counts["Pi_xz"] >= 13
    if layout != "a2a":
        assert circ.connectivity == "lnn"


def test_exact_table_counts(rng):
    v = haar_unitary(4, rng)
    assert C.count_gates(build_cu4(v, "a2a", "zy")[0])["Ry"] == 10
    assert C.count_gates(build_cu4(v, "a2a", "zy")[0])["Rz"] == 15
    assert C.count_gates(build_cu4(v, "a2a", "rv")[0])["Rot"] == 15
    pi_counts = C.count_gates(build_cu4(v, "a2a", "pi")[0])
    assert pi_counts["Pi"] == 20 and pi_counts["Pi_x"] == 1


def test_identity_target():
    circ, report = build_cu4(np.eye(4), "a2a", "zy")
    assert C.count_gates(circ)["CNOT"] == 10
    assert C.assert_equiv(circ, np.eye(8), 1e-9)[0]


def test_cnot_target_is_toffoli():
    toffoli = np.eye(8, dtype=complex)
    toffoli[6:, 6:] = bloch.X
    for layout in LAYOUTS:
        circ, _ = build_cu4(CNOT4, layout, "zy")
        assert C.assert_equiv(circ, controlled_target(CNOT4, layout), 1e-9)[0]
    circ, _ = build_cu4(CNOT4, "a2a", "rv")
    assert C.assert_equiv(circ, toffoli, 1e-9)[0]


def test_skeleton_structure_and_branches(rng):
    v = haar_unitary(4, rng)
    sel = phase_select(v)
    skel = build_cu4_cpi_skeleton(v, "a2a", sel)
    assert C.assert_equiv(skel, block_diag_controlled(v), 1e-9)[0]
    kinds = [op.kind for op in skel.ops]
    assert kinds.count(C.MCROT) == 7
    assert (kinds.count(C.CIY), kinds.count(C.CZ), kinds.count(C.CNOT)) == (1, 1, 1)
    # control-on block: e^{i phi} times the pi-form matrix of the chosen branch
    u = C.circuit_unitary(skel)
    assert max_diff(u[4:, 4:], np.exp(1j * sel.phi) * sel.params.matrix()) < 1e-9
    assert max_diff(u[:4, :4], np.eye(4)) < 1e-9


def test_lnn_lowering_of_expanded(rng):
    v = haar_unitary(4, rng)
    for layout in ("lnn-first", "lnn-last", "lnn-mid"):
        skel = build_cu4_cpi_skeleton(v, layout)
        exp = expand(skel, "cpi")
        low = lnn_lower(exp, layout)
        assert C.count_gates(low)["CNOT"] == 13
        assert C.validate_connectivity(low) == []
        assert C.assert_equiv(low, controlled_target(v, layout), 1e-9)[0]


def test_lnn_lower_rejects_skeleton(rng):
    with pytest.raises(InputError):
        lnn_lower(build_cu4_cpi_skeleton(haar_unitary(4, rng), "lnn-first"), "lnn-first")


def test_unknown_layout_and_basis(rng):
    v = haar_unitary(4, rng)
    with pytest.raises(InputError):
        build_cu4(v, "ring", "zy")
    with pytest.raises(InputError):
        build_cu4(v, "a2a", "qasm")
    with pytest.raises(InputError):
        build_cu4(np.ones((4, 4)), "a2a", "zy")


@settings(max_examples=60)
@given(seeds)
def test_emitters_reproduce_segment(seed):
    u = haar_unitary(2, np.random.default_rng(seed))
    for emit, limit in ((emit_zy, 3), (emit_rv, 1), (emit_pi, 2)):
        ops = emit(0, u)
        assert len(ops) <= limit
        assert C.assert_equiv(Circuit(1, ops), u, 1e-10)[0]


def test_emitters_special_segments():
    assert emit_zy(0, np.eye(2)) == [] and emit_rv(0, np.eye(2)) == [] and emit_pi(0, np.eye(2)) == []
    assert len(emit_zy(0, bloch.rz(0.4))) == 1
    assert len(emit_pi(0, bloch.H)) == 1


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_control_off_branch(seed):
    rng = np.random.default_rng(seed)
    v = haar_unitary(4, rng)
    for layout in LAYOUTS:
        circ, _ = build_cu4(v, layout, "pi")
        u = C.circuit_unitary(circ)
        c = Layout(layout).positions[0]
        xi = haar_unitary(4, rng)[:, 0]
        state = np.kron(np.array([1, 0]), xi)
        # put the control wire at its layout position
        state = np.moveaxis(state.reshape(2, 2, 2), 0, c).reshape(-1)
        out = u @ state
        overlap = np.vdot(state, out)
        assert abs(abs(overlap) - 1) < 1e-9
        assert max_diff(out, overlap * state) < 1e-9
