import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import angles, axes, haar_unitary, max_diff, random_axis, seeds
from hermit import bloch
from hermit import circuit as C
from hermit.bloch import Axis, H_AXIS, S_AXIS, X_AXIS, Y_AXIS, Z_AXIS
from hermit.circuit import Circuit
from hermit.controlled import (
    ControlledPiSpec,
    McRotationSpec,
    conjugate_pi,
    conjugation_slack,
    controlled_pi_one_cnot,
    cpi_planar,
    cpi_to_zy,
    mc_axis_transform,
    planar_decomposition,
    single_cnot_witness,
)
from hermit.errors import InputError


def block_controlled(u, n_controls):
    """Oracle: identity everywhere except the all-ones control block."""
    d = 2**n_controls
    blocks = [np.eye(2)] * (d - 1) + [u]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    for k, b in enumerate(blocks):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = b
    return out


CZ = np.diag([1, 1, 1, -1])


def test_conjugate_pi_examples():
    assert max_diff(conjugate_pi(Z_AXIS, X_AXIS).vec, H_AXIS.vec) < 1e-15
    assert max_diff(bloch.H @ bloch.X @ bloch.H, bloch.Z) < 1e-15
    v = Axis.from_angles(1.0, 2.0)
    assert conjugate_pi(v, v) == v
    m = conjugate_pi(Y_AXIS, X_AXIS)
    assert max_diff(m.vec, S_AXIS.vec) < 1e-15
    ps = bloch.pi_rotation_matrix(S_AXIS)
    assert max_diff(ps @ bloch.X @ ps, bloch.Y) < 1e-15


def test_one_cnot_cz():
    circ = controlled_pi_one_cnot(ControlledPiSpec(Z_AXIS, target=1, controls=0))
    assert C.count_gates(circ)["CNOT"] == 1
    assert C.assert_equiv(circ, CZ, 1e-10)[0]
    assert max_diff(C.circuit_unitary(circ), CZ) < 1e-12


def test_one_cnot_x_axis():
    circ = controlled_pi_one_cnot(ControlledPiSpec(X_AXIS, target=1))
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.X, 1)) < 1e-15


def test_one_cnot_iy():
    circ = controlled_pi_one_cnot(ControlledPiSpec(Y_AXIS, target=1, psi=math.pi / 2))
    assert max_diff(C.circuit_unitary(circ), block_controlled(1j * bloch.Y, 1)) < 1e-12
    assert circ.ops[0].kind == C.P and circ.ops[0].lam == pytest.approx(math.pi / 2)


def test_one_cnot_needs_single_control():
    with pytest.raises(InputError):
        controlled_pi_one_cnot(ControlledPiSpec(X_AXIS, target=2, controls=(0, 1)))


def test_spec_validation():
    with pytest.raises(InputError):
        ControlledPiSpec(X_AXIS, target=0, controls=0)
    with pytest.raises(InputError):
        McRotationSpec((), 1, 0.3, X_AXIS)


def test_witness_examples():
    psi, v = single_cnot_witness(bloch.X)
    assert psi == pytest.approx(0, abs=1e-12) and max_diff(v.vec, X_AXIS.vec) < 1e-12
    psi, v = single_cnot_witness(bloch.H)
    assert psi == pytest.approx(0, abs=1e-12) and max_diff(v.vec, H_AXIS.vec) < 1e-12
    assert single_cnot_witness(bloch.S) is None


def test_witness_rejects_non_unitary():
    with pytest.raises(InputError):
        single_cnot_witness([[1, 1], [0, 0]])


def test_mc_transform_same_axis():
    spec = McRotationSpec((0,), 1, 0.8, H_AXIS)
    circ = mc_axis_transform(spec, H_AXIS)
    assert circ.ops[0].axis == H_AXIS
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.rotation_matrix(0.8, H_AXIS), 1)) < 1e-12


def test_mc_transform_crpi():
    v = Axis.from_angles(0.6, 2.2)
    circ = mc_axis_transform(McRotationSpec((0,), 1, math.pi, X_AXIS), v)
    expected = block_controlled(bloch.rotation_matrix(math.pi, v), 1)
    assert max_diff(C.circuit_unitary(circ), expected) < 1e-12


def test_mc_transform_two_controls_z_to_x():
    lam = 1.7
    circ = mc_axis_transform(McRotationSpec((0, 1), 2, lam, Z_AXIS), X_AXIS)
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.rx(lam), 2)) < 1e-10


def test_cpi_to_zy_examples():
    bare = cpi_to_zy(ControlledPiSpec(X_AXIS, target=1))
    assert [op.kind for op in bare.ops] == [C.CNOT]
    cz = cpi_to_zy(ControlledPiSpec(Z_AXIS, target=1))
    assert C.assert_equiv(cz, CZ, 1e-10)[0]


def test_cpi_to_zy_multi_control():
    v = Axis.from_angles(0.3, 1.4)
    circ = cpi_to_zy(ControlledPiSpec(v, target=2, controls=(0, 1)))
    assert C.count_gates(circ)["McX"] == 1
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.pi_rotation_matrix(v), 2)) < 1e-10


def test_cpi_planar_iy():
    spec = ControlledPiSpec(Y_AXIS, target=1, psi=math.pi / 2)
    circ = cpi_planar(spec, X_AXIS, Z_AXIS, math.pi / 2)
    assert C.count_gates(circ)["CNOT"] == 1
    assert max_diff(C.circuit_unitary(circ), block_controlled(1j * bloch.Y, 1)) < 1e-10
    # oracle: S-conjugated CNOT on the target plus a control phase of pi/2
    s_form = Circuit(2, [C.phase(1, -math.pi / 2), C.cnot(0, 1), C.phase(1, math.pi / 2), C.phase(0, math.pi / 2)])
    assert max_diff(C.circuit_unitary(s_form), block_controlled(1j * bloch.Y, 1)) < 1e-12


def test_cpi_planar_cz():
    circ = cpi_planar(ControlledPiSpec(Z_AXIS, target=1), X_AXIS, Y_AXIS, -math.pi / 2)
    assert max_diff(C.circuit_unitary(circ), CZ) < 1e-10
    assert {op.axis for op in circ.ops if op.kind == C.ROT} == {Y_AXIS}


def test_cpi_planar_zero_angle():
    tau = Axis.from_angles(math.pi / 2, 0.4)
    circ = cpi_planar(ControlledPiSpec(tau, target=1), tau, Z_AXIS, 0.0)
    assert [op.kind for op in circ.ops] == [C.MCROT]


def test_cpi_planar_precondition():
    with pytest.raises(InputError):
        cpi_planar(ControlledPiSpec(Z_AXIS, target=1), Z_AXIS, Z_AXIS, 0.0)
    with pytest.raises(InputError):
        cpi_planar(ControlledPiSpec(Z_AXIS, target=1), X_AXIS, Z_AXIS, 0.5)


@given(st.floats(min_value=0, max_value=2 * math.pi), st.sampled_from(["xy", "xz"]))
def test_planar_decomposition(phi, plane):
    v = Axis.from_angles(math.pi / 2, phi) if plane == "xy" else Axis.of([math.cos(phi), 0, math.sin(phi)])
    sigma, ang = planar_decomposition(v)
    circ = cpi_planar(ControlledPiSpec(v, target=1), X_AXIS, sigma, ang)
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.pi_rotation_matrix(v), 1)) < 1e-10


@pytest.mark.parametrize("eps", [1e-10, 1e-11, 1e-13])
def test_planar_decomposition_keeps_small_offsets(eps):
    v = Axis.of([math.cos(eps), 0, math.sin(eps)])
    sigma, ang = planar_decomposition(v)
    circ = cpi_planar(ControlledPiSpec(v, target=1), X_AXIS, sigma, ang)
    assert max_diff(C.circuit_unitary(circ), block_controlled(bloch.pi_rotation_matrix(v), 1)) < 2e-12


@given(axes(), axes())
def test_pi_conjugation_identity(v, w):
    m = conjugate_pi(v, w)
    pm = bloch.pi_rotation_matrix(m)
    err = max_diff(pm @ bloch.pi_rotation_matrix(w) @ pm, bloch.pi_rotation_matrix(v))
    if np.linalg.norm(v.vec + w.vec) >= 1e-3:
        assert err < 1e-12
    else:
        assert err < 1e-12 + conjugation_slack(v, w)


@pytest.mark.parametrize("gap", [0.0, 1e-14, 1e-11, 1e-9, 1e-6])
def test_pi_conjugation_near_antipodal(gap):
    # the identity degrades gracefully, never beyond the conditioning bound
    v = Axis.from_angles(0.8, 1.9)
    w = Axis.of(-v.vec + gap * np.cross(v.vec, [0, 0, 1]))
    m = conjugate_pi(v, w)
    pm = bloch.pi_rotation_matrix(m)
    err = max_diff(pm @ bloch.pi_rotation_matrix(w) @ pm, bloch.pi_rotation_matrix(v))
    assert err < 1e-12 + conjugation_slack(v, w)


@given(axes(), axes(), angles)
def test_rotation_conjugation_identity(v, w, lam):
    pm = bloch.pi_rotation_matrix(conjugate_pi(v, w))
    assert max_diff(pm @ bloch.rotation_matrix(lam, w) @ pm, bloch.rotation_matrix(lam, v)) < 1e-12


@settings(max_examples=50)
@given(axes(), axes(), angles, st.floats(min_value=0, max_value=2 * math.pi), st.integers(1, 3))
def test_mc_transform_identity(v, w, lam, psi, n):
    spec = McRotationSpec(tuple(range(n)), n, lam, w, psi)
    circ = mc_axis_transform(spec, v)
    expected = block_controlled(np.exp(1j * psi) * bloch.rotation_matrix(lam, v), n)
    assert max_diff(C.circuit_unitary(circ), expected) < 1e-10


@given(axes(), st.floats(min_value=-10, max_value=10))
def test_witness_soundness(v, psi):
    u = np.exp(1j * psi) * bloch.pi_rotation_matrix(v)
    found = single_cnot_witness(u)
    assert found is not None
    p, w = found
    assert max_diff(np.exp(1j * p) * bloch.pi_rotation_matrix(w), u) < 1e-10
    assert w.z >= 0
    circ = controlled_pi_one_cnot(ControlledPiSpec(w, target=1, psi=p))
    assert C.count_gates(circ)["CNOT"] == 1
    assert max_diff(C.circuit_unitary(circ), block_controlled(u, 1)) < 1e-10


@given(seeds)
def test_witness_rejects_generic(seed):
    u = haar_unitary(2, np.random.default_rng(seed))
    if abs(np.trace(u)) > 1e-6:
        assert single_cnot_witness(u) is None


@settings(max_examples=50)
@given(axes(), st.floats(min_value=0, max_value=2 * math.pi))
def test_every_zy_circuit_single_cnot(v, psi):
    circ = cpi_to_zy(ControlledPiSpec(v, target=1, psi=psi))
    assert C.count_gates(circ)["CNOT"] == 1
    expected = block_controlled(np.exp(1j * psi) * bloch.pi_rotation_matrix(v), 1)
    assert max_diff(C.circuit_unitary(circ), expected) < 1e-10


def test_random_crpi_batch(rng):
    for _ in range(50):
        v = random_axis(rng)
        circ = controlled_pi_one_cnot(ControlledPiSpec(v, target=1))
        assert C.assert_equiv(circ, block_controlled(bloch.pi_rotation_matrix(v), 1), 1e-10)[0]
