import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import haar_unitary, max_diff, random_axis, seeds
from hermit import bloch
from hermit import circuit as C
from hermit.errors import InputError, SynthesisError
from hermit.kak import KakFactors, Su4PiParams, kak_factorize, phase_select, split_local, su4_to_pi_params

I2 = np.eye(2)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def expm_hermitian(h):
    w, vecs = np.linalg.eigh(h)
    return vecs @ np.diag(np.exp(1j * w)) @ vecs.conj().T


def to_special(u):
    return u * np.linalg.det(u) ** (-1 / u.shape[0])


def haar_su2(rng):
    return to_special(haar_unitary(2, rng))


def test_forward_swap():
    f = KakFactors(I2, I2, I2, I2, 0.0, 0.0, 0.0, 0.0)
    assert max_diff(f.matrix(), SWAP) < 1e-15


def test_middle_block_identity():
    # exp(i(a XX + b YY + c ZZ)) = e^{-i pi/4} (I x W) middle (W^dag x I), W = Rz(pi/2)
    a, b, c = 0.31, -0.52, 0.77
    xx, yy, zz = (np.kron(p, p) for p in bloch.PAULIS)
    expected = expm_hermitian(a * xx + b * yy + c * zz)
    th = (2 * a + math.pi / 2, -2 * b - math.pi / 2, -2 * c - math.pi / 2)
    w = bloch.rz(math.pi / 2)
    f = KakFactors(w, I2, I2, w.conj().T, *th, -math.pi / 4)
    assert max_diff(f.matrix(), expected) < 1e-14


@pytest.mark.parametrize("v", [SWAP, CNOT, np.diag([1, 1, 1, -1]), np.eye(4)], ids=["swap", "cnot", "cz", "id"])
def test_special_gates(v):
    f = kak_factorize(v)
    assert max_diff(f.matrix(), v) < 1e-9


def test_local_product(rng):
    v = np.kron(haar_unitary(2, rng), haar_unitary(2, rng))
    assert max_diff(kak_factorize(v).matrix(), v) < 1e-9


def test_split_local(rng):
    a, b = haar_su2(rng), haar_su2(rng)
    x, y, phase = split_local(1j * np.kron(a, b))
    assert max_diff(np.exp(1j * phase) * np.kron(x, y), 1j * np.kron(a, b)) < 1e-12


def test_rejects_non_unitary():
    with pytest.raises(InputError):
        kak_factorize(np.ones((4, 4)))
    with pytest.raises(InputError):
        kak_factorize(np.eye(2))


def test_haar_batch(rng):
    for _ in range(50):
        v = haar_unitary(4, rng)
        f = kak_factorize(v)
        assert max_diff(f.matrix(), v) < 1e-9
        for m in (f.a, f.b, f.c, f.d):
            assert abs(np.linalg.det(m) - 1) < 1e-10
            assert max_diff(m @ m.conj().T, I2) < 1e-10


def test_pi_params_require_special():
    with pytest.raises(SynthesisError):
        su4_to_pi_params(np.exp(1j * math.pi / 8) * np.eye(4))


def _params_round_trip(u):
    sel = phase_select(u)
    p = sel.params
    assert max_diff(p.matrix(), sel.u) < 1e-9
    assert abs(np.linalg.det(p.matrix()) - 1) < 1e-9
    assert p.plane_violation() < 1e-10
    assert abs(p.v3.y) < 1e-10 and abs(p.v4.z) < 1e-10
    for m in (p.u1, p.u2):
        assert abs(np.linalg.det(m) - 1) < 1e-10
    return sel


def test_swap_pi_params():
    _params_round_trip(SWAP)


def test_forward_built_params(rng):
    # oracle: a circuit built directly from random parameters in the pi form
    def planar(rng, plane):
        a = rng.uniform(0, 2 * math.pi)
        return bloch.Axis.of([math.cos(a), math.sin(a), 0] if plane == "xy" else [math.cos(a), 0, math.sin(a)])

    p = Su4PiParams(
        haar_su2(rng), haar_su2(rng),
        planar(rng, "xy"), planar(rng, "xy"), planar(rng, "xz"), planar(rng, "xy"), planar(rng, "xz"),
        random_axis(rng), random_axis(rng),
    )  # fmt: skip
    u = p.matrix()
    assert abs(np.linalg.det(u) - 1) < 1e-9
    back = su4_to_pi_params(u)
    assert max_diff(back.matrix(), u) < 1e-9


def test_phase_select_realizable_det_one(rng):
    p = su4_to_pi_params(phase_select(haar_unitary(4, rng)).u)
    u = p.matrix()
    sel = phase_select(u)
    assert max_diff(sel.u, u) < 1e-9
    assert any(b["accepted"] for b in sel.branches)


def test_phase_select_known_phase(rng):
    u = phase_select(haar_unitary(4, rng)).u
    v = np.exp(1j * math.pi / 7) * u
    sel = phase_select(v)
    k = (sel.phi - math.pi / 7) / (math.pi / 2)
    assert abs(k - round(k)) < 1e-9
    assert max_diff(np.exp(1j * sel.phi) * sel.params.matrix(), v) < 1e-9


def test_phase_select_records_branches(rng):
    sel = phase_select(haar_unitary(4, rng))
    assert sel.branches[-1]["accepted"]
    assert all(not b["accepted"] for b in sel.branches[:-1])
    assert [b["k"] for b in sel.branches] == list(range(len(sel.branches)))


def test_every_special_unitary_has_pi_form(rng):
    # all four fourth roots of det give an exact form, so the first branch is taken
    for _ in range(20):
        v = haar_unitary(4, rng)
        for k in range(4):
            u = to_special(v) * 1j**k
            assert max_diff(su4_to_pi_params(u).matrix(), u) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_pi_form_property(seed):
    _params_round_trip(haar_unitary(4, np.random.default_rng(seed)))
