import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr import linalg, states
from qcorr.errors import InvalidState, OutOfRange

PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0]) / np.sqrt(2)
BELL = np.outer(PHI_PLUS, PHI_PLUS)


def test_x_state_examples():
    np.testing.assert_allclose(states.x_state(.25, .25, .25, .25).matrix, np.eye(4) / 4)
    np.testing.assert_allclose(states.x_state(.5, 0, 0, .5, .5, 0).matrix, BELL, atol=1e-15)
    with pytest.raises(InvalidState):
        states.x_state(0.5, 0.3, 0.2, 0.0, 0.4, 0.1)


def test_x_state_rejects_bad_diagonal():
    with pytest.raises(InvalidState):
        states.x_state(0.5, 0.5, 0.5, -0.5)
    with pytest.raises(InvalidState):
        states.x_state(0.3, 0.3, 0.3, 0.3)


def test_werner_examples():
    np.testing.assert_allclose(states.werner(1.0).matrix, BELL, atol=1e-15)
    np.testing.assert_allclose(states.werner(0.0).matrix, np.eye(4) / 4, atol=1e-15)
    ev = np.sort(np.linalg.eigvalsh(states.werner(1 / 3).matrix))[::-1]
    np.testing.assert_allclose(ev, [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-14)
    for f in (-0.34, 1.01):
        with pytest.raises(OutOfRange):
            states.werner(f)


def test_r_family_examples():
    np.testing.assert_allclose(states.r_family(0, 1).matrix, BELL, atol=1e-15)
    np.testing.assert_allclose(states.r_family(1, 0).matrix.real, np.diag([0, 1, 0, 0]), atol=1e-15)
    rho = states.r_family(1 / 3, 1 / 3)
    ev = np.linalg.eigvalsh(rho.matrix)
    assert abs(np.trace(rho.matrix) - 1) < 1e-14 and ev.min() > -1e-14
    assert np.sum(ev > 1e-12) == 3
    with pytest.raises(OutOfRange):
        states.r_family(0.5, 0.6)


def test_p_family_examples():
    np.testing.assert_allclose(states.p_family(1, 0).matrix, BELL, atol=1e-15)
    np.testing.assert_allclose(states.p_family(0, 0).matrix.real, np.diag([0, .5, .5, 0]), atol=1e-15)
    rho = states.p_family(0.4, 0.2)
    np.testing.assert_allclose(np.diag(rho.matrix).real, [0.2, 0.2, 0.4, 0.2], atol=1e-15)
    assert np.linalg.eigvalsh(rho.matrix).min() > -1e-14
    with pytest.raises(OutOfRange):
        states.p_family(0.5, -0.6)


def test_beta_and_delta_families():
    np.testing.assert_allclose(states.beta_family(1).matrix, BELL, atol=1e-15)
    np.testing.assert_allclose(states.beta_family(0).matrix, np.outer(PSI_PLUS, PSI_PLUS), atol=1e-15)
    half = states.beta_family(0.5).matrix
    expected = np.zeros((4, 4))
    expected[np.diag_indices(4)] = 0.25
    expected[0, 3] = expected[3, 0] = expected[1, 2] = expected[2, 1] = 0.25
    np.testing.assert_allclose(half, expected, atol=1e-15)
    np.testing.assert_allclose(states.delta_family(0).matrix, np.eye(4) / 4, atol=1e-15)
    np.testing.assert_allclose(states.delta_family(1).matrix, half, atol=1e-15)
    mid = states.delta_family(0.5).matrix
    assert abs(np.trace(mid) - 1) < 1e-14 and np.linalg.eigvalsh(mid).min() > 0


@pytest.mark.parametrize("beta", np.linspace(0, 1, 11))
def test_beta_family_marginals_maximally_mixed(beta):
    rho = states.beta_family(beta).matrix
    for keep in "AB":
        np.testing.assert_allclose(linalg.partial_trace(rho, keep), np.eye(2) / 2, atol=1e-15)


def test_constructors_pass_validation():
    for rho in (states.werner(-1 / 3), states.r_family(0.2, 0.5), states.p_family(0.3, 0.4),
                states.beta_family(0.3), states.delta_family(0.7), states.random_x_state(4),
                states.random_classical_classical(3)):
        assert linalg.validate_density_matrix(rho.matrix).accepted


# ---------------------------------------------------------------- random states

def test_random_state_rank_one_is_pure():
    for seed in range(20):
        ev = np.linalg.eigvalsh(states.random_state(seed, rank=1).matrix)
        assert abs(ev.max() - 1) < 1e-10


def test_random_state_full_rank():
    for seed in range(1000):
        assert np.linalg.eigvalsh(states.random_state(seed).matrix).min() > 0


def test_random_state_deterministic():
    assert np.array_equal(states.random_state(42).matrix, states.random_state(42).matrix)
    assert not np.array_equal(states.random_state(42).matrix, states.random_state(43).matrix)


def test_random_state_rank_argument():
    with pytest.raises(ValueError):
        states.random_state(0, rank=5)
    for r in (1, 2, 3):
        ev = np.linalg.eigvalsh(states.random_state(9, rank=r).matrix)
        assert np.sum(ev > 1e-10) == r


def test_random_state_hilbert_schmidt_moment():
    # Under the Hilbert-Schmidt measure on 4 x 4 states, E[Tr rho^2] = 8/17.
    purity = np.mean([np.trace(states.random_state(s).matrix @ states.random_state(s).matrix).real
                      for s in range(4000)])
    assert purity == pytest.approx(8 / 17, abs=0.01)


def test_random_x_state_is_x_shaped():
    for s in range(20):
        assert states.is_x_shaped(states.random_x_state(s).matrix)


def test_state_is_read_only():
    rho = states.werner(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


# ---------------------------------------------------------------- Bloch normal form

def _offdiag(t):
    return np.max(np.abs(t - np.diag(np.diag(t))))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_normal_form_invariants(seed):
    rho = states.random_state(seed).matrix
    form = states.bloch_normal_form(rho)
    u = np.kron(form.u_a, form.u_b)
    rotated = u @ rho @ u.conj().T
    assert np.max(np.abs(form.matrix() - rotated)) < 1e-9
    _, _, t = linalg.correlation_data(rotated)
    assert _offdiag(t) < 1e-9
    assert np.linalg.norm(form.a) <= 1 + 1e-10 and np.linalg.norm(form.b) <= 1 + 1e-10
    for rot in (form.rot_a, form.rot_b):
        assert abs(np.linalg.det(rot) - 1) < 1e-12


def test_normal_form_werner():
    f = 0.6
    form = states.bloch_normal_form(states.werner(f))
    assert np.max(np.abs(form.a)) < 1e-12 and np.max(np.abs(form.b)) < 1e-12
    # T = diag(f, -f, f) for phi+; the signed SVD keeps |chi_p| = f
    _, _, t = linalg.correlation_data(states.werner(f).matrix)
    np.testing.assert_allclose(np.diag(t), [f, -f, f], atol=1e-14)
    np.testing.assert_allclose(np.abs(form.chi), [f, f, f], atol=1e-12)
    assert np.prod(form.chi) == pytest.approx(np.linalg.det(t), abs=1e-12)


def test_normal_form_product_state():
    ra = np.array([[0.8, 0.2], [0.2, 0.2]])
    rb = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    rho = linalg.tensor(ra, rb)
    a, b, t = linalg.correlation_data(rho)
    np.testing.assert_allclose(t, np.outer(a, b), atol=1e-14)
    form = states.bloch_normal_form(rho)
    assert np.sum(np.abs(form.chi) > 1e-12) <= 1
    assert abs(abs(form.chi[0]) - np.linalg.norm(a) * np.linalg.norm(b)) < 1e-12


def test_normal_form_maximally_mixed():
    form = states.bloch_normal_form(np.eye(4) / 4)
    for v in (form.a, form.b, form.chi):
        assert np.max(np.abs(v)) < 1e-15


def test_su2_lift_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        rot = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        if np.linalg.det(rot) < 0:
            rot[:, 0] *= -1
        u = states.su2_from_rotation(rot)
        n = rng.normal(size=3)
        lhs = u @ sum(c * s for c, s in zip(n, linalg.PAULIS)) @ u.conj().T
        rhs = sum(c * s for c, s in zip(rot @ n, linalg.PAULIS))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


# ---------------------------------------------------------------- JSON

def test_json_round_trip(tmp_path):
    rho = states.p_family(0.3, 0.2)
    path = tmp_path / "state.json"
    states.save_state(rho, path)
    back = states.load_state(path)
    assert np.array_equal(back.matrix, rho.matrix)
    assert back.family == "P" and back.params == {"a": 0.3, "b": 0.2}


@pytest.mark.parametrize("text", ["not json", "{}", json.dumps({"entries": [{"re": 1}] * 3})])
def test_json_parse_errors(text):
    with pytest.raises(InvalidState) as info:
        states.state_from_json(text)
    assert info.value.reason == "Parse"


def test_json_validation_error():
    doc = json.loads(states.state_to_json(states.werner(1.0)))
    doc["entries"][0]["re"] = -0.2
    doc["entries"][5]["re"] = 0.7
    with pytest.raises(InvalidState) as info:
        states.state_from_json(json.dumps(doc))
    assert info.value.reason == "NegativeEigenvalue"
