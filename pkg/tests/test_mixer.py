import numpy as np
import pytest
from scipy.linalg import expm

from bqss import measurement as ms
from bqss import mixer as mx
from bqss import qstate as qs

SX = np.array([[0, 1], [1, 0]]) / 2
SY = np.array([[0, -1j], [1j, 0]]) / 2
SZ = np.array([[1, 0], [0, -1]]) / 2


def oracle_hamiltonian(j_z, j_xy):
    # s1+ s2- + s1- s2+ = 2 (sx sx + sy sy)
    return (-2 * j_z * np.kron(SZ, SZ)
            - 2 * j_xy * (np.kron(SX, SX) + np.kron(SY, SY)))


def random_params(rng):
    return mx.CouplingParams(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 3))


class TestQ:
    def test_involution(self):
        q = mx.q_matrix()
        np.testing.assert_allclose(q @ q, np.eye(4), atol=1e-15)
        np.testing.assert_array_equal(q, q.T)

    def test_column(self):
        np.testing.assert_allclose(mx.q_matrix() @ [0, 1, 0, 0], [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0])

    def test_unitary(self):
        q = mx.q_matrix()
        assert np.linalg.norm(q.conj().T @ q - np.eye(4)) < 1e-15


class TestFrequencies:
    def test_hamiltonian_matches_oracle(self, rng):
        for _ in range(20):
            p = random_params(rng)
            np.testing.assert_allclose(mx.hamiltonian(p), oracle_hamiltonian(p.j_z, p.j_xy), atol=1e-15)

    def test_ising_degenerate_pair(self):
        w = mx.omega_frequencies(mx.CouplingParams(1.3, 0.0, 1.0))
        assert w[1] == w[2]
        assert w[0] == w[3]

    def test_eigensolver(self, rng):
        q = mx.q_matrix()
        for _ in range(50):
            p = random_params(rng)
            h = oracle_hamiltonian(p.j_z, p.j_xy)
            w = mx.omega_frequencies(p)
            np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h)), np.sort(w), atol=1e-12)
            # and the ordering follows (|++>, T, S, |-->)
            np.testing.assert_allclose(q @ h @ q, np.diag(w), atol=1e-12)


class TestMix:
    def test_dt_zero(self, rng):
        psi = qs.random_pair_states(rng, 5)
        np.testing.assert_allclose(mx.mix(psi, mx.CouplingParams(0.7, 1.1, 0.0)), psi, atol=1e-15)

    def test_matches_expm(self, rng):
        for _ in range(100):
            p = random_params(rng)
            m = expm(-1j * oracle_hamiltonian(p.j_z, p.j_xy) * p.dt)
            np.testing.assert_allclose(mx.mixing_matrix(p), m, atol=1e-10)

    def test_unitary_and_norm(self, rng):
        p = random_params(rng)
        m = mx.mixing_matrix(p)
        np.testing.assert_allclose(m.conj().T @ m, np.eye(4), atol=1e-12)
        out = mx.mix(qs.random_pair_states(rng, 100), p)
        np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_ising_at_k_pi_stays_unentangled(self, rng, k):
        j = 0.8
        p = mx.CouplingParams(j, 0.0, k * np.pi / j)
        out = mx.mix(qs.random_product_states(rng, 50), p)
        assert np.all(qs.is_unentangled(out, 1e-10))

    def test_generic_entangles(self):
        psi = qs.product(qs.single_state(0.6, 0.0), qs.single_state(0.7, 1.0))
        assert qs.tangle(mx.mix(psi, mx.CouplingParams(0.9, 1.7, 1.3))) > 1e-3

    def test_params_validation(self):
        with pytest.raises(ValueError):
            mx.CouplingParams(1.0, 1.0, -0.1)
        with pytest.raises(ValueError):
            mx.CouplingParams(np.nan, 1.0, 0.1)


class TestMixingParameter:
    def test_zero_coupling(self):
        assert mx.mixing_parameter_v(mx.CouplingParams(1.0, 0.0, 2.0)) == 0.0

    def test_quarter_turn(self):
        # Delta_E = -j_xy dt = pi/2
        assert mx.mixing_parameter_v(mx.CouplingParams(0.0, -1.0, np.pi / 2)) == pytest.approx(1.0)

    def test_sign_flip(self):
        v = mx.mixing_parameter_v(mx.CouplingParams(0.0, -1.0, 3 * np.pi / 4))
        assert v == pytest.approx(-np.sqrt(2) / 2, abs=1e-15)

    def test_range(self, rng):
        vs = [mx.mixing_parameter_v(random_params(rng)) for _ in range(200)]
        assert min(vs) >= -1 and max(vs) <= 1


class TestClosedForm:
    def test_all_plus(self):
        assert mx.closed_form_probs(1.0, 1.0, 0.3, mx.CouplingParams(0.5, 1.2, 0.7)) == (1.0, 0.0, 0.0)

    def test_no_transverse_coupling(self):
        r1, r2 = 0.6, 0.3
        p1, p2, p4 = mx.closed_form_probs(r1, r2, 1.0, mx.CouplingParams(1.0, 0.0, 2.0))
        assert p2 == pytest.approx(r1 ** 2 * (1 - r2 ** 2), abs=1e-15)

    def test_matches_full_evolution(self, rng):
        for _ in range(200):
            r1, r2, d = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 2 * np.pi)
            p = random_params(rng)
            psi = qs.product(qs.single_state(r1, 0.0), qs.single_state(r2, d))
            full = ms.outcome_probabilities(mx.mix(psi, p), "zz")
            p1, p2, p4 = mx.closed_form_probs(r1, r2, d, p)
            np.testing.assert_allclose([p1, p2, p4], full[[0, 1, 3]], atol=1e-12)
            assert -1e-12 <= 1 - p1 - p2 - p4 <= 1 + 1e-12

    def test_flipped_sign_would_disagree(self):
        # the sine term is odd in Delta_E, so a sign error is visible
        p = mx.CouplingParams(0.4, 1.1, 0.9)
        r1, r2, d = 0.7, 0.5, 1.2
        psi = qs.product(qs.single_state(r1, 0.0), qs.single_state(r2, d))
        full = ms.outcome_probabilities(mx.mix(psi, p), "zz")[1]
        flipped = mx.closed_form_probs(r1, r2, d, mx.CouplingParams(0.4, -1.1, 0.9))[1]
        assert abs(full - flipped) > 1e-3

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mx.closed_form_probs(1.2, 0.5, 0.0, mx.CouplingParams(1, 1, 1))


def test_ising_product_gap_invariance(rng):
    psi = qs.random_product_states(rng, 20)
    for t in np.linspace(0, 5, 30):
        q = ms.outcome_probabilities(mx.mix(psi, mx.CouplingParams(1.1, 0.0, t)), "zz")
        assert np.max(np.abs(ms.product_gap(q))) < 1e-12
