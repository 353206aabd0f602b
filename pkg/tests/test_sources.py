import numpy as np
import pytest
from scipy import integrate

from bqss import measurement as ms
from bqss import qstate as qs
from bqss import sources as src

SPHERE = src.DirectionDistribution()


class TestLaws:
    @pytest.mark.parametrize("spec,kind", [("sphere", "sphere"), ("uniform", "uniform"),
                                           ("point:0.3", "point"), ("range:0.1:0.5", "range")])
    def test_parse(self, spec, kind):
        assert src.law_from_spec(spec).kind == kind

    @pytest.mark.parametrize("spec", ["point", "range:1", "gauss:0:1", "uniform:2"])
    def test_parse_errors(self, spec):
        with pytest.raises(ValueError):
            src.law_from_spec(spec)

    def test_support_checked(self):
        with pytest.raises(ValueError):
            src.DirectionDistribution(theta_law=src.Law("point", value=4.0))
        with pytest.raises(ValueError):
            src.DirectionDistribution(phi_law=src.Law("sphere"))

    def test_dependent_needs_joint(self):
        with pytest.raises(ValueError):
            src.DirectionDistribution(independent=False)


class TestSampleSource:
    def test_point_theta_zero(self):
        d = src.DirectionDistribution(theta_law=src.Law("point", value=0.0))
        s = src.sample_sources(d, d, 1000, seed=1)
        np.testing.assert_array_equal(s[:, [0, 2]], 1.0)

    def test_uniform_theta_mean_plus_probability(self):
        oracle, _ = integrate.quad(lambda t: np.cos(t / 2) ** 2 / np.pi, 0, np.pi)
        assert oracle == pytest.approx(0.5, abs=1e-12)
        d = src.DirectionDistribution(theta_law=src.Law("uniform"))
        r = src.sample_sources(d, d, 100_000, seed=2)[:, 0]
        p = r ** 2
        assert abs(p.mean() - oracle) < 3 * p.std() / np.sqrt(p.size)

    def test_sphere_theta_mean_plus_probability(self):
        oracle, _ = integrate.quad(lambda t: np.cos(t / 2) ** 2 * np.sin(t) / 2, 0, np.pi)
        p = src.sample_sources(SPHERE, SPHERE, 100_000, seed=3)[:, 2] ** 2
        assert abs(p.mean() - oracle) < 3 * p.std() / np.sqrt(p.size)

    def test_ranges(self):
        s = src.sample_sources(SPHERE, SPHERE, 10_000, seed=4)
        assert np.all((s[:, [0, 2]] >= 0) & (s[:, [0, 2]] <= 1))
        assert np.all((s[:, [1, 3]] >= 0) & (s[:, [1, 3]] < 2 * np.pi))

    def test_deterministic(self):
        np.testing.assert_array_equal(src.sample_sources(SPHERE, SPHERE, 100, seed=9),
                                      src.sample_sources(SPHERE, SPHERE, 100, seed=9))
        assert src.sample_source(SPHERE, SPHERE, 9) == src.sample_source(SPHERE, SPHERE, 9)

    def test_fix_phi1(self):
        s = src.sample_sources(SPHERE, SPHERE, 100, seed=5, fix_phi1=True)
        np.testing.assert_array_equal(s[:, 1], 0.0)

    def test_joint_law(self):
        d = src.DirectionDistribution(independent=False, joint=lambda rng, n: (np.full(n, np.pi / 2), rng.random(n)))
        s = src.sample_sources(d, d, 50, seed=1)
        np.testing.assert_allclose(s[:, 0], np.cos(np.pi / 4))

    def test_source_pair_validation(self):
        with pytest.raises(ValueError):
            src.SourcePair(1.2, 0.0, 0.5, 0.0)
        with pytest.raises(ValueError):
            src.SourcePair(0.5, 7.0, 0.5, 0.0)


class TestSourceState:
    def test_plus_plus(self):
        np.testing.assert_allclose(src.source_state(src.SourcePair(1.0, 0.3, 1.0, 2.0)), [1, 0, 0, 0])

    def test_zz_quad_at_writing_time(self):
        s = src.sample_sources(SPHERE, SPHERE, 1000, seed=6)
        r1, r2 = s[:, 0], s[:, 2]
        q = ms.outcome_probabilities(src.source_state(s), "zz")
        want = np.column_stack([r1 ** 2 * r2 ** 2, r1 ** 2 * (1 - r2 ** 2),
                                (1 - r1 ** 2) * r2 ** 2, (1 - r1 ** 2) * (1 - r2 ** 2)])
        np.testing.assert_allclose(q, want, atol=1e-12)

    def test_unentangled(self):
        states = src.source_state(src.sample_sources(SPHERE, SPHERE, 5000, seed=7))
        assert np.all(qs.is_unentangled(states, 1e-12))

    def test_factorize_recovers_parameters(self, rng):
        for _ in range(50):
            pair = src.SourcePair(rng.uniform(0.05, 0.95), rng.uniform(0, 6.28), rng.uniform(0.05, 0.95),
                                  rng.uniform(0, 6.28))
            s1, s2 = qs.factorize(src.source_state(pair))
            for s, r, phi in ((s1, pair.r1, pair.phi1), (s2, pair.r2, pair.phi2)):
                s = s * np.exp(-1j * np.angle(s[0]))  # gauge: real |+> amplitude
                assert s[0].real == pytest.approx(r, abs=1e-12)
                assert np.angle(s[1] * np.exp(-1j * phi)) == pytest.approx(0.0, abs=1e-10)

    def test_bounded_sampler(self, rng):
        states = src.bounded_source_sampler()(rng, 500)
        assert np.all(np.abs(states[:, 1] * states[:, 2]) > 0.2 ** 2 * (1 - 0.98 ** 2) * 0.99)
        assert np.all(qs.is_unentangled(states, 1e-12))
        with pytest.raises(ValueError):
            src.bounded_source_sampler(0.9, 0.1)


class TestIndependence:
    def test_independent_generators(self):
        s = src.sample_sources(SPHERE, SPHERE, 100_000, seed=8)
        stats = src.independence_stats(s)
        for pair, c in stats.cross_pairs().items():
            assert abs(c) < 3 * stats.stderr, pair

    def test_shared_theta(self):
        s = src.sample_sources(SPHERE, SPHERE, 10_000, seed=8, share_theta=True)
        assert src.independence_stats(s).pair("r1", "r2") == pytest.approx(1.0, abs=1e-12)

    def test_constant_phi_flagged(self):
        d = src.DirectionDistribution(phi_law=src.Law("point", value=1.0))
        stats = src.independence_stats(src.sample_sources(d, d, 1000, seed=1))
        assert stats.zero_variance == ("phi1", "phi2")
        assert np.isnan(stats.pair("phi1", "r2"))

    def test_too_few(self):
        with pytest.raises(ValueError):
            src.independence_stats(np.zeros((50, 4)))

    def test_accepts_source_pairs(self):
        pairs = [src.sample_source(SPHERE, SPHERE, k) for k in range(150)]
        assert src.independence_stats(pairs).n == 150


class TestEnsembleDensity:
    def test_all_plus(self):
        np.testing.assert_array_equal(src.ensemble_density(np.tile(qs.KET_PLUS, (10, 1))), np.diag([1, 0]))

    def test_equal_mix(self):
        f = np.vstack([np.tile(qs.KET_PLUS, (5, 1)), np.tile(qs.KET_MINUS, (5, 1))])
        np.testing.assert_allclose(src.ensemble_density(f), np.diag([0.5, 0.5]))

    def test_two_path_sz(self, rng):
        f = qs.random_single_states(rng, 1000)
        sz = np.diag([0.5, -0.5])
        direct = np.mean([np.real(np.conj(x) @ sz @ x) for x in f])
        assert direct == pytest.approx(np.real(np.trace(src.ensemble_density(f) @ sz)), abs=1e-12)

    def test_valid_density(self, rng):
        rho = src.ensemble_density(qs.random_single_states(rng, 300))
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_empty(self):
        with pytest.raises(ValueError):
            src.ensemble_density(np.zeros((0, 2)))
