"""Tests for weight sampling, the finite-width simulator and ensemble estimators."""

import numpy as np
import pytest

from orthostat.config import load_presets
from orthostat.errors import DomainError, EstimationError
from orthostat.montecarlo import (
    MC_TENSORS,
    NTK_COLUMNS,
    EnsembleEstimate,
    EnsembleSums,
    MonteCarloConfig,
    RngStream,
    estimate_tensors,
    forward,
    haar_moment_oracle,
    ntk_forward,
    run_ensemble,
    sample_gaussian,
    sample_orthogonal,
    sample_orthogonal_batch,
    simulate_network,
    standard_error,
    sweep_cw,
)
from orthostat.montecarlo.ensemble import _get_max_workers
from orthostat.recursion import NetworkConfig, run
from orthostat.weingarten import orthogonal_moment


@pytest.fixture(scope="module")
def x0() -> np.ndarray:
    """The bundled x0 input (n = 50)."""
    return load_presets()["x0"]


class TestRngStream:
    """Tests for seeded streams."""

    def test_same_stream_reproduces(self) -> None:
        """Equal (seed, stream) pairs give equal draws."""
        a = RngStream(7, 3).generator().standard_normal(5)
        b = RngStream(7, 3).generator().standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self) -> None:
        """Different stream ids or seeds give different draws."""
        base = RngStream(7, 3).generator().standard_normal(5)
        other = RngStream(7, 3).select_stream(4).generator().standard_normal(5)
        reseeded = RngStream(8, 3).generator().standard_normal(5)
        assert not np.array_equal(base, other)
        assert not np.array_equal(base, reseeded)

    @pytest.mark.parametrize("seed,stream", [(-1, 0), (2**64, 0), (0, -1)])
    def test_invalid(self, seed: int, stream: int) -> None:
        """Seeds are 64-bit unsigned; stream ids are non-negative."""
        with pytest.raises(DomainError):
            RngStream(seed, stream)


class TestErrorBars:
    """Tests for means and standard errors."""

    def test_standard_error(self) -> None:
        """std(ddof=1) / sqrt(n)."""
        assert standard_error([1.0, 2.0, 3.0]) == pytest.approx(1 / np.sqrt(3))

    def test_from_samples(self) -> None:
        """EnsembleEstimate carries mean, error and count."""
        est = EnsembleEstimate.from_samples([2.0, 4.0])
        assert est.mean == 3.0
        assert est.stderr == pytest.approx(1.0)
        assert est.to_dict()["n_samples"] == 2

    def test_too_few_samples(self) -> None:
        """A single sample has no error bar."""
        with pytest.raises(EstimationError):
            standard_error([1.0])
        with pytest.raises(EstimationError):
            EnsembleEstimate.from_samples([])


class TestSampling:
    """Tests for weight matrix draws."""

    @pytest.mark.parametrize("c_w", [1.0, 2.0])
    def test_orthogonal_rows(self, c_w: float) -> None:
        """W W^T = C_W I to machine precision."""
        w = sample_orthogonal(20, c_w, RngStream(1))
        np.testing.assert_allclose(w @ w.T, c_w * np.eye(20), atol=1e-12)

    def test_batch_is_orthogonal(self) -> None:
        """Every matrix of a batch is orthogonal."""
        batch = sample_orthogonal_batch(6, 1.0, 50, RngStream(2))
        assert batch.shape == (50, 6, 6)
        products = batch @ np.swapaxes(batch, -1, -2)
        eye = np.broadcast_to(np.eye(6), products.shape)
        np.testing.assert_allclose(products, eye, atol=1e-12)

    def test_sign_correction_centres_entries(self) -> None:
        """Haar entries have mean zero; uncorrected QR would bias the diagonal."""
        batch = sample_orthogonal_batch(4, 1.0, 4000, RngStream(3))
        diag = batch[:, 0, 0]
        assert abs(diag.mean()) < 5 * diag.std() / np.sqrt(diag.size)

    def test_gaussian_variance(self) -> None:
        """Gaussian entries have variance C_W / n."""
        w = sample_gaussian(200, 2.0, RngStream(4))
        assert w.var() == pytest.approx(2.0 / 200, rel=0.05)

    def test_invalid_arguments(self) -> None:
        """Size, C_W and batch count are validated."""
        with pytest.raises(DomainError):
            sample_orthogonal(1, 1.0, RngStream(0))
        with pytest.raises(DomainError):
            sample_gaussian(5, 0.0, RngStream(0))
        with pytest.raises(DomainError):
            sample_orthogonal_batch(5, 1.0, 0, RngStream(0))

    def test_moment_oracle_matches_formula(self) -> None:
        """Monte-Carlo Haar moments agree with the Weingarten formula."""
        cases = [([1, 1], [1, 1]), ([1] * 4, [1] * 4), ([1] * 4, [1, 1, 2, 2])]
        for rows, cols in cases:
            exact = orthogonal_moment(4, 1.0, rows, cols)
            est = haar_moment_oracle(4, 1.0, rows, cols, 20_000, seed=11)
            assert est.n_samples == 20_000
            assert abs(est.mean - exact) < 5 * est.stderr

    def test_moment_oracle_indices(self) -> None:
        """Indices are 1-based and must fit the matrix."""
        with pytest.raises(DomainError):
            haar_moment_oracle(4, 1.0, [0, 1], [1, 1], 10, seed=0)
        with pytest.raises(DomainError):
            haar_moment_oracle(4, 1.0, [1, 1], [1], 10, seed=0)


class TestNetwork:
    """Tests for the forward pass and the empirical NTK."""

    def test_forward_identity_weights(self) -> None:
        """With identity weights z1 = x and z2 = tanh(x)."""
        x = np.linspace(-1.0, 1.0, 5)
        zs = forward([np.eye(5), np.eye(5)], x)
        np.testing.assert_allclose(zs[0], x)
        np.testing.assert_allclose(zs[1], np.tanh(x))

    def test_forward_shape_mismatch(self) -> None:
        """Weights must chain."""
        with pytest.raises(DomainError):
            forward([np.eye(5), np.eye(4)], np.ones(5))
        with pytest.raises(DomainError):
            forward([], np.ones(5))

    def test_ntk_identity_weights(self) -> None:
        """Layer-1 NTK is a scaled identity; layer 2 follows the update rule."""
        n = 5
        x = np.linspace(-1.0, 1.0, n)
        cfg = NetworkConfig(n=n, depth=2)
        theta1, theta2 = ntk_forward([np.eye(n), np.eye(n)], x, cfg)
        c1 = 1.0 + x @ x / n
        np.testing.assert_allclose(theta1, c1 * np.eye(n))
        s = np.tanh(x)
        d = 1.0 - s * s
        expected = (0.5 + s @ s / n) * np.eye(n) + np.diag(d * d) * c1
        np.testing.assert_allclose(theta2, expected)

    def test_ntk_several_inputs(self) -> None:
        """Diagonal blocks of the multi-input NTK equal the single-input NTK."""
        cfg = NetworkConfig(n=6, depth=3)
        weights = [sample_orthogonal(6, 1.0, RngStream(5, i)) for i in range(3)]
        xs = np.stack([np.linspace(-1, 1, 6), np.linspace(0.5, -0.5, 6)], axis=1)
        multi = ntk_forward(weights, xs, cfg)
        assert multi[-1].shape == (2, 2, 6, 6)
        for a in range(2):
            single = ntk_forward(weights, xs[:, a], cfg)
            np.testing.assert_allclose(multi[-1][a, a], single[-1], atol=1e-12)
        np.testing.assert_allclose(multi[-1][0, 1], multi[-1][1, 0].T, atol=1e-12)

    def test_ntk_width_guard(self) -> None:
        """Very wide NTKs are refused."""
        n = 513
        with pytest.raises(DomainError):
            ntk_forward([np.eye(n)], np.ones(n), NetworkConfig(n=n, depth=1))

    def test_simulate_is_reproducible(self, x0: np.ndarray) -> None:
        """The same stream gives the same network."""
        cfg = NetworkConfig(n=50, depth=3)
        a = simulate_network(x0, cfg, RngStream(9, 2))
        b = simulate_network(x0, cfg, RngStream(9, 2))
        assert a.depth == 3
        assert a.width == 50
        for za, zb in zip(a.z, b.z):
            np.testing.assert_array_equal(za, zb)
        assert simulate_network(x0, cfg, RngStream(9, 2), with_ntk=False).ntk is None


class TestEstimators:
    """Tests for the ensemble estimators."""

    def test_layer_one_orthogonal(self, x0: np.ndarray) -> None:
        """At layer 1, K is exact, D F A B vanish and V4 averages to -2nK^2/(n+2)."""
        n = 50
        cfg = NetworkConfig(n=n, depth=2)
        result = run_ensemble(x0, cfg, MonteCarloConfig(n_net=25, n_stats=8), seed=3)
        K1 = x0 @ x0 / n
        assert result.estimate("K", 1).mean == pytest.approx(K1, rel=1e-12)
        for name in ("D", "F", "A", "B"):
            assert result.estimate(name, 1).mean == pytest.approx(0.0, abs=1e-10), name
        v4 = result.estimate("V4", 1)
        expected = -2 * n * K1**2 / (n + 2)
        assert abs(v4.mean - expected) < 5 * v4.stderr

    def test_exclude_diagonal_layer_one(self, x0: np.ndarray) -> None:
        """Off-diagonal F and B also vanish at layer 1."""
        cfg = NetworkConfig(n=50, depth=1)
        mc = MonteCarloConfig(n_net=4, n_stats=2, exclude_diagonal=True)
        result = run_ensemble(x0, cfg, mc, seed=1)
        assert result.estimate("F", 1).mean == pytest.approx(0.0, abs=1e-10)
        assert result.estimate("B", 1).mean == pytest.approx(0.0, abs=1e-10)

    def test_sums_reject_mismatched_states(self, x0: np.ndarray) -> None:
        """States must match the sums' shape and carry an NTK."""
        cfg = NetworkConfig(n=50, depth=2)
        sums = EnsembleSums(50, 3)
        with pytest.raises(DomainError):
            sums.add(simulate_network(x0, cfg, RngStream(0)))
        with pytest.raises(DomainError):
            EnsembleSums(50, 2).add(
                simulate_network(x0, cfg, RngStream(0), with_ntk=False)
            )
        with pytest.raises(EstimationError):
            EnsembleSums(50, 2).estimates()

    def test_estimate_tensors_matches_driver(self, x0: np.ndarray) -> None:
        """Estimating from explicit states reproduces the driver's streams."""
        cfg = NetworkConfig(n=50, depth=2)
        mc = MonteCarloConfig(n_net=3, n_stats=2)
        ensemble = [
            [
                simulate_network(x0, cfg, RngStream(5, rep * mc.n_net + i))
                for i in range(mc.n_net)
            ]
            for rep in range(mc.n_stats)
        ]
        direct = estimate_tensors(ensemble)
        driven = run_ensemble(x0, cfg, mc, seed=5)
        for name in ("K", "Theta", *MC_TENSORS):
            for ell in (1, 2):
                assert direct[name][ell - 1].mean == pytest.approx(
                    driven.estimate(name, ell).mean, rel=1e-9, abs=1e-12
                )

    def test_estimate_tensors_empty(self) -> None:
        """An empty ensemble cannot be estimated."""
        with pytest.raises(EstimationError):
            estimate_tensors([])

    def test_error_conventions(self, x0: np.ndarray) -> None:
        """'networks' pools K over networks; 'repetitions' uses repetition means."""
        cfg = NetworkConfig(n=50, depth=2)
        pooled = run_ensemble(x0, cfg, MonteCarloConfig(n_net=4, n_stats=3), seed=2)
        reps = run_ensemble(
            x0,
            cfg,
            MonteCarloConfig(n_net=4, n_stats=3, error_convention="repetitions"),
            seed=2,
        )
        assert pooled.estimate("K", 2).n_samples == 12
        assert reps.estimate("K", 2).n_samples == 3
        assert pooled.estimate("K", 2).mean == pytest.approx(reps.estimate("K", 2).mean)
        assert pooled.estimate("V4", 2).n_samples == 3


class TestEnsembleDriver:
    """Tests for the parallel ensemble driver."""

    def test_worker_count_does_not_change_results(self, x0: np.ndarray) -> None:
        """Chunk sums fold in a fixed order, so results are bit-identical."""
        cfg = NetworkConfig(n=50, depth=3)
        mc = MonteCarloConfig(n_net=6, n_stats=2, chunk_size=2)
        one = run_ensemble(x0, cfg, mc, seed=42, max_workers=1)
        three = run_ensemble(x0, cfg, mc, seed=42, max_workers=3)
        assert one.rows() == three.rows()

    def test_rows_layout(self, x0: np.ndarray) -> None:
        """Raw estimates first, then the normalized ones with a _norm suffix."""
        cfg = NetworkConfig(n=50, depth=2)
        result = run_ensemble(x0, cfg, MonteCarloConfig(n_net=2, n_stats=2), seed=0)
        rows = result.rows()
        assert len(rows) == (7 + 5) * 2
        assert rows[0]["tensor"] == "K"
        assert rows[-1]["tensor"] == "B_norm"
        assert {r["seed"] for r in rows} == {0}
        assert result.normalized_estimate("V4", 1).mean == pytest.approx(
            result.estimate("V4", 1).mean / result.estimate("K", 1).mean ** 2
        )
        ntk = result.ntk_rows()
        assert [r["ell"] for r in ntk] == [1, 2]
        assert tuple(ntk[0]) == NTK_COLUMNS
        for r in ntk:
            theta = result.estimate("Theta", r["ell"]).mean
            assert r["diag_mean"] == pytest.approx(theta, rel=1e-9)
            assert 0.0 <= r["offdiag_rms"] < r["diag_mean"]

    def test_input_shape(self, x0: np.ndarray) -> None:
        """The driver takes one vector of length n."""
        cfg = NetworkConfig(n=50, depth=2)
        with pytest.raises(DomainError):
            run_ensemble(x0[:10], cfg, MonteCarloConfig(n_net=2, n_stats=2), seed=0)

    def test_sweep_cw(self, x0: np.ndarray) -> None:
        """One result per C_W; layer-1 K scales with C_W."""
        cfg = NetworkConfig(n=50, depth=1)
        results = sweep_cw([1.0, 2.0], x0, cfg, MonteCarloConfig(n_net=2, n_stats=2), 0)
        assert list(results) == [1.0, 2.0]
        k1 = results[1.0].estimate("K", 1).mean
        assert results[2.0].estimate("K", 1).mean == pytest.approx(2 * k1, rel=1e-12)
        assert results[2.0].network.c_w == 2.0

    @pytest.mark.parametrize(
        "kwargs,error",
        [
            ({"n_net": 1}, EstimationError),
            ({"n_stats": 1}, EstimationError),
            ({"error_convention": "bootstrap"}, DomainError),
            ({"chunk_size": 0}, DomainError),
        ],
    )
    def test_config_validation(self, kwargs: dict, error: type) -> None:
        """Ensemble sizes, convention and chunking are validated."""
        with pytest.raises(error):
            MonteCarloConfig(**kwargs)

    def test_thread_cap_from_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """ORTHOSTAT_THREADS is read and clamped to 1..64."""
        monkeypatch.setenv("ORTHOSTAT_THREADS", "3")
        assert _get_max_workers() == 3
        monkeypatch.setenv("ORTHOSTAT_THREADS", "0")
        assert _get_max_workers() == 1
        monkeypatch.setenv("ORTHOSTAT_THREADS", "1000")
        assert _get_max_workers() == 64
        monkeypatch.delenv("ORTHOSTAT_THREADS")
        assert 1 <= _get_max_workers() <= 4


@pytest.mark.slow
class TestAgainstRecursion:
    """Larger ensembles checked against the recursion and width scaling."""

    def test_kernel_tracks_recursion(self, x0: np.ndarray) -> None:
        """The ensemble kernel is within 1/n-size corrections of the recursion."""
        cfg = NetworkConfig(n=50, depth=5)
        result = run_ensemble(x0, cfg, MonteCarloConfig(n_net=100, n_stats=4), seed=7)
        trajectory = run(x0, cfg)
        for ell in range(1, 6):
            assert result.estimate("K", ell).mean == pytest.approx(
                trajectory.at(ell).K, rel=0.05
            )

    def test_vertex_scales_with_width(self, x0: np.ndarray) -> None:
        """The fourth cumulant V4/(n K^2) halves when the width doubles."""
        mc = MonteCarloConfig(n_net=100, n_stats=4)
        kappa = {}
        for n in (25, 50):
            x = x0[:n]
            result = run_ensemble(x, NetworkConfig(n=n, depth=3), mc, seed=13)
            kappa[n] = result.normalized_estimate("V4", 3).mean / n
        assert kappa[25] / kappa[50] == pytest.approx(2.0, rel=0.3)
