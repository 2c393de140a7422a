import numpy as np
import pytest

from tensoramp import (
    BernoulliPrior,
    DivergedError,
    FactorSet,
    GaussianPrior,
    InvalidParameterError,
    Observation,
    TooLargeError,
    add_noise,
    align_components,
    amp_step,
    bp_reference,
    compute_A,
    factor_mse,
    init_state,
    low_rank_tensor,
    make_shape,
    overlap,
    run_amp,
    sample_truth,
)
from tensoramp.tensor_core import DenseTensor

GAUSS = GaussianPrior(0.3, 1.0)


def make_instance(dims, priors, delta, seed_truth, seed_noise, rank=1):
    shape = make_shape(dims)
    truth = sample_truth(shape, priors, rank, seed_truth)
    obs = add_noise(low_rank_tensor(truth), delta, seed_noise)
    return truth, obs


class TestInitState:
    def test_informed_full_blend_copies_truth(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([12, 12, 12], priors, 0.1, 0, 1)
        state = init_state(obs, priors, 1, init_mode="informed", truth=truth,
                           blend=1.0, seed=2)
        for est, ref in zip(state.xhat.factors, truth.factors):
            assert np.array_equal(est, ref)

    def test_uninformed_deterministic_prior_gives_all_ones(self):
        priors = [BernoulliPrior(1.0)] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=3)
        for est in state.xhat.factors:
            assert np.all(est == 1.0)

    def test_uninformed_gaussian_mode_means_near_prior_mean(self):
        priors = [GaussianPrior(0.1, 1.0)] * 3
        dims = [400, 300, 500]
        truth, obs = make_instance(dims, priors, 0.1, 4, 5)
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=6)
        for est, n_alpha in zip(state.xhat.factors, dims):
            assert abs(float(est.mean()) - 0.1) <= 3.0 / np.sqrt(n_alpha)

    def test_first_memory_slot_is_zero(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        state = init_state(obs, priors, 1, seed=7)
        assert state.iteration == 0
        for prev in state.xhat_prev.factors:
            assert np.all(prev == 0.0)

    def test_prior_count_mismatch_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            init_state(obs, [GAUSS] * 2, 1)

    def test_informed_without_truth_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            init_state(obs, priors, 1, init_mode="informed")

    def test_bad_blend_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            init_state(obs, priors, 1, init_mode="informed", truth=truth, blend=1.5)

    def test_unknown_mode_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            init_state(obs, priors, 1, init_mode="oracle")


class TestAmpStep:
    def test_near_noiseless_informed_step_barely_moves(self):
        priors = [GaussianPrior(0.2, 1.0)] * 3
        truth, obs = make_instance([20, 20, 20], priors, 1e-9, 5, 6)
        state = init_state(obs, priors, 1, init_mode="informed", truth=truth,
                           blend=1.0, seed=7)
        stepped = amp_step(state, obs, priors, damping=0.0)
        for new, old in zip(stepped.xhat.factors, state.xhat.factors):
            rel = np.linalg.norm(new - old) / np.linalg.norm(old)
            assert rel < 1e-3

    def test_zero_tensor_zero_mean_prior_keeps_means_near_zero(self):
        priors = [GaussianPrior(0.0, 1.0)] * 3
        shape = make_shape([200, 200, 200])
        obs = Observation(DenseTensor(shape, np.zeros(shape.int_dims())), 0.2)
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=8)
        stepped = amp_step(state, obs, priors)
        for est in stepped.xhat.factors:
            assert abs(float(est.mean())) <= 3.0 / np.sqrt(200)

    def test_heavy_damping_is_exact_convex_combination(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([15, 15, 15], priors, 0.2, 9, 10)
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=11)
        undamped = amp_step(state, obs, priors, damping=0.0)
        damped = amp_step(state, obs, priors, damping=0.99)
        for mixed, old, fresh in zip(damped.xhat.factors, state.xhat.factors,
                                     undamped.xhat.factors):
            expected = 0.99 * old + 0.01 * fresh
            assert np.allclose(mixed, expected, atol=1e-14)
            assert np.max(np.abs(mixed - old)) <= 0.01 * np.max(np.abs(fresh - old)) + 1e-14

    def test_matrix_case_matches_hand_rolled_update(self):
        priors = [GaussianPrior(0.3, 1.0), GaussianPrior(0.1, 2.0)]
        truth, obs = make_instance([12, 18], priors, 0.3, 12, 13)
        shape = obs.tensor.shape
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=14)
        stepped = amp_step(state, obs, priors, damping=0.0, include_onsager=False)

        Y = obs.tensor.values.reshape(12, 18)
        x = [f[:, 0] for f in state.xhat.factors]
        N = shape.N
        for alpha, other in ((0, 1), (1, 0)):
            ksum = Y @ x[other] if alpha == 0 else Y.T @ x[other]
            u = ksum / (obs.delta * np.sqrt(N))
            A = float(x[other] @ x[other]) / (N * obs.delta)
            mu, sig2 = priors[alpha].moments()[0], priors[alpha].variance()
            f = (u + mu / sig2) / (1.0 / sig2 + A)
            assert np.allclose(stepped.xhat.factors[alpha][:, 0], f, atol=1e-13)

    def test_huge_inputs_raise_diverged(self):
        priors = [GAUSS] * 3
        shape = make_shape([8, 8, 8])
        obs = Observation(DenseTensor(shape, np.full((8, 8, 8), 1e200)), 0.1)
        with pytest.raises(DivergedError):
            run_amp(obs, priors, 1, init_mode="uninformed", seed=0)

    def test_shape_mismatch_rejected(self):
        from tensoramp import ShapeMismatchError

        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        truth2, obs2 = make_instance([9, 9, 9], priors, 0.1, 0, 1)
        state = init_state(obs2, priors, 1, seed=2)
        with pytest.raises(ShapeMismatchError):
            amp_step(state, obs, priors)

    def test_bad_damping_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        state = init_state(obs, priors, 1, seed=2)
        with pytest.raises(InvalidParameterError):
            amp_step(state, obs, priors, damping=1.0)


class TestRunAmp:
    def test_easy_regime_informed_recovers(self):
        priors = [GaussianPrior(0.1, 1.0), GaussianPrior(0.1, 1.0),
                  GaussianPrior(0.3, 1.0)]
        truth, obs = make_instance([200, 200, 200], priors, 0.05, 21, 22)
        res = run_amp(obs, priors, 1, init_mode="informed", truth=truth, seed=23)
        assert res.converged
        aligned, _ = align_components(res.factors, truth)
        assert factor_mse(aligned, truth, priors) < 0.5

    def test_vanishing_noise_recovers_nearly_exactly(self):
        priors = [GAUSS] * 2
        truth, obs = make_instance([4000, 4000], priors, 1e-6, 3, 103)
        res = run_amp(obs, priors, 1, init_mode="informed", truth=truth, seed=203)
        assert res.converged
        second_moment = 1.0 + 0.3**2
        for m in overlap(res.factors, truth).scalars():
            assert m / second_moment >= 0.999

    def test_same_seed_reproduces_bitwise(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([30, 30, 30], priors, 0.08, 31, 32)
        res1 = run_amp(obs, priors, 1, init_mode="uninformed", seed=33)
        res2 = run_amp(obs, priors, 1, init_mode="uninformed", seed=33)
        assert res1.iterations == res2.iterations
        assert res1.converged == res2.converged
        for a, b in zip(res1.factors.factors, res2.factors.factors):
            assert np.array_equal(a, b)

    def test_trajectory_starts_at_initial_overlap(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([25, 25, 25], priors, 0.05, 41, 42)
        res = run_amp(obs, priors, 1, init_mode="informed", truth=truth, seed=43)
        assert len(res.overlap_trajectory) == res.iterations + 1
        first = res.overlap_trajectory[0].scalars()
        emp = [float(f[:, 0] @ g[:, 0]) / 25.0 for f, g in
               zip(truth.factors, truth.factors)]
        assert np.allclose(first, emp, atol=1e-12)

    def test_converged_implies_small_final_change(self):
        priors = [GaussianPrior(0.2, 1.0)] * 3
        truth, obs = make_instance([60, 48, 75], priors, 0.05, 71, 72)
        res = run_amp(obs, priors, 1, init_mode="informed", truth=truth,
                      seed=73, tol=1e-8)
        assert res.converged
        assert res.final_delta_x <= 1e-8

    def test_bad_tolerance_rejected(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([10, 10, 10], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            run_amp(obs, priors, 1, tol=0.0)
        with pytest.raises(InvalidParameterError):
            run_amp(obs, priors, 1, max_iter=0)


class TestOverlap:
    def test_self_overlap_of_standard_gaussian_concentrates(self):
        shape = make_shape([10000, 10000, 10000])
        priors = [GaussianPrior(0.0, 1.0)] * 3
        truth = sample_truth(shape, priors, 1, 61)
        M = overlap(truth, truth).scalars()
        assert np.all(np.abs(M - 1.0) <= 0.05)

    def test_zero_estimate_gives_zero_overlap(self):
        shape = make_shape([50, 40, 60])
        priors = [GAUSS] * 3
        truth = sample_truth(shape, priors, 1, 62)
        zeros = FactorSet(shape, [np.zeros((d, 1)) for d in (50, 40, 60)])
        for M in overlap(zeros, truth).M:
            assert np.all(M == 0.0)

    def test_column_permutation_covariance(self):
        shape = make_shape([30, 30, 30])
        priors = [GAUSS] * 3
        truth = sample_truth(shape, priors, 2, 63)
        base = overlap(truth, truth).M
        permuted = FactorSet(shape, [f[:, ::-1].copy() for f in truth.factors])
        swapped = overlap(permuted, truth).M
        for M_perm, M in zip(swapped, base):
            assert np.allclose(M_perm, M[::-1, :], atol=1e-13)

    def test_shape_mismatch_rejected(self):
        from tensoramp import ShapeMismatchError

        priors = [GAUSS] * 3
        a = sample_truth(make_shape([10, 10, 10]), priors, 1, 64)
        b = sample_truth(make_shape([11, 11, 11]), priors, 1, 64)
        with pytest.raises(ShapeMismatchError):
            overlap(a, b)


class TestBpReference:
    def test_matrix_cross_validation_agrees_with_amp(self):
        priors = [BernoulliPrior(0.5)] * 2
        for seed in range(5):
            truth, obs = make_instance([8, 8], priors, 0.1, seed, seed + 50)
            amp = run_amp(obs, priors, 1, init_mode="uninformed", seed=seed + 90)
            bp = bp_reference(obs, priors, 1, iters=80, seed=seed + 90, damping=0.3)
            aligned, _ = align_components(amp.factors, bp)
            for a, b in zip(aligned.factors, bp.factors):
                assert np.max(np.abs(a - b)) <= 0.15

    def test_near_noiseless_informed_recovers_truth(self):
        priors = [BernoulliPrior(0.5)] * 3
        truth, obs = make_instance([30, 30, 30], priors, 1e-9, 7, 8)
        bp = bp_reference(obs, priors, 1, iters=10, seed=9, init="informed",
                          truth=truth)
        for est, ref in zip(bp.factors, truth.factors):
            assert np.max(np.abs(est - ref)) <= 1e-3

    def test_one_sweep_from_prior_means_matches_one_amp_step(self):
        priors = [GAUSS] * 3
        for seed in range(3):
            truth, obs = make_instance([6, 6, 6], priors, 0.2, seed, seed + 30)
            state = init_state(obs, priors, 1, init_mode="mean", seed=1)
            stepped = amp_step(state, obs, priors, damping=0.0)
            bp = bp_reference(obs, priors, 1, iters=1, seed=1, init="mean")
            for a, b in zip(stepped.xhat.factors, bp.factors):
                assert np.max(np.abs(a - b)) <= 6.0 ** (-1.0)

    def test_size_guard_rejects_large_tensors(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([50, 50, 50], priors, 0.1, 0, 1)
        with pytest.raises(TooLargeError):
            bp_reference(obs, priors, 1, iters=1, seed=0)

    def test_informed_without_truth_rejected(self):
        priors = [GAUSS] * 2
        truth, obs = make_instance([8, 8], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            bp_reference(obs, priors, 1, iters=1, seed=0, init="informed")

    def test_unknown_init_rejected(self):
        priors = [GAUSS] * 2
        truth, obs = make_instance([8, 8], priors, 0.1, 0, 1)
        with pytest.raises(InvalidParameterError):
            bp_reference(obs, priors, 1, iters=1, seed=0, init="prior")


class TestAmpInvariants:
    def test_nishimori_self_overlap_matches_truth_overlap(self):
        priors = [GaussianPrior(0.2, 1.0)] * 3
        truth, obs = make_instance([60, 48, 75], priors, 0.05, 71, 72)
        res = run_amp(obs, priors, 1, init_mode="informed", truth=truth, seed=73)
        assert res.converged
        N = obs.tensor.shape.N
        m = overlap(res.factors, truth).scalars()
        dims = (60, 48, 75)
        for alpha in range(3):
            q = float(res.factors.factors[alpha][:, 0] @
                      res.factors.factors[alpha][:, 0]) / dims[alpha]
            q *= dims[alpha] / (obs.tensor.shape.n[alpha] * N)
            assert abs(q - m[alpha]) <= 5.0 / np.sqrt(N)

    def test_reported_precision_matches_direct_recomputation(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([14, 14, 14], priors, 0.2, 81, 82)
        state = init_state(obs, priors, 1, init_mode="uninformed", seed=83)
        stepped = amp_step(state, obs, priors)
        recomputed = compute_A(state.xhat, obs.delta)
        for reported, manual in zip(stepped.A, recomputed):
            assert np.allclose(reported, manual, atol=0.0)
        x = [f[:, 0] for f in state.xhat.factors]
        N = obs.tensor.shape.N
        for alpha in range(3):
            acc = 1.0 / obs.delta
            for beta in range(3):
                if beta != alpha:
                    acc *= float(x[beta] @ x[beta]) / N
            assert np.allclose(stepped.A[alpha][0, 0], acc, atol=1e-13)

    def test_covariances_stay_symmetric_psd(self):
        priors = [GAUSS] * 3
        truth, obs = make_instance([15, 15, 15], priors, 0.2, 91, 92, rank=2)
        state = init_state(obs, priors, 2, init_mode="uninformed", seed=93)
        for _ in range(5):
            state = amp_step(state, obs, priors)
        for sig in state.sigma:
            assert np.max(np.abs(sig - np.swapaxes(sig, 1, 2))) <= 1e-10
            eigvals = np.linalg.eigvalsh(0.5 * (sig + np.swapaxes(sig, 1, 2)))
            assert eigvals.min() >= -1e-10

    def test_easy_regime_runs_beat_their_initialization(self):
        priors = [BernoulliPrior(0.5)] * 3
        wins = 0
        for seed in range(20):
            truth, obs = make_instance([100, 100, 100], priors, 0.0207, seed,
                                       seed + 500)
            state = init_state(obs, priors, 1, init_mode="uninformed",
                               seed=seed + 900)
            init_mse = factor_mse(align_components(state.xhat, truth)[0], truth,
                                  priors)
            res = run_amp(obs, priors, 1, init_mode="uninformed", seed=seed + 900)
            final_mse = factor_mse(align_components(res.factors, truth)[0], truth,
                                   priors)
            wins += final_mse < init_mse
        assert wins >= 19
