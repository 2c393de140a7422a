"""Alternating least squares CP decomposition, the prior-agnostic baseline.

Each sweep solves the regularized normal equations one mode at a time
(Gauss-Seidel order 1..p), minimizing ||Y - scale * sum_rho (x1 o ... o xp)||^2
in the updated block while the others are held fixed. With ridge = 0 every
sweep is exact block-coordinate descent, so the squared reconstruction error
is non-increasing.
"""
import numpy as np

from .amp_engine import AmpResult, _relative_change
from .errors import InvalidParameterError, ShapeMismatchError, SingularSystemError
from .tensor_core import FactorSet, low_rank_tensor, mttkrp_exclude


class AlsConfig:
    def __init__(self, rank, ridge=1e-10, tol=1e-9, max_iter=200, seed=0):
        if rank < 1:
            raise InvalidParameterError("rank must be >= 1")
        if ridge < 0:
            raise InvalidParameterError("ridge must be nonnegative")
        if tol <= 0 or max_iter < 1:
            raise InvalidParameterError("need tol > 0 and max_iter >= 1")
        self.rank = int(rank)
        self.ridge = float(ridge)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.seed = seed


class AlsResult(AmpResult):
    """AmpResult plus the squared-error trajectory when it was tracked."""

    def __init__(self, factors, iterations, converged, final_delta_x, objective):
        super().__init__(factors, None, None, iterations, converged, final_delta_x)
        self.objective = objective


def reconstruction_error(Y, est):
    """Squared Frobenius error between Y and the scaled reconstruction."""
    w = low_rank_tensor(est)
    return float(((Y.values - w.values) ** 2).sum())


def als_step(Y, est, scale, ridge=0.0):
    """One Gauss-Seidel sweep over all modes; returns the updated factors."""
    if est.shape != Y.shape:
        raise ShapeMismatchError("factor set does not match the tensor")
    rank = est.rank
    factors = [f.copy() for f in est.factors]
    current = FactorSet(est.shape, factors)
    for alpha in range(est.shape.p):
        G = np.ones((rank, rank))
        for beta in range(est.shape.p):
            if beta != alpha:
                G = G * (factors[beta].T @ factors[beta])
        G = G * scale**2 + ridge * np.eye(rank)
        rhs = scale * mttkrp_exclude(Y, current, alpha)
        try:
            factors[alpha] = np.linalg.solve(G, rhs.T).T
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("singular normal equations; "
                                      "increase ridge") from exc
        current = FactorSet(est.shape, factors)
    return current


def run_als(obs, config, track_objective=False):
    """Iterate from standard-normal init until the relative factor change
    drops to tol or max_iter is hit."""
    Y = obs.tensor
    dims = Y.shape.int_dims()
    scale = Y.shape.scale()
    rng = np.random.default_rng(config.seed)
    est = FactorSet(Y.shape, [rng.standard_normal((d, config.rank)) for d in dims])
    objective = [reconstruction_error(Y, est)] if track_objective else None
    converged = False
    delta_x = np.inf
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        new_est = als_step(Y, est, scale, config.ridge)
        delta_x = _relative_change(new_est, est)
        est = new_est
        if track_objective:
            objective.append(reconstruction_error(Y, est))
        if delta_x <= config.tol:
            converged = True
            break
    return AlsResult(est, iterations, converged, delta_x, objective)
