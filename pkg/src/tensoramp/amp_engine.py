"""Approximate message passing for low-rank tensor recovery.

One iteration computes, for every mode alpha:

    u_alpha   = mttkrp(Y, xhat, alpha) / (delta * N^{(p-1)/2})
                - xhat_prev_alpha @ B_alpha'
    B_alpha   = (1/delta) * sum_{beta != alpha} Sigma_beta (*)
                prod_{gamma not in {alpha, beta}} D_gamma
    A_alpha   = (1/delta) * prod_{beta != alpha} (X_beta' X_beta / N)

where (*) is the elementwise product, Sigma_beta is the mode-summed
posterior covariance, and D_gamma correlates the current and previous
estimates; the B term is the memory (reaction) correction that removes a
node's own reflected influence from its incoming field. New estimates are
damped convex combinations of the old ones and the tilted posterior
statistics f(A, u), df/du.

Every mode sum is normalized by the geometric-mean size N while running
over the true mode range, which keeps the field calibrated (mean A x0,
covariance A) for arbitrary aspect ratios. The alternative normalization by
each mode's own size (with the compensating n_alpha data prefactor) is kept
behind ``mode_sum_scaling="per_mode"`` for side-by-side comparison.

``bp_reference`` runs the underlying directed-message algorithm (one
message per tensor entry and mode, no mean-field collapse) as a small-size
validation oracle.
"""
import numpy as np

from .errors import (
    DivergedError,
    InvalidParameterError,
    ShapeMismatchError,
    TooLargeError,
)
from .state_evolution import OverlapSet
from .tensor_core import FactorSet, mttkrp_exclude

_SCALINGS = ("geometric", "per_mode")


class AmpState:
    """Everything one iteration needs from the previous one."""

    def __init__(self, xhat, xhat_prev, sigma, A, iteration):
        self.xhat = xhat
        self.xhat_prev = xhat_prev
        self.sigma = sigma
        self.A = A
        self.iteration = iteration


class AmpResult:
    """Final factors plus convergence bookkeeping; sigma is None for solvers
    that do not carry covariances (the least-squares baseline reuses this)."""

    def __init__(self, factors, sigma, overlap_trajectory, iterations, converged,
                 final_delta_x):
        self.factors = factors
        self.sigma = sigma
        self.overlap_trajectory = overlap_trajectory
        self.iterations = iterations
        self.converged = converged
        self.final_delta_x = final_delta_x


def _mode_norms(shape, scaling):
    if scaling not in _SCALINGS:
        raise InvalidParameterError("unknown mode_sum_scaling %r" % scaling)
    if scaling == "geometric":
        return [1.0 / shape.N] * shape.p
    return [1.0 / d for d in shape.dims]


def _data_prefactor(shape, delta, mode, scaling):
    base = shape.scale() / delta
    if scaling == "per_mode":
        return base * shape.n[mode]
    return base


def compute_A(xhat, delta, scaling="geometric"):
    """Per-mode precision matrices from the current estimates."""
    shape = xhat.shape
    norms = _mode_norms(shape, scaling)
    grams = [norms[b] * (xhat.factors[b].T @ xhat.factors[b]) for b in range(shape.p)]
    out = []
    for alpha in range(shape.p):
        acc = np.ones((xhat.rank, xhat.rank)) / delta
        for beta in range(shape.p):
            if beta != alpha:
                acc = acc * grams[beta]
        out.append(acc)
    return out


def init_state(obs, priors, rank, init_mode="uninformed", truth=None, blend=1.0,
               seed=0, mode_sum_scaling="geometric"):
    """Initial estimates, covariances, and precisions.

    init_mode: "uninformed" draws from the priors, "informed" blends the
    supplied truth with a prior draw, "mean" replicates each prior mean
    (useful for expansion checks against the directed-message reference).
    The previous estimate starts at zero so the first memory term vanishes.
    """
    shape = obs.tensor.shape
    dims = shape.int_dims()
    if len(priors) != shape.p:
        raise InvalidParameterError("need one prior per mode")
    rng = np.random.default_rng(seed)
    factors = []
    for alpha, prior in enumerate(priors):
        draw = prior.sample(dims[alpha], rank, rng)
        if init_mode == "uninformed":
            factors.append(draw)
        elif init_mode == "informed":
            if truth is None:
                raise InvalidParameterError("informed init requires truth")
            if not (0.0 <= blend <= 1.0):
                raise InvalidParameterError("blend must be in [0, 1]")
            factors.append(blend * truth.factors[alpha] + (1.0 - blend) * draw)
        elif init_mode == "mean":
            factors.append(np.full((dims[alpha], rank), prior.moments()[0]))
        else:
            raise InvalidParameterError("unknown init mode %r" % init_mode)
    xhat = FactorSet(shape, factors)
    sigma = [
        np.broadcast_to(prior.variance() * np.eye(rank), (dims[a], rank, rank)).copy()
        for a, prior in enumerate(priors)
    ]
    zeros = FactorSet(shape, [np.zeros((d, rank)) for d in dims])
    A = compute_A(xhat, obs.delta, mode_sum_scaling)
    return AmpState(xhat, zeros, sigma, A, 0)


def amp_step(state, obs, priors, damping=0.3, mode_sum_scaling="geometric",
             include_onsager=True):
    """One synchronous iteration over all modes."""
    shape = obs.tensor.shape
    if state.xhat.shape != shape:
        raise ShapeMismatchError("state and observation shapes differ")
    if not (0.0 <= damping < 1.0):
        raise InvalidParameterError("damping must be in [0, 1)")
    p = shape.p
    rank = state.xhat.rank
    delta = obs.delta
    norms = _mode_norms(shape, mode_sum_scaling)

    # Overflow in a diverging run produces inf/nan that the guards below
    # convert into a typed error; the intermediate warnings are noise.
    with np.errstate(over="ignore", invalid="ignore"):
        sigma_sums = [norms[b] * state.sigma[b].sum(axis=0) for b in range(p)]
        lag = [
            norms[b] * (state.xhat.factors[b].T @ state.xhat_prev.factors[b])
            for b in range(p)
        ]
        A = compute_A(state.xhat, delta, mode_sum_scaling)

        fields = []
        for alpha in range(p):
            u = _data_prefactor(shape, delta, alpha, mode_sum_scaling) * mttkrp_exclude(
                obs.tensor, state.xhat, alpha
            )
            if include_onsager:
                B = np.zeros((rank, rank))
                for beta in range(p):
                    if beta == alpha:
                        continue
                    term = sigma_sums[beta].copy()
                    for gamma in range(p):
                        if gamma != alpha and gamma != beta:
                            term = term * lag[gamma]
                    B += term
                u = u - state.xhat_prev.factors[alpha] @ (B.T / delta)
            fields.append(u)

        new_factors = []
        new_sigma = []
        for alpha, prior in enumerate(priors):
            if not (np.all(np.isfinite(A[alpha])) and np.all(np.isfinite(fields[alpha]))):
                raise DivergedError("non-finite fields at iteration %d" % (state.iteration + 1))
            f, cov = prior.mean_cov_nodes(A[alpha], fields[alpha])
            new_factors.append(damping * state.xhat.factors[alpha] + (1.0 - damping) * f)
            new_sigma.append(damping * state.sigma[alpha] + (1.0 - damping) * cov)
            if not np.all(np.isfinite(new_factors[-1])):
                raise DivergedError("non-finite estimates at iteration %d" % (state.iteration + 1))
    xhat_new = FactorSet(shape, new_factors)
    return AmpState(xhat_new, state.xhat, new_sigma, A, state.iteration + 1)


def _relative_change(new, old):
    out = 0.0
    for f_new, f_old in zip(new.factors, old.factors):
        num = float(np.linalg.norm(f_new - f_old))
        den = float(np.linalg.norm(f_old)) + 1e-12
        out = max(out, num / den)
    return out


def run_amp(obs, priors, rank, init_mode="uninformed", damping=0.3, tol=1e-8,
            max_iter=500, seed=0, truth=None, blend=1.0,
            mode_sum_scaling="geometric"):
    """Iterate to convergence (max relative factor change <= tol).

    When the truth is supplied, per-iteration overlaps with it are recorded,
    starting with the initial state.
    """
    if tol <= 0 or max_iter < 1:
        raise InvalidParameterError("need tol > 0 and max_iter >= 1")
    state = init_state(obs, priors, rank, init_mode, truth, blend, seed,
                       mode_sum_scaling)
    trajectory = [] if truth is None else [overlap(state.xhat, truth)]
    converged = False
    delta_x = np.inf
    for _ in range(int(max_iter)):
        new_state = amp_step(state, obs, priors, damping, mode_sum_scaling)
        delta_x = _relative_change(new_state.xhat, state.xhat)
        state = new_state
        if truth is not None:
            trajectory.append(overlap(state.xhat, truth))
        if delta_x <= tol:
            converged = True
            break
    return AmpResult(state.xhat, state.sigma, trajectory or None, state.iteration,
                     converged, delta_x)


def overlap(est, truth):
    """Per-mode overlap matrices M_alpha = (1/N_alpha) sum_i est_i truth_i'."""
    if est.shape != truth.shape or est.rank != truth.rank:
        raise ShapeMismatchError("factor sets are not comparable")
    dims = est.shape.int_dims()
    M = [
        est.factors[a].T @ truth.factors[a] / dims[a]
        for a in range(est.shape.p)
    ]
    return OverlapSet(est.shape, est.rank, M)


def self_overlap(est):
    """Per-mode (1/N_alpha) sum_i est_i est_i', the self-consistency statistic."""
    dims = est.shape.int_dims()
    M = [est.factors[a].T @ est.factors[a] / dims[a] for a in range(est.shape.p)]
    return OverlapSet(est.shape, est.rank, M)


def _edge_mean_var(prior, A_edges, U_edges):
    """Per-edge tilted statistics; vectorized at rank 1, loop otherwise."""
    m, r = U_edges.shape
    if r == 1:
        f, v = prior.mean_var_scalar(A_edges[:, 0, 0], U_edges[:, 0])
        return f[:, None], v[:, None, None]
    means = np.empty((m, r))
    covs = np.empty((m, r, r))
    for e in range(m):
        f, c = prior.mean_cov_nodes(A_edges[e], U_edges[e][None, :])
        means[e] = f[0]
        covs[e] = c[0]
    return means, covs


def _floor_psd(mats):
    """Clip batched symmetric matrices to the positive semidefinite cone.

    The per-edge curvature estimates are sums of fluctuating entry terms and
    can dip below zero on small problems, which would make the tilted
    covariance undefined. Priors contribute strictly positive curvature of
    their own, so flooring the data-side precision at zero keeps every tilt
    proper without biasing well-conditioned cases.
    """
    if mats.shape[-1] == 1:
        return np.maximum(mats, 0.0)
    sym = 0.5 * (mats + np.swapaxes(mats, -1, -2))
    vals, vecs = np.linalg.eigh(sym)
    vals = np.maximum(vals, 0.0)
    return np.einsum("...ij,...j,...kj->...ik", vecs, vals, vecs)


def bp_reference(obs, priors, rank, iters, seed, init="sample", damping=0.0,
                 truth=None):
    """Directed-message passing on the full factor graph (validation oracle).

    Keeps one message per (tensor entry, mode) pair, so cost and memory are
    O(p * number of entries); a hard guard rejects tensors above 1e5
    entries. Returns the final node-marginal factor estimates. init picks
    the starting messages: "sample" draws from the priors, "mean" uses the
    prior means, "informed" copies the supplied truth factors.
    """
    shape = obs.tensor.shape
    if shape.size > 100000:
        raise TooLargeError("directed messages need <= 1e5 entries, got %d" % shape.size)
    dims = shape.int_dims()
    p = shape.p
    delta = obs.delta
    eps = shape.scale()
    Y = obs.tensor.values
    S = Y / delta
    R = S**2 - 1.0 / delta
    idx = np.unravel_index(np.arange(shape.size), dims)

    rng = np.random.default_rng(seed)
    msg_m = []
    msg_c = []
    for alpha, prior in enumerate(priors):
        if init == "sample":
            node_vals = prior.sample(dims[alpha], rank, rng)
        elif init == "mean":
            node_vals = np.full((dims[alpha], rank), prior.moments()[0])
        elif init == "informed":
            if truth is None:
                raise InvalidParameterError("informed init needs truth factors")
            node_vals = np.asarray(truth.factors[alpha], dtype=float)
        else:
            raise InvalidParameterError("unknown init %r" % init)
        msg_m.append(node_vals[idx[alpha]])
        # Message variances: sampled starts carry full prior uncertainty,
        # point-estimate starts none, and informed starts posterior-scale
        # confidence (prior-scale variances there would invalidate the
        # second-order tilt at small delta).
        if init == "sample":
            scale = prior.variance()
        elif init == "mean":
            scale = 0.0
        else:
            scale = min(prior.variance(), delta)
        var = scale * np.eye(rank)
        msg_c.append(np.broadcast_to(var, (shape.size, rank, rank)).copy())

    def straight_stats(alpha):
        """theta and Theta toward mode alpha, per entry."""
        theta = np.ones((shape.size, rank))
        Theta = np.ones((shape.size, rank, rank))
        for beta in range(p):
            if beta == alpha:
                continue
            theta = theta * msg_m[beta]
            outer = msg_c[beta] + msg_m[beta][:, :, None] * msg_m[beta][:, None, :]
            Theta = Theta * outer
        return theta, Theta

    def node_sums(alpha, theta, Theta):
        """Sums over all entries incident to each node of mode alpha."""
        su = np.zeros((dims[alpha], rank))
        sa = np.zeros((dims[alpha], rank, rank))
        contrib_u = S[:, None] * theta
        contrib_a = (
            S[:, None, None] ** 2 * theta[:, :, None] * theta[:, None, :]
            - R[:, None, None] * Theta
        )
        for rho in range(rank):
            su[:, rho] = np.bincount(idx[alpha], weights=contrib_u[:, rho],
                                     minlength=dims[alpha])
            for rho2 in range(rank):
                sa[:, rho, rho2] = np.bincount(
                    idx[alpha], weights=contrib_a[:, rho, rho2], minlength=dims[alpha]
                )
        return su, sa, contrib_u, contrib_a

    # The node marginals reuse the sums accumulated in the last sweep, so the
    # estimate after k sweeps corresponds to k applications of the update.
    full_sums = [node_sums(alpha, *straight_stats(alpha))[:2]
                 for alpha in range(p)]
    for _ in range(int(iters)):
        new_m = []
        new_c = []
        for alpha, prior in enumerate(priors):
            theta, Theta = straight_stats(alpha)
            su, sa, contrib_u, contrib_a = node_sums(alpha, theta, Theta)
            full_sums[alpha] = (su, sa)
            u_edge = eps * (su[idx[alpha]] - contrib_u)
            A_edge = _floor_psd(eps**2 * (sa[idx[alpha]] - contrib_a))
            f, cov = _edge_mean_var(prior, A_edge, u_edge)
            new_m.append(damping * msg_m[alpha] + (1.0 - damping) * f)
            new_c.append(damping * msg_c[alpha] + (1.0 - damping) * cov)
        msg_m, msg_c = new_m, new_c
        for m in msg_m:
            if not np.all(np.isfinite(m)):
                raise DivergedError("directed messages diverged")

    factors = []
    for alpha, prior in enumerate(priors):
        su, sa = full_sums[alpha]
        node_f, _ = _edge_mean_var(prior, _floor_psd(eps**2 * sa), eps * su)
        factors.append(node_f)
    return FactorSet(shape, factors)
