"""Deterministic overlap recursion predicting message-passing performance.

The state is one r x r overlap matrix per mode,

    M_alpha = (1/N_alpha) * sum_i xhat_i x0_i'

and one step maps it through the effective scalar channel: with

    Mbar_alpha = (1/delta) * hadamard-prod_{beta != alpha} (n_beta M_beta)

the new overlap is E[ f(Mbar, Mbar x0 + sqrt(Mbar) z) x0' ] over the prior
and a standard normal z, where f is the tilted posterior mean from
``priors``. For all-Gaussian rank-1 modes the expectation has a closed
form; otherwise it is evaluated by Gauss-Hermite quadrature (rank 1) or
Monte Carlo (rank > 1).
"""
import math

import numpy as np

from .errors import InvalidParameterError, NumericDomainError, UnsupportedPriorError
from .priors import GaussianPrior

_HERMITE_CACHE = {}


def _gauss_hermite(k):
    """Nodes/weights for E_{z ~ N(0,1)}[g(z)] = sum w_i g(x_i)."""
    if k not in _HERMITE_CACHE:
        t, w = np.polynomial.hermite.hermgauss(k)
        _HERMITE_CACHE[k] = (math.sqrt(2.0) * t, w / math.sqrt(math.pi))
    return _HERMITE_CACHE[k]


class OverlapSet:
    """Per-mode r x r overlap matrices; the order parameter of the recursion."""

    def __init__(self, shape, rank, M):
        M = [np.atleast_2d(np.array(m, dtype=np.float64)) for m in M]
        if len(M) != shape.p:
            raise InvalidParameterError("need one overlap matrix per mode")
        for m in M:
            if m.shape != (rank, rank):
                raise InvalidParameterError("overlap matrices must be rank x rank")
        self.shape = shape
        self.rank = rank
        self.M = M

    @classmethod
    def from_scalars(cls, shape, values):
        return cls(shape, 1, [np.array([[float(v)]]) for v in values])

    def scalars(self):
        """Per-mode scalar overlaps (rank-1 only)."""
        if self.rank != 1:
            raise InvalidParameterError("scalars() requires rank 1")
        return np.array([m[0, 0] for m in self.M])

    def copy(self):
        return OverlapSet(self.shape, self.rank, [m.copy() for m in self.M])

    def max_abs_diff(self, other):
        return max(
            float(np.max(np.abs(a - b))) for a, b in zip(self.M, other.M)
        )

    def __repr__(self):
        if self.rank == 1:
            return "OverlapSet(%s)" % np.array2string(self.scalars(), precision=6)
        return "OverlapSet(rank=%d, p=%d)" % (self.rank, self.shape.p)


class SeParams:
    """Inputs of the recursion: priors, shape, noise, rank, quadrature order."""

    def __init__(self, priors, shape, delta, rank=1, quadrature=41,
                 mc_samples=20000, mc_seed=0):
        if not (delta > 0):
            raise InvalidParameterError("delta must be positive")
        if quadrature < 3:
            raise InvalidParameterError("quadrature order must be >= 3")
        if len(priors) != shape.p:
            raise InvalidParameterError("need one prior per mode")
        self.priors = list(priors)
        self.shape = shape
        self.delta = float(delta)
        self.rank = int(rank)
        self.quadrature = int(quadrature)
        self.mc_samples = int(mc_samples)
        self.mc_seed = mc_seed


def mbar(M, params, mode):
    """Effective channel precision for one mode.

    Elementwise product over the other modes of (n_beta * M_beta), divided
    by delta. Equivalently (1/(n_mode * delta)) * prod M_beta, since the
    ratios multiply to 1.
    """
    out = np.ones((M.rank, M.rank)) / params.delta
    for beta in range(M.shape.p):
        if beta != mode:
            out = out * (params.shape.n[beta] * M.M[beta])
    return out


def se_step_gaussian(m, params):
    """Closed-form step for all-Gaussian rank-1 modes.

    m is the per-mode vector of scalar overlaps; returns the updated vector
    (mu^2/sigma^2 + (sigma^2 + mu^2) mbar) / (1/sigma^2 + mbar) per mode.
    """
    for prior in params.priors:
        if prior.kind != "gaussian":
            raise UnsupportedPriorError("closed form requires Gaussian priors")
    m = np.asarray(m, dtype=np.float64)
    M = OverlapSet.from_scalars(params.shape, m)
    out = np.empty(params.shape.p)
    for alpha, prior in enumerate(params.priors):
        mb = mbar(M, params, alpha)[0, 0]
        mu, s2 = prior.mu, prior.sigma2
        out[alpha] = (mu**2 / s2 + (s2 + mu**2) * mb) / (1.0 / s2 + mb)
    return out


def _step_scalar_generic(M, params):
    nodes, weights = _gauss_hermite(params.quadrature)
    out = []
    for alpha, prior in enumerate(params.priors):
        mb = float(mbar(M, params, alpha)[0, 0])
        if mb == 0.0:
            mean = prior.moments()[0]
            out.append(mean * mean)
            continue
        if mb < 0.0:
            raise NumericDomainError("negative effective precision %g" % mb)
        sq = math.sqrt(mb)
        if prior.kind == "bernoulli":
            u = mb + sq * nodes
            f, _ = prior.mean_var_scalar(mb, u)
            out.append(prior.rho * float(np.dot(weights, f)))
            continue
        # Gaussian component of x0 (possibly rho-weighted for the mixture);
        # the atom at zero contributes nothing to E[f * x0].
        mu, s2 = prior.mu, prior.sigma2
        weight = 1.0 if prior.kind == "gaussian" else prior.rho
        x0 = mu + math.sqrt(s2) * nodes
        u = mb * x0[:, None] + sq * nodes[None, :]
        f, _ = prior.mean_var_scalar(mb, u)
        inner = f @ weights
        out.append(weight * float(np.dot(weights, x0 * inner)))
    return OverlapSet.from_scalars(params.shape, out)


def _psd_sqrt(mat):
    vals, vecs = np.linalg.eigh(mat)
    vals = np.where(vals < 1e-14, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _step_matrix_mc(M, params):
    rng = np.random.default_rng(params.mc_seed)
    r = M.rank
    out = []
    for alpha, prior in enumerate(params.priors):
        mb = mbar(M, params, alpha)
        mb = (mb + mb.T) / 2.0
        root = _psd_sqrt(mb)
        n = params.mc_samples
        x0 = prior.sample(n, r, rng)
        z = rng.standard_normal((n, r))
        U = x0 @ mb.T + z @ root.T
        f, _ = prior.mean_cov_nodes(mb, U)
        out.append(f.T @ x0 / n)
    return OverlapSet(M.shape, r, out)


def se_step_generic(M, params):
    """One step of the full recursion (quadrature / Monte-Carlo evaluation)."""
    if M.rank == 1:
        return _step_scalar_generic(M, params)
    return _step_matrix_mc(M, params)


class SeResult:
    """Fixed point, the visited trajectory, and convergence bookkeeping."""

    def __init__(self, overlaps, trajectory, converged, iterations):
        self.overlaps = overlaps
        self.trajectory = trajectory
        self.converged = converged
        self.iterations = iterations


def se_fixed_point(init, params, tol=1e-10, max_iter=10000):
    """Iterate the recursion to a fixed point.

    Uses the Gaussian closed form when every mode is Gaussian at rank 1,
    the generic step otherwise. The trajectory records the states visited
    before convergence was detected (so an exact fixed point gives a
    length-1 trajectory). Hitting max_iter sets converged=False rather than
    raising.
    """
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    gaussian_path = init.rank == 1 and all(
        isinstance(p, GaussianPrior) for p in params.priors
    )
    M = init
    trajectory = [M]
    for it in range(1, int(max_iter) + 1):
        if gaussian_path:
            M_new = OverlapSet.from_scalars(
                params.shape, se_step_gaussian(M.scalars(), params)
            )
        else:
            M_new = se_step_generic(M, params)
        if M_new.max_abs_diff(M) <= tol:
            return SeResult(M_new, trajectory, True, it)
        trajectory.append(M_new)
        M = M_new
    return SeResult(M, trajectory, False, int(max_iter))


def mse_from_overlap(M, priors):
    """Average per-mode inference error implied by the overlaps (rank 1).

    Per mode: (second moment - m) / variance, which is 0 at perfect
    recovery (m = second moment) and 1 for the prior-mean estimator
    (m = mean^2). Degenerate zero-variance modes contribute their raw gap.
    """
    m = M.scalars()
    total = 0.0
    for alpha, prior in enumerate(priors):
        mean, second = prior.moments()
        var = second - mean**2
        gap = second - m[alpha]
        total += gap / var if var > 1e-12 else gap
    return total / len(priors)


def informed_overlaps(params):
    """Perfect-overlap start: M = E[x0 x0'] per mode."""
    r = params.rank
    out = []
    for prior in params.priors:
        mean, second = prior.moments()
        if r == 1:
            out.append(np.array([[second]]))
        else:
            out.append(np.full((r, r), mean**2) + (second - mean**2) * np.eye(r))
    return OverlapSet(params.shape, r, out)


def uninformed_overlaps(params, epsilon=1e-8):
    """Prior-sample start: M = mean^2 plus a symmetry-breaking epsilon."""
    r = params.rank
    out = []
    for prior in params.priors:
        mean, _ = prior.moments()
        out.append(np.full((r, r), mean**2) + epsilon * np.eye(r))
    return OverlapSet(params.shape, r, out)
