"""Per-mode prior distributions and their tilted posterior functions.

Every prior exposes the mean and covariance of the tilted density

    P(x | A, u)  propto  P(x) * exp(u' x - x' A x / 2)

which is the local channel update of message passing. The convention with
the factor 1/2 in the quadratic term is used throughout the package: under
it the Gaussian closed form is f = (mu/sigma2 + u) / (A + 1/sigma2), and the
analytic recursion in ``state_evolution`` agrees with these functions with
no extra factors.

Three families are implemented:

- gaussian(mu, sigma2)
- bernoulli(rho): atoms at 0 and 1 with P(1) = rho
- gauss_bernoulli(rho, mu, sigma2): a point mass at 0 mixed with a Gaussian

For rank > 1, the Gaussian family supports full matrix-valued A; the
discrete/mixture families are evaluated per component and therefore require
a diagonal A.
"""
import math
import re

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import expit

from .errors import ConfigError, InvalidParameterError, NumericDomainError


class ChannelState:
    """A local message: precision matrix A (r x r, symmetric PSD) and field u."""

    def __init__(self, A, u):
        A = np.atleast_2d(np.array(A, dtype=np.float64))
        u = np.atleast_1d(np.array(u, dtype=np.float64)).reshape(-1)
        if A.shape[0] != A.shape[1] or A.shape[0] != u.size:
            raise InvalidParameterError("A must be r x r and u length r")
        scale = max(1.0, float(np.max(np.abs(A))))
        if np.max(np.abs(A - A.T)) > 1e-12 * scale:
            raise NumericDomainError("A is not symmetric")
        if np.min(np.linalg.eigvalsh(A)) < -1e-10:
            raise NumericDomainError("A is not positive semidefinite")
        self.A = A
        self.u = u

    @property
    def rank(self):
        return self.u.size


class Prior:
    """Common interface; see module docstring for the tilt convention."""

    kind = None

    def moments(self):
        """(mean, second moment) of the untilted prior."""
        raise NotImplementedError

    def variance(self):
        mean, second = self.moments()
        return second - mean**2

    def sample(self, count, rank, rng):
        raise NotImplementedError

    def mean_var_scalar(self, A, u):
        """Tilted mean and variance, elementwise over arrays A and u (rank 1)."""
        raise NotImplementedError

    def mean_cov_nodes(self, A, U):
        """Tilted means (n x r) and covariances (n x r x r) for shared A.

        A is one r x r precision used for every row of U. Non-Gaussian
        families require A diagonal.
        """
        A = np.atleast_2d(A)
        U = np.atleast_2d(U)
        r = U.shape[1]
        if r == 1:
            f, v = self.mean_var_scalar(float(A[0, 0]), U[:, 0])
            return f[:, None], v[:, None, None]
        self._require_diagonal(A)
        a = np.diag(A)
        f, v = self.mean_var_scalar(a[None, :], U)
        cov = np.zeros((U.shape[0], r, r))
        idx = np.arange(r)
        cov[:, idx, idx] = v
        return f, cov

    def _require_diagonal(self, A):
        off = A - np.diag(np.diag(A))
        if np.max(np.abs(off)) > 1e-12 * max(1.0, float(np.max(np.abs(A)))):
            raise NumericDomainError(
                "%s prior supports rank > 1 only with diagonal A" % self.kind
            )

    def __repr__(self):
        return prior_to_text(self)

    def __eq__(self, other):
        return isinstance(other, Prior) and prior_to_text(self) == prior_to_text(other)


class GaussianPrior(Prior):
    kind = "gaussian"

    def __init__(self, mu, sigma2):
        if not (sigma2 > 0):
            raise InvalidParameterError("sigma2 must be positive")
        self.mu = float(mu)
        self.sigma2 = float(sigma2)

    def moments(self):
        return self.mu, self.sigma2 + self.mu**2

    def sample(self, count, rank, rng):
        return rng.normal(self.mu, math.sqrt(self.sigma2), size=(count, rank))

    def mean_var_scalar(self, A, u):
        c = np.asarray(A, dtype=np.float64) + 1.0 / self.sigma2
        if np.any(c <= 0):
            raise NumericDomainError("tilted Gaussian precision is not positive")
        b = np.asarray(u, dtype=np.float64) + self.mu / self.sigma2
        f = b / c
        return f, np.broadcast_to(1.0 / c, f.shape).copy()

    def mean_cov_nodes(self, A, U):
        A = np.atleast_2d(A)
        U = np.atleast_2d(U)
        r = U.shape[1]
        prec = A + np.eye(r) / self.sigma2
        try:
            chol = cho_factor(prec)
        except np.linalg.LinAlgError as exc:
            raise NumericDomainError("tilted precision is not positive definite") from exc
        cov = cho_solve(chol, np.eye(r))
        cov = (cov + cov.T) / 2.0
        f = (U + self.mu / self.sigma2) @ cov
        return f, np.broadcast_to(cov, (U.shape[0], r, r)).copy()


class BernoulliPrior(Prior):
    kind = "bernoulli"

    def __init__(self, rho):
        if not (0 < rho <= 1):
            raise InvalidParameterError("rho must be in (0, 1]")
        self.rho = float(rho)

    def _logit(self):
        if self.rho == 1.0:
            return np.inf
        return math.log(self.rho / (1.0 - self.rho))

    def moments(self):
        return self.rho, self.rho

    def sample(self, count, rank, rng):
        return (rng.random(size=(count, rank)) < self.rho).astype(np.float64)

    def mean_var_scalar(self, A, u):
        f = expit(self._logit() + np.asarray(u, dtype=np.float64) - np.asarray(A) / 2.0)
        f = np.asarray(f, dtype=np.float64)
        return f, f * (1.0 - f)


class GaussBernoulliPrior(Prior):
    kind = "gauss_bernoulli"

    def __init__(self, rho, mu, sigma2):
        if not (0 < rho <= 1):
            raise InvalidParameterError("rho must be in (0, 1]")
        if not (sigma2 > 0):
            raise InvalidParameterError("sigma2 must be positive")
        self.rho = float(rho)
        self.mu = float(mu)
        self.sigma2 = float(sigma2)

    def _logit(self):
        if self.rho == 1.0:
            return np.inf
        return math.log(self.rho / (1.0 - self.rho))

    def moments(self):
        return self.rho * self.mu, self.rho * (self.sigma2 + self.mu**2)

    def sample(self, count, rank, rng):
        mask = (rng.random(size=(count, rank)) < self.rho).astype(np.float64)
        gauss = rng.normal(self.mu, math.sqrt(self.sigma2), size=(count, rank))
        return mask * gauss

    def mean_var_scalar(self, A, u):
        A = np.asarray(A, dtype=np.float64)
        u = np.asarray(u, dtype=np.float64)
        c = A + 1.0 / self.sigma2
        if np.any(c <= 0):
            raise NumericDomainError("tilted Gaussian component is degenerate")
        b = u + self.mu / self.sigma2
        ratio = b / c
        # log of the Gaussian-component partition function, relative to the
        # point mass at zero (whose tilt weight is exactly 1).
        log_zn = (
            -0.5 * np.log(self.sigma2 * c)
            + b**2 / (2.0 * c)
            - self.mu**2 / (2.0 * self.sigma2)
        )
        w = expit(self._logit() + log_zn)
        f = w * ratio
        var = w / c + w * (1.0 - w) * ratio**2
        return f, var


def posterior_mean(prior, ch):
    """Mean of the tilted prior at the channel state (d/du of log Z)."""
    f, _ = prior.mean_cov_nodes(ch.A, ch.u[None, :])
    return f[0]


def posterior_cov(prior, ch):
    """Covariance of the tilted prior (Jacobian of posterior_mean in u)."""
    _, cov = prior.mean_cov_nodes(ch.A, ch.u[None, :])
    return cov[0]


def sample_prior(prior, count, rank, seed):
    """count x rank matrix of i.i.d. draws; deterministic given the seed."""
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    rng = np.random.default_rng(seed)
    return prior.sample(count, rank, rng)


def prior_moments(prior):
    """(mean, second moment) of the prior."""
    return prior.moments()


_PRIOR_RE = re.compile(r"^\s*([a-z_]+)\s*\(([^()]*)\)\s*$")


def parse_prior(text):
    """Parse 'gaussian(mu,sigma2)' | 'bernoulli(rho)' | 'gauss_bernoulli(rho,mu,sigma2)'."""
    m = _PRIOR_RE.match(text)
    if not m:
        raise ConfigError("cannot parse prior %r" % text)
    name, arg_text = m.group(1), m.group(2)
    try:
        args = [float(a) for a in arg_text.split(",")] if arg_text.strip() else []
    except ValueError as exc:
        raise ConfigError("bad numeric argument in prior %r" % text) from exc
    table = {"gaussian": (GaussianPrior, 2), "bernoulli": (BernoulliPrior, 1),
             "gauss_bernoulli": (GaussBernoulliPrior, 3)}
    if name not in table:
        raise ConfigError("unknown prior family %r" % name)
    cls, argc = table[name]
    if len(args) != argc:
        raise ConfigError("prior %r takes %d arguments, got %d" % (name, argc, len(args)))
    try:
        return cls(*args)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc


def prior_to_text(prior):
    """Inverse of parse_prior."""
    if prior.kind == "gaussian":
        return "gaussian(%.17g,%.17g)" % (prior.mu, prior.sigma2)
    if prior.kind == "bernoulli":
        return "bernoulli(%.17g)" % prior.rho
    return "gauss_bernoulli(%.17g,%.17g,%.17g)" % (prior.rho, prior.mu, prior.sigma2)
