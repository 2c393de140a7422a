"""Phase boundaries of the recovery problem, located by bisection.

Two noise thresholds bound the hard regime for each model:

- delta_alg: largest noise at which the fixed point reached from an
  uninformative start still has low reconstruction error (easy regime
  below it).
- delta_dyn: largest noise at which a fully informed start stays at low
  error (impossible regime above it).

Both are found by classifying state-evolution fixed points as low or high
error against a mid-gap MSE threshold and bisecting the noise level. Sweeps
over shapes and prior means produce the tables behind the phase diagrams.
"""
import csv

from .errors import BracketError, IndeterminateError, InvalidParameterError
from .priors import GaussianPrior
from .state_evolution import (
    SeParams,
    informed_overlaps,
    mse_from_overlap,
    se_fixed_point,
    uninformed_overlaps,
)

LOW_MSE = "low_mse"
HIGH_MSE = "high_mse"


class PhaseQuery:
    def __init__(self, priors, shape, rank=1, delta_bracket=(1e-4, 10.0),
                 mse_threshold=0.5, bisect_tol=1e-4):
        lo, hi = float(delta_bracket[0]), float(delta_bracket[1])
        if not (0.0 < lo < hi):
            raise InvalidParameterError("need 0 < lo < hi in the delta bracket")
        if not (0.0 < mse_threshold < 1.0):
            raise InvalidParameterError("mse_threshold must be in (0, 1)")
        if bisect_tol <= 0:
            raise InvalidParameterError("bisect_tol must be positive")
        self.priors = list(priors)
        self.shape = shape
        self.rank = int(rank)
        self.delta_bracket = (lo, hi)
        self.mse_threshold = float(mse_threshold)
        self.bisect_tol = float(bisect_tol)

    def replaced(self, priors=None, shape=None):
        return PhaseQuery(
            priors if priors is not None else self.priors,
            shape if shape is not None else self.shape,
            self.rank,
            self.delta_bracket,
            self.mse_threshold,
            self.bisect_tol,
        )


def classify_delta(query, delta, init):
    """Run state evolution at this noise level and label the fixed point."""
    if delta <= 0:
        raise InvalidParameterError("delta must be positive")
    params = SeParams(query.priors, query.shape, delta, query.rank)
    if init == "informed":
        start = informed_overlaps(params)
    elif init == "uninformed":
        start = uninformed_overlaps(params)
    else:
        raise InvalidParameterError("init must be informed or uninformed")
    result = se_fixed_point(start, params)
    if not result.converged:
        raise IndeterminateError(
            "state evolution did not converge at delta=%g" % delta)
    mse = mse_from_overlap(result.overlaps, query.priors)
    return LOW_MSE if mse < query.mse_threshold else HIGH_MSE


def _bisect(query, init):
    lo, hi = query.delta_bracket
    if classify_delta(query, hi, init) == LOW_MSE:
        raise BracketError("still low error at delta=%g; raise the bracket" % hi)
    while hi - lo > query.bisect_tol:
        mid = 0.5 * (lo + hi)
        if classify_delta(query, mid, init) == LOW_MSE:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_delta_alg(query):
    """Noise level where the uninformed start stops recovering.

    Returns 0 when even the lower bracket end fails, which is the signature
    of a model with no easy regime.
    """
    if classify_delta(query, query.delta_bracket[0], "uninformed") == HIGH_MSE:
        return 0.0
    return _bisect(query, "uninformed")


def find_delta_dyn(query):
    """Noise level where even the informed start stops recovering."""
    if classify_delta(query, query.delta_bracket[0], "informed") == HIGH_MSE:
        raise BracketError("already high error at delta=%g; lower the bracket"
                           % query.delta_bracket[0])
    return _bisect(query, "informed")


def sweep_shape(query, nx_grid):
    """Both boundaries for shapes n = (1, n_x, 1/n_x); p=3 only."""
    if query.shape.p != 3:
        raise InvalidParameterError("shape sweep is defined for order-3 tensors")
    from .tensor_core import shape_from_ratios

    rows = []
    for nx in nx_grid:
        if nx <= 0:
            raise InvalidParameterError("n_x must be positive")
        shape = shape_from_ratios([1.0, float(nx), 1.0 / float(nx)],
                                  base=query.shape.N)
        sub = query.replaced(shape=shape)
        rows.append({
            "n_x": float(nx),
            "delta_alg": find_delta_alg(sub),
            "delta_dyn": find_delta_dyn(sub),
        })
    return rows


def sweep_means(query, mu1_grid, mu2_grid, mu3=0.0):
    """Both boundaries over a grid of the first two prior means (p=3,
    Gaussian priors; the third mean is held fixed).

    A point with two or more zero means has no easy regime at any noise
    level, so delta_alg is reported as 0 there without bisection.
    """
    if query.shape.p != 3:
        raise InvalidParameterError("mean sweep is defined for order-3 tensors")
    variances = []
    for prior in query.priors:
        if not isinstance(prior, GaussianPrior):
            raise InvalidParameterError("mean sweep requires Gaussian priors")
        variances.append(prior.sigma2)
    rows = []
    for mu1 in mu1_grid:
        for mu2 in mu2_grid:
            means = (float(mu1), float(mu2), float(mu3))
            priors = [GaussianPrior(m, v) for m, v in zip(means, variances)]
            sub = query.replaced(priors=priors)
            if sum(1 for m in means if m == 0.0) >= 2:
                delta_alg = 0.0
            else:
                delta_alg = find_delta_alg(sub)
            rows.append({
                "mu1": means[0],
                "mu2": means[1],
                "delta_alg": delta_alg,
                "delta_dyn": find_delta_dyn(sub),
            })
    return rows


def write_table(rows, path):
    """Write sweep rows to CSV with full float precision."""
    if not rows:
        raise InvalidParameterError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow(["%.17g" % row[f] for f in fields])
