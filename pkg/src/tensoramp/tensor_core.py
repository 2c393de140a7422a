"""Dense order-p tensors, shape bookkeeping, synthetic data, and contractions.

The central scaling convention: a rank-r signal tensor is

    w[a] = N^{-(p-1)/2} * sum_rho prod_alpha x[alpha][i_alpha, rho]

where N is the *geometric mean* of the mode sizes, so non-cubic shapes stay
on the same footing as cubic ones. All heavy lifting goes through
``mttkrp_exclude``, the matricized-tensor-times-Khatri-Rao-product kernel,
which is exposed on its own so it can be checked against a brute-force
oracle and tuned independently.
"""
import json
import math
import os

import numpy as np

from .errors import (
    InvalidParameterError,
    InvalidShapeError,
    ShapeMismatchError,
    TooLargeError,
)

_MAGIC = b"TAMPDT01" + b"\x00" * 8
_MODE_LETTERS = "abcdefghijklmnopqrstuvwxy"  # 'z' is reserved for the rank axis


class TensorShape:
    """Order, per-mode sizes, their geometric mean N, and ratios n_alpha.

    ``dims`` entries are positive numbers. ``make_shape`` is the strict
    integer-validating constructor; float dims are allowed here so that
    analytic sweeps can work with pure aspect ratios without materializing
    any data.
    """

    def __init__(self, dims):
        dims = tuple(float(d) for d in dims)
        if len(dims) < 2:
            raise InvalidShapeError("need at least two modes, got %d" % len(dims))
        if any(d < 1 or not np.isfinite(d) for d in dims):
            raise InvalidShapeError("mode sizes must be >= 1 and finite: %r" % (dims,))
        self.dims = dims
        self.p = len(dims)
        self.N = float(np.exp(np.mean(np.log(dims))))
        self.n = tuple(d / self.N for d in dims)

    def int_dims(self):
        """Mode sizes as integers; fails if any size is not integral."""
        out = []
        for d in self.dims:
            r = int(round(d))
            if abs(d - r) > 1e-9:
                raise InvalidShapeError("non-integer mode size %r" % d)
            out.append(r)
        return tuple(out)

    @property
    def size(self):
        return int(math.prod(self.int_dims()))

    def scale(self):
        """The signal scaling N^{-(p-1)/2}."""
        return self.N ** (-(self.p - 1) / 2.0)

    def __eq__(self, other):
        return isinstance(other, TensorShape) and self.dims == other.dims

    def __repr__(self):
        return "TensorShape(dims=%r)" % (list(self.dims),)


def make_shape(dims):
    """Validated shape from a list of positive integers."""
    dims = list(dims)
    if len(dims) == 0:
        raise InvalidShapeError("empty dimension list")
    for d in dims:
        if int(d) != d or d < 1:
            raise InvalidShapeError("mode sizes must be positive integers: %r" % (dims,))
    return TensorShape([int(d) for d in dims])


def shape_from_ratios(ratios, base=120.0):
    """Shape carrying only aspect ratios, for data-free analytic sweeps.

    The returned shape has n_alpha proportional to ``ratios`` (normalized so
    their product is 1) and a nominal geometric-mean size ``base``.
    """
    ratios = [float(r) for r in ratios]
    if any(r <= 0 for r in ratios):
        raise InvalidShapeError("ratios must be positive: %r" % (ratios,))
    return TensorShape([base * r for r in ratios])


class DenseTensor:
    """A dense order-p tensor: row-major flat values plus a TensorShape."""

    def __init__(self, shape, values):
        self.shape = shape
        arr = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
        if arr.size != shape.size:
            raise ShapeMismatchError(
                "value count %d does not match shape %r" % (arr.size, shape)
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("tensor values must be finite")
        self.values = arr

    def as_ndarray(self):
        """Row-major view of the values with the tensor's full shape."""
        return self.values.reshape(self.shape.int_dims())

    def __repr__(self):
        return "DenseTensor(shape=%r)" % (self.shape,)


class FactorSet:
    """Per-mode factor matrices of a rank-r decomposition (N_alpha x r each)."""

    def __init__(self, shape, factors):
        dims = shape.int_dims()
        factors = [np.array(f, dtype=np.float64) for f in factors]
        if len(factors) != shape.p:
            raise ShapeMismatchError(
                "expected %d factor matrices, got %d" % (shape.p, len(factors))
            )
        ranks = {f.shape[1] if f.ndim == 2 else -1 for f in factors}
        if len(ranks) != 1 or -1 in ranks:
            raise ShapeMismatchError("factors must share one rank (N_alpha x r)")
        for alpha, f in enumerate(factors):
            if f.shape[0] != dims[alpha]:
                raise ShapeMismatchError(
                    "mode %d factor has %d rows, expected %d"
                    % (alpha, f.shape[0], dims[alpha])
                )
            if not np.all(np.isfinite(f)):
                raise InvalidParameterError("factor entries must be finite")
        self.shape = shape
        self.rank = factors[0].shape[1]
        self.factors = factors

    def copy(self):
        return FactorSet(self.shape, [f.copy() for f in self.factors])

    def __repr__(self):
        return "FactorSet(shape=%r, rank=%d)" % (self.shape, self.rank)


class Observation:
    """A noisy tensor Y together with its noise variance delta."""

    def __init__(self, tensor, delta):
        if not (delta > 0):
            raise InvalidParameterError("delta must be positive, got %r" % (delta,))
        self.tensor = tensor
        self.delta = float(delta)

    def __repr__(self):
        return "Observation(shape=%r, delta=%g)" % (self.tensor.shape, self.delta)


def _subscripts(p, mode=None):
    if p > len(_MODE_LETTERS):
        raise TooLargeError("tensor order %d exceeds supported maximum" % p)
    letters = _MODE_LETTERS[:p]
    if mode is None:
        inputs = ",".join(c + "z" for c in letters)
        return inputs + "->" + letters
    inputs = [letters] + [c + "z" for i, c in enumerate(letters) if i != mode]
    return ",".join(inputs) + "->" + letters[mode] + "z"


def low_rank_tensor(factors):
    """Assemble the scaled rank-r tensor from a FactorSet."""
    shape = factors.shape
    vals = np.einsum(_subscripts(shape.p), *factors.factors, optimize=True)
    return DenseTensor(shape, vals * shape.scale())


def add_noise(w, delta, seed):
    """Observation Y = w + sqrt(delta) * z with i.i.d. standard normal z.

    A pure function of (w, delta, seed): the same seed always yields the
    bitwise-identical observation.
    """
    if not (delta > 0):
        raise InvalidParameterError("delta must be positive, got %r" % (delta,))
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(w.shape.int_dims())
    vals = w.as_ndarray() + np.sqrt(delta) * noise
    return Observation(DenseTensor(w.shape, vals), delta)


def mttkrp_exclude(Y, est, mode):
    """Contract Y against every mode's factor except ``mode``.

    Returns an (N_mode, r) matrix whose (i, rho) entry is the sum of
    Y[a] * prod_{beta != mode} est.factors[beta][i_beta, rho] over all
    entries a with i_mode = i. No scaling prefactor is applied here.
    """
    if Y.shape != est.shape:
        raise ShapeMismatchError(
            "tensor shape %r does not match factors %r" % (Y.shape, est.shape)
        )
    p = Y.shape.p
    operands = [Y.as_ndarray()] + [est.factors[b] for b in range(p) if b != mode]
    return np.einsum(_subscripts(p, mode), *operands, optimize=True)


def save_tensor(path, tensor, delta=None):
    """Write a tensor file: 16-byte magic, JSON header line, raw f64le payload."""
    header = {"dims": list(tensor.shape.int_dims()), "dtype": "f64le"}
    if delta is not None:
        header["delta"] = float(delta)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(json.dumps(header).encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(tensor.values, dtype="<f8").tobytes())


def load_tensor(path):
    """Read a tensor file written by save_tensor. Returns (DenseTensor, delta)."""
    with open(path, "rb") as fh:
        magic = fh.read(16)
        if magic != _MAGIC:
            raise InvalidParameterError("bad magic in %s" % path)
        header_bytes = bytearray()
        while True:
            ch = fh.read(1)
            if not ch:
                raise InvalidParameterError("truncated header in %s" % path)
            if ch == b"\n":
                break
            header_bytes.extend(ch)
        header = json.loads(header_bytes.decode("utf-8"))
        if header.get("dtype") != "f64le":
            raise InvalidParameterError("unsupported dtype %r" % header.get("dtype"))
        shape = make_shape(header["dims"])
        payload = fh.read()
    expected = shape.size * 8
    if len(payload) != expected:
        raise InvalidParameterError(
            "payload is %d bytes, expected %d" % (len(payload), expected)
        )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return DenseTensor(shape, values), header.get("delta")


def save_factors(directory, factors):
    """Write one CSV per mode, named factors_mode<alpha>.csv (1-based)."""
    os.makedirs(directory, exist_ok=True)
    for alpha, f in enumerate(factors.factors):
        path = os.path.join(directory, "factors_mode%d.csv" % (alpha + 1))
        np.savetxt(path, f, delimiter=",", fmt="%.17g")


def load_factors(directory, shape):
    """Read the per-mode factor CSVs back into a FactorSet."""
    mats = []
    for alpha in range(shape.p):
        path = os.path.join(directory, "factors_mode%d.csv" % (alpha + 1))
        mat = np.loadtxt(path, delimiter=",", ndmin=2)
        mats.append(mat)
    return FactorSet(shape, mats)
