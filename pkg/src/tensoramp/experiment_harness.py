"""Experiment drivers, alignment-aware metrics, configuration, and the CLI.

Estimated factors carry gauge freedom: components may come back permuted,
and per-mode sign/scale factors whose product is one leave the reconstructed
tensor unchanged. ``align_components`` removes exactly that freedom (and
nothing more), so factor-level errors are meaningful. Every run reports two
errors: the aligned factor MSE, which matches the state-evolution
prediction, and the relative tensor-reconstruction MSE, which is
gauge-free by construction.

Configuration is a flat INI file with [model], [run], [phase], and [output]
sections; every field has a default and the effective values are echoed
into each output record. The CLI exposes generate/amp/als/se/phase/compare
subcommands and exits 0 on success, 1 on configuration errors, 2 on
numerical failures.
"""
import argparse
import configparser
import csv
import json
import sys
import time

import numpy as np

from . import als_baseline, amp_engine, phase_diagram
from .errors import (
    ConfigError,
    InvalidParameterError,
    ShapeMismatchError,
    TensorAmpError,
)
from .priors import parse_prior, prior_to_text
from .state_evolution import (
    SeParams,
    informed_overlaps,
    mse_from_overlap,
    se_fixed_point,
    uninformed_overlaps,
)
from .tensor_core import (
    FactorSet,
    Observation,
    add_noise,
    load_factors,
    load_tensor,
    low_rank_tensor,
    make_shape,
    save_factors,
    save_tensor,
)

_TINY_NORM = 1e-30


def _component_correlations(est, truth):
    """abs normalized correlation per (mode, est component, truth component)."""
    p = est.shape.p
    r = est.rank
    corr = np.zeros((p, r, r))
    for alpha in range(p):
        e = est.factors[alpha]
        t = truth.factors[alpha]
        en = np.linalg.norm(e, axis=0)
        tn = np.linalg.norm(t, axis=0)
        denom = np.outer(en, tn)
        denom[denom < _TINY_NORM] = 1.0
        corr[alpha] = (e.T @ t) / denom
    return corr


def align_components(est, truth):
    """Resolve permutation and sign/scale gauge against the truth.

    Components are matched greedily by total absolute correlation across
    modes. Each matched component is then rescaled mode by mode so all its
    mode vectors share one norm ratio to the truth, with the scale factors
    multiplying to one, and signs are flipped toward the truth in pairs
    (the product of the applied signs is one, flipping the least correlated
    mode last if needed). The reconstructed tensor is exactly unchanged.
    Returns the aligned copy and its per-mode overlaps with the truth.
    """
    if est.shape != truth.shape:
        raise ShapeMismatchError("factor sets have different shapes")
    if est.rank != truth.rank:
        raise ShapeMismatchError("factor sets have different ranks")
    p = est.shape.p
    r = est.rank
    corr = _component_correlations(est, truth)
    score = np.abs(corr).sum(axis=0)

    perm = [-1] * r
    free_est = set(range(r))
    free_truth = set(range(r))
    for _ in range(r):
        best = None
        for j in free_est:
            for k in free_truth:
                if best is None or score[j, k] > score[best]:
                    best = (j, k)
        perm[best[1]] = best[0]
        free_est.discard(best[0])
        free_truth.discard(best[1])

    aligned = [np.empty_like(f) for f in est.factors]
    for k in range(r):
        j = perm[k]
        vnorm = np.array([np.linalg.norm(est.factors[a][:, j]) for a in range(p)])
        tnorm = np.array([np.linalg.norm(truth.factors[a][:, k]) for a in range(p)])
        signs = np.array([1.0 if corr[a, j, k] >= 0 else -1.0 for a in range(p)])
        if signs.prod() < 0:
            weakest = int(np.argmin(np.abs(corr[:, j, k])))
            signs[weakest] = -signs[weakest]
        if np.all(vnorm > _TINY_NORM) and np.all(tnorm > _TINY_NORM):
            kappa = float(np.exp(np.mean(np.log(vnorm / tnorm))))
            scales = signs * kappa * tnorm / vnorm
        else:
            scales = signs
        for a in range(p):
            aligned[a][:, k] = scales[a] * est.factors[a][:, j]
    aligned_set = FactorSet(est.shape, aligned)
    return aligned_set, amp_engine.overlap(aligned_set, truth)


def factor_mse(est, truth, priors):
    """Mean squared factor error, averaged over modes and normalized by the
    prior variance so 1 means no better than the prior mean."""
    dims = est.shape.int_dims()
    total = 0.0
    for alpha in range(est.shape.p):
        diff = est.factors[alpha] - truth.factors[alpha]
        var = max(priors[alpha].variance(), 1e-12)
        total += float((diff**2).sum()) / (dims[alpha] * est.rank * var)
    return total / est.shape.p


def tensor_mse(est, truth):
    """Relative squared reconstruction error; gauge-free."""
    w_est = low_rank_tensor(est).values
    w_true = low_rank_tensor(truth).values
    denom = float((w_true**2).sum())
    if denom < _TINY_NORM:
        raise InvalidParameterError("truth tensor is zero; relative error undefined")
    return float(((w_est - w_true) ** 2).sum()) / denom


class ExperimentConfig:
    """Validated experiment description with defaults for every field."""

    def __init__(self, dims, rank, priors, algorithm, delta=None, delta_grid=None,
                 init="uninformed", damping=0.3, tol=1e-8, max_iter=500,
                 seeds=(0,), out=None, deterministic=False, threads=1,
                 success_threshold=0.5, mode_sum_scaling="geometric",
                 bracket=(1e-4, 10.0), bisect_tol=1e-4, mse_threshold=0.5,
                 sweep="none", nx_grid=(), mu_grid=(), input_tensor=None,
                 truth_prefix=None):
        self.dims = [int(d) for d in dims]
        self.rank = int(rank)
        self.priors = list(priors)
        self.algorithm = algorithm
        self.delta = delta
        self.delta_grid = list(delta_grid) if delta_grid else None
        self.init = init
        self.damping = float(damping)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.seeds = [int(s) for s in seeds]
        self.out = out
        self.deterministic = bool(deterministic)
        self.threads = 1 if self.deterministic else int(threads)
        self.success_threshold = float(success_threshold)
        self.mode_sum_scaling = mode_sum_scaling
        self.bracket = (float(bracket[0]), float(bracket[1]))
        self.bisect_tol = float(bisect_tol)
        self.mse_threshold = float(mse_threshold)
        self.sweep = sweep
        self.nx_grid = [float(v) for v in nx_grid]
        self.mu_grid = [float(v) for v in mu_grid]
        self.input_tensor = input_tensor
        self.truth_prefix = truth_prefix
        self._validate()

    def _validate(self):
        if self.algorithm not in ("amp", "als", "se", "phase", "compare", "generate"):
            raise ConfigError("unknown algorithm %r" % self.algorithm)
        if len(self.priors) != len(self.dims):
            raise ConfigError("need one prior per mode")
        if self.rank < 1:
            raise ConfigError("rank must be >= 1")
        if self.init not in ("informed", "uninformed"):
            raise ConfigError("init must be informed or uninformed")
        if not (0.0 <= self.damping < 1.0):
            raise ConfigError("damping must be in [0, 1)")
        if self.delta is None and not self.delta_grid and self.algorithm not in (
                "phase",):
            raise ConfigError("set delta or delta_grid")
        for d in self.deltas():
            if d <= 0:
                raise ConfigError("noise levels must be positive")
        if self.sweep not in ("none", "shape", "means"):
            raise ConfigError("sweep must be none, shape, or means")
        try:
            make_shape(self.dims)
        except TensorAmpError as exc:
            raise ConfigError(str(exc)) from exc

    def deltas(self):
        if self.delta_grid:
            return list(self.delta_grid)
        return [self.delta] if self.delta is not None else []

    def shape(self):
        return make_shape(self.dims)

    def phase_query(self):
        return phase_diagram.PhaseQuery(
            self.priors, self.shape(), self.rank, self.bracket,
            self.mse_threshold, self.bisect_tol)

    def to_dict(self):
        return {
            "dims": self.dims,
            "rank": self.rank,
            "priors": [prior_to_text(p) for p in self.priors],
            "algorithm": self.algorithm,
            "delta": self.delta,
            "delta_grid": self.delta_grid,
            "init": self.init,
            "damping": self.damping,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "seeds": self.seeds,
            "out": self.out,
            "deterministic": self.deterministic,
            "threads": self.threads,
            "success_threshold": self.success_threshold,
            "mode_sum_scaling": self.mode_sum_scaling,
            "bracket": list(self.bracket),
            "bisect_tol": self.bisect_tol,
            "mse_threshold": self.mse_threshold,
            "sweep": self.sweep,
            "nx_grid": self.nx_grid,
            "mu_grid": self.mu_grid,
            "input_tensor": self.input_tensor,
            "truth_prefix": self.truth_prefix,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["priors"] = [parse_prior(text) for text in data["priors"]]
        data["bracket"] = tuple(data.get("bracket", (1e-4, 10.0)))
        return cls(**data)


def _split_values(text):
    return text.replace(",", " ").split()


def load_config(path, overrides=None):
    """Parse the INI experiment file; overrides win over file values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError("cannot read config file %r" % path)
    try:
        model = parser["model"] if parser.has_section("model") else {}
        run = parser["run"] if parser.has_section("run") else {}
        phase = parser["phase"] if parser.has_section("phase") else {}
        output = parser["output"] if parser.has_section("output") else {}

        dims = [int(v) for v in _split_values(model.get("dims", "50 50 50"))]
        rank = int(model.get("rank", "1"))
        priors = []
        default_prior = model.get("prior", "gaussian(0,1)")
        for alpha in range(len(dims)):
            text = model.get("prior%d" % (alpha + 1), default_prior)
            priors.append(parse_prior(text))

        delta = run.get("delta")
        delta_grid = run.get("delta_grid")
        kwargs = {
            "dims": dims,
            "rank": rank,
            "priors": priors,
            "algorithm": run.get("algorithm", "amp"),
            "delta": float(delta) if delta is not None else None,
            "delta_grid": [float(v) for v in _split_values(delta_grid)]
            if delta_grid else None,
            "init": run.get("init", "uninformed"),
            "damping": float(run.get("damping", "0.3")),
            "tol": float(run.get("tol", "1e-8")),
            "max_iter": int(run.get("max_iter", "500")),
            "seeds": [int(v) for v in _split_values(run.get("seeds", "0"))],
            "success_threshold": float(run.get("success_threshold", "0.5")),
            "mode_sum_scaling": run.get("mode_sum_scaling", "geometric"),
            "input_tensor": run.get("input_tensor"),
            "truth_prefix": run.get("truth_prefix"),
            "bracket": (float(phase.get("bracket_lo", "1e-4")),
                        float(phase.get("bracket_hi", "10"))),
            "bisect_tol": float(phase.get("bisect_tol", "1e-4")),
            "mse_threshold": float(phase.get("mse_threshold", "0.5")),
            "sweep": phase.get("sweep", "none"),
            "nx_grid": [float(v) for v in _split_values(phase.get("nx_grid", ""))],
            "mu_grid": [float(v) for v in _split_values(phase.get("mu_grid", ""))],
            "out": output.get("path"),
            "deterministic": output.get("deterministic", "false").lower()
            in ("1", "true", "yes"),
            "threads": int(output.get("threads", "1")),
        }
    except (ValueError, KeyError) as exc:
        raise ConfigError("bad config value: %s" % exc) from exc
    if overrides:
        kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


class RunRecord:
    """One unit of work (one seed at one noise level, or one analytic run)."""

    def __init__(self, config_echo, algorithm, delta, seed=None, init=None,
                 overlaps=None, mse_factor=None, mse_tensor=None, iterations=None,
                 converged=None, success=None, wall_time=None, error=None,
                 extras=None):
        self.config_echo = config_echo
        self.algorithm = algorithm
        self.delta = delta
        self.seed = seed
        self.init = init
        self.overlaps = overlaps
        self.mse_factor = mse_factor
        self.mse_tensor = mse_tensor
        self.iterations = iterations
        self.converged = converged
        self.success = success
        self.wall_time = wall_time
        self.error = error
        self.extras = extras or {}
        for value in (self.mse_factor, self.mse_tensor):
            if value is not None and not (np.isfinite(value) and value >= 0):
                raise InvalidParameterError("MSE values must be finite and >= 0")

    def to_dict(self):
        return {
            "config": self.config_echo,
            "algorithm": self.algorithm,
            "delta": self.delta,
            "seed": self.seed,
            "init": self.init,
            "overlaps": self.overlaps,
            "mse_factor": self.mse_factor,
            "mse_tensor": self.mse_tensor,
            "iterations": self.iterations,
            "converged": self.converged,
            "success": self.success,
            "wall_time": self.wall_time,
            "error": self.error,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            config_echo=data["config"], algorithm=data["algorithm"],
            delta=data["delta"], seed=data["seed"], init=data["init"],
            overlaps=data["overlaps"], mse_factor=data["mse_factor"],
            mse_tensor=data["mse_tensor"], iterations=data["iterations"],
            converged=data["converged"], success=data["success"],
            wall_time=data["wall_time"], error=data["error"],
            extras=data["extras"])

    def __eq__(self, other):
        return isinstance(other, RunRecord) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "RunRecord(%s)" % json.dumps(self.to_dict(), sort_keys=True)


def sample_truth(shape, priors, rank, seed):
    """Draw ground-truth factors from the per-mode priors."""
    rng = np.random.default_rng(seed)
    dims = shape.int_dims()
    return FactorSet(shape, [prior.sample(dims[a], rank, rng)
                             for a, prior in enumerate(priors)])


def synthesize_instance(config, delta, seed):
    """Truth factors and a noisy observation for one seed.

    Child streams are split off one seed sequence, so the truth and the
    noise draw are independent and the same seed gives the same instance
    at every noise level.
    """
    shape = config.shape()
    root = np.random.SeedSequence(seed)
    truth_seq, noise_seq, init_seq = root.spawn(3)
    truth = sample_truth(shape, config.priors, config.rank, truth_seq)
    obs = add_noise(low_rank_tensor(truth), delta, noise_seq)
    return truth, obs, init_seq


def _record_for_run(config, delta, seed, result, truth, started):
    aligned, overlaps = align_components(result.factors, truth)
    mse_f = factor_mse(aligned, truth, config.priors)
    mse_t = tensor_mse(result.factors, truth)
    return RunRecord(
        config_echo=config.to_dict(), algorithm=config.algorithm, delta=delta,
        seed=seed, init=config.init,
        overlaps=[m.tolist() for m in overlaps.M],
        mse_factor=mse_f, mse_tensor=mse_t, iterations=result.iterations,
        converged=bool(result.converged),
        success=bool(mse_f < config.success_threshold),
        wall_time=time.perf_counter() - started)


def _run_one_seed(config, delta, seed):
    started = time.perf_counter()
    try:
        truth, obs, init_seq = synthesize_instance(config, delta, seed)
        if config.algorithm == "amp":
            result = amp_engine.run_amp(
                obs, config.priors, config.rank, init_mode=config.init,
                damping=config.damping, tol=config.tol,
                max_iter=config.max_iter, seed=init_seq, truth=truth,
                mode_sum_scaling=config.mode_sum_scaling)
        else:
            als_cfg = als_baseline.AlsConfig(
                config.rank, tol=config.tol, max_iter=config.max_iter,
                seed=init_seq)
            result = als_baseline.run_als(obs, als_cfg)
        return _record_for_run(config, delta, seed, result, truth, started)
    except TensorAmpError as exc:
        return RunRecord(
            config_echo=config.to_dict(), algorithm=config.algorithm,
            delta=delta, seed=seed, init=config.init,
            wall_time=time.perf_counter() - started,
            error="%s: %s" % (type(exc).__name__, exc))


def _se_records(config):
    records = []
    for delta in config.deltas():
        params = SeParams(config.priors, config.shape(), delta, config.rank)
        for init in ("informed", "uninformed"):
            started = time.perf_counter()
            start = (informed_overlaps(params) if init == "informed"
                     else uninformed_overlaps(params))
            result = se_fixed_point(start, params)
            mse = mse_from_overlap(result.overlaps, config.priors)
            records.append(RunRecord(
                config_echo=config.to_dict(), algorithm="se", delta=delta,
                init=init,
                overlaps=[m.tolist() for m in result.overlaps.M],
                mse_factor=mse, iterations=result.iterations,
                converged=bool(result.converged),
                success=bool(mse < config.success_threshold),
                wall_time=time.perf_counter() - started))
    return records


def _phase_records(config):
    query = config.phase_query()
    started = time.perf_counter()
    if config.sweep == "shape":
        rows = phase_diagram.sweep_shape(query, config.nx_grid)
    elif config.sweep == "means":
        rows = phase_diagram.sweep_means(query, config.mu_grid, config.mu_grid)
    else:
        rows = [{
            "delta_alg": phase_diagram.find_delta_alg(query),
            "delta_dyn": phase_diagram.find_delta_dyn(query),
        }]
    records = []
    for row in rows:
        records.append(RunRecord(
            config_echo=config.to_dict(), algorithm="phase", delta=None,
            wall_time=time.perf_counter() - started, extras=dict(row)))
    return records


def run_experiment(config):
    """Run the configured algorithm over the noise grid and seed list.

    Per-seed failures are recorded in the output, not raised, so one bad
    draw cannot kill a sweep. Analytic modes (se, phase) take no seeds.
    """
    if config.algorithm == "se":
        return _se_records(config)
    if config.algorithm == "phase":
        return _phase_records(config)
    if config.algorithm not in ("amp", "als"):
        raise ConfigError("run_experiment handles amp, als, se, phase")
    records = []
    for delta in config.deltas():
        for seed in config.seeds:
            records.append(_run_one_seed(config, delta, seed))
    return records


def compare_amp_als(config):
    """Success rates and mean aligned MSE for both solvers on shared
    instances, one row per noise level; the theoretical uninformed-start
    boundary rides along for reference."""
    if not config.deltas():
        raise ConfigError("compare needs a nonempty delta grid")
    delta_alg = phase_diagram.find_delta_alg(config.phase_query())
    rows = []
    for delta in config.deltas():
        cells = {"amp": [], "als": []}
        for seed in config.seeds:
            truth, obs, init_seq = synthesize_instance(config, delta, seed)
            amp_result = amp_engine.run_amp(
                obs, config.priors, config.rank, init_mode="uninformed",
                damping=config.damping, tol=config.tol,
                max_iter=config.max_iter, seed=init_seq, truth=truth,
                mode_sum_scaling=config.mode_sum_scaling)
            als_cfg = als_baseline.AlsConfig(
                config.rank, tol=config.tol, max_iter=config.max_iter,
                seed=init_seq)
            als_result = als_baseline.run_als(obs, als_cfg)
            for name, result in (("amp", amp_result), ("als", als_result)):
                aligned, _ = align_components(result.factors, truth)
                cells[name].append(factor_mse(aligned, truth, config.priors))
        rows.append({
            "delta": delta,
            "amp_success_rate": float(np.mean(
                [m < config.success_threshold for m in cells["amp"]])),
            "als_success_rate": float(np.mean(
                [m < config.success_threshold for m in cells["als"]])),
            "amp_mean_mse": float(np.mean(cells["amp"])),
            "als_mean_mse": float(np.mean(cells["als"])),
            "delta_alg_theory": delta_alg,
        })
    return rows, delta_alg


def write_records(records, path):
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def read_records(path):
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_dict(json.loads(line)))
    return records


def write_csv_rows(rows, path):
    if not rows:
        raise ConfigError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="tensoramp",
                     description="Low-rank tensor recovery via message "
                                 "passing, with analytic performance "
                                 "prediction and phase boundaries.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("generate", "write a synthetic noisy tensor and its truth factors"),
            ("amp", "run message-passing recovery over seeds and noise levels"),
            ("als", "run the alternating least squares baseline"),
            ("se", "run the analytic performance recursion"),
            ("phase", "locate phase boundaries (optionally sweep shape/means)"),
            ("compare", "run amp and als on shared instances and tabulate")):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="INI experiment file")
        cmd.add_argument("--seed", type=int, default=None,
                         help="replace the seed list with this one seed")
        cmd.add_argument("--out", default=None, help="output path override")
        cmd.add_argument("--deterministic", action="store_true",
                         help="force single-threaded deterministic execution")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker threads (results are thread-count "
                              "independent)")
    return parser


def _cli_config(args, command):
    overrides = {"algorithm": command if command != "generate" else "amp"}
    if args.seed is not None:
        overrides["seeds"] = [args.seed]
    if args.out is not None:
        overrides["out"] = args.out
    if args.deterministic:
        overrides["deterministic"] = True
    if args.threads is not None:
        overrides["threads"] = args.threads
    config = load_config(args.config, overrides)
    if command == "generate":
        config.algorithm = "generate"
    return config


def _default_out(config, suffix):
    return config.out if config.out else "tensoramp_output" + suffix


def _cmd_generate(config):
    delta = config.deltas()[0] if config.deltas() else 1.0
    seed = config.seeds[0]
    truth, obs, _ = synthesize_instance(config, delta, seed)
    base = _default_out(config, "")
    save_tensor(base + ".tensor", obs.tensor, delta=delta)
    save_factors(base + "_truth", truth)
    print("wrote %s.tensor and %s_truth/factors_mode*.csv" % (base, base))
    return 0


def _load_instance(config, delta):
    tensor, file_delta = load_tensor(config.input_tensor)
    obs_delta = file_delta if file_delta is not None else delta
    if obs_delta is None:
        raise ConfigError("no noise level: set delta or store one in the file")
    truth = (load_factors(config.truth_prefix, tensor.shape)
             if config.truth_prefix else None)
    return Observation(tensor, obs_delta), truth


def _cmd_solver(config):
    if config.input_tensor:
        delta = config.deltas()[0] if config.deltas() else None
        obs, truth = _load_instance(config, delta)
        started = time.perf_counter()
        if config.algorithm == "amp":
            result = amp_engine.run_amp(
                obs, config.priors, config.rank, init_mode="uninformed",
                damping=config.damping, tol=config.tol,
                max_iter=config.max_iter, seed=config.seeds[0], truth=truth,
                mode_sum_scaling=config.mode_sum_scaling)
        else:
            als_cfg = als_baseline.AlsConfig(
                config.rank, tol=config.tol, max_iter=config.max_iter,
                seed=config.seeds[0])
            result = als_baseline.run_als(obs, als_cfg)
        if truth is not None:
            record = _record_for_run(config, obs.delta, config.seeds[0], result,
                                     truth, started)
        else:
            record = RunRecord(
                config_echo=config.to_dict(), algorithm=config.algorithm,
                delta=obs.delta, seed=config.seeds[0], init=config.init,
                iterations=result.iterations, converged=bool(result.converged),
                wall_time=time.perf_counter() - started)
        records = [record]
        base = _default_out(config, ".jsonl")
        save_factors(base.replace(".jsonl", "") + "_est", result.factors)
    else:
        records = run_experiment(config)
        base = _default_out(config, ".jsonl")
    write_records(records, base)
    failures = [r for r in records if r.error]
    print("wrote %d records to %s (%d with errors)"
          % (len(records), base, len(failures)))
    return 0


def _cmd_se(config):
    records = run_experiment(config)
    path = _default_out(config, ".jsonl")
    write_records(records, path)
    print("wrote %d records to %s" % (len(records), path))
    return 0


def _cmd_phase(config):
    records = run_experiment(config)
    rows = [r.extras for r in records]
    path = _default_out(config, ".csv")
    phase_diagram.write_table(rows, path)
    print("wrote %d rows to %s" % (len(rows), path))
    return 0


def _cmd_compare(config):
    rows, delta_alg = compare_amp_als(config)
    path = _default_out(config, ".csv")
    write_csv_rows(rows, path)
    print("wrote %d rows to %s (predicted boundary delta_alg=%.6g)"
          % (len(rows), path, delta_alg))
    return 0


def main(argv=None):
    try:
        args = _build_parser().parse_args(argv)
        config = _cli_config(args, args.command)
        if args.command == "generate":
            return _cmd_generate(config)
        if args.command in ("amp", "als"):
            return _cmd_solver(config)
        if args.command == "se":
            return _cmd_se(config)
        if args.command == "phase":
            return _cmd_phase(config)
        return _cmd_compare(config)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except TensorAmpError as exc:
        print("numerical failure: %s: %s" % (type(exc).__name__, exc),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
