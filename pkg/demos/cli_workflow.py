"""Drive the command-line interface end to end in a temporary directory.

Writes an experiment config, generates a synthetic instance on disk,
solves it from the files, runs the analytic recursion, and locates the
phase boundaries, all through the same entry points the installed
``tensoramp`` command uses. Takes a few seconds.
"""
import json
import os
import tempfile

from tensoramp.experiment_harness import main as cli

CONFIG = """\
[model]
dims = 30 30 30
prior = gaussian(0.2, 1)

[run]
delta = 0.05
seeds = 7

[phase]
bisect_tol = 1e-4
"""

SOLVE_CONFIG = """\
[model]
dims = 30 30 30
prior = gaussian(0.2, 1)

[run]
delta = 0.05
seeds = 7
input_tensor = %s.tensor
truth_prefix = %s_truth
"""


def run(argv):
    print("$ tensoramp " + " ".join(argv))
    code = cli(argv)
    print("  exit code %d" % code)
    return code


def main():
    with tempfile.TemporaryDirectory() as work:
        config = os.path.join(work, "experiment.ini")
        with open(config, "w") as fh:
            fh.write(CONFIG)

        base = os.path.join(work, "instance")
        run(["generate", "--config", config, "--out", base])

        solve_cfg = os.path.join(work, "solve.ini")
        with open(solve_cfg, "w") as fh:
            fh.write(SOLVE_CONFIG % (base, base))
        out = os.path.join(work, "solution.jsonl")
        run(["amp", "--config", solve_cfg, "--out", out])
        with open(out) as fh:
            record = json.loads(fh.readline())
        print("  recovered with factor MSE %.4f in %d iterations"
              % (record["mse_factor"], record["iterations"]))

        se_out = os.path.join(work, "prediction.jsonl")
        run(["se", "--config", config, "--out", se_out])

        phase_out = os.path.join(work, "boundaries.csv")
        run(["phase", "--config", config, "--out", phase_out])
        with open(phase_out) as fh:
            print("  " + fh.read().strip().replace("\n", "\n  "))


if __name__ == "__main__":
    main()
