"""Map the easy/hard/impossible phase boundaries by bisection.

For a given prior set and tensor shape, two noise thresholds split the
axis: below delta_alg an uninformed start recovers, below delta_dyn an
informed start still recovers, and above it nothing does. Both are found
by bisecting the analytic recursion, so no tensors are sampled. The
script then sweeps the tensor shape away from cubic and the prior means
away from symmetric to show how the window moves. Takes a few seconds.
"""
from tensoramp import GaussianPrior, make_shape
from tensoramp.phase_diagram import (
    PhaseQuery,
    find_delta_alg,
    find_delta_dyn,
    sweep_means,
    sweep_shape,
)

CUBIC = make_shape([10, 10, 10])


def main():
    query = PhaseQuery([GaussianPrior(0.2, 1.0)] * 3, CUBIC)
    alg = find_delta_alg(query)
    dyn = find_delta_dyn(query)
    print("cubic shape, all means 0.2:")
    print("  delta_alg = %.4f (uninformed recovery ends here)" % alg)
    print("  delta_dyn = %.4f (informed recovery ends here)" % dyn)
    print("  hard window width = %.4f" % (dyn - alg))

    print("shape sweep (one mode n_x times larger, one n_x times smaller):")
    print("%8s %12s %12s" % ("n_x", "delta_alg", "delta_dyn"))
    for row in sweep_shape(query, [0.4, 0.6, 1.0, 1.67, 2.5]):
        print("%8.2f %12.4f %12.4f" % (row["n_x"], row["delta_alg"],
                                       row["delta_dyn"]))
    print("the window is widest at the cubic point and shrinks")
    print("symmetrically as the shape is skewed either way.")

    print("mean sweep (third mode mean pinned at zero):")
    print("%6s %6s %12s %12s" % ("mu1", "mu2", "delta_alg", "delta_dyn"))
    for row in sweep_means(query, [0.0, 0.15, 0.3], [0.0, 0.15, 0.3]):
        print("%6.2f %6.2f %12.4f %12.4f"
              % (row["mu1"], row["mu2"], row["delta_alg"], row["delta_dyn"]))
    print("with two zero means there is no easy regime at all, yet a")
    print("single nonzero mean keeps the informed boundary finite.")


if __name__ == "__main__":
    main()
