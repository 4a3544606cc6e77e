"""Measure how the two scoring pipelines scale with matrix size.

The column-norm score does O(n^2) work per n x n matrix while the
eigendecomposition behind matrix entropy does O(n^3), so their time
ratio should grow roughly linearly in n. This demo runs a short version
of the benchmark (the `mnnkit bench` subcommand runs the full one) and
fits log-log slopes to the medians.

Run: python3 demos/timing_separation.py
"""

from mnnkit.bench import fit_loglog_slope, run_scaling_bench


def main() -> None:
    sizes = [128, 256, 512, 1024]
    print(f"timing both pipelines at sizes {sizes} (5 repeats each)...\n")
    table = run_scaling_bench(sizes, repeats=5, seed=0)

    print(f"{'n':>6} {'mnn median':>12} {'entropy median':>15} {'ratio':>8}")
    for n in sizes:
        mnn = table.medians[("mnn", n)]
        entropy = table.medians[("matrix_entropy", n)]
        print(f"{n:>6} {mnn:>11.4f}s {entropy:>14.4f}s {table.ratios[n]:>8.1f}")

    mnn_slope = fit_loglog_slope(table, "mnn")
    entropy_slope = fit_loglog_slope(table, "matrix_entropy")
    print(f"\nfitted log-log slopes: mnn {mnn_slope:.2f}, "
          f"matrix entropy {entropy_slope:.2f}")
    print("doubling n multiplies mnn time by about "
          f"{2 ** mnn_slope:.1f}x and entropy time by about {2 ** entropy_slope:.1f}x")


if __name__ == "__main__":
    main()
