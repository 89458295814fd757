"""Compare the direct and transform-based interface convolution paths.

Both paths evaluate the same staggered quadrature sum; the transform path
reuses one forward transform of the density per axis across all kernels.
The deviation between the two stays at rounding level while the speedup
grows with grid size and kernel radius.
"""

import time

import numpy as np

from beltflow import AugmentedDensity, Grid, InterfaceConvolver, build_stencils, convolve_at_interfaces


def bench(n, sigma):
    grid = Grid(n, n, 1.0 / n, 1.0 / n)
    rng = np.random.default_rng(0)
    r = AugmentedDensity(grid, rng.random(grid.shape))
    d1, d2, smooth = build_stencils(sigma, grid)

    t0 = time.monotonic()
    direct = convolve_at_interfaces(r, d1, "x", "direct").values
    t_direct = time.monotonic() - t0

    engine = InterfaceConvolver(grid, "x", {"d1": d1, "smooth": smooth})
    engine.apply(r.values)  # warm the cached transforms
    t0 = time.monotonic()
    fast = engine.apply(r.values)["d1"]
    t_fft = time.monotonic() - t0

    err = np.abs(direct - fast).max() / np.abs(direct).max()
    print(
        f"n={n:4d} radius={d1.radius_cells:3d}  direct {t_direct*1e3:8.1f} ms  "
        f"fft {t_fft*1e3:7.2f} ms  speedup x{t_direct / t_fft:7.1f}  rel err {err:.2e}"
    )


def main():
    print("interface convolution: direct quadrature vs cached transforms")
    for n, sigma in ((32, 100.0), (64, 400.0), (128, 800.0), (256, 3000.0)):
        bench(n, sigma)


if __name__ == "__main__":
    main()
