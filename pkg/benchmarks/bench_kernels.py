"""Compare the compiled and pure-Python inpainting kernels.

    python benchmarks/bench_kernels.py [--size 256] [--radius 5] [--repeat 3]
"""
import argparse
import time

import numpy as np

from parallaxfx import _fastmarch_py

try:
    from parallaxfx import _fastmarch
except ImportError:
    _fastmarch = None


def disk_hole(size, radius):
    yy, xx = np.mgrid[:size, :size]
    c = size / 2
    return (yy - c) ** 2 + (xx - c) ** 2 <= radius**2


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--hole-radius", type=float, default=45)
    ap.add_argument("--radius", type=float, default=5.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (args.size, args.size, 3), dtype=np.uint8)
    hole = disk_hole(args.size, args.hole_radius)
    print(f"image {args.size}x{args.size}, hole {int(hole.sum())} px, radius {args.radius}")

    backends = [("python", _fastmarch_py)]
    if _fastmarch is not None:
        backends.insert(0, ("cython", _fastmarch))
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    for name, mod in backends:
        t_fmm, (t, order) = best_of(lambda: mod.fmm_march(hole), args.repeat)
        t_fill, out = best_of(lambda: mod.telea_fill(img, hole, t, order, args.radius), args.repeat)
        results[name] = (t_fmm, t_fill, out)
        print(f"{name:>7}: march {t_fmm * 1e3:9.2f} ms   fill {t_fill * 1e3:9.2f} ms")

    if len(results) == 2:
        c, p = results["cython"], results["python"]
        print(f"speedup: march x{p[0] / c[0]:.0f}, fill x{p[1] / c[1]:.0f}")
        print("outputs identical:", np.array_equal(c[2], p[2]))


if __name__ == "__main__":
    main()
