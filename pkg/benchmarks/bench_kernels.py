"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--dims 5 10 20 30]

Prints one line per (kernel, dim) with the best-of-N wall time of each
backend, the speedup, and the max deviation between their results.
"""

import argparse
import time

import numpy as np

from bpb import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def random_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (A + A.conj().T)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 10, 20, 30])
    ap.add_argument("--angles", type=int, default=90)
    ap.add_argument("--points", type=int, default=200_000)
    args = ap.parse_args(argv)

    fast = kernels.compiled_backend()
    slow = kernels.python_backend
    if fast is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    thetas = np.linspace(0.0, 2 * np.pi, args.angles, endpoint=False)

    print(f"{'kernel':<18}{'dim':>5}{'compiled ms':>14}{'python ms':>12}{'speedup':>10}{'max dev':>12}")
    for n in args.dims:
        H = random_hermitian(rng, n)
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        cases = {
            "jacobi_eigh": (lambda m: np.sort(m.jacobi_eigh(H, True)[0])),
            "lambda_max_sweep": (lambda m: m.lambda_max_sweep(T, thetas)),
        }
        if n <= 3:
            X = rng.standard_normal((args.points, n)) + 1j * rng.standard_normal((args.points, n))
            X /= np.linalg.norm(X, axis=1, keepdims=True)
            cases["points_max"] = lambda m: np.array([m.points_max(T, X, 0)[0]])
        for name, fn in cases.items():
            repeat = 1 if name == "lambda_max_sweep" and n > 10 else args.repeat
            tf, a = best_of(lambda: fn(fast), repeat)
            ts, b = best_of(lambda: fn(slow), repeat)
            dev = float(np.max(np.abs(a - b)))
            print(f"{name:<18}{n:>5}{tf * 1e3:>14.3f}{ts * 1e3:>12.3f}{ts / tf:>10.1f}{dev:>12.2e}")


if __name__ == "__main__":
    main()
