"""Compare the numba kernels with the numpy fallback.

Each backend runs in its own interpreter, because the backend is chosen at
import time from DELTAMOD_NO_NUMBA. Numba timings exclude the first
(compiling) call.

    python3 benchmarks/bench_kernels.py            # both backends, table
    python3 benchmarks/bench_kernels.py --json     # machine-readable
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _best_of(fn, repeat):
    fn()  # warm-up, includes numba compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def measure(repeat: int) -> dict:
    from deltamod import backend, linalg
    from deltamod.catalog import build_A, build_Aprime, build_named
    from deltamod.structure import has_minor

    a6 = build_A(6).matrix
    ap7 = build_Aprime(7).matrix

    def max_minor_a6():
        assert linalg.max_abs_minor(a6, 6) == 2

    def max_minor_ap7():
        assert linalg.max_abs_minor(ap7, 7) == 2

    def rank_oracle():
        # fresh matroid each call, so the memo does not hide the kernels
        M = build_A(6).matroid()
        M._memo.clear()
        for mask in range(1, 1 << 14):
            M.r(mask)

    def closure_a8():
        M = build_A(8).matroid()
        for i in range(len(M)):
            M.closure_mask(1 << i | 1 << ((i + 7) % len(M)))

    def minor_search():
        M = build_A(5).matroid()
        M._memo.clear()
        assert has_minor(M, build_named("U(2,5)")) is None

    cases = {
        "max_abs_minor(A_6, 6)": max_minor_a6,
        "max_abs_minor(A'_7, 7)": max_minor_ap7,
        "rank oracle, 16k subsets of A_6": rank_oracle,
        "closures in A_8": closure_a8,
        "U(2,5)-minor search in A_5": minor_search,
    }
    return {"backend": backend(), "timings": {k: _best_of(f, repeat) for k, f in cases.items()}}


def run_backend(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["DELTAMOD_NO_NUMBA"] = "1"
    else:
        env.pop("DELTAMOD_NO_NUMBA", None)
    out = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args(argv)
    if args.worker:
        print(json.dumps(measure(args.repeat)))
        return 0
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if args.json:
        print(json.dumps({"numba": fast, "numpy": slow}, indent=2))
        return 0
    width = max(len(k) for k in fast["timings"])
    print(f"{'case':<{width}}  {fast['backend']:>10}  {slow['backend']:>10}  speedup")
    for k, t_fast in fast["timings"].items():
        t_slow = slow["timings"][k]
        print(f"{k:<{width}}  {t_fast * 1e3:>8.1f}ms  {t_slow * 1e3:>8.1f}ms  {t_slow / t_fast:>6.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
