"""Compare the compiled and pure-Python Howell form backends.

    python benchmarks/bench_howell.py [--rows 120] [--cols 160] [--modulus 16]
"""

import argparse
import timeit

import numpy as np

from twistlab import zn_linalg


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--rows", type=int, default=120)
    p.add_argument("--cols", type=int, default=160)
    p.add_argument("--modulus", type=int, default=16)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    A = rng.integers(0, args.modulus, size=(args.rows, args.cols), dtype=np.int64)
    backends = ["python"] + (["compiled"] if zn_linalg.BACKEND == "compiled" else [])
    results = {}
    for name in backends:
        results[name] = zn_linalg.howell_form(A, args.modulus, backend=name)
        t = min(timeit.repeat(lambda: zn_linalg.howell_form(A, args.modulus, backend=name),
                              number=1, repeat=args.repeat))
        print(f"{name:9s} {t * 1e3:9.2f} ms  ({args.rows}x{args.cols} mod {args.modulus})")
    if len(results) == 2:
        same = np.array_equal(results["python"], results["compiled"])
        print("backends agree" if same else "BACKENDS DISAGREE")
    else:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
