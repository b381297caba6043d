"""Time each hot kernel on the compiled and numpy backends.

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from codenoise import kernels
from codenoise.gf2 import level_positions, random_code


def cases():
    rng = np.random.default_rng(0)
    code = random_code(20, 10, 1)
    cols = np.array(code.columns(), dtype=np.uint64)
    vec = rng.normal(size=1 << 20)
    ivec = rng.integers(-3, 4, size=1 << 20).astype(np.int64)
    batch = rng.integers(0, 1 << 12, size=(20_000, 24)).astype(np.uint64)
    dense = random_code(16, 12, 2)
    idx = level_positions(dense, 8)
    small = random_code(14, 9, 3)
    sidx = level_positions(small, 7)
    table = np.zeros(1 << small.k, dtype=np.uint8)
    table[sidx] = 1
    return {
        "fwht_float 2^20": lambda k: k.fwht_float(vec.copy()),
        "fwht_int 2^20": lambda k: k.fwht_int(ivec.copy()),
        "subset_ranks n=20": lambda k: k.subset_ranks(cols, 20, 10),
        "batch_rank 20000x24": lambda k: k.batch_rank(batch, 12),
        f"pair_sum_total m={len(idx)}": lambda k: k.pair_sum_total(idx, dense.k),
        f"census_oracle m={len(sidx)}": lambda k: k.census_oracle(sidx.astype(np.uint64), table),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(kernels.BACKENDS)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases().items():
        times = {}
        for n in names:
            impl = kernels.get_backend(n)
            times[n] = min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
        row = f"{label:28s}" + "".join(f"{times[n] * 1e3:10.1f}ms" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
