"""Compare the compiled and numpy rank kernels over F_p.

    python3 benchmarks/bench_rank.py [--sizes 50 100 200 400] [--prime 2] [--repeat 3]

Prints one line per matrix: shape, rank, best time of each kernel, speedup.
The last block times the boundary maps of a real tree complex.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from enlab import exactla
from enlab.algdata import builtin
from enlab.coeffsys import loday
from enlab.encomplex import build_chain
from enlab.exactla import Field, _rank_py


def _best(kernel, a: np.ndarray, p: int, repeat: int) -> tuple[float, int]:
    out = {}

    def once():
        out["rank"] = kernel(a.copy(), p)

    return min(timeit.repeat(once, number=1, repeat=repeat)), out["rank"]


def _line(label: str, a: np.ndarray, p: int, repeat: int) -> None:
    t_py, r_py = _best(_rank_py.rank_mod_p_dense, a, p, repeat)
    if exactla.BACKEND == "compiled":
        t_c, r_c = _best(exactla._kernel, a, p, repeat)
        assert r_c == r_py, (label, r_c, r_py)
        print(f"{label:<28} rank {r_py:>5}  numpy {t_py * 1e3:9.2f} ms  compiled {t_c * 1e3:9.2f} ms  x{t_py / t_c:6.1f}")
    else:
        print(f"{label:<28} rank {r_py:>5}  numpy {t_py * 1e3:9.2f} ms  (compiled kernel not built)")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--prime", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    p, rng = args.prime, np.random.default_rng(args.seed)
    print(f"backend: {exactla.BACKEND}, p = {p}")

    for n in args.sizes:
        a = rng.integers(0, p, size=(n, n), dtype=np.int64)
        _line(f"random {n}x{n}", a, p, args.repeat)
        # half rank: product of thin factors
        thin = (rng.integers(0, p, (n, n // 2)) @ rng.integers(0, p, (n // 2, n))) % p
        _line(f"rank-deficient {n}x{n}", thin.astype(np.int64), p, args.repeat)

    a3, m3 = builtin("trunc_poly:3", module="A")
    C = build_chain(loday(a3, m3, Field(p)), 6, n=2)
    for k in range(1, 7):
        d = C.diff[k]
        dense = np.zeros(d.shape, dtype=np.int64)
        for (r, c), v in d.entries.items():
            dense[r, c] = int(v)
        _line(f"tree complex d_{k} {d.shape[0]}x{d.shape[1]}", dense, p, args.repeat)


if __name__ == "__main__":
    main()
