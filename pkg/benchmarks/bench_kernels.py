"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Both backends are timed on the same inputs and their outputs are checked to
be identical before any timing is reported.
"""

import argparse
import sys
import timeit

import numpy as np

from relzk.kernels import _pykernels
from relzk.protocols.coloring import DEFAULT_EPSILON, _support_arrays, all_labeling_tables, num_questions
from relzk.protocols.graphs import complete_graph, cycle_graph

try:
    from relzk.kernels import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    for q in (31, 101, 211):
        yield f"binding q={q}", "binding_success_counts", (q,)
    k4 = complete_graph(4)
    q1, q2, w, _, acc = _support_arrays(k4, DEFAULT_EPSILON)
    tables = all_labeling_tables(k4)
    yield f"coloring K4 labelings S={len(tables)}", "coloring_acceptance", (tables, tables, q1, q2, w, acc)
    c8 = cycle_graph(8)
    q1, q2, w, _, acc = _support_arrays(c8, DEFAULT_EPSILON)
    rand = rng.integers(9, size=(20_000, num_questions(c8)))
    yield f"coloring C8 random S={len(rand)}", "coloring_acceptance", (rand, rand, q1, q2, w, acc)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'case':<32}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn, inputs in _cases(rng):
        py, cy = getattr(_pykernels, fn), getattr(_ckernels, fn)
        if not np.array_equal(np.asarray(py(*inputs)), np.asarray(cy(*inputs))):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        t_py = min(timeit.repeat(lambda: py(*inputs), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: cy(*inputs), number=1, repeat=args.repeat))
        print(f"{name:<32}{1e3 * t_py:>12.2f}{1e3 * t_cy:>12.2f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
