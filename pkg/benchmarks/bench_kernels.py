"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is called directly on both backends with identical inputs; the
results must agree, and the best-of-N wall time is reported.
"""

import argparse
import random
import time
from itertools import combinations

from genset import _pykernels, kernels
from genset.kneser import Graph, _hom_plan, blow_up, complete, cycle, disjointness_graph, kneser_graph, petersen_graph
from genset.setfam import balanced_partition, canonical_generator
from genset.stability import kpartization_distance_exact


def _cases():
    f62 = disjointness_graph(canonical_generator(balanced_partition(6, 2)))
    k72 = kneser_graph(7, 2)
    k83 = kneser_graph(8, 3)
    pet = petersen_graph()
    k62 = kneser_graph(6, 2)
    cases = [
        ("clique_counts K(7,2)", "clique_counts", (k72.adj, k72.order)),
        ("clique_counts K(8,3)", "clique_counts", (k83.adj, k83.order)),
        ("clique_counts H[F(6,2)]", "clique_counts", (f62.adj, f62.order)),
    ]
    for name, pattern, g in (
        ("K3 x 2 -> H[F(6,2)]", blow_up(complete(3), [2, 2, 2]), f62),
        ("C5 -> K(7,2)", cycle(5), k72),
        ("C7 -> K(7,2)", cycle(7), k72),
    ):
        prev, free = _hom_plan(pattern)
        cases.append((f"hom_count {name}", "hom_count", (prev, free, g.adj, g.order)))
    cases.append(("max_cut Petersen", "max_cut", (pet.adj, pet.order)))
    cases.append(("max_cut K(6,2)", "max_cut", (k62.adj, k62.order)))
    rng = random.Random(0)
    g22 = Graph.from_edges(22, [e for e in combinations(range(22), 2) if rng.random() < 0.5])
    cases.append(("max_cut G(22, 1/2)", "max_cut", (g22.adj, g22.order)))
    # the 3-partition kernel, fed an upper bound one above the optimum
    best = kpartization_distance_exact(k62, 3)
    cases.append(("min_kpartition_defect K(6,2), k=3", "min_kpartition_defect",
                  (k62.adj, k62.order, 3, best + 1)))
    return cases


def _norm(r):
    return tuple(r) if isinstance(r, (list, tuple)) else r


def _time(fn, args, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    compiled = kernels._ckernels
    if compiled is None:
        print("compiled backend unavailable; timing the Python backend only")
    print(f"{'case':48s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, kernel, call in _cases():
        py_t, py_r = _time(getattr(_pykernels, kernel), call, args.repeat)
        if compiled is None:
            print(f"{name:48s} {py_t:10.4f} {'-':>10s} {'-':>8s}")
            continue
        c_t, c_r = _time(getattr(compiled, kernel), call, args.repeat)
        if _norm(py_r) != _norm(c_r):
            raise SystemExit(f"backends disagree on {name}: {py_r} vs {c_r}")
        print(f"{name:48s} {py_t:10.4f} {c_t:10.4f} {py_t / max(c_t, 1e-9):7.1f}x")


if __name__ == "__main__":
    main()
