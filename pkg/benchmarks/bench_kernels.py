"""Time the compiled and pure-Python branch-and-bound kernels on the same instances.

    python3 benchmarks/bench_kernels.py --sizes 15 20 25 30 --seeds 5

Both kernels explore identical trees, so node counts must agree; the script
checks that and reports per-instance medians and the speedup. Generated
scenarios are sized for about 30 requests; much larger N is usually
oversubscribed beyond total capacity and proven infeasible at the root.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from itertools import combinations

from slicekit.domain import SimilarityMatrix, SimilaritySource
from slicekit.ilp import KERNELS, SolveStatus, build_formulation, solve
from slicekit.scenario import GeneratorConfig, generate
from slicekit.similarity import baseline_similarity


def random_sim(n: int, p: float, seed: int) -> SimilarityMatrix:
    rng = random.Random(seed)
    pairs = frozenset(q for q in combinations(range(n), 2) if rng.random() < p)
    return SimilarityMatrix(n, pairs, SimilaritySource.EXPLICIT)


def time_one(formulation, scenario, kernel, node_limit, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = solve(formulation, scenario, node_limit, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[15, 20, 25, 30])
    ap.add_argument("--seeds", type=int, default=5, help="scenarios per size")
    ap.add_argument("--density", type=float, default=0.3, help="edge probability of the random similarity")
    ap.add_argument("--node-limit", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=3, help="best-of repeats per solve")
    args = ap.parse_args(argv)

    kernels = [k for k in ("cython", "python") if k in KERNELS]
    if len(kernels) < 2:
        print("compiled kernel not built; timing the Python kernel only", file=sys.stderr)

    header = f"{'N':>3} {'similarity':<10} {'optimal':>7} {'nodes(med)':>11} " + " ".join(f"{k + ' ms':>11}" for k in kernels)
    if len(kernels) == 2:
        header += f" {'speedup':>8}"
    print(header)
    for n in args.sizes:
        for label in ("baseline", "random"):
            times = {k: [] for k in kernels}
            nodes = []
            optimal = 0
            for seed in range(args.seeds):
                scen = generate(GeneratorConfig(seed=seed, n_requests=n))
                sim = baseline_similarity(scen) if label == "baseline" else random_sim(n, args.density, seed)
                form = build_formulation(scen, sim)
                results = {}
                for k in kernels:
                    elapsed, results[k] = time_one(form, scen, k, args.node_limit, args.repeat)
                    times[k].append(elapsed * 1e3)
                ref = results[kernels[0]]
                for k in kernels[1:]:
                    other = results[k]
                    assert (other.objective, other.nodes_explored) == (ref.objective, ref.nodes_explored), (n, seed)
                if ref.status is SolveStatus.NODE_LIMIT:
                    print(f"  N={n} seed={seed}: node limit reached", file=sys.stderr)
                optimal += ref.status is SolveStatus.OPTIMAL
                nodes.append(ref.nodes_explored)
            med = {k: statistics.median(v) for k, v in times.items()}
            line = f"{n:>3} {label:<10} {f'{optimal}/{args.seeds}':>7} {statistics.median(nodes):>11.0f} "
            line += " ".join(f"{med[k]:>11.2f}" for k in kernels)
            if len(kernels) == 2:
                line += f" {med['python'] / med['cython']:>7.1f}x"
            print(line, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
