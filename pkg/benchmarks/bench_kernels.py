"""Benchmark the fuzzy-lookup kernel: compiled extension vs pure Python.

The terminology scan is the only hot loop in the workbench: every
suggestion request runs the query against the whole term list with a
bounded edit distance. Run with::

    python3 benchmarks/bench_kernels.py [--terms 50000] [--queries 200]
"""

import argparse
import random
import string
import time

from dupla._kernels import IMPLEMENTATION, pure

try:
    from dupla._kernels import _fast
except ImportError:
    _fast = None


def synthetic_terms(count: int, rng: random.Random) -> list[str]:
    alphabet = string.ascii_lowercase + "çãõéí"
    terms = set()
    while len(terms) < count:
        length = rng.randint(3, 18)
        terms.add("".join(rng.choice(alphabet) for _ in range(length)))
    return sorted(terms)


def perturb(term: str, rng: random.Random) -> str:
    ops = rng.randint(0, 2)
    chars = list(term)
    for _ in range(ops):
        kind = rng.choice(("del", "ins", "sub"))
        pos = rng.randrange(len(chars)) if chars else 0
        if kind == "del" and chars:
            chars.pop(pos)
        elif kind == "ins":
            chars.insert(pos, rng.choice(string.ascii_lowercase))
        elif chars:
            chars[pos] = rng.choice(string.ascii_lowercase)
    return "".join(chars) or "a"


def run_scan(impl, queries, terms) -> float:
    start = time.perf_counter()
    hits = 0
    for query in queries:
        hits += len(impl.scan(query, terms, 6, 1, 2))
    elapsed = time.perf_counter() - start
    print(f"    {hits} total hits")
    return elapsed


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--terms", type=int, default=50_000)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    terms = synthetic_terms(args.terms, rng)
    queries = [perturb(rng.choice(terms), rng) for _ in range(args.queries)]
    print(f"selected implementation: {IMPLEMENTATION}")
    print(f"{args.queries} queries against {len(terms)} terms\n")

    print("pure Python:")
    pure_time = run_scan(pure, queries, terms)
    print(f"    {pure_time:.2f}s ({pure_time / args.queries * 1e3:.1f} ms/query)\n")

    if _fast is None:
        print("compiled extension not built; nothing to compare")
        return
    print("compiled extension:")
    fast_time = run_scan(_fast, queries, terms)
    print(f"    {fast_time:.2f}s ({fast_time / args.queries * 1e3:.1f} ms/query)\n")
    print(f"speedup: {pure_time / fast_time:.1f}x")


if __name__ == "__main__":
    main()
