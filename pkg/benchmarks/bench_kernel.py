"""Benchmarks the compiled kernels against the pure-Python twins.

Run:  python3 benchmarks/bench_kernel.py [--seconds 2]
"""

import argparse
import random
import time

from awarecheck._kernel_py import close_profiles as close_py
from awarecheck.checker import KXA, _compile_program, _context
from awarecheck.fuzz import random_sentence
from awarecheck.model import generate_random

try:
    from awarecheck._kernel_c import close_profiles as close_c
    from awarecheck._kernel_c import make_evaluator
except ImportError:
    close_c = None
    make_evaluator = None


def timed(fn, budget):
    n = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < budget:
        fn()
        n += 1
    return n / (time.perf_counter() - t0)


def closure_inputs(models):
    out = []
    for m in models:
        ctx = _context(m, KXA)
        agents = range(1, m.agents + 1)
        out.append((ctx.nw, ctx.lang_masks, ctx.prop_true,
                    [ctx.succ[i] for i in agents],
                    [ctx.aware[i] for i in agents],
                    True, True, True, True, True, False, 4_000_000))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seconds", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    models = [generate_random(2, 4, ["p", "q"], frozenset(), seed=k)
              for k in range(32)]
    inputs = closure_inputs(models)

    def run_closures(close):
        def go():
            for inp in inputs:
                close(*inp)
        return go

    rate_py = timed(run_closures(close_py), args.seconds)
    print(f"closure  python: {rate_py * len(inputs):8.0f} models/s")
    if close_c is not None:
        rate_c = timed(run_closures(close_c), args.seconds)
        print(f"closure  c:      {rate_c * len(inputs):8.0f} models/s "
              f"({rate_c / rate_py:.1f}x)")

    formulas = [random_sentence(rng, ("p", "q"), 2, max_depth=4,
                                quantifier_prob=0.3) for _ in range(64)]
    ctxs = [_context(m, KXA) for m in models]

    def run_pure():
        for ctx in ctxs:
            ctx._memo.clear()
            for f in formulas:
                ctx.masks(f, {})

    rate_pure = timed(run_pure, args.seconds)
    print(f"eval     python: {rate_pure * len(ctxs) * len(formulas):8.0f} "
          "evals/s")
    if make_evaluator is not None:
        evs = []
        for ctx in ctxs:
            agents = range(1, ctx.m.agents + 1)
            evs.append(make_evaluator(
                ctx.nw, ctx.prop_world_masks, ctx.prop_true,
                [ctx.succ[i] for i in agents],
                [ctx.aware[i] for i in agents], ctx.profiles))
        programs = [_compile_program(f, ctxs[0].pidx) for f in formulas]

        def run_fast():
            for ev in evs:
                for prog, root in programs:
                    ev.run(prog, root)

        rate_fast = timed(run_fast, args.seconds)
        print(f"eval     c:      {rate_fast * len(ctxs) * len(formulas):8.0f} "
              f"evals/s ({rate_fast / rate_pure:.1f}x)")


if __name__ == "__main__":
    main()
