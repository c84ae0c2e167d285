"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_backends.py [--repeat 5] [--steps 1000]

Times tape evaluation, the dv/du quadrature and the arc-length quadrature on
every shipped problem. numba compile time is reported separately and excluded
from the per-call figures.
"""
import argparse
import time

import numpy as np

from lorentzlox import kernels
from lorentzlox.catalog import PROBLEMS
from lorentzlox.expr import compile_tape, parse
from lorentzlox.loxodrome import arc_length, solve_v


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args(argv)

    names = [b for b in kernels.BACKENDS if _available(b)]
    tape = compile_tape(parse("sqrt(2 + cos(u))*log(3 + u^2) - sinh(u/3)^3"))
    u = np.linspace(-1, 1, 200_000)
    problems = {k: (spec, spec.build()) for k, spec in PROBLEMS.items()}

    rows = []
    for name in names:
        kernels.use(name)
        mod = kernels.active
        t = time.perf_counter()
        mod.eval_tape(tape.ops, tape.args, u[:10])
        for spec, p in problems.values():
            solve_v(p, spec.u1, 4)
            arc_length(p, spec.u1, pieces=2)
        warm = time.perf_counter() - t
        ev = best_of(lambda: mod.eval_tape(tape.ops, tape.args, u), args.repeat)
        sv = sum(best_of(lambda: solve_v(p, spec.u1, args.steps), args.repeat)
                 for spec, p in problems.values())
        al = sum(best_of(lambda: arc_length(p, spec.u1), args.repeat)
                 for spec, p in problems.values())
        rows.append((name, warm, ev, sv, al))

    print(f"{len(problems)} problems, {args.steps} steps, best of {args.repeat}")
    print(f"{'backend':8} {'warm-up s':>10} {'eval_tape ms':>13} {'solve_v ms':>11} {'arc_length ms':>14}")
    for name, warm, ev, sv, al in rows:
        print(f"{name:8} {warm:10.3f} {ev * 1e3:13.2f} {sv * 1e3:11.2f} {al * 1e3:14.2f}")
    if len(rows) == 2:
        (_, _, e0, s0, a0), (_, _, e1, s1, a1) = rows
        print(f"numpy / numba: eval_tape {e1 / e0:.1f}x, solve_v {s1 / s0:.1f}x, arc_length {a1 / a0:.1f}x")


def _available(name):
    try:
        kernels.load(name)
    except ImportError:
        return False
    return True


if __name__ == "__main__":
    main()
