"""Compare the compiled BDD kernel against the pure-Python one.

Runs a few representative inference workloads with each available kernel
and prints a timing table.  Workload sizes are chosen so the whole run
stays under a minute on a laptop.
"""

import argparse
import statistics
import time

from lpadc.benchgen import gen_blood, gen_gh, gen_graph
from lpadc.bdd import available_kernels
from lpadc.grounder import ground
from lpadc.infer import map_query, mpe, prob_result


def _prob(program, kernel):
    gp = ground(program)
    return prob_result(program, program.queries[0], evidence=[],
                       kernel=kernel, gp=gp).value


def _mpe(program, kernel):
    return mpe(program, kernel=kernel).value


def _map_half(program, kernel):
    gp = ground(program)
    n = max(1, len(gp.choice_vars) // 2)
    return map_query(program, query_cvs=list(range(n)),
                     kernel=kernel, gp=gp).value


WORKLOADS = [
    ("graph n=30 prob", lambda: gen_graph(30, seed=0), _prob),
    ("graph n=50 mpe", lambda: gen_graph(50, seed=0), _mpe),
    ("graph n=40 map 50%", lambda: gen_graph(40, seed=0), _map_half),
    ("gh size=10 prob", lambda: gen_gh(10), _prob),
    ("blood depth=2 prob", lambda: gen_blood(2), _prob),
]


def run(repeats):
    kernels = available_kernels()
    if len(kernels) < 2:
        print("only the %s kernel is available; timing it alone" % kernels[0])
    rows = []
    for name, make, solve in WORKLOADS:
        program = make()
        med = {}
        value = None
        for kernel in kernels:
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                got = solve(program, kernel)
                times.append(time.perf_counter() - start)
                if value is None:
                    value = got
                elif abs(got - value) > 1e-9:
                    raise SystemExit(
                        "kernel disagreement on %s: %r vs %r" % (name, got, value)
                    )
            med[kernel] = statistics.median(times)
        rows.append((name, med))
    return kernels, rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timings per workload; the median is reported")
    args = parser.parse_args(argv)
    kernels, rows = run(args.repeats)

    name_width = max(len("workload"), *(len(r[0]) for r in rows))
    header = ["workload".ljust(name_width)]
    header.extend(("%s (s)" % k).rjust(10) for k in kernels)
    if "py" in kernels and "cy" in kernels:
        header.append("py/cy".rjust(8))
    print("  ".join(header))
    for name, med in rows:
        cells = [name.ljust(name_width)]
        cells.extend(("%.4f" % med[k]).rjust(10) for k in kernels)
        if "py" in kernels and "cy" in kernels:
            ratio = med["py"] / med["cy"] if med["cy"] > 0 else float("inf")
            cells.append(("%.1fx" % ratio).rjust(8))
        print("  ".join(cells))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
