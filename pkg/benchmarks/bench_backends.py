"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_backends.py [--repeat N]

Times the hot paths (kernel evaluation, one Nelder-Mead run, one full
definitional measure) under each available backend and prints a table.
"""
import argparse
import timeit

import numpy as np

from imaginarity import available_backends, set_backend
from imaginarity import _backend
from imaginarity.divergences import Family, kernel_objective
from imaginarity.measures import MeasureKind, measure_definitional
from imaginarity.optimizer import OptConfig
from imaginarity.states import canonical_density, random_density


def cases():
    rho2 = canonical_density(0.3)
    rho4 = random_density(4, seed=1)
    sigma4 = random_density(4, seed=2).real
    sigma4 = (sigma4 + sigma4.T) / 2

    def kernel_eval():
        obj = kernel_objective(Family.O, rho4, 0.75)
        for _ in range(100):
            obj(sigma4)

    def simplex():
        impl = _backend.impl
        obj = impl.ParamObjective(kernel_objective(Family.S, rho2, 0.75), 0)
        impl.nelder_mead(obj, np.array([0.7, 0.1, 0.7]), 0.3, 1e-11, 1e-6, 20000)

    def measure_qubit():
        measure_definitional(rho2, MeasureKind("T", 0.75), OptConfig(restarts=4))

    def measure_dim4():
        measure_definitional(rho4, MeasureKind("S", 0.75), OptConfig(restarts=1))

    return [("100 operator kernels, dim 4", kernel_eval),
            ("one Nelder-Mead run, qubit", simplex),
            ("definitional T, qubit, 4 starts", measure_qubit),
            ("definitional S, dim 4, 1 start", measure_dim4)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = available_backends()
    results = {}
    for name in names:
        prev = set_backend(name)
        try:
            for label, fn in cases():
                results[(label, name)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        finally:
            set_backend(prev)
    header = f"{'case':<34}" + "".join(f"{n + ' [ms]':>16}" for n in names)
    if len(names) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for label, _ in cases():
        row = f"{label:<34}" + "".join(f"{1e3 * results[(label, n)]:>16.3f}" for n in names)
        if len(names) > 1:
            row += f"{results[(label, 'python')] / results[(label, 'cython')]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
