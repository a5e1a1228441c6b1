"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times each kernel on inputs taken from the library's real workloads
(pencil evaluations of random caterpillars, Sturm chains of their psi)
and a full shape-to-ratio pass, then prints per-kernel speedups.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from qcaterpillar import _kernels_py
from qcaterpillar.pencil import build_pencil, pencil_matrices
from qcaterpillar.poly import sturm_chain
from qcaterpillar.tree import random_shape, shape_to_tree

try:
    from qcaterpillar import _kernels as _compiled
except ImportError:
    _compiled = None


def workloads(seed: int = 0):
    rng = random.Random(seed)
    trees = [shape_to_tree(random_shape(p, rng.randrange(10 ** 9))) for p in (12, 20, 30, 40)]
    mats = []
    for t in trees:
        a, d = pencil_matrices(t)
        for z in (3, -5, 17):
            mats.append([[a[i][j] - (z * d[i] if i == j else 0) for j in range(t.p)] for i in range(t.p)])
    chains = [sturm_chain(build_pencil(t).omega) for t in trees[:3]]
    points = [(rng.randrange(-2 ** 40, 2 ** 40), 2 ** 41) for _ in range(40)]
    return mats, chains, points


def bench(impl, mats, chains, points, repeat):
    cases = {
        "bareiss_det": lambda: [impl.bareiss_det([r[:] for r in m]) for m in mats],
        "horner_eval": lambda: [impl.horner_eval(c, n, d) for c in chains[-1] for n, d in points],
        "sign_variations": lambda: [impl.sign_variations(ch, n, d) for ch in chains for n, d in points],
    }
    return {name: min(timeit.repeat(fn, number=3, repeat=repeat)) / 3 for name, fn in cases.items()}


def end_to_end(backend_env: str) -> float:
    code = ("import time, random\n"
            "from qcaterpillar.tree import random_shape, shape_to_tree\n"
            "from qcaterpillar.pencil import psi_theta_ratio\n"
            "rng = random.Random(1)\n"
            "shapes = [random_shape(rng.randint(20, 40), rng.randrange(10**9)) for _ in range(40)]\n"
            "t = time.perf_counter()\n"
            "for s in shapes: psi_theta_ratio(shape_to_tree(s))\n"
            "print(time.perf_counter() - t)\n")
    env = dict(os.environ, QCAT_PURE_PYTHON=backend_env)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    mats, chains, points = workloads()
    py = bench(_kernels_py, mats, chains, points, args.repeat)
    if _compiled is None:
        print("compiled kernels not built; pure-Python timings only")
    cy = bench(_compiled, mats, chains, points, args.repeat) if _compiled else {}
    print(f"{'kernel':<18}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, t in py.items():
        c = cy.get(name)
        print(f"{name:<18}{t * 1e3:>14.2f}" + (f"{c * 1e3:>14.2f}{t / c:>9.1f}x" if c else ""))
    py_e2e = end_to_end("1")
    line = f"{'psi/theta x40':<18}{py_e2e * 1e3:>14.1f}"
    if _compiled:
        cy_e2e = end_to_end("0")
        line += f"{cy_e2e * 1e3:>14.1f}{py_e2e / cy_e2e:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
