"""Time the numba and numpy statevector kernels on the same gate batches.

    python benchmarks/bench_kernels.py --qubits 10 14 18 --gates 200 --repeat 5
"""
import argparse
import statistics
import time

import numpy as np

from qpatterns import kernels
from qpatterns.circuits import qft_circuit, run


def random_batch(rng, n, k):
    targets = rng.integers(0, n, size=k).astype(np.int64)
    cmasks = np.zeros(k, dtype=np.int64)
    mats = np.empty((k, 2, 2), dtype=np.complex128)
    for i in range(k):
        if n > 1 and rng.random() < 0.5:
            c = int(rng.integers(0, n - 1))
            cmasks[i] = 1 << (c if c < targets[i] else c + 1)
        q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        mats[i] = q
    return targets, cmasks, mats


def time_batch(backend, n, batch, repeat):
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1
    kernels.apply_ops(psi.copy(), n, *batch, backend=backend)  # warm-up / JIT compile
    samples = []
    for _ in range(repeat):
        work = psi.copy()
        t0 = time.perf_counter()
        kernels.apply_ops(work, n, *batch, backend=backend)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def time_qft(backend, n, repeat):
    c = qft_circuit(n)
    run(c, backend=backend)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        run(c, backend=backend)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[8, 12, 16, 20])
    ap.add_argument("--gates", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    print(f"{'workload':<14}{'qubits':>7}" + "".join(f"{b + ' [s]':>14}" for b in backends) + f"{'speedup':>10}")
    rng = np.random.default_rng(args.seed)
    for n in args.qubits:
        batch = random_batch(rng, n, args.gates)
        rows = {
            f"random x{args.gates}": [time_batch(b, n, batch, args.repeat) for b in backends],
            "qft": [time_qft(b, n, args.repeat) for b in backends],
        }
        for name, times in rows.items():
            speed = f"{times[1] / times[0]:9.2f}x" if len(times) == 2 else f"{'n/a':>10}"
            print(f"{name:<14}{n:>7}" + "".join(f"{t:14.5f}" for t in times) + speed)


if __name__ == "__main__":
    main()
