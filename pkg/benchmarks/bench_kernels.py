"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--samples 300] [--gates 20] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from qarch import _fallback

try:
    from qarch import _kernels
except ImportError:
    _kernels = None


def workload(n_qubits, n_samples, n_gates, seed=0):
    rng = np.random.default_rng(seed)
    states = rng.normal(size=(n_samples, 2 ** n_qubits)) + 1j * rng.normal(size=(n_samples, 2 ** n_qubits))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    kinds = rng.integers(0, 4, n_gates).astype(np.intc)
    q0 = rng.integers(0, n_qubits, n_gates).astype(np.intc)
    q1 = ((q0 + 1 + rng.integers(0, n_qubits - 1, n_gates)) % n_qubits).astype(np.intc)
    angles = rng.uniform(-np.pi, np.pi, n_gates)
    return states, kinds, q0, q1, angles


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=4)
    parser.add_argument("--samples", type=int, default=300)
    parser.add_argument("--gates", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    states, kinds, q0, q1, angles = workload(args.qubits, args.samples, args.gates)
    impls = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{args.samples} samples, {args.qubits} qubits, {args.gates} gates, best of {args.repeat}")
    results = {}
    for name, impl in impls:
        apply = min(timeit.repeat(lambda: impl.apply_gates(states.copy(), args.qubits, kinds, q0, q1, angles),
                                  number=1, repeat=args.repeat))
        grad = min(timeit.repeat(lambda: impl.expect_and_shift_grad(states, args.qubits, kinds, q0, q1,
                                                                    angles, 0),
                                 number=1, repeat=args.repeat))
        results[name] = (apply, grad)
        print(f"{name:>9}: apply {apply * 1e3:8.3f} ms   expectation+gradient {grad * 1e3:8.3f} ms")
    if _kernels is None:
        print("compiled extension not built; only the fallback was timed")
    else:
        (pa, pg), (ca, cg) = results["python"], results["compiled"]
        print(f"  speedup: apply {pa / ca:.1f}x   expectation+gradient {pg / cg:.1f}x")


if __name__ == "__main__":
    main()
