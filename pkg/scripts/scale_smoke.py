"""Full pipeline on a random dense chain, reporting wall time and traced peak memory.

    python scripts/scale_smoke.py --dim 20 --order 4
"""
import argparse
import time
import tracemalloc

import numpy as np

from homc import ever_reaching, k_step_tensor, mfpt_direct, validate_transition_tensor


def random_chain(dim, order, seed):
    p = np.random.default_rng(seed).random((dim,) * order)
    return p / p.sum(axis=0, keepdims=True)


def run_pipeline(dim=20, order=4, seed=0):
    """Returns ``(seconds, peak_bytes / tensor_bytes, results)``; memory counts the input too."""
    tracemalloc.start()
    tracemalloc.reset_peak()
    start = time.perf_counter()
    p = validate_transition_tensor(random_chain(dim, order, seed))
    results = {
        "kstep": k_step_tensor(p, 3),
        "erp": ever_reaching(p),
        "mfpt": mfpt_direct(p),
    }
    elapsed = time.perf_counter() - start
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return elapsed, peak / p.tensor.nbytes, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dim", type=int, default=20)
    parser.add_argument("--order", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    elapsed, ratio, res = run_pipeline(args.dim, args.order, args.seed)
    print(f"n={args.dim} m={args.order} entries={args.dim ** args.order}")
    print(f"wall time {elapsed:.2f} s, peak traced memory {ratio:.2f} x tensor size")
    print(f"erp terms {res['erp'].terms_used} converged={res['erp'].converged}")
    print(f"mfpt solver {res['mfpt'].solver} residual {res['mfpt'].residual_max:.2e}")


if __name__ == "__main__":
    main()
