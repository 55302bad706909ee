"""Print the analytic results for the bundled example chains.

Usage: ``python scripts/reproduce_examples.py``
"""
import numpy as np

import homc
from homc import examples

np.set_printoptions(precision=4, suppress=True)


def slices(a):
    for j in range(a.shape[2]):
        print(f"  [:, :, {j + 1}]")
        print("  " + np.array2string(a[:, :, j]).replace("\n", "\n  "))


def main():
    reg = examples.regular_chain()
    print("4-state order-3 chain, P^10:")
    slices(homc.k_step_tensor(reg, 10))
    st = homc.stationary_distribution(reg)
    print("limiting distribution:", st.pi, f"(residual {st.residual:.1e})")
    print("regular:", homc.check_regular(reg))

    erg = examples.ergodic_chain()
    print("\nperiodic 3-state chain:")
    print("regular:", homc.check_regular(erg, 50))
    print("ergodic:", homc.check_ergodic(erg, 50))
    print("MFPT (direct):")
    slices(homc.mfpt_direct(erg).mu)
    it = homc.mfpt_iterative(erg)
    print(f"MFPT iteration converged in {it.iterations} iterations")

    tr = examples.transient_chain()
    er = homc.ever_reaching(tr, tol=1e-8)
    print(f"\never-reaching probabilities ({er.terms_used} terms):")
    slices(er.f)
    print("classes:", homc.classify_states(er).labels)

    first = examples.first_order_chain()
    print("\nfirst-order chain, P^5:")
    print(homc.k_step_tensor(first, 5))
    print("MFPT:")
    print(homc.mfpt_direct(first).mu)


if __name__ == "__main__":
    main()
