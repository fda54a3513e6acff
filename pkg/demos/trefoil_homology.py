"""Build the reduced cube complex of the trefoil and read off its homology."""

import time

from foamcalc import build_complex, check_d_squared, fixture, homology_poincare, quantum_invariant

d = fixture("trefoil")
t0 = time.perf_counter()
C = build_complex(d)
print("summands per height:", {h: len(v) for h, v in sorted(C.chains.items())})
print("d^2 = 0:", check_d_squared(C))
P = homology_poincare(C)
print("Poincare polynomial:", P)
print("at t = -1:          ", P.eval_t(-1))
print("quantum invariant:  ", quantum_invariant(d))
print(f"{time.perf_counter() - t0:.2f} s")
