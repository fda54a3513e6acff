"""Spider evaluations and the pairing on the two smoothings of a crossing."""

from foamcalc.simplify import graded_dimension, simplify
from foamcalc.selftest import _theta_web
from foamcalc.spider import determinant, evaluate_closed_web, pairing_matrix, two_strand_basis
from foamcalc.web import Web

circle = Web(circles={"c"})
theta = _theta_web()
for name, w in (("circle", circle), ("theta", theta)):
    print(f"{name}: spider {evaluate_closed_web(w)}  | simplify shifts {graded_dimension(simplify(w))}")

M = pairing_matrix(list(two_strand_basis()))
for row in M:
    print("  ", "   ".join(str(x) for x in row))
print("det:", determinant(M))
