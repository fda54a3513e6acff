import copy
import random
from fractions import Fraction

import pytest
import sympy

from foamcalc.algebra import BiPoly, CIRCLE
from foamcalc.complex import (
    build_complex,
    chain_euler,
    check_d_squared,
    homology_poincare,
    poincare,
    rank,
)
from foamcalc.fixtures import fixture
from foamcalc.spider import quantum_invariant
from foamcalc.web import parse_braid


def test_unknot_has_no_differentials():
    C = build_complex(fixture("unknot"))
    assert C.heights() == [0] and C.qdegrees() == [-2, 0, 2]
    assert check_d_squared(C)
    assert homology_poincare(C) == BiPoly.from_laurent(CIRCLE)


def test_one_crossing_unknot_cube():
    C = build_complex(parse_braid(2, [1]))
    # two circles give 9 summands, the closed H gives 6; the kink cancels out
    assert {h: len(v) for h, v in C.chains.items()} == {0: 9, 1: 6}
    assert homology_poincare(C) == BiPoly.from_laurent(CIRCLE)


@pytest.mark.parametrize("name", ["hopf", "trefoil"])
def test_glued_and_direct_agree(name):
    a = build_complex(fixture(name), method="glued")
    b = build_complex(fixture(name), method="direct", check_grading=True)
    assert a.diffs == b.diffs
    assert homology_poincare(a) == homology_poincare(b)


def test_glued_grading_check():
    build_complex(fixture("figure8"), check_grading=True)


def test_corrupted_differential_breaks_d_squared():
    C = build_complex(fixture("trefoil"))
    assert check_d_squared(C)
    bad = copy.deepcopy(C)
    for key, M in sorted(bad.diffs.items()):
        nz = [(i, j) for i, r in enumerate(M) for j, x in enumerate(r) if x]
        nxt = bad.diffs.get((key[0] + 1, key[1]))
        if nz and nxt and any(any(r) for r in nxt):
            i, j = nz[0]
            M[i][j] *= 2
            if not check_d_squared(bad):
                return
            M[i][j] /= 2
    pytest.fail("no corruption was detected")


def test_rank_matches_sympy():
    rng = random.Random(3)
    for _ in range(40):
        r, c = rng.randint(0, 6), rng.randint(0, 6)
        M = [[Fraction(rng.choice([0, 0, 1, -1, 2, Fraction(1, 3)])) for _ in range(c)] for _ in range(r)]
        want = sympy.Matrix(r, c, [sympy.Rational(x.numerator, x.denominator) for row in M for x in row]).rank()
        assert rank(M) == want


@pytest.mark.parametrize("name", ["unknot", "unlink2", "hopf", "trefoil"])
def test_chain_euler_matches_spider(name):
    d = fixture(name)
    C = build_complex(d)
    assert chain_euler(C) == quantum_invariant(d)
    assert homology_poincare(C).eval_t(-1) == quantum_invariant(d)


def test_poincare_runs_checks():
    assert poincare(fixture("unlink2")) == BiPoly.from_laurent(CIRCLE * CIRCLE)
