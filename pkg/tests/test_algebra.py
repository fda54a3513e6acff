from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from foamcalc.algebra import BIGON, CIRCLE, BiPoly, LaurentPoly

laurent = st.dictionaries(st.integers(-6, 6), st.fractions(max_denominator=5).filter(bool), max_size=5).map(LaurentPoly)


def test_quantum_integers():
    assert LaurentPoly.quantum_int(3) == CIRCLE
    assert LaurentPoly.quantum_int(2) == BIGON
    assert str(CIRCLE) == "q^-2 + 1 + q^2"


def test_formatting_and_json():
    p = LaurentPoly({-1: Fraction(-1, 3), 2: 2})
    assert str(p) == "-1/3*q^-1 + 2*q^2"
    assert p.to_json() == [{"q": -1, "coeff": "-1/3"}, {"q": 2, "coeff": "2"}]
    assert str(LaurentPoly()) == "0"
    assert str(LaurentPoly.const(1)) == "1"


def test_bipoly_eval_and_json():
    P = BiPoly({(0, 2): 1, (2, 6): 1, (3, 8): 2})
    assert P.eval_t(-1) == LaurentPoly({2: 1, 6: 1, 8: -2})
    assert P.to_json()[0] == {"t": 0, "q": 2, "dim": 1}


def test_exact_division():
    assert (CIRCLE * BIGON).divmod_exact(BIGON) == CIRCLE
    with pytest.raises(ValueError):
        CIRCLE.divmod_exact(BIGON * BIGON)


@settings(max_examples=60, deadline=None)
@given(laurent, laurent, laurent)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == LaurentPoly()


@settings(max_examples=40, deadline=None)
@given(laurent, st.integers(-4, 4))
def test_shift_is_multiplication_by_monomial(a, k):
    assert a.shift(k) == a * LaurentPoly.monomial(k)
