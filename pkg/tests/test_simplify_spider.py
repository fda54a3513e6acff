import itertools
import sys

import pytest

from foamcalc.algebra import BIGON, CIRCLE, LaurentPoly
from foamcalc.fixtures import fixture
from foamcalc.selftest import _closed_h, _theta_web, corpus_webs
from foamcalc.simplify import decomposition_selftest, graded_dimension, gram_matrix, simplify
from foamcalc.spider import (
    determinant,
    evaluate_closed_web,
    pairing,
    pairing_matrix,
    quantum_invariant,
    two_strand_basis,
)
from foamcalc.web import Web, resolve

S = sys.modules["foamcalc.simplify"]


def test_shift_multisets():
    assert graded_dimension(simplify(Web())) == LaurentPoly.const(1)
    assert graded_dimension(simplify(Web(circles={"c"}))) == CIRCLE
    assert graded_dimension(simplify(Web(circles={"c", "d"}))) == CIRCLE * CIRCLE
    assert graded_dimension(simplify(_theta_web())) == CIRCLE * BIGON


@pytest.mark.parametrize("label,w", corpus_webs(("trefoil",)), ids=lambda x: x if isinstance(x, str) else "")
def test_decomposition_is_an_isomorphism(label, w):
    rep = decomposition_selftest(w)
    assert rep["ok"], rep["problems"][:3]


def test_gram_matrix_is_identity():
    ss = simplify(_closed_h())
    G = gram_matrix(ss)
    assert all(G[a][b] == (a == b) for a in range(len(ss)) for b in range(len(ss)))


@pytest.mark.parametrize("h,v", [((1, 1), (1, -1)), ((1, -1), (1, 1))])
def test_wrong_square_signs_are_caught(monkeypatch, h, v):
    w = dict(corpus_webs(("figure8",)))["figure8 1010"]
    assert any("square" in t for s in simplify(w) for t in s.path)
    monkeypatch.setitem(S.SQUARE_SIGNS, "h", h)
    monkeypatch.setitem(S.SQUARE_SIGNS, "v", v)
    assert not decomposition_selftest(w)["ok"]


def test_closed_web_values():
    assert evaluate_closed_web(Web()) == LaurentPoly.const(1)
    assert evaluate_closed_web(Web(circles={"c"})) == CIRCLE
    assert evaluate_closed_web(_theta_web()) == CIRCLE * BIGON


@pytest.mark.parametrize("name", ["trefoil", "figure8"])
def test_spider_matches_simplification(name):
    # graded dimension of the decomposition equals the web's evaluation
    d = fixture(name)
    for alpha in itertools.product((0, 1), repeat=d.n):
        w = resolve(d, alpha).web
        assert graded_dimension(simplify(w)) == evaluate_closed_web(w)


def test_pairing_matrix():
    ident, h = two_strand_basis()
    M = pairing_matrix([ident, h])
    assert M[0][0] == CIRCLE * CIRCLE
    assert M[0][1] == M[1][0] == CIRCLE * BIGON
    assert M[1][1] == CIRCLE * BIGON * BIGON
    assert pairing(h, ident) == M[1][0]
    assert not determinant(M).is_zero()
    assert determinant(pairing_matrix([ident, ident])).is_zero()


COMPONENTS = {"unknot": 1, "unlink2": 2, "hopf": 2, "trefoil": 1, "figure8": 1, "t2_5": 1}


@pytest.mark.parametrize("name", sorted(COMPONENTS))
def test_quantum_invariant_at_q_one_counts_components(name):
    # at q = 1 every web evaluates to a colouring count, and the invariant to 3^components
    assert quantum_invariant(fixture(name)).evaluate(1) == 3 ** COMPONENTS[name]


def test_quantum_invariant_of_the_unknot():
    assert quantum_invariant(fixture("unknot")) == CIRCLE
