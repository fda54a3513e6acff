import json
from fractions import Fraction

import pytest

from foamcalc.foam import (
    REVERSED,
    Birth,
    Choke,
    Death,
    FoamSum,
    Handle,
    Movie,
    MovieError,
    Unzip,
    Zip,
    assemble,
    brute_force_evaluate,
    cut_half,
    eval_movie_sum,
    evaluate_assembled,
    evaluate_closed,
    evaluate_glued,
    evaluate_skeleton,
    foam_degree,
    glue_halves,
    movie_from_json,
    replay,
    skeleton_key,
)
from foamcalc.selftest import CLOSED_TABLE, THETA_MOVIE, _closed_h, corpus_movies, corpus_webs
from foamcalc.simplify import simplify
from foamcalc.web import Web


@pytest.fixture(scope="module")
def movies():
    return corpus_movies(("hopf", "trefoil"), limit=120)


@pytest.mark.parametrize("name,events,want", CLOSED_TABLE, ids=[r[0] for r in CLOSED_TABLE])
def test_closed_table(name, events, want):
    assert evaluate_closed(events) == want


def test_replay_choke_sphere():
    f = replay(Movie.closed([Birth("a"), Choke("a"), Death("a")]))
    assert sorted(x.chi for x in f.facets) == [-1, 1, 1]
    assert f.total_chi == 1 and len(f.seams) == 1
    assert foam_degree(f) == 2


def test_replay_theta_is_three_discs_on_a_seam():
    f = replay(Movie.closed(THETA_MOVIE))
    assert [x.chi for x in f.facets] == [1, 1, 1]
    assert len(f.seams) == 1 and len(set(f.seams[0])) == 3


@pytest.mark.parametrize(
    "events,deg",
    [((Birth("a"), Death("a")), 4), ((Birth("a"), Handle("a"), Death("a")), 0), (THETA_MOVIE, 6)],
)
def test_degrees(events, deg):
    assert foam_degree(replay(Movie.closed(events))) == deg


def test_open_movie_degree_counts_boundary():
    # birth of a circle: a cup, chi 1, boundary needs no vertices
    a = assemble(Web(), [Birth("a")])
    assert not a.closed and foam_degree(a) == 2


def test_seam_swap_negates():
    std = evaluate_closed((Birth("a"), Choke("a"), Choke("a"), Death("a")))
    rev = evaluate_closed((Birth("a"), Choke("a"), Choke("a", REVERSED), Death("a")))
    assert std == -9 and rev == 9


def test_disjoint_union_is_multiplicative():
    torus = (Birth("a"), Handle("a"), Death("a"))
    chokes = (Birth("b"), Choke("b"), Choke("b"), Death("b"))
    interleaved = (Birth("a"), Birth("b"), Handle("a"), Choke("b"), Choke("b"), Death("a"), Death("b"))
    assert evaluate_closed(torus + chokes) == 3 * -9
    assert evaluate_closed(interleaved) == 3 * -9


def test_eval_movie_sum_is_bilinear():
    cup = Movie(Web(), (Birth("a"),))
    cap = Movie(cup.target, (Death("a"),))
    tube = Movie(cup.target, (Handle("a"), Death("a")))
    s = FoamSum([(Fraction(2), cap), (Fraction(1, 3), tube)])
    assert eval_movie_sum([FoamSum.single(cup), s]) == 2 * 0 + Fraction(1, 3) * 3
    with pytest.raises(MovieError):
        eval_movie_sum([FoamSum.single(cup)])


def test_brute_force_agrees(movies):
    checked = 0
    for events in movies:
        f = assemble(Web(), events)
        if len(f.orbit_facet) > 9:
            continue
        assert brute_force_evaluate(f) == evaluate_assembled(f), events
        checked += 1
    assert checked >= 20


def test_nonzero_foams_have_an_even_number_of_seams(movies):
    nonzero = 0
    for events in movies:
        f = assemble(Web(), events)
        if evaluate_assembled(f):
            nonzero += 1
            assert len(f.seams) % 2 == 0
    assert nonzero > 0


@pytest.mark.parametrize("label", ["theta", "closed H", "trefoil 011", "figure8 1010"])
def test_glued_matches_assembled(label):
    w = dict(corpus_webs(("trefoil", "figure8")))[label]
    ss = simplify(w)
    for a in ss[:6]:
        for b in ss[:6]:
            events = b.i_events + a.p_events
            top = cut_half("top", w, b.i_events, check=True)
            bottom = cut_half("bottom", w, a.p_events, check=True)
            assert evaluate_glued(top, bottom) == evaluate_closed(events)
            chi, seams = glue_halves(top, bottom)
            assert sum(chi) == assemble(Web(), events).total_chi


def test_cut_half_checks_its_endpoint():
    w = Web(circles={"a"})
    with pytest.raises(MovieError):
        cut_half("top", w, (Birth("a"), Handle("a"), Death("a")))
    with pytest.raises(MovieError):
        cut_half("bottom", w, ())


def test_skeleton_key_ignores_facet_names():
    w = _closed_h()
    ss = simplify(w)
    chi, seams = glue_halves(cut_half("top", w, ss[0].i_events), cut_half("bottom", w, ss[0].p_events))
    n = len(chi)
    perm = list(range(n))[::-1]
    chi2 = [0] * n
    for f in range(n):
        chi2[perm[f]] = chi[f]
    seams2 = [tuple(perm[f] for f in s) for s in seams]
    assert skeleton_key(chi, seams) == skeleton_key(chi2, seams2)
    v = evaluate_skeleton(chi, seams)
    assert v == evaluate_skeleton(chi2, seams2)
    assert v * ss[0].p_coeff * ss[0].i_coeff == 1


def test_json_round_trip():
    m = Movie.closed(THETA_MOVIE)
    back = movie_from_json(json.dumps(m.to_json()))
    assert back.events == m.events and evaluate_closed(back) == evaluate_closed(m)


def test_errors_name_the_event():
    with pytest.raises(MovieError, match="event 1"):
        movie_from_json({"source": {}, "events": [{"op": "birth", "id": "a"}, {"op": "death", "id": "zz"}]})
    with pytest.raises(MovieError, match="event 0"):
        movie_from_json({"events": [{"op": "fly"}]})
    with pytest.raises(MovieError):
        Movie.closed([Birth("a"), Zip(("a", 0), ("a", 0))])
    with pytest.raises(MovieError):
        Movie.closed([Birth("a"), Unzip("a")])
