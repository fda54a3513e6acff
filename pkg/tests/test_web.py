import itertools

import pytest

from foamcalc.fixtures import BRAIDS, fixture, r1_kinked, r2_padded
from foamcalc.web import (
    SINK,
    SOURCE,
    ParseError,
    Web,
    WebError,
    braid_to_pd,
    find_reducible,
    parse_braid,
    parse_braid_text,
    parse_pd,
    resolve,
)


def _euler_ok(w: Web) -> bool:
    # each component of a planar web is a sphere: V - E + F = 2
    comps = w.components()
    faces = w.faces()
    return len(w.vertices) - len(w.edges) + len(faces) == 2 * len(comps)


def test_braid_parse_basic():
    d = parse_braid(2, [1, 1, 1])
    assert d.n == 3 and d.writhe() == 3
    assert parse_braid(2, []).free_loops == 2
    assert parse_braid_text("braid: 3; 1,-2").n == 2


@pytest.mark.parametrize(
    "text,col",
    [("2;1,x", 5), ("2; 1, -1,  zz", 12), ("2;1,,1", 5)],
)
def test_braid_text_errors_point_at_the_letter(text, col):
    with pytest.raises(ParseError) as exc:
        parse_braid_text(text)
    assert exc.value.line == 1 and exc.value.col == col


def test_braid_letter_range():
    with pytest.raises(ParseError):
        parse_braid(2, [2])
    with pytest.raises(ParseError):
        parse_braid(2, [0])


def test_pd_errors_have_line_and_column():
    with pytest.raises(ParseError) as exc:
        parse_pd("Xp[1,2,2,1]\n  junk")
    assert (exc.value.line, exc.value.col) == (2, 3)
    with pytest.raises(ParseError) as exc:
        parse_pd("Xp[1,2,3]")
    assert exc.value.line == 1
    with pytest.raises(ParseError):
        parse_pd("Xp[1,2,3,4]")  # dangling arcs


def test_empty_pd_is_the_empty_link():
    d = parse_pd("")
    assert d.n == 0 and d.free_loops == 0


@pytest.mark.parametrize("name", ["hopf", "trefoil", "figure8", "t2_5"])
def test_braid_to_pd_round_trip(name):
    strands, word = BRAIDS[name]
    a = parse_braid(strands, word)
    b = parse_pd(braid_to_pd(strands, word))
    assert a.n == b.n
    for alpha in itertools.product((0, 1), repeat=a.n):
        ra, rb = resolve(a, alpha), resolve(b, alpha)
        assert (ra.q_shift, ra.height) == (rb.q_shift, rb.height)
        assert len(ra.web.circles) == len(rb.web.circles)
        assert len(ra.web.vertices) == len(rb.web.vertices)


@pytest.mark.parametrize("name", ["trefoil", "figure8"])
def test_resolution_webs_are_valid_planar_webs(name):
    d = fixture(name)
    for alpha in itertools.product((0, 1), repeat=d.n):
        r = resolve(d, alpha)
        r.web.validate()
        assert _euler_ok(r.web)
        assert sum(alpha) == r.height + sum(1 for c in d.crossings if c.sign < 0)


def test_zip_then_unzip_is_identity():
    w = Web(circles={"a", "b"})
    z = w.zip(("a", 0), ("b", 1), bar="bar")
    kinds = sorted(pol for pol, _ in z.vertices.values())
    assert kinds == sorted([SINK, SOURCE])
    assert z.unzip("bar", "a", "b") == w
    assert w.vertices == {}  # the original is untouched


def test_zip_needs_a_common_face():
    w = Web(circles={"a"})
    with pytest.raises(WebError):
        w.zip(("a", 0), ("a", 0))


def test_find_reducible_order():
    w = Web(circles={"z", "b"})
    assert find_reducible(w).circle == "b"
    assert find_reducible(Web()) is None


def test_kink_and_padding_validate():
    for name in ("unknot", "hopf", "trefoil"):
        strands, word = BRAIDS[name]
        r1_kinked(fixture(name), sign=-1).validate()
        r1_kinked(fixture(name), sign=1, side=1).validate()
        r2_padded(strands, word).validate()
