"""Reduce closed webs to graded sums of empty webs, with explicit foam maps.

Each summand carries a projection movie (web -> empty) and an inclusion movie
(empty -> web), each a single rational multiple of an event list.  The local
isomorphisms are

* circle:  q^-2, q^0, q^2 via caps, chokes and handles,
* bigon:   q^-1, q^1 via the bubble cap, its reverse, and a kiss,
* square:  two shift-0 summands via the horizontal and vertical half-rockets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .foam import (
    Birth,
    Choke,
    Death,
    Handle,
    MovieEvent,
    Unzip,
    Zip,
    apply_event,
    cut_half,
    evaluate_glued,
    evaluate_skeleton_cached,
    glue_halves,
)
from .web import Bigon, Circle, InvariantFailure, Square, Web, find_reducible, idkey

Events = Tuple[MovieEvent, ...]

# sign of each square summand (projection, inclusion), fixed by the self-test
SQUARE_SIGNS = {"h": (1, -1), "v": (1, -1)}


@dataclass
class Summand:
    shift: int
    p_coeff: Fraction
    p_events: Events  # web -> empty
    i_coeff: Fraction
    i_events: Events  # empty -> web
    path: Tuple[str, ...] = ()

    @property
    def p(self):
        return (self.p_coeff, self.p_events)

    @property
    def iota(self):
        return (self.i_coeff, self.i_events)


def unzip_default(w: Web, e) -> MovieEvent:
    """Unzip e, naming each merged strand after its sink-side piece."""
    (s1, t2), (s2, t1), *_ = w.unzip_pairs(e)
    return Unzip(e, s1, s2)


def inverse_event(w_before: Web, ev: MovieEvent) -> MovieEvent:
    """The event undoing ev, to be applied to the web after ev."""
    if ev.op == "birth":
        return Death(ev.target)
    if ev.op == "death":
        return Birth(ev.target)
    if ev.op in ("handle", "choke"):
        return ev
    if ev.op == "unzip":
        (s1, t2), (s2, t1), S, T, _, _ = w_before.unzip_pairs(ev.target)
        w = w_before.copy()
        info = apply_event(w, ev)
        m1, m2 = info["names"]
        return Zip(
            (m1, 0), (m2, 1),
            sink=S, source=T, bar=ev.target, x_lo=s1, x_hi=t2, y_lo=s2, y_hi=t1,
        )
    if ev.op == "zip":
        x, y = w_before.zip_roles(ev.dart_a, ev.dart_b)
        w = w_before.copy()
        info = apply_event(w, ev)
        return Unzip(info["names"]["bar"], x, y)
    raise ValueError(f"cannot invert {ev.op!r}")


def reverse_events(w: Web, events: Sequence[MovieEvent]) -> Events:
    """Time reverse of a movie starting at w (the result starts at its end)."""
    inv = []
    cur = w.copy()
    for ev in events:
        inv.append(inverse_event(cur, ev))
        apply_event(cur, ev)
    return tuple(reversed(inv))


def _play(w: Web, events) -> Web:
    cur = w.copy()
    for ev in events:
        apply_event(cur, ev)
    return cur


def kiss_events(w: Web, e1, e2) -> Events:
    """Zip the two edges of a bigon across their shared face, then unzip the new bar."""
    fmap = w.face_of()
    if fmap[(e1, 0)] == fmap[(e2, 1)]:
        x, y = e1, e2
    elif fmap[(e2, 0)] == fmap[(e1, 1)]:
        x, y = e2, e1
    else:
        raise InvariantFailure("bigon edges do not share a face")
    z = Zip(
        (x, 0), (y, 1),
        sink="~kS", source="~kT", bar="~kb",
        x_lo="~kx0", x_hi="~kx1", y_lo="~ky0", y_hi="~ky1",
    )
    return (z, Unzip("~kb", x, y))


def deloop_local(w: Web, c):
    wp = w.death(c)
    third = Fraction(1, 3)
    return [
        (-2, wp, (Fraction(1), (Death(c),)), (third, (Birth(c), Handle(c))), "circle-"),
        (0, wp, (third, (Choke(c), Death(c))), (-third, (Birth(c), Choke(c))), "circle0"),
        (2, wp, (third, (Handle(c), Death(c))), (Fraction(1), (Birth(c),)), "circle+"),
    ]


def debubble_local(w: Web, e1, e2):
    u = unzip_default(w, e1)
    after_u = _play(w, (u,))
    if e2 not in after_u.circles:
        raise InvariantFailure("bubble cap did not free the bigon edge")
    cap = (u, Death(e2))
    wp = _play(w, cap)
    recreate = reverse_events(w, cap)
    kiss = kiss_events(w, e1, e2)
    half = Fraction(1, 2)
    return [
        (-1, wp, (Fraction(1), cap), (half, recreate + kiss), "bigon-"),
        (1, wp, (half, kiss + cap), (Fraction(1), recreate), "bigon+"),
    ]


def desquare_local(w: Web, sq: Square):
    a, b, c, d = sq.edges
    out = []
    for tag, (e, f) in (("h", (a, c)), ("v", (b, d))):
        u1 = unzip_default(w, e)
        w1 = _play(w, (u1,))
        u2 = unzip_default(w1, f)
        w2 = _play(w1, (u2,))
        new = sorted(w2.circles - w.circles, key=idkey)
        if len(new) != 1:
            raise InvariantFailure("half-rocket did not leave exactly one new circle")
        p_ev = (u1, u2, Death(new[0]))
        wp = _play(w2, (Death(new[0]),))
        sp, si = SQUARE_SIGNS[tag]
        out.append(
            (0, wp, (Fraction(sp), p_ev), (Fraction(si), reverse_events(w, p_ev)), "square" + tag)
        )
    return out


def local_decomposition(w: Web, r=None):
    if r is None:
        r = find_reducible(w)
    if isinstance(r, Circle):
        return deloop_local(w, r.circle)
    if isinstance(r, Bigon):
        return debubble_local(w, *r.edges)
    if isinstance(r, Square):
        return desquare_local(w, r)
    raise InvariantFailure(f"unknown reducible {r!r}")


def simplify(w: Web) -> List[Summand]:
    """Iterate local isomorphisms until the web is empty."""
    if w.is_empty():
        return [Summand(0, Fraction(1), (), Fraction(1), ())]
    out = []
    for shift, wp, (pc, pe), (ic, ie), tag in local_decomposition(w):
        for sub in simplify(wp):
            out.append(
                Summand(
                    shift + sub.shift,
                    pc * sub.p_coeff,
                    tuple(pe) + sub.p_events,
                    ic * sub.i_coeff,
                    sub.i_events + tuple(ie),
                    (tag,) + sub.path,
                )
            )
    return out


def graded_dimension(summands: Sequence[Summand]):
    from .algebra import LaurentPoly

    terms = {}
    for s in summands:
        terms[s.shift] = terms.get(s.shift, 0) + 1
    return LaurentPoly(terms)


def _halves(w: Web, summands: Sequence[Summand]):
    tops = [cut_half("top", w, s.i_events) for s in summands]
    bottoms = [cut_half("bottom", w, s.p_events) for s in summands]
    return tops, bottoms


def gram_matrix(summands: Sequence[Summand], w: Optional[Web] = None):
    """G[a][b] = p_a o iota_b evaluated (should be the identity)."""
    n = len(summands)
    G = [[Fraction(0)] * n for _ in range(n)]
    if w is None:
        w = _play(Web(), summands[0].i_events) if summands else Web()
    tops, bottoms = _halves(w, summands)
    for a, sa in enumerate(summands):
        for b, sb in enumerate(summands):
            if sa.shift != sb.shift:
                continue
            G[a][b] = sa.p_coeff * sb.i_coeff * evaluate_glued(tops[b], bottoms[a])
    return G


def decomposition_selftest(w: Web, check_degrees: bool = True) -> dict:
    """Check that the decomposition of w is an isomorphism on closures.

    The Gram matrix of projections against inclusions must be the identity,
    cross-shift composites must vanish, and each inclusion must replay to w.
    Every composite p_a o iota_b closes up along w, so it is evaluated by
    gluing the two halves there.
    """
    summands = simplify(w)
    problems = []
    for k, s in enumerate(summands):
        got = _play(Web(), s.i_events)
        if got != w:
            problems.append(f"inclusion {k} does not rebuild the web")
        if not _play(w, s.p_events).is_empty():
            problems.append(f"projection {k} does not end at the empty web")
    n = len(summands)
    if problems:
        return {"summands": n, "ok": False, "problems": problems}
    tops, bottoms = _halves(w, summands)
    for a, sa in enumerate(summands):
        for b, sb in enumerate(summands):
            chi, seams = glue_halves(tops[b], bottoms[a])
            val = sa.p_coeff * sb.i_coeff * evaluate_skeleton_cached(chi, seams)
            want = 1 if a == b else 0
            if val != want:
                problems.append(f"gram[{a}][{b}] = {val}, expected {want}")
            if check_degrees and val and 2 * sum(chi) != 0:
                problems.append(f"composite {a},{b} has degree {2 * sum(chi)}")
    return {"summands": n, "ok": not problems, "problems": problems}
