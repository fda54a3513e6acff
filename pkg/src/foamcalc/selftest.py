"""Executable identity checks behind ``foamcalc selftest``.

Each suite returns a list of :class:`Check` records; nothing here raises on a
failed identity.  :func:`broken` temporarily installs a wrong convention so
the suites can be seen to catch it.
"""

from __future__ import annotations

import contextlib
import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from . import foam
from .complex import build_complex, check_d_squared, edge_event, homology_poincare, poincare, reset_caches
from .fixtures import BRAIDS, FIXTURE_NAMES, fixture, r1_kinked, r2_padded, random_braid
from .foam import (
    REVERSED,
    Birth,
    Choke,
    Death,
    Handle,
    MovieError,
    MovieEvent,
    Unzip,
    Zip,
    apply_event,
    evaluate_closed,
)
from .simplify import decomposition_selftest, kiss_events, reverse_events, simplify, unzip_default
from .spider import quantum_invariant
from .web import LinkDiagram, Web, WebError, idkey, parse_braid, resolve


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _timed(name: str, fn: Callable[[], Tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported with its message
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, ok, detail, time.perf_counter() - t0)


# --- closed foams --------------------------------------------------------

THETA_MOVIE = (
    Birth("a"), Birth("b"), Zip(("a", 0), ("b", 1), bar="bar"), Unzip("bar", "a", "b"), Death("a"), Death("b"),
)

CLOSED_TABLE = [
    ("sphere", (Birth("a"), Death("a")), 0),
    ("torus", (Birth("a"), Handle("a"), Death("a")), 3),
    ("double torus", (Birth("a"), Handle("a"), Handle("a"), Death("a")), 0),
    ("sphere with two chokes", (Birth("a"), Choke("a"), Choke("a"), Death("a")), -9),
    ("torus with a choke", (Birth("a"), Handle("a"), Choke("a"), Death("a")), 0),
    ("theta foam", THETA_MOVIE, 0),
]


def closed_foam_table() -> List[Check]:
    out = []
    for name, movie, want in CLOSED_TABLE:
        def run(movie=movie, want=want):
            got = evaluate_closed(movie)
            return got == want, f"{got} (want {want})"
        out.append(_timed(f"closed foam: {name}", run))

    def swap():
        std = evaluate_closed((Birth("a"), Choke("a"), Choke("a"), Death("a")))
        rev = evaluate_closed((Birth("a"), Choke("a"), Choke("a", REVERSED), Death("a")))
        return rev == -std and std != 0, f"{std} -> {rev}"
    out.append(_timed("seam swap negates the choke example", swap))
    return out


# --- decompositions ------------------------------------------------------


def _theta_web() -> Web:
    w = Web()
    for ev in THETA_MOVIE[:3]:
        apply_event(w, ev)
    return w


def _closed_h() -> Web:
    return resolve(parse_braid(2, [1]), (1,)).web


def corpus_webs(names: Sequence[str] = ("trefoil", "figure8")) -> List[Tuple[str, Web]]:
    """Small named webs plus every resolution web of the named fixtures (deduplicated)."""
    one = Web(circles={"c"})
    two = Web(circles={"c", "d"})
    webs = [("circle", one), ("two circles", two), ("theta", _theta_web()), ("closed H", _closed_h())]
    seen = {w.key() for _, w in webs}
    for name in names:
        d = fixture(name)
        for alpha in itertools.product((0, 1), repeat=d.n):
            w = resolve(d, alpha).web
            if w.key() not in seen:
                seen.add(w.key())
                webs.append((f"{name} {''.join(map(str, alpha))}", w))
    return webs


def decomposition_suite(names: Sequence[str] = ("trefoil", "figure8")) -> List[Check]:
    out = []
    for label, w in corpus_webs(names):
        def run(w=w):
            rep = decomposition_selftest(w, check_degrees=False)
            return rep["ok"], f"{rep['summands']} summands" + (f"; {rep['problems'][0]}" if rep["problems"] else "")
        out.append(_timed(f"decomposition: {label}", run))
    return out


# --- neck cutting and the tube relation -----------------------------------


def corpus_movies(names: Sequence[str] = ("hopf", "trefoil", "figure8"), limit: int = 400,
                  seed: int = 0) -> List[Tuple[MovieEvent, ...]]:
    """Closed movies of the pipeline: cube entries and Gram composites."""
    rng = random.Random(seed)
    movies = []
    for name in names:
        d = fixture(name)
        res = {a: resolve(d, a) for a in itertools.product((0, 1), repeat=d.n)}
        for a, ra in res.items():
            sa_list = simplify(ra.web)
            for x, y in rng.sample([(x, y) for x in sa_list for y in sa_list], min(4, len(sa_list) ** 2)):
                movies.append(y.i_events + x.p_events)
            for k in range(d.n):
                if a[k]:
                    continue
                b = a[:k] + (1,) + a[k + 1:]
                ev = edge_event(d, k, ra, res[b])
                sb_list = simplify(res[b].web)
                x, y = rng.choice(sa_list), rng.choice(sb_list)
                movies.append(x.i_events + (ev,) + y.p_events)
    rng.shuffle(movies)
    return movies[:limit]


def _frames(events) -> Iterator[Tuple[int, Web]]:
    w = Web()
    yield 0, w.copy()
    for i, ev in enumerate(events):
        apply_event(w, ev, check=False)
        yield i + 1, w.copy()


def neck_cutting_splice(events, at: int, c) -> Tuple[bool, str]:
    """eval(M) against the three cut terms on circle c at frame ``at``."""
    m1, m2 = tuple(events[:at]), tuple(events[at:])
    third = Fraction(1, 3)
    whole = evaluate_closed(m1 + m2)
    cut = (
        third * evaluate_closed(m1 + (Handle(c), Death(c), Birth(c)) + m2)
        - Fraction(1, 9) * evaluate_closed(m1 + (Choke(c), Death(c), Birth(c), Choke(c)) + m2)
        + third * evaluate_closed(m1 + (Death(c), Birth(c), Handle(c)) + m2)
    )
    ok = whole == cut
    detail = f"{whole} vs {cut}"
    frame = Web()
    for ev in m1:
        apply_event(frame, ev, check=False)
    if ok and frame.circles == {c} and not frame.edges:
        # the frame is just c, so both sides factor into products of closed foams
        A = {x: evaluate_closed(m1 + x + (Death(c),)) for x in ((), (Handle(c),), (Choke(c),))}
        B = {x: evaluate_closed((Birth(c),) + x + m2) for x in ((), (Handle(c),), (Choke(c),))}
        prod = (
            third * A[(Handle(c),)] * B[()]
            - Fraction(1, 9) * A[(Choke(c),)] * B[(Choke(c),)]
            + third * A[()] * B[(Handle(c),)]
        )
        ok = prod == whole
        detail += f"; product form {prod}"
    return ok, detail


def _bigons(w: Web) -> List[Tuple[object, object]]:
    out = []
    for f in w.faces():
        if len(f) == 2 and f[0][0] != f[1][0]:
            out.append(tuple(sorted((f[0][0], f[1][0]), key=idkey)))
    return sorted(set(out), key=lambda p: (idkey(p[0]), idkey(p[1])))


def tube_relation(events, at: int, e1, e2) -> Tuple[bool, str]:
    """Identity on a bigon = 1/2 (kiss; cap; recreate) + 1/2 (cap; recreate; kiss)."""
    m1, m2 = tuple(events[:at]), tuple(events[at:])
    w = Web()
    for ev in m1:
        apply_event(w, ev, check=False)
    u = unzip_default(w, e1)
    freed = w.copy()
    apply_event(freed, u)
    if e2 not in freed.circles:
        raise WebError("unzipping the bigon did not free its other edge")
    cap = (u, Death(e2))
    recreate = reverse_events(w, cap)
    kiss = kiss_events(w, e1, e2)
    half = Fraction(1, 2)
    whole = evaluate_closed(m1 + m2)
    rhs = half * evaluate_closed(m1 + kiss + cap + recreate + m2) + half * evaluate_closed(
        m1 + cap + recreate + kiss + m2
    )
    return whole == rhs, f"{whole} vs {rhs}"


def _random_splits(movies, want: int, pick, rng: random.Random):
    found = []
    tries = 0
    while len(found) < want and tries < 50 * want:
        tries += 1
        m = rng.choice(movies)
        frames = [(i, w) for i, w in _frames(m) if pick(w)]
        if not frames:
            continue
        i, w = rng.choice(frames)
        found.append((m, i, rng.choice(pick(w))))
    return found


def splice_suite(n: int = 50, seed: int = 1, movies=None) -> List[Check]:
    rng = random.Random(seed)
    movies = movies or corpus_movies(seed=seed)
    circles = lambda w: sorted(w.circles, key=idkey)
    out = []
    necks = _random_splits(movies, n, circles, rng)
    bad = []

    def necks_run():
        for m, i, c in necks:
            ok, detail = neck_cutting_splice(m, i, c)
            if not ok:
                bad.append(f"frame {i} circle {c}: {detail}")
        return len(necks) >= n and not bad, f"{len(necks)} splits" + (f"; {bad[0]}" if bad else "")
    out.append(_timed("neck-cutting splices", necks_run))

    tubes = _random_splits(movies, n, _bigons, rng)
    tbad = []

    def tubes_run():
        done = 0
        for m, i, (e1, e2) in tubes:
            try:
                ok, detail = tube_relation(m, i, e1, e2)
            except (WebError, MovieError) as exc:
                # e.g. a frame in the middle of a kiss, whose scratch names are taken
                continue
            done += 1
            if not ok:
                tbad.append(f"frame {i} bigon {e1},{e2}: {detail}")
        return done >= n and not tbad, f"{done} splits" + (f"; {tbad[0]}" if tbad else "")
    # extra candidates so that skipped frames still leave n usable splits
    tubes += _random_splits(movies, n // 2, _bigons, rng)
    out.append(_timed("tube relation", tubes_run))
    return out


# --- link-level properties -----------------------------------------------


def random_diagrams(count: int = 20, seed: int = 7, max_crossings: int = 6) -> List[Tuple[int, List[int]]]:
    rng = random.Random(seed)
    return [random_braid(rng, max_crossings) for _ in range(count)]


def euler_check(d: LinkDiagram, label: str) -> Check:
    def run():
        C = build_complex(d)
        if not check_d_squared(C):
            return False, "d^2 != 0"
        lhs = homology_poincare(C).eval_t(-1)
        rhs = quantum_invariant(d)
        return lhs == rhs, f"{lhs}" if lhs == rhs else f"{lhs} vs {rhs}"
    return _timed(f"euler: {label}", run)


def euler_suite(names: Sequence[str] = FIXTURE_NAMES, random_count: int = 20, seed: int = 7) -> List[Check]:
    out = [euler_check(fixture(n), n) for n in names]
    for strands, word in random_diagrams(random_count, seed):
        out.append(euler_check(parse_braid(strands, word), f"braid {strands};{','.join(map(str, word))}"))
    return out


def reidemeister_variants(name: str) -> List[Tuple[str, LinkDiagram]]:
    """Other diagrams of a fixture's link: R1 kinks of both signs and an R2 pair."""
    base = fixture(name)
    strands, word = BRAIDS[name]
    out = [("R1 negative kink", r1_kinked(base, sign=-1))]
    if len(word) <= 5:
        out.append(("R1 positive kink", r1_kinked(base, sign=1, side=1)))
        out.append(("R2 pair", r2_padded(strands, word)))
    return out


def reidemeister_check(name: str, variants=None) -> Check:
    def run():
        want = poincare(fixture(name))
        seen = []
        for label, d in variants if variants is not None else reidemeister_variants(name):
            got = poincare(d)
            if got != want:
                return False, f"{label}: {got} vs {want}"
            seen.append(label)
        return True, ", ".join(seen)
    return _timed(f"reidemeister: {name}", run)


def reidemeister_suite(names: Sequence[str] = FIXTURE_NAMES) -> List[Check]:
    return [reidemeister_check(n) for n in names]


# --- orchestration -------------------------------------------------------

CONTROLS = ("theta", "sigma20", "sigma01")


@contextlib.contextmanager
def broken(control: Optional[str]):
    """Install a wrong convention for the duration of the block.

    ``theta`` flips the theta-foam sign, ``sigma20`` flips the value of a
    sphere with two chokes, ``sigma01`` removes the torus entry of the table.
    """
    if control is None:
        yield
        return
    if control not in CONTROLS:
        raise ValueError(f"unknown control {control!r}; known: {', '.join(CONTROLS)}")
    saved_sigma = dict(foam.SIGMA)
    saved_theta = foam.THETA_VALUE
    try:
        if control == "theta":
            foam.THETA_VALUE = -saved_theta
        elif control == "sigma20":
            foam.SIGMA[(2, 0)] = -saved_sigma[(2, 0)]
        else:
            del foam.SIGMA[(0, 1)]
        foam.rebuild_seam_tables()
        yield
    finally:
        foam.SIGMA.clear()
        foam.SIGMA.update(saved_sigma)
        foam.THETA_VALUE = saved_theta
        foam.rebuild_seam_tables()


def run_selftest(quick: bool = False, control: Optional[str] = None) -> List[Check]:
    """All suites; ``quick`` trims the link-level ones to the small fixtures."""
    small = ("unknot", "unlink2", "hopf", "trefoil", "figure8")
    with broken(control):
        # cached evaluations belong to the convention in force
        reset_caches()
        checks = closed_foam_table()
        checks += decomposition_suite(("trefoil",) if quick else ("trefoil", "figure8"))
        checks += splice_suite(20 if quick else 50)
        checks += euler_suite(small if quick else FIXTURE_NAMES[:-1], random_count=3 if quick else 10)
        checks += reidemeister_suite(("unknot", "hopf", "trefoil") if quick else small)
    reset_caches()
    return checks
