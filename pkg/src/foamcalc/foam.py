"""Foams as movies of elementary events, their cell-level assembly, and closed evaluation.

A movie starts at a web and applies Birth, Death, Zip, Unzip, Handle and Choke
events.  :func:`replay` cuts the traced 2-complex along its seams and records

* facets: connected cut surfaces with Euler characteristic and germ orbits,
* seams: circles where three sheets meet, each with its germ orbits in cyclic order.

Seams are oriented forward in time along sink traces and backward along source
traces; the cyclic order of germs is the anticlockwise slot order at a sink.

:func:`evaluate_closed` neck-cuts every sheet next to every seam and sums the
resulting products of seam values (±9) and facet values Σ_{k,l}.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .web import SINK, SOURCE, Web, WebError, idkey

STANDARD = "standard"
REVERSED = "reversed"

# cut types of a germ orbit, named by the seam-side cap
DISC, CHOKE, PT = "D", "C", "P"
# the seam-side cap next to the facet-side cap, and the neck-cutting coefficient
CUT_COEFF = {DISC: Fraction(1, 3), CHOKE: Fraction(-1, 9), PT: Fraction(1, 3)}
# seam value is -9 when the seam-side caps, read in germ order, are a rotation of this
THETA_REF = (DISC, CHOKE, PT)
THETA_VALUE = 9


# closed sphere with k choking tori and l handles; every other (k, l) is 0
SIGMA: Dict[Tuple[int, int], int] = {(0, 1): 3, (2, 0): -9}


def sigma_kl(k: int, l: int) -> int:
    """Closed sphere with k choking tori and l handles (neck-cut form)."""
    return SIGMA.get((k, l), 0)


class UnsupportedFoam(ValueError):
    """The assembled complex is outside the supported class (e.g. seam monodromy)."""


class MovieError(ValueError):
    """An event's precondition failed; the message names the event index."""


@dataclass(frozen=True)
class MovieEvent:
    op: str
    target: object = None
    dart_a: Optional[tuple] = None
    dart_b: Optional[tuple] = None
    names: tuple = ()
    orient: str = STANDARD

    def to_json(self):
        d = {"op": self.op}
        if self.op in ("birth", "death", "handle", "choke"):
            d["id" if self.op in ("birth", "death") else "target"] = self.target
        if self.op == "choke":
            d["orientation"] = self.orient
        if self.op == "zip":
            d["dartA"] = list(self.dart_a)
            d["dartB"] = list(self.dart_b)
            if self.names:
                d["names"] = dict(self.names)
        if self.op == "unzip":
            d["edge"] = self.target
            if self.names:
                d["names"] = [n for _, n in self.names]
        return d


def Birth(c) -> MovieEvent:
    return MovieEvent("birth", c)


def Death(c) -> MovieEvent:
    return MovieEvent("death", c)


ZIP_NAMES = ("sink", "source", "bar", "x_lo", "x_hi", "y_lo", "y_hi")


def Zip(dart_a, dart_b, **names) -> MovieEvent:
    bad = set(names) - set(ZIP_NAMES)
    if bad:
        raise ValueError(f"unknown zip names {sorted(bad)}")
    nm = tuple((k, names[k]) for k in ZIP_NAMES if names.get(k) is not None)
    return MovieEvent("zip", None, tuple(dart_a), tuple(dart_b), nm)


def Unzip(e, m1=None, m2=None) -> MovieEvent:
    return MovieEvent("unzip", e, names=(("m1", m1), ("m2", m2)))


def Handle(x) -> MovieEvent:
    return MovieEvent("handle", x)


def Choke(x, orient: str = STANDARD) -> MovieEvent:
    if orient not in (STANDARD, REVERSED):
        raise ValueError(f"choke orientation must be {STANDARD!r} or {REVERSED!r}")
    return MovieEvent("choke", x, orient=orient)


def apply_event(w: Web, ev: MovieEvent, check: bool = True) -> dict:
    """Apply one event to w in place; returns the web-level info of the change.

    ``check=False`` skips the face test of zips (for pieces validated earlier).
    """
    if ev.op == "birth":
        w.apply_birth(ev.target)
        return {}
    if ev.op == "death":
        w.apply_death(ev.target)
        return {}
    if ev.op == "zip":
        x, y = w.zip_roles(ev.dart_a, ev.dart_b, check)
        info = w.apply_zip(x, y, dict(ev.names))
        info["x"], info["y"] = x, y
        return info
    if ev.op == "unzip":
        nm = dict(ev.names)
        return w.apply_unzip(ev.target, nm.get("m1"), nm.get("m2"))
    if ev.op in ("handle", "choke"):
        if not w.has(ev.target):
            raise WebError(f"{ev.target!r} is not an edge or circle")
        return {}
    raise WebError(f"unknown event {ev.op!r}")


def play(source: Web, events: Iterable[MovieEvent]) -> Web:
    """Final web of a movie without assembling the foam."""
    w = source.copy()
    for i, ev in enumerate(events):
        try:
            apply_event(w, ev)
        except WebError as exc:
            raise MovieError(f"event {i} ({ev.op}): {exc}") from exc
    return w


@dataclass
class Movie:
    source: Web
    events: Tuple[MovieEvent, ...]
    target: Optional[Web] = None

    def __post_init__(self):
        self.events = tuple(self.events)
        if self.target is None:
            self.target = play(self.source, self.events)

    @classmethod
    def closed(cls, events) -> "Movie":
        return cls(Web(), tuple(events))

    def then(self, other: "Movie") -> "Movie":
        if self.target != other.source:
            raise MovieError("composition mismatch: target and source webs differ")
        return Movie(self.source, self.events + other.events, other.target)

    def is_closed(self) -> bool:
        return self.source.is_empty() and self.target.is_empty()

    def to_json(self):
        return {"source": web_to_json(self.source), "events": [e.to_json() for e in self.events]}


@dataclass
class FoamSum:
    terms: List[Tuple[Fraction, Movie]]

    @classmethod
    def single(cls, movie: Movie, coeff=1) -> "FoamSum":
        return cls([(Fraction(coeff), movie)])

    @property
    def source(self) -> Web:
        return self.terms[0][1].source

    @property
    def target(self) -> Web:
        return self.terms[0][1].target


# --- assembly ----------------------------------------------------------


class _UF:
    def __init__(self):
        self.parent: List[int] = []
        self.chi: List[int] = []

    def new(self, chi: int) -> int:
        self.parent.append(len(self.parent))
        self.chi.append(chi)
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.chi[ra] += self.chi[rb]
        return ra

    def add(self, a: int, d: int) -> None:
        self.chi[self.find(a)] += d


class _VInst:
    __slots__ = ("pol", "germs", "birth", "death")

    def __init__(self, pol, germs):
        self.pol = pol
        self.germs = germs  # strip token per slot position
        self.birth = None  # (junction id) or None if present in the source web
        self.death = None


@dataclass
class Facet:
    chi: int
    orbits: List[int]

    @property
    def genus(self) -> int:
        b = len(self.orbits)
        twice = 2 - self.chi - b
        if twice % 2 or twice < 0:
            raise UnsupportedFoam(f"facet with chi={self.chi}, b={b} is not an orientable surface")
        return twice // 2


@dataclass
class AssembledFoam:
    facets: List[Facet]
    seams: List[Tuple[int, int, int]]  # germ orbit ids in cyclic order
    orbit_facet: List[int]
    seam_origin: List[str] = field(default_factory=list)  # "trace" or "choke"
    open_seams: int = 0
    closed: bool = True
    boundary_vertices: int = 0

    @property
    def total_chi(self) -> int:
        return sum(f.chi for f in self.facets)

    def euler_characteristic(self) -> int:
        return self.total_chi - 2 * self.open_seams

    def structure_key(self) -> tuple:
        return (
            tuple((f.chi, tuple(f.orbits)) for f in self.facets),
            tuple(self.seams),
        )


def replay(m: Movie, check: bool = True) -> AssembledFoam:
    """Assemble the cut 2-complex traced by a movie."""
    return assemble(m.source, m.events, m.target, check)


class _Run:
    """Union-find strips, vertex instances and junctions of a replayed movie."""

    def __init__(self, source: Web, events: Sequence[MovieEvent], check: bool = True):
        w = source.copy()
        uf = _UF()
        tok: Dict[object, int] = {}
        for e in w.edges:
            tok[e] = uf.new(1)
        for c in w.circles:
            tok[c] = uf.new(0)
        vinst: Dict[object, _VInst] = {}
        all_inst: List[_VInst] = []
        for v, (pol, rot) in w.vertices.items():
            vi = _VInst(pol, [tok[e] for e in rot])
            vinst[v] = vi
            all_inst.append(vi)
        self.init_tok = dict(tok)
        self.init_inst = dict(vinst)
        junctions: List[Tuple[_VInst, _VInst, Dict[int, int]]] = []
        choke_seams: List[Tuple[int, int, int]] = []
        for idx, ev in enumerate(events):
            try:
                if ev.op == "birth":
                    apply_event(w, ev, check)
                    tok[ev.target] = uf.new(1)
                elif ev.op == "death":
                    t = tok[ev.target] if ev.target in tok else None
                    apply_event(w, ev, check)
                    uf.add(t, 1)
                    del tok[ev.target]
                elif ev.op == "handle":
                    apply_event(w, ev, check)
                    uf.add(tok[ev.target], -2)
                elif ev.op == "choke":
                    apply_event(w, ev, check)
                    host = tok[ev.target]
                    uf.add(host, -1)
                    p = uf.new(-1)
                    d = uf.new(1)
                    choke_seams.append((host, p, d) if ev.orient == STANDARD else (host, d, p))
                elif ev.op == "zip":
                    info = apply_event(w, ev, check)
                    x, y = info["x"], info["y"]
                    names = info["names"]
                    for z, lo, hi in ((x, "x_lo", "x_hi"), (y, "y_lo", "y_hi")):
                        old = tok.pop(z)
                        a = uf.new(0)
                        uf.union(old, a)
                        tok[names[lo]] = a
                        if names[hi] != names[lo]:
                            b = uf.new(0)
                            uf.union(old, b)
                            tok[names[hi]] = b
                    bar = uf.new(1)
                    tok[names["bar"]] = bar
                    S, T = names["sink"], names["source"]
                    si = _VInst(SINK, [bar, tok[names["x_lo"]], tok[names["y_lo"]]])
                    ti = _VInst(SOURCE, [bar, tok[names["y_hi"]], tok[names["x_hi"]]])
                    jid = len(junctions)
                    junctions.append((si, ti, {0: 0, 1: 2, 2: 1}))
                    si.birth = ti.birth = jid
                    vinst[S], vinst[T] = si, ti
                    all_inst += [si, ti]
                elif ev.op == "unzip":
                    e = ev.target
                    if e not in w.edges:
                        raise WebError(f"{e!r} is not an edge")
                    T, S = w.edges[e]
                    info = apply_event(w, ev, check)
                    i, j = info["i"], info["j"]
                    for s, t, mname, _ in info["merged"]:
                        ts, tt = tok.pop(s), tok.pop(t, None)
                        a = uf.new(0)
                        uf.union(ts, a)
                        if tt is not None:
                            uf.union(tt, a)
                        uf.add(a, -1)
                        tok[mname] = a
                    tok.pop(e)
                    si, ti = vinst.pop(S), vinst.pop(T)
                    jid = len(junctions)
                    junctions.append(
                        (si, ti, {i % 3: j % 3, (i + 1) % 3: (j + 2) % 3, (i + 2) % 3: (j + 1) % 3})
                    )
                    si.death = ti.death = jid
                else:
                    raise WebError(f"unknown event {ev.op!r}")
            except (WebError, KeyError) as exc:
                raise MovieError(f"event {idx} ({ev.op}): {exc}") from exc

        self.w, self.uf, self.tok, self.vinst = w, uf, tok, vinst
        self.all_inst, self.junctions, self.choke_seams = all_inst, junctions, choke_seams


def _inv(mp):
    return {b: a for a, b in mp.items()}


def _trace_seams(all_inst: List[_VInst], junctions) -> Tuple[List[List[List[int]]], int]:
    """Closed vertex traces (three germ-token lists each) and the number of open ones."""
    seams_raw: List[List[List[int]]] = []
    open_seams = 0
    visited = set()
    for start in all_inst:
        if id(start) in visited or start.pol != SINK:
            continue
        if start.birth is None or start.death is None:
            continue
        labels = {0: [], 1: [], 2: []}
        pos = {0: 0, 1: 1, 2: 2}  # label -> slot at the current sink
        cur = start
        while True:
            visited.add(id(cur))
            for lab, p in pos.items():
                labels[lab].append(cur.germs[p])
            if cur.death is None:
                break
            si, ti, mp = junctions[cur.death]
            pos = {lab: mp[p] for lab, p in pos.items()}
            visited.add(id(ti))
            for lab, p in pos.items():
                labels[lab].append(ti.germs[p])
            if ti.birth is None:
                cur = None
                break
            s2, t2, mp2 = junctions[ti.birth]
            back = _inv(mp2)
            pos = {lab: back[p] for lab, p in pos.items()}
            cur = s2
            if cur is start:
                break
        if cur is not start:
            open_seams += 1
            continue
        if pos != {0: 0, 1: 1, 2: 2}:
            raise UnsupportedFoam("seam with germ monodromy (fewer than three germ orbits)")
        seams_raw.append([labels[0], labels[1], labels[2]])
    # remaining traces that touch the movie boundary are open seams
    for vi in all_inst:
        if id(vi) not in visited:
            open_seams += 1 if vi.pol == SINK else 0
            visited.add(id(vi))
    return seams_raw, open_seams


def assemble(source: Web, events: Sequence[MovieEvent], target: Optional[Web] = None,
             check: bool = True) -> AssembledFoam:
    run = _Run(source, events, check)
    w, uf, all_inst, junctions, choke_seams = run.w, run.uf, run.all_inst, run.junctions, run.choke_seams
    if target is not None and w != target:
        raise MovieError("replayed web does not match the movie's target")

    closed = source.is_empty() and w.is_empty()
    seams_raw, open_seams = _trace_seams(all_inst, junctions)
    origins = ["trace"] * len(seams_raw)
    for trip in choke_seams:
        seams_raw.append([[trip[0]], [trip[1]], [trip[2]]])
        origins.append("choke")

    roots = {}
    facets: List[Facet] = []

    def facet_of(token):
        r = uf.find(token)
        if r not in roots:
            roots[r] = len(facets)
            facets.append(Facet(uf.chi[r], []))
        return roots[r]

    orbit_facet: List[int] = []
    seams: List[Tuple[int, int, int]] = []
    for trip in seams_raw:
        ids = []
        for germs in trip:
            fs = {uf.find(g) for g in germs}
            if len(fs) != 1:
                raise UnsupportedFoam("germ orbit spans several facets (assembly inconsistency)")
            f = facet_of(germs[0])
            oid = len(orbit_facet)
            orbit_facet.append(f)
            facets[f].orbits.append(oid)
            ids.append(oid)
        seams.append(tuple(ids))
    # facets with no seams: every live union-find root that carried any strip
    live = set()
    for r in range(len(uf.parent)):
        live.add(uf.find(r))
    for r in sorted(live):
        facet_of(r)
    # boundary circles on the source/target webs
    boundary_vertices = len(source.vertices) + len(w.vertices)
    return AssembledFoam(
        facets, seams, orbit_facet, origins, open_seams, closed, boundary_vertices
    )


# --- foams cut along a web ----------------------------------------------


def _norm_slots(rot) -> List[int]:
    """Instance slot -> position in the normalised rotation."""
    i = min(range(3), key=lambda k: idkey(rot[k]))
    return [(p - i) % 3 for p in range(3)]


@dataclass
class HalfFoam:
    """A movie from the empty web to W ("top") or from W to the empty web ("bottom").

    Everything is stored for gluing along W: compact facet roots with their
    Euler characteristics, the root of each W edge and of each germ at a W
    vertex (slots in normalised rotation order), the seams that close up inside
    the half, and the seam arcs that run between two W vertices.
    """

    side: str
    web: Web
    chi: List[int]
    edge_root: Dict[object, int]
    vert_germs: Dict[object, Tuple[int, int, int]]
    seams: List[Tuple[int, int, int]]
    # top: W source -> (W sink, slot map); bottom: W sink -> (W source, slot map)
    links: Dict[object, Tuple[object, Tuple[int, int, int]]]
    # roots of W's edges and free circles in sorted order (both halves of a gluing share W)
    edge_roots: Tuple[int, ...] = ()
    circle_roots: Tuple[int, ...] = ()
    links_id: int = -1


# interned link maps, and the seam cycles found for each (top, bottom) pair of them
_link_ids: Dict[tuple, int] = {}
_cycle_cache: Dict[Tuple[int, int], Tuple] = {}


def _intern_links(links) -> int:
    key = tuple(sorted(links.items(), key=lambda kv: idkey(kv[0])))
    k = _link_ids.get(key)
    if k is None:
        k = _link_ids[key] = len(_link_ids)
    return k


def _compact(uf: _UF):
    ids: Dict[int, int] = {}
    chi: List[int] = []
    for r in range(len(uf.parent)):
        root = uf.find(r)
        if root not in ids:
            ids[root] = len(chi)
            chi.append(uf.chi[root])
    return ids, chi


def cut_half(side: str, web: Web, events: Sequence[MovieEvent], check: bool = False) -> HalfFoam:
    if side not in ("top", "bottom"):
        raise ValueError("side must be 'top' or 'bottom'")
    if side == "top":
        run = _Run(Web(), events, check)
        if run.w != web:
            raise MovieError("top half does not end at the cut web")
        tok, inst = run.tok, run.vinst
    else:
        run = _Run(web, events, check)
        if not run.w.is_empty():
            raise MovieError("bottom half does not end at the empty web")
        tok, inst = run.init_tok, run.init_inst
    uf, junctions = run.uf, run.junctions
    ids, chi = _compact(uf)
    root = lambda t: ids[uf.find(t)]
    # the half's own copy of W fixes the slot order of its instances
    w = run.w if side == "top" else web
    name_of = {id(vi): v for v, vi in inst.items()}
    norm = {v: _norm_slots(w.vertices[v][1]) for v in inst}
    edge_root = {e: root(t) for e, t in tok.items()}
    vert_germs = {}
    for v, vi in inst.items():
        g = [0, 0, 0]
        for p in range(3):
            g[norm[v][p]] = root(vi.germs[p])
        vert_germs[v] = tuple(g)
    raw, _ = _trace_seams(run.all_inst, junctions)
    seams = []
    for labels in raw:
        seams.append(tuple(root(lab[0]) for lab in labels))
    for trip in run.choke_seams:
        seams.append(tuple(root(t) for t in trip))
    links = {}
    want = SOURCE if side == "top" else SINK
    for v, vi in inst.items():
        if vi.pol != want:
            continue
        inv_n = {norm[v][p]: p for p in range(3)}
        pos = [inv_n[k] for k in range(3)]
        cur = vi
        if side == "top":
            while True:
                s2, t2, mp2 = junctions[cur.birth]
                back = _inv(mp2)
                pos = [back[p] for p in pos]
                if s2.death is None:
                    cur = s2
                    break
                si, ti, mp = junctions[s2.death]
                pos = [mp[p] for p in pos]
                cur = ti
        else:
            while True:
                si, ti, mp = junctions[cur.death]
                pos = [mp[p] for p in pos]
                if ti.birth is None:
                    cur = ti
                    break
                s2, t2, mp2 = junctions[ti.birth]
                back = _inv(mp2)
                pos = [back[p] for p in pos]
                cur = s2
        end = name_of[id(cur)]
        links[v] = (end, tuple(norm[end][p] for p in pos))
    roots = tuple(edge_root[e] for e in sorted(w.edges, key=idkey))
    croots = tuple(edge_root[c] for c in sorted(w.circles, key=idkey))
    return HalfFoam(side, w, chi, edge_root, vert_germs, seams, links, roots, croots, _intern_links(links))


def glue_halves(top: HalfFoam, bottom: HalfFoam) -> Tuple[List[int], List[Tuple[int, int, int]]]:
    """Closed skeleton (facet chis, seams as facet triples) of top followed by bottom."""
    if top.side != "top" or bottom.side != "bottom":
        raise ValueError("glue a top half to a bottom half")
    nT = len(top.chi)
    n = nT + len(bottom.chi)
    parent = list(range(n))
    chi = top.chi + bottom.chi
    for pairs, collar in ((zip(top.edge_roots, bottom.edge_roots), 1), (zip(top.circle_roots, bottom.circle_roots), 0)):
        for a, b in pairs:
            b += nT
            while parent[a] != a:
                parent[a] = a = parent[parent[a]]
            while parent[b] != b:
                parent[b] = b = parent[parent[b]]
            if a != b:
                parent[b] = a
                chi[a] += chi[b]
            # the bottom half's collar strip on an edge was counted twice
            chi[a] -= collar
    lab = [0] * n
    ids: Dict[int, int] = {}
    out_chi: List[int] = []
    for x in range(n):
        r = x
        while parent[r] != r:
            r = parent[r]
        k = ids.get(r)
        if k is None:
            k = ids[r] = len(out_chi)
            out_chi.append(chi[r])
        lab[x] = k
    seams = [(lab[a], lab[b], lab[c]) for a, b, c in top.seams]
    seams += [(lab[nT + a], lab[nT + b], lab[nT + c]) for a, b, c in bottom.seams]
    ck = (top.links_id, bottom.links_id)
    starts = _cycle_cache.get(ck)
    if starts is None:
        starts = _cycle_cache[ck] = _seam_cycles(top.links, bottom.links)
    tg = top.vert_germs
    for s0 in starts:
        g = tg[s0]
        seams.append((lab[g[0]], lab[g[1]], lab[g[2]]))
    return out_chi, seams


def _seam_cycles(tl, bl) -> Tuple:
    """One W sink per seam that crosses the cut, after checking its germ monodromy."""
    seen = set()
    starts = []
    for s0 in bl:
        if s0 in seen:
            continue
        pos = (0, 1, 2)
        cur = s0
        while True:
            seen.add(cur)
            src, mp = bl[cur]
            pos = (mp[pos[0]], mp[pos[1]], mp[pos[2]])
            cur, mp = tl[src]
            pos = (mp[pos[0]], mp[pos[1]], mp[pos[2]])
            if cur == s0:
                break
        if pos != (0, 1, 2):
            raise UnsupportedFoam("seam with germ monodromy (fewer than three germ orbits)")
        starts.append(s0)
    return tuple(starts)


# per cut type: old facet code -> new code (-1 = invalid); codes 0, C, CC, D
_ADD = {CHOKE: (1, 2, -1, -1), DISC: (3, -1, -1, -1)}


def evaluate_skeleton(chi: Sequence[int], seams: Sequence[Tuple[int, int, int]]) -> Fraction:
    """Closed evaluation from facet Euler characteristics and seam facet triples.

    Same sum as :func:`evaluate_assembled`, run as a frontier DP with each
    live facet packed into two bits of an integer state.
    """
    nF = len(chi)
    b = [0] * nF
    for s in seams:
        for f in s:
            b[f] += 1
    s01 = sigma_kl(0, 1)
    # values of a closing genus-0 facet by code
    close = (sigma_kl(0, 0), sigma_kl(1, 0), sigma_kl(2, 0), s01)
    factor = 1
    genus = [0] * nF
    for f in range(nF):
        twice = 2 - chi[f] - b[f]
        if twice % 2 or twice < 0:
            raise UnsupportedFoam(f"facet with chi={chi[f]}, b={b[f]} is not an orientable surface")
        g = twice // 2
        if g >= 2:
            return Fraction(0)
        genus[f] = g
        if b[f] == 0:
            factor *= sigma_kl(0, g)
    if not factor:
        return Fraction(0)
    if not seams:
        return Fraction(factor)
    # forced cut types: a torus facet takes only P, a disc facet with one orbit only D
    forced = {}
    for f in range(nF):
        if b[f] and genus[f] == 1:
            forced[f] = PT
            factor *= s01
        elif b[f] == 1:
            forced[f] = DISC
            factor *= s01
    by_facet: Dict[int, List[int]] = {}
    for si, s in enumerate(seams):
        for f in s:
            by_facet.setdefault(f, []).append(si)
    order: List[int] = []
    seen = [False] * len(seams)
    for s0 in range(len(seams)):
        if seen[s0]:
            continue
        seen[s0] = True
        queue = [s0]
        qi = 0
        while qi < len(queue):
            s = queue[qi]
            qi += 1
            order.append(s)
            for f in seams[s]:
                for s2 in by_facet[f]:
                    if not seen[s2]:
                        seen[s2] = True
                        queue.append(s2)
    last = {}
    for idx, s in enumerate(order):
        for f in seams[s]:
            last[f] = idx
    states: Dict[int, int] = {0: 1}
    for idx, s in enumerate(order):
        fs = seams[s]
        moves = []
        for perm, sign in _PERM_SIGN:
            ok = True
            ops = []
            for pos in range(3):
                f = fs[pos]
                t = perm[pos]
                ft = forced.get(f)
                if ft is not None:
                    if ft != t:
                        ok = False
                        break
                elif t != PT:
                    ops.append((2 * f, _ADD[t]))
            if ok:
                moves.append((sign, ops))
        if not moves:
            return Fraction(0)
        closing = [2 * f for f in set(fs) if last[f] == idx and f not in forced]
        new: Dict[int, int] = {}
        for st, wgt in states.items():
            for sign, ops in moves:
                x = st
                for sh, tab in ops:
                    c = (x >> sh) & 3
                    nc = tab[c]
                    if nc < 0:
                        break
                    x += (nc - c) << sh
                else:
                    val = wgt * sign
                    for sh in closing:
                        v = close[(x >> sh) & 3]
                        if not v:
                            val = 0
                            break
                        val *= v
                        x &= ~(3 << sh)
                    if val:
                        new[x] = new.get(x, 0) + val
        states = {k: v for k, v in new.items() if v}
        if not states:
            return Fraction(0)
    return Fraction(factor * sum(states.values()), 9 ** len(order))


def skeleton_key(chi: Sequence[int], seams: Sequence[Tuple[int, int, int]]) -> tuple:
    """An isomorphic relabelling of a skeleton, usable as a cache key.

    Seams are rotated and sorted and facets renumbered by first use; that only
    changes names, so equal keys mean equal evaluations (the converse may fail).
    """
    order = sorted(range(len(seams)), key=lambda i: sorted(chi[x] for x in seams[i]))
    lab: Dict[int, int] = {}
    for i in order:
        for x in seams[i]:
            if x not in lab:
                lab[x] = len(lab)
    ss = []
    for t in seams:
        a, b, c = lab[t[0]], lab[t[1]], lab[t[2]]
        ss.append(min((a, b, c), (b, c, a), (c, a, b)))
    ss.sort()
    used = tuple(chi[x] for x in sorted(lab, key=lab.get))
    rest = tuple(sorted(chi[x] for x in range(len(chi)) if x not in lab))
    return tuple(ss), used, rest


_skel_cache: Dict[tuple, Fraction] = {}
_skel_exact: Dict[tuple, Fraction] = {}


def evaluate_skeleton_cached(chi, seams) -> Fraction:
    exact = (tuple(chi), tuple(seams))
    hit = _skel_exact.get(exact)
    if hit is not None:
        return hit
    key = skeleton_key(chi, seams)
    hit = _skel_cache.get(key)
    if hit is None:
        hit = evaluate_skeleton(chi, seams)
        if len(_skel_cache) > CACHE_LIMIT:
            _skel_cache.clear()
        _skel_cache[key] = hit
    if len(_skel_exact) > CACHE_LIMIT:
        _skel_exact.clear()
    _skel_exact[exact] = hit
    return hit


def evaluate_glued(top: HalfFoam, bottom: HalfFoam) -> Fraction:
    return evaluate_skeleton_cached(*glue_halves(top, bottom))


def foam_degree(f: AssembledFoam) -> int:
    """2*chi - |boundary points| + |V|/2; closed movies give 2*total_chi."""
    if f.closed:
        return 2 * f.total_chi
    return 2 * f.euler_characteristic() + f.boundary_vertices // 2


# --- evaluation --------------------------------------------------------


_PERMS = list(itertools.permutations((DISC, CHOKE, PT)))


def _seam_factor(types) -> Fraction:
    """Product of the three cut coefficients and the seam value."""
    rots = {THETA_REF[i:] + THETA_REF[:i] for i in range(3)}
    val = -THETA_VALUE if tuple(types) in rots else THETA_VALUE
    return CUT_COEFF[types[0]] * CUT_COEFF[types[1]] * CUT_COEFF[types[2]] * val




def _components(f: AssembledFoam):
    nF = len(f.facets)
    parent = list(range(nF))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in f.seams:
        fs = [f.orbit_facet[o] for o in s]
        for x in fs[1:]:
            ra, rb = find(fs[0]), find(x)
            if ra != rb:
                parent[rb] = ra
    comps: Dict[int, Tuple[List[int], List[int]]] = {}
    for i in range(nF):
        comps.setdefault(find(i), ([], []))[0].append(i)
    for si, s in enumerate(f.seams):
        comps[find(f.orbit_facet[s[0]])][1].append(si)
    return list(comps.values())


def _facet_value(k: int, l: int) -> int:
    return sigma_kl(k, l)


_SEAM_SIGN: Dict[tuple, int] = {}
_PERM_SIGN: List[Tuple[tuple, int]] = []


def rebuild_seam_tables() -> None:
    """Recompute the per-permutation seam signs (after changing THETA_VALUE)."""
    # each seam contributes (product of cut coefficients) * (+-9) = +-1/9
    factors = {p: _seam_factor(p) for p in _PERMS}
    assert all(abs(v) == Fraction(1, 9) for v in factors.values())
    _SEAM_SIGN.clear()
    _SEAM_SIGN.update({p: (1 if factors[p] > 0 else -1) for p in _PERMS})
    _PERM_SIGN[:] = [(p, _SEAM_SIGN[p]) for p in _PERMS]
    clear_cache()


# per permutation: (choke increments, disc increments) per position
_PERM_INC = [(p, tuple(int(t == CHOKE) for t in p), tuple(int(t == DISC) for t in p)) for p in _PERMS]


def _eval_component(f: AssembledFoam, facets: List[int], seams: List[int]) -> Fraction:
    if not seams:
        (fi,) = facets
        return Fraction(sigma_kl(0, f.facets[fi].genus))
    genus = {fi: f.facets[fi].genus for fi in facets}
    if any(g >= 2 for g in genus.values()):
        return Fraction(0)
    # order seams by BFS through shared facets to keep the frontier small
    by_facet: Dict[int, List[int]] = {}
    for si in seams:
        for o in f.seams[si]:
            by_facet.setdefault(f.orbit_facet[o], []).append(si)
    order = []
    seen = set()
    for s0 in seams:
        if s0 in seen:
            continue
        queue = [s0]
        seen.add(s0)
        while queue:
            s = queue.pop(0)
            order.append(s)
            for o in f.seams[s]:
                for s2 in by_facet[f.orbit_facet[o]]:
                    if s2 not in seen:
                        seen.add(s2)
                        queue.append(s2)
    last = {}
    for idx, s in enumerate(order):
        for o in f.seams[s]:
            last[f.orbit_facet[o]] = idx
    # state: tuple of (facet, k, d) for active facets -> integer weight
    states: Dict[tuple, int] = {(): 1}
    for idx, s in enumerate(order):
        orbit_f = [f.orbit_facet[o] for o in f.seams[s]]
        closing = {fi for fi in orbit_f if last[fi] == idx}
        g = [genus[fi] for fi in orbit_f]
        new_states: Dict[tuple, int] = {}
        for key, wgt in states.items():
            st = {fi: (k, d) for fi, k, d in key}
            for perm, inc_k, inc_d in _PERM_INC:
                loc = dict(st)
                ok = True
                for pos in range(3):
                    fi = orbit_f[pos]
                    k, d = loc.get(fi, (0, 0))
                    k += inc_k[pos]
                    d += inc_d[pos]
                    l = g[pos] + d
                    if k > 2 or l > 1 or (k and l):
                        ok = False
                        break
                    loc[fi] = (k, d)
                if not ok:
                    continue
                val = wgt * _SEAM_SIGN[perm]
                for fi in closing:
                    k, d = loc.pop(fi)
                    v = sigma_kl(k, genus[fi] + d)
                    if not v:
                        val = 0
                        break
                    val *= v
                if not val:
                    continue
                nk = tuple(sorted((fi, k, d) for fi, (k, d) in loc.items())) if loc else ()
                new_states[nk] = new_states.get(nk, 0) + val
        states = {k: v for k, v in new_states.items() if v}
        if not states:
            return Fraction(0)
    return Fraction(sum(states.values()), 9 ** len(order))


def evaluate_assembled(f: AssembledFoam) -> Fraction:
    if not f.closed:
        raise ValueError("only closed foams can be evaluated")
    total = Fraction(1)
    for facets, seams in _components(f):
        v = _eval_component(f, facets, seams)
        if not v:
            return Fraction(0)
        total *= v
    return total


def brute_force_evaluate(f: AssembledFoam) -> Fraction:
    """Reference evaluator: every assignment of a cut type to every germ orbit."""
    if not f.closed:
        raise ValueError("only closed foams can be evaluated")
    n = len(f.orbit_facet)
    total = Fraction(0)
    rots = {THETA_REF[i:] + THETA_REF[:i] for i in range(3)}
    for assign in itertools.product((DISC, CHOKE, PT), repeat=n):
        val = Fraction(1)
        for o in range(n):
            val *= CUT_COEFF[assign[o]]
        for s in f.seams:
            types = tuple(assign[o] for o in s)
            if len(set(types)) != 3:
                val = 0
                break
            val *= -THETA_VALUE if types in rots else THETA_VALUE
        if not val:
            continue
        for fi, fac in enumerate(f.facets):
            k = sum(1 for o in fac.orbits if assign[o] == CHOKE)
            l = fac.genus + sum(1 for o in fac.orbits if assign[o] == DISC)
            val *= sigma_kl(k, l)
            if not val:
                break
        total += val
    return total


_cache: Dict[tuple, Fraction] = {}
_cache_lock = threading.Lock()
CACHE_LIMIT = 200_000


_EMPTY = Web()


def evaluate_closed(x, check: bool = True) -> Fraction:
    """Evaluate a closed movie (or an already assembled closed foam)."""
    if isinstance(x, AssembledFoam):
        return evaluate_assembled(x)
    if isinstance(x, Movie):
        if not x.source.is_empty():
            raise ValueError("closed movies start at the empty web")
        events = x.events
    else:
        events = tuple(x)
    key = events
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    v = evaluate_assembled(assemble(_EMPTY, events, None, check))
    with _cache_lock:
        if len(_cache) > CACHE_LIMIT:
            _cache.clear()
        _cache[key] = v
    return v


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()
        _skel_cache.clear()
        _skel_exact.clear()
        _cycle_cache.clear()


def eval_movie_sum(chain: Sequence[FoamSum]) -> Fraction:
    """Evaluate a closed composite of foam sums (bilinear extension)."""
    if not chain:
        return Fraction(1)
    if not chain[0].source.is_empty() or not chain[-1].target.is_empty():
        raise MovieError("chain must start and end at the empty web")
    for a, b in zip(chain, chain[1:]):
        if a.target != b.source:
            raise MovieError("composition mismatch between consecutive foam sums")
    total = Fraction(0)
    for combo in itertools.product(*[fs.terms for fs in chain]):
        coeff = Fraction(1)
        events: List[MovieEvent] = []
        for c, mv in combo:
            coeff *= c
            events.extend(mv.events)
        if coeff:
            total += coeff * evaluate_closed(tuple(events))
    return total


# --- JSON --------------------------------------------------------------


def web_to_json(w: Web) -> dict:
    return {
        "edges": {str(e): [t, h] for e, (t, h) in sorted(w.edges.items(), key=lambda kv: idkey(kv[0]))},
        "vertices": {
            str(v): {"polarity": pol, "rotation": list(rot)}
            for v, (pol, rot) in sorted(w.vertices.items(), key=lambda kv: idkey(kv[0]))
        },
        "circles": sorted(w.circles, key=idkey),
    }


def web_from_json(d) -> Web:
    if not d:
        return Web()
    edges = {e: tuple(th) for e, th in d.get("edges", {}).items()}
    verts = {}
    for v, rec in d.get("vertices", {}).items():
        verts[v] = (rec["polarity"], tuple(rec["rotation"]))
    w = Web(edges, verts, d.get("circles", []))
    w.validate()
    return w


def event_from_json(d: dict) -> MovieEvent:
    op = d.get("op")
    if op == "birth":
        return Birth(d["id"])
    if op == "death":
        return Death(d["id"])
    if op == "zip":
        names = d.get("names", {}) or {}
        return Zip(tuple(d["dartA"]), tuple(d["dartB"]), **names)
    if op == "unzip":
        names = d.get("names") or [None, None]
        return Unzip(d["edge"], names[0], names[1])
    if op == "handle":
        return Handle(d["target"])
    if op == "choke":
        return Choke(d["target"], d.get("orientation", STANDARD))
    raise MovieError(f"unknown event op {op!r}")


def movie_from_json(d) -> Movie:
    if isinstance(d, (str, bytes)):
        d = json.loads(d)
    src = web_from_json(d.get("source"))
    events = []
    for i, ev in enumerate(d.get("events", [])):
        try:
            events.append(event_from_json(ev))
        except (KeyError, TypeError, ValueError) as exc:
            raise MovieError(f"event {i}: {exc}") from exc
    return Movie(src, tuple(events))


rebuild_seam_tables()
