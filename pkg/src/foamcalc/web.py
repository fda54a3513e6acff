"""Closed oriented trivalent webs stored as combinatorial maps.

A web has

* ``edges``: ``id -> (tail, head)``; every edge runs from a source vertex to a
  sink vertex,
* ``vertices``: ``id -> (polarity, rotation)`` where ``rotation`` is the
  anticlockwise cyclic triple of incident edge ids,
* ``circles``: ids of free oriented loops with no vertices.

Darts are ``(edge, 0)`` (the tail end) and ``(edge, 1)`` (the head end).  Face
tracing uses ``phi = sigma . alpha``; the face orbit of ``(e, 0)`` is the face on
the right of ``e`` and that of ``(e, 1)`` the face on its left.  Components are
treated spherically: nesting of components is not recorded, since neither the
spider evaluation of closed webs nor foams (abstract 2-complexes) can see it.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

SINK = "sink"
SOURCE = "source"

Id = Hashable
Dart = Tuple[Id, int]


class WebError(ValueError):
    """Raised when a web or an operation on it violates its invariants."""


class InvariantFailure(RuntimeError):
    """Internal invariant violated (e.g. a nonempty closed web with no reducible face)."""


_num_re = re.compile(r"(\d+)")


@functools.lru_cache(maxsize=1 << 16)
def idkey(x) -> tuple:
    """Natural sort key so that 'a2' < 'a10' and ints sort among strings."""
    if isinstance(x, int):
        return (0, x)
    s = str(x)
    return (1,) + tuple(int(p) if p.isdigit() else p for p in _num_re.split(s) if p != "")


def _rot_normal(rot: Sequence[Id]) -> tuple:
    i = min(range(3), key=lambda k: idkey(rot[k]))
    return tuple(rot[i:]) + tuple(rot[:i])


class Web:
    """Mutable-by-owner combinatorial map; public operations return new webs."""

    __slots__ = ("edges", "vertices", "circles", "_fresh")

    def __init__(self, edges=None, vertices=None, circles=None):
        self.edges: Dict[Id, Tuple[Id, Id]] = dict(edges or {})
        self.vertices: Dict[Id, Tuple[str, Tuple[Id, Id, Id]]] = {
            v: (pol, tuple(rot)) for v, (pol, rot) in (vertices or {}).items()
        }
        self.circles: set = set(circles or ())
        self._fresh = 0

    # --- basic queries -------------------------------------------------

    def copy(self) -> "Web":
        w = Web.__new__(Web)
        w.edges = dict(self.edges)
        w.vertices = dict(self.vertices)
        w.circles = set(self.circles)
        w._fresh = self._fresh
        return w

    def is_empty(self) -> bool:
        return not self.edges and not self.vertices and not self.circles

    def has(self, x: Id) -> bool:
        return x in self.edges or x in self.circles

    def is_circle(self, x: Id) -> bool:
        return x in self.circles

    def ids(self):
        return set(self.edges) | set(self.circles) | set(self.vertices)

    def fresh_id(self, prefix: str = "n") -> str:
        used = self.ids()
        while True:
            self._fresh += 1
            cand = f"{prefix}{self._fresh}"
            if cand not in used:
                return cand

    def key(self) -> tuple:
        """Exact (label-sensitive) identity of the web, rotation up to cyclic shift."""
        return (
            tuple(sorted(((e, t, h) for e, (t, h) in self.edges.items()), key=lambda r: idkey(r[0]))),
            tuple(
                sorted(
                    ((v, pol, _rot_normal(rot)) for v, (pol, rot) in self.vertices.items()),
                    key=lambda r: idkey(r[0]),
                )
            ),
            tuple(sorted(self.circles, key=idkey)),
        )

    def __eq__(self, other):
        return isinstance(other, Web) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Web(V={len(self.vertices)}, E={len(self.edges)}, circles={len(self.circles)})"

    def num_vertices(self) -> int:
        return len(self.vertices)

    # --- darts and faces ----------------------------------------------

    def dart_vertex(self, d: Dart) -> Id:
        return self.edges[d[0]][d[1]]

    def sigma(self, d: Dart) -> Dart:
        """Next dart anticlockwise around the vertex of d."""
        v = self.dart_vertex(d)
        pol, rot = self.vertices[v]
        i = rot.index(d[0])
        nxt = rot[(i + 1) % 3]
        return (nxt, 0 if pol == SOURCE else 1)

    def phi(self, d: Dart) -> Dart:
        return self.sigma((d[0], 1 - d[1]))

    def faces(self) -> List[List[Dart]]:
        """Face orbits of the non-circle part, deterministic order."""
        seen = set()
        out = []
        for e in sorted(self.edges, key=idkey):
            for end in (0, 1):
                d = (e, end)
                if d in seen:
                    continue
                orbit = []
                x = d
                while x not in seen:
                    seen.add(x)
                    orbit.append(x)
                    x = self.phi(x)
                out.append(orbit)
        return out

    def face_of(self) -> Dict[Dart, int]:
        return {d: i for i, f in enumerate(self.faces()) for d in f}

    def components(self) -> List[set]:
        """Connected components of the vertex graph, as sets of edge ids."""
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e, (t, h) in self.edges.items():
            for v in (t, h):
                parent.setdefault(v, v)
            parent[find(t)] = find(h)
        comps: Dict[Id, set] = {}
        for e, (t, h) in self.edges.items():
            comps.setdefault(find(t), set()).add(e)
        return sorted(comps.values(), key=lambda s: idkey(min(s, key=idkey)))

    def component_map(self) -> Dict[Id, int]:
        out = {}
        for i, comp in enumerate(self.components()):
            for e in comp:
                out[e] = i
        return out

    def validate(self) -> None:
        for e, (t, h) in self.edges.items():
            if t not in self.vertices or h not in self.vertices:
                raise WebError(f"edge {e!r} has a missing endpoint")
            if self.vertices[t][0] != SOURCE or self.vertices[h][0] != SINK:
                raise WebError(f"edge {e!r} must run from a source to a sink")
        for v, (pol, rot) in self.vertices.items():
            if len(rot) != 3 or len(set(rot)) != 3:
                raise WebError(f"vertex {v!r} is not trivalent")
            end = 0 if pol == SOURCE else 1
            for e in rot:
                if e not in self.edges or self.edges[e][end] != v:
                    raise WebError(f"vertex {v!r} lists edge {e!r} inconsistently")
        if self.circles & set(self.edges):
            raise WebError("circle and edge ids overlap")
        faces = self.faces()
        fmap = {d: i for i, f in enumerate(faces) for d in f}
        for comp in self.components():
            verts = {self.edges[e][0] for e in comp} | {self.edges[e][1] for e in comp}
            nf = len({fmap[(e, k)] for e in comp for k in (0, 1)})
            if len(verts) - len(comp) + nf != 2:
                raise WebError("web is not planar (V - E + F != 2 on a component)")

    # --- elementary operations (in place; callers copy) ----------------

    def _replace_slot(self, v: Id, old: Id, new: Id) -> None:
        pol, rot = self.vertices[v]
        self.vertices[v] = (pol, tuple(new if x == old else x for x in rot))

    def apply_birth(self, c: Id) -> None:
        if self.has(c) or c in self.vertices:
            raise WebError(f"id {c!r} already in use")
        self.circles.add(c)

    def apply_death(self, c: Id) -> None:
        if c not in self.circles:
            raise WebError(f"{c!r} is not a free circle")
        self.circles.remove(c)

    def zip_roles(self, dart_a: Dart, dart_b: Dart, check: bool = True) -> Tuple[Id, Id]:
        """Return (x, y): x's right side and y's left side face the zipping region."""
        a, sa = dart_a
        b, sb = dart_b
        if a == b:
            raise WebError("cannot zip an edge with itself")
        for z in (a, b):
            if not self.has(z):
                raise WebError(f"{z!r} is not an edge or circle")
        ca, cb = self.is_circle(a), self.is_circle(b)
        if ca and cb:
            return a, b
        if ca:
            return (b, a) if sb == 0 else (a, b)
        if cb:
            return (a, b) if sa == 0 else (b, a)
        if sa == sb:
            raise WebError("zip needs one right-side (tail) dart and one left-side (head) dart")
        x, y = (a, b) if sa == 0 else (b, a)
        if not check:
            return x, y
        cmap = self.component_map()
        if cmap[x] == cmap[y]:
            fmap = self.face_of()
            if fmap[(x, 0)] != fmap[(y, 1)]:
                raise WebError(f"edges {x!r} and {y!r} do not share a face")
        return x, y

    def apply_zip(self, x: Id, y: Id, names: dict) -> dict:
        """Zip x (left strand) with y (right strand) into an H.

        ``names`` supplies ids: sink, source, bar, x_lo, x_hi, y_lo, y_hi (missing
        entries are generated).  For a circle, ``*_lo`` names the single new edge.
        """
        names = dict(names)
        for k, pre in (("sink", "s"), ("source", "t"), ("bar", "b")):
            if names.get(k) is None:
                names[k] = self.fresh_id("~" + pre)
        S, T, bar = names["sink"], names["source"], names["bar"]
        created = {}
        for z, lo, hi in ((x, "x_lo", "x_hi"), (y, "y_lo", "y_hi")):
            if names.get(lo) is None:
                names[lo] = self.fresh_id("~e")
            if self.is_circle(z):
                names[hi] = names[lo]
            elif names.get(hi) is None:
                names[hi] = self.fresh_id("~e")
        # remove old strands, then add new cells
        ends = {}
        for z in (x, y):
            if self.is_circle(z):
                self.circles.remove(z)
                ends[z] = None
            else:
                ends[z] = self.edges.pop(z)
        for new in (S, T, bar, names["x_lo"], names["x_hi"], names["y_lo"], names["y_hi"]):
            if new in self.edges or new in self.circles or new in self.vertices:
                raise WebError(f"zip target id {new!r} already in use")
        for z, lo, hi in ((x, names["x_lo"], names["x_hi"]), (y, names["y_lo"], names["y_hi"])):
            if ends[z] is None:
                self.edges[lo] = (T, S)
            else:
                a, b = ends[z]
                self.edges[lo] = (a, S)
                self.edges[hi] = (T, b)
                self._replace_slot(a, z, lo)
                self._replace_slot(b, z, hi)
            created[z] = (lo, hi, ends[z] is None)
        self.edges[bar] = (T, S)
        self.vertices[S] = (SINK, (bar, names["x_lo"], names["y_lo"]))
        self.vertices[T] = (SOURCE, (bar, names["y_hi"], names["x_hi"]))
        return {"names": names, "created": created}

    def unzip_pairs(self, e: Id):
        """For the edge e (T -> S): ((s1, t2), (s2, t1), S, T, i, j)."""
        if e not in self.edges:
            raise WebError(f"{e!r} is not an edge")
        T, S = self.edges[e]
        _, rs = self.vertices[S]
        _, rt = self.vertices[T]
        i = rs.index(e)
        j = rt.index(e)
        s1, s2 = rs[(i + 1) % 3], rs[(i + 2) % 3]
        t1, t2 = rt[(j + 1) % 3], rt[(j + 2) % 3]
        if s1 == t1 or s2 == t2:
            raise WebError(f"unzip of {e!r}: rotation system is not planar here")
        return (s1, t2), (s2, t1), S, T, i, j

    def apply_unzip(self, e: Id, m1: Optional[Id] = None, m2: Optional[Id] = None) -> dict:
        (s1, t2), (s2, t1), S, T, i, j = self.unzip_pairs(e)
        merged = []
        olds = {}
        for s, t in ((s1, t2), (s2, t1)):
            olds[s] = self.edges[s]
            olds[t] = self.edges[t]
        del self.edges[e]
        for z in (s1, s2, t1, t2):
            self.edges.pop(z, None)
        del self.vertices[S]
        del self.vertices[T]
        out_names = []
        for (s, t), m in (((s1, t2), m1), ((s2, t1), m2)):
            if m is None:
                m = self.fresh_id("~e")
            if m in self.edges or m in self.circles or m in self.vertices:
                raise WebError(f"unzip target id {m!r} already in use")
            if s == t:
                self.circles.add(m)
                merged.append((s, t, m, True))
            else:
                a = olds[s][0]
                b = olds[t][1]
                self.edges[m] = (a, b)
                self._replace_slot(a, s, m)
                self._replace_slot(b, t, m)
                merged.append((s, t, m, False))
            out_names.append(m)
        return {"S": S, "T": T, "i": i, "j": j, "merged": merged, "names": out_names}

    # convenience functional forms
    def birth(self, c):
        w = self.copy()
        w.apply_birth(c)
        return w

    def death(self, c):
        w = self.copy()
        w.apply_death(c)
        return w

    def zip(self, dart_a, dart_b, **names):
        w = self.copy()
        x, y = w.zip_roles(dart_a, dart_b)
        w.apply_zip(x, y, names)
        return w

    def unzip(self, e, m1=None, m2=None):
        w = self.copy()
        w.apply_unzip(e, m1, m2)
        return w


def disjoint_union(a: Web, b: Web) -> Web:
    if a.ids() & b.ids():
        raise WebError("webs share identifiers")
    w = a.copy()
    w.edges.update(b.edges)
    w.vertices.update(b.vertices)
    w.circles |= b.circles
    return w


def relabel(w: Web, prefix: str) -> Web:
    f = lambda x: f"{prefix}{x}"
    return Web(
        {f(e): (f(t), f(h)) for e, (t, h) in w.edges.items()},
        {f(v): (pol, tuple(f(e) for e in rot)) for v, (pol, rot) in w.vertices.items()},
        {f(c) for c in w.circles},
    )


# --- reducible faces ---------------------------------------------------


@dataclass(frozen=True)
class Circle:
    circle: Id


@dataclass(frozen=True)
class Bigon:
    edges: Tuple[Id, Id]  # (e1, e2), e1 the lower id
    vertices: Tuple[Id, Id]  # (source T, sink S)


@dataclass(frozen=True)
class Square:
    edges: Tuple[Id, Id, Id, Id]  # a, b, c, d in face order; a lowest id
    vertices: Tuple[Id, Id, Id, Id]


Reducible = object


def find_reducible(w: Web):
    """Circle, else bigon, else square (lowest ids first); None only for the empty web."""
    if w.circles:
        return Circle(min(w.circles, key=idkey))
    if not w.edges:
        return None
    faces = w.faces()
    best = None
    for f in faces:
        if len(f) == 2:
            e1, e2 = sorted((f[0][0], f[1][0]), key=idkey)
            if e1 == e2:
                continue
            cand = (idkey(e1), idkey(e2))
            if best is None or cand < best[0]:
                best = (cand, Bigon((e1, e2), w.edges[e1]))
    if best is not None:
        return best[1]
    for f in faces:
        if len(f) == 4:
            es = [d[0] for d in f]
            if len(set(es)) != 4:
                continue
            k = min(range(4), key=lambda i: idkey(es[i]))
            es = es[k:] + es[:k]
            ds = f[k:] + f[:k]
            vs = tuple(w.dart_vertex(d) for d in ds)
            if len(set(vs)) != 4:
                continue
            cand = tuple(sorted(map(idkey, es)))
            if best is None or cand < best[0]:
                best = (cand, Square(tuple(es), vs))
    if best is not None:
        return best[1]
    raise InvariantFailure("nonempty closed web without circle, bigon or square face")


# --- link diagrams -----------------------------------------------------


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}, column {col})"
        super().__init__(msg + loc)
        self.line = line
        self.col = col


@dataclass
class Crossing:
    sign: int  # +1 or -1
    # arc-ends in anticlockwise order as (arc label, 'in' | 'out')
    ends: Tuple[Tuple[Id, str], ...]

    def oriented_ends(self):
        """(in1, in2, out1, out2): anticlockwise order with in2 following in1."""
        ends = self.ends
        for r in range(4):
            rot = ends[r:] + ends[:r]
            if [d for _, d in rot] == ["in", "in", "out", "out"]:
                return tuple(a for a, _ in rot)
        raise ParseError("crossing ends are not oriented in-in-out-out")


@dataclass
class LinkDiagram:
    crossings: List[Crossing]
    free_loops: int = 0
    source: str = "pd"
    label: str = ""

    @property
    def n(self) -> int:
        return len(self.crossings)

    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    def validate(self) -> None:
        seen: Dict[Id, List[str]] = {}
        for c in self.crossings:
            c.oriented_ends()
            for a, d in c.ends:
                seen.setdefault(a, []).append(d)
        for a, ds in seen.items():
            if len(ds) != 2:
                raise ParseError(f"dangling arc {a!r}: appears {len(ds)} time(s)")
            if sorted(ds) != ["in", "out"]:
                raise ParseError(f"orientation conflict on arc {a!r}")


def parse_braid(strands: int, word: Sequence[int]) -> LinkDiagram:
    """Closure of a braid word; letter i is a positive crossing of strands i, i+1."""
    if strands < 1:
        raise ParseError("a braid needs at least one strand")
    arcs = list(range(1, strands + 1))
    top = {}
    nxt = strands + 1
    raw = []
    for letter in word:
        i = abs(letter)
        if letter == 0 or i >= strands:
            raise ParseError(f"braid letter {letter} out of range for {strands} strands")
        lo, hi = i - 1, i
        in1, in2 = arcs[lo], arcs[hi]
        out1, out2 = nxt, nxt + 1
        nxt += 2
        raw.append((1 if letter > 0 else -1, in1, in2, out1, out2))
        arcs[lo], arcs[hi] = out2, out1
    # close: the top arc at position p is the bottom arc p
    alias = {arcs[p]: p + 1 for p in range(strands)}
    fix = lambda a: alias.get(a, a)
    crossings = []
    touched = set()
    for sign, in1, in2, out1, out2 in raw:
        in1, in2, out1, out2 = map(fix, (in1, in2, out1, out2))
        touched.update((in1, in2, out1, out2))
        crossings.append(Crossing(sign, ((in1, "in"), (in2, "in"), (out1, "out"), (out2, "out"))))
    # bottom arcs that never meet a crossing are free loops
    free = sum(1 for p in range(strands) if (p + 1) not in touched)
    d = LinkDiagram(crossings, free, "braid", f"braid {strands}; {','.join(map(str, word))}")
    d.validate()
    return d


_braid_re = re.compile(r"^\s*(?:braid\s*:)?\s*(\d+)\s*;(.*)$", re.S)


def parse_braid_text(text: str) -> LinkDiagram:
    """Parse "braid: <strands>; <comma-separated signed integers>" (prefix optional)."""
    m = _braid_re.match(text)
    if not m:
        raise ParseError(f"malformed braid specification {text!r}", 1, 1)
    strands = int(m.group(1))
    body = m.group(2)
    word = []
    if body.strip():
        start = m.start(2)
        for tok in body.split(","):
            lead = len(tok) - len(tok.lstrip())
            if not re.fullmatch(r"[-+]?\d+", tok.strip()):
                raise ParseError(f"bad braid letter {tok.strip()!r}", *_line_col(text, start + lead))
            word.append(int(tok))
            start += len(tok) + 1
    return parse_braid(strands, word)


_pd_token = re.compile(r"X([pm])\[\s*([^\]]*)\]")


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def parse_pd(text: str) -> LinkDiagram:
    """Parse a signed PD code such as ``Xp[1,2,2,1]`` or ``Xm[a,b,c,d] Xp[...]``.

    Arc labels are listed clockwise around the crossing starting from the
    incoming under-strand, so the under strand runs a -> c.  For ``Xp`` the over
    strand runs b -> d, for ``Xm`` it runs d -> b.  Separators between crossings
    (whitespace, commas, an optional ``PD[ ... ]`` wrapper) are ignored.
    """
    body = text.strip()
    offset = 0
    wrap = re.match(r"^PD\s*\[", body)
    if wrap:
        if not body.endswith("]"):
            raise ParseError("unterminated PD[ ... ] wrapper", *_line_col(text, len(text)))
        offset = wrap.end()
        body = body[wrap.end() : -1]
    base = text.find(body) if body else 0
    crossings = []
    pos = 0
    for m in _pd_token.finditer(body):
        gap = body[pos : m.start()]
        if gap.strip(" \t\r\n,"):
            bad = pos + len(gap) - len(gap.lstrip(" \t\r\n,"))
            raise ParseError(f"unexpected text {gap.strip()!r}", *_line_col(text, base + bad))
        labels = [s.strip() for s in m.group(2).split(",")]
        if len(labels) != 4 or not all(labels):
            raise ParseError("a crossing needs exactly four arc labels", *_line_col(text, base + m.start()))
        labels = [int(s) if re.fullmatch(r"-?\d+", s) else s for s in labels]
        a, b, c, d = labels
        if m.group(1) == "p":
            dirs = {"a": "in", "b": "in", "c": "out", "d": "out"}
            sign = 1
        else:
            dirs = {"a": "in", "b": "out", "c": "out", "d": "in"}
            sign = -1
        # clockwise a, b, c, d  ->  anticlockwise a, d, c, b
        ends = ((a, dirs["a"]), (d, dirs["d"]), (c, dirs["c"]), (b, dirs["b"]))
        crossings.append(Crossing(sign, ends))
        pos = m.end()
    tail = body[pos:]
    if tail.strip(" \t\r\n,"):
        bad = pos + len(tail) - len(tail.lstrip(" \t\r\n,"))
        raise ParseError(f"unexpected text {tail.strip()!r}", *_line_col(text, base + bad))
    if not crossings and body.strip():
        raise ParseError("no crossings found", 1, 1)
    diag = LinkDiagram(crossings, 0, "pd", text.strip())
    diag.validate()
    return diag


def braid_to_pd(strands: int, word: Sequence[int]) -> str:
    """Signed PD text (this module's convention) for the closure of a braid word."""
    d = parse_braid(strands, word)
    if d.free_loops:
        raise ValueError("braid closure has free loops; PD cannot express them")
    out = []
    for c in d.crossings:
        in1, in2, out1, out2 = c.oriented_ends()
        if c.sign > 0:
            out.append(f"Xp[{in2},{in1},{out2},{out1}]")
        else:
            out.append(f"Xm[{in1},{out2},{out1},{in2}]")
    return " ".join(out)


def mirror_diagram(d: LinkDiagram) -> LinkDiagram:
    """Mirror image: anticlockwise orders reversed, signs flipped."""
    cs = [Crossing(-c.sign, tuple(reversed(c.ends))) for c in d.crossings]
    return LinkDiagram(cs, d.free_loops, d.source, "mirror " + d.label)


def diagram_union(a: LinkDiagram, b: LinkDiagram) -> LinkDiagram:
    """Split union of two diagrams (labels of b are prefixed)."""
    cs = list(a.crossings)
    for c in b.crossings:
        cs.append(Crossing(c.sign, tuple((("u", x), d) for x, d in c.ends)))
    return LinkDiagram(cs, a.free_loops + b.free_loops, "union", f"({a.label}) u ({b.label})")


# --- resolution --------------------------------------------------------


@dataclass
class Resolution:
    web: Web
    q_shift: int
    height: int
    # per crossing: web element carrying each of the ends (in1, in2, out1, out2)
    strand_at: List[Tuple[Id, Id, Id, Id]] = field(default_factory=list)


def _arc_name(a) -> str:
    return f"a{a}" if not isinstance(a, tuple) else "a" + "_".join(map(str, a))


def resolve(d: LinkDiagram, choice: Sequence[int]) -> Resolution:
    """Resolve every crossing: bit 0/1 picks identity or H as described below.

    positive: 0 -> identity (q^2, height 0), 1 -> H (q^3, height 1)
    negative: 0 -> H (q^-3, height -1),      1 -> identity (q^-2, height 0)
    """
    if len(choice) != d.n:
        raise ValueError("need one bit per crossing")
    q_shift = 0
    height = 0
    is_h = []
    for c, b in zip(d.crossings, choice):
        if c.sign > 0:
            q_shift += 3 if b else 2
            height += 1 if b else 0
            is_h.append(bool(b))
        else:
            q_shift += -2 if b else -3
            height += 0 if b else -1
            is_h.append(not b)
    # where each arc ends: arc -> (crossing, slot) for its head (in) end
    orient = [c.oriented_ends() for c in d.crossings]
    head_at = {}
    for k, (in1, in2, out1, out2) in enumerate(orient):
        head_at[in1] = (k, 0)
        head_at[in2] = (k, 1)
    # identity smoothing: in1 -> out2, in2 -> out1
    through = {}
    for k, (in1, in2, out1, out2) in enumerate(orient):
        if not is_h[k]:
            through[(k, 0)] = out2
            through[(k, 1)] = out1

    edges = {}
    vertices = {}
    circles = set()
    strand_at = [[None] * 4 for _ in d.crossings]
    visited = set()

    def walk(first_arc):
        """Follow arcs from first_arc through identity crossings; return (arcs, end)."""
        arcs = []
        a = first_arc
        passes = []
        while True:
            if a in visited:
                return arcs, None, passes
            visited.add(a)
            arcs.append(a)
            k, slot = head_at[a]
            if is_h[k]:
                return arcs, (k, slot), passes
            passes.append((k, slot))
            a = through[(k, slot)]

    for k, (in1, in2, out1, out2) in enumerate(orient):
        if not is_h[k]:
            continue
        S, T, bar = f"s{k}", f"t{k}", f"b{k}"
        edges[bar] = (T, S)
        strand_at[k][0] = None
    # edges start at the out-ends of H crossings
    for k, (in1, in2, out1, out2) in enumerate(orient):
        if not is_h[k]:
            continue
        for out_slot, first in ((2, out1), (3, out2)):
            arcs, end, passes = walk(first)
            name = _arc_name(first)
            ek, eslot = end
            edges[name] = (f"t{k}", f"s{ek}")
            strand_at[k][out_slot] = name
            strand_at[ek][eslot] = name
            for pk, ps in passes:
                strand_at[pk][ps] = name
                strand_at[pk][3 if ps == 0 else 2] = name
    # remaining arcs form circles through identity crossings
    for a in sorted(head_at, key=idkey):
        if a in visited:
            continue
        start = a
        arcs, end, passes = walk(start)
        name = "c" + _arc_name(min(arcs, key=idkey))[1:]
        circles.add(name)
        for pk, ps in passes:
            strand_at[pk][ps] = name
            strand_at[pk][3 if ps == 0 else 2] = name
    for i in range(d.free_loops):
        circles.add(f"loop{i}")
    for k in range(d.n):
        if is_h[k]:
            in1e, in2e, out1e, out2e = strand_at[k]
            vertices[f"s{k}"] = (SINK, (f"b{k}", in1e, in2e))
            vertices[f"t{k}"] = (SOURCE, (f"b{k}", out1e, out2e))
    w = Web(edges, vertices, circles)
    w.validate()
    return Resolution(w, q_shift, height, [tuple(s) for s in strand_at])


def resolve_web(d: LinkDiagram, choice: Sequence[int]):
    r = resolve(d, choice)
    return r.web, r.q_shift, r.height
