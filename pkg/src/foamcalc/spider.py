"""The sl(3) spider: evaluation of closed webs, the quantum invariant, and pairings.

Closed webs are reduced by the skein relations

    circle = [3],   bigon = [2] * strand,   square = both smoothings,

independently of the foam layer (the reduction order here differs from
:mod:`foamcalc.simplify` on purpose, so the two can be compared).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import BIGON, CIRCLE, LaurentPoly
from .web import SINK, SOURCE, InvariantFailure, LinkDiagram, Web, WebError, idkey, resolve

ONE = LaurentPoly.const(1)


def _canonical(w: Web) -> tuple:
    """Relabelling-invariant key of a closed web (per component, sorted)."""
    comps = []
    for comp in w.components():
        best = None
        for e0 in sorted(comp, key=idkey):
            # BFS over darts starting at the tail dart of e0
            label = {}
            order = []
            stack = [(e0, 0)]
            code = []
            while stack:
                d = stack.pop()
                if d[0] in label:
                    continue
                label[d[0]] = len(label)
                order.append(d[0])
                for end in (0, 1):
                    v = w.edges[d[0]][end]
                    pol, rot = w.vertices[v]
                    i = rot.index(d[0])
                    for k in (1, 2):
                        stack.append((rot[(i + k) % 3], 0))
            for e in order:
                t, h = w.edges[e]
                rt = w.vertices[t][1]
                rh = w.vertices[h][1]
                it, ih = rt.index(e), rh.index(e)
                code.append(
                    (
                        label[rt[(it + 1) % 3]], label[rt[(it + 2) % 3]],
                        label[rh[(ih + 1) % 3]], label[rh[(ih + 2) % 3]],
                    )
                )
            code = tuple(code)
            if best is None or code < best:
                best = code
        comps.append(best)
    return (len(w.circles), tuple(sorted(comps)))


_memo: Dict[tuple, LaurentPoly] = {}


def _pick_face(w: Web):
    """Highest-id bigon, else highest-id square (the opposite of simplify's order)."""
    faces = w.faces()
    best = None
    for f in faces:
        if len(f) == 2 and f[0][0] != f[1][0]:
            key = max(idkey(f[0][0]), idkey(f[1][0]))
            if best is None or key > best[0]:
                best = (key, f)
    if best is not None:
        return best[1]
    for f in faces:
        if len(f) == 4 and len({d[0] for d in f}) == 4:
            key = max(idkey(d[0]) for d in f)
            if best is None or key > best[0]:
                best = (key, f)
    if best is None:
        raise InvariantFailure("closed web with no bigon or square face")
    return best[1]


def _unzip_naming(w: Web, e, keep, name):
    """Unzip e in place; the merged strand containing ``keep`` gets ``name``."""
    (s1, t2), (s2, t1), *_ = w.unzip_pairs(e)
    if keep in (s1, t2):
        w.apply_unzip(e, name, None)
    elif keep in (s2, t1):
        w.apply_unzip(e, None, name)
    else:
        raise InvariantFailure(f"{keep!r} is not adjacent to {e!r}")


def evaluate_closed_web(w: Web) -> LaurentPoly:
    """Kuperberg bracket of a closed web, normalised with the circle = [3]."""
    if w.circles:
        n = len(w.circles)
        rest = w.copy()
        rest.circles = set()
        return CIRCLE**n * evaluate_closed_web(rest)
    if not w.edges:
        return ONE
    comps = w.components()
    if len(comps) > 1:
        total = ONE
        for comp in comps:
            verts = {w.edges[e][0] for e in comp} | {w.edges[e][1] for e in comp}
            sub = Web({e: w.edges[e] for e in comp}, {v: w.vertices[v] for v in verts})
            total = total * evaluate_closed_web(sub)
        return total
    key = _canonical(w)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    f = _pick_face(w)
    if len(f) == 2:
        e, other = sorted((f[0][0], f[1][0]), key=idkey, reverse=True)
        x = w.copy()
        _unzip_naming(x, e, other, "~bub")
        x.apply_death("~bub")
        val = BIGON * evaluate_closed_web(x)
    else:
        es = [d[0] for d in f]
        val = LaurentPoly()
        for k in (0, 1):
            x = w.copy()
            _unzip_naming(x, es[k], es[k + 1], "~sq")
            _unzip_naming(x, es[k + 2], "~sq", "~sqc")
            x.apply_death("~sqc")
            val = val + evaluate_closed_web(x)
    _memo[key] = val
    return val


def quantum_invariant(d: LinkDiagram) -> LaurentPoly:
    """Graded Euler characteristic of the cube: sum over resolutions."""
    total = LaurentPoly()
    for alpha in itertools.product((0, 1), repeat=d.n):
        r = resolve(d, alpha)
        term = evaluate_closed_web(r.web).shift(r.q_shift)
        total = total + (term if r.height % 2 == 0 else -term)
    return total


# --- webs with boundary and the pairing --------------------------------


@dataclass
class BoundaryWeb:
    """A web in a disc.  Edge endpoints may be boundary points ``("bd", i)``.

    Boundary points are numbered anticlockwise around the disc.
    """

    edges: Dict[object, Tuple[object, object]]
    vertices: Dict[object, Tuple[str, Tuple]] = field(default_factory=dict)
    circles: set = field(default_factory=set)
    n_points: int = 0

    def point_edge(self, i):
        for e, (t, h) in self.edges.items():
            if t == ("bd", i):
                return e, "out_of_boundary"
            if h == ("bd", i):
                return e, "into_boundary"
        raise WebError(f"boundary point {i} is not attached")

    def signature(self):
        return tuple(self.point_edge(i)[1] for i in range(self.n_points))


def _is_bd(x):
    return isinstance(x, tuple) and len(x) == 2 and x[0] == "bd"


def star(a: BoundaryWeb) -> BoundaryWeb:
    """Mirror image with all orientations reversed (the pairing's adjoint)."""
    edges = {}
    for e, (t, h) in a.edges.items():
        edges[e] = (h, t)
    verts = {}
    for v, (pol, rot) in a.vertices.items():
        verts[v] = (SINK if pol == SOURCE else SOURCE, tuple(reversed(rot)))
    return BoundaryWeb(edges, verts, set(a.circles), a.n_points)


def glue(a: BoundaryWeb, b: BoundaryWeb) -> Web:
    """Close up: a's disc glued to b's disc pointwise along the boundary."""
    if a.n_points != b.n_points:
        raise WebError("boundary sizes differ")
    pa = lambda x: ("A", x)
    pb = lambda x: ("B", x)
    pieces = {}
    for e, (t, h) in a.edges.items():
        pieces[pa(e)] = (t if _is_bd(t) else pa(t), h if _is_bd(h) else pa(h))
    for e, (t, h) in b.edges.items():
        pieces[pb(e)] = (t if _is_bd(t) else pb(t), h if _is_bd(h) else pb(h))
    # at each point one piece ends (head) and the other starts (tail)
    nxt = {}
    for i in range(a.n_points):
        ends = [p for p, (t, h) in pieces.items() if h == ("bd", i)]
        starts = [p for p, (t, h) in pieces.items() if t == ("bd", i)]
        if len(ends) != 1 or len(starts) != 1:
            raise WebError(f"orientations do not match at boundary point {i}")
        nxt[ends[0]] = starts[0]
    edges = {}
    rename = {}
    circles = set()
    done = set()
    order = sorted(pieces, key=lambda x: (x[0], idkey(x[1])))
    # open chains start at a piece whose tail is an interior vertex
    for p in order:
        if _is_bd(pieces[p][0]):
            continue
        chain = [p]
        while _is_bd(pieces[chain[-1]][1]):
            chain.append(nxt[chain[-1]])
        done.update(chain)
        name = f"{chain[0][0]}{chain[0][1]}"
        edges[name] = (pieces[chain[0]][0], pieces[chain[-1]][1])
        rename[chain[0]] = name
        rename[chain[-1]] = name
    # what is left runs boundary to boundary and closes up into circles
    for p in order:
        if p in done:
            continue
        cur = p
        while cur not in done:
            done.add(cur)
            cur = nxt[cur]
        circles.add(f"{p[0]}{p[1]}")
    verts = {}
    for side, web, pf in (("A", a, pa), ("B", b, pb)):
        for v, (pol, rot) in web.vertices.items():
            verts[pf(v)] = (pol, tuple(rename[pf(e)] for e in rot))
        for c in web.circles:
            circles.add(f"{side}c{c}")
    w = Web(edges, verts, circles)
    w.validate()
    return w


def pairing(a: BoundaryWeb, b: BoundaryWeb) -> LaurentPoly:
    """<a, b> = evaluation of star(a) glued to b."""
    return evaluate_closed_web(glue(star(a), b))


def pairing_matrix(basis: Sequence[BoundaryWeb]) -> List[List[LaurentPoly]]:
    return [[pairing(x, y) for y in basis] for x in basis]


def determinant(M: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Fraction-free (Bareiss) determinant over Q[q, q^-1]."""
    n = len(M)
    if n == 0:
        return ONE
    A = [list(r) for r in M]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if A[k][k].is_zero():
            sw = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if sw is None:
                return LaurentPoly()
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).divmod_exact(prev)
        prev = A[k][k]
    det = A[n - 1][n - 1]
    return det if sign > 0 else -det


def two_strand_basis() -> Tuple[BoundaryWeb, BoundaryWeb]:
    """Identity smoothing and H on points 0 (in), 1 (in), 2 (out), 3 (out)."""
    bd = lambda i: ("bd", i)
    ident = BoundaryWeb({"l": (bd(0), bd(3)), "r": (bd(1), bd(2))}, n_points=4)
    h = BoundaryWeb(
        {
            "bar": ("T", "S"),
            "e0": (bd(0), "S"),
            "e1": (bd(1), "S"),
            "e2": ("T", bd(2)),
            "e3": ("T", bd(3)),
        },
        {"S": (SINK, ("bar", "e0", "e1")), "T": (SOURCE, ("bar", "e2", "e3"))},
        n_points=4,
    )
    return ident, h
