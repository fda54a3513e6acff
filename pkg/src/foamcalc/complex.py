"""The cube of resolutions, reduced to a complex of graded vector spaces over Q.

Every resolution web is simplified to empty summands; the differential entry
between summand a (at alpha) and summand b (at alpha') is the evaluation of the
closed foam iota_a ; edge ; p_b, times the cube sign.  Homology dimensions
come from exact ranks in each (height, q-degree) block.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .algebra import BiPoly, LaurentPoly
from .foam import (
    HalfFoam, MovieEvent, Unzip, Zip, apply_event, assemble, clear_cache, cut_half, evaluate_closed,
    evaluate_glued, evaluate_skeleton_cached, foam_degree, glue_halves,
)
from .simplify import Summand, simplify
from .web import LinkDiagram, Resolution, Web, resolve


class ComplexError(RuntimeError):
    pass


@dataclass
class CubeSummand:
    vertex: Tuple[int, ...]
    index: int
    q: int
    summand: Summand


@dataclass
class ReducedComplex:
    # height -> list of summands
    chains: Dict[int, List[CubeSummand]]
    # (height, q) -> matrix rows (target at height+1) x cols (source at height)
    diffs: Dict[Tuple[int, int], List[List[Fraction]]]
    n_crossings: int = 0
    stats: dict = field(default_factory=dict)

    def block(self, i: int, j: int) -> List[CubeSummand]:
        return [s for s in self.chains.get(i, []) if s.q == j]

    def heights(self):
        return sorted(self.chains)

    def qdegrees(self):
        return sorted({s.q for ss in self.chains.values() for s in ss})


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FOAMCALC_THREADS", "1")))
    except ValueError:
        return 1


def edge_event(d: LinkDiagram, k: int, src: Resolution, dst: Resolution) -> MovieEvent:
    """Zip (positive crossing) or unzip (negative crossing) at crossing k."""
    if d.crossings[k].sign > 0:
        x = src.strand_at[k][0]
        y = src.strand_at[k][1]
        in1e, in2e, out1e, out2e = dst.strand_at[k]
        return Zip(
            (x, 0), (y, 1),
            sink=f"s{k}", source=f"t{k}", bar=f"b{k}",
            x_lo=in1e, x_hi=out2e, y_lo=in2e, y_hi=out1e,
        )
    m1, m2 = dst.strand_at[k][0], dst.strand_at[k][1]
    return Unzip(f"b{k}", m1, m2)


def cube_sign(alpha: Sequence[int], k: int) -> int:
    return -1 if sum(alpha[:k]) % 2 else 1


def _edge_entries(job):
    """Evaluate all equal-degree entries of one cube edge (picklable worker)."""
    ev, sign, src, dst, check = job
    out = []
    for a, sa in src:
        for b, sb in dst:
            if sa.q != sb.q and not check:
                continue
            events = sa.summand.i_events + (ev,) + sb.summand.p_events
            v = evaluate_closed(events, check=False)
            if v:
                v = v * sign * sa.summand.i_coeff * sb.summand.p_coeff
            if sa.q != sb.q:
                if v:
                    raise ComplexError("nonzero differential entry between unequal q-degrees")
                continue
            if v and check:
                deg = foam_degree(assemble(Web(), events, None, False))
                if deg != 0:
                    raise ComplexError(f"nonzero entry with foam degree {deg}")
            out.append((a, b, v))
    return out


# --- edge matrices by gluing ---------------------------------------------
#
# iota_a ; edge ends at the target web W and p_b starts there, so both halves
# are assembled once (the projections once per resolution) and each entry
# only glues a pair along W and evaluates the closed skeleton.


class _Simplifier:
    """simplify() and the bottom halves of its projections, memoised by web identity."""

    def __init__(self):
        self.summ = {}
        self.bottoms = {}

    def summands(self, w: Web) -> List[Summand]:
        k = w.key()
        hit = self.summ.get(k)
        if hit is None:
            hit = self.summ[k] = simplify(w)
        return hit

    def bottom_halves(self, w: Web) -> List[HalfFoam]:
        k = w.key()
        hit = self.bottoms.get(k)
        if hit is None:
            hit = self.bottoms[k] = [cut_half("bottom", w, s.p_events) for s in self.summands(w)]
        return hit


def _edge_entries_glued(job):
    ev, sign, src, dst, wb, check = job
    bottoms = _worker_simplifier().bottom_halves(wb)
    out = []
    by_q: Dict[int, List[Tuple[int, CubeSummand, HalfFoam]]] = {}
    for (b, sb), half in zip(dst, bottoms):
        by_q.setdefault(sb.q, []).append((b, sb, half))
    for a, sa in src:
        targets = by_q.get(sa.q)
        if not targets:
            continue
        top = cut_half("top", wb, sa.summand.i_events + (ev,))
        c = sign * sa.summand.i_coeff
        for b, sb, half in targets:
            if check:
                chi, seams = glue_halves(top, half)
                v = evaluate_skeleton_cached(chi, seams)
                if v and 2 * sum(chi) != 0:
                    raise ComplexError(f"nonzero entry with foam degree {2 * sum(chi)}")
            else:
                v = evaluate_glued(top, half)
            if v:
                out.append((a, b, v * c * sb.summand.p_coeff))
    return out


_SIMPLIFIER = None


def _worker_simplifier() -> _Simplifier:
    global _SIMPLIFIER
    if _SIMPLIFIER is None:
        _SIMPLIFIER = _Simplifier()
    return _SIMPLIFIER


def reset_caches() -> None:
    """Drop memoised simplifications, half foams and closed evaluations."""
    global _SIMPLIFIER
    _SIMPLIFIER = None
    clear_cache()


METHODS = ("glued", "direct")


def build_complex(d: LinkDiagram, check_grading: bool = False, method: str = "glued") -> ReducedComplex:
    """Cube of resolutions with every vertex web simplified to empty webs.

    ``method="direct"`` evaluates every differential entry as one closed foam
    (and with ``check_grading`` asserts degree 0 on nonzero entries);
    ``"glued"`` assembles each basis half once and glues pairs along the
    target web (``check_grading`` asserts the glued foam has degree 0).  Both
    produce the same matrices.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    n = d.n
    res = {}
    chains: Dict[int, List[CubeSummand]] = {}
    local: Dict[Tuple[int, ...], List[Tuple[int, CubeSummand]]] = {}
    S = _worker_simplifier()
    for alpha in itertools.product((0, 1), repeat=n):
        r = resolve(d, alpha)
        res[alpha] = r
        summ = S.summands(r.web)
        items = []
        for idx, s in enumerate(summ):
            cs = CubeSummand(alpha, idx, r.q_shift + s.shift, s)
            lst = chains.setdefault(r.height, [])
            items.append((len(lst), cs))
            lst.append(cs)
        local[alpha] = items
    for h in chains:
        chains[h].sort(key=lambda s: (s.q, s.vertex, s.index))
    pos = {}
    for h, lst in chains.items():
        for i, s in enumerate(lst):
            pos[(s.vertex, s.index)] = i
    jobs = []
    for alpha in itertools.product((0, 1), repeat=n):
        for k in range(n):
            if alpha[k]:
                continue
            beta = alpha[:k] + (1,) + alpha[k + 1 :]
            ev = edge_event(d, k, res[alpha], res[beta])
            w = res[alpha].web.copy()
            apply_event(w, ev)
            if w != res[beta].web:
                raise ComplexError(f"edge movie at crossing {k} does not reach the target resolution")
            src = [(pos[(cs.vertex, cs.index)], cs) for _, cs in local[alpha]]
            dst = [(pos[(cs.vertex, cs.index)], cs) for _, cs in local[beta]]
            sign = cube_sign(alpha, k)
            if method == "direct":
                job = (ev, sign, src, dst, check_grading)
            else:
                job = (ev, sign, src, dst, res[beta].web, check_grading)
            jobs.append((res[alpha].height, job))
    worker = _edge_entries if method == "direct" else _edge_entries_glued
    diffs: Dict[Tuple[int, int], Dict[Tuple[int, int], Fraction]] = {}
    threads = _threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, [j for _, j in jobs], chunksize=4))
    else:
        results = [worker(j) for _, j in jobs]
    for (h, _), entries in zip(jobs, results):
        for a, b, v in entries:
            if not v:
                continue
            q = chains[h][a].q
            blk = diffs.setdefault((h, q), {})
            blk[(b, a)] = blk.get((b, a), 0) + v
    # dense per-block matrices
    dense = {}
    for (h, q), entries in diffs.items():
        rows = [i for i, s in enumerate(chains.get(h + 1, [])) if s.q == q]
        cols = [i for i, s in enumerate(chains[h]) if s.q == q]
        ri = {r: i for i, r in enumerate(rows)}
        ci = {c: i for i, c in enumerate(cols)}
        M = [[Fraction(0)] * len(cols) for _ in rows]
        for (b, a), v in entries.items():
            M[ri[b]][ci[a]] = v
        dense[(h, q)] = M
    stats = {"vertices": 2**n, "summands": sum(len(v) for v in chains.values()), "edges": len(jobs)}
    return ReducedComplex(chains, dense, n, stats)


def matmul(A, B):
    if not A or not B:
        return []
    m, n = len(A), len(B[0]) if B else 0
    sparse_b = [[(j, x) for j, x in enumerate(row) if x] for row in B]
    out = [[Fraction(0)] * n for _ in range(m)]
    for i in range(m):
        row = out[i]
        for t, a in enumerate(A[i]):
            if a:
                for j, x in sparse_b[t]:
                    row[j] += a * x
    return out


def _block(C: ReducedComplex, h: int, q: int):
    M = C.diffs.get((h, q))
    if M is not None:
        return M
    rows = len(C.block(h + 1, q))
    cols = len(C.block(h, q))
    return [[Fraction(0)] * cols for _ in range(rows)]


def check_d_squared(C: ReducedComplex) -> bool:
    for (h, q) in list(C.diffs):
        A = C.diffs[(h, q)]
        B = C.diffs.get((h + 1, q))
        if B is None:
            continue
        P = matmul(B, A)
        if any(x for row in P for x in row):
            return False
    return True


def rank(M: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank by sparse Gaussian elimination over Q.

    Differential blocks are very sparse with mostly unit entries, so pivots are
    picked Markowitz-style (short row, then short column, units first) to keep
    fill-in small.
    """
    rows: Dict[int, Dict[int, Fraction]] = {}
    cols: Dict[int, set] = {}
    for i, r in enumerate(M):
        d = {j: Fraction(x) for j, x in enumerate(r) if x}
        if d:
            rows[i] = d
            for j in d:
                cols.setdefault(j, set()).add(i)
    r = 0
    while rows:
        i = min(rows, key=lambda k: len(rows[k]))
        piv = rows.pop(i)
        c = min(piv, key=lambda j: (abs(piv[j]) != 1, len(cols[j]), j))
        for j in piv:
            cols[j].discard(i)
        pv = piv[c]
        for k in list(cols[c]):
            row = rows[k]
            f = row[c] / pv
            for j, x in piv.items():
                y = row.get(j, 0) - f * x
                if y:
                    if j not in row:
                        cols[j].add(k)
                    row[j] = y
                elif j in row:
                    del row[j]
                    cols[j].discard(k)
            if not row:
                del rows[k]
        r += 1
    return r


def homology_poincare(C: ReducedComplex) -> BiPoly:
    ranks = {key: rank(M) for key, M in C.diffs.items()}
    terms = {}
    for h in C.heights():
        for q in sorted({s.q for s in C.chains[h]}):
            dim = len(C.block(h, q))
            hd = dim - ranks.get((h, q), 0) - ranks.get((h - 1, q), 0)
            if hd < 0:
                raise ComplexError("negative homology dimension (d^2 != 0?)")
            if hd:
                terms[(h, q)] = hd
    return BiPoly(terms)


def chain_euler(C: ReducedComplex) -> LaurentPoly:
    terms = {}
    for h, lst in C.chains.items():
        for s in lst:
            terms[s.q] = terms.get(s.q, 0) + (-1) ** (h % 2)
    return LaurentPoly(terms)


def poincare(d: LinkDiagram, check: bool = True, method: str = "glued") -> BiPoly:
    C = build_complex(d, method=method)
    if check and not check_d_squared(C):
        raise ComplexError("d^2 != 0")
    return homology_poincare(C)
