"""Named link fixtures and Reidemeister-move variants of diagrams."""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .web import Crossing, LinkDiagram, ParseError, parse_braid

# name -> (strands, braid word)
BRAIDS: Dict[str, Tuple[int, Tuple[int, ...]]] = {
    "unknot": (1, ()),
    "unlink2": (2, ()),
    "hopf": (2, (1, 1)),
    "trefoil": (2, (1, 1, 1)),
    "figure8": (3, (1, -2, 1, -2)),
    "t2_5": (2, (1,) * 5),
    "t2_7": (2, (1,) * 7),
}

FIXTURE_NAMES = tuple(BRAIDS)


def fixture(name: str) -> LinkDiagram:
    try:
        strands, word = BRAIDS[name]
    except KeyError:
        raise ParseError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}") from None
    d = parse_braid(strands, word)
    d.label = name
    return d


def braid_text(name: str) -> str:
    strands, word = BRAIDS[name]
    return f"{strands};{','.join(map(str, word))}"


def r2_padded(strands: int, word: Sequence[int], at: int = 0, letter: int = 1) -> LinkDiagram:
    """Insert letter, -letter into the word (a Reidemeister II move).

    A one-strand braid is stabilised first, so the result still closes up to
    the same link.
    """
    word = list(word)
    if strands == 1:
        strands, word = 2, word + [1]
    letter = max(1, min(abs(letter), strands - 1))
    at = max(0, min(at, len(word)))
    word[at:at] = [letter, -letter]
    return parse_braid(strands, word)


def _arcs(d: LinkDiagram) -> List:
    seen = []
    for c in d.crossings:
        for a, _ in c.ends:
            if a not in seen:
                seen.append(a)
    return seen


def r1_kinked(d: LinkDiagram, arc=None, sign: int = 1, side: int = 0) -> LinkDiagram:
    """Add a curl on one arc (a Reidemeister I move), of either crossing sign.

    ``side`` picks which pair of adjacent crossing ends the small loop joins.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    # new arc labels sort before the old ones, so the curl is reduced first
    lo = min([a for a in _arcs(d) if isinstance(a, int)] + [1])
    loop, a2 = lo - 1, lo - 2
    if not d.crossings:
        if not d.free_loops:
            raise ParseError("cannot kink the empty diagram")
        ends = _kink_ends(a2, a2, loop, side)
        out = LinkDiagram([Crossing(sign, ends)], d.free_loops - 1, d.source, "kinked " + d.label)
        out.validate()
        return out
    arcs = _arcs(d)
    if arc is None:
        arc = arcs[0]
    if arc not in arcs:
        raise ParseError(f"no arc {arc!r} in diagram")
    cs = []
    for c in d.crossings:
        cs.append(Crossing(c.sign, tuple(((a2 if (x == arc and di == "in") else x), di) for x, di in c.ends)))
    cs.append(Crossing(sign, _kink_ends(arc, a2, loop, side)))
    out = LinkDiagram(cs, d.free_loops, d.source, "kinked " + d.label)
    out.validate()
    return out


def _kink_ends(a_in, a_out, loop, side):
    # anticlockwise; opposite ends belong to one strand and the loop joins neighbours
    if side == 0:
        return ((a_in, "in"), (loop, "in"), (loop, "out"), (a_out, "out"))
    return ((loop, "in"), (a_in, "in"), (a_out, "out"), (loop, "out"))


def random_braid(rng: random.Random, max_crossings: int = 6, max_strands: int = 4):
    """A random braid on 2..max_strands strands with 1..max_crossings letters."""
    strands = rng.randint(2, max(2, max_strands))
    n = rng.randint(1, max_crossings)
    word = [rng.choice([1, -1]) * rng.randint(1, strands - 1) for _ in range(n)]
    return strands, word
