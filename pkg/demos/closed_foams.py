"""Evaluate a few closed foams given as movies, and show the seam-swap sign."""

from foamcalc.foam import REVERSED, Birth, Choke, Death, Handle, Movie, evaluate_closed, foam_degree, replay

movies = {
    "sphere": [Birth("a"), Death("a")],
    "torus": [Birth("a"), Handle("a"), Death("a")],
    "sphere, two chokes": [Birth("a"), Choke("a"), Choke("a"), Death("a")],
    "same, second seam reversed": [Birth("a"), Choke("a"), Choke("a", REVERSED), Death("a")],
}

for name, events in movies.items():
    m = Movie.closed(events)
    f = replay(m)
    chis = [x.chi for x in f.facets]
    print(f"{name:28s} facets chi={chis} seams={len(f.seams)} degree={foam_degree(f):3d} value={evaluate_closed(m)}")
