"""sl(3) link homology from foams: webs, movies, simplification, the cube complex, the spider."""

from .algebra import BiPoly, LaurentPoly
from .complex import build_complex, check_d_squared, homology_poincare, poincare
from .fixtures import FIXTURE_NAMES, fixture
from .foam import Movie, MovieEvent, evaluate_closed, foam_degree, replay
from .simplify import decomposition_selftest, simplify
from .spider import evaluate_closed_web, pairing, quantum_invariant
from .web import LinkDiagram, ParseError, Web, parse_braid, parse_braid_text, parse_pd, resolve

__version__ = "0.1.0"

__all__ = [
    "BiPoly", "LaurentPoly", "Web", "LinkDiagram", "ParseError", "Movie", "MovieEvent",
    "parse_braid", "parse_braid_text", "parse_pd", "resolve", "fixture", "FIXTURE_NAMES",
    "replay", "evaluate_closed", "foam_degree", "simplify", "decomposition_selftest",
    "build_complex", "check_d_squared", "homology_poincare", "poincare",
    "evaluate_closed_web", "quantum_invariant", "pairing",
]
