"""Exact arithmetic: rationals, Laurent polynomials in q, and bigraded (t, q) polynomials.

Everything in the engine is exact.  Rationals are :class:`fractions.Fraction`
(arbitrary precision numerator and denominator, always reduced).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]


def _fmt_coeff(c: Fraction, has_monomial: bool) -> str:
    if has_monomial and c == 1:
        return ""
    if c.denominator == 1:
        s = str(c.numerator)
    else:
        s = f"{c.numerator}/{c.denominator}"
    return s + "*" if has_monomial else s


def _fmt_monomial(parts) -> str:
    out = []
    for name, e in parts:
        if e == 0:
            continue
        out.append(name if e == 1 else f"{name}^{e}")
    return "*".join(out)


def _join_terms(rendered) -> str:
    if not rendered:
        return "0"
    pieces = []
    for i, (c, mono) in enumerate(rendered):
        body = _fmt_coeff(abs(c), bool(mono)) + mono
        if i == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


class LaurentPoly:
    """Laurent polynomial in q with rational coefficients.

    Stored as a dict ``exponent -> coefficient`` without zero entries.  Instances
    are treated as immutable values (hashable, comparable).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[int(e)] = clean.get(int(e), Fraction(0)) + c
                    if not clean[int(e)]:
                        del clean[int(e)]
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, c: Scalar) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, e: int, c: Scalar = 1) -> "LaurentPoly":
        return cls({e: c})

    @classmethod
    def quantum_int(cls, n: int) -> "LaurentPoly":
        """[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}."""
        return cls({n - 1 - 2 * k: 1 for k in range(n)})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, e: int) -> Fraction:
        return self._terms.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> Tuple[int, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return min(self._terms), max(self._terms)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def divmod_exact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient self / other; raises ValueError if other does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        rem = dict(self._terms)
        lo_o, hi_o = other.degrees()
        lead = other._terms[hi_o]
        quot: Dict[int, Fraction] = {}
        while rem:
            hi = max(rem)
            if hi - hi_o < min(rem) - lo_o:
                raise ValueError("polynomial division is not exact")
            k = hi - hi_o
            c = rem[hi] / lead
            quot[k] = c
            for e, oc in other._terms.items():
                v = rem.get(e + k, 0) - c * oc
                if v:
                    rem[e + k] = v
                else:
                    rem.pop(e + k, None)
        return LaurentPoly(quot)

    def evaluate(self, q: Scalar) -> Fraction:
        q = Fraction(q)
        return sum((c * q**e for e, c in self._terms.items()), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return _join_terms([(c, _fmt_monomial([("q", e)])) for e, c in self.items()])

    def __repr__(self):
        return f"LaurentPoly({self})"

    def to_json(self):
        return [{"q": e, "coeff": _fraction_str(c)} for e, c in self.items()]


class BiPoly:
    """Polynomial in t^{+-1}, q^{+-1}: dict ``(t_exp, q_exp) -> coefficient``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Tuple[int, int], Scalar] | None = None):
        clean: Dict[Tuple[int, int], Fraction] = {}
        if terms:
            for (i, j), c in terms.items():
                key = (int(i), int(j))
                v = clean.get(key, Fraction(0)) + Fraction(c)
                if v:
                    clean[key] = v
                else:
                    clean.pop(key, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def from_laurent(cls, p: LaurentPoly, t_exp: int = 0) -> "BiPoly":
        return cls({(t_exp, e): c for e, c in p.items()})

    @classmethod
    def monomial(cls, t_exp: int, q_exp: int, c: Scalar = 1) -> "BiPoly":
        return cls({(t_exp, q_exp): c})

    @property
    def terms(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, t_exp: int, q_exp: int) -> Fraction:
        return self._terms.get((t_exp, q_exp), Fraction(0))

    def is_zero(self):
        return not self._terms

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, LaurentPoly):
            return BiPoly.from_laurent(other)
        if isinstance(other, (int, Fraction)):
            return BiPoly({(0, 0): other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def eval_t(self, t0: Scalar = -1) -> LaurentPoly:
        """Substitute t = t0 (t0 rational, typically -1)."""
        t0 = Fraction(t0)
        out: Dict[int, Fraction] = {}
        for (i, j), c in self._terms.items():
            out[j] = out.get(j, 0) + c * t0**i
        return LaurentPoly(out)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return _join_terms(
            [(c, _fmt_monomial([("q", j), ("t", i)])) for (i, j), c in self.items()]
        )

    def __repr__(self):
        return f"BiPoly({self})"

    def to_json(self):
        out = []
        for (i, j), c in self.items():
            out.append({"t": i, "q": j, "dim": int(c) if c.denominator == 1 else _fraction_str(c)})
        return out


def _fraction_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def bipoly_eval_t(p: BiPoly, t0: Scalar = -1) -> LaurentPoly:
    return p.eval_t(t0)


def laurent_sum(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    total = LaurentPoly()
    for p in polys:
        total = total + p
    return total


Q = LaurentPoly.monomial(1)
ONE = LaurentPoly.const(1)
# graded dimension of the circle, [3]
CIRCLE = LaurentPoly({-2: 1, 0: 1, 2: 1})
# [2]
BIGON = LaurentPoly({-1: 1, 1: 1})
