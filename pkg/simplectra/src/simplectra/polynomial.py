from fractions import Fraction
from functools import lru_cache

from sympy import QQ, Poly, Rational, Symbol

P = Symbol("p")


def as_rational(value):
    """ Exact rational from int, Fraction, sympy number or the shortest decimal of a float """
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return Rational(repr(value))
    return Rational(value)


class PolyP(object):
    """ Univariate polynomial in p with rational coefficients """

    __slots__ = ("_poly",)

    def __init__(self, expr=0):
        if isinstance(expr, PolyP):
            expr = expr._poly
        self._poly = expr if isinstance(expr, Poly) else Poly(expr, P, domain=QQ)

    @classmethod
    def constant(cls, value):
        return cls(as_rational(value))

    @classmethod
    def p(cls):
        return cls(P)

    @staticmethod
    @lru_cache(maxsize=None)
    def centered_moment(j):
        """ E[(chi_p - p)^j] = p (1-p)^j + (1-p) (-p)^j """
        return PolyP(P * (1 - P) ** j + (1 - P) * (-P) ** j)

    def _coerce(self, other):
        return other if isinstance(other, PolyP) else PolyP.constant(other)

    def __add__(self, other):
        return PolyP(self._poly + self._coerce(other)._poly)

    __radd__ = __add__

    def __sub__(self, other):
        return PolyP(self._poly - self._coerce(other)._poly)

    def __rsub__(self, other):
        return PolyP(self._coerce(other)._poly - self._poly)

    def __mul__(self, other):
        return PolyP(self._poly * self._coerce(other)._poly)

    __rmul__ = __mul__

    def __neg__(self):
        return PolyP(-self._poly)

    def __pow__(self, exponent):
        return PolyP(self._poly ** int(exponent))

    def __eq__(self, other):
        try:
            return self._poly == self._coerce(other)._poly
        except (TypeError, ValueError):
            return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash(tuple(self.coefficients()))

    def __call__(self, value):
        """ Exact value for exact input, float for float input """
        if isinstance(value, float):
            return float(self._poly.eval(as_rational(value)))
        return self._poly.eval(as_rational(value))

    def __repr__(self):
        return "PolyP({})".format(self._poly.as_expr())

    __str__ = __repr__

    @property
    def is_zero(self):
        return self._poly.is_zero

    @property
    def degree(self):
        return self._poly.degree()

    def coefficients(self):
        """ Coefficients from the constant term upwards """
        return list(reversed(self._poly.all_coeffs()))

    def as_expr(self):
        return self._poly.as_expr()


def product(polys):
    result = PolyP.constant(1)
    for poly in polys:
        result = result * poly
    return result
