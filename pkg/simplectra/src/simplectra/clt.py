"""Limit objects of the moment CLT.

sigma(k, l) is the limit of n^d np(1-p) Cov(<L, x^k>, <L, x^l>). It is the sum of
a tree term, carried by two d-trees glued along one d-simplex, and a bracelet
term, carried by bracelets with regular pendant d-trees. Both counts have
closed forms; sigma_oracle recounts them by enumeration.
"""
from __future__ import division

import logging
import math
from collections import namedtuple
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import comb
from sympy import Poly, Rational, Symbol, ZZ
from sympy import catalan as sympy_catalan

from .errors import ValidationError
from .polynomial import as_rational
from .utils import state_budget
from .words import MINUS, PLUS, classify_pair, enumerate_h_sentences, enumerate_pair_sentences, \
    enumerate_words, orbit_size, tbar_h_sentence, tbar_word

logger = logging.getLogger(__name__)

X = Symbol("x")


def catalan(m):
    if m < 0:
        raise ValidationError("Catalan index must be >= 0, got {}".format(m))
    return int(sympy_catalan(m))


class SigmaParams(namedtuple("SigmaParams", ["d", "p_inf"])):
    __slots__ = ()

    def validate(self):
        if int(self.d) < 1:
            raise ValidationError("need d >= 1, got {}".format(self.d))
        if not 0 <= self.p_inf <= 1:
            raise ValidationError("p_inf must lie in [0, 1], got {}".format(self.p_inf))
        return self


def _top_count(d, m):
    """ (m/2) d^{m/2} C_{m/2}, the number of closed top-class words marked at one step """
    return (m // 2) * d ** (m // 2) * catalan(m // 2)


@lru_cache(maxsize=None)
def _catalan_power(d, r, degree):
    """ [x^degree] (sum_j d^j C_j x^j)^r, truncated before powering """
    series = Poly([d ** j * catalan(j) for j in reversed(range(degree + 1))], X, domain=ZZ)
    power = series ** r
    return int(power.coeff_monomial(X ** degree))


def bracelet_weight(d, r, m):
    """ A_r(m) = d! m sum over even compositions m_1 + .. + m_r = m - r of prod d^{m_q/2} C_{m_q/2} """
    if m < r or (m - r) % 2:
        return 0
    return math.factorial(d) * m * _catalan_power(d, r, (m - r) // 2)


def minus_count(d, k, l):
    if k % 2 or l % 2:
        return 0
    return math.factorial(d + 1) * _top_count(d, k) * _top_count(d, l)


def plus_count(d, k, l):
    total = Fraction(0)
    # only r of the parity of k and l contributes
    for r in range(3, min(k, l) + 1):
        if (k - r) % 2 or (l - r) % 2:
            continue
        total += Fraction(2, r) * bracelet_weight(d, r, k) * bracelet_weight(d, r, l)
    if total.denominator != 1:
        raise ValidationError("bracelet count for d={} k={} l={} is not an integer".format(d, k, l))
    return int(total)


def sigma_exact(k, l, params):
    """ sigma(k, l) as an exact rational, p_inf read as its shortest decimal """
    d, p = int(params.d), as_rational(params.p_inf)
    if k < 0 or l < 0:
        raise ValidationError("need k, l >= 0, got k={} l={}".format(k, l))
    if (k + l) % 2:
        return Rational(0)
    return minus_count(d, k, l) * (2 * p - 1) ** 2 + plus_count(d, k, l) * p * (1 - p)


def sigma(k, l, params):
    return float(sigma_exact(k, l, params))


def sigma_positive(k, l, p_inf):
    """ Sign condition of sigma(k, l) > 0 from the parities of k and l and p_inf alone """
    low = min(k, l)
    p = as_rational(p_inf)
    both_even = k % 2 == 0 and l % 2 == 0
    both_odd = k % 2 == 1 and l % 2 == 1
    if low == 2 and both_even:
        return p != Rational(1, 2)
    if low >= 3 and both_even:
        return True
    if low >= 3 and both_odd:
        return p not in (0, 1)
    return False


SigmaTable = namedtuple("SigmaTable", ["K", "params", "matrix", "min_eigenvalue"])


def sigma_table(K, params):
    """
    Covariance table Sigma_K = {sigma(k, l)}, 0 <= k, l <= K

    Parameters
    ----------
    K : int
        largest moment order
    params : SigmaParams

    Returns
    -------
    SigmaTable
        raises ValidationError if the table is not positive semidefinite
    """
    if K < 0:
        raise ValidationError("need K >= 0, got {}".format(K))
    params = SigmaParams(*params).validate()
    matrix = np.zeros((K + 1, K + 1), dtype=np.float64)
    for k in range(K + 1):
        for l in range(k, K + 1):
            matrix[k, l] = matrix[l, k] = sigma(k, l, params)
    smallest = float(np.linalg.eigvalsh(matrix).min())
    tolerance = 1e-9 * max(np.linalg.norm(matrix), 1.0)
    if smallest < -tolerance:
        raise ValidationError("Sigma_{} has eigenvalue {} < 0".format(K, smallest))
    return SigmaTable(K, params, matrix, smallest)


def sigma_positive_table(K, p_inf):
    return [[sigma_positive(k, l, p_inf) for l in range(K + 1)] for k in range(K + 1)]


def poly_variance(coeffs, params):
    """ a^T Sigma_K a for the polynomial sum_k a_k x^k """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.size == 0:
        return 0.0
    table = sigma_table(coeffs.size - 1, params)
    return max(float(coeffs.dot(table.matrix).dot(coeffs)), 0.0)


def perfect_matchings(items):
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for matching in perfect_matchings(rest):
            yield [(first, items[i])] + matching


def wick_moment(ks, params):
    """ Gaussian mixed moment E[prod_j Z_{k_j}] with Cov(Z_k, Z_l) = sigma(k, l) """
    ks = list(ks)
    if not ks:
        raise ValidationError("wick_moment needs at least one index")
    if len(ks) % 2:
        return 0.0
    total = 0.0
    for matching in perfect_matchings(range(len(ks))):
        term = 1.0
        for a, b in matching:
            term *= sigma(ks[a], ks[b], params)
        total += term
    return total


def oracle_counts(k, l, d, budget=None):
    """ (|W^-|, |W^+|) among the pair sentences with s = (k+l)/2 + d - 1, counted by enumeration """
    if (k + l) % 2:
        raise ValidationError("the oracle needs k + l even, got k={} l={}".format(k, l))
    if min(k, l) < 2:
        return 0, 0
    return _oracle_counts(int(k), int(l), int(d), state_budget(budget))


@lru_cache(maxsize=None)
def _oracle_counts(k, l, d, budget):
    s = (k + l) // 2 + d - 1
    minus = plus = 0
    for sentence in enumerate_pair_sentences(d, k, l, s, budget):
        tag = classify_pair(sentence, k, l)
        if tag == MINUS:
            minus += 1
        elif tag == PLUS:
            plus += 1
    logger.info("[simplectra] oracle d=%d k=%d l=%d: %d minus, %d plus", d, k, l, minus, plus)
    return minus, plus


def sigma_oracle(k, l, d, p, budget=None):
    minus, plus = oracle_counts(k, l, d, budget)
    p = as_rational(p)
    return minus * (2 * p - 1) ** 2 + plus * p * (1 - p)


def _check_finite(n, d, p):
    p = as_rational(p)
    if d < 1 or n <= d:
        raise ValidationError("need n > d >= 1, got n={} d={}".format(n, d))
    if not 0 < p < 1:
        raise ValidationError("exact moments need 0 < p < 1, got {}".format(p))
    return p


def finite_n_moment(k, n, d, p, budget=None):
    """E<L_{H_n}, x^k> at finite n, exact.

    Sums orbit_size(n, s) * Tbar(w) over the classes W_{k,s}; each class of
    words covers d! orderings of the same closed walk.
    """
    p = _check_finite(n, d, p)
    if k == 0:
        return Rational(1)
    if k == 1:
        return Rational(0)
    total = Rational(0)
    for s in range(d + 1, min(n, k // 2 + d) + 1):
        for w in enumerate_words(d, k, s, budget):
            total += orbit_size(n, s) * tbar_word(w)(p)
    scale = (n * p * (1 - p)) ** Rational(k, 2)
    return total / (math.factorial(d) * comb(n, d, exact=True) * scale)


def finite_n_central_moment(ks, n, d, p, budget=None):
    """ E[prod_j (<L, x^{k_j}> - E<L, x^{k_j}>)] at finite n, exact """
    p = _check_finite(n, d, p)
    ks = tuple(int(k) for k in ks)
    if min(ks) <= 1:
        return Rational(0)
    h = len(ks)
    if h == 1:
        return Rational(0)
    total = Rational(0)
    for s in range(d + 1, min(n, sum(ks) // 2 + d * (h // 2)) + 1):
        for a in enumerate_h_sentences(d, ks, s, budget):
            total += orbit_size(n, s) * tbar_h_sentence(a)(p)
    scale = (n * p * (1 - p)) ** Rational(sum(ks), 2)
    return total / ((math.factorial(d) * comb(n, d, exact=True)) ** h * scale)
