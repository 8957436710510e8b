from __future__ import division

import logging
from collections import OrderedDict, namedtuple
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.special import comb

from .complexes import PureComplex, colex_key
from .errors import ValidationError
from .utils import mix64, mix64_array

logger = logging.getLogger(__name__)


class LMParams(namedtuple("LMParams", ["n", "d", "p", "seed"])):
    """ Parameters of one d-Linial-Meshulam draw, seed is a 64-bit integer """

    __slots__ = ()

    def validate(self):
        """ Coerced copy: integer n, d and seed, float p """
        try:
            n, d, seed = int(self.n), int(self.d), int(self.seed)
            p = float(self.p)
        except (TypeError, ValueError, OverflowError):
            raise ValidationError("malformed LM parameters {}".format(tuple(self)))
        if d < 1 or n <= d:
            raise ValidationError("need n > d >= 1, got n={} d={}".format(n, d))
        if not 0.0 <= p <= 1.0:
            raise ValidationError("p must lie in [0, 1], got {}".format(p))
        return LMParams(n, d, p, seed)


@lru_cache(maxsize=16)
def facet_table(n, d):
    """ All d-simplices of K_n in colex order, shape (C(n, d+1), d+1); row i has colex rank i """
    facets = sorted(combinations(range(1, n + 1), d + 1), key=colex_key)
    table = np.array(facets, dtype=np.int64).reshape(len(facets), d + 1)
    table.setflags(write=False)
    return table


def colex_ranks(simplices, n):
    """ Vectorized colex rank of the rows of a sorted label array """
    simplices = np.atleast_2d(simplices)
    width = simplices.shape[1]
    binomials = np.rint(comb(np.arange(n + 1)[:, None], np.arange(width + 1)[None, :])).astype(np.int64)
    ranks = np.zeros(simplices.shape[0], dtype=np.int64)
    for i in range(width):
        ranks += binomials[simplices[:, i] - 1, i + 1]
    return ranks


@lru_cache(maxsize=16)
def adjacency_template(n, d):
    """Sparse description of A_{d-1}(K_n).

    Returns (rows, cols, signs, facet) arrays, one entry per unordered pair of
    (d-1)-simplices spanning a d-simplex: colex row/column indices, the sign
    of the pair and the colex rank of the spanned facet.
    """
    facets = facet_table(n, d)
    rows, cols, signs, owner = [], [], [], []
    facet_ids = np.arange(facets.shape[0], dtype=np.int64)
    face_ranks = [colex_ranks(np.delete(facets, i, axis=1), n) for i in range(d + 1)]
    for i, j in combinations(range(d + 1), 2):
        rows.append(face_ranks[i])
        cols.append(face_ranks[j])
        signs.append(np.full(facets.shape[0], -1 if (i + j) % 2 == 0 else 1, dtype=np.int64))
        owner.append(facet_ids)
    template = tuple(np.concatenate(part) for part in (rows, cols, signs, owner))
    for part in template:
        part.setflags(write=False)
    logger.debug("[simplectra] adjacency template n=%d d=%d with %d pairs", n, d, len(template[0]))
    return template


def facet_coins(params):
    """ Uniforms in [0, 1), one per d-simplex in colex order, a pure function of (seed, rank) """
    count = comb(params.n, params.d + 1, exact=True)
    bits = mix64_array(mix64(params.seed), np.arange(count, dtype=np.uint64))
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


class LMSample(object):
    def __init__(self, params, mask):
        self.params = params
        self.mask = np.asarray(mask, dtype=bool)

    @property
    def present(self):
        table = facet_table(self.params.n, self.params.d)
        return frozenset(tuple(int(v) for v in row) for row in table[self.mask])

    @property
    def complex(self):
        return PureComplex(self.present, d=self.params.d, n=self.params.n)

    def __len__(self):
        return int(self.mask.sum())

    def __repr__(self):
        return "LMSample(n={}, d={}, p={}, seed={}, facets={})".format(
            self.params.n, self.params.d, self.params.p, self.params.seed, len(self)
        )


def sample_lm(params):
    params = LMParams(*params).validate()
    return LMSample(params, facet_coins(params) < float(params.p))


def sample_from_complex(X, p=None, seed=None):
    """ LMSample whose present facets are those of X, X must live on [n] """
    if X.n is None:
        raise ValidationError("an LM sample needs the vertex count n")
    params = LMParams(X.n, X.d, 1.0 if p is None else p, seed or 0).validate()
    mask = np.zeros(comb(X.n, X.d + 1, exact=True), dtype=bool)
    if X.facets:
        mask[colex_ranks(np.array(sorted(X.facets), dtype=np.int64), X.n)] = True
    return LMSample(params, mask)


def adjacency_dense(n, d, mask=None):
    """ A_{d-1} of the complex on [n] with full (d-1)-skeleton and the masked facets """
    rows, cols, signs, owner = adjacency_template(n, d)
    size = comb(n, d, exact=True)
    matrix = np.zeros((size, size), dtype=np.float64)
    values = signs.astype(np.float64)
    if mask is not None:
        values = values * np.asarray(mask, dtype=bool)[owner]
    matrix[rows, cols] = values
    matrix[cols, rows] = values
    return matrix


class CenteredMatrix(object):
    """ H = scale * (A_{d-1}(Y) - p A_{d-1}(K_n)), scale = 1 / sqrt(n p (1 - p)) """

    def __init__(self, H, scale, params):
        self.H = H
        self.scale = scale
        self.params = params

    def __array__(self, dtype=None):
        return self.H if dtype is None else self.H.astype(dtype)

    @property
    def shape(self):
        return self.H.shape


def centered_scaled(sample):
    params = sample.params
    p = float(params.p)
    if p <= 0.0 or p >= 1.0:
        raise ValidationError("centering needs 0 < p < 1, got p={}".format(p))
    scale = 1.0 / np.sqrt(params.n * p * (1.0 - p))
    rows, cols, signs, owner = adjacency_template(params.n, params.d)
    size = comb(params.n, params.d, exact=True)
    values = signs * (sample.mask[owner].astype(np.float64) - p) * scale
    H = np.zeros((size, size), dtype=np.float64)
    H[rows, cols] = values
    H[cols, rows] = values
    return CenteredMatrix(H, scale, params)


def complete_spectrum_reference(n, d):
    if d < 1 or n <= d:
        raise ValidationError("need n > d >= 1, got n={} d={}".format(n, d))
    return OrderedDict(
        [(n - d, comb(n - 1, d - 1, exact=True)), (-d, comb(n - 1, d, exact=True))]
    )
