from __future__ import division

import logging
from collections import namedtuple
from itertools import combinations

import networkx as nx
import numpy as np
from networkx.utils import UnionFind
from scipy.special import comb

from .errors import ValidationError

logger = logging.getLogger(__name__)


def simplex(vertices):
    """ Sorted vertex tuple; the empty tuple is the (-1)-simplex """
    vertices = tuple(sorted(int(v) for v in vertices))
    if len(set(vertices)) != len(vertices):
        raise ValidationError("repeated vertex in simplex {}".format(vertices))
    if vertices and vertices[0] < 1:
        raise ValidationError("vertex labels are positive integers, got {}".format(vertices))
    return vertices


def colex_key(sigma):
    return tuple(reversed(sigma))


def colex_sorted(simplices):
    return sorted(simplices, key=colex_key)


def colex_rank(sigma):
    """ Position of a sorted tuple of labels in the colex order of all tuples of its size """
    return int(sum(comb(v - 1, i + 1, exact=True) for i, v in enumerate(sigma)))


def boundary(tau):
    """ Codimension-one faces of tau, the i-th one missing the i-th smallest vertex """
    return [tau[:i] + tau[i + 1:] for i in range(len(tau))]


def sign_face(tau, sigma):
    tau, sigma = tuple(tau), tuple(sigma)
    if len(tau) != len(sigma) + 1 or not set(sigma) < set(tau):
        raise ValidationError("{} is not a codimension-one face of {}".format(sigma, tau))
    missing = (set(tau) - set(sigma)).pop()
    return -1 if tau.index(missing) % 2 else 1


def sign_adjacent(sigma, sigma2):
    sigma, sigma2 = tuple(sigma), tuple(sigma2)
    union = tuple(sorted(set(sigma) | set(sigma2)))
    if len(sigma) != len(sigma2) or len(union) != len(sigma) + 1:
        raise ValidationError("{} and {} do not span a simplex of one dimension more".format(sigma, sigma2))
    return -sign_face(union, sigma) * sign_face(union, sigma2)


class PureComplex(object):
    def __init__(self, facets, d=None, n=None):
        """
        Pure d-dimensional complex given by its facets

        Parameters
        ----------
        facets : iterable
            vertex collections of the d-simplices
        d : int
            dimension, inferred from the first facet when omitted
        n : int
            when given, the complex also carries the full (d-1)-skeleton on [n]
            (the Linial-Meshulam convention)
        """
        facets = frozenset(simplex(tau) for tau in facets)
        if d is None:
            if not facets:
                raise ValidationError("dimension is needed for a complex without facets")
            d = len(next(iter(facets))) - 1
        for tau in facets:
            if len(tau) != d + 1:
                raise ValidationError("facet {} is not a {}-simplex".format(tau, d))
        if n is not None:
            n = int(n)
            if n <= d:
                raise ValidationError("need n > d, got n={} d={}".format(n, d))
            if facets and max(tau[-1] for tau in facets) > n:
                raise ValidationError("facet label exceeds n={}".format(n))
        self.d = int(d)
        self.n = n
        self.facets = facets

    @classmethod
    def complete(cls, n, d):
        return cls(combinations(range(1, n + 1), d + 1), d=d, n=n)

    def __len__(self):
        return len(self.facets)

    def __iter__(self):
        return iter(sorted(self.facets))

    def __eq__(self, other):
        return (
            isinstance(other, PureComplex)
            and self.d == other.d
            and self.facets == other.facets
            and self.vertices == other.vertices
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.d, self.facets))

    def __repr__(self):
        return "PureComplex(d={}, f0={}, fd={})".format(self.d, self.f0, self.fd)

    @property
    def vertices(self):
        verts = set(v for tau in self.facets for v in tau)
        if self.n is not None:
            verts.update(range(1, self.n + 1))
        return frozenset(verts)

    @property
    def f0(self):
        return len(self.vertices)

    @property
    def fd(self):
        return len(self.facets)

    def faces(self, k):
        """ All k-simplices of the complex """
        if k > self.d or k < -1:
            return set()
        if k == self.d:
            return set(self.facets)
        if self.n is not None and k <= self.d - 1:
            return set(combinations(range(1, self.n + 1), k + 1))
        return set(sigma for tau in self.facets for sigma in combinations(tau, k + 1))

    def f(self, k):
        return len(self.faces(k))


class SignedMatrix(object):
    """ Integer matrix over k-simplices listed in colex order """

    def __init__(self, index, matrix):
        self.index = list(index)
        self.matrix = np.asarray(matrix)

    @property
    def shape(self):
        return self.matrix.shape

    def __array__(self, dtype=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def position(self):
        return dict((sigma, i) for i, sigma in enumerate(self.index))


def _check_dimension(X, k):
    if k < 0 or k >= X.d:
        raise ValidationError("need 0 <= k < dim X = {}, got k={}".format(X.d, k))


def adjacency_matrix(X, k):
    _check_dimension(X, k)
    index = colex_sorted(X.faces(k))
    pos = dict((sigma, i) for i, sigma in enumerate(index))
    matrix = np.zeros((len(index), len(index)), dtype=np.int64)
    for tau in X.faces(k + 1):
        faces = boundary(tau)
        for i, j in combinations(range(len(faces)), 2):
            # -sgn(tau, faces[i]) * sgn(tau, faces[j])
            entry = -1 if (i + j) % 2 == 0 else 1
            a, b = pos[faces[i]], pos[faces[j]]
            matrix[a, b] = matrix[b, a] = entry
    return SignedMatrix(index, matrix)


def degree_matrix(X, k):
    _check_dimension(X, k)
    index = colex_sorted(X.faces(k))
    pos = dict((sigma, i) for i, sigma in enumerate(index))
    degrees = np.zeros(len(index), dtype=np.int64)
    for tau in X.faces(k + 1):
        for sigma in boundary(tau):
            degrees[pos[sigma]] += 1
    return SignedMatrix(index, np.diag(degrees))


def up_laplacian(X, k):
    adjacency = adjacency_matrix(X, k)
    degree = degree_matrix(X, k)
    return SignedMatrix(adjacency.index, degree.matrix - adjacency.matrix)


def strong_components(X):
    """Maximal strongly connected subcomplexes.

    Facets are merged through shared (d-1)-faces, so the returned facet sets
    partition the facets of X. Ordered by smallest facet.
    """
    forest = UnionFind()
    for tau in X.facets:
        forest.union(*boundary(tau))
    groups = {}
    for tau in X.facets:
        groups.setdefault(forest[boundary(tau)[0]], set()).add(tau)
    components = [PureComplex(group, d=X.d) for group in groups.values()]
    return sorted(components, key=lambda c: min(c.facets))


def is_strongly_connected(X):
    return len(X.facets) > 0 and len(strong_components(X)) == 1


def is_d_tree(X):
    if not is_strongly_connected(X):
        return False
    return X.f0 == X.fd + X.d


def d_forest_extract(X):
    """Spanning d-forest of a strongly connected complex.

    Runs the generating process from the smallest facet: a facet is reached
    through a (d-1)-face already present and is kept only when the vertex it
    adds is new. The result spans every vertex and has f_0 = f_d + d.
    """
    if not is_strongly_connected(X):
        raise ValidationError("d_forest_extract needs a strongly connected complex")
    first = min(X.facets)
    start = boundary(first)[-1]
    seen_vertices = set(start)
    reached_faces = set([start])
    pending = set(X.facets)
    kept = []
    while pending:
        tau = min(t for t in pending if any(f in reached_faces for f in boundary(t)))
        pending.remove(tau)
        attach = min(f for f in boundary(tau) if f in reached_faces)
        new_vertex = (set(tau) - set(attach)).pop()
        if new_vertex not in seen_vertices:
            kept.append(tau)
            seen_vertices.add(new_vertex)
        else:
            logger.debug("[simplectra] forest extraction drops %s", tau)
        reached_faces.update(boundary(tau))
    return PureComplex(kept, d=X.d)


BraceletReport = namedtuple("BraceletReport", ["rho", "rim", "pendants", "attachments", "regular"])
BraceletReport.__doc__ = """Bracelet with pendant d-trees.

rho -- the common (d-2)-simplex, () when d = 1
rim -- u_1..u_r, rim facets are rho + {u_i, u_i+1} cyclically
pendants -- nontrivial pendant d-trees as PureComplex
attachments -- the (d-1)-face where each pendant meets the rim
regular -- every pendant hangs from some rho + {u_q}
"""


def _canonical_cycle(cycle):
    cycle = list(cycle)
    start = cycle.index(min(cycle))
    cycle = cycle[start:] + cycle[:start]
    if cycle[-1] < cycle[1]:
        cycle = [cycle[0]] + cycle[:0:-1]
    return tuple(cycle)


def _rim_facets(rho, rim):
    r = len(rim)
    return set(simplex(rho + (rim[i], rim[(i + 1) % r])) for i in range(r))


def _pendant_decomposition(X, rho, rim):
    rim_facets = _rim_facets(rho, rim)
    rim_vertices = set(rho) | set(rim)
    rim_faces = set(f for tau in rim_facets for f in boundary(tau))
    rest = X.facets - rim_facets
    pendants, attachments = [], []
    if rest:
        for component in strong_components(PureComplex(rest, d=X.d)):
            if not is_d_tree(component):
                return None
            meet = tuple(sorted(component.vertices & rim_vertices))
            if meet not in rim_faces or meet not in component.faces(X.d - 1):
                return None
            pendants.append(component)
            attachments.append(meet)
    for a, b in combinations(range(len(pendants)), 2):
        shared = pendants[a].vertices & pendants[b].vertices
        if not shared <= set(attachments[a]) & set(attachments[b]):
            return None
    regular = all(set(rho) <= set(face) for face in attachments)
    return BraceletReport(rho, rim, pendants, attachments, regular)


def classify_bracelet(X):
    """Recognize a bracelet with pendant d-trees.

    Exhaustive over (d-2)-simplices rho and the simple cycles of the link graph
    of rho. A regular decomposition wins over a non-regular one. Returns None
    when X is no bracelet with pendant d-trees.
    """
    if not is_strongly_connected(X):
        return None
    fallback = None
    for rho in sorted(X.faces(X.d - 2)):
        link = nx.Graph()
        for tau in X.facets:
            if set(rho) <= set(tau):
                link.add_edge(*sorted(set(tau) - set(rho)))
        for cycle in sorted(_canonical_cycle(c) for c in nx.simple_cycles(link) if len(c) >= 3):
            report = _pendant_decomposition(X, rho, cycle)
            if report is None:
                continue
            if report.regular:
                return report
            if fallback is None:
                fallback = report
    return fallback
