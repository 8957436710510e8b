from __future__ import division

import logging
import math

import numpy as np
from scipy import linalg
from scipy.integrate import quad
from scipy.optimize import brentq
from sympy import catalan as sympy_catalan

from .errors import ValidationError

logger = logging.getLogger(__name__)

MAX_TRACE_POWER = 12


class Spectrum(object):
    """ Eigenvalues of a real symmetric matrix, descending """

    def __init__(self, eigs):
        eigs = np.asarray(eigs, dtype=np.float64).ravel()
        self.eigs = np.sort(eigs)[::-1]

    def __len__(self):
        return len(self.eigs)

    def __iter__(self):
        return iter(self.eigs)

    def __repr__(self):
        return "Spectrum(size={})".format(len(self))

    def esd(self):
        return ESD(self.eigs)


class ESD(object):
    """ Uniform probability measure on a list of eigenvalues """

    def __init__(self, eigs):
        if isinstance(eigs, Spectrum):
            eigs = eigs.eigs
        self.eigs = np.sort(np.asarray(eigs, dtype=np.float64).ravel())
        if self.eigs.size == 0:
            raise ValidationError("an ESD needs at least one eigenvalue")

    def __len__(self):
        return len(self.eigs)

    def cdf(self, x):
        return np.searchsorted(self.eigs, x, side="right") / len(self.eigs)


def eigenvalues_sym(M):
    """
    Full spectrum of a dense real symmetric matrix

    Parameters
    ----------
    M : array_like
        square matrix, symmetric up to 1e-12 of its norm

    Returns
    -------
    Spectrum
        eigenvalues in descending order
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("expected a square matrix, got shape {}".format(M.shape))
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    if M.size == 0:
        return Spectrum([])
    norm = np.linalg.norm(M)
    if np.max(np.abs(M - M.T)) > 1e-12 * max(norm, 1.0):
        raise ValidationError("matrix is not symmetric")
    eigs = linalg.eigh(M, eigvals_only=True, check_finite=False)
    logger.debug("[simplectra] eigensolve of size %d", M.shape[0])
    return Spectrum(eigs)


def _eigs(esd):
    if isinstance(esd, (ESD, Spectrum)):
        return esd.eigs
    return np.asarray(esd, dtype=np.float64).ravel()


def moment(esd, k):
    if k < 0:
        raise ValidationError("moment order must be >= 0, got {}".format(k))
    eigs = _eigs(esd)
    if k == 0:
        return 1.0
    return float(np.mean(eigs ** k))


def moment_trace(H, k):
    """ (1/rows) Tr(H^k) by repeated multiplication, independent of the eigensolver """
    if k > MAX_TRACE_POWER:
        raise ValidationError("moment_trace supports k <= {}, got {}".format(MAX_TRACE_POWER, k))
    if k < 0:
        raise ValidationError("moment order must be >= 0, got {}".format(k))
    H = np.asarray(H, dtype=np.float64)
    if k == 0:
        return 1.0
    power = H
    for _ in range(k - 1):
        power = power.dot(H)
    return float(np.trace(power) / H.shape[0])


def linear_statistic(esd, f):
    """ Mean of f over the eigenvalues, f takes and returns arrays """
    eigs = _eigs(esd)
    values = np.asarray(f(eigs), dtype=np.float64)
    if values.shape != eigs.shape:
        values = np.broadcast_to(values, eigs.shape)
    if not np.all(np.isfinite(values)):
        raise ValidationError("test function is not finite on the spectrum")
    return float(np.mean(values))


def semicircle_moment(d, k):
    if d < 1 or k < 0:
        raise ValidationError("need d >= 1 and k >= 0, got d={} k={}".format(d, k))
    if k % 2:
        return 0
    return int(d ** (k // 2) * sympy_catalan(k // 2))


def semicircle_density(d, x):
    x = np.asarray(x, dtype=np.float64)
    inside = np.clip(4.0 * d - x ** 2, 0.0, None)
    return np.sqrt(inside) / (2.0 * np.pi * d)


def semicircle_cdf(d, x):
    """ 1/2 + (t sqrt(1 - t^2) + arcsin t) / pi with t = x / (2 sqrt d), clamped outside the support """
    t = np.clip(np.asarray(x, dtype=np.float64) / (2.0 * math.sqrt(d)), -1.0, 1.0)
    value = 0.5 + (t * np.sqrt(1.0 - t ** 2) + np.arcsin(t)) / np.pi
    value = np.clip(value, 0.0, 1.0)
    return float(value) if value.ndim == 0 else value


class SemicircleRef(object):
    """ The semicircle law nu_d on [-2 sqrt d, 2 sqrt d] """

    def __init__(self, d):
        if d < 1:
            raise ValidationError("need d >= 1, got {}".format(d))
        self.d = d
        self.radius = 2.0 * math.sqrt(d)

    @property
    def support(self):
        return (-self.radius, self.radius)

    def pdf(self, x):
        return semicircle_density(self.d, x)

    def cdf(self, x):
        return semicircle_cdf(self.d, x)

    def moment(self, k):
        return semicircle_moment(self.d, k)

    def moment_quad(self, k):
        value, _ = quad(lambda x: x ** k * semicircle_density(self.d, x), -self.radius, self.radius,
                        epsabs=1e-12, epsrel=1e-12)
        return value

    def ppf(self, q):
        if not 0.0 <= q <= 1.0:
            raise ValidationError("quantile level must lie in [0, 1], got {}".format(q))
        if q in (0.0, 1.0):
            return self.support[int(q)]
        return brentq(lambda x: self.cdf(x) - q, -self.radius, self.radius, xtol=1e-14)

    def quantiles(self, m):
        """ Midpoint quantiles (i - 1/2)/m, i = 1..m """
        return np.array([self.ppf((i - 0.5) / m) for i in range(1, m + 1)])


def kolmogorov_distance(esd, d):
    """ sup |F_esd - F_nu_d|, taking both one-sided limits at every jump of the ESD """
    eigs = np.sort(_eigs(esd))
    if eigs.size == 0:
        raise ValidationError("empty spectrum")
    points, counts = np.unique(eigs, return_counts=True)
    after = np.cumsum(counts) / eigs.size
    before = after - counts / eigs.size
    reference = np.atleast_1d(semicircle_cdf(d, points))
    return float(max(np.max(np.abs(after - reference)), np.max(np.abs(before - reference))))
