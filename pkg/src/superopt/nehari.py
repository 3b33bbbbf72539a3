"""Scalar best analytic approximation and the badly approximable test."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearZeroOnCircle, Unstable, ZeroOperator
from .hankel import HankelSection, schmidt, schmidt_from_section
from .matfun import MatSymbol, default_grid
from .ring import CANCEL_TOL, RationalScalar, as_rational, winding

MODULUS_TOL = 1e-8
ANALYTIC_TOL = 1e-9


@dataclass
class AAKResult:
    """Best analytic approximant ``g`` of ``phi`` and the error ``e = phi - g``."""

    g: RationalScalar | None
    e: RationalScalar
    sigma: float
    indexOfError: int
    degenerate: bool = False

    @property
    def unimodular(self):
        """``e / sigma``; undefined for the degenerate result."""
        if self.degenerate:
            raise ZeroOperator("symbol is already analytic")
        return self.e * (1.0 / self.sigma)


def _ratio(w, v):
    e = RationalScalar(w) / RationalScalar(v)
    return e.cancel(CANCEL_TOL)


def _modulus_spread(f, sigma, N):
    return float(np.max(np.abs(np.abs(f.values(N)) - sigma)))


def _error_from_pair(pair, N):
    sigma = pair.sigma
    e = _ratio(pair.w[0], pair.v[0])
    spread = _modulus_spread(e, sigma, N)
    if spread > MODULUS_TOL * max(1.0, sigma):
        raise Unstable(f"error function is not of constant modulus (spread {spread:.3g})")
    for v2, w2 in pair.alternatives[:1]:
        e2 = _ratio(w2[0], v2[0])
        gap = float(np.max(np.abs(e2.values(N) - e.values(N))))
        if gap > MODULUS_TOL * max(1.0, sigma):
            raise Unstable(f"error depends on the maximizing vector (gap {gap:.3g})")
    return e


def best_approx_scalar(phi, *, allow_analytic=False, N=None):
    """Unique best approximation of a scalar rational ``phi`` by bounded analytic functions.

    The error is ``e = (H v) / v`` for a top Schmidt vector ``v``; it has
    constant modulus ``sigma = ||H_phi||`` and positive Toeplitz index.
    With ``allow_analytic`` an analytic ``phi`` yields a degenerate result
    ``g = phi, e = 0`` instead of raising :class:`ZeroOperator`.
    """
    phi = as_rational(phi)
    N = N or default_grid()
    try:
        pair = schmidt(MatSymbol([[phi]]))
    except ZeroOperator:
        if allow_analytic:
            return AAKResult(phi, RationalScalar.constant(0.0), 0.0, 0, True)
        raise
    e = _error_from_pair(pair, N)
    return AAKResult(phi - e, e, pair.sigma, -winding(e))


def best_error_from_coefficients(C, N=None):
    """Best-approximation error for a scalar symbol known only through its antianalytic coefficients.

    ``C[m-1]`` is the coefficient of ``z^-m`` (a 1 x 1 array or a number).
    The analytic approximant is not available, so ``g`` is left as ``None``.
    """
    N = N or default_grid()
    C = [np.atleast_2d(c) for c in C]
    pair = schmidt_from_section(HankelSection.from_coefficients(C, 1), 1)
    e = _error_from_pair(pair, N)
    return AAKResult(None, e, pair.sigma, -winding(e))


@dataclass(frozen=True)
class BadlyApproximableCertificate:
    passed: bool
    modulusSpread: float
    minModulus: float
    index: int | None

    def __bool__(self):
        return self.passed


def badly_approximable_check(phi, tol=MODULUS_TOL, N=None):
    """Constant modulus, bounded away from zero, and positive Toeplitz index."""
    phi = as_rational(phi)
    N = N or default_grid()
    vals = np.abs(phi.values(N))
    lo, hi = float(vals.min()), float(vals.max())
    spread = hi - lo
    if lo < tol:
        return BadlyApproximableCertificate(False, spread, lo, None)
    try:
        index = -winding(phi)
    except NearZeroOnCircle:
        return BadlyApproximableCertificate(False, spread, lo, None)
    ok = spread <= tol * max(1.0, hi) and index > 0
    return BadlyApproximableCertificate(bool(ok), spread, lo, index)
