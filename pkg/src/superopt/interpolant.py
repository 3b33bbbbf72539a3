"""Unitary interpolants with prescribed nonnegative Wiener-Hopf indices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketFailed,
    NormNotBelowOne,
    NormTooLarge,
    UnexpectedIndex,
    UnsupportedCompletion,
    WrongTailLength,
)
from .hankel import hankel_norm
from .matfun import MatSymbol, ResidualReport, residual_report
from .nehari import AAKResult, best_approx_scalar
from .ring import ZBAR, RationalScalar, as_rational, winding
from .thematic import FactorizationReport, decouple, superoptimal, thematic_reduce

NORM_TOL = 1e-9
SCAN_STEP = 1.0 / 8
C_TOL = 1e-14


@dataclass
class ScalarStepRecord:
    """One scalar peel: ``u0 = z^(d+1) u`` interpolates ``psi`` and has winding ``d``."""

    c: float
    d: int
    u0: RationalScalar
    aak: AAKResult
    normAtC: float = 1.0


@dataclass
class InterpolantResult:
    U: MatSymbol
    F: MatSymbol
    residuals: ResidualReport
    requestedIndices: list
    certifiedProfile: object = None
    unique: bool = False
    report: FactorizationReport | None = field(default=None, repr=False)


def _check_indices(d):
    d = [int(x) for x in d]
    if any(x < 0 for x in d):
        raise ValueError("requested indices must be nonnegative")
    if any(a > b for a, b in zip(d, d[1:])):
        raise ValueError("requested indices must be nondecreasing")
    return d


def _calibrate(norm_at, c_max=2.0 + SCAN_STEP):
    """Smallest c >= 0 on the scan with ``norm_at(c) = 1``, refined by Brent's method."""
    prev_c, prev_v = 0.0, norm_at(0.0)
    if prev_v >= 1.0:
        raise BracketFailed(f"norm {prev_v:.12g} already at or above one for c = 0")
    c = SCAN_STEP
    while c <= c_max + 1e-12:
        v = norm_at(c)
        if v == 1.0:
            return c
        if v > 1.0:
            return brentq(lambda x: norm_at(x) - 1.0, prev_c, c, xtol=C_TOL, rtol=4 * np.finfo(float).eps)
        prev_c, prev_v = c, v
        c += SCAN_STEP
    raise BracketFailed(f"no c <= {c_max} reaches norm one")


def scalar_interpolant(psi, d):
    """Unimodular ``u0`` with the negative Fourier coefficients of ``psi`` and winding number ``d``.

    ``psi`` must have Hankel norm below one.  It is first replaced by its
    best-approximation error, then ``c`` is chosen so that
    ``conj(z)^(d+1) psi + c conj(z)`` has Hankel norm exactly one, and the
    unimodular best-approximation error of that symbol is shifted back.
    """
    psi = as_rational(psi)
    d = int(d)
    if d < 0:
        raise ValueError("requested index must be nonnegative")
    nrm = hankel_norm(psi)
    if nrm >= 1 - NORM_TOL:
        raise NormNotBelowOne(f"Hankel norm {nrm:.12g} is not below one")
    base = best_approx_scalar(psi, allow_analytic=True).e.shifted(-(d + 1))
    c = _calibrate(lambda x: hankel_norm(base + ZBAR * x))
    aak = best_approx_scalar(base + ZBAR * c)
    u0 = aak.unimodular.shifted(d + 1)
    w = winding(u0)
    if w != d:
        raise UnexpectedIndex(f"peeled factor has Toeplitz index {aak.indexOfError}, expected 1")
    return ScalarStepRecord(c, d, u0, aak, aak.sigma)


def _scalar_unit(phi):
    aak = best_approx_scalar(phi)
    return aak.unimodular


def _block_interpolant(B, dlist):
    """Unitary interpolant of a block of size at most two with Hankel norm below one."""
    n = B.n
    if n == 1:
        return MatSymbol([[scalar_interpolant(B[0, 0], dlist[0]).u0]])
    if n != 2:
        raise UnsupportedCompletion(f"coupled block of size {n} is outside the supported class")
    rep = superoptimal(B)
    Psi = B - rep.F
    d0, d1 = dlist
    shifted = Psi.shifted(-(d0 + 1))
    eye = MatSymbol.identity(2)
    c = _calibrate(lambda x: hankel_norm(shifted + eye * (ZBAR * x)))
    step = thematic_reduce(shifted + eye * (ZBAR * c))
    if step.k != 1:
        raise UnexpectedIndex(f"peeled factor has Toeplitz index {step.k}, expected 1")
    u0 = step.u.shifted(d0 + 1)
    ups = step.residual[0, 0].shifted(d0 + 1)
    nrm = hankel_norm(ups)
    if nrm >= 1 - NORM_TOL:
        raise NormNotBelowOne(f"residual Hankel norm {nrm:.12g} is not below one")
    inner = scalar_interpolant(ups, d1).u0
    return step.remainder(MatSymbol.diag([u0, inner]))


def _assemble(n, pieces):
    rows = [[0.0] * n for _ in range(n)]
    for g, U in pieces:
        for a, i in enumerate(g):
            for b, j in enumerate(g):
                rows[i][j] = U[a, b]
    return MatSymbol(rows)


def _finish(U, Phi, requested, report=None, unique=False, N=None):
    res = residual_report(U, Phi, N)
    return InterpolantResult(U, U - Phi, res, list(requested), None, unique, report)


def matrix_interpolant(Psi, dList, N=None):
    """Unitary interpolant of ``Psi`` (Hankel norm below one) with Wiener-Hopf indices ``dList``."""
    Psi = Psi if isinstance(Psi, MatSymbol) else MatSymbol([[Psi]])
    dList = _check_indices(dList)
    if len(dList) != Psi.n:
        raise WrongTailLength(f"expected {Psi.n} indices, got {len(dList)}")
    nrm = hankel_norm(Psi)
    if nrm >= 1 - NORM_TOL:
        raise NormNotBelowOne(f"Hankel norm {nrm:.12g} is not below one")
    pieces = []
    pos = 0
    for g in decouple(Psi):
        pieces.append((g, _block_interpolant(Psi.submatrix(list(g)), dList[pos:pos + len(g)])))
        pos += len(g)
    return _finish(_assemble(Psi.n, pieces), Psi, dList, N=N)


def unitary_interpolant(Phi, dTail, N=None, norm_tol=NORM_TOL):
    """Unitary interpolant of ``Phi`` whose nonnegative Wiener-Hopf indices are ``dTail``.

    The negative indices are forced: they are minus the thematic indices
    attached to the superoptimal values equal to one.  When every
    superoptimal value equals one the interpolant is unique and ``dTail``
    must be empty.
    """
    Phi = Phi if isinstance(Phi, MatSymbol) else MatSymbol([[Phi]])
    dTail = _check_indices(dTail)
    rep = superoptimal(Phi)
    t0 = rep.t[0] if rep.t else 0.0
    if t0 > 1 + norm_tol:
        raise NormTooLarge(t0)
    r = rep.unit_count(norm_tol)
    if len(dTail) != Phi.n - r:
        raise WrongTailLength(f"{r} of {Phi.n} superoptimal values equal one, so {Phi.n - r} "
                              f"indices are needed, got {len(dTail)}")
    pieces = []
    pos = 0
    for blk in rep.blocks:
        unit = [i for i, x in enumerate(blk.t) if abs(x - 1.0) <= norm_tol]
        free = len(blk.t) - len(unit)
        dl = dTail[pos:pos + free]
        pos += free
        pieces.append((blk.indices, _unit_block(blk, len(unit), dl)))
    return _finish(_assemble(Phi.n, pieces), Phi, dTail, rep, unique=(r == Phi.n), N=N)


def _unit_block(blk, r, dl):
    B = blk.symbol
    if r == 0:
        return _block_interpolant(B, dl)
    step = blk.steps[0]
    if B.n == 1:
        return MatSymbol([[step.u]])
    if r == 2:
        return step.remainder(MatSymbol.diag([step.u, step.residual[0, 0] * (1.0 / blk.t[1])]))
    lower = step.residual[0, 0]
    return step.remainder(MatSymbol.diag([step.u, scalar_interpolant(lower, dl[0]).u0]))
