"""Thematic factorizations: vector inner-outer splits, completions and the superoptimal recursion."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import BoundaryRoot, ReductionFailed, UnsupportedCompletion, ZeroOperator
from .hankel import antianalytic_coefficients, coefficients_from_values, hankel_norm, schmidt
from .matfun import MatSymbol, _next_pow2, default_grid
from .nehari import best_approx_scalar, best_error_from_coefficients
from .ring import (
    BOUNDARY_TOL,
    LaurentScalar,
    RationalScalar,
    as_rational,
    inner_outer,
    roots,
    spectral_factor,
    winding,
)

TIE_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-7
FACTOR_TOL = 1e-8
ROOT_MATCH_TOL = 1e-6


# -- vector inner-outer ----------------------------------------------------------

@dataclass
class InnerOuterColumn:
    """``v = b * o * vhat`` with ``b`` inner, ``o`` outer and ``vhat`` inner co-outer.

    ``vhat = numerators / h`` where the numerators are coprime polynomials and
    ``h`` is an outer polynomial.
    """

    b: RationalScalar
    o: RationalScalar
    vhat: tuple
    numerators: tuple
    h: LaurentScalar
    residual: float = 0.0

    def __iter__(self):
        return iter((self.b, self.o, self.vhat))


def _distinct_denominators(items):
    dens = []
    for e in items:
        if e.is_zero or e.has_trivial_den:
            continue
        if not any(_same_poly(e.den, d) for d in dens):
            dens.append(e.den)
    return dens


def _same_poly(a, b):
    a, b = a.array, b.array
    return len(a) == len(b) and np.allclose(a, b, rtol=1e-13, atol=1e-15)


def _clear_denominators(v):
    """Polynomial numerators ``p_i`` (Laurent) and common denominator ``q`` with ``v_i = p_i / q``."""
    dens = _distinct_denominators(v)
    q = LaurentScalar([1.0])
    for d in dens:
        q = q * d
    out = []
    for e in v:
        if e.is_zero:
            out.append(LaurentScalar())
            continue
        p = e.numerator_laurent()
        for d in dens:
            if e.has_trivial_den or not _same_poly(e.den, d):
                p = p * d
        out.append(p)
    return out, q


def _common_roots(polys):
    """Roots shared by every nonzero polynomial, confirmed by exact deflation."""
    nz = [p for p in polys if len(p) > 0]
    cand = list(roots(LaurentScalar(nz[0]))) if len(nz[0]) > 1 else []
    for p in nz[1:]:
        pr = list(roots(LaurentScalar(p))) if len(p) > 1 else []
        kept = []
        for r in cand:
            if not pr:
                break
            dist = [abs(r - x) for x in pr]
            i = int(np.argmin(dist))
            if dist[i] <= ROOT_MATCH_TOL * max(1.0, abs(r)):
                kept.append(r)
                pr.pop(i)
        cand = kept
    confirmed = []
    cur = [np.asarray(p, dtype=complex) for p in nz]
    for r in cand:
        trial = []
        ok = True
        for p in cur:
            if len(p) < 2:
                ok = False
                break
            quo, rem = npoly.polydiv(p, np.array([-r, 1.0]))
            if np.max(np.abs(rem)) > 1e-9 * np.max(np.abs(p)):
                ok = False
                break
            trial.append(np.atleast_1d(quo))
        if ok:
            confirmed.append(r)
            cur = trial
    return confirmed, cur


def vector_inner_outer(v):
    """Factor an analytic column ``v = b * o * vhat``.

    ``b`` is the common inner factor, ``o`` the outer spectral factor of
    ``sum |v_i|^2`` (normalised so ``o(0) > 0``) and ``vhat`` is pointwise of
    unit norm with coprime polynomial numerators.  The phase of ``vhat`` is
    fixed by making its first dominant value at the origin real positive.
    """
    v = [as_rational(x) for x in v]
    if all(x.is_zero for x in v):
        raise ZeroOperator("zero column has no inner-outer factorization")
    p, q = _clear_denominators(v)
    m = min(x.degLo for x in p if not x.is_zero)
    polys = [np.zeros(0, complex) if x.is_zero else
             np.concatenate([np.zeros(x.degLo - m, complex), x.array]) for x in p]
    common, reduced = _common_roots(polys)
    for r in common:
        if abs(abs(r) - 1) <= BOUNDARY_TOL:
            raise BoundaryRoot(f"entries share a root on the unit circle at {r:.6g}")
    it = iter(reduced)
    pr = [LaurentScalar() if len(x) == 0 else LaurentScalar(next(it)) for x in polys]
    rho = LaurentScalar()
    for x in pr:
        if not x.is_zero:
            rho = rho + x * x.conj()
    h = spectral_factor(rho)
    g = LaurentScalar(npoly.polyfromroots(common)) if common else LaurentScalar([1.0])
    f = RationalScalar(g * h, q, m)
    b, o = inner_outer(f)
    at0 = np.array([x.coefficient(0) for x in pr]) / h.coefficient(0)
    mags = np.abs(at0)
    i = int(np.flatnonzero(mags >= 0.5 * mags.max())[0])
    lam = at0[i] / mags[i]
    pr = [x * np.conj(lam) for x in pr]
    b = b * lam
    vhat = tuple(RationalScalar(x, h) for x in pr)
    N = _next_pow2(8 * (max(x.degree + abs(x.shift) for x in v) + 16))
    bo = (b * o).values(N)
    resid = max(float(np.max(np.abs(x.values(N) - bo * y.values(N)))) for x, y in zip(v, vhat))
    scale = max(float(np.max(np.abs(x.values(N)))) for x in v)
    if resid > 1e-7 * max(scale, 1.0):
        raise ReductionFailed(f"inner-outer residual {resid:.3g}")
    return InnerOuterColumn(b, o, vhat, tuple(pr), h, resid)


# -- thematic completion ---------------------------------------------------------

@dataclass
class ThematicMatrix:
    """Unitary-valued ``V`` whose first column is ``v`` and whose remaining columns are ``conj(Theta)``."""

    V: MatSymbol
    v: tuple
    Theta: tuple  # columns of the analytic n x (n-1) block

    @property
    def n(self):
        return self.V.n


def _coordinate_index(vhat):
    nz = [i for i, x in enumerate(vhat) if not x.is_zero]
    if len(nz) != 1:
        return None
    x = vhat[nz[0]]
    if x.has_trivial_den and x.shift == 0 and len(x.num.array) == 1 and abs(x.num.array[0] - 1) < 1e-12:
        return nz[0]
    return None


def thematic_complete(vhat, n=None):
    """Complete an inner co-outer column to a thematic matrix."""
    vhat = tuple(as_rational(x) for x in vhat)
    n = len(vhat) if n is None else n
    if len(vhat) != n:
        raise ValueError("column length does not match the requested size")
    i = _coordinate_index(vhat)
    if i is not None:
        order = [i] + [j for j in range(n) if j != i]
        P = np.zeros((n, n))
        for col, row in enumerate(order):
            P[row, col] = 1.0
        V = MatSymbol.constant(P)
        Theta = tuple(tuple(V[r, c] for r in range(n)) for c in range(1, n))
        return ThematicMatrix(V, vhat, Theta)
    if n == 1:
        return ThematicMatrix(MatSymbol([[vhat[0]]]), vhat, ())
    if n == 2:
        a, b = vhat
        V = MatSymbol([[a, -b.conj()], [b, a.conj()]])
        return ThematicMatrix(V, vhat, ((-b, a),))
    raise UnsupportedCompletion(f"no constructive thematic completion for a generic column of size {n}")


# -- one reduction step ----------------------------------------------------------

def _bezout(P1, P2, h):
    """Polynomials ``alpha, beta`` with ``-P2 alpha + P1 beta = h`` (least squares, checked)."""
    P1 = np.atleast_1d(np.asarray(P1, complex))
    P2 = np.atleast_1d(np.asarray(P2, complex))
    h = np.atleast_1d(np.asarray(h, complex))
    n1 = len(P1) - 1 if len(P1) else -1
    n2 = len(P2) - 1 if len(P2) else -1
    dh = len(h) - 1
    da = max(n1 - 1, dh - max(n2, 0), 0)
    db = max(n2 - 1, dh - max(n1, 0), 0)
    L = max(n2 + da, n1 + db, dh) + 1
    A = np.zeros((L, da + db + 2), dtype=complex)
    for j in range(da + 1):
        A[j:j + len(P2), j] = -P2
    for j in range(db + 1):
        A[j:j + len(P1), da + 1 + j] = P1
    rhs = np.zeros(L, dtype=complex)
    rhs[:len(h)] = h
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    err = float(np.max(np.abs(A @ sol - rhs)))
    if err > 1e-9 * max(1.0, float(np.max(np.abs(h)))):
        raise ReductionFailed(f"Bezout identity not solvable (residual {err:.3g}); entries not coprime")
    return LaurentScalar(sol[:da + 1]), LaurentScalar(sol[da + 1:])


def _padded(x):
    return np.zeros(0, complex) if x.is_zero else np.concatenate([np.zeros(x.degLo, complex), x.array])


def _left_inverse(col):
    """Analytic row ``L`` with ``L . (-b, a) = 1`` for the column ``(a, b) = numerators / h``."""
    P1, P2 = (_padded(x) for x in col.numerators)
    alpha, beta = _bezout(P1, P2, _padded(col.h))
    return RationalScalar(alpha), RationalScalar(beta)


def _lower_coefficients(Phi, s, u, colv, colw, N):
    """Antianalytic coefficients of the lower corner of ``W (Phi - F) V``.

    With ``xi = (-d, c)`` built from the conjugate-side column ``(c, d)`` and
    ``theta`` likewise from ``v``, ``Phi - s u conj(what) vhat^* = F + xi Psi theta^T``.
    Analytic left inverses of ``xi`` and ``theta`` therefore recover ``Psi``
    up to an analytic term, which leaves its Hankel operator unchanged.
    """
    xi_l = _left_inverse(colw)
    th_l = _left_inverse(colv)

    def values(M):
        E = Phi.values(M) - s * (u.values(M)[:, None, None]
                                 * np.conj(np.stack([x.values(M) for x in colw.vhat], axis=1))[:, :, None]
                                 * np.conj(np.stack([x.values(M) for x in colv.vhat], axis=1))[:, None, :])
        a = np.stack([x.values(M) for x in xi_l], axis=1)
        b = np.stack([x.values(M) for x in th_l], axis=1)
        return np.einsum("ni,nij,nj->n", a, E, b)

    return coefficients_from_values(values, N)


def _grid_matmul(*mats):
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def _negative_part(values):
    N = values.shape[0]
    c = np.fft.fft(values, axis=0) / N
    return float(np.max(np.abs(c[N // 2 + 1:]))) if N > 2 else 0.0


def _adjoint_values(V):
    return np.conj(np.transpose(V, (0, 2, 1)))


def _diag_values(items, N):
    D = np.zeros((N, len(items), len(items)), dtype=complex)
    for i, x in enumerate(items):
        D[:, i, i] = x.values(N)
    return D


@dataclass
class ThematicStep:
    """``Phi - F = W* diag(s u, residual) V*`` for an analytic ``F``."""

    s: float
    u: RationalScalar
    k: int
    V: MatSymbol
    W: MatSymbol
    residual: MatSymbol | None
    lower: list | None = None
    reconstructionResidual: float = 0.0
    thematicV: ThematicMatrix | None = field(default=None, repr=False)
    thematicW: ThematicMatrix | None = field(default=None, repr=False)

    @property
    def residual_norm(self):
        return hankel_norm(self.residual) if self.residual is not None else 0.0

    def middle(self):
        """The diagonal middle factor as a MatSymbol."""
        if self.residual is None:
            return MatSymbol([[self.u * self.s]])
        blocks = [MatSymbol([[self.u * self.s]]), self.residual]
        return MatSymbol.block_diag(*blocks)

    def remainder(self, middle=None):
        """``W* middle V*`` as a MatSymbol."""
        middle = self.middle() if middle is None else middle
        return self.W.adjoint() @ middle @ self.V.adjoint()


def _reconstruction(Phi, step, N):
    n = Phi.n
    items = [step.u * step.s] + ([step.residual[0, 0]] if n == 2 else [])
    if n > 2:
        mid = np.zeros((N, n, n), dtype=complex)
        mid[:, 0, 0] = (step.u * step.s).values(N)
        mid[:, 1:, 1:] = step.residual.values(N)
    else:
        mid = _diag_values(items, N)
    R = Phi.values(N) - _grid_matmul(_adjoint_values(step.W.values(N)), mid, _adjoint_values(step.V.values(N)))
    return _negative_part(R)


def _scalar_step(phi):
    aak = best_approx_scalar(phi)
    u = aak.unimodular
    one = MatSymbol([[1.0]])
    return ThematicStep(aak.sigma, u, aak.indexOfError, one, one, None, None, 0.0)


def thematic_reduce(Phi, N=None):
    """One step ``Phi = W* diag(s u, Psi) V* + F`` with ``F`` analytic.

    ``s`` is the Hankel norm, ``u`` is unimodular with positive Toeplitz index
    and ``Psi`` has sup norm at most ``s``.  For size two the residual is the
    best-approximation error of the lower corner, so its sup norm equals its
    Hankel norm.
    """
    Phi = Phi if isinstance(Phi, MatSymbol) else MatSymbol([[Phi]])
    n = Phi.n
    if n == 1:
        return _scalar_step(Phi[0, 0])
    pair = schmidt(Phi)
    s = pair.sigma
    colv = vector_inner_outer(pair.v)
    wt = [RationalScalar(x.conj().shift(-1)) for x in pair.w]
    colw = vector_inner_outer(wt)
    Ngrid = N or max(default_grid(), _next_pow2(16 * (Phi.support_width + 8)))
    gap = float(np.max(np.abs(colw.o.values(Ngrid) - s * colv.o.values(Ngrid))))
    if gap > 1e-6 * max(s, 1.0):
        raise ReductionFailed(f"outer factors of the Schmidt pair disagree ({gap:.3g})")
    u = (colv.b * colw.b).inv() * colv.o.conj() * colv.o.inv()
    u = u.shifted(-1).cancel()
    k = -winding(u)
    TV = thematic_complete(colv.vhat, n)
    TW = thematic_complete(colw.vhat, n)
    V, W = TV.V, TW.V.transpose()
    if n > 2:
        if not (V.is_polynomial and V.max_degree == 0 and W.max_degree == 0):
            raise UnsupportedCompletion("size above two needs coordinate thematic columns")
        rest = list(range(1, n))
        lower = None
        resid = (W @ Phi @ V).submatrix(rest)
    else:
        lower = _lower_coefficients(Phi, s, u, colv, colw, Ngrid)
        if lower:
            resid = MatSymbol([[best_error_from_coefficients(lower, Ngrid).e]])
        else:
            resid = MatSymbol([[0.0]])
    step = ThematicStep(s, u, k, V, W, resid, lower, 0.0, TV, TW)
    rr = max(_reconstruction(Phi, step, Ngrid), _reconstruction(Phi, step, 2 * Ngrid))
    step.reconstructionResidual = rr
    if rr > RECONSTRUCTION_TOL * max(1.0, s):
        raise ReductionFailed(f"reconstruction residual {rr:.3g}")
    if k < 1:
        raise ReductionFailed(f"unimodular factor has index {k} < 1")
    return step


# -- superoptimal recursion ------------------------------------------------------

@dataclass
class BlockFactorization:
    """Factorization data for one structurally decoupled diagonal block."""

    indices: tuple
    t: list
    k: list
    steps: list
    F: MatSymbol
    symbol: MatSymbol


@dataclass
class FactorizationReport:
    t: list
    k: list
    F: MatSymbol
    chain: list
    monotone: bool
    blocks: list = field(default_factory=list)
    tieTolerance: float = TIE_TOL

    @property
    def groups(self):
        """Index ranges of equal superoptimal values (within the tie tolerance)."""
        out = []
        start = 0
        for i in range(1, len(self.t) + 1):
            if i == len(self.t) or abs(self.t[i] - self.t[start]) > self.tieTolerance:
                out.append(list(range(start, i)))
                start = i
        return out

    def unit_count(self, tol=TIE_TOL):
        return sum(1 for x in self.t if abs(x - 1.0) <= tol)


def _entry_active(e):
    if e.is_zero:
        return False
    if e.shift >= 0 and (e.has_trivial_den or np.min(np.abs(e.poles())) > 1):
        return False
    C = antianalytic_coefficients(MatSymbol([[e]]))
    return bool(C) and max(abs(c[0, 0]) for c in C) > 1e-14


def decouple(Phi):
    """Index groups such that every non-analytic entry lies inside one group's diagonal block."""
    n = Phi.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if _entry_active(Phi[i, j]):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def _factor_block(B):
    """t values, k values, steps and the analytic approximant for a block of size <= 2."""
    n = B.n
    if hankel_norm(B) == 0.0:
        return [0.0] * n, [], [], B
    if n == 1:
        step = _scalar_step(B[0, 0])
        F = MatSymbol([[B[0, 0] - step.u * step.s]])
        return [step.s], [step.k], [step], F
    if n > 2:
        raise UnsupportedCompletion(f"coupled block of size {n} is outside the supported class")
    step = thematic_reduce(B)
    t1 = hankel_norm(step.residual)
    t = [step.s, t1]
    k = [step.k]
    steps = [step]
    if t1 > 0:
        low = _scalar_step(step.residual[0, 0])
        k.append(low.k)
        steps.append(low)
    F = B - step.remainder()
    return t, k, steps, F


def superoptimal(Phi):
    """Superoptimal values, thematic indices and a superoptimal analytic approximant."""
    Phi = Phi if isinstance(Phi, MatSymbol) else MatSymbol([[Phi]])
    n = Phi.n
    blocks = []
    rows = [list(r) for r in Phi.entries]
    for g in decouple(Phi):
        B = Phi.submatrix(list(g))
        t, k, steps, F = _factor_block(B)
        for a, i in enumerate(g):
            for b, j in enumerate(g):
                rows[i][j] = F[a, b]
        blocks.append(BlockFactorization(g, t, k, steps, F, B))
    items = []
    for bi, blk in enumerate(blocks):
        for pos, tv in enumerate(blk.t):
            kv = blk.k[pos] if pos < len(blk.k) else None
            items.append((tv, kv, bi, pos))
    items.sort(key=lambda x: -x[0])
    items = _order_ties(items)
    t = [x[0] for x in items]
    k = [x[1] for x in items if x[0] > 0]
    monotone = True
    start = 0
    for i in range(1, len(items) + 1):
        if i == len(items) or abs(items[i][0] - items[start][0]) > TIE_TOL:
            ks = [x[1] for x in items[start:i] if x[1] is not None]
            if any(a < b for a, b in zip(ks, ks[1:])):
                monotone = False
            start = i
    chain = [s for blk in blocks for s in blk.steps]
    return FactorizationReport(t, k, MatSymbol(rows), chain, monotone, blocks)


def _order_ties(items):
    """Within equal-t groups, order by decreasing k when that keeps every block's internal order."""
    out = []
    start = 0
    for i in range(1, len(items) + 1):
        if i == len(items) or abs(items[i][0] - items[start][0]) > TIE_TOL:
            grp = items[start:i]
            cand = sorted(grp, key=lambda x: -(x[1] if x[1] is not None else -1))
            if all([x[3] for x in cand if x[2] == b] == sorted(x[3] for x in cand if x[2] == b)
                   for b in {x[2] for x in grp}):
                grp = cand
            out.extend(grp)
            start = i
    return out
