"""Block Hankel sections, Schmidt pairs and Toeplitz kernel dimensions.

A rational symbol has a finite-rank Hankel operator, so a finite section
captures every nonzero singular value.  For symbols whose antianalytic part is
a polynomial in conj(z) of degree d the d x d block section is exact; otherwise
the section is cut where the Fourier coefficients fall below machine level.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NearSingularSymbol, Unstable, ZeroOperator
from .matfun import MatSymbol, _next_pow2, default_grid
from .ring import LaurentScalar

COEFF_TOL = 1e-15
TIE_TOL = 1e-9
RANK_TOL = 1e-9
MAX_GRID = 1 << 16

# Essential norms of Hankel operators vanish for rational symbols.
ESSENTIAL_NORM = 0.0


def _as_matsymbol(Phi):
    if isinstance(Phi, MatSymbol):
        return Phi
    return MatSymbol([[Phi]])


def _exact_depth(Phi):
    """Antianalytic degree when no entry has a pole in the open disk, else None."""
    d = 0
    for row in Phi.entries:
        for e in row:
            if e.is_zero:
                continue
            if not e.has_trivial_den and np.min(np.abs(e.poles())) < 1:
                return None
            d = max(d, -e.shift)
    return d


def antianalytic_coefficients(Phi, N=None, tol=COEFF_TOL):
    """Coefficients [Phi^(-1), Phi^(-2), ..., Phi^(-d)] as n x n arrays."""
    Phi = _as_matsymbol(Phi)
    n = Phi.n
    if Phi.is_polynomial:
        d = 0
        for row in Phi.entries:
            for e in row:
                if not e.is_zero:
                    d = max(d, -e.shift)
        C = np.zeros((d, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                L = Phi[i, j].to_laurent()
                for m in range(1, d + 1):
                    C[m - 1, i, j] = L.coefficient(-m)
        return list(C)
    N = N or max(default_grid(), _next_pow2(16 * (Phi.support_width + 1)))
    exact = _exact_depth(Phi)
    if exact is not None:
        while exact > N // 8:
            N *= 2
        return list(Phi.fourier(N)[::-1][:exact])
    return coefficients_from_values(Phi.values, N, tol)


def coefficients_from_values(values, N, tol=COEFF_TOL):
    """Antianalytic coefficients of a function known through ``values(N)`` on grids.

    The grid is doubled until the coefficients have decayed below ``tol``
    well inside the resolved range.
    """
    while True:
        vals = values(N)
        if vals.ndim == 1:
            vals = vals[:, None, None]
        c = np.fft.fft(vals, axis=0) / N
        neg = c[::-1][:N // 2 - 1]  # index m-1 holds the coefficient of z^-m
        norms = np.max(np.abs(neg), axis=(1, 2))
        top = float(np.max(norms)) if norms.size else 0.0
        if top == 0.0:
            return []
        keep = np.flatnonzero(norms > tol * max(top, 1.0))
        if keep.size == 0:
            return []
        d = int(keep[-1]) + 1
        if d <= N // 8:
            return list(neg[:d])
        if N >= MAX_GRID:
            raise Unstable(f"antianalytic coefficients do not decay on a grid of {N} points")
        N *= 2


@dataclass
class HankelSection:
    symbol: MatSymbol
    blockRows: int
    blockCols: int
    matrix: np.ndarray

    @classmethod
    def from_symbol(cls, Phi, blockRows=None, blockCols=None):
        Phi = _as_matsymbol(Phi)
        return cls.from_coefficients(antianalytic_coefficients(Phi), Phi.n, blockRows, blockCols, Phi)

    @classmethod
    def from_coefficients(cls, C, n, blockRows=None, blockCols=None, symbol=None):
        """Section built from ``C[m-1] = Phi^(-m)``."""
        d = len(C)
        p = d if blockRows is None else blockRows
        q = d if blockCols is None else blockCols
        M = np.zeros((n * p, n * q), dtype=complex)
        for j in range(p):
            for k in range(q):
                if j + k < d:
                    M[j * n:(j + 1) * n, k * n:(k + 1) * n] = C[j + k]
        return cls(symbol, p, q, M)

    def singular_values(self):
        if self.matrix.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.matrix, compute_uv=False)


def hankel_norm(Phi):
    """Norm of the Hankel operator, i.e. the L-infinity distance to H-infinity."""
    s = HankelSection.from_symbol(Phi).singular_values()
    return float(s[0]) if s.size else 0.0


@dataclass
class SchmidtPair:
    """Top singular value with a maximizing vector ``v`` and ``w = H v``."""

    sigma: float
    v: tuple
    w: tuple
    multiplicity: int = 1
    alternatives: list = field(default_factory=list, repr=False)

    def v_values(self, N):
        return np.stack([c.values(N) for c in self.v], axis=1)

    def w_values(self, N):
        return np.stack([c.values(N) for c in self.w], axis=1)

    def modulus_defect(self, N=None):
        """max over the grid of | |w(z)| - sigma |v(z)| |."""
        N = N or default_grid()
        a = np.linalg.norm(self.w_values(N), axis=1)
        b = np.linalg.norm(self.v_values(N), axis=1)
        return float(np.max(np.abs(a - self.sigma * b)))


def _vectors_from_coeffs(x, n, negative):
    K = len(x) // n
    out = []
    for i in range(n):
        c = np.array([x[k * n + i] for k in range(K)])
        if negative:
            out.append(LaurentScalar(c[::-1], -K))
        else:
            out.append(LaurentScalar(c, 0))
    return tuple(out)


def _fix_phase(x):
    a = np.abs(x)
    i = int(np.flatnonzero(a >= 0.5 * a.max())[0])
    return x * (np.conj(x[i]) / a[i])


def schmidt(Phi):
    """A top Schmidt pair of the Hankel operator with symbol ``Phi``.

    When the top singular value is multiple, the returned maximizing vector is
    the normalised projection of the first coordinate basis vector that has a
    non-negligible component in the maximizing subspace.
    """
    Phi = _as_matsymbol(Phi)
    return schmidt_from_section(HankelSection.from_symbol(Phi), Phi.n)


def schmidt_from_section(sec, n):
    """Top Schmidt pair of a Hankel operator given by its exact section."""
    if sec.matrix.size == 0:
        raise ZeroOperator("Hankel operator is zero")
    _, s, Vh = np.linalg.svd(sec.matrix)
    sigma = float(s[0])
    if sigma == 0.0:
        raise ZeroOperator("Hankel operator is zero")
    mu = int(np.sum(s >= sigma * (1 - TIE_TOL)))
    basis = np.conj(Vh[:mu]).T
    if mu == 1:
        x = basis[:, 0]
    else:
        for i in range(basis.shape[0]):
            proj = basis @ np.conj(basis[i])
            if np.linalg.norm(proj) > 1e-3:
                x = proj / np.linalg.norm(proj)
                break
    x = _fix_phase(x)
    pair = SchmidtPair(sigma, _vectors_from_coeffs(x, n, False),
                       _vectors_from_coeffs(sec.matrix @ x, n, True), mu)
    for k in range(1, mu):
        y = _fix_phase(basis[:, k] - basis[:, :k] @ (np.conj(basis[:, :k]).T @ basis[:, k]))
        y = y / np.linalg.norm(y)
        pair.alternatives.append((_vectors_from_coeffs(y, n, False),
                                  _vectors_from_coeffs(sec.matrix @ y, n, True)))
    return pair


@dataclass(frozen=True)
class KernelEvidence:
    dim: int
    unknown_degree: int
    interior_poles: int
    grid: int
    singular_values: tuple
    threshold: float


def _interior_poles(Psi, tol=1e-7):
    """Interior poles of the entries, merged as a least common multiple (max multiplicity)."""
    merged = []
    seen = []
    for row in Psi.entries:
        for e in row:
            if e.is_zero or e.has_trivial_den:
                continue
            if any(len(e.den.array) == len(x.array) and np.allclose(e.den.array, x.array, rtol=1e-13, atol=1e-15)
                   for x in seen):
                continue
            seen.append(e.den)
            pool = list(merged)
            for r in e.poles():
                if abs(r) >= 1:
                    continue
                dist = [abs(r - x) for x in pool]
                if dist and min(dist) <= tol:
                    pool.pop(int(np.argmin(dist)))
                else:
                    merged.append(complex(r))
    return np.array(merged, dtype=complex)


def _kernel_at(Psi, poles, s, N, rank_tol, floor):
    n = Psi.n
    vals = Psi.values(N)
    smin = np.linalg.svd(vals, compute_uv=False)[:, -1]
    if np.min(smin) < floor:
        raise NearSingularSymbol(f"min singular value {np.min(smin):.3g} on the circle")
    inv = np.linalg.inv(vals)
    idx = np.arange(N)
    zeta = np.exp(2j * np.pi * idx / N)
    dv = np.ones(N, dtype=complex)
    for a in poles:
        dv *= zeta - a
    base = inv / dv[:, None, None]
    k = len(poles)
    cols = np.empty((N, n, n * s), dtype=complex)
    for l in range(s):
        phase = np.exp(2j * np.pi * (((k - s + l) * idx) % N) / N)
        cols[:, :, l * n:(l + 1) * n] = base * phase[:, None, None]
    coeffs = np.fft.fft(cols, axis=0) / N
    A = coeffs[N // 2 + 1:].reshape(-1, n * s)
    sv = np.linalg.svd(A, compute_uv=False)
    # scale by the full column norms so that an identically zero map has full nullity
    scale = max(float(sv[0]) if sv.size else 0.0,
                float(np.max(np.linalg.norm(coeffs.reshape(N, -1, n * s), axis=(0, 1)))))
    thr = rank_tol * scale
    rank = int(np.sum(sv > thr))
    return n * s - rank, sv, thr


def toeplitz_kernel_dim(Psi, degCap=200, N=None, *, rank_tol=RANK_TOL, floor=1e-8,
                        with_evidence=False):
    """Dimension of the kernel of the block Toeplitz operator with symbol ``Psi``.

    Writing ``Psi = c * L`` where ``c = z^k / d(z)`` collects the ``k``
    interior poles (``c`` is coanalytic and invertible) and ``L = z^-s P``
    with ``P`` analytic, kernel vectors are ``f = P^-1 p`` with ``p``
    polynomial of degree < s and ``f`` analytic.  The dimension is the nullity of the map sending ``p`` to
    the negative Fourier coefficients of ``P^-1 p``; it is computed on two
    grids and must agree.
    """
    Psi = _as_matsymbol(Psi)
    nonzero = [e for row in Psi.entries for e in row if not e.is_zero]
    if not nonzero:
        raise NearSingularSymbol("zero symbol")
    poles = _interior_poles(Psi)
    k = len(poles)
    s = max(0, k - min(e.shift for e in nonzero))
    if s == 0:
        ev = KernelEvidence(0, 0, k, 0, (), 0.0)
        return ev if with_evidence else 0
    if s > degCap:
        raise Unstable(f"kernel search needs degree {s} > cap {degCap}")
    width = s + k + Psi.support_width
    N0 = N or max(1024, _next_pow2(16 * width))
    dim1, sv, thr = _kernel_at(Psi, poles, s, N0, rank_tol, floor)
    dim2, sv2, thr2 = _kernel_at(Psi, poles, s, 2 * N0, rank_tol, floor)
    if dim1 != dim2:
        raise Unstable(f"kernel dimension {dim1} on grid {N0} but {dim2} on grid {2 * N0}")
    ev = KernelEvidence(dim2, s, k, 2 * N0, tuple(float(x) for x in sv2), float(thr2))
    return ev if with_evidence else dim2
