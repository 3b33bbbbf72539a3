"""Square matrix functions on the unit circle with rational entries."""
from __future__ import annotations

import os
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import GridTooSmall
from .ring import LaurentScalar, RationalScalar, as_rational

DEFAULT_GRID = 4096
SYMBOLIC_DEGREE_LIMIT = 256
PROJECTION_TOL = 1e-15


def default_grid():
    """Default grid size, overridable through ``SUPEROPT_GRID``."""
    raw = os.environ.get("SUPEROPT_GRID")
    if raw:
        N = int(raw)
        if N < 8 or N & (N - 1):
            raise ValueError(f"SUPEROPT_GRID must be a power of two >= 8, got {raw}")
        return N
    return DEFAULT_GRID


def _next_pow2(x):
    N = 8
    while N < x:
        N *= 2
    return N


class MatSymbol:
    """An n x n matrix of :class:`RationalScalar` entries."""

    def __init__(self, entries, projection_residual=0.0):
        rows = [[as_rational(e) for e in row] for row in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix symbol must be square")
        self._e = tuple(tuple(r) for r in rows)
        self.n = n
        self.projection_residual = float(projection_residual)
        self._cache = {}

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, n):
        return cls([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n):
        return cls([[0.0] * n for _ in range(n)])

    @classmethod
    def diag(cls, items):
        items = list(items)
        n = len(items)
        return cls([[items[i] if i == j else 0.0 for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, M):
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        return cls([[complex(x) for x in row] for row in M])

    @classmethod
    def from_laurent(cls, coeffs):
        """Build from a mapping ``degree -> n x n coefficient matrix``."""
        mats = {int(k): np.atleast_2d(np.asarray(v, dtype=complex)) for k, v in coeffs.items()}
        n = next(iter(mats.values())).shape[0]
        return cls([[LaurentScalar.from_dict({k: M[i, j] for k, M in mats.items()})
                     for j in range(n)] for i in range(n)])

    @classmethod
    def block_diag(cls, *blocks):
        n = sum(b.n for b in blocks)
        rows = [[RationalScalar(LaurentScalar()) for _ in range(n)] for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                for j in range(b.n):
                    rows[off + i][off + j] = b[i, j]
            off += b.n
        return cls(rows)

    # -- access -----------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    @property
    def entries(self):
        return self._e

    def rows(self):
        return [list(r) for r in self._e]

    def submatrix(self, rows, cols=None):
        cols = rows if cols is None else cols
        return MatSymbol([[self._e[i][j] for j in cols] for i in rows])

    @property
    def max_degree(self):
        return max((e.degree for row in self._e for e in row), default=0)

    @property
    def support_width(self):
        """Crude bound on the Laurent support used to size FFT grids."""
        w = 0
        for row in self._e:
            for e in row:
                if not e.is_zero:
                    w = max(w, abs(e.shift) + e.degree + 1)
        return w

    @property
    def is_polynomial(self):
        return all(e.has_trivial_den for row in self._e for e in row)

    # -- arithmetic -------------------------------------------------------
    def _binary(self, other, op):
        if other.n != self.n:
            raise ValueError("size mismatch")
        return MatSymbol([[op(self._e[i][j], other._e[i][j]) for j in range(self.n)]
                          for i in range(self.n)],
                         max(self.projection_residual, other.projection_residual))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return MatSymbol([[-e for e in row] for row in self._e], self.projection_residual)

    def __mul__(self, c):
        if isinstance(c, (Number, RationalScalar, LaurentScalar)):
            return MatSymbol([[e * c for e in row] for row in self._e], self.projection_residual)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if other.n != self.n:
            raise ValueError("size mismatch")
        n = self.n
        resid = max(self.projection_residual, other.projection_residual)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = RationalScalar(LaurentScalar())
                for k in range(n):
                    a, b = self._e[i][k], other._e[k][j]
                    if not (a.is_zero or b.is_zero):
                        acc = acc + a * b
                if acc.degree > 64:
                    acc = acc.cancel()
                if acc.degree > SYMBOLIC_DEGREE_LIMIT:
                    acc, err = project(acc)
                    resid = max(resid, err)
                row.append(acc)
            out.append(row)
        return MatSymbol(out, resid)

    def adjoint(self):
        return MatSymbol([[self._e[j][i].conj() for j in range(self.n)] for i in range(self.n)],
                         self.projection_residual)

    def transpose(self):
        return MatSymbol([[self._e[j][i] for j in range(self.n)] for i in range(self.n)],
                         self.projection_residual)

    def conj(self):
        return MatSymbol([[e.conj() for e in row] for row in self._e], self.projection_residual)

    def shifted(self, k):
        return MatSymbol([[e.shifted(k) for e in row] for row in self._e], self.projection_residual)

    def det(self):
        return _det(self.rows())

    # -- evaluation -------------------------------------------------------
    def values(self, N):
        if N not in self._cache:
            V = np.empty((N, self.n, self.n), dtype=complex)
            for i in range(self.n):
                for j in range(self.n):
                    V[:, i, j] = self._e[i][j].values(N)
            V.flags.writeable = False
            self._cache[N] = V
        return self._cache[N]

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape + (self.n, self.n), dtype=complex)
        for i in range(self.n):
            for j in range(self.n):
                out[..., i, j] = self._e[i][j](z)
        return out

    def fourier(self, N):
        """Array of shape (N, n, n); coefficient j is stored at index j mod N."""
        return np.fft.fft(self.values(N), axis=0) / N

    def sup_norm(self, N=None):
        N = N or default_grid()
        return float(np.max(np.linalg.norm(self.values(N), ord=2, axis=(1, 2))))

    def __repr__(self):
        return f"MatSymbol(n={self.n}, max_degree={self.max_degree})"


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = RationalScalar(LaurentScalar())
    for j in range(n):
        if rows[0][j].is_zero:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def project(f, N=None):
    """Replace a rational by the Laurent polynomial of its FFT coefficients.

    Returns the projection and its sup-grid error measured on a doubled grid.
    """
    N = N or _next_pow2(16 * (f.degree + abs(f.shift) + 1))
    c = f.fourier(N)
    half = N // 2
    coeffs = np.concatenate([c[half:], c[:half]])
    scale = np.max(np.abs(coeffs))
    coeffs[np.abs(coeffs) <= PROJECTION_TOL * scale] = 0
    p = RationalScalar(LaurentScalar(coeffs, -half))
    err = float(np.max(np.abs(p.values(2 * N) - f.values(2 * N))))
    return p, err


def _grid_for(Phi, N):
    need = _next_pow2(4 * max(Phi.support_width, 1))
    if N is None:
        return max(default_grid(), need), False
    if N & (N - 1):
        raise ValueError("grid size must be a power of two")
    if N < need:
        raise GridTooSmall(f"grid {N} smaller than 4x support {Phi.support_width}")
    return N, True


def fourier_coeff(Phi, j, N=None):
    """The j-th matrix Fourier coefficient, computed by FFT on an N-point grid."""
    N = N or default_grid()
    if abs(j) > N // 2 - 1:
        raise GridTooSmall(f"|j| = {abs(j)} needs a grid larger than {N}")
    return Phi.fourier(N)[j % N].copy()


def _unitarity_at(U, N):
    V = U.values(N)
    G = V @ np.conj(np.transpose(V, (0, 2, 1))) - np.eye(U.n)
    return float(np.max(np.linalg.norm(G, ord=2, axis=(1, 2))))


def _analyticity_at(F, N):
    c = F.fourier(N)
    neg = c[N // 2 + 1:]
    return float(np.max(np.abs(neg))) if neg.size else 0.0


def _stabilized(fn, N, explicit, cap=1 << 16):
    """Double the grid until successive residual estimates agree within 10 percent."""
    if explicit:
        return fn(N), N
    prev = fn(N)
    while N < cap:
        cur = fn(2 * N)
        N *= 2
        hi = max(prev, cur)
        if hi < 1e-13 or abs(cur - prev) <= 0.1 * hi:
            return cur, N
        prev = cur
    return prev, N


def unitarity_residual(U, N=None, *, with_grid=False):
    """max over the grid of ||U U* - I|| in operator norm."""
    N, explicit = _grid_for(U, N)
    val, N = _stabilized(lambda M: _unitarity_at(U, M), N, explicit)
    return (val, N) if with_grid else val


def analyticity_residual(F, N=None, *, with_grid=False):
    """max |F^(j)| over negative j, as resolved by the FFT."""
    N, explicit = _grid_for(F, N)
    val, N = _stabilized(lambda M: _analyticity_at(F, M), N, explicit)
    return (val, N) if with_grid else val


def fourier_match_residual(U, Phi, N=None, *, with_grid=False):
    """max over j < 0 of |U^(j) - Phi^(j)|."""
    return analyticity_residual(U - Phi, N, with_grid=with_grid)


@dataclass(frozen=True)
class ResidualReport:
    unitarityResidual: float
    analyticityResidual: float
    fourierMatchResidual: float
    gridSize: int

    def as_dict(self):
        return {
            "unitarity_residual": self.unitarityResidual,
            "analyticity_residual": self.analyticityResidual,
            "fourier_match_residual": self.fourierMatchResidual,
            "grid_size": self.gridSize,
        }


def residual_report(U, Phi, N=None):
    """Evidence that U is a unitary interpolant of Phi."""
    unit, n1 = unitarity_residual(U, N, with_grid=True)
    F = U - Phi
    ana, n2 = analyticity_residual(F, N, with_grid=True)
    # for an interpolant the two coefficient residuals coincide: F = U - Phi
    return ResidualReport(unit, ana, ana, max(n1, n2))
