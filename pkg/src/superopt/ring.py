"""Scalar Laurent polynomials and rational functions on the unit circle.

Coefficient arrays are stored in ascending order (numpy.polynomial convention).
A :class:`RationalScalar` is ``z**shift * num(z) / den(z)`` with polynomial
``num`` (``num[0] != 0``) and polynomial ``den`` normalised to ``den(0) == 1``.
Denominators may have roots anywhere off the circle; rationals whose poles all
lie outside the closed disk are flagged by :meth:`RationalScalar.disk_zero_free`.
"""
from __future__ import annotations

from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    Asymmetric,
    BoundaryRoot,
    DegenerateInput,
    NearZeroOnCircle,
    NotPositive,
)

DROP_TOL = 1e-13
BOUNDARY_TOL = 1e-8
CANCEL_TOL = 1e-8
DEN_CIRCLE_TOL = 1e-10


def _trim(coeffs, lo, tol=DROP_TOL):
    c = np.array(coeffs, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(0, dtype=complex), 0
    scale = np.max(np.abs(c))
    if scale == 0:
        return np.zeros(0, dtype=complex), 0
    c[np.abs(c) <= tol * scale] = 0
    nz = np.flatnonzero(c)
    return c[nz[0]:nz[-1] + 1].copy(), int(lo) + int(nz[0])


def _grid_values(coeffs, lo, N):
    """Values of sum_j c_j z^(lo+j) at the N-th roots of unity (exact folding)."""
    a = np.zeros(N, dtype=complex)
    if len(coeffs):
        idx = (np.arange(len(coeffs)) + lo) % N
        np.add.at(a, idx, coeffs)
    return np.fft.ifft(a) * N


def unit_grid(N):
    return np.exp(2j * np.pi * np.arange(N) / N)


class LaurentScalar:
    """Finite Laurent series ``sum_j c_j z^j`` with complex coefficients."""

    __slots__ = ("_c", "_lo")

    def __init__(self, coeffs=(), lo=0, *, tol=DROP_TOL):
        c, lo = _trim(coeffs, lo, tol)
        c.flags.writeable = False
        self._c = c
        self._lo = lo

    @classmethod
    def from_dict(cls, mapping):
        if not mapping:
            return cls()
        degs = [int(k) for k in mapping]
        lo, hi = min(degs), max(degs)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in mapping.items():
            c[int(k) - lo] += v
        return cls(c, lo)

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls([c], k)

    @property
    def array(self):
        return self._c

    @property
    def degLo(self):
        return self._lo

    @property
    def degHi(self):
        return self._lo + len(self._c) - 1 if len(self._c) else 0

    @property
    def coeffs(self):
        return {self._lo + i: complex(v) for i, v in enumerate(self._c) if v != 0}

    @property
    def is_zero(self):
        return len(self._c) == 0

    def coefficient(self, j):
        i = j - self._lo
        if 0 <= i < len(self._c):
            return complex(self._c[i])
        return 0j

    def __add__(self, other):
        if isinstance(other, Number):
            other = LaurentScalar([other])
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self._lo, other._lo)
        hi = max(self.degHi, other.degHi)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self._lo - lo:self._lo - lo + len(self._c)] += self._c
        c[other._lo - lo:other._lo - lo + len(other._c)] += other._c
        return LaurentScalar(c, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentScalar(-self._c, self._lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return LaurentScalar(self._c * other, self._lo)
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return LaurentScalar()
        return LaurentScalar(np.convolve(self._c, other._c), self._lo + other._lo)

    __rmul__ = __mul__

    def shift(self, k):
        return LaurentScalar(self._c, self._lo + k)

    def conj(self):
        """Boundary conjugate: conj(f(z)) for |z| = 1."""
        if self.is_zero:
            return self
        return LaurentScalar(np.conj(self._c[::-1]), -self.degHi)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        return z ** self._lo * npoly.polyval(z, self._c)

    def values(self, N):
        return _grid_values(self._c, self._lo, N)

    def allclose(self, other, atol=1e-12):
        d = self - other
        return d.is_zero or float(np.max(np.abs(d.array))) <= atol

    def __repr__(self):
        if self.is_zero:
            return "LaurentScalar(0)"
        terms = " + ".join(f"({v:.6g})z^{k}" for k, v in self.coeffs.items())
        return f"LaurentScalar({terms})"


def _as_laurent(x):
    if isinstance(x, LaurentScalar):
        return x
    if isinstance(x, Number):
        return LaurentScalar([x])
    return LaurentScalar(x)


class RationalScalar:
    """Rational function ``z**shift * num(z) / den(z)`` on the unit circle."""

    __slots__ = ("_num", "_den", "_shift")

    def __init__(self, num, den=None, shift=0):
        num = _as_laurent(num)
        den = LaurentScalar([1.0]) if den is None else _as_laurent(den)
        if den.is_zero:
            raise DegenerateInput("zero denominator")
        if num.is_zero:
            self._num = LaurentScalar()
            self._den = LaurentScalar([1.0])
            self._shift = 0
            return
        d0 = den.array[0]
        self._shift = int(shift) + num.degLo - den.degLo
        self._num = LaurentScalar(num.array / d0)
        self._den = LaurentScalar(den.array / d0)

    @classmethod
    def constant(cls, c):
        return cls(LaurentScalar([c]))

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls(LaurentScalar([c], k))

    @classmethod
    def from_dict(cls, num_map, den_map=None):
        den = LaurentScalar.from_dict(den_map) if den_map else None
        return cls(LaurentScalar.from_dict(num_map), den)

    @property
    def num(self):
        return self._num

    @property
    def den(self):
        return self._den

    @property
    def shift(self):
        return self._shift

    @property
    def is_zero(self):
        return self._num.is_zero

    @property
    def has_trivial_den(self):
        return len(self._den.array) == 1

    @property
    def degree(self):
        return len(self._num.array) + len(self._den.array) - 2

    def to_laurent(self):
        if not self.has_trivial_den:
            raise ValueError("rational function has a nontrivial denominator")
        return self._num.shift(self._shift)

    def numerator_laurent(self):
        return self._num.shift(self._shift)

    # -- validation -------------------------------------------------------
    def poles(self):
        if self.has_trivial_den:
            return np.zeros(0, dtype=complex)
        return roots(self._den)

    def validate(self, tol=DEN_CIRCLE_TOL):
        p = self.poles()
        if p.size and np.min(np.abs(np.abs(p) - 1)) <= tol:
            raise BoundaryRoot("denominator root on the unit circle")
        return self

    def disk_zero_free(self, tol=DEN_CIRCLE_TOL):
        p = self.poles()
        return bool(p.size == 0 or np.min(np.abs(p)) > 1 + tol)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalScalar):
            return other
        if isinstance(other, LaurentScalar):
            return RationalScalar(other)
        if isinstance(other, Number):
            return RationalScalar.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a = self._num.shift(self._shift)
        b = other._num.shift(other._shift)
        da, db = self._den.array, other._den.array
        if len(da) == len(db) and np.allclose(da, db, rtol=1e-14, atol=1e-15):
            return RationalScalar(a + b, self._den)
        return RationalScalar(a * other._den + b * self._den, self._den * other._den)

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(RationalScalar)
        out._num = -self._num
        out._den = self._den
        out._shift = self._shift
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            if other == 0:
                return RationalScalar(LaurentScalar())
            return RationalScalar(self._num * other, self._den, self._shift)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RationalScalar(LaurentScalar())
        if other.has_trivial_den:
            den = self._den
        elif self.has_trivial_den:
            den = other._den
        else:
            den = self._den * other._den
        return RationalScalar(self._num * other._num, den, self._shift + other._shift)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero:
            raise DegenerateInput("cannot invert the zero function")
        return RationalScalar(self._den, self._num, -self._shift)

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1.0 / other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def shifted(self, k):
        if self.is_zero:
            return self
        return RationalScalar(self._num, self._den, self._shift + k)

    def conj(self):
        """Boundary conjugate ``conj(f(z))`` for ``|z| = 1`` as a rational."""
        if self.is_zero:
            return self
        n, d = self._num.array, self._den.array
        shift = -self._shift - (len(n) - 1) + (len(d) - 1)
        return RationalScalar(LaurentScalar(np.conj(n[::-1])), LaurentScalar(np.conj(d[::-1])), shift)

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        return z ** self._shift * npoly.polyval(z, self._num.array) / npoly.polyval(z, self._den.array)

    def values(self, N):
        if self.is_zero:
            return np.zeros(N, dtype=complex)
        num = _grid_values(self._num.array, self._shift, N)
        if self.has_trivial_den:
            return num
        return num / _grid_values(self._den.array, 0, N)

    def fourier(self, N):
        """Fourier coefficients from an N-point FFT; index j lives at j mod N."""
        return np.fft.fft(self.values(N)) / N

    def coefficient(self, j, N=4096):
        if self.has_trivial_den:
            return self.numerator_laurent().coefficient(j)
        return complex(self.fourier(N)[j % N])

    def cancel(self, tol=CANCEL_TOL):
        """Remove numerator/denominator root pairs closer than ``tol``."""
        if self.is_zero or self.has_trivial_den or len(self._num.array) == 1:
            return self
        nr = list(roots(self._num))
        dr = list(roots(self._den))
        common = []
        for r in sorted(dr, key=abs):
            if not nr:
                break
            dist = [abs(r - q) for q in nr]
            i = int(np.argmin(dist))
            if dist[i] <= tol * max(1.0, abs(r)):
                common.append(0.5 * (r + nr.pop(i)))
        if not common:
            return self
        num, den = self._num.array, self._den.array
        for r in common:
            qn, rn = npoly.polydiv(num, [-r, 1.0])
            qd, rd = npoly.polydiv(den, [-r, 1.0])
            if (np.max(np.abs(rn)) > 1e-9 * np.max(np.abs(num))
                    or np.max(np.abs(rd)) > 1e-9 * np.max(np.abs(den))):
                continue
            num, den = np.atleast_1d(qn), np.atleast_1d(qd)
        out = RationalScalar(LaurentScalar(num), LaurentScalar(den), self._shift)
        # deflation of high-degree factors can be unstable; keep the input if values moved
        N = _grid_size_for(self.degree + abs(self._shift))
        ref = self.values(N)
        if np.max(np.abs(out.values(N) - ref)) > 1e-10 * max(1.0, float(np.max(np.abs(ref)))):
            return self
        return out

    def allclose(self, other, atol=1e-10, N=256):
        return float(np.max(np.abs(self.values(N) - other.values(N)))) <= atol

    def __repr__(self):
        return f"RationalScalar(shift={self._shift}, num={self._num.array!r}, den={self._den.array!r})"


def as_rational(x):
    if isinstance(x, RationalScalar):
        return x
    if isinstance(x, LaurentScalar):
        return RationalScalar(x)
    if isinstance(x, Number):
        return RationalScalar.constant(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


Z = RationalScalar.monomial(1)
ZBAR = RationalScalar.monomial(-1)


def roots(p):
    """All roots of the polynomial part of ``p`` with multiplicity.

    Zeros contributed by a positive lowest degree are included; companion
    eigenvalues are refined by one guarded Newton step.
    """
    p = _as_laurent(p)
    if p.is_zero:
        raise DegenerateInput("roots of the zero polynomial")
    c = p.array
    zeros = np.zeros(max(p.degLo, 0), dtype=complex)
    if len(c) == 1:
        return zeros
    r = npoly.polyroots(c).astype(complex)
    dc = npoly.polyder(c)
    pv = npoly.polyval(r, c)
    dv = npoly.polyval(r, dc)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(dv != 0, pv / dv, 0)
    cand = r - step
    better = np.abs(npoly.polyval(cand, c)) < np.abs(pv)
    cand = np.where(better & np.isfinite(cand), cand, r)
    # Newton steps on a cluster break its symmetric perturbation; keep them
    # only when the roots still reproduce the coefficients as well as before
    if _backward_error(cand, c) <= _backward_error(r, c):
        r = cand
    return np.concatenate([zeros, r])


def _backward_error(r, c):
    return float(np.max(np.abs(npoly.polyfromroots(r) * c[-1] - c)))


def _grid_size_for(degree, minimum=256):
    N = minimum
    while N < 8 * (degree + 1):
        N *= 2
    return N


def spectral_factor(rho, floor=1e-12):
    """Outer polynomial ``o`` with ``o(0) > 0`` and ``|o|^2 = rho`` on the circle."""
    rho = _as_laurent(rho)
    if rho.is_zero:
        raise NotPositive("zero spectral density")
    m = max(rho.degHi, -rho.degLo)
    scale = float(np.max(np.abs(rho.array)))
    for j in range(0, m + 1):
        if abs(rho.coefficient(-j) - np.conj(rho.coefficient(j))) > 1e-12 * scale:
            raise Asymmetric(f"coefficient mismatch at degree {j}")
    N = _grid_size_for(2 * m)
    vals = rho.values(N).real
    if np.min(vals) < -floor * scale:
        raise NotPositive(f"density drops to {np.min(vals):.3g}")
    if m == 0:
        return LaurentScalar([np.sqrt(rho.coefficient(0).real)])
    c = np.array([rho.coefficient(j) for j in range(-m, m + 1)])
    r = npoly.polyroots(c)
    # boundary zeros of a nonnegative density come in pairs; keep one of each
    on = [x for x in r if abs(abs(x) - 1) < 1e-6]
    off = [x for x in r if abs(abs(x) - 1) >= 1e-6]
    if len(on) % 2:
        raise NotPositive("odd-order zero of the density on the unit circle")
    kept = []
    while on:
        a = on.pop(0)
        i = int(np.argmin([abs(a - b) for b in on]))
        b = on.pop(i)
        mid = 0.5 * (a + b)
        kept.append(mid / abs(mid))
    outside = np.array([x for x in off if abs(x) > 1] + kept, dtype=complex)
    if len(outside) != m:
        raise NotPositive("roots of the density are not split by the unit circle")
    base = npoly.polyfromroots(outside)
    base = base / npoly.polyval(0, base)
    bvals = np.abs(_grid_values(base, 0, N)) ** 2
    k = np.sqrt(np.dot(vals, bvals) / np.dot(bvals, bvals))
    return LaurentScalar(base * k)


def _blaschke(a):
    """(z - a) / (1 - conj(a) z) for |a| < 1."""
    if a == 0:
        return Z
    return RationalScalar(LaurentScalar([-a, 1.0]), LaurentScalar([1.0, -np.conj(a)]))


def blaschke_product(zeros):
    out = RationalScalar.constant(1.0)
    for a in zeros:
        out = out * _blaschke(complex(a))
    return out


def _split_poly(c, tol=BOUNDARY_TOL):
    """Split a polynomial with c[0] != 0 into (constant, inside roots, outer poly with value 1 at 0)."""
    if len(c) == 1:
        return complex(c[0]), np.zeros(0, complex), np.array([1.0 + 0j])
    r = roots(LaurentScalar(c))
    if np.min(np.abs(np.abs(r) - 1)) <= tol:
        raise BoundaryRoot("root within tolerance of the unit circle")
    inside = r[np.abs(r) < 1]
    outside = r[np.abs(r) > 1]
    const = complex(c[0]) * np.prod(-1.0 / inside) if inside.size else complex(c[0])
    outer = np.array([1.0 + 0j])
    for a in inside:
        outer = npoly.polymul(outer, [1.0, -np.conj(a)])
    for q in outside:
        outer = npoly.polymul(outer, [1.0, -1.0 / q])
    return const, inside, outer


def inner_outer(f):
    """Split ``f`` into a unimodular part and an outer part.

    The unimodular part is ``z**m`` times a quotient of finite Blaschke
    products (numerator zeros and denominator poles inside the disk); the
    outer part has neither zeros nor poles in the open disk. For analytic
    ``f`` this is the classical inner-outer factorization.
    """
    f = as_rational(f)
    if f.is_zero:
        raise DegenerateInput("inner-outer split of the zero function")
    cn, in_n, out_n = _split_poly(f.num.array)
    cd, in_d, out_d = _split_poly(f.den.array)
    c = cn / cd
    phase = c / abs(c)
    inner = blaschke_product(in_n) * blaschke_product(in_d).inv() * phase
    inner = inner.shifted(f.shift)
    outer = RationalScalar(LaurentScalar(out_n * abs(c)), LaurentScalar(out_d))
    return inner, outer


def winding(f, N=1024, floor=1e-8, max_N=1 << 22):
    """Winding number of ``f`` around 0 along the unit circle."""
    f = as_rational(f)
    if f.is_zero:
        raise NearZeroOnCircle("zero function has no winding number")
    N = max(N, _grid_size_for(f.degree + abs(f.shift), 64))
    while True:
        vals = f.values(N)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.min(np.abs(vals)) < floor * scale:
            if N >= max_N:
                raise NearZeroOnCircle(f"min |f| = {np.min(np.abs(vals)):.3g} on the circle")
            N *= 2
            continue
        inc = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(inc)) < np.pi / 2:
            return int(round(np.sum(inc) / (2 * np.pi)))
        if N >= max_N:
            raise NearZeroOnCircle("argument increments did not resolve")
        N *= 2
