"""Independent reference computations used by the tests.

Nothing here calls into the package's algorithms: closed forms, series long
division and plain numpy constructions only.
"""
import numpy as np

from superopt import LaurentScalar, MatSymbol, RationalScalar


def sigma_max_2x2(c):
    """Largest singular value of [[c, 1/2], [1/2, 0]], the section of conj(z)^2/2 + c conj(z)."""
    return (c + np.sqrt(c * c + 1)) / 2


def series_divide(num, den, terms=30):
    """Taylor coefficients of num(z)/den(z) by long division (ascending coefficient lists)."""
    num = list(num) + [0] * terms
    out = []
    for k in range(terms):
        c = num[k] / den[0]
        out.append(c)
        for j, d in enumerate(den):
            if k + j < len(num):
                num[k + j] -= c * d
    return out


def null_vector_2x2(G):
    """Unit null vector of a singular 2 x 2 matrix by direct solve."""
    a, b = G[0]
    v = np.array([-b, a]) if abs(a) + abs(b) > 0 else np.array([1.0, 0.0])
    return v / np.linalg.norm(v)


def grid(N):
    return np.exp(2j * np.pi * np.arange(N) / N)


def random_outer_den(rng, degree, rmin=1.3, rmax=3.0):
    if degree == 0:
        return None
    r = rng.uniform(rmin, rmax, size=degree) * np.exp(2j * np.pi * rng.uniform(size=degree))
    return LaurentScalar(np.polynomial.polynomial.polyfromroots(r))


def random_rational(rng, max_depth=4, num_degree=3, den_degree=2, depth=None):
    """z^-k p(z) / q(z) with q zero-free in the closed disk and 1 <= k <= max_depth."""
    k = int(rng.integers(1, max_depth + 1)) if depth is None else depth
    p = LaurentScalar(rng.normal(size=num_degree + 1) + 1j * rng.normal(size=num_degree + 1))
    q = random_outer_den(rng, int(rng.integers(0, den_degree + 1)))
    return RationalScalar(p, q, -k)


def random_matrix_symbol(rng, n=2, max_depth=4):
    return MatSymbol([[random_rational(rng, max_depth) for _ in range(n)] for _ in range(n)])


def random_unitary(rng, n=2):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def unitriangular(rng, degree=3, lower=False):
    p = LaurentScalar(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))
    return MatSymbol([[1, 0], [p, 1]]) if lower else MatSymbol([[1, p], [0, 1]])


def planted_product(rng, indices, degree=3):
    """Q2* diag(z^d0, z^d1) Q1 with random unitriangular polynomial Q's."""
    Q1 = unitriangular(rng, degree, rng.random() < 0.5)
    Q2 = unitriangular(rng, degree, rng.random() < 0.5)
    Lam = MatSymbol.diag([RationalScalar.monomial(int(d)) for d in indices])
    return Q2.adjoint() @ Lam @ Q1


def kernel_sweep_prediction(indices, M, kappa):
    return sum(max(M - d - kappa, 0) for d in indices)
