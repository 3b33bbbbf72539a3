import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superopt import Z, ZBAR, LaurentScalar, RationalScalar, inner_outer, roots, spectral_factor, winding
from superopt.errors import (
    Asymmetric,
    BoundaryRoot,
    DegenerateInput,
    NearZeroOnCircle,
    NotPositive,
)
from superopt.ring import blaschke_product

from oracles import grid, series_divide


def _sorted(r):
    return sorted(np.round(np.asarray(r), 12), key=lambda x: (x.real, x.imag))


def test_roots_of_z2_minus_1():
    assert np.allclose(_sorted(roots(LaurentScalar([-1, 0, 1]))), [-1, 1])


def test_roots_of_z2_plus_quarter():
    assert np.allclose(_sorted(roots(LaurentScalar([0.25, 0, 1]))), [-0.5j, 0.5j])


def test_roots_of_product_with_outside_root():
    assert np.allclose(_sorted(roots(LaurentScalar([1, -2.5, 1]))), [0.5, 2])


def test_roots_include_zeros_from_low_degree():
    r = roots(LaurentScalar([1, -1], 2))
    assert np.allclose(_sorted(r), [0, 0, 1])


def test_roots_of_zero_polynomial_raises():
    with pytest.raises(DegenerateInput):
        roots(LaurentScalar())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_roots_reconstruct_polynomial(rs):
    p = np.polynomial.polynomial.polyfromroots(rs) * (1 + 0.5j)
    r = roots(LaurentScalar(p))
    back = np.polynomial.polynomial.polyfromroots(r) * p[-1]
    assert np.max(np.abs(back - p)) <= 1e-9 * max(1.0, np.max(np.abs(p)))


def test_spectral_factor_constant():
    assert LaurentScalar([1.0]).allclose(spectral_factor(LaurentScalar([1.0])))


def test_spectral_factor_boundary_zero():
    o = spectral_factor(LaurentScalar([1, 2, 1], -1))
    assert o.allclose(LaurentScalar([1, 1]), atol=1e-7)


def test_spectral_factor_half():
    o = spectral_factor(LaurentScalar([0.5, 1.25, 0.5], -1))
    assert o.allclose(LaurentScalar([1, 0.5]), atol=1e-12)


def test_spectral_factor_rejects_negative_density():
    with pytest.raises(NotPositive):
        spectral_factor(LaurentScalar([1, 0.5, 1], -1))  # 0.5 + 2cos(t) changes sign


def test_spectral_factor_rejects_asymmetric_density():
    with pytest.raises(Asymmetric):
        spectral_factor(LaurentScalar([1, 3, 0], -1) + LaurentScalar([0.5], 1))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_spectral_factor_is_idempotent_on_outer_polynomials(seed):
    rng = np.random.default_rng(seed)
    deg = int(rng.integers(1, 6))
    r = rng.uniform(1.1, 4, deg) * np.exp(2j * np.pi * rng.uniform(size=deg))
    o = LaurentScalar(np.polynomial.polynomial.polyfromroots(r))
    o = o * (1 / o.coefficient(0)) * rng.uniform(0.5, 2)
    back = spectral_factor(o * o.conj())
    assert back.allclose(o, atol=1e-8)
    N = 256
    assert np.max(np.abs(np.abs(back.values(N)) ** 2 - np.abs(o.values(N)) ** 2)) <= 1e-9


def test_inner_outer_monomial():
    inner, outer = inner_outer(Z * Z)
    assert inner.allclose(Z * Z) and outer.allclose(RationalScalar.constant(1))


def test_inner_outer_single_blaschke_factor():
    inner, outer = inner_outer(RationalScalar(LaurentScalar([-0.5, 1])))
    assert inner.allclose(RationalScalar(LaurentScalar([-0.5, 1]), LaurentScalar([1, -0.5])))
    assert outer.allclose(RationalScalar(LaurentScalar([1, -0.5])))


def test_inner_outer_constant_tie_break():
    inner, outer = inner_outer(RationalScalar.constant(-2j))
    assert inner.allclose(RationalScalar.constant(-1j))
    assert outer.allclose(RationalScalar.constant(2))


def test_inner_outer_refuses_boundary_root():
    with pytest.raises(BoundaryRoot):
        inner_outer(RationalScalar(LaurentScalar([-1, 1])))


def test_inner_outer_of_zero_raises():
    with pytest.raises(DegenerateInput):
        inner_outer(RationalScalar.constant(0))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inner_outer_properties(seed):
    rng = np.random.default_rng(seed)
    rs = rng.uniform(0.1, 3, 4) * np.exp(2j * np.pi * rng.uniform(size=4))
    rs = rs[np.abs(np.abs(rs) - 1) > 0.05]
    if rs.size == 0:
        return
    f = RationalScalar(LaurentScalar(np.polynomial.polynomial.polyfromroots(rs)), None, int(rng.integers(0, 3)))
    inner, outer = inner_outer(f)
    N = 512
    assert np.max(np.abs(np.abs(inner.values(N)) - 1)) <= 1e-9
    assert np.max(np.abs((inner * outer).values(N) - f.values(N))) <= 1e-9 * np.max(np.abs(f.values(N)))
    if not outer.num.is_zero and len(outer.num.array) > 1:
        assert np.min(np.abs(roots(outer.num))) >= 1 - 1e-10


def test_winding_examples():
    assert winding(Z) == 1
    assert winding(ZBAR * ZBAR) == -2
    assert winding(RationalScalar(LaurentScalar([-0.5, 1]), LaurentScalar([1, -0.5]))) == 1


def test_winding_rejects_zero_on_circle():
    with pytest.raises(NearZeroOnCircle):
        winding(RationalScalar(LaurentScalar([-1, 1])))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_winding_is_additive(seed):
    rng = np.random.default_rng(seed)

    def rand():
        rs = rng.uniform(0.2, 2.5, 3) * np.exp(2j * np.pi * rng.uniform(size=3))
        rs = rs[np.abs(np.abs(rs) - 1) > 0.05]
        ps = rng.uniform(1.2, 3, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
        return RationalScalar(LaurentScalar(np.polynomial.polynomial.polyfromroots(rs) if rs.size else [1.0]),
                              LaurentScalar(np.polynomial.polynomial.polyfromroots(ps)), int(rng.integers(-2, 3)))

    f, g = rand(), rand()
    assert winding(f * g) == winding(f) + winding(g)


def test_fourier_coefficient_of_unimodular_example_matches_long_division():
    u = RationalScalar(LaurentScalar([1, 2]), LaurentScalar([2, 1]), -1)
    taylor = series_divide([1, 2], [2, 1])
    for j in range(-1, 10):
        assert abs(u.coefficient(j) - taylor[j + 1]) <= 1e-12
    assert abs(u.coefficient(-1) - 0.5) <= 1e-12


def test_unimodular_example_times_conjugate_cancels_to_one():
    u = RationalScalar(LaurentScalar([1, 2]), LaurentScalar([2, 1]), -1)
    prod = (u.conj() * u).cancel()
    assert prod.has_trivial_den and prod.allclose(RationalScalar.constant(1))


def test_conjugate_matches_pointwise_conjugation():
    f = RationalScalar(LaurentScalar([1, 2j, -0.5]), LaurentScalar([1, 0.3 - 0.1j]), -2)
    zeta = grid(64)
    assert np.allclose(f.conj()(zeta), np.conj(f(zeta)), atol=1e-13)


def test_grid_values_match_direct_evaluation():
    f = LaurentScalar([1, -2, 0.5j, 3], -2)
    assert np.allclose(f.values(16), f(grid(16)), atol=1e-12)


def test_coefficient_drop_tolerance_trims_support():
    f = LaurentScalar([1e-20, 1.0, 2.0, 1e-18])
    assert (f.degLo, f.degHi) == (1, 2)


def test_cancel_removes_common_factor_only():
    num = LaurentScalar(np.polynomial.polynomial.polyfromroots([0.5, 3]))
    den = LaurentScalar(np.polynomial.polynomial.polyfromroots([0.5, -2]))
    f = RationalScalar(num, den).cancel()
    assert len(f.num.array) == 2 and len(f.den.array) == 2
    assert f.allclose(RationalScalar(num, den))


def test_blaschke_product_is_unimodular():
    b = blaschke_product([0.3, -0.5j, 0.9])
    assert np.max(np.abs(np.abs(b.values(256)) - 1)) <= 1e-12
    assert winding(b) == 3


def test_disk_zero_free_flag():
    assert RationalScalar(LaurentScalar([1]), LaurentScalar([1, 0.5])).disk_zero_free()
    assert not RationalScalar(LaurentScalar([1]), LaurentScalar([1, -2])).disk_zero_free()
