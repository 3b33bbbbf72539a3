"""Acceptance gate: nine criteria at their stated tolerances.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion in the terminal summary.
"""
import functools
import json
import time

import numpy as np
import pytest

from superopt import (
    Z,
    ZBAR,
    LaurentScalar,
    MatSymbol,
    RationalScalar,
    fourier_coeff,
    hankel_norm,
    schmidt,
    scalar_interpolant,
    superoptimal,
    toeplitz_kernel_dim,
    unitary_interpolant,
    verify_interpolant,
    wh_indices,
    winding,
)
from superopt.cli import main
from superopt.errors import NormTooLarge, WrongTailLength
from superopt.hankel import HankelSection
from superopt.matfun import fourier_match_residual, unitarity_residual
from superopt.nehari import best_approx_scalar

from oracles import planted_product, random_matrix_symbol, random_rational, series_divide, sigma_max_2x2

PHI = MatSymbol.diag([ZBAR, ZBAR * 0.5])
U0_EXPECTED = RationalScalar(LaurentScalar([1, 2]), LaurentScalar([2, 1]), -1)


def _detail(request, text):
    request.node.criterion_detail = text
    print(text)


@functools.lru_cache(maxsize=None)
def _realization(d1):
    t0 = time.perf_counter()
    res = unitary_interpolant(PHI, [d1])
    cert = verify_interpolant(PHI, res)
    return res, cert, time.perf_counter() - t0


@pytest.mark.criterion(1, "worked scalar chain")
def test_criterion_1_worked_scalar_chain(request):
    t0 = time.perf_counter()
    rec = scalar_interpolant(ZBAR * 0.5, 0)
    elapsed = time.perf_counter() - t0
    c_oracle = 0.75
    assert abs(sigma_max_2x2(c_oracle) - 1) <= 1e-15
    assert abs(rec.c - c_oracle) <= 1e-9
    defect = float(np.max(np.abs(np.abs(rec.u0.values(4096)) - 1)))
    assert defect <= 1e-8
    coeff = rec.u0.coefficient(-1)
    assert abs(coeff - series_divide([1, 2], [2, 1])[0]) <= 1e-9 and abs(coeff - 0.5) <= 1e-9
    assert rec.u0.allclose(U0_EXPECTED)
    assert winding(rec.u0) == 0
    assert elapsed < 1.0
    _detail(request, f"c = {rec.c:.15g}, unimodular defect {defect:.1e}, coefficient {coeff.real:.15g}, "
                     f"{elapsed:.2f} s")


@pytest.mark.criterion(2, "prescribed nonnegative index realized")
def test_criterion_2_prescribed_index(request):
    parts = []
    for d1 in (0, 1, 2):
        res, cert, elapsed = _realization(d1)
        ur = unitarity_residual(res.U)
        fm = fourier_match_residual(res.U, PHI)
        assert ur <= 1e-8 and fm <= 1e-8
        assert cert.profile.d == [-1, d1]
        assert elapsed < 5.0
        parts.append(f"d1={d1}: unitarity {ur:.1e}, fourier {fm:.1e}, profile {cert.profile.d}, {elapsed:.2f} s")
    _detail(request, "; ".join(parts))


@pytest.mark.criterion(3, "negative indices forced by thematic indices")
def test_criterion_3_forced_negative_index(request):
    rep = superoptimal(PHI)
    k0 = rep.k[0]
    assert rep.unit_count() == 1 and k0 == 1
    for d1 in (0, 1, 2):
        res, cert, _ = _realization(d1)
        assert cert.profile.negative == [-k0]
        for kappa in (0, 1):
            want = sum(k - kappa for k in rep.k[:1] if k > kappa)
            assert toeplitz_kernel_dim(res.U.shifted(kappa)) == want
    _detail(request, f"k0 = {k0}; negative index -1 and kernel counts (1, 0) at kappa = 0, 1 for d1 = 0, 1, 2")


@pytest.mark.criterion(4, "unique interpolant when every value equals one")
def test_criterion_4_uniqueness(request, tmp_path, capsys):
    Phi = MatSymbol.diag([ZBAR, ZBAR])
    res = unitary_interpolant(Phi, [])
    gap = float(np.max(np.abs((res.U - Phi).fourier(4096))))
    assert res.unique and gap <= 1e-10
    with pytest.raises(WrongTailLength):
        unitary_interpolant(Phi, [0])
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"n": 2, "entries": [[{"-1": [1.0, 0.0]}, {}], [{}, {"-1": [1.0, 0.0]}]]}))
    code = main(["interpolate", str(path), "--indices", "0"])
    err = capsys.readouterr().err
    assert code == 4 and "WrongTailLength" in err
    _detail(request, f"coefficient gap {gap:.1e}; --indices 0 exits {code} with WrongTailLength")


@pytest.mark.criterion(5, "no interpolant above norm one")
def test_criterion_5_infeasible(request, tmp_path, capsys):
    with pytest.raises(NormTooLarge) as info:
        unitary_interpolant(MatSymbol([[ZBAR * 2]]), [])
    assert abs(info.value.norm - 2) <= 1e-10
    path = tmp_path / "two.json"
    path.write_text(json.dumps({"n": 1, "entries": [[{"-1": [2.0, 0.0]}]]}))
    code = main(["interpolate", str(path)])
    err = capsys.readouterr().err
    assert code == 2 and "NormTooLarge" in err
    _detail(request, f"measured norm {info.value.norm:.15g}; CLI exit code {code}")


@pytest.mark.criterion(6, "planted index oracle (50 products)")
def test_criterion_6_planted_products(request):
    rng = np.random.default_rng(20260)
    t0 = time.perf_counter()
    misses = []
    largest = 0
    for trial in range(50):
        d = sorted(int(x) for x in rng.integers(-3, 4, size=2))
        U = planted_product(rng, d, degree=3)
        prof = wh_indices(U, relaxed=True, degCap=200)
        largest = max(largest, prof.shiftM)
        if prof.d != d:
            misses.append((trial, d, prof.d))
    elapsed = time.perf_counter() - t0
    # every kernel solve ran with degCap = 200 and raises Unstable above it
    assert not misses, misses
    assert elapsed < 60.0
    _detail(request, f"50/50 profiles match under degCap 200; largest shift M = {largest}; {elapsed:.1f} s")


@pytest.mark.criterion(7, "modulus identity and division property")
def test_criterion_7_modulus_identity(request):
    rng = np.random.default_rng(4505)
    worst = 0.0
    for trial in range(20):
        n = 1 + trial % 2
        Phi = random_matrix_symbol(rng, n, max_depth=4)
        pair = schmidt(Phi)
        rel = pair.modulus_defect() / pair.sigma
        worst = max(worst, rel)
        assert rel <= 1e-6
    M = HankelSection.from_symbol(MatSymbol([[ZBAR * ZBAR]])).matrix
    for tau in np.exp(2j * np.pi * (np.arange(8) / 8 + 0.1)):
        v = np.array([-tau, 1.0])
        assert abs(np.linalg.norm(M @ v) - np.linalg.norm(v)) <= 1e-15
        q, r = np.polynomial.polynomial.polydiv(v, np.array([1.0, -np.conj(tau)]))
        assert q.shape == (1,) and abs(q[0] + tau) <= 1e-15 and np.max(np.abs(r)) <= 1e-15
        u = np.array([q[0], 0.0])
        assert abs(np.linalg.norm(M @ u) - np.linalg.norm(u)) <= 1e-15
    _detail(request, f"worst relative modulus defect {worst:.1e} over 20 symbols; 8/8 quotients equal -tau")


@pytest.mark.criterion(8, "shift equivariance and adjoint mirror")
def test_criterion_8_shift_and_adjoint(request):
    symbols = [_realization(d1)[0].U for d1 in (0, 1, 2)] + [MatSymbol.diag([Z * Z, ZBAR])]
    for U in symbols:
        base = wh_indices(U).d
        for m in range(-2, 3):
            assert wh_indices(U.shifted(m)).d == [x + m for x in base]
        assert wh_indices(U.adjoint()).d == sorted(-x for x in base)
    _detail(request, "4 symbols, shifts m = -2..2 and adjoints")


@pytest.mark.criterion(9, "scalar best-approximation cross-check")
def test_criterion_9_aak(request):
    rng = np.random.default_rng(1101)
    worst_dist, worst_mod = 0.0, 0.0
    for _ in range(20):
        phi = random_rational(rng)
        r = best_approx_scalar(phi)
        nrm = hankel_norm(MatSymbol([[phi]]))
        dist = float(np.max(np.abs((phi - r.g).values(4096))))
        mod = float(np.max(np.abs(np.abs(r.e.values(4096)) - r.sigma)))
        worst_dist, worst_mod = max(worst_dist, abs(dist - nrm)), max(worst_mod, mod)
        assert abs(dist - nrm) <= 1e-7
        assert mod <= 1e-8
        assert abs(fourier_coeff(MatSymbol([[r.g]]), -1)[0, 0]) <= 1e-9
    _detail(request, f"sup|phi - g| vs norm {worst_dist:.1e}; modulus defect {worst_mod:.1e}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
