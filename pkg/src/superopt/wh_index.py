"""Certification of Wiener-Hopf indices through Toeplitz kernel-dimension sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotUnitary, SuperoptError, Unstable
from .hankel import toeplitz_kernel_dim
from .matfun import MatSymbol, fourier_match_residual, unitarity_residual, analyticity_residual
from .ring import winding

UNITARY_PRECONDITION = 1e-6
DEG_CAP = 200


@dataclass
class IndexProfile:
    """Sorted Wiener-Hopf indices with the kernel sweep that certifies them."""

    d: list
    kernelSweep: dict
    detWinding: int
    shiftM: int

    @property
    def negative(self):
        return [x for x in self.d if x < 0]

    @property
    def nonnegative(self):
        return [x for x in self.d if x >= 0]

    def predicted(self, kappa):
        return sum(max(self.shiftM - x - kappa, 0) for x in self.d)


def _support_width(f):
    if f.is_zero:
        return 0
    return f.degree + 1


def wh_indices(U, *, relaxed=False, degCap=DEG_CAP):
    """Wiener-Hopf indices of a pointwise invertible rational matrix symbol.

    ``g(kappa) = dim Ker T(z^(kappa - M) U)`` equals ``sum_j max(M - d_j - kappa, 0)``
    once every index of ``z^-M U`` is negative, so the multiset ``{M - d_j}``
    is read off from second differences of ``g``.  Unless ``relaxed`` is set,
    ``U`` must be unitary-valued.
    """
    U = U if isinstance(U, MatSymbol) else MatSymbol([[U]])
    n = U.n
    if not relaxed:
        res = unitarity_residual(U)
        if res > UNITARY_PRECONDITION:
            raise NotUnitary(f"unitarity residual {res:.3g}")
    det = U.det()
    dw = winding(det)
    # the support width of det bounds the indices for polynomial symbols; for
    # rational ones it is far too generous, so start small and enlarge
    M = max(dw, 0) + (_support_width(det) if det.has_trivial_den else 0) + 2
    while True:
        g = {0: toeplitz_kernel_dim(U.shifted(-M), degCap), 1: toeplitz_kernel_dim(U.shifted(1 - M), degCap)}
        if g[0] - g[1] == n:
            break
        M += max(2, M)
        if M > degCap:
            raise Unstable("could not shift every index below zero within the degree cap")
    kappa = 1
    while g[kappa] > 0:
        kappa += 1
        g[kappa] = toeplitz_kernel_dim(U.shifted(kappa - M), degCap)
    a = []
    for m in range(1, kappa + 1):
        drop_before = g[m - 1] - g[m]
        drop_after = g[m] - g.get(m + 1, 0)
        a.extend([m] * (drop_before - drop_after))
    if len(a) != n:
        raise Unstable(f"kernel sweep {g} is not consistent with {n} indices")
    d = sorted(M - x for x in a)
    prof = IndexProfile(d, g, dw, M)
    if sum(d) != dw:
        raise Unstable(f"indices {d} do not sum to the determinant winding {dw}")
    if any(prof.predicted(k) != v for k, v in g.items()):
        raise Unstable("kernel sweep disagrees with the recovered indices")
    return prof


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: object
    expected: object = None
    note: str = ""


@dataclass
class Certificate:
    checks: list = field(default_factory=list)
    profile: IndexProfile | None = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self):
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "measured": _jsonable(c.measured),
                        "expected": _jsonable(c.expected), "note": c.note} for c in self.checks],
            "profile": None if self.profile is None else {
                "indices": self.profile.d,
                "det_winding": self.profile.detWinding,
                "shift": self.profile.shiftM,
                "kernel_sweep": {str(k): v for k, v in self.profile.kernelSweep.items()},
            },
        }


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


@dataclass(frozen=True)
class VerifyTolerances:
    unitarity: float = 1e-8
    fourier: float = 1e-8
    analyticity: float = 1e-7


def verify_interpolant(Phi, result, report=None, *, tol=VerifyTolerances(), N=None, requested=None):
    """Check an interpolant against ``Phi``: residuals, index profile and kernel counts.

    ``result`` may be an ``InterpolantResult`` or a bare ``MatSymbol``.  When a
    factorization ``report`` is available the negative indices must equal
    minus the thematic indices of the superoptimal values equal to one, and
    ``dim Ker T(z^kappa U) = sum_{k_j > kappa} (k_j - kappa)`` is checked.
    """
    U = result.U if hasattr(result, "U") else result
    if requested is None:
        requested = getattr(result, "requestedIndices", None)
    cert = Certificate()
    add = cert.checks.append
    if U.n != Phi.n:
        add(Check("size", False, U.n, Phi.n, "sizes differ"))
        return cert
    unit = unitarity_residual(U, N)
    add(Check("unitarity", unit <= tol.unitarity, unit, tol.unitarity))
    fm, grid = fourier_match_residual(U, Phi, N, with_grid=True)
    note = ""
    if fm > tol.fourier:
        c = (U - Phi).fourier(grid)[grid // 2 + 1:]
        worst = int(np.argmax(np.max(np.abs(c), axis=(1, 2))))
        note = f"largest mismatch at j = {worst - (grid // 2 - 1)}"
    add(Check("fourier_match", fm <= tol.fourier, fm, tol.fourier, note))
    an = analyticity_residual(U - Phi, N)
    add(Check("analyticity", an <= tol.analyticity, an, tol.analyticity))
    try:
        prof = wh_indices(U, relaxed=True)
    except SuperoptError as exc:
        add(Check("index_profile", False, None, None, f"{type(exc).__name__}: {exc}"))
        return cert
    cert.profile = prof
    if hasattr(result, "certifiedProfile"):
        result.certifiedProfile = prof
    add(Check("index_sum", sum(prof.d) == prof.detWinding, sum(prof.d), prof.detWinding))
    if requested is not None:
        add(Check("nonnegative_indices", prof.nonnegative == sorted(requested),
                  prof.nonnegative, sorted(requested)))
    if report is None:
        report = getattr(result, "report", None)
    if report is not None:
        r = report.unit_count()
        ks = [k for t, k in zip(report.t, report.k) if abs(t - 1.0) <= report.tieTolerance]
        forced = sorted(-k for k in ks)
        add(Check("negative_indices", prof.negative == forced, prof.negative, forced,
                  f"{r} superoptimal values equal one"))
        for kappa in range(0, max(ks, default=0) + 1):
            want = sum(k - kappa for k in ks if k > kappa)
            try:
                got = toeplitz_kernel_dim(U.shifted(kappa))
            except SuperoptError as exc:
                add(Check(f"kernel_count[{kappa}]", False, None, want, str(exc)))
                continue
            add(Check(f"kernel_count[{kappa}]", got == want, got, want))
    return cert
