"""JSON symbol files: read and write matrix symbols with bit-exact coefficients.

Layout::

    {"n": 2,
     "entries": [[{"num": {"-1": [1.0, 0.0]}}, {}],
                 [{}, {"num": {"0": [1.0, 0.0]}, "den": {"0": [1.0, 0.0], "1": [0.5, 0.0]}}]],
     "meta": {"grid": 4096, "tol_construct": 1e-9, "tol_verify": 1e-8}}

An entry may also be a bare numerator map.  Floats are written with Python's
shortest round-trip representation, so reading a written file reproduces every
coefficient exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DiskZeroDenominator, SymbolFileError
from .matfun import MatSymbol
from .ring import DEN_CIRCLE_TOL, LaurentScalar, RationalScalar

POLE_POLICIES = ("disk_free", "off_circle")


@dataclass
class SymbolFile:
    symbol: MatSymbol
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.symbol.n


def _parse_coeff_map(obj, where):
    if not isinstance(obj, dict):
        raise SymbolFileError(f"{where}: expected an object mapping degree to [re, im]")
    out = {}
    for key, val in obj.items():
        try:
            deg = int(key)
        except (TypeError, ValueError):
            raise SymbolFileError(f"{where}: degree key {key!r} is not an integer") from None
        if (not isinstance(val, (list, tuple)) or len(val) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val)):
            raise SymbolFileError(f"{where}[{key!r}]: expected a pair [re, im] of numbers")
        c = complex(float(val[0]), float(val[1]))
        try:
            ok = np.isfinite(abs(c))
        except OverflowError:
            ok = False
        if not ok:
            raise SymbolFileError(f"{where}[{key!r}]: coefficient is not finite or its modulus overflows")
        out[deg] = c
    return out


def _parse_entry(obj, where, policy):
    if isinstance(obj, dict) and ("num" in obj or "den" in obj):
        extra = set(obj) - {"num", "den"}
        if extra:
            raise SymbolFileError(f"{where}: unknown keys {sorted(extra)}")
        num = _parse_coeff_map(obj.get("num", {}), f"{where}.num")
        den = _parse_coeff_map(obj["den"], f"{where}.den") if "den" in obj else None
    else:
        num = _parse_coeff_map(obj, where)
        den = None
    if den is not None:
        if not den or all(v == 0 for v in den.values()):
            raise SymbolFileError(f"{where}.den: zero denominator")
        if min(den) < 0:
            raise SymbolFileError(f"{where}.den: denominator degrees must be nonnegative")
        if den.get(0, 0) == 0:
            raise DiskZeroDenominator(f"{where}.den: denominator vanishes at z = 0")
    f = RationalScalar(LaurentScalar.from_dict(num), LaurentScalar.from_dict(den) if den else None)
    if not f.has_trivial_den:
        poles = f.poles()
        if policy == "disk_free" and not f.disk_zero_free():
            raise DiskZeroDenominator(f"{where}.den: root at {poles[np.argmin(np.abs(poles))]:.6g} "
                                      f"in the closed unit disk")
        if np.min(np.abs(np.abs(poles) - 1)) <= DEN_CIRCLE_TOL:
            raise DiskZeroDenominator(f"{where}.den: root on the unit circle")
    return f


def parse_symbol(data, where="symbol"):
    if not isinstance(data, dict):
        raise SymbolFileError(f"{where}: top level must be an object")
    meta = data.get("meta", {}) or {}
    if not isinstance(meta, dict):
        raise SymbolFileError(f"{where}.meta: expected an object")
    policy = meta.get("pole_policy", "disk_free")
    if policy not in POLE_POLICIES:
        raise SymbolFileError(f"{where}.meta.pole_policy: expected one of {POLE_POLICIES}")
    entries = data.get("entries")
    if not isinstance(entries, list) or not entries:
        raise SymbolFileError(f"{where}.entries: expected a nonempty list of rows")
    n = data.get("n", len(entries))
    if not isinstance(n, int) or n != len(entries):
        raise SymbolFileError(f"{where}.n: declared size {n!r} does not match {len(entries)} rows")
    rows = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != n:
            raise SymbolFileError(f"{where}.entries[{i}]: expected a row of {n} entries")
        rows.append([_parse_entry(e, f"{where}.entries[{i}][{j}]", policy) for j, e in enumerate(row)])
    return SymbolFile(MatSymbol(rows), dict(meta))


def read_symbol(path):
    """Parse a symbol file; errors name the file and the offending entry."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SymbolFileError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SymbolFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_symbol(data, str(path))


def _coeff_map(lo, arr):
    return {str(lo + i): [float(c.real), float(c.imag)] for i, c in enumerate(arr) if c != 0}


def entry_to_json(f):
    if f.is_zero:
        return {"num": {}}
    out = {"num": _coeff_map(f.shift, f.num.array)}
    if not f.has_trivial_den:
        out["den"] = _coeff_map(0, f.den.array)
    return out


def symbol_to_json(Phi, meta=None):
    meta = dict(meta or {})
    if any(not e.has_trivial_den and not e.disk_zero_free() for row in Phi.entries for e in row):
        meta.setdefault("pole_policy", "off_circle")
    return {"n": Phi.n,
            "entries": [[entry_to_json(e) for e in row] for row in Phi.entries],
            "meta": meta}


def write_symbol(Phi, path, meta=None):
    Path(path).write_text(json.dumps(symbol_to_json(Phi, meta), indent=1) + "\n", encoding="utf-8")
