"""Vectorial Boolean functions F_2^n -> F_2^m as lookup tables.

Provides the spectral toolbox: algebraic normal form and degree, Walsh
transform and linearity, difference distribution table, APN tests (direct
and via the fourth-moment identity), linearized derivatives of quadratic
maps, and EA-transform helpers for randomized invariance testing.

Tables are numpy uint16 arrays indexed by the input word; all transforms
use exact integer arithmetic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from . import gf2
from .gf2 import MAX_WIDTH, FieldSpec, GF2Matrix

# bit-parity and popcount lookup for 16-bit words
_V = np.arange(1 << 16, dtype=np.uint32)
_POP16 = np.zeros(1 << 16, dtype=np.uint8)
_POP16 |= (_V & 1).astype(np.uint8)
for _s in range(1, 16):
    _POP16 += ((_V >> _s) & 1).astype(np.uint8)
_PAR16 = (_POP16 & 1).astype(np.uint8)
del _V, _s

# dense DDT index cache is only kept for small widths
_XOR_INDEX_MAX = 9
# batched full-table transforms beyond this many cells fall back to row streaming
_BATCH_CELL_LIMIT = 1 << 24


@lru_cache(maxsize=None)
def _xor_index(n: int) -> np.ndarray:
    i = np.arange(1 << n, dtype=np.uint32)
    return i[:, None] ^ i[None, :]


class VBF:
    """A function F_2^n -> F_2^m given by its value table."""

    def __init__(self, n: int, m: int, table):
        if not 1 <= n <= MAX_WIDTH or not 1 <= m <= MAX_WIDTH:
            raise ValueError(f"dimensions must be in [1, {MAX_WIDTH}]")
        tab = np.asarray(table, dtype=np.uint16)
        if tab.shape != (1 << n,):
            raise ValueError(f"table must have 2^{n} entries, got {tab.shape}")
        if m < 16 and tab.max(initial=0) >> m:
            raise ValueError(f"table entry exceeds {m} output bits")
        tab = tab.copy()
        tab.setflags(write=False)
        self.n = n
        self.m = m
        self.table = tab
        self._degree: Optional[int] = None
        self._hash: Optional[int] = None

    @classmethod
    def identity(cls, n: int) -> "VBF":
        return cls(n, n, np.arange(1 << n, dtype=np.uint16))

    @classmethod
    def constant(cls, n: int, m: int, value: int = 0) -> "VBF":
        return cls(n, m, np.full(1 << n, value, dtype=np.uint16))

    @classmethod
    def from_univariate(cls, spec: FieldSpec,
                        terms: Sequence[tuple[int, int]]) -> "VBF":
        """Table of x -> sum c_i * x^(e_i) over F_{2^n}."""
        n = spec.n
        size = 1 << n
        for coeff, exp in terms:
            if not 0 <= exp < size:
                raise ValueError(f"exponent {exp} outside [0, {size - 1}]")
            if not 0 <= coeff < size:
                raise ValueError(f"coefficient {coeff:#x} is not an {n}-bit word")
        tab = np.zeros(size, dtype=np.uint16)
        for x in range(size):
            acc = 0
            for coeff, exp in terms:
                acc ^= gf2.field_mul(spec, coeff, gf2.field_pow(spec, x, exp))
            tab[x] = acc
        return cls(n, n, tab)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __len__(self) -> int:
        return 1 << self.n

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, VBF) and self.n == other.n
                and self.m == other.m
                and np.array_equal(self.table, other.table))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.m, self.table.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"VBF(n={self.n}, m={self.m}, table[:4]={self.table[:4].tolist()}...)"

    @property
    def degree(self) -> int:
        if self._degree is None:
            self._degree = int(_degree_of_tables(self.table[None, :], self.n)[0])
        return self._degree


# ---------------------------------------------------------------------------
# ANF / degree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ANF:
    """Packed algebraic normal form: word ``coeffs[u]`` holds, in bit i, the
    coefficient of monomial ``u`` in output coordinate i."""

    n: int
    m: int
    coeffs: tuple[int, ...]

    def coefficient(self, u: int, coord: int) -> int:
        return (self.coeffs[u] >> coord) & 1

    def monomials(self, coord: int) -> list[int]:
        return [u for u, c in enumerate(self.coeffs) if (c >> coord) & 1]

    def to_vbf(self) -> VBF:
        arr = np.array(self.coeffs, dtype=np.uint16)
        return VBF(self.n, self.m, _mobius(arr))


def _mobius(arr: np.ndarray) -> np.ndarray:
    """In-place XOR butterflies (self-inverse Moebius transform)."""
    out = arr.astype(np.uint16).copy()
    h = 1
    size = out.shape[-1]
    while h < size:
        view = out.reshape(out.shape[:-1] + (-1, 2, h))
        view[..., 1, :] ^= view[..., 0, :]
        h *= 2
    return out


def _degree_of_tables(tabs: np.ndarray, n: int) -> np.ndarray:
    anf = _mobius(tabs)
    weights = _POP16[: 1 << n].astype(np.int16)
    return np.where(anf != 0, weights[None, :], -1).max(axis=1).clip(min=0)


def anf_and_degree(f: VBF) -> tuple[ANF, int]:
    coeffs = _mobius(f.table)
    weights = _POP16[: 1 << f.n]
    nz = np.nonzero(coeffs)[0]
    deg = int(weights[nz].max()) if nz.size else 0
    return ANF(f.n, f.m, tuple(int(c) for c in coeffs)), deg


def algebraic_degree(f: VBF) -> int:
    return f.degree


def vbf_from_anf(n: int, m: int, coeffs: Sequence[int]) -> VBF:
    return ANF(n, m, tuple(coeffs)).to_vbf()


# ---------------------------------------------------------------------------
# Walsh transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WalshTable:
    """Signed Walsh coefficients, rows indexed by the output mask beta.

    ``values[beta, alpha]`` for beta in [0, 2^m); the beta = 0 row is the
    trivial one and is excluded from linearity and spectra.
    """

    n: int
    m: int
    values: np.ndarray

    def value(self, beta: int, alpha: int) -> int:
        if beta == 0:
            raise ValueError("beta must be nonzero")
        return int(self.values[beta, alpha])

    def row(self, beta: int) -> np.ndarray:
        if beta == 0:
            raise ValueError("beta must be nonzero")
        return self.values[beta]


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis, in place."""
    size = a.shape[-1]
    h = 1
    while h < size:
        view = a.reshape(a.shape[:-1] + (-1, 2, h))
        top = view[..., 0, :].copy()
        view[..., 0, :] += view[..., 1, :]
        view[..., 1, :] = top - view[..., 1, :]
        h *= 2
    return a


def _walsh_matrix(tab: np.ndarray, n: int, m: int) -> np.ndarray:
    """All 2^m Walsh rows of one table, as an int32 matrix."""
    betas = np.arange(1 << m, dtype=np.uint16)
    par = _PAR16[betas[:, None] & tab[None, :]]
    signs = 1 - 2 * par.astype(np.int32)
    return _fwht(signs)

def walsh_rows(f: VBF) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (beta, signed Walsh row) for every nonzero beta, one 2^n buffer
    at a time; use when the full table would not fit in memory."""
    for beta in range(1, 1 << f.m):
        par = _PAR16[np.uint16(beta) & f.table]
        signs = 1 - 2 * par.astype(np.int32)
        yield beta, _fwht(signs)


def walsh(f: VBF) -> WalshTable:
    if (1 << (f.n + f.m)) > _BATCH_CELL_LIMIT:
        raise ValueError(
            "materialized Walsh table too large; iterate walsh_rows instead")
    return WalshTable(f.n, f.m, _walsh_matrix(f.table, f.n, f.m))


def linearity(f: VBF) -> int:
    if (1 << (f.n + f.m)) <= _BATCH_CELL_LIMIT:
        return int(np.abs(_walsh_matrix(f.table, f.n, f.m)[1:]).max())
    best = 0
    for _, row in walsh_rows(f):
        best = max(best, int(np.abs(row).max()))
    return best


def extended_walsh_spectrum(f: VBF) -> tuple[tuple[int, int], ...]:
    """Multiset of absolute Walsh values over all (alpha, beta != 0)."""
    if (1 << (f.n + f.m)) <= _BATCH_CELL_LIMIT:
        a = np.abs(_walsh_matrix(f.table, f.n, f.m)[1:])
        counts = np.bincount(a.ravel())
    else:
        counts = np.zeros((1 << f.n) + 1, dtype=np.int64)
        for _, row in walsh_rows(f):
            counts += np.bincount(np.abs(row), minlength=counts.size)
    return tuple((int(v), int(c)) for v, c in enumerate(counts) if c)


def fourth_moment(f: VBF) -> int:
    """Sum of fourth powers of all Walsh coefficients with beta != 0."""
    if f.n != f.m:
        raise ValueError("fourth moment test requires n = m")
    if (1 << (f.n + f.m)) <= _BATCH_CELL_LIMIT:
        w = _walsh_matrix(f.table, f.n, f.m)[1:].astype(np.int64)
        return int((w ** 4).sum())
    total = 0
    for _, row in walsh_rows(f):
        total += int((row.astype(np.int64) ** 4).sum())
    return total


def apn_by_moments(f: VBF) -> bool:
    n = f.n
    return fourth_moment(f) == (1 << (4 * n + 1)) - (1 << (3 * n + 1))


# ---------------------------------------------------------------------------
# DDT / differential spectrum / APN
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DDTable:
    """Difference distribution counts[a, b] = #{x : F(x) + F(x+a) = b}."""

    n: int
    m: int
    counts: np.ndarray

    def row(self, a: int) -> np.ndarray:
        return self.counts[a]


def ddt_rows(f: VBF) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (a, counts row) for a = 0 .. 2^n - 1 without storing the table."""
    xs = np.arange(1 << f.n, dtype=np.uint32)
    tab = f.table
    for a in range(1 << f.n):
        d = tab ^ tab[xs ^ a]
        yield a, np.bincount(d, minlength=1 << f.m)


def ddt(f: VBF) -> DDTable:
    if f.n > 12:
        raise ValueError("dense DDT capped at n = 12; iterate ddt_rows instead")
    rows = np.empty((1 << f.n, 1 << f.m), dtype=np.int64)
    for a, row in ddt_rows(f):
        rows[a] = row
    return DDTable(f.n, f.m, rows)


def _diff_counts_batch(tabs: np.ndarray, n: int, m: int) -> np.ndarray:
    """Per-table histogram of DDT entries over rows a != 0.

    ``tabs`` has shape (B, 2^n); the result has shape (B, 2^n + 1) with
    entry [b, v] counting DDT cells of table b equal to v.
    """
    B, size = tabs.shape
    d = tabs[:, _xor_index(n)] ^ tabs[:, None, :]
    d = d[:, 1:, :]
    cells = ((1 << n) - 1) << m
    keys = (np.arange(B, dtype=np.int64)[:, None, None] * cells
            + (np.arange(0, (1 << n) - 1, dtype=np.int64)[None, :, None] << m)
            + d)
    counts = np.bincount(keys.ravel(), minlength=B * cells).reshape(B, cells)
    spec_keys = (np.arange(B, dtype=np.int64)[:, None] * (size + 1) + counts)
    spectra = np.bincount(spec_keys.ravel(), minlength=B * (size + 1))
    return spectra.reshape(B, size + 1)


def differential_spectrum(f: VBF) -> tuple[tuple[int, int], ...]:
    """Multiset of DDT entry values over all rows with a != 0."""
    if f.n <= _XOR_INDEX_MAX:
        hist = _diff_counts_batch(f.table[None, :], f.n, f.m)[0]
    else:
        hist = np.zeros((1 << f.n) + 1, dtype=np.int64)
        for a, row in ddt_rows(f):
            if a:
                hist += np.bincount(row, minlength=hist.size)
    return tuple((int(v), int(c)) for v, c in enumerate(hist) if c)


def differential_uniformity(f: VBF) -> int:
    spec = differential_spectrum(f)
    return max(v for v, _ in spec)


def is_apn(f: VBF) -> bool:
    if f.n != f.m:
        raise ValueError("APN is defined for n = m only")
    if f.n <= _XOR_INDEX_MAX:
        return differential_uniformity(f) <= 2
    xs = np.arange(1 << f.n, dtype=np.uint32)
    tab = f.table
    for a in range(1, 1 << f.n):
        row = np.bincount(tab ^ tab[xs ^ a], minlength=1 << f.m)
        if row.max() > 2:
            return False
    return True


# ---------------------------------------------------------------------------
# linearized derivatives of quadratic maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeMap:
    """The map x -> G(x) + G(x+a) + G(a) + G(0); linear iff deg(G) <= 2."""

    vbf: VBF
    linear: bool

    def image(self) -> frozenset[int]:
        return frozenset(int(v) for v in self.vbf.table)


def derivative_map(g: VBF, alpha: int) -> DerivativeMap:
    if not 0 <= alpha < (1 << g.n):
        raise ValueError("alpha out of range")
    xs = np.arange(1 << g.n, dtype=np.uint32)
    tab = g.table ^ g.table[xs ^ alpha] ^ np.uint16(int(g.table[alpha]) ^ int(g.table[0]))
    return DerivativeMap(VBF(g.n, g.m, tab), g.degree <= 2)


# ---------------------------------------------------------------------------
# random functions and EA transforms
# ---------------------------------------------------------------------------

def random_function(n: int, m: int, rng) -> VBF:
    return VBF(n, m, [rng.getrandbits(m) for _ in range(1 << n)])


def random_quadratic(n: int, m: int, rng, homogeneous: bool = False) -> VBF:
    """Random function of degree <= 2 via its packed ANF."""
    coeffs = [0] * (1 << n)
    for u in range(1 << n):
        w = u.bit_count()
        if w == 2 or (not homogeneous and w <= 1):
            coeffs[u] = rng.getrandbits(m)
    return vbf_from_anf(n, m, coeffs)


def affine_transform(f: VBF, out_mat: GF2Matrix, out_const: int,
                     in_mat: GF2Matrix, in_const: int,
                     add_mat: Optional[GF2Matrix] = None,
                     add_const: int = 0) -> VBF:
    """The function x -> B(F(A x + a)) + b + C x + c."""
    if in_mat.nrows != f.n or in_mat.ncols != f.n:
        raise ValueError("input matrix must be n x n")
    if out_mat.nrows != f.m or out_mat.ncols != f.m:
        raise ValueError("output matrix must be m x m")
    a_lut = np.array(in_mat.lut(), dtype=np.uint32)
    b_lut = np.array(out_mat.lut(), dtype=np.uint16)
    tab = b_lut[f.table[a_lut ^ np.uint32(in_const)]] ^ np.uint16(out_const)
    if add_mat is not None:
        c_lut = np.array(add_mat.lut(), dtype=np.uint16)
        tab = tab ^ c_lut
    tab = tab ^ np.uint16(add_const)
    return VBF(f.n, f.m, tab)


def random_ea_transform(f: VBF, rng, with_affine_part: bool = True) -> VBF:
    """A random EA-equivalent copy B o F o (A + a) + b + C."""
    A = gf2.random_invertible(f.n, rng)
    B = gf2.random_invertible(f.m, rng)
    a = rng.getrandbits(f.n)
    b = rng.getrandbits(f.m)
    C = gf2.random_matrix(f.m, f.n, rng) if with_affine_part else None
    c = rng.getrandbits(f.m) if with_affine_part else 0
    return affine_transform(f, B, b, A, a, C, c)


def components(f: VBF, beta: int) -> np.ndarray:
    """Truth table of the component x -> <beta, F(x)> as a 0/1 array."""
    return _PAR16[np.uint16(beta) & f.table]


def spectrum_counter(pairs: tuple[tuple[int, int], ...]) -> Counter:
    return Counter(dict(pairs))
