"""Exact matrix kernels: integer/rational rank and determinant, prime-field
rank, and determinants of small matrices with polynomial entries.

Two elimination strategies, chosen by coefficient domain and size:

* fraction-free (Bareiss) elimination over the integers for rational
  matrices (rows are scaled integer vectors, so no coefficient blow-up from
  fractions), and
* plain Gaussian elimination over GF(p) for modular rank.  When p*p fits in
  an int64 the elimination is vectorized with numpy; otherwise a pure-Python
  path handles word-sized primes up to 2^62.

Everything here is exact; there is no floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .polyring import Polynomial, Rationals, exact_div

# Largest p with (p-1)^2 + p < 2^63, so products in the int64 update cannot
# overflow.
NUMPY_PRIME_LIMIT = 3037000499


def _rows_to_int(rows) -> list[list[int]]:
    out = []
    for row in rows:
        fr = [x if isinstance(x, Fraction) else Fraction(x) for x in row]
        scale = lcm(*(f.denominator for f in fr)) if fr else 1
        out.append([int(f * scale) for f in fr])
    return out


def rank_rational(rows) -> int:
    """Exact rank of a matrix with int/Fraction entries (Bareiss over Z)."""
    m = _rows_to_int(rows)
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        piv = next((i for i in range(rank, n_rows) if m[i][col]), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
        pivot = m[rank][col]
        row_p = m[rank]
        for i in range(rank + 1, n_rows):
            row_i = m[i]
            head = row_i[col]
            # every remaining row is rescaled by the pivot; this keeps the
            # divisions by the previous pivot exact (fraction-free invariant)
            m[i] = [(row_i[j] * pivot - head * row_p[j]) // prev
                    for j in range(n_cols)]
        prev = pivot
        rank += 1
    return rank


def det_rational(rows) -> Fraction:
    """Exact determinant of a square matrix with int/Fraction entries."""
    m = [[x if isinstance(x, Fraction) else Fraction(x) for x in row]
         for row in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return det


def _rank_mod_p_numpy(rows, p: int) -> int:
    a = np.array(rows, dtype=np.int64) % p
    n_rows, n_cols = a.shape
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        row = a[r, c:] * inv % p
        a[r, c:] = row
        below = a[r + 1:, c]
        nzb = np.nonzero(below)[0]
        if nzb.size:
            idx = r + 1 + nzb
            a[idx, c:] = (a[idx, c:] - below[nzb, None] * row) % p
        r += 1
    return r


def _rank_mod_p_python(rows, p: int) -> int:
    m = [[int(x) % p for x in row] for row in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        pivot_row = [v * inv % p for v in m[r]]
        m[r] = pivot_row
        for i in range(r + 1, n_rows):
            f = m[i][c]
            if f:
                row_i = m[i]
                m[i] = [(x - f * y) % p for x, y in zip(row_i, pivot_row)]
        r += 1
    return r


def rank_mod_p(rows, p: int) -> int:
    """Rank over GF(p); numpy-vectorized when p*p fits in int64."""
    if p <= NUMPY_PRIME_LIMIT:
        arr = np.asarray(rows, dtype=np.int64)
        if arr.size == 0:
            return 0
        return _rank_mod_p_numpy(arr, p)
    return _rank_mod_p_python(rows, p)


# integer-coefficient polynomial helpers (dict exponent-tuple -> int); the
# Bareiss intermediates are minors of the input matrix, so every division
# below is exact over Z with any monomial order


def _int_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _int_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) - c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _int_exact_div(num: dict, den: dict) -> dict:
    den_lead = max(den, key=lambda e: (sum(e), e))
    den_lc = den[den_lead]
    rem = dict(num)
    quot: dict = {}
    while rem:
        lead = max(rem, key=lambda e: (sum(e), e))
        e = tuple(a - b for a, b in zip(lead, den_lead))
        c, r = divmod(rem[lead], den_lc)
        if r or any(k < 0 for k in e):
            raise ValueError("inexact polynomial division")
        quot[e] = c
        for ed, cd in den.items():
            et = tuple(x + y for x, y in zip(e, ed))
            s = rem.get(et, 0) - c * cd
            if s:
                rem[et] = s
            else:
                rem.pop(et, None)
    return quot


def _poly_det_int(rows: list[dict], n: int) -> tuple[int, dict]:
    m = [list(r) for r in rows]
    sign = 1
    prev: dict | None = None
    for k in range(n - 1):
        if not m[k][k]:
            piv = next((i for i in range(k + 1, n) if m[i][k]), None)
            if piv is None:
                return 1, {}
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            head = m[i][k]
            for j in range(k + 1, n):
                num = _int_sub(_int_mul(m[i][j], pivot),
                               _int_mul(head, m[k][j]))
                m[i][j] = _int_exact_div(num, prev) if prev else num
            m[i][k] = {}
        prev = pivot
    return sign, m[n - 1][n - 1]


def poly_det(rows: list[list[Polynomial]]) -> Polynomial:
    """Determinant of a square matrix of polynomials (fraction-free Bareiss).

    Intermediate entries are k x k minors, so divisions by the previous
    pivot are exact in the polynomial ring.  Matrices with integer
    coefficients take a fast plain-int path.
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    ring = rows[0][0].ring
    if n == 0:
        return ring.one()
    if isinstance(ring.field, Rationals) and all(
            c.denominator == 1
            for row in rows for p in row for c in p.terms.values()):
        sign, det = _poly_det_int(
            [[{e: int(c) for e, c in p.terms.items()} for p in row]
             for row in rows], n)
        return ring.from_terms({e: sign * c for e, c in det.items()})
    m = [list(r) for r in rows]
    sign = 1
    prev: Polynomial | None = None
    for k in range(n - 1):
        if m[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if piv is None:
                return ring.zero()
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_div(num, prev) if prev is not None else num
            m[i][k] = ring.zero()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det
