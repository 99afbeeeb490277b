"""Integer row reduction: Hermite normal form with its unimodular transform."""
from __future__ import annotations

from typing import Sequence


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style HNF.

    Returns ``(H, U)`` with ``H = U @ rows`` and ``U`` unimodular. ``H`` is in
    echelon form with positive pivots and entries above each pivot reduced
    into ``[0, pivot)``; zero rows are kept at the bottom, so the nonzero rows
    of ``H`` are a basis of the row lattice.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    H = [list(map(int, r)) for r in rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][col] == 0:
                continue
            a, b = H[r][col], H[i][col]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            # [[x, y], [-q, p]] has determinant 1
            H[r], H[i] = ([x * s + y * t for s, t in zip(H[r], H[i])],
                          [-q * s + p * t for s, t in zip(H[r], H[i])])
            U[r], U[i] = ([x * s + y * t for s, t in zip(U[r], U[i])],
                          [-q * s + p * t for s, t in zip(U[r], U[i])])
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][col]
        for i in range(r):
            f = H[i][col] // piv
            if f:
                H[i] = [s - f * t for s, t in zip(H[i], H[r])]
                U[i] = [s - f * t for s, t in zip(U[i], U[r])]
        r += 1
    return H, U


def lattice_basis(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Nonzero HNF rows: a canonical basis of the integer row span."""
    if not rows:
        return []
    H, _ = hermite_normal_form(rows)
    return [h for h in H if any(h)]


def echelon_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer c with ``sum c_j basis_j = v`` for an HNF basis, or None."""
    v = list(v)
    coeffs = []
    for b in basis:
        col = next(j for j, x in enumerate(b) if x)
        c, rem = divmod(v[col], b[col])
        if rem:
            return None
        coeffs.append(c)
        v = [s - c * t for s, t in zip(v, b)]
    return coeffs if not any(v) else None
