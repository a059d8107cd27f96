# lattice.py
"""Exact integer lattices.

IntegerLattice keeps an echelon basis and, for every basis row, the
combination of the added generators that produced it, so a successful
membership test returns the combination as a certificate and a failed one
returns the reduced remainder as the obstruction row.

hermite_contains and quotient_invariants go through sympy instead and are
used as independent checks.
"""
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import hermite_normal_form, invariant_factors


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    # x*a + y*b == g throughout
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _combine(u: Dict[int, int], v: Dict[int, int], a: int, b: int) -> Dict[int, int]:
    """a*u + b*v on sparse coefficient maps."""
    out: Dict[int, int] = {}
    for key in set(u) | set(v):
        value = a * u.get(key, 0) + b * v.get(key, 0)
        if value:
            out[key] = value
    return out


@dataclass
class Membership:
    member: bool
    combination: Dict[int, int]
    obstruction: Optional[List[int]] = None
    column: Optional[int] = None


class IntegerLattice:
    def __init__(self, dimension: int):
        self.dimension = dimension
        self.basis: List[List[int]] = []
        self.track: List[Dict[int, int]] = []
        self.pivots: List[int] = []
        self.count = 0

    def add_vector(self, vector: Sequence[int]) -> int:
        """Add a generator and return its index."""
        if len(vector) != self.dimension:
            raise ValueError(f"expected {self.dimension} entries, got {len(vector)}")
        index = self.count
        self.count += 1
        vec = list(vector)
        coeffs = {index: 1}
        for j in range(self.dimension):
            if not vec[j]:
                continue
            where = bisect_left(self.pivots, j)
            if where == len(self.pivots) or self.pivots[where] != j:
                self.basis.insert(where, vec)
                self.track.insert(where, coeffs)
                self.pivots.insert(where, j)
                return index
            row, row_coeffs = self.basis[where], self.track[where]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [vi - q * ri for vi, ri in zip(vec, row)]
                coeffs = _combine(coeffs, row_coeffs, 1, -q)
            else:
                x, y, g = xgcd(a, b)
                new_row = [x * ri + y * vi for ri, vi in zip(row, vec)]
                new_coeffs = _combine(row_coeffs, coeffs, x, y)
                vec = [(-b // g) * ri + (a // g) * vi for ri, vi in zip(row, vec)]
                coeffs = _combine(row_coeffs, coeffs, -b // g, a // g)
                self.basis[where], self.track[where] = new_row, new_coeffs
        return index

    def membership(self, vector: Sequence[Fraction]) -> Membership:
        for j, value in enumerate(vector):
            if Fraction(value).denominator != 1:
                return Membership(False, {}, [Fraction(v) for v in vector], j)
        vec = [int(v) for v in vector]
        combination: Dict[int, int] = {}
        for j in range(self.dimension):
            if not vec[j]:
                continue
            where = bisect_left(self.pivots, j)
            if where == len(self.pivots) or self.pivots[where] != j:
                return Membership(False, {}, vec, j)
            row = self.basis[where]
            if vec[j] % row[j]:
                return Membership(False, {}, vec, j)
            q = vec[j] // row[j]
            vec = [vi - q * ri for vi, ri in zip(vec, row)]
            combination = _combine(combination, self.track[where], 1, q)
        return Membership(True, combination)

    def __contains__(self, vector: Sequence[Fraction]) -> bool:
        return self.membership(vector).member

    def rank(self) -> int:
        return len(self.basis)


def hermite_contains(rows: Sequence[Sequence[int]], vector: Sequence[Fraction]) -> bool:
    """Membership of `vector` in the row lattice, decided from sympy's Hermite form."""
    if any(Fraction(v).denominator != 1 for v in vector):
        return False
    vec = [int(v) for v in vector]
    if not rows:
        return not any(vec)
    ncols = len(vec)
    # sympy reduces columns, so the generators go in as columns
    matrix = DM([[int(r[j]) for r in rows] for j in range(ncols)], ZZ)
    form = [[int(x) for x in line] for line in hermite_normal_form(matrix).to_Matrix().tolist()]
    width = len(form[0]) if form else 0
    for c in reversed(range(width)):
        column = [form[i][c] for i in range(ncols)]
        nonzero = [i for i in range(ncols) if column[i]]
        if not nonzero:
            continue
        p = nonzero[-1]
        if vec[p] % column[p]:
            return False
        q = vec[p] // column[p]
        vec = [v - q * x for v, x in zip(vec, column)]
    return not any(vec)


def quotient_invariants(rows: Sequence[Sequence[int]], dimension: int) -> Tuple[int, List[int]]:
    """Rank and nonzero invariant factors of the row lattice inside Z^dimension."""
    if not rows:
        return 0, []
    factors = [abs(int(f)) for f in invariant_factors(DM([list(map(int, r)) for r in rows], ZZ))]
    factors = [f for f in factors if f]
    return len(factors), factors
