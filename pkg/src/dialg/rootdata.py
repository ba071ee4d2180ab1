"""Finite-type Cartan data and q-number combinatorics.

Cartan matrices follow the transposed-Bourbaki layout for B, C and F and
the Kac layout for G2, so that for B_l the long-short edge reads
``a[l][l-1] = -2``.  Indices in the public API are 1-based node labels;
matrices are stored 0-based.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cas import LaurentPoly, V_DENOM

_MIN_RANK = {"A": 1, "B": 3, "C": 2, "D": 4}
_FIXED_RANKS = {"E": (6, 7, 8), "F": (4,), "G": (2,)}


class RootDataError(ValueError):
    pass


@dataclass(frozen=True)
class RootType:
    family: str
    rank: int

    def __post_init__(self):
        fam, l = self.family, self.rank
        if fam in _MIN_RANK:
            if l < _MIN_RANK[fam]:
                raise RootDataError(f"type {fam}{l}: rank must be >= {_MIN_RANK[fam]}")
        elif fam in _FIXED_RANKS:
            if l not in _FIXED_RANKS[fam]:
                raise RootDataError(f"type {fam}{l} does not exist")
        else:
            raise RootDataError(f"unknown family {fam!r}")

    @classmethod
    def parse(cls, text: str) -> "RootType":
        m = re.fullmatch(r"\s*([A-Ga-g])(\d+)\s*", text)
        if not m:
            raise RootDataError(f"cannot parse root type {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def simply_laced(self) -> bool:
        return self.family in "ADE"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class CartanData:
    rtype: RootType
    A: tuple
    Dinv: tuple  # Fractions d_i
    B: tuple  # Fractions b_ij = d_i a_ij
    convention: str = "standard"

    @property
    def rank(self) -> int:
        return len(self.A)

    @property
    def nodes(self):
        return range(1, self.rank + 1)

    def a(self, i: int, j: int) -> int:
        return self.A[i - 1][j - 1]

    def b(self, i: int, j: int) -> Fraction:
        return self.B[i - 1][j - 1]

    def d(self, i: int) -> Fraction:
        return self.Dinv[i - 1]

    def v_exp(self, x: Fraction) -> int:
        """Exponent of v = q^{1/6} representing q^x."""
        e = Fraction(x) * V_DENOM
        if e.denominator != 1:
            raise RootDataError(f"q^{x} is not on the (1/6)Z lattice")
        return int(e)


def _chain(l: int):
    A = [[0] * l for _ in range(l)]
    for i in range(l):
        A[i][i] = 2
        if i + 1 < l:
            A[i][i + 1] = A[i + 1][i] = -1
    return A


def _from_edges(l: int, edges):
    A = [[0] * l for _ in range(l)]
    for i in range(l):
        A[i][i] = 2
    for i, j in edges:
        A[i - 1][j - 1] = A[j - 1][i - 1] = -1
    return A


def cartan_matrix(t: RootType):
    l, fam = t.rank, t.family
    if fam == "A":
        A = _chain(l)
    elif fam == "B":
        A = _chain(l)
        A[l - 1][l - 2] = -2
    elif fam == "C":
        A = _chain(l)
        A[l - 2][l - 1] = -2
    elif fam == "D":
        A = _chain(l)
        A[l - 2][l - 1] = A[l - 1][l - 2] = 0
        A[l - 3][l - 1] = A[l - 1][l - 3] = -1
    elif fam == "E":
        # Bourbaki numbering: 1-3-4-5-6(-7-8) with 2 attached to 4
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)] + [(k, k + 1) for k in range(5, l)]
        A = _from_edges(l, edges)
    elif fam == "F":
        A = _chain(4)
        A[2][1] = -2
    else:  # G2
        A = [[2, -1], [-3, 2]]
    return tuple(tuple(r) for r in A)


_STANDARD_D = {
    "B": lambda l: [1] * (l - 1) + [Fraction(1, 2)],
    "C": lambda l: [1] * (l - 1) + [2],
    "F": lambda l: [1, 1, Fraction(1, 2), Fraction(1, 2)],
    "G": lambda l: [1, Fraction(1, 3)],
}
_NS_D = {
    "B": _STANDARD_D["B"],
    "C": _STANDARD_D["C"],
    "F": lambda l: [2, 2, 1, 1],
    "G": lambda l: [3, 1],
}


@lru_cache(maxsize=None)
def symmetrization(t: RootType, convention: str = "standard") -> CartanData:
    if convention not in ("standard", "ns"):
        raise RootDataError(f"unknown convention {convention!r}")
    A = cartan_matrix(t)
    l = t.rank
    if convention == "ns":
        if t.family not in _NS_D:
            raise RootDataError("the ns convention applies to B, C, F and G only")
        d = _NS_D[t.family](l)
    else:
        d = _STANDARD_D.get(t.family, lambda l: [1] * l)(l)
    d = tuple(Fraction(x) for x in d)
    B = tuple(tuple(d[i] * A[i][j] for j in range(l)) for i in range(l))
    for i in range(l):
        for j in range(l):
            if B[i][j] != B[j][i]:
                raise RootDataError(f"{t}: diag(d)A is not symmetric at ({i+1},{j+1})")
    return CartanData(t, A, d, B, convention)


def default_convention(t: RootType) -> str:
    """The convention the relevant part of the construction uses."""
    return "ns" if t.family in "BCFG" else "standard"


def cartan_data(t, convention=None) -> CartanData:
    if isinstance(t, str):
        t = RootType.parse(t)
    return symmetrization(t, convention or default_convention(t))


# q-numbers live in Z[v, v^-1] with v = q^{1/6}

def _vpow(e: int) -> LaurentPoly:
    return LaurentPoly.monomial({"v": e})


def _d_exp(d) -> int:
    e = Fraction(d) * V_DENOM
    if e.denominator != 1:
        raise RootDataError(f"q^{d} is not on the (1/6)Z lattice")
    return int(e)


@dataclass(frozen=True)
class QNumberSpec:
    n: int
    d: Fraction = Fraction(1)


@lru_cache(maxsize=None)
def q_int(n: int, d=Fraction(1)) -> LaurentPoly:
    """[n]_{q^d} = (q^{nd} - q^{-nd})/(q^d - q^{-d}) = sum_k q^{d(n-1-2k)}."""
    if n < 0:
        raise RootDataError("negative q-integer")
    e = _d_exp(d)
    out = LaurentPoly.zero()
    for k in range(n):
        out = out + _vpow(e * (n - 1 - 2 * k))
    return out


def q_number(spec: QNumberSpec) -> LaurentPoly:
    return q_int(spec.n, spec.d)


@lru_cache(maxsize=None)
def q_factorial(n: int, d=Fraction(1)) -> LaurentPoly:
    out = LaurentPoly.one()
    for k in range(1, n + 1):
        out = out * q_int(k, d)
    return out


@lru_cache(maxsize=None)
def q_binomial(m: int, n: int, d=Fraction(1)) -> LaurentPoly:
    """Gaussian binomial via the q-Pascal rule, so no division is needed."""
    if m < 0 or n < 0 or n > m:
        raise RootDataError("q_binomial needs 0 <= n <= m")
    if n == 0 or n == m:
        return LaurentPoly.one()
    e = _d_exp(d)
    # [m, n] = q^{-n}[m-1, n] + q^{m-n}[m-1, n-1]   (base q^d)
    return (_vpow(-e * n) * q_binomial(m - 1, n, d)
            + _vpow(e * (m - n)) * q_binomial(m - 1, n - 1, d))


def serre_pairs(t) -> list:
    """Ordered pairs (i, j, a_ij, arity) with a_ij < 0."""
    if isinstance(t, str):
        t = RootType.parse(t)
    A = cartan_matrix(t)
    out = []
    for i in range(len(A)):
        for j in range(len(A)):
            if i != j and A[i][j] < 0:
                out.append((i + 1, j + 1, A[i][j], 1 - A[i][j]))
    return out
