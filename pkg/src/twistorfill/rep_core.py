"""Finite-dimensional representations of sl(2) + sl(2).

The irreducible module sigma^K = Sym^K C^2 carries the weight basis
v_K, v_{K-2}, ..., v_{-K} normalised by ``Y v_m = v_{m-2}``.  The raising
operator is then forced to be ``X v_m = c_m v_{m+2}`` with
``c_m = ((K - m)/2) * ((K + m)/2 + 1)``, so every ladder entry is an
integer.  Products V^{K,L} = sigma^K (x) sigma^L use the Kronecker basis,
which lists weights (k, l) in lexicographically descending order.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
import scipy.sparse as sp

from . import _scalars as sc

LADDER_LABELS = ("H1", "H2", "X1", "X2", "Y1", "Y2")


@dataclass(frozen=True)
class Irrep:
    """The module sigma^K of highest weight K."""

    K: int

    def __post_init__(self):
        if not isinstance(self.K, (int, np.integer)) or self.K < 0:
            raise ValueError(f"highest weight must be a nonnegative integer, got {self.K!r}")

    @property
    def dim(self):
        return self.K + 1

    @property
    def weights(self):
        return list(range(self.K, -self.K - 1, -2))


@dataclass(frozen=True)
class ProductRep:
    """V^{K,L}; ``allow_odd`` admits K+L odd for intermediate work."""

    K: int
    L: int
    allow_odd: bool = False
    _lines: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, v in (("K", self.K), ("L", self.L)):
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if (self.K + self.L) % 2 and not self.allow_odd:
            raise ValueError(f"K+L must be even for V^{{{self.K},{self.L}}}")
        lines = tuple((k, l) for k in range(self.K, -self.K - 1, -2)
                      for l in range(self.L, -self.L - 1, -2))
        object.__setattr__(self, "_lines", lines)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(lines)})

    @property
    def dim(self):
        return (self.K + 1) * (self.L + 1)

    @property
    def lines(self):
        return self._lines

    def index(self, k, l):
        return self._index[(k, l)]

    def contains(self, k, l):
        return (k, l) in self._index

    def lines_with_sum(self, total):
        """Weight lines with k + l == total, in basis order."""
        return [x for x in self._lines if x[0] + x[1] == total]


def weight_basis(rep):
    """Ordered weight labels of ``rep`` (lexicographically descending)."""
    return list(rep.lines)


def _sl2_blocks(K):
    w = list(range(K, -K - 1, -2))
    n = len(w)
    H = np.diag(w).astype(np.int64)
    X = np.zeros((n, n), dtype=np.int64)
    Y = np.zeros((n, n), dtype=np.int64)
    for a, m in enumerate(w):
        if m - 2 >= -K:
            Y[a + 1, a] = 1
        if m + 2 <= K:
            X[a - 1, a] = ((K - m) // 2) * ((K + m) // 2 + 1)
    return {"H": H, "X": X, "Y": Y}


def raising_coefficient(K, m):
    """The integer c_m with X v_m = c_m v_{m+2} in sigma^K."""
    return ((K - m) // 2) * ((K + m) // 2 + 1)


@dataclass(frozen=True)
class LadderOp:
    which: str
    matrix: sp.csr_matrix


def ladder_matrix(rep, which, dtype=complex):
    """Sparse matrix of ``which`` (one of LADDER_LABELS) on ``rep``.

    Use ``dtype=np.int64`` for exact integer arithmetic.
    """
    if which not in LADDER_LABELS:
        raise ValueError(f"unknown ladder operator {which!r}; expected one of {LADDER_LABELS}")
    kind, factor = which[0], which[1]
    eye1 = np.eye(rep.K + 1, dtype=np.int64)
    eye2 = np.eye(rep.L + 1, dtype=np.int64)
    if factor == "1":
        dense = np.kron(_sl2_blocks(rep.K)[kind], eye2)
    else:
        dense = np.kron(eye1, _sl2_blocks(rep.L)[kind])
    return sp.csr_matrix(dense.astype(dtype))


def ladder_op(rep, which, dtype=complex):
    return LadderOp(which, ladder_matrix(rep, which, dtype))


def clebsch_gordan(K, L):
    """Diagonal decomposition of sigma^K (x) sigma^L as ``[(J, mult), ...]``."""
    if K < 0 or L < 0:
        raise ValueError("K and L must be nonnegative")
    return [(J, 1) for J in range(K + L, abs(K - L) - 1, -2)]


def hom_so3_multiplicity(K, L, J):
    """Multiplicity of sigma^J in the diagonal decomposition of V^{K,L}."""
    if (K + L) % 2:
        raise ValueError("K+L must be even")
    return sum(m for j, m in clebsch_gordan(K, L) if j == J)


def _j_index(K, m):
    return (K - m) // 2


def real_structure_factor(K, m):
    """Exact factor t with j(v_m) = t * v_{-m} on sigma^K."""
    j = _j_index(K, m)
    return Fraction((-1) ** j * factorial(j), factorial(K - j))


def g0_factor(K, m):
    """Exact factor c with g0 v_m = c * v_{-m} on sigma^K, g0 = (0,i;i,0)."""
    j = _j_index(K, m)
    r = Fraction(factorial(j), factorial(K - j))
    phase = [(1, 0), (0, 1), (-1, 0), (0, -1)][K % 4]
    return sc.gaussian(r * phase[0], r * phase[1])


@dataclass(frozen=True)
class RealStructure:
    """Antilinear map v -> T conj(v) on V^{K,L}."""

    rep: ProductRep
    matrix: np.ndarray

    def apply(self, v):
        return self.matrix @ np.conj(np.asarray(v, dtype=complex))

    def factor(self, k, l):
        """Exact real factor t(k,l) with tau(v_{k,l}) = t v_{-k,-l}."""
        return real_structure_factor(self.rep.K, k) * real_structure_factor(self.rep.L, l)


def real_structure(rep):
    """The real structure j_K (x) j_L; requires K+L even."""
    if (rep.K + rep.L) % 2:
        raise ValueError("a real structure exists only for K+L even")
    T = np.zeros((rep.dim, rep.dim))
    for (k, l) in rep.lines:
        t = real_structure_factor(rep.K, k) * real_structure_factor(rep.L, l)
        T[rep.index(-k, -l), rep.index(k, l)] = float(t)
    return RealStructure(rep, T)


def g0_matrix(rep):
    """Matrix of g0 = (0,i;i,0) acting diagonally on V^{K,L}."""
    G = np.zeros((rep.dim, rep.dim), dtype=complex)
    for (k, l) in rep.lines:
        c = sc.to_complex(g0_factor(rep.K, k) * g0_factor(rep.L, l))
        G[rep.index(-k, -l), rep.index(k, l)] = c
    return G


def g0_line_factor(rep, k, l):
    """Exact factor with g0 v_{k,l} = c v_{-k,-l}."""
    return g0_factor(rep.K, k) * g0_factor(rep.L, l)


def compact_generators(rep):
    """Real basis (iH, X-Y, i(X+Y)) of the diagonal su(2) acting on ``rep``."""
    m = {w: ladder_matrix(rep, w).toarray() for w in LADDER_LABELS}
    H = m["H1"] + m["H2"]
    X = m["X1"] + m["X2"]
    Y = m["Y1"] + m["Y2"]
    return [1j * H, X - Y, 1j * (X + Y)]
