"""Rational nilpotent Lie algebras and the Malcev dictionary.

A :class:`NilLieAlgebra` is given by structure constants in a fixed basis.
Group elements of the corresponding unipotent group are represented by
their logarithms, so the group law is the Baker-Campbell-Hausdorff product
:func:`bch`, evaluated exactly from Dynkin's formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, lcm
from typing import Sequence

from .linalg import (
    QMatrix,
    coordinates,
    hermite_basis,
    is_integral_vector,
    is_nilpotent,
    is_unipotent,
    same_span,
    span_rank,
    subspace_basis,
    vadd,
    vec,
    vscale,
)

LieVector = tuple  # tuple of Fractions, coordinates in the algebra basis


class InvalidAlgebra(ValueError):
    pass


class Underdetermined(ValueError):
    """The given source vectors do not span the algebra."""


@dataclass(frozen=True)
class NilLieAlgebra:
    """Finite-dimensional nilpotent Lie algebra over Q.

    ``structure`` holds c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k.
    Antisymmetry, the Jacobi identity and the declared nilpotency class are
    checked on construction.
    """

    dim: int
    structure: tuple
    nilpotency_class: int
    _ad: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise InvalidAlgebra("dimension must be positive")
        c = tuple(tuple(tuple(Fraction(x) for x in cij) for cij in ci) for ci in self.structure)
        if len(c) != n or any(len(ci) != n or any(len(cij) != n for cij in ci) for ci in c):
            raise InvalidAlgebra(f"structure constants must have shape {n}x{n}x{n}")
        object.__setattr__(self, "structure", c)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if c[i][j][k] != -c[j][i][k]:
                        raise InvalidAlgebra(f"antisymmetry fails at ({i}, {j}, {k})")
        ad = tuple(QMatrix(n, n, [c[i][j][k] for k in range(n) for j in range(n)]) for i in range(n))
        object.__setattr__(self, "_ad", ad)
        basis = [self.basis_vector(i) for i in range(n)]
        for x, y, z in itertools.combinations(basis, 3):
            jac = vadd(vadd(self.bracket(x, self.bracket(y, z)),
                            self.bracket(y, self.bracket(z, x))),
                       self.bracket(z, self.bracket(x, y)))
            if any(jac):
                raise InvalidAlgebra("Jacobi identity fails")
        series = lower_central_series(self)
        actual = len(series) - 1
        if series[-1]:
            raise InvalidAlgebra("algebra is not nilpotent")
        if self.nilpotency_class != max(actual, 1):
            raise InvalidAlgebra(
                f"declared nilpotency class {self.nilpotency_class} but the algebra has class {max(actual, 1)}")

    @classmethod
    def from_brackets(cls, dim: int, brackets: Sequence[tuple], nilpotency_class: int | None = None,
                      ) -> "NilLieAlgebra":
        """Build from nonzero triples (i, j, k, value) meaning [e_i, e_j] has e_k-coefficient value.

        Indices are 0-based; the antisymmetric partner is filled in.
        """
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for i, j, k, v in brackets:
            v = Fraction(v)
            if i == j and v:
                raise InvalidAlgebra(f"[e_{i}, e_{i}] must vanish")
            if c[j][i][k] and c[j][i][k] != -v:
                raise InvalidAlgebra(f"inconsistent brackets for ({i}, {j}, {k})")
            c[i][j][k] = v
            c[j][i][k] = -v
        if nilpotency_class is None:
            nilpotency_class = _class_of(dim, c)
        return cls(dim, c, nilpotency_class)

    @classmethod
    def abelian(cls, dim: int) -> "NilLieAlgebra":
        return cls.from_brackets(dim, [], 1)

    @classmethod
    def heisenberg(cls, n: int = 1, scale=1) -> "NilLieAlgebra":
        """Basis x_1..x_n, y_1..y_n, z with [x_i, y_i] = scale * z."""
        return cls.from_brackets(2 * n + 1, [(i, n + i, 2 * n, scale) for i in range(n)], 2)

    @classmethod
    def strictly_upper_triangular(cls, n: int) -> "NilLieAlgebra":
        """Algebra of strictly upper triangular n x n matrices, basis E_ij (i < j) in row order."""
        index = {(i, j): a for a, (i, j) in enumerate((i, j) for i in range(n) for j in range(i + 1, n))}
        br = []
        for (i, j), a in index.items():
            for (k, l), b in index.items():
                if a < b:
                    # [E_ij, E_kl] = d_jk E_il - d_li E_kj
                    if j == k:
                        br.append((a, b, index[(i, l)], 1))
                    if l == i:
                        br.append((a, b, index[(k, j)], -1))
        return cls.from_brackets(len(index), br, max(n - 1, 1))

    def basis_vector(self, i: int) -> LieVector:
        return tuple(Fraction(1) if k == i else Fraction(0) for k in range(self.dim))

    def zero(self) -> LieVector:
        return (Fraction(0),) * self.dim

    def ad(self, X: Sequence) -> QMatrix:
        """Matrix of ad(X) = [X, -]."""
        X = self.check(X)
        out = QMatrix.zeros(self.dim)
        for x, A in zip(X, self._ad):
            if x:
                out = out + A.scale(x)
        return out

    def check(self, X: Sequence) -> LieVector:
        X = vec(X)
        if len(X) != self.dim:
            raise ValueError(f"vector of length {len(X)} in an algebra of dimension {self.dim}")
        return X

    def bracket(self, X: Sequence, Y: Sequence) -> LieVector:
        X, Y = self.check(X), self.check(Y)
        c = self.structure
        out = [Fraction(0)] * self.dim
        for i, x in enumerate(X):
            if not x:
                continue
            for j, y in enumerate(Y):
                if not y:
                    continue
                xy = x * y
                for k, ck in enumerate(c[i][j]):
                    if ck:
                        out[k] += xy * ck
        return tuple(out)

    def is_automorphism(self, T: QMatrix) -> bool:
        """T is invertible and preserves brackets on all basis pairs."""
        if T.rows != self.dim or not T.is_square or T.det() == 0:
            return False
        cols = [T.col(i) for i in range(self.dim)]
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if T @ self.bracket(self.basis_vector(i), self.basis_vector(j)) != self.bracket(cols[i], cols[j]):
                    return False
        return True

    def is_derivation(self, D: QMatrix) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                ei, ej = self.basis_vector(i), self.basis_vector(j)
                lhs = D @ self.bracket(ei, ej)
                rhs = vadd(self.bracket(D @ ei, ej), self.bracket(ei, D @ ej))
                if lhs != rhs:
                    return False
        return True

    def is_abelian(self) -> bool:
        return not any(x for ci in self.structure for cij in ci for x in cij)


def _class_of(dim, c) -> int:
    alg = object.__new__(NilLieAlgebra)
    object.__setattr__(alg, "dim", dim)
    object.__setattr__(alg, "structure", tuple(tuple(tuple(x) for x in ci) for ci in c))
    object.__setattr__(alg, "_ad", tuple(QMatrix(dim, dim, [c[i][j][k] for k in range(dim) for j in range(dim)])
                                         for i in range(dim)))
    series = lower_central_series(alg)
    if series[-1]:
        raise InvalidAlgebra("algebra is not nilpotent")
    return max(len(series) - 1, 1)


def bracket(a: NilLieAlgebra, X: Sequence, Y: Sequence) -> LieVector:
    return a.bracket(X, Y)


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff


@lru_cache(maxsize=None)
def dynkin_coefficients(max_degree: int) -> dict[tuple, Fraction]:
    """Coefficients of right-nested bracket words in Dynkin's BCH formula.

    Keys are words over {0: X, 1: Y}; the word (w1, ..., wm) stands for
    [w1, [w2, [..., [w_{m-1}, w_m]]]] (a single letter for m = 1).  Only
    words up to ``max_degree`` are produced.
    """
    coeffs: dict[tuple, Fraction] = {}
    for n in range(1, max_degree + 1):
        sign = Fraction((-1) ** (n - 1), n)
        # n pairs (r_i, s_i) with r_i + s_i >= 1 and total degree <= max_degree
        pairs = [(r, s) for r in range(max_degree + 1) for s in range(max_degree + 1) if 0 < r + s <= max_degree]
        for seq in itertools.product(pairs, repeat=n):
            deg = sum(r + s for r, s in seq)
            if deg > max_degree:
                continue
            word = tuple(l for r, s in seq for l in (0,) * r + (1,) * s)
            # nested bracket vanishes if the innermost repeated letter appears twice
            if deg > 1 and word[-1] == word[-2]:
                continue
            denom = deg
            for r, s in seq:
                denom *= factorial(r) * factorial(s)
            c = sign / denom
            # [.., [Y, X]] = -[.., [X, Y]]: keep one orientation of the innermost pair
            if deg > 1 and word[-2:] == (1, 0):
                word, c = word[:-2] + (0, 1), -c
            coeffs[word] = coeffs.get(word, Fraction(0)) + c
    return {w: c for w, c in coeffs.items() if c}


def bch(a: NilLieAlgebra, X: Sequence, Y: Sequence) -> LieVector:
    """log(exp X exp Y), the Dynkin series truncated at the nilpotency class."""
    X, Y = a.check(X), a.check(Y)
    if not any(X):
        return Y
    if not any(Y):
        return X
    letters = (X, Y)
    nested: dict[tuple, LieVector] = {}

    def value(word):
        if word in nested:
            return nested[word]
        if len(word) == 1:
            v = letters[word[0]]
        else:
            v = a.bracket(letters[word[0]], value(word[1:]))
        nested[word] = v
        return v

    out = [Fraction(0)] * a.dim
    for word, c in dynkin_coefficients(a.nilpotency_class).items():
        v = value(word)
        if any(v):
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return tuple(out)


def bch_denominators(max_degree: int) -> dict[int, int]:
    """For each degree m, the lcm of the denominators of the degree-m Dynkin coefficients."""
    out: dict[int, int] = {}
    for word, c in dynkin_coefficients(max_degree).items():
        out[len(word)] = lcm(out.get(len(word), 1), c.denominator)
    return out


def group_inverse(X: Sequence) -> LieVector:
    return tuple(-x for x in X)


def group_commutator(a: NilLieAlgebra, X: Sequence, Y: Sequence) -> LieVector:
    """log of exp(X) exp(Y) exp(-X) exp(-Y)."""
    return bch(a, bch(a, X, Y), bch(a, group_inverse(X), group_inverse(Y)))


# ---------------------------------------------------------------------------
# Matrix exp / log


def exp_unipotent(N: QMatrix) -> QMatrix:
    if not N.is_square or not is_nilpotent(N):
        raise ValueError("exp_unipotent requires a nilpotent square matrix")
    n = N.rows
    out = QMatrix.identity(n)
    term = QMatrix.identity(n)
    for k in range(1, n):
        term = (term @ N).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
    return out


def log_unipotent(U: QMatrix) -> QMatrix:
    if not U.is_square or not is_unipotent(U):
        raise ValueError("log_unipotent requires a unipotent square matrix")
    n = U.rows
    N = U - QMatrix.identity(n)
    out = QMatrix.zeros(n)
    power = QMatrix.identity(n)
    for k in range(1, n):
        power = power @ N
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


# ---------------------------------------------------------------------------
# Central series


def bracket_span(a: NilLieAlgebra, U: Sequence[Sequence], V: Sequence[Sequence]) -> list[tuple]:
    return subspace_basis([a.bracket(u, v) for u in U for v in V])


def lower_central_series(a: NilLieAlgebra) -> list[list[tuple]]:
    """[g, [g, g], [g, [g, g]], ..., 0] as canonical subspace bases.

    The last entry is the empty basis (the zero ideal) when the algebra is
    nilpotent; iteration stops as soon as the chain stabilises.
    """
    full = [a.basis_vector(i) for i in range(a.dim)]
    series = [subspace_basis(full)]
    while series[-1]:
        nxt = bracket_span(a, full, series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def centralizer_of(a: NilLieAlgebra, V: Sequence[Sequence], modulo: Sequence[Sequence] = ()) -> list[tuple]:
    """{x : [x, V] ⊆ modulo} as a subspace basis."""
    n = a.dim
    modulo = subspace_basis(modulo)
    # linear conditions on x: for each v, [x, v] must vanish modulo the subspace
    ann = QMatrix.from_rows(modulo).nullspace() if modulo else [a.basis_vector(i) for i in range(n)]
    rows = []
    for v in V:
        M = a.ad(v).scale(-1)  # x -> [x, v] = -ad(v) x
        for w in ann:
            rows.append(QMatrix.from_rows([w]) @ M)
    if not rows:
        return subspace_basis([a.basis_vector(i) for i in range(n)])
    rows = [r.row(0) for r in rows]
    return subspace_basis(QMatrix.from_rows(rows).nullspace())


def upper_central_series(a: NilLieAlgebra) -> list[list[tuple]]:
    """[0, z(g), z_2(g), ..., g] as subspace bases."""
    full = [a.basis_vector(i) for i in range(a.dim)]
    series: list[list[tuple]] = [[]]
    while len(series[-1]) < a.dim:
        nxt = centralizer_of(a, full, series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def center(a: NilLieAlgebra) -> list[tuple]:
    return upper_central_series(a)[1] if a.dim else []


# ---------------------------------------------------------------------------
# Log-lattices


@dataclass(frozen=True)
class LogLattice:
    """Full-rank Z-lattice in the underlying Q-vector space of an algebra."""

    algebra: NilLieAlgebra
    basis: tuple

    def __post_init__(self):
        basis = tuple(self.algebra.check(b) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if len(basis) != self.algebra.dim or span_rank(basis) != self.algebra.dim:
            raise ValueError("log-lattice basis must consist of dim linearly independent vectors")

    @classmethod
    def standard(cls, algebra: NilLieAlgebra) -> "LogLattice":
        return cls(algebra, tuple(algebra.basis_vector(i) for i in range(algebra.dim)))

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def matrix(self) -> QMatrix:
        """Basis vectors as columns."""
        return QMatrix.from_columns(self.basis)

    @cached_property
    def _inverse(self) -> QMatrix:
        return self.matrix().inverse()

    def coords(self, v: Sequence) -> tuple:
        return self._inverse @ self.algebra.check(v)

    def scaled(self, k) -> "LogLattice":
        return LogLattice(self.algebra, tuple(vscale(k, b) for b in self.basis))

    def canonical(self) -> list[tuple]:
        return hermite_basis(self.basis)

    def __contains__(self, v) -> bool:
        return lattice_contains(self, v)


def lattice_contains(L: LogLattice, v: Sequence) -> bool:
    return is_integral_vector(L.coords(v))


def lattice_index_scale(L: LogLattice | Sequence[Sequence], Lp: LogLattice | Sequence[Sequence]) -> int | None:
    """Smallest positive integer k with k L ⊆ L', or None if the spans differ."""
    a = L.basis if isinstance(L, LogLattice) else [vec(v) for v in L]
    b = Lp.basis if isinstance(Lp, LogLattice) else [vec(v) for v in Lp]
    if not same_span(a, b):
        return None
    k = 1
    for v in a:
        c = coordinates(b, v)
        for x in c:
            k = lcm(k, Fraction(x).denominator)
    return k


def is_bch_closed(L: LogLattice) -> bool:
    """Sufficient test that exp(L) is a group.

    Every degree-m bracket word in the basis must lie in D_m L, where D_m
    clears the denominators of the degree-m Dynkin coefficients.  For class
    at most 2 the test is also necessary.
    """
    a = L.algebra
    denoms = bch_denominators(a.nilpotency_class)
    basis = L.basis
    words = {1: list(basis)}
    for m in range(2, a.nilpotency_class + 1):
        words[m] = [a.bracket(b, w) for b in basis for w in words[m - 1]]
        D = denoms.get(m, 1)
        for w in words[m]:
            if any(w) and not lattice_contains(L, vscale(Fraction(1, D), w)):
                return False
    return True


# ---------------------------------------------------------------------------
# Extension of partial automorphisms


def extend_partial_automorphism(a: NilLieAlgebra, pairs: Sequence[tuple[Sequence, Sequence]]) -> QMatrix | None:
    """The Lie automorphism T with T(x) = y for every pair, or None.

    Raises :class:`Underdetermined` if the sources do not span.  Returns
    None when no linear map fits the pairs, or it is singular, or it fails
    to preserve brackets.
    """
    src = [a.check(x) for x, _ in pairs]
    dst = [a.check(y) for _, y in pairs]
    if span_rank(src) < a.dim:
        raise Underdetermined("source vectors do not span the algebra")
    # pick an independent subset, solve, then verify on every pair
    chosen: list[int] = []
    for i, x in enumerate(src):
        if span_rank([src[j] for j in chosen] + [x]) > len(chosen):
            chosen.append(i)
        if len(chosen) == a.dim:
            break
    X = QMatrix.from_columns([src[i] for i in chosen])
    Y = QMatrix.from_columns([dst[i] for i in chosen])
    T = Y @ X.inverse()
    if any(T @ x != y for x, y in zip(src, dst)):
        return None
    if not a.is_automorphism(T):
        return None
    return T


def adjoint_exp(a: NilLieAlgebra, X: Sequence) -> QMatrix:
    """e^{ad X}: the action of conjugation by exp(X) on log coordinates."""
    return exp_unipotent(a.ad(X))


def is_integral_in(L: LogLattice, v: Sequence) -> bool:
    return is_integral_vector(L.coords(v))
