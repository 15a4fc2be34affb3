"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction``; no floating point is
ever introduced.  Matrices are small (desk-scale, dimension well under 20)
so dense Gaussian elimination is used throughout.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


class QMatrix:
    """Immutable dense matrix with exact rational entries (row-major)."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(to_fraction(e) for e in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ValueError(f"expected {rows}x{cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "QMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise ValueError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "QMatrix":
        return cls.from_rows(cols).T

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> "QMatrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def block_diag(cls, *blocks: "QMatrix") -> "QMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls.from_rows(out)

    @classmethod
    def parse(cls, text: str) -> "QMatrix":
        """Parse the literal format ``2,1;1,1`` (rows by ``;``, entries by ``,``)."""
        rows = []
        for row in text.strip().split(";"):
            row = row.strip()
            if not row:
                raise ValueError(f"empty row in matrix literal {text!r}")
            rows.append([Fraction(e.strip()) for e in row.split(",")])
        return cls.from_rows(rows)

    def literal(self) -> str:
        return ";".join(",".join(str(x) for x in r) for r in self.row_list())

    # -- access -------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, QMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        return f"QMatrix({self.literal()!r})"

    def __str__(self) -> str:
        return self.literal()

    # -- arithmetic ---------------------------------------------------
    def _check_same_shape(self, other: "QMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same_shape(other)
        return QMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "QMatrix":
        c = to_fraction(c)
        return QMatrix(self.rows, self.cols, [c * a for a in self.entries])

    def __rmul__(self, c) -> "QMatrix":
        return self.scale(c)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            ocols = [other.col(j) for j in range(other.cols)]
            out = []
            for i in range(self.rows):
                r = self.row(i)
                for c in ocols:
                    out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
            return QMatrix(self.rows, other.cols, out)
        vec = tuple(to_fraction(x) for x in other)
        if len(vec) != self.cols:
            raise ValueError(f"vector length {len(vec)} does not match {self.cols} columns")
        return tuple(sum((a * b for a, b in zip(self.row(i), vec) if a and b), Fraction(0))
                     for i in range(self.rows))

    def __pow__(self, k: int) -> "QMatrix":
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = QMatrix.identity(self.rows)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_identity(self) -> bool:
        return self.is_square and self == QMatrix.identity(self.rows)

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def denominator(self) -> int:
        return reduce(lcm, (e.denominator for e in self.entries), 1)

    # -- elimination --------------------------------------------------
    def rref(self) -> tuple["QMatrix", list[int]]:
        """Reduced row echelon form and pivot columns."""
        m = self.row_list()
        pivots = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if m[i][c]), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return QMatrix(self.rows, self.cols, [x for row in m for x in row]), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        m = self.row_list()
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                m[c], m[p] = m[p], m[c]
                d = -d
            d *= m[c][c]
            inv = 1 / m[c][c]
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def inverse(self) -> "QMatrix":
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = QMatrix.from_rows([list(self.row(i)) + [1 if i == j else 0 for j in range(n)]
                                 for i in range(n)])
        red, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return QMatrix.from_rows([red.row(i)[n:] for i in range(n)])

    def nullspace(self) -> list[tuple]:
        """Basis of {v : M v = 0} as tuples."""
        red, piv = self.rref()
        free = [c for c in range(self.cols) if c not in piv]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for i, p in enumerate(piv):
                v[p] = -red[i, f]
            basis.append(tuple(v))
        return basis

    def solve(self, b: Sequence) -> tuple | None:
        """One solution x of M x = b, or None if inconsistent."""
        b = [to_fraction(x) for x in b]
        aug = QMatrix.from_rows([list(self.row(i)) + [b[i]] for i in range(self.rows)])
        red, piv = aug.rref()
        if self.cols in piv:
            return None
        x = [Fraction(0)] * self.cols
        for i, p in enumerate(piv):
            x[p] = red[i, self.cols]
        return tuple(x)


def require_square(M: QMatrix, what: str = "matrix") -> None:
    if not M.is_square:
        raise ValueError(f"{what} must be square, got {M.rows}x{M.cols}")


# ---------------------------------------------------------------------------
# Polynomials


class QPolynomial:
    """Univariate polynomial over Q, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = [to_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls) -> "QPolynomial":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def monic(self) -> "QPolynomial":
        if self.is_zero():
            return self
        return QPolynomial([c / self.lead for c in self.coeffs])

    def __eq__(self, other) -> bool:
        return isinstance(other, QPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return QPolynomial([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "QPolynomial":
        return QPolynomial([-c for c in self.coeffs])

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "QPolynomial":
        if not isinstance(other, QPolynomial):
            return QPolynomial([c * to_fraction(other) for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return QPolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "QPolynomial") -> tuple["QPolynomial", "QPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - other.degree, 0)
        while len(rem) - 1 >= other.degree and any(rem):
            shift = len(rem) - 1 - other.degree
            f = rem[-1] / other.lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return QPolynomial(q), QPolynomial(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "QPolynomial":
        return QPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Evaluate at a number or a square QMatrix (Horner)."""
        if isinstance(x, QMatrix):
            require_square(x)
            acc = QMatrix.zeros(x.rows)
            eye = QMatrix.identity(x.rows)
            for c in reversed(self.coeffs):
                acc = acc @ x + eye.scale(c)
            return acc
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"QPolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def poly_gcd(a: QPolynomial, b: QPolynomial) -> QPolynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: QPolynomial) -> QPolynomial:
    """Product of the distinct irreducible factors of p (monic)."""
    return (p // poly_gcd(p, p.derivative())).monic()


# ---------------------------------------------------------------------------
# Characteristic / minimal polynomial, Jordan-Chevalley


def charpoly(M: QMatrix) -> QPolynomial:
    """det(xI - M) by the Faddeev-LeVerrier recursion."""
    require_square(M)
    n = M.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    eye = QMatrix.identity(n)
    Mk = QMatrix.zeros(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + eye.scale(coeffs[n - k + 1])
        AM = M @ Mk
        trace = sum(AM[i, i] for i in range(n))
        coeffs[n - k] = -trace / k
    return QPolynomial(coeffs)


def minimal_polynomial(M: QMatrix) -> QPolynomial:
    """Smallest monic p with p(M) = 0, via the first linear dependency among I, M, M^2, ..."""
    require_square(M)
    n = M.rows
    powers = [QMatrix.identity(n)]
    while True:
        cur = powers[-1] @ M
        # columns: vec(I), vec(M), ..., vec(M^{k-1}); solve for vec(M^k)
        A = QMatrix.from_columns([p.entries for p in powers])
        sol = A.solve(cur.entries)
        if sol is not None:
            return QPolynomial([-c for c in sol] + [1])
        powers.append(cur)


def is_semisimple(M: QMatrix) -> bool:
    """True iff the minimal polynomial of M is squarefree."""
    require_square(M)
    return squarefree_part(charpoly(M))(M).is_zero()


def is_unipotent(M: QMatrix) -> bool:
    require_square(M)
    return ((M - QMatrix.identity(M.rows)) ** M.rows).is_zero()


def is_nilpotent(M: QMatrix) -> bool:
    require_square(M)
    return (M ** M.rows).is_zero()


def jordan_chevalley(M: QMatrix) -> tuple[QMatrix, QMatrix]:
    """Multiplicative Jordan-Chevalley decomposition M = S U = U S.

    S is semisimple, U unipotent, both polynomials in M.  Computed by the
    Newton iteration S <- S - g(S) g'(S)^{-1} on the squarefree part g of
    the characteristic polynomial, which converges in ceil(log2 n) steps.
    """
    require_square(M, "jordan_chevalley input")
    if M.det() == 0:
        raise ValueError("jordan_chevalley requires an invertible matrix")
    g = squarefree_part(charpoly(M))
    dg = g.derivative()
    S = M
    for _ in range(M.rows.bit_length() + 1):
        gS = g(S)
        if gS.is_zero():
            break
        S = S - gS @ dg(S).inverse()
    if not g(S).is_zero():  # pragma: no cover - the iteration is exact
        raise ArithmeticError("Newton iteration did not terminate")
    return S, S.inverse() @ M


# ---------------------------------------------------------------------------
# Cyclotomic test


def cyclotomic_polynomial(n: int, _cache: dict[int, QPolynomial] = {}) -> QPolynomial:
    if n in _cache:
        return _cache[n]
    p = QPolynomial([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            p = p // cyclotomic_polynomial(d)
    _cache[n] = p
    return p


def _totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def all_eigenvalues_on_unit_circle(M: QMatrix) -> bool:
    """Kronecker test: every eigenvalue of the integer matrix M has modulus 1.

    For an integer matrix the characteristic polynomial is monic in Z[x], so
    all roots lie on the unit circle iff it is a product of cyclotomic
    polynomials.  An irreducible factor of degree d can only be Phi_n with
    phi(n) = d <= dim, and phi(n) >= sqrt(n/2) bounds n by 2 dim^2.
    """
    require_square(M)
    if not M.is_integral():
        raise ValueError("unit-circle test requires integer entries")
    p = charpoly(M)
    n = M.rows
    for m in range(1, 2 * n * n + 1):
        if p.degree == 0:
            break
        if _totient(m) > p.degree:
            continue
        phi = cyclotomic_polynomial(m)
        while True:
            q, r = divmod(p, phi)
            if not r.is_zero():
                break
            p = q
    return p.degree == 0


# ---------------------------------------------------------------------------
# Conjugator solving


def _kron_system(A: QMatrix, B: QMatrix) -> QMatrix:
    """Matrix of the linear map X -> X A - B X on row-major vec(X)."""
    n = A.rows
    rows = []
    for i in range(n):
        for j in range(n):
            # (XA - BX)_{ij} = sum_k X_{ik} A_{kj} - sum_k B_{ik} X_{kj}
            row = [Fraction(0)] * (n * n)
            for k in range(n):
                row[i * n + k] += A[k, j]
                row[k * n + j] -= B[i, k]
            rows.append(row)
    return QMatrix.from_rows(rows)


def find_invertible_combination(basis: Sequence[QMatrix], search_limit: int = 5 ** 6) -> QMatrix | None:
    """An invertible element of span(basis), or None if every element is singular.

    Coefficient vectors with entries in -2..2 are tried in order of support
    size; if none is invertible the generic determinant is expanded
    symbolically, which decides the question exactly.
    """
    k = len(basis)
    if k == 0:
        return None
    n = basis[0].rows

    def combo(coeffs) -> QMatrix:
        out = QMatrix.zeros(n)
        for c, X in zip(coeffs, basis):
            if c:
                out = out + X.scale(c)
        return out

    tried = 0
    for support in range(1, k + 1):
        for idx in itertools.combinations(range(k), support):
            for vals in itertools.product((1, -1, 2, -2), repeat=support):
                coeffs = [0] * k
                for i, v in zip(idx, vals):
                    coeffs[i] = v
                X = combo(coeffs)
                if X.det() != 0:
                    return X
                tried += 1
                if tried >= search_limit:
                    return _symbolic_invertible(basis, combo)
    return _symbolic_invertible(basis, combo)


def _symbolic_invertible(basis, combo) -> QMatrix | None:
    import sympy

    k = len(basis)
    n = basis[0].rows
    ts = sympy.symbols(f"t0:{k}")
    generic = sympy.zeros(n, n)
    for t, X in zip(ts, basis):
        generic += t * sympy.Matrix(n, n, [sympy.Rational(e.numerator, e.denominator) for e in X.entries])
    d = sympy.Poly(sympy.expand(generic.det()), *ts)
    if d.is_zero:
        return None
    # a nonzero polynomial of degree <= n cannot vanish on all of {0..n}^k
    for pt in itertools.product(range(n + 1), repeat=k):
        if d.eval(dict(zip(ts, pt))) != 0:
            return combo(pt)
    raise AssertionError("unreachable: nonzero polynomial vanished on a full grid")


def conjugator_solve(A: QMatrix, B: QMatrix) -> QMatrix | None:
    """An invertible rational X with X A = B X, or None if none exists."""
    require_square(A)
    require_square(B)
    if A.rows != B.rows:
        raise ValueError(f"dimension mismatch {A.rows} vs {B.rows}")
    n = A.rows
    basis = [QMatrix(n, n, v) for v in _kron_system(A, B).nullspace()]
    X = find_invertible_combination(basis)
    if X is not None:
        assert X @ A == B @ X and X.det() != 0
    return X


# ---------------------------------------------------------------------------
# Vectors and Z-lattices in Q^n


def vec(xs: Iterable) -> tuple:
    return tuple(to_fraction(x) for x in xs)


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> tuple:
    c = to_fraction(c)
    return tuple(c * x for x in a)


def vec_denominator(v: Sequence) -> int:
    return reduce(lcm, (Fraction(x).denominator for x in v), 1)


def is_integral_vector(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def _int_hnf_rows(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form H = U A with U unimodular.

    Returns (H without zero rows, U full).  Zero rows of U A correspond to
    the last rows of U and span the integer left kernel of A.
    """
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    A = [list(r) for r in rows]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    r = 0
    for c in range(ncols):
        if r == m:
            break
        # Euclid on column c among rows r..m-1
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
                U[r] = [-a for a in U[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
            r += 1
    return A[:r], U


def hermite_basis(vectors: Sequence[Sequence]) -> list[tuple]:
    """Canonical Z-basis (rational HNF rows) of the Z-span of the vectors."""
    vectors = [vec(v) for v in vectors]
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    d = reduce(lcm, (vec_denominator(v) for v in vectors), 1)
    rows = [[int(x * d) for x in v] for v in vectors]
    H, _ = _int_hnf_rows(rows)
    return [tuple(Fraction(x, d) for x in h) for h in H]


def integer_kernel(M: QMatrix) -> list[tuple]:
    """Z-basis of {c in Z^cols : M c = 0}."""
    d = M.denominator()
    cols = [[int(M[i, j] * d) for i in range(M.rows)] for j in range(M.cols)]
    # row-style HNF of M^T: U M^T = H, zero rows of H give kernel vectors of M
    H, U = _int_hnf_rows(cols)
    r = len(H)
    return [tuple(Fraction(x) for x in u) for u in U[r:]]


def coordinates(basis: Sequence[Sequence], v: Sequence) -> tuple | None:
    """Rational coordinates of v in an independent basis, or None if v is outside the span."""
    if not basis:
        return () if not any(v) else None
    B = QMatrix.from_columns([vec(b) for b in basis])
    return B.solve(vec(v))


def span_rank(vectors: Sequence[Sequence]) -> int:
    vectors = [vec(v) for v in vectors]
    if not vectors:
        return 0
    return QMatrix.from_rows(vectors).rank()


def subspace_basis(vectors: Sequence[Sequence]) -> list[tuple]:
    """Canonical (RREF) basis of the Q-span of the vectors."""
    vectors = [vec(v) for v in vectors]
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    red, piv = QMatrix.from_rows(vectors).rref()
    return [red.row(i) for i in range(len(piv))]


def same_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    return subspace_basis(a) == subspace_basis(b)


def lattice_intersection(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[tuple]:
    """Z-basis of span_Z(a) ∩ span_Z(b), where each list is Z-independent."""
    a = [vec(v) for v in a]
    b = [vec(v) for v in b]
    if not a or not b:
        return []
    M = QMatrix.from_columns(a + [vscale(-1, v) for v in b])
    ker = integer_kernel(M)
    out = []
    for c in ker:
        w = [Fraction(0)] * len(a[0])
        for coef, v in zip(c[:len(a)], a):
            w = list(vadd(w, vscale(coef, v)))
        out.append(tuple(w))
    return hermite_basis(out)


def lattice_in_lattice(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    """span_Z(a) ⊆ span_Z(b) (b independent)."""
    for v in a:
        c = coordinates(b, v)
        if c is None or not is_integral_vector(c):
            return False
    return True


def subspace_intersection_lattice(lattice: Sequence[Sequence], subspace: Sequence[Sequence]) -> list[tuple]:
    """Z-basis of (Z-span of lattice) ∩ (Q-span of subspace)."""
    lattice = [vec(v) for v in lattice]
    if not lattice:
        return []
    n = len(lattice[0])
    sub = subspace_basis(subspace)
    if not sub:
        return []
    # annihilator of the subspace: w with <w, s> = 0 for all s
    ann = QMatrix.from_rows(sub).nullspace()
    if not ann:
        return hermite_basis(lattice)
    # coefficients c with sum c_i lattice_i in subspace
    A = QMatrix.from_rows(ann) @ QMatrix.from_columns(lattice)
    ker = integer_kernel(A)
    out = []
    for c in ker:
        w = [Fraction(0)] * n
        for coef, v in zip(c, lattice):
            w = list(vadd(w, vscale(coef, v)))
        out.append(tuple(w))
    return hermite_basis(out)
