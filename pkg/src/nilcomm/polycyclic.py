"""Solvable lattices of the form exp(L) ⋊ Z^r.

A :class:`LatticeSpec` describes a lattice Γ = θ ⋊ A where θ = exp(L) is a
lattice in a rational nilpotent Lie group (given in log coordinates by the
BCH-closed Z-lattice L) and A ≅ Z^r is generated by pairwise commuting
Lie-algebra automorphisms preserving L.  Elements are pairs
(log of unipotent part, torus exponent vector).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .lie import (
    LogLattice,
    NilLieAlgebra,
    bch,
    is_bch_closed,
    lattice_contains,
    lattice_index_scale,
    log_unipotent,
)
from .linalg import (
    QMatrix,
    hermite_basis,
    is_integral_vector,
    is_unipotent,
    jordan_chevalley,
    subspace_basis,
    subspace_intersection_lattice,
    vec,
    vec_denominator,
    vscale,
    vsub,
)


class InvalidSpec(ValueError):
    pass


class LevelSearchError(RuntimeError):
    """A search for a congruence level exceeded its cap."""


@dataclass(frozen=True)
class TorusGen:
    action: QMatrix
    label: str = ""


@dataclass(frozen=True)
class GroupElement:
    uni: tuple
    torus: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "uni", vec(self.uni))
        object.__setattr__(self, "torus", tuple(int(t) for t in self.torus))

    def literal(self) -> str:
        return ",".join(str(x) for x in self.uni) + " | " + ",".join(str(t) for t in self.torus)


@dataclass(frozen=True)
class CongruenceLevel:
    """The subgroup exp(uni_scale L) ⋊ (torus_scale Z)^r."""

    uni_scale: int = 1
    torus_scale: int = 1

    def __post_init__(self):
        if int(self.uni_scale) < 1 or int(self.torus_scale) < 1:
            raise ValueError("congruence level scales must be positive")
        object.__setattr__(self, "uni_scale", int(self.uni_scale))
        object.__setattr__(self, "torus_scale", int(self.torus_scale))

    def refine(self, other: "CongruenceLevel") -> "CongruenceLevel":
        """Coarsest level contained in both."""
        return CongruenceLevel(lcm(self.uni_scale, other.uni_scale), lcm(self.torus_scale, other.torus_scale))

    def contains_level(self, other: "CongruenceLevel") -> bool:
        return other.uni_scale % self.uni_scale == 0 and other.torus_scale % self.torus_scale == 0


@dataclass(frozen=True)
class LatticeSpec:
    algebra: NilLieAlgebra
    uni_lattice: LogLattice
    torus_gens: tuple = ()
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "torus_gens", tuple(self.torus_gens))
        a, L = self.algebra, self.uni_lattice
        if L.algebra != a:
            raise InvalidSpec("lattice lives in a different algebra")
        if not is_bch_closed(L):
            raise InvalidSpec("unipotent lattice is not closed under the BCH product; "
                              "use 1/2-corrected log coordinates")
        for g in self.torus_gens:
            A = g.action
            if not A.is_square or A.rows != a.dim:
                raise InvalidSpec(f"torus generator {g.label!r} has the wrong size")
            if not a.is_automorphism(A):
                raise InvalidSpec(f"torus generator {g.label!r} is not a Lie algebra automorphism")
            Ainv = A.inverse()
            for b in L.basis:
                if not lattice_contains(L, A @ b) or not lattice_contains(L, Ainv @ b):
                    raise InvalidSpec(f"torus generator {g.label!r} does not preserve the unipotent lattice")
        for g, h in itertools.combinations(self.torus_gens, 2):
            if g.action @ h.action != h.action @ g.action:
                raise InvalidSpec(f"torus generators {g.label!r} and {h.label!r} do not commute")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def rank(self) -> int:
        return len(self.torus_gens)

    def identity(self) -> GroupElement:
        return GroupElement(self.algebra.zero(), (0,) * self.rank)

    def torus_matrix(self, t: Sequence[int]) -> QMatrix:
        t = tuple(int(x) for x in t)
        key = ("torus", t)
        if key not in self._cache:
            M = QMatrix.identity(self.dim)
            for e, g in zip(t, self.torus_gens):
                if e:
                    M = M @ (g.action ** e)
            self._cache[key] = M
        return self._cache[key]

    def check(self, g: GroupElement) -> GroupElement:
        if len(g.uni) != self.dim or len(g.torus) != self.rank:
            raise ValueError(f"malformed element for spec {self.name!r}: "
                             f"expected {self.dim} log coordinates and {self.rank} torus exponents")
        return g

    def contains(self, g: GroupElement) -> bool:
        """g lies in Γ itself (not just the ambient rational group)."""
        self.check(g)
        return lattice_contains(self.uni_lattice, g.uni)

    def in_level(self, g: GroupElement, level: CongruenceLevel) -> bool:
        self.check(g)
        return (all(t % level.torus_scale == 0 for t in g.torus)
                and lattice_contains(self.uni_lattice.scaled(level.uni_scale), g.uni))

    def level_generators(self, level: CongruenceLevel) -> list[GroupElement]:
        """Scaled lattice basis first, then scaled torus generators."""
        zero_t = (0,) * self.rank
        gens = [GroupElement(vscale(level.uni_scale, b), zero_t) for b in self.uni_lattice.basis]
        for j in range(self.rank):
            t = [0] * self.rank
            t[j] = level.torus_scale
            gens.append(GroupElement(self.algebra.zero(), t))
        return gens


def multiply(spec: LatticeSpec, g: GroupElement, h: GroupElement) -> GroupElement:
    """(u1, t1)(u2, t2) = (bch(u1, t1 . u2), t1 + t2)."""
    spec.check(g)
    spec.check(h)
    moved = spec.torus_matrix(g.torus) @ h.uni if any(g.torus) else h.uni
    return GroupElement(bch(spec.algebra, g.uni, moved), tuple(a + b for a, b in zip(g.torus, h.torus)))


def inverse(spec: LatticeSpec, g: GroupElement) -> GroupElement:
    spec.check(g)
    neg_t = tuple(-t for t in g.torus)
    u = spec.torus_matrix(neg_t) @ g.uni if any(g.torus) else g.uni
    return GroupElement(vscale(-1, u), neg_t)


def power(spec: LatticeSpec, g: GroupElement, k: int) -> GroupElement:
    if k < 0:
        g, k = inverse(spec, g), -k
    result = spec.identity()
    while k:
        if k & 1:
            result = multiply(spec, result, g)
        g = multiply(spec, g, g)
        k >>= 1
    return result


def conjugate(spec: LatticeSpec, g: GroupElement, h: GroupElement) -> GroupElement:
    """g h g^{-1}."""
    return multiply(spec, multiply(spec, g, h), inverse(spec, g))


# ---------------------------------------------------------------------------


def fitting_subgroup(spec: LatticeSpec) -> tuple[LogLattice, list[int]]:
    """The unipotent lattice plus the torus generators acting unipotently."""
    return spec.uni_lattice, [j for j, g in enumerate(spec.torus_gens) if is_unipotent(g.action)]


def hirsch_rank(spec: LatticeSpec) -> int:
    return spec.dim + spec.rank


def shadow_algebra(spec: LatticeSpec) -> NilLieAlgebra:
    """Lie algebra of the unipotent hull: n ⊕ Q^r with [t_j, X] = log(unipotent part of A_j) X."""
    n, r = spec.dim, spec.rank
    key = ("shadow_algebra",)
    if key in spec._cache:
        return spec._cache[key]
    brackets = []
    for i in range(n):
        for j in range(i + 1, n):
            for k, c in enumerate(spec.algebra.structure[i][j]):
                if c:
                    brackets.append((i, j, k, c))
    for t, g in enumerate(spec.torus_gens):
        _, U = jordan_chevalley(g.action)
        N = log_unipotent(U)
        for i in range(n):
            for k in range(n):
                if N[k, i]:
                    brackets.append((n + t, i, k, N[k, i]))
    alg = NilLieAlgebra.from_brackets(n + r, brackets)
    spec._cache[key] = alg
    return alg


def unipotent_shadow(spec: LatticeSpec) -> LogLattice:
    """Log-lattice generated by Fitt and the unipotent Jordan parts of the torus generators.

    Each torus generator contributes one new log direction (its unipotent
    part in the hull), acting on the Fitting algebra by the logarithm of the
    unipotent Jordan part of its action.  With no torus generators the
    result is the unipotent lattice itself.
    """
    if spec.rank == 0:
        return spec.uni_lattice
    alg = shadow_algebra(spec)
    n, r = spec.dim, spec.rank
    basis = [tuple(b) + (Fraction(0),) * r for b in spec.uni_lattice.basis]
    basis += [alg.basis_vector(n + t) for t in range(r)]
    return LogLattice(alg, tuple(basis))


def shadow_actions(spec: LatticeSpec, shadow: LogLattice) -> list[QMatrix]:
    """Actions of the torus generators on the shadow's algebra."""
    extra = shadow.algebra.dim - spec.dim
    if extra == 0:
        return [g.action for g in spec.torus_gens]
    if extra != spec.rank:
        raise ValueError("shadow algebra does not match the lattice spec")
    return [QMatrix.block_diag(g.action, QMatrix.identity(extra)) for g in spec.torus_gens]


# ---------------------------------------------------------------------------
# Congruence levels for commutators f (p . f^{-1})


def _order_mod(A: QMatrix, N: int, cap: int) -> int:
    """Smallest e >= 1 with A^e integral and congruent to I mod N."""
    n = A.rows
    P = QMatrix.identity(n)
    for e in range(1, cap + 1):
        P = P @ A
        if P.is_integral() and all((P[i, j] - (1 if i == j else 0)) % N == 0
                                   for i in range(n) for j in range(n)):
            return e
    raise LevelSearchError(f"no power of the torus action up to {cap} is congruent to I mod {N}")


def _simplex(n: int, d: int):
    """Nonnegative integer vectors of length n with entry sum at most d."""
    for total in range(d + 1):
        for cut in itertools.combinations(range(total + n - 1), n - 1):
            prev = -1
            out = []
            for c in cut + (total + n - 1,):
                out.append(c - prev - 1)
                prev = c
            yield out


@dataclass(frozen=True)
class LevelReport:
    level: CongruenceLevel
    k: int
    ell: int
    multiplier: int
    exhaustive_checked: int
    sampled_checked: int


def _commutator_log(alg: NilLieAlgebra, f, M: QMatrix) -> tuple:
    return bch(alg, f, vscale(-1, M @ f))


def verify_level(spec: LatticeSpec, f: Sequence, shadow: LogLattice, level: CongruenceLevel,
                 rng: random.Random | None = None, samples: int = 50) -> tuple[int, int, list[tuple]]:
    """Check bch(f, -(M_p f)) ∈ shadow on generator powers, pairwise products and random deep words.

    Returns (#exhaustive checks, #sampled checks, failing exponent vectors).
    """
    alg = shadow.algebra
    f = _pad(f, alg.dim)
    actions = shadow_actions(spec, shadow)
    r = len(actions)
    s = level.torus_scale

    def M(p):
        out = QMatrix.identity(alg.dim)
        for e, A in zip(p, actions):
            if e:
                out = out @ (A ** e)
        return out

    words = []
    for j in range(r):
        for sign in (1, -1):
            words.append(tuple(sign * s if i == j else 0 for i in range(r)))
    for j, k in itertools.combinations_with_replacement(range(r), 2):
        words.append(tuple(s * ((i == j) + (i == k)) for i in range(r)))
    failures = [p for p in words if not lattice_contains(shadow, _commutator_log(alg, f, M(p)))]
    sampled = 0
    if r:
        rng = rng or random.Random(0)
        for _ in range(samples):
            p = tuple(s * rng.randint(-4, 4) for _ in range(r))
            if not lattice_contains(shadow, _commutator_log(alg, f, M(p))):
                failures.append(p)
            sampled += 1
    return len(words), sampled, failures


def _pad(f: Sequence, dim: int) -> tuple:
    f = vec(f)
    if len(f) > dim:
        raise ValueError("vector longer than the shadow algebra")
    return f + (Fraction(0),) * (dim - len(f))


def commutator_level(spec: LatticeSpec, f: Sequence, shadow: LogLattice | Sequence | None = None,
                     rng: random.Random | None = None, cap: int = 10_000, samples: int = 50,
                     ) -> LevelReport:
    """A congruence level on which f (p . f^{-1}) lands in the shadow.

    The level is N = k * ell * m where k scales the standard lattice into the
    shadow, ell clears the denominators of f, and m is the first multiplier
    that passes both a certificate and the finite verification suite.  The
    certificate: for M_p ≡ I mod N, Y_p = -X + W with W in a lattice Λ
    (computed below), and bch(X, -X + W) is a polynomial of degree at most
    the nilpotency class in the coordinates of W, so membership on the
    simplex of Λ-coordinates with entry sum <= class implies membership on
    all of Λ.  The torus scale is the lcm of N and the orders of the
    actions modulo N.
    """
    if shadow is None:
        shadow = unipotent_shadow(spec)
    elif not isinstance(shadow, LogLattice):
        vectors = [vec(v) for v in shadow]
        alg_guess = spec.algebra
        if not vectors or len(vectors[0]) != alg_guess.dim:
            raise ValueError("shadow vectors must live in the spec's algebra")
        try:
            shadow = LogLattice(alg_guess, tuple(vectors))
        except ValueError as exc:
            raise ValueError("shadow is not full rank") from exc
    alg = shadow.algebra
    X = _pad(f, alg.dim)
    actions = shadow_actions(spec, shadow)
    n = alg.dim
    standard = [alg.basis_vector(i) for i in range(n)]
    k = lattice_index_scale(standard, shadow.basis)
    ell = vec_denominator(X)
    content = _content(X)

    # subspace swept out by (M_p - I) X
    krylov = subspace_basis([X])
    while True:
        grown = subspace_basis(krylov + [A @ v for A in actions for v in krylov])
        if len(grown) == len(krylov):
            break
        krylov = grown
    moving = subspace_basis([vsub(A @ v, v) for A in actions for v in krylov])

    for m in range(1, cap + 1):
        N = k * ell * m
        # W = -N K X with K integral: W ∈ N * content * Z^n, intersected with the moving subspace
        step = N * content
        Lam = subspace_intersection_lattice([vscale(step, e) for e in standard], moving) if moving else []
        ok = True
        for a in (_simplex(len(Lam), alg.nilpotency_class) if Lam else [[]]):
            W = tuple(sum((c * lam[i] for c, lam in zip(a, Lam)), Fraction(0)) for i in range(n)) if Lam \
                else alg.zero()
            if not lattice_contains(shadow, bch(alg, X, tuple(w - x for w, x in zip(W, X)))):
                ok = False
                break
        if not ok:
            continue
        torus_scale = N
        for A in actions:
            torus_scale = lcm(torus_scale, _order_mod(A, N, cap))
        level = CongruenceLevel(N, torus_scale)
        exhaustive, sampled, failures = verify_level(spec, X, shadow, level, rng, samples)
        if not failures:
            return LevelReport(level, k, ell, m, exhaustive, sampled)
    raise LevelSearchError(f"no congruence level found with multiplier up to {cap} "
                           f"(k={k}, ell={ell})")


def _content(v: Sequence) -> Fraction:
    """gcd of the coordinates of a rational vector (as a rational number)."""
    from math import gcd

    d = vec_denominator(v)
    g = 0
    for x in v:
        g = gcd(g, int(x * d))
    return Fraction(g, d) if g else Fraction(1)


def lattice_basis_is_integral(L: LogLattice) -> bool:
    return all(is_integral_vector(b) for b in L.basis)


def canonical_lattice(vectors: Sequence[Sequence]) -> list[tuple]:
    return hermite_basis(vectors)
