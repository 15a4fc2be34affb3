"""Commensurations as partial automorphisms between congruence subgroups.

A commensuration is stored as a representative: a congruence level of the
source lattice plus the images of that level's generators.  Every valid
representative is determined by a Lie automorphism T (its action on log
coordinates of the unipotent part) together with the images (w_j, s_j) of
the scaled torus generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Sequence

from .lie import (
    LogLattice,
    NilLieAlgebra,
    adjoint_exp,
    bch,
    lattice_index_scale,
    upper_central_series,
)
from .linalg import (
    QMatrix,
    coordinates,
    hermite_basis,
    is_integral_vector,
    lattice_in_lattice,
    lattice_intersection,
    same_span,
    span_rank,
    subspace_basis,
    subspace_intersection_lattice,
    vec,
    vscale,
)
from .polycyclic import (
    CongruenceLevel,
    GroupElement,
    LatticeSpec,
    LevelSearchError,
    TorusGen,
    conjugate,
    multiply,
    power,
)

DEFAULT_CAP = 1024


class InvalidCommensuration(ValueError):
    pass


class WitnessFailure(ValueError):
    """A commensuristic-ness hypothesis fails for the given representative."""


@dataclass(frozen=True)
class PartialAutomorphism:
    spec: LatticeSpec
    source: CongruenceLevel
    gen_images: tuple
    check_homomorphism: bool = field(default=True, compare=False, repr=False)
    _derived: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "gen_images", tuple(self.spec.check(g) for g in self.gen_images))
        spec, n, r = self.spec, self.spec.dim, self.spec.rank
        if len(self.gen_images) != n + r:
            raise InvalidCommensuration(f"expected {n + r} generator images, got {len(self.gen_images)}")
        uni_imgs = self.gen_images[:n]
        if any(any(g.torus) for g in uni_imgs):
            raise InvalidCommensuration("unipotent generators must map to unipotent elements")
        src = QMatrix.from_columns([vscale(self.source.uni_scale, b) for b in spec.uni_lattice.basis])
        T = QMatrix.from_columns([g.uni for g in uni_imgs]) @ src.inverse()
        self._derived["T"] = T
        for g in self.gen_images:
            if not spec.contains(g):
                raise InvalidCommensuration(f"generator image {g.literal()} lies outside the lattice")
        if T.det() == 0:
            raise InvalidCommensuration("unipotent part is not injective")
        if not spec.algebra.is_automorphism(T):
            raise InvalidCommensuration("unipotent part does not preserve brackets")
        tor = self.gen_images[n:]
        if r and QMatrix.from_columns([g.torus for g in tor]).rank() < r:
            raise InvalidCommensuration("torus images are not independent")
        if self.check_homomorphism:
            self._check_relations(T, tor)

    def _check_relations(self, T: QMatrix, tor: Sequence[GroupElement]) -> None:
        spec, Nt = self.spec, self.source.torus_scale
        for g, h in itertools.combinations(tor, 2):
            if multiply(spec, g, h) != multiply(spec, h, g):
                raise InvalidCommensuration("images of torus generators do not commute")
        for j, g in enumerate(tor):
            lhs = T @ (spec.torus_gens[j].action ** Nt)
            rhs = adjoint_exp(spec.algebra, g.uni) @ spec.torus_matrix(g.torus) @ T
            if lhs != rhs:
                raise InvalidCommensuration(f"conjugation relation fails for torus generator {j}")

    # -- derived data

    @property
    def T(self) -> QMatrix:
        return self._derived["T"]

    @property
    def torus_images(self) -> tuple:
        return self.gen_images[self.spec.dim:]

    @property
    def torus_matrix(self) -> QMatrix:
        """Columns s_j: torus parts of the images of the scaled torus generators."""
        r = self.spec.rank
        if not r:
            return QMatrix.zeros(0, 0)
        return QMatrix.from_columns([g.torus for g in self.torus_images])

    def in_source(self, g: GroupElement) -> bool:
        return self.spec.in_level(g, self.source)

    def __call__(self, g: GroupElement) -> GroupElement:
        """Image of an element of the source subgroup."""
        spec = self.spec
        if not self.in_source(g):
            raise ValueError(f"{g.literal()} is not in the source level {self.source}")
        out = GroupElement(self.T @ g.uni, (0,) * spec.rank)
        for j, t in enumerate(g.torus):
            if t:
                out = multiply(spec, out, power(spec, self.torus_images[j], t // self.source.torus_scale))
        return out

    def preimage(self, g: GroupElement) -> GroupElement | None:
        """The unique rational preimage of g, or None if its torus part is not hit."""
        spec, Nt = self.spec, self.source.torus_scale
        k = (0,) * spec.rank
        if spec.rank:
            sol = self.torus_matrix.solve(g.torus)
            if sol is None or not is_integral_vector(sol):
                return None
            k = tuple(int(x) for x in sol)
        head = GroupElement(spec.algebra.zero(), (0,) * spec.rank)
        for j, kj in enumerate(k):
            if kj:
                head = multiply(spec, head, power(spec, self.torus_images[j], kj))
        # g = (T u, 0) * head
        u = self.T.inverse() @ bch(spec.algebra, g.uni, vscale(-1, head.uni))
        return GroupElement(u, tuple(Nt * x for x in k))

    def in_image(self, g: GroupElement) -> bool:
        pre = self.preimage(g)
        return pre is not None and self.in_source(pre)

    def witness_level(self, cap: int = DEFAULT_CAP) -> CongruenceLevel:
        """A congruence level contained in the image."""
        if "witness" in self._derived:
            return self._derived["witness"]
        spec = self.spec
        image_lattice = [self.T @ vscale(self.source.uni_scale, b) for b in spec.uni_lattice.basis]
        Wu = lattice_index_scale(spec.uni_lattice, image_lattice)
        Wt = 1
        for j in range(spec.rank):
            for w in range(1, cap + 1):
                e = tuple(w if i == j else 0 for i in range(spec.rank))
                if self.in_image(GroupElement(spec.algebra.zero(), e)):
                    Wt = lcm(Wt, w)
                    break
            else:
                raise LevelSearchError(f"image contains no power of torus generator {j} up to {cap}")
        level = CongruenceLevel(Wu, Wt)
        self._derived["witness"] = level
        return level

    def literal(self) -> str:
        return "\n".join(g.literal() for g in self.gen_images)


def from_linear(spec: LatticeSpec, level: CongruenceLevel, T: QMatrix,
                torus_image: Callable[[tuple], GroupElement]) -> PartialAutomorphism:
    """Assemble a representative from T and a rule for the scaled torus generators."""
    imgs = [GroupElement(T @ vscale(level.uni_scale, b), (0,) * spec.rank) for b in spec.uni_lattice.basis]
    for j in range(spec.rank):
        imgs.append(torus_image(tuple(level.torus_scale if i == j else 0 for i in range(spec.rank))))
    return PartialAutomorphism(spec, level, tuple(imgs))


def _clearing_multiple(T: QMatrix, vectors: Sequence[Sequence], target: LogLattice) -> int:
    """Smallest a >= 1 with T(a v) in the target lattice for every v."""
    a = 1
    for v in vectors:
        for c in target.coords(T @ v):
            a = lcm(a, Fraction(c).denominator)
    return a


def find_level(spec: LatticeSpec, T: QMatrix, torus_image: Callable[[tuple], GroupElement],
               cap: int = DEFAULT_CAP, base: CongruenceLevel = CongruenceLevel()) -> CongruenceLevel:
    """Coarsest refinement of ``base`` on which T and the torus rule land in the lattice."""
    L = spec.uni_lattice
    Nu = base.uni_scale * _clearing_multiple(T, [vscale(base.uni_scale, b) for b in L.basis], L)
    Nt = base.torus_scale
    for j in range(spec.rank):
        for b in range(1, cap + 1):
            e = tuple(base.torus_scale * b if i == j else 0 for i in range(spec.rank))
            if spec.contains(torus_image(e)):
                Nt = lcm(Nt, base.torus_scale * b)
                break
        else:
            raise LevelSearchError(f"no torus scale up to {cap} for generator {j}")
    return CongruenceLevel(Nu, Nt)


def identity(spec: LatticeSpec) -> PartialAutomorphism:
    return from_linear(spec, CongruenceLevel(), QMatrix.identity(spec.dim),
                       lambda t: GroupElement(spec.algebra.zero(), t))


def inner(spec: LatticeSpec, g: GroupElement, cap: int = DEFAULT_CAP) -> PartialAutomorphism:
    """Conjugation by g, an element of the rational group (not necessarily of Γ)."""
    spec.check(g)
    T = adjoint_exp(spec.algebra, g.uni) @ spec.torus_matrix(g.torus)

    def rule(t):
        return conjugate(spec, g, GroupElement(spec.algebra.zero(), t))

    return from_linear(spec, find_level(spec, T, rule, cap), T, rule)


def automorphism(spec: LatticeSpec, T: QMatrix, cap: int = DEFAULT_CAP) -> PartialAutomorphism:
    """The commensuration acting by T on log coordinates and fixing the torus generators."""
    def rule(t):
        return GroupElement(spec.algebra.zero(), t)

    return from_linear(spec, find_level(spec, T, rule, cap), T, rule)


def _same_spec(a: PartialAutomorphism, b: PartialAutomorphism) -> None:
    if a.spec != b.spec:
        raise ValueError("commensurations belong to different lattices")


def equivalent(phi: PartialAutomorphism, psi: PartialAutomorphism) -> bool:
    """φ and ψ agree on the generators of the coarsest common refinement of their sources."""
    _same_spec(phi, psi)
    if phi.T != psi.T:
        return False
    level = phi.source.refine(psi.source)
    spec = phi.spec
    for j in range(spec.rank):
        g = GroupElement(spec.algebra.zero(), tuple(level.torus_scale if i == j else 0 for i in range(spec.rank)))
        if phi(g) != psi(g):
            return False
    return True


def compose(phi2: PartialAutomorphism, phi1: PartialAutomorphism, cap: int = DEFAULT_CAP) -> PartialAutomorphism:
    """Representative of [φ2] ∘ [φ1]: φ2 ∘ φ1 restricted to a level mapped into φ2's source."""
    _same_spec(phi1, phi2)
    spec = phi1.spec
    L = spec.uni_lattice
    Mu = phi1.source.uni_scale * _clearing_multiple(
        phi1.T, [vscale(phi1.source.uni_scale, b) for b in L.basis], L.scaled(phi2.source.uni_scale))
    Mt = phi1.source.torus_scale
    for j in range(spec.rank):
        g = phi1.torus_images[j]
        # the torus part alone forces the exponent to be a multiple of t0
        t0 = phi2.source.torus_scale // gcd(phi2.source.torus_scale, *g.torus)
        h = power(spec, g, t0)
        acc = h
        for b in range(1, cap + 1):
            if phi2.in_source(acc):
                Mt = lcm(Mt, phi1.source.torus_scale * t0 * b)
                break
            acc = multiply(spec, acc, h)
        else:
            raise LevelSearchError(f"no torus level up to {cap} maps into the second source")
    level = CongruenceLevel(Mu, Mt)
    return from_linear(spec, level, phi2.T @ phi1.T,
                       lambda t: phi2(phi1(GroupElement(spec.algebra.zero(), t))))


def invert(phi: PartialAutomorphism, cap: int = DEFAULT_CAP) -> PartialAutomorphism:
    """Representative of [φ]⁻¹ with source a congruence level inside φ's image."""
    spec = phi.spec
    level = phi.witness_level(cap)
    return from_linear(spec, level, phi.T.inverse(),
                       lambda t: phi.preimage(GroupElement(spec.algebra.zero(), t)))


# ---------------------------------------------------------------------------
# Subgroup classes


@dataclass(frozen=True)
class SubgroupClass:
    """A named subgroup: its log lattice D (inside L) and a set E of torus generators.

    Kinds: ``whole``; ``fitting``; ``center`` (k-th term of the upper central
    series of the unipotent lattice); ``lower`` (k-th term of the lower central
    series of the unipotent lattice, exact in class at most 2); ``explicit``.
    """

    kind: str
    k: int = 1
    basis: tuple = ()
    torus: tuple = ()

    def __post_init__(self):
        if self.kind not in {"whole", "fitting", "center", "lower", "explicit"}:
            raise ValueError(f"unknown subgroup kind {self.kind!r}")
        object.__setattr__(self, "basis", tuple(vec(b) for b in self.basis))
        object.__setattr__(self, "torus", tuple(sorted(set(int(j) for j in self.torus))))

    @classmethod
    def explicit(cls, basis: Sequence[Sequence], torus: Sequence[int] = ()) -> "SubgroupClass":
        return cls("explicit", basis=tuple(hermite_basis(basis)), torus=tuple(torus))

    def resolve(self, spec: LatticeSpec) -> tuple[list[tuple], tuple]:
        L = spec.uni_lattice
        if self.kind == "whole":
            D, E = list(L.basis), tuple(range(spec.rank))
        elif self.kind == "fitting":
            from .polycyclic import fitting_subgroup

            fit, E = fitting_subgroup(spec)
            D, E = list(fit.basis), tuple(E)
        elif self.kind == "center":
            series = upper_central_series(spec.algebra)
            if not 1 <= self.k < len(series):
                raise ValueError(f"upper central series has no term {self.k}")
            D, E = subspace_intersection_lattice(L.basis, series[self.k]), ()
        elif self.kind == "lower":
            if self.k < 1:
                raise ValueError("lower central series starts at 1")
            D = list(L.basis)
            for _ in range(self.k - 1):
                D = [spec.algebra.bracket(a, b) for a in L.basis for b in D]
                D = [v for v in D if any(v)]
            D, E = (hermite_basis(D) if D else []), ()
        else:
            D, E = list(self.basis), self.torus
            if D and not lattice_in_lattice(D, L.basis):
                raise ValueError("explicit subgroup is not contained in the lattice")
        if any(j >= spec.rank for j in E):
            raise ValueError("subgroup refers to a missing torus generator")
        if E and span_rank(D) < spec.dim:
            raise ValueError("subgroups with torus generators must contain the whole unipotent lattice")
        return hermite_basis(D) if D else [], tuple(E)


def _coord_span(E: Sequence[int], r: int) -> list[tuple]:
    return [tuple(Fraction(int(i == j)) for i in range(r)) for j in E]


def _theta_parts(phi: PartialAutomorphism, D: list[tuple]) -> tuple[list[tuple], list[tuple]]:
    """T(D ∩ N_u L) and T(N_u L) ∩ D."""
    spec = phi.spec
    src = [vscale(phi.source.uni_scale, b) for b in spec.uni_lattice.basis]
    if not D:
        return [], []
    first = hermite_basis([phi.T @ v for v in lattice_intersection(D, src)] or [spec.algebra.zero()])
    second = lattice_intersection([phi.T @ v for v in src], D)
    return [v for v in first if any(v)], second


def acts_on_class(phi: PartialAutomorphism, delta: SubgroupClass) -> SubgroupClass:
    """The class of φ(Δ ∩ Γ₁), as an explicit subgroup."""
    spec = phi.spec
    D, E = delta.resolve(spec)
    theta, _ = _theta_parts(phi, D)
    Eimg: set[int] = set()
    for j in E:
        Eimg.update(i for i, x in enumerate(phi.torus_images[j].torus) if x)
    if E and not same_span([phi.torus_images[j].torus for j in E], _coord_span(sorted(Eimg), spec.rank)):
        raise WitnessFailure("torus part of the image is not a coordinate subgroup")
    return SubgroupClass("explicit", basis=tuple(theta), torus=tuple(sorted(Eimg)))


def commensurable(spec: LatticeSpec, a: SubgroupClass, b: SubgroupClass) -> bool:
    Da, Ea = a.resolve(spec)
    Db, Eb = b.resolve(spec)
    return same_span(Da, Db) and Ea == Eb


def is_commensuristic_witness(phi: PartialAutomorphism, delta: SubgroupClass) -> bool:
    """[φ]·[Δ] = [Δ] for this representative."""
    spec = phi.spec
    D, E = delta.resolve(spec)
    if not same_span([phi.T @ v for v in D], D):
        return False
    return same_span([phi.torus_images[j].torus for j in E], _coord_span(E, spec.rank))


@dataclass(frozen=True)
class StrongWitness:
    holds: bool
    image_generators: list
    target_generators: list
    torus_image: list = field(default_factory=list)
    torus_target: list = field(default_factory=list)


def strong_witness(phi: PartialAutomorphism, delta: SubgroupClass) -> StrongWitness:
    """Compare φ(Γ₁ ∩ Δ) with Γ₂ ∩ Δ where Γ₂ = φ(Γ₁)."""
    spec = phi.spec
    D, E = delta.resolve(spec)
    image, target = _theta_parts(phi, D)
    holds = hermite_basis(image) == hermite_basis(target) if image or target else True
    # φ(Γ₁ ∩ Δ) must sit inside Δ
    if image and not lattice_in_lattice(image, D):
        holds = False
    t_img: list = []
    t_tgt: list = []
    if spec.rank:
        S_all = [phi.torus_images[j].torus for j in range(spec.rank)]
        t_img = hermite_basis([S_all[j] for j in E]) if E else []
        t_tgt = lattice_intersection(S_all, _coord_span(E, spec.rank)) if E else []
        if any(w for j in E for i, w in enumerate(S_all[j]) if i not in E):
            holds = False
        if t_img != t_tgt:
            holds = False
    return StrongWitness(holds, image, target, t_img, t_tgt)


def is_strongly_commensuristic_witness(phi: PartialAutomorphism, delta: SubgroupClass) -> bool:
    return strong_witness(phi, delta).holds


# ---------------------------------------------------------------------------
# Induced maps


def _coordinate_algebra(a: NilLieAlgebra, basis: Sequence[Sequence]) -> NilLieAlgebra:
    """The subalgebra spanned by ``basis``, in coordinates with respect to it."""
    brackets = []
    for i, x in enumerate(basis):
        for j in range(i + 1, len(basis)):
            c = coordinates(basis, a.bracket(x, basis[j]))
            if c is None:
                raise WitnessFailure("subgroup log lattice does not span a subalgebra")
            brackets.extend((i, j, k, v) for k, v in enumerate(c) if v)
    return NilLieAlgebra.from_brackets(len(basis), brackets)


def restrict(phi: PartialAutomorphism, delta: SubgroupClass,
             cap: int = DEFAULT_CAP) -> tuple[PartialAutomorphism, LatticeSpec]:
    """The induced commensuration of Δ, together with the lattice spec of Δ."""
    if not is_commensuristic_witness(phi, delta):
        raise WitnessFailure("Δ is not carried to a commensurable subgroup by this representative")
    spec = phi.spec
    D, E = delta.resolve(spec)
    if span_rank(D) == spec.dim:
        # Δ = exp(L') ⋊ Z^E with L' of finite index in L; keep the algebra and coordinates
        sub = LatticeSpec(spec.algebra, LogLattice(spec.algebra, tuple(D)),
                          tuple(spec.torus_gens[j] for j in E), spec.name + "|restricted")
        T = phi.T

        def rule(t):
            full = [0] * spec.rank
            for j, x in zip(E, t):
                full[j] = x
            img = phi(GroupElement(spec.algebra.zero(), tuple(full)))
            return GroupElement(img.uni, tuple(img.torus[j] for j in E))

        base = CongruenceLevel(lattice_index_scale(D, spec.uni_lattice.scaled(phi.source.uni_scale).basis),
                               phi.source.torus_scale)
        level = find_level(sub, T, rule, cap, base)
        return from_linear(sub, level, T, rule), sub
    alg = _coordinate_algebra(spec.algebra, D)
    T_sub = QMatrix.from_columns([coordinates(D, phi.T @ d) for d in D])
    sub = LatticeSpec(alg, LogLattice.standard(alg), (), spec.name + "|restricted")
    meet = lattice_intersection(D, spec.uni_lattice.scaled(phi.source.uni_scale).basis)
    base = CongruenceLevel(lattice_index_scale(D, meet), 1)
    level = find_level(sub, T_sub, lambda t: GroupElement(alg.zero(), ()), cap, base)
    return from_linear(sub, level, T_sub, lambda t: GroupElement(alg.zero(), ())), sub


def quotient(phi: PartialAutomorphism, delta: SubgroupClass,
             cap: int = DEFAULT_CAP) -> tuple[PartialAutomorphism, LatticeSpec]:
    """The induced commensuration of Γ/Δ for a strongly commensuristic normal Δ."""
    if not is_strongly_commensuristic_witness(phi, delta):
        raise WitnessFailure("Δ is not strongly commensuristic for this representative")
    spec = phi.spec
    D, E = delta.resolve(spec)
    r = spec.rank
    if span_rank(D) == spec.dim:
        # Γ/Δ is the free abelian group on the remaining torus generators
        keep = [j for j in range(r) if j not in E]
        alg = NilLieAlgebra.abelian(len(keep))
        sub = LatticeSpec(alg, LogLattice.standard(alg), (), spec.name + "|quotient")
        if not keep:
            return identity(sub), sub
        cols = [[Fraction(phi.torus_images[j].torus[i], phi.source.torus_scale) for i in keep] for j in keep]
        T = QMatrix.from_columns(cols)
        level = find_level(sub, T, lambda t: GroupElement(alg.zero(), ()), cap,
                           CongruenceLevel(phi.source.torus_scale, 1))
        return from_linear(sub, level, T, lambda t: GroupElement(alg.zero(), ())), sub
    if E:
        raise WitnessFailure("quotients by subgroups mixing torus and unipotent parts are not supported")
    a = spec.algebra
    V = subspace_basis(D)
    # normality: V is an ideal preserved by every torus generator
    if not same_span(V + [a.bracket(x, v) for x in (a.basis_vector(i) for i in range(a.dim)) for v in V], V):
        raise WitnessFailure("Δ is not normal: its span is not an ideal")
    if any(not same_span([g.action @ v for v in V], V) for g in spec.torus_gens):
        raise WitnessFailure("Δ is not normal: a torus generator moves its span")
    # complete V by standard basis vectors; quotient coordinates are the coefficients on the complement
    comp: list[tuple] = []
    for i in range(a.dim):
        e = a.basis_vector(i)
        if span_rank(V + comp + [e]) > len(V) + len(comp):
            comp.append(e)
    full = QMatrix.from_columns(V + comp).inverse()
    m = len(V)

    def proj(x):
        c = full @ x
        return c[m:]

    brackets = []
    for i, x in enumerate(comp):
        for j in range(i + 1, len(comp)):
            brackets.extend((i, j, k, v) for k, v in enumerate(proj(a.bracket(x, comp[j]))) if v)
    qalg = NilLieAlgebra.from_brackets(len(comp), brackets)

    def lift_matrix(M):
        return QMatrix.from_columns([proj(M @ x) for x in comp])

    qL = LogLattice(qalg, tuple(hermite_basis([proj(b) for b in spec.uni_lattice.basis])))
    qgens = tuple(TorusGen(lift_matrix(g.action), g.label) for g in spec.torus_gens)
    sub = LatticeSpec(qalg, qL, qgens, spec.name + "|quotient")
    T = lift_matrix(phi.T)

    def rule(t):
        img = phi(GroupElement(a.zero(), t))
        return GroupElement(proj(img.uni), img.torus)

    return from_linear(sub, phi.source, T, rule), sub

