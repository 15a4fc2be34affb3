"""Explicit commensurator computations: Heisenberg, Sol, PSL_n, and hull checks.

Each verifier returns a list of :class:`Check` records, rendered one per
line as ``CHECK <name> PASS|FAIL <details>``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import factorint

from . import commensurator as cm
from .lie import LogLattice, NilLieAlgebra, center, log_unipotent
from .linalg import (
    QMatrix,
    conjugator_solve,
    coordinates,
    find_invertible_combination,
    is_semisimple,
    jordan_chevalley,
    span_rank,
    subspace_basis,
    vec,
    vscale,
)
from .polycyclic import (
    GroupElement,
    LatticeSpec,
    TorusGen,
    commutator_level,
    fitting_subgroup,
    hirsch_rank,
    unipotent_shadow,
)

PSI = QMatrix.parse("2,1;1,1")


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    details: str = ""

    def line(self) -> str:
        return f"CHECK {self.name} {'PASS' if self.ok else 'FAIL'} {self.details}".rstrip()


def _fmt(x) -> str:
    if isinstance(x, QMatrix):
        return x.literal()
    if isinstance(x, (tuple, list)):
        return "(" + ",".join(str(Fraction(v)) for v in x) + ")"
    return str(x)


def _rand_fraction(rng: random.Random, num: int = 3, den: int = 6) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


# ---------------------------------------------------------------------------
# Heisenberg


def standard_symplectic(n: int) -> QMatrix:
    """Gram matrix of ω pairing e_i with e_{n+i}."""
    rows = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][n + i] = 1
        rows[n + i][i] = -1
    return QMatrix.from_rows(rows)


def form_multiplier(A: QMatrix, omega: QMatrix) -> Fraction | None:
    """μ with ω(Au, Av) = μ ω(u, v) on all basis pairs, or None."""
    lhs = A.T @ omega @ A
    mu = None
    for i in range(omega.rows):
        for j in range(omega.cols):
            if omega[i, j]:
                ratio = lhs[i, j] / omega[i, j]
                if mu is None:
                    mu = ratio
                elif ratio != mu:
                    return None
    if mu is None or mu == 0 or lhs != omega.scale(mu):
        return None
    return mu


def gsp_multiplier(A: QMatrix) -> Fraction | None:
    """Multiplier of A in GSp for the standard form, or None if A is not a similitude."""
    if not A.is_square or A.rows % 2:
        raise ValueError("GSp membership needs a square matrix of even size")
    if A.det() == 0:
        raise ValueError("matrix is singular")
    return form_multiplier(A, standard_symplectic(A.rows // 2))


@dataclass(frozen=True)
class GSpElement:
    matrix: QMatrix
    multiplier: Fraction
    form: QMatrix | None = None

    def __post_init__(self):
        omega = self.form if self.form is not None else standard_symplectic(self.matrix.rows // 2)
        object.__setattr__(self, "form", omega)
        object.__setattr__(self, "multiplier", Fraction(self.multiplier))
        if self.matrix.rows % 2 or form_multiplier(self.matrix, omega) != self.multiplier:
            raise ValueError("matrix does not preserve the form up to the stated multiplier")

    def __matmul__(self, other: "GSpElement") -> "GSpElement":
        return GSpElement(self.matrix @ other.matrix, self.multiplier * other.multiplier, self.form)


@dataclass(frozen=True)
class HeisenbergComm:
    gsp: GSpElement
    cocycle: tuple


@dataclass(frozen=True)
class _HeisFrame:
    """Basis adapted to a Heisenberg-type algebra: complement vectors, central z, the form."""

    comp: tuple
    z: tuple
    form: QMatrix
    to_frame: QMatrix


def heisenberg_spec(n: int = 1) -> LatticeSpec:
    """H_{2n+1} with [x_i, y_i] = z and the 1/2-corrected lattice Z^{2n} x (1/2)Z."""
    a = NilLieAlgebra.heisenberg(n)
    basis = [a.basis_vector(i) for i in range(2 * n)] + [vscale(Fraction(1, 2), a.basis_vector(2 * n))]
    return LatticeSpec(a, LogLattice(a, tuple(basis)), (), f"heisenberg{2 * n + 1}")


def _heis_frame(spec: LatticeSpec) -> _HeisFrame:
    a = spec.algebra
    z_span = center(a)
    if spec.rank or len(z_span) != 1 or a.nilpotency_class != 2:
        raise ValueError("not a Heisenberg-type lattice (need a one-dimensional center, class 2, no torus)")
    z = z_span[0]
    comp: list[tuple] = []
    for i in range(a.dim):
        e = a.basis_vector(i)
        if span_rank(comp + [z, e]) > len(comp) + 1:
            comp.append(e)
    form = QMatrix.from_rows([[coordinates([z], a.bracket(u, v))[0] for v in comp] for u in comp])
    to_frame = QMatrix.from_columns(comp + [z]).inverse()
    return _HeisFrame(tuple(comp), z, form, to_frame)


def heis_theta(phi: cm.PartialAutomorphism) -> GSpElement:
    """The symplectic similitude induced on Γ / center."""
    frame = _heis_frame(phi.spec)
    q, _ = cm.quotient(phi, cm.SubgroupClass("center"))
    mu = coordinates([frame.z], phi.T @ frame.z)
    if mu is None:
        raise cm.WitnessFailure("center is not preserved")
    return GSpElement(q.T, mu[0], frame.form)


def heis_comm_build(spec: LatticeSpec, A: GSpElement, v: Sequence, cap: int = cm.DEFAULT_CAP) -> cm.PartialAutomorphism:
    """The commensuration acting by A on Γ/Z, by μ on Z, with cocycle v: u ↦ A u + (v·u) z."""
    frame = _heis_frame(spec)
    m = len(frame.comp)
    if A.matrix.rows != m or form_multiplier(A.matrix, frame.form) != A.multiplier:
        raise ValueError("matrix is not a similitude of the commutator form")
    v = vec(v)
    rows = [list(A.matrix.row(i)) + [0] for i in range(m)] + [list(v) + [A.multiplier]]
    T_frame = QMatrix.from_rows(rows)
    back = QMatrix.from_columns(list(frame.comp) + [frame.z])
    return cm.automorphism(spec, back @ T_frame @ frame.to_frame, cap)


def heis_decompose(phi: cm.PartialAutomorphism) -> HeisenbergComm:
    frame = _heis_frame(phi.spec)
    m = len(frame.comp)
    T_frame = frame.to_frame @ phi.T @ QMatrix.from_columns(list(frame.comp) + [frame.z])
    return HeisenbergComm(heis_theta(phi), tuple(T_frame[m, j] for j in range(m)))


def heis_kernel_cocycle(phi: cm.PartialAutomorphism) -> tuple:
    hc = heis_decompose(phi)
    if not hc.gsp.matrix.is_identity() or hc.gsp.multiplier != 1:
        raise ValueError("commensuration is not in the kernel of the symplectic quotient")
    return hc.cocycle


def random_gsp(n: int, rng: random.Random, form: QMatrix | None = None) -> GSpElement:
    """A seeded GSp_{2n}(Q) element built from transvections, block maps and similitudes."""
    omega = form if form is not None else standard_symplectic(n)
    small = [Fraction(p, q) for p in (-2, -1, 1, 2) for q in (1, 2, 3, 6)]
    if n == 1 and omega == standard_symplectic(1):
        while True:
            M = QMatrix.from_rows([[rng.choice(small + [0]) for _ in range(2)] for _ in range(2)])
            if M.det():
                return GSpElement(M, M.det(), omega)
    out = QMatrix.identity(2 * n)
    for _ in range(3):
        kind = rng.randrange(3)
        if kind == 0:
            w = [rng.choice([-1, 0, 1]) for _ in range(2 * n)]
            if not any(w):
                w[rng.randrange(2 * n)] = 1
            lam = rng.choice(small)
            ow = omega @ w
            # u ↦ u + λ ω(u, w) w
            F = QMatrix.identity(2 * n) + QMatrix.from_rows(
                [[lam * ow[j] * w[i] for j in range(2 * n)] for i in range(2 * n)])
        elif kind == 1:
            while True:
                M = QMatrix.from_rows([[rng.choice(small + [0, 0]) for _ in range(n)] for _ in range(n)])
                if M.det():
                    break
            F = QMatrix.block_diag(M, M.inverse().T)
        else:
            mu = rng.choice(small)
            F = QMatrix.diag([mu] * n + [1] * n)
        out = out @ F
    mu = form_multiplier(out, omega)
    return GSpElement(out, mu, omega)


def _heis_cases(spec: LatticeSpec, rng: random.Random, count: int) -> list[GSpElement]:
    frame = _heis_frame(spec)
    n = len(frame.comp) // 2
    std = standard_symplectic(n)
    c = frame.form[0, n]
    if c and frame.form == std.scale(c):
        # a rescaled form has the same similitudes and multipliers
        return [GSpElement(g.matrix, g.multiplier, frame.form) for g in (random_gsp(n, rng) for _ in range(count))]
    # conjugate standard similitudes into the spec's form
    P = _symplectic_basis_change(frame.form)
    out = []
    for _ in range(count):
        g = random_gsp(n, rng)
        M = P @ g.matrix @ P.inverse()
        out.append(GSpElement(M, form_multiplier(M, frame.form), frame.form))
    return out


def _symplectic_basis_change(omega: QMatrix) -> QMatrix:
    """P with P^T ω P proportional to the standard form (found by a Gram-Schmidt-type pass)."""
    m = omega.rows
    remaining = [tuple(Fraction(int(i == j)) for i in range(m)) for j in range(m)]
    es, fs = [], []
    scale = None

    def w(u, v):
        return sum((u[i] * omega[i, j] * v[j] for i in range(m) for j in range(m)), Fraction(0))

    while remaining:
        e = remaining.pop(0)
        f = next((v for v in remaining if w(e, v)), None)
        if f is None:
            raise ValueError("degenerate commutator form")
        remaining.remove(f)
        c = w(e, f)
        scale = c if scale is None else scale
        f = vscale(scale / c, f)
        es.append(e)
        fs.append(f)
        proj = []
        for v in remaining:
            # make v orthogonal to e and f
            v = tuple(v[i] - (w(v, f) / w(e, f)) * e[i] + (w(v, e) / w(e, f)) * f[i] for i in range(m))
            proj.append(v)
        remaining = [v for v in subspace_basis(proj)] if proj else []
    return QMatrix.from_columns(es + fs)


def verify_heisenberg(spec: LatticeSpec | None = None, seed: int = 0, pairs: int = 50,
                      samples: int = 20, cap: int = cm.DEFAULT_CAP) -> list[Check]:
    spec = spec or heisenberg_spec(1)
    rng = random.Random(seed)
    frame = _heis_frame(spec)
    m = len(frame.comp)
    checks: list[Check] = []

    # doubling map: 2 on Γ/Z, 4 on Z
    scale = QMatrix.from_columns(list(frame.comp) + [frame.z])
    dbl = cm.automorphism(spec, scale @ QMatrix.diag([2] * m + [4]) @ frame.to_frame, cap)
    th = heis_theta(dbl)
    checks.append(Check("heis-doubling-theta", th.matrix == QMatrix.diag([2] * m) and th.multiplier == 4,
                        f"matrix={th.matrix.literal()} mu={th.multiplier}"))
    checks.append(Check("heis-identity-theta",
                        heis_theta(cm.identity(spec)).matrix.is_identity()
                        and heis_theta(cm.identity(spec)).multiplier == 1))

    cases = _heis_cases(spec, rng, samples)
    ok = True
    for g in cases:
        phi = heis_comm_build(spec, g, [_rand_fraction(rng) for _ in range(m)], cap)
        t = heis_theta(phi)
        ok &= t.matrix == g.matrix and t.multiplier == g.multiplier
    checks.append(Check("heis-theta-build", ok, f"{len(cases)} seeded similitudes"))

    ok = True
    scaled = True
    for _ in range(pairs):
        g1, g2 = _heis_cases(spec, rng, 2)
        p1 = heis_comm_build(spec, g1, [_rand_fraction(rng) for _ in range(m)], cap)
        p2 = heis_comm_build(spec, g2, [_rand_fraction(rng) for _ in range(m)], cap)
        c = cm.compose(p2, p1, cap)
        t = heis_theta(c)
        ok &= t.matrix == g2.matrix @ g1.matrix and t.multiplier == g2.multiplier * g1.multiplier
        zgen = GroupElement(vscale(c.source.uni_scale, _central_generator(spec)), ())
        scaled &= c(zgen).uni == vscale(t.multiplier, zgen.uni)
    checks.append(Check("heis-theta-homomorphism", ok, f"{pairs} seeded composed pairs"))
    checks.append(Check("heis-center-scaling", scaled, "image of the central generator is its mu-th power"))

    ok = True
    for _ in range(samples):
        v = tuple(_rand_fraction(rng) for _ in range(m))
        ident = GSpElement(QMatrix.identity(m), 1, frame.form)
        phi = heis_comm_build(spec, ident, v, cap)
        ok &= heis_kernel_cocycle(phi) == v
        ok &= cm.equivalent(heis_comm_build(spec, ident, heis_kernel_cocycle(phi), cap), phi)
    checks.append(Check("heis-kernel-cocycle", ok, f"{samples} round trips"))
    return checks


def _central_generator(spec: LatticeSpec) -> tuple:
    """Generator of the lattice's center, in log coordinates."""
    from .linalg import subspace_intersection_lattice

    return subspace_intersection_lattice(spec.uni_lattice.basis, center(spec.algebra))[0]


# ---------------------------------------------------------------------------
# Sol


@dataclass(frozen=True)
class SolComm:
    sign: int
    centralizer_part: QMatrix
    cocycle: tuple

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "cocycle", vec(self.cocycle))


def sol_spec(psi: QMatrix = PSI) -> LatticeSpec:
    a = NilLieAlgebra.abelian(2)
    return LatticeSpec(a, LogLattice.standard(a), (TorusGen(psi, "psi"),), "sol")


def _sol_psi(spec: LatticeSpec) -> QMatrix:
    if spec.dim != 2 or spec.rank != 1 or not spec.algebra.is_abelian():
        raise ValueError("not a Sol-type lattice Z^2 x Z")
    return spec.torus_gens[0].action


def sol_flip(psi: QMatrix = PSI) -> QMatrix:
    """A fixed rational J with J psi J^-1 = psi^-1."""
    J = conjugator_solve(psi, psi.inverse())
    if J is None:
        raise ValueError("psi is not conjugate to its inverse")
    return J


def sol_centralizer_member(B: QMatrix, psi: QMatrix = PSI) -> bool:
    if B.rows != 2 or not B.is_square:
        raise ValueError("expected a 2x2 matrix")
    if B.det() == 0:
        raise ValueError("matrix is singular")
    return B @ psi == psi @ B


def sol_pq_obstruction(p: int, q: int, psi: QMatrix = PSI) -> bool:
    """True iff psi^q and psi^p are conjugate in GL_2(Q)."""
    if p == 0 or q == 0:
        raise ValueError("exponents must be nonzero")
    return conjugator_solve(psi ** q, psi ** p) is not None


def _cocycle_sum(psi_e: QMatrix, c: tuple, k: int) -> tuple:
    """sum_{0 <= i < k} psi_e^i c (k >= 0), or the matching negative sum for k < 0."""
    if k < 0:
        inv = psi_e.inverse()
        total = _cocycle_sum(inv, c, -k)
        return vscale(-1, inv @ total)
    acc = [Fraction(0)] * len(c)
    v = c
    for _ in range(k):
        acc = [x + y for x, y in zip(acc, v)]
        v = psi_e @ v
    return tuple(acc)


def sol_build(spec: LatticeSpec, sc: SolComm, cap: int = cm.DEFAULT_CAP) -> cm.PartialAutomorphism:
    """(v, p) ↦ (M v, 0) · (c, sign)^p with M = B or J B."""
    psi = _sol_psi(spec)
    if not sol_centralizer_member(sc.centralizer_part, psi):
        raise ValueError("centralizer part does not commute with psi")
    M = sc.centralizer_part if sc.sign == 1 else sol_flip(psi) @ sc.centralizer_part
    psi_e = psi if sc.sign == 1 else psi.inverse()

    def rule(t):
        return GroupElement(_cocycle_sum(psi_e, sc.cocycle, t[0]), (sc.sign * t[0],))

    level = cm.find_level(spec, M, rule, cap)
    return cm.from_linear(spec, level, M, rule)


def sol_decompose(phi: cm.PartialAutomorphism) -> SolComm:
    spec = phi.spec
    psi = _sol_psi(spec)
    r, _ = cm.restrict(phi, cm.SubgroupClass("fitting"))
    M = r.T
    (img,) = phi.torus_images
    N = phi.source.torus_scale
    if abs(img.torus[0]) != N:
        raise ValueError("torus image is not psi^(+-N)")
    sign = img.torus[0] // N
    B = M if sign == 1 else sol_flip(psi).inverse() @ M
    if not sol_centralizer_member(B, psi):
        raise ValueError("restriction to the Fitting subgroup does not centralize psi")
    psi_e = psi if sign == 1 else psi.inverse()
    I = QMatrix.identity(2)
    c = (I - psi_e) @ ((I - psi_e ** N).inverse() @ img.uni)
    return SolComm(sign, B, c)


def random_sol_comm(rng: random.Random) -> SolComm:
    while True:
        a, b = _rand_fraction(rng, 2, 3), _rand_fraction(rng, 2, 3)
        B = QMatrix.identity(2).scale(a) + PSI.scale(b)
        if B.det():
            break
    return SolComm(rng.choice([1, -1]), B, (_rand_fraction(rng), _rand_fraction(rng)))


def verify_sol(spec: LatticeSpec | None = None, seed: int = 0, samples: int = 50,
               cap: int = cm.DEFAULT_CAP) -> list[Check]:
    spec = spec or sol_spec()
    psi = _sol_psi(spec)
    rng = random.Random(seed)
    checks: list[Check] = []

    bad = [(p, q) for p in range(-5, 6) for q in range(-5, 6) if p and q
           and sol_pq_obstruction(p, q, psi) != (abs(p) == abs(q))]
    checks.append(Check("sol-pq-obstruction", not bad, "1<=|p|,|q|<=5" + (f" mismatches={bad}" if bad else "")))
    fib = QMatrix.parse("1,1;1,0")
    checks.append(Check("sol-centralizer-fibonacci", sol_centralizer_member(fib, psi) and fib @ fib == psi,
                        "[[1,1],[1,0]]"))
    checks.append(Check("sol-centralizer-psi", sol_centralizer_member(psi, psi)))
    fit, E = fitting_subgroup(spec)
    checks.append(Check("sol-fitting", fit.canonical() == LogLattice.standard(spec.algebra).canonical() and not E,
                        f"basis={[_fmt(b) for b in fit.basis]} torus={E}"))
    checks.append(Check("sol-hirsch", hirsch_rank(spec) == 3, f"rank={hirsch_rank(spec)}"))

    ident = sol_decompose(cm.identity(spec))
    checks.append(Check("sol-identity", ident.sign == 1 and ident.centralizer_part.is_identity()
                        and not any(ident.cocycle)))
    v0 = (Fraction(1, 3), Fraction(0))
    conj = sol_decompose(cm.inner(spec, GroupElement(v0, (0,)), cap))
    expected = (QMatrix.identity(2) - psi) @ v0
    checks.append(Check("sol-conjugation", conj.sign == 1 and conj.centralizer_part.is_identity()
                        and conj.cocycle == expected, f"cocycle={_fmt(conj.cocycle)}"))
    rpsi = sol_decompose(cm.automorphism(spec, psi, cap))
    checks.append(Check("sol-psi-restriction", rpsi.sign == 1 and rpsi.centralizer_part == psi
                        and not any(rpsi.cocycle)))

    ok = True
    for _ in range(samples):
        sc = random_sol_comm(rng)
        phi = sol_build(spec, sc, cap)
        back = sol_decompose(phi)
        ok &= back == sc and cm.equivalent(sol_build(spec, back, cap), phi)
    checks.append(Check("sol-decompose-reassemble", ok, f"{samples} seeded values"))

    ok = True
    for _ in range(10):
        c1 = (_rand_fraction(rng), _rand_fraction(rng))
        c2 = (_rand_fraction(rng), _rand_fraction(rng))
        I = QMatrix.identity(2)
        both = sol_decompose(cm.compose(sol_build(spec, SolComm(1, I, c1), cap),
                                        sol_build(spec, SolComm(1, I, c2), cap), cap))
        ok &= both.cocycle == tuple(x + y for x, y in zip(c1, c2))
    checks.append(Check("sol-cocycle-additivity", ok, "10 seeded pairs"))

    report = commutator_level(spec, (Fraction(1, 3), Fraction(0)), LogLattice.standard(spec.algebra),
                              rng=random.Random(seed))
    checks.append(Check("sol-commutator-level", report.level.uni_scale % 3 == 0,
                        f"level=({report.level.uni_scale},{report.level.torus_scale})"))
    return checks


# ---------------------------------------------------------------------------
# PSL_n


@dataclass(frozen=True)
class PowerClass:
    """Class of a nonzero rational in Q*/(Q*)^n: prime exponents mod n and a sign flag."""

    primes: tuple
    negative: bool

    @property
    def trivial(self) -> bool:
        return not self.primes and not self.negative


def nth_power_class(x, n: int) -> PowerClass:
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no class")
    if n < 1:
        raise ValueError("n must be positive")
    exps: dict[int, int] = {}
    for p, e in factorint(abs(x.numerator)).items():
        exps[p] = exps.get(p, 0) + e
    for p, e in factorint(x.denominator).items():
        exps[p] = exps.get(p, 0) - e
    primes = tuple(sorted((int(p), e % n) for p, e in exps.items() if e % n))
    return PowerClass(primes, x < 0 and n % 2 == 0)


def matrix_unit(n: int, i: int, j: int) -> QMatrix:
    return QMatrix.from_rows([[int(r == i and c == j) for c in range(n)] for r in range(n)])


def _vec_matrix(X: QMatrix) -> tuple:
    return tuple(X[i, j] for i in range(X.rows) for j in range(X.cols))


def _unvec(v: Sequence, n: int) -> QMatrix:
    return QMatrix.from_rows([list(v[i * n:(i + 1) * n]) for i in range(n)])


def conjugation_map(A: QMatrix) -> QMatrix:
    """The n^2 x n^2 matrix of X ↦ A X A^-1 in row-major coordinates."""
    n = A.rows
    Ainv = A.inverse()
    cols = [_vec_matrix(A @ matrix_unit(n, i, j) @ Ainv) for i in range(n) for j in range(n)]
    return QMatrix.from_columns(cols)


def transpose_map(n: int) -> QMatrix:
    cols = [_vec_matrix(matrix_unit(n, j, i)) for i in range(n) for j in range(n)]
    return QMatrix.from_columns(cols)


def skolem_noether_solve(alpha: QMatrix) -> QMatrix | None:
    """A with alpha(X) = A X A^-1 for all X, normalized so its first nonzero entry is 1."""
    if not alpha.is_square:
        raise ValueError("alpha must be square")
    n = round(alpha.rows ** 0.5)
    if n * n != alpha.rows:
        raise ValueError("alpha must act on an n^2-dimensional matrix space")
    if alpha.det() == 0:
        raise ValueError("alpha is singular")

    def apply(X):
        return _unvec(alpha @ _vec_matrix(X), n)

    if apply(QMatrix.identity(n)) != QMatrix.identity(n):
        return None
    units = [[matrix_unit(n, i, j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if apply(units[i][j] @ units[k][l]) != apply(units[i][j]) @ apply(units[k][l]):
                        return None
    # α(E) A - A E = 0 for every matrix unit E, linear in the n^2 entries of A
    rows = []
    for i in range(n):
        for j in range(n):
            aE, E = apply(units[i][j]), units[i][j]
            for r in range(n):
                for c in range(n):
                    row = [Fraction(0)] * (n * n)
                    for k in range(n):
                        row[k * n + c] += aE[r, k]
                        row[r * n + k] -= E[k, c]
                    rows.append(row)
    null = QMatrix.from_rows(rows).nullspace()
    A = find_invertible_combination([_unvec(v, n) for v in null])
    if A is None:
        return None
    first = next(x for x in _vec_matrix(A) if x)
    return A.scale(1 / first)


def verify_psl(seed: int = 0, samples: int = 20) -> list[Check]:
    rng = random.Random(seed)
    checks: list[Check] = []
    for n in (2, 3):
        classes = {x: nth_power_class(x, n) for x in (2, 3, 5, 6)}
        distinct = len(set(classes.values())) == 4 and not any(c.trivial for c in classes.values())
        checks.append(Check(f"psl-power-classes-mod-{n}", distinct,
                            " ".join(f"{x}:{list(c.primes)}" for x, c in classes.items())))
    checks.append(Check("psl-power-class-golden", nth_power_class(4, 2).trivial
                        and nth_power_class(8, 2).primes == ((2, 1),)))
    ok = True
    for _ in range(samples):
        x = Fraction(rng.choice([-1, 1]) * rng.randint(1, 60), rng.randint(1, 60))
        y = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        n = rng.randint(2, 4)
        ok &= nth_power_class(x * y ** n, n) == nth_power_class(x, n)
    checks.append(Check("psl-power-class-invariance", ok, f"{samples} seeded values"))
    ok = True
    for _ in range(samples):
        n = rng.choice([2, 3])
        while True:
            A = QMatrix.from_rows([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
            if A.det():
                break
        B = skolem_noether_solve(conjugation_map(A))
        first = next(x for x in _vec_matrix(A) if x)
        ok &= B is not None and B == A.scale(1 / first)
    checks.append(Check("psl-skolem-noether", ok, f"{samples} seeded conjugations"))
    checks.append(Check("psl-transpose-rejected", skolem_noether_solve(transpose_map(2)) is None))
    return checks


# ---------------------------------------------------------------------------
# Hull axiom (H3)


@dataclass(frozen=True)
class Embedding:
    """Images of the lattice generators (unipotent basis first, then torus generators)."""

    name: str
    images: tuple
    expect_h3: bool | None = None


@dataclass(frozen=True)
class HullReport:
    dim_u: int
    rank: int
    checks: tuple

    @property
    def h3(self) -> bool:
        return self.dim_u == self.rank


def _algebra_closure(vectors: list[QMatrix], conjugators: list[QMatrix]) -> list[QMatrix]:
    """Span of the matrices closed under commutators and conjugation."""
    n = vectors[0].rows if vectors else 0
    basis: list[tuple] = []

    def add(M):
        v = _vec_matrix(M)
        if any(v) and span_rank(basis + [v]) > len(basis):
            basis.append(v)
            return True
        return False

    for M in vectors:
        add(M)
    grew = True
    while grew:
        grew = False
        mats = [_unvec(v, n) for v in basis]
        for X in mats:
            for Y in mats:
                grew |= add(X @ Y - Y @ X)
            for g in conjugators:
                grew |= add(g @ X @ g.inverse())
    return [_unvec(v, n) for v in basis]


def hull_axiom_check(spec: LatticeSpec, embedding: Embedding) -> HullReport:
    """Check the embedding is a homomorphism and compare dim U with the Hirsch rank."""
    n, r = spec.dim, spec.rank
    checks: list[Check] = []
    imgs = list(embedding.images)
    if len(imgs) != n + r:
        raise ValueError(f"embedding {embedding.name!r} needs {n + r} generator images")
    uni = imgs[:n]
    tor = imgs[n:]
    uni_ok = all(jordan_chevalley(M)[0].is_identity() for M in uni)
    checks.append(Check("embedding-unipotent-images", uni_ok))
    hom = uni_ok
    if uni_ok:
        # dρ on log coordinates: basis vector b_i ↦ log ρ(b_i); must be a Lie map compatible with the torus
        logs = [log_unipotent(M) for M in uni]
        basis = spec.uni_lattice.basis
        B = QMatrix.from_columns(basis).inverse()

        def d_rho(X):
            c = B @ X
            out = QMatrix.zeros(logs[0].rows)
            for ci, Li in zip(c, logs):
                if ci:
                    out = out + Li.scale(ci)
            return out

        for i in range(n):
            for j in range(n):
                X, Y = basis[i], basis[j]
                hom &= d_rho(spec.algebra.bracket(X, Y)) == logs[i] @ logs[j] - logs[j] @ logs[i]
        for g, M in zip(spec.torus_gens, tor):
            for i in range(n):
                hom &= M @ logs[i] @ M.inverse() == d_rho(g.action @ basis[i])
        for M1 in tor:
            for M2 in tor:
                hom &= M1 @ M2 == M2 @ M1
    checks.append(Check("embedding-homomorphism", hom))
    for i, M in enumerate(tor):
        S, U = jordan_chevalley(M)
        checks.append(Check(f"jordan-parts-t{i + 1}", S @ U == M and U @ S == M and is_semisimple(S),
                            "unipotent part trivial" if U.is_identity() else "unipotent part nontrivial"))
    unip_logs = [log_unipotent(jordan_chevalley(M)[1]) for M in imgs]
    conj = imgs + [M.inverse() for M in imgs]
    dim_u = len(_algebra_closure([L for L in unip_logs if not L.is_zero()], conj))
    return HullReport(dim_u, hirsch_rank(spec), tuple(checks))


def hull_report_lines(report: HullReport, embedding: Embedding) -> list[str]:
    lines = [c.line() for c in report.checks]
    verdict = "PASS" if report.h3 else "FAIL"
    rel = "=" if report.h3 else "!="
    lines.append(f"RESULT H3 {verdict} dim(U)={report.dim_u} {rel} rank={report.rank}")
    if embedding.expect_h3 is not None:
        ok = report.h3 == embedding.expect_h3
        exp = "pass" if embedding.expect_h3 else "fail"
        lines.append(Check("H3-expectation", ok, f"expected {exp}").line())
    return lines


def hull_ok(report: HullReport, embedding: Embedding) -> bool:
    if not all(c.ok for c in report.checks):
        return False
    if embedding.expect_h3 is None:
        return report.h3
    return report.h3 == embedding.expect_h3


def shadow_rank(spec: LatticeSpec) -> int:
    return len(unipotent_shadow(spec).basis)
