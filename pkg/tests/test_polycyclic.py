import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcomm.lie import LogLattice, NilLieAlgebra, lattice_contains
from nilcomm.linalg import QMatrix, subspace_intersection_lattice
from nilcomm.polycyclic import (
    CongruenceLevel,
    GroupElement,
    InvalidSpec,
    LatticeSpec,
    LevelSearchError,
    TorusGen,
    commutator_level,
    fitting_subgroup,
    hirsch_rank,
    inverse,
    multiply,
    power,
    unipotent_shadow,
    verify_level,
)

half = Fraction(1, 2)


def test_sol_multiplication_golden(sol):
    g = multiply(sol, GroupElement((0, 0), (1,)), GroupElement((1, 0), (0,)))
    assert g == GroupElement((2, 1), (1,))


def test_identity_and_inverse(sol):
    g = GroupElement((3, -1), (2,))
    assert multiply(sol, g, sol.identity()) == g
    assert multiply(sol, g, inverse(sol, g)) == sol.identity()
    assert power(sol, g, -3) == inverse(sol, power(sol, g, 3))


elements = st.builds(lambda u, t: GroupElement(u, (t,)),
                     st.tuples(st.integers(-5, 5), st.integers(-5, 5)), st.integers(-3, 3))


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_sol_group_axioms(sol, a, b, c):
    assert multiply(sol, multiply(sol, a, b), c) == multiply(sol, a, multiply(sol, b, c))
    assert multiply(sol, inverse(sol, a), a) == sol.identity()


def test_heisenberg_group_axioms(heis_half):
    rng = random.Random(2)
    for _ in range(30):
        a, b, c = (GroupElement((rng.randint(-3, 3), rng.randint(-3, 3), Fraction(rng.randint(-3, 3), 2)), ())
                   for _ in range(3))
        assert multiply(heis_half, multiply(heis_half, a, b), c) == multiply(heis_half, a, multiply(heis_half, b, c))
        assert heis_half.contains(multiply(heis_half, a, b))


def test_malformed_elements(sol):
    with pytest.raises(ValueError):
        multiply(sol, GroupElement((1, 0), ()), sol.identity())


def test_spec_invariants_enforced():
    a = NilLieAlgebra.abelian(2)
    L = LogLattice.standard(a)
    with pytest.raises(InvalidSpec):
        LatticeSpec(a, L, (TorusGen(QMatrix.parse("2,0;0,1"), "not-unimodular"),))
    with pytest.raises(InvalidSpec):
        LatticeSpec(a, L, (TorusGen(QMatrix.parse("2,1;1,1"), "a"), TorusGen(QMatrix.parse("1,1;0,1"), "b")))
    H = NilLieAlgebra.heisenberg()
    with pytest.raises(InvalidSpec):
        LatticeSpec(H, LogLattice.standard(H))


def test_fitting(sol, heis3, bg):
    L, E = fitting_subgroup(sol)
    assert L.canonical() == [(1, 0), (0, 1)] and E == []
    L, E = fitting_subgroup(heis3)
    assert L == heis3.uni_lattice and E == []
    L, E = fitting_subgroup(bg)
    assert len(L.basis) == 3 and E == []
    a = NilLieAlgebra.abelian(2)
    shear = LatticeSpec(a, LogLattice.standard(a), (TorusGen(QMatrix.parse("1,1;0,1"), "s"),))
    assert fitting_subgroup(shear)[1] == [0]


def test_fitting_is_invariant(sol, bg):
    for spec in (sol, bg):
        L, _ = fitting_subgroup(spec)
        for g in spec.torus_gens:
            assert all(lattice_contains(L, g.action @ b) for b in L.basis)


def test_hirsch(sol, bg, heis3):
    Z3 = LatticeSpec(NilLieAlgebra.abelian(3), LogLattice.standard(NilLieAlgebra.abelian(3)))
    assert hirsch_rank(Z3) == 3
    assert hirsch_rank(sol) == 3
    assert hirsch_rank(bg) == 4
    assert hirsch_rank(heis3) == 3


def test_shadow_ranks(sol, bg, heis3):
    # one hull direction per torus generator
    assert len(unipotent_shadow(bg).basis) == 4
    assert len(unipotent_shadow(sol).basis) == 3
    assert unipotent_shadow(heis3) == heis3.uni_lattice
    a = NilLieAlgebra.abelian(2)
    shear = LatticeSpec(a, LogLattice.standard(a), (TorusGen(QMatrix.parse("1,1;0,1"), "s"),))
    sh = unipotent_shadow(shear)
    assert len(sh.basis) == 3
    assert sh.algebra.bracket((0, 0, 1), (0, 1, 0)) == (1, 0, 0)


def test_shadow_meets_fitting_in_fitting(sol, bg):
    for spec in (sol, bg):
        sh = unipotent_shadow(spec)
        n = spec.dim
        fit_space = [sh.algebra.basis_vector(i) for i in range(n)]
        meet = subspace_intersection_lattice(sh.basis, fit_space)
        L, _ = fitting_subgroup(spec)
        assert sorted(v[:n] for v in meet) == sorted(L.canonical())


def test_level_trivial_action():
    H = NilLieAlgebra.heisenberg()
    L = LogLattice(H, ((1, 0, 0), (0, 1, 0), (0, 0, half)))
    spec = LatticeSpec(H, L, (TorusGen(QMatrix.identity(3), "e"),))
    report = commutator_level(spec, (1, 0, 0), LogLattice.standard(H))
    assert report.level == CongruenceLevel(1, 1)


def test_level_third_denominator(sol):
    report = commutator_level(sol, (Fraction(1, 3), 0), LogLattice.standard(sol.algebra))
    N = report.level.uni_scale
    assert N % 3 == 0
    M = sol.torus_gens[0].action ** report.level.torus_scale
    assert all((M[i, j] - (i == j)) % 3 == 0 for i in range(2) for j in range(2))
    f = (Fraction(1, 3), Fraction(0))
    assert all(x.denominator == 1 for x in (QMatrix.identity(2) - M) @ f)


def test_level_unipotent_heisenberg_brute_force():
    H = NilLieAlgebra.heisenberg()
    L = LogLattice(H, ((1, 0, 0), (0, 1, 0), (0, 0, half)))
    A = QMatrix.parse("1,0,0;1,1,0;0,0,1")
    spec = LatticeSpec(H, L, (TorusGen(A, "u"),))
    Z3 = LogLattice.standard(H)
    f = (half, 0, 0)
    report = commutator_level(spec, f, Z3)
    s = report.level.torus_scale
    from nilcomm.lie import bch
    from nilcomm.linalg import vscale

    for p in range(-4 * s, 4 * s + 1, s):
        assert lattice_contains(Z3, bch(H, f, vscale(-1, (A ** p) @ f)))
    # hand computation: the commutator log is -(p/2) y - (p/8) z, so 8 | p is needed
    assert s == 8


def test_level_on_hull_shadow(bg):
    report = commutator_level(bg, (half, Fraction(1, 3), 0), unipotent_shadow(bg))
    words, samples, failures = verify_level(bg, (half, Fraction(1, 3), 0), unipotent_shadow(bg),
                                            report.level, random.Random(5))
    assert not failures and samples == 50


def test_level_errors(sol):
    with pytest.raises(ValueError):
        commutator_level(sol, (1, 0), [(1, 0), (2, 0)])
    with pytest.raises(LevelSearchError):
        commutator_level(sol, (Fraction(1, 7), 0), LogLattice.standard(sol.algebra), cap=1)


def test_congruence_level_membership(sol):
    level = CongruenceLevel(2, 3)
    assert sol.in_level(GroupElement((2, 4), (3,)), level)
    assert not sol.in_level(GroupElement((1, 0), (0,)), level)
    assert not sol.in_level(GroupElement((0, 0), (1,)), level)
    with pytest.raises(ValueError):
        CongruenceLevel(0, 1)
