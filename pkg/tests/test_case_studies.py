import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcomm import case_studies as cs
from nilcomm import commensurator as cm
from nilcomm import specfile
from nilcomm.linalg import QMatrix
from nilcomm.polycyclic import GroupElement

from conftest import load_pauto, load_spec

PSI = cs.PSI


def test_gsp_multiplier_examples():
    assert cs.gsp_multiplier(QMatrix.identity(2)) == 1
    assert cs.gsp_multiplier(QMatrix.parse("2,0;0,1")) == 2
    assert cs.gsp_multiplier(QMatrix.diag([2, 2, 1, 1])) == 2
    assert cs.gsp_multiplier(QMatrix.diag([2, 1, 1, 1])) is None
    with pytest.raises(ValueError):
        cs.gsp_multiplier(QMatrix.identity(3))
    with pytest.raises(ValueError):
        cs.gsp_multiplier(QMatrix.zeros(2))


def test_gsp_multiplier_is_determinant_in_rank_two():
    # every invertible 2x2 matrix is a similitude with multiplier det
    rng = random.Random(1)
    for _ in range(30):
        A = QMatrix.from_rows([[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(2)] for _ in range(2)])
        if A.det():
            assert cs.gsp_multiplier(A) == A.det()


def test_random_gsp_oracle():
    # independent oracle: sympy checks A^T J A = mu J
    rng = random.Random(3)
    J = sympy.Matrix(cs.standard_symplectic(2).rows, cs.standard_symplectic(2).cols,
                     [int(x) for x in cs.standard_symplectic(2).entries])
    for _ in range(10):
        g = cs.random_gsp(2, rng)
        A = sympy.Matrix(4, 4, [sympy.Rational(x.numerator, x.denominator) for x in g.matrix.entries])
        mu = sympy.Rational(g.multiplier.numerator, g.multiplier.denominator)
        assert A.T * J * A == mu * J


def test_heis_theta_examples(heis_half):
    ident = cm.identity(heis_half)
    th = cs.heis_theta(ident)
    assert th.matrix == QMatrix.identity(2) and th.multiplier == 1
    dbl = load_pauto(heis_half, "heis_half_double.pauto")
    th = cs.heis_theta(dbl)
    assert th.matrix == QMatrix.diag([2, 2]) and th.multiplier == 4
    # x -> x + z is in the kernel, with cocycle (1, 0)
    shear = cs.heis_comm_build(heis_half, cs.GSpElement(QMatrix.identity(2), 1), (1, 0))
    assert cs.heis_kernel_cocycle(shear) == (1, 0)
    assert shear.T == QMatrix.parse("1,0,0;0,1,0;1,0,1")


def test_heis_build_and_decompose_round_trip():
    rng = random.Random(5)
    for n in (1, 2):
        spec = cs.heisenberg_spec(n)
        for _ in range(5):
            A = cs.random_gsp(n, rng)
            v = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(2 * n))
            phi = cs.heis_comm_build(spec, A, v)
            back = cs.heis_decompose(phi)
            assert back.gsp.matrix == A.matrix and back.gsp.multiplier == A.multiplier
            assert back.cocycle == v


def test_heis_theta_is_multiplicative(heis_half):
    rng = random.Random(8)
    for _ in range(5):
        a = cs.heis_comm_build(heis_half, cs.random_gsp(1, rng), (1, 0))
        b = cs.heis_comm_build(heis_half, cs.random_gsp(1, rng), (0, Fraction(1, 2)))
        ab = cs.heis_theta(cm.compose(a, b))
        expected = cs.heis_theta(a) @ cs.heis_theta(b)
        assert ab.matrix == expected.matrix and ab.multiplier == expected.multiplier


def test_heis_build_rejects_non_similitude(heis_half):
    with pytest.raises(ValueError):
        cs.GSpElement(QMatrix.parse("1,1;0,1"), 2)


def test_sol_helpers():
    fib = QMatrix.parse("1,1;1,0")
    assert cs.sol_centralizer_member(fib) and fib @ fib == PSI
    assert not cs.sol_centralizer_member(QMatrix.parse("1,1;0,1"))
    assert not cs.sol_pq_obstruction(2, 3)
    assert cs.sol_pq_obstruction(2, -2)
    J = cs.sol_flip()
    assert J @ PSI @ J.inverse() == PSI.inverse()
    with pytest.raises(ValueError):
        cs.sol_pq_obstruction(0, 1)


def test_sol_pq_against_trace_oracle():
    # conjugate in GL_2(Q) iff equal characteristic polynomials (both are irreducible or
    # split semisimple), so compare traces of psi^p and psi^q with sympy
    P = sympy.Matrix([[2, 1], [1, 1]])
    for p in range(-4, 5):
        for q in range(-4, 5):
            if p and q:
                assert cs.sol_pq_obstruction(p, q) == ((P ** p).trace() == (P ** q).trace())


def test_sol_decompose_examples(sol):
    phi = load_pauto(sol, "sol_cocycle.pauto")
    sc = cs.sol_decompose(phi)
    assert sc.sign == 1 and sc.centralizer_part == QMatrix.identity(2) and sc.cocycle == (1, 0)
    flip = cs.sol_build(sol, cs.SolComm(-1, QMatrix.identity(2), (0, 0)))
    sc = cs.sol_decompose(flip)
    assert sc.sign == -1 and sc.cocycle == (0, 0)


def test_sol_round_trip(sol):
    rng = random.Random(2)
    for _ in range(10):
        sc = cs.random_sol_comm(rng)
        back = cs.sol_decompose(cs.sol_build(sol, sc))
        assert back == sc


def test_sol_torus_image_is_cocycle_sum(sol):
    # independent recomputation with sympy powers
    sc = cs.SolComm(-1, PSI, (Fraction(1, 2), Fraction(-1, 3)))
    phi = cs.sol_build(sol, sc)
    N = phi.source.torus_scale
    img = phi(GroupElement((0, 0), (N,)))
    P = sympy.Matrix([[2, 1], [1, 1]]).inv()
    c = sympy.Matrix([sympy.Rational(1, 2), sympy.Rational(-1, 3)])
    total = sum((P ** i * c for i in range(N)), sympy.zeros(2, 1))
    assert img.uni == tuple(Fraction(int(x.p), int(x.q)) for x in total)
    assert img.torus == (-N,)


def test_nth_power_class_examples():
    assert cs.nth_power_class(4, 2).trivial
    assert cs.nth_power_class(8, 2).primes == ((2, 1),)
    assert cs.nth_power_class(Fraction(2, 27), 3).primes == ((2, 1),)
    assert cs.nth_power_class(-1, 3).trivial
    assert not cs.nth_power_class(-1, 2).trivial
    with pytest.raises(ValueError):
        cs.nth_power_class(0, 2)


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=-50, max_value=50).filter(bool),
       st.fractions(min_value=1, max_value=20, max_denominator=20), st.integers(1, 5))
def test_nth_power_class_invariance(x, y, n):
    assert cs.nth_power_class(x * y ** n, n) == cs.nth_power_class(x, n)


def test_skolem_noether():
    A = QMatrix.parse("1,1;0,1")
    assert cs.skolem_noether_solve(cs.conjugation_map(A)) == A
    B = QMatrix.parse("0,2,0;1,0,0;0,0,3")
    assert cs.skolem_noether_solve(cs.conjugation_map(B)) == B.scale(Fraction(1, 2))
    assert cs.skolem_noether_solve(cs.transpose_map(2)) is None
    assert cs.skolem_noether_solve(cs.transpose_map(3)) is None


def test_psl_suite():
    assert all(c.ok for c in cs.verify_psl(seed=3, samples=10))


def test_hull_checks(bg, heis3):
    f = specfile.load("bg_example.spec")
    rho1, rho2 = f.embeddings
    r1 = cs.hull_axiom_check(bg, rho1)
    assert (r1.dim_u, r1.rank, r1.h3) == (3, 4, False)
    assert cs.hull_ok(r1, rho1)
    r2 = cs.hull_axiom_check(bg, rho2)
    assert (r2.dim_u, r2.rank, r2.h3) == (4, 4, True)
    (emb,) = specfile.load("heisenberg3.spec").embeddings
    r3 = cs.hull_axiom_check(heis3, emb)
    assert (r3.dim_u, r3.rank, r3.h3) == (3, 3, True)
    assert all(c.ok for c in r3.checks)
    lines = cs.hull_report_lines(r1, rho1)
    assert "RESULT H3 FAIL dim(U)=3 != rank=4" in lines
    assert lines[-1].startswith("CHECK H3-expectation PASS")


def test_hull_detects_non_homomorphism(heis3):
    bad = cs.Embedding("bad", (QMatrix.parse("1,1,0;0,1,0;0,0,1"), QMatrix.parse("1,0,0;0,1,1;0,0,1"),
                               QMatrix.identity(3)))
    report = cs.hull_axiom_check(heis3, bad)
    assert not report.checks[1].ok
    assert not cs.hull_ok(report, bad)


def test_verify_suites_pass():
    assert all(c.ok for c in cs.verify_sol(seed=1, samples=10))
    assert all(c.ok for c in cs.verify_heisenberg(load_spec("heisenberg3.spec"), seed=1, pairs=5, samples=5))
