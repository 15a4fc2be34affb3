import random
from fractions import Fraction

import pytest

from nilcomm import case_studies as cs
from nilcomm import commensurator as cm
from nilcomm.linalg import QMatrix
from nilcomm.polycyclic import CongruenceLevel, GroupElement, LevelSearchError, multiply

from conftest import FIXTURES, load_pauto, load_spec, random_commensuration

half = Fraction(1, 2)


def restricted_to(phi, level):
    spec = phi.spec
    return cm.from_linear(spec, phi.source.refine(level), phi.T,
                          lambda t: phi(GroupElement(spec.algebra.zero(), t)))


def test_equivalence_examples(heis3):
    dbl = load_pauto(heis3, "heis_double.pauto")
    assert cm.equivalent(dbl, dbl)
    assert cm.equivalent(dbl, restricted_to(dbl, CongruenceLevel(2, 2)))
    assert not cm.equivalent(dbl, cm.identity(heis3))


def test_doubling_composes_to_quadrupling(heis3):
    dbl = load_pauto(heis3, "heis_double.pauto")
    quad = load_pauto(heis3, "heis_quadruple.pauto")
    assert cm.equivalent(cm.compose(dbl, dbl), quad)


def test_invert_doubling(heis3):
    dbl = load_pauto(heis3, "heis_double.pauto")
    inv = cm.invert(dbl)
    assert inv.T == QMatrix.diag([half, half, Fraction(1, 4)])
    assert inv.source == CongruenceLevel(4, 1)
    assert cm.equivalent(cm.compose(inv, dbl), cm.identity(heis3))
    assert cm.equivalent(cm.compose(dbl, inv), cm.identity(heis3))


def test_sol_cocycle_inverse(sol):
    phi = load_pauto(sol, "sol_cocycle.pauto")
    inv = cm.invert(phi)
    t = GroupElement((0, 0), (1,))
    assert inv(t) == GroupElement((-1, 0), (1,))
    assert cm.equivalent(cm.compose(phi, inv), cm.identity(sol))


def test_evaluation_is_homomorphism(bg):
    rng = random.Random(4)
    phi = random_commensuration(bg, rng)
    lvl = phi.source
    for _ in range(10):
        a, b = (GroupElement(tuple(lvl.uni_scale * rng.randint(-2, 2) for _ in range(3)),
                             (lvl.torus_scale * rng.randint(-2, 2),)) for _ in range(2))
        assert phi(multiply(bg, a, b)) == multiply(bg, phi(a), phi(b))
        assert phi.preimage(phi(a)) == a


def test_invalid_commensurations(heis3, sol):
    with pytest.raises(cm.InvalidCommensuration):
        cm.PartialAutomorphism(heis3, CongruenceLevel(), (GroupElement((1, 0, 0), ()),))
    # x -> 2x, y -> y, z -> z breaks the bracket
    with pytest.raises(cm.InvalidCommensuration):
        cm.PartialAutomorphism(heis3, CongruenceLevel(),
                               tuple(GroupElement(v, ()) for v in ((2, 0, 0), (0, 1, 0), (0, 0, 1))))
    # unipotent generators may not pick up torus parts
    with pytest.raises(cm.InvalidCommensuration):
        cm.PartialAutomorphism(sol, CongruenceLevel(),
                               (GroupElement((1, 0), (1,)), GroupElement((0, 1), (0,)), GroupElement((0, 0), (1,))))
    # the torus generator must satisfy the conjugation relation
    with pytest.raises(cm.InvalidCommensuration):
        cm.PartialAutomorphism(sol, CongruenceLevel(),
                               (GroupElement((1, 0), (0,)), GroupElement((0, 1), (0,)), GroupElement((0, 0), (-1,))))


def test_inner_automorphism_of_heisenberg(heis3):
    g = GroupElement((1, 0, 0), ())
    phi = cm.inner(heis3, g)
    h = GroupElement((0, 1, 0), ())
    assert phi(h) == multiply(heis3, multiply(heis3, g, h), GroupElement((-1, 0, 0), ()))


def test_witness_values(heis_half):
    dbl = load_pauto(heis_half, "heis_half_double.pauto")
    center = cm.SubgroupClass("center", 1)
    w = cm.strong_witness(dbl, center)
    assert w.holds
    assert w.image_generators == [(0, 0, 2)] and w.target_generators == [(0, 0, 2)]
    lower = cm.SubgroupClass("lower", 2)
    w = cm.strong_witness(dbl, lower)
    assert not w.holds
    assert w.image_generators == [(0, 0, 4)] and w.target_generators == [(0, 0, 2)]
    assert cm.is_commensuristic_witness(dbl, lower)


def test_subgroup_class_resolution(sol, heis_half, bg):
    assert cm.SubgroupClass("whole").resolve(sol) == ([(1, 0), (0, 1)], (0,))
    assert cm.SubgroupClass("fitting").resolve(sol) == ([(1, 0), (0, 1)], ())
    assert cm.SubgroupClass("lower", 2).resolve(heis_half)[0] == [(0, 0, 1)]
    assert cm.SubgroupClass("center").resolve(heis_half)[0] == [(0, 0, half)]
    with pytest.raises(ValueError):
        cm.SubgroupClass("explicit", basis=((1, 0, 0),), torus=(0,)).resolve(bg)
    with pytest.raises(ValueError):
        cm.SubgroupClass("nonsense")
    assert cm.commensurable(heis_half, cm.SubgroupClass("center"), cm.SubgroupClass("lower", 2))


def test_acts_on_class_round_trip(bg):
    rng = random.Random(9)
    phi = random_commensuration(bg, rng)
    inv = cm.invert(phi)
    for delta in (cm.SubgroupClass("fitting"), cm.SubgroupClass("whole"),
                  cm.SubgroupClass.explicit([(1, 0, 0)])):
        image = cm.acts_on_class(phi, delta)
        assert cm.commensurable(bg, cm.acts_on_class(inv, image), delta)


def test_restrict_examples(sol):
    phi = load_pauto(sol, "sol_cocycle.pauto")
    r, sub = cm.restrict(phi, cm.SubgroupClass("fitting"))
    assert r.T == QMatrix.identity(2) and sub.rank == 0
    whole, sub = cm.restrict(phi, cm.SubgroupClass("whole"))
    assert (sub.algebra, sub.uni_lattice, sub.torus_gens) == (sol.algebra, sol.uni_lattice, sol.torus_gens)
    assert whole.T == phi.T and whole.gen_images == phi.gen_images


def test_quotient_example(heis_half):
    dbl = load_pauto(heis_half, "heis_half_double.pauto")
    q, sub = cm.quotient(dbl, cm.SubgroupClass("center"))
    assert q.T == QMatrix.diag([2, 2]) and sub.dim == 2
    with pytest.raises(cm.WitnessFailure):
        cm.quotient(dbl, cm.SubgroupClass("lower", 2))


@pytest.mark.parametrize("name", FIXTURES)
def test_equivalence_relation(name):
    spec = load_spec(name)
    rng = random.Random(13)
    phi = random_commensuration(spec, rng)
    psi = restricted_to(phi, CongruenceLevel(2, 3))
    chi = restricted_to(psi, CongruenceLevel(5, 2))
    assert cm.equivalent(phi, phi)
    assert cm.equivalent(phi, psi) and cm.equivalent(psi, phi)
    assert cm.equivalent(psi, chi) and cm.equivalent(phi, chi)


def test_restriction_is_functorial(sol):
    rng = random.Random(21)
    fit = cm.SubgroupClass("fitting")
    for _ in range(5):
        a, b = cs.sol_build(sol, cs.random_sol_comm(rng)), cs.sol_build(sol, cs.random_sol_comm(rng))
        ra, _ = cm.restrict(a, fit)
        rb, _ = cm.restrict(b, fit)
        rab, _ = cm.restrict(cm.compose(b, a), fit)
        assert cm.equivalent(rab, cm.compose(rb, ra))


def test_cap_is_enforced(sol):
    with pytest.raises(LevelSearchError):
        cs.sol_build(sol, cs.SolComm(1, QMatrix.identity(2), (Fraction(1, 5), 0)), cap=1)
    phi = load_pauto(sol, "sol_cocycle.pauto")
    # powers of (1,0 | 1) reach 7 Z^2 only after several steps
    fine = restricted_to(cm.identity(sol), CongruenceLevel(7, 1))
    with pytest.raises(LevelSearchError):
        cm.compose(fine, phi, cap=1)
    level = cm.compose(fine, phi).source
    assert level.torus_scale > 1


def test_compose_strides_over_forced_torus_multiples(bg):
    # (1,0,0 | 1)^b lands in level (1000, 28) first at b = 7000, past the cap if every b were tried
    shift = load_pauto(bg, "bg_shift.pauto")
    fine = restricted_to(cm.identity(bg), CongruenceLevel(1000, 28))
    assert cm.compose(fine, shift).source == CongruenceLevel(1000, 7000)


def test_restrict_to_lower_rank_subgroup(heis3):
    dbl = load_pauto(heis3, "heis_double.pauto")
    r, sub = cm.restrict(dbl, cm.SubgroupClass("center"))
    assert sub.dim == 1 and r.T == QMatrix.from_rows([[4]])
    assert sub.uni_lattice.basis == ((1,),)
