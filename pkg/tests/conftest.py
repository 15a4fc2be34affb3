import random
from fractions import Fraction

import pytest

from nilcomm import case_studies as cs
from nilcomm import commensurator as cm
from nilcomm import specfile
from nilcomm.linalg import QMatrix
from nilcomm.polycyclic import GroupElement

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")


def load_spec(name):
    return specfile.load(name).spec


def load_pauto(spec, name):
    return specfile.pauto_from_block(spec, specfile.load(name).pautos[0])


@pytest.fixture(scope="session")
def heis3():
    return load_spec("heisenberg3.spec")


@pytest.fixture(scope="session")
def heis_half():
    return load_spec("heisenberg_half.spec")


@pytest.fixture(scope="session")
def sol():
    return load_spec("sol.spec")


@pytest.fixture(scope="session")
def bg():
    return load_spec("bg_example.spec")


def rand_q(rng, num=3, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rank_one_build(spec, sign, T, c, cap=cm.DEFAULT_CAP):
    """Commensuration of an abelian lattice with one torus generator A.

    (u, 0) -> (T u, 0) and (0, t) -> (sum_{i<t} A_sign^i c, sign t); valid when T A = A^sign T.
    """
    A = spec.torus_gens[0].action
    Ae = A if sign == 1 else A.inverse()

    def rule(t):
        acc = [Fraction(0)] * spec.dim
        v = tuple(c)
        for _ in range(t[0]):
            acc = [x + y for x, y in zip(acc, v)]
            v = Ae @ v
        return GroupElement(tuple(acc), (sign * t[0],))

    return cm.from_linear(spec, cm.find_level(spec, T, rule, cap), T, rule)


def random_commensuration(spec, rng):
    """A seeded random commensuration for one of the bundled fixtures."""
    if spec.rank == 0:
        frame_cases = cs._heis_cases(spec, rng, 1)
        m = spec.dim - 1
        return cs.heis_comm_build(spec, frame_cases[0], [rand_q(rng) for _ in range(m)])
    if spec.dim == 2:
        return cs.sol_build(spec, cs.random_sol_comm(rng))
    # bg_example: Z x (Z^2 x psi); T = a (+) B with B centralizing psi, or flipped
    psi = cs.PSI
    while True:
        a = rand_q(rng, 2, 2)
        B = QMatrix.identity(2).scale(rand_q(rng, 2, 2)) + psi.scale(rand_q(rng, 2, 2))
        if a and B.det():
            break
    sign = rng.choice([1, -1])
    if sign == -1:
        B = cs.sol_flip(psi) @ B
    T = QMatrix.block_diag(QMatrix.from_rows([[a]]), B)
    return rank_one_build(spec, sign, T, [rand_q(rng) for _ in range(3)])


FIXTURES = ["heisenberg3.spec", "heisenberg_half.spec", "sol.spec", "bg_example.spec"]


@pytest.fixture
def rng():
    return random.Random(0)
