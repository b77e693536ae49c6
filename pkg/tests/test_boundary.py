import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wbcdg.boundary import Boundary, BoundaryRule, ghost_map
from wbcdg.errors import ConfigError
from wbcdg.mesh import DUAL, PRIMAL, Axis, Mesh1D, build_meshes
from wbcdg.problems import build_solver, get_problem


def test_rule_validation():
    with pytest.raises(ConfigError):
        BoundaryRule("sticky")


def test_periodic_needs_periodic_axis():
    mesh = Mesh1D(Axis(0.0, 1.0, 4))
    with pytest.raises(ConfigError):
        Boundary(mesh, (("periodic", "periodic"),), 2, 1.4)


def test_dirichlet_needs_exact():
    with pytest.raises(ConfigError):
        Boundary(Mesh1D(Axis(0.0, 1.0, 4)), (("dirichlet", "outflow"),), 2, 1.4)


@pytest.mark.parametrize("fam", [PRIMAL, DUAL])
def test_periodic_ghosts(fam, rng):
    ax = Axis(0.0, 1.0, 6, True)
    b = Boundary(Mesh1D(ax), (("periodic", "periodic"),), 2, 1.4)
    U = rng.normal(size=(ax.size(fam), 3, 3))
    b.apply(U, fam)
    x = Mesh1D(ax).centers(fam)
    for g, s in ghost_map(ax, fam, "lo", "periodic") + ghost_map(ax, fam, "hi", "periodic"):
        assert np.isclose(abs(x[g] - x[s]), 1.0)
        assert np.array_equal(U[g], U[s])


@pytest.mark.parametrize("fam", [PRIMAL, DUAL])
@given(seed=st.integers(0, 10**6))
def test_reflective_mirror(fam, seed):
    ax = Axis(0.0, 1.0, 5)
    mesh = Mesh1D(ax)
    b = Boundary(mesh, (("reflective", "reflective"),), 2, 1.4)
    U = np.random.default_rng(seed).normal(size=(ax.size(fam), 3, 3))
    b.apply(U, fam)
    x = mesh.centers(fam)
    xi = np.linspace(-1, 1, 7)
    phi = np.stack([np.ones_like(xi), xi, xi**2 - 1 / 3])
    for side, wall in (("lo", 0.0), ("hi", 1.0)):
        for g, s in ghost_map(ax, fam, side, "reflective"):
            assert np.isclose(x[g] + x[s], 2 * wall)
            vg, vs = U[g] @ phi, U[s] @ phi[:, ::-1]
            assert np.allclose(vg[[0, 2]], vs[[0, 2]]) and np.allclose(vg[1], -vs[1])


def test_reflective_even_density_2d(rng):
    mesh, _ = build_meshes(2, ((0.0, 1.0), (0.0, 1.0)), (4, 4))
    b = Boundary(mesh, (("reflective", "reflective"), ("outflow", "outflow")), 2, 1.4)
    U = rng.normal(size=mesh.shape(PRIMAL) + (4, 6))
    b.apply(U, PRIMAL)
    # odd-in-x basis functions (xi, xi*eta) flip sign, x-momentum flips as a whole
    flip = np.array([1, -1, 1, -1, 1, 1], float)
    expect = U[4] * flip
    expect[:, 1] *= -1
    assert np.allclose(U[5], expect)


def test_outflow_keeps_equilibrium_ghosts():
    setup = build_solver(get_problem("ex2"), n=10)
    for f in (PRIMAL, DUAL):
        U = setup.eq[f].copy()
        U[0] = 0.0
        U[-1] = 0.0
        setup.solver.boundary.apply(U, f, 0.0, setup.eq[f])
        assert np.array_equal(U, setup.eq[f])


def test_dirichlet_projects_exact():
    setup = build_solver(get_problem("ex1"), n=16)
    s = setup.solver
    U = s.U[PRIMAL].copy()
    U[0] = 0.0
    s.boundary.apply(U, PRIMAL, 0.05)
    from wbcdg.projection import project_novel_1d

    ref = project_novel_1d(setup.problem.exact(0.05), setup.mesh.centers(PRIMAL)[:1], setup.mesh.dx, 2)[0]
    assert np.allclose(U[0], ref, atol=1e-15)
