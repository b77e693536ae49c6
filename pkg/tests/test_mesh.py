import numpy as np
import pytest

from wbcdg.errors import ConfigError
from wbcdg.mesh import DUAL, PRIMAL, Axis, CriticalPoints, Mesh1D, build_meshes, opposite
from wbcdg.quadrature import QuadratureSet


def test_primal_centers():
    m = Mesh1D(Axis(0.0, 2.0, 4))
    assert m.dx == 0.5
    assert np.allclose(m.centers(PRIMAL)[1:5], [0.25, 0.75, 1.25, 1.75])


def test_dual_cell_between_first_faces():
    m = Mesh1D(Axis(0.0, 2.0, 4))
    # dual cell 1+1/2 sits at array index 3 (d = 2)
    assert np.allclose(m.cell_interval(DUAL, 3), (0.75, 1.25))


def test_overlap_halves():
    m = Mesh1D(Axis(0.0, 2.0, 4))
    left, right = m.overlap_halves(4)  # d = 3 spans (1.25, 1.75)
    assert np.allclose(left, (1.25, 1.5)) and np.allclose(right, (1.5, 1.75))
    (a, b), (c, d) = m.overlap_halves(3)
    assert np.allclose((a, b, c, d), (0.75, 1.0, 1.0, 1.25))


def test_leftmost_interior_dual_cell():
    ax = Axis(0.0, 2.0, 4)
    q = ax.interior(DUAL).start
    lo, hi = Mesh1D(ax).cell_interval(DUAL, q)
    assert (lo, hi) == (-0.25, 0.25)
    L, R = ax.overlap(DUAL)
    assert (L[0], R[0]) == (0, 1)  # ghost primal cell 0 and first interior cell


def test_right_ghost_dual_cell():
    ax = Axis(0.0, 2.0, 4)
    lo, hi = Mesh1D(ax).cell_interval(DUAL, ax.size(DUAL) - 1)
    assert np.allclose((lo, hi), (2.25, 2.75))


def test_quadrant():
    mesh, _ = build_meshes(2, ((0.0, 1.0), (0.0, 1.0)), (2, 2))
    xs, ys = mesh.quadrant(PRIMAL, 1, 1, 3)
    assert np.allclose(xs, (0.25, 0.5)) and np.allclose(ys, (0.25, 0.5))


@pytest.mark.parametrize("periodic", [False, True])
def test_sizes_and_interior(periodic):
    ax = Axis(0.0, 1.0, 10, periodic)
    assert ax.size(PRIMAL) == 12 and ax.size(DUAL) == 13
    n_dual = len(range(*ax.interior(DUAL).indices(13)))
    assert n_dual == (10 if periodic else 11)
    L, R = ax.overlap(PRIMAL)
    assert np.array_equal(R - L, np.ones(10, int))


def test_opposite():
    assert opposite(PRIMAL) == DUAL and opposite(DUAL) == PRIMAL


@pytest.mark.parametrize("n,lo,hi", [(1, 0.0, 1.0), (4, 1.0, 1.0)])
def test_axis_validation(n, lo, hi):
    with pytest.raises(ConfigError):
        Axis(lo, hi, n)


# Gauss and Lobatto nodes coincide at the half-cell midpoints when k + 1 is odd
@pytest.mark.parametrize("k,count", [(1, 7), (2, 9), (3, 13)])
def test_critical_points_1d(k, count):
    cp = CriticalPoints.build(QuadratureSet.build(k), 1)
    assert cp.S[0].size == count
    assert np.all(np.abs(cp.S[0]) <= 1)
    assert np.isin(cp.gauss[0], cp.S[0]).all()


def test_critical_points_2d_k2():
    cp = CriticalPoints.build(QuadratureSet.build(2), 2)
    # per axis: 6 Gauss values, 5 Lobatto values, 2 shared;
    # |G x Lo u Lo x G u G x G| = 30 + 30 + 36 - 4 - 12 - 12 + 4
    assert cp.S[0].size == 72
    assert cp.gauss[0].size == 36
