import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wbcdg.diagnostics import l1_distance, l1_error, orders, sample_primal
from wbcdg.mesh import DUAL, PRIMAL, build_meshes
from wbcdg.projection import project_novel


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("fam", [PRIMAL, DUAL])
def test_polynomial_error_vanishes_1d(k, fam):
    mesh, _ = build_meshes(1, (0.0, 2.0), 12, k=k)
    f = lambda x: np.stack([np.polynomial.polynomial.polyval(x, np.arange(1, k + 2)) for _ in range(3)])
    c = project_novel(f, mesh, fam, k).coef
    sl = (mesh.axis.interior(fam),)
    assert np.all(l1_error(c, mesh, fam, k, f, sl) <= 1e-12)


def test_polynomial_error_vanishes_2d():
    mesh, _ = build_meshes(2, ((0.0, 1.0), (0.0, 2.0)), (5, 6), k=2)
    f = lambda x, y: np.stack([1 + x * y, x * x, y * y - x, 2 + y])
    c = project_novel(f, mesh, PRIMAL, 2).coef
    sl = (mesh.ax.interior(PRIMAL), mesh.ay.interior(PRIMAL))
    assert np.all(l1_error(c, mesh, PRIMAL, 2, f, sl) <= 1e-12)


def test_normalization():
    mesh, _ = build_meshes(1, (0.0, 2.0), 8, k=1)
    c = np.zeros((10, 3, 2))
    ref = c.copy()
    c[..., 0] = 1.0
    sl = (mesh.axis.interior(PRIMAL),)
    assert np.allclose(l1_distance(c, ref, mesh, 1, sl), 1.0)
    assert np.allclose(l1_distance(c, ref, mesh, 1, sl, normalize=False), 2.0)


@given(st.floats(1e-12, 1.0), st.floats(0.5, 5.0))
def test_orders(e0, p):
    out = orders([[e0], [e0 / 2**p]], [8, 16])
    assert out[0][0] == pytest.approx(p)


def test_sample_primal(rng):
    mesh, _ = build_meshes(1, (0.0, 1.0), 10, k=2)
    f = lambda x: np.stack((np.sin(x), np.cos(x), x))
    c = project_novel(f, mesh, PRIMAL, 2).coef
    x = rng.uniform(0, 1, 20)
    assert np.allclose(sample_primal(c, mesh, 2, x), f(x), atol=1e-4)
    mesh2, _ = build_meshes(2, ((0.0, 1.0), (0.0, 1.0)), (6, 6), k=2)
    g = lambda x, y: np.stack((x + 2 * y, x * y, y * y, np.ones_like(x)))
    c2 = project_novel(g, mesh2, PRIMAL, 2).coef
    xs, ys = rng.uniform(0, 1, 15), rng.uniform(0, 1, 15)
    assert np.allclose(sample_primal(c2, mesh2, 2, xs, ys), g(xs, ys), atol=1e-13)
