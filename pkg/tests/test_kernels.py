import numpy as np
import pytest
from scipy.linalg import solve_banded

from prflow import kernels

IMPLS = kernels.implementations()


def test_selection():
    assert kernels.BACKEND in IMPLS


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_cn_single_step_matches_banded_solve(name):
    impl = IMPLS[name]
    rng = np.random.default_rng(1)
    u0 = rng.random(30)
    r, h = 0.8, 0.01
    snaps, done = impl.cn_march(u0, r, h, np.array([0.3]), np.array([0.7]), 1, 1, 1e300)
    ab = np.empty((3, 30))
    ab[0], ab[1], ab[2] = -0.5 * r, 1 + r - h, -0.5 * r
    rhs = (1 - r + h) * u0
    rhs[1:] += 0.5 * r * u0[:-1]
    rhs[:-1] += 0.5 * r * u0[1:]
    rhs[0] += r * 0.3
    rhs[-1] += r * 0.7
    assert done == 1
    assert np.allclose(snaps[-1], solve_banded((1, 1), ab, rhs), rtol=1e-13)


@pytest.mark.skipif(len(IMPLS) < 2, reason="compiled extension not built")
def test_implementations_agree():
    rng = np.random.default_rng(2)
    u0 = np.ascontiguousarray(rng.random(99))
    left = np.ascontiguousarray(rng.random(500))
    right = np.ascontiguousarray(rng.random(500))
    a, na = IMPLS["python"].cn_march(u0, 2.0, 0.001, left, right, 500, 37, 1e300)
    b, nb = IMPLS["cython"].cn_march(u0, 2.0, 0.001, left, right, 500, 37, 1e300)
    assert na == nb and np.asarray(a).shape == np.asarray(b).shape
    assert np.max(np.abs(np.asarray(a) - np.asarray(b))) < 1e-12
    ra, ha = IMPLS["python"].rk4_logistic(3.0, 2.0, 1e-4, 5000, 1e15)
    rb, hb = IMPLS["cython"].rk4_logistic(3.0, 2.0, 1e-4, 5000, 1e15)
    assert ha == hb and np.array_equal(np.asarray(ra), np.asarray(rb))


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_overflow_stops_march(name):
    u0 = np.ones(9)
    snaps, done = IMPLS[name].cn_march(u0, 0.1, 0.9, np.zeros(200), np.zeros(200), 200, 10, 1e10)
    assert done < 200
    assert np.all(np.abs(np.asarray(snaps)) <= 1e10)


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    code = ("from prflow import kernels, scenarios; from prflow.flow import evolve;"
            "p, b, c = scenarios.exact_mode(m=50, dt=1e-3, backend='fd');"
            "print(kernels.BACKEND, repr(float(evolve(p, b, c)['fd'].values[-1][25])))")
    env = dict(os.environ, PRFLOW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split()
    assert name == "python"
    from prflow import scenarios
    from prflow.flow import evolve
    p, b, c = scenarios.exact_mode(m=50, dt=1e-3, backend="fd")
    assert float(value) == pytest.approx(evolve(p, b, c)["fd"].values[-1][25], rel=1e-12)
