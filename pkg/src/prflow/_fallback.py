"""Pure-Python kernels, used when the compiled extension is unavailable."""
import math

import numpy as np
from scipy.linalg import solve_banded


def cn_march(u0, r, half_phi_dt, left, right, nsteps, stride, limit):
    """Crank-Nicolson march of the interior unknowns.

    Solves ``(1 + r - h) u_i^{k+1} - r/2 (u_{i-1}^{k+1} + u_{i+1}^{k+1})``
    ``= (1 - r + h) u_i^k + r/2 (u_{i-1}^k + u_{i+1}^k)`` with the two boundary
    neighbours replaced by ``r * left[k]`` and ``r * right[k]`` (boundary data
    at the half step), where ``h = half_phi_dt``.

    Returns ``(snapshots, steps_done)``; snapshot rows are the initial state,
    every ``stride``-th step and the final step.  Marching stops before the
    first step whose state is non-finite or exceeds ``limit`` in magnitude.
    """
    u = np.array(u0, dtype=np.float64)
    n = u.size
    ab = np.empty((3, n))
    ab[0, :] = -0.5 * r
    ab[1, :] = 1.0 + r - half_phi_dt
    ab[2, :] = -0.5 * r
    diag_e = 1.0 - r + half_phi_dt
    snaps = [u.copy()]
    done = 0
    rhs = np.empty(n)
    for k in range(nsteps):
        rhs[:] = diag_e * u
        rhs[1:] += 0.5 * r * u[:-1]
        rhs[:-1] += 0.5 * r * u[1:]
        rhs[0] += r * left[k]
        rhs[-1] += r * right[k]
        u_new = solve_banded((1, 1), ab, rhs, check_finite=False)
        if not np.all(np.isfinite(u_new)) or np.max(np.abs(u_new)) > limit:
            break
        u = u_new
        done = k + 1
        if done % stride == 0 or done == nsteps:
            snaps.append(u.copy())
    return np.array(snaps), done


def rk4_logistic(mu0, phi, dt, steps, cap):
    """Classical RK4 for mu' = 4 mu (mu - phi); halts when |mu| > cap."""
    out = np.empty(steps + 1)
    y = float(mu0)
    out[0] = y
    f = lambda z: 4.0 * z * (z - phi)
    for k in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(y) or abs(y) > cap:
            return out[: k + 1], True
        out[k + 1] = y
    return out, False
