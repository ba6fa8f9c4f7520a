# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels.

Same signatures and semantics as ``prflow._fallback``.
"""
import numpy as np

from libc.math cimport fabs, isfinite


def cn_march(const double[::1] u0, double r, double half_phi_dt,
             const double[::1] left, const double[::1] right,
             Py_ssize_t nsteps, Py_ssize_t stride, double limit):
    cdef Py_ssize_t n = u0.shape[0]
    cdef Py_ssize_t nsnap = nsteps // stride + 1 + (1 if nsteps % stride else 0)
    snaps_arr = np.empty((nsnap, n), dtype=np.float64)
    cdef double[:, ::1] snaps = snaps_arr
    cdef double[::1] u = np.array(u0, dtype=np.float64)
    cdef double[::1] rhs = np.empty(n, dtype=np.float64)
    cdef double[::1] gam = np.empty(n, dtype=np.float64)
    cdef double[::1] beta = np.empty(n, dtype=np.float64)
    cdef double diag = 1.0 + r - half_phi_dt
    cdef double off = -0.5 * r
    cdef double diag_e = 1.0 - r + half_phi_dt
    cdef double half_r = 0.5 * r
    cdef Py_ssize_t i, k, row = 0, done = 0
    cdef double v
    cdef bint blown = False

    # LU factors of the constant implicit matrix
    beta[0] = diag
    for i in range(1, n):
        gam[i - 1] = off / beta[i - 1]
        beta[i] = diag - off * gam[i - 1]

    for i in range(n):
        snaps[0, i] = u[i]
    row = 1

    for k in range(nsteps):
        if n == 1:
            rhs[0] = diag_e * u[0] + r * (left[k] + right[k])
        else:
            rhs[0] = diag_e * u[0] + half_r * u[1] + r * left[k]
            for i in range(1, n - 1):
                rhs[i] = diag_e * u[i] + half_r * (u[i - 1] + u[i + 1])
            rhs[n - 1] = diag_e * u[n - 1] + half_r * u[n - 2] + r * right[k]
        # forward sweep
        u[0] = rhs[0] / beta[0]
        for i in range(1, n):
            u[i] = (rhs[i] - off * u[i - 1]) / beta[i]
        # back substitution
        for i in range(n - 2, -1, -1):
            u[i] = u[i] - gam[i] * u[i + 1]
        for i in range(n):
            v = u[i]
            if not isfinite(v) or fabs(v) > limit:
                blown = True
                break
        if blown:
            break
        done = k + 1
        if done % stride == 0 or done == nsteps:
            for i in range(n):
                snaps[row, i] = u[i]
            row += 1
    return snaps_arr[:row], done


def rk4_logistic(double mu0, double phi, double dt, Py_ssize_t steps, double cap):
    out_arr = np.empty(steps + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double y = mu0, k1, k2, k3, k4, yt
    cdef Py_ssize_t k
    out[0] = y
    for k in range(steps):
        k1 = 4.0 * y * (y - phi)
        yt = y + 0.5 * dt * k1
        k2 = 4.0 * yt * (yt - phi)
        yt = y + 0.5 * dt * k2
        k3 = 4.0 * yt * (yt - phi)
        yt = y + dt * k3
        k4 = 4.0 * yt * (yt - phi)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not isfinite(y) or fabs(y) > cap:
            return out_arr[:k + 1], True
        out[k + 1] = y
    return out_arr, False
