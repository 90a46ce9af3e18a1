# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend. Mirrors blast._kernels.pyk exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow

NAME = "compiled"


def lj_pair(r, double epsilon, double sigma, double cutoff):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rr = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t m = rr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dvdr = np.zeros(m, dtype=np.float64)
    cdef double sr6, sr12, shift6, shift, x
    cdef Py_ssize_t k
    shift6 = pow(sigma / cutoff, 6.0)
    shift = 4.0 * epsilon * (shift6 * shift6 - shift6)
    for k in range(m):
        x = rr[k]
        if x < cutoff:
            sr6 = pow(sigma / x, 6.0)
            sr12 = sr6 * sr6
            e[k] = 4.0 * epsilon * (sr12 - sr6) - shift
            dvdr[k] = 4.0 * epsilon * (-12.0 * sr12 + 6.0 * sr6) / x
    return e, dvdr


def morse_pair(r, double depth, double alpha, double r0, double cutoff):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rr = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t m = rr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dvdr = np.zeros(m, dtype=np.float64)
    cdef double ex, exc, shift, x
    cdef Py_ssize_t k
    exc = exp(-alpha * (cutoff - r0))
    shift = depth * (1.0 - exc) * (1.0 - exc) - depth
    for k in range(m):
        x = rr[k]
        if x < cutoff:
            ex = exp(-alpha * (x - r0))
            e[k] = depth * (1.0 - ex) * (1.0 - ex) - depth - shift
            dvdr[k] = 2.0 * depth * alpha * (1.0 - ex) * ex
    return e, dvdr


def sw_energy_forces(
    Py_ssize_t n,
    pair_i,
    pair_j,
    pair_d,
    pair_r,
    nbr_ptr,
    nbr_j,
    nbr_d,
    nbr_r,
    double epsilon,
    double sigma,
    double a,
    double lam,
    double gamma,
    double cos_theta0,
    double big_a,
    double big_b,
    double p,
    double q,
):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pi = np.ascontiguousarray(pair_i, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pj = np.ascontiguousarray(pair_j, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pd = np.ascontiguousarray(pair_d, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pr = np.ascontiguousarray(pair_r, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ptr = np.ascontiguousarray(nbr_ptr, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nj = np.ascontiguousarray(nbr_j, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] nd = np.ascontiguousarray(nbr_d, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nr = np.ascontiguousarray(nbr_r, dtype=np.float64)

    cdef cnp.ndarray[cnp.float64_t, ndim=2] forces = np.zeros((n, 3), dtype=np.float64)
    cdef double energy = 0.0
    cdef double rc = a * sigma
    cdef double gs = gamma * sigma

    cdef Py_ssize_t m, i, j, u, v, jj, kk, c
    cdef double r, sr, radial, decay, d_radial, dvdr, fx, fy, fz
    cdef double rj, rk, gj, gk, dgj, dgk, cosv, dev
    cdef double dh_drj, dh_drk, dh_dcos
    cdef double djx, djy, djz, dkx, dky, dkz
    cdef double gjx, gjy, gjz, gkx, gky, gkz

    for m in range(pi.shape[0]):
        i = pi[m]
        j = pj[m]
        r = pr[m]
        sr = sigma / r
        radial = big_a * epsilon * (big_b * pow(sr, p) - pow(sr, q))
        decay = exp(sigma / (r - rc))
        energy += radial * decay
        d_radial = big_a * epsilon * (-p * big_b * pow(sr, p) + q * pow(sr, q)) / r
        dvdr = d_radial * decay + radial * decay * (-sigma / ((r - rc) * (r - rc)))
        fx = dvdr * pd[m, 0] / r
        fy = dvdr * pd[m, 1] / r
        fz = dvdr * pd[m, 2] / r
        forces[j, 0] -= fx
        forces[j, 1] -= fy
        forces[j, 2] -= fz
        forces[i, 0] += fx
        forces[i, 1] += fy
        forces[i, 2] += fz

    for i in range(n):
        for u in range(ptr[i], ptr[i + 1]):
            rj = nr[u]
            djx = nd[u, 0]
            djy = nd[u, 1]
            djz = nd[u, 2]
            gj = exp(gs / (rj - rc))
            dgj = -gs / ((rj - rc) * (rj - rc)) * gj
            for v in range(u + 1, ptr[i + 1]):
                rk = nr[v]
                dkx = nd[v, 0]
                dky = nd[v, 1]
                dkz = nd[v, 2]
                gk = exp(gs / (rk - rc))
                dgk = -gs / ((rk - rc) * (rk - rc)) * gk
                cosv = (djx * dkx + djy * dky + djz * dkz) / (rj * rk)
                dev = cosv - cos_theta0
                energy += lam * epsilon * dev * dev * gj * gk
                dh_drj = lam * epsilon * dev * dev * dgj * gk
                dh_drk = lam * epsilon * dev * dev * gj * dgk
                dh_dcos = 2.0 * lam * epsilon * dev * gj * gk
                gjx = dh_drj * djx / rj + dh_dcos * (dkx / (rj * rk) - cosv * djx / (rj * rj))
                gjy = dh_drj * djy / rj + dh_dcos * (dky / (rj * rk) - cosv * djy / (rj * rj))
                gjz = dh_drj * djz / rj + dh_dcos * (dkz / (rj * rk) - cosv * djz / (rj * rj))
                gkx = dh_drk * dkx / rk + dh_dcos * (djx / (rj * rk) - cosv * dkx / (rk * rk))
                gky = dh_drk * dky / rk + dh_dcos * (djy / (rj * rk) - cosv * dky / (rk * rk))
                gkz = dh_drk * dkz / rk + dh_dcos * (djz / (rj * rk) - cosv * dkz / (rk * rk))
                jj = nj[u]
                kk = nj[v]
                forces[jj, 0] -= gjx
                forces[jj, 1] -= gjy
                forces[jj, 2] -= gjz
                forces[kk, 0] -= gkx
                forces[kk, 1] -= gky
                forces[kk, 2] -= gkz
                forces[i, 0] += gjx + gkx
                forces[i, 1] += gjy + gky
                forces[i, 2] += gjz + gkz

    return energy, forces
