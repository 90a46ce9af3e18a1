"""Pure-Python (numpy) kernel backend.

Same call signatures as the compiled backend in ``_ck.pyx``; selected at
import time by :mod:`blast._kernels` when the extension is unavailable or
``BLAST_KERNELS=py`` is set.
"""

import numpy as np

NAME = "python"


def lj_pair(r, epsilon, sigma, cutoff):
    """Shifted-truncated Lennard-Jones over an array of distances.

    Returns (energy, dV/dr) arrays; both are zero for r >= cutoff.
    The shift makes the energy (not the force) continuous at the cutoff.
    """
    r = np.asarray(r, dtype=np.float64)
    inside = r < cutoff
    e = np.zeros_like(r)
    dvdr = np.zeros_like(r)
    rr = r[inside]
    sr6 = (sigma / rr) ** 6
    sr12 = sr6 * sr6
    shift6 = (sigma / cutoff) ** 6
    shift = 4.0 * epsilon * (shift6 * shift6 - shift6)
    e[inside] = 4.0 * epsilon * (sr12 - sr6) - shift
    dvdr[inside] = 4.0 * epsilon * (-12.0 * sr12 + 6.0 * sr6) / rr
    return e, dvdr


def morse_pair(r, depth, alpha, r0, cutoff):
    """Shifted-truncated Morse well: D(1-exp(-a(r-r0)))^2 - D."""
    r = np.asarray(r, dtype=np.float64)
    inside = r < cutoff
    e = np.zeros_like(r)
    dvdr = np.zeros_like(r)
    rr = r[inside]
    ex = np.exp(-alpha * (rr - r0))
    exc = np.exp(-alpha * (cutoff - r0))
    shift = depth * (1.0 - exc) ** 2 - depth
    e[inside] = depth * (1.0 - ex) ** 2 - depth - shift
    dvdr[inside] = 2.0 * depth * alpha * (1.0 - ex) * ex
    return e, dvdr


def _sw_g(r, gs, rc):
    """Smooth radial decay exp(gs / (r - rc)) used by both SW terms."""
    return np.exp(gs / (r - rc)) if r < rc else 0.0


def sw_energy_forces(
    n,
    pair_i,
    pair_j,
    pair_d,
    pair_r,
    nbr_ptr,
    nbr_j,
    nbr_d,
    nbr_r,
    epsilon,
    sigma,
    a,
    lam,
    gamma,
    cos_theta0,
    big_a,
    big_b,
    p,
    q,
):
    """Stillinger-Weber energy and forces.

    pair_* is the half pair list (each pair once) for the two-body term;
    nbr_* is a CSR full adjacency (each directed neighbor) for triplets.
    All listed distances must already satisfy r < a*sigma.
    """
    rc = a * sigma
    forces = np.zeros((n, 3), dtype=np.float64)
    energy = 0.0

    # two-body
    for m in range(len(pair_i)):
        i, j, r = pair_i[m], pair_j[m], pair_r[m]
        sr = sigma / r
        radial = big_a * epsilon * (big_b * sr**p - sr**q)
        decay = np.exp(sigma / (r - rc))
        energy += radial * decay
        d_radial = big_a * epsilon * (-p * big_b * sr**p + q * sr**q) / r
        dvdr = d_radial * decay + radial * decay * (-sigma / (r - rc) ** 2)
        fvec = dvdr * pair_d[m] / r
        forces[j] -= fvec
        forces[i] += fvec

    # three-body: sum over centers i and unordered neighbor pairs (j, k)
    gs = gamma * sigma
    for i in range(n):
        lo, hi = nbr_ptr[i], nbr_ptr[i + 1]
        for u in range(lo, hi):
            rj = nbr_r[u]
            dj = nbr_d[u]
            gj = np.exp(gs / (rj - rc))
            dgj = -gs / (rj - rc) ** 2 * gj
            for v in range(u + 1, hi):
                rk = nbr_r[v]
                dk = nbr_d[v]
                gk = np.exp(gs / (rk - rc))
                dgk = -gs / (rk - rc) ** 2 * gk
                cos = float(dj @ dk) / (rj * rk)
                dev = cos - cos_theta0
                energy += lam * epsilon * dev * dev * gj * gk
                dh_drj = lam * epsilon * dev * dev * dgj * gk
                dh_drk = lam * epsilon * dev * dev * gj * dgk
                dh_dcos = 2.0 * lam * epsilon * dev * gj * gk
                grad_j = dh_drj * dj / rj + dh_dcos * (dk / (rj * rk) - cos * dj / rj**2)
                grad_k = dh_drk * dk / rk + dh_dcos * (dj / (rj * rk) - cos * dk / rk**2)
                jj = nbr_j[u]
                kk = nbr_j[v]
                forces[jj] -= grad_j
                forces[kk] -= grad_k
                forces[i] += grad_j + grad_k

    return energy, forces
