"""Kernel backends: frozen reference values and compiled/python agreement.

Reference numbers were computed by hand from the closed forms:
  LJ:    4*eps*((sigma/r)^12 - (sigma/r)^6) - shift(cutoff)
  Morse: D*(1 - exp(-a*(r - r0)))^2 - D    - shift(cutoff)
"""

import math

import numpy as np
import pytest

from blast._kernels import available_backends, get_backend


BACKENDS = available_backends()


@pytest.fixture(params=BACKENDS)
def kern(request):
    return get_backend(request.param)


def test_both_backends_present():
    # the build compiles the extension; the pure-Python fallback must always exist
    assert "python" in BACKENDS
    assert "compiled" in BACKENDS


def test_lj_reference_value(kern):
    # 4*(1.5^-12 - 1.5^-6) = 4*(0.00770735... - 0.08779150...) = -0.32033659...
    e, dvdr = kern.lj_pair(np.array([1.5]), 1.0, 1.0, 100.0)
    shift = 4.0 * (100.0**-12 - 100.0**-6)
    assert e[0] == pytest.approx(-0.3203365942 - shift, abs=1e-9)


def test_lj_zero_at_and_beyond_cutoff(kern):
    e, dvdr = kern.lj_pair(np.array([2.5, 2.5 + 1e-9, 3.0, 50.0]), 1.0, 1.0, 2.5)
    # shifted to zero at the cutoff, identically zero beyond
    assert e[0] == pytest.approx(0.0, abs=1e-15)
    assert np.all(e[1:] == 0.0)
    assert np.all(dvdr[1:] == 0.0)


def test_lj_minimum_location(kern):
    # dV/dr = 0 at r = 2^(1/6) sigma, V = -eps there (up to the shift)
    sigma, eps = 1.3, 0.7
    rmin = 2.0 ** (1.0 / 6.0) * sigma
    e, dvdr = kern.lj_pair(np.array([rmin]), eps, sigma, 1e6)
    assert dvdr[0] == pytest.approx(0.0, abs=1e-12)
    assert e[0] == pytest.approx(-eps, abs=1e-9)


def test_morse_reference_value(kern):
    # D(1 - e^{-(2-1)})^2 - D = (1 - 1/e)^2 - 1 = -0.60042359910...
    e, _ = kern.morse_pair(np.array([2.0]), 1.0, 1.0, 1.0, 100.0)
    shift = (1.0 - math.exp(-99.0)) ** 2 - 1.0
    assert e[0] == pytest.approx(-0.6004235991 - shift, abs=1e-9)


def test_morse_minimum_at_r0(kern):
    d, a, r0 = 0.9, 1.7, 2.1
    e, dvdr = kern.morse_pair(np.array([r0]), d, a, r0, 50.0)
    assert dvdr[0] == pytest.approx(0.0, abs=1e-12)
    assert e[0] == pytest.approx(-d, abs=1e-9)


def test_morse_cutoff(kern):
    e, dvdr = kern.morse_pair(np.array([5.0, 7.0]), 1.0, 1.0, 1.0, 5.0)
    assert e[0] == pytest.approx(0.0, abs=1e-15)
    assert e[1] == 0.0 and dvdr[1] == 0.0


def test_pair_derivative_matches_fd(kern):
    rng = np.random.default_rng(0)
    r = rng.uniform(0.8, 2.4, 64)
    h = 1e-7
    for fn, args in (
        (kern.lj_pair, (0.8, 1.1, 3.0)),
        (kern.morse_pair, (0.8, 1.5, 1.2, 3.0)),
    ):
        r_ok = r[np.abs(r - args[-1]) > 0.01]
        _, dvdr = fn(r_ok, *args)
        ep, _ = fn(r_ok + h, *args)
        em, _ = fn(r_ok - h, *args)
        fd = (ep - em) / (2 * h)
        assert np.allclose(dvdr, fd, rtol=1e-6, atol=1e-8)


def _sw_inputs(structure_positions, params):
    """Build the kernel inputs the way potentials does, without blast deps."""
    from blast.structures import Structure, full_adjacency, neighbor_list

    s = Structure(("Si",) * len(structure_positions), structure_positions)
    rc = params["a"] * params["sigma"]
    nl = neighbor_list(s, rc)
    keep = nl.dist < rc * (1 - 1e-12)
    pi, pj = nl.pair_i[keep], nl.pair_j[keep]
    pd, pr = nl.dvec[keep], nl.dist[keep]
    ptr, nj, nd, nr = full_adjacency(len(s), pi, pj, pd, pr)
    return len(s), pi, pj, pd, pr, ptr, nj, nd, nr


SW_PARAMS = dict(
    epsilon=2.1683, sigma=2.0951, a=1.80, lam=21.0, gamma=1.20,
    cos_theta0=-1.0 / 3.0, big_a=7.049556277, big_b=0.6022245584, p=4.0, q=0.0,
)


def test_sw_backends_agree():
    rng = np.random.default_rng(3)
    pos = rng.uniform(0.0, 5.0, (8, 3))
    args = _sw_inputs(pos, {"a": SW_PARAMS["a"], "sigma": SW_PARAMS["sigma"]})
    vals = []
    for name in BACKENDS:
        e, f = get_backend(name).sw_energy_forces(*args, *SW_PARAMS.values())
        vals.append((e, f))
    e0, f0 = vals[0]
    for e, f in vals[1:]:
        assert e == pytest.approx(e0, rel=1e-12)
        assert np.allclose(f, f0, rtol=1e-12, atol=1e-14)


def test_pair_backends_agree():
    rng = np.random.default_rng(4)
    r = rng.uniform(0.5, 4.0, 200)
    results = [get_backend(n).lj_pair(r, 0.8, 1.1, 3.3) for n in BACKENDS]
    for e, dv in results[1:]:
        assert np.allclose(e, results[0][0], rtol=1e-14, atol=1e-300)
        assert np.allclose(dv, results[0][1], rtol=1e-14, atol=1e-300)
