"""Parameter gates, the bubble closed forms, and derivative oracles."""

import math

import numpy as np
import pytest

from multibump.params import (Bubble, ProblemParams, alpha_const, bubble_deps,
                              bubble_dr, bubble_dr2, bubble_eval,
                              dirichlet_eta, frac_lap_bubble, gamma_fn,
                              zeta_fn)

P = ProblemParams()


def test_default_exponents():
    assert P.p_crit == pytest.approx(3.125, abs=1e-14)
    assert P.tau == pytest.approx(0.21875, abs=1e-14)
    assert P.n_minus_2s == pytest.approx(3.2, abs=1e-14)
    assert P.nu_of_k(2) == pytest.approx(2.0 ** (3.2 / 0.7), rel=1e-14)


def test_amplitude_value():
    assert alpha_const(P) == pytest.approx(8.846972709551725, rel=1e-13)


def test_special_functions():
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)
    assert zeta_fn(2.0) == pytest.approx(math.pi ** 2 / 6.0, rel=1e-12)
    assert dirichlet_eta(2.0) == pytest.approx(math.pi ** 2 / 12.0, rel=1e-12)
    with pytest.raises(ValueError):
        gamma_fn(-1.0)
    with pytest.raises(ValueError):
        zeta_fn(1.0)


def test_parameter_gates():
    with pytest.raises(ValueError):
        ProblemParams(s=1.0)
    with pytest.raises(ValueError):
        ProblemParams(s=0.4, N=2)
    with pytest.raises(ValueError):
        ProblemParams(m=3.2)  # open upper bound m < N - 2s
    with pytest.raises(ValueError):
        ProblemParams(m=1.0)
    with pytest.raises(ValueError):
        ProblemParams(mode="other")
    with pytest.raises(ValueError):
        P.nu_of_k(1)


def test_serialization_round_trip():
    q = ProblemParams(N=6, s=0.7, m=3.0, mode="sign_changing")
    assert ProblemParams.from_json(q.to_json()) == q


def test_closed_form_identity_pointwise():
    """(-Delta)^s U equals the critical power of U, everywhere."""
    b = Bubble(eps=0.7, xi=np.array([1.0, -2.0, 0.0, 0.5, 0.0]))
    rng = np.random.default_rng(1)
    x = rng.standard_normal((50, P.N)) * 3.0
    u = bubble_eval(b, P, x)
    assert np.max(np.abs(frac_lap_bubble(b, P, x)
                         - np.sign(u) * np.abs(u) ** (P.p_crit - 1.0))) < 1e-12


def _fd_order(exact_fn, value_fn, x, h0=1e-3):
    """Empirical convergence order of a central difference against exact_fn."""
    errs = []
    for h in (h0, h0 / 2.0):
        fd = (value_fn(x, h) - value_fn(x, -h)) / (2.0 * h)
        errs.append(np.max(np.abs(fd - exact_fn(x))))
    return math.log2(errs[0] / errs[1])


def test_deps_fd_order():
    xi = np.zeros(P.N)
    xi[0] = 2.0
    rng = np.random.default_rng(2)
    x = xi + rng.standard_normal((30, P.N))

    order = _fd_order(
        lambda x: bubble_deps(Bubble(eps=1.3, xi=xi), P, x),
        lambda x, h: bubble_eval(Bubble(eps=1.3 + h, xi=xi), P, x), x)
    assert order >= 1.9


def test_dr_fd_order():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((30, P.N)) * 2.0

    def val(x, h):
        xi = np.zeros(P.N)
        xi[0] = 2.0 + h
        return bubble_eval(Bubble(eps=0.8, xi=xi), P, x)

    xi0 = np.zeros(P.N)
    xi0[0] = 2.0
    order = _fd_order(lambda x: bubble_dr(Bubble(eps=0.8, xi=xi0), P, x),
                      val, x)
    assert order >= 1.9


def test_dr2_matches_fd_of_dr():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((30, P.N)) * 2.0

    def dr_at(x, h):
        xi = np.zeros(P.N)
        xi[0] = 2.0 + h
        return bubble_dr(Bubble(eps=0.8, xi=xi), P, x)

    xi0 = np.zeros(P.N)
    xi0[0] = 2.0
    order = _fd_order(lambda x: bubble_dr2(Bubble(eps=0.8, xi=xi0), P, x),
                      dr_at, x)
    assert order >= 1.9


def test_center_derivatives_require_ring_center():
    b = Bubble(eps=1.0, xi=np.zeros(P.N))
    x = np.zeros((1, P.N))
    with pytest.raises(ValueError):
        bubble_dr(b, P, x)
    with pytest.raises(ValueError):
        bubble_dr2(b, P, x)


def test_bubble_validation():
    with pytest.raises(ValueError):
        Bubble(eps=0.0, xi=np.zeros(P.N))
    with pytest.raises(ValueError):
        Bubble(eps=1.0, xi=np.zeros(P.N), sign=2)
