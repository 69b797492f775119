"""Full-space integration, error honesty, and the Riesz potential."""

import math

import numpy as np
import pytest

from multibump.energy import bubble_lp_integral
from multibump.params import Bubble, ProblemParams, bubble_eval, \
    frac_lap_bubble
from multibump.quadrature import (QuadratureSpec, axial_reduce, integrate,
                                  riesz_apply, sphere_area)

P = ProblemParams()
SPEC = QuadratureSpec()


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert sphere_area(2) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_gaussian_integral():
    res = integrate(lambda x: np.exp(-(x * x).sum(axis=-1)), P.N, SPEC,
                    decay=P.N)
    truth = math.pi ** (P.N / 2.0)
    assert abs(res.value - truth) / truth < 1e-5
    assert abs(res.value - truth) <= 10.0 * (res.error + 1e-5 * truth)


def test_bubble_integral_and_error_honesty():
    b = Bubble(eps=1.0, xi=np.zeros(P.N))
    res = integrate(lambda x: bubble_eval(b, P, x) ** P.p_crit, P.N, SPEC,
                    decay=P.N)
    truth = bubble_lp_integral(P)
    assert abs(res.value - truth) / truth < 1e-4
    # the reported error bar must cover the actual deviation
    assert abs(res.value - truth) <= 10.0 * (res.error + SPEC.rel_tol * truth)


def test_monte_carlo_cross_check():
    b = Bubble(eps=1.0, xi=np.zeros(P.N))
    mc = QuadratureSpec(reduction="full_mc", rel_tol=2e-2, mc_seed=7)
    res = integrate(lambda x: np.abs(bubble_eval(b, P, x)) ** P.p_crit, P.N,
                    mc, decay=P.N)
    truth = bubble_lp_integral(P)
    assert abs(res.value - truth) / truth < 0.05


def test_translation_invariance():
    b0 = Bubble(eps=0.8, xi=np.zeros(P.N))
    xi = np.zeros(P.N)
    xi[0], xi[1] = 3.0, -1.0
    b1 = Bubble(eps=0.8, xi=xi)
    v0 = integrate(lambda x: bubble_eval(b0, P, x) ** P.p_crit, P.N, SPEC,
                   decay=P.N).value
    v1 = integrate(lambda x: np.abs(bubble_eval(b1, P, x)) ** P.p_crit, P.N,
                   SPEC, decay=P.N, centers=xi[None, :]).value
    assert v1 == pytest.approx(v0, rel=1e-4)


def test_axial_reduce_shape():
    g = axial_reduce(lambda x: np.exp(-(x * x).sum(axis=-1)), P.N)
    u = np.array([[0.5, -0.5, 1.0]])
    val = g(u)
    assert val.shape == (1,) and val[0] > 0


def test_riesz_inverts_fractional_laplacian():
    b = Bubble(eps=1.0, xi=np.zeros(P.N))
    x = np.zeros(P.N)
    x[0] = 1.0
    res = riesz_apply(lambda y: frac_lap_bubble(b, P, y), x, P, SPEC,
                      decay=P.N + 2 * P.s)
    want = float(bubble_eval(b, P, x))
    assert abs(res.value - want) / want < 1e-2


def test_riesz_decay_gate():
    b = Bubble(eps=1.0, xi=np.zeros(P.N))
    with pytest.raises(ValueError):
        riesz_apply(lambda y: bubble_eval(b, P, y), np.zeros(P.N), P, SPEC,
                    decay=P.s)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.5)
    with pytest.raises(ValueError):
        QuadratureSpec(max_evals=0)
    with pytest.raises(ValueError):
        QuadratureSpec(reduction="grid")


def test_non_finite_integrand_rejected():
    with pytest.raises(ValueError):
        integrate(lambda x: np.full(np.asarray(x).shape[:-1], np.nan), P.N,
                  SPEC, decay=P.N)
