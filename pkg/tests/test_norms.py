"""Weighted sup-norms: algebraic properties and cloud refinement."""

import numpy as np
import pytest

from multibump.geometry import build_ansatz
from multibump.norms import NormSpec, dstar_norm, star_norm
from multibump.params import ProblemParams

P = ProblemParams()


def _spec(k=4, r=10.0, eps=1.0, flavor="star"):
    ans = build_ansatz(P, k, r, eps)
    return ans, NormSpec(centers=ans.centers(), p=P, eps=eps, flavor=flavor)


def test_homogeneity():
    ans, spec = _spec()
    base = star_norm(ans, spec).value
    scaled = star_norm(lambda x: -3.0 * ans(x), spec).value
    assert scaled == pytest.approx(3.0 * base, rel=1e-13)


def test_triangle_inequality():
    ans, spec = _spec()
    rng = np.random.default_rng(5)
    c = rng.standard_normal(3)

    def u(x):
        return c[0] * ans(x) + c[1] * np.exp(-(x * x).sum(axis=-1))

    def v(x):
        return c[2] * ans(x)

    lhs = star_norm(lambda x: u(x) + v(x), spec).value
    rhs = star_norm(u, spec).value + star_norm(v, spec).value
    assert lhs <= rhs * (1.0 + 1e-12)


def test_exponents():
    _, s = _spec(flavor="star")
    _, d = _spec(flavor="dstar")
    assert s.exponent == pytest.approx((P.N - 2 * P.s) / 2 + P.tau, abs=1e-14)
    assert d.exponent == pytest.approx((P.N + 2 * P.s) / 2 + P.tau, abs=1e-14)
    assert d.exponent > s.exponent


def test_refinement_monotone():
    for k, r, eps in ((4, 10.0, 1.0), (2, 3.0, 0.5), (8, 200.0, 7.75)):
        ans = build_ansatz(P, k, r, eps)
        spec = NormSpec(centers=ans.centers(), p=P, eps=eps)
        fine = spec.refined()
        assert len(fine.cloud) > len(spec.cloud)
        v0 = star_norm(ans, spec).value
        v1 = star_norm(ans, fine).value
        assert v1 >= v0 * (1.0 - 1e-12)


def test_argmax_in_cloud():
    ans, spec = _spec()
    res = star_norm(ans, spec)
    assert any(np.array_equal(res.argmax, pt) for pt in spec.cloud)
    assert float(res) == res.value


def test_dstar_norm_runs_on_star_spec():
    ans, spec = _spec(flavor="star")
    assert dstar_norm(ans, spec).value > 0


def test_flavor_validation():
    ans = build_ansatz(P, 4, 10.0, 1.0)
    with pytest.raises(ValueError):
        NormSpec(centers=ans.centers(), p=P, flavor="sup")
