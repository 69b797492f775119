"""Reduced-energy model: derivatives, critical point, linking checks."""

import numpy as np
import pytest

from multibump.energy import PotentialModel, compute_constants
from multibump.params import ProblemParams
from multibump.quadrature import QuadratureSpec
from multibump.reduced import (ReducedModel, boundary_sign_checks,
                               dF_deps_model, dF_dr_model, eps0, F_model,
                               find_critical_point, flow_solve,
                               hessian_model, landscape_scan,
                               maxmin_certificate)

P = ProblemParams()


@pytest.fixture(scope="module")
def constants():
    return compute_constants(P, PotentialModel.from_params(P),
                             QuadratureSpec())


@pytest.fixture(scope="module")
def model_pos(constants):
    return ReducedModel(constants=constants, p=P, k=16)


@pytest.fixture(scope="module")
def model_alt(constants):
    return ReducedModel(constants=constants, p=P, k=16, mode="sign_changing")


def test_eps0_frozen(model_pos, model_alt):
    assert eps0(model_pos) == pytest.approx(0.12900549330185546, rel=1e-12)
    assert eps0(model_alt) == pytest.approx(2.1600856225350413, rel=1e-12)


def test_gradient_matches_fd(model_pos):
    r0, e0 = model_pos.r_center + 0.3 * model_pos.r_halfwidth, \
        model_pos.eps_center - 0.2 * model_pos.eps_halfwidth
    hr, he = 1e-5 * r0, 1e-6 * e0
    fd_r = (F_model(model_pos, r0 + hr, e0)
            - F_model(model_pos, r0 - hr, e0)) / (2 * hr)
    fd_e = (F_model(model_pos, r0, e0 + he)
            - F_model(model_pos, r0, e0 - he)) / (2 * he)
    assert dF_dr_model(model_pos, r0, e0) == pytest.approx(fd_r, rel=1e-6)
    assert dF_deps_model(model_pos, r0, e0) == pytest.approx(fd_e, rel=1e-6)


def test_hessian_matches_fd(model_pos):
    r0, e0 = model_pos.r_center, model_pos.eps_center
    hr, he = 1e-4 * r0, 1e-6 * e0
    H = hessian_model(model_pos, r0, e0)
    fd_rr = (dF_dr_model(model_pos, r0 + hr, e0)
             - dF_dr_model(model_pos, r0 - hr, e0)) / (2 * hr)
    fd_ee = (dF_deps_model(model_pos, r0, e0 + he)
             - dF_deps_model(model_pos, r0, e0 - he)) / (2 * he)
    fd_re = (dF_dr_model(model_pos, r0, e0 + he)
             - dF_dr_model(model_pos, r0, e0 - he)) / (2 * he)
    assert H[0, 0] == pytest.approx(fd_rr, rel=1e-5)
    assert H[1, 1] == pytest.approx(fd_ee, rel=1e-5)
    assert H[0, 1] == pytest.approx(fd_re, rel=1e-5)


@pytest.mark.parametrize("which", ["model_pos", "model_alt"])
def test_critical_point(which, request):
    model = request.getfixturevalue(which)
    out = find_critical_point(model, n_starts=10, seed=0)
    assert out["interior"] and out["unique"]
    assert abs(out["eps_star"] - eps0(model)) / eps0(model) < 1e-6
    assert out["grad_norm"] <= 1e-10 * model.k
    # saddle: max in the ring radius, min in the concentration scale
    assert out["signature"] == (1, 1)


@pytest.mark.parametrize("which", ["model_pos", "model_alt"])
def test_linking_certificate(which, request):
    model = request.getfixturevalue(which)
    cert = maxmin_certificate(model)
    assert cert["passed"], cert
    faces = boundary_sign_checks(model)
    assert faces["passed"], faces


def test_flow_terminates_inside(model_pos):
    start = (model_pos.r_center + 0.5 * model_pos.r_halfwidth,
             model_pos.eps_center + 0.5 * model_pos.eps_halfwidth)
    out = flow_solve(model_pos, start)
    assert out["reason"] in ("gradient", "sublevel_alpha1", "boundary")
    with pytest.raises(ValueError):
        flow_solve(model_pos, (model_pos.r_center
                               + 2.0 * model_pos.r_halfwidth,
                               model_pos.eps_center))


def test_landscape_scan_shape(model_pos):
    out = landscape_scan(model_pos, n=16)
    assert out["F"].shape == (16, 16)
    assert out["critical"]["interior"]


def test_window_validation(constants):
    with pytest.raises(ValueError):
        ReducedModel(constants=constants, p=P, k=16, theta_bar=0.05)
    with pytest.raises(ValueError):
        ReducedModel(constants=constants, p=P, k=1)
