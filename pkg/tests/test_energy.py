"""Potential model, expansion constants, energy assembly, error terms."""

import numpy as np
import pytest

from multibump.correction import single_bubble_ansatz
from multibump.energy import (PotentialModel, N_phi_eval, compute_constants,
                              energy_terms, l_k_eval, lemma_A1_check,
                              pair_interaction)
from multibump.geometry import build_ansatz
from multibump.params import ProblemParams
from multibump.quadrature import QuadratureSpec

P = ProblemParams()
SPEC = QuadratureSpec()


@pytest.fixture(scope="module")
def constants():
    return compute_constants(P, PotentialModel.from_params(P), SPEC)


def test_potential_model_shape():
    model = PotentialModel.from_params(P)
    assert model.kind == "K_max"
    assert model.K_eval(P.r0) == pytest.approx(1.0, abs=1e-14)
    d = P.delta
    assert model.K_eval(P.r0 + d) == pytest.approx(1.0 - P.c0 * d ** P.m,
                                                   rel=1e-12)
    # taper returns to 1 beyond two flat widths; floor caps the dip
    assert model.K_eval(P.r0 + 2.5 * d) == pytest.approx(1.0, abs=1e-14)
    assert np.all(model.K_eval(np.linspace(0.0, 3.0, 200)) >= model.floor)
    mn = PotentialModel.from_params(ProblemParams(mode="sign_changing"))
    assert mn.kind == "K_min"
    assert mn.K_eval(P.r0 + d) > 1.0


def test_constants_frozen_values(constants):
    c = constants
    assert c.A.value == pytest.approx(158.6008620777033, rel=1e-12)
    assert c.B0.value == pytest.approx(99.68688451304564, rel=1e-12)
    assert c.B1.value == pytest.approx(311.52151410326763, rel=1e-12)
    assert c.B2.value == pytest.approx(2851.1027608981885, rel=1e-12)
    assert c.B3.value == pytest.approx(18.57179137173373, rel=1e-12)
    assert c.B3_alt.value == pytest.approx(133.52350684100188, rel=1e-12)
    assert c.B_int.value == pytest.approx(5702.205521796377, rel=1e-12)
    assert c.all_positive()
    assert c.B2.value == pytest.approx(0.5 * c.B_int.value, rel=1e-14)


def test_constants_quadrature_cross_check(constants):
    # the closed forms carry the deviation from independent quadrature
    assert constants.A.error / constants.A.value < 1e-3
    assert constants.B0.error / constants.B0.value < 1e-3
    for c in (constants.A, constants.B0, constants.B1, constants.B3):
        assert c.provenance == "closed_form"


def test_pair_interaction_scale_invariance():
    v1 = pair_interaction(20.0, 1.0, P, SPEC).value
    v2 = pair_interaction(40.0, 2.0, P, SPEC).value
    assert v2 == pytest.approx(v1, rel=1e-4)
    with pytest.raises(ValueError):
        pair_interaction(-1.0, 1.0, P, SPEC)


def test_single_bubble_flat_potential_residual_vanishes():
    flat = PotentialModel(kind="K_max", c0=0.0)
    ans = single_bubble_ansatz(P, 5.0, 1.0)
    rng = np.random.default_rng(6)
    x = rng.standard_normal((40, P.N)) * 4.0
    assert np.max(np.abs(l_k_eval(ans, flat, 50.0, x))) < 1e-12


def test_nonlinear_remainder_superlinear():
    model = PotentialModel.from_params(P)
    ans = build_ansatz(P, 4, 10.0, 1.0)
    probe = build_ansatz(P, 4, 10.0, 2.0)
    x = ans.centers() + 0.3
    base = None
    for t in (1e-2, 1e-3):
        val = np.max(np.abs(N_phi_eval(ans, model, 50.0,
                                       lambda y: t * probe(y), x)))
        if base is None:
            base = val
        else:
            # quadratic-or-better smallness: 10x smaller t, >= 50x smaller N
            assert val < base / 50.0


def test_energy_terms_structure():
    model = PotentialModel.from_params(P)
    ans = build_ansatz(P, 2, 23.776 * P.r0, 1.0 / 0.129)
    out = energy_terms(ans, model, 23.776, SPEC)
    assert out["diagonal"] == pytest.approx(
        2 * 158.6008620777033, rel=1e-10)
    assert out["deficit"] > 0  # K <= 1 near the ring for the max kind
    assert out["total"] == pytest.approx(
        out["diagonal"] + out["cross_quad"] + out["cross_nl"]
        + out["deficit"], rel=1e-12)


def test_lemma_A1_bounded_ratio():
    out = lemma_A1_check(P, n_samples=10_000, seed=0)
    assert out["stable"], out
