"""Projected linear solve and contraction correction: structural checks."""

import numpy as np
import pytest

from multibump.correction import (assemble, balanced_width, build_basis,
                                  fixed_point, inertia, random_H,
                                  residual_fn, single_bubble_ansatz,
                                  solve_linear)
from multibump.energy import PotentialModel, compute_constants, l_k_eval
from multibump.geometry import build_ansatz
from multibump.params import ProblemParams
from multibump.quadrature import QuadratureSpec

P = ProblemParams()
SPEC = QuadratureSpec()


@pytest.fixture(scope="module")
def constants():
    return compute_constants(P, PotentialModel.from_params(P), SPEC)


@pytest.fixture(scope="module")
def system_k2(constants):
    """Small coupled-regime system reused across the solver tests."""
    nu = P.nu_of_k(2)
    w = balanced_width(P, constants, 2, nu)
    ans = build_ansatz(P, 2, nu * P.r0, w)
    basis = build_basis(ans)
    model = PotentialModel.from_params(P)
    return assemble(basis, model, nu, SPEC, matrices=False), ans, nu, model


def test_balanced_width_values(constants):
    assert balanced_width(P, constants, 4, 200.0) == pytest.approx(
        1.7007659292800008, rel=1e-12)
    assert balanced_width(P, constants, 4, 200.0,
                          mode="sign_changing") == pytest.approx(
        0.14940404619744208, rel=1e-12)
    # plain floats are accepted in place of tagged constants
    class Plain:
        B0 = constants.B0.value
        B_int = constants.B_int.value
    assert balanced_width(P, Plain, 4, 200.0) == pytest.approx(
        1.7007659292800008, rel=1e-12)


def test_zero_rhs_exact_zero(system_k2):
    system, _, _, _ = system_k2
    st = solve_linear(system, H=None)
    assert not np.any(st.coeffs)
    assert not np.any(st.multipliers)
    assert st.constraint_residual == 0.0


def test_random_rhs_constraints_and_determinism(system_k2):
    system, ans, _, _ = system_k2
    H1 = random_H(system, np.random.default_rng(11))
    H2 = random_H(system, np.random.default_rng(11))
    x = ans.centers() + 0.5
    assert np.array_equal(H1(x), H2(x))
    st = solve_linear(system, H=H1)
    assert st.constraint_residual <= 1e-8
    assert np.all(np.isfinite(st.coeffs))
    assert st.diagnostics["residual_sup"] <= st.diagnostics["rhs_sup"]


def test_near_kernel_only_dictionary_is_degenerate(system_k2):
    _, ans, nu, model = system_k2
    basis = build_basis(ans, val_widths=(), dr2_widths=(),
                        deriv_widths=(1.0,), radial_widths=())
    assert basis.size == 2
    system = assemble(basis, model, nu, SPEC, matrices=False)
    assert system["degenerate"]
    assert system["feasible_dim"] == 0


def test_collinear_dictionary_rejected(system_k2):
    _, ans, nu, model = system_k2
    basis = build_basis(ans, val_widths=(1.0, 1.0), dr2_widths=(),
                        deriv_widths=(), radial_widths=())
    with pytest.raises(ValueError, match="condition number"):
        assemble(basis, model, nu, SPEC, matrices=False)


def test_single_bubble_flat_potential_zero_correction():
    flat = PotentialModel(kind="K_max", c0=0.0)
    ans = single_bubble_ansatz(P, 200.0 * P.r0, 1.0 / 0.129)
    assert ans.n_bubbles == 1 and ans.bubbles[0].sign == 1
    system = assemble(build_basis(ans), flat, 200.0, SPEC, matrices=False)
    out = fixed_point(system, max_iter=2)
    assert out["converged"]
    assert float(np.max(np.abs(out["state"].coeffs))) == 0.0


def test_residual_fn_without_state_is_minus_lk(system_k2):
    system, ans, nu, model = system_k2
    x = ans.centers() + 0.3
    res = residual_fn(ans, model, nu)(x)
    assert np.allclose(res, -l_k_eval(ans, model, nu, x), rtol=1e-13)


def test_inertia_requires_matrices(system_k2):
    system, _, _, _ = system_k2
    with pytest.raises(KeyError):
        inertia(system)


def test_inertia_on_compact_basis(constants):
    nu = P.nu_of_k(2)
    w = balanced_width(P, constants, 2, nu)
    ans = build_ansatz(P, 2, nu * P.r0, w)
    basis = build_basis(ans, val_widths=(0.7, 1.0, 1.4), dr2_widths=(1.0,),
                        deriv_widths=(1.0,), radial_widths=(0.5,))
    model = PotentialModel.from_params(P)
    system = assemble(basis, model, nu, SPEC, matrices=True)
    assert system["gram_cond"] < 1e10
    n_pos, n_neg, n_zero = inertia(system)
    assert n_pos + n_neg + n_zero == basis.size - 2
    # the constrained quadratic form is indefinite: at least one negative
    # direction survives even with the near-kernel projected out
    assert n_neg >= 1
