"""The finite-dimensional reduced problem in the two variables (r, eps).

The reduced energy of the k-bump configuration is, to leading order,

    F(r, eps) = k * (A + sigma * ( B0 / (eps^m nu^m)
                + B1 (nu r0 - r)^2 / (eps^(m-2) nu^m)
                - B3 k^(N-2s) / (eps^(N-2s) r^(N-2s)) ))

with sigma = +1 for the positive configuration and sigma = -1 (and the
alternating interaction constant) for the sign-changing one.  This module
provides the analytic model, its derivatives, the optimal concentration
eps0, the descent flow on the working functional, a damped-Newton critical
point search, the max-min certificate, and landscape scans over the window
Omega around (nu r0, eps0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import ExpansionConstants
from .params import ProblemParams

__all__ = [
    "ReducedModel",
    "eps0",
    "F_model",
    "dF_dr_model",
    "dF_deps_model",
    "hessian_model",
    "flow_solve",
    "find_critical_point",
    "maxmin_certificate",
    "landscape_scan",
]


@dataclass(frozen=True)
class ReducedModel:
    """Analytic reduced-energy model over the window Omega.

    Omega = [nu r0 - nu^-tb, nu r0 + nu^-tb]
          x [eps0 - nu^-(3 tb/2), eps0 + nu^-(3 tb/2)]
    with tb = theta_bar; construction fails if the eps window is not
    strictly positive.
    """

    constants: ExpansionConstants
    p: ProblemParams
    k: int
    mode: str = "positive"
    theta_bar: float = 0.65
    eta_frac: float = 0.1

    def __post_init__(self):
        if self.mode not in ("positive", "sign_changing"):
            raise ValueError("mode must be 'positive' or 'sign_changing'")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.theta_bar <= 0:
            raise ValueError("theta_bar must be positive")
        if not self.constants.all_positive():
            raise ValueError("expansion constants must all be positive")
        lo = self.eps_center - self.eps_halfwidth
        if lo <= 0:
            raise ValueError(
                f"invalid window: eps lower edge {lo:.4g} <= 0; decrease "
                "theta_bar or increase k")

    # -- geometry of the window ------------------------------------------

    @property
    def nu(self) -> float:
        return self.p.nu_of_k(self.k)

    @property
    def sigma(self) -> float:
        return 1.0 if self.mode == "positive" else -1.0

    @property
    def B3_eff(self) -> float:
        return (self.constants.B3.value if self.mode == "positive"
                else self.constants.B3_alt.value)

    @property
    def r_center(self) -> float:
        return self.nu * self.p.r0

    @property
    def r_halfwidth(self) -> float:
        return self.nu ** (-self.theta_bar)

    @property
    def eps_center(self) -> float:
        return eps0(self)

    @property
    def eps_halfwidth(self) -> float:
        return self.nu ** (-1.5 * self.theta_bar)

    def in_omega(self, r, eps) -> np.ndarray:
        return ((np.abs(np.asarray(r) - self.r_center) <= self.r_halfwidth)
                & (np.abs(np.asarray(eps) - self.eps_center)
                   <= self.eps_halfwidth))

    # -- levels -----------------------------------------------------------

    def alpha1_dev(self) -> float:
        """Lower reference level, in deviation units (see ``working_dev``).

        The margin analysis fixes the sign of the nu^-(m+5 tb/2) buffer to
        '-' in both modes (the alternating display carries a '+' which
        would put the level above the interior fiber value).
        """
        e0 = self.eps_center
        eta = self.p.n_minus_2s
        h0 = (self.constants.B0.value / e0 ** self.p.m
              - self.B3_eff / (e0 ** eta * self.p.r0 ** eta))
        return -h0 - self.nu ** (-2.5 * self.theta_bar)

    def alpha2_dev(self) -> float:
        return (self.eta_frac * self.constants.A.value
                * self.nu ** self.p.m)

    def alpha1(self) -> float:
        """Lower reference level of the working functional (absolute)."""
        return self.k * (-self.sigma * self.constants.A.value
                         + self.alpha1_dev() / self.nu ** self.p.m)

    def alpha2(self) -> float:
        return self.k * (-self.sigma * self.constants.A.value
                         + self.eta_frac * self.constants.A.value)


def eps0(model: ReducedModel) -> float:
    """Optimal concentration (B3 (N-2s) / (B0 m r0^(N-2s)))^(1/(N-2s-m))."""
    p = model.p
    eta = p.n_minus_2s
    val = (model.B3_eff * eta
           / (model.constants.B0.value * p.m * p.r0 ** eta))
    return val ** (1.0 / (eta - p.m))


def _terms(model: ReducedModel, r, eps):
    p = model.p
    r = np.asarray(r, dtype=float)
    eps = np.asarray(eps, dtype=float)
    d = model.nu * p.r0 - r
    eta = p.n_minus_2s
    num = model.nu ** (-p.m)
    t0 = model.constants.B0.value * eps ** (-p.m) * num
    t1 = model.constants.B1.value * d ** 2 * eps ** (2.0 - p.m) * num
    t3 = model.B3_eff * model.k ** eta * eps ** (-eta) * r ** (-eta)
    return d, eta, num, t0, t1, t3


def F_model(model: ReducedModel, r, eps):
    """Leading-order reduced energy; vectorized over (r, eps) arrays."""
    _, _, _, t0, t1, t3 = _terms(model, r, eps)
    out = model.k * (model.constants.A.value
                     + model.sigma * (t0 + t1 - t3))
    return float(out) if np.ndim(out) == 0 else out


def dF_dr_model(model: ReducedModel, r, eps):
    """Analytic r-derivative of F_model."""
    p = model.p
    d, eta, num, _, _, _ = _terms(model, r, eps)
    eps = np.asarray(eps, dtype=float)
    r = np.asarray(r, dtype=float)
    term1 = -2.0 * model.constants.B1.value * d * eps ** (2.0 - p.m) * num
    term3 = (eta * model.B3_eff * model.k ** eta
             * eps ** (-eta) * r ** (-eta - 1.0))
    out = model.k * model.sigma * (term1 + term3)
    return float(out) if np.ndim(out) == 0 else out


def dF_deps_model(model: ReducedModel, r, eps):
    """Analytic eps-derivative of F_model."""
    p = model.p
    d, eta, num, _, _, _ = _terms(model, r, eps)
    eps = np.asarray(eps, dtype=float)
    r = np.asarray(r, dtype=float)
    term0 = -p.m * model.constants.B0.value * eps ** (-p.m - 1.0) * num
    term1 = ((2.0 - p.m) * model.constants.B1.value * d ** 2
             * eps ** (1.0 - p.m) * num)
    term3 = (eta * model.B3_eff * model.k ** eta
             * eps ** (-eta - 1.0) * r ** (-eta))
    out = model.k * model.sigma * (term0 + term1 + term3)
    return float(out) if np.ndim(out) == 0 else out


def hessian_model(model: ReducedModel, r, eps) -> np.ndarray:
    """Analytic 2x2 Hessian of F_model at a single (r, eps)."""
    p = model.p
    m, eta = p.m, p.n_minus_2s
    B0, B1 = model.constants.B0.value, model.constants.B1.value
    B3 = model.B3_eff
    num = model.nu ** (-m)
    d = model.nu * p.r0 - r
    ke = model.k ** eta
    f_rr = (2.0 * B1 * eps ** (2.0 - m) * num
            - eta * (eta + 1.0) * B3 * ke * eps ** (-eta) * r ** (-eta - 2.0))
    f_ee = (m * (m + 1.0) * B0 * eps ** (-m - 2.0) * num
            + (2.0 - m) * (1.0 - m) * B1 * d ** 2 * eps ** (-m) * num
            - eta * (eta + 1.0) * B3 * ke * eps ** (-eta - 2.0) * r ** (-eta))
    f_re = (-2.0 * (2.0 - m) * B1 * d * eps ** (1.0 - m) * num
            - eta ** 2 * B3 * ke * eps ** (-eta - 1.0) * r ** (-eta - 1.0))
    H = model.k * model.sigma * np.array([[f_rr, f_re], [f_re, f_ee]])
    return H


def working_F(model: ReducedModel, r, eps):
    """The functional descended by the flow: -F (positive), +F (alternating)."""
    out = -model.sigma * np.asarray(F_model(model, r, eps))
    return float(out) if np.ndim(out) == 0 else out


def working_dev(model: ReducedModel, r, eps):
    """Working functional with the constant removed, scaled by nu^m.

    working_F = k * (-sigma*A + working_dev / nu^m); the deviation form
    carries the full landscape structure without the O(k*A) offset, so it
    stays meaningful in the coupled regime where the offset would swamp
    double precision.
    """
    _, _, _, t0, t1, t3 = _terms(model, r, eps)
    out = -(t0 + t1 - t3) * model.nu ** model.p.m
    return float(out) if np.ndim(out) == 0 else out


def _working_grad(model: ReducedModel, r, eps) -> np.ndarray:
    return -model.sigma * np.array([dF_dr_model(model, r, eps),
                                    dF_deps_model(model, r, eps)])


def _working_dev_grad(model: ReducedModel, r, eps) -> np.ndarray:
    fac = model.nu ** model.p.m / model.k
    return fac * _working_grad(model, r, eps)


def flow_solve(model: ReducedModel, start, grad_tol: float = None,
               max_steps: int = 20_000) -> dict:
    """Adaptive descent of the working functional from a point in Omega.

    The flow terminates when the (window-scaled) gradient drops below
    tolerance, when the value reaches the alpha1 sublevel, or at the
    boundary of Omega, whichever comes first; the termination reason and
    the boundary face (if any) are recorded.
    """
    r, eps = float(start[0]), float(start[1])
    if not model.in_omega(r, eps):
        raise ValueError("start must lie in Omega")
    # work throughout in deviation units (exact up to the positive factor
    # nu^m / k), so sublevel and gradient tests survive double precision
    a1 = model.alpha1_dev()
    scale = np.array([model.r_halfwidth, model.eps_halfwidth])
    if grad_tol is None:
        # resolution-based default: the window-scaled gradient is compared
        # against the value range of the landscape over Omega
        corners = [working_dev(model, model.r_center + i * scale[0],
                               model.eps_center + j * scale[1])
                   for i in (-1.0, 0.0, 1.0) for j in (-1.0, 0.0, 1.0)]
        grad_tol_scaled = 1e-12 * (max(corners) - min(corners) + 1e-300)
    else:
        grad_tol_scaled = (grad_tol * model.nu ** model.p.m / model.k
                           * float(np.min(scale)))

    traj = [(r, eps, working_dev(model, r, eps))]
    step = 1.0
    reason, face = "max_steps", None
    for _ in range(max_steps):
        g = _working_dev_grad(model, r, eps)
        gs = g * scale  # gradient in window-scaled coordinates
        val = traj[-1][2]
        if float(np.linalg.norm(gs)) <= grad_tol_scaled:
            reason = "gradient"
            break
        if val <= a1:
            reason = "sublevel_alpha1"
            break
        # Armijo backtracking along the scaled steepest descent direction
        direction = -gs * scale  # back to physical coordinates
        gnorm2 = float(gs @ gs)
        while step > 1e-16:
            rn, en = r + step * direction[0], eps + step * direction[1]
            if working_dev(model, rn, en) <= val - 0.3 * step * gnorm2:
                break
            step *= 0.5
        else:
            reason = "step_underflow"
            break
        if not model.in_omega(rn, en):
            dr = abs(rn - model.r_center) / model.r_halfwidth
            de = abs(en - model.eps_center) / model.eps_halfwidth
            if dr >= de:
                face = "r_plus" if rn > model.r_center else "r_minus"
            else:
                face = "eps_plus" if en > model.eps_center else "eps_minus"
            reason = "boundary"
            traj.append((rn, en, working_dev(model, rn, en)))
            break
        r, eps = rn, en
        traj.append((r, eps, working_dev(model, r, eps)))
        step = min(step * 2.0, 1e6)
    return {"trajectory": traj, "reason": reason, "face": face,
            "final": (traj[-1][0], traj[-1][1]),
            "final_value_dev": traj[-1][2],
            "grad_norm": float(np.linalg.norm(
                _working_grad(model, traj[-1][0], traj[-1][1])))}


def find_critical_point(model: ReducedModel, n_starts: int = 10,
                        seed: int = 0, tol: float = 1e-14) -> dict:
    """Damped Newton search for the interior critical point of F.

    The critical point is a saddle of the working functional (max in r,
    min in eps), so pure descent drifts past it; Newton's method on the
    gradient, started from random points of Omega, converges to it
    quadratically.  Reports the located point, the gradient norm, the
    Hessian signature, and whether all starts agreed.
    """
    rng = np.random.default_rng(seed)
    sols = []
    for _ in range(n_starts):
        r = model.r_center + model.r_halfwidth * rng.uniform(-1, 1)
        eps = model.eps_center + model.eps_halfwidth * rng.uniform(-1, 1)
        for _ in range(100):
            g = np.array([dF_dr_model(model, r, eps),
                          dF_deps_model(model, r, eps)])
            H = hessian_model(model, r, eps)
            try:
                delta = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                break
            # damp only enough to keep the iterate in a sane region
            lam = 1.0
            for _ in range(40):
                rn, en = r + lam * delta[0], eps + lam * delta[1]
                if (abs(rn - model.r_center) <= 0.5 * model.r_center
                        and 0.1 * model.eps_center < en
                        < 10.0 * model.eps_center):
                    break
                lam *= 0.5
            r, eps = r + lam * delta[0], eps + lam * delta[1]
            if (abs(lam * delta[0]) <= tol * max(abs(r), 1.0)
                    and abs(lam * delta[1]) <= tol * max(abs(eps), 1.0)):
                break
        sols.append((r, eps))
    sols = np.array(sols)
    r_star, e_star = float(np.median(sols[:, 0])), float(np.median(sols[:, 1]))
    spread_r = float(np.max(np.abs(sols[:, 0] - r_star))) / model.r_halfwidth
    spread_e = (float(np.max(np.abs(sols[:, 1] - e_star)))
                / model.eps_halfwidth)
    g = np.array([dF_dr_model(model, r_star, e_star),
                  dF_deps_model(model, r_star, e_star)])
    H = hessian_model(model, r_star, e_star)
    eigs = np.linalg.eigvalsh(H)
    return {"r_star": r_star, "eps_star": e_star,
            "grad_norm": float(np.linalg.norm(g)),
            "hessian_eigs": eigs.tolist(),
            "signature": (int(np.sum(eigs > 0)), int(np.sum(eigs < 0))),
            "interior": bool(model.in_omega(r_star, e_star)),
            "unique": max(spread_r, spread_e) < 1e-6,
            "starts": sols.tolist()}


def maxmin_certificate(model: ReducedModel, n_samples: int = 101) -> dict:
    """Numerical check of the two linking conditions on the analytic model.

    (ii) the working functional on the two r-boundary faces of Omega stays
    below alpha1; (i) the value on the fiber r = nu r0 at eps0 exceeds
    alpha1, and the max over Omega stays below alpha2.  All values and
    margins are computed in deviation units (constant removed, scaled by
    nu^m), which is exact and immune to the O(k*A) offset.
    """
    a1, a2 = model.alpha1_dev(), model.alpha2_dev()
    eps_grid = np.linspace(model.eps_center - model.eps_halfwidth,
                           model.eps_center + model.eps_halfwidth, n_samples)
    sup_boundary = -np.inf
    for sgn in (-1.0, 1.0):
        r_face = model.r_center + sgn * model.r_halfwidth
        vals = working_dev(model, np.full_like(eps_grid, r_face), eps_grid)
        sup_boundary = max(sup_boundary, float(np.max(vals)))
    margin_ii = a1 - sup_boundary

    fiber_value = working_dev(model, model.r_center, model.eps_center)
    margin_i_low = fiber_value - a1

    r_grid = np.linspace(model.r_center - model.r_halfwidth,
                         model.r_center + model.r_halfwidth, n_samples)
    R, E = np.meshgrid(r_grid, eps_grid, indexing="ij")
    omega_max = float(np.max(working_dev(model, R, E)))
    margin_i_high = a2 - omega_max

    return {"alpha1_dev": a1, "alpha2_dev": a2,
            "alpha1": model.alpha1(), "alpha2": model.alpha2(),
            "sup_r_boundary": sup_boundary, "fiber_value": fiber_value,
            "omega_max": omega_max,
            "margin_ii": margin_ii, "margin_i_low": margin_i_low,
            "margin_i_high": margin_i_high,
            "passed": bool(margin_ii > 0 and margin_i_low > 0
                           and margin_i_high > 0)}


def boundary_sign_checks(model: ReducedModel, n_samples: int = 51) -> dict:
    """Flow direction at the four faces of Omega.

    On the eps faces the working functional's eps-derivative points the
    descent flow back inside; on the r faces the value already sits below
    the alpha1 sublevel.  Returns per-face pass flags.
    """
    r_grid = np.linspace(model.r_center - model.r_halfwidth,
                         model.r_center + model.r_halfwidth, n_samples)
    eps_grid = np.linspace(model.eps_center - model.eps_halfwidth,
                           model.eps_center + model.eps_halfwidth, n_samples)
    a1 = model.alpha1_dev()

    top = _working_grad_vec(model, r_grid,
                            model.eps_center + model.eps_halfwidth)[1]
    bottom = _working_grad_vec(model, r_grid,
                               model.eps_center - model.eps_halfwidth)[1]
    out = {"eps_plus": bool(np.all(top > 0)),
           "eps_minus": bool(np.all(bottom < 0))}
    for name, sgn in (("r_minus", -1.0), ("r_plus", 1.0)):
        vals = working_dev(model,
                           np.full_like(eps_grid, model.r_center
                                        + sgn * model.r_halfwidth),
                           eps_grid)
        out[name] = bool(np.max(vals) < a1)
    out["passed"] = all(out.values())
    return out


def _working_grad_vec(model: ReducedModel, r, eps):
    return (-model.sigma * np.asarray(dF_dr_model(model, r, eps)),
            -model.sigma * np.asarray(dF_deps_model(model, r, eps)))


def landscape_scan(model: ReducedModel, n: int = 64) -> dict:
    """Sampled reduced energy over Omega with gradient norms.

    Returns the grid arrays plus the located interior critical point;
    suitable for writing as a column file (r, eps, F, |grad F|).
    """
    r_grid = np.linspace(model.r_center - model.r_halfwidth,
                         model.r_center + model.r_halfwidth, n)
    eps_grid = np.linspace(model.eps_center - model.eps_halfwidth,
                           model.eps_center + model.eps_halfwidth, n)
    R, E = np.meshgrid(r_grid, eps_grid, indexing="ij")
    F = F_model(model, R, E)
    G = np.hypot(np.asarray(dF_dr_model(model, R, E)),
                 np.asarray(dF_deps_model(model, R, E)))
    crit = find_critical_point(model)
    return {"r": R, "eps": E, "F": F, "grad_norm": G, "critical": crit}
