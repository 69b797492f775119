"""Projected linear solve and contraction correction in a Galerkin dictionary.

The correction phi solves, under two symmetrized orthogonality
constraints, the linearized equation

    (-Delta)^s phi - (2s*-1) K(|x|/nu) |U|^(2s*-2) phi = l_k + N(phi).

Instead of a grid (prohibitive for a nonlocal operator), phi is sought in
a small symmetry-adapted dictionary whose members all have closed-form
fractional Laplacians: symmetrized bubbles at the configuration centers
over several widths, their scale- and ring-radius derivatives, and (in the
positive class) origin-centered radial bubbles.  Coefficients come from a
constrained minimum-residual projection of the operator equation on the
weighted evaluation cloud; the operator data is assembled once per
configuration and reused across solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import PotentialModel, l_k_eval, N_phi_eval
from .geometry import Ansatz, polygon_centers
from .norms import NormSpec, dstar_norm, star_norm
from .params import (Bubble, ProblemParams, bubble_deps, bubble_dr,
                     bubble_dr2, bubble_eval, frac_lap_bubble)
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "BasisFunction",
    "balanced_width",
    "GalerkinBasis",
    "build_basis",
    "single_bubble_ansatz",
    "assemble",
    "solve_linear",
    "fixed_point",
    "random_H",
    "inertia",
    "CorrectionState",
]


def single_bubble_ansatz(p: ProblemParams, r: float, eps: float) -> Ansatz:
    """One positive bubble at radius r on the x1-axis (test configuration)."""
    xi = np.zeros(p.N)
    xi[0] = r
    return Ansatz(bubbles=(Bubble(eps=eps, xi=xi),), mode="positive",
                  k=1, r=r, eps=eps, params=p)


def balanced_width(p: ProblemParams, constants, k: int, nu: float,
                   mode: str = "positive", r: float = None) -> float:
    """Bubble width balancing the potential deficit against interaction.

    At the balanced width the scale-derivative pairing of the ansatz
    error vanishes to leading order, which keeps the near-kernel
    component of the right-hand side small and the correction inside
    the contraction trust region.  Solves
    m B0 w^(m-1) nu^(-m) = (eta/2) B_int w^(eta-1) sum_j |d_1j|^(-eta)
    with eta = N - 2s over the configuration's chord distances.
    """
    if r is None:
        r = nu * p.r0
    centers, signs = polygon_centers(p.N, k, r, mode)
    d1 = np.linalg.norm(centers[1:] - centers[0], axis=1)
    ssum = abs(float(np.sum(signs[0] * signs[1:] * d1 ** (-p.n_minus_2s))))
    eta, m = p.n_minus_2s, p.m
    b0 = constants.B0.value if hasattr(constants.B0, "value") else constants.B0
    bint = (constants.B_int.value if hasattr(constants.B_int, "value")
            else constants.B_int)
    return float(((m * b0 * nu ** (-m)) / (eta * 0.5 * bint * ssum))
                 ** (1.0 / (eta - m)))


@dataclass(frozen=True)
class BasisFunction:
    """A symmetrized dictionary element with a closed-form (-Delta)^s.

    kind 'val' sums signed bubbles; 'deps' and 'dr' sum their scale and
    ring-radius derivatives; 'dr2' the second ring-radius derivative,
    which supplies the even anisotropic profile across each center.  The
    fractional Laplacians follow from differentiating the bubble
    identity: (-Delta)^s dU = (2s*-1) |U|^(2s*-2) dU, and once more for
    the second derivative.
    """

    kind: str
    bubbles: tuple
    p: ProblemParams
    label: str = ""

    def __call__(self, x) -> np.ndarray:
        fn = {"val": bubble_eval, "deps": bubble_deps, "dr": bubble_dr,
              "dr2": bubble_dr2}[self.kind]
        out = fn(self.bubbles[0], self.p, x)
        for b in self.bubbles[1:]:
            out = out + fn(b, self.p, x)
        return out

    def flap(self, x) -> np.ndarray:
        """Closed-form fractional Laplacian of the element."""
        q = self.p.p_crit
        if self.kind == "val":
            out = frac_lap_bubble(self.bubbles[0], self.p, x)
            for b in self.bubbles[1:]:
                out = out + frac_lap_bubble(b, self.p, x)
            return out
        if self.kind == "dr2":
            out = None
            for b in self.bubbles:
                u = bubble_eval(b, self.p, x)
                du = bubble_dr(b, self.p, x)
                term = (q - 1.0) * (
                    (q - 2.0) * np.abs(u) ** (q - 3.0) * np.sign(u) * du ** 2
                    + np.abs(u) ** (q - 2.0) * bubble_dr2(b, self.p, x))
                out = term if out is None else out + term
            return out
        fn = bubble_deps if self.kind == "deps" else bubble_dr
        out = None
        for b in self.bubbles:
            u = np.abs(bubble_eval(b, self.p, x))
            term = (q - 1.0) * u ** (q - 2.0) * fn(b, self.p, x)
            out = term if out is None else out + term
        return out


@dataclass(frozen=True)
class GalerkinBasis:
    """Dictionary of symmetry-adapted functions for one configuration."""

    funcs: tuple
    ansatz: Ansatz

    @property
    def size(self) -> int:
        return len(self.funcs)


def build_basis(ansatz: Ansatz,
                val_widths=(0.7, 1.0, 1.5, 2.5, 4.0, 6.0),
                dr2_widths=(0.7, 1.0, 1.5, 2.5, 4.0, 6.0),
                deriv_widths=(),
                radial_widths=(0.25, 0.5, 1.0, 2.0)) -> GalerkinBasis:
    """Symmetrized dictionary for the given configuration.

    Symmetrized bubble sums and their second radial derivatives over
    several widths supply the isotropic and even-anisotropic profiles.
    The first scale and radius derivatives (near-kernel directions) are
    excluded by default: the orthogonality constraints remove that
    subspace from the correction, and keeping its dictionary shadow
    only lets near-cancelling coefficient pairs grow without bound.
    In the positive class, origin-centered radial bubbles at fractions
    of the ring radius are added as far-field modes (they change sign
    under the alternating symmetry and are excluded from the
    sign-changing class).
    """
    p = ansatz.params
    funcs = []
    groups = (("val", val_widths), ("dr2", dr2_widths),
              ("deps", deriv_widths), ("dr", deriv_widths))
    for kind, widths in groups:
        for wrel in widths:
            w = wrel * ansatz.eps
            bb = tuple(Bubble(eps=w, xi=b.xi, sign=b.sign)
                       for b in ansatz.bubbles)
            funcs.append(BasisFunction(kind=kind, bubbles=bb, p=p,
                                       label=f"{kind}@{wrel:g}w"))
    if ansatz.mode == "positive":
        for frac in radial_widths:
            b0 = Bubble(eps=max(frac * ansatz.r, ansatz.eps),
                        xi=np.zeros(p.N))
            funcs.append(BasisFunction(kind="val", bubbles=(b0,), p=p,
                                       label=f"radial@{frac:g}r"))
    return GalerkinBasis(funcs=tuple(funcs), ansatz=ansatz)


def _constraint_weights(ansatz: Ansatz):
    """The two symmetrized projection weights sum_i |U_i|^(2s*-2) Z_{i,l}."""
    p = ansatz.params
    q = p.p_crit

    def make(fn):
        def weight(x):
            out = None
            for b in ansatz.bubbles:
                u = np.abs(bubble_eval(b, p, x))
                term = u ** (q - 2.0) * fn(b, p, x)
                out = term if out is None else out + term
            return out
        return weight

    return make(bubble_dr), make(bubble_deps)


def assemble(basis: GalerkinBasis, model: PotentialModel, nu: float,
             spec: QuadratureSpec, matrices: bool = True) -> dict:
    """Discrete operator data of the constrained linearized problem.

    Always computed: the two constraint rows C (by quadrature), and the
    pointwise operator images L b_i = (-Delta)^s b_i
    - (2s*-1) K |U|^(2s*-2) b_i on the weighted evaluation cloud, which
    drive the minimum-residual solve.  With ``matrices`` the weak-form
    matrices are also assembled by quadrature (quadratic form A,
    fractional Gram F, weighted mass M) for conditioning and inertia
    diagnostics; each unordered pair is integrated once, so they are
    exactly symmetric.  A dictionary whose cloud Gram condition number
    exceeds 1e10 is rejected as degenerate-by-collinearity.
    """
    ansatz = basis.ansatz
    p = ansatz.params
    q = p.p_crit
    n = basis.size
    centers = np.concatenate([ansatz.centers(), np.zeros((1, p.N))])

    def pot_weight(x):
        u = ansatz(x)
        return model.K_scaled(x, nu) * np.abs(u) ** (q - 2.0)

    cw = _constraint_weights(ansatz)
    C = np.zeros((2, n))
    for l, w in enumerate(cw):
        for j in range(n):
            bj = basis.funcs[j]
            C[l, j] = integrate(lambda x: w(x) * bj(x), p.N, spec,
                                decay=p.N, centers=centers).value

    # pointwise operator images on the refined weighted cloud
    norm_spec = NormSpec(centers=ansatz.centers(), p=p, eps=ansatz.eps,
                         flavor="dstar", level=1)
    cloud, wt = norm_spec.cloud, norm_spec.weight(norm_spec.cloud)
    pw = (q - 1.0) * pot_weight(cloud)
    Bmat = np.stack([b(cloud) for b in basis.funcs], axis=1)
    Lmat = np.stack([b.flap(cloud) for b in basis.funcs], axis=1) \
        - pw[:, None] * Bmat
    Lmat = Lmat / wt[:, None]
    Wmat = np.stack([w(cloud) for w in cw], axis=1) / wt[:, None]

    # collinearity guard: Gram of the weighted cloud samples
    Bw = Bmat / wt[:, None]
    col = np.linalg.norm(Bw, axis=0)
    if not np.all(np.isfinite(col)) or np.any(col <= 0):
        raise ValueError("dictionary element vanishing on the cloud")
    G = (Bw / col).T @ (Bw / col)
    cond = float(np.linalg.cond(G))
    if cond > 1e10:
        raise ValueError(
            f"dictionary Gram condition number {cond:.3e} > 1e10; reduce "
            "the dictionary")
    feasible_dim = n - int(np.linalg.matrix_rank(C, tol=1e-10 * n))

    system = {"C": C, "cond": cond, "feasible_dim": feasible_dim,
              "degenerate": feasible_dim == 0, "basis": basis,
              "model": model, "nu": nu, "spec": spec,
              "norm_spec": norm_spec, "cloud": cloud, "wt": wt,
              "Lmat": Lmat, "Wmat": Wmat}

    if matrices:
        F = np.zeros((n, n))
        M = np.zeros((n, n))
        for i in range(n):
            bi = basis.funcs[i]
            for j in range(i, n):
                bj = basis.funcs[j]
                fij = integrate(lambda x: bi.flap(x) * bj(x), p.N, spec,
                                decay=p.N, centers=centers).value
                mij = integrate(lambda x: pot_weight(x) * bi(x) * bj(x),
                                p.N, spec, decay=p.N, centers=centers).value
                F[i, j] = F[j, i] = fij
                M[i, j] = M[j, i] = mij
        # normalize to unit weighted L^2 norm: the raw mix of value,
        # derivative, and far-field modes spans many decades
        d = np.sqrt(np.diag(M))
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise ValueError(
                "dictionary element with non-positive weighted norm")
        F = F / d[:, None] / d[None, :]
        M = M / d[:, None] / d[None, :]
        system.update({"A": F - (q - 1.0) * M, "F": F, "M": M,
                       "norm_scale": d,
                       "gram_cond": float(np.linalg.cond(M))})
    return system


@dataclass(frozen=True)
class CorrectionState:
    """Coefficients of phi in the dictionary plus the two multipliers."""

    coeffs: np.ndarray
    multipliers: np.ndarray
    basis: GalerkinBasis
    constraint_residual: float
    diagnostics: dict = field(default_factory=dict)

    def phi(self, x) -> np.ndarray:
        out = None
        for c, b in zip(self.coeffs, self.basis.funcs):
            term = c * b(x)
            out = term if out is None else out + term
        return np.zeros(np.asarray(x).shape[:-1]) if out is None else out

    def phi_flap(self, x) -> np.ndarray:
        """Closed-form fractional Laplacian of phi."""
        out = None
        for c, b in zip(self.coeffs, self.basis.funcs):
            term = c * b.flap(x)
            out = term if out is None else out + term
        return np.zeros(np.asarray(x).shape[:-1]) if out is None else out


def solve_linear(system: dict, H=None, minimax_iters: int = 40,
                 ridge: float = 1e-6) -> CorrectionState:
    """Constrained minimum-residual solve: discrete analogue of L_k(H).

    Finds the dictionary coefficients c and multipliers mu minimizing
    the weighted cloud residual of L phi + sum_l mu_l w_l - H subject to
    the two quadrature constraint rows C c = 0 (KKT system on the
    normal equations).  The multiplier columns make the target exactly
    the projected equation.  Since the operational norms are weighted
    sups, the least-squares weights are refined by Lawson iteration
    toward the minimax solution; the best iterate (smallest sup) is
    kept.  H = 0 maps to phi = 0 exactly.

    ``ridge`` adds a small Tikhonov term (relative to the weighted Gram
    diagonal) so that among near-minimizers the one with small
    coefficients is returned; without it, near-collinear columns admit
    large cancelling coefficient pairs whose norms are uncontrolled.
    """
    C = system["C"]
    Lmat, Wmat, wt = system["Lmat"], system["Wmat"], system["wt"]
    n = Lmat.shape[1]
    if H is None:
        b = np.zeros(len(wt))
    else:
        b = np.asarray(H(system["cloud"]), dtype=float) / wt
    if not np.any(b):
        return CorrectionState(coeffs=np.zeros(n), multipliers=np.zeros(2),
                               basis=system["basis"], constraint_residual=0.0,
                               diagnostics={"degenerate": system["degenerate"]})
    D = np.concatenate([Lmat, Wmat], axis=1)
    col = np.linalg.norm(D, axis=0)
    col[col == 0] = 1.0
    Ds = D / col
    Cf = np.concatenate([C / col[:n][None, :], np.zeros((2, 2))], axis=1)

    lw = np.ones(len(b))
    best_sup, best_z = np.inf, None
    for _ in range(max(1, minimax_iters)):
        sw = np.sqrt(lw)[:, None]
        G = (Ds * sw).T @ (Ds * sw)
        G += ridge * float(np.mean(np.diag(G))) * np.eye(G.shape[0])
        kkt = np.block([[G, Cf.T], [Cf, np.zeros((2, 2))]])
        full_rhs = np.concatenate([(Ds * sw).T @ (b * np.sqrt(lw)),
                                   np.zeros(2)])
        try:
            sol = np.linalg.solve(kkt, full_rhs)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"singular KKT system: {exc}") from exc
        z = sol[:n + 2] / col
        res = D @ z - b
        sup = float(np.max(np.abs(res)))
        if sup < best_sup:
            best_sup, best_z = sup, z.copy()
        lw = lw * np.abs(res)
        total = np.sum(lw)
        if total <= 0:
            break
        lw = np.maximum(lw / total, 1e-14 / len(lw))
    z = best_z
    coeffs, mult = z[:n], z[n:]
    cres = float(np.max(np.abs(C @ coeffs)))
    scale = float(np.max(np.abs(C)) * np.max(np.abs(coeffs)) + 1e-300)
    return CorrectionState(coeffs=coeffs, multipliers=mult,
                           basis=system["basis"],
                           constraint_residual=cres / scale,
                           diagnostics={"degenerate": system["degenerate"],
                                        "residual_sup": best_sup,
                                        "rhs_sup": float(np.max(np.abs(b)))})


def random_H(system: dict, rng):
    """A random right-hand side in the range of the discrete operator.

    Returns a callable H = sum gamma_i L(b_i) built from the operator
    images of the dictionary elements (normalized per element), so the
    solve ratios ||phi||_* / ||H||_** are meaningful across k.
    """
    basis = system["basis"]
    ansatz = basis.ansatz
    p = ansatz.params
    q = p.p_crit
    model, nu = system["model"], system["nu"]
    scale = np.linalg.norm(system["Lmat"], axis=0)
    scale[scale == 0] = 1.0
    gamma = rng.standard_normal(basis.size) / (scale * math.sqrt(basis.size))

    def H(x):
        u = ansatz(x)
        pw = (q - 1.0) * model.K_scaled(x, nu) * np.abs(u) ** (q - 2.0)
        out = None
        for g, bf in zip(gamma, basis.funcs):
            term = g * (bf.flap(x) - pw * bf(x))
            out = term if out is None else out + term
        return out

    return H


def inertia(system: dict) -> tuple:
    """Signature (n_pos, n_neg, n_zero) of A on the constraint null space.

    Requires the weak-form matrices (assemble with matrices=True).
    """
    if "A" not in system:
        raise KeyError("inertia needs the weak-form matrices; "
                       "assemble with matrices=True")
    A, C, M = system["A"], system["C"], system["M"]
    n = A.shape[0]
    # orthonormal basis of null(C)
    _, sv, vt = np.linalg.svd(C)
    rank = int(np.sum(sv > 1e-12 * max(sv, default=1.0)))
    Z = vt[rank:].T
    if Z.shape[1] == 0:
        return (0, 0, 0)
    Az = Z.T @ A @ Z
    Mz = Z.T @ M @ Z
    eigs = np.linalg.eigvalsh(np.linalg.solve(Mz, Az))
    tol = 1e-8 * float(np.max(np.abs(eigs)) + 1e-300)
    return (int(np.sum(eigs > tol)), int(np.sum(eigs < -tol)),
            int(np.sum(np.abs(eigs) <= tol)))


def fixed_point(system: dict, max_iter: int = 8, tol: float = 1e-10,
                trust_factor: float = 1.0,
                norm_spec: NormSpec = None) -> dict:
    """Contraction iteration phi_{n+1} = L_k(l_k + N(phi_n)).

    The trust region ||phi||_* <= trust_factor * nu^(-m/2) mirrors the
    contraction-mapping set; violation or three consecutive growing
    successive differences aborts with diagnostics.
    """
    basis = system["basis"]
    ansatz = basis.ansatz
    p = ansatz.params
    model, nu, spec = system["model"], system["nu"], system["spec"]
    if norm_spec is None:
        norm_spec = NormSpec(centers=ansatz.centers(), p=p, eps=ansatz.eps)

    trust = trust_factor * nu ** (-p.m / 2.0)
    lk = lambda x: l_k_eval(ansatz, model, nu, x)
    state = solve_linear(system, H=lk)
    norms = [star_norm(state.phi, norm_spec).value]
    if norms[0] > trust:
        return {"converged": False, "reason": "trust_region_exceeded",
                "state": state, "norms": norms, "ratios": [], "trust": trust}

    ratios, diffs = [], []
    prev = state
    grow = 0
    for it in range(1, max_iter + 1):
        H = lambda x: lk(x) + N_phi_eval(ansatz, model, nu, prev.phi, x)
        cur = solve_linear(system, H=H)
        diff = lambda x: cur.phi(x) - prev.phi(x)
        d = star_norm(diff, norm_spec).value
        diffs.append(d)
        if len(diffs) >= 2:
            ratios.append(diffs[-1] / (diffs[-2] + 1e-300))
            grow = grow + 1 if ratios[-1] >= 1.0 else 0
            if grow >= 3:
                return {"converged": False, "reason": "diverging",
                        "state": cur, "norms": norms, "ratios": ratios,
                        "diffs": diffs, "trust": trust}
        norms.append(star_norm(cur.phi, norm_spec).value)
        if norms[-1] > trust:
            return {"converged": False, "reason": "trust_region_exceeded",
                    "state": cur, "norms": norms, "ratios": ratios,
                    "diffs": diffs, "trust": trust}
        prev = cur
        # stop on relative stagnation or at the numerical noise floor
        if d <= tol * max(norms[-1], 1e-300) + 1e-9 * trust:
            break
    return {"converged": True, "reason": "converged", "state": prev,
            "norms": norms, "ratios": ratios, "diffs": diffs,
            "trust": trust, "iterations": it}


def residual_fn(ansatz: Ansatz, model: PotentialModel, nu: float,
                state: CorrectionState = None, projected: bool = True):
    """Pointwise residual of the (corrected) configuration.

    Without a correction this equals -l_k.  With one it adds the
    closed-form fractional term and the nonlinear increment of the
    correction; ``projected`` additionally adds the multiplier component
    along the two constraint weights, giving the residual of the
    projected equation the solver actually addresses.
    """
    p = ansatz.params
    q = p.p_crit
    cw = _constraint_weights(ansatz) if (state is not None and projected) \
        else None

    def res(x):
        out = -l_k_eval(ansatz, model, nu, x)
        if state is not None:
            u = ansatz(x)
            ph = state.phi(x)
            K = model.K_scaled(x, nu)
            out = out + state.phi_flap(x) - K * (
                np.sign(u + ph) * np.abs(u + ph) ** (q - 1.0)
                - np.sign(u) * np.abs(u) ** (q - 1.0))
            if cw is not None:
                for mu, w in zip(state.multipliers, cw):
                    out = out + mu * w(x)
        return out

    return res
