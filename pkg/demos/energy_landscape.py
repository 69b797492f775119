"""Demo: the reduced energy landscape and its interior critical point.

Computes the expansion constants, builds the two-variable reduced model
for a 16-bump configuration, prints the linking margins, and locates the
interior critical point (a max-in-radius / min-in-scale saddle) for both
the positive and the sign-changing configuration.
"""

from multibump.energy import PotentialModel, compute_constants
from multibump.params import ProblemParams
from multibump.quadrature import QuadratureSpec
from multibump.reduced import (ReducedModel, boundary_sign_checks, eps0,
                               find_critical_point, maxmin_certificate)


def main():
    p = ProblemParams()
    model = PotentialModel.from_params(p)
    const = compute_constants(p, model, QuadratureSpec())
    print("expansion constants:")
    for name in ("A", "B0", "B1", "B2", "B3", "B3_alt", "B_int"):
        c = getattr(const, name)
        print(f"  {name:6s} = {c.value:14.6f}  ({c.provenance}, "
              f"error {c.error:.2e})")

    for mode in ("positive", "sign_changing"):
        rm = ReducedModel(constants=const, p=p, k=16, mode=mode)
        print(f"\n{mode} configuration, k = 16, nu = {rm.nu:.1f}")
        print(f"  window: r in {rm.r_center:.3f} +- {rm.r_halfwidth:.3e}, "
              f"eps in {rm.eps_center:.6f} +- {rm.eps_halfwidth:.3e}")
        print(f"  optimal concentration eps0 = {eps0(rm):.12f}")
        crit = find_critical_point(rm, n_starts=10, seed=0)
        print(f"  critical point: r* = {crit['r_star']:.6f}, "
              f"eps* = {crit['eps_star']:.12f}")
        print(f"  gradient norm {crit['grad_norm']:.2e}, Hessian signature "
              f"{crit['signature']}, all starts agree: {crit['unique']}")
        cert = maxmin_certificate(rm)
        print(f"  linking margins: boundary {cert['margin_ii']:.3e}, "
              f"fiber {cert['margin_i_low']:.3e}, "
              f"ceiling {cert['margin_i_high']:.3e} -> "
              f"{'OK' if cert['passed'] else 'violated'}")
        faces = boundary_sign_checks(rm)
        print(f"  boundary faces: " + ", ".join(
            f"{f}={faces[f]}" for f in ("r_minus", "r_plus",
                                        "eps_minus", "eps_plus")))


if __name__ == "__main__":
    main()
