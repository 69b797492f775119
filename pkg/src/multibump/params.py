"""Problem parameters, the standard bubble, and its closed-form identities.

The bubble U_{eps,xi}(x) = alpha * (eps / (eps^2 + |x-xi|^2))^((N-2s)/2) is
the extremal profile of the critical fractional equation; with the amplitude
``alpha_const`` it satisfies (-Delta)^s U = U^((N+2s)/(N-2s)) exactly, which
is the ground-truth oracle used throughout the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import zeta as _zeta

__all__ = [
    "ProblemParams",
    "Bubble",
    "alpha_const",
    "bubble_eval",
    "bubble_dr",
    "bubble_dr2",
    "bubble_deps",
    "frac_lap_bubble",
    "gamma_fn",
    "zeta_fn",
    "dirichlet_eta",
]


def gamma_fn(x):
    """Gamma function for positive arguments (relative error <= 1e-12)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("gamma_fn requires x > 0")
    out = _gamma(x)
    return float(out) if out.ndim == 0 else out


def zeta_fn(x):
    """Riemann zeta for x > 1 (relative error <= 1e-12)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("zeta_fn requires x > 1")
    out = _zeta(x)
    return float(out) if out.ndim == 0 else out


def dirichlet_eta(x):
    """Alternating zeta, eta(x) = (1 - 2^(1-x)) * zeta(x), for x > 1."""
    return (1.0 - 2.0 ** (1.0 - np.asarray(x, dtype=float))) * zeta_fn(x)


_MODES = ("positive", "sign_changing")


@dataclass(frozen=True)
class ProblemParams:
    """Standing parameters of the problem, validated on construction.

    The dimension must satisfy N > 2 + 2s, and the flatness exponent m of
    the potential must lie strictly between
    max(2, N-2s - 2(N-2s)^2/(N+2s)) and N-2s.
    """

    N: int = 5
    s: float = 0.9
    m: float = 2.5
    c0: float = 1.0
    theta: float = 0.5
    delta: float = 0.25
    r0: float = 1.0
    mode: str = "positive"

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise ValueError(f"s must lie in (0,1), got {self.s}")
        if self.N <= 2 + 2 * self.s:
            raise ValueError(f"need N > 2 + 2s, got N={self.N}, s={self.s}")
        lo = max(2.0, self.N - 2 * self.s
                 - 2 * (self.N - 2 * self.s) ** 2 / (self.N + 2 * self.s))
        hi = self.N - 2 * self.s
        if not (lo < self.m < hi):
            raise ValueError(
                f"flatness exponent m={self.m} outside the admissible "
                f"window ({lo:.6g}, {hi:.6g})")
        for name in ("c0", "theta", "delta", "r0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")

    @property
    def p_crit(self) -> float:
        """Critical exponent 2N/(N-2s)."""
        return 2.0 * self.N / (self.N - 2.0 * self.s)

    @property
    def tau(self) -> float:
        """Weight exponent (N-2s-m)/(N-2s), in (0,1)."""
        return (self.N - 2 * self.s - self.m) / (self.N - 2 * self.s)

    @property
    def n_minus_2s(self) -> float:
        return self.N - 2.0 * self.s

    def nu_of_k(self, k: int) -> float:
        """Scaling parameter nu = k^((N-2s)/(N-2s-m))."""
        if k < 2:
            raise ValueError("k must be >= 2")
        return float(k) ** ((self.N - 2 * self.s) / (self.N - 2 * self.s - self.m))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"N": self.N, "s": self.s, "m": self.m, "c0": self.c0,
                "theta": self.theta, "delta": self.delta, "r0": self.r0,
                "mode": self.mode}

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemParams":
        return cls(N=int(d["N"]), s=float(d["s"]), m=float(d["m"]),
                   c0=float(d["c0"]), theta=float(d["theta"]),
                   delta=float(d["delta"]), r0=float(d["r0"]),
                   mode=str(d.get("mode", "positive")))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProblemParams":
        return cls.from_dict(json.loads(text))


def alpha_const(p: ProblemParams) -> float:
    """Amplitude making the bubble an exact solution of the critical PDE.

    Defined by the requirement (-Delta)^s U = U^(2s*-1) together with the
    classical identity
    (-Delta)^s (1+|x|^2)^(-(N-2s)/2)
        = 2^(2s) Gamma((N+2s)/2)/Gamma((N-2s)/2) (1+|x|^2)^(-(N+2s)/2),
    which forces alpha^(4s/(N-2s)) = 2^(2s) Gamma((N+2s)/2)/Gamma((N-2s)/2).
    """
    N, s = p.N, p.s
    ratio = 2.0 ** (2 * s) * gamma_fn((N + 2 * s) / 2) / gamma_fn((N - 2 * s) / 2)
    return ratio ** ((N - 2 * s) / (4 * s))


def riesz_gamma(p: ProblemParams) -> float:
    """Normalization gamma(N,s) = pi^(N/2) 2^(2s) Gamma(s) / Gamma(N/2 - s)."""
    N, s = p.N, p.s
    return np.pi ** (N / 2) * 2.0 ** (2 * s) * gamma_fn(s) / gamma_fn(N / 2 - s)


@dataclass(frozen=True)
class Bubble:
    """A single signed bubble: scale eps > 0, center xi, sign +-1."""

    eps: float
    xi: np.ndarray
    sign: int = 1

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))


def _sq_dist(x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x - xi
    return np.sum(d * d, axis=-1)


def bubble_eval(b: Bubble, p: ProblemParams, x) -> np.ndarray:
    """Evaluate the signed bubble at points x of shape (..., N)."""
    q = (p.N - 2 * p.s) / 2.0
    rho2 = _sq_dist(x, b.xi)
    val = alpha_const(p) * (b.eps / (b.eps ** 2 + rho2)) ** q
    return b.sign * val


def bubble_deps(b: Bubble, p: ProblemParams, x) -> np.ndarray:
    """Partial derivative of the bubble with respect to its scale eps."""
    q = (p.N - 2 * p.s) / 2.0
    rho2 = _sq_dist(x, b.xi)
    val = (q * alpha_const(p) * b.eps ** (q - 1.0) * (rho2 - b.eps ** 2)
           / (b.eps ** 2 + rho2) ** (q + 1.0))
    return b.sign * val


def bubble_dr(b: Bubble, p: ProblemParams, x) -> np.ndarray:
    """Derivative along the radial motion of the center in the x'-plane.

    Requires the center to sit at (r cos t, r sin t, 0) with r > 0; the
    derivative is the directional center-derivative along xi'/|xi'|.
    """
    xi = b.xi
    rad = np.hypot(xi[0], xi[1])
    if rad == 0.0:
        raise ValueError("bubble_dr undefined for a center with r = 0")
    if np.any(xi[2:] != 0.0):
        raise ValueError("bubble_dr expects a center in the x'-plane")
    u = np.zeros_like(xi)
    u[0], u[1] = xi[0] / rad, xi[1] / rad
    q = (p.N - 2 * p.s) / 2.0
    xarr = np.asarray(x, dtype=float)
    d = xarr - xi
    rho2 = np.sum(d * d, axis=-1)
    proj = np.sum(d * u, axis=-1)
    val = (2.0 * q * alpha_const(p) * b.eps ** q * proj
           / (b.eps ** 2 + rho2) ** (q + 1.0))
    return b.sign * val


def bubble_dr2(b: Bubble, p: ProblemParams, x) -> np.ndarray:
    """Second derivative along the radial motion of the center.

    Same conventions as bubble_dr; captures the even anisotropic profile
    across a center in the ring-radial direction.
    """
    xi = b.xi
    rad = np.hypot(xi[0], xi[1])
    if rad == 0.0:
        raise ValueError("bubble_dr2 undefined for a center with r = 0")
    if np.any(xi[2:] != 0.0):
        raise ValueError("bubble_dr2 expects a center in the x'-plane")
    u = np.zeros_like(xi)
    u[0], u[1] = xi[0] / rad, xi[1] / rad
    q = (p.N - 2 * p.s) / 2.0
    xarr = np.asarray(x, dtype=float)
    d = xarr - xi
    rho2 = np.sum(d * d, axis=-1)
    proj = np.sum(d * u, axis=-1)
    den = b.eps ** 2 + rho2
    val = (2.0 * q * alpha_const(p) * b.eps ** q
           * (2.0 * (q + 1.0) * proj ** 2 / den ** (q + 2.0)
              - 1.0 / den ** (q + 1.0)))
    return b.sign * val


def frac_lap_bubble(b: Bubble, p: ProblemParams, x) -> np.ndarray:
    """Closed-form fractional Laplacian of the bubble: sign * |U|^(2s*-1).

    For a negative bubble the odd-power convention |u|^(2s*-2) u applies.
    """
    u = np.abs(bubble_eval(b, p, x))
    return b.sign * u ** (p.p_crit - 1.0)
