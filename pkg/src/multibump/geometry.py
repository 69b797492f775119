"""Symmetric bubble configurations and their interaction sums.

Positive mode places k equal bubbles on a regular k-gon of radius r in the
x'-plane; sign-changing mode places 2k alternating bubbles on a 2k-gon.
Interaction sums over the polygon use the chord law
|x^i - x^1| = 2 r sin((i-1) pi / n).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .params import (Bubble, ProblemParams, bubble_eval, dirichlet_eta,
                     zeta_fn)

__all__ = [
    "Ansatz",
    "build_ansatz",
    "sector_of",
    "symmetry_check",
    "interaction_sum",
    "interaction_asymptote",
]


@dataclass(frozen=True)
class Ansatz:
    """Immutable symmetric configuration of bubbles."""

    bubbles: tuple
    mode: str
    k: int
    r: float
    eps: float
    params: ProblemParams

    @property
    def n_bubbles(self) -> int:
        return len(self.bubbles)

    def centers(self) -> np.ndarray:
        return np.stack([b.xi for b in self.bubbles])

    def signs(self) -> np.ndarray:
        return np.array([b.sign for b in self.bubbles])

    def __call__(self, x) -> np.ndarray:
        """Evaluate the signed bubble sum at points of shape (..., N)."""
        out = bubble_eval(self.bubbles[0], self.params, x)
        for b in self.bubbles[1:]:
            out = out + bubble_eval(b, self.params, x)
        return out

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "k": self.k, "r": self.r, "eps": self.eps,
            "centers": self.centers().tolist(),
            "signs": self.signs().tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def polygon_centers(N: int, k: int, r: float, mode: str) -> tuple:
    """Centers and signs for the k-gon (positive) or 2k-gon (alternating)."""
    if mode == "positive":
        n, step = k, 2.0 * math.pi / k
    elif mode == "sign_changing":
        n, step = 2 * k, math.pi / k
    else:
        raise ValueError(f"unknown mode {mode!r}")
    centers = np.zeros((n, N))
    signs = np.ones(n, dtype=int)
    for i in range(n):
        ang = i * step
        centers[i, 0] = r * math.cos(ang)
        centers[i, 1] = r * math.sin(ang)
        if mode == "sign_changing":
            signs[i] = 1 if i % 2 == 0 else -1
    return centers, signs


def build_ansatz(p: ProblemParams, k: int, r: float, eps: float,
                 mode: str | None = None) -> Ansatz:
    """Build the symmetric ansatz; k >= 2 bubbles share eps and radius r."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if r <= 0 or eps <= 0:
        raise ValueError("r and eps must be positive")
    mode = p.mode if mode is None else mode
    centers, signs = polygon_centers(p.N, k, r, mode)
    bubbles = tuple(Bubble(eps=eps, xi=c, sign=int(s))
                    for c, s in zip(centers, signs))
    return Ansatz(bubbles=bubbles, mode=mode, k=k, r=r, eps=eps, params=p)


def sector_of(x, k: int) -> int:
    """1-based index of the angular sector of the k-gon containing x.

    Sector i is the cone of half-angle pi/k around the i-th center
    direction; boundary ties (and x' = 0) resolve to the smallest index.
    """
    x = np.asarray(x, dtype=float)
    rad = math.hypot(x[0], x[1])
    if rad == 0.0:
        return 1
    ang = math.atan2(x[1], x[0]) % (2.0 * math.pi)
    step = 2.0 * math.pi / k
    # candidate sectors are the two nearest center directions
    j = ang / step
    lo, hi = int(math.floor(j)) % k, int(math.ceil(j)) % k
    best, best_cos = 1, -2.0
    for idx in sorted({lo, hi}):
        c = math.cos(ang - idx * step)
        if c > best_cos + 1e-15:
            best, best_cos = idx + 1, c
        elif abs(c - best_cos) <= 1e-15:
            best = min(best, idx + 1)
    return best


def _orbit_generators(N: int, k: int, mode: str):
    """Generators of the symmetry class: one rotation plus even reflections.

    Returns (transform, character) pairs acting on point arrays (..., N).
    """
    ang = 2.0 * math.pi / k if mode == "positive" else math.pi / k
    chi_rot = 1.0 if mode == "positive" else -1.0
    c, s = math.cos(ang), math.sin(ang)

    def rot(pts, c=c, s=s):
        out = np.array(pts, dtype=float, copy=True)
        x0, x1 = pts[..., 0], pts[..., 1]
        out[..., 0] = c * x0 - s * x1
        out[..., 1] = s * x0 + c * x1
        return out

    gens = [(rot, chi_rot)]
    for j in range(1, N):
        def refl(pts, j=j):
            out = np.array(pts, dtype=float, copy=True)
            out[..., j] = -out[..., j]
            return out
        gens.append((refl, 1.0))
    return gens


def symmetry_check(u, p: ProblemParams, k: int, mode: str,
                   tol: float = 1e-10, n_samples: int = 200,
                   seed: int = 0) -> dict:
    """Max deviation |u(g x) - chi(g) u(x)| over sampled symmetry orbits."""
    rng = np.random.default_rng(seed)
    pts = rng.standard_cauchy(size=(n_samples, p.N)) * 2.0
    base = np.asarray(u(pts), dtype=float)
    scale = max(float(np.max(np.abs(base))), 1e-300)
    worst = 0.0
    for g, chi in _orbit_generators(p.N, k, mode):
        dev = float(np.max(np.abs(np.asarray(u(g(pts))) - chi * base)))
        worst = max(worst, dev)
    return {"max_deviation": worst, "scale": scale,
            "passed": worst <= tol * scale}


def chord_lengths(k: int, r: float, mode: str = "positive") -> np.ndarray:
    """Distances |x^i - x^1| for i = 2..n on the polygon, by the chord law."""
    n = k if mode == "positive" else 2 * k
    i = np.arange(2, n + 1)
    return 2.0 * r * np.sin((i - 1) * math.pi / n)


def interaction_sum(k: int, r: float, eta: float,
                    alternating: bool = False) -> float:
    """Exact finite interaction sum over the polygon neighbors of x^1.

    Non-alternating: sum_{i=2}^{k} d_i^(-eta) on the k-gon.
    Alternating: sum_{i=2}^{2k} (-1)^i d_i^(-eta) on the 2k-gon (nearest
    neighbor enters with + sign).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if r <= 0:
        raise ValueError("r must be positive")
    mode = "sign_changing" if alternating else "positive"
    d = chord_lengths(k, r, mode)
    terms = d ** (-float(eta))
    if alternating:
        i = np.arange(2, 2 * k + 1)
        terms = terms * ((-1.0) ** i)
    return math.fsum(terms.tolist())


def interaction_asymptote(k: int, r: float, eta: float,
                          alternating: bool = False) -> float:
    """Leading large-k value of the interaction sum.

    From sin x ~ x, the non-alternating k-gon sum approaches
    (2 zeta(eta) / (2 pi)^eta) * k^eta / r^eta and the alternating 2k-gon
    sum approaches (2 eta_D(eta) / (2 pi)^eta) * (2k)^eta / r^eta with
    eta_D the Dirichlet eta function.
    """
    if eta <= 1.0:
        raise ValueError("asymptote requires eta > 1")
    if alternating:
        coeff = 2.0 * float(dirichlet_eta(eta)) / (2.0 * math.pi) ** eta
        n = 2 * k
    else:
        coeff = 2.0 * float(zeta_fn(eta)) / (2.0 * math.pi) ** eta
        n = k
    return coeff * n ** eta / r ** eta
