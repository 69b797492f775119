"""Weighted sup-norms evaluated as discrete suprema over structured clouds.

The star norm weights |u| by a sum of powers (1+|x-x^i|)^-((N-2s)/2+tau)
over the bubble centers; the double-star norm uses exponent (N+2s)/2+tau.
A sup over R^N is approximated by a deterministic point cloud: radial
shells around each center, mid-sector probes between adjacent centers,
and far-field rays.  The discrete sup is a lower bound of the true sup by
construction and is treated as the operational norm throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .params import ProblemParams

__all__ = ["NormSpec", "NormResult", "star_norm", "dstar_norm"]

_SHELLS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
_SHELLS_FINE = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0,
                4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0)


def _lattice_directions(N: int, coords) -> np.ndarray:
    """The 26 normalized nonzero {-1,0,1}^3 vectors in the given coordinates."""
    dirs = []
    for combo in itertools.product((-1.0, 0.0, 1.0), repeat=3):
        if all(c == 0.0 for c in combo):
            continue
        v = np.zeros(N)
        for c, j in zip(combo, coords):
            v[j] = c
        dirs.append(v / np.linalg.norm(v))
    return np.array(dirs)


def build_cloud(centers: np.ndarray, eps: float, level: int = 0) -> np.ndarray:
    """Deterministic sample cloud for the discrete sup.

    Level 0: 8 shells (radii eps * {0, 1/2, 1, 2, 4, 8, 16, 32}) times 26
    lattice directions per center, plus mid-sector points between adjacent
    centers and far-field probes.  Each refinement level doubles shells and
    directions.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    k, N = centers.shape
    shells = np.array(_SHELLS if level == 0 else _SHELLS_FINE)
    dirs = _lattice_directions(N, (0, 1, 2))
    if level > 0 and N >= 5:
        dirs = np.concatenate([dirs, _lattice_directions(N, (0, 3, 4))])

    pts = [centers]
    offsets = shells[:, None, None] * eps * dirs[None, :, :]
    pts.append((centers[:, None, None, :] + offsets[None, :, :, :])
               .reshape(-1, N))

    # mid-sector probes between consecutive centers
    for i in range(k):
        mid = 0.5 * (centers[i] + centers[(i + 1) % k])
        pts.append(mid[None, :])
        pts.append(mid[None, :] * 0.5)

    # far-field rays
    ring = max(float(np.max(np.linalg.norm(centers, axis=1))), eps, 1.0)
    for fac in (2.0, 4.0, 8.0, 16.0):
        pts.append(fac * ring * dirs[:: max(1, len(dirs) // 6)])
    pts.append(np.zeros((1, N)))
    return np.unique(np.concatenate(pts), axis=0)


@dataclass(frozen=True)
class NormSpec:
    """Centers, exponent, flavor, and sample cloud of a weighted sup-norm."""

    centers: np.ndarray
    p: ProblemParams
    flavor: str = "star"
    eps: float = 1.0
    level: int = 0
    cloud: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.flavor not in ("star", "dstar"):
            raise ValueError("flavor must be 'star' or 'dstar'")
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", c)
        if self.cloud is None:
            object.__setattr__(self, "cloud",
                               build_cloud(c, self.eps, self.level))
        if len(self.cloud) == 0:
            raise ValueError("empty sample set")

    @property
    def exponent(self) -> float:
        half = (self.p.N - 2 * self.p.s if self.flavor == "star"
                else self.p.N + 2 * self.p.s) / 2.0
        return half + self.p.tau

    def weight(self, x) -> np.ndarray:
        """Sum over centers of (1+|x-x^i|)^-exponent, shape (...,)."""
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x[..., None, :] - self.centers, axis=-1)
        return ((1.0 + d) ** (-self.exponent)).sum(axis=-1)

    def refined(self) -> "NormSpec":
        return NormSpec(centers=self.centers, p=self.p, flavor=self.flavor,
                        eps=self.eps, level=self.level + 1)


@dataclass(frozen=True)
class NormResult:
    """Discrete weighted sup with the point attaining it."""

    value: float
    argmax: np.ndarray

    def __float__(self):
        return self.value


def _weighted_sup(u, spec: NormSpec) -> NormResult:
    vals = np.abs(np.asarray(u(spec.cloud), dtype=float))
    ratio = vals / spec.weight(spec.cloud)
    i = int(np.argmax(ratio))
    return NormResult(float(ratio[i]), spec.cloud[i].copy())


def star_norm(u, spec: NormSpec) -> NormResult:
    """Discrete sup of |u(x)| over the sum of (1+|x-x^i|)^-((N-2s)/2+tau)."""
    if spec.flavor != "star":
        spec = NormSpec(centers=spec.centers, p=spec.p, flavor="star",
                        eps=spec.eps, level=spec.level)
    return _weighted_sup(u, spec)


def dstar_norm(f, spec: NormSpec) -> NormResult:
    """Discrete sup of |f(x)| over the sum of (1+|x-x^i|)^-((N+2s)/2+tau)."""
    if spec.flavor != "dstar":
        spec = NormSpec(centers=spec.centers, p=spec.p, flavor="dstar",
                        eps=spec.eps, level=spec.level)
    return _weighted_sup(f, spec)
