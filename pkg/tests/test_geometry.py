"""Polygon configurations, chord law, interaction sums and asymptotes."""

import math

import numpy as np
import pytest

from multibump.geometry import (build_ansatz, chord_lengths,
                                interaction_asymptote, interaction_sum,
                                polygon_centers, sector_of, symmetry_check)
from multibump.params import ProblemParams

P = ProblemParams()


def test_square_diagonal_neighbor():
    ans = build_ansatz(P, 4, 1.0, 1.0)
    c = ans.centers()
    assert np.linalg.norm(c[1] - c[0]) == pytest.approx(math.sqrt(2.0),
                                                        rel=1e-14)


def test_chord_law_matches_distances():
    for k, mode in ((3, "positive"), (7, "positive"), (4, "sign_changing")):
        centers, signs = polygon_centers(P.N, k, 2.5, mode)
        d = np.linalg.norm(centers[1:] - centers[0], axis=1)
        assert np.allclose(d, chord_lengths(k, 2.5, mode), rtol=1e-13)
        if mode == "sign_changing":
            assert np.all(signs[::2] == 1) and np.all(signs[1::2] == -1)


def test_interaction_sum_two_bubbles():
    # two antipodal bubbles at distance 2: sum is 2^-eta; eta=2 gives 1/4
    assert interaction_sum(2, 1.0, 2.0) == pytest.approx(0.25, rel=1e-14)


def test_interaction_asymptote_large_k():
    eta = P.n_minus_2s
    for alternating in (False, True):
        exact = interaction_sum(128, 1.0, eta, alternating=alternating)
        approx = interaction_asymptote(128, 1.0, eta, alternating=alternating)
        assert abs(exact - approx) / exact < 0.02


def test_parity_identity_exact():
    """Alternating 2k-gon sum equals (full 2k-gon sum) - 2 (k-gon sum)."""
    eta = P.n_minus_2s
    for k in range(2, 65):
        a = interaction_sum(k, 1.0, eta, alternating=True)
        want = interaction_sum(2 * k, 1.0, eta) - 2 * interaction_sum(
            k, 1.0, eta)
        assert abs(a - want) <= 1e-12 * abs(a)


def test_sector_of():
    assert sector_of(np.array([1.0, 0.1, 0.0, 0.0, 0.0]), 4) == 1
    assert sector_of(np.array([0.0, 1.0, 0.0, 0.0, 0.0]), 4) == 2
    assert sector_of(np.zeros(5), 4) == 1


def test_symmetry_orbits_both_modes():
    for mode in ("positive", "sign_changing"):
        ans = build_ansatz(P, 5, 2.0, 0.6, mode=mode)
        out = symmetry_check(ans, P, 5, mode, tol=1e-10)
        assert out["passed"], out


def test_build_ansatz_validation():
    with pytest.raises(ValueError):
        build_ansatz(P, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        build_ansatz(P, 4, -1.0, 1.0)
    with pytest.raises(ValueError):
        build_ansatz(P, 4, 1.0, 1.0, mode="weird")


def test_ansatz_serialization():
    ans = build_ansatz(P, 3, 1.5, 0.4, mode="sign_changing")
    d = ans.to_dict()
    assert d["k"] == 3 and len(d["centers"]) == 6
    assert sum(d["signs"]) == 0
