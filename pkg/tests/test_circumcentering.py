"""Circumcenter of a point and its two reflections, and the PCRM operator."""
import numpy as np
import pytest

from cfeas.circumcentering import circumcenter, pcrm
from cfeas.errors import DegenerateCircumcenter
from cfeas.geometry import Ball, Halfspace, ProblemPair, project
from cfeas.oracles import circumcenter_residuals, supporting_halfspace_projection
from cfeas.sampling import make_rng


def test_equidistance_and_span_random_triples():
    rng = make_rng(0)
    for _ in range(300):
        dim = int(rng.integers(2, 11))
        z = rng.standard_normal(dim)
        v = rng.standard_normal(dim)
        w = rng.standard_normal(dim)
        res = circumcenter(z, v, w)
        if res.case != "full_rank":
            continue
        eq, span = circumcenter_residuals(z, v, w, res.center)
        scale = 1.0 + max(np.linalg.norm(z), np.linalg.norm(v), np.linalg.norm(w))
        assert eq <= 1e-9 * scale
        assert span <= 1e-9 * scale


def test_all_points_coincident():
    z = np.array([1.0, 2.0])
    res = circumcenter(z, z.copy(), z.copy())
    assert res.case == "all_coincident"
    assert np.allclose(res.center, z)


def test_one_pair_coincident_gives_midpoint():
    z = np.array([0.0, 0.0])
    v = np.array([2.0, 0.0])
    res = circumcenter(z, v, z.copy())
    assert res.case == "coincident_pair"
    assert np.allclose(res.center, [1.0, 0.0])


def test_collinear_distinct_points_degenerate():
    z = np.array([0.0, 0.0])
    v = np.array([1.0, 0.0])
    w = np.array([2.0, 0.0])
    with pytest.raises(DegenerateCircumcenter):
        circumcenter(z, v, w)


def test_planar_triangle_matches_analytic_circumcenter():
    # right triangle: circumcenter is the hypotenuse midpoint
    z = np.array([0.0, 0.0])
    v = np.array([4.0, 0.0])
    w = np.array([0.0, 2.0])
    res = circumcenter(z, v, w)
    assert np.allclose(res.center, [2.0, 1.0], atol=1e-12)


def test_circumcenter_embeds_in_higher_dimension():
    rng = make_rng(3)
    z2 = np.array([0.0, 0.0])
    v2 = np.array([4.0, 0.0])
    w2 = np.array([0.0, 2.0])
    q, _ = np.linalg.qr(rng.standard_normal((7, 2)))
    shift = rng.standard_normal(7)
    res = circumcenter(q @ z2 + shift, q @ v2 + shift, q @ w2 + shift)
    assert np.allclose(res.center, q @ np.array([2.0, 1.0]) + shift, atol=1e-10)


def test_pcrm_orthogonal_halfspaces():
    # X = {x <= 0}, Y = {y <= 0}; from (1,1) the circumcenter lands at origin
    X = Halfspace(np.array([1.0, 0.0]), 0.0)
    Y = Halfspace(np.array([0.0, 1.0]), 0.0)
    pair = ProblemPair(X=X, Y=Y, z0=np.array([1.0, 1.0]))
    out = pcrm(pair, np.array([1.0, 1.0]))
    assert np.allclose(out, [0.0, 0.0], atol=1e-12)


def test_pcrm_in_y_reduces_to_px():
    X = Ball(np.zeros(3), 1.0)
    Y = Halfspace(np.array([0.0, 0.0, 1.0]), 5.0)
    pair = ProblemPair(X=X, Y=Y, z0=np.zeros(3))
    z = np.array([3.0, 0.0, 0.0])  # already in Y
    out = pcrm(pair, z)
    assert np.allclose(out, project(pair.X, z), atol=1e-12)


def test_pcrm_matches_supporting_halfspace_qp_on_centralized_points():
    # the centralizer output is always centralized, so it feeds the identity
    # PCRM(z) = P over the intersection of the two supporting halfspaces
    from cfeas.operators import centralize

    rng = make_rng(9)
    strict = 0
    for _ in range(500):
        dim = int(rng.integers(2, 8))
        c1 = rng.standard_normal(dim)
        u = _unit(rng, dim)
        c2 = c1 + rng.uniform(1.7, 1.95) * u
        v = rng.standard_normal(dim)
        v -= (v @ u) * u
        v /= np.linalg.norm(v)
        pair = ProblemPair(X=Ball(c1, 1.0), Y=Ball(c2, 1.0), z0=np.zeros(dim))
        # a lateral boundary point of Y whose X-projection leaves Y, so small
        # interpolation weights produce strictly centralized points
        y = project(pair.Y, c2 + 3.0 * v)
        z, px = centralize(pair, y, float(rng.uniform(0.05, 0.3)))
        py = project(pair.Y, z)
        if float((z - px) @ (z - py)) < -1e-10:
            strict += 1
        out = pcrm(pair, z, px=px, py=py)
        ref = supporting_halfspace_projection(pair, z, px=px, py=py)
        assert np.linalg.norm(out - ref) <= 1e-8 * (1.0 + np.linalg.norm(ref))
    assert strict >= 50


def _unit(rng, dim):
    u = rng.standard_normal(dim)
    return u / np.linalg.norm(u)
